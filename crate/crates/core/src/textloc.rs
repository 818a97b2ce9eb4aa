//! Deterministic text utilities: line numbering, line-span extraction,
//! whitespace normalization, and occurrence-indexed matching.
//!
//! The matcher is the deterministic half of the re-tagging protocol: the
//! model reports the segment text plus a line range, and `find_matches` /
//! `select_occurrence` locate the concrete character span inside that range.
//!
//! Lines are split on LF. A trailing CR is part of the line's content for
//! numbering and span purposes, but counts as whitespace for normalization,
//! so documents with mixed line-ending conventions still match.

use serde::{Deserialize, Serialize};

use crate::annotation::{TextPoint, TextSegment};
use crate::unicode::char_len;

/// Whitespace for normalization purposes: space, tab, CR, LF.
///
/// Deliberately narrower than Unicode whitespace; exotic spaces are content.
pub fn is_protocol_whitespace(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\r' | '\n')
}

/// Errors from the matching operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TextLocError {
    #[error("needle is empty{0}")]
    EmptyNeedle(&'static str),
    #[error("line span {start_line}..{end_line} out of range for a document of {line_count} lines")]
    SpanOutOfRange {
        start_line: usize,
        end_line: usize,
        line_count: usize,
    },
    #[error("occurrence {wanted} requested but only {available} matches exist")]
    OccurrenceOutOfRange { wanted: usize, available: usize },
    #[error("invalid line span: lines are 1-indexed and start must not exceed end ({start_line}..{end_line})")]
    InvalidLineSpan { start_line: usize, end_line: usize },
}

/// An inclusive, 1-indexed range of lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineSpan {
    start_line: usize,
    end_line: usize,
}

impl LineSpan {
    pub fn new(start_line: usize, end_line: usize) -> Result<Self, TextLocError> {
        if start_line == 0 || end_line < start_line {
            return Err(TextLocError::InvalidLineSpan {
                start_line,
                end_line,
            });
        }
        Ok(LineSpan {
            start_line,
            end_line,
        })
    }

    pub fn start_line(&self) -> usize {
        self.start_line
    }

    pub fn end_line(&self) -> usize {
        self.end_line
    }

    /// Widen by one line on each side, clamped to `1..=line_count`.
    pub fn expanded_once(&self, line_count: usize) -> LineSpan {
        LineSpan {
            start_line: self.start_line.saturating_sub(1).max(1),
            end_line: (self.end_line + 1).min(line_count),
        }
    }
}

/// One match of a needle inside a haystack.
///
/// `occurrence` is the 1-indexed rank among all matches of the same search,
/// leftmost first. The segment's anchor text is the haystack's exact text,
/// which under normalized matching may differ from the needle in whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub segment: TextSegment,
    pub occurrence: usize,
}

/// How needles are compared against the haystack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchMode {
    /// Character-for-character substring equality.
    Exact,
    /// Whitespace-normalized equality over minimal spans.
    Normalized,
}

/// Prefix every line with `«n»:` (1-indexed, no padding, no space), the
/// rendering the re-tag prompt uses so the model can cite line numbers.
///
/// Everything else about the text is preserved; stripping the prefixes
/// recovers the input exactly.
pub fn number_lines(doc: &str) -> String {
    doc.split('\n')
        .enumerate()
        .map(|(i, line)| format!("{}:{}", i + 1, line))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Number of lines under the LF-splitting convention. The empty document has
/// one (empty) line; a trailing LF opens a final empty line.
pub fn line_count(doc: &str) -> usize {
    doc.split('\n').count()
}

/// 1-indexed line containing the character at scalar-value index `char_idx`.
/// The end-of-document index maps to the last line.
pub fn line_of_char(doc: &str, char_idx: usize) -> usize {
    let mut line = 1;
    for (i, c) in doc.chars().enumerate() {
        if i >= char_idx {
            break;
        }
        if c == '\n' {
            line += 1;
        }
    }
    line
}

/// Character span covering whole lines `span.start_line ..= span.end_line`,
/// excluding the final line's terminator.
pub fn line_span_chars(doc: &str, span: &LineSpan) -> Result<TextSegment, TextLocError> {
    let total = line_count(doc);
    if span.end_line > total {
        return Err(TextLocError::SpanOutOfRange {
            start_line: span.start_line,
            end_line: span.end_line,
            line_count: total,
        });
    }

    // Walk lines once, tracking char offsets.
    let mut offset = 0usize;
    let mut start_char = 0usize;
    let mut end_char = 0usize;
    for (i, line) in doc.split('\n').enumerate() {
        let line_no = i + 1;
        let line_len = char_len(line);
        if line_no == span.start_line {
            start_char = offset;
        }
        if line_no == span.end_line {
            end_char = offset + line_len;
            break;
        }
        offset += line_len + 1; // the LF
    }
    let seg = TextSegment::new(doc, TextPoint(start_char), TextPoint(end_char))
        .expect("line walk stays in bounds");
    Ok(seg)
}

/// Trim leading/trailing whitespace and collapse every internal run of
/// whitespace (space, tab, CR, LF) to a single space. Idempotent.
pub fn normalize_ws(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for c in s.chars() {
        if is_protocol_whitespace(c) {
            if !out.is_empty() {
                pending_space = true;
            }
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}

/// All leftmost, non-overlapping matches of `needle` in `haystack`, in
/// document order, occurrence-numbered from 1.
///
/// In `Normalized` mode a match is any *minimal* span whose normalized text
/// equals the normalized needle; minimality means the span neither starts nor
/// ends with whitespace, so the recovered anchors reflect the document's own
/// text rather than any stray whitespace around the needle.
pub fn find_matches(
    haystack: &str,
    needle: &str,
    mode: MatchMode,
) -> Result<Vec<MatchResult>, TextLocError> {
    if needle.is_empty() {
        return Err(TextLocError::EmptyNeedle(""));
    }
    let spans = match mode {
        MatchMode::Exact => exact_spans(haystack, needle),
        MatchMode::Normalized => {
            let target = normalize_ws(needle);
            if target.is_empty() {
                return Err(TextLocError::EmptyNeedle(
                    " after whitespace normalization",
                ));
            }
            normalized_spans(haystack, &target)
        }
    };
    Ok(spans
        .into_iter()
        .enumerate()
        .map(|(i, (start, end))| MatchResult {
            segment: TextSegment::new(haystack, TextPoint(start), TextPoint(end))
                .expect("matcher spans stay in bounds"),
            occurrence: i + 1,
        })
        .collect())
}

/// The k-th (1-indexed) match from a `find_matches` result.
pub fn select_occurrence(matches: &[MatchResult], k: usize) -> Result<&MatchResult, TextLocError> {
    if k == 0 || k > matches.len() {
        return Err(TextLocError::OccurrenceOutOfRange {
            wanted: k,
            available: matches.len(),
        });
    }
    Ok(&matches[k - 1])
}

/// Leftmost non-overlapping exact occurrences, as char-index spans.
fn exact_spans(haystack: &str, needle: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let needle_chars = char_len(needle);
    let mut byte_pos = 0usize;
    let mut char_pos = 0usize;
    while byte_pos <= haystack.len() {
        match haystack[byte_pos..].find(needle) {
            None => break,
            Some(rel) => {
                let skipped = &haystack[byte_pos..byte_pos + rel];
                let start = char_pos + char_len(skipped);
                spans.push((start, start + needle_chars));
                byte_pos += rel + needle.len();
                char_pos = start + needle_chars;
            }
        }
    }
    spans
}

/// Leftmost non-overlapping minimal spans whose normalized text equals
/// `target` (itself already normalized and non-empty).
fn normalized_spans(haystack: &str, target: &str) -> Vec<(usize, usize)> {
    let tokens: Vec<&str> = target.split(' ').collect();
    let chars: Vec<char> = haystack.chars().collect();
    let mut spans = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        match match_tokens_at(&chars, i, &tokens) {
            Some(end) => {
                spans.push((i, end));
                i = end;
            }
            None => i += 1,
        }
    }
    spans
}

/// Try to match the token sequence starting exactly at `start`; a match
/// consumes each token verbatim with one-or-more whitespace characters
/// between consecutive tokens and nothing else. Returns the end index.
fn match_tokens_at(chars: &[char], start: usize, tokens: &[&str]) -> Option<usize> {
    let mut pos = start;
    for (t, token) in tokens.iter().enumerate() {
        if t > 0 {
            // At least one whitespace char between tokens; consume the run.
            let ws_start = pos;
            while pos < chars.len() && is_protocol_whitespace(chars[pos]) {
                pos += 1;
            }
            if pos == ws_start {
                return None;
            }
        }
        for expected in token.chars() {
            if pos >= chars.len() || chars[pos] != expected {
                return None;
            }
            pos += 1;
        }
        // The span's token must end here: the next char (if any, and if we
        // are still inside this token's run) must not extend the token.
        // For the final token that means the span simply ends at `pos`;
        // for inner tokens the following whitespace requirement enforces it.
    }
    Some(pos)
}
