//! The core annotation model: text points, text segments, annotations, and
//! document views.
//!
//! A text point is a position between characters of a document, counted in
//! Unicode scalar values from the start. A text segment is a half-open span
//! `[start, end)` plus a snapshot of the text it covered when it was created
//! (its *anchor text*). An annotation attaches content, an optional intent,
//! and free-form metadata to a segment. A document view pairs a document with
//! its annotation set; re-tagging maps a view onto an updated document.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::unicode::{char_len, slice_chars};

/// A position in a document, measured in Unicode scalar values from the
/// start, zero-indexed.
///
/// A point is *compatible* with a document when it lies on or inside the
/// document's boundaries (`0 ..= len`); it *refers to a character* only when
/// it is strictly inside (`0 .. len`). The end-of-document point is valid so
/// that empty ("point") anchors at the very end of a file are representable.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct TextPoint(pub usize);

impl TextPoint {
    /// True iff `0 <= self <= len(doc)` in scalar values.
    pub fn compatible(self, doc: &str) -> bool {
        self.0 <= char_len(doc)
    }

    /// True iff the point designates an actual character of `doc`.
    pub fn refers_to_char(self, doc: &str) -> bool {
        self.0 < char_len(doc)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for TextPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for TextPoint {
    fn from(index: usize) -> Self {
        TextPoint(index)
    }
}

/// Errors constructing or checking segments against a document.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SegmentError {
    #[error("text point {index} is incompatible with a document of {len} characters")]
    IncompatiblePoint { index: usize, len: usize },
    #[error("inverted range: start {start} > end {end}")]
    InvertedRange { start: usize, end: usize },
    #[error("anchor text ({got:?}) disagrees with the covered substring ({want:?})")]
    AnchorMismatch { want: String, got: String },
    #[error("anchor text length {anchor_len} does not match span length {span_len}")]
    LengthMismatch { anchor_len: usize, span_len: usize },
}

/// Half-open character span `[start, end)` with a snapshot of the covered
/// text.
///
/// The anchor text is empty exactly when `start == end` (a *point anchor*);
/// otherwise the segment is a *range anchor*.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TextSegment {
    pub start: TextPoint,
    pub end: TextPoint,
    pub anchor_text: String,
}

impl TextSegment {
    /// Bind a segment to `doc`, snapshotting the covered substring as the
    /// anchor text.
    pub fn new(doc: &str, start: TextPoint, end: TextPoint) -> Result<Self, SegmentError> {
        let anchor_text = segment_text(doc, start, end)?;
        Ok(TextSegment {
            start,
            end,
            anchor_text,
        })
    }

    /// Assemble a segment from already-known parts, enforcing the span/anchor
    /// length law.
    pub fn from_parts(
        start: TextPoint,
        end: TextPoint,
        anchor_text: impl Into<String>,
    ) -> Result<Self, SegmentError> {
        let anchor_text = anchor_text.into();
        if start > end {
            return Err(SegmentError::InvertedRange {
                start: start.0,
                end: end.0,
            });
        }
        let anchor_len = char_len(&anchor_text);
        if anchor_len != end.0 - start.0 {
            return Err(SegmentError::LengthMismatch {
                anchor_len,
                span_len: end.0 - start.0,
            });
        }
        Ok(TextSegment {
            start,
            end,
            anchor_text,
        })
    }

    /// Span length in scalar values.
    pub fn len(&self) -> usize {
        self.end.0 - self.start.0
    }

    /// True for point anchors (empty spans).
    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn is_point_anchor(&self) -> bool {
        self.is_empty()
    }

    /// Check this segment against a concrete document: both points must be
    /// compatible and the covered substring must equal the anchor text.
    pub fn verify_against(&self, doc: &str) -> Result<(), SegmentError> {
        let covered = segment_text(doc, self.start, self.end)?;
        if covered != self.anchor_text {
            return Err(SegmentError::AnchorMismatch {
                want: covered,
                got: self.anchor_text.clone(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for TextSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {:?}]", self.start, self.end, self.anchor_text)
    }
}

/// True iff `0 <= tp <= len(doc)` in scalar values.
pub fn compatible(tp: TextPoint, doc: &str) -> bool {
    tp.compatible(doc)
}

/// The half-open substring of `doc` from `start` (inclusive) to `end`
/// (exclusive), in scalar-value indices.
pub fn segment_text(doc: &str, start: TextPoint, end: TextPoint) -> Result<String, SegmentError> {
    let len = char_len(doc);
    for point in [start, end] {
        if point.0 > len {
            return Err(SegmentError::IncompatiblePoint {
                index: point.0,
                len,
            });
        }
    }
    if start > end {
        return Err(SegmentError::InvertedRange {
            start: start.0,
            end: end.0,
        });
    }
    Ok(slice_chars(doc, start.0, end.0).to_string())
}

/// An annotation: a segment plus content, an optional intent, and free-form
/// metadata.
///
/// The intent is stored verbatim and persisted, but the default re-tagging
/// prompt does not consume it; it exists so callers can layer intent-aware
/// policies on top without a schema change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: String,
    #[serde(flatten)]
    pub segment: TextSegment,
    pub content: String,
    #[serde(default)]
    pub intent: Option<String>,
    #[serde(default)]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

impl Annotation {
    pub fn new(id: impl Into<String>, segment: TextSegment, content: impl Into<String>) -> Self {
        Annotation {
            id: id.into(),
            segment,
            content: content.into(),
            intent: None,
            metadata: serde_json::Map::new(),
        }
    }

    pub fn with_intent(mut self, intent: impl Into<String>) -> Self {
        self.intent = Some(intent.into());
        self
    }
}

/// Content hash of a document, recorded by algorithm name so sidecar files
/// written by different implementations interoperate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digest {
    pub algo: String,
    pub hex: String,
}

impl Digest {
    /// SHA-256 over the document's UTF-8 bytes.
    pub fn of_document(doc: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(doc.as_bytes());
        Digest {
            algo: "sha256".to_string(),
            hex: hex::encode(hasher.finalize()),
        }
    }

    pub fn matches(&self, doc: &str) -> bool {
        self.algo == "sha256" && Digest::of_document(doc).hex == self.hex
    }
}

/// A document paired with its annotation set.
///
/// `document_path` is the (usually relative) path recorded in the sidecar so
/// a loaded sidecar can say which file it belongs to; the document *content*
/// is what segments are validated against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentView {
    pub document: String,
    pub document_path: String,
    pub digest: Digest,
    pub annotations: Vec<Annotation>,
}

impl DocumentView {
    pub fn new(document: impl Into<String>, document_path: impl Into<String>) -> Self {
        let document = document.into();
        let digest = Digest::of_document(&document);
        DocumentView {
            document,
            document_path: document_path.into(),
            digest,
            annotations: Vec::new(),
        }
    }

    /// Check every view invariant: digest freshness, id uniqueness, and
    /// anchor coherence of all segments.
    pub fn validate(&self) -> Result<(), ViewError> {
        if !self.digest.matches(&self.document) {
            return Err(ViewError::StaleDigest {
                algo: self.digest.algo.clone(),
                recorded: self.digest.hex.clone(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for ann in &self.annotations {
            if !seen.insert(ann.id.as_str()) {
                return Err(ViewError::DuplicateId(ann.id.clone()));
            }
            ann.segment
                .verify_against(&self.document)
                .map_err(|source| ViewError::BadSegment {
                    id: ann.id.clone(),
                    source,
                })?;
        }
        Ok(())
    }

    pub fn annotation(&self, id: &str) -> Option<&Annotation> {
        self.annotations.iter().find(|a| a.id == id)
    }

    /// Add an annotation after verifying its segment against the document.
    pub fn push(&mut self, ann: Annotation) -> Result<(), ViewError> {
        if self.annotations.iter().any(|a| a.id == ann.id) {
            return Err(ViewError::DuplicateId(ann.id));
        }
        ann.segment
            .verify_against(&self.document)
            .map_err(|source| ViewError::BadSegment {
                id: ann.id.clone(),
                source,
            })?;
        self.annotations.push(ann);
        Ok(())
    }
}

/// Violations of the view invariants.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ViewError {
    #[error("digest ({algo}:{recorded}) does not match the document content")]
    StaleDigest { algo: String, recorded: String },
    #[error("duplicate annotation id {0:?}")]
    DuplicateId(String),
    #[error("annotation {id:?} has an invalid segment: {source}")]
    BadSegment {
        id: String,
        #[source]
        source: SegmentError,
    },
}

/// What happened to one annotation when a view was mapped onto an updated
/// document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MapOutcome {
    /// The anchor is byte-for-byte where it used to be.
    Unchanged,
    /// A new valid anchor was found at a different position (or with
    /// different text).
    Moved,
    /// No sufficiently similar anchor exists in the updated document.
    Orphaned,
    /// Resolution failed (no match, malformed reply, transport trouble).
    Failed,
    /// Multiple placements were equally plausible. No shipped resolver emits
    /// this today; it is part of the outcome vocabulary for resolvers that
    /// detect ambiguity.
    Ambiguous,
}

impl MapOutcome {
    /// Outcomes that leave the annotation with a usable segment.
    pub fn is_placed(self) -> bool {
        matches!(
            self,
            MapOutcome::Unchanged | MapOutcome::Moved | MapOutcome::Ambiguous
        )
    }
}

impl fmt::Display for MapOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MapOutcome::Unchanged => "unchanged",
            MapOutcome::Moved => "moved",
            MapOutcome::Orphaned => "orphaned",
            MapOutcome::Failed => "failed",
            MapOutcome::Ambiguous => "ambiguous",
        };
        f.write_str(s)
    }
}

/// One annotation after mapping.
///
/// For placed outcomes the embedded annotation carries a segment valid
/// against the updated document. For `Orphaned`/`Failed` the segment is the
/// stale pre-edit one, kept for reference; [`MappedAnnotation::mapped_segment`]
/// returns `None` in that case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedAnnotation {
    pub annotation: Annotation,
    pub outcome: MapOutcome,
    pub diagnostics: String,
}

impl MappedAnnotation {
    pub fn mapped_segment(&self) -> Option<&TextSegment> {
        self.outcome.is_placed().then_some(&self.annotation.segment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_compatibility_follows_document_length() {
        // Point 4 designates "C" in one string and nothing in a short one.
        let abra = "ABRACADABRA";
        assert!(TextPoint(4).compatible(abra));
        assert_eq!(slice_chars(abra, 4, 5), "C");
        assert!(!TextPoint(4).compatible("Fun"));
        // End-of-document point is compatible but refers to no character.
        assert!(TextPoint(0).compatible(""));
        assert!(!TextPoint(0).refers_to_char(""));
        assert!(TextPoint(3).compatible("Fun"));
        assert!(!TextPoint(3).refers_to_char("Fun"));
    }

    #[test]
    fn segment_text_covers_half_open_span() {
        assert_eq!(
            segment_text("Aladdin", TextPoint(1), TextPoint(4)).unwrap(),
            "lad"
        );
        assert_eq!(
            segment_text("boy alad.", TextPoint(4), TextPoint(8)).unwrap(),
            "alad"
        );
        assert_eq!(segment_text("x", TextPoint(0), TextPoint(0)).unwrap(), "");
    }

    #[test]
    fn segment_text_rejects_bad_points() {
        assert_eq!(
            segment_text("Fun", TextPoint(1), TextPoint(4)).unwrap_err(),
            SegmentError::IncompatiblePoint { index: 4, len: 3 }
        );
        assert_eq!(
            segment_text("Aladdin", TextPoint(4), TextPoint(1)).unwrap_err(),
            SegmentError::InvertedRange { start: 4, end: 1 }
        );
    }

    #[test]
    fn segment_indices_are_scalar_values() {
        // The delimiter ★ is 3 bytes but one scalar value.
        let doc = "a★b★c";
        let seg = TextSegment::new(doc, TextPoint(1), TextPoint(4)).unwrap();
        assert_eq!(seg.anchor_text, "★b★");
        assert_eq!(seg.len(), 3);
        seg.verify_against(doc).unwrap();
    }

    #[test]
    fn anchor_text_empty_iff_point_anchor() {
        let seg = TextSegment::from_parts(TextPoint(2), TextPoint(2), "").unwrap();
        assert!(seg.is_point_anchor());
        let err = TextSegment::from_parts(TextPoint(2), TextPoint(2), "x").unwrap_err();
        assert_eq!(
            err,
            SegmentError::LengthMismatch {
                anchor_len: 1,
                span_len: 0
            }
        );
        let err = TextSegment::from_parts(TextPoint(2), TextPoint(4), "").unwrap_err();
        assert!(matches!(err, SegmentError::LengthMismatch { .. }));
    }

    #[test]
    fn verify_against_detects_anchor_drift() {
        // [1, 4, "lad"] is a segment of "Aladdin" but not of "ABRACADABRA".
        let seg = TextSegment::from_parts(TextPoint(1), TextPoint(4), "lad").unwrap();
        seg.verify_against("Aladdin").unwrap();
        assert!(matches!(
            seg.verify_against("ABRACADABRA").unwrap_err(),
            SegmentError::AnchorMismatch { .. }
        ));
        assert!(matches!(
            seg.verify_against("The boy Aladdin").unwrap_err(),
            SegmentError::AnchorMismatch { .. }
        ));
    }

    #[test]
    fn view_validation_catches_duplicates_and_bad_anchors() {
        let doc = "boy alad.";
        let seg = TextSegment::new(doc, TextPoint(4), TextPoint(8)).unwrap();
        let mut view = DocumentView::new(doc, "story.txt");
        view.push(Annotation::new("a1", seg.clone(), "The boy's name"))
            .unwrap();
        view.validate().unwrap();

        let dup = Annotation::new("a1", seg.clone(), "again");
        assert_eq!(
            view.push(dup).unwrap_err(),
            ViewError::DuplicateId("a1".into())
        );

        view.annotations.push(Annotation::new(
            "a2",
            TextSegment::from_parts(TextPoint(0), TextPoint(3), "xyz").unwrap(),
            "bad",
        ));
        assert!(matches!(
            view.validate().unwrap_err(),
            ViewError::BadSegment { .. }
        ));
    }

    #[test]
    fn digest_detects_document_change() {
        let view = DocumentView::new("hello", "h.txt");
        assert!(view.digest.matches("hello"));
        assert!(!view.digest.matches("hello!"));
        assert_eq!(view.digest.algo, "sha256");
    }

    #[test]
    fn mapped_segment_only_for_placed_outcomes() {
        let seg = TextSegment::from_parts(TextPoint(0), TextPoint(1), "x").unwrap();
        let ann = Annotation::new("a", seg, "c");
        let placed = MappedAnnotation {
            annotation: ann.clone(),
            outcome: MapOutcome::Moved,
            diagnostics: String::new(),
        };
        assert!(placed.mapped_segment().is_some());
        let failed = MappedAnnotation {
            annotation: ann,
            outcome: MapOutcome::Failed,
            diagnostics: "no match".into(),
        };
        assert!(failed.mapped_segment().is_none());
    }
}
