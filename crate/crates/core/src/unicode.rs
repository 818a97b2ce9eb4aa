//! Scalar-value offset helpers shared by the span-handling modules.

/// Number of Unicode scalar values in `s`.
pub(crate) fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Byte offset of the `char_idx`-th scalar value, or `s.len()` when
/// `char_idx` equals the scalar-value count.
///
/// Panics if `char_idx` is past the end; callers validate against
/// `char_len` first.
pub(crate) fn byte_offset(s: &str, char_idx: usize) -> usize {
    if char_idx == 0 {
        return 0;
    }
    match s.char_indices().nth(char_idx) {
        Some((b, _)) => b,
        None => {
            let n = char_len(s);
            assert!(
                char_idx <= n,
                "char index {char_idx} out of bounds for string of {n} scalar values"
            );
            s.len()
        }
    }
}

/// Slice `s` by scalar-value indices `[start, end)`.
pub(crate) fn slice_chars(s: &str, start: usize, end: usize) -> &str {
    let b0 = byte_offset(s, start);
    let b1 = byte_offset(s, end);
    &s[b0..b1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_count_scalar_values_not_bytes() {
        let s = "a★b";
        assert_eq!(char_len(s), 3);
        assert_eq!(byte_offset(s, 1), 1);
        assert_eq!(byte_offset(s, 2), 4); // ★ is 3 bytes
        assert_eq!(slice_chars(s, 1, 2), "★");
        assert_eq!(slice_chars(s, 0, 3), s);
    }

    #[test]
    fn end_of_string_offset_is_valid() {
        assert_eq!(byte_offset("", 0), 0);
        assert_eq!(byte_offset("ab", 2), 2);
        assert_eq!(slice_chars("ab", 2, 2), "");
    }
}
