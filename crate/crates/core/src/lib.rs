//! Document-external annotations ("magic markup") that survive edits.
//!
//! Annotations are anchored to character spans of a document and stored in a
//! sidecar file next to it, never inside it. After the document is edited, the
//! anchors are recomputed ("re-tagged") either by an LLM-driven protocol
//! ([`retag`]) or by a deterministic string-similarity fallback ([`baseline`]).
//! The crate also ships a synthetic benchmark generator ([`benchgen`]) and an
//! evaluation harness ([`eval`]) that scores re-tagging runs against gold
//! placements using a small failure taxonomy.
//!
//! All span indices throughout the crate are **Unicode scalar values** (Rust
//! `char`s), not bytes: the re-tagging protocol leans on non-ASCII delimiter
//! characters, so byte offsets would be a constant source of off-by-N bugs.

pub mod annotation;
pub mod baseline;
pub mod benchgen;
pub mod cli;
pub mod eval;
pub mod model;
pub mod retag;
pub mod sidecar;
pub mod textloc;

mod unicode;

pub use annotation::{
    Annotation, Digest, DocumentView, MapOutcome, MappedAnnotation, SegmentError, TextPoint,
    TextSegment,
};
pub use sidecar::{load_view, save_view, SidecarError};
pub use textloc::{LineSpan, MatchMode, MatchResult, TextLocError};
