//! Construction grammars: parsing, token annotation, match counting, and
//! per-region feature density.
//!
//! A construction is an ordered sequence of slot-constraints; a token
//! sequence matches it at position i when every slot accepts the token at
//! its offset. All start positions count, so overlapping and nested
//! matches are included.

mod annotate;
mod density;
mod grammar;
mod matcher;

pub use annotate::{annotate, annotate_text, AnnotatedToken, Lexicon, UNK_TAG};
pub use density::{
    feature_density, group_by_region, region_mean_totals, relative_density_from_means,
    write_density_csv,
};
pub use grammar::{Construction, Grammar, SlotConstraint};
pub use matcher::{count_matches, naive_count_matches, slot_matches, Matcher};

#[derive(Debug, thiserror::Error)]
pub enum CxgError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: bad slot `{slot}`: {reason}")]
    BadSlot {
        line: usize,
        slot: String,
        reason: String,
    },
    #[error("line {line}: construction duplicates line {first}")]
    DuplicateConstruction { line: usize, first: usize },
    #[error("lexicon line {line}: expected form<TAB>syn<TAB>sem")]
    BadLexiconRow { line: usize },
    #[error("region `{0}` has no samples")]
    EmptyRegion(String),
    #[error("no samples supplied")]
    NoSamples,
    #[error("density column `{0}` covers a different region set")]
    ColumnMismatch(String),
}
