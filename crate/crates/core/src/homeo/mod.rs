//! Piecewise monotone maps with exact rational data.
//!
//! A [`PiecewiseMap`] is an orientation-preserving homeomorphism (or
//! injective endomorphism) of the unit interval, the circle, or the line,
//! given by an ordered list of pieces. Affine pieces evaluate exactly; power
//! pieces evaluate through validated root extraction; Cantor-aligned and
//! rule pieces delegate to their own evaluators. Validation checks
//! continuity, monotonicity, and endpoint behavior before a map is used.

mod map;
mod piece;
mod validate;
mod word;

pub use map::{identity_map, DomainKind, FixedPointFlag, PiecewiseMap};
pub use piece::{MapRule, Piece, PieceKind};
pub use validate::{join_tolerance, validate_map, BreakpointCheck, ValidationReport};
pub use word::{parse_word, ExactWordEvaluator, Letter, MapWord};

use crate::rational::Rational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("piece domains overlap near {0}")]
    OverlappingPieces(Rational),
    #[error("gap in map domain near {0}")]
    GapInDomain(Rational),
    #[error("piece over [{0}, {1}] is not strictly increasing")]
    NonMonotonePiece(Rational, Rational),
    #[error("point {0} outside map domain")]
    OutOfDomain(Rational),
    #[error("inverse letter {letter} applied against non-surjective map {map}")]
    InverseOfEndomorphism { map: String, letter: usize },
    #[error("value {0} not in map image")]
    NotInImage(Rational),
    #[error("composition requires all-affine maps")]
    NonAffineInput,
    #[error("word letter {index} ({name}) failed: {source}")]
    MidWord {
        index: usize,
        name: String,
        #[source]
        source: Box<MapError>,
    },
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("map {0} failed validation: {1}")]
    Unusable(String, String),
}
