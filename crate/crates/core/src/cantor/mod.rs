//! Ternary-address machinery for the middle-thirds Cantor set.
//!
//! Points of the Cantor set are addressed by eventually periodic digit
//! sequences over `{0, 2}`; removed middle thirds are identified by finite
//! gap words. On top of the addressing sit the countable enumeration of gap
//! left endpoints, the quadruple index used to schedule split
//! homeomorphisms, the split homeomorphisms themselves (exact piecewise
//! affine maps carrying one scaled Cantor set onto another), and the
//! two-generator Cantor-preserving system together with its density-witness
//! construction.

mod address;
mod endpoints;
mod membership;
mod split;
mod two_gen;

pub use address::{CantorAddress, GapId, Tail};
pub use endpoints::{left_endpoint, left_endpoint_rank, quad_rank, quad_unrank, QuadIndex};
pub use membership::{distance_to_cantor, membership, membership_enclosure, Membership};
pub use split::{build_split_homeo, SplitHomeo, SplitHomeoSpec};
pub use two_gen::{
    build_f, build_g, density_witness, kn_locate, CoordinateEvaluator, KnCoordinate, KnPosition,
    Region,
};

use crate::rational::Rational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CantorError {
    #[error("point {0} outside the unit interval")]
    OutOfUnitInterval(Rational),
    #[error("address {0} is not a gap left endpoint")]
    NotALeftEndpoint(String),
    #[error("quadruple violates ordering: {0}")]
    InvalidQuadruple(String),
    #[error("pin addresses out of order: {0}")]
    PinOrderMismatch(String),
    #[error("input {0} is a terminal edge")]
    TerminalEdgeInput(Rational),
    #[error("point {0} is not in the Cantor set")]
    NotInCantorSet(Rational),
    #[error("bad address text {0:?}: {1}")]
    BadAddressText(String, String),
}
