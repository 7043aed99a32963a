//! Group and semigroup actions: generator systems, orbit enumeration, and
//! the structural searches built on them.

mod circle;
mod orbit;
mod system;
mod transport;
mod witness;

pub use circle::{range_of, reduce_circle, ComponentDecomposition};
pub use orbit::{orbit, orbit_with_rays, verify_witnesses, OrbitBudget, OrbitPoint, OrbitSample};
pub use system::{common_fixed_points, eval_word, GeneratorSystem};
pub use transport::{stabilizer_words, transport_word};
pub use witness::{witness_interval, WitnessCondition, WitnessInterval};

use crate::rational::Rational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error(transparent)]
    Map(#[from] crate::homeo::MapError),
    #[error("finite orbit set not invariant: generator {generator} moves {point}")]
    PNotInvariant { generator: String, point: Rational },
    #[error("neither witness condition verified: {0}")]
    NeitherConditionVerified(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("generator system invalid: {0}")]
    InvalidSystem(String),
}
