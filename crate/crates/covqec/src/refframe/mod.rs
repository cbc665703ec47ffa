//! Reference-frame states: outcome densities of the covariant measurement,
//! the weak-model lattice family, survivor bookkeeping for erased copies, and
//! the overlap and fidelity functionals that bound the protocol error.

mod povm;
mod spec;
mod strong;
mod weak;

use thiserror::Error;

use crate::rep::{RepError, YoungDiagram};

pub use povm::{outcome_density, outcome_density_su2, outcome_envelope, sample_outcome, sample_relative, RelativeSample};
pub use spec::{RefFrameEnsemble, RefFrameSpec};
pub use strong::{cost_matrix, f_strong, reference_fidelity, s_cost, strong_combined_spec, ReferenceFidelity, S_COST_CAP};
pub use weak::{
    appendix_e_closed_form, appendix_e_sum, g_weight, interior_set, min_overlap, shifts, signed_amplitude, weak_layout_for_total,
    weak_spec, WeakModelLayout,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RefFrameError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("weights sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("negative weight {weight} on {diagram:?}")]
    NegativeWeight { diagram: YoungDiagram, weight: f64 },
    #[error("diagram {diagram:?} does not have {boxes} boxes")]
    WrongBoxCount { diagram: YoungDiagram, boxes: u32 },
    #[error("index {k} outside 0..={max}")]
    IndexOutOfRange { k: u64, max: u64 },
    #[error("m = {m} is too small for d = {d}; need m >= {min_m}")]
    TooFewPairs { d: usize, m: u32, min_m: u32 },
    #[error("layout does not divide: {0}")]
    Layout(String),
    #[error("all {copies} reference copies erased")]
    AllCopiesErased { copies: usize },
    #[error("copy index {index} out of range for {copies} copies")]
    BadCopyIndex { index: usize, copies: usize },
    #[error("phases must have length {d} and sum to 0 mod 2pi")]
    BadPhases { d: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("density {value} exceeded the envelope {envelope}")]
    EnvelopeExceeded { value: f64, envelope: f64 },
    #[error("cost set has {size} irreps, cap is {cap}")]
    TooLarge { size: usize, cap: usize },
}
