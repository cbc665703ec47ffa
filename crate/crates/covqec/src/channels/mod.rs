//! Channels in Kraus and Choi form, fidelities and distances, covariant channel
//! parametrization, and Haar integration on SU(2).

mod covariant;
mod haar;
mod metrics;
mod types;

use thiserror::Error;

pub use covariant::{
    cov_fidelity_and_errors, covariant_choi, covariant_params, lemma5_bound, phi_plus_defect, twirl_to_covariant,
    CovariantChannel, COVARIANCE_TOL,
};
pub use haar::{
    euler_su2, gauss_legendre, haar_quadrature_su2, haar_special_unitary, haar_su2, haar_unitary,
    rotation_half_angle, spin_matrices, spin_unitary, EulerNode, HaarQuadrature,
};
pub use metrics::{entanglement_error, entanglement_fidelity, fuchs_van_de_graaf, uhlmann_fidelity};
pub use types::{ChoiMatrix, DensityMatrix, KrausChannel, TP_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
    #[error("not trace preserving (residual {0:e})")]
    NotTracePreserving(f64),
    #[error("operator is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("trace is {0}, expected 1")]
    NotNormalized(f64),
    #[error("Choi matrix is not covariant (residual {0:e})")]
    NotCovariant(f64),
    #[error("empty Kraus family")]
    Empty,
    #[error("out of range: {0}")]
    OutOfRange(String),
}
