//! The covariant protocol at `d = 2`: a fixed code run in a random frame,
//! a reference register recording the frame, erasures on both, and a decoder
//! that undoes the frame estimated from the surviving reference.

mod effective;
mod inner;
mod montecarlo;
mod patterns;
mod sweep;

use thiserror::Error;

use crate::bounds::BoundsError;
use crate::channels::ChannelError;
use crate::codes::{CodeError, CodeSpec};
use crate::refframe::{strong_combined_spec, weak_spec, RefFrameEnsemble, RefFrameError};
use crate::sdp::SdpError;

pub use effective::{effective_channel, effective_channel_with, rotated_errors, Diagnostics, EffectiveChannelReport, EpsCovMethod, PatternReport};
pub use inner::{
    character_table, expand, inner_channel, inner_channel_expanded, spin_weights, CharacterTable, InnerParts,
    NORMALIZATION_TOL,
};
pub use montecarlo::{monte_carlo_epsilon, monte_carlo_forced, McEstimate};
pub use patterns::{pattern_classes, PatternClass};
pub use sweep::{
    fit_slope, scaling_sweep, SweepModel, SweepRow, SweepTable, MAX_ROWS, MAX_STRONG_COPIES, MAX_WEAK_PAIRS, STRONG_ALPHA,
};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    RefFrame(#[from] RefFrameError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("quadrature under-resolved: {0}")]
    Resolution(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{what} = {value} exceeds the cap {cap_name} = {cap}")]
    Cap { what: &'static str, value: u64, cap_name: &'static str, cap: u64 },
}

/// How erasures are distributed under the weak model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeakDistribution {
    /// Uniform over all subsets with at most `n_e` qudits.
    UniformUpTo,
    /// No erasure with probability `p_none`, otherwise a uniform subset of
    /// exactly `n_e` qudits.
    ExactlyNe { p_none: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ErasureModel {
    /// At most `n_e` erasures among all qudits.
    Weak { n_e: u32, distribution: WeakDistribution },
    /// Every qudit erased independently with probability `p_e`.
    Strong { p_e: f64 },
}

#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub code: CodeSpec,
    pub ensemble: RefFrameEnsemble,
    pub model: ErasureModel,
    /// Quadrature order for the character tables; `None` picks the exact order.
    pub quad_order: Option<usize>,
    pub mc_samples: usize,
    pub seed: u64,
}

impl ProtocolConfig {
    /// Weak model: `n_e + 1` copies of the lattice reference on `m` pairs each.
    pub fn weak(code: CodeSpec, m: u32, n_e: u32, distribution: WeakDistribution) -> Result<Self, ProtocolError> {
        let (_, spec) = weak_spec(2, m, code.n_p as u32)?;
        let cfg = Self {
            code,
            ensemble: RefFrameEnsemble::new(spec, n_e as usize + 1),
            model: ErasureModel::Weak { n_e, distribution },
            quad_order: None,
            mc_samples: 10_000,
            seed: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Strong model: `s_r` single-pair copies.
    pub fn strong(code: CodeSpec, s_r: usize, p_e: f64) -> Result<Self, ProtocolError> {
        let cfg = Self {
            code,
            ensemble: RefFrameEnsemble::new(strong_combined_spec(2, 1)?, s_r),
            model: ErasureModel::Strong { p_e },
            quad_order: None,
            mc_samples: 10_000,
            seed: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn n_p(&self) -> usize {
        self.code.n_p
    }

    pub fn n_r(&self) -> usize {
        self.ensemble.qudits()
    }

    pub fn n(&self) -> usize {
        self.n_p() + self.n_r()
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.code.d != 2 || self.ensemble.spec.d() != 2 {
            return Err(ProtocolError::Unsupported("the protocol is implemented for qubits only".into()));
        }
        if self.ensemble.copies == 0 {
            return Err(ProtocolError::Invalid("at least one reference copy is required".into()));
        }
        match self.model {
            ErasureModel::Weak { n_e, distribution } => {
                if n_e == 0 || n_e > 2 {
                    return Err(ProtocolError::Unsupported(format!("weak model with n_e = {n_e}; exact path covers 1 and 2")));
                }
                if self.ensemble.copies != n_e as usize + 1 {
                    return Err(ProtocolError::Invalid(format!(
                        "weak model needs n_e + 1 = {} copies, got {}",
                        n_e + 1,
                        self.ensemble.copies
                    )));
                }
                if let WeakDistribution::ExactlyNe { p_none } = distribution {
                    if !(0.0..=1.0).contains(&p_none) {
                        return Err(ProtocolError::Invalid(format!("p_none = {p_none}")));
                    }
                }
            }
            ErasureModel::Strong { p_e } => {
                if self.ensemble.spec.pairs() != 1 {
                    return Err(ProtocolError::Invalid("strong model uses single-pair copies".into()));
                }
                if !(p_e > 0.0 && p_e < 1.0) {
                    return Err(ProtocolError::Invalid(format!("p_e = {p_e} outside (0, 1)")));
                }
            }
        }
        Ok(())
    }
}
