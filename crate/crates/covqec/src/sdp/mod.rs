//! Semidefinite programs for channel distances: a small interior-point solver,
//! the worst-case fidelity and diamond-norm programs, and the restricted
//! optimizer for block-covariant channels.

mod programs;
mod solver;

use thiserror::Error;

use crate::channels::{haar_quadrature_su2, spin_unitary, KrausChannel};
use crate::linalg::CMat;

pub use programs::{
    diamond_error, diamond_error_with, restricted_fwc, sqrt_fwc, sqrt_fwc_with, DiamondSdp, FidelitySdp, IrrepBlock,
    RestrictedFidelity, SUPPORT_CUTOFF,
};
pub use solver::{
    solve, Constraint, SdpOptions, SdpProblem, SdpSolution, SdpStatus, SparseHerm, DEFAULT_TOL, MAX_ITERS, SIZE_CAP,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("block of dimension {size} exceeds the cap of {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("solver stopped with {status:?} after {iterations} iterations (gap {gap:e}, pinf {primal_infeasibility:e}, dinf {dual_infeasibility:e})")]
    NotConverged {
        status: SdpStatus,
        gap: f64,
        iterations: usize,
        primal_infeasibility: f64,
        dual_infeasibility: f64,
    },
}

/// Channel `rho -> sum_g w(g) U_g rho U_g^dag` on a direct sum of spin blocks
/// (`two_js` lists `2j`), with class-function weight
/// `w = 1 + sum_k profile[k] cos((k + 1) theta)` in the half angle `theta`.
/// It commutes with the block representation. Needs `sum |profile| < 1`.
pub fn block_covariant_channel(two_js: &[usize], profile: &[f64]) -> Result<(Vec<IrrepBlock>, KrausChannel), SdpError> {
    if two_js.is_empty() || profile.iter().map(|c| c.abs()).sum::<f64>() >= 1.0 {
        return Err(SdpError::Malformed("need at least one block and a positive weight profile".into()));
    }
    let top = two_js.iter().copied().max().unwrap_or(0);
    let quad = haar_quadrature_su2(top + profile.len() + 4).map_err(|e| SdpError::Malformed(e.to_string()))?;
    let total: usize = two_js.iter().map(|j| j + 1).sum();
    let ws: Vec<f64> = quad
        .nodes()
        .iter()
        .map(|n| {
            let th = n.half_angle();
            let w: f64 = 1.0 + profile.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * th).cos()).sum::<f64>();
            n.weight * w
        })
        .collect();
    let norm: f64 = ws.iter().sum();
    let mut ops = Vec::with_capacity(ws.len());
    for (node, w) in quad.nodes().iter().zip(&ws) {
        let mut u = CMat::zeros(total, total);
        let mut off = 0;
        for &tj in two_js {
            u.view_mut((off, off), (tj + 1, tj + 1)).copy_from(&spin_unitary(tj, node.alpha, node.beta, node.gamma));
            off += tj + 1;
        }
        ops.push(u.scale((w / norm).sqrt()));
    }
    let blocks = two_js.iter().map(|&tj| IrrepBlock { dim: tj + 1, mult: 1 }).collect();
    let ch = KrausChannel::new(ops).map_err(|e| SdpError::Malformed(e.to_string()))?;
    Ok((blocks, ch))
}
