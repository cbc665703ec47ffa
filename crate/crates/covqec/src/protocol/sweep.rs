//! Error against total qudit count for both erasure models.

use std::time::Instant;

use crate::bounds::{prop1_lower, prop2_lower, theorem1_bound, theorem2_bound};
use crate::codes::CodeSpec;
use crate::refframe::{f_strong, min_overlap};

use super::effective::{effective_channel_with, EpsCovMethod};
use super::patterns::binomial;
use super::{ProtocolConfig, ProtocolError, WeakDistribution};

/// `alpha` used for the strong-model upper bound in sweeps.
pub const STRONG_ALPHA: f64 = 0.1;
pub const MAX_ROWS: usize = 64;
pub const MAX_WEAK_PAIRS: u64 = 4096;
pub const MAX_STRONG_COPIES: u64 = 128;

#[derive(Clone, Debug)]
pub enum SweepModel {
    Weak { code: CodeSpec, n_e: u32, distribution: WeakDistribution },
    Strong { code: CodeSpec, p_e: f64 },
}

impl SweepModel {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Weak { .. } => "weak",
            Self::Strong { .. } => "strong",
        }
    }

    fn code(&self) -> &CodeSpec {
        match self {
            Self::Weak { code, .. } | Self::Strong { code, .. } => code,
        }
    }

    /// `n_e` or `p_e`, whichever parametrizes the model.
    pub fn parameter(&self) -> f64 {
        match self {
            Self::Weak { n_e, .. } => *n_e as f64,
            Self::Strong { p_e, .. } => *p_e,
        }
    }

    /// Configuration with `n` qudits in total.
    pub fn config(&self, n: u64) -> Result<ProtocolConfig, ProtocolError> {
        let n_p = self.code().n_p as u64;
        let rest = n.checked_sub(n_p).filter(|&r| r > 0).ok_or_else(|| {
            ProtocolError::Invalid(format!("n = {n} leaves no reference qudits next to {n_p} physical ones"))
        })?;
        match self {
            Self::Weak { code, n_e, distribution } => {
                let per = 2 * (*n_e as u64 + 1);
                if rest % per != 0 {
                    return Err(ProtocolError::Invalid(format!("n - n_P = {rest} is not a multiple of {per}")));
                }
                let m = rest / per;
                if m > MAX_WEAK_PAIRS {
                    return Err(ProtocolError::Cap { what: "pairs per copy", value: m, cap_name: "MAX_WEAK_PAIRS", cap: MAX_WEAK_PAIRS });
                }
                ProtocolConfig::weak(code.clone(), m as u32, *n_e, *distribution)
            }
            Self::Strong { code, p_e } => {
                if rest % 2 != 0 {
                    return Err(ProtocolError::Invalid(format!("n - n_P = {rest} is odd")));
                }
                let s = rest / 2;
                if s > MAX_STRONG_COPIES {
                    return Err(ProtocolError::Cap { what: "reference copies", value: s, cap_name: "MAX_STRONG_COPIES", cap: MAX_STRONG_COPIES });
                }
                ProtocolConfig::strong(code.clone(), s as usize, *p_e)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub n_p: u64,
    pub n_r: u64,
    pub model: &'static str,
    pub parameter: f64,
    pub eps_cov: f64,
    pub upper_bound: f64,
    pub lower_bound: f64,
    /// Reference-frame error: `1 - min_overlap` (weak) or the survivor-averaged
    /// `1 - f_strong` (strong).
    pub one_minus_fwc: f64,
    pub runtime_ms: u64,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln(one_minus_fwc)` against `ln n`.
    pub slope: Option<f64>,
}

pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn reference_error(model: &SweepModel, cfg: &ProtocolConfig) -> Result<f64, ProtocolError> {
    let n_p = cfg.n_p() as u32;
    match model {
        SweepModel::Weak { .. } => Ok(1.0 - min_overlap(&cfg.ensemble.spec, n_p + 1)),
        SweepModel::Strong { p_e, .. } => {
            let s = cfg.ensemble.copies;
            let keep = (1.0 - p_e).powi(2);
            let mut total = 0.0;
            for k in 0..=s {
                let pk = binomial(s, k) * keep.powi(k as i32) * (1.0 - keep).powi((s - k) as i32);
                let err = if k == 0 { 1.0 } else { 1.0 - f_strong(2, k as u32, n_p)? };
                total += pk * err;
            }
            Ok(total)
        }
    }
}

fn row(model: &SweepModel, n: u64, timing: bool) -> Result<SweepRow, ProtocolError> {
    let start = Instant::now();
    let cfg = model.config(n)?;
    let report = effective_channel_with(&cfg, EpsCovMethod::DiamondSdp)?;
    let (n_p, n_r) = (cfg.n_p() as u64, cfg.n_r() as u64);
    let (upper, lower) = match model {
        SweepModel::Weak { n_e, .. } => {
            (theorem1_bound(2, *n_e, n_p as u32, n_r)?.value, prop1_lower(n, *n_e)?.value)
        }
        SweepModel::Strong { p_e, .. } => {
            let up = if *p_e < 0.5 { theorem2_bound(2, *p_e, n, STRONG_ALPHA)?.value } else { f64::INFINITY };
            (up, prop2_lower(n, *p_e)?.value)
        }
    };
    let one_minus_fwc = reference_error(model, &cfg)?;
    Ok(SweepRow {
        n,
        n_p,
        n_r,
        model: model.label(),
        parameter: model.parameter(),
        eps_cov: report.eps_cov,
        upper_bound: upper,
        lower_bound: lower,
        one_minus_fwc,
        runtime_ms: if timing { start.elapsed().as_millis() as u64 } else { 0 },
    })
}

/// One row per grid point, in grid order. Rows are computed on up to `threads`
/// worker threads; results do not depend on the thread count. Wall-clock
/// times are recorded only when `timing` is set.
pub fn scaling_sweep(model: &SweepModel, grid: &[u64], threads: usize, timing: bool) -> Result<SweepTable, ProtocolError> {
    if grid.len() > MAX_ROWS {
        return Err(ProtocolError::Cap { what: "grid points", value: grid.len() as u64, cap_name: "MAX_ROWS", cap: MAX_ROWS as u64 });
    }
    let threads = threads.clamp(1, grid.len().max(1));
    let mut slots: Vec<Option<Result<SweepRow, ProtocolError>>> = (0..grid.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunks: Vec<_> = slots.chunks_mut(grid.len().div_ceil(threads).max(1)).collect();
        let mut offset = 0;
        for chunk in chunks {
            let start = offset;
            offset += chunk.len();
            scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(row(model, grid[start + i], timing));
                }
            });
        }
    });
    let rows = slots.into_iter().map(|s| s.expect("every slot filled")).collect::<Result<Vec<_>, _>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.one_minus_fwc).collect();
    let slope = fit_slope(&xs, &ys);
    Ok(SweepTable { rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{five_qubit_code, trivial_code};

    #[test]
    fn slope_of_power_law() {
        let xs = [10.0, 20.0, 40.0, 80.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.7)).collect();
        assert!((fit_slope(&xs, &ys).unwrap() + 1.7).abs() < 1e-12);
        assert!(fit_slope(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn grid_validation() {
        let weak = SweepModel::Weak { code: five_qubit_code().unwrap(), n_e: 1, distribution: WeakDistribution::UniformUpTo };
        assert!(weak.config(38).is_err());
        assert_eq!(weak.config(37).unwrap().ensemble.spec.pairs(), 8);
        let strong = SweepModel::Strong { code: trivial_code(2), p_e: 0.1 };
        assert!(strong.config(14).is_err());
        assert!(strong.config(1 + 2 * (MAX_STRONG_COPIES + 1)).is_err());
        assert!(scaling_sweep(&strong, &vec![13; MAX_ROWS + 1], 1, false).is_err());
    }

    #[test]
    fn small_sweeps_are_sandwiched_and_thread_independent() {
        let strong = SweepModel::Strong { code: trivial_code(2), p_e: 0.1 };
        let grid = [13, 21, 31];
        let a = scaling_sweep(&strong, &grid, 1, false).unwrap();
        let b = scaling_sweep(&strong, &grid, 3, false).unwrap();
        assert_eq!(a.rows, b.rows);
        for r in &a.rows {
            assert!(r.lower_bound <= r.eps_cov);
        }
        let weak = SweepModel::Weak { code: five_qubit_code().unwrap(), n_e: 1, distribution: WeakDistribution::UniformUpTo };
        // the interior set is empty below a few dozen pairs
        let w = scaling_sweep(&weak, &[201, 297], 2, false).unwrap();
        assert!(w.rows.iter().all(|r| r.lower_bound <= r.eps_cov));
        assert!(w.rows[1].one_minus_fwc < w.rows[0].one_minus_fwc);
    }
}
