use nalgebra::DVector;
use num_complex::Complex64;

use crate::codes::subsets;
use crate::linalg::{identity, CMat};

use super::{strong_ratio, weak_scale, BoundReport, BoundKind, BoundsError};

/// Diagonal generator `sum_j h_j |j><j|` of the phase rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian(Vec<f64>);

impl Hamiltonian {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self, BoundsError> {
        if eigenvalues.is_empty() || eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(BoundsError::Invalid("Hamiltonian needs finite eigenvalues".into()));
        }
        Ok(Self(eigenvalues))
    }

    /// Shifted so that the extreme eigenvalues sum to zero.
    pub fn centered(&self) -> Self {
        let mid = (self.max() + self.min()) / 2.0;
        Self(self.0.iter().map(|h| h - mid).collect())
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Spectral gap `max - min`.
    pub fn spread(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, h| m.max(h.abs()))
    }
}

/// `4 n^2 (1 + 1/n_e) ||H||^2` for uniform erasures of exactly `n_e` qudits.
pub fn fisher_upper_weak(n: u64, n_e: u32, h: &Hamiltonian) -> Result<BoundReport, BoundsError> {
    if n == 0 || n_e == 0 || n_e as u64 > n {
        return Err(BoundsError::Invalid(format!("n = {n}, n_e = {n_e}")));
    }
    let norm = h.norm_inf();
    Ok(BoundReport::new(
        "fisher_weak",
        4.0 * norm * norm * weak_scale(n, n_e),
        BoundKind::Upper,
        vec![("n", n as f64), ("n_e", n_e as f64), ("h_norm", norm)],
    ))
}

/// `4 n Delta H^2 (1 - p_e) / p_e` for independent erasures.
pub fn fisher_upper_strong(n: u64, delta_h: f64, p_e: f64) -> Result<BoundReport, BoundsError> {
    if !(p_e > 0.0 && p_e < 1.0) {
        return Err(BoundsError::ErasureProbability(p_e));
    }
    Ok(BoundReport::new(
        "fisher_strong",
        4.0 * delta_h * delta_h * (n as f64 * strong_ratio(p_e)),
        BoundKind::Upper,
        vec![("n", n as f64), ("delta_h", delta_h), ("p_e", p_e)],
    ))
}

/// Residuals of the phase-dependent Kraus family of the erasure channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausZeroCheck {
    /// `|| sum K'^dag K ||`.
    pub zero: f64,
    /// `|| sum K'^dag K' - sum_s (sum_j H_{s_j})^2 / (C^2 p_s) + (sum_l H_l)^2 ||`.
    pub second_moment: f64,
    /// Same with `sum_j (H^2)_{s_j}` in place of the squared sum; agrees with the
    /// above only for single erasures.
    pub second_moment_per_site: f64,
    /// `|| sum K^dag K - I ||`.
    pub trace_preservation: f64,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn digits(mut x: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = x % base;
        x /= base;
    }
    out
}

fn number(ds: &[usize], base: usize) -> usize {
    ds.iter().fold(0, |acc, &v| acc * base + v)
}

struct ErasureFamily {
    n: usize,
    levels: usize,
    /// Eigenvalues on `d + 1` levels, the flag last with eigenvalue 0.
    h: Vec<f64>,
    p_none: f64,
    p_subset: f64,
    scale: f64,
    subsets: Vec<Vec<usize>>,
}

impl ErasureFamily {
    fn ops(&self, theta: f64) -> Vec<CMat> {
        let dim = self.levels.pow(self.n as u32);
        let flag = self.levels - 1;
        let phase = |x: &[usize]| -> Complex64 {
            Complex64::from_polar(1.0, -theta * x.iter().map(|&v| self.h[v]).sum::<f64>())
        };
        let mut out = Vec::new();
        if self.p_none > 0.0 {
            let mut k = CMat::zeros(dim, dim);
            for x in 0..dim {
                k[(x, x)] = phase(&digits(x, self.levels, self.n)) * self.p_none.sqrt();
            }
            out.push(k);
        }
        if self.p_subset == 0.0 {
            return out;
        }
        let ne = self.subsets.first().map_or(0, Vec::len);
        for s in &self.subsets {
            for nv in 0..self.levels.pow(ne as u32) {
                let nvec = digits(nv, self.levels, ne);
                let kick: f64 = nvec.iter().map(|&v| self.h[v]).sum::<f64>() / self.scale;
                let mut k = CMat::zeros(dim, dim);
                for x in 0..dim {
                    let xd = digits(x, self.levels, self.n);
                    if s.iter().zip(&nvec).any(|(&site, &v)| xd[site] != v) {
                        continue;
                    }
                    let mut yd = xd.clone();
                    for &site in s {
                        yd[site] = flag;
                    }
                    k[(number(&yd, self.levels), x)] =
                        phase(&xd) * Complex64::from_polar(self.p_subset.sqrt(), theta * kick);
                }
                out.push(k);
            }
        }
        out
    }

    /// Central differences at `step` and `step / 2`, Richardson-combined.
    fn derivatives(&self, theta: f64, step: f64) -> Vec<CMat> {
        let diff = |hh: f64| -> Vec<CMat> {
            let plus = self.ops(theta + hh);
            let minus = self.ops(theta - hh);
            plus.iter().zip(&minus).map(|(a, b)| (a - b).unscale(2.0 * hh)).collect()
        };
        let coarse = diff(step);
        let fine = diff(step / 2.0);
        fine.iter().zip(&coarse).map(|(f, c)| (f.scale(4.0) - c).unscale(3.0)).collect()
    }

    /// Diagonal of `sum_l H_l` and the two candidate closed forms.
    fn closed_forms(&self) -> (DVector<f64>, DVector<f64>) {
        let dim = self.levels.pow(self.n as u32);
        let c = self.scale / self.p_subset.max(f64::MIN_POSITIVE);
        let mut squared = DVector::zeros(dim);
        let mut per_site = DVector::zeros(dim);
        for x in 0..dim {
            let xd = digits(x, self.levels, self.n);
            let total: f64 = xd.iter().map(|&v| self.h[v]).sum();
            let mut a = -total * total;
            let mut b = -total * total;
            if self.p_subset > 0.0 {
                for s in &self.subsets {
                    let hs: f64 = s.iter().map(|&site| self.h[xd[site]]).sum();
                    let hs2: f64 = s.iter().map(|&site| self.h[xd[site]].powi(2)).sum();
                    a += hs * hs / (c * c * self.p_subset);
                    b += hs2 / (c * c * self.p_subset);
                }
            }
            squared[x] = a;
            per_site[x] = b;
        }
        (squared, per_site)
    }
}

fn op_norm(m: &CMat) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Builds the phase-dependent Kraus operators of "no erasure with probability
/// `p_none`, otherwise a uniformly random set of exactly `n_e` erased qudits"
/// composed with `exp(-i theta H)^{(x) n}`, and checks the derivative identities
/// numerically at `theta`.
pub fn kraus_zero_check(
    n: usize,
    n_e: usize,
    h: &Hamiltonian,
    theta: f64,
    p_none: f64,
) -> Result<KrausZeroCheck, BoundsError> {
    let levels = h.dim() + 1;
    if n == 0 || n_e == 0 || n_e > n || levels.pow(n as u32) > 256 {
        return Err(BoundsError::Invalid(format!("n = {n}, n_e = {n_e}, d = {} exceeds the dense cap", h.dim())));
    }
    if !(0.0..=1.0).contains(&p_none) {
        return Err(BoundsError::Invalid(format!("p_none = {p_none}")));
    }
    let subs: Vec<Vec<usize>> = subsets(n, n_e).into_iter().map(|s| s.into_iter().collect()).collect();
    let p_subset = (1.0 - p_none) / subs.len() as f64;
    let mut hv = h.eigenvalues().to_vec();
    hv.push(0.0);
    let fam = ErasureFamily {
        n,
        levels,
        h: hv,
        p_none,
        p_subset,
        scale: binomial(n - 1, n_e - 1) * p_subset,
        subsets: subs,
    };
    let k = fam.ops(theta);
    let kd = fam.derivatives(theta, 1e-5);
    let dim = levels.pow(n as u32);
    let mut s1 = CMat::zeros(dim, dim);
    let mut s2 = CMat::zeros(dim, dim);
    let mut tp = -identity(dim);
    for (a, b) in kd.iter().zip(&k) {
        s1 += a.adjoint() * b;
        s2 += a.adjoint() * a;
        tp += b.adjoint() * b;
    }
    let (squared, per_site) = fam.closed_forms();
    let as_diag = |v: &DVector<f64>| CMat::from_fn(dim, dim, |r, c| if r == c { Complex64::new(v[r], 0.0) } else { Complex64::new(0.0, 0.0) });
    Ok(KrausZeroCheck {
        zero: op_norm(&s1),
        second_moment: op_norm(&(&s2 - as_diag(&squared))),
        second_moment_per_site: op_norm(&(&s2 - as_diag(&per_site))),
        trace_preservation: op_norm(&tp),
    })
}
