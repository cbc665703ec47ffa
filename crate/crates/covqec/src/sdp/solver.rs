//! Dense primal-dual interior-point method (HKM direction, Mehrotra
//! predictor-corrector) for block-diagonal Hermitian SDPs:
//!
//! ```text
//! minimize  sum_b Re Tr(C_b X_b)
//! s.t.      sum_b Re Tr(A_ib X_b) = b_i,   X_b >= 0.
//! ```
//!
//! Hermitian blocks are solved through the real embedding
//! `X -> [[Re X, -Im X], [Im X, Re X]]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::linalg::{symmetric_eigenvalues, CMat};

use super::SdpError;

/// Largest complex block dimension accepted.
pub const SIZE_CAP: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_ITERS: usize = 200;

type RMat = DMatrix<f64>;

/// Sparse Hermitian matrix as `(row, col, value)` entries; entries below the
/// diagonal are implied by Hermiticity and must not be given.
#[derive(Clone, Debug, Default)]
pub struct SparseHerm {
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHerm {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `v` at `(r, c)` and `conj(v)` at `(c, r)`; diagonal values must be real.
    pub fn add(&mut self, r: usize, c: usize, v: Complex64) {
        if r <= c {
            self.entries.push((r, c, v));
        } else {
            self.entries.push((c, r, v.conj()));
        }
    }

    /// Matrix whose trace pairing gives `Re X[r][c]`.
    pub fn re_entry(r: usize, c: usize) -> Self {
        let mut m = Self::new();
        if r == c {
            m.add(r, r, Complex64::new(1.0, 0.0));
        } else {
            m.add(r, c, Complex64::new(0.5, 0.0));
        }
        m
    }

    /// Matrix whose trace pairing gives `Im X[r][c]` (`r != c`).
    pub fn im_entry(r: usize, c: usize) -> Self {
        let mut m = Self::new();
        m.add(r, c, Complex64::new(0.0, 0.5));
        m
    }

    pub fn from_dense(a: &CMat) -> Self {
        let mut m = Self::new();
        for r in 0..a.nrows() {
            for c in r..a.ncols() {
                let v = if r == c { Complex64::new(a[(r, c)].re, 0.0) } else { a[(r, c)] };
                if v.norm() > 0.0 {
                    m.add(r, c, v);
                }
            }
        }
        m
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self { entries: self.entries.iter().map(|&(r, c, v)| (r, c, v * f)).collect() }
    }

    fn real_triplets(&self, n: usize, scale: f64, out: &mut Vec<(usize, usize, f64)>) {
        // Re Tr(A X) = 1/2 <A~, X~>; symmetric storage of both triangles
        let mut push = |r: usize, c: usize, v: f64| {
            if v != 0.0 {
                out.push((r, c, v));
                if r != c {
                    out.push((c, r, v));
                }
            }
        };
        let mut acc = std::collections::BTreeMap::<(usize, usize), f64>::new();
        let mut put = |r: usize, c: usize, v: f64| {
            let key = if r <= c { (r, c) } else { (c, r) };
            *acc.entry(key).or_insert(0.0) += v;
        };
        for &(r, c, v) in &self.entries {
            let (re, im) = (v.re * scale * 0.5, v.im * scale * 0.5);
            if r == c {
                put(r, r, re);
                put(r + n, r + n, re);
            } else {
                // A[r,c] = v and A[c,r] = conj(v)
                put(r, c, re);
                put(r + n, c + n, re);
                // lower-left block holds Im A: entry (c+n, r) = Im A[c,r] = -im; (r+n, c) = im
                put(r + n, c, im);
                put(c + n, r, -im);
            }
        }
        for ((r, c), v) in acc {
            push(r, c, v);
        }
    }

    fn to_real_dense(&self, n: usize) -> RMat {
        let mut t = Vec::new();
        self.real_triplets(n, 1.0, &mut t);
        let mut m = RMat::zeros(2 * n, 2 * n);
        for (r, c, v) in t {
            m[(r, c)] += v;
        }
        m
    }
}

/// One linear equality `sum_b Re Tr(A_b X_b) = rhs`.
#[derive(Clone, Debug, Default)]
pub struct Constraint {
    pub terms: Vec<(usize, SparseHerm)>,
    pub rhs: f64,
}

/// Problem data; blocks are complex Hermitian of the given dimensions.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub objective: Vec<SparseHerm>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIterations,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|primal - dual| / (1 + |primal| + |dual|)`.
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    pub x: Vec<CMat>,
    pub y: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iters: MAX_ITERS }
    }
}

struct RealCon {
    // per block: (block, r, c, v) with both triangles stored
    by_block: Vec<(usize, Vec<(usize, usize, f64)>)>,
}

struct Blocks(Vec<RMat>);

impl Blocks {
    fn dot(&self, o: &Blocks) -> f64 {
        self.0.iter().zip(&o.0).map(|(a, b)| a.dot(b)).sum()
    }
    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
    fn axpy(&mut self, a: f64, o: &Blocks) {
        for (x, y) in self.0.iter_mut().zip(&o.0) {
            *x += y * a;
        }
    }
}

fn sym(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

/// Largest step `alpha <= 1` keeping `x + alpha dx` PSD, scaled by `tau`.
fn max_step(x: &Blocks, dx: &Blocks, tau: f64) -> Option<f64> {
    let mut alpha: f64 = 1.0 / tau;
    for (xb, db) in x.0.iter().zip(&dx.0) {
        let l = xb.clone().cholesky()?.l();
        let li = l.clone().try_inverse()?;
        let m = sym(&(&li * db * li.transpose()));
        // the unbounded eigen-solver never returns on non-finite input
        if m.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let lmin = symmetric_eigenvalues(&m).into_iter().fold(f64::INFINITY, f64::min);
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    Some((tau * alpha).min(1.0))
}

pub fn solve(problem: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution, SdpError> {
    if let Some(&big) = problem.block_dims.iter().find(|&&n| n > SIZE_CAP) {
        return Err(SdpError::SizeCapExceeded { size: big, cap: SIZE_CAP });
    }
    if problem.objective.len() != problem.block_dims.len() {
        return Err(SdpError::Malformed("objective needs one matrix per block".into()));
    }
    let nb = problem.block_dims.len();
    let dims: Vec<usize> = problem.block_dims.iter().map(|n| 2 * n).collect();
    let m = problem.constraints.len();

    let c = Blocks(
        problem
            .objective
            .iter()
            .zip(&problem.block_dims)
            .map(|(s, &n)| s.to_real_dense(n))
            .collect(),
    );
    let mut cons = Vec::with_capacity(m);
    let mut rhs = DVector::zeros(m);
    for (i, k) in problem.constraints.iter().enumerate() {
        rhs[i] = k.rhs;
        let mut by_block: Vec<(usize, Vec<(usize, usize, f64)>)> = Vec::new();
        for (b, s) in &k.terms {
            if *b >= nb {
                return Err(SdpError::Malformed(format!("constraint {i} refers to block {b}")));
            }
            let mut t = Vec::new();
            s.real_triplets(problem.block_dims[*b], 1.0, &mut t);
            match by_block.iter_mut().find(|(bb, _)| bb == b) {
                Some((_, v)) => v.extend(t),
                None => by_block.push((*b, t)),
            }
        }
        cons.push(RealCon { by_block });
    }

    let a_of = |x: &Blocks| -> DVector<f64> {
        DVector::from_iterator(
            m,
            cons.iter().map(|k| {
                k.by_block
                    .iter()
                    .map(|(b, t)| t.iter().map(|&(r, cc, v)| v * x.0[*b][(r, cc)]).sum::<f64>())
                    .sum::<f64>()
            }),
        )
    };
    let at_of = |y: &DVector<f64>| -> Blocks {
        let mut out: Vec<RMat> = dims.iter().map(|&n| RMat::zeros(n, n)).collect();
        for (k, yi) in cons.iter().zip(y.iter()) {
            for (b, t) in &k.by_block {
                for &(r, cc, v) in t {
                    out[*b][(r, cc)] += v * yi;
                }
            }
        }
        Blocks(out)
    };

    // starting point in the style of CSDP
    let ntot: usize = dims.iter().sum();
    let mut amax: f64 = 0.0;
    let mut ratio: f64 = 0.0;
    for (i, k) in cons.iter().enumerate() {
        let nrm: f64 = k
            .by_block
            .iter()
            .flat_map(|(_, t)| t.iter().map(|e| e.2 * e.2))
            .sum::<f64>()
            .sqrt();
        amax = amax.max(nrm);
        ratio = ratio.max((1.0 + rhs[i].abs()) / (1.0 + nrm));
    }
    let alpha0 = (ntot as f64 * ratio).max(10.0);
    let beta0 = ((1.0 + amax.max(c.norm())) / (ntot as f64).sqrt()).max(10.0);
    let mut x = Blocks(dims.iter().map(|&n| RMat::identity(n, n) * alpha0).collect());
    let mut z = Blocks(dims.iter().map(|&n| RMat::identity(n, n) * beta0).collect());
    let mut y = DVector::zeros(m);

    let bnorm = rhs.norm();
    let cnorm = c.norm();
    let mut status = SdpStatus::MaxIterations;
    let mut iters = 0;
    let (mut pobj, mut dobj, mut gap, mut pinf, mut dinf);

    loop {
        let rp = &rhs - a_of(&x);
        let mut rd = Blocks(c.0.clone());
        rd.axpy(-1.0, &z);
        rd.axpy(-1.0, &at_of(&y));
        pobj = c.dot(&x);
        dobj = rhs.dot(&y);
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        pinf = rp.norm() / (1.0 + bnorm);
        dinf = rd.norm() / (1.0 + cnorm);
        let mu = x.dot(&z) / ntot as f64;
        let compl = x.dot(&z) / (1.0 + pobj.abs() + dobj.abs());
        if gap <= opts.tol && pinf <= opts.tol && dinf <= opts.tol && compl <= 10.0 * opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        if iters >= opts.max_iters {
            break;
        }
        iters += 1;

        let zinv: Vec<RMat> = match z.0.iter().map(|zb| zb.clone().cholesky().map(|ch| ch.inverse())).collect() {
            Some(v) => v,
            None => {
                status = SdpStatus::NumericalFailure;
                break;
            }
        };

        // Schur complement M_ij = Tr(A_i X A_j Z^-1) = sum_{(p,q,v) in A_i} v (X A_j Z^-1)[q, p]
        let mut schur = RMat::zeros(m, m);
        for j in 0..m {
            for (bj, tj) in &cons[j].by_block {
                let (xb, zb) = (&x.0[*bj], &zinv[*bj]);
                let n = xb.nrows();
                let w = if tj.len() > 4 * n {
                    let mut a = RMat::zeros(n, n);
                    for &(r, ss, u) in tj {
                        a[(r, ss)] += u;
                    }
                    xb * a * zb
                } else {
                    let mut w = RMat::zeros(n, n);
                    for &(r, ss, u) in tj {
                        for q in 0..n {
                            let xq = xb[(q, r)] * u;
                            if xq != 0.0 {
                                for p in 0..n {
                                    w[(q, p)] += xq * zb[(ss, p)];
                                }
                            }
                        }
                    }
                    w
                };
                for i in 0..=j {
                    for (bi, ti) in &cons[i].by_block {
                        if bi == bj {
                            schur[(i, j)] += ti.iter().map(|&(p, q, v)| v * w[(q, p)]).sum::<f64>();
                        }
                    }
                }
            }
        }
        for j in 0..m {
            for i in 0..j {
                schur[(j, i)] = schur[(i, j)];
            }
        }
        let diag_max = (0..m).map(|i| schur[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        let chol = {
            let mut reg = 0.0;
            loop {
                let mut mm = schur.clone();
                for i in 0..m {
                    mm[(i, i)] += reg;
                }
                if let Some(ch) = mm.cholesky() {
                    break Some(ch);
                }
                reg = if reg == 0.0 { 1e-14 * diag_max } else { reg * 100.0 };
                if reg > 1e-4 * diag_max {
                    break None;
                }
            }
        };
        let Some(chol) = chol else {
            status = SdpStatus::NumericalFailure;
            break;
        };

        // direction for target sigma*mu with optional second-order term
        let direction = |sigma: f64, corr: Option<&(Blocks, Blocks)>| -> (Blocks, DVector<f64>, Blocks) {
            // R = sigma mu Z^-1 - X - X Rd Z^-1 - dXa dZa Z^-1
            let mut r_blocks = Vec::with_capacity(nb);
            for b in 0..nb {
                let mut rb = &zinv[b] * (sigma * mu) - &x.0[b] - &x.0[b] * &rd.0[b] * &zinv[b];
                if let Some((dxa, dza)) = corr {
                    rb -= &dxa.0[b] * &dza.0[b] * &zinv[b];
                }
                r_blocks.push(rb);
            }
            let r_blocks = Blocks(r_blocks);
            let rhs_y = &rp - a_of(&r_blocks);
            let dy = chol.solve(&rhs_y);
            let atdy = at_of(&dy);
            let mut dz = Blocks(rd.0.clone());
            dz.axpy(-1.0, &atdy);
            let dx = Blocks(
                (0..nb)
                    .map(|b| sym(&(&r_blocks.0[b] + &x.0[b] * &atdy.0[b] * &zinv[b])))
                    .collect(),
            );
            (dx, dy, dz)
        };

        let (dxa, _, dza) = direction(0.0, None);
        let (Some(ap), Some(ad)) = (max_step(&x, &dxa, 1.0), max_step(&z, &dza, 1.0)) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        let mut xa = Blocks(x.0.clone());
        xa.axpy(ap, &dxa);
        let mut za = Blocks(z.0.clone());
        za.axpy(ad, &dza);
        let mu_aff = xa.dot(&za) / ntot as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let pair = (dxa, dza);
        let (dx, dy, dz) = direction(sigma, Some(&pair));
        let tau = if gap < 1e-5 { 0.995 } else { 0.98 };
        let (Some(ap), Some(ad)) = (max_step(&x, &dx, tau), max_step(&z, &dz, tau)) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        x.axpy(ap, &dx);
        y += dy * ad;
        z.axpy(ad, &dz);
    }

    let xs = x
        .0
        .iter()
        .zip(&problem.block_dims)
        .map(|(xr, &n)| {
            CMat::from_fn(n, n, |r, cc| {
                let re = 0.5 * (xr[(r, cc)] + xr[(r + n, cc + n)]);
                let im = 0.5 * (xr[(r + n, cc)] - xr[(r, cc + n)]);
                Complex64::new(re, im)
            })
        })
        .collect();
    Ok(SdpSolution {
        status,
        primal_objective: pobj,
        dual_objective: dobj,
        gap,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
        iterations: iters,
        x: xs,
        y: y.iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, hermitian_eigenvalues};

    #[test]
    fn embedding_reproduces_trace_pairing() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, -0.7), c(0.3, 0.7), c(-2.0, 0.0)]);
        let x = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)]);
        let at = SparseHerm::from_dense(&a).to_real_dense(2);
        let xt = RMat::from_fn(4, 4, |r, cc| {
            let z = x[(r % 2, cc % 2)];
            match (r / 2, cc / 2) {
                (0, 0) | (1, 1) => z.re,
                (1, 0) => z.im,
                _ => -z.im,
            }
        });
        let want = (&a * &x).trace().re;
        assert!((at.dot(&xt) - want).abs() < 1e-12);
        for (r, cc) in [(0, 1), (1, 0), (1, 1)] {
            let re = SparseHerm::re_entry(r, cc).to_real_dense(2).dot(&xt);
            assert!((re - x[(r, cc)].re).abs() < 1e-12);
            if r != cc {
                let im = SparseHerm::im_entry(r, cc).to_real_dense(2).dot(&xt);
                assert!((im - x[(r, cc)].im).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn smallest_eigenvalue_program() {
        // min Tr(C X) s.t. Tr X = 1 gives lambda_min(C)
        let cm = CMat::from_row_slice(3, 3, &[
            c(2.0, 0.0), c(0.5, 1.0), c(0.0, 0.0),
            c(0.5, -1.0), c(1.0, 0.0), c(0.2, -0.1),
            c(0.0, 0.0), c(0.2, 0.1), c(3.0, 0.0),
        ]);
        let mut tr = SparseHerm::new();
        for i in 0..3 {
            tr.add(i, i, c(1.0, 0.0));
        }
        let p = SdpProblem {
            block_dims: vec![3],
            objective: vec![SparseHerm::from_dense(&cm)],
            constraints: vec![Constraint { terms: vec![(0, tr)], rhs: 1.0 }],
        };
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        let lmin = hermitian_eigenvalues(&cm)[0];
        assert!((s.primal_objective - lmin).abs() < 1e-7, "{} vs {lmin}", s.primal_objective);
        assert!(s.gap <= 1e-8);
    }

    #[test]
    fn trace_above_identity() {
        // min X s.t. X - S = 1, S >= 0
        let mut one = SparseHerm::new();
        one.add(0, 0, c(1.0, 0.0));
        let p = SdpProblem {
            block_dims: vec![1, 1],
            objective: vec![one.clone(), SparseHerm::new()],
            constraints: vec![Constraint { terms: vec![(0, one.clone()), (1, one.scaled(-1.0))], rhs: 1.0 }],
        };
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_objective - 1.0).abs() < 1e-7);
        assert!(s.primal_objective >= s.dual_objective - 1e-12);
    }

    #[test]
    fn size_cap_is_enforced() {
        let p = SdpProblem {
            block_dims: vec![SIZE_CAP + 1],
            objective: vec![SparseHerm::new()],
            constraints: vec![],
        };
        assert!(matches!(solve(&p, &SdpOptions::default()), Err(SdpError::SizeCapExceeded { .. })));
    }
}
