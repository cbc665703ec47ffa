use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channels::{ChoiMatrix, KrausChannel};
use crate::linalg::{hermitian_eigh, CMat};
use crate::optim::{simplex_min, SimplexMin};

use super::solver::{solve, Constraint, SdpOptions, SdpProblem, SdpSolution, SdpStatus, SparseHerm};
use super::SdpError;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn require_optimal(sol: SdpSolution) -> Result<SdpSolution, SdpError> {
    if sol.status != SdpStatus::Optimal {
        return Err(SdpError::NotConverged {
            status: sol.status,
            gap: sol.gap,
            iterations: sol.iterations,
            primal_infeasibility: sol.primal_infeasibility,
            dual_infeasibility: sol.dual_infeasibility,
        });
    }
    Ok(sol)
}

fn same_dims(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<(), SdpError> {
    if a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out() {
        return Err(SdpError::Malformed(format!(
            "channels differ in shape: {}->{} vs {}->{}",
            a.dim_in(),
            a.dim_out(),
            b.dim_in(),
            b.dim_out()
        )));
    }
    Ok(())
}

/// Square root of the worst-case fidelity together with a minimizing input
/// marginal.
#[derive(Clone, Debug)]
pub struct FidelitySdp {
    pub value: f64,
    pub rho: CMat,
    pub solution: SdpSolution,
}

/// Orthonormal basis of the support of a PSD matrix and the compressed matrix
/// (diagonal of its nonzero eigenvalues).
fn support(m: &CMat) -> (CMat, Vec<f64>) {
    let (vals, vecs) = hermitian_eigh(m);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > SUPPORT_CUTOFF * top).collect();
    let basis = CMat::from_fn(m.nrows(), keep.len(), |r, c| vecs[(r, keep[c])]);
    (basis, keep.iter().map(|&k| vals[k]).collect())
}

/// Relative eigenvalue cutoff defining a Choi matrix's support.
pub const SUPPORT_CUTOFF: f64 = 1e-11;

/// `sqrt(F_wc(A, B))` as the program
/// `min 1/2 (Tr[A G] + Tr[B L])` over `[[G, -I(x)rho], [-I(x)rho, L]] >= 0` with
/// `rho` a state, where `A`, `B` are the unnormalized Choi matrices.
///
/// `G` and `L` are taken on the supports of `A` and `B`: outside them the
/// infimum is only approached as the blocks grow without bound, which stalls
/// an interior-point method. The optimal value is unchanged.
pub fn sqrt_fwc(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<FidelitySdp, SdpError> {
    sqrt_fwc_with(a, b, &SdpOptions::default())
}

pub fn sqrt_fwc_with(a: &ChoiMatrix, b: &ChoiMatrix, opts: &SdpOptions) -> Result<FidelitySdp, SdpError> {
    same_dims(a, b)?;
    let (di, dout) = (a.dim_in(), a.dim_out());
    let (va, ea) = support(&a.unnormalized());
    let (vb, eb) = support(&b.unnormalized());
    let (ra, rb) = (ea.len(), eb.len());
    if ra == 0 || rb == 0 {
        return Err(SdpError::Malformed("zero Choi matrix".into()));
    }
    let mut obj = SparseHerm::new();
    for (k, v) in ea.iter().enumerate() {
        obj.add(k, k, Complex64::new(0.5 * v, 0.0));
    }
    for (l, v) in eb.iter().enumerate() {
        obj.add(ra + l, ra + l, Complex64::new(0.5 * v, 0.0));
    }

    let mut constraints = Vec::with_capacity(2 * ra * rb + 1);
    for k in 0..ra {
        for l in 0..rb {
            // (V_A^dag (I (x) rho) V_B)_kl = Tr(rho M)
            let m = CMat::from_fn(di, di, |i2, i| {
                (0..dout).map(|o| va[(o * di + i, k)].conj() * vb[(o * di + i2, l)]).sum()
            });
            let h_re = (&m + m.adjoint()).scale(0.5);
            let h_im = (&m - m.adjoint()) * Complex64::new(0.0, -0.5);
            constraints.push(Constraint {
                terms: vec![(0, SparseHerm::re_entry(k, ra + l)), (1, SparseHerm::from_dense(&h_re))],
                rhs: 0.0,
            });
            constraints.push(Constraint {
                terms: vec![(0, SparseHerm::im_entry(k, ra + l)), (1, SparseHerm::from_dense(&h_im))],
                rhs: 0.0,
            });
        }
    }
    let mut tr = SparseHerm::new();
    for i in 0..di {
        tr.add(i, i, one());
    }
    constraints.push(Constraint { terms: vec![(1, tr)], rhs: 1.0 });

    let problem = SdpProblem { block_dims: vec![ra + rb, di], objective: vec![obj, SparseHerm::new()], constraints };
    let sol = require_optimal(solve(&problem, opts)?)?;
    Ok(FidelitySdp { value: sol.primal_objective, rho: sol.x[1].clone(), solution: sol })
}

#[derive(Clone, Debug)]
pub struct DiamondSdp {
    pub value: f64,
    pub solution: SdpSolution,
}

/// Half the diamond norm of `A - B` as
/// `min ||Tr_out Z||_inf` subject to `Z >= J(A - B)`, `Z >= 0`.
pub fn diamond_error(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<DiamondSdp, SdpError> {
    diamond_error_with(a, b, &SdpOptions::default())
}

pub fn diamond_error_with(a: &ChoiMatrix, b: &ChoiMatrix, opts: &SdpOptions) -> Result<DiamondSdp, SdpError> {
    same_dims(a, b)?;
    let (di, dout) = (a.dim_in(), a.dim_out());
    let dd = di * dout;
    let j = a.unnormalized() - b.unnormalized();
    // blocks: Z, P = Z - J, S = t I - Tr_out Z, t
    let mut constraints = Vec::new();
    for p in 0..dd {
        for q in p..dd {
            constraints.push(Constraint {
                terms: vec![(0, SparseHerm::re_entry(p, q)), (1, neg(SparseHerm::re_entry(p, q)))],
                rhs: j[(p, q)].re,
            });
            if p != q {
                constraints.push(Constraint {
                    terms: vec![(0, SparseHerm::im_entry(p, q)), (1, neg(SparseHerm::im_entry(p, q)))],
                    rhs: j[(p, q)].im,
                });
            }
        }
    }
    for i in 0..di {
        for i2 in i..di {
            let mut zre = SparseHerm::new();
            let mut zim = SparseHerm::new();
            for o in 0..dout {
                let (r, c) = (o * di + i, o * di + i2);
                if i == i2 {
                    zre.add(r, r, one());
                } else {
                    zre.add(r, c, Complex64::new(0.5, 0.0));
                    zim.add(r, c, Complex64::new(0.0, 0.5));
                }
            }
            let mut re = vec![(2, SparseHerm::re_entry(i, i2)), (0, zre)];
            if i == i2 {
                let mut t = SparseHerm::new();
                t.add(0, 0, Complex64::new(-1.0, 0.0));
                re.push((3, t));
            }
            constraints.push(Constraint { terms: re, rhs: 0.0 });
            if i != i2 {
                constraints.push(Constraint { terms: vec![(2, SparseHerm::im_entry(i, i2)), (0, zim)], rhs: 0.0 });
            }
        }
    }
    let mut tobj = SparseHerm::new();
    tobj.add(0, 0, one());
    let problem = SdpProblem {
        block_dims: vec![dd, dd, di, 1],
        objective: vec![SparseHerm::new(), SparseHerm::new(), SparseHerm::new(), tobj],
        constraints,
    };
    let sol = require_optimal(solve(&problem, opts)?)?;
    Ok(DiamondSdp { value: sol.primal_objective.max(0.0), solution: sol })
}

fn neg(s: SparseHerm) -> SparseHerm {
    s.scaled(-1.0)
}

/// One isotypic block `H_lambda (x) C^mult` of a block-covariant channel's input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IrrepBlock {
    pub dim: usize,
    pub mult: usize,
}

#[derive(Clone, Debug)]
pub struct RestrictedFidelity {
    pub value: f64,
    pub weights: Vec<f64>,
}

/// Worst-case fidelity of a block-covariant channel `H -> H`, with the input
/// restricted to `sum_l c_l Phi+_l (x) |0>_mult` and minimized over the block
/// weights `|c_l|^2`. The blocks tile `H` in order, each indexed as
/// `offset + a * mult + k`.
pub fn restricted_fwc(blocks: &[IrrepBlock], channel: &KrausChannel) -> Result<RestrictedFidelity, SdpError> {
    let total: usize = blocks.iter().map(|b| b.dim * b.mult).sum();
    if blocks.is_empty() || channel.dim_in() != total || channel.dim_out() != total {
        return Err(SdpError::Malformed(format!(
            "block layout covers {total} dims, channel is {}->{}",
            channel.dim_in(),
            channel.dim_out()
        )));
    }
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut off = 0;
    for b in blocks {
        offsets.push(off);
        off += b.dim * b.mult;
    }
    // t[k][l] = <Phi_l| K_k (x) I |Phi_l>
    let t: Vec<Vec<Complex64>> = channel
        .ops()
        .iter()
        .map(|k| {
            blocks
                .iter()
                .zip(&offsets)
                .map(|(b, &o)| {
                    let s: Complex64 = (0..b.dim).map(|a| k[(o + a * b.mult, o + a * b.mult)]).sum();
                    s / b.dim as f64
                })
                .collect()
        })
        .collect();
    let n = blocks.len();
    let q = DMatrix::from_fn(n, n, |i, j| t.iter().map(|row| (row[i].conj() * row[j]).re).sum::<f64>());
    let SimplexMin { value, weights } = simplex_min(&q);
    Ok(RestrictedFidelity { value, weights })
}
