//! Joint reference states of maximally entangled pairs and the worst-case
//! fidelity functional over the physical irreps.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use crate::optim::simplex_min;
use crate::rep::{dimension_f64, dualize, schur_weyl_distribution, tensor_decompose, to_f64, YoungDiagram};

use super::{RefFrameError, RefFrameSpec};

/// Largest cost set accepted by [`reference_fidelity`].
pub const S_COST_CAP: usize = 256;

/// `s` maximally entangled pairs measured jointly: Schur-Weyl weights on `Y_s`.
pub fn strong_combined_spec(d: usize, s: u32) -> Result<RefFrameSpec, RefFrameError> {
    if s == 0 {
        return Err(RefFrameError::AllCopiesErased { copies: 0 });
    }
    let dist = schur_weyl_distribution(s, d)?;
    let weights: BTreeMap<YoungDiagram, f64> = dist.iter().map(|(l, p)| (l.clone(), to_f64(p))).collect();
    let total: f64 = weights.values().sum();
    RefFrameSpec::new(d, s, weights.into_iter().map(|(l, w)| (l, w / total)).collect())
}

/// Distinct irreps of `U*_L (x) U_P^{(x) n_p}`, each with `n_p + d - 1` boxes.
pub fn s_cost(d: usize, n_p: u32) -> Result<Vec<YoungDiagram>, RefFrameError> {
    let fund = YoungDiagram::new(&[1])?;
    let mut cur: BTreeSet<YoungDiagram> = BTreeSet::from([dualize(&fund, d)?]);
    for _ in 0..n_p {
        let mut next = BTreeSet::new();
        for mu in &cur {
            for (nu, _) in tensor_decompose(mu, &fund, d)? {
                next.insert(nu);
            }
        }
        cur = next;
        if cur.len() > S_COST_CAP {
            return Err(RefFrameError::TooLarge { size: cur.len(), cap: S_COST_CAP });
        }
    }
    Ok(cur.into_iter().collect())
}

#[derive(Clone, Debug)]
pub struct ReferenceFidelity {
    pub value: f64,
    /// Minimizing weights, aligned with `cost_set`.
    pub weights: Vec<f64>,
    pub cost_set: Vec<YoungDiagram>,
}

/// Worst-case fidelity of the measure-and-correct step with reference `spec`
/// and `n_p` physical qudits:
/// `min_w sum_{mu,mu'} w_mu w_mu' sum_{l,l'} sqrt(q_l q_l') C^{l,l'}_{mu,mu'} / (d_mu d_mu')`.
pub fn reference_fidelity(spec: &RefFrameSpec, n_p: u32) -> Result<ReferenceFidelity, RefFrameError> {
    let d = spec.d();
    let cost = s_cost(d, n_p)?;
    let q = cost_matrix(spec, &cost)?;
    let best = simplex_min(&q);
    Ok(ReferenceFidelity { value: best.value.clamp(0.0, 1.0), weights: best.weights, cost_set: cost })
}

/// The quadratic form of [`reference_fidelity`] before minimization.
pub fn cost_matrix(spec: &RefFrameSpec, cost: &[YoungDiagram]) -> Result<DMatrix<f64>, RefFrameError> {
    let d = spec.d();
    let support: Vec<(&YoungDiagram, f64)> = spec.weights().iter().map(|(l, &w)| (l, w.sqrt())).collect();
    // l (x) mu decompositions, shared by every pair
    let mut dec: Vec<Vec<BTreeMap<YoungDiagram, u64>>> = Vec::with_capacity(support.len());
    for (l, _) in &support {
        let row = cost
            .iter()
            .map(|mu| Ok(tensor_decompose(l, mu, d)?.into_iter().collect()))
            .collect::<Result<Vec<_>, RefFrameError>>()?;
        dec.push(row);
    }
    let dims: Vec<f64> = cost.iter().map(|mu| dimension_f64(mu, d)).collect();
    let k = cost.len();
    let mut q = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let mut s = 0.0;
            for (i, (_, ri)) in support.iter().enumerate() {
                for (j, (_, rj)) in support.iter().enumerate() {
                    let (x, y) = (&dec[i][a], &dec[j][b]);
                    let c: u64 = x.iter().map(|(nu, c1)| c1 * y.get(nu).copied().unwrap_or(0)).sum();
                    if c > 0 {
                        s += ri * rj * c as f64;
                    }
                }
            }
            let v = s / (dims[a] * dims[b]);
            q[(a, b)] = v;
            q[(b, a)] = v;
        }
    }
    Ok(q)
}

/// Fidelity with `s` surviving maximally entangled pairs as reference.
pub fn f_strong(d: usize, s: u32, n_p: u32) -> Result<f64, RefFrameError> {
    if !(2..=3).contains(&d) {
        return Err(RefFrameError::Unsupported(format!("f_strong for d = {d}")));
    }
    Ok(reference_fidelity(&strong_combined_spec(d, s)?, n_p)?.value)
}
