//! Small exact erasure codes, the flagged erasure channel, and recovery maps
//! built from the erased-subspace restriction of the encoder.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::channels::{ChannelError, KrausChannel};
use crate::linalg::{c, hermitian_eigh, identity, kron, max_abs, trace_norm_hermitian, CMat};
use crate::sdp::{diamond_error, SdpError};

/// Largest physical register handled densely.
pub const MAX_PHYSICAL: usize = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("encoder is not an isometry (residual {0:e})")]
    NotIsometry(f64),
    #[error("qudit index {index} out of range for {n} qudits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("register of {n} qudits exceeds the dense cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("stabilizer check failed (residual {0:e})")]
    Stabilizer(f64),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
}

/// Encoder `C^d -> (C^d)^{(x) n_p}` with its erasure distance.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    pub name: String,
    pub d: usize,
    pub n_p: usize,
    /// `d^n_p x d` isometry; qudit 0 is the most significant digit.
    pub encoder: CMat,
    /// Any pattern with fewer erasures than this is corrected exactly.
    pub distance: usize,
}

impl CodeSpec {
    pub fn new(name: &str, d: usize, n_p: usize, encoder: CMat, distance: usize) -> Result<Self, CodeError> {
        if n_p > MAX_PHYSICAL {
            return Err(CodeError::TooLarge { n: n_p, cap: MAX_PHYSICAL });
        }
        let r = max_abs(&(encoder.adjoint() * &encoder - identity(d)));
        if encoder.shape() != (d.pow(n_p as u32), d) || r > 1e-10 {
            return Err(CodeError::NotIsometry(r));
        }
        Ok(Self { name: name.to_string(), d, n_p, encoder, distance })
    }

    pub fn corrects(&self, erasures: usize) -> bool {
        erasures < self.distance
    }
}

fn pauli(k: char) -> CMat {
    let (z, o, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match k {
        'X' => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => identity(2),
    }
}

fn pauli_string(s: &str) -> CMat {
    s.chars().fold(identity(1), |acc, k| kron(&acc, &pauli(k)))
}

/// Stabilizer generators of the five-qubit code: cyclic shifts of `XZZXI`.
pub fn five_qubit_stabilizers() -> Vec<CMat> {
    ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"].iter().map(|s| pauli_string(s)).collect()
}

/// The `[[5,1,3]]` code: logical zero is the projection of `|00000>` onto the
/// stabilizer space, logical one is `XXXXX` applied to it.
pub fn five_qubit_code() -> Result<CodeSpec, CodeError> {
    let stabs = five_qubit_stabilizers();
    let mut proj = identity(32);
    for s in &stabs {
        proj = proj * (identity(32) + s).scale(0.5);
    }
    let mut zero = proj.column(0).into_owned();
    let nrm = zero.norm();
    zero /= c(nrm, 0.0);
    let one = pauli_string("XXXXX") * &zero;
    let mut enc = CMat::zeros(32, 2);
    enc.set_column(0, &zero);
    enc.set_column(1, &one);
    let resid = stabs.iter().map(|s| max_abs(&(s * &enc - &enc))).fold(0.0, f64::max);
    if resid > 1e-12 {
        return Err(CodeError::Stabilizer(resid));
    }
    CodeSpec::new("five-qubit", 2, 5, enc, 3)
}

/// One physical qudit, identity encoder.
pub fn trivial_code(d: usize) -> CodeSpec {
    CodeSpec { name: "trivial".into(), d, n_p: 1, encoder: identity(d), distance: 1 }
}

/// Erased qudit indices over a physical register followed by a reference
/// register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasurePattern {
    erased: BTreeSet<usize>,
    n_p: usize,
    n_r: usize,
}

impl ErasurePattern {
    pub fn new(erased: BTreeSet<usize>, n_p: usize, n_r: usize) -> Result<Self, CodeError> {
        let n = n_p + n_r;
        if let Some(&bad) = erased.iter().find(|&&i| i >= n) {
            return Err(CodeError::IndexOutOfRange { index: bad, n });
        }
        Ok(Self { erased, n_p, n_r })
    }

    pub fn physical_only(erased: BTreeSet<usize>, n_p: usize) -> Result<Self, CodeError> {
        Self::new(erased, n_p, 0)
    }

    pub fn erased(&self) -> &BTreeSet<usize> {
        &self.erased
    }

    /// Erased physical indices.
    pub fn physical(&self) -> BTreeSet<usize> {
        self.erased.iter().copied().filter(|&i| i < self.n_p).collect()
    }

    /// Erased reference indices, counted from the start of the reference register.
    pub fn reference(&self) -> BTreeSet<usize> {
        self.erased.iter().filter(|&&i| i >= self.n_p).map(|&i| i - self.n_p).collect()
    }

    pub fn registers(&self) -> (usize, usize) {
        (self.n_p, self.n_r)
    }
}

fn digits(mut x: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = x % d;
        x /= d;
    }
    out
}

fn number(ds: &[usize], base: usize) -> usize {
    ds.iter().fold(0, |acc, &v| acc * base + v)
}

/// Erasure on `n` qudits: every erased qudit is traced out and replaced by the
/// flag level `d`, so the channel maps `(C^d)^n` into `(C^{d+1})^n`.
pub fn erase(n: usize, d: usize, erased: &BTreeSet<usize>) -> Result<KrausChannel, CodeError> {
    if n > MAX_PHYSICAL {
        return Err(CodeError::TooLarge { n, cap: MAX_PHYSICAL });
    }
    if let Some(&bad) = erased.iter().find(|&&i| i >= n) {
        return Err(CodeError::IndexOutOfRange { index: bad, n });
    }
    let dim_in = d.pow(n as u32);
    let dim_out = (d + 1).pow(n as u32);
    let idx: Vec<usize> = erased.iter().copied().collect();
    let mut ops = Vec::new();
    for e in 0..d.pow(idx.len() as u32) {
        let ev = digits(e, d, idx.len());
        let mut k = CMat::zeros(dim_out, dim_in);
        for x in 0..dim_in {
            let mut xd = digits(x, d, n);
            if idx.iter().zip(&ev).any(|(&i, &v)| xd[i] != v) {
                continue;
            }
            for &i in &idx {
                xd[i] = d;
            }
            k[(number(&xd, d + 1), x)] = c(1.0, 0.0);
        }
        ops.push(k);
    }
    Ok(KrausChannel::new(ops)?)
}

/// Encoder followed by erasure of the physical qudits in `erased`, with the
/// flags dropped: logical qudit to the surviving qudits.
pub fn erased_encoding(code: &CodeSpec, erased: &BTreeSet<usize>) -> Result<KrausChannel, CodeError> {
    let n = code.n_p;
    let d = code.d;
    if let Some(&bad) = erased.iter().find(|&&i| i >= n) {
        return Err(CodeError::IndexOutOfRange { index: bad, n });
    }
    let lost: Vec<usize> = erased.iter().copied().collect();
    let kept: Vec<usize> = (0..n).filter(|i| !erased.contains(i)).collect();
    let dim_kept = d.pow(kept.len() as u32);
    let mut ops = vec![CMat::zeros(dim_kept, d); d.pow(lost.len() as u32)];
    for x in 0..d.pow(n as u32) {
        let xd = digits(x, d, n);
        let e = number(&lost.iter().map(|&i| xd[i]).collect::<Vec<_>>(), d);
        let r = number(&kept.iter().map(|&i| xd[i]).collect::<Vec<_>>(), d);
        for j in 0..d {
            ops[e][(r, j)] = code.encoder[(x, j)];
        }
    }
    ops.retain(|k| max_abs(k) > 0.0);
    Ok(KrausChannel::new(ops)?)
}

/// Recovery from the surviving qudits back to the logical qudit.
#[derive(Clone, Debug)]
pub struct RecoveryMap(pub KrausChannel);

/// Transpose-channel recovery for the maximally mixed logical state:
/// `R_e = d^{-1/2} K_e^dag N(I/d)^{-1/2}` on the support of `N(I/d)`, completed
/// by sending the kernel to `|0>`. Exact whenever the pattern is correctable,
/// trace preserving always.
pub fn erasure_recovery(code: &CodeSpec, erased: &BTreeSet<usize>) -> Result<RecoveryMap, CodeError> {
    let n = erased_encoding(code, erased)?;
    let d = code.d;
    let sigma = identity(d).unscale(d as f64);
    let out = n.apply(&sigma);
    let (vals, vecs) = hermitian_eigh(&out);
    let top = vals.last().copied().unwrap_or(0.0);
    let dim = out.nrows();
    let mut inv_sqrt = CMat::zeros(dim, dim);
    let mut kernel = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        let col = vecs.column(k);
        if v > 1e-12 * top {
            inv_sqrt += (&col * col.adjoint()).unscale(v.sqrt());
        } else {
            kernel.push(col.into_owned());
        }
    }
    let mut ops: Vec<CMat> = n.ops().iter().map(|k| (k.adjoint() * &inv_sqrt).unscale((d as f64).sqrt())).collect();
    for q in kernel {
        let mut m = CMat::zeros(d, dim);
        for (j, v) in q.iter().enumerate() {
            m[(0, j)] = v.conj();
        }
        ops.push(m);
    }
    Ok(RecoveryMap(KrausChannel::new(ops)?))
}

/// `D o C_pattern o E` as a logical channel.
pub fn corrected_channel(code: &CodeSpec, erased: &BTreeSet<usize>) -> Result<KrausChannel, CodeError> {
    let n = erased_encoding(code, erased)?;
    let r = erasure_recovery(code, erased)?;
    Ok(n.then(&r.0)?)
}

/// Worst-case error of the corrected channel against the identity.
/// When the Choi states already agree to within `1e-10 / d` the bracket
/// `diamond <= d * choi_distance` settles the value without a solve.
pub fn code_error(code: &CodeSpec, erased: &BTreeSet<usize>) -> Result<f64, CodeError> {
    let ch = corrected_channel(code, erased)?.choi();
    let id = KrausChannel::identity(code.d).choi();
    let upper = code.d as f64 * 0.5 * trace_norm_hermitian(&(ch.matrix() - id.matrix()));
    if upper <= 1e-10 {
        return Ok(upper);
    }
    Ok(diamond_error(&ch, &id)?.value)
}

/// All subsets of `0..n` with exactly `k` elements, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<BTreeSet<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<BTreeSet<usize>>) {
        if cur.len() == k {
            out.push(cur.iter().copied().collect());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{entanglement_fidelity, uhlmann_fidelity};
    use crate::linalg::{partial_trace_first, partial_trace_second};

    #[test]
    fn five_qubit_code_is_valid() {
        let code = five_qubit_code().unwrap();
        let e = &code.encoder;
        assert!(max_abs(&(e.adjoint() * e - identity(2))) < 1e-12);
        assert!((e.column(0).adjoint() * e.column(1))[(0, 0)].norm() < 1e-12);
        for s in five_qubit_stabilizers() {
            assert!(max_abs(&(&s * e - e)) < 1e-12);
        }
    }

    #[test]
    fn up_to_two_erasures_are_corrected() {
        let code = five_qubit_code().unwrap();
        let id = KrausChannel::identity(2).choi();
        for k in 0..=2 {
            for s in subsets(5, k) {
                let ch = corrected_channel(&code, &s).unwrap();
                assert!(max_abs(&(ch.choi().matrix() - id.matrix())) < 1e-9, "{s:?}");
                assert!(ch.tp_residual() < 1e-10);
            }
        }
        assert!(code_error(&code, &BTreeSet::from([0, 3])).unwrap() < 1e-8);
        assert!(code_error(&code, &BTreeSet::new()).unwrap() < 1e-8);
    }

    #[test]
    fn three_erasures_match_worst_input_scan() {
        let code = five_qubit_code().unwrap();
        let s = BTreeSet::from([0, 1, 2]);
        let ch = corrected_channel(&code, &s).unwrap();
        assert!(ch.tp_residual() < 1e-10);
        let v = code_error(&code, &s).unwrap();
        assert!(v > 0.0 && v <= 1.0 + 1e-9);
        // worst input over purifications of Bloch-ball marginals
        let ju = ch.choi().unnormalized();
        let iu = KrausChannel::identity(2).choi().unnormalized();
        let dist = |x: f64, y: f64, z: f64| {
            let rho = CMat::from_row_slice(2, 2, &[c(1.0 + z, 0.0), c(x, -y), c(x, y), c(1.0 - z, 0.0)]).scale(0.5);
            let s = crate::linalg::hermitian_map(&rho.transpose(), |v| v.max(0.0).sqrt());
            let side = kron(&identity(2), &s);
            0.5 * trace_norm_hermitian(&(&side * (&ju - &iu) * &side))
        };
        let mut best: f64 = 0.0;
        let n = 24;
        for i in 0..=n {
            for j in 0..=n {
                let (th, ph) = (std::f64::consts::PI * i as f64 / n as f64, 2.0 * std::f64::consts::PI * j as f64 / n as f64);
                for r in [0.0, 0.5, 0.9, 1.0] {
                    best = best.max(dist(r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()));
                }
            }
        }
        assert!(best <= v + 1e-7 && v - best < 1e-4, "sdp {v} vs scan {best}");
    }

    #[test]
    fn trivial_code_losses() {
        let code = trivial_code(2);
        assert!(code_error(&code, &BTreeSet::new()).unwrap() < 1e-10);
        let ch = corrected_channel(&code, &BTreeSet::from([0])).unwrap();
        let f = entanglement_fidelity(&ch.choi(), &KrausChannel::identity(2).choi()).unwrap();
        assert!((f - 0.25).abs() < 1e-12);
        assert!((code_error(&code, &BTreeSet::from([0])).unwrap() - 0.75).abs() < 1e-7);
    }

    #[test]
    fn erase_examples() {
        // empty pattern: embedding
        let e = erase(2, 2, &BTreeSet::new()).unwrap();
        let rho = CMat::from_fn(4, 4, |i, j| c(if i == j { 0.25 } else { 0.0 }, 0.0));
        assert!((e.apply(&rho).trace().re - 1.0).abs() < 1e-12);
        // all erased: pure flag state
        let all = erase(2, 2, &BTreeSet::from([0, 1])).unwrap();
        let out = all.apply(&rho);
        assert!((out[(8, 8)].re - 1.0).abs() < 1e-12);
        // one half of a Bell pair: the other half is maximally mixed
        let mut bell = CMat::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(i, j)] = c(0.5, 0.0);
        }
        let one = erase(2, 2, &BTreeSet::from([0])).unwrap();
        let out = one.apply(&bell);
        let kept = partial_trace_first(&out, 3, 3);
        assert!((kept[(0, 0)].re - 0.5).abs() < 1e-12 && (kept[(1, 1)].re - 0.5).abs() < 1e-12);
        let flag = partial_trace_second(&out, 3, 3);
        assert!((flag[(2, 2)].re - 1.0).abs() < 1e-12);
        // output on an erased slot does not depend on the input
        let a = CMat::from_fn(4, 4, |i, j| c(if i == j && i == 0 { 1.0 } else { 0.0 }, 0.0));
        let b = CMat::from_fn(4, 4, |i, j| c(if i == j && i == 2 { 1.0 } else { 0.0 }, 0.0));
        let fa = partial_trace_second(&one.apply(&a), 3, 3);
        let fb = partial_trace_second(&one.apply(&b), 3, 3);
        assert!(uhlmann_fidelity(&fa, &fb).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(4, 0), vec![BTreeSet::new()]);
    }
}
