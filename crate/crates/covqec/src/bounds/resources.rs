use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::haar_special_unitary;
use crate::linalg::{identity, kron, CMat};
use crate::rep::{enumerate_diagrams, weyl_dimension};

use super::BoundsError;

/// Reference register dimension after compression to its isotypic content.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionDims {
    /// `sum_{lambda in Y_{n_R/2}} d_lambda^2`.
    pub exact: BigUint,
    /// `(n_R/2 + 1)^{d^2 - 1}`.
    pub bound: BigUint,
}

pub fn compression_dims(d: usize, n_r: u32) -> Result<CompressionDims, BoundsError> {
    if n_r % 2 != 0 {
        return Err(BoundsError::Invalid(format!("n_R = {n_r} must be even")));
    }
    let half = n_r / 2;
    let mut exact = BigUint::from(0u32);
    for lam in enumerate_diagrams(half, d)? {
        let dl = weyl_dimension(&lam, d)?;
        exact += &dl * &dl;
    }
    let bound = BigUint::from(half + 1).pow((d * d - 1) as u32);
    Ok(CompressionDims { exact, bound })
}

pub const TDESIGN_CONSTANT: f64 = 170_000.0;

/// Local random circuit length for an approximate `t`-design on `N`-qudit
/// blocks, `t = n_P + n_R/2 + 1`, with natural logarithms. Rounded up.
pub fn tdesign_gate_count(big_n: u32, n_p: u32, n_r: u32, eps: f64) -> Result<u128, BoundsError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(BoundsError::Invalid(format!("eps = {eps}")));
    }
    let t = (n_p + n_r / 2 + 1) as f64;
    let nf = big_n as f64;
    let log_term = (4.0 * t).ln().ceil();
    let k = TDESIGN_CONSTANT * nf * log_term * log_term * t.powf(8.1) * (2.0 * nf * t + 1.0 + (1.0 / eps).ln());
    if !k.is_finite() || k >= u128::MAX as f64 {
        return Err(BoundsError::Invalid(format!("gate count overflows: {k:e}")));
    }
    Ok(k.ceil() as u128)
}

/// Two-qubit gate on qubits `site` and `site + 1`.
#[derive(Clone, Debug)]
pub struct LocalGate {
    pub site: usize,
    pub unitary: CMat,
}

/// `k` gates on a line of `n_qubits`, each on a uniformly random neighbouring
/// pair with a Haar-random SU(4) element.
pub fn local_circuit_sampler(n_qubits: usize, k: usize, seed: u64) -> Result<Vec<LocalGate>, BoundsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_circuit(n_qubits, k, &mut rng)
}

fn sample_circuit<R: Rng + ?Sized>(n_qubits: usize, k: usize, rng: &mut R) -> Result<Vec<LocalGate>, BoundsError> {
    if n_qubits < 2 {
        return Err(BoundsError::Invalid(format!("need at least two qubits, got {n_qubits}")));
    }
    Ok((0..k)
        .map(|_| {
            let site = rng.gen_range(0..n_qubits - 1);
            LocalGate { site, unitary: haar_special_unitary(4, rng) }
        })
        .collect())
}

fn circuit_unitary(n_qubits: usize, gates: &[LocalGate]) -> CMat {
    let dim = 1 << n_qubits;
    let mut u = identity(dim);
    for g in gates {
        let left = identity(1 << g.site);
        let right = identity(1 << (n_qubits - g.site - 2));
        u = kron(&kron(&left, &g.unitary), &right) * u;
    }
    u
}

/// Empirical Choi state of `rho -> E[U rho U^dag]` over `samples` circuits of
/// length `k`.
pub fn first_moment_choi(n_qubits: usize, k: usize, samples: usize, seed: u64) -> Result<CMat, BoundsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1 << n_qubits;
    let mut acc = CMat::zeros(dim * dim, dim * dim);
    for _ in 0..samples {
        let u = circuit_unitary(n_qubits, &sample_circuit(n_qubits, k, &mut rng)?);
        let v = nalgebra::DVector::from_fn(dim * dim, |idx, _| u[(idx / dim, idx % dim)]);
        acc += &v * v.adjoint();
    }
    Ok(acc.unscale((dim * samples.max(1)) as f64))
}

/// Choi state of the exact Haar twirl `rho -> Tr(rho) I / D`.
pub fn haar_first_moment_choi(n_qubits: usize) -> CMat {
    let dim = 1 << n_qubits;
    identity(dim * dim).unscale((dim * dim) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, trace_norm_hermitian};

    #[test]
    fn compression_examples() {
        let a = compression_dims(2, 2).unwrap();
        assert_eq!((a.exact, a.bound), (BigUint::from(4u32), BigUint::from(8u32)));
        let b = compression_dims(2, 4).unwrap();
        assert_eq!((b.exact, b.bound), (BigUint::from(10u32), BigUint::from(27u32)));
        assert!(compression_dims(2, 3).is_err());
    }

    #[test]
    fn compression_inequality() {
        for d in [2, 3] {
            for n_r in (2..=60).step_by(2) {
                let c = compression_dims(d, n_r).unwrap();
                assert!(c.exact <= c.bound, "d={d} n_R={n_r}");
            }
        }
    }

    #[test]
    fn gate_count_examples() {
        let t: f64 = 3.0;
        let expect = 170_000.0 * 12f64.ln().ceil().powi(2) * t.powf(8.1) * (7.0 + 2f64.ln());
        let k = tdesign_gate_count(1, 1, 2, 0.5).unwrap();
        assert_eq!(k, expect.ceil() as u128);
        let k1 = tdesign_gate_count(1, 1, 40, 0.01).unwrap() as f64;
        let k2 = tdesign_gate_count(1, 1, 80, 0.01).unwrap() as f64;
        assert!(k2 / k1 <= 2f64.powf(9.1) * 2.0);
        assert!(tdesign_gate_count(1, 1, 2, 1.5).is_err());
    }

    #[test]
    fn sampler_sites_and_unitarity() {
        let gates = local_circuit_sampler(6, 10_000, 3).unwrap();
        let mut hist = [0usize; 5];
        for g in &gates {
            hist[g.site] += 1;
        }
        let e = 10_000.0 / 5.0;
        let chi2: f64 = hist.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
        // 4 degrees of freedom: mean 4, sd sqrt(8)
        assert!(chi2 < 4.0 + 3.0 * 8f64.sqrt(), "chi2 = {chi2}");
        for g in gates.iter().take(200) {
            assert!(max_abs(&(g.unitary.adjoint() * &g.unitary - identity(4))) < 1e-12);
            assert!((g.unitary.determinant() - nalgebra::Complex::new(1.0, 0.0)).norm() < 1e-10);
        }
        assert!(local_circuit_sampler(1, 3, 0).is_err());
    }

    #[test]
    fn first_moment_converges() {
        let exact = haar_first_moment_choi(2);
        let dist = |k| 0.5 * trace_norm_hermitian(&(first_moment_choi(2, k, 10_000, 9).unwrap() - &exact));
        let (d0, d1, d50) = (dist(0), dist(1), dist(50));
        assert!(d0 > 0.9 && d1 < d0 && d50 <= 0.05, "{d0} {d1} {d50}");
    }
}
