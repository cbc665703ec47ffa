//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `(a + a^dag) / 2`.
pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(a);
    let (vals, vecs) = match h.clone().try_symmetric_eigen(f64::EPSILON, 10_000) {
        Some(e) if e.eigenvalues.iter().all(|v| v.is_finite()) => (e.eigenvalues.iter().copied().collect(), e.eigenvectors),
        // nalgebra returns NaN on some exactly structured inputs (e.g. the
        // maximally entangled projector in dimension 64)
        _ => jacobi_eigh(h),
    };
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let n = a.nrows();
    let sorted = idx.iter().map(|&i| vals[i]).collect();
    (sorted, CMat::from_fn(n, n, |r, k| vecs[(r, idx[k])]))
}

pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let h = hermitian_part(a);
    let mut v: Vec<f64> = match h.clone().try_symmetric_eigenvalues_unsorted() {
        Some(v) => v,
        None => jacobi_eigh(h).0,
    };
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalues of a real symmetric matrix, unsorted.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    match nalgebra::linalg::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000) {
        Some(e) if e.eigenvalues.iter().all(|v| v.is_finite()) => e.eigenvalues.iter().copied().collect(),
        _ => jacobi_eigh(m.map(|x| c(x, 0.0))).0,
    }
}

trait TryEigenvalues {
    fn try_symmetric_eigenvalues_unsorted(self) -> Option<Vec<f64>>;
}

impl TryEigenvalues for CMat {
    fn try_symmetric_eigenvalues_unsorted(self) -> Option<Vec<f64>> {
        let e = self.try_symmetric_eigen(f64::EPSILON, 10_000)?;
        e.eigenvalues.iter().all(|v| v.is_finite()).then(|| e.eigenvalues.iter().copied().collect())
    }
}

/// Cyclic Jacobi for a Hermitian matrix; slow but unconditionally convergent.
fn jacobi_eigh(mut a: CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    let mut v = identity(n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q))).map(|(p, q)| a[(p, q)].norm_sqr()).sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // columns p, q of the rotation: (c, -s conj(phase)) and (s phase, c) up to row order
                let (jpp, jpq, jqp, jqq) = (c(cs, 0.0), phase * sn, -phase.conj() * sn, c(cs, 0.0));
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
            }
        }
    }
    ((0..n).map(|k| a[(k, k)].re).collect(), v)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_map(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigh(a);
    let n = a.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        let fv = f(v);
        if fv == 0.0 {
            continue;
        }
        let col = vecs.column(k);
        out += (&col * col.adjoint()).scale(fv);
    }
    out
}

pub fn trace_norm_hermitian(a: &CMat) -> f64 {
    hermitian_eigenvalues(a).iter().map(|v| v.abs()).sum()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Traces out the first factor of `C^{d_a} (x) C^{d_b}`.
pub fn partial_trace_first(a: &CMat, d_a: usize, d_b: usize) -> CMat {
    CMat::from_fn(d_b, d_b, |i, j| (0..d_a).map(|k| a[(k * d_b + i, k * d_b + j)]).sum())
}

/// Traces out the second factor of `C^{d_a} (x) C^{d_b}`.
pub fn partial_trace_second(a: &CMat, d_a: usize, d_b: usize) -> CMat {
    CMat::from_fn(d_a, d_a, |i, j| (0..d_b).map(|k| a[(i * d_b + k, j * d_b + k)]).sum())
}

/// Unnormalized maximally entangled vector `sum_i |i>|i>`.
pub fn omega_vector(d: usize) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_fn(d * d, |k, _| if k / d == k % d { ONE } else { ZERO })
}

/// `U^{(x) n}`.
pub fn tensor_power(u: &CMat, n: usize) -> CMat {
    let mut out = identity(1);
    for _ in 0..n {
        out = kron(&out, u);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &CMat, vals: &[f64], vecs: &CMat) -> f64 {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&x| c(x, 0.0))));
        (a * vecs - vecs * d).norm() + (vecs.adjoint() * vecs - identity(a.nrows())).norm()
    }

    #[test]
    fn jacobi_diagonalizes_random_hermitian() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 9] {
            let m = CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let h = hermitian_part(&m);
            let (vals, vecs) = jacobi_eigh(h.clone());
            assert!(residual(&h, &vals, &vecs) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn eigh_survives_maximally_entangled_projector() {
        // nalgebra's own routine yields NaN on this matrix
        let d = 8;
        let omega = nalgebra::DVector::from_fn(d * d, |k, _| if k / d == k % d { ONE } else { ZERO });
        let p = &omega * omega.adjoint();
        let (vals, vecs) = hermitian_eigh(&p);
        assert!(vals.iter().all(|v| v.is_finite()));
        assert!((vals[d * d - 1] - d as f64).abs() < 1e-12);
        assert!(residual(&p, &vals, &vecs) < 1e-10);
        assert!(hermitian_eigenvalues(&p).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn partial_traces_of_product() {
        let a = CMat::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, i as f64 - j as f64));
        let b = CMat::from_fn(3, 3, |i, j| c(1.0 + (i * j) as f64, 0.0));
        let ab = kron(&a, &b);
        let tb = b.trace();
        let ta = a.trace();
        assert!(max_abs(&(partial_trace_second(&ab, 2, 3) - a.scale(1.0) * tb)) < 1e-12);
        assert!(max_abs(&(partial_trace_first(&ab, 2, 3) - b * ta)) < 1e-12);
    }

    #[test]
    fn spectral_map_square_root() {
        let m = CMat::from_fn(3, 3, |i, j| c((i + j) as f64, (i as f64) - (j as f64)));
        let p = &m * m.adjoint();
        let s = hermitian_map(&p, |v| v.max(0.0).sqrt());
        assert!(max_abs(&(&s * &s - &p)) < 1e-9);
    }
}
