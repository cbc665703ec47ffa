use crate::linalg::{identity, max_abs, omega_vector, CMat};

use super::{ChannelError, ChoiMatrix};

/// Default residual allowed when reading a Choi matrix as covariant.
pub const COVARIANCE_TOL: f64 = 1e-8;

/// A fully SU(d)-covariant channel `C^d -> C^d`, fixed by one number: its Choi
/// state is `(1-a) Phi+ + a rho_perp` with `rho_perp = (I - Phi+)/(d^2-1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovariantChannel {
    pub d: usize,
    pub a: f64,
}

impl CovariantChannel {
    pub fn new(d: usize, a: f64) -> Result<Self, ChannelError> {
        if d < 2 || !(-1e-12..=1.0 + 1e-12).contains(&a) {
            return Err(ChannelError::OutOfRange(format!("covariant parameter a={a} for d={d}")));
        }
        Ok(Self { d, a: a.clamp(0.0, 1.0) })
    }

    pub fn choi(&self) -> ChoiMatrix {
        covariant_choi(self.d, self.a)
    }
}

fn phi_plus(d: usize) -> CMat {
    let w = omega_vector(d);
    (&w * w.adjoint()).unscale(d as f64)
}

pub fn covariant_choi(d: usize, a: f64) -> ChoiMatrix {
    let p = phi_plus(d);
    let perp = (identity(d * d) - &p).unscale((d * d - 1) as f64);
    ChoiMatrix::from_raw(p.scale(1.0 - a) + perp.scale(a), d, d)
}

/// `1 - <Phi+| J |Phi+>`, the weight outside the maximally entangled state.
pub fn phi_plus_defect(choi: &ChoiMatrix) -> f64 {
    let d = choi.dim_in();
    let w = omega_vector(d);
    1.0 - (w.adjoint() * choi.matrix() * &w)[(0, 0)].re / d as f64
}

/// Reads `a` off a covariant Choi matrix, rejecting matrices that are not of the
/// covariant form within `tol` (entrywise).
pub fn covariant_params(choi: &ChoiMatrix, tol: f64) -> Result<CovariantChannel, ChannelError> {
    let d = choi.dim_in();
    if choi.dim_out() != d {
        return Err(ChannelError::DimensionMismatch { expected: (d, d), got: (choi.dim_out(), d) });
    }
    let a = phi_plus_defect(choi);
    let r = max_abs(&(choi.matrix() - covariant_choi(d, a).matrix()));
    if r > tol {
        return Err(ChannelError::NotCovariant(r));
    }
    CovariantChannel::new(d, a)
}

/// Projection onto covariant channels (the group twirl); keeps the
/// entanglement fidelity with the identity.
pub fn twirl_to_covariant(choi: &ChoiMatrix) -> Result<CovariantChannel, ChannelError> {
    let d = choi.dim_in();
    if choi.dim_out() != d {
        return Err(ChannelError::DimensionMismatch { expected: (d, d), got: (choi.dim_out(), d) });
    }
    CovariantChannel::new(d, phi_plus_defect(choi))
}

/// Closed-form entanglement fidelity and entanglement error between covariant
/// channels with parameters `a` and `b`.
pub fn cov_fidelity_and_errors(a: f64, b: f64) -> (f64, f64) {
    let f = ((1.0 - a) * (1.0 - b)).sqrt() + (a * b).sqrt();
    (f * f, (a - b).abs())
}

/// Upper bound on the worst-case error between covariant channels `A` (parameter
/// `a`) and `B` (parameter `b`): `9 d max{a, 1 - F_ent(A, B)}`. Valid only while
/// the entanglement error is at most 1/2.
pub fn lemma5_bound(a: f64, b: f64, d: usize) -> Result<f64, ChannelError> {
    let (f, eps) = cov_fidelity_and_errors(a, b);
    if eps > 0.5 {
        return Err(ChannelError::OutOfRange(format!("entanglement error {eps} exceeds 1/2")));
    }
    Ok(9.0 * d as f64 * a.max(1.0 - f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{entanglement_error, entanglement_fidelity, haar_quadrature_su2, KrausChannel};
    use crate::linalg::c;

    #[test]
    fn closed_forms_match_direct_metrics() {
        for d in [2, 3] {
            for &(a, b) in &[(0.0, 0.0), (0.1, 0.3), (0.7, 0.2), (1.0, 0.05)] {
                let ja = covariant_choi(d, a);
                let jb = covariant_choi(d, b);
                let (f, e) = cov_fidelity_and_errors(a, b);
                let fd = entanglement_fidelity(&ja, &jb).unwrap();
                assert!((fd - f).abs() < 1e-9, "d={d} a={a} b={b}: {fd} vs {f}");
                assert!((entanglement_error(&ja, &jb).unwrap() - e).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn example_values() {
        assert_eq!(cov_fidelity_and_errors(0.0, 0.0), (1.0, 0.0));
        let (f, e) = cov_fidelity_and_errors(0.1, 0.1);
        assert!((f - 1.0).abs() < 1e-15 && e == 0.0);
        assert!(lemma5_bound(0.0, 0.9, 2).is_err());
        assert!((lemma5_bound(0.1, 0.1, 2).unwrap() - 1.8).abs() < 1e-12);
    }

    #[test]
    fn params_roundtrip_and_rejection() {
        let j = covariant_choi(3, 0.25);
        assert!((covariant_params(&j, 1e-8).unwrap().a - 0.25).abs() < 1e-12);
        let ad = KrausChannel::new(vec![
            CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.8f64.sqrt(), 0.0)]),
            CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.2f64.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        ])
        .unwrap();
        assert!(matches!(covariant_params(&ad.choi(), 1e-8), Err(ChannelError::NotCovariant(_))));
    }

    #[test]
    fn quadrature_twirl_matches_reconstruction() {
        // amplitude damping twirled by explicit Haar integration over SU(2)
        let g: f64 = 0.3;
        let k = [
            CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - g).sqrt(), 0.0)]),
            CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(g.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        ];
        let ch = KrausChannel::new(k.to_vec()).unwrap();
        let quad = haar_quadrature_su2(4).unwrap();
        let mut ops = Vec::new();
        for node in quad.nodes() {
            let u = node.unitary();
            for kk in &k {
                ops.push((u.adjoint() * kk * &u).scale(node.weight.sqrt()));
            }
        }
        let tw = KrausChannel::new(ops).unwrap().choi();
        let cov = twirl_to_covariant(&ch.choi()).unwrap();
        assert!(max_abs(&(tw.matrix() - cov.choi().matrix())) < 1e-10);
        assert!(covariant_params(&tw, COVARIANCE_TOL).is_ok());
    }
}
