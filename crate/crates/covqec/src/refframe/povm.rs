//! Outcome statistics of the covariant measurement on a reference state.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;

use crate::channels::{haar_su2, rotation_half_angle};
use crate::rep::{character, dimension_f64, su2_character};

use super::{RefFrameError, RefFrameSpec};

/// Density (w.r.t. Haar measure) of the relative rotation `U'` with the given
/// eigenphases: `|sum_l sqrt(q_l) chi_l(U')|^2`.
pub fn outcome_density(spec: &RefFrameSpec, phases: &[f64]) -> Result<f64, RefFrameError> {
    let d = spec.d();
    let total: f64 = phases.iter().sum();
    let wrap = total / (2.0 * PI);
    if phases.len() != d || (wrap - wrap.round()).abs() * 2.0 * PI > 1e-10 {
        return Err(RefFrameError::BadPhases { d });
    }
    if d == 2 {
        return Ok(outcome_density_su2(spec, phases[0]));
    }
    let mut amp = Complex64::new(0.0, 0.0);
    for (lam, &q) in spec.weights() {
        amp += character(lam, phases)? * q.sqrt();
    }
    Ok(amp.norm_sqr())
}

/// [`outcome_density`] for `d = 2` at rotation half-angle `theta`.
pub fn outcome_density_su2(spec: &RefFrameSpec, theta: f64) -> f64 {
    let amp: f64 = spec.weights().iter().map(|(l, &q)| q.sqrt() * su2_character(l.row(0) - l.row(1), theta)).sum();
    amp * amp
}

/// Upper bound `(sum sqrt(q_l) d_l)^2` on the density, reached at the identity.
pub fn outcome_envelope(spec: &RefFrameSpec) -> f64 {
    let s: f64 = spec.weights().iter().map(|(l, &q)| q.sqrt() * dimension_f64(l, spec.d())).sum();
    s * s
}

#[derive(Clone, Copy, Debug)]
pub struct RelativeSample {
    pub rotation: Matrix2<Complex64>,
    /// Haar proposals drawn, including the accepted one.
    pub trials: u64,
}

/// Draws `U'` from the outcome density at the identity by rejection against
/// Haar proposals.
pub fn sample_relative<R: Rng + ?Sized>(spec: &RefFrameSpec, rng: &mut R) -> Result<RelativeSample, RefFrameError> {
    if spec.d() != 2 {
        return Err(RefFrameError::Unsupported(format!("sampling needs d = 2, got {}", spec.d())));
    }
    let envelope = outcome_envelope(spec);
    let mut trials = 0;
    loop {
        trials += 1;
        let u = haar_su2(rng);
        let p = outcome_density_su2(spec, rotation_half_angle(&u));
        if p > envelope * (1.0 + 1e-9) {
            return Err(RefFrameError::EnvelopeExceeded { value: p, envelope });
        }
        if rng.gen::<f64>() * envelope < p {
            return Ok(RelativeSample { rotation: u, trials });
        }
    }
}

/// Outcome `U_hat = U U'^dag` of measuring the reference rotated by `u`.
pub fn sample_outcome<R: Rng + ?Sized>(
    spec: &RefFrameSpec,
    u: &Matrix2<Complex64>,
    rng: &mut R,
) -> Result<Matrix2<Complex64>, RefFrameError> {
    let s = sample_relative(spec, rng)?;
    Ok(u * s.rotation.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::haar_quadrature_su2;
    use crate::refframe::{strong_combined_spec, weak_spec};
    use crate::rep::YoungDiagram;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fundamental() -> RefFrameSpec {
        RefFrameSpec::point(2, YoungDiagram::new(&[1]).unwrap()).unwrap()
    }

    #[test]
    fn density_examples() {
        let s = fundamental();
        assert!((outcome_density(&s, &[0.0, 0.0]).unwrap() - 4.0).abs() < 1e-12);
        assert!(outcome_density(&s, &[PI / 2.0, -PI / 2.0]).unwrap().abs() < 1e-12);
        assert!(outcome_density(&s, &[0.3, 0.1]).is_err());
    }

    #[test]
    fn density_integrates_to_one_and_is_inverse_symmetric() {
        let (_, w) = weak_spec(2, 10, 5).unwrap();
        for spec in [fundamental(), w, strong_combined_spec(2, 4).unwrap()] {
            let quad = haar_quadrature_su2(spec.max_row_gap() as usize + 2).unwrap();
            let total = quad.integrate(|n| outcome_density_su2(&spec, n.half_angle()));
            assert!((total - 1.0).abs() < 1e-9, "{total}");
            for th in [0.2, 1.3, 2.9] {
                let a = outcome_density(&spec, &[th, -th]).unwrap();
                let b = outcome_density(&spec, &[-th, th]).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn qutrit_density_matches_trace_at_fundamental() {
        let s = RefFrameSpec::point(3, YoungDiagram::new(&[1]).unwrap()).unwrap();
        let ph = [0.4, 1.1, -1.5];
        let tr: Complex64 = ph.iter().map(|&p| Complex64::from_polar(1.0, p)).sum();
        assert!((outcome_density(&s, &ph).unwrap() - tr.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn acceptance_rate_is_inverse_envelope() {
        let s = fundamental();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 20_000;
        let trials: u64 = (0..n).map(|_| sample_relative(&s, &mut rng).unwrap().trials).sum();
        let rate = n as f64 / trials as f64;
        let p = 1.0 / outcome_envelope(&s);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((rate - p).abs() < 3.0 * sigma + 1e-3, "{rate} vs {p}");
    }

    #[test]
    fn sampled_traces_follow_density() {
        // bin cos(theta) of U'; expected mass from the density times the Haar
        // half-angle measure (2/pi) sin^2
        let s = fundamental();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 40_000;
        let bins = 8;
        let mut counts = vec![0f64; bins];
        for _ in 0..n {
            let u = sample_outcome(&s, &Matrix2::identity(), &mut rng).unwrap();
            let th = rotation_half_angle(&u);
            counts[((th / PI * bins as f64) as usize).min(bins - 1)] += 1.0;
        }
        let mut chi2 = 0.0;
        for (b, &cnt) in counts.iter().enumerate() {
            let (lo, hi) = (b as f64 * PI / bins as f64, (b + 1) as f64 * PI / bins as f64);
            let k = 2000;
            let mass: f64 = (0..k)
                .map(|i| {
                    let th = lo + (i as f64 + 0.5) * (hi - lo) / k as f64;
                    outcome_density_su2(&s, th) * 2.0 / PI * th.sin().powi(2) * (hi - lo) / k as f64
                })
                .sum();
            let e = mass * n as f64;
            chi2 += (cnt - e).powi(2) / e;
        }
        // 7 degrees of freedom: mean 7, sd ~3.7
        assert!(chi2 < 7.0 + 3.0 * 14f64.sqrt(), "chi2 = {chi2}");
    }

    // the weak lattice only uses spins of one parity, so U' and -U' are equally
    // likely; angles are measured to the nearer of +-I
    #[test]
    fn mean_angle_shrinks_with_lattice() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut prev = f64::INFINITY;
        for m in [10, 22, 40] {
            let (_, w) = weak_spec(2, m, 5).unwrap();
            let n = 200;
            let mean: f64 = (0..n)
                .map(|_| {
                    let th = rotation_half_angle(&sample_relative(&w, &mut rng).unwrap().rotation);
                    th.min(PI - th)
                })
                .sum::<f64>()
                / n as f64;
            assert!(mean < prev, "m={m}: {mean} vs {prev}");
            prev = mean;
        }
    }
}
