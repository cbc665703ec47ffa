//! Operational simulation: random frame, random erasures, a sampled
//! measurement outcome, and the decoder driven by that outcome.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{haar_su2, phi_plus_defect, ChoiMatrix};
use crate::linalg::CMat;
use crate::refframe::{sample_outcome, RefFrameError, RefFrameSpec};

use super::inner::InnerParts;
use super::patterns::binomial;
use super::{ErasureModel, ProtocolConfig, ProtocolError, WeakDistribution};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    /// Mean entanglement infidelity of the per-sample logical channel.
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Neumaier-compensated running sums of `x` and `x^2`.
#[derive(Default)]
struct Moments {
    n: usize,
    sum: f64,
    comp: f64,
    sq: f64,
    sq_comp: f64,
}

fn add_compensated(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        add_compensated(&mut self.sum, &mut self.comp, x);
        add_compensated(&mut self.sq, &mut self.sq_comp, x * x);
    }

    fn finish(&self) -> McEstimate {
        let n = self.n.max(1) as f64;
        let mean = (self.sum + self.comp) / n;
        let var = ((self.sq + self.sq_comp) / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        McEstimate { estimate: mean, stderr: (var / n).sqrt(), samples: self.n }
    }
}

fn dense(u: &Matrix2<Complex64>) -> CMat {
    CMat::from_fn(2, 2, |i, j| u[(i, j)])
}

/// One run: frame `u`, outcome `u_hat`, decoder `u_hat D(u_hat^dag ...) u_hat^dag`.
fn sample_defect<R: Rng + ?Sized>(
    parts: &InnerParts,
    reference: Option<&RefFrameSpec>,
    rng: &mut R,
) -> Result<f64, ProtocolError> {
    let u = haar_su2(rng);
    let u_hat = match reference {
        Some(spec) => sample_outcome(spec, &u, rng)?,
        // nothing left to measure: the outcome is a uniform guess
        None => haar_su2(rng),
    };
    let (ud, uh) = (dense(&u), dense(&u_hat));
    let j = parts.conjugated_choi(&uh, &(uh.adjoint() * &ud), &ud.adjoint());
    Ok(phi_plus_defect(&ChoiMatrix::from_raw(j, 2, 2)))
}

fn draw_erasures<R: Rng + ?Sized>(cfg: &ProtocolConfig, weak_sizes: &[f64], rng: &mut R) -> BTreeSet<usize> {
    let n = cfg.n();
    match cfg.model {
        ErasureModel::Weak { .. } => {
            let r: f64 = rng.gen();
            let mut acc = 0.0;
            let mut t = weak_sizes.len() - 1;
            for (k, &p) in weak_sizes.iter().enumerate() {
                acc += p;
                if r < acc {
                    t = k;
                    break;
                }
            }
            sample(rng, n, t).into_iter().collect()
        }
        ErasureModel::Strong { p_e } => (0..n).filter(|_| rng.gen::<f64>() < p_e).collect(),
    }
}

/// Probabilities of erasing exactly `t` qudits under the weak model.
fn weak_size_distribution(cfg: &ProtocolConfig) -> Vec<f64> {
    let n = cfg.n();
    match cfg.model {
        ErasureModel::Weak { n_e, distribution: WeakDistribution::UniformUpTo } => {
            let total: f64 = (0..=n_e as usize).map(|k| binomial(n, k)).sum();
            (0..=n_e as usize).map(|k| binomial(n, k) / total).collect()
        }
        ErasureModel::Weak { n_e, distribution: WeakDistribution::ExactlyNe { p_none } } => {
            let mut v = vec![0.0; n_e as usize + 1];
            v[0] = p_none;
            v[n_e as usize] += 1.0 - p_none;
            v
        }
        ErasureModel::Strong { .. } => vec![1.0],
    }
}

/// Averages the entanglement infidelity of the per-run logical channel over
/// `cfg.mc_samples` runs seeded by `cfg.seed`.
pub fn monte_carlo_epsilon(cfg: &ProtocolConfig) -> Result<McEstimate, ProtocolError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sizes = weak_size_distribution(cfg);
    let n_p = cfg.n_p();
    let per_copy = 2 * cfg.ensemble.spec.pairs() as usize;
    let mut parts: BTreeMap<BTreeSet<usize>, InnerParts> = BTreeMap::new();
    let mut specs: BTreeMap<BTreeSet<usize>, Option<RefFrameSpec>> = BTreeMap::new();
    let mut m = Moments::default();
    for _ in 0..cfg.mc_samples {
        let erased = draw_erasures(cfg, &sizes, &mut rng);
        let physical: BTreeSet<usize> = erased.iter().copied().filter(|&q| q < n_p).collect();
        let lost: BTreeSet<usize> = erased.iter().filter(|&&q| q >= n_p).map(|&q| (q - n_p) / per_copy).collect();
        if !parts.contains_key(&physical) {
            parts.insert(physical.clone(), InnerParts::new(&cfg.code, &physical)?);
        }
        if !specs.contains_key(&lost) {
            let spec = match cfg.ensemble.survivor_spec(&lost) {
                Ok(s) => Some(s),
                Err(RefFrameError::AllCopiesErased { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            specs.insert(lost.clone(), spec);
        }
        m.push(sample_defect(&parts[&physical], specs[&lost].as_ref(), &mut rng)?);
    }
    Ok(m.finish())
}

/// Monte Carlo for one fixed pattern: erased physical qudits and the reference
/// left over (`None` when all of it is lost).
pub fn monte_carlo_forced(
    cfg: &ProtocolConfig,
    physical: &BTreeSet<usize>,
    reference: Option<&RefFrameSpec>,
) -> Result<McEstimate, ProtocolError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let parts = InnerParts::new(&cfg.code, physical)?;
    let mut m = Moments::default();
    for _ in 0..cfg.mc_samples {
        m.push(sample_defect(&parts, reference, &mut rng)?);
    }
    Ok(m.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{five_qubit_code, trivial_code};
    use crate::protocol::{effective_channel_with, inner_channel_expanded, EpsCovMethod};
    use crate::rep::YoungDiagram;

    fn agree(mc: McEstimate, exact: f64) {
        let tol = 3.0 * mc.stderr + 1e-12;
        assert!((mc.estimate - exact).abs() <= tol, "mc {} +- {} vs {exact}", mc.estimate, mc.stderr);
    }

    #[test]
    fn single_pair_no_erasure() {
        let mut cfg = ProtocolConfig::weak(five_qubit_code().unwrap(), 4, 1, WeakDistribution::ExactlyNe { p_none: 1.0 }).unwrap();
        cfg.mc_samples = 20_000;
        let pair = RefFrameSpec::point(2, YoungDiagram::new(&[1]).unwrap()).unwrap();
        let none = BTreeSet::new();
        let mc = monte_carlo_forced(&cfg, &none, Some(&pair)).unwrap();
        let exact = phi_plus_defect(&inner_channel_expanded(&cfg.code, Some(&pair), &none).unwrap());
        agree(mc, exact);
        assert!(exact > 0.05);
    }

    #[test]
    fn lost_reference_is_a_uniform_guess() {
        let mut cfg = ProtocolConfig::strong(five_qubit_code().unwrap(), 2, 0.1).unwrap();
        cfg.mc_samples = 20_000;
        let phys = BTreeSet::from([1]);
        let mc = monte_carlo_forced(&cfg, &phys, None).unwrap();
        let exact = phi_plus_defect(&inner_channel_expanded(&cfg.code, None, &phys).unwrap());
        agree(mc, exact);
    }

    #[test]
    fn full_protocol_matches_enumeration() {
        let mut weak = ProtocolConfig::weak(five_qubit_code().unwrap(), 8, 1, WeakDistribution::UniformUpTo).unwrap();
        weak.mc_samples = 20_000;
        weak.seed = 1;
        let mut strong = ProtocolConfig::strong(five_qubit_code().unwrap(), 3, 0.2).unwrap();
        strong.mc_samples = 20_000;
        strong.seed = 2;
        for cfg in [weak, strong] {
            let exact = effective_channel_with(&cfg, EpsCovMethod::CovariantClosedForm).unwrap().mixture.a;
            agree(monte_carlo_epsilon(&cfg).unwrap(), exact);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let mut cfg = ProtocolConfig::strong(trivial_code(2), 4, 0.3).unwrap();
        cfg.mc_samples = 500;
        cfg.seed = 77;
        assert_eq!(monte_carlo_epsilon(&cfg).unwrap(), monte_carlo_epsilon(&cfg).unwrap());
    }
}
