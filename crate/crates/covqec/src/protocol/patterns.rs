//! Error patterns grouped by what the decoder can tell apart: the erased
//! physical qudits and the reference state left after discarding damaged copies.

use std::collections::BTreeSet;

use crate::codes::subsets;
use crate::refframe::RefFrameSpec;

use super::{ErasureModel, ProtocolConfig, ProtocolError, WeakDistribution};

#[derive(Clone, Debug)]
pub struct PatternClass {
    pub physical: BTreeSet<usize>,
    /// Intact reference copies; tracked only when it changes the reference.
    pub surviving_copies: Option<usize>,
    /// Reference seen by the measurement; `None` when every copy is lost.
    pub reference: Option<RefFrameSpec>,
    pub probability: f64,
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All pattern classes with positive probability, physical subsets in
/// lexicographic order by size.
pub fn pattern_classes(cfg: &ProtocolConfig) -> Result<Vec<PatternClass>, ProtocolError> {
    cfg.validate()?;
    let (n_p, n_r, n) = (cfg.n_p(), cfg.n_r(), cfg.n());
    let mut out = Vec::new();
    match cfg.model {
        ErasureModel::Weak { n_e, distribution } => {
            // at most n_e erasures leave at least one of the n_e + 1 copies intact
            let spec = cfg.ensemble.spec.clone();
            let n_e = n_e as usize;
            for t in 0..=n_e.min(n_p) {
                let p = match distribution {
                    WeakDistribution::UniformUpTo => {
                        let total: f64 = (0..=n_e).map(|k| binomial(n, k)).sum();
                        (0..=n_e - t).map(|k| binomial(n_r, k)).sum::<f64>() / total
                    }
                    WeakDistribution::ExactlyNe { p_none } => {
                        let hit = (1.0 - p_none) * binomial(n_r, n_e - t) / binomial(n, n_e);
                        if t == 0 {
                            p_none + hit
                        } else {
                            hit
                        }
                    }
                };
                if p == 0.0 {
                    continue;
                }
                for s in subsets(n_p, t) {
                    out.push(PatternClass {
                        physical: s,
                        surviving_copies: None,
                        reference: Some(spec.clone()),
                        probability: p,
                    });
                }
            }
        }
        ErasureModel::Strong { p_e } => {
            let copies = cfg.ensemble.copies;
            let keep = (1.0 - p_e).powi(2);
            let specs: Vec<Option<RefFrameSpec>> = (0..=copies)
                .map(|k| {
                    let lost: BTreeSet<usize> = (0..copies - k).collect();
                    cfg.ensemble.survivor_spec(&lost).ok()
                })
                .collect();
            for t in 0..=n_p {
                let pp = p_e.powi(t as i32) * (1.0 - p_e).powi((n_p - t) as i32);
                for s in subsets(n_p, t) {
                    for (k, spec) in specs.iter().enumerate() {
                        let pr = binomial(copies, k) * keep.powi(k as i32) * (1.0 - keep).powi((copies - k) as i32);
                        if pr * pp == 0.0 {
                            continue;
                        }
                        out.push(PatternClass {
                            physical: s.clone(),
                            surviving_copies: Some(k),
                            reference: spec.clone(),
                            probability: pp * pr,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{five_qubit_code, trivial_code};

    #[test]
    fn probabilities_sum_to_one() {
        let five = five_qubit_code().unwrap();
        for dist in [WeakDistribution::UniformUpTo, WeakDistribution::ExactlyNe { p_none: 0.3 }] {
            for n_e in [1, 2] {
                let c = ProtocolConfig::weak(five.clone(), 12, n_e, dist).unwrap();
                let total: f64 = pattern_classes(&c).unwrap().iter().map(|p| p.probability).sum();
                assert!((total - 1.0).abs() < 1e-12, "{dist:?} n_e={n_e}: {total}");
            }
        }
        let s = ProtocolConfig::strong(trivial_code(2), 6, 0.2).unwrap();
        let cl = pattern_classes(&s).unwrap();
        assert_eq!(cl.len(), 2 * 7);
        assert!((cl.iter().map(|p| p.probability).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(cl.iter().any(|p| p.reference.is_none()));
    }

    #[test]
    fn strong_grouping_matches_brute_force() {
        // every one of the 2^13 qudit patterns, copies lost when either qudit is
        let s = ProtocolConfig::strong(trivial_code(2), 6, 0.2).unwrap();
        let cl = pattern_classes(&s).unwrap();
        let mut brute = vec![[0.0f64; 7]; 2];
        for mask in 0u32..(1 << 13) {
            let t = mask.count_ones() as i32;
            let p = 0.2f64.powi(t) * 0.8f64.powi(13 - t);
            let phys = (mask & 1) as usize;
            let intact = (0..6).filter(|c| (mask >> (1 + 2 * c)) & 3 == 0).count();
            brute[phys][intact] += p;
        }
        for c in &cl {
            let phys = c.physical.len();
            let k = c.surviving_copies.unwrap();
            assert!((c.probability - brute[phys][k]).abs() <= 1e-12 * brute[phys][k]);
        }
    }

    #[test]
    fn no_error_distribution() {
        let c = ProtocolConfig::weak(trivial_code(2), 8, 1, WeakDistribution::ExactlyNe { p_none: 1.0 }).unwrap();
        let cl = pattern_classes(&c).unwrap();
        assert_eq!(cl.len(), 1);
        assert!(cl[0].physical.is_empty() && cl[0].probability == 1.0);
    }
}
