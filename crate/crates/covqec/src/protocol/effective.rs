use std::collections::{BTreeMap, BTreeSet};

use crate::bounds::{lemma1_assemble, BoundReport, PatternTerm};
use crate::channels::{covariant_choi, twirl_to_covariant, ChoiMatrix, CovariantChannel, KrausChannel};
use crate::codes::code_error;
use crate::linalg::CMat;
use crate::refframe::{reference_fidelity, RefFrameSpec};
use crate::sdp::diamond_error;

use super::inner::{character_table, expand, spin_weights, CharacterTable, InnerParts};
use super::patterns::{pattern_classes, PatternClass};
use super::{ProtocolConfig, ProtocolError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpsCovMethod {
    DiamondSdp,
    /// Qubit covariant channels sit at diamond distance `a` from the identity.
    CovariantClosedForm,
}

impl EpsCovMethod {
    pub fn label(self) -> &'static str {
        match self {
            Self::DiamondSdp => "diamond-sdp",
            Self::CovariantClosedForm => "covariant-closed-form",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PatternReport {
    pub class: PatternClass,
    /// Decoded channel averaged over the relative rotation, before the twirl.
    pub inner: ChoiMatrix,
    pub twirled: CovariantChannel,
    pub code_error: f64,
    /// `F_wc` of the surviving reference; 0 when it is lost.
    pub reference_fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub quadrature_orders: Vec<usize>,
    pub truncation_residual: f64,
    /// `max |p_0 - 1|` over the reference specs met.
    pub spin_weight_drift: f64,
    pub pattern_classes: usize,
}

#[derive(Clone, Debug)]
pub struct EffectiveChannelReport {
    pub patterns: Vec<PatternReport>,
    pub mixture: CovariantChannel,
    pub eps_cov: f64,
    pub eps_cov_method: EpsCovMethod,
    /// Pattern-wise upper bound `9 d sum p_j eps_j`.
    pub lemma1: BoundReport,
    pub diagnostics: Diagnostics,
}

impl EffectiveChannelReport {
    /// `sum_j p_j a_j`, which must equal the mixture parameter.
    pub fn weighted_parameter(&self) -> f64 {
        self.patterns.iter().map(|p| p.class.probability * p.twirled.a).sum()
    }
}

pub fn effective_channel(cfg: &ProtocolConfig) -> Result<EffectiveChannelReport, ProtocolError> {
    effective_channel_with(cfg, EpsCovMethod::DiamondSdp)
}

fn spec_key(spec: Option<&RefFrameSpec>) -> String {
    spec.map_or_else(|| "lost".into(), |s| format!("{:?}", s.weights()))
}

pub fn effective_channel_with(cfg: &ProtocolConfig, method: EpsCovMethod) -> Result<EffectiveChannelReport, ProtocolError> {
    let classes = pattern_classes(cfg)?;
    let d = cfg.code.d;
    let mut tables: BTreeMap<BTreeSet<usize>, (CharacterTable, usize, f64)> = BTreeMap::new();
    let mut fidelities: BTreeMap<String, f64> = BTreeMap::new();
    let mut drift: f64 = 0.0;
    let mut patterns = Vec::with_capacity(classes.len());
    for class in classes {
        if !tables.contains_key(&class.physical) {
            let parts = InnerParts::new(&cfg.code, &class.physical)?;
            let table = character_table(&parts, cfg.quad_order)?;
            let err = code_error(&cfg.code, &class.physical)?;
            tables.insert(class.physical.clone(), (table, parts.spin_bound(), err));
        }
        let (table, top, err) = &tables[&class.physical];
        let w = spin_weights(class.reference.as_ref(), *top)?;
        drift = drift.max((w[0] - 1.0).abs());
        let inner = ChoiMatrix::from_raw(expand(table, &w), d, d);
        let twirled = twirl_to_covariant(&inner)?;
        let key = spec_key(class.reference.as_ref());
        let fid = match fidelities.get(&key) {
            Some(&f) => f,
            None => {
                let f = match &class.reference {
                    Some(spec) => reference_fidelity(spec, cfg.n_p() as u32)?.value,
                    None => 0.0,
                };
                fidelities.insert(key, f);
                f
            }
        };
        patterns.push(PatternReport { class, inner, twirled, code_error: *err, reference_fidelity: fid });
    }

    let parts: Vec<(f64, &ChoiMatrix)> = patterns.iter().map(|p| (p.class.probability, &p.inner)).collect();
    let mixed = ChoiMatrix::mixture(&parts)?;
    let mixture = twirl_to_covariant(&mixed)?;
    let eps_cov = match method {
        EpsCovMethod::CovariantClosedForm => mixture.a,
        EpsCovMethod::DiamondSdp => {
            let id = KrausChannel::identity(d).choi();
            diamond_error(&covariant_choi(d, mixture.a), &id)?.value.clamp(0.0, 1.0)
        }
    };
    let terms: Vec<PatternTerm> = patterns
        .iter()
        .map(|p| PatternTerm {
            probability: p.class.probability,
            code_error: p.code_error,
            reference_fidelity: p.reference_fidelity,
        })
        .collect();
    let total: f64 = terms.iter().map(|t| t.probability).sum();
    let normalized: Vec<PatternTerm> =
        terms.iter().map(|t| PatternTerm { probability: t.probability / total, ..*t }).collect();
    let lemma1 = lemma1_assemble(d, &normalized)?;
    let diagnostics = Diagnostics {
        quadrature_orders: tables.values().map(|(t, _, _)| t.order).collect(),
        truncation_residual: tables.values().map(|(t, _, _)| t.truncation_residual).fold(0.0, f64::max),
        spin_weight_drift: drift,
        pattern_classes: patterns.len(),
    };
    Ok(EffectiveChannelReport { patterns, mixture, eps_cov, eps_cov_method: method, lemma1, diagnostics })
}

/// `max_V eps_wc(T o V, V)` probed at the given rotations for the final
/// channel `T`; covariance makes every value equal.
pub fn rotated_errors(report: &EffectiveChannelReport, rotations: &[CMat]) -> Result<Vec<f64>, ProtocolError> {
    let t = KrausChannel::new(kraus_of_covariant(report.mixture))?;
    rotations
        .iter()
        .map(|v| {
            let vch = KrausChannel::unitary(v.clone());
            let tv = vch.then(&t)?;
            Ok(diamond_error(&tv.choi(), &vch.choi())?.value.clamp(0.0, 1.0))
        })
        .collect()
}

/// Pauli Kraus operators of the qubit covariant channel `(1-a) id + a/3 (X, Y, Z)`.
fn kraus_of_covariant(ch: CovariantChannel) -> Vec<CMat> {
    use crate::linalg::c;
    let (z, o, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let s0 = (1.0 - ch.a).sqrt();
    let s = (ch.a / 3.0).sqrt();
    vec![
        CMat::from_row_slice(2, 2, &[o, z, z, o]).scale(s0),
        CMat::from_row_slice(2, 2, &[z, o, o, z]).scale(s),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]).scale(s),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]).scale(s),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{prop1_lower, prop2_lower, theorem1_bound};
    use crate::channels::haar_special_unitary;
    use crate::codes::{five_qubit_code, trivial_code};
    use crate::linalg::max_abs;
    use crate::protocol::WeakDistribution;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn covariant_kraus_matches_choi() {
        let ch = CovariantChannel::new(2, 0.3).unwrap();
        let k = KrausChannel::new(kraus_of_covariant(ch)).unwrap();
        assert!(max_abs(&(k.choi().matrix() - ch.choi().matrix())) < 1e-14);
    }

    #[test]
    fn weak_sandwich_and_additivity() {
        for m in [8, 12] {
            let cfg = ProtocolConfig::weak(five_qubit_code().unwrap(), m, 1, WeakDistribution::UniformUpTo).unwrap();
            let r = effective_channel(&cfg).unwrap();
            assert!((r.weighted_parameter() - r.mixture.a).abs() < 1e-10);
            assert!((r.eps_cov - r.mixture.a).abs() < 1e-6, "{} vs {}", r.eps_cov, r.mixture.a);
            let n = cfg.n() as u64;
            assert!(prop1_lower(n, 1).unwrap().value <= r.eps_cov);
            let t1 = theorem1_bound(2, 1, 5, cfg.n_r() as u64).unwrap().value;
            assert!(t1 >= 1.0 || r.eps_cov <= t1);
            assert!(r.diagnostics.truncation_residual < 1e-10);
        }
    }

    #[test]
    fn reference_error_shrinks_with_m() {
        let mut last = f64::INFINITY;
        for m in [4, 8, 16, 31] {
            let cfg = ProtocolConfig::weak(
                five_qubit_code().unwrap(),
                m,
                1,
                WeakDistribution::ExactlyNe { p_none: 1.0 },
            )
            .unwrap();
            let r = effective_channel_with(&cfg, EpsCovMethod::CovariantClosedForm).unwrap();
            assert!(r.eps_cov < last, "m={m}: {} !< {last}", r.eps_cov);
            last = r.eps_cov;
        }
    }

    #[test]
    fn strong_prop2_check() {
        for p in [0.1, 0.2] {
            let cfg = ProtocolConfig::strong(trivial_code(2), 6, p).unwrap();
            let r = effective_channel(&cfg).unwrap();
            assert!(prop2_lower(cfg.n() as u64, p).unwrap().value <= r.eps_cov);
            // only the erased data qubit hurts the trivial code
            assert!((r.mixture.a - 0.75 * p).abs() < 1e-10);
        }
    }

    #[test]
    fn covariance_under_random_rotations() {
        let cfg = ProtocolConfig::weak(five_qubit_code().unwrap(), 8, 1, WeakDistribution::UniformUpTo).unwrap();
        let r = effective_channel(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rots: Vec<CMat> = (0..20).map(|_| haar_special_unitary(2, &mut rng)).collect();
        for e in rotated_errors(&r, &rots).unwrap() {
            assert!((e - r.eps_cov).abs() < 1e-6, "{e} vs {}", r.eps_cov);
        }
    }
}
