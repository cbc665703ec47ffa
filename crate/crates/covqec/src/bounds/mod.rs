//! Closed-form error bounds: the mixture bound over error patterns, the
//! asymptotic upper bounds for both erasure models, the Fisher-information
//! lower bounds, and resource counts for compression and approximate twirling.

mod fisher;
mod resources;

use std::f64::consts::PI;

use thiserror::Error;

pub use fisher::{fisher_upper_strong, fisher_upper_weak, kraus_zero_check, Hamiltonian, KrausZeroCheck};
pub use resources::{
    compression_dims, first_moment_choi, haar_first_moment_choi, local_circuit_sampler, tdesign_gate_count,
    CompressionDims, LocalGate, TDESIGN_CONSTANT,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("erasure probability {0} outside the admissible range")]
    ErasureProbability(f64),
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Rep(#[from] crate::rep::RepError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

/// One evaluated bound with its inputs echoed back.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub value: f64,
    pub kind: BoundKind,
    /// Only the leading term is evaluated; the dropped terms carry no constant.
    pub asymptotic_terms_dropped: bool,
    pub preconditions_met: bool,
    pub note: Option<String>,
    pub inputs: Vec<(&'static str, f64)>,
}

impl BoundReport {
    fn new(name: &'static str, value: f64, kind: BoundKind, inputs: Vec<(&'static str, f64)>) -> Self {
        Self { name, value, kind, asymptotic_terms_dropped: false, preconditions_met: true, note: None, inputs }
    }
}

/// `(p_j, eps_code_j, F_wc_j)` for one error pattern.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatternTerm {
    pub probability: f64,
    pub code_error: f64,
    pub reference_fidelity: f64,
}

impl PatternTerm {
    /// `max{eps_code, 1 - F}` when `F >= 3/4`, otherwise 1.
    pub fn error(&self) -> f64 {
        if self.reference_fidelity >= 0.75 {
            self.code_error.max(1.0 - self.reference_fidelity)
        } else {
            1.0
        }
    }
}

/// `9 d sum_j p_j eps_j`.
pub fn lemma1_assemble(d: usize, terms: &[PatternTerm]) -> Result<BoundReport, BoundsError> {
    let total: f64 = terms.iter().map(|t| t.probability).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(BoundsError::NotNormalized(total));
    }
    let value = 9.0 * d as f64 * terms.iter().map(|t| t.probability * t.error()).sum::<f64>();
    Ok(BoundReport::new(
        "lemma1",
        value,
        BoundKind::Upper,
        vec![("d", d as f64), ("patterns", terms.len() as f64)],
    ))
}

/// Leading term of the weak-model upper bound,
/// `81 pi^2 d^4 (d-1)^2 (n_e+1)^2 (n_P+d-1)^2 / (2 n_R^2)`.
pub fn theorem1_bound(d: usize, n_e: u32, n_p: u32, n_r: u64) -> Result<BoundReport, BoundsError> {
    if n_r == 0 {
        return Err(BoundsError::Invalid("n_R must be positive".into()));
    }
    let df = d as f64;
    let ne = n_e as f64 + 1.0;
    let np = n_p as f64 + df - 1.0;
    let value = 81.0 * PI * PI * df.powi(4) * (df - 1.0).powi(2) * ne * ne * np * np / (2.0 * (n_r as f64).powi(2));
    let mut r = BoundReport::new(
        "theorem1",
        value,
        BoundKind::Upper,
        vec![("d", df), ("n_e", n_e as f64), ("n_P", n_p as f64), ("n_R", n_r as f64)],
    );
    r.asymptotic_terms_dropped = true;
    r.preconditions_met = n_r % 2 == 0;
    Ok(r)
}

/// Coefficient `9 (d^2-d+32) d^{(d^2-d+2)/2} / ((2 - 4 p_e) prod_{j<=d} (j-1)!)`.
pub fn theorem2_coefficient(d: usize, p_e: f64) -> Result<f64, BoundsError> {
    if !(p_e > 0.0 && p_e < 0.5) {
        return Err(BoundsError::ErasureProbability(p_e));
    }
    let df = d as f64;
    let superfactorial: f64 = (1..=d).map(|j| (1..j).map(|k| k as f64).product::<f64>()).product();
    let num = 9.0 * (df * df - df + 32.0) * df.powf((df * df - df + 2.0) / 2.0);
    Ok(num / ((2.0 - 4.0 * p_e) * superfactorial))
}

/// Strong-model upper bound `coefficient * (1/n)^{1-alpha}`; valid only for
/// `n >= n_alpha`, a threshold without a known value.
pub fn theorem2_bound(d: usize, p_e: f64, n: u64, alpha: f64) -> Result<BoundReport, BoundsError> {
    if alpha <= 0.0 || n == 0 {
        return Err(BoundsError::Invalid(format!("alpha = {alpha}, n = {n}")));
    }
    let value = theorem2_coefficient(d, p_e)? * (1.0 / n as f64).powf(1.0 - alpha);
    let mut r = BoundReport::new(
        "theorem2",
        value,
        BoundKind::Upper,
        vec![("d", d as f64), ("p_e", p_e), ("n", n as f64), ("alpha", alpha)],
    );
    r.asymptotic_terms_dropped = true;
    r.preconditions_met = false;
    r.note = Some("n >= n_alpha not certified".into());
    Ok(r)
}

// Shared with the Fisher chain so the composition is bitwise identical.
fn weak_scale(n: u64, n_e: u32) -> f64 {
    let nf = n as f64;
    nf * nf * (1.0 + 1.0 / n_e as f64)
}

fn strong_ratio(p_e: f64) -> f64 {
    (1.0 - p_e) / p_e
}

/// Weak-model lower bound `1 / (16 n^2 (1 + 1/n_e))`.
pub fn prop1_lower(n: u64, n_e: u32) -> Result<BoundReport, BoundsError> {
    if n == 0 || n_e == 0 {
        return Err(BoundsError::Invalid(format!("n = {n}, n_e = {n_e}")));
    }
    Ok(BoundReport::new(
        "prop1",
        1.0 / (16.0 * weak_scale(n, n_e)),
        BoundKind::Lower,
        vec![("n", n as f64), ("n_e", n_e as f64)],
    ))
}

/// Strong-model lower bound `p_e / (64 n (1 - p_e))`.
pub fn prop2_lower(n: u64, p_e: f64) -> Result<BoundReport, BoundsError> {
    if !(p_e > 0.0 && p_e < 1.0) {
        return Err(BoundsError::ErasureProbability(p_e));
    }
    if n == 0 {
        return Err(BoundsError::Invalid("n must be positive".into()));
    }
    Ok(BoundReport::new(
        "prop2",
        1.0 / (64.0 * (n as f64 * strong_ratio(p_e))),
        BoundKind::Lower,
        vec![("n", n as f64), ("p_e", p_e)],
    ))
}

/// `Delta H^2 / (16 I)` for a Fisher-information upper bound `I`; an infinite
/// `I` gives the trivial bound 0.
pub fn lemma4_lower(delta_h: f64, fisher_upper: f64) -> Result<BoundReport, BoundsError> {
    if !(fisher_upper > 0.0) || delta_h < 0.0 {
        return Err(BoundsError::Invalid(format!("Delta H = {delta_h}, I = {fisher_upper}")));
    }
    let value = if fisher_upper.is_infinite() { 0.0 } else { delta_h * delta_h / (16.0 * fisher_upper) };
    Ok(BoundReport::new(
        "lemma4",
        value,
        BoundKind::Lower,
        vec![("delta_h", delta_h), ("fisher_upper", fisher_upper)],
    ))
}
