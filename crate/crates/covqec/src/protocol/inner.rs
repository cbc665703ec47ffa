//! The decoded logical channel for one physical erasure pattern, averaged over
//! the relative rotation left by the reference-frame measurement.

use std::collections::BTreeSet;

use nalgebra::DVector;

use crate::channels::{haar_quadrature_su2, ChoiMatrix, HaarQuadrature};
use crate::codes::{erased_encoding, erasure_recovery, CodeSpec};
use crate::linalg::{identity, max_abs, tensor_power, CMat};
use crate::refframe::{outcome_density_su2, RefFrameSpec};
use crate::rep::su2_character;

use super::ProtocolError;

/// Allowed drift of the quadrature's integral of the outcome density.
pub const NORMALIZATION_TOL: f64 = 1e-4;

/// Kraus pieces of `D o C_P o E` for one physical erasure pattern.
#[derive(Clone, Debug)]
pub struct InnerParts {
    d: usize,
    survivors: usize,
    encoding: Vec<CMat>,
    recovery: Vec<CMat>,
}

impl InnerParts {
    pub fn new(code: &CodeSpec, physical: &BTreeSet<usize>) -> Result<Self, ProtocolError> {
        if code.d != 2 {
            return Err(ProtocolError::Unsupported(format!("protocol runs at d = 2, code has d = {}", code.d)));
        }
        let enc = erased_encoding(code, physical)?;
        let rec = erasure_recovery(code, physical)?;
        Ok(Self {
            d: code.d,
            survivors: code.n_p - physical.len(),
            encoding: enc.ops().to_vec(),
            recovery: rec.0.ops().to_vec(),
        })
    }

    pub fn survivors(&self) -> usize {
        self.survivors
    }

    /// Largest spin (in units of 1/2) carried by `U -> J(U^dag D U^{(x)k} C E)`.
    pub fn spin_bound(&self) -> usize {
        2 * self.survivors + 2
    }

    /// Choi state of `rho -> post D(rel^{(x)k} C E(pre rho pre^dag) ...) post^dag`.
    pub fn conjugated_choi(&self, post: &CMat, rel: &CMat, pre: &CMat) -> CMat {
        let d = self.d;
        let rot = tensor_power(rel, self.survivors);
        let mut out = CMat::zeros(d * d, d * d);
        for k in &self.encoding {
            let inner = &rot * k * pre;
            for r in &self.recovery {
                let a = post * r * &inner;
                let v = DVector::from_fn(d * d, |idx, _| a[(idx / d, idx % d)]);
                out += &v * v.adjoint();
            }
        }
        out.unscale(d as f64)
    }

    /// Choi state of `U^dag o D o U^{(x)k} o C o E`.
    pub fn rotated_choi(&self, u: &CMat) -> CMat {
        self.conjugated_choi(&u.adjoint(), u, &identity(self.d))
    }
}

/// `C_L = int chi_L(U) J(U) dU` for `L = 0..=spin_bound`, where `J(U)` is the
/// rotated channel. Any class-function average `int p J` is then
/// `sum_L p_L C_L` with `p_L = int p chi_L`.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub coefficients: Vec<CMat>,
    pub order: usize,
    /// Largest entry of the first two coefficients past the spin bound, which
    /// vanish exactly when the quadrature resolves the integrand.
    pub truncation_residual: f64,
}

pub fn character_table(parts: &InnerParts, order: Option<usize>) -> Result<CharacterTable, ProtocolError> {
    let top = parts.spin_bound();
    let order = order.unwrap_or(top + 2);
    let quad = haar_quadrature_su2(order)?;
    let d2 = parts.d * parts.d;
    let mut coeffs = vec![CMat::zeros(d2, d2); top + 3];
    for node in quad.nodes() {
        let j = parts.rotated_choi(&node.unitary());
        let theta = node.half_angle();
        for (l, c) in coeffs.iter_mut().enumerate() {
            *c += j.scale(node.weight * su2_character(l as u32, theta));
        }
    }
    let truncation_residual = max_abs(&coeffs[top + 1]).max(max_abs(&coeffs[top + 2]));
    if truncation_residual > 1e-8 {
        return Err(ProtocolError::Resolution(format!(
            "character coefficients past spin {top} reach {truncation_residual:e} at quadrature order {order}"
        )));
    }
    coeffs.truncate(top + 1);
    Ok(CharacterTable { coefficients: coeffs, order, truncation_residual })
}

/// `p_L = int p(U) chi_L(U) dU` for the outcome density of `spec`, `L <= max_spin`.
/// `None` stands for a fully erased reference: the density is flat.
pub fn spin_weights(spec: Option<&RefFrameSpec>, max_spin: usize) -> Result<Vec<f64>, ProtocolError> {
    let mut out = vec![0.0; max_spin + 1];
    let Some(spec) = spec else {
        out[0] = 1.0;
        return Ok(out);
    };
    if spec.d() != 2 {
        return Err(ProtocolError::Unsupported(format!("reference with d = {}", spec.d())));
    }
    let amps: Vec<(usize, f64)> =
        spec.weights().iter().map(|(l, &q)| ((l.row(0) - l.row(1)) as usize, q.sqrt())).collect();
    // chi_l chi_l' = sum over |l - l'| <= L <= l + l', same parity
    for &(l, a) in &amps {
        for &(lp, b) in &amps {
            let lo = l.abs_diff(lp);
            let mut big = lo;
            while big <= (l + lp).min(max_spin) {
                out[big] += a * b;
                big += 2;
            }
        }
    }
    Ok(out)
}

/// `sum_L p_L C_L`.
pub fn expand(table: &CharacterTable, weights: &[f64]) -> CMat {
    let mut out = CMat::zeros(table.coefficients[0].nrows(), table.coefficients[0].ncols());
    for (c, &w) in table.coefficients.iter().zip(weights) {
        out += c.scale(w);
    }
    out
}

fn as_choi(m: CMat, d: usize) -> ChoiMatrix {
    ChoiMatrix::from_raw(m, d, d)
}

/// `int p(U' | I) J(U'^dag D U'_P C_P E) dU'` by direct quadrature. Fails when
/// the quadrature integrates the density to within more than
/// [`NORMALIZATION_TOL`] of one.
pub fn inner_channel(
    code: &CodeSpec,
    spec: &RefFrameSpec,
    physical: &BTreeSet<usize>,
    quad: &HaarQuadrature,
) -> Result<ChoiMatrix, ProtocolError> {
    let parts = InnerParts::new(code, physical)?;
    let mut acc = CMat::zeros(4, 4);
    let mut mass = 0.0;
    for node in quad.nodes() {
        let p = outcome_density_su2(spec, node.half_angle());
        if p == 0.0 {
            continue;
        }
        mass += node.weight * p;
        acc += parts.rotated_choi(&node.unitary()).scale(node.weight * p);
    }
    if (mass - 1.0).abs() > NORMALIZATION_TOL {
        return Err(ProtocolError::Resolution(format!(
            "outcome density integrates to {mass} at quadrature order {}",
            quad.order()
        )));
    }
    Ok(as_choi(acc.unscale(mass), code.d))
}

/// Same channel through the character expansion: exact for any spec size.
/// `None` gives the flat average left after losing the whole reference.
pub fn inner_channel_expanded(
    code: &CodeSpec,
    spec: Option<&RefFrameSpec>,
    physical: &BTreeSet<usize>,
) -> Result<ChoiMatrix, ProtocolError> {
    let parts = InnerParts::new(code, physical)?;
    let table = character_table(&parts, None)?;
    let w = spin_weights(spec, parts.spin_bound())?;
    Ok(as_choi(expand(&table, &w), code.d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{phi_plus_defect, KrausChannel};
    use crate::codes::{five_qubit_code, trivial_code};
    use crate::refframe::{strong_combined_spec, weak_spec};
    use crate::rep::YoungDiagram;

    fn single_pair() -> RefFrameSpec {
        RefFrameSpec::point(2, YoungDiagram::new(&[1]).unwrap()).unwrap()
    }

    #[test]
    fn quadrature_and_expansion_agree() {
        let code = trivial_code(2);
        let none = BTreeSet::new();
        let quad = haar_quadrature_su2(8).unwrap();
        let a = inner_channel(&code, &single_pair(), &none, &quad).unwrap();
        let b = inner_channel_expanded(&code, Some(&single_pair()), &none).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-10);
        assert!((phi_plus_defect(&a) - phi_plus_defect(&b)).abs() < 1e-6);

        let five = five_qubit_code().unwrap();
        let spec = strong_combined_spec(2, 3).unwrap();
        let one_lost = BTreeSet::from([2]);
        let q = haar_quadrature_su2(14).unwrap();
        let a = inner_channel(&five, &spec, &one_lost, &q).unwrap();
        let b = inner_channel_expanded(&five, Some(&spec), &one_lost).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-10);
    }

    #[test]
    fn trivial_code_ignores_the_reference() {
        // U'^dag (U' rho U'^dag) U' = rho for every outcome
        let code = trivial_code(2);
        for spec in [Some(single_pair()), None] {
            let j = inner_channel_expanded(&code, spec.as_ref(), &BTreeSet::new()).unwrap();
            assert!(phi_plus_defect(&j).abs() < 1e-12);
        }
        // erased physical qudit: the decoder outputs |0>, twirled to a = 3/4
        let j = inner_channel_expanded(&code, Some(&single_pair()), &BTreeSet::from([0])).unwrap();
        assert!((phi_plus_defect(&j) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn lost_reference_is_the_flat_average() {
        let five = five_qubit_code().unwrap();
        let none = BTreeSet::new();
        let j = inner_channel_expanded(&five, None, &none).unwrap();
        let parts = InnerParts::new(&five, &none).unwrap();
        let quad = haar_quadrature_su2(16).unwrap();
        let mut flat = CMat::zeros(4, 4);
        for node in quad.nodes() {
            flat += parts.rotated_choi(&node.unitary()).scale(node.weight);
        }
        assert!(max_abs(&(j.matrix() - flat)) < 1e-12);
        let id = KrausChannel::identity(2).choi();
        assert!(max_abs(&(j.matrix() - id.matrix())) > 0.05);
    }

    #[test]
    fn under_resolved_quadrature_is_reported() {
        let (_, spec) = weak_spec(2, 40, 5).unwrap();
        let quad = haar_quadrature_su2(3).unwrap();
        let err = inner_channel(&trivial_code(2), &spec, &BTreeSet::new(), &quad).unwrap_err();
        assert!(matches!(err, ProtocolError::Resolution(_)));
    }

    #[test]
    fn spin_weights_normalized() {
        for s in 1..6 {
            let w = spin_weights(Some(&strong_combined_spec(2, s).unwrap()), 20).unwrap();
            assert!((w[0] - 1.0).abs() < 1e-12);
            assert!(w.iter().skip(1).step_by(2).all(|&v| v == 0.0) || s % 2 == 1);
        }
    }
}
