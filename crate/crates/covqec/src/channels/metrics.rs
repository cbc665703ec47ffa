use crate::linalg::{hermitian_eigenvalues, hermitian_map, trace_norm_hermitian, CMat};

use super::{ChannelError, ChoiMatrix};

/// Negative eigenvalues above this are treated as rounding noise.
const CLIP: f64 = -1e-12;

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` of PSD operators.
pub fn uhlmann_fidelity(rho: &CMat, sigma: &CMat) -> Result<f64, ChannelError> {
    if rho.shape() != sigma.shape() {
        return Err(ChannelError::DimensionMismatch { expected: rho.shape(), got: sigma.shape() });
    }
    check_psd(rho)?;
    check_psd(sigma)?;
    let top = hermitian_eigenvalues(rho).last().copied().unwrap_or(0.0).max(0.0);
    let sr = hermitian_map(rho, |v| if v > 64.0 * f64::EPSILON * top { v.sqrt() } else { 0.0 });
    let m = &sr * sigma * &sr;
    let vals = hermitian_eigenvalues(&m);
    // eigenvalues at rounding level would otherwise contribute sqrt(eps)
    let floor = 64.0 * f64::EPSILON * vals.last().copied().unwrap_or(0.0).max(0.0);
    let root: f64 = vals
        .iter()
        .map(|&v| if v > floor { v.sqrt() } else if v > CLIP { 0.0 } else { f64::NAN })
        .sum();
    if root.is_nan() {
        return Err(ChannelError::NotPsd(hermitian_eigenvalues(&m)[0]));
    }
    Ok(root * root)
}

fn check_psd(m: &CMat) -> Result<(), ChannelError> {
    let min = hermitian_eigenvalues(m).first().copied().unwrap_or(0.0);
    let scale = m.trace().re.abs().max(1.0);
    if min < -1e-9 * scale {
        return Err(ChannelError::NotPsd(min));
    }
    Ok(())
}

fn same_shape(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<(), ChannelError> {
    if a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out() {
        return Err(ChannelError::DimensionMismatch {
            expected: (a.dim_out(), a.dim_in()),
            got: (b.dim_out(), b.dim_in()),
        });
    }
    Ok(())
}

/// Fidelity between the Choi states of two channels.
pub fn entanglement_fidelity(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<f64, ChannelError> {
    same_shape(a, b)?;
    uhlmann_fidelity(a.matrix(), b.matrix())
}

/// Half the trace distance between the Choi states of two channels.
pub fn entanglement_error(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<f64, ChannelError> {
    same_shape(a, b)?;
    Ok(0.5 * trace_norm_hermitian(&(a.matrix() - b.matrix())))
}

/// Interval `[1 - sqrt(F), sqrt(1 - F)]` that contains the trace distance.
pub fn fuchs_van_de_graaf(f: f64) -> (f64, f64) {
    let f = f.clamp(0.0, 1.0);
    (1.0 - f.sqrt(), (1.0 - f).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::KrausChannel;
    use crate::linalg::{c, identity};

    fn amplitude_damping(g: f64) -> KrausChannel {
        let k0 = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - g).sqrt(), 0.0)]);
        let k1 = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(g.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        KrausChannel::new(vec![k0, k1]).unwrap()
    }

    #[test]
    fn identity_fidelity_is_one() {
        let j = KrausChannel::identity(2).choi();
        assert!((entanglement_fidelity(&j, &j).unwrap() - 1.0).abs() < 1e-12);
        assert!(entanglement_error(&j, &j).unwrap() < 1e-12);
    }

    #[test]
    fn completely_depolarizing_against_identity() {
        let ops: Vec<CMat> = (0..4)
            .map(|k| {
                let mut m = CMat::zeros(2, 2);
                m[(k / 2, k % 2)] = c(1.0 / 2f64.sqrt(), 0.0);
                m
            })
            .collect();
        let dep = KrausChannel::new(ops).unwrap().choi();
        let id = KrausChannel::identity(2).choi();
        assert!((entanglement_fidelity(&dep, &id).unwrap() - 0.25).abs() < 1e-12);
        assert!((entanglement_error(&dep, &id).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn pure_state_fidelity_is_overlap() {
        let psi = nalgebra::DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let phi = nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let f = uhlmann_fidelity(&(&psi * psi.adjoint()), &(&phi * phi.adjoint())).unwrap();
        assert!((f - 0.36).abs() < 1e-10);
        let mixed = identity(2).unscale(2.0);
        assert!((uhlmann_fidelity(&mixed, &(&phi * phi.adjoint())).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn fuchs_van_de_graaf_brackets_amplitude_damping() {
        let id = KrausChannel::identity(2).choi();
        for g in [0.01, 0.1, 0.5, 0.9] {
            let j = amplitude_damping(g).choi();
            let f = entanglement_fidelity(&j, &id).unwrap();
            let e = entanglement_error(&j, &id).unwrap();
            let (lo, hi) = fuchs_van_de_graaf(f);
            assert!(lo - 1e-12 <= e && e <= hi + 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_or_non_psd() {
        let a = identity(2);
        let b = identity(3);
        assert!(matches!(uhlmann_fidelity(&a, &b), Err(ChannelError::DimensionMismatch { .. })));
        let neg = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert!(matches!(uhlmann_fidelity(&neg, &a), Err(ChannelError::NotPsd(_))));
    }
}
