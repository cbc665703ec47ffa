//! wasm-bindgen surface for the static demo page in `www/`.
//!
//! Each export returns a flat `Float64Array` with a fixed stride so the page
//! can plot it without any glue. The plain functions behind the exports are
//! what the native tests exercise.

use std::f64::consts::PI;

use covqec::bounds::{prop1_lower, prop2_lower, theorem1_bound, theorem2_bound};
use covqec::refframe::{outcome_density_su2, strong_combined_spec, weak_spec};
use covqec::rep::{schur_weyl_distribution, to_f64};
use wasm_bindgen::prelude::*;

pub const MAX_POINTS: u32 = 2000;
pub const MAX_LATTICE: u32 = 400;
pub const MAX_COPIES: u32 = 200;
pub const MAX_SW_BOXES: u32 = 40;
/// Physical register size used for the weak-model curves.
pub const DEMO_PHYSICAL: u32 = 5;
/// Exponent slack in the strong upper bound.
pub const DEMO_ALPHA: f64 = 0.1;

fn check_points(points: u32) -> Result<(), String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    Ok(())
}

/// Probability density of the residual rotation half-angle on `[0, pi]`:
/// outcome density times the Haar weight `(2/pi) sin^2`. Stride 2: `theta, p`.
///
/// `model` is `weak` (`size` = lattice parameter m) or `strong` (`size` =
/// surviving copies).
pub fn angle_distribution(model: &str, size: u32, points: u32) -> Result<Vec<f64>, String> {
    check_points(points)?;
    let spec = match model {
        "weak" if (1..=MAX_LATTICE).contains(&size) => {
            weak_spec(2, size, DEMO_PHYSICAL).map_err(|e| e.to_string())?.1
        }
        "strong" if (1..=MAX_COPIES).contains(&size) => strong_combined_spec(2, size).map_err(|e| e.to_string())?,
        "weak" | "strong" => return Err(format!("size {size} out of range for the {model} model")),
        other => return Err(format!("unknown model {other:?}")),
    };
    let mut out = Vec::with_capacity(2 * points as usize);
    for k in 0..points {
        let th = PI * k as f64 / (points - 1) as f64;
        out.push(th);
        out.push(outcome_density_su2(&spec, th) * 2.0 / PI * th.sin().powi(2));
    }
    Ok(out)
}

/// Schur-Weyl outcome distribution for `s` copies of the maximally mixed
/// qudit. Stride `d + 1`: the diagram's `d` rows, then its probability.
pub fn schur_weyl(s: u32, d: u32) -> Result<Vec<f64>, String> {
    if !(1..=MAX_SW_BOXES).contains(&s) || !(1..=4).contains(&d) {
        return Err(format!("need 1 <= s <= {MAX_SW_BOXES} and 1 <= d <= 4"));
    }
    let dist = schur_weyl_distribution(s, d as usize).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(dist.len() * (d as usize + 1));
    for (lam, p) in dist {
        out.extend((0..d as usize).map(|i| lam.rows().get(i).copied().unwrap_or(0) as f64));
        out.push(to_f64(&p));
    }
    Ok(out)
}

/// Upper and lower bounds on log-spaced total sizes in `[n_min, n_max]`.
/// Stride 3: `n, upper, lower`; an upper bound that does not apply is NaN.
/// Weak-model sizes are rounded up to an even reference register.
///
/// `param` is the erasure count (weak) or erasure probability (strong).
pub fn bound_curves(model: &str, param: f64, n_min: u32, n_max: u32, points: u32) -> Result<Vec<f64>, String> {
    check_points(points)?;
    if n_min < DEMO_PHYSICAL + 1 || n_max <= n_min {
        return Err(format!("need {} <= n_min < n_max", DEMO_PHYSICAL + 1));
    }
    let (lo, hi) = ((n_min as f64).ln(), (n_max as f64).ln());
    let p0 = DEMO_PHYSICAL as u64;
    let mut ns: Vec<u64> = (0..points)
        .map(|k| (lo + (hi - lo) * k as f64 / (points - 1) as f64).exp().round() as u64)
        // the weak bound needs an even reference register
        .map(|n| if model == "weak" { p0 + 2 * ((n - p0 + 1) / 2) } else { n })
        .collect();
    ns.dedup();
    let mut out = Vec::with_capacity(3 * ns.len());
    for n in ns {
        let (up, low) = match model {
            "weak" => {
                if param.fract() != 0.0 || !(1.0..=20.0).contains(&param) {
                    return Err("weak model needs an integer erasure count in 1..=20".into());
                }
                let ne = param as u32;
                let nr = n - p0;
                let up = theorem1_bound(2, ne, DEMO_PHYSICAL, nr).map_err(|e| e.to_string())?;
                let up = if up.preconditions_met { up.value } else { f64::NAN };
                (up, prop1_lower(n, ne).map_err(|e| e.to_string())?.value)
            }
            "strong" => {
                if !(param > 0.0 && param < 1.0) {
                    return Err("strong model needs 0 < p_e < 1".into());
                }
                let up = if param < 0.5 {
                    theorem2_bound(2, param, n, DEMO_ALPHA).map_err(|e| e.to_string())?.value
                } else {
                    f64::NAN
                };
                (up, prop2_lower(n, param).map_err(|e| e.to_string())?.value)
            }
            other => return Err(format!("unknown model {other:?}")),
        };
        out.extend([n as f64, up, low]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = angleDistribution)]
pub fn angle_distribution_js(model: &str, size: u32, points: u32) -> Result<Vec<f64>, JsError> {
    angle_distribution(model, size, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = schurWeyl)]
pub fn schur_weyl_js(s: u32, d: u32) -> Result<Vec<f64>, JsError> {
    schur_weyl(s, d).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = boundCurves)]
pub fn bound_curves_js(model: &str, param: f64, n_min: u32, n_max: u32, points: u32) -> Result<Vec<f64>, JsError> {
    bound_curves(model, param, n_min, n_max, points).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_distribution_integrates_to_one() {
        for (model, size) in [("weak", 12), ("strong", 6)] {
            let v = angle_distribution(model, size, 1001).unwrap();
            let h = PI / 1000.0;
            // trapezoid; endpoints vanish
            let mass: f64 = v.chunks(2).map(|p| p[1]).sum::<f64>() * h;
            assert!((mass - 1.0).abs() < 1e-6, "{model}: {mass}");
            assert!(v.chunks(2).all(|p| p[1] >= -1e-12));
        }
    }

    #[test]
    fn larger_frames_concentrate_near_identity() {
        let spread = |size| {
            let v = angle_distribution("strong", size, 801).unwrap();
            v.chunks(2).map(|p| p[0].min(PI - p[0]).powi(2) * p[1]).sum::<f64>()
        };
        assert!(spread(20) < spread(4));
    }

    #[test]
    fn schur_weyl_rows_and_normalization() {
        let v = schur_weyl(4, 2).unwrap();
        assert_eq!(v.len(), 3 * 3);
        // dim(U) * dim(S) / 2^4 for (4,0), (3,1), (2,2)
        assert_eq!(&v[..3], &[4.0, 0.0, 5.0 / 16.0]);
        assert_eq!(&v[3..6], &[3.0, 1.0, 9.0 / 16.0]);
        assert_eq!(&v[6..], &[2.0, 2.0, 2.0 / 16.0]);
        let total: f64 = schur_weyl(7, 3).unwrap().chunks(4).map(|r| r[3]).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_curves_sandwich() {
        let v = bound_curves("strong", 0.25, 10, 100_000, 20).unwrap();
        assert_eq!(v[0], 10.0);
        assert_eq!(v[v.len() - 3], 100_000.0);
        for r in v.chunks(3) {
            assert!(r[2] > 0.0 && r[2] < r[1], "{r:?}");
        }
        let w = bound_curves("weak", 1.0, 1005, 1005 * 64, 4).unwrap();
        assert!((w[1] - 0.9209).abs() < 1e-4);
        assert!(w.chunks(3).all(|r| r[2] < r[1]));
        assert!(bound_curves("strong", 0.6, 10, 100, 5).unwrap().chunks(3).all(|r| r[1].is_nan()));
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(angle_distribution("weak", 0, 10).is_err());
        assert!(angle_distribution("other", 3, 10).is_err());
        assert!(angle_distribution("strong", 3, 1).is_err());
        assert!(schur_weyl(41, 2).is_err());
        assert!(bound_curves("weak", 1.5, 10, 100, 5).is_err());
        assert!(bound_curves("strong", 0.2, 100, 100, 5).is_err());
    }
}
