//! Minimization of a convex quadratic `w^T Q w` over the probability simplex.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Up to this many coordinates every face is checked exactly.
pub const EXACT_FACE_LIMIT: usize = 12;

#[derive(Clone, Debug)]
pub struct SimplexMin {
    pub value: f64,
    pub weights: Vec<f64>,
}

pub fn quad_form(q: &DMatrix<f64>, w: &[f64]) -> f64 {
    let v = DVector::from_column_slice(w);
    (v.transpose() * q * &v)[(0, 0)]
}

/// Global minimum of `w^T Q w` over `{w >= 0, sum w = 1}` for symmetric PSD `Q`.
pub fn simplex_min(q: &DMatrix<f64>) -> SimplexMin {
    let n = q.nrows();
    assert!(n > 0 && q.ncols() == n, "square nonempty matrix required");
    if n <= EXACT_FACE_LIMIT {
        face_enumeration(q)
    } else {
        projected_gradient(q, 50)
    }
}

/// Stationary point on every face; the convex minimum sits on one of them.
fn face_enumeration(q: &DMatrix<f64>) -> SimplexMin {
    let n = q.nrows();
    let mut best = SimplexMin { value: f64::INFINITY, weights: vec![0.0; n] };
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        // [[2 Q_SS, 1], [1^T, 0]] [w; nu] = [0; 1]
        let mut kkt = DMatrix::zeros(k + 1, k + 1);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                kkt[(a, b)] = 2.0 * q[(i, j)];
            }
            kkt[(a, k)] = 1.0;
            kkt[(k, a)] = 1.0;
        }
        let mut rhs = DVector::zeros(k + 1);
        rhs[k] = 1.0;
        let Ok(sol) = kkt.clone().svd(true, true).solve(&rhs, 1e-12) else { continue };
        if (&kkt * &sol - &rhs).norm() > 1e-8 {
            continue;
        }
        if (0..k).any(|a| sol[a] < -1e-12) {
            continue;
        }
        let mut w = vec![0.0; n];
        for (a, &i) in idx.iter().enumerate() {
            w[i] = sol[a].max(0.0);
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
        let val = quad_form(q, &w);
        if val < best.value {
            best = SimplexMin { value: val, weights: w };
        }
    }
    best
}

/// Euclidean projection onto the simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Accelerated projected gradient from `restarts` random starting points.
fn projected_gradient(q: &DMatrix<f64>, restarts: usize) -> SimplexMin {
    let n = q.nrows();
    let lip = 2.0 * crate::linalg::symmetric_eigenvalues(q).iter().copied().fold(0.0, f64::max).max(1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best = SimplexMin { value: f64::INFINITY, weights: vec![1.0 / n as f64; n] };
    for r in 0..restarts {
        let mut w: Vec<f64> = if r == 0 {
            vec![1.0 / n as f64; n]
        } else {
            project_simplex(&(0..n).map(|_| rng.gen::<f64>()).collect::<Vec<_>>())
        };
        let mut yv = w.clone();
        let mut t = 1.0f64;
        for _ in 0..20_000 {
            let g = q * DVector::from_column_slice(&yv) * 2.0;
            let step: Vec<f64> = yv.iter().zip(g.iter()).map(|(a, b)| a - b / lip).collect();
            let wn = project_simplex(&step);
            let tn = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            let diff: f64 = wn.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum();
            yv = wn.iter().zip(&w).map(|(a, b)| a + (t - 1.0) / tn * (a - b)).collect();
            w = wn;
            t = tn;
            if diff < 1e-15 {
                break;
            }
        }
        let val = quad_form(q, &w);
        if val < best.value {
            best = SimplexMin { value: val, weights: w };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_psd(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n + 1, |_, _| rng.gen::<f64>() - 0.3);
        &g * g.transpose()
    }

    #[test]
    fn projection_lands_on_simplex() {
        let p = project_simplex(&[0.9, 0.8, -0.2]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&v| v >= 0.0));
        assert_eq!(project_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
    }

    #[test]
    fn exact_and_gradient_agree() {
        for seed in 0..5 {
            let q = random_psd(6, seed);
            let a = face_enumeration(&q);
            let b = projected_gradient(&q, 5);
            assert!((a.value - b.value).abs() < 1e-9, "{} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn two_point_grid_search() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5]);
        let m = simplex_min(&q);
        let grid = (0..=100_000)
            .map(|i| {
                let t = i as f64 / 100_000.0;
                quad_form(&q, &[t, 1.0 - t])
            })
            .fold(f64::INFINITY, f64::min);
        assert!((m.value - grid).abs() < 1e-8);
    }
}
