use nalgebra::DMatrix;
use num_complex::Complex64;

use super::young::YoungDiagram;
use super::RepError;

/// Eigenvalues closer than this use the Jacobi-Trudi form instead of the
/// alternant ratio, which loses precision as the Vandermonde vanishes.
const SEPARATION_CUTOFF: f64 = 1e-3;

/// Character of the U(d) irrep `lambda` at a matrix with the given eigenphases.
pub fn character(lambda: &YoungDiagram, phases: &[f64]) -> Result<Complex64, RepError> {
    let d = phases.len();
    lambda.check_rows(d)?;
    let x: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    Ok(character_at(lambda, &x))
}

/// Character evaluated at arbitrary (not necessarily unimodular) eigenvalues.
pub fn character_at(lambda: &YoungDiagram, x: &[Complex64]) -> Complex64 {
    let d = x.len();
    if d == 1 {
        return x[0].powu(lambda.row(0));
    }
    if d == 2 {
        return su2_like(lambda, x[0], x[1]);
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..d {
        for j in (i + 1)..d {
            min_sep = min_sep.min((x[i] - x[j]).norm());
        }
    }
    if min_sep > SEPARATION_CUTOFF {
        alternant_ratio(lambda, x)
    } else {
        jacobi_trudi(lambda, x)
    }
}

fn su2_like(lambda: &YoungDiagram, a: Complex64, b: Complex64) -> Complex64 {
    let l = lambda.row(0) - lambda.row(1);
    let base = (a * b).powu(lambda.row(1));
    let h = if (a - b).norm() > SEPARATION_CUTOFF {
        (a.powu(l + 1) - b.powu(l + 1)) / (a - b)
    } else {
        // h_l(a, b) = sum a^k b^(l-k)
        (0..=l).map(|k| a.powu(k) * b.powu(l - k)).sum()
    };
    base * h
}

/// det(x_i^(l_j + d - j)) / det(x_i^(d - j)).
pub fn alternant_ratio(lambda: &YoungDiagram, x: &[Complex64]) -> Complex64 {
    let d = x.len();
    let l = lambda.padded(d);
    let num = DMatrix::from_fn(d, d, |i, j| x[i].powu((l[j] + (d - 1 - j) as i64) as u32));
    let mut vdm = Complex64::new(1.0, 0.0);
    for i in 0..d {
        for j in (i + 1)..d {
            vdm *= x[i] - x[j];
        }
    }
    num.determinant() / vdm
}

/// det(h_(l_i - i + j)) with complete homogeneous symmetric polynomials.
pub fn jacobi_trudi(lambda: &YoungDiagram, x: &[Complex64]) -> Complex64 {
    let k = lambda.num_rows();
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let top = (lambda.row(0) as usize) + k;
    let h = complete_homogeneous(x, top);
    let m = DMatrix::from_fn(k, k, |i, j| {
        let idx = lambda.row(i) as i64 - i as i64 + j as i64;
        if idx < 0 {
            Complex64::new(0.0, 0.0)
        } else {
            h[idx as usize]
        }
    });
    m.determinant()
}

/// `h_0..=h_top` of the given variables.
fn complete_homogeneous(x: &[Complex64], top: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); top + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for &xi in x {
        for k in 1..=top {
            let prev = h[k - 1];
            h[k] += xi * prev;
        }
    }
    h
}

/// SU(2) character of spin `l/2` at rotation half-angle `theta`
/// (eigenvalues `e^{+-i theta}`): `sin((l+1) theta) / sin(theta)`.
pub fn su2_character(l: u32, theta: f64) -> f64 {
    let s = theta.sin();
    if s.abs() < 1e-9 {
        // theta near 0 or pi
        let sign = if theta.cos() < 0.0 && l % 2 == 1 { -1.0 } else { 1.0 };
        return sign * (l + 1) as f64;
    }
    ((l + 1) as f64 * theta).sin() / s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::young::{dimension_f64, enumerate_diagrams};

    fn yd(r: &[u32]) -> YoungDiagram {
        YoungDiagram::new(r).unwrap()
    }

    // sum over semistandard tableaux of x^content, by brute-force filling
    fn ssyt_sum(lambda: &YoungDiagram, x: &[Complex64]) -> Complex64 {
        let cells: Vec<(usize, usize)> = lambda
            .rows()
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| (0..r as usize).map(move |j| (i, j)))
            .collect();
        let mut fill = vec![0usize; cells.len()];
        let mut total = Complex64::new(0.0, 0.0);
        rec(0, &cells, &mut fill, x, lambda, &mut total);
        total
    }

    fn rec(
        k: usize,
        cells: &[(usize, usize)],
        fill: &mut Vec<usize>,
        x: &[Complex64],
        lambda: &YoungDiagram,
        total: &mut Complex64,
    ) {
        if k == cells.len() {
            *total += fill.iter().map(|&v| x[v]).product::<Complex64>();
            return;
        }
        let (i, j) = cells[k];
        let idx = |a: usize, b: usize| {
            let off: usize = lambda.rows()[..a].iter().map(|&r| r as usize).sum();
            off + b
        };
        for v in 0..x.len() {
            if j > 0 && fill[idx(i, j - 1)] > v {
                continue;
            }
            if i > 0 && fill[idx(i - 1, j)] >= v {
                continue;
            }
            fill[k] = v;
            rec(k + 1, cells, fill, x, lambda, total);
        }
    }

    #[test]
    fn identity_gives_dimension() {
        for d in 2..5 {
            for n in 0..7 {
                for l in enumerate_diagrams(n, d).unwrap() {
                    let c = character(&l, &vec![0.0; d]).unwrap();
                    assert!((c.re - dimension_f64(&l, d)).abs() < 1e-9, "{l:?}");
                    assert!(c.im.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn su2_adjoint_at_pi_over_two() {
        let c = character(&yd(&[2]), &[std::f64::consts::FRAC_PI_2, -std::f64::consts::FRAC_PI_2]).unwrap();
        assert!((c - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((su2_character(2, std::f64::consts::FRAC_PI_2) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_tableau_expansion() {
        let phases = [[0.3, -1.1, 2.0], [0.5, 0.5 + 1e-6, -1.0], [0.0, 0.0, 0.0]];
        for ph in &phases {
            let x: Vec<Complex64> = ph.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
            for n in 0..7 {
                for l in enumerate_diagrams(n, 3).unwrap() {
                    let a = character_at(&l, &x);
                    let b = ssyt_sum(&l, &x);
                    assert!((a - b).norm() < 1e-7 * (1.0 + b.norm()), "{l:?} {ph:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn alternant_and_jacobi_trudi_agree_when_separated() {
        let x: Vec<Complex64> = [0.2, 1.4, -2.2, 3.0].iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        for l in enumerate_diagrams(9, 4).unwrap() {
            let a = alternant_ratio(&l, &x);
            let b = jacobi_trudi(&l, &x);
            assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn rejects_too_many_rows() {
        assert!(character(&yd(&[1, 1, 1]), &[0.1, 0.2]).is_err());
    }
}
