use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, hermitian_eigh, CMat};

use super::ChannelError;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// One Euler-angle node `U = Rz(alpha) Ry(beta) Rz(gamma)` with its weight.
#[derive(Clone, Copy, Debug)]
pub struct EulerNode {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub weight: f64,
}

impl EulerNode {
    pub fn su2(&self) -> Matrix2<Complex64> {
        euler_su2(self.alpha, self.beta, self.gamma)
    }

    pub fn unitary(&self) -> CMat {
        let m = self.su2();
        CMat::from_fn(2, 2, |i, j| m[(i, j)])
    }

    /// Half-angle `theta` in `[0, pi]`: the eigenvalues are `e^{+-i theta}`.
    pub fn half_angle(&self) -> f64 {
        rotation_half_angle(&self.su2())
    }
}

/// `J_z` and `J_y` of spin `two_j / 2` in the basis `m = j, j-1, ..., -j`.
pub fn spin_matrices(two_j: usize) -> (CMat, CMat) {
    let n = two_j + 1;
    let j = two_j as f64 / 2.0;
    let jz = CMat::from_fn(n, n, |r, c| if r == c { Complex64::new(j - r as f64, 0.0) } else { Complex64::new(0.0, 0.0) });
    // <m+1| J_+ |m> = sqrt(j(j+1) - m(m+1)); row r holds m = j - r
    let mut jy = CMat::zeros(n, n);
    for r in 1..n {
        let m = j - r as f64;
        let amp = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        jy[(r - 1, r)] = Complex64::new(0.0, -amp / 2.0);
        jy[(r, r - 1)] = Complex64::new(0.0, amp / 2.0);
    }
    (jz, jy)
}

/// Spin `two_j / 2` representation of `Rz(alpha) Ry(beta) Rz(gamma)`.
pub fn spin_unitary(two_j: usize, alpha: f64, beta: f64, gamma: f64) -> CMat {
    let (jz, jy) = spin_matrices(two_j);
    let n = two_j + 1;
    let rz = |t: f64| CMat::from_fn(n, n, |r, c| if r == c { Complex64::from_polar(1.0, -t * jz[(r, r)].re) } else { Complex64::new(0.0, 0.0) });
    let (vals, vecs) = hermitian_eigh(&jy);
    let mut ry = CMat::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        let col = vecs.column(k);
        ry += (&col * col.adjoint()) * Complex64::from_polar(1.0, -beta * v);
    }
    rz(alpha) * ry * rz(gamma)
}

pub fn euler_su2(alpha: f64, beta: f64, gamma: f64) -> Matrix2<Complex64> {
    let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let ep = Complex64::from_polar(1.0, -(alpha + gamma) / 2.0);
    let em = Complex64::from_polar(1.0, -(alpha - gamma) / 2.0);
    Matrix2::new(ep * cb, -em * sb, em.conj() * sb, ep.conj() * cb)
}

pub fn rotation_half_angle(u: &Matrix2<Complex64>) -> f64 {
    ((u[(0, 0)] + u[(1, 1)]).re / 2.0).clamp(-1.0, 1.0).acos()
}

/// Product rule for the Haar measure on SU(2): Gauss-Legendre in `cos beta`
/// (`order` nodes) times trapezoid rules in `alpha` on `[0, 2pi)` and `gamma` on
/// `[0, 4pi)` (`2 order` nodes each). Weights sum to one.
///
/// Exact for every matrix-coefficient product of total spin below `order`,
/// in particular for `chi_l chi_m*` with `|l|, |m| <= order - 1`.
#[derive(Clone, Debug)]
pub struct HaarQuadrature {
    order: usize,
    nodes: Vec<EulerNode>,
}

impl HaarQuadrature {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[EulerNode] {
        &self.nodes
    }

    pub fn integrate(&self, f: impl Fn(&EulerNode) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }
}

pub fn haar_quadrature_su2(order: usize) -> Result<HaarQuadrature, ChannelError> {
    if order == 0 {
        return Err(ChannelError::OutOfRange("quadrature order must be positive".into()));
    }
    let (x, w) = gauss_legendre(order);
    let m = 2 * order;
    let mut nodes = Vec::with_capacity(order * m * m);
    for (xb, wb) in x.iter().zip(&w) {
        let beta = xb.clamp(-1.0, 1.0).acos();
        for ia in 0..m {
            let alpha = 2.0 * PI * ia as f64 / m as f64;
            for ig in 0..m {
                let gamma = 4.0 * PI * ig as f64 / m as f64;
                nodes.push(EulerNode { alpha, beta, gamma, weight: wb / 2.0 / (m * m) as f64 });
            }
        }
    }
    Ok(HaarQuadrature { order, nodes })
}

/// Haar-random SU(2) element from a uniform point on the 3-sphere.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    let mut q = [0.0f64; 4];
    let mut n2 = 0.0;
    while n2 < 1e-12 {
        for v in q.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        n2 = q.iter().map(|v| v * v).sum();
    }
    let n = n2.sqrt();
    let (a, b, cc, d) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
    Matrix2::new(c(a, b), c(cc, d), c(-cc, d), c(a, -b))
}

/// Haar-random U(n) element: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) / 2f64.sqrt()
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Haar-random SU(n) element.
pub fn haar_special_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let u = haar_unitary(n, rng);
    let det = u.determinant();
    let fix = Complex64::from_polar(1.0, -det.arg() / n as f64);
    u * fix
}
