use crate::linalg::{hermitian_eigenvalues, identity, max_abs, partial_trace_first, CMat, ZERO};

use super::ChannelError;

/// Trace-preservation tolerance on `sum K^dag K - I`.
pub const TP_TOL: f64 = 1e-10;

/// Channel in Kraus form, `C^{dim_in} -> C^{dim_out}`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    ops: Vec<CMat>,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMat>) -> Result<Self, ChannelError> {
        let ch = Self::new_unchecked(ops)?;
        let r = ch.tp_residual();
        if r > TP_TOL {
            return Err(ChannelError::NotTracePreserving(r));
        }
        Ok(ch)
    }

    /// Shape checks only; for families that are trace preserving by construction.
    pub fn new_unchecked(ops: Vec<CMat>) -> Result<Self, ChannelError> {
        let first = ops.first().ok_or(ChannelError::Empty)?;
        let (dim_out, dim_in) = first.shape();
        for k in &ops {
            if k.shape() != (dim_out, dim_in) {
                return Err(ChannelError::DimensionMismatch {
                    expected: (dim_out, dim_in),
                    got: k.shape(),
                });
            }
        }
        Ok(Self { dim_in, dim_out, ops })
    }

    pub fn identity(d: usize) -> Self {
        Self { dim_in: d, dim_out: d, ops: vec![identity(d)] }
    }

    pub fn unitary(u: CMat) -> Self {
        let (dim_out, dim_in) = u.shape();
        Self { dim_in, dim_out, ops: vec![u] }
    }

    /// Random channel from a Haar-random Stinespring isometry with `rank` Kraus
    /// operators. The rank is raised to `ceil(dim_in / dim_out)` when smaller,
    /// since no isometry exists below that.
    pub fn random<R: rand::Rng + ?Sized>(dim_in: usize, dim_out: usize, rank: usize, rng: &mut R) -> Self {
        let rank = rank.max(dim_in.div_ceil(dim_out));
        let u = super::haar_unitary(dim_out * rank, rng);
        let ops = (0..rank)
            .map(|k| CMat::from_fn(dim_out, dim_in, |o, i| u[(k * dim_out + o, i)]))
            .collect();
        Self { dim_in, dim_out, ops }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn tp_residual(&self) -> f64 {
        let mut s = CMat::zeros(self.dim_in, self.dim_in);
        for k in &self.ops {
            s += k.adjoint() * k;
        }
        max_abs(&(s - identity(self.dim_in)))
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim_out, self.dim_out);
        for k in &self.ops {
            out += k * rho * k.adjoint();
        }
        out
    }

    /// `next` after `self`.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel, ChannelError> {
        if next.dim_in != self.dim_out {
            return Err(ChannelError::DimensionMismatch {
                expected: (next.dim_in, next.dim_in),
                got: (self.dim_out, self.dim_out),
            });
        }
        let mut ops = Vec::with_capacity(self.ops.len() * next.ops.len());
        for b in &next.ops {
            for a in &self.ops {
                let k = b * a;
                if max_abs(&k) > 0.0 {
                    ops.push(k);
                }
            }
        }
        if ops.is_empty() {
            ops.push(CMat::zeros(next.dim_out, self.dim_in));
        }
        Ok(KrausChannel { dim_in: self.dim_in, dim_out: next.dim_out, ops })
    }

    pub fn choi(&self) -> ChoiMatrix {
        ChoiMatrix::from_kraus(self)
    }
}

/// State-normalized Choi matrix on `C^{dim_out} (x) C^{dim_in}` (output first):
/// `J = (1/dim_in) sum_ij N(|i><j|) (x) |i><j|`, trace one.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    mat: CMat,
}

impl ChoiMatrix {
    pub fn from_kraus(ch: &KrausChannel) -> Self {
        let (di, dout) = (ch.dim_in, ch.dim_out);
        let n = di * dout;
        let mut mat = CMat::zeros(n, n);
        for k in &ch.ops {
            let v = nalgebra::DVector::from_fn(n, |idx, _| k[(idx / di, idx % di)]);
            mat += &v * v.adjoint();
        }
        mat /= nalgebra::Complex::new(di as f64, 0.0);
        Self { dim_in: di, dim_out: dout, mat }
    }

    /// Wraps a state-normalized matrix after checking shape, PSD-ness and the
    /// input marginal.
    pub fn from_matrix(mat: CMat, dim_in: usize, dim_out: usize) -> Result<Self, ChannelError> {
        let n = dim_in * dim_out;
        if mat.shape() != (n, n) {
            return Err(ChannelError::DimensionMismatch { expected: (n, n), got: mat.shape() });
        }
        let herm = max_abs(&(&mat - mat.adjoint()));
        let min = hermitian_eigenvalues(&mat).first().copied().unwrap_or(0.0);
        if herm > 1e-9 || min < -1e-9 {
            return Err(ChannelError::NotPsd(min.min(-herm)));
        }
        let marg = partial_trace_first(&mat, dim_out, dim_in);
        let r = max_abs(&(marg - identity(dim_in).unscale(dim_in as f64)));
        if r > 1e-9 {
            return Err(ChannelError::NotTracePreserving(r));
        }
        Ok(Self { dim_in, dim_out, mat })
    }

    pub(crate) fn from_raw(mat: CMat, dim_in: usize, dim_out: usize) -> Self {
        Self { dim_in, dim_out, mat }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Unnormalized convention `sum_ij N(|i><j|) (x) |i><j|`.
    pub fn unnormalized(&self) -> CMat {
        self.mat.scale(self.dim_in as f64)
    }

    /// Convex combination `sum w_k J_k`.
    pub fn mixture(parts: &[(f64, &ChoiMatrix)]) -> Result<Self, ChannelError> {
        let (_, first) = parts.first().ok_or(ChannelError::Empty)?;
        let mut mat = CMat::from_element(first.mat.nrows(), first.mat.ncols(), ZERO);
        for (w, j) in parts {
            if j.dim_in != first.dim_in || j.dim_out != first.dim_out {
                return Err(ChannelError::DimensionMismatch {
                    expected: (first.dim_out, first.dim_in),
                    got: (j.dim_out, j.dim_in),
                });
            }
            mat += j.mat.scale(*w);
        }
        Ok(Self { dim_in: first.dim_in, dim_out: first.dim_out, mat })
    }
}

/// Density matrix wrapper with validation.
#[derive(Clone, Debug)]
pub struct DensityMatrix(CMat);

impl DensityMatrix {
    pub fn new(m: CMat) -> Result<Self, ChannelError> {
        if m.nrows() != m.ncols() {
            return Err(ChannelError::DimensionMismatch { expected: (m.nrows(), m.nrows()), got: m.shape() });
        }
        let herm = max_abs(&(&m - m.adjoint()));
        let min = hermitian_eigenvalues(&m).first().copied().unwrap_or(0.0);
        if herm > 1e-9 || min < -1e-9 {
            return Err(ChannelError::NotPsd(min.min(-herm)));
        }
        if (m.trace().re - 1.0).abs() > 1e-9 {
            return Err(ChannelError::NotNormalized(m.trace().re));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }
}
