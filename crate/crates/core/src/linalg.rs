//! Dense symmetric linear algebra: eigendecomposition with a reproducible
//! sign convention, symmetric inverse square roots, and the principal-angle
//! distance between equal-dimensional subspaces.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-10;
const MAX_CONDITION: f64 = 1e12;

/// Square matrix whose storage is exactly symmetric and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Accepts `m` only if it is square, finite and bit-for-bit symmetric.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square_finite(&m)?;
        let n = m.nrows();
        for j in 0..n {
            for i in (j + 1)..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    /// Averages `m` with its transpose. Use for matrices that are symmetric
    /// in exact arithmetic but may carry rounding asymmetry.
    pub fn symmetrize(m: DMatrix<f64>) -> Result<Self> {
        check_square_finite(&m)?;
        let n = m.nrows();
        let mut out = m;
        for j in 0..n {
            for i in (j + 1)..n {
                let v = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Ok(Self(out))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }
}

fn check_square_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns. In each column the entry of largest magnitude is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// The leading `n` eigenvector columns as a basis.
    pub fn leading_basis(&self, n: usize) -> Result<OrthonormalBasis> {
        let m = self.dim();
        if n == 0 || n > m {
            return Err(Error::SubspaceDimOutOfRange { n, m });
        }
        Ok(OrthonormalBasis {
            columns: self.vectors.columns(0, n).into_owned(),
        })
    }
}

/// Symmetric eigendecomposition, deterministic for identical input.
pub fn sym_eig(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let dim = m.dim();
    let scale = m.0.amax();
    if scale == 0.0 {
        return Ok(EigenDecomposition {
            values: DVector::zeros(dim),
            vectors: DMatrix::identity(dim, dim),
        });
    }
    let eig = SymmetricEigen::try_new(m.0.clone(), f64::EPSILON, 0).ok_or(Error::EigenFailure)?;

    let mut order: Vec<usize> = (0..dim).collect();
    // stable sort keeps the solver's order among exactly equal eigenvalues
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let values = DVector::from_iterator(dim, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        normalize_sign(&mut col);
        vectors.set_column(dst, &col);
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
pub(crate) fn normalize_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}

/// `M^{-1/2}` for symmetric positive definite `M`.
///
/// Fails with [`Error::IllConditionedCovariance`] when the smallest eigenvalue
/// is below `dim * 1e-14 * λ_max` or the condition number exceeds `1e12`.
/// No regularization is applied.
pub fn inv_sqrt(m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let eig = sym_eig(m)?;
    let dim = m.dim();
    let lmax = eig.values[0];
    let lmin = eig.values[dim - 1];
    if lmax <= 0.0 || lmin <= dim as f64 * 1e-14 * lmax {
        return Err(Error::IllConditionedCovariance {
            reason: format!("smallest eigenvalue {lmin:e} relative to largest {lmax:e}"),
        });
    }
    let cond = lmax / lmin;
    if cond > MAX_CONDITION {
        return Err(Error::IllConditionedCovariance {
            reason: format!("condition number {cond:e} exceeds {MAX_CONDITION:e}"),
        });
    }
    let scaled = DMatrix::from_fn(dim, dim, |i, k| eig.vectors[(i, k)] / eig.values[k].sqrt());
    SymmetricMatrix::symmetrize(&scaled * eig.vectors.transpose())
}

/// `m × n` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    columns: DMatrix<f64>,
}

impl OrthonormalBasis {
    /// Validates orthonormality of the columns to `1e-10`.
    pub fn new(columns: DMatrix<f64>) -> Result<Self> {
        let (m, n) = columns.shape();
        if n == 0 || n > m {
            return Err(Error::SubspaceDimOutOfRange { n, m });
        }
        if columns.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("basis has non-finite entries".into()));
        }
        let gram = columns.tr_mul(&columns);
        let off = (&gram - DMatrix::<f64>::identity(n, n)).amax();
        if off > ORTHONORMAL_TOL {
            return Err(Error::InvalidInput(format!(
                "basis columns are not orthonormal (max deviation {off:e})"
            )));
        }
        Ok(Self { columns })
    }

    /// Orthonormal basis for the column span of `spanning` (full column rank).
    pub fn orthonormalize(spanning: DMatrix<f64>) -> Result<Self> {
        let (m, n) = spanning.shape();
        if n == 0 || n > m {
            return Err(Error::SubspaceDimOutOfRange { n, m });
        }
        let scale = spanning.amax();
        let qr = spanning.qr();
        let r = qr.r();
        for k in 0..n {
            if !(r[(k, k)].abs() > 1e-12 * scale) {
                return Err(Error::InvalidInput(
                    "spanning set is rank deficient".into(),
                ));
            }
        }
        let mut q = qr.q();
        for k in 0..n {
            let mut col = q.column(k).into_owned();
            normalize_sign(&mut col);
            q.set_column(k, &col);
        }
        Ok(Self { columns: q })
    }

    /// First `n` columns of the identity in `R^m`.
    pub fn standard(m: usize, n: usize) -> Result<Self> {
        if n == 0 || n > m {
            return Err(Error::SubspaceDimOutOfRange { n, m });
        }
        Ok(Self {
            columns: DMatrix::identity(m, n),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn into_columns(self) -> DMatrix<f64> {
        self.columns
    }

    /// Norm of the component of `v` orthogonal to this subspace.
    pub fn residual_norm(&self, v: &DVector<f64>) -> f64 {
        let coeff = self.columns.tr_mul(v);
        (v - &self.columns * coeff).norm()
    }
}

/// `‖AAᵀ − BBᵀ‖₂` for two `n`-dimensional subspaces of `R^m`: the sine of the
/// largest principal angle between them.
///
/// Evaluated as the largest singular value of `B − A(AᵀB)`, which equals
/// `sqrt(1 − σ_min(AᵀB)²)` without the cancellation that formula suffers for
/// nearly identical subspaces.
pub fn subspace_distance(a: &OrthonormalBasis, b: &OrthonormalBasis) -> Result<f64> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let proj = a.columns.tr_mul(&b.columns);
    let resid = &b.columns - &a.columns * proj;
    let svd = SVD::new(resid, false, false);
    let smax = svd.singular_values.max();
    Ok(smax.clamp(0.0, 1.0))
}

/// Spectral norm of a symmetric matrix.
#[cfg(test)]
pub(crate) fn spectral_norm_sym(m: &DMatrix<f64>) -> f64 {
    SVD::new(m.clone(), false, false).singular_values.max()
}
