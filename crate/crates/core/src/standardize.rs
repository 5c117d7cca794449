//! Sample datasets and the whitening transform that maps raw inputs to
//! zero-mean, identity-covariance coordinates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{inv_sqrt, OrthonormalBasis, SymmetricMatrix};

/// `N × m` predictor table paired with `N` responses.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: Vec<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::InvalidInput("dataset must have at least one row and one column".into()));
        }
        if let Some(i) = x.row_iter().position(|r| r.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite predictor in row {i}")));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite response in row {i}")));
        }
        Ok(Self { x, y })
    }

    /// Number of samples `N`.
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Input dimension `m`.
    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// New dataset holding the given rows, in order, with repeats allowed.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let x = self.x.select_rows(rows);
        let y = rows.iter().map(|&i| self.y[i]).collect();
        Dataset { x, y }
    }
}

/// Fitted mean, covariance and symmetric whitening matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: DVector<f64>,
    cov: SymmetricMatrix,
    whitener: SymmetricMatrix,
}

impl Standardizer {
    /// Fits sample mean and `1/(N−1)` covariance; whitener is `cov^{-1/2}`.
    pub fn fit(data: &Dataset) -> Result<Self> {
        let (n, m) = data.x.shape();
        if n <= m {
            return Err(Error::InsufficientSamples {
                samples: n,
                dim: m,
                needed: m + 1,
            });
        }
        let mean = column_means(&data.x);
        let centered = center(&data.x, &mean);
        let cov = SymmetricMatrix::symmetrize(centered.tr_mul(&centered) / (n as f64 - 1.0))?;
        let whitener = inv_sqrt(&cov)?;
        Ok(Self {
            mean,
            cov,
            whitener,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &SymmetricMatrix {
        &self.cov
    }

    pub fn whitener(&self) -> &SymmetricMatrix {
        &self.whitener
    }

    /// `zᵢ = W (xᵢ − μ)` for every row; responses are carried over.
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        let z = self.transform_rows(&data.x)?;
        Ok(Dataset {
            x: z,
            y: data.y.clone(),
        })
    }

    /// Standardizes each row of `x`.
    pub fn transform_rows(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.ncols(),
            });
        }
        // W is symmetric, so row-wise W(x - μ) is (X - 1μᵀ) W
        Ok(center(x, &self.mean) * self.whitener.as_matrix())
    }

    pub fn transform_point(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let d = DVector::from_column_slice(x) - &self.mean;
        Ok(self.whitener.as_matrix() * d)
    }

    /// Maps standardized directions back to original input coordinates.
    ///
    /// For `wᵀz = (W w)ᵀ(x − μ)`, column `k` becomes `W wₖ / ‖W wₖ‖`.
    /// Columns are unit length but in general not mutually orthogonal.
    pub fn pullback(&self, directions: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if directions.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: directions.nrows(),
            });
        }
        let mut out = self.whitener.as_matrix() * directions;
        for mut col in out.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col /= norm;
            }
        }
        Ok(out)
    }

    /// Pullback of a basis, re-orthonormalized so it can be compared with
    /// subspaces given in original coordinates.
    pub fn pullback_basis(&self, basis: &OrthonormalBasis) -> Result<OrthonormalBasis> {
        OrthonormalBasis::orthonormalize(self.pullback(basis.columns())?)
    }
}

pub(crate) fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    let n = x.nrows() as f64;
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / n))
}

fn center(x: &DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    let mut c = x.clone();
    for (j, mut col) in c.column_iter_mut().enumerate() {
        col.add_scalar_mut(-mean[j]);
    }
    c
}

/// Sample covariance with `1/(N−1)` normalization.
pub fn sample_covariance(x: &DMatrix<f64>) -> Result<SymmetricMatrix> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InsufficientSamples {
            samples: n,
            dim: x.ncols(),
            needed: 2,
        });
    }
    let c = center(x, &column_means(x));
    SymmetricMatrix::symmetrize(c.tr_mul(&c) / (n as f64 - 1.0))
}
