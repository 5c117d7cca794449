//! Sliced inverse regression (SIR) and sliced average variance estimation
//! (SAVE) moment matrices, assembled from standardized samples.
//!
//! Both matrices are count-weighted sums over slices:
//!
//! ```text
//! C_SIR  = (1/N) Σ_r N_r μ_r μ_rᵀ
//! C_SAVE = (1/N) Σ_r N_r (I − Σ_r)²
//! ```
//!
//! where `μ_r` and `Σ_r` are the sample mean and `1/(N_r − 1)` covariance of
//! the standardized inputs whose responses fall in slice `r`. Summation runs
//! slice by slice in index order, so results are bit-reproducible.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, EigenDecomposition, OrthonormalBasis, SymmetricMatrix};
use crate::slicing::{partition, SlicePartition, SlicingStrategy};
use crate::standardize::{Dataset, Standardizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sir,
    Save,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sir => "sir",
            Method::Save => "save",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sir" => Ok(Method::Sir),
            "save" => Ok(Method::Save),
            other => Err(Error::BadParameter {
                name: "method".into(),
                reason: format!("expected sir or save, got `{other}`"),
            }),
        }
    }
}

/// Moment matrix with its eigendecomposition and the slicing that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrixEstimate {
    pub method: Method,
    pub matrix: SymmetricMatrix,
    pub eig: EigenDecomposition,
    pub counts: Vec<usize>,
    pub samples: usize,
}

impl MomentMatrixEstimate {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eig.values
    }

    pub fn slices(&self) -> usize {
        self.counts.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceEstimate {
    pub basis: OrthonormalBasis,
    pub source: Method,
}

impl SubspaceEstimate {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

fn check_partition(z: &Dataset, p: &SlicePartition) -> Result<()> {
    if p.total() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            found: p.total(),
        });
    }
    if p.membership().iter().flatten().any(|&i| i >= z.len()) {
        return Err(Error::InvalidInput("slice membership refers to a missing sample".into()));
    }
    Ok(())
}

fn mean_of_rows(x: &DMatrix<f64>, rows: &[usize]) -> DVector<f64> {
    let m = x.ncols();
    let mut acc = DVector::zeros(m);
    for &i in rows {
        for j in 0..m {
            acc[j] += x[(i, j)];
        }
    }
    acc / rows.len() as f64
}

/// Per-slice means of the standardized inputs, one row per slice.
pub fn slice_means(z: &Dataset, p: &SlicePartition) -> Result<DMatrix<f64>> {
    check_partition(z, p)?;
    let m = z.dim();
    let mut out = DMatrix::zeros(p.len(), m);
    for (r, rows) in p.membership().iter().enumerate() {
        out.set_row(r, &mean_of_rows(z.x(), rows).transpose());
    }
    Ok(out)
}

/// Weighted covariance of the slice means.
pub fn sir_matrix(z: &Dataset, p: &SlicePartition) -> Result<MomentMatrixEstimate> {
    let means = slice_means(z, p)?;
    let m = z.dim();
    let n = z.len() as f64;
    let mut c = DMatrix::zeros(m, m);
    for (r, rows) in p.membership().iter().enumerate() {
        let weight = rows.len() as f64;
        for j in 0..m {
            for i in j..m {
                c[(i, j)] += weight * means[(r, i)] * means[(r, j)];
            }
        }
    }
    finish(Method::Sir, c / n, z, p)
}

/// Within-slice sample covariances; every slice needs at least two samples.
pub fn slice_covariances(z: &Dataset, p: &SlicePartition) -> Result<Vec<SymmetricMatrix>> {
    check_partition(z, p)?;
    if let Some((slice, rows)) = p.membership().iter().enumerate().find(|(_, s)| s.len() < 2) {
        return Err(Error::SliceTooSmall {
            slice,
            count: rows.len(),
        });
    }
    p.membership()
        .iter()
        .map(|rows| {
            let mut block = z.x().select_rows(rows);
            let mean = mean_of_rows(z.x(), rows);
            for (j, mut col) in block.column_iter_mut().enumerate() {
                col.add_scalar_mut(-mean[j]);
            }
            SymmetricMatrix::symmetrize(block.tr_mul(&block) / (rows.len() as f64 - 1.0))
        })
        .collect()
}

/// Weighted average of `(I − Σ_r)²` over slices.
pub fn save_matrix(z: &Dataset, p: &SlicePartition) -> Result<MomentMatrixEstimate> {
    let covs = slice_covariances(z, p)?;
    let m = z.dim();
    let n = z.len() as f64;
    let eye = DMatrix::<f64>::identity(m, m);
    let mut c = DMatrix::zeros(m, m);
    for (cov, rows) in covs.iter().zip(p.membership()) {
        let d = &eye - cov.as_matrix();
        let sq = &d * &d;
        let weight = rows.len() as f64;
        for j in 0..m {
            for i in j..m {
                c[(i, j)] += weight * sq[(i, j)];
            }
        }
    }
    finish(Method::Save, c / n, z, p)
}

/// Mirrors the accumulated lower triangle and eigendecomposes.
fn finish(
    method: Method,
    mut lower: DMatrix<f64>,
    z: &Dataset,
    p: &SlicePartition,
) -> Result<MomentMatrixEstimate> {
    let m = lower.nrows();
    for j in 0..m {
        for i in (j + 1)..m {
            lower[(j, i)] = lower[(i, j)];
        }
    }
    let matrix = SymmetricMatrix::new(lower)?;
    let eig = sym_eig(&matrix)?;
    Ok(MomentMatrixEstimate {
        method,
        matrix,
        eig,
        counts: p.counts(),
        samples: z.len(),
    })
}

/// Leading `n` eigenvectors of the estimate.
pub fn estimate_subspace(est: &MomentMatrixEstimate, n: usize) -> Result<SubspaceEstimate> {
    Ok(SubspaceEstimate {
        basis: est.eig.leading_basis(n)?,
        source: est.method,
    })
}

/// Assembles the moment matrix for `method` on standardized data.
///
/// SAVE merges slices with a single sample before assembly.
pub fn moment_matrix(
    method: Method,
    z: &Dataset,
    p: &SlicePartition,
) -> Result<MomentMatrixEstimate> {
    match method {
        Method::Sir => sir_matrix(z, p),
        Method::Save => save_matrix(z, &p.merge_small(2)),
    }
}

/// Everything produced by one end-to-end run on raw data.
#[derive(Debug, Clone)]
pub struct RidgeFit {
    pub standardizer: Standardizer,
    pub standardized: Dataset,
    pub partition: SlicePartition,
    pub estimate: MomentMatrixEstimate,
}

/// Standardize, slice, assemble and eigendecompose.
///
/// The stored partition is the one actually used for assembly, after any
/// merging SAVE required.
pub fn fit(data: &Dataset, method: Method, strategy: SlicingStrategy) -> Result<RidgeFit> {
    let standardizer = Standardizer::fit(data)?;
    let standardized = standardizer.apply(data)?;
    let mut part = partition(standardized.y(), strategy)?;
    if method == Method::Save {
        part = part.merge_small(2);
    }
    let estimate = match method {
        Method::Sir => sir_matrix(&standardized, &part)?,
        Method::Save => save_matrix(&standardized, &part)?,
    };
    Ok(RidgeFit {
        standardizer,
        standardized,
        partition: part,
        estimate,
    })
}
