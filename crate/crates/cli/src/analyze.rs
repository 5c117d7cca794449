//! End-to-end analysis of one dataset into result documents.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use ridge_sdr::diagnostics::bootstrap_eigs;
use ridge_sdr::slicing::default_slice_count;
use ridge_sdr::{
    fit, suggest_dimension, summary_coordinates, BootstrapRanges, Dataset, Method, SlicingKind, SlicingStrategy,
    SubspaceEstimate,
};

use crate::dataset_io::write_table;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Sir,
    Save,
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Sir => vec![Method::Sir],
            MethodChoice::Save => vec![Method::Save],
            MethodChoice::Both => vec![Method::Sir, Method::Save],
        }
    }
}

impl FromStr for MethodChoice {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sir" => Ok(MethodChoice::Sir),
            "save" => Ok(MethodChoice::Save),
            "both" => Ok(MethodChoice::Both),
            other => Err(CliError::Usage(format!("unknown method `{other}`; expected sir, save or both"))),
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodChoice::Sir => "sir",
            MethodChoice::Save => "save",
            MethodChoice::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub method: MethodChoice,
    pub slicing: SlicingKind,
    /// Overrides the default slice count.
    pub slices: Option<usize>,
    /// Subspace dimension; the suggested dimension when absent.
    pub dim: Option<usize>,
    pub bootstrap: Option<usize>,
    pub percentiles: (f64, f64),
    pub seed: Option<u64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            method: MethodChoice::Both,
            slicing: SlicingKind::EqualCount,
            slices: None,
            dim: None,
            bootstrap: None,
            percentiles: (2.5, 97.5),
            seed: None,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self, data: &Dataset) -> CliResult<()> {
        let m = data.dim();
        if let Some(n) = self.dim {
            if n == 0 || n > m {
                return Err(ridge_sdr::Error::SubspaceDimOutOfRange { n, m }.into());
            }
        }
        if self.bootstrap.is_some() && self.seed.is_none() {
            return Err(CliError::Usage("--seed is required when bootstrapping".into()));
        }
        Ok(())
    }

    pub fn strategy(&self, data: &Dataset) -> SlicingStrategy {
        SlicingStrategy {
            kind: self.slicing,
            requested: self.slices.unwrap_or_else(|| default_slice_count(data.len(), data.dim())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceSection {
    pub n: usize,
    /// Orthonormal basis columns in standardized coordinates.
    pub standardized: Vec<Vec<f64>>,
    /// Orthonormal basis columns in original input coordinates.
    pub original: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultDocument {
    pub method: Method,
    pub m: usize,
    #[serde(rename = "N")]
    pub samples: usize,
    /// Requested slice count.
    #[serde(rename = "R")]
    pub requested_slices: usize,
    pub slicing: SlicingKind,
    /// Samples per slice actually used.
    pub counts: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the `k`-th eigenvector.
    pub eigenvectors_standardized: Vec<Vec<f64>>,
    /// Eigenvectors mapped to input coordinates, unit length each.
    pub directions_original: Vec<Vec<f64>>,
    pub suggested_n: usize,
    pub subspace: SubspaceSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapRanges>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

pub struct Analysis {
    pub document: ResultDocument,
    /// Rows `(w₁ᵀz, …, wₙᵀz, y)`.
    pub summary: DMatrix<f64>,
}

fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter().map(|c| c.iter().copied().collect()).collect()
}

/// Runs every requested method on `data`.
pub fn run_analyze(config: &AnalysisConfig, data: &Dataset) -> CliResult<Vec<Analysis>> {
    config.validate(data)?;
    let strategy = config.strategy(data);
    config
        .method
        .methods()
        .into_iter()
        .map(|method| analyze_one(config, data, method, strategy))
        .collect()
}

fn analyze_one(config: &AnalysisConfig, data: &Dataset, method: Method, strategy: SlicingStrategy) -> CliResult<Analysis> {
    let run = fit(data, method, strategy)?;
    let est = &run.estimate;
    let mut warnings = Vec::new();
    if run.partition.is_degenerate() {
        warnings.push("response is constant; all samples fall in a single slice".to_string());
    } else if run.partition.len() < strategy.requested {
        warnings.push(format!(
            "{} slices requested but {} used after merging empty or undersized slices",
            strategy.requested,
            run.partition.len()
        ));
    }

    let suggested_n = suggest_dimension(&est.eig);
    let n = config.dim.unwrap_or(suggested_n);
    if n > 2 {
        warnings.push(format!("summary coordinates have {n} directions; plots are readable for 1 or 2"));
    }
    let basis = est.eig.leading_basis(n)?;
    let original = run.standardizer.pullback_basis(&basis)?;
    let directions = run.standardizer.pullback(&est.eig.vectors)?;

    let bootstrap = match config.bootstrap {
        Some(b) => Some(bootstrap_eigs(
            data,
            method,
            strategy,
            b,
            config.percentiles,
            config.seed.expect("validated"),
        )?),
        None => None,
    };

    let sub = SubspaceEstimate {
        basis: basis.clone(),
        source: method,
    };
    let summary = summary_coordinates(data, &run.standardizer, &sub)?;

    Ok(Analysis {
        document: ResultDocument {
            method,
            m: data.dim(),
            samples: data.len(),
            requested_slices: strategy.requested,
            slicing: strategy.kind,
            counts: est.counts.clone(),
            eigenvalues: est.eigenvalues().iter().copied().collect(),
            eigenvectors_standardized: columns(&est.eig.vectors),
            directions_original: columns(&directions),
            suggested_n,
            subspace: SubspaceSection {
                n,
                standardized: columns(basis.columns()),
                original: columns(original.columns()),
            },
            bootstrap,
            seed: config.bootstrap.and(config.seed),
            warnings,
        },
        summary,
    })
}

/// Summary-plot CSV with columns `w1,...,wn,y`.
pub fn write_summary_csv(path: &Path, summary: &DMatrix<f64>) -> CliResult<()> {
    let n = summary.ncols() - 1;
    let mut buf = Vec::new();
    let header: Vec<String> = (1..=n).map(|j| format!("w{j}")).chain(["y".to_string()]).collect();
    buf.extend_from_slice(header.join(",").as_bytes());
    buf.push(b'\n');
    write_table(&mut buf, summary, None).map_err(|e| CliError::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

/// `plot.csv` becomes `plot.sir.csv`; used when several methods share one path.
pub fn with_method_suffix(path: &Path, method: Method) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{method}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{method}"),
    };
    path.with_file_name(name)
}
