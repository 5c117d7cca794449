//! Bootstrap eigenvalue ranges, gap-based dimension choice, summary-plot
//! coordinates, and the Monte Carlo convergence study.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inverse_regression::{fit, Method, SubspaceEstimate};
use crate::linalg::{subspace_distance, EigenDecomposition};
use crate::rng::stream_rng;
use crate::slicing::SlicingStrategy;
use crate::standardize::{Dataset, Standardizer};
use crate::testbed::TestFunction;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapRanges {
    #[serde(rename = "B")]
    pub resamples: usize,
    /// Percentile levels in percent.
    pub percentiles: (f64, f64),
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Eigenvalues of the full-data fit.
    pub point: Vec<f64>,
}

impl BootstrapRanges {
    /// Indices whose point estimate lies outside `[lo, hi]`.
    pub fn uncovered(&self) -> Vec<usize> {
        (0..self.point.len())
            .filter(|&k| self.point[k] < self.lo[k] || self.point[k] > self.hi[k])
            .collect()
    }
}

/// Eigenvalue percentile ranges over `resamples` row bootstraps.
///
/// Every resample is refit from scratch: standardization, slicing and
/// assembly. Resample `b` draws its rows from stream `b + 1` of `seed`.
pub fn bootstrap_eigs(
    data: &Dataset,
    method: Method,
    strategy: SlicingStrategy,
    resamples: usize,
    percentiles: (f64, f64),
    seed: u64,
) -> Result<BootstrapRanges> {
    if resamples == 0 {
        return Err(Error::NoResamples);
    }
    let (plo, phi) = percentiles;
    if !(0.0..=100.0).contains(&plo) || !(0.0..=100.0).contains(&phi) || plo > phi {
        return Err(Error::BadParameter {
            name: "percentiles".into(),
            reason: format!("need 0 ≤ lo ≤ hi ≤ 100, got ({plo}, {phi})"),
        });
    }
    let point: Vec<f64> = fit(data, method, strategy)?.estimate.eigenvalues().iter().copied().collect();
    let n = data.len();

    let draws: Vec<Vec<f64>> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64 + 1);
            let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let est = fit(&data.select_rows(&rows), method, strategy)?;
            Ok(est.estimate.eigenvalues().iter().copied().collect())
        })
        .collect::<Result<_>>()?;

    let m = point.len();
    let mut lo = Vec::with_capacity(m);
    let mut hi = Vec::with_capacity(m);
    let mut column = vec![0.0; resamples];
    for k in 0..m {
        for (c, d) in column.iter_mut().zip(&draws) {
            *c = d[k];
        }
        column.sort_by(f64::total_cmp);
        lo.push(percentile_sorted(&column, plo / 100.0));
        hi.push(percentile_sorted(&column, phi / 100.0));
    }
    Ok(BootstrapRanges {
        resamples,
        percentiles,
        lo,
        hi,
        point,
    })
}

/// Linear interpolation between order statistics at `(n − 1)q`.
fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let below = h.floor() as usize;
    let above = (below + 1).min(sorted.len() - 1);
    sorted[below] + (h - below as f64) * (sorted[above] - sorted[below])
}

/// Index `n` in `1..m` with the largest gap `λₙ − λₙ₊₁`, smallest on ties.
pub fn suggest_dimension(eig: &EigenDecomposition) -> usize {
    let v = &eig.values;
    let mut best = 1;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 1..v.len() {
        let gap = v[k - 1] - v[k];
        if gap > best_gap {
            best = k;
            best_gap = gap;
        }
    }
    best
}

/// Rows `(ŵ₁ᵀzᵢ, …, ŵₙᵀzᵢ, yᵢ)` with `zᵢ` the standardized input.
pub fn summary_coordinates(data: &Dataset, s: &Standardizer, sub: &SubspaceEstimate) -> Result<DMatrix<f64>> {
    if sub.basis.ambient_dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            found: sub.basis.ambient_dim(),
        });
    }
    let proj = s.transform_rows(data.x())? * sub.basis.columns();
    let n = proj.ncols();
    let mut out = proj.insert_column(n, 0.0);
    for (i, &y) in data.y().iter().enumerate() {
        out[(i, n)] = y;
    }
    Ok(out)
}

/// `count` sizes log-evenly spaced from `lo` to `hi`, rounded.
pub fn log_grid(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceConfig {
    pub grid: Vec<usize>,
    pub trials: usize,
    /// Subspace dimension compared against the reference.
    pub n: usize,
    pub method: Method,
    pub strategy: SlicingStrategy,
    pub reference_n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slopes {
    pub eig: f64,
    pub subspace: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub function: String,
    pub method: Method,
    pub n: usize,
    pub seed: u64,
    pub grid: Vec<usize>,
    pub trials: usize,
    pub reference_n: usize,
    pub reference_eigenvalues: Vec<f64>,
    /// `max_k (λ̂ₖ − λₖ)² / λ₁²` per size and trial, against the reference run.
    pub eig_err: Vec<Vec<f64>>,
    /// Distance between the leading `n`-dimensional subspaces.
    pub sub_err: Vec<Vec<f64>>,
    /// Smallest slice count of each trial.
    pub min_slice_count: Vec<Vec<usize>>,
    pub eig_err_mean: Vec<f64>,
    pub sub_err_mean: Vec<f64>,
    pub slopes_defined: bool,
    pub slopes: Option<Slopes>,
}

/// Error decay of one estimator on one test function.
///
/// The reference fit draws from stream 0; trial `t` at grid index `g`
/// draws from stream `1 + g·trials + t`.
pub fn convergence_study(f: &TestFunction, cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    if cfg.grid.is_empty() || cfg.grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::GridNotIncreasing);
    }
    if cfg.trials == 0 {
        return Err(Error::BadParameter {
            name: "trials".into(),
            reason: "at least one trial is needed".into(),
        });
    }
    let largest = *cfg.grid.last().unwrap();
    if cfg.reference_n < 10 * largest {
        return Err(Error::ReferenceTooSmall {
            reference: cfg.reference_n,
            largest,
        });
    }
    let m = f.input_dim();
    if cfg.n == 0 || cfg.n > m {
        return Err(Error::SubspaceDimOutOfRange { n: cfg.n, m });
    }

    let reference = fit(&f.sample_inputs_stream(cfg.reference_n, cfg.seed, 0)?, cfg.method, cfg.strategy)?;
    let ref_values = reference.estimate.eigenvalues().clone();
    let ref_basis = reference.estimate.eig.leading_basis(cfg.n)?;
    let scale = ref_values[0] * ref_values[0];
    if !(scale > 0.0) {
        return Err(Error::InvalidInput("reference moment matrix is zero".into()));
    }

    let g_count = cfg.grid.len();
    let t_count = cfg.trials;
    let cells: Vec<(f64, f64, usize)> = (0..g_count * t_count)
        .into_par_iter()
        .map(|task| {
            let size = cfg.grid[task / t_count];
            let data = f.sample_inputs_stream(size, cfg.seed, 1 + task as u64)?;
            let run = fit(&data, cfg.method, cfg.strategy)?;
            let values = run.estimate.eigenvalues();
            let eig = values
                .iter()
                .zip(ref_values.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .fold(0.0, f64::max)
                / scale;
            let sub = subspace_distance(&run.estimate.eig.leading_basis(cfg.n)?, &ref_basis)?;
            Ok((eig, sub, run.partition.min_count()))
        })
        .collect::<Result<_>>()?;

    let table = |pick: &dyn Fn(&(f64, f64, usize)) -> f64| -> Vec<Vec<f64>> {
        cells.chunks(t_count).map(|row| row.iter().map(pick).collect()).collect()
    };
    let eig_err = table(&|c| c.0);
    let sub_err = table(&|c| c.1);
    let min_slice_count = cells.chunks(t_count).map(|row| row.iter().map(|c| c.2).collect()).collect();
    let mean = |rows: &[Vec<f64>]| -> Vec<f64> { rows.iter().map(|r| r.iter().sum::<f64>() / r.len() as f64).collect() };
    let eig_err_mean = mean(&eig_err);
    let sub_err_mean = mean(&sub_err);

    let slopes = if g_count >= 2 {
        let sizes: Vec<f64> = cfg.grid.iter().map(|&s| s as f64).collect();
        match (loglog_slope(&sizes, &eig_err_mean), loglog_slope(&sizes, &sub_err_mean)) {
            (Some(eig), Some(subspace)) => Some(Slopes { eig, subspace }),
            _ => None,
        }
    } else {
        None
    };

    Ok(ConvergenceReport {
        function: f.name().to_string(),
        method: cfg.method,
        n: cfg.n,
        seed: cfg.seed,
        grid: cfg.grid.clone(),
        trials: t_count,
        reference_n: cfg.reference_n,
        reference_eigenvalues: ref_values.iter().copied().collect(),
        eig_err,
        sub_err,
        min_slice_count,
        eig_err_mean,
        sub_err_mean,
        slopes_defined: slopes.is_some(),
        slopes,
    })
}

/// Least-squares slope of `ln y` against `ln x`; `None` when undefined.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    slope.is_finite().then_some(slope)
}
