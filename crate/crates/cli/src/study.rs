//! Testbed sampling and convergence studies.

use std::path::Path;

use ridge_sdr::{convergence_study, ConvergenceConfig, ConvergenceReport, Method, SlicingStrategy, TestFunction};

use crate::dataset_io::write_dataset;
use crate::error::{CliError, CliResult};

/// Splits `name=value`.
pub fn parse_param(raw: &str) -> CliResult<(String, String)> {
    match raw.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(CliError::Usage(format!("parameter `{raw}` is not of the form name=value"))),
    }
}

pub fn build_function(name: &str, params: &[(String, String)]) -> CliResult<TestFunction> {
    Ok(TestFunction::from_params(name, params)?)
}

/// Draws `n` samples of `function` and writes them as CSV.
pub fn run_sample(function: &TestFunction, n: usize, seed: u64, out: &Path) -> CliResult<()> {
    let data = function.sample_inputs(n, seed)?;
    write_dataset(out, &data)
}

pub struct ConvergeArgs {
    pub grid: Vec<usize>,
    pub trials: usize,
    pub n: usize,
    pub methods: Vec<Method>,
    pub strategy: SlicingStrategy,
    pub reference_n: usize,
    pub seed: u64,
}

pub fn run_converge(function: &TestFunction, args: &ConvergeArgs) -> CliResult<Vec<ConvergenceReport>> {
    args.methods
        .iter()
        .map(|&method| {
            let cfg = ConvergenceConfig {
                grid: args.grid.clone(),
                trials: args.trials,
                n: args.n,
                method,
                strategy: args.strategy,
                reference_n: args.reference_n,
                seed: args.seed,
            };
            Ok(convergence_study(function, &cfg)?)
        })
        .collect()
}
