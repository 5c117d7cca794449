use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use ridge_sdr::slicing::default_slice_count;
use ridge_sdr::{SlicingKind, SlicingStrategy};
use ridge_sdr_cli::analyze::{with_method_suffix, write_summary_csv};
use ridge_sdr_cli::dataset_io::render_dataset;
use ridge_sdr_cli::json::to_json;
use ridge_sdr_cli::study::{build_function, parse_param, ConvergeArgs};
use ridge_sdr_cli::{read_dataset, run_analyze, run_converge, run_sample, AnalysisConfig, CliError, CliResult, MethodChoice};

#[derive(Parser)]
#[command(name = "ridge-sdr", version, about = "Ridge subspace recovery with SIR and SAVE")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the ridge subspace of a CSV dataset.
    Analyze(AnalyzeArgs),
    /// Same as `analyze`, with bootstrap eigenvalue ranges (B = 200 unless --bootstrap is given).
    Bootstrap(AnalyzeArgs),
    /// Write samples of a built-in test function as CSV.
    Sample(SampleArgs),
    /// Monte Carlo convergence study on a built-in test function.
    Converge(ConvergeCli),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV with header x1,...,xm,y.
    #[arg(long)]
    input: PathBuf,
    /// Result JSON path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// sir, save or both.
    #[arg(long, default_value = "both")]
    method: String,
    /// Number of slices; min(20, max(2, N / max(2m, 10))) when omitted.
    #[arg(long)]
    slices: Option<usize>,
    /// equal-count or equal-width.
    #[arg(long, default_value = "equal-count")]
    slicing: String,
    /// Subspace dimension; the largest eigenvalue gap decides when omitted.
    #[arg(long)]
    dim: Option<usize>,
    /// Number of bootstrap resamples.
    #[arg(long)]
    bootstrap: Option<usize>,
    /// Lower and upper percentile of the bootstrap ranges.
    #[arg(long, default_value = "2.5,97.5")]
    percentiles: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Write summary-plot coordinates w1,...,wn,y here.
    #[arg(long)]
    summary_csv: Option<PathBuf>,
}

#[derive(Args)]
struct FunctionArgs {
    /// quad1d, quad3d, product, shifted_product, bullseye, linear or hartmann_log.
    #[arg(long)]
    function: String,
    /// Function parameter as name=value; vectors are comma separated.
    #[arg(long = "param")]
    params: Vec<String>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Number of samples.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeCli {
    #[command(flatten)]
    function: FunctionArgs,
    /// Increasing sample sizes, comma separated.
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Subspace dimension compared; the oracle dimension when omitted.
    #[arg(long)]
    dim: Option<usize>,
    /// sir, save or both.
    #[arg(long, default_value = "sir")]
    method: String,
    /// Sample size of the reference run; 10 × the largest grid size when omitted.
    #[arg(long)]
    reference_n: Option<usize>,
    #[arg(long)]
    slices: Option<usize>,
    #[arg(long, default_value = "equal-count")]
    slicing: String,
    #[arg(long)]
    seed: u64,
    /// Report JSON path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => return fail(&CliError::Usage(e.to_string().trim().to_string())),
    };
    let result = match cli.command {
        Command::Analyze(args) => analyze(args, None),
        Command::Bootstrap(args) => analyze(args, Some(200)),
        Command::Sample(args) => sample(args),
        Command::Converge(args) => converge(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::FAILURE
}

fn emit(output: Option<&Path>, text: &[u8]) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout().write_all(text).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn parse_slicing(s: &str) -> CliResult<SlicingKind> {
    Ok(s.parse::<SlicingKind>()?)
}

fn parse_percentiles(s: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Usage(format!("--percentiles expects lo,hi, got `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn analyze(args: AnalyzeArgs, default_bootstrap: Option<usize>) -> CliResult<()> {
    let config = AnalysisConfig {
        method: args.method.parse::<MethodChoice>()?,
        slicing: parse_slicing(&args.slicing)?,
        slices: args.slices,
        dim: args.dim,
        bootstrap: args.bootstrap.or(default_bootstrap),
        percentiles: parse_percentiles(&args.percentiles)?,
        seed: args.seed,
    };
    let data = read_dataset(&args.input)?;
    let analyses = run_analyze(&config, &data)?;

    for a in &analyses {
        for w in &a.document.warnings {
            eprintln!("warning ({}): {w}", a.document.method);
        }
    }
    if let Some(path) = &args.summary_csv {
        for a in &analyses {
            let target = if analyses.len() > 1 {
                with_method_suffix(path, a.document.method)
            } else {
                path.clone()
            };
            write_summary_csv(&target, &a.summary)?;
        }
    }
    let text = match analyses.as_slice() {
        [single] => to_json(&single.document),
        many => to_json(&many.iter().map(|a| &a.document).collect::<Vec<_>>()),
    };
    emit(args.output.as_deref(), text.as_bytes())
}

fn function_from(args: &FunctionArgs) -> CliResult<ridge_sdr::TestFunction> {
    let params = args.params.iter().map(|p| parse_param(p)).collect::<CliResult<Vec<_>>>()?;
    build_function(&args.function, &params)
}

fn sample(args: SampleArgs) -> CliResult<()> {
    let f = function_from(&args.function)?;
    match &args.output {
        Some(path) => run_sample(&f, args.n, args.seed, path),
        None => {
            let data = f.sample_inputs(args.n, args.seed)?;
            let mut buf = Vec::new();
            render_dataset(&mut buf, &data).map_err(|e| CliError::io("<stdout>", e))?;
            emit(None, &buf)
        }
    }
}

fn converge(args: ConvergeCli) -> CliResult<()> {
    let f = function_from(&args.function)?;
    let grid = args
        .grid
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("--grid expects comma-separated sizes, got `{}`", args.grid)))?;
    let largest = grid.iter().copied().max().unwrap_or(0);
    let n = match args.dim {
        Some(n) => n,
        None => f
            .oracle_subspace()
            .basis
            .map(|b| b.dim())
            .ok_or_else(|| CliError::Usage("--dim is required for this function".into()))?,
    };
    let smallest = grid.iter().copied().min().unwrap_or(0);
    let strategy = SlicingStrategy {
        kind: parse_slicing(&args.slicing)?,
        requested: args.slices.unwrap_or_else(|| default_slice_count(smallest, f.input_dim())),
    };
    let study = ConvergeArgs {
        grid,
        trials: args.trials,
        n,
        methods: args.method.parse::<MethodChoice>()?.methods(),
        strategy,
        reference_n: args.reference_n.unwrap_or(10 * largest),
        seed: args.seed,
    };
    let reports = run_converge(&f, &study)?;
    let text = match reports.as_slice() {
        [single] => to_json(single),
        many => to_json(many),
    };
    emit(args.output.as_deref(), text.as_bytes())
}
