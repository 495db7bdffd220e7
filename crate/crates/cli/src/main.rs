use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sieveforest::{
    fit_ar, fit_forest, recursive_forecast, yw_forecast, ArOrder, BenchConfig, BootstrapKind,
    DgpFamily, DgpSpec, ForestConfig, Model, ResampleStrategy, RngStream, TimeSeries,
};

#[derive(Parser)]
#[command(name = "sieveforest", version, about = "Random forest forecasting with AR-sieve and block bootstraps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a series from one of the DGP families.
    Simulate(SimulateArgs),
    /// Fit a Yule-Walker AR model and print it.
    Fit(FitArgs),
    /// Forecast the next values of a series.
    Forecast(ForecastArgs),
    /// Run the Monte Carlo study and write CSV tables.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Input {
    /// Series file, one value per line; `-` or omitted reads stdin.
    input: Option<PathBuf>,
    /// Read this column of a CSV file with a header row instead.
    #[arg(long)]
    column: Option<String>,
}

impl Input {
    fn load(&self) -> Result<TimeSeries> {
        let reader: Box<dyn Read> = match &self.input {
            Some(p) if p != Path::new("-") => Box::new(
                File::open(p).with_context(|| format!("cannot open {}", p.display()))?,
            ),
            _ => Box::new(io::stdin()),
        };
        let series = match &self.column {
            Some(col) => TimeSeries::read_csv_column(reader, col)?,
            None => TimeSeries::read_text(BufReader::new(reader))?,
        };
        Ok(series)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_family)]
    family: DgpFamily,
    /// AR coefficients.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    ar: Vec<f64>,
    /// MA coefficients (minus-sign convention).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    ma: Vec<f64>,
    /// Fractional integration order for ARFIMA.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    #[arg(long, short = 'n', default_value_t = 500)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    burn_in: Option<usize>,
    /// Write to a file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: Input,
    /// Fixed AR order instead of AIC selection.
    #[arg(long, conflicts_with = "p_max")]
    order: Option<usize>,
    /// Largest order considered by AIC.
    #[arg(long)]
    p_max: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Rf,
    Yw,
}

#[derive(Args)]
struct ForecastArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, short = 'H', default_value_t = 1)]
    horizon: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Rf)]
    model: ModelArg,
    /// Per-tree resampling strategy: iid, mbb, nbb, cbb, sbb or arsb.
    #[arg(long, default_value = "arsb", value_parser = parse_kind)]
    bootstrap: BootstrapKind,
    /// Block length (mean length for sbb); default ceil(T^(1/3)).
    #[arg(long)]
    block_length: Option<usize>,
    #[arg(long, default_value_t = 500)]
    trees: usize,
    /// Number of lags; default max(1, AIC order).
    #[arg(long)]
    lags: Option<usize>,
    #[arg(long)]
    mtry: Option<usize>,
    #[arg(long, default_value_t = 5)]
    min_node_size: usize,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print every tree after the forecasts.
    #[arg(long)]
    dump_trees: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML study configuration; omitted means the default study.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Write 0 for fit times so repeated runs give identical files.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
}

fn parse_family(s: &str) -> std::result::Result<DgpFamily, String> {
    DgpFamily::parse(s).map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<BootstrapKind, String> {
    BootstrapKind::parse(s).map_err(|e| e.to_string())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut spec = match args.family {
        DgpFamily::Ar => DgpSpec::ar(&args.ar),
        DgpFamily::Ma => DgpSpec::ma(&args.ma),
        DgpFamily::Arma => DgpSpec::arma(&args.ar, &args.ma),
        DgpFamily::Arima => DgpSpec::arima(&args.ar, &args.ma),
        DgpFamily::Arfima => {
            let d = args.d.context("--d is required for arfima")?;
            DgpSpec::arfima(&args.ar, &args.ma, d)
        }
        DgpFamily::Garch => {
            let alpha0 = args.alpha0.context("--alpha0 is required for garch")?;
            DgpSpec::garch(alpha0, &args.alpha, &args.beta)
        }
    };
    if args.family != DgpFamily::Garch && (args.alpha0.is_some() || !args.alpha.is_empty() || !args.beta.is_empty()) {
        bail!("--alpha0/--alpha/--beta only apply to garch");
    }
    let stray = match args.family {
        DgpFamily::Ar => !args.ma.is_empty(),
        DgpFamily::Ma => !args.ar.is_empty(),
        DgpFamily::Garch => !args.ar.is_empty() || !args.ma.is_empty(),
        _ => false,
    };
    if stray {
        bail!("coefficients given that --family {} does not use", args.family);
    }
    if let Some(b) = args.burn_in {
        spec = spec.with_burn_in(b);
    }
    let series = spec.generate(args.length, &mut RngStream::new(args.seed, 0))?;
    match args.output {
        Some(p) => series.write_text(File::create(&p).with_context(|| format!("cannot create {}", p.display()))?)?,
        None => series.write_text(io::stdout().lock())?,
    }
    Ok(())
}

fn fit(args: FitArgs) -> Result<()> {
    let series = args.input.load()?;
    let order = match (args.order, args.p_max) {
        (Some(p), _) => ArOrder::Fixed(p),
        (None, Some(p)) => ArOrder::AutoUpTo(p),
        (None, None) => ArOrder::Auto,
    };
    print!("{}", fit_ar(&series, order)?);
    Ok(())
}

fn forecast(args: ForecastArgs) -> Result<()> {
    let series = args.input.load()?;
    let mut out = io::stdout().lock();
    match args.model {
        ModelArg::Yw => {
            let fit = fit_ar(&series, ArOrder::Auto)?;
            for v in yw_forecast(&fit, &series, args.horizon)? {
                writeln!(out, "{v}")?;
            }
        }
        ModelArg::Rf => {
            let mut strategy = ResampleStrategy::new(args.bootstrap);
            strategy.block_length = args.block_length;
            let cfg = ForestConfig {
                num_trees: args.trees,
                mtry: args.mtry,
                min_node_size: args.min_node_size,
                max_depth: args.max_depth,
                strategy,
                lag_count: args.lags,
                ..ForestConfig::default()
            };
            let forest = fit_forest(&series, &cfg, &RngStream::new(args.seed, 0))?;
            for v in recursive_forecast(&forest, &series, args.horizon)? {
                writeln!(out, "{v}")?;
            }
            if args.dump_trees {
                write!(out, "{}", forest.dump())?;
            }
        }
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => BenchConfig::from_toml_file(p)?,
        None => BenchConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = args.threads {
        cfg.threads = Some(t);
    }
    if let Some(m) = args.iterations {
        cfg.iterations = m;
    }
    if args.no_timing {
        cfg.record_timing = false;
    }
    cfg.validate()?;
    eprintln!(
        "running {} configurations x {} iterations x {} models",
        cfg.config_count(),
        cfg.iterations,
        cfg.models.len()
    );
    let out = sieveforest::run_benchmark(&cfg)?;
    out.write_to_dir(&args.out_dir)?;
    for table in &out.rank_tables {
        eprintln!("mean ranks, h = {}:", table.horizon);
        let names: Vec<&str> = table.models.iter().map(|m: &Model| m.name()).collect();
        eprintln!("  {:<8} {}", "", names.iter().map(|n| format!("{n:>6}")).collect::<String>());
        let overall = ("Overall".to_string(), table.overall.clone(), 0);
        for (fam, ranks, _) in table.families.iter().chain(std::iter::once(&overall)) {
            eprintln!("  {fam:<8} {}", ranks.iter().map(|r| format!("{r:>6.2}")).collect::<String>());
        }
    }
    if !out.failures.is_empty() {
        eprintln!("{} iterations failed; see failures.csv", out.failures.len());
    }
    eprintln!("wrote {}", args.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit(a),
        Command::Forecast(a) => forecast(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
