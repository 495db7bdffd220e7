//! Monte Carlo forecasting study: simulate, fit every model on the same
//! training series, score held-out horizons, and summarize.

mod config;
mod summary;

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::ar_sieve::{default_max_order, fit_ar, select_order_aic, yw_forecast, ArOrder};
use crate::block_bootstrap::{BootstrapKind, ResampleStrategy};
use crate::dgp::DgpSpec;
use crate::error::{Error, Result};
use crate::forecast::recursive_forecast;
use crate::forest::{fit_forest, ForestConfig};
use crate::series::{RngStream, RNG_ALGORITHM};

pub use summary::{median_mse, rank_models, MedianRow, RankTable, RuntimeTable};

/// Forecasting model compared in the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Forest(BootstrapKind),
    YuleWalker,
}

impl Model {
    /// The six forest variants followed by the Yule-Walker baseline.
    pub fn all() -> Vec<Model> {
        BootstrapKind::ALL
            .iter()
            .map(|k| Model::Forest(*k))
            .chain(std::iter::once(Model::YuleWalker))
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Forest(k) => k.name(),
            Model::YuleWalker => "YW",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("yw") {
            Ok(Model::YuleWalker)
        } else {
            BootstrapKind::parse(s).map(Model::Forest)
        }
    }

    fn stream_code(self) -> u64 {
        match self {
            Model::Forest(k) => 100 + BootstrapKind::ALL.iter().position(|x| *x == k).unwrap() as u64,
            Model::YuleWalker => 199,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub dgp_specs: Vec<DgpSpec>,
    pub sizes: Vec<usize>,
    pub iterations: usize,
    pub horizons: Vec<usize>,
    pub models: Vec<Model>,
    pub master_seed: u64,
    /// Template for every forest; the strategy kind is set per model.
    pub forest: ForestConfig,
    /// Block length for MBB/NBB/CBB and mean block length for SBB;
    /// `None` means `ceil(T^(1/3))`.
    pub block_length: Option<usize>,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
    /// When false, `fit_seconds` is written as 0 so outputs are reproducible
    /// byte for byte.
    pub record_timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            dgp_specs: DgpSpec::benchmark_suite(),
            sizes: vec![100, 500, 1000],
            iterations: 200,
            horizons: vec![1, 5],
            models: Model::all(),
            master_seed: 42,
            forest: ForestConfig {
                parallel: false,
                ..ForestConfig::default()
            },
            block_length: None,
            threads: None,
            record_timing: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.dgp_specs.is_empty() || self.sizes.is_empty() {
            return Err(Error::Config("at least one DGP and one size are required".into()));
        }
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::Config("horizons must be a nonempty list of positive integers".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        if has_duplicates(&self.horizons) || has_duplicates(&self.models) {
            return Err(Error::Config("horizons and strategies must not repeat".into()));
        }
        if self.block_length == Some(0) {
            return Err(Error::Config("block_length must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        for spec in &self.dgp_specs {
            spec.validate().map_err(|e| e.context(format!("dgp {spec}")))?;
        }
        for &t in &self.sizes {
            // AIC needs 2 * p_max < T, and the forest needs T > L + min_node_size
            if t < 20 {
                return Err(Error::Config(format!("series length {t} is too short (minimum 20)")));
            }
        }
        Ok(())
    }

    /// Number of (spec, size) configurations.
    pub fn config_count(&self) -> usize {
        self.dgp_specs.len() * self.sizes.len()
    }

    fn configurations(&self) -> Vec<(&DgpSpec, usize)> {
        self.dgp_specs
            .iter()
            .flat_map(|s| self.sizes.iter().map(move |&t| (s, t)))
            .collect()
    }
}

fn has_duplicates<T: PartialEq>(v: &[T]) -> bool {
    v.iter().enumerate().any(|(i, a)| v[..i].contains(a))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub config_index: usize,
    pub dgp_family: String,
    pub dgp_params: String,
    pub series_len: usize,
    pub model: Model,
    /// Position of `model` in the configured model list.
    pub model_index: usize,
    pub iteration: usize,
    pub horizon: usize,
    pub squared_error: f64,
    pub fit_seconds: f64,
    pub selected_order: usize,
}

/// Settings shared by every iteration of a study.
#[derive(Debug, Clone)]
pub struct IterationSettings<'a> {
    pub models: &'a [Model],
    pub horizons: &'a [usize],
    pub forest: &'a ForestConfig,
    pub block_length: Option<usize>,
    pub record_timing: bool,
}

/// One Monte Carlo iteration: generates `T + max(h)` observations, trains
/// every model on the first `T` and scores each requested horizon.
///
/// The series comes from `rng.substream(0)`; model `m` draws from its own
/// substream, so adding or removing a model leaves the others unchanged.
pub fn run_iteration(
    spec: &DgpSpec,
    series_len: usize,
    settings: &IterationSettings<'_>,
    rng: &RngStream,
) -> Result<Vec<BenchRecord>> {
    run_iteration_inner(spec, series_len, settings, rng, 0, 0)
        .map_err(|e| e.context(format!("{spec}, T={series_len}")))
}

fn run_iteration_inner(
    spec: &DgpSpec,
    series_len: usize,
    settings: &IterationSettings<'_>,
    rng: &RngStream,
    config_index: usize,
    iteration: usize,
) -> Result<Vec<BenchRecord>> {
    let h_max = *settings
        .horizons
        .iter()
        .max()
        .ok_or_else(|| Error::invalid("at least one horizon is required"))?;
    if settings.horizons.contains(&0) {
        return Err(Error::invalid("horizons must be positive"));
    }
    let full = spec.generate(series_len + h_max, &mut rng.substream(0))?;
    let train = full.head(series_len)?;
    let truth = &full.values()[series_len..];

    let p_max = default_max_order(series_len);
    let order = select_order_aic(&train, p_max)?;
    let lags = order.max(1);

    let dgp_family = spec.family.name().to_string();
    let dgp_params = spec.params_label();
    let mut records = Vec::with_capacity(settings.models.len() * settings.horizons.len());
    for (model_index, &model) in settings.models.iter().enumerate() {
        let model_rng = rng.substream(model.stream_code());
        let start = Instant::now();
        let forecasts = match model {
            Model::Forest(kind) => {
                let mut strategy = ResampleStrategy::new(kind);
                strategy.block_length = settings.block_length;
                let cfg = ForestConfig {
                    strategy,
                    lag_count: Some(lags),
                    ar_order: ArOrder::AutoUpTo(p_max),
                    ..settings.forest.clone()
                };
                let forest = fit_forest(&train, &cfg, &model_rng)?;
                let elapsed = start.elapsed();
                (recursive_forecast(&forest, &train, h_max)?, elapsed)
            }
            Model::YuleWalker => {
                let fit = fit_ar(&train, ArOrder::AutoUpTo(p_max))?;
                let elapsed = start.elapsed();
                (yw_forecast(&fit, &train, h_max)?, elapsed)
            }
        };
        let (path, elapsed) = forecasts;
        let fit_seconds = if settings.record_timing {
            elapsed.as_secs_f64()
        } else {
            0.0
        };
        for &h in settings.horizons {
            let err = path[h - 1] - truth[h - 1];
            records.push(BenchRecord {
                config_index,
                dgp_family: dgp_family.clone(),
                dgp_params: dgp_params.clone(),
                series_len,
                model,
                model_index,
                iteration,
                horizon: h,
                squared_error: err * err,
                fit_seconds,
                selected_order: order,
            });
        }
    }
    Ok(records)
}

/// An iteration that raised an error and was left out of the summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub config_index: usize,
    pub dgp: String,
    pub series_len: usize,
    pub iteration: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub config: BenchConfig,
    pub records: Vec<BenchRecord>,
    pub failures: Vec<Failure>,
    pub medians: Vec<MedianRow>,
    /// One table per horizon, in configured order.
    pub rank_tables: Vec<RankTable>,
    pub runtime: RuntimeTable,
}

/// Runs every (spec, size, iteration) task. Iteration `i` of configuration
/// `c` uses `master.substream(c).substream(i)`, and results are collected in
/// task order, so output does not depend on the thread count.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchOutput> {
    cfg.validate()?;
    let master = RngStream::new(cfg.master_seed, 0);
    let configs = cfg.configurations();
    let tasks: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|c| (0..cfg.iterations).map(move |i| (c, i)))
        .collect();
    let settings = IterationSettings {
        models: &cfg.models,
        horizons: &cfg.horizons,
        forest: &cfg.forest,
        block_length: cfg.block_length,
        record_timing: cfg.record_timing,
    };
    let run = |&(c, i): &(usize, usize)| {
        let (spec, t) = configs[c];
        let rng = master.substream(c as u64).substream(i as u64);
        run_iteration_inner(spec, t, &settings, &rng, c, i)
    };
    let results: Vec<Result<Vec<BenchRecord>>> = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| tasks.par_iter().map(run).collect()),
        None => tasks.par_iter().map(run).collect(),
    };

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (&(c, i), res) in tasks.iter().zip(results) {
        match res {
            Ok(r) => records.extend(r),
            Err(e) => failures.push(Failure {
                config_index: c,
                dgp: configs[c].0.to_string(),
                series_len: configs[c].1,
                iteration: i,
                message: e.to_string(),
            }),
        }
    }
    let medians = summary::median_table(&records)?;
    let rank_tables = summary::rank_tables(&medians, &cfg.models, &cfg.horizons);
    let runtime = summary::runtime_table(&records, &cfg.models);
    Ok(BenchOutput {
        config: cfg.clone(),
        records,
        failures,
        medians,
        rank_tables,
        runtime,
    })
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

impl BenchOutput {
    pub fn records_csv(&self) -> Result<String> {
        csv_string(
            &[
                "dgp_family",
                "dgp_params",
                "T",
                "strategy",
                "iteration",
                "horizon",
                "squared_error",
                "fit_seconds",
                "selected_order",
            ],
            self.records.iter().map(|r| {
                vec![
                    r.dgp_family.clone(),
                    r.dgp_params.clone(),
                    r.series_len.to_string(),
                    r.model.name().to_string(),
                    r.iteration.to_string(),
                    r.horizon.to_string(),
                    r.squared_error.to_string(),
                    r.fit_seconds.to_string(),
                    r.selected_order.to_string(),
                ]
            }),
        )
    }

    pub fn medians_csv(&self) -> Result<String> {
        csv_string(
            &["dgp_family", "dgp_params", "T", "horizon", "strategy", "median_mse", "iterations"],
            self.medians.iter().map(|m| {
                vec![
                    m.dgp_family.clone(),
                    m.dgp_params.clone(),
                    m.series_len.to_string(),
                    m.horizon.to_string(),
                    m.model.name().to_string(),
                    m.median_mse.to_string(),
                    m.iterations.to_string(),
                ]
            }),
        )
    }

    /// Long format: one row per (horizon, family or "Overall", strategy).
    pub fn ranks_csv(&self) -> Result<String> {
        let mut rows = Vec::new();
        for t in &self.rank_tables {
            let n_all = t.config_ranks.len();
            let groups = t
                .families
                .iter()
                .map(|(f, r, n)| (f.as_str(), r, *n))
                .chain(std::iter::once(("Overall", &t.overall, n_all)));
            for (family, ranks, n) in groups {
                for (m, r) in t.models.iter().zip(ranks) {
                    rows.push(vec![
                        t.horizon.to_string(),
                        family.to_string(),
                        m.name().to_string(),
                        r.to_string(),
                        n.to_string(),
                    ]);
                }
            }
        }
        csv_string(&["horizon", "dgp_family", "strategy", "mean_rank", "configurations"], rows)
    }

    pub fn runtime_csv(&self) -> Result<String> {
        let t = &self.runtime;
        let rows = t
            .families
            .iter()
            .map(|(f, p, s)| (f.as_str(), *p, s))
            .chain(std::iter::once(("Overall", t.overall_order, &t.overall_seconds)))
            .flat_map(|(family, p, secs)| {
                t.models.iter().zip(secs).map(move |(m, s)| {
                    vec![family.to_string(), p.to_string(), m.name().to_string(), s.to_string()]
                })
            })
            .collect::<Vec<_>>();
        csv_string(&["dgp_family", "mean_selected_order", "strategy", "mean_fit_seconds"], rows)
    }

    pub fn failures_csv(&self) -> Result<String> {
        csv_string(
            &["dgp", "T", "iteration", "error"],
            self.failures.iter().map(|f| {
                vec![
                    f.dgp.clone(),
                    f.series_len.to_string(),
                    f.iteration.to_string(),
                    f.message.clone(),
                ]
            }),
        )
    }

    pub fn metadata(&self) -> String {
        let c = &self.config;
        let f = &c.forest;
        let opt = |v: Option<usize>, default: &str| v.map_or(default.to_string(), |x| x.to_string());
        let list = |v: Vec<String>| v.join(",");
        format!(
            "rng = {RNG_ALGORITHM}\n\
             master_seed = {}\n\
             stream_layout = master.substream(config).substream(iteration); series=substream(0); model=substream(100+k)\n\
             iterations = {}\n\
             sizes = {}\n\
             horizons = {}\n\
             strategies = {}\n\
             configurations = {}\n\
             block_length = {}\n\
             lag_count = max(1, AIC order of the training series)\n\
             num_trees = {}\n\
             mtry = {}\n\
             min_node_size = {}\n\
             max_depth = {}\n\
             arsb_burn_in = {}\n\
             record_timing = {}\n\
             records = {}\n\
             failures = {}\n",
            c.master_seed,
            c.iterations,
            list(c.sizes.iter().map(|x| x.to_string()).collect()),
            list(c.horizons.iter().map(|x| x.to_string()).collect()),
            list(c.models.iter().map(|m| m.name().to_string()).collect()),
            c.config_count(),
            opt(c.block_length, "ceil(T^(1/3))"),
            f.num_trees,
            opt(f.mtry, "max(1, floor(L/3))"),
            f.min_node_size,
            opt(f.max_depth, "unlimited"),
            f.arsb_burn_in,
            c.record_timing,
            self.records.len(),
            self.failures.len(),
        )
    }

    /// Writes records, medians, ranks, runtime, failures and metadata files.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("records.csv"), self.records_csv()?)?;
        fs::write(dir.join("medians.csv"), self.medians_csv()?)?;
        fs::write(dir.join("ranks.csv"), self.ranks_csv()?)?;
        fs::write(dir.join("runtime.csv"), self.runtime_csv()?)?;
        fs::write(dir.join("failures.csv"), self.failures_csv()?)?;
        fs::write(dir.join("metadata.txt"), self.metadata())?;
        Ok(())
    }

    /// Copy with every `fit_seconds` set to 0, the deterministic part of a
    /// timed run.
    pub fn without_timing(&self) -> BenchOutput {
        let mut out = self.clone();
        out.config.record_timing = false;
        for r in &mut out.records {
            r.fit_seconds = 0.0;
        }
        out.runtime = summary::runtime_table(&out.records, &out.config.models);
        out
    }

    pub fn rank_table(&self, horizon: usize) -> Option<&RankTable> {
        self.rank_tables.iter().find(|t| t.horizon == horizon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(models: Vec<Model>, horizons: Vec<usize>) -> BenchConfig {
        BenchConfig {
            dgp_specs: vec![DgpSpec::ar(&[0.5])],
            sizes: vec![60],
            iterations: 2,
            horizons,
            models,
            master_seed: 7,
            forest: ForestConfig {
                num_trees: 10,
                parallel: false,
                ..ForestConfig::default()
            },
            ..BenchConfig::default()
        }
    }

    #[test]
    fn record_cardinality() {
        let cfg = small(vec![Model::Forest(BootstrapKind::Iid), Model::YuleWalker], vec![1, 2]);
        let out = run_benchmark(&cfg).unwrap();
        assert_eq!(out.records.len(), 8);
        assert!(out.failures.is_empty());
        for r in &out.records {
            assert!(r.squared_error >= 0.0);
            if matches!(r.model, Model::Forest(_)) {
                assert!(r.fit_seconds > 0.0);
            }
        }
    }

    #[test]
    fn yw_on_white_noise_has_chi_square_median() {
        let spec = DgpSpec::ar(&[0.0]);
        let forest = ForestConfig::default();
        let settings = IterationSettings {
            models: &[Model::YuleWalker],
            horizons: &[1],
            forest: &forest,
            block_length: None,
            record_timing: false,
        };
        let master = RngStream::new(11, 0);
        let errs: Vec<f64> = (0..1000)
            .map(|i| run_iteration(&spec, 100, &settings, &master.substream(i)).unwrap()[0].squared_error)
            .collect();
        // median of chi-square with one degree of freedom
        let oracle = 0.454_936_423_119_572_7;
        let m = median_mse(&errs).unwrap();
        assert!((m - oracle).abs() < 0.1, "{m}");
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let mut cfg = small(Model::all(), vec![1, 3]);
        cfg.record_timing = false;
        cfg.threads = Some(1);
        let a = run_benchmark(&cfg).unwrap();
        cfg.threads = Some(3);
        let b = run_benchmark(&cfg).unwrap();
        assert_eq!(a.records_csv().unwrap(), b.records_csv().unwrap());
        assert_eq!(a.ranks_csv().unwrap(), b.ranks_csv().unwrap());
        assert_eq!(a.medians_csv().unwrap(), b.medians_csv().unwrap());
    }

    #[test]
    fn models_train_on_identical_series() {
        let cfg = small(Model::all(), vec![1]);
        let out = run_benchmark(&cfg).unwrap();
        for it in 0..2 {
            let orders: Vec<usize> = out
                .records
                .iter()
                .filter(|r| r.iteration == it)
                .map(|r| r.selected_order)
                .collect();
            assert!(orders.windows(2).all(|w| w[0] == w[1]));
        }
        // removing a model does not perturb the others
        let sub = run_benchmark(&small(vec![Model::Forest(BootstrapKind::Mbb)], vec![1])).unwrap();
        let full_mbb: Vec<f64> = out
            .records
            .iter()
            .filter(|r| r.model == Model::Forest(BootstrapKind::Mbb))
            .map(|r| r.squared_error)
            .collect();
        let sub_mbb: Vec<f64> = sub.records.iter().map(|r| r.squared_error).collect();
        assert_eq!(full_mbb, sub_mbb);
    }

    #[test]
    fn rank_table_layout() {
        let mut cfg = small(Model::all(), vec![1]);
        cfg.dgp_specs = vec![DgpSpec::ar(&[0.5]), DgpSpec::ma(&[0.4])];
        let out = run_benchmark(&cfg).unwrap();
        let t = out.rank_table(1).unwrap();
        assert_eq!(t.models.len(), 7);
        assert_eq!(t.families.len(), 2);
        let m = 7.0;
        for (_, ranks) in &t.config_ranks {
            assert!((ranks.iter().sum::<f64>() - m * (m + 1.0) / 2.0).abs() < 1e-9);
        }
        let csv = out.ranks_csv().unwrap();
        assert_eq!(csv.lines().count(), 1 + 7 * 3);
        assert!(out.runtime.family_order("AR").is_some());
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        // L + min_node_size >= T makes every forest fit fail
        let mut cfg = small(vec![Model::Forest(BootstrapKind::Iid)], vec![1]);
        cfg.forest.min_node_size = 100;
        let out = run_benchmark(&cfg).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.failures.len(), 2);
        assert!(out.failures_csv().unwrap().lines().count() == 3);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = small(Model::all(), vec![1]);
        cfg.iterations = 0;
        assert!(run_benchmark(&cfg).is_err());
        let cfg = small(vec![], vec![1]);
        assert!(cfg.validate().is_err());
        let cfg = small(Model::all(), vec![0]);
        assert!(cfg.validate().is_err());
    }
}
