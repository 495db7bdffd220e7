//! Random forest regression on lag-embedded series with a pluggable
//! per-tree bootstrap.
//!
//! Index strategies (IID and the block bootstraps) resample rows of the
//! embedded training matrix, so every tree sees rows of the original data.
//! The AR-sieve strategy instead fits one AR model to the training series,
//! simulates a fresh series of the same length per tree and embeds that.

mod embed;
mod tree;

pub use embed::{lag_embed, EmbeddedData};
pub use tree::{best_split, Node, SplitCandidate, Tree};

use rand::Rng;
use rayon::prelude::*;

use crate::ar_sieve::{
    arsb_resample_with_burn_in, default_max_order, fit_ar, select_order_aic, ArFit, ArOrder,
    DEFAULT_ARSB_BURN_IN,
};
use crate::block_bootstrap::{BootstrapKind, ResampleStrategy};
use crate::error::{Error, Result};
use crate::series::{sample_mean, RngStream, TimeSeries};
use tree::{grow_tree, GrowParams};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestConfig {
    pub num_trees: usize,
    /// Candidate features per split; `None` means `max(1, ⌊L/3⌋)`.
    pub mtry: Option<usize>,
    pub min_node_size: usize,
    pub max_depth: Option<usize>,
    pub strategy: ResampleStrategy,
    /// Number of lags `L`; `None` means `max(1, AIC order)` of the series.
    pub lag_count: Option<usize>,
    /// Order rule for the AR-sieve fit.
    pub ar_order: ArOrder,
    pub arsb_burn_in: usize,
    /// Grow trees on the rayon pool. Results do not depend on this flag.
    pub parallel: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            num_trees: 500,
            mtry: None,
            min_node_size: 5,
            max_depth: None,
            strategy: ResampleStrategy::new(BootstrapKind::Iid),
            lag_count: None,
            ar_order: ArOrder::Auto,
            arsb_burn_in: DEFAULT_ARSB_BURN_IN,
            parallel: true,
        }
    }
}

impl ForestConfig {
    pub fn with_strategy(mut self, strategy: ResampleStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn resolved_mtry(&self, lag_count: usize) -> usize {
        self.mtry.unwrap_or((lag_count / 3).max(1))
    }

    fn grow_params(&self, lag_count: usize) -> Result<GrowParams> {
        let mtry = self.resolved_mtry(lag_count);
        if mtry == 0 || mtry > lag_count {
            return Err(Error::invalid(format!(
                "mtry must lie in 1..={lag_count}, got {mtry}"
            )));
        }
        if self.min_node_size == 0 {
            return Err(Error::invalid("min_node_size must be at least 1"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::invalid("max_depth must be at least 1"));
        }
        Ok(GrowParams {
            mtry,
            min_node_size: self.min_node_size,
            max_depth: self.max_depth,
        })
    }
}

/// The training sample of one tree.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeSample {
    /// 0-based rows of the original embedded data, with repeats.
    Rows(Vec<usize>),
    /// Embedding of a freshly simulated AR-sieve series.
    Generated(EmbeddedData),
}

impl TreeSample {
    /// Training targets in sample order.
    pub fn targets(&self, data: &EmbeddedData) -> Vec<f64> {
        match self {
            TreeSample::Rows(rows) => rows.iter().map(|&i| data.targets()[i]).collect(),
            TreeSample::Generated(g) => g.targets().to_vec(),
        }
    }

    /// Predictor rows in sample order.
    pub fn rows<'a>(&'a self, data: &'a EmbeddedData) -> Vec<&'a [f64]> {
        match self {
            TreeSample::Rows(rows) => rows.iter().map(|&i| data.row(i)).collect(),
            TreeSample::Generated(g) => g.rows().collect(),
        }
    }
}

/// Draws the training sample for one tree. Consumes `rng` exactly as the
/// first stage of [`fit_tree`] does.
pub fn draw_tree_sample<R: Rng + ?Sized>(
    data: &EmbeddedData,
    config: &ForestConfig,
    series: &TimeSeries,
    fit: Option<&ArFit>,
    rng: &mut R,
) -> Result<TreeSample> {
    match config.strategy.kind {
        BootstrapKind::Arsb => {
            let fit = fit.ok_or_else(|| Error::invalid("ARSB strategy requires an AR fit"))?;
            let boot = arsb_resample_with_burn_in(fit, series.len(), config.arsb_burn_in, rng)?;
            Ok(TreeSample::Generated(lag_embed(&boot, data.lag_count())?))
        }
        _ => Ok(TreeSample::Rows(
            config.strategy.sample_rows(data.len(), series.len(), rng)?,
        )),
    }
}

/// Resamples according to `config.strategy` and grows one tree.
pub fn fit_tree<R: Rng + ?Sized>(
    data: &EmbeddedData,
    config: &ForestConfig,
    series: &TimeSeries,
    fit: Option<&ArFit>,
    rng: &mut R,
) -> Result<Tree> {
    if data.is_empty() {
        return Err(Error::invalid("cannot grow a tree on zero rows"));
    }
    let params = config.grow_params(data.lag_count())?;
    let sample = draw_tree_sample(data, config, series, fit, rng)?;
    Ok(match &sample {
        TreeSample::Rows(rows) => grow_tree(data, Some(rows), params, rng),
        TreeSample::Generated(g) => grow_tree(g, None, params, rng),
    })
}

#[derive(Debug, Clone)]
pub struct Forest {
    trees: Vec<Tree>,
    config: ForestConfig,
    lag_count: usize,
    training_mean: f64,
    ar_fit: Option<ArFit>,
}

/// `max(1, AIC order)` lag rule shared by every strategy.
pub fn default_lag_count(series: &TimeSeries) -> Result<usize> {
    Ok(select_order_aic(series, default_max_order(series.len()))?.max(1))
}

/// Fits `config.num_trees` trees; tree `i` uses `rng.substream(i)`.
pub fn fit_forest(series: &TimeSeries, config: &ForestConfig, rng: &RngStream) -> Result<Forest> {
    if config.num_trees == 0 {
        return Err(Error::invalid("num_trees must be at least 1"));
    }
    let ar_fit = match config.strategy.kind {
        BootstrapKind::Arsb => Some(fit_ar(series, config.ar_order)?),
        _ => None,
    };
    let lag_count = match (config.lag_count, &ar_fit) {
        (Some(l), _) => l,
        (None, Some(fit)) => fit.order.max(1),
        (None, None) => default_lag_count(series)?,
    };
    if series.len() <= lag_count + config.min_node_size {
        return Err(Error::TooShort {
            len: series.len(),
            reason: format!(
                "forest needs more than L + min_node_size = {} observations",
                lag_count + config.min_node_size
            ),
        });
    }
    let data = lag_embed(series, lag_count)?;
    config.grow_params(lag_count)?;

    let build = |i: usize| -> Result<Tree> {
        let mut tree_rng = rng.substream(i as u64);
        let mut tree = fit_tree(&data, config, series, ar_fit.as_ref(), &mut tree_rng)?;
        tree.id = i;
        Ok(tree)
    };
    let trees: Result<Vec<Tree>> = if config.parallel {
        (0..config.num_trees).into_par_iter().map(build).collect()
    } else {
        (0..config.num_trees).map(build).collect()
    };

    Ok(Forest {
        trees: trees?,
        config: config.clone(),
        lag_count,
        training_mean: sample_mean(series.values())?,
        ar_fit,
    })
}

impl Forest {
    /// Assembles a forest from trees whose ids are a permutation of `0..len`.
    pub fn from_trees(trees: Vec<Tree>, config: ForestConfig, lag_count: usize) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::invalid("forest needs at least one tree"));
        }
        let mut seen = vec![false; trees.len()];
        for t in &trees {
            if t.id >= trees.len() || std::mem::replace(&mut seen[t.id], true) {
                return Err(Error::invalid(format!("tree id {} is out of range or repeated", t.id)));
            }
        }
        Ok(Self {
            trees,
            config,
            lag_count,
            training_mean: f64::NAN,
            ar_fit: None,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn into_trees(self) -> Vec<Tree> {
        self.trees
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn lag_count(&self) -> usize {
        self.lag_count
    }

    pub fn training_mean(&self) -> f64 {
        self.training_mean
    }

    /// The shared AR fit of an ARSB forest.
    pub fn ar_fit(&self) -> Option<&ArFit> {
        self.ar_fit.as_ref()
    }

    fn check_dim(&self, lag_vector: &[f64]) -> Result<()> {
        if lag_vector.len() != self.lag_count {
            return Err(Error::Dimension {
                expected: self.lag_count,
                actual: lag_vector.len(),
            });
        }
        Ok(())
    }

    /// Per-tree predictions ordered by tree id.
    pub fn tree_predictions(&self, lag_vector: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(lag_vector)?;
        let mut out = vec![0.0; self.trees.len()];
        for t in &self.trees {
            out[t.id] = t.predict(lag_vector);
        }
        Ok(out)
    }

    /// Mean of the tree predictions; `lag_vector[0]` is the most recent value.
    pub fn predict(&self, lag_vector: &[f64]) -> Result<f64> {
        let preds = self.tree_predictions(lag_vector)?;
        Ok(preds.iter().sum::<f64>() / preds.len() as f64)
    }

    /// Text dump of every tree.
    pub fn dump(&self) -> String {
        let mut ordered: Vec<&Tree> = self.trees.iter().collect();
        ordered.sort_by_key(|t| t.id);
        ordered.iter().map(|t| t.to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::DgpSpec;
    use crate::series::sample_acvf;

    fn ar1(phi: f64, len: usize, seed: u64) -> TimeSeries {
        DgpSpec::ar(&[phi]).generate(len, &mut RngStream::new(seed, 0)).unwrap()
    }

    fn small(kind: BootstrapKind, trees: usize) -> ForestConfig {
        ForestConfig {
            num_trees: trees,
            strategy: ResampleStrategy::new(kind),
            ..ForestConfig::default()
        }
    }

    #[test]
    fn config_defaults() {
        let c = ForestConfig::default();
        assert_eq!(c.num_trees, 500);
        assert_eq!(c.min_node_size, 5);
        assert_eq!(c.max_depth, None);
        assert_eq!(c.resolved_mtry(1), 1);
        assert_eq!(c.resolved_mtry(7), 2);
        assert_eq!(c.resolved_mtry(9), 3);
    }

    #[test]
    fn big_min_node_size_gives_single_leaf() {
        let s = ar1(0.5, 60, 1);
        let cfg = ForestConfig {
            min_node_size: 1000,
            lag_count: Some(2),
            ..small(BootstrapKind::Iid, 1)
        };
        let data = lag_embed(&s, 2).unwrap();
        let mut rng = RngStream::new(1, 1);
        let sample = draw_tree_sample(&data, &cfg, &s, None, &mut rng.clone()).unwrap();
        let tree = fit_tree(&data, &cfg, &s, None, &mut rng).unwrap();
        assert_eq!(tree.nodes().len(), 1);
        let t = sample.targets(&data);
        let mean = t.iter().sum::<f64>() / t.len() as f64;
        assert!((tree.predict(&[0.0, 0.0]) - mean).abs() < 1e-12);
    }

    #[test]
    fn tree_is_deterministic() {
        let s = ar1(0.5, 200, 2);
        let data = lag_embed(&s, 3).unwrap();
        let cfg = ForestConfig {
            mtry: Some(3),
            ..small(BootstrapKind::Iid, 1)
        };
        let a = fit_tree(&data, &cfg, &s, None, &mut RngStream::new(3, 3)).unwrap();
        let b = fit_tree(&data, &cfg, &s, None, &mut RngStream::new(3, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn arsb_requires_fit() {
        let s = ar1(0.5, 100, 4);
        let data = lag_embed(&s, 1).unwrap();
        let cfg = small(BootstrapKind::Arsb, 1);
        assert!(fit_tree(&data, &cfg, &s, None, &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn leaves_are_means_of_routed_targets() {
        let s = ar1(0.7, 300, 5);
        for kind in BootstrapKind::ALL {
            let cfg = ForestConfig {
                lag_count: Some(3),
                mtry: Some(2),
                ..small(kind, 1)
            };
            let data = lag_embed(&s, 3).unwrap();
            let fit = fit_ar(&s, ArOrder::Auto).unwrap();
            let rng = RngStream::new(6, kind as u64);
            let sample = draw_tree_sample(&data, &cfg, &s, Some(&fit), &mut rng.clone()).unwrap();
            let tree = fit_tree(&data, &cfg, &s, Some(&fit), &mut rng.clone()).unwrap();
            let rows = sample.rows(&data);
            let targets = sample.targets(&data);
            let mut sums = vec![(0.0, 0usize); tree.nodes().len()];
            for (r, y) in rows.iter().zip(&targets) {
                let leaf = tree.leaf_index(r);
                sums[leaf].0 += y;
                sums[leaf].1 += 1;
            }
            for (i, node) in tree.nodes().iter().enumerate() {
                if let Node::Leaf { value } = node {
                    let (s, c) = sums[i];
                    assert!(c > 0, "{kind}: empty leaf");
                    assert!((value - s / c as f64).abs() <= 1e-12 * value.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn index_strategies_train_on_original_rows() {
        let s = ar1(0.7, 120, 7);
        let data = lag_embed(&s, 2).unwrap();
        let fit = fit_ar(&s, ArOrder::Auto).unwrap();
        for kind in BootstrapKind::ALL {
            let cfg = ForestConfig { lag_count: Some(2), ..small(kind, 1) };
            let sample = draw_tree_sample(&data, &cfg, &s, Some(&fit), &mut RngStream::new(8, 0)).unwrap();
            let original: Vec<&[f64]> = data.rows().collect();
            let shared = sample.rows(&data).iter().filter(|r| original.contains(r)).count();
            match kind {
                BootstrapKind::Arsb => assert_eq!(shared, 0),
                _ => assert_eq!(shared, sample.rows(&data).len()),
            }
        }
    }

    #[test]
    fn single_tree_forest_equals_tree() {
        let s = ar1(0.5, 150, 9);
        let f = fit_forest(&s, &small(BootstrapKind::Mbb, 1), &RngStream::new(9, 0)).unwrap();
        let x = vec![0.3; f.lag_count()];
        assert_eq!(f.predict(&x).unwrap(), f.trees()[0].predict(&x));
    }

    #[test]
    fn constant_series_predicts_constant() {
        let s = TimeSeries::new(vec![4.25; 80]).unwrap();
        for kind in BootstrapKind::ALL {
            let f = fit_forest(&s, &small(kind, 20), &RngStream::new(1, 0)).unwrap();
            assert_eq!(f.predict(&[4.25]).unwrap(), 4.25, "{kind}");
            assert_eq!(f.predict(&[-100.0]).unwrap(), 4.25, "{kind}");
        }
    }

    #[test]
    fn forest_errors() {
        let s = ar1(0.5, 8, 10);
        assert!(matches!(
            fit_forest(&s, &ForestConfig { lag_count: Some(3), ..small(BootstrapKind::Iid, 5) }, &RngStream::new(0, 0)),
            Err(Error::TooShort { .. })
        ));
        let s = ar1(0.5, 100, 10);
        let f = fit_forest(&s, &ForestConfig { lag_count: Some(2), ..small(BootstrapKind::Iid, 5) }, &RngStream::new(0, 0)).unwrap();
        assert!(matches!(f.predict(&[1.0]), Err(Error::Dimension { expected: 2, actual: 1 })));
        assert!(fit_forest(&s, &ForestConfig { mtry: Some(5), lag_count: Some(2), ..small(BootstrapKind::Iid, 5) }, &RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let s = ar1(0.6, 200, 11);
        for kind in [BootstrapKind::Iid, BootstrapKind::Arsb, BootstrapKind::Sbb] {
            let par = fit_forest(&s, &small(kind, 30), &RngStream::new(5, 5)).unwrap();
            let seq = fit_forest(&s, &ForestConfig { parallel: false, ..small(kind, 30) }, &RngStream::new(5, 5)).unwrap();
            assert_eq!(par.trees(), seq.trees());
        }
    }

    #[test]
    fn prediction_is_order_invariant_and_bounded() {
        let s = ar1(0.8, 200, 12);
        let f = fit_forest(&s, &small(BootstrapKind::Cbb, 50), &RngStream::new(12, 1)).unwrap();
        let l = f.lag_count();
        let mut shuffled = f.trees().to_vec();
        shuffled.reverse();
        shuffled.swap(3, 17);
        let g = Forest::from_trees(shuffled, f.config().clone(), l).unwrap();
        let (lo, hi) = s.values()[l..].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(*y), b.max(*y)));
        let mut rng = RngStream::new(13, 0);
        for _ in 0..100 {
            let x: Vec<f64> = (0..l).map(|_| rng.random_range(-8.0..8.0)).collect();
            let p = f.predict(&x).unwrap();
            assert_eq!(p.to_bits(), g.predict(&x).unwrap().to_bits());
            assert!(p >= lo && p <= hi);
        }
    }

    #[test]
    fn forest_tracks_linear_signal() {
        // one-step forest predictions co-move with φ̂·y_T across replicates
        let reps = 200;
        let mut pairs = Vec::with_capacity(reps);
        for r in 0..reps {
            let s = ar1(0.8, 500, 1000 + r as u64);
            let fit = fit_ar(&s, ArOrder::Fixed(1)).unwrap();
            let cfg = ForestConfig { lag_count: Some(1), ..small(BootstrapKind::Iid, 50) };
            let f = fit_forest(&s, &cfg, &RngStream::new(r as u64, 7)).unwrap();
            pairs.push((f.predict(&[s.last()]).unwrap(), fit.coeffs[0] * s.last()));
        }
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let cov = {
            let ma = a.iter().sum::<f64>() / reps as f64;
            let mb = b.iter().sum::<f64>() / reps as f64;
            a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / reps as f64
        };
        let corr = cov / (sample_acvf(&a, 0).unwrap()[0] * sample_acvf(&b, 0).unwrap()[0]).sqrt();
        assert!(corr > 0.5, "correlation {corr}");
    }

    #[test]
    fn max_depth_is_respected() {
        let s = ar1(0.5, 300, 14);
        let cfg = ForestConfig { max_depth: Some(3), min_node_size: 1, ..small(BootstrapKind::Iid, 5) };
        let f = fit_forest(&s, &cfg, &RngStream::new(0, 0)).unwrap();
        assert!(f.trees().iter().all(|t| t.depth() <= 3));
        assert!(f.dump().starts_with("tree 0\n"));
    }
}
