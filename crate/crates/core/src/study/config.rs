//! TOML study configuration.
//!
//! ```toml
//! seed = 42
//! iterations = 200
//! sizes = [100, 500]
//! horizons = [1, 5]
//! strategies = ["arsb", "iid", "mbb", "cbb", "nbb", "sbb", "yw"]
//! block_length = 8        # omit for ceil(T^(1/3))
//! threads = 4
//! timing = true
//!
//! [forest]
//! num_trees = 500
//! min_node_size = 5
//!
//! [[dgp]]
//! family = "ar"
//! ar = [0.8]
//!
//! [[dgp]]
//! family = "garch"
//! alpha0 = 0.01
//! alpha = [0.3]
//! beta = [0.6]
//! ```
//!
//! Every key is optional; missing keys take the [`BenchConfig`] defaults and
//! an absent `[[dgp]]` list means the full benchmark suite.

use serde::Deserialize;

use super::{BenchConfig, Model};
use crate::dgp::{DgpFamily, DgpSpec, GarchParams, DEFAULT_BURN_IN};
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    iterations: Option<usize>,
    sizes: Option<Vec<usize>>,
    horizons: Option<Vec<usize>>,
    strategies: Option<Vec<String>>,
    block_length: Option<usize>,
    threads: Option<usize>,
    timing: Option<bool>,
    forest: Option<ForestSection>,
    dgp: Option<Vec<DgpEntry>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ForestSection {
    num_trees: Option<usize>,
    mtry: Option<usize>,
    min_node_size: Option<usize>,
    max_depth: Option<usize>,
    arsb_burn_in: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DgpEntry {
    family: DgpFamily,
    #[serde(default)]
    ar: Vec<f64>,
    #[serde(default)]
    ma: Vec<f64>,
    d: Option<f64>,
    alpha0: Option<f64>,
    #[serde(default)]
    alpha: Vec<f64>,
    #[serde(default)]
    beta: Vec<f64>,
    burn_in: Option<usize>,
}

impl DgpEntry {
    fn into_spec(self) -> Result<DgpSpec> {
        let d = match self.family {
            DgpFamily::Arima => self.d.unwrap_or(1.0),
            DgpFamily::Arfima => self
                .d
                .ok_or_else(|| Error::Config("ARFIMA entry needs d".into()))?,
            _ => self.d.unwrap_or(0.0),
        };
        let garch = match self.family {
            DgpFamily::Garch => Some(GarchParams {
                alpha0: self
                    .alpha0
                    .ok_or_else(|| Error::Config("GARCH entry needs alpha0".into()))?,
                alpha: self.alpha,
                beta: self.beta,
            }),
            _ => {
                if self.alpha0.is_some() || !self.alpha.is_empty() || !self.beta.is_empty() {
                    return Err(Error::Config(format!(
                        "{} entry takes no GARCH parameters",
                        self.family
                    )));
                }
                None
            }
        };
        let spec = DgpSpec {
            family: self.family,
            ar: self.ar,
            ma: self.ma,
            d,
            garch,
            burn_in: self.burn_in.unwrap_or(DEFAULT_BURN_IN),
        };
        spec.validate()
            .map_err(|e| Error::Config(format!("invalid dgp {spec}: {e}")))?;
        Ok(spec)
    }
}

impl BenchConfig {
    pub fn from_toml_str(text: &str) -> Result<BenchConfig> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = BenchConfig::default();
        if let Some(v) = file.seed {
            cfg.master_seed = v;
        }
        if let Some(v) = file.iterations {
            cfg.iterations = v;
        }
        if let Some(v) = file.sizes {
            cfg.sizes = v;
        }
        if let Some(v) = file.horizons {
            cfg.horizons = v;
        }
        if let Some(names) = file.strategies {
            cfg.models = names
                .iter()
                .map(|n| Model::parse(n).map_err(|e| Error::Config(e.to_string())))
                .collect::<Result<_>>()?;
        }
        cfg.block_length = file.block_length.or(cfg.block_length);
        cfg.threads = file.threads.or(cfg.threads);
        if let Some(v) = file.timing {
            cfg.record_timing = v;
        }
        if let Some(f) = file.forest {
            let fc = &mut cfg.forest;
            fc.num_trees = f.num_trees.unwrap_or(fc.num_trees);
            fc.mtry = f.mtry.or(fc.mtry);
            fc.min_node_size = f.min_node_size.unwrap_or(fc.min_node_size);
            fc.max_depth = f.max_depth.or(fc.max_depth);
            fc.arsb_burn_in = f.arsb_burn_in.unwrap_or(fc.arsb_burn_in);
        }
        if let Some(entries) = file.dgp {
            cfg.dgp_specs = entries
                .into_iter()
                .map(DgpEntry::into_spec)
                .collect::<Result<_>>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_file(path: &std::path::Path) -> Result<BenchConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block_bootstrap::BootstrapKind;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = BenchConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, BenchConfig::default());
        assert_eq!(cfg.dgp_specs.len(), 24);
        assert_eq!(cfg.models.len(), 7);
    }

    #[test]
    fn full_file() {
        let text = r#"
            seed = 9
            iterations = 3
            sizes = [100]
            horizons = [1]
            strategies = ["ARSB", "yw"]
            block_length = 4
            threads = 2
            timing = false
            [forest]
            num_trees = 20
            [[dgp]]
            family = "ar"
            ar = [0.8]
            [[dgp]]
            family = "arfima"
            ar = [0.3]
            ma = [0.4]
            d = 0.3
            [[dgp]]
            family = "garch"
            alpha0 = 0.01
            alpha = [0.3]
            beta = [0.6]
        "#;
        let cfg = BenchConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.master_seed, 9);
        assert_eq!(cfg.models, vec![Model::Forest(BootstrapKind::Arsb), Model::YuleWalker]);
        assert_eq!(cfg.forest.num_trees, 20);
        assert_eq!(cfg.dgp_specs[0], DgpSpec::ar(&[0.8]));
        assert_eq!(cfg.dgp_specs[1], DgpSpec::arfima(&[0.3], &[0.4], 0.3));
        assert_eq!(cfg.dgp_specs[2], DgpSpec::garch(0.01, &[0.3], &[0.6]));
        assert!(!cfg.record_timing);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "unknown_key = 1",
            "iterations = 0",
            "strategies = [\"bogus\"]",
            "[[dgp]]\nfamily = \"ar\"\nar = [1.2]",
            "[[dgp]]\nfamily = \"arfima\"",
            "[[dgp]]\nfamily = \"ar\"\nalpha0 = 0.1",
            "[[dgp]]\nfamily = \"weird\"",
            "sizes = \"many\"",
        ] {
            assert!(
                matches!(BenchConfig::from_toml_str(text), Err(Error::Config(_))),
                "{text}"
            );
        }
    }
}
