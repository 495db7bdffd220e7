//! Cross-iteration summaries: median squared errors, mean ranks, runtimes.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{BenchRecord, Model};

/// Median of the squared errors; an even count averages the two central values.
pub fn median_mse(squared_errors: &[f64]) -> Result<f64> {
    if squared_errors.is_empty() {
        return Err(Error::invalid("median of an empty set of errors"));
    }
    let mut v = squared_errors.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Ranks with 1 for the smallest value; exact ties share the mean of the
/// ranks they span.
pub fn rank_models(medians: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..medians.len()).collect();
    order.sort_by(|&a, &b| medians[a].total_cmp(&medians[b]));
    let mut ranks = vec![0.0; medians.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && medians[order[j + 1]] == medians[order[i]] {
            j += 1;
        }
        // positions i..=j hold ranks i+1..=j+1
        let shared = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Median squared error of one (configuration, horizon, model) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianRow {
    pub config_index: usize,
    pub dgp_family: String,
    pub dgp_params: String,
    pub series_len: usize,
    pub horizon: usize,
    pub model: Model,
    pub median_mse: f64,
    pub iterations: usize,
}

pub(crate) fn median_table(records: &[BenchRecord]) -> Result<Vec<MedianRow>> {
    let mut cells: BTreeMap<(usize, usize, usize), (&BenchRecord, Vec<f64>)> = BTreeMap::new();
    for r in records {
        cells
            .entry((r.config_index, r.horizon, r.model_index))
            .or_insert_with(|| (r, Vec::new()))
            .1
            .push(r.squared_error);
    }
    cells
        .into_values()
        .map(|(r, errs)| {
            Ok(MedianRow {
                config_index: r.config_index,
                dgp_family: r.dgp_family.clone(),
                dgp_params: r.dgp_params.clone(),
                series_len: r.series_len,
                horizon: r.horizon,
                model: r.model,
                median_mse: median_mse(&errs)?,
                iterations: errs.len(),
            })
        })
        .collect()
}

/// Mean ranks per DGP family plus an overall row, for one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub horizon: usize,
    pub models: Vec<Model>,
    /// `(family, mean rank per model, number of configurations)`.
    pub families: Vec<(String, Vec<f64>, usize)>,
    /// Mean over every configuration.
    pub overall: Vec<f64>,
    /// Per-configuration ranks, keyed by configuration index.
    pub config_ranks: Vec<(usize, Vec<f64>)>,
}

impl RankTable {
    pub fn overall_rank(&self, model: Model) -> Option<f64> {
        let i = self.models.iter().position(|m| *m == model)?;
        Some(self.overall[i])
    }

    pub fn family_rank(&self, family: &str, model: Model) -> Option<f64> {
        let i = self.models.iter().position(|m| *m == model)?;
        self.families
            .iter()
            .find(|(f, _, _)| f == family)
            .map(|(_, r, _)| r[i])
    }
}

pub(crate) fn rank_tables(medians: &[MedianRow], models: &[Model], horizons: &[usize]) -> Vec<RankTable> {
    // family order follows first appearance in configuration order
    let mut tables = Vec::new();
    for &h in horizons {
        let mut by_config: BTreeMap<usize, (String, Vec<Option<f64>>)> = BTreeMap::new();
        for row in medians.iter().filter(|r| r.horizon == h) {
            let entry = by_config
                .entry(row.config_index)
                .or_insert_with(|| (row.dgp_family.clone(), vec![None; models.len()]));
            if let Some(i) = models.iter().position(|m| *m == row.model) {
                entry.1[i] = Some(row.median_mse);
            }
        }
        let mut families: Vec<(String, Vec<f64>, usize)> = Vec::new();
        let mut overall = vec![0.0; models.len()];
        let mut config_ranks = Vec::new();
        for (ci, (family, cells)) in by_config {
            // configurations missing a model (all its iterations failed) are not ranked
            let Some(values) = cells.into_iter().collect::<Option<Vec<f64>>>() else {
                continue;
            };
            let ranks = rank_models(&values);
            let slot = match families.iter().position(|(f, _, _)| *f == family) {
                Some(i) => i,
                None => {
                    families.push((family, vec![0.0; models.len()], 0));
                    families.len() - 1
                }
            };
            for (k, r) in ranks.iter().enumerate() {
                families[slot].1[k] += r;
                overall[k] += r;
            }
            families[slot].2 += 1;
            config_ranks.push((ci, ranks));
        }
        for (_, sums, count) in &mut families {
            for s in sums.iter_mut() {
                *s /= *count as f64;
            }
        }
        if !config_ranks.is_empty() {
            for s in &mut overall {
                *s /= config_ranks.len() as f64;
            }
        }
        tables.push(RankTable {
            horizon: h,
            models: models.to_vec(),
            families,
            overall,
            config_ranks,
        });
    }
    tables
}

/// Mean selected AR order and mean fit time per model, by DGP family.
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeTable {
    pub models: Vec<Model>,
    /// `(family, mean selected order, mean fit seconds per model)`.
    pub families: Vec<(String, f64, Vec<f64>)>,
    pub overall_order: f64,
    pub overall_seconds: Vec<f64>,
}

impl RuntimeTable {
    pub fn overall_seconds_of(&self, model: Model) -> Option<f64> {
        let i = self.models.iter().position(|m| *m == model)?;
        Some(self.overall_seconds[i])
    }

    pub fn family_order(&self, family: &str) -> Option<f64> {
        self.families
            .iter()
            .find(|(f, _, _)| f == family)
            .map(|(_, p, _)| *p)
    }
}

pub(crate) fn runtime_table(records: &[BenchRecord], models: &[Model]) -> RuntimeTable {
    // one fit per (config, iteration, model): keep a single horizon's records
    let Some(h0) = records.iter().map(|r| r.horizon).min() else {
        return RuntimeTable {
            models: models.to_vec(),
            families: Vec::new(),
            overall_order: f64::NAN,
            overall_seconds: vec![f64::NAN; models.len()],
        };
    };
    struct Acc {
        order_sum: f64,
        order_n: usize,
        secs: Vec<(f64, usize)>,
    }
    let new_acc = || Acc {
        order_sum: 0.0,
        order_n: 0,
        secs: vec![(0.0, 0); models.len()],
    };
    let mut fams: Vec<(String, Acc)> = Vec::new();
    let mut all = new_acc();
    let mut seen_order = std::collections::BTreeSet::new();
    for r in records.iter().filter(|r| r.horizon == h0) {
        let slot = match fams.iter().position(|(f, _)| *f == r.dgp_family) {
            Some(i) => i,
            None => {
                fams.push((r.dgp_family.clone(), new_acc()));
                fams.len() - 1
            }
        };
        if seen_order.insert((r.config_index, r.iteration)) {
            for acc in [&mut fams[slot].1, &mut all] {
                acc.order_sum += r.selected_order as f64;
                acc.order_n += 1;
            }
        }
        if let Some(k) = models.iter().position(|m| *m == r.model) {
            for acc in [&mut fams[slot].1, &mut all] {
                acc.secs[k].0 += r.fit_seconds;
                acc.secs[k].1 += 1;
            }
        }
    }
    let finish = |acc: &Acc| {
        let order = acc.order_sum / acc.order_n as f64;
        let secs = acc
            .secs
            .iter()
            .map(|(s, n)| if *n == 0 { f64::NAN } else { s / *n as f64 })
            .collect();
        (order, secs)
    };
    let families = fams
        .iter()
        .map(|(f, acc)| {
            let (o, s) = finish(acc);
            (f.clone(), o, s)
        })
        .collect();
    let (overall_order, overall_seconds) = finish(&all);
    RuntimeTable {
        models: models.to_vec(),
        families,
        overall_order,
        overall_seconds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn median_examples() {
        assert_eq!(median_mse(&[1.0]).unwrap(), 1.0);
        assert_eq!(median_mse(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.5);
        assert!(median_mse(&[]).is_err());
    }

    #[test]
    fn median_matches_sort_oracle() {
        let mut rng = crate::series::RngStream::new(3, 0);
        for _ in 0..1000 {
            let n = rng.random_range(1..50);
            // small integer support forces repeated values
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(0..10) as f64 / 4.0).collect();
            let mut s = v.clone();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let oracle = if n % 2 == 1 { s[n / 2] } else { 0.5 * (s[n / 2 - 1] + s[n / 2]) };
            assert_eq!(median_mse(&v).unwrap(), oracle);
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_models(&[0.5, 0.7, 0.7, 1.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(rank_models(&[2.0, 2.0, 2.0]), vec![2.0, 2.0, 2.0]);
        assert_eq!(rank_models(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
    }

    proptest! {
        #[test]
        fn rank_sum_is_conserved(v in prop::collection::vec(0u8..5, 2..12)) {
            let medians: Vec<f64> = v.iter().map(|x| *x as f64).collect();
            let ranks = rank_models(&medians);
            let m = medians.len() as f64;
            prop_assert!((ranks.iter().sum::<f64>() - m * (m + 1.0) / 2.0).abs() < 1e-9);
            for (i, a) in medians.iter().enumerate() {
                for (j, b) in medians.iter().enumerate() {
                    if a < b { prop_assert!(ranks[i] < ranks[j]); }
                    if a == b { prop_assert_eq!(ranks[i], ranks[j]); }
                }
            }
        }
    }
}
