use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Supervised rows built from a series: row `i` predicts `Y_t` from
/// `(Y_{t−1}, …, Y_{t−L})`, most recent lag first.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedData {
    values: Vec<f64>,
    targets: Vec<f64>,
    lag_count: usize,
}

impl EmbeddedData {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn lag_count(&self) -> usize {
        self.lag_count
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.lag_count..(i + 1) * self.lag_count]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.lag_count)
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

pub fn lag_embed(series: &TimeSeries, lag_count: usize) -> Result<EmbeddedData> {
    let y = series.values();
    if lag_count == 0 {
        return Err(Error::invalid("lag count must be at least 1"));
    }
    if lag_count >= y.len() {
        return Err(Error::TooShort {
            len: y.len(),
            reason: format!("embedding with {lag_count} lags needs more observations"),
        });
    }
    let n = y.len() - lag_count;
    let mut values = Vec::with_capacity(n * lag_count);
    for t in lag_count..y.len() {
        values.extend((1..=lag_count).map(|k| y[t - k]));
    }
    Ok(EmbeddedData {
        values,
        targets: y[lag_count..].to_vec(),
        lag_count,
    })
}
