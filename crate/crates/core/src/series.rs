//! Series type, deterministic random streams and sample moments.
//!
//! The autocovariance estimator uses the biased `1/T` divisor for every lag.
//! That choice keeps the Toeplitz matrix built from the estimates positive
//! semi-definite, which the Levinson-Durbin recursion relies on.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Ordered, finite, non-empty real-valued observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// First `len` observations as a new series.
    pub fn head(&self, len: usize) -> Result<Self> {
        if len > self.len() {
            return Err(Error::invalid(format!(
                "cannot take {len} observations from a series of length {}",
                self.len()
            )));
        }
        Self::new(self.values[..len].to_vec())
    }

    /// Reads one observation per line. Blank lines and `#` comments are skipped.
    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let v: f64 = trimmed.parse().map_err(|e| Error::Parse {
                what: format!("series value on line {}", lineno + 1),
                detail: format!("{trimmed:?}: {e}"),
            })?;
            values.push(v);
        }
        Self::new(values)
    }

    /// Reads the named column of a CSV file with a header row.
    pub fn read_csv_column<R: std::io::Read>(reader: R, column: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        let idx = headers
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| Error::Parse {
                what: "csv header".into(),
                detail: format!("no column named {column:?}"),
            })?;
        let mut values = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let field = record.get(idx).unwrap_or("");
            let v: f64 = field.trim().parse().map_err(|e| Error::Parse {
                what: format!("column {column:?} on data row {}", row + 1),
                detail: format!("{field:?}: {e}"),
            })?;
            values.push(v);
        }
        Self::new(values)
    }

    pub fn write_text<W: Write>(&self, mut writer: W) -> Result<()> {
        writer.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 20);
        for v in &self.values {
            let _ = writeln!(out, "{v}");
        }
        out
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Name of the generator backing [`RngStream`], recorded in benchmark metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9), stream-per-task";

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// The pair maps onto a ChaCha8 key and stream number, so one identity
/// always yields the same sequence no matter which thread consumes it.
/// Child streams are derived from the identity alone, never from the
/// current position of the parent.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Independent child stream keyed by this stream's identity and `id`.
    pub fn substream(&self, id: u64) -> Self {
        let key = splitmix64(self.seed ^ splitmix64(self.stream_id.wrapping_add(0x6A09_E667_F3BC_C909)));
        Self::new(key, id)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sample_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Biased sample autocovariances `γ̂_0..=γ̂_max_lag` around the sample mean.
///
/// A constant series yields all zeros; callers must check `γ̂_0 > 0`.
pub fn sample_acvf(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if max_lag >= n {
        return Err(Error::invalid(format!(
            "max_lag {max_lag} must be smaller than the series length {n}"
        )));
    }
    let mean = sample_mean(values)?;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let acvf = (0..=max_lag)
        .map(|k| {
            let s: f64 = centered[..n - k]
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum();
            s / n as f64
        })
        .collect();
    Ok(acvf)
}

/// Lag-`k` sample autocorrelation, `γ̂_k / γ̂_0`.
pub fn sample_acf(values: &[f64], lag: usize) -> Result<f64> {
    let acvf = sample_acvf(values, lag)?;
    if acvf[0] <= 0.0 {
        return Err(Error::Degenerate("zero sample variance".into()));
    }
    Ok(acvf[lag] / acvf[0])
}
