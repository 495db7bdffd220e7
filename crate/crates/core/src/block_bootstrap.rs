//! Index resamplers over `n` consecutive rows.
//!
//! The public `*_indices` functions return **1-based** indices in `1..=n`.
//! [`ResampleStrategy::sample_rows`] is the 0-based variant the forest uses.
//! Every resampler runs in `O(n)` time and space.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapKind {
    Iid,
    /// Moving (overlapping) blocks.
    Mbb,
    /// Non-overlapping blocks.
    Nbb,
    /// Circular blocks.
    Cbb,
    /// Stationary bootstrap: circular blocks of geometric length.
    Sbb,
    /// AR-sieve: regenerates the series instead of resampling indices.
    Arsb,
}

impl BootstrapKind {
    pub const ALL: [BootstrapKind; 6] = [
        BootstrapKind::Arsb,
        BootstrapKind::Iid,
        BootstrapKind::Mbb,
        BootstrapKind::Cbb,
        BootstrapKind::Nbb,
        BootstrapKind::Sbb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BootstrapKind::Iid => "IID",
            BootstrapKind::Mbb => "MBB",
            BootstrapKind::Nbb => "NBB",
            BootstrapKind::Cbb => "CBB",
            BootstrapKind::Sbb => "SBB",
            BootstrapKind::Arsb => "ARSB",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iid" => Ok(BootstrapKind::Iid),
            "mbb" => Ok(BootstrapKind::Mbb),
            "nbb" => Ok(BootstrapKind::Nbb),
            "cbb" => Ok(BootstrapKind::Cbb),
            "sbb" => Ok(BootstrapKind::Sbb),
            "arsb" => Ok(BootstrapKind::Arsb),
            other => Err(Error::invalid(format!("unknown bootstrap strategy {other:?}"))),
        }
    }

    pub fn uses_blocks(self) -> bool {
        matches!(
            self,
            BootstrapKind::Mbb | BootstrapKind::Nbb | BootstrapKind::Cbb | BootstrapKind::Sbb
        )
    }
}

impl fmt::Display for BootstrapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-tree resampling configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResampleStrategy {
    pub kind: BootstrapKind,
    /// Block length (mean block length for SBB). `None` picks
    /// [`default_block_length`] of the series length. Ignored by IID/ARSB.
    pub block_length: Option<usize>,
    /// MBB only: append one truncated block so the output has exactly `n` rows.
    pub pad_to_n: bool,
}

impl ResampleStrategy {
    pub fn new(kind: BootstrapKind) -> Self {
        Self {
            kind,
            block_length: None,
            pad_to_n: false,
        }
    }

    pub fn with_block_length(mut self, block_length: usize) -> Self {
        self.block_length = Some(block_length);
        self
    }

    /// Block length used for a series of length `series_len`.
    pub fn resolved_block_length(&self, series_len: usize) -> usize {
        self.block_length
            .unwrap_or_else(|| default_block_length(series_len))
    }

    /// 0-based row indices for one tree; `series_len` resolves the default
    /// block length. Fails for ARSB, which does not resample indices.
    pub fn sample_rows<R: Rng + ?Sized>(
        &self,
        n: usize,
        series_len: usize,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        let l = self.resolved_block_length(series_len);
        let mut out = Vec::with_capacity(n + l);
        match self.kind {
            BootstrapKind::Iid => iid_into(n, rng, &mut out)?,
            BootstrapKind::Mbb => mbb_into(n, l, self.pad_to_n, rng, &mut out)?,
            BootstrapKind::Nbb => nbb_into(n, l, rng, &mut out)?,
            BootstrapKind::Cbb => cbb_into(n, l, rng, &mut out)?,
            BootstrapKind::Sbb => sbb_into(n, l, rng, &mut out)?,
            BootstrapKind::Arsb => {
                return Err(Error::invalid("ARSB does not resample row indices"))
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ResampleStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind.uses_blocks(), self.block_length) {
            (true, Some(l)) => write!(f, "{}(l={l})", self.kind),
            _ => write!(f, "{}", self.kind),
        }
    }
}

/// `⌈T^{1/3}⌉`, computed exactly on integers.
pub fn default_block_length(series_len: usize) -> usize {
    let mut l = 1usize;
    while l.saturating_mul(l).saturating_mul(l) < series_len {
        l += 1;
    }
    l
}

fn check_rows(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("cannot resample zero rows"))
    } else {
        Ok(())
    }
}

fn check_block(n: usize, l: usize) -> Result<()> {
    check_rows(n)?;
    if l == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    if l > n {
        return Err(Error::invalid(format!(
            "block length {l} exceeds the number of rows {n}"
        )));
    }
    Ok(())
}

fn iid_into<R: Rng + ?Sized>(n: usize, rng: &mut R, out: &mut Vec<usize>) -> Result<()> {
    check_rows(n)?;
    out.extend((0..n).map(|_| rng.random_range(0..n)));
    Ok(())
}

fn mbb_into<R: Rng + ?Sized>(
    n: usize,
    l: usize,
    pad: bool,
    rng: &mut R,
    out: &mut Vec<usize>,
) -> Result<()> {
    check_block(n, l)?;
    let candidates = n - l + 1;
    let k = n / l;
    for _ in 0..k {
        let start = rng.random_range(0..candidates);
        out.extend(start..start + l);
    }
    if pad && out.len() < n {
        let start = rng.random_range(0..candidates);
        let need = n - out.len();
        out.extend(start..start + need);
    }
    Ok(())
}

fn nbb_into<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R, out: &mut Vec<usize>) -> Result<()> {
    check_block(n, l)?;
    let blocks = n / l;
    for _ in 0..blocks {
        let start = rng.random_range(0..blocks) * l;
        out.extend(start..start + l);
    }
    Ok(())
}

fn cbb_into<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R, out: &mut Vec<usize>) -> Result<()> {
    check_block(n, l)?;
    let k = n.div_ceil(l);
    for _ in 0..k {
        let start = rng.random_range(0..n);
        out.extend((start..start + l).map(|i| i % n));
    }
    out.truncate(n);
    Ok(())
}

/// One SBB block length, `1 + Geometric(1/mean)` on `{1, 2, …}`.
pub(crate) fn sbb_block_length<R: Rng + ?Sized>(geom: &Geometric, rng: &mut R) -> usize {
    1 + geom.sample(rng) as usize
}

fn sbb_into<R: Rng + ?Sized>(
    n: usize,
    mean_l: usize,
    rng: &mut R,
    out: &mut Vec<usize>,
) -> Result<()> {
    check_rows(n)?;
    if mean_l == 0 {
        return Err(Error::invalid("mean block length must be at least 1"));
    }
    let geom = Geometric::new(1.0 / mean_l as f64)
        .map_err(|e| Error::invalid(format!("geometric block length: {e}")))?;
    while out.len() < n {
        let start = rng.random_range(0..n);
        let len = sbb_block_length(&geom, rng).min(n - out.len());
        out.extend((start..start + len).map(|i| i % n));
    }
    Ok(())
}

fn one_based(mut v: Vec<usize>) -> Vec<usize> {
    for i in &mut v {
        *i += 1;
    }
    v
}

/// `n` uniform draws with replacement from `1..=n`.
pub fn iid_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(n);
    iid_into(n, rng, &mut out)?;
    Ok(one_based(out))
}

/// Moving block bootstrap: `⌊n/ℓ⌋` blocks drawn from the `n−ℓ+1` overlapping
/// candidates, so the output has `⌊n/ℓ⌋·ℓ` indices.
pub fn mbb_indices<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(n);
    mbb_into(n, l, false, rng, &mut out)?;
    Ok(one_based(out))
}

/// MBB padded with one truncated extra block to exactly `n` indices.
pub fn mbb_indices_padded<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(n);
    mbb_into(n, l, true, rng, &mut out)?;
    Ok(one_based(out))
}

/// Non-overlapping blocks starting at `1, ℓ+1, 2ℓ+1, …`; a ragged tail
/// shorter than `ℓ` is never drawn.
pub fn nbb_indices<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(n);
    nbb_into(n, l, rng, &mut out)?;
    Ok(one_based(out))
}

/// Circular blocks: starts uniform on `1..=n`, wrapping past `n`, truncated
/// to exactly `n` indices.
pub fn cbb_indices<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(n + l);
    cbb_into(n, l, rng, &mut out)?;
    Ok(one_based(out))
}

/// Stationary bootstrap with geometric block lengths of mean `mean_l`.
pub fn sbb_indices<R: Rng + ?Sized>(n: usize, mean_l: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(n);
    sbb_into(n, mean_l, rng, &mut out)?;
    Ok(one_based(out))
}
