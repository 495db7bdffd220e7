//! Yule-Walker autoregression and the AR-sieve bootstrap.
//!
//! A fit estimates the mean, computes biased sample autocovariances and
//! solves the Yule-Walker equations with the Levinson-Durbin recursion. The
//! recursion yields reflection coefficients with `|κ_j| < 1` whenever the
//! autocovariances are positive definite, so every fitted polynomial is
//! stationary and bootstrap series generated from it cannot explode.
//!
//! The order is chosen by AIC, `T·ln(σ̂²_p) + 2p`, reusing the per-order
//! innovation variances of a single Levinson-Durbin sweep.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::series::{sample_acvf, sample_mean, TimeSeries};

/// Discarded warm-up steps of every AR-sieve bootstrap series.
pub const DEFAULT_ARSB_BURN_IN: usize = 100;

/// Relative floor below which an innovation variance counts as zero.
const VARIANCE_FLOOR: f64 = 1e-14;

/// Output of [`levinson_durbin`].
#[derive(Debug, Clone, PartialEq)]
pub struct LevinsonDurbin {
    /// `φ̂_1..φ̂_p` of the highest order solved.
    pub coeffs: Vec<f64>,
    pub innovation_variance: f64,
    /// Reflection coefficients `κ_1..κ_p`.
    pub pacf: Vec<f64>,
    /// Innovation variance at every order, `σ̂²_0..=σ̂²_p`.
    pub variances: Vec<f64>,
}

/// Solves the Yule-Walker system for orders `1..=acvf.len()-1`.
///
/// Fails when `γ̂_0 ≤ 0` or when the sequence is not positive definite (a
/// reflection coefficient reaches the unit circle).
pub fn levinson_durbin(acvf: &[f64]) -> Result<LevinsonDurbin> {
    let (solution, failure) = levinson_sweep(acvf, acvf.len().saturating_sub(1))?;
    match failure {
        Some(err) => Err(err),
        None => Ok(solution),
    }
}

/// Runs the recursion up to `max_order`, stopping at the first degenerate
/// order. Returns the last valid solution plus the error that stopped it.
fn levinson_sweep(acvf: &[f64], max_order: usize) -> Result<(LevinsonDurbin, Option<Error>)> {
    let gamma0 = *acvf.first().ok_or(Error::EmptySeries)?;
    if !(gamma0 > 0.0) || !gamma0.is_finite() {
        return Err(Error::Degenerate(format!(
            "lag-0 autocovariance must be positive, got {gamma0}"
        )));
    }
    let mut coeffs: Vec<f64> = Vec::with_capacity(max_order);
    let mut next = Vec::with_capacity(max_order);
    let mut pacf = Vec::with_capacity(max_order);
    let mut variances = Vec::with_capacity(max_order + 1);
    variances.push(gamma0);
    let mut v = gamma0;

    for m in 1..=max_order {
        let mut num = acvf[m];
        for (j, a) in coeffs.iter().enumerate() {
            num -= a * acvf[m - 1 - j];
        }
        let k = num / v;
        let v_next = v * (1.0 - k * k);
        if !k.is_finite() || k.abs() >= 1.0 || !(v_next > VARIANCE_FLOOR * gamma0) {
            let err = Error::Degenerate(format!(
                "autocovariances are not positive definite at order {m} (reflection {k})"
            ));
            let solution = LevinsonDurbin {
                innovation_variance: v,
                coeffs,
                pacf,
                variances,
            };
            return Ok((solution, Some(err)));
        }
        next.clear();
        for j in 0..coeffs.len() {
            next.push(coeffs[j] - k * coeffs[m - 2 - j]);
        }
        next.push(k);
        std::mem::swap(&mut coeffs, &mut next);
        pacf.push(k);
        v = v_next;
        variances.push(v);
    }

    Ok((
        LevinsonDurbin {
            coeffs,
            innovation_variance: v,
            pacf,
            variances,
        },
        None,
    ))
}

/// `min(⌊10·log10 T⌋, ⌊T/4⌋)`.
pub fn default_max_order(len: usize) -> usize {
    if len < 2 {
        return 0;
    }
    let by_log = (10.0 * (len as f64).log10()).floor() as usize;
    by_log.min(len / 4)
}

/// AIC-minimizing order in `0..=p_max`, ties going to the smaller order.
pub fn select_order_aic(series: &TimeSeries, p_max: usize) -> Result<usize> {
    let n = series.len();
    if 2 * p_max >= n {
        return Err(Error::TooShort {
            len: n,
            reason: format!("AIC search up to order {p_max} needs more than {} observations", 2 * p_max),
        });
    }
    let acvf = sample_acvf(series.values(), p_max)?;
    if acvf[0] <= 0.0 {
        return Ok(0);
    }
    let (sweep, _) = levinson_sweep(&acvf, p_max)?;
    Ok(aic_argmin(&sweep.variances, n))
}

fn aic_argmin(variances: &[f64], n: usize) -> usize {
    let mut best = 0;
    let mut best_aic = f64::INFINITY;
    for (p, v) in variances.iter().enumerate() {
        let aic = aic(*v, p, n);
        if aic < best_aic {
            best_aic = aic;
            best = p;
        }
    }
    best
}

/// `T·ln(σ̂²) + 2p`.
pub fn aic(innovation_variance: f64, order: usize, len: usize) -> f64 {
    len as f64 * innovation_variance.ln() + 2.0 * order as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArOrder {
    /// AIC over `0..=default_max_order(T)`.
    #[default]
    Auto,
    /// AIC over `0..=p_max`.
    AutoUpTo(usize),
    Fixed(usize),
}

/// A fitted mean-adjusted AR(p) model.
#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    pub order: usize,
    pub mean: f64,
    pub coeffs: Vec<f64>,
    pub innovation_variance: f64,
    /// `ε̂_t` for `t = p+1..=T`.
    pub residuals: Vec<f64>,
    /// Residuals shifted to mean zero; the bootstrap draws from this pool.
    pub centered_residuals: Vec<f64>,
    pub aic: f64,
    pub pacf: Vec<f64>,
}

pub fn fit_ar(series: &TimeSeries, order: ArOrder) -> Result<ArFit> {
    let n = series.len();
    let values = series.values();
    let mean = sample_mean(values)?;

    let (max_order, fixed) = match order {
        ArOrder::Auto => (default_max_order(n), false),
        ArOrder::AutoUpTo(p) => (p, false),
        ArOrder::Fixed(p) => (p, true),
    };
    if n <= 2 * max_order {
        return Err(Error::TooShort {
            len: n,
            reason: format!("order {max_order} needs more than {} observations", 2 * max_order),
        });
    }

    let acvf = sample_acvf(values, max_order)?;
    let (p, solution) = if acvf[0] <= 0.0 {
        if fixed && max_order > 0 {
            return Err(Error::Degenerate(
                "constant series admits no AR fit of positive order".into(),
            ));
        }
        let constant = LevinsonDurbin {
            coeffs: Vec::new(),
            innovation_variance: 0.0,
            pacf: Vec::new(),
            variances: vec![0.0],
        };
        (0, constant)
    } else if fixed {
        (max_order, levinson_durbin(&acvf)?)
    } else {
        let (sweep, _) = levinson_sweep(&acvf, max_order)?;
        let p = aic_argmin(&sweep.variances, n);
        // re-solve at the selected order; the sweep holds only the top order
        (p, levinson_durbin(&acvf[..=p])?)
    };

    let coeffs = solution.coeffs;
    let residuals: Vec<f64> = (p..n)
        .map(|t| {
            let mut e = values[t] - mean;
            for (j, c) in coeffs.iter().enumerate() {
                e -= c * (values[t - 1 - j] - mean);
            }
            e
        })
        .collect();
    let res_mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
    let centered_residuals = residuals.iter().map(|e| e - res_mean).collect();

    Ok(ArFit {
        order: p,
        mean,
        aic: aic(solution.innovation_variance, p, n),
        innovation_variance: solution.innovation_variance,
        pacf: solution.pacf,
        coeffs,
        residuals,
        centered_residuals,
    })
}

impl ArFit {
    /// `μ̂ + Σ φ̂_j (lags[j] − μ̂)` with `lags[0]` the most recent value.
    pub fn predict_next(&self, lags: &[f64]) -> f64 {
        self.mean
            + self
                .coeffs
                .iter()
                .zip(lags)
                .map(|(c, y)| c * (y - self.mean))
                .sum::<f64>()
    }
}

impl fmt::Display for ArFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[f64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(f, "order = {}", self.order)?;
        writeln!(f, "mean = {}", self.mean)?;
        writeln!(f, "coefficients = {}", join(&self.coeffs))?;
        writeln!(f, "innovation_variance = {}", self.innovation_variance)?;
        writeln!(f, "pacf = {}", join(&self.pacf))?;
        writeln!(f, "aic = {}", self.aic)?;
        writeln!(f, "residuals = {}", self.residuals.len())
    }
}

/// AR-sieve bootstrap series of length `len` with the default burn-in.
pub fn arsb_resample<R: Rng + ?Sized>(fit: &ArFit, len: usize, rng: &mut R) -> Result<TimeSeries> {
    arsb_resample_with_burn_in(fit, len, DEFAULT_ARSB_BURN_IN, rng)
}

/// Runs `Y*_t = μ̂ + Σ φ̂_j (Y*_{t−j} − μ̂) + ε*_t` from `Y* = μ̂`, with `ε*_t`
/// drawn uniformly with replacement from the centered residuals.
pub fn arsb_resample_with_burn_in<R: Rng + ?Sized>(
    fit: &ArFit,
    len: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<TimeSeries> {
    let pool = &fit.centered_residuals;
    if pool.is_empty() {
        return Err(Error::invalid("AR fit has no residuals to resample"));
    }
    if len == 0 {
        return Err(Error::invalid("bootstrap length must be positive"));
    }
    let p = fit.order;
    let total = burn_in + len;
    // deviations from the mean, with p zero pre-sample values
    let mut dev = vec![0.0; p + total];
    for t in p..p + total {
        let mut x = pool[rng.random_range(0..pool.len())];
        for (j, c) in fit.coeffs.iter().enumerate() {
            x += c * dev[t - 1 - j];
        }
        dev[t] = x;
    }
    let out = dev[p + burn_in..].iter().map(|x| fit.mean + x).collect();
    TimeSeries::new(out)
}

/// Recursive plug-in Yule-Walker forecast for horizons `1..=h`.
pub fn yw_forecast(fit: &ArFit, history: &TimeSeries, h: usize) -> Result<Vec<f64>> {
    if h < 1 {
        return Err(Error::invalid("forecast horizon must be at least 1"));
    }
    let p = fit.order;
    if history.len() < p {
        return Err(Error::TooShort {
            len: history.len(),
            reason: format!("AR({p}) forecast needs at least {p} observations"),
        });
    }
    // most recent first
    let mut lags: Vec<f64> = history.values().iter().rev().take(p).copied().collect();
    let mut out = Vec::with_capacity(h);
    for _ in 0..h {
        let y = fit.predict_next(&lags);
        out.push(y);
        if p > 0 {
            lags.pop();
            lags.insert(0, y);
        }
    }
    Ok(out)
}

/// Largest eigenvalue modulus of the companion matrix of `φ_1..φ_p`.
///
/// Below one exactly when the AR polynomial `1 − Σ φ_i z^i` has all roots
/// outside the unit circle.
pub fn companion_spectral_radius(phi: &[f64]) -> f64 {
    let p = phi.len();
    match p {
        0 => 0.0,
        1 => phi[0].abs(),
        _ => {
            let m = DMatrix::from_fn(p, p, |i, j| {
                if i == 0 {
                    phi[j]
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            m.complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
        }
    }
}
