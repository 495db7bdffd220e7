//! Simulators for the benchmark data-generating processes.
//!
//! Moving-average terms enter with a minus sign:
//!
//! ```text
//! Y_t = φ_1 Y_{t-1} + … + φ_p Y_{t-p} + ε_t − θ_1 ε_{t-1} − … − θ_q ε_{t-q}
//! ```
//!
//! so `θ_1 = 0.8` gives a lag-1 autocorrelation of `−0.8 / 1.64`. Most
//! textbooks (and many libraries) use the opposite sign.
//!
//! ARFIMA series are the standard composition `φ(B)(1−B)^d Y_t = θ(B)ε_t`,
//! generated by passing an ARMA series through the truncated MA(∞) filter of
//! `(1−B)^{−d}`. GARCH series follow the usual variance recursion
//! `σ²_t = α_0 + Σ α_i Y²_{t−i} + Σ β_j σ²_{t−j}`.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ar_sieve::companion_spectral_radius;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub const DEFAULT_BURN_IN: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DgpFamily {
    Ar,
    Ma,
    Arma,
    Arima,
    Arfima,
    Garch,
}

impl DgpFamily {
    pub const ALL: [DgpFamily; 6] = [
        DgpFamily::Ar,
        DgpFamily::Ma,
        DgpFamily::Arma,
        DgpFamily::Arima,
        DgpFamily::Arfima,
        DgpFamily::Garch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DgpFamily::Ar => "AR",
            DgpFamily::Ma => "MA",
            DgpFamily::Arma => "ARMA",
            DgpFamily::Arima => "ARIMA",
            DgpFamily::Arfima => "ARFIMA",
            DgpFamily::Garch => "GARCH",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ar" => Ok(DgpFamily::Ar),
            "ma" => Ok(DgpFamily::Ma),
            "arma" => Ok(DgpFamily::Arma),
            "arima" => Ok(DgpFamily::Arima),
            "arfima" => Ok(DgpFamily::Arfima),
            "garch" => Ok(DgpFamily::Garch),
            other => Err(Error::invalid(format!("unknown DGP family {other:?}"))),
        }
    }
}

impl fmt::Display for DgpFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub alpha0: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl GarchParams {
    pub fn persistence(&self) -> f64 {
        self.alpha.iter().sum::<f64>() + self.beta.iter().sum::<f64>()
    }

    pub fn unconditional_variance(&self) -> f64 {
        self.alpha0 / (1.0 - self.persistence())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DgpSpec {
    pub family: DgpFamily,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    /// Integration order: 1 for ARIMA, fractional for ARFIMA, 0 otherwise.
    pub d: f64,
    pub garch: Option<GarchParams>,
    pub burn_in: usize,
}

impl DgpSpec {
    fn base(family: DgpFamily) -> Self {
        Self {
            family,
            ar: Vec::new(),
            ma: Vec::new(),
            d: 0.0,
            garch: None,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn ar(phi: &[f64]) -> Self {
        Self {
            ar: phi.to_vec(),
            ..Self::base(DgpFamily::Ar)
        }
    }

    pub fn ma(theta: &[f64]) -> Self {
        Self {
            ma: theta.to_vec(),
            ..Self::base(DgpFamily::Ma)
        }
    }

    pub fn arma(phi: &[f64], theta: &[f64]) -> Self {
        Self {
            ar: phi.to_vec(),
            ma: theta.to_vec(),
            ..Self::base(DgpFamily::Arma)
        }
    }

    pub fn arima(phi: &[f64], theta: &[f64]) -> Self {
        Self {
            ar: phi.to_vec(),
            ma: theta.to_vec(),
            d: 1.0,
            ..Self::base(DgpFamily::Arima)
        }
    }

    pub fn arfima(phi: &[f64], theta: &[f64], d: f64) -> Self {
        Self {
            ar: phi.to_vec(),
            ma: theta.to_vec(),
            d,
            ..Self::base(DgpFamily::Arfima)
        }
    }

    pub fn garch(alpha0: f64, alpha: &[f64], beta: &[f64]) -> Self {
        Self {
            garch: Some(GarchParams {
                alpha0,
                alpha: alpha.to_vec(),
                beta: beta.to_vec(),
            }),
            ..Self::base(DgpFamily::Garch)
        }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    /// The 24 distinct benchmark configurations (the duplicated ARMA entry
    /// `(0.7, 0.1)` of the published list appears once).
    pub fn benchmark_suite() -> Vec<DgpSpec> {
        let mut specs = Vec::with_capacity(24);
        for phi in [0.2, -0.2, 0.5, -0.5, 0.8, -0.8] {
            specs.push(Self::ar(&[phi]));
        }
        for theta in [0.2, -0.2, 0.5, -0.5, 0.8, -0.8] {
            specs.push(Self::ma(&[theta]));
        }
        for (phi, theta) in [(-0.4, -0.2), (-0.3, 0.4), (0.1, 0.3), (0.1, 0.7), (0.7, 0.1)] {
            specs.push(Self::arma(&[phi], &[theta]));
        }
        for (phi, theta) in [(0.1, 0.3), (0.7, 0.1), (0.1, 0.7)] {
            specs.push(Self::arima(&[phi], &[theta]));
        }
        for (phi, theta) in [(0.3, 0.4), (0.7, 0.2)] {
            specs.push(Self::arfima(&[phi], &[theta], 0.3));
        }
        specs.push(Self::garch(0.01, &[0.3], &[0.6]));
        specs.push(Self::garch(0.01, &[0.05], &[0.9]));
        specs
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        if !finite(&self.ar) || !finite(&self.ma) || !self.d.is_finite() {
            return Err(Error::invalid("DGP coefficients must be finite"));
        }
        match self.family {
            DgpFamily::Ar | DgpFamily::Ma | DgpFamily::Arma => {
                if self.d != 0.0 {
                    return Err(Error::invalid(format!(
                        "{} process must have d = 0, got {}",
                        self.family, self.d
                    )));
                }
                check_stationary(&self.ar)
            }
            DgpFamily::Arima => {
                if self.d != 1.0 {
                    return Err(Error::invalid(format!(
                        "only ARIMA with d = 1 is supported, got d = {}",
                        self.d
                    )));
                }
                check_stationary(&self.ar)
            }
            DgpFamily::Arfima => {
                // d = 0 is accepted and reduces to the ARMA generator.
                if !(0.0..0.5).contains(&self.d) {
                    return Err(Error::invalid(format!(
                        "ARFIMA requires 0 <= d < 0.5, got {}",
                        self.d
                    )));
                }
                check_stationary(&self.ar)
            }
            DgpFamily::Garch => {
                let g = self
                    .garch
                    .as_ref()
                    .ok_or_else(|| Error::invalid("GARCH family requires GARCH parameters"))?;
                if !(g.alpha0 > 0.0) {
                    return Err(Error::invalid(format!(
                        "GARCH requires alpha0 > 0, got {}",
                        g.alpha0
                    )));
                }
                if g.alpha.iter().chain(&g.beta).any(|c| !(*c >= 0.0)) {
                    return Err(Error::invalid("GARCH coefficients must be nonnegative"));
                }
                if !(g.persistence() < 1.0) {
                    return Err(Error::invalid(format!(
                        "GARCH requires sum(alpha) + sum(beta) < 1, got {}",
                        g.persistence()
                    )));
                }
                Ok(())
            }
        }
    }

    /// Dispatches to the generator for this family.
    pub fn generate<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Result<TimeSeries> {
        match self.family {
            DgpFamily::Ar | DgpFamily::Ma | DgpFamily::Arma => gen_arma(self, len, rng),
            DgpFamily::Arima => gen_arima(self, len, rng),
            DgpFamily::Arfima => gen_arfima(self, len, rng),
            DgpFamily::Garch => gen_garch(self, len, rng),
        }
    }

    /// Compact parameter label, e.g. `phi1=0.7;theta1=0.1`. Contains no commas.
    pub fn params_label(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.ar.iter().enumerate() {
            parts.push(format!("phi{}={c}", i + 1));
        }
        for (i, c) in self.ma.iter().enumerate() {
            parts.push(format!("theta{}={c}", i + 1));
        }
        if self.family == DgpFamily::Arfima || self.family == DgpFamily::Arima {
            parts.push(format!("d={}", self.d));
        }
        if let Some(g) = &self.garch {
            parts.push(format!("alpha0={}", g.alpha0));
            for (i, c) in g.alpha.iter().enumerate() {
                parts.push(format!("alpha{}={c}", i + 1));
            }
            for (i, c) in g.beta.iter().enumerate() {
                parts.push(format!("beta{}={c}", i + 1));
            }
        }
        if parts.is_empty() {
            "white".to_string()
        } else {
            parts.join(";")
        }
    }
}

impl fmt::Display for DgpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.params_label())
    }
}

fn check_stationary(phi: &[f64]) -> Result<()> {
    if phi.is_empty() {
        return Ok(());
    }
    let modulus = companion_spectral_radius(phi);
    if modulus < 1.0 {
        Ok(())
    } else {
        Err(Error::NonStationary { modulus })
    }
}

/// ARMA recursion from zero pre-sample values; returns `total` observations.
fn arma_raw<R: Rng + ?Sized>(phi: &[f64], theta: &[f64], total: usize, rng: &mut R) -> Vec<f64> {
    let mut y = Vec::with_capacity(total);
    let mut eps = Vec::with_capacity(total);
    for t in 0..total {
        let e: f64 = rng.sample(StandardNormal);
        let mut v = e;
        for (i, c) in phi.iter().enumerate() {
            if t > i {
                v += c * y[t - 1 - i];
            }
        }
        for (j, c) in theta.iter().enumerate() {
            if t > j {
                v -= c * eps[t - 1 - j];
            }
        }
        eps.push(e);
        y.push(v);
    }
    y
}

pub fn gen_arma<R: Rng + ?Sized>(spec: &DgpSpec, len: usize, rng: &mut R) -> Result<TimeSeries> {
    if !matches!(spec.family, DgpFamily::Ar | DgpFamily::Ma | DgpFamily::Arma) {
        return Err(Error::invalid(format!(
            "gen_arma expects an AR, MA or ARMA spec, got {}",
            spec.family
        )));
    }
    spec.validate()?;
    arma_series(spec, len, rng)
}

fn arma_series<R: Rng + ?Sized>(spec: &DgpSpec, len: usize, rng: &mut R) -> Result<TimeSeries> {
    if len == 0 {
        return Err(Error::invalid("series length must be positive"));
    }
    let raw = arma_raw(&spec.ar, &spec.ma, spec.burn_in + len, rng);
    TimeSeries::new(raw[spec.burn_in..].to_vec())
}

/// MA(∞) weights of `(1−B)^{−d}`: `ψ_0 = 1`, `ψ_k = ψ_{k−1}(k−1+d)/k`.
pub fn frac_diff_weights(d: f64, n: usize) -> Result<Vec<f64>> {
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::invalid(format!(
            "fractional order must satisfy 0 < d < 0.5, got {d}"
        )));
    }
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for k in 1..=n {
        let prev = w[k - 1];
        w.push(prev * (k as f64 - 1.0 + d) / k as f64);
    }
    Ok(w)
}

pub fn gen_arfima<R: Rng + ?Sized>(spec: &DgpSpec, len: usize, rng: &mut R) -> Result<TimeSeries> {
    if spec.family != DgpFamily::Arfima {
        return Err(Error::invalid(format!(
            "gen_arfima expects an ARFIMA spec, got {}",
            spec.family
        )));
    }
    spec.validate()?;
    if len == 0 {
        return Err(Error::invalid("series length must be positive"));
    }
    let total = spec.burn_in + len;
    let x = arma_raw(&spec.ar, &spec.ma, total, rng);
    if spec.d == 0.0 {
        return TimeSeries::new(x[spec.burn_in..].to_vec());
    }
    let psi = frac_diff_weights(spec.d, total)?;
    let out: Vec<f64> = (spec.burn_in..total)
        .map(|t| (0..=t).map(|k| psi[k] * x[t - k]).sum())
        .collect();
    TimeSeries::new(out)
}

/// Integrated ARMA(p, q) with `d = 1`: the running sum of an ARMA series.
pub fn gen_arima<R: Rng + ?Sized>(spec: &DgpSpec, len: usize, rng: &mut R) -> Result<TimeSeries> {
    if spec.family != DgpFamily::Arima {
        return Err(Error::invalid(format!(
            "gen_arima expects an ARIMA spec, got {}",
            spec.family
        )));
    }
    spec.validate()?;
    let x = arma_series(spec, len, rng)?;
    let mut acc = 0.0;
    let y = x
        .values()
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    TimeSeries::new(y)
}

pub fn gen_garch<R: Rng + ?Sized>(spec: &DgpSpec, len: usize, rng: &mut R) -> Result<TimeSeries> {
    if spec.family != DgpFamily::Garch {
        return Err(Error::invalid(format!(
            "gen_garch expects a GARCH spec, got {}",
            spec.family
        )));
    }
    spec.validate()?;
    if len == 0 {
        return Err(Error::invalid("series length must be positive"));
    }
    let g = spec.garch.as_ref().expect("validated");
    let p = g.alpha.len();
    let q = g.beta.len();
    let uncond = g.unconditional_variance();
    let total = spec.burn_in + len;
    // pre-sample squared observations and variances sit at the unconditional level
    let pad = p.max(q);
    let mut y2 = vec![uncond; pad];
    let mut s2 = vec![uncond; pad];
    let mut out = Vec::with_capacity(len);
    for t in 0..total {
        let i = pad + t;
        let mut var = g.alpha0;
        for (k, a) in g.alpha.iter().enumerate() {
            var += a * y2[i - 1 - k];
        }
        for (k, b) in g.beta.iter().enumerate() {
            var += b * s2[i - 1 - k];
        }
        let e: f64 = rng.sample(StandardNormal);
        let y = var.sqrt() * e;
        y2.push(y * y);
        s2.push(var);
        if t >= spec.burn_in {
            out.push(y);
        }
    }
    TimeSeries::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{sample_acf, sample_acvf, sample_mean, RngStream};

    fn variance(xs: &[f64]) -> f64 {
        sample_acvf(xs, 0).unwrap()[0]
    }

    #[test]
    fn suite_has_24_distinct_valid_configs() {
        let suite = DgpSpec::benchmark_suite();
        assert_eq!(suite.len(), 24);
        for s in &suite {
            s.validate().unwrap();
        }
        let mut labels: Vec<String> = suite.iter().map(|s| s.to_string()).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 24);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            DgpSpec::ar(&[1.0]).validate(),
            Err(Error::NonStationary { .. })
        ));
        assert!(DgpSpec::ar(&[0.5, 0.6]).validate().is_err());
        assert!(DgpSpec::ar(&[0.5, 0.3]).validate().is_ok());
        assert!(DgpSpec::garch(0.0, &[0.1], &[0.1]).validate().is_err());
        assert!(DgpSpec::garch(0.1, &[0.5], &[0.5]).validate().is_err());
        assert!(DgpSpec::arfima(&[0.1], &[], 0.5).validate().is_err());
        let mut bad = DgpSpec::arima(&[0.1], &[0.1]);
        bad.d = 2.0;
        assert!(bad.validate().is_err());
        let mut rng = RngStream::new(0, 0);
        assert!(gen_arma(&DgpSpec::ar(&[1.2]), 10, &mut rng).is_err());
        assert!(gen_arma(&DgpSpec::garch(0.1, &[0.1], &[0.1]), 10, &mut rng).is_err());
    }

    #[test]
    fn white_noise_variance() {
        let mut rng = RngStream::new(11, 0);
        let s = gen_arma(&DgpSpec::ar(&[]), 1000, &mut rng).unwrap();
        assert_eq!(s.len(), 1000);
        let v = variance(s.values());
        assert!((v - 1.0).abs() < 0.15, "var = {v}");
    }

    #[test]
    fn ar1_lag1_autocorrelation() {
        let mut rng = RngStream::new(12, 0);
        let s = gen_arma(&DgpSpec::ar(&[0.8]), 1000, &mut rng).unwrap();
        let r = sample_acf(s.values(), 1).unwrap();
        assert!((r - 0.8).abs() < 0.05, "rho1 = {r}");
    }

    #[test]
    fn ma1_uses_minus_sign_convention() {
        let mut rng = RngStream::new(13, 0);
        let s = gen_arma(&DgpSpec::ma(&[0.8]), 1000, &mut rng).unwrap();
        let r = sample_acf(s.values(), 1).unwrap();
        let expected = -0.8 / (1.0 + 0.64);
        assert!((r - expected).abs() < 0.05, "rho1 = {r}, expected {expected}");
    }

    #[test]
    fn frac_weights_recursion() {
        let w = frac_diff_weights(0.3, 2).unwrap();
        assert_eq!(w[0], 1.0);
        assert!((w[1] - 0.3).abs() < 1e-15);
        assert!((w[2] - 0.195).abs() < 1e-15);
        assert_eq!(frac_diff_weights(0.1, 0).unwrap(), vec![1.0]);
        assert!(frac_diff_weights(0.0, 3).is_err());
        assert!(frac_diff_weights(0.5, 3).is_err());

        let long = frac_diff_weights(0.3, 1000).unwrap();
        assert!(long.iter().all(|w| *w > 0.0));
        for k in 2..long.len() {
            assert!(long[k] < long[k - 1]);
        }
    }

    #[test]
    fn arfima_with_zero_d_matches_arma() {
        let arfima = DgpSpec::arfima(&[0.7], &[0.2], 0.0);
        let arma = DgpSpec::arma(&[0.7], &[0.2]);
        let a = gen_arfima(&arfima, 300, &mut RngStream::new(5, 1)).unwrap();
        let b = gen_arma(&arma, 300, &mut RngStream::new(5, 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn arfima_has_longer_memory_than_matched_ar() {
        let lag = 20;
        let mut slower = 0;
        for seed in 0..10 {
            let fi = gen_arfima(&DgpSpec::arfima(&[0.7], &[0.2], 0.3), 1000, &mut RngStream::new(seed, 0)).unwrap();
            let ar = gen_arma(&DgpSpec::ar(&[0.7]), 1000, &mut RngStream::new(seed, 1)).unwrap();
            if sample_acf(fi.values(), lag).unwrap() > sample_acf(ar.values(), lag).unwrap() {
                slower += 1;
            }
        }
        assert!(slower >= 9, "only {slower}/10 series showed slower decay");
    }

    #[test]
    fn fractional_noise_variance() {
        // Var of ARFIMA(0, d, 0) with unit innovations is Γ(1−2d)/Γ(1−d)².
        use statrs::function::gamma::gamma;
        let d = 0.3;
        let expected = gamma(1.0 - 2.0 * d) / gamma(1.0 - d).powi(2);
        assert!((expected - 1.3165).abs() < 1e-3);
        let spec = DgpSpec::arfima(&[], &[], d);
        let mut total = 0.0;
        let reps = 4;
        for seed in 0..reps {
            let s = gen_arfima(&spec, 5000, &mut RngStream::new(100 + seed, 0)).unwrap();
            total += variance(s.values());
        }
        let v = total / reps as f64;
        assert!((v / expected - 1.0).abs() < 0.10, "var = {v}, expected {expected}");
    }

    #[test]
    fn arima_random_walk_and_differencing() {
        let spec = DgpSpec::arima(&[], &[]);
        let reps = 400;
        let len = 100;
        let mut sum_sq = 0.0;
        for seed in 0..reps {
            let s = gen_arima(&spec, len, &mut RngStream::new(seed, 0)).unwrap();
            sum_sq += s.last().powi(2);
        }
        let var = sum_sq / reps as f64;
        assert!((var / len as f64 - 1.0).abs() < 0.2, "Var(Y_T) = {var}");

        let spec = DgpSpec::arima(&[0.7], &[0.1]);
        let y = gen_arima(&spec, 500, &mut RngStream::new(3, 3)).unwrap();
        let x = gen_arma(&DgpSpec::arma(&[0.7], &[0.1]), 500, &mut RngStream::new(3, 3)).unwrap();
        let y = y.values();
        assert_eq!(y[0], x.values()[0]);
        for t in 1..y.len() {
            let diff = y[t] - y[t - 1];
            assert!((diff - x.values()[t]).abs() <= 1e-12 * y[t].abs().max(1.0));
        }
    }

    #[test]
    fn arima_difference_acf_matches_arma11() {
        let (phi, theta) = (0.7, 0.1);
        // ARMA(1,1) with Y_t = φY_{t−1} + e_t − θe_{t−1}
        let rho1 = (1.0 - phi * theta) * (phi - theta) / (1.0 + theta * theta - 2.0 * phi * theta);
        let y = gen_arima(&DgpSpec::arima(&[phi], &[theta]), 2000, &mut RngStream::new(21, 0)).unwrap();
        let diffs: Vec<f64> = y.values().windows(2).map(|w| w[1] - w[0]).collect();
        let r = sample_acf(&diffs, 1).unwrap();
        assert!((r - rho1).abs() < 0.05, "rho1 = {r}, expected {rho1}");
    }

    #[test]
    fn garch_unconditional_variance() {
        let spec = DgpSpec::garch(0.01, &[0.05], &[0.9]);
        let s = gen_garch(&spec, 5000, &mut RngStream::new(31, 0)).unwrap();
        let v = variance(s.values());
        assert!((v / 0.2 - 1.0).abs() < 0.3, "var = {v}");
    }

    #[test]
    fn degenerate_garch_is_iid_normal() {
        let spec = DgpSpec::garch(0.5, &[0.0], &[0.0]);
        let a = gen_garch(&spec, 2000, &mut RngStream::new(4, 4)).unwrap();
        let v = variance(a.values());
        assert!((v / 0.5 - 1.0).abs() < 0.1, "var = {v}");
        assert!(sample_acf(a.values(), 1).unwrap().abs() < 0.07);
    }

    #[test]
    fn garch_is_white_in_levels_not_in_squares() {
        let spec = DgpSpec::garch(0.01, &[0.3], &[0.6]);
        let s = gen_garch(&spec, 5000, &mut RngStream::new(32, 0)).unwrap();
        let r = sample_acf(s.values(), 1).unwrap();
        let sq: Vec<f64> = s.values().iter().map(|v| v * v).collect();
        let r2 = sample_acf(&sq, 1).unwrap();
        assert!(r.abs() < 0.05, "rho1 = {r}");
        assert!(r2 > 0.1, "rho1 of squares = {r2}");
    }

    #[test]
    fn generators_are_deterministic_and_centered() {
        for spec in DgpSpec::benchmark_suite() {
            let a = spec.generate(400, &mut RngStream::new(77, 1)).unwrap();
            let b = spec.generate(400, &mut RngStream::new(77, 1)).unwrap();
            assert_eq!(a, b, "{spec}");
            assert_eq!(a.len(), 400);
            if spec.family == DgpFamily::Arima {
                continue;
            }
            let len = 4000.0;
            let s = spec.generate(len as usize, &mut RngStream::new(78, 1)).unwrap();
            let mean = sample_mean(s.values()).unwrap();
            // Var(mean) uses the long-run variance, not Var(Y_t)
            let gain = (1.0 - spec.ma.iter().sum::<f64>()) / (1.0 - spec.ar.iter().sum::<f64>());
            let var_mean = match spec.family {
                DgpFamily::Garch => spec.garch.as_ref().unwrap().unconditional_variance() / len,
                DgpFamily::Arfima => {
                    use statrs::function::gamma::gamma;
                    let d = spec.d;
                    let c = gamma(1.0 - 2.0 * d) / (gamma(d) * gamma(1.0 - d) * d * (2.0 * d + 1.0));
                    c * gain * gain * len.powf(2.0 * d - 1.0)
                }
                _ => gain * gain / len,
            };
            assert!(mean.abs() < 4.0 * var_mean.sqrt(), "{spec}: mean {mean}");
        }
    }
}
