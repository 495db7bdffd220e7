//! Recursive multi-step forecasting.

use crate::ar_sieve::ArFit;
use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::series::TimeSeries;

/// A model that predicts the next value from its `lag_count()` most recent
/// observations, passed most recent first.
pub trait OneStepPredictor {
    fn lag_count(&self) -> usize;
    fn predict_one(&self, lags: &[f64]) -> Result<f64>;
}

impl OneStepPredictor for Forest {
    fn lag_count(&self) -> usize {
        Forest::lag_count(self)
    }

    fn predict_one(&self, lags: &[f64]) -> Result<f64> {
        self.predict(lags)
    }
}

impl OneStepPredictor for ArFit {
    fn lag_count(&self) -> usize {
        self.order
    }

    fn predict_one(&self, lags: &[f64]) -> Result<f64> {
        Ok(self.predict_next(lags))
    }
}

impl<P: OneStepPredictor + ?Sized> OneStepPredictor for &P {
    fn lag_count(&self) -> usize {
        (**self).lag_count()
    }

    fn predict_one(&self, lags: &[f64]) -> Result<f64> {
        (**self).predict_one(lags)
    }
}

/// Feeds each prediction back as the newest lag; one model call per step.
pub fn recursive_forecast<P: OneStepPredictor + ?Sized>(
    model: &P,
    history: &TimeSeries,
    h: usize,
) -> Result<Vec<f64>> {
    if h < 1 {
        return Err(Error::invalid("forecast horizon must be at least 1"));
    }
    let l = model.lag_count();
    if history.len() < l {
        return Err(Error::TooShort {
            len: history.len(),
            reason: format!("forecasting needs at least {l} observations"),
        });
    }
    let mut window: Vec<f64> = history.values()[history.len() - l..].to_vec();
    let mut lags = vec![0.0; l];
    let mut out = Vec::with_capacity(h);
    for _ in 0..h {
        for (k, slot) in lags.iter_mut().enumerate() {
            *slot = window[window.len() - 1 - k];
        }
        let y = model.predict_one(&lags)?;
        out.push(y);
        if l > 0 {
            window.remove(0);
            window.push(y);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    pub horizon: usize,
    pub predictions: Vec<f64>,
    pub truth: Option<Vec<f64>>,
    pub squared_errors: Option<Vec<f64>>,
}

impl ForecastResult {
    pub fn new(predictions: Vec<f64>) -> Self {
        Self {
            horizon: predictions.len(),
            predictions,
            truth: None,
            squared_errors: None,
        }
    }

    pub fn with_truth(mut self, truth: Vec<f64>) -> Result<Self> {
        if truth.len() != self.horizon {
            return Err(Error::Dimension {
                expected: self.horizon,
                actual: truth.len(),
            });
        }
        self.squared_errors = Some(
            self.predictions
                .iter()
                .zip(&truth)
                .map(|(p, t)| (p - t) * (p - t))
                .collect(),
        );
        self.truth = Some(truth);
        Ok(self)
    }
}
