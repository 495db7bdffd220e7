//! Random forests for time series forecasting with bootstrap variants,
//! including the AR-sieve bootstrap, plus the simulators and Monte Carlo
//! study used to compare them against a Yule-Walker AR baseline.

// `!(x > 0.0)` comparisons deliberately reject NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ar_sieve;
pub mod block_bootstrap;
pub mod dgp;
pub mod error;
pub mod forecast;
pub mod forest;
pub mod series;
pub mod study;

pub use ar_sieve::{fit_ar, levinson_durbin, select_order_aic, yw_forecast, ArFit, ArOrder};
pub use block_bootstrap::{BootstrapKind, ResampleStrategy};
pub use dgp::{DgpFamily, DgpSpec, GarchParams};
pub use error::{Error, Result};
pub use forecast::{recursive_forecast, ForecastResult, OneStepPredictor};
pub use forest::{fit_forest, Forest, ForestConfig, Tree};
pub use series::{RngStream, TimeSeries};
pub use study::{run_benchmark, BenchConfig, BenchOutput, BenchRecord, Model};
