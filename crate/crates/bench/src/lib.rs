//! Fixtures shared by the criterion benchmarks.

use sieveforest::{DgpSpec, RngStream, TimeSeries};

/// AR(1) series with `phi = 0.8`, the workhorse input of every benchmark.
pub fn ar1_series(len: usize, seed: u64) -> TimeSeries {
    DgpSpec::ar(&[0.8])
        .generate(len, &mut RngStream::new(seed, 0))
        .expect("valid AR(1) spec")
}
