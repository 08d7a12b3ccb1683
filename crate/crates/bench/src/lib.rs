//! Shared fixtures for the benchmarks.

use chronoscale_core::{ScaleFunction, TimeScale};

/// Dense pieces interleaved with lattice clusters on `[0, 10]`.
pub fn mixed_scale() -> TimeScale {
    let pieces = [
        TimeScale::interval(0.0, 1.0).unwrap(),
        TimeScale::lattice(2.0, 4.0, 0.5).unwrap(),
        TimeScale::interval(5.0, 7.0).unwrap(),
        TimeScale::geometric(1.25, 8.0, 10.0).unwrap(),
    ];
    TimeScale::union(pieces.iter()).unwrap()
}

pub fn lattice(n: usize) -> TimeScale {
    TimeScale::lattice(0.0, n as f64, 1.0).unwrap()
}

pub fn func(text: &str) -> ScaleFunction {
    ScaleFunction::parse(text).unwrap()
}
