//! Timing and accuracy of the lattice filter against the exact sum.

use std::time::Instant;

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::Standardization;
use crate::error::{Error, Result};
use crate::inference::{exact_filter, FilterLattice, LatticeOptions, LatticeScratch};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub dim: usize,
    pub sigma: f64,
    /// Each timing is the fastest of this many repetitions.
    pub repeats: usize,
    pub seed: u64,
    pub lattice: LatticeOptions,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![1000, 2000],
            dim: 3,
            sigma: 1.0,
            repeats: 3,
            seed: 0,
            lattice: LatticeOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub exact_seconds: f64,
    /// Filtering only; the lattice build is timed separately.
    pub lattice_seconds: f64,
    pub build_seconds: f64,
    pub vertices: usize,
    pub mean_relative_error: f64,
    pub max_relative_error: f64,
}

/// `n` standard normal points in `dim` dimensions, standardized per column,
/// and `n` values uniform in `[0, 1)`.
pub fn bench_instance(n: usize, dim: usize, seed: u64) -> (Array2<f64>, Vec<f64>) {
    let mut rng = stream_rng(seed, Stream::Bench, n as u64);
    let raw = Array2::from_shape_simple_fn((n, dim), || rng.sample::<f64, _>(StandardNormal));
    let points = Standardization::fit(raw.view()).apply_matrix(raw.view());
    let values = (0..n).map(|_| rng.random::<f64>()).collect();
    (points, values)
}

/// Mean and max of `|approx - exact| / |exact|` over entries with a nonzero
/// exact value.
pub fn relative_errors(approx: &[f64], exact: &[f64]) -> (f64, f64) {
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    let mut count = 0usize;
    for (a, e) in approx.iter().zip(exact) {
        if *e != 0.0 {
            let r = (a - e).abs() / e.abs();
            sum += r;
            max = max.max(r);
            count += 1;
        }
    }
    if count == 0 {
        (0.0, 0.0)
    } else {
        (sum / count as f64, max)
    }
}

fn fastest<T>(repeats: usize, mut f: impl FnMut() -> T) -> (T, f64) {
    let mut best = f64::INFINITY;
    let mut out = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let v = f();
        best = best.min(start.elapsed().as_secs_f64());
        out = Some(v);
    }
    (out.expect("at least one repeat"), best)
}

pub fn bench_size(n: usize, config: &BenchConfig) -> Result<BenchRow> {
    if n < 2 {
        return Err(Error::invalid(format!("benchmark size must be at least 2, got {n}")));
    }
    let (points, values) = bench_instance(n, config.dim, config.seed);
    let (exact, exact_seconds) = fastest(config.repeats, || exact_filter(points.view(), &values, config.sigma));
    let (lattice, build_seconds) = fastest(config.repeats, || {
        FilterLattice::build(points.view(), config.sigma, &config.lattice)
    });
    let lattice = lattice?;
    let mut scratch = LatticeScratch::default();
    let mut approx = vec![0.0; n];
    let ((), lattice_seconds) = fastest(config.repeats, || {
        lattice.filter_into(&values, &mut approx, &mut scratch)
    });
    let (mean_relative_error, max_relative_error) = relative_errors(&approx, &exact);
    Ok(BenchRow {
        n,
        exact_seconds,
        lattice_seconds,
        build_seconds,
        vertices: lattice.vertex_count(),
        mean_relative_error,
        max_relative_error,
    })
}

pub fn filter_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    if config.sizes.is_empty() {
        return Err(Error::invalid("no benchmark sizes given"));
    }
    config.sizes.iter().map(|&n| bench_size(n, config)).collect()
}
