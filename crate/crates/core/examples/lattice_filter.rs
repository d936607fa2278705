//! Gaussian filtering with the permutohedral lattice against the exact
//! quadratic sum, at several widths and sizes.
//!
//!     cargo run --release --example lattice_filter

use reid_crf::bench::{bench_instance, filter_bench, relative_errors, BenchConfig};
use reid_crf::inference::{exact_filter, FilterLattice, LatticeOptions};

fn main() -> reid_crf::Result<()> {
    let (points, values) = bench_instance(2000, 3, 1);
    println!("N = 2000, d = 3");
    for sigma in [0.5, 1.0, 2.0] {
        let lattice = FilterLattice::build(points.view(), sigma, &LatticeOptions::default())?;
        let (mean, max) = relative_errors(&lattice.filter(&values), &exact_filter(points.view(), &values, sigma));
        println!(
            "  sigma {sigma}: {:>6} vertices, mean rel. error {mean:.4}, max {max:.4}",
            lattice.vertex_count()
        );
    }

    let config = BenchConfig {
        sizes: vec![1000, 2000, 4000, 8000],
        seed: 1,
        ..BenchConfig::default()
    };
    println!("\n     N    exact s  lattice s    build s  vertices");
    for r in filter_bench(&config)? {
        println!(
            "{:>6} {:>10.5} {:>10.5} {:>10.5} {:>9}",
            r.n, r.exact_seconds, r.lattice_seconds, r.build_seconds, r.vertices
        );
    }
    Ok(())
}
