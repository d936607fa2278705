//! The full protocol on the synthetic benchmark: per run, train kernel
//! weights and alpha on 4/5 of the persons, then score one probe per test
//! person against the rest of the test images.
//!
//!     cargo run --release --example evaluate_protocol -- [seed] [runs]

use reid_crf::evaluation::{run_means, ProtocolOptions};
use reid_crf::learning::{evaluate_pipeline, TrainConfig};
use reid_crf::synth::{synth_generate, SyntheticSpec};

fn main() -> reid_crf::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(1);
    let runs: usize = args.next().map(|s| s.parse().expect("runs")).unwrap_or(5);

    let dataset = synth_generate(&SyntheticSpec::benchmark(seed))?;
    let config = TrainConfig::for_dataset(&dataset, seed);
    let result = evaluate_pipeline(&dataset, &config, &ProtocolOptions::new(runs, seed))?;

    let trained = run_means(&result.trained.report);
    let baseline = run_means(&result.baseline.report);
    println!("run  alpha  baseline     crf");
    for (run, params) in result.trained.report.settings.params.iter().enumerate() {
        println!(
            "{run:>3} {:>6} {:>9.4} {:>7.4}",
            params.alpha, baseline[&run], trained[&run]
        );
    }
    let (b, t) = (result.baseline.report.mean_max_f, result.trained.report.mean_max_f);
    println!("mean        {b:>9.4} {t:>7.4}   gain {:+.4}", t - b);
    Ok(())
}
