//! Generates the clustered benchmark, writes it to disk and reads it back.
//!
//!     cargo run --example synthesize -- [seed] [out-dir]

use std::path::PathBuf;

use reid_crf::data::{load_dataset, save_dataset};
use reid_crf::synth::{synth_generate, SyntheticSpec};

fn main() -> reid_crf::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(7);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join(format!("reid-crf-synth-{seed}")));

    let spec = SyntheticSpec::benchmark(seed);
    let dataset = synth_generate(&spec)?;
    let manifest = save_dataset(&dataset, &out)?;
    println!(
        "{} images, {} persons -> {}",
        dataset.len(),
        dataset.persons().len(),
        manifest.display()
    );

    let reloaded = load_dataset(&manifest)?;
    for channel in reloaded.channels() {
        let v = channel.as_vector().expect("benchmark channels are vectors");
        println!(
            "  {:<8} dim {:>2}  metric {:?}  standardized {}",
            channel.name(),
            v.dim(),
            v.metric,
            v.standardization.is_some()
        );
    }
    assert_eq!(
        reloaded.vector_channel("texture")?.raw,
        dataset.vector_channel("texture")?.raw
    );
    println!("reload is bit-exact");
    Ok(())
}
