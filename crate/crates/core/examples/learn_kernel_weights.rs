//! Fits simplex-constrained kernel weights: first on a planted problem with
//! known weights, then on training pairs from the synthetic benchmark.
//!
//!     cargo run --example learn_kernel_weights

use std::collections::BTreeMap;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reid_crf::learning::{
    candidate_kernels, kernel_design_matrix, kkt_residual, learn_kernel_weights, sample_training_pairs, WidthGridSpec,
};
use reid_crf::synth::{synth_generate, SyntheticSpec};

fn main() -> reid_crf::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let planted = [0.5, 0.3, 0.2, 0.0];
    let design = Array2::from_shape_fn((500, 4), |_| rng.random::<f64>());
    let gt: Vec<f64> = design
        .rows()
        .into_iter()
        .map(|r| r.iter().zip(&planted).map(|(a, b)| a * b).sum())
        .collect();
    let w = learn_kernel_weights(design.view(), &gt)?;
    println!("planted  {planted:?}");
    println!(
        "learned  {:?}",
        w.iter().map(|x| (x * 1e6).round() / 1e6).collect::<Vec<_>>()
    );
    println!("KKT residual {:.1e}\n", kkt_residual(design.view(), &gt, &w));

    let dataset = synth_generate(&SyntheticSpec::benchmark(5))?;
    let persons = dataset.persons();
    let pairs = sample_training_pairs(&dataset, &persons[..32], 5)?;
    let channels = vec!["texture".to_string(), "colour".to_string()];
    let candidates = candidate_kernels(&channels, &WidthGridSpec::default(), &BTreeMap::new())?;
    let design = kernel_design_matrix(&dataset, &pairs, &candidates)?;
    let gt: Vec<f64> = pairs.iter().map(|p| p.gt as f64).collect();
    let w = learn_kernel_weights(design.view(), &gt)?;
    println!(
        "{} pairs ({} positive)",
        pairs.len(),
        pairs.iter().filter(|p| p.gt == 1).count()
    );
    for (c, w) in candidates.iter().zip(&w) {
        println!("  {:<8} sigma {:>5}: {w:.4}", c.channel, c.sigma);
    }
    Ok(())
}
