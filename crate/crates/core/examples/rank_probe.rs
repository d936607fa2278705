//! Ranks a gallery for one probe with and without the pairwise term.
//!
//!     cargo run --example rank_probe

use reid_crf::data::Dataset;
use reid_crf::evaluation::{baseline_params, max_f_score, precision_recall_curve, rank_order};
use reid_crf::inference::{infer_marginals, InferenceSettings};
use reid_crf::learning::{train, TrainConfig};
use reid_crf::potentials::{build_crf_problem_on, Params};
use reid_crf::synth::{synth_generate, SyntheticSpec};

fn show(dataset: &Dataset, probe: usize, gallery: &[usize], params: &Params, label: &str) -> reid_crf::Result<()> {
    let query = dataset.probe_from_image(probe)?;
    let problem = build_crf_problem_on(
        &query,
        dataset,
        gallery,
        &params.unary(),
        &params.pairwise(),
        params.alpha,
    )?;
    let result = infer_marginals(&problem, &InferenceSettings::default())?;
    let person = &dataset.images()[probe].person;
    let relevant: Vec<usize> = (0..gallery.len())
        .filter(|&i| &dataset.images()[gallery[i]].person == person)
        .collect();
    let max_f = max_f_score(&precision_recall_curve(&result.marginals.q, &relevant)?);
    println!(
        "{label} (alpha = {}, {} sweeps, max-F {max_f:.4})",
        params.alpha, result.iterations
    );
    for (rank, i) in rank_order(&result.marginals.q).into_iter().take(8).enumerate() {
        let image = &dataset.images()[gallery[i]];
        let hit = if &image.person == person { "*" } else { " " };
        println!(
            "  {:>2}. {hit} {:<8} q = {:.4}",
            rank + 1,
            image.id,
            result.marginals.q[i]
        );
    }
    Ok(())
}

fn main() -> reid_crf::Result<()> {
    let dataset = synth_generate(&SyntheticSpec::benchmark(3))?;
    let persons = dataset.persons();
    let (train_persons, test_persons) = persons.split_at(32);
    let trained = train(&dataset, train_persons, &TrainConfig::for_dataset(&dataset, 3))?;

    // Probe: first image of the first test person; gallery: the other test images.
    let by_person = dataset.images_by_person();
    let probe = by_person[test_persons[0].as_str()][0];
    let gallery: Vec<usize> = test_persons
        .iter()
        .flat_map(|p| by_person[p.as_str()].iter().copied())
        .filter(|&i| i != probe)
        .collect();
    println!(
        "probe {} against {} gallery images; * marks a match\n",
        dataset.images()[probe].id,
        gallery.len()
    );

    show(
        &dataset,
        probe,
        &gallery,
        &baseline_params(&trained.params),
        "unary only",
    )?;
    println!();
    show(&dataset, probe, &gallery, &trained.params, "with pairwise term")?;
    Ok(())
}
