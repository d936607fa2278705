//! Kernel-width grids, balanced training pairs, simplex-constrained kernel
//! weights and cross-validated selection of `alpha`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::evaluation::{
    baseline_params, evaluate_run, max_f_score, mean, precision_recall_curve, rotating_splits, summarize, Evaluation,
    ProtocolOptions, SplitMode,
};
use crate::inference::{infer_marginals, InferenceSettings};
use crate::potentials::{build_crf_problem_on, squared_distance, KernelSpec, PairwiseConfig, Params, UnaryConfig};
use crate::rng::{stream_rng, Stream};

/// Ridge added to the least-squares objective so that duplicate kernels
/// share weight evenly.
pub const RIDGE: f64 = 1e-8;

pub const DEFAULT_ALPHA_GRID: [f64; 7] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthGridSpec {
    pub lambda: f64,
    pub i_low: u32,
    pub j_high: u32,
}

impl Default for WidthGridSpec {
    fn default() -> Self {
        WidthGridSpec {
            lambda: 1.0,
            i_low: 2,
            j_high: 1,
        }
    }
}

/// `lambda * 2^k` for `k = -i_low ..= j_high`.
pub fn width_grid(spec: &WidthGridSpec) -> Result<Vec<f64>> {
    if !(spec.lambda > 0.0 && spec.lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be positive, got {}", spec.lambda)));
    }
    let low = -(spec.i_low as i32);
    Ok((low..=spec.j_high as i32).map(|k| spec.lambda * 2f64.powi(k)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrainingPair {
    pub i: usize,
    pub j: usize,
    /// 1 when both images show the same person.
    pub gt: u8,
}

/// All same-person pairs among `persons`, plus as many different-person
/// pairs drawn uniformly without replacement.
pub fn sample_training_pairs(dataset: &Dataset, persons: &[String], seed: u64) -> Result<Vec<TrainingPair>> {
    let by_person = dataset.images_by_person();
    let wanted: BTreeSet<&str> = persons.iter().map(String::as_str).collect();
    let mut images = Vec::new();
    let mut positives = Vec::new();
    for person in &wanted {
        let list = by_person
            .get(person)
            .ok_or_else(|| Error::invalid(format!("unknown person `{person}`")))?;
        for (a, &i) in list.iter().enumerate() {
            for &j in &list[a + 1..] {
                positives.push(TrainingPair { i, j, gt: 1 });
            }
        }
        images.extend(list.iter().copied());
    }
    if positives.is_empty() {
        return Err(Error::NoPositivePairs);
    }
    images.sort_unstable();
    let m = images.len();
    let total = m * (m - 1) / 2;
    let negatives_available = total - positives.len();
    if negatives_available < positives.len() {
        return Err(Error::invalid(format!(
            "{} positive pairs but only {negatives_available} negative pairs",
            positives.len()
        )));
    }

    let person = |i: usize| dataset.images()[i].person.as_str();
    let mut rng = stream_rng(seed, Stream::Pairs, 0);
    let mut negatives = BTreeSet::new();
    while negatives.len() < positives.len() {
        let a = rng.random_range(0..m);
        let b = rng.random_range(0..m);
        if a == b {
            continue;
        }
        let (i, j) = (images[a.min(b)], images[a.max(b)]);
        if person(i) != person(j) {
            negatives.insert(TrainingPair { i, j, gt: 0 });
        }
    }
    positives.sort_unstable();
    positives.extend(negatives);
    Ok(positives)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCandidate {
    pub channel: String,
    pub sigma: f64,
}

/// One candidate per (channel, width), channels in the given order.
pub fn candidate_kernels(
    channels: &[String],
    grid: &WidthGridSpec,
    overrides: &BTreeMap<String, WidthGridSpec>,
) -> Result<Vec<KernelCandidate>> {
    let mut out = Vec::new();
    for c in channels {
        for sigma in width_grid(overrides.get(c).unwrap_or(grid))? {
            out.push(KernelCandidate {
                channel: c.clone(),
                sigma,
            });
        }
    }
    Ok(out)
}

/// Entry `(p, m)` is kernel `m` evaluated on the features of pair `p`.
pub fn kernel_design_matrix(
    dataset: &Dataset,
    pairs: &[TrainingPair],
    candidates: &[KernelCandidate],
) -> Result<Array2<f64>> {
    let mut features = Vec::with_capacity(candidates.len());
    for c in candidates {
        if !(c.sigma > 0.0 && c.sigma.is_finite()) {
            return Err(Error::invalid(format!(
                "kernel width must be positive, got {}",
                c.sigma
            )));
        }
        features.push(&dataset.vector_channel(&c.channel)?.features);
    }
    let n = dataset.len();
    for p in pairs {
        for index in [p.i, p.j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, len: n });
            }
        }
    }
    Ok(Array2::from_shape_fn((pairs.len(), candidates.len()), |(p, m)| {
        let f = features[m];
        let d2 = squared_distance(f.row(pairs[p].i), f.row(pairs[p].j));
        (-d2 / candidates[m].sigma).exp()
    }))
}

/// Euclidean projection onto `{w : w >= 0, sum w = 1}`.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        cumulative += x;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn gradient(design: ArrayView2<'_, f64>, gt: &[f64], w: &[f64]) -> Vec<f64> {
    let residual: Vec<f64> = design
        .rows()
        .into_iter()
        .zip(gt)
        .map(|(row, g)| row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() - g)
        .collect();
    (0..w.len())
        .map(|m| {
            let col = design.column(m);
            2.0 * col.iter().zip(&residual).map(|(a, r)| a * r).sum::<f64>() + 2.0 * RIDGE * w[m]
        })
        .collect()
}

/// `max |w - P(w - grad f(w))|`, zero exactly at the constrained optimum.
pub fn kkt_residual(design: ArrayView2<'_, f64>, gt: &[f64], w: &[f64]) -> f64 {
    let g = gradient(design, gt, w);
    let step: Vec<f64> = w.iter().zip(&g).map(|(a, b)| a - b).collect();
    project_to_simplex(&step)
        .iter()
        .zip(w)
        .map(|(p, x)| (p - x).abs())
        .fold(0.0, f64::max)
}

/// Ridged least-squares objective `|D w - gt|^2 + RIDGE |w|^2`.
pub fn weight_objective(design: ArrayView2<'_, f64>, gt: &[f64], w: &[f64]) -> f64 {
    let fit: f64 = design
        .rows()
        .into_iter()
        .zip(gt)
        .map(|(row, g)| (row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() - g).powi(2))
        .sum();
    fit + RIDGE * w.iter().map(|x| x * x).sum::<f64>()
}

/// Minimizes `|D w - gt|^2 + RIDGE |w|^2` over the probability simplex with a
/// primal active-set method started from the uniform weights.
pub fn learn_kernel_weights(design: ArrayView2<'_, f64>, gt: &[f64]) -> Result<Vec<f64>> {
    let (p, m) = design.dim();
    if p == 0 || m == 0 {
        return Err(Error::invalid("design matrix needs at least one pair and one kernel"));
    }
    if gt.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: gt.len(),
        });
    }
    if design.iter().chain(gt).any(|x| !x.is_finite()) {
        return Err(Error::invalid("non-finite entry in the design matrix or targets"));
    }
    if m == 1 {
        return Ok(vec![1.0]);
    }

    // Quadratic model 1/2 w'Qw + c'w.
    let d = DMatrix::from_fn(p, m, |r, c| design[(r, c)]);
    let g = DVector::from_column_slice(gt);
    let q = (d.transpose() * &d + DMatrix::identity(m, m) * RIDGE) * 2.0;
    let c = d.transpose() * g * -2.0;
    let scale = 1.0 + q.amax() + c.amax();

    let mut w = DVector::from_element(m, 1.0 / m as f64);
    let mut fixed = vec![false; m];
    for _ in 0..50 * m + 100 {
        let free: Vec<usize> = (0..m).filter(|&i| !fixed[i]).collect();
        let k = free.len();
        let mut kkt = DMatrix::zeros(k + 1, k + 1);
        let mut rhs = DVector::zeros(k + 1);
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                kkt[(a, b)] = q[(i, j)];
            }
            kkt[(a, k)] = -1.0;
            kkt[(k, a)] = 1.0;
            rhs[a] = -c[i];
        }
        rhs[k] = 1.0;
        let sol = kkt
            .full_piv_lu()
            .solve(&rhs)
            .ok_or_else(|| Error::invalid("singular weight-learning system"))?;
        let nu = sol[k];
        let mut target = DVector::zeros(m);
        for (a, &i) in free.iter().enumerate() {
            target[i] = sol[a];
        }

        // Largest feasible step toward the subproblem optimum.
        let mut step = 1.0;
        let mut blocking = None;
        for &i in &free {
            let dir = target[i] - w[i];
            if dir < 0.0 && target[i] < 0.0 {
                let t = w[i] / -dir;
                if t < step {
                    step = t;
                    blocking = Some(i);
                }
            }
        }
        w += (&target - &w) * step;
        if let Some(i) = blocking {
            w[i] = 0.0;
            fixed[i] = true;
            continue;
        }

        // At the subproblem optimum: release the bound with the most negative multiplier.
        let grad = &q * &w + &c;
        let release = (0..m)
            .filter(|&i| fixed[i])
            .map(|i| (i, grad[i] - nu))
            .filter(|&(_, mu)| mu < -1e-14 * scale)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match release {
            Some((i, _)) => fixed[i] = false,
            None => {
                let mut out: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
                let total: f64 = out.iter().sum();
                out.iter_mut().for_each(|x| *x /= total);
                return Ok(out);
            }
        }
    }
    Err(Error::invalid("weight learning did not terminate"))
}

/// Mean held-out max-F for each candidate alpha.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSelection {
    pub alpha: f64,
    pub scores: Vec<(f64, f64)>,
}

/// Cross-validates `alpha` over person-disjoint folds of `train_persons`.
/// Each fold's held-out persons form the galleries of its probe trials; the
/// score of an alpha is the mean over folds of the fold's mean max-F. Ties go
/// to the smaller alpha.
#[allow(clippy::too_many_arguments)]
pub fn select_alpha(
    dataset: &Dataset,
    train_persons: &[String],
    unary: &UnaryConfig,
    pairwise: &PairwiseConfig,
    alpha_grid: &[f64],
    folds: usize,
    seed: u64,
    settings: &InferenceSettings,
) -> Result<AlphaSelection> {
    if alpha_grid.is_empty() {
        return Err(Error::invalid("alpha grid is empty"));
    }
    if let Some(a) = alpha_grid.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
        return Err(Error::invalid(format!("alpha {a} is not a finite non-negative number")));
    }
    let mut grid = alpha_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let protocol = ProtocolOptions {
        runs: folds,
        seed,
        split_mode: SplitMode::Rotating,
        all_probes: false,
    };
    let splits = rotating_splits(train_persons, folds, seed)?;
    let mut fold_scores = vec![Vec::new(); grid.len()];
    for (f, split) in splits.iter().enumerate() {
        let trials = match protocol.trials(dataset, split, f) {
            Ok(t) => t,
            Err(Error::InfeasibleSplit(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut per_alpha = vec![Vec::with_capacity(trials.len()); grid.len()];
        for trial in &trials {
            let probe = dataset.probe_from_image(trial.probe)?;
            let base = build_crf_problem_on(&probe, dataset, &trial.gallery, unary, pairwise, 0.0)?;
            for (a, &alpha) in grid.iter().enumerate() {
                let problem = base.with_alpha(alpha)?;
                let q = infer_marginals(&problem, settings)?.marginals.q;
                per_alpha[a].push(max_f_score(&precision_recall_curve(&q, &trial.relevant)?));
            }
        }
        for (a, scores) in per_alpha.into_iter().enumerate() {
            fold_scores[a].push(mean(scores));
        }
    }
    if fold_scores[0].is_empty() {
        return Err(Error::InfeasibleSplit(
            "no fold has a person with two or more images".into(),
        ));
    }
    let scores: Vec<(f64, f64)> = grid.iter().zip(fold_scores).map(|(&a, s)| (a, mean(s))).collect();
    let mut best = scores[0];
    for &s in &scores[1..] {
        if s.1 > best.1 {
            best = s;
        }
    }
    Ok(AlphaSelection { alpha: best.0, scores })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub unary: UnaryConfig,
    /// Channels carrying pairwise kernels; all vector channels when empty.
    pub kernel_channels: Vec<String>,
    pub grid: WidthGridSpec,
    #[serde(default)]
    pub grid_overrides: BTreeMap<String, WidthGridSpec>,
    pub alpha_grid: Vec<f64>,
    pub cv_folds: usize,
    pub seed: u64,
    pub inference: InferenceSettings,
}

impl TrainConfig {
    /// Uniform unary weights over every channel and kernels on every vector channel.
    pub fn for_dataset(dataset: &Dataset, seed: u64) -> Self {
        let names: Vec<&str> = dataset.channels().iter().map(|c| c.name()).collect();
        TrainConfig {
            unary: UnaryConfig::uniform(&names),
            kernel_channels: Vec::new(),
            grid: WidthGridSpec::default(),
            grid_overrides: BTreeMap::new(),
            alpha_grid: DEFAULT_ALPHA_GRID.to_vec(),
            cv_folds: 5,
            seed,
            inference: InferenceSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: Params,
    pub pairs: usize,
    pub alpha_scores: Vec<(f64, f64)>,
}

/// Pairs, design matrix, simplex weights and alpha, all from `train_persons`.
pub fn train(dataset: &Dataset, train_persons: &[String], config: &TrainConfig) -> Result<TrainOutcome> {
    config.unary.validate()?;
    let channels: Vec<String> = if config.kernel_channels.is_empty() {
        dataset
            .channels()
            .iter()
            .filter(|c| c.as_vector().is_some())
            .map(|c| c.name().to_string())
            .collect()
    } else {
        config.kernel_channels.clone()
    };
    if channels.is_empty() {
        return Err(Error::invalid("no vector channel available for pairwise kernels"));
    }
    let candidates = candidate_kernels(&channels, &config.grid, &config.grid_overrides)?;
    let pairs = sample_training_pairs(dataset, train_persons, config.seed)?;
    let design = kernel_design_matrix(dataset, &pairs, &candidates)?;
    let gt: Vec<f64> = pairs.iter().map(|p| p.gt as f64).collect();
    let weights = learn_kernel_weights(design.view(), &gt)?;
    let pairwise = PairwiseConfig {
        kernels: candidates
            .iter()
            .zip(&weights)
            .map(|(c, &weight)| KernelSpec {
                channel: c.channel.clone(),
                sigma: c.sigma,
                weight,
            })
            .collect(),
    };
    let selection = select_alpha(
        dataset,
        train_persons,
        &config.unary,
        &pairwise,
        &config.alpha_grid,
        config.cv_folds,
        config.seed,
        &config.inference,
    )?;
    let params = Params {
        unary_weights: config.unary.channel_weights.clone(),
        kernels: pairwise.kernels,
        alpha: selection.alpha,
    };
    params.validate()?;
    Ok(TrainOutcome {
        params,
        pairs: pairs.len(),
        alpha_scores: selection.scores,
    })
}

/// Protocol results with parameters retrained on every run's training persons,
/// next to the unary-only baseline on the same trials.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineEvaluation {
    pub trained: Evaluation,
    pub baseline: Evaluation,
}

/// Runs the evaluation protocol, training kernel weights and `alpha` afresh on
/// the training persons of each run before scoring its test persons.
pub fn evaluate_pipeline(
    dataset: &Dataset,
    config: &TrainConfig,
    protocol: &ProtocolOptions,
) -> Result<PipelineEvaluation> {
    let splits = protocol.splits(dataset)?;
    let mut trained_params = Vec::with_capacity(splits.len());
    let mut baseline_runs = Vec::with_capacity(splits.len());
    let mut trained_trials = Vec::new();
    let mut baseline_trials = Vec::new();
    for (run, split) in splits.iter().enumerate() {
        let run_config = TrainConfig {
            seed: config.seed.wrapping_add(run as u64),
            ..config.clone()
        };
        let params = train(dataset, &split.train_persons, &run_config)?.params;
        let baseline = baseline_params(&params);
        trained_trials.extend(evaluate_run(dataset, &params, &config.inference, protocol, run, split)?);
        baseline_trials.extend(evaluate_run(
            dataset,
            &baseline,
            &config.inference,
            protocol,
            run,
            split,
        )?);
        trained_params.push(params);
        baseline_runs.push(baseline);
    }
    Ok(PipelineEvaluation {
        trained: summarize(trained_trials, &splits, trained_params, &config.inference, protocol),
        baseline: summarize(baseline_trials, &splits, baseline_runs, &config.inference, protocol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ChannelKind, ChannelSpec, ImageRecord, Metric, RawChannel};
    use ndarray::array;

    fn dataset(counts: &[usize]) -> Dataset {
        let mut images = Vec::new();
        for (p, &c) in counts.iter().enumerate() {
            for k in 0..c {
                images.push(ImageRecord {
                    id: format!("p{p}_{k}"),
                    person: format!("p{p}"),
                });
            }
        }
        let n = images.len();
        let feats = Array2::from_shape_fn((n, 2), |(i, j)| ((i * 7 + j * 3) % 5) as f64 * 0.3);
        let spec = ChannelSpec {
            name: "f".into(),
            kind: ChannelKind::Vector,
            dim: Some(2),
            metric: Some(Metric::Euclidean),
            standardize: false,
            file: "f.csv".into(),
        };
        Dataset::new(images, vec![(spec, RawChannel::Matrix(feats))]).unwrap()
    }

    fn persons(n: usize) -> Vec<String> {
        (0..n).map(|p| format!("p{p}")).collect()
    }

    #[test]
    fn grid_examples() {
        let g = |lambda, i_low, j_high| width_grid(&WidthGridSpec { lambda, i_low, j_high }).unwrap();
        assert_eq!(g(1.0, 1, 1), vec![0.5, 1.0, 2.0]);
        assert_eq!(g(4.0, 0, 0), vec![4.0]);
        assert_eq!(g(2.0, 2, 3), vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0]);
        assert!(width_grid(&WidthGridSpec {
            lambda: 0.0,
            i_low: 0,
            j_high: 0
        })
        .is_err());
    }

    #[test]
    fn pair_counts() {
        let pairs = sample_training_pairs(&dataset(&[2, 2]), &persons(2), 1).unwrap();
        assert_eq!(pairs.iter().filter(|p| p.gt == 1).count(), 2);
        assert_eq!(pairs.iter().filter(|p| p.gt == 0).count(), 2);

        let pairs = sample_training_pairs(&dataset(&[3, 1, 1, 1]), &persons(4), 1).unwrap();
        assert_eq!(pairs.iter().filter(|p| p.gt == 1).count(), 3);
        assert_eq!(pairs.iter().filter(|p| p.gt == 0).count(), 3);

        let d = dataset(&[3; 20]);
        assert_eq!(
            sample_training_pairs(&d, &persons(20), 8).unwrap(),
            sample_training_pairs(&d, &persons(20), 8).unwrap()
        );
        assert!(matches!(
            sample_training_pairs(&dataset(&[1, 1]), &persons(2), 0),
            Err(Error::NoPositivePairs)
        ));
    }

    #[test]
    fn design_matrix_entries() {
        let d = dataset(&[2, 2]);
        let pairs = vec![TrainingPair { i: 0, j: 1, gt: 1 }, TrainingPair { i: 1, j: 3, gt: 0 }];
        let cands = vec![
            KernelCandidate {
                channel: "f".into(),
                sigma: 0.5,
            },
            KernelCandidate {
                channel: "f".into(),
                sigma: 2.0,
            },
        ];
        let m = kernel_design_matrix(&d, &pairs, &cands).unwrap();
        let f = &d.vector_channel("f").unwrap().features;
        for (p, pair) in pairs.iter().enumerate() {
            for (k, c) in cands.iter().enumerate() {
                let a = f.row(pair.i).to_vec();
                let b = f.row(pair.j).to_vec();
                let expected = crate::potentials::gaussian_kernel(&a, &b, c.sigma).unwrap();
                assert!((m[(p, k)] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_kernel_gets_all_weight() {
        assert_eq!(
            learn_kernel_weights(array![[0.3], [0.9]].view(), &[1.0, 0.0]).unwrap(),
            vec![1.0]
        );
    }

    #[test]
    fn planted_column_is_recovered() {
        let d = array![[0.9, 0.2, 0.5], [0.1, 0.8, 0.4], [0.6, 0.3, 0.9], [0.2, 0.7, 0.1]];
        let gt: Vec<f64> = d.column(1).to_vec();
        let w = learn_kernel_weights(d.view(), &gt).unwrap();
        assert!((w[1] - 1.0).abs() < 1e-4 && w[0] < 1e-4 && w[2] < 1e-4, "{w:?}");
        assert!(weight_objective(d.view(), &gt, &w) < 1e-7);
        assert!(kkt_residual(d.view(), &gt, &w) < 1e-8);
    }

    #[test]
    fn duplicate_columns_split_evenly() {
        let d = array![[0.9, 0.9], [0.1, 0.1], [0.5, 0.5]];
        let w = learn_kernel_weights(d.view(), &[0.9, 0.1, 0.5]).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-4 && (w[1] - 0.5).abs() < 1e-4, "{w:?}");
    }

    #[test]
    fn simplex_projection_examples() {
        assert_eq!(project_to_simplex(&[0.2, 0.3, 0.5]), vec![0.2, 0.3, 0.5]);
        assert_eq!(project_to_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_to_simplex(&[1.0, 1.0, 1.0]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn single_alpha_grid() {
        let d = dataset(&[3; 10]);
        let pairwise = PairwiseConfig {
            kernels: vec![KernelSpec {
                channel: "f".into(),
                sigma: 1.0,
                weight: 1.0,
            }],
        };
        let sel = select_alpha(
            &d,
            &persons(10),
            &UnaryConfig::uniform(&["f"]),
            &pairwise,
            &[0.0],
            2,
            3,
            &InferenceSettings::default(),
        )
        .unwrap();
        assert_eq!(sel.alpha, 0.0);
        assert!(select_alpha(
            &d,
            &persons(10),
            &UnaryConfig::uniform(&["f"]),
            &pairwise,
            &[],
            2,
            3,
            &InferenceSettings::default()
        )
        .is_err());
    }
}
