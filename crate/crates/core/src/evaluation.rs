//! Person-disjoint splits, probe trials, precision-recall curves and the
//! averaged max-F protocol.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::inference::{infer_marginals, InferenceSettings};
use crate::potentials::{build_crf_problem_on, Params};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train_persons: Vec<String>,
    pub test_persons: Vec<String>,
    pub seed: u64,
}

/// Number of test persons for a population of `n`: a fifth, rounded, at least one.
pub fn test_person_count(n: usize) -> usize {
    ((n as f64 / 5.0).round() as usize).max(1)
}

/// Random person-level split with a fifth of the persons held out.
pub fn split_by_person(dataset: &Dataset, seed: u64) -> Result<SplitPlan> {
    split_persons(&dataset.persons(), seed, 0)
}

fn split_persons(persons: &[String], seed: u64, run: u64) -> Result<SplitPlan> {
    if persons.len() < 2 {
        return Err(Error::InfeasibleSplit(format!(
            "need at least 2 persons, found {}",
            persons.len()
        )));
    }
    let mut shuffled = persons.to_vec();
    shuffled.sort();
    shuffled.shuffle(&mut stream_rng(seed, Stream::Split, run));
    let k = test_person_count(persons.len());
    let mut test_persons = shuffled[..k].to_vec();
    let mut train_persons = shuffled[k..].to_vec();
    test_persons.sort();
    train_persons.sort();
    Ok(SplitPlan {
        train_persons,
        test_persons,
        seed,
    })
}

/// `folds` person-disjoint splits whose test sets partition the persons.
pub fn rotating_splits(persons: &[String], folds: usize, seed: u64) -> Result<Vec<SplitPlan>> {
    if folds < 2 {
        return Err(Error::InfeasibleSplit(format!("need at least 2 folds, got {folds}")));
    }
    if persons.len() < folds {
        return Err(Error::InfeasibleSplit(format!(
            "{} persons cannot fill {folds} folds",
            persons.len()
        )));
    }
    let mut shuffled = persons.to_vec();
    shuffled.sort();
    shuffled.shuffle(&mut stream_rng(seed, Stream::Folds, 0));
    let n = shuffled.len();
    Ok((0..folds)
        .map(|f| {
            let (lo, hi) = (f * n / folds, (f + 1) * n / folds);
            let mut test_persons = shuffled[lo..hi].to_vec();
            let mut train_persons: Vec<String> = shuffled[..lo].iter().chain(&shuffled[hi..]).cloned().collect();
            test_persons.sort();
            train_persons.sort();
            SplitPlan {
                train_persons,
                test_persons,
                seed,
            }
        })
        .collect())
}

/// One probe against a gallery of dataset images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeTrial {
    /// Dataset index of the probe image.
    pub probe: usize,
    /// Dataset indices of the gallery, ascending.
    pub gallery: Vec<usize>,
    /// Positions within `gallery` showing the probe's person.
    pub relevant: Vec<usize>,
}

/// One random probe per test person with at least two images; the gallery is
/// every other test-person image.
pub fn make_probe_trials(dataset: &Dataset, test_persons: &[String], seed: u64) -> Result<Vec<ProbeTrial>> {
    probe_trials(dataset, test_persons, seed, 0, false)
}

fn probe_trials(
    dataset: &Dataset,
    test_persons: &[String],
    seed: u64,
    run: u64,
    all_probes: bool,
) -> Result<Vec<ProbeTrial>> {
    let by_person = dataset.images_by_person();
    let mut pool = BTreeSet::new();
    for person in test_persons {
        let images = by_person
            .get(person.as_str())
            .ok_or_else(|| Error::invalid(format!("unknown person `{person}`")))?;
        pool.extend(images.iter().copied());
    }
    let mut rng = stream_rng(seed, Stream::Probes, run);
    let mut trials = Vec::new();
    for person in test_persons {
        let images = &by_person[person.as_str()];
        if images.len() < 2 {
            continue;
        }
        let probes: Vec<usize> = if all_probes {
            images.clone()
        } else {
            vec![images[rng.random_range(0..images.len())]]
        };
        for probe in probes {
            let gallery: Vec<usize> = pool.iter().copied().filter(|&i| i != probe).collect();
            let relevant = gallery
                .iter()
                .enumerate()
                .filter(|(_, &g)| g != probe && dataset.images()[g].person == *person)
                .map(|(pos, _)| pos)
                .collect();
            trials.push(ProbeTrial {
                probe,
                gallery,
                relevant,
            });
        }
    }
    if trials.is_empty() {
        return Err(Error::InfeasibleSplit("no test person has two or more images".into()));
    }
    Ok(trials)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    /// Prefix length, starting at 1.
    pub rank: usize,
    pub precision: f64,
    pub recall: f64,
}

impl PrPoint {
    pub fn f_score(&self) -> f64 {
        let s = self.precision + self.recall;
        if s == 0.0 {
            0.0
        } else {
            2.0 * self.precision * self.recall / s
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
    pub relevant_total: usize,
}

/// Item indices by descending score, ties by ascending index.
pub fn rank_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

pub fn precision_recall_curve(scores: &[f64], relevant: &[usize]) -> Result<PrCurve> {
    let n = scores.len();
    if let Some(s) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::invalid(format!("non-finite score {s}")));
    }
    let mut is_relevant = vec![false; n];
    for &r in relevant {
        let slot = is_relevant
            .get_mut(r)
            .ok_or(Error::IndexOutOfRange { index: r, len: n })?;
        *slot = true;
    }
    let relevant_total = is_relevant.iter().filter(|&&r| r).count();
    if relevant_total == 0 {
        return Err(Error::invalid("relevant set is empty"));
    }
    let mut hits = 0usize;
    let points = rank_order(scores)
        .into_iter()
        .enumerate()
        .map(|(k, item)| {
            if is_relevant[item] {
                hits += 1;
            }
            PrPoint {
                rank: k + 1,
                precision: hits as f64 / (k + 1) as f64,
                recall: hits as f64 / relevant_total as f64,
            }
        })
        .collect();
    Ok(PrCurve { points, relevant_total })
}

pub fn max_f_score(curve: &PrCurve) -> f64 {
    curve.points.iter().map(PrPoint::f_score).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// An independent random split per run.
    Resample,
    /// Disjoint test folds covering every person once.
    Rotating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    pub runs: usize,
    pub seed: u64,
    pub split_mode: SplitMode,
    /// Use every image of a test person as a probe instead of one at random.
    pub all_probes: bool,
}

impl ProtocolOptions {
    pub fn new(runs: usize, seed: u64) -> Self {
        ProtocolOptions {
            runs,
            seed,
            split_mode: SplitMode::Resample,
            all_probes: false,
        }
    }

    /// The person splits of every run.
    pub fn splits(&self, dataset: &Dataset) -> Result<Vec<SplitPlan>> {
        if self.runs == 0 {
            return Err(Error::invalid("at least one run is required"));
        }
        match self.split_mode {
            SplitMode::Resample => (0..self.runs)
                .map(|r| split_persons(&dataset.persons(), self.seed, r as u64))
                .collect(),
            SplitMode::Rotating => rotating_splits(&dataset.persons(), self.runs, self.seed),
        }
    }

    pub fn trials(&self, dataset: &Dataset, split: &SplitPlan, run: usize) -> Result<Vec<ProbeTrial>> {
        probe_trials(dataset, &split.test_persons, self.seed, run as u64, self.all_probes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeScore {
    pub run: usize,
    pub probe_id: String,
    pub max_f: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    /// Parameters used in each run, indexed by run.
    pub params: Vec<Params>,
    pub inference: InferenceSettings,
    pub protocol: ProtocolOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mean_max_f: f64,
    pub runs: usize,
    pub per_probe: Vec<ProbeScore>,
    pub test_persons: Vec<Vec<String>>,
    pub settings: EvalSettings,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Everything computed for one trial, for export.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub run: usize,
    pub probe_id: String,
    pub gallery_ids: Vec<String>,
    pub marginals: Vec<f64>,
    pub curve: PrCurve,
    pub max_f: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: EvalReport,
    pub trials: Vec<TrialOutcome>,
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = values.into_iter().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Scores one trial: builds its CRF, infers marginals, and ranks the gallery.
pub fn run_trial(
    dataset: &Dataset,
    params: &Params,
    settings: &InferenceSettings,
    trial: &ProbeTrial,
    run: usize,
) -> Result<TrialOutcome> {
    let probe = dataset.probe_from_image(trial.probe)?;
    let problem = build_crf_problem_on(
        &probe,
        dataset,
        &trial.gallery,
        &params.unary(),
        &params.pairwise(),
        params.alpha,
    )?;
    let result = infer_marginals(&problem, settings)?;
    let curve = precision_recall_curve(&result.marginals.q, &trial.relevant)?;
    Ok(TrialOutcome {
        run,
        probe_id: probe.probe_id,
        gallery_ids: trial.gallery.iter().map(|&g| dataset.images()[g].id.clone()).collect(),
        marginals: result.marginals.q,
        max_f: max_f_score(&curve),
        curve,
        iterations: result.iterations,
        converged: result.converged,
    })
}

/// All trials of run `run` on `split`.
pub fn evaluate_run(
    dataset: &Dataset,
    params: &Params,
    settings: &InferenceSettings,
    protocol: &ProtocolOptions,
    run: usize,
    split: &SplitPlan,
) -> Result<Vec<TrialOutcome>> {
    params.validate()?;
    settings.validate()?;
    protocol
        .trials(dataset, split, run)?
        .iter()
        .map(|t| run_trial(dataset, params, settings, t, run))
        .collect()
}

/// Collects per-run trials into a report. `params[r]` is what run `r` used.
pub fn summarize(
    trials: Vec<TrialOutcome>,
    splits: &[SplitPlan],
    params: Vec<Params>,
    settings: &InferenceSettings,
    protocol: &ProtocolOptions,
) -> Evaluation {
    let per_probe: Vec<ProbeScore> = trials
        .iter()
        .map(|t| ProbeScore {
            run: t.run,
            probe_id: t.probe_id.clone(),
            max_f: t.max_f,
            iterations: t.iterations,
            converged: t.converged,
        })
        .collect();
    let report = EvalReport {
        mean_max_f: mean(per_probe.iter().map(|p| p.max_f)),
        runs: splits.len(),
        per_probe,
        test_persons: splits.iter().map(|s| s.test_persons.clone()).collect(),
        settings: EvalSettings {
            params,
            inference: *settings,
            protocol: *protocol,
        },
    };
    Evaluation { report, trials }
}

/// Runs the full protocol with fixed parameters: per run a person split,
/// probe trials on the test persons, inference per trial, and max-F averaged
/// over every probe of every run.
pub fn evaluate_method(
    dataset: &Dataset,
    params: &Params,
    settings: &InferenceSettings,
    protocol: &ProtocolOptions,
) -> Result<Evaluation> {
    let splits = protocol.splits(dataset)?;
    let mut trials = Vec::new();
    for (run, split) in splits.iter().enumerate() {
        trials.extend(evaluate_run(dataset, params, settings, protocol, run, split)?);
    }
    let per_run = vec![params.clone(); splits.len()];
    Ok(summarize(trials, &splits, per_run, settings, protocol))
}

/// The same protocol with every parameter's `alpha` forced to 0.
pub fn baseline_params(params: &Params) -> Params {
    Params {
        alpha: 0.0,
        ..params.clone()
    }
}

/// Per-run mean max-F, keyed by run index.
pub fn run_means(report: &EvalReport) -> BTreeMap<usize, f64> {
    let mut grouped: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for p in &report.per_probe {
        grouped.entry(p.run).or_default().push(p.max_f);
    }
    grouped.into_iter().map(|(r, v)| (r, mean(v))).collect()
}
