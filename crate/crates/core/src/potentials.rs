//! Unary and pairwise potentials of the gallery CRF.
//!
//! The unary cost of labelling gallery item `i` as the probe's identity is a
//! weighted sum of probe-to-item channel distances; labelling it otherwise
//! costs nothing. The pairwise cost of giving two items different labels is
//! a convex mixture of Gaussian kernels on their features, so only the
//! mixture value `kappa(i, j)` is ever stored.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::data::{ChannelData, Dataset, Metric, ProbeQuery, HISTOGRAM_SUM_TOL};
use crate::error::{Error, Result};

/// Tolerance on the sum of a convex weight vector.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

pub(crate) fn squared_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(squared_distance(ArrayView1::from(a), ArrayView1::from(b)).sqrt())
}

fn check_histogram(h: &[f64]) -> Result<()> {
    if h.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::invalid("histogram has a negative or non-finite bin"));
    }
    let sum: f64 = h.iter().sum();
    if (sum - 1.0).abs() > HISTOGRAM_SUM_TOL {
        return Err(Error::invalid(format!("histogram not normalized (sum {sum})")));
    }
    Ok(())
}

fn bhattacharyya_unchecked(h1: ArrayView1<'_, f64>, h2: ArrayView1<'_, f64>) -> f64 {
    let bc: f64 = h1.iter().zip(h2.iter()).map(|(a, b)| (a * b).sqrt()).sum();
    (1.0 - bc.clamp(0.0, 1.0)).sqrt()
}

/// `sqrt(1 - BC)` where `BC` is the Bhattacharyya coefficient, clamped to
/// `[0, 1]` before the outer root.
pub fn bhattacharyya_distance(h1: &[f64], h2: &[f64]) -> Result<f64> {
    check_dims(h1.len(), h2.len())?;
    check_histogram(h1)?;
    check_histogram(h2)?;
    Ok(bhattacharyya_unchecked(ArrayView1::from(h1), ArrayView1::from(h2)))
}

/// `exp(-|a - b|^2 / sigma)`. `sigma` divides the squared norm directly.
pub fn gaussian_kernel(a: &[f64], b: &[f64], sigma: f64) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    check_sigma(sigma)?;
    Ok((-squared_distance(ArrayView1::from(a), ArrayView1::from(b)) / sigma).exp())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!(
            "kernel width must be positive and finite, got {sigma}"
        )));
    }
    Ok(())
}

fn check_convex(weights: impl Iterator<Item = f64>, what: &str) -> Result<()> {
    let mut sum = 0.0;
    let mut count = 0;
    for w in weights {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::invalid(format!(
                "{what}: weight {w} is not a non-negative number"
            )));
        }
        sum += w;
        count += 1;
    }
    if count == 0 {
        return Err(Error::invalid(format!("{what}: no weights")));
    }
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::invalid(format!("{what}: weights sum to {sum}, not 1")));
    }
    Ok(())
}

/// Normalized channel weights of the unary cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnaryConfig {
    pub channel_weights: BTreeMap<String, f64>,
}

impl UnaryConfig {
    /// Equal weights over the given channels.
    pub fn uniform<S: AsRef<str>>(channels: &[S]) -> Self {
        let w = 1.0 / channels.len() as f64;
        UnaryConfig {
            channel_weights: channels.iter().map(|c| (c.as_ref().to_string(), w)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_convex(self.channel_weights.values().copied(), "unary weights")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub channel: String,
    pub sigma: f64,
    pub weight: f64,
}

/// A convex mixture of Gaussian kernels over vector channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseConfig {
    pub kernels: Vec<KernelSpec>,
}

impl PairwiseConfig {
    pub fn validate(&self) -> Result<()> {
        for k in &self.kernels {
            check_sigma(k.sigma)?;
        }
        check_convex(self.kernels.iter().map(|k| k.weight), "kernel weights")
    }

    /// Also checks that every kernel channel is a vector channel of `dataset`.
    pub fn validate_against(&self, dataset: &Dataset) -> Result<()> {
        self.validate()?;
        for k in &self.kernels {
            dataset.vector_channel(&k.channel)?;
        }
        Ok(())
    }
}

/// Contents of a parameter file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub unary_weights: BTreeMap<String, f64>,
    pub kernels: Vec<KernelSpec>,
    pub alpha: f64,
}

impl Params {
    pub fn unary(&self) -> UnaryConfig {
        UnaryConfig {
            channel_weights: self.unary_weights.clone(),
        }
    }

    pub fn pairwise(&self) -> PairwiseConfig {
        PairwiseConfig {
            kernels: self.kernels.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.unary().validate()?;
        self.pairwise().validate()?;
        check_alpha(self.alpha)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let params: Params = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        params.validate()?;
        Ok(params)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("params serialize");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::data::write_file(path, self.to_json().as_bytes())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    Ok(())
}

/// One mixture component bound to the gallery's feature rows.
#[derive(Debug, Clone)]
pub struct ResolvedKernel {
    pub channel: String,
    /// Row `r` is gallery node `r` in the kernel representation.
    pub points: Array2<f64>,
    pub sigma: f64,
    pub weight: f64,
}

impl ResolvedKernel {
    pub fn new(channel: impl Into<String>, points: Array2<f64>, sigma: f64, weight: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::invalid(format!(
                "kernel weight {weight} is not a non-negative number"
            )));
        }
        Ok(ResolvedKernel {
            channel: channel.into(),
            points,
            sigma,
            weight,
        })
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        (-squared_distance(self.points.row(i), self.points.row(j)) / self.sigma).exp()
    }
}

/// A fully materialized inference instance.
#[derive(Debug, Clone)]
pub struct CrfProblem {
    /// Cost of labelling node `i` as a match; the other label costs 0.
    pub unary_cost: Array1<f64>,
    pub kernels: Vec<ResolvedKernel>,
    pub alpha: f64,
}

impl CrfProblem {
    pub fn new(unary_cost: Array1<f64>, kernels: Vec<ResolvedKernel>, alpha: f64) -> Result<Self> {
        if unary_cost.is_empty() {
            return Err(Error::EmptyGallery);
        }
        if let Some(u) = unary_cost.iter().find(|u| !(u.is_finite() && **u >= 0.0)) {
            return Err(Error::invalid(format!(
                "unary cost {u} is not a finite non-negative number"
            )));
        }
        check_alpha(alpha)?;
        for k in &kernels {
            if k.points.nrows() != unary_cost.len() {
                return Err(Error::RowCountMismatch {
                    channel: k.channel.clone(),
                    expected: unary_cost.len(),
                    found: k.points.nrows(),
                });
            }
        }
        Ok(CrfProblem {
            unary_cost,
            kernels,
            alpha,
        })
    }

    pub fn len(&self) -> usize {
        self.unary_cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unary_cost.is_empty()
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(CrfProblem { alpha, ..self.clone() })
    }

    /// Mixture similarity `kappa(i, j)`, the pairwise cost for differing labels.
    pub fn pairwise_similarity(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.len();
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, len: n });
            }
        }
        if i == j {
            return Err(Error::invalid("pairwise similarity needs two distinct nodes"));
        }
        Ok(self.similarity_unchecked(i, j))
    }

    pub(crate) fn similarity_unchecked(&self, i: usize, j: usize) -> f64 {
        // Ordered so that (i, j) and (j, i) sum identically.
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.kernels
            .iter()
            .filter(|k| k.weight > 0.0)
            .map(|k| k.weight * k.value(a, b))
            .sum()
    }
}

enum UnaryTerm<'a> {
    Euclidean {
        probe: Array1<f64>,
        gallery: &'a Array2<f64>,
    },
    Bhattacharyya {
        probe: Array1<f64>,
        gallery: &'a Array2<f64>,
    },
    Precomputed(&'a [f64]),
}

/// Probe-side preparation of the unary cost, validated once per probe.
struct UnaryEvaluator<'a> {
    terms: Vec<(f64, UnaryTerm<'a>)>,
}

impl<'a> UnaryEvaluator<'a> {
    fn new(probe: &'a ProbeQuery, dataset: &'a Dataset, config: &UnaryConfig) -> Result<Self> {
        config.validate()?;
        let n = dataset.len();
        let missing = |channel: &str| Error::MissingChannel {
            probe: probe.probe_id.clone(),
            channel: channel.to_string(),
        };
        let mut terms = Vec::with_capacity(config.channel_weights.len());
        for (name, &weight) in &config.channel_weights {
            let channel = dataset.channel(name)?;
            let term = match &channel.data {
                ChannelData::Vector(v) => {
                    let raw = probe.vectors.get(name).ok_or_else(|| missing(name))?;
                    check_dims(v.dim(), raw.len())?;
                    match v.metric {
                        Metric::Euclidean => UnaryTerm::Euclidean {
                            probe: v.transform_probe(ArrayView1::from(raw.as_slice())),
                            gallery: v.unary_features(),
                        },
                        Metric::Bhattacharyya => {
                            check_histogram(raw)?;
                            UnaryTerm::Bhattacharyya {
                                probe: Array1::from(raw.clone()),
                                gallery: v.unary_features(),
                            }
                        }
                    }
                }
                ChannelData::Precomputed(_) => {
                    let d = probe.precomputed.get(name).ok_or_else(|| missing(name))?;
                    check_dims(n, d.len())?;
                    if d.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                        return Err(Error::invalid(format!(
                            "probe `{}`: channel `{name}` has a negative or non-finite distance",
                            probe.probe_id
                        )));
                    }
                    UnaryTerm::Precomputed(d)
                }
            };
            terms.push((weight, term));
        }
        Ok(UnaryEvaluator { terms })
    }

    fn cost(&self, i: usize) -> f64 {
        self.terms
            .iter()
            .map(|(w, term)| {
                let d = match term {
                    UnaryTerm::Euclidean { probe, gallery } => squared_distance(probe.view(), gallery.row(i)).sqrt(),
                    UnaryTerm::Bhattacharyya { probe, gallery } => {
                        bhattacharyya_unchecked(probe.view(), gallery.row(i))
                    }
                    UnaryTerm::Precomputed(d) => d[i],
                };
                w * d
            })
            .sum()
    }
}

/// Unary cost of labelling gallery item `i` as the probe's identity.
pub fn unary_cost(probe: &ProbeQuery, dataset: &Dataset, config: &UnaryConfig, i: usize) -> Result<f64> {
    if i >= dataset.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: dataset.len(),
        });
    }
    Ok(UnaryEvaluator::new(probe, dataset, config)?.cost(i))
}

/// Builds the CRF over the whole dataset as gallery.
pub fn build_crf_problem(
    probe: &ProbeQuery,
    dataset: &Dataset,
    unary: &UnaryConfig,
    pairwise: &PairwiseConfig,
    alpha: f64,
) -> Result<CrfProblem> {
    let all: Vec<usize> = (0..dataset.len()).collect();
    build_crf_problem_on(probe, dataset, &all, unary, pairwise, alpha)
}

/// Builds the CRF whose nodes are the dataset images listed in `gallery`,
/// in that order.
pub fn build_crf_problem_on(
    probe: &ProbeQuery,
    dataset: &Dataset,
    gallery: &[usize],
    unary: &UnaryConfig,
    pairwise: &PairwiseConfig,
    alpha: f64,
) -> Result<CrfProblem> {
    if gallery.is_empty() {
        return Err(Error::EmptyGallery);
    }
    if let Some(&index) = gallery.iter().find(|&&i| i >= dataset.len()) {
        return Err(Error::IndexOutOfRange {
            index,
            len: dataset.len(),
        });
    }
    pairwise.validate_against(dataset)?;
    let evaluator = UnaryEvaluator::new(probe, dataset, unary)?;
    let unary_cost: Array1<f64> = gallery.iter().map(|&i| evaluator.cost(i)).collect();
    let kernels = pairwise
        .kernels
        .iter()
        .map(|k| {
            let channel = dataset.vector_channel(&k.channel)?;
            ResolvedKernel::new(
                k.channel.clone(),
                channel.features.select(Axis(0), gallery),
                k.sigma,
                k.weight,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    CrfProblem::new(unary_cost, kernels, alpha)
}
