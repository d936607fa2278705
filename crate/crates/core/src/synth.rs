//! Clustered synthetic datasets: one Gaussian cluster centre per person and
//! channel, with images scattered around it.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{ChannelKind, ChannelSpec, Dataset, DistanceTable, ImageRecord, Metric, RawChannel};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthChannel {
    pub name: String,
    pub dim: usize,
    pub metric: Metric,
    /// Overrides the spec's within-person spread for this channel.
    #[serde(default)]
    pub within_person_spread: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub persons: usize,
    pub images_per_person: usize,
    pub channels: Vec<SynthChannel>,
    pub within_person_spread: f64,
    pub between_person_spread: f64,
    /// Name of an extra precomputed-distance channel, if wanted. Its rows are
    /// Euclidean distances between hidden per-image vectors drawn like the
    /// others, with every image registered as a probe.
    #[serde(default)]
    pub precomputed: Option<String>,
    pub seed: u64,
}

impl SyntheticSpec {
    /// The benchmark used throughout the examples: 40 persons with 5 images,
    /// a fairly clean 8-dimensional Euclidean channel and a noisier 16-bin
    /// histogram channel.
    pub fn benchmark(seed: u64) -> Self {
        SyntheticSpec {
            persons: 40,
            images_per_person: 5,
            channels: vec![
                SynthChannel {
                    name: "texture".into(),
                    dim: 8,
                    metric: Metric::Euclidean,
                    within_person_spread: None,
                },
                SynthChannel {
                    name: "colour".into(),
                    dim: 16,
                    metric: Metric::Bhattacharyya,
                    within_person_spread: Some(2.5),
                },
            ],
            within_person_spread: 0.7,
            between_person_spread: 1.0,
            precomputed: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.persons == 0 || self.images_per_person == 0 {
            return Err(Error::invalid("need at least one person and one image per person"));
        }
        if self.channels.is_empty() && self.precomputed.is_none() {
            return Err(Error::invalid("need at least one channel"));
        }
        if !(self.within_person_spread > 0.0 && self.within_person_spread.is_finite()) {
            return Err(Error::invalid("within-person spread must be positive"));
        }
        if !(self.between_person_spread > 0.0 && self.between_person_spread.is_finite()) {
            return Err(Error::invalid("between-person spread must be positive"));
        }
        for c in &self.channels {
            if c.dim == 0 {
                return Err(Error::invalid(format!("channel `{}` has dimension 0", c.name)));
            }
            if let Some(w) = c.within_person_spread {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::invalid(format!("channel `{}` needs a positive spread", c.name)));
                }
            }
        }
        Ok(())
    }
}

fn clustered(spec: &SyntheticSpec, dim: usize, within: f64, rng: &mut impl Rng) -> Array2<f64> {
    let between = Normal::new(0.0, spec.between_person_spread).expect("positive spread");
    let within = Normal::new(0.0, within).expect("positive spread");
    let n = spec.persons * spec.images_per_person;
    let mut out = Array2::zeros((n, dim));
    for p in 0..spec.persons {
        let centre: Array1<f64> = (0..dim).map(|_| between.sample(rng)).collect();
        for k in 0..spec.images_per_person {
            let mut row = out.row_mut(p * spec.images_per_person + k);
            for (x, c) in row.iter_mut().zip(&centre) {
                *x = c + within.sample(rng);
            }
        }
    }
    out
}

fn softmax_rows(m: &mut Array2<f64>) {
    for mut row in m.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|x| (x - max).exp());
        let total: f64 = row.sum();
        row.mapv_inplace(|x| x / total);
    }
}

/// Builds the dataset in memory. Vector channels are standardized for the
/// pairwise kernels.
pub fn synth_generate(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let images: Vec<ImageRecord> = (0..spec.persons)
        .flat_map(|p| {
            (0..spec.images_per_person).map(move |k| ImageRecord {
                id: format!("p{p:03}_{k}"),
                person: format!("p{p:03}"),
            })
        })
        .collect();
    let mut channels = Vec::new();
    for (c, ch) in spec.channels.iter().enumerate() {
        let mut rng = stream_rng(spec.seed, Stream::Synth, c as u64);
        let within = ch.within_person_spread.unwrap_or(spec.within_person_spread);
        let mut m = clustered(spec, ch.dim, within, &mut rng);
        if ch.metric == Metric::Bhattacharyya {
            softmax_rows(&mut m);
        }
        let channel_spec = ChannelSpec {
            name: ch.name.clone(),
            kind: ChannelKind::Vector,
            dim: Some(ch.dim),
            metric: Some(ch.metric),
            standardize: true,
            file: format!("{}.csv", ch.name),
        };
        channels.push((channel_spec, RawChannel::Matrix(m)));
    }
    if let Some(name) = &spec.precomputed {
        let mut rng = stream_rng(spec.seed, Stream::Synth, spec.channels.len() as u64);
        let hidden = clustered(spec, 4, spec.within_person_spread, &mut rng);
        let n = images.len();
        let rows = Array2::from_shape_fn((n, n), |(a, b)| {
            crate::potentials::squared_distance(hidden.row(a), hidden.row(b)).sqrt()
        });
        let table = DistanceTable::new(images.iter().map(|im| im.id.clone()).collect(), rows)?;
        let channel_spec = ChannelSpec {
            name: name.clone(),
            kind: ChannelKind::PrecomputedDistance,
            dim: None,
            metric: None,
            standardize: false,
            file: format!("{name}.csv"),
        };
        channels.push((channel_spec, RawChannel::Distances(table)));
    }
    Dataset::new(images, channels)
}
