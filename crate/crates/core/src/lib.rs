//! Gallery ranking for person re-identification. Each gallery image is a
//! binary node of a fully connected CRF: unary costs come from weighted
//! probe-to-image distances and edges carry a learned mixture of Gaussian
//! kernels over image features. Mean-field marginals rank the gallery.
//!
//! Start with [`synth::synth_generate`] for a dataset,
//! [`learning::train`] for parameters, [`potentials::build_crf_problem`] and
//! [`inference::infer_marginals`] for one probe, and
//! [`evaluation::evaluate_method`] for the full protocol.

pub mod bench;
pub mod cli;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod inference;
pub mod learning;
pub mod potentials;
mod rng;
pub mod synth;

pub use error::{Error, Result};
