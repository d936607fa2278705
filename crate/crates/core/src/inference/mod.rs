//! Mean-field inference for the fully connected binary CRF.

mod enumerate;
mod exact;
pub mod lattice;
mod mean_field;

pub use enumerate::{exact_joint_enumeration, MAX_ENUMERATION_NODES};
pub use exact::exact_filter;
pub use lattice::{FilterLattice, LatticeOptions, LatticeScratch, Stencil};
pub use mean_field::{
    fixed_point_residual, infer_marginals, init_marginals, logistic, mean_field_sweep, Backend, Inference,
    InferenceSettings, Marginals, MeanField,
};
