//! Perturbation toolbox: bumps and retractions, single-step patches, the
//! inductive chain and its robustness probe.

mod chain;
mod constructions;
pub(crate) mod primitives;
mod probe;

pub use chain::{
    build_chain, build_chain_with, ChainChecks, ChainConstants, ChainOptions, ChainReport, StepChecks, StepKind,
    SIGMA_FLOOR,
};
pub use constructions::{
    attract_projection, isolate_fixed_point, point_blend, remove_fixed_point_near, verify_spike, FixRemoval, Isolation,
    SpikeChecks, SpikeConstruction,
};
pub use primitives::{build_l, bump_lambda, bump_mu, retract, retract_toward, LMap};
pub use probe::{robustness_probe, ProbeOutcome, ProbeReport};
