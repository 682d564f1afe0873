//! Hyperspace metrics, metric projections, successive-approximation
//! trajectories for set-valued nonexpansive maps, and the explicit
//! perturbation constructions that force unique, regular trajectories.
//!
//! Everything works over a finite-dimensional normed space with one of the
//! norms ℓ1, ℓ2, ℓ∞. Compact sets are finite point clouds, set-valued maps
//! are expression trees with a certified Lipschitz bound carried on every
//! node.
//!
//! Module map:
//! - [`space`]: points, norms, convex bounded domains.
//! - [`hyperspace`]: finite compact sets, Pompeiu–Hausdorff distance,
//!   metric projection.
//! - [`mapping`]: set-valued maps as expression trees.
//! - [`perturbation`]: bump functions, retractions, spike and fixed-point
//!   patches, the inductive chain and its robustness probe.
//! - [`trajectory`]: successive approximations and regularity checks.
//! - [`porosity`]: unique-projection witnesses for compact sets.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hyperspace;
pub mod mapping;
pub mod perturbation;
pub mod porosity;
pub mod sampling;
pub mod space;
pub mod trajectory;

pub use error::{HyperError, Result};
pub use hyperspace::{
    blend_with_set, dist_point_set, hausdorff, projection, restrict_to_ball, set_diameter, union, BallMode, CompactSet,
    ProjectionSet,
};
pub use mapping::{
    estimate_lipschitz, evaluate, fixed_point_gap, rho_distance, AffineMap, MapDocument, MapNode, SetMap,
};
pub use perturbation::{
    attract_projection, build_chain, build_chain_with, build_l, bump_lambda, bump_mu, isolate_fixed_point, point_blend,
    remove_fixed_point_near, retract, retract_toward, robustness_probe, ChainConstants, ChainOptions, ChainReport,
    FixRemoval, Isolation, LMap, ProbeReport, SpikeConstruction, StepKind,
};
pub use porosity::{porosity_experiment, sample_hausdorff_ball, spike_set, PorosityReport, PorosityWitness};
pub use space::{contains, distance, domain_diameter, segment_point, Domain, Norm, Point, Shape};
pub use trajectory::{
    is_regular, is_regular_with, membership_an, run_trajectory, MembershipVerdict, Termination, TiePolicy,
    TrajectoryOptions, TrajectoryRecord, TrajectoryStep,
};

/// Comparison slack for membership, fixed-point detection and every
/// inequality-style check, in domain units.
pub const TAU_CMP: f64 = 1e-9;

/// Two points closer than this (in the ambient norm) are the same point of a
/// [`CompactSet`].
///
/// Kept well below [`TAU_CMP`]: chain constants at five inductive steps reach
/// the 1e-9 range and must stay resolvable.
pub const DEDUP_TOL: f64 = 1e-12;

/// Default fixed-point tolerance for trajectories.
pub const DEFAULT_FP_TOL: f64 = 1e-8;
