//! Set-valued maps `C → K(C)` as expression trees. Each node carries a
//! certified Lipschitz bound propagated from its children; a node whose bound
//! exceeds 1 is rejected when it is built.

mod affine;
mod document;
pub(crate) mod estimate;

use std::sync::Arc;

pub use affine::{operator_norm, AffineMap};
pub use document::{AffineDocument, MapDocument, NodeDocument};
pub use estimate::{estimate_lipschitz, fixed_point_gap, rho_distance};

use crate::error::{check_range, HyperError, Result};
use crate::hyperspace::{self, blend_with_set, restrict_to_ball, BallMode, CompactSet};
use crate::perturbation::primitives::{build_l, plateau_weight, retract_toward_raw, LMap};
use crate::space::{Domain, Norm, Point};
use crate::TAU_CMP;

/// Node of a map expression. Cached images at the patch centres are stored
/// alongside the defining parameters so evaluation near a patch does not
/// recurse.
#[derive(Debug, Clone, PartialEq)]
pub enum MapNode {
    /// `x ↦ {f_1(x), …, f_k(x)}`.
    FiniteUnion(Vec<AffineMap>),
    Constant(CompactSet),
    /// `x ↦ λ{anchor} + (1 − λ)·inner(x)`.
    PointBlend {
        lambda: f64,
        anchor: Point,
        inner: Arc<SetMap>,
    },
    /// `x ↦ inner(R_{radius,center}(x))`.
    RetractPrecompose {
        radius: f64,
        center: Point,
        inner: Arc<SetMap>,
    },
    /// `inner(R_{σ,z}(x))` outside `B̄(z, σ)`; on the closed ball the image
    /// `inner(z)` gains the point `w(x)·spike + (1 − w(x))·base`, where the
    /// weight `w` is 1 on `B̄(z, σ/2)` and vanishes on the sphere.
    SpikePatch {
        inner: Arc<SetMap>,
        center: Point,
        radius: f64,
        spike: Point,
        base: Point,
        center_image: CompactSet,
    },
    /// Makes the fixed point `anchor` isolated in its own image.
    IsolatedFix {
        inner: Arc<SetMap>,
        anchor: Point,
        outer_radius: f64,
        inner_radius: f64,
        kept: Vec<Point>,
        blend: LMap,
    },
    /// Pushes the image near `anchor` onto `target`, destroying a fixed point.
    FixFreePatch {
        inner: Arc<SetMap>,
        anchor: Point,
        target: Point,
        outer_radius: f64,
        inner_radius: f64,
        kept: Vec<Point>,
        blend: LMap,
    },
}

/// An admitted nonexpansive set-valued map on a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SetMap {
    node: MapNode,
    lip: f64,
    domain: Domain,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    check_range(name, v, v > 0.0, "(0, inf)")
}

impl SetMap {
    fn admit(node: MapNode, lip: f64, domain: Domain) -> Result<Self> {
        if !(lip <= 1.0) {
            return Err(HyperError::NotNonexpansive { lip });
        }
        Ok(SetMap { node, lip, domain })
    }

    fn inside(domain: &Domain, p: &Point) -> Result<()> {
        domain.require_inside(p, TAU_CMP)
    }

    /// Finite union of affine maps. Each map must send the domain into
    /// itself: checked exactly on box corners, and for balls by a sufficient
    /// norm condition or, failing that, a dense sample.
    pub fn finite_union(maps: Vec<AffineMap>, domain: Domain) -> Result<Self> {
        if maps.is_empty() {
            return Err(HyperError::InvalidNode("finite_union needs at least one map".into()));
        }
        for m in &maps {
            if m.dim() != domain.dim() {
                return Err(HyperError::DimensionMismatch {
                    expected: domain.dim(),
                    found: m.dim(),
                });
            }
            check_affine_invariance(m, &domain)?;
        }
        let lip = maps.iter().map(AffineMap::lip).fold(0.0, f64::max);
        Self::admit(MapNode::FiniteUnion(maps), lip, domain)
    }

    pub fn constant(set: CompactSet, domain: Domain) -> Result<Self> {
        if set.dim() != domain.dim() {
            return Err(HyperError::DimensionMismatch {
                expected: domain.dim(),
                found: set.dim(),
            });
        }
        if set.norm() != domain.norm() {
            return Err(HyperError::InvalidNode(
                "constant set norm differs from the domain norm".into(),
            ));
        }
        for p in set.points() {
            Self::inside(&domain, p)?;
        }
        Self::admit(MapNode::Constant(set), 0.0, domain)
    }

    /// Node-level blend with `λ ∈ [0, 1]`.
    pub fn blended(inner: Arc<SetMap>, anchor: Point, lambda: f64) -> Result<Self> {
        check_range("lambda", lambda, (0.0..=1.0).contains(&lambda), "[0, 1]")?;
        Self::inside(&inner.domain, &anchor)?;
        let lip = (1.0 - lambda) * inner.lip;
        let domain = inner.domain.clone();
        Self::admit(MapNode::PointBlend { lambda, anchor, inner }, lip, domain)
    }

    pub fn retract_precompose(inner: Arc<SetMap>, center: Point, radius: f64) -> Result<Self> {
        positive("sigma", radius)?;
        Self::inside(&inner.domain, &center)?;
        let lip = inner.lip;
        let domain = inner.domain.clone();
        Self::admit(MapNode::RetractPrecompose { radius, center, inner }, lip, domain)
    }

    /// Spike patch around `center`. `base` must be a member of
    /// `inner(center)`; it is snapped to the nearest member.
    pub fn spike_patch(inner: Arc<SetMap>, center: Point, radius: f64, spike: Point, base: Point) -> Result<Self> {
        positive("sigma", radius)?;
        Self::inside(&inner.domain, &center)?;
        Self::inside(&inner.domain, &spike)?;
        let center_image = inner.eval_unchecked(&center);
        let norm = inner.domain.norm();
        let base = center_image
            .points()
            .iter()
            .map(|q| (norm.dist(q, &base), q))
            .filter(|(d, _)| *d <= TAU_CMP)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, q)| q.clone())
            .ok_or_else(|| HyperError::InvalidNode("spike base point is not in inner(z)".into()))?;
        let lip = inner.lip.max(2.0 * norm.dist(&spike, &base) / radius);
        let domain = inner.domain.clone();
        Self::admit(
            MapNode::SpikePatch {
                inner,
                center,
                radius,
                spike,
                base,
                center_image,
            },
            lip,
            domain,
        )
    }

    pub fn isolated_fix(inner: Arc<SetMap>, anchor: Point, outer_radius: f64, inner_radius: f64) -> Result<Self> {
        positive("eps_prime", outer_radius)?;
        positive("delta", inner_radius)?;
        if inner_radius > outer_radius {
            return Err(HyperError::InvalidNode("isolated_fix needs delta <= eps_prime".into()));
        }
        Self::inside(&inner.domain, &anchor)?;
        let image = inner.eval_unchecked(&anchor);
        let blend = build_l(&anchor, &anchor, inner_radius, &image)?;
        let kept = restrict_to_ball(&image, &anchor, inner_radius / 2.0, BallMode::OutsideOpen);
        let lip = inner.lip.max(2.0 / 3.0);
        let domain = inner.domain.clone();
        Self::admit(
            MapNode::IsolatedFix {
                inner,
                anchor,
                outer_radius,
                inner_radius,
                kept,
                blend,
            },
            lip,
            domain,
        )
    }

    pub fn fix_free_patch(
        inner: Arc<SetMap>,
        anchor: Point,
        target: Point,
        outer_radius: f64,
        inner_radius: f64,
    ) -> Result<Self> {
        positive("eps_prime", outer_radius)?;
        positive("delta", inner_radius)?;
        if inner_radius > outer_radius {
            return Err(HyperError::InvalidNode(
                "fix_free_patch needs delta <= eps_prime".into(),
            ));
        }
        Self::inside(&inner.domain, &anchor)?;
        Self::inside(&inner.domain, &target)?;
        let image = inner.eval_unchecked(&anchor);
        let blend = build_l(&anchor, &target, inner_radius, &image)?;
        let kept = restrict_to_ball(&image, &target, inner_radius / 2.0, BallMode::OutsideOpen);
        let lip = inner.lip.max(2.0 / 3.0);
        let domain = inner.domain.clone();
        Self::admit(
            MapNode::FixFreePatch {
                inner,
                anchor,
                target,
                outer_radius,
                inner_radius,
                kept,
                blend,
            },
            lip,
            domain,
        )
    }

    pub fn node(&self) -> &MapNode {
        &self.node
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn norm(&self) -> Norm {
        self.domain.norm()
    }

    pub fn certified_lip(&self) -> f64 {
        self.lip
    }

    pub fn is_strict_contraction(&self) -> bool {
        self.lip < 1.0
    }

    /// Number of nodes in the expression tree.
    pub fn size(&self) -> usize {
        1 + self.inner().map_or(0, SetMap::size)
    }

    pub fn inner(&self) -> Option<&SetMap> {
        match &self.node {
            MapNode::FiniteUnion(_) | MapNode::Constant(_) => None,
            MapNode::PointBlend { inner, .. }
            | MapNode::RetractPrecompose { inner, .. }
            | MapNode::SpikePatch { inner, .. }
            | MapNode::IsolatedFix { inner, .. }
            | MapNode::FixFreePatch { inner, .. } => Some(inner),
        }
    }

    /// Evaluates at a point of the domain; the image is checked to stay in
    /// the domain.
    pub fn eval(&self, x: &Point) -> Result<CompactSet> {
        self.domain.require_inside(x, TAU_CMP)?;
        let image = self.eval_unchecked(x);
        for p in image.points() {
            if !self.domain.contains(p, TAU_CMP) {
                return Err(HyperError::OutsideDomain {
                    distance: self.domain.distance_to(p),
                });
            }
        }
        Ok(image)
    }

    pub(crate) fn eval_unchecked(&self, x: &Point) -> CompactSet {
        let norm = self.domain.norm();
        match &self.node {
            MapNode::FiniteUnion(maps) => {
                let pts = maps.iter().map(|m| m.apply(x)).collect();
                CompactSet::new(pts, norm).expect("non-empty finite union")
            }
            MapNode::Constant(set) => set.clone(),
            MapNode::PointBlend { lambda, anchor, inner } => {
                blend_with_set(1.0 - lambda, anchor, &inner.eval_unchecked(x)).expect("weight in [0, 1]")
            }
            MapNode::RetractPrecompose { radius, center, inner } => {
                inner.eval_unchecked(&retract_toward_raw(*radius, center, x, norm))
            }
            MapNode::SpikePatch {
                inner,
                center,
                radius,
                spike,
                base,
                center_image,
            } => {
                let d = norm.dist(x, center);
                if d > *radius {
                    inner.eval_unchecked(&retract_toward_raw(*radius, center, x, norm))
                } else {
                    let w = plateau_weight(d, *radius);
                    let extra = CompactSet::singleton(base.lerp(spike, w), norm);
                    hyperspace::union(center_image, &extra)
                }
            }
            MapNode::IsolatedFix {
                inner,
                anchor,
                outer_radius,
                kept,
                blend,
                ..
            }
            | MapNode::FixFreePatch {
                inner,
                anchor,
                outer_radius,
                kept,
                blend,
                ..
            } => {
                if norm.dist(x, anchor) >= *outer_radius {
                    inner.eval_unchecked(&retract_toward_raw(*outer_radius, anchor, x, norm))
                } else {
                    hyperspace::union_points(kept.clone(), blend.eval(x))
                }
            }
        }
    }
}

/// Top-level evaluation.
pub fn evaluate(f: &SetMap, x: &Point) -> Result<CompactSet> {
    f.eval(x)
}

fn check_affine_invariance(m: &AffineMap, domain: &Domain) -> Result<()> {
    let escape = |p: &Point| {
        let q = m.apply(p);
        let d = domain.distance_to(&q);
        (d > TAU_CMP).then_some(d)
    };
    if let Some(corners) = domain.corners() {
        if let Some(distance) = corners.iter().find_map(escape) {
            return Err(HyperError::OutsideDomain { distance });
        }
        return Ok(());
    }
    // Ball domain: ‖A(x − c)‖ + ‖Ac + b − c‖ ≤ ‖A‖r + ‖Ac + b − c‖.
    let crate::space::Shape::Ball { center, radius } = domain.shape() else {
        unreachable!("non-box domains are balls")
    };
    let c = Point(center.clone());
    let shift = domain.norm().dist(&m.apply(&c), &c);
    if m.lip() * radius + shift <= radius + TAU_CMP {
        return Ok(());
    }
    let samples = crate::sampling::sample_points(domain, 10_000, 0);
    if let Some(distance) = samples.iter().find_map(escape) {
        return Err(HyperError::OutsideDomain { distance });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec())
    }

    fn square() -> Domain {
        Domain::cube(2, -1.0, 1.0, Norm::L2).unwrap()
    }

    fn constant(pts: &[&[f64]]) -> SetMap {
        let set = CompactSet::new(pts.iter().map(|c| p(c)).collect(), Norm::L2).unwrap();
        SetMap::constant(set, square()).unwrap()
    }

    #[test]
    fn constant_evaluates_to_itself() {
        let f = constant(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(f.eval(&p(&[0.3, 0.3])).unwrap().len(), 2);
        assert_eq!(f.certified_lip(), 0.0);
    }

    #[test]
    fn full_blend_collapses_to_anchor() {
        let f = Arc::new(constant(&[&[1.0, 0.0]]));
        let g = SetMap::blended(f, p(&[0.0, 0.5]), 1.0).unwrap();
        assert_eq!(g.eval(&p(&[-0.2, 0.9])).unwrap().points(), &[p(&[0.0, 0.5])]);
    }

    #[test]
    fn spike_patch_worked_example() {
        let g = Arc::new(constant(&[&[1.0, 0.0]]));
        let z = p(&[-1.0, 0.0]);
        let tilde = SetMap::spike_patch(g, z.clone(), 0.5, p(&[0.875, 0.0]), p(&[1.0, 0.0])).unwrap();
        let image = tilde.eval(&z).unwrap();
        assert_eq!(image.points(), &[p(&[1.0, 0.0]), p(&[0.875, 0.0])]);
        assert_eq!(tilde.certified_lip(), 0.5);
        // On the sphere the spike merges into the base point.
        assert_eq!(tilde.eval(&p(&[-0.5, 0.0])).unwrap().points(), &[p(&[1.0, 0.0])]);
    }

    #[test]
    fn spike_base_must_be_a_member() {
        let g = Arc::new(constant(&[&[1.0, 0.0]]));
        let err = SetMap::spike_patch(g, p(&[-1.0, 0.0]), 0.5, p(&[0.875, 0.0]), p(&[0.9, 0.0]));
        assert!(err.is_err());
    }

    #[test]
    fn gate_rejects_expanding_maps() {
        let dom = Domain::cube(1, -1.0, 1.0, Norm::L2).unwrap();
        let m = AffineMap::scaling(2.0, p(&[0.0]), Norm::L2).unwrap();
        assert!(matches!(
            SetMap::finite_union(vec![m], dom),
            Err(HyperError::OutsideDomain { .. })
        ));
        // Maps the square into itself but expands in the l1 norm.
        let dom = Domain::cube(2, -1.0, 1.0, Norm::L1).unwrap();
        let m = AffineMap::new(vec![vec![0.6, 0.4], vec![0.6, 0.4]], p(&[0.0, 0.0]), Norm::L1).unwrap();
        assert!(matches!(
            SetMap::finite_union(vec![m], dom),
            Err(HyperError::NotNonexpansive { .. })
        ));
    }

    #[test]
    fn finite_union_lip_is_max() {
        let dom = square();
        let a = AffineMap::scaling(0.5, p(&[0.0, 0.0]), Norm::L2).unwrap();
        let b = AffineMap::scaling(0.25, p(&[0.5, 0.0]), Norm::L2).unwrap();
        let f = SetMap::finite_union(vec![a, b], dom).unwrap();
        assert_eq!(f.certified_lip(), 0.5);
        assert_eq!(f.eval(&p(&[0.0, 0.0])).unwrap().len(), 2);
    }

    #[test]
    fn ball_domain_invariance() {
        let dom = Domain::ball(p(&[0.0, 0.0]), 1.0, Norm::L2).unwrap();
        let ok = AffineMap::scaling(0.5, p(&[0.4, 0.0]), Norm::L2).unwrap();
        assert!(SetMap::finite_union(vec![ok], dom.clone()).is_ok());
        let bad = AffineMap::scaling(0.5, p(&[0.6, 0.0]), Norm::L2).unwrap();
        assert!(SetMap::finite_union(vec![bad], dom).is_err());
    }

    #[test]
    fn isolated_fix_on_constant() {
        let x0 = p(&[0.2, 0.2]);
        let f = Arc::new(constant(&[&[0.2, 0.2], &[0.9, 0.9]]));
        let g = SetMap::isolated_fix(f, x0.clone(), 0.12, 0.06).unwrap();
        assert_eq!(g.certified_lip(), 2.0 / 3.0);
        let img = g.eval(&p(&[0.205, 0.2])).unwrap();
        assert!(img.contains_point(&x0));
        assert_eq!(img.len(), 2);
        assert_eq!(g.eval(&p(&[-0.9, -0.9])).unwrap().len(), 2);
    }

    #[test]
    fn outside_point_rejected() {
        let f = constant(&[&[1.0, 0.0]]);
        assert!(matches!(f.eval(&p(&[2.0, 0.0])), Err(HyperError::OutsideDomain { .. })));
    }
}
