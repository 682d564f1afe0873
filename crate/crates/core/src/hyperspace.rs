//! The hyperspace `(K(C), H)`: finite point clouds with the
//! Pompeiu–Hausdorff distance, metric projections (with their tie sets),
//! unions, ball restrictions and blends towards a point.
//!
//! Every operation is an exhaustive scan; cardinalities stay small.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, HyperError, Result};
use crate::space::{Domain, Norm, Point};
use crate::DEDUP_TOL;

/// A non-empty finite set of points, deduplicated within [`DEDUP_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSet {
    points: Vec<Point>,
    norm: Norm,
}

impl CompactSet {
    pub fn new(points: Vec<Point>, norm: Norm) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(HyperError::EmptySet);
        };
        let dim = first.dim();
        for p in &points {
            p.check_dim(dim)?;
            if !p.is_finite() {
                return Err(HyperError::NonFinite("compact set"));
            }
        }
        Ok(Self::dedup(points, norm))
    }

    pub fn singleton(p: Point, norm: Norm) -> Self {
        CompactSet { points: vec![p], norm }
    }

    /// Keeps the first representative of every cluster of points closer than
    /// the dedup tolerance.
    fn dedup(points: Vec<Point>, norm: Norm) -> Self {
        let mut kept: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if !kept.iter().any(|q| norm.dist(q, &p) <= DEDUP_TOL) {
                kept.push(p);
            }
        }
        CompactSet { points: kept, norm }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; present for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Whether `p` is a member (within the dedup tolerance).
    pub fn contains_point(&self, p: &Point) -> bool {
        self.points.iter().any(|q| self.norm.dist(q, p) <= DEDUP_TOL)
    }

    pub fn inside(&self, dom: &Domain, tol: f64) -> bool {
        self.points.iter().all(|p| dom.contains(p, tol))
    }

    /// Image under a pointwise map, deduplicated.
    pub fn map_points(&self, f: impl Fn(&Point) -> Point) -> CompactSet {
        Self::dedup(self.points.iter().map(f).collect(), self.norm)
    }

    /// One point per line, comma separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let row: Vec<String> = p.0.iter().map(|c| c.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Lexicographically smallest point.
    pub fn lexicographic_min(&self) -> &Point {
        self.points
            .iter()
            .min_by(|a, b| a.lex_cmp(b))
            .expect("compact sets are non-empty")
    }
}

/// On-disk form of a compact set: `{"points": [[...], ...]}` with optional
/// norm and ambient domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetDocument {
    pub points: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<Norm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
}

impl SetDocument {
    pub fn from_set(set: &CompactSet) -> Self {
        SetDocument {
            points: set.points.clone(),
            norm: Some(set.norm),
            domain: None,
        }
    }

    /// Builds the set; `norm_override` wins over the document's own norm,
    /// which wins over the domain's norm, which defaults to ℓ2.
    pub fn into_set(self, norm_override: Option<Norm>) -> Result<CompactSet> {
        let norm = norm_override
            .or(self.norm)
            .or(self.domain.as_ref().map(Domain::norm))
            .unwrap_or_default();
        for p in &self.points {
            Point::try_new(p.0.clone())?;
        }
        let set = CompactSet::new(self.points, norm)?;
        if let Some(dom) = &self.domain {
            if set.dim() != dom.dim() {
                return Err(HyperError::DimensionMismatch {
                    expected: dom.dim(),
                    found: set.dim(),
                });
            }
            if !set.inside(dom, crate::TAU_CMP) {
                return Err(HyperError::OutsideDomain {
                    distance: set.points.iter().map(|p| dom.distance_to(p)).fold(0.0, f64::max),
                });
            }
        }
        Ok(set)
    }
}

/// Nearest-point set of `x` in a finite set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    pub minimizers: CompactSet,
    pub min_distance: f64,
    pub tie_diameter: f64,
}

impl ProjectionSet {
    pub fn is_singleton(&self) -> bool {
        self.minimizers.len() == 1
    }

    /// Deterministic choice among ties: the lexicographically smallest point.
    pub fn chosen(&self) -> &Point {
        self.minimizers.lexicographic_min()
    }
}

fn assert_same_space(a: &CompactSet, b: &CompactSet) {
    assert_eq!(a.dim(), b.dim(), "compact sets of different dimension");
    assert_eq!(a.norm, b.norm, "compact sets with different norms");
}

/// `sup_{a ∈ A} dist(a, B)`.
pub fn directed_hausdorff(a: &CompactSet, b: &CompactSet) -> f64 {
    a.points.iter().map(|p| dist_point_set(p, b)).fold(0.0, f64::max)
}

/// Pompeiu–Hausdorff distance: the larger of the two directed sup-inf
/// distances.
pub fn hausdorff(a: &CompactSet, b: &CompactSet) -> f64 {
    assert_same_space(a, b);
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// `dist(x, M) = min_{y ∈ M} ‖x − y‖`.
pub fn dist_point_set(x: &Point, m: &CompactSet) -> f64 {
    m.points.iter().map(|y| m.norm.dist(x, y)).fold(f64::INFINITY, f64::min)
}

/// All `y ∈ m` with `‖x − y‖ ≤ dist(x, m) + tie_tol`.
pub fn projection(x: &Point, m: &CompactSet, tie_tol: f64) -> ProjectionSet {
    let dists: Vec<f64> = m.points.iter().map(|y| m.norm.dist(x, y)).collect();
    let min_distance = dists.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = min_distance + tie_tol.max(0.0);
    let minimizers: Vec<Point> = m
        .points
        .iter()
        .zip(&dists)
        .filter(|(_, d)| **d <= threshold)
        .map(|(y, _)| y.clone())
        .collect();
    let minimizers = CompactSet {
        points: minimizers,
        norm: m.norm,
    };
    let tie_diameter = set_diameter(&minimizers);
    ProjectionSet {
        minimizers,
        min_distance,
        tie_diameter,
    }
}

/// `{(1 − t)p + t·a : a ∈ A}`.
pub fn blend_with_set(t: f64, p: &Point, a: &CompactSet) -> Result<CompactSet> {
    check_range("t", t, (0.0..=1.0).contains(&t), "[0, 1]")?;
    p.check_dim(a.dim())?;
    Ok(a.map_points(|q| p.lerp(q, t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallMode {
    /// `‖y − center‖ ≤ radius`.
    InsideClosed,
    /// `‖y − center‖ ≥ radius` (complement of the open ball).
    OutsideOpen,
}

/// Points of `a` inside the closed ball or outside the open ball. The result
/// may be empty and is therefore a plain list.
pub fn restrict_to_ball(a: &CompactSet, center: &Point, radius: f64, mode: BallMode) -> Vec<Point> {
    a.points
        .iter()
        .filter(|y| {
            let d = a.norm.dist(y, center);
            match mode {
                BallMode::InsideClosed => d <= radius,
                BallMode::OutsideOpen => d >= radius,
            }
        })
        .cloned()
        .collect()
}

pub fn union(a: &CompactSet, b: &CompactSet) -> CompactSet {
    assert_same_space(a, b);
    let mut pts = a.points.clone();
    pts.extend(b.points.iter().cloned());
    CompactSet::dedup(pts, a.norm)
}

/// Union of a possibly-empty list of loose points with a non-empty set.
pub(crate) fn union_points(loose: Vec<Point>, set: CompactSet) -> CompactSet {
    let norm = set.norm;
    let mut pts = loose;
    pts.extend(set.points);
    CompactSet::dedup(pts, norm)
}

/// Largest pairwise distance; 0 for singletons.
pub fn set_diameter(a: &CompactSet) -> f64 {
    let pts = &a.points;
    let mut best = 0.0_f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.max(a.norm.dist(&pts[i], &pts[j]));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pts: &[&[f64]], norm: Norm) -> CompactSet {
        CompactSet::new(pts.iter().map(|c| Point::new(c.to_vec())).collect(), norm).unwrap()
    }

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec())
    }

    /// Exhaustive pairwise-distance oracle, written independently of the
    /// directed-distance helpers.
    fn hausdorff_oracle(a: &CompactSet, b: &CompactSet) -> f64 {
        let n = a.norm();
        let mut worst = 0.0_f64;
        for x in a.points() {
            let mut best = f64::INFINITY;
            for y in b.points() {
                best = best.min(n.dist(x, y));
            }
            worst = worst.max(best);
        }
        for y in b.points() {
            let mut best = f64::INFINITY;
            for x in a.points() {
                best = best.min(n.dist(x, y));
            }
            worst = worst.max(best);
        }
        worst
    }

    #[test]
    fn hausdorff_examples() {
        let a = set(&[&[0.0, 0.0], &[2.0, 0.0]], Norm::L2);
        assert_eq!(hausdorff(&a, &a), 0.0);
        let s0 = set(&[&[0.0, 0.0]], Norm::L2);
        let s1 = set(&[&[1.0, 0.0]], Norm::L2);
        assert_eq!(hausdorff(&s0, &s1), 1.0);
        assert_eq!(hausdorff(&a, &s1), hausdorff_oracle(&a, &s1));
        assert_eq!(hausdorff(&a, &s1), 1.0);
    }

    #[test]
    fn dist_point_set_examples() {
        let m = set(&[&[1.0, 0.0], &[0.0, 2.0]], Norm::L2);
        assert_eq!(dist_point_set(&p(&[1.0, 0.0]), &m), 0.0);
        assert_eq!(dist_point_set(&p(&[0.0, 0.0]), &m), 1.0);
        let m1 = set(&[&[1.0, 1.0]], Norm::L1);
        assert_eq!(dist_point_set(&p(&[0.0, 0.0]), &m1), 2.0);
    }

    #[test]
    fn projection_examples() {
        let x = p(&[0.0, 0.0]);
        let pr = projection(&x, &set(&[&[1.0, 0.0], &[3.0, 0.0]], Norm::L2), 0.0);
        assert_eq!(pr.minimizers.points(), &[p(&[1.0, 0.0])]);
        assert_eq!(pr.tie_diameter, 0.0);
        assert_eq!(pr.min_distance, 1.0);

        let pr = projection(&x, &set(&[&[1.0, 0.0], &[-1.0, 0.0]], Norm::L2), 0.0);
        assert_eq!(pr.minimizers.len(), 2);
        assert_eq!(pr.tie_diameter, 2.0);
        assert_eq!(pr.chosen(), &p(&[-1.0, 0.0]));

        let m = set(&[&[0.0, 0.0], &[0.5, 0.5]], Norm::Linf);
        let pr = projection(&x, &m, 0.0);
        assert_eq!(pr.minimizers.points(), std::slice::from_ref(&x));
        assert_eq!(pr.min_distance, 0.0);
    }

    #[test]
    fn linf_ties_are_visible() {
        // Two points at the same ℓ∞ distance that ℓ2 separates.
        let m = set(&[&[1.0, 0.0], &[1.0, 0.5]], Norm::Linf);
        let pr = projection(&p(&[0.0, 0.0]), &m, 0.0);
        assert_eq!(pr.minimizers.len(), 2);
        let m2 = set(&[&[1.0, 0.0], &[1.0, 0.5]], Norm::L2);
        assert!(projection(&p(&[0.0, 0.0]), &m2, 0.0).is_singleton());
    }

    #[test]
    fn blend_examples() {
        let a = set(&[&[2.0, 0.0], &[0.0, 2.0]], Norm::L2);
        let o = p(&[0.0, 0.0]);
        assert_eq!(blend_with_set(0.0, &o, &a).unwrap().points(), std::slice::from_ref(&o));
        assert_eq!(blend_with_set(1.0, &o, &a).unwrap(), a);
        let half = blend_with_set(0.5, &o, &a).unwrap();
        assert_eq!(half.points(), &[p(&[1.0, 0.0]), p(&[0.0, 1.0])]);
        assert!(blend_with_set(1.5, &o, &a).is_err());
    }

    #[test]
    fn restrict_examples() {
        let o = p(&[0.0, 0.0]);
        let a = set(&[&[0.0, 0.0]], Norm::L2);
        assert_eq!(restrict_to_ball(&a, &o, 1.0, BallMode::InsideClosed), vec![o.clone()]);
        assert!(restrict_to_ball(&a, &o, 1.0, BallMode::OutsideOpen).is_empty());
        let b = set(&[&[0.0, 0.0], &[2.0, 0.0]], Norm::L2);
        assert_eq!(
            restrict_to_ball(&b, &o, 1.0, BallMode::OutsideOpen),
            vec![p(&[2.0, 0.0])]
        );
        // The boundary belongs to both pieces.
        let c = set(&[&[1.0, 0.0]], Norm::L2);
        assert_eq!(restrict_to_ball(&c, &o, 1.0, BallMode::InsideClosed).len(), 1);
        assert_eq!(restrict_to_ball(&c, &o, 1.0, BallMode::OutsideOpen).len(), 1);
    }

    #[test]
    fn union_examples() {
        let a = set(&[&[0.0, 0.0]], Norm::L2);
        assert_eq!(union(&a, &a), a);
        let b = set(&[&[1.0, 0.0]], Norm::L2);
        assert_eq!(union(&a, &b).len(), 2);
        let near = set(&[&[1e-12, 0.0]], Norm::L2);
        assert_eq!(union(&a, &near).len(), 1);
    }

    #[test]
    fn diameter_examples() {
        let s = set(&[&[0.0, 0.0]], Norm::L2);
        assert_eq!(set_diameter(&s), 0.0);
        let tri = |n| set(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]], n);
        assert!((set_diameter(&tri(Norm::L2)) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(set_diameter(&tri(Norm::L1)), 2.0);
    }

    #[test]
    fn empty_set_rejected() {
        assert_eq!(CompactSet::new(vec![], Norm::L2), Err(HyperError::EmptySet));
    }

    #[test]
    fn set_document_roundtrip() {
        let doc: SetDocument = serde_json::from_str(r#"{"points":[[0,0],[1,0]]}"#).unwrap();
        let s = doc.into_set(None).unwrap();
        assert_eq!(s.norm(), Norm::L2);
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_csv(), "0,0\n1,0\n");
        let doc: SetDocument = serde_json::from_str(
            r#"{"points":[[5,0]],"domain":{"norm":"l1","shape":{"box":{"lo":[0,0],"hi":[1,1]}}}}"#,
        )
        .unwrap();
        assert!(doc.into_set(None).is_err());
    }
}
