//! Finite-dimensional normed-space primitives: points, the three supported
//! norms, and the closed bounded convex domain `C` every map lives on.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, HyperError, Result};

pub const MAX_DIM: usize = 8;

/// The ambient norm. All three are supported everywhere; ℓ1 and ℓ∞ are not
/// strictly convex, which shows up as projection ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Norm {
    #[serde(rename = "l1", alias = "sum")]
    L1,
    #[default]
    #[serde(rename = "l2", alias = "euclidean")]
    L2,
    #[serde(rename = "linf", alias = "max")]
    Linf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::Linf];

    /// Norm of a coordinate vector.
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|c| c.abs()).sum(),
            Norm::L2 => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, c| f64::max(m, c.abs())),
        }
    }

    /// `‖a − b‖`. Callers guarantee equal dimensions.
    pub fn dist(self, a: &Point, b: &Point) -> f64 {
        debug_assert_eq!(a.dim(), b.dim());
        let diff = a.0.iter().zip(&b.0).map(|(x, y)| x - y);
        match self {
            Norm::L1 => diff.map(f64::abs).sum(),
            Norm::L2 => diff.map(|c| c * c).sum::<f64>().sqrt(),
            Norm::Linf => diff.fold(0.0, |m, c| f64::max(m, c.abs())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Norm {
    type Err = HyperError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" | "sum" => Ok(Norm::L1),
            "l2" | "euclidean" => Ok(Norm::L2),
            "linf" | "max" => Ok(Norm::Linf),
            other => Err(HyperError::Parse(format!("unknown norm {other:?}"))),
        }
    }
}

/// A point of `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Point(coords)
    }

    /// Validating constructor: finite coordinates, dimension in `1..=8`.
    pub fn try_new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(HyperError::UnsupportedDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(HyperError::NonFinite("point"));
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|a| a * s).collect())
    }

    /// `(1 − t)·self + t·other`, evaluated coordinatewise so that `t = 0`
    /// and `t = 1` reproduce the endpoints bit-exactly.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect(),
        )
    }

    /// Total lexicographic order on coordinates.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.dim().cmp(&other.dim())
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(HyperError::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::new(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point::new(v.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

/// Closed, bounded, convex, non-empty subset `C` of `R^d`: an axis box or a
/// ball of the ambient norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub struct Domain {
    norm: Norm,
    shape: Shape,
}

#[derive(Serialize, Deserialize)]
struct DomainRepr {
    norm: Norm,
    shape: Shape,
}

impl TryFrom<DomainRepr> for Domain {
    type Error = HyperError;

    fn try_from(r: DomainRepr) -> Result<Self> {
        Domain::new(r.shape, r.norm)
    }
}

impl From<Domain> for DomainRepr {
    fn from(d: Domain) -> Self {
        DomainRepr {
            norm: d.norm,
            shape: d.shape,
        }
    }
}

impl Domain {
    pub fn new(shape: Shape, norm: Norm) -> Result<Self> {
        match &shape {
            Shape::Box { lo, hi } => {
                if lo.len() != hi.len() {
                    return Err(HyperError::DimensionMismatch {
                        expected: lo.len(),
                        found: hi.len(),
                    });
                }
                if lo.is_empty() || lo.len() > MAX_DIM {
                    return Err(HyperError::UnsupportedDimension(lo.len()));
                }
                if lo.iter().chain(hi).any(|c| !c.is_finite()) {
                    return Err(HyperError::NonFinite("domain"));
                }
                if lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(HyperError::InvalidDomain("lo > hi in some coordinate".into()));
                }
                if lo.iter().zip(hi).all(|(l, h)| l == h) {
                    return Err(HyperError::InvalidDomain("box has zero diameter".into()));
                }
            }
            Shape::Ball { center, radius } => {
                if center.is_empty() || center.len() > MAX_DIM {
                    return Err(HyperError::UnsupportedDimension(center.len()));
                }
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(HyperError::NonFinite("domain"));
                }
                check_range("radius", *radius, *radius > 0.0, "(0, inf)")?;
            }
        }
        Ok(Domain { norm, shape })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64, norm: Norm) -> Result<Self> {
        Domain::new(
            Shape::Box {
                lo: vec![lo; dim],
                hi: vec![hi; dim],
            },
            norm,
        )
    }

    pub fn ball(center: Point, radius: f64, norm: Norm) -> Result<Self> {
        Domain::new(
            Shape::Ball {
                center: center.0,
                radius,
            },
            norm,
        )
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Box { lo, .. } => lo.len(),
            Shape::Ball { center, .. } => center.len(),
        }
    }

    /// Distance from `x` to the domain (0 inside).
    pub fn distance_to(&self, x: &Point) -> f64 {
        match &self.shape {
            Shape::Box { lo, hi } => {
                let excess: Vec<f64> =
                    x.0.iter()
                        .zip(lo.iter().zip(hi))
                        .map(|(c, (l, h))| {
                            if c < l {
                                l - c
                            } else if c > h {
                                c - h
                            } else {
                                0.0
                            }
                        })
                        .collect();
                self.norm.of(&excess)
            }
            Shape::Ball { center, radius } => {
                let d = self.norm.dist(x, &Point(center.clone()));
                (d - radius).max(0.0)
            }
        }
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        x.dim() == self.dim() && x.is_finite() && self.distance_to(x) <= tol
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Box { lo, hi } => {
                let span: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| h - l).collect();
                self.norm.of(&span)
            }
            Shape::Ball { radius, .. } => 2.0 * radius,
        }
    }

    /// Box midpoint or ball center.
    pub fn centroid(&self) -> Point {
        match &self.shape {
            Shape::Box { lo, hi } => Point(lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect()),
            Shape::Ball { center, .. } => Point(center.clone()),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Box { lo, hi } => (lo.clone(), hi.clone()),
            Shape::Ball { center, radius } => {
                // Every supported unit ball sits inside the unit cube.
                let lo = center.iter().map(|c| c - radius).collect();
                let hi = center.iter().map(|c| c + radius).collect();
                (lo, hi)
            }
        }
    }

    /// Corners of a box domain; `None` for balls.
    pub fn corners(&self) -> Option<Vec<Point>> {
        let Shape::Box { lo, hi } = &self.shape else {
            return None;
        };
        let d = lo.len();
        Some(
            (0..(1usize << d))
                .map(|mask| Point((0..d).map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] }).collect()))
                .collect(),
        )
    }

    /// Moves `p` back along the segment towards `anchor` (which must lie in
    /// the domain) until it is inside. Distances to `anchor` never grow.
    pub fn pull_inside(&self, anchor: &Point, p: &Point) -> Point {
        if self.contains(p, 0.0) {
            return p.clone();
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if self.contains(&anchor.lerp(p, mid), 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        anchor.lerp(p, lo)
    }

    pub(crate) fn require_inside(&self, x: &Point, tol: f64) -> Result<()> {
        x.check_dim(self.dim())?;
        let distance = self.distance_to(x);
        if distance <= tol {
            Ok(())
        } else {
            Err(HyperError::OutsideDomain { distance })
        }
    }
}

/// `‖a − b‖` in the chosen norm.
pub fn distance(a: &Point, b: &Point, norm: Norm) -> Result<f64> {
    b.check_dim(a.dim())?;
    Ok(norm.dist(a, b))
}

/// The point `(1 − t)x + ty` of the segment `[x, y]`.
pub fn segment_point(x: &Point, y: &Point, t: f64) -> Result<Point> {
    y.check_dim(x.dim())?;
    check_range("t", t, (0.0..=1.0).contains(&t), "[0, 1]")?;
    Ok(x.lerp(y, t))
}

pub fn contains(dom: &Domain, x: &Point, tol: f64) -> bool {
    dom.contains(x, tol)
}

pub fn domain_diameter(dom: &Domain) -> f64 {
    dom.diameter()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec())
    }

    #[test]
    fn distance_examples() {
        let a = p(&[0.0, 0.0]);
        let b = p(&[3.0, 4.0]);
        assert_eq!(distance(&a, &a, Norm::L2).unwrap(), 0.0);
        assert_eq!(distance(&a, &b, Norm::L2).unwrap(), 5.0);
        // componentwise max oracle
        let linf = a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert_eq!(distance(&a, &b, Norm::Linf).unwrap(), linf);
        assert_eq!(linf, 4.0);
        assert_eq!(distance(&a, &b, Norm::L1).unwrap(), 7.0);
        assert!(matches!(
            distance(&a, &p(&[1.0]), Norm::L2),
            Err(HyperError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn segment_examples() {
        let x = p(&[0.0, 0.0]);
        let y = p(&[2.0, 0.0]);
        assert_eq!(segment_point(&x, &y, 0.0).unwrap(), x);
        assert_eq!(segment_point(&x, &y, 1.0).unwrap(), y);
        assert_eq!(segment_point(&x, &y, 0.25).unwrap(), p(&[0.5, 0.0]));
        assert!(segment_point(&x, &y, 1.5).is_err());
        assert!(segment_point(&x, &y, -0.1).is_err());
    }

    #[test]
    fn contains_examples() {
        let b = Domain::cube(2, -1.0, 1.0, Norm::L2).unwrap();
        assert!(contains(&b, &p(&[0.0, 0.0]), 0.0));
        assert!(!contains(&b, &p(&[1.1, 0.0]), 0.0));
        let ball = Domain::ball(p(&[0.0, 0.0]), 1.0, Norm::L2).unwrap();
        assert!(contains(&ball, &p(&[0.6, 0.8]), 1e-12));
        assert!(!contains(&ball, &p(&[0.8, 0.8]), 1e-12));
    }

    #[test]
    fn diameter_examples() {
        let unit = |n| Domain::cube(2, 0.0, 1.0, n).unwrap();
        assert_eq!(domain_diameter(&unit(Norm::Linf)), 1.0);
        assert!((domain_diameter(&unit(Norm::L2)) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(domain_diameter(&unit(Norm::L1)), 2.0);
        let ball = Domain::ball(p(&[1.0, 1.0]), 3.0, Norm::L1).unwrap();
        assert_eq!(domain_diameter(&ball), 6.0);
    }

    #[test]
    fn corner_pair_oracle_matches_box_diameter() {
        for norm in Norm::ALL {
            let dom = Domain::new(
                Shape::Box {
                    lo: vec![-1.0, 0.0, 2.0],
                    hi: vec![0.5, 3.0, 2.5],
                },
                norm,
            )
            .unwrap();
            let corners = dom.corners().unwrap();
            let oracle = corners
                .iter()
                .flat_map(|a| corners.iter().map(move |b| norm.dist(a, b)))
                .fold(0.0, f64::max);
            assert!((oracle - dom.diameter()).abs() < 1e-12, "{norm}");
        }
    }

    #[test]
    fn invalid_domains_rejected() {
        assert!(Domain::new(
            Shape::Box {
                lo: vec![1.0],
                hi: vec![0.0]
            },
            Norm::L2
        )
        .is_err());
        assert!(Domain::new(
            Shape::Box {
                lo: vec![0.0],
                hi: vec![0.0]
            },
            Norm::L2
        )
        .is_err());
        assert!(Domain::new(
            Shape::Ball {
                center: vec![0.0],
                radius: 0.0
            },
            Norm::L2
        )
        .is_err());
        assert!(Domain::cube(9, 0.0, 1.0, Norm::L2).is_err());
    }

    #[test]
    fn domain_json_schema() {
        let json = r#"{"norm":"linf","shape":{"box":{"lo":[-1,-1],"hi":[1,1]}}}"#;
        let dom: Domain = serde_json::from_str(json).unwrap();
        assert_eq!(dom.norm(), Norm::Linf);
        assert_eq!(dom.dim(), 2);
        let back = serde_json::to_string(&dom).unwrap();
        assert_eq!(
            back,
            r#"{"norm":"linf","shape":{"box":{"lo":[-1.0,-1.0],"hi":[1.0,1.0]}}}"#
        );
        let ball: Domain =
            serde_json::from_str(r#"{"norm":"l1","shape":{"ball":{"center":[0,0],"radius":2}}}"#).unwrap();
        assert_eq!(ball.diameter(), 4.0);
        assert!(
            serde_json::from_str::<Domain>(r#"{"norm":"l2","shape":{"ball":{"center":[0],"radius":-1}}}"#).is_err()
        );
    }

    #[test]
    fn pull_inside_stays_on_segment() {
        let dom = Domain::ball(p(&[0.0, 0.0]), 1.0, Norm::L1).unwrap();
        let anchor = p(&[0.2, 0.1]);
        let q = dom.pull_inside(&anchor, &p(&[3.0, 2.0]));
        assert!(dom.contains(&q, 1e-12));
        assert!(Norm::L1.dist(&anchor, &q) <= Norm::L1.dist(&anchor, &p(&[3.0, 2.0])));
    }
}
