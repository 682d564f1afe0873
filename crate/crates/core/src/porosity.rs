//! Unique-projection witnesses for compact sets: adding one point on a
//! nearest-point segment makes the projection of `x` a singleton, and every
//! set within `r/3` of the result keeps its projection ties below `2r/3`.

use rand::Rng;
use serde::Serialize;

use crate::error::{check_range, HyperError, Result};
use crate::hyperspace::{dist_point_set, hausdorff, projection, set_diameter, union, CompactSet};
use crate::sampling::{rng, unit_ball_point};
use crate::space::{Domain, Point};
use crate::TAU_CMP;

/// Target accuracy of `dist(z, M) = r`.
pub const SPIKE_TOL: f64 = 1e-10;

/// Ratio between the Hausdorff-ball radius and `r`.
pub const ALPHA: f64 = 1.0 / 3.0;

/// Number of radii in the experiment grid.
pub const GRID_POINTS: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct PorosityWitness {
    #[serde(serialize_with = "points_of")]
    pub base: CompactSet,
    pub query: Point,
    /// Nearest point of the base set the spike sits towards.
    pub anchor: Point,
    pub spike: Point,
    #[serde(serialize_with = "points_of")]
    pub perturbed: CompactSet,
    pub radius: f64,
    pub ball_radius: f64,
    pub sampled_neighbors: usize,
    pub max_tie_diameter: f64,
}

fn points_of<S: serde::Serializer>(set: &CompactSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    set.points().serialize(s)
}

/// Places `z` on the segment from `x` to its (lexicographically first)
/// nearest point `y ∈ m` with `dist(z, m) = r`, by bisection on the segment
/// parameter, and returns `N = m ∪ {z}`.
pub fn spike_set(m: &CompactSet, x: &Point, r: f64) -> Result<PorosityWitness> {
    x.check_dim(m.dim())?;
    let gap = dist_point_set(x, m);
    if gap <= TAU_CMP {
        return Err(HyperError::Precondition("the query point lies in the set".into()));
    }
    check_range("r", r, r > 0.0 && r < gap, "(0, dist(x, M))")?;
    let anchor = projection(x, m, 0.0).chosen().clone();
    let excess = |t: f64| dist_point_set(&x.lerp(&anchor, t), m) - r;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut t = 0.5;
    for _ in 0..200 {
        t = 0.5 * (lo + hi);
        let e = excess(t);
        if e.abs() <= SPIKE_TOL / 2.0 {
            break;
        }
        if e > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
    }
    let spike = x.lerp(&anchor, t);
    let residual = (dist_point_set(&spike, m) - r).abs();
    if residual > SPIKE_TOL {
        return Err(HyperError::BisectionFailed { residual });
    }
    let perturbed = union(m, &CompactSet::singleton(spike.clone(), m.norm()));
    Ok(PorosityWitness {
        base: m.clone(),
        query: x.clone(),
        anchor,
        spike,
        perturbed,
        radius: r,
        ball_radius: ALPHA * r,
        sampled_neighbors: 0,
        max_tie_diameter: 0.0,
    })
}

/// `count` sets within Hausdorff distance `< radius` of `n`, clipped to the
/// domain. Draw 0 is `n` itself. Every point is moved by less than `radius`
/// and up to three extra points are added within `radius` of `n`. When
/// `focus` is given, every third draw is adversarial: points move towards
/// `focus` by almost the full radius.
pub fn sample_hausdorff_ball(
    n: &CompactSet,
    radius: f64,
    count: usize,
    seed: u64,
    dom: &Domain,
    focus: Option<&Point>,
) -> Result<Vec<CompactSet>> {
    check_range("radius", radius, radius > 0.0, "(0, inf)")?;
    let norm = n.norm();
    let mut r = rng(seed);
    // Keeps every displacement strictly below the radius despite rounding.
    let reach = radius * (1.0 - 1e-9);
    let near_full = if radius > 2.0 * TAU_CMP {
        radius - TAU_CMP
    } else {
        radius / 2.0
    };
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        if i == 0 {
            out.push(n.clone());
            continue;
        }
        let adversarial = focus.is_some() && i % 3 == 0;
        let mut pts: Vec<Point> = Vec::with_capacity(n.len() + 3);
        for p in n.points() {
            let moved = match focus {
                Some(f) if adversarial => {
                    let d = norm.dist(p, f);
                    if d == 0.0 {
                        p.clone()
                    } else {
                        p.lerp(f, (near_full.min(reach) / d).min(1.0))
                    }
                }
                _ => jitter(p, reach * r.random::<f64>(), dom, &mut r),
            };
            pts.push(moved);
        }
        let extras = r.random_range(0..=3);
        for _ in 0..extras {
            let host = &n.points()[r.random_range(0..n.len())];
            let q = match focus {
                Some(f) if adversarial && norm.dist(host, f) > 0.0 => {
                    let d = norm.dist(host, f);
                    host.lerp(f, (near_full.min(reach) / d).min(1.0))
                }
                _ => jitter(host, reach * r.random::<f64>(), dom, &mut r),
            };
            pts.push(q);
        }
        let set = CompactSet::new(pts, norm)?;
        debug_assert!(hausdorff(n, &set) < radius);
        out.push(set);
    }
    Ok(out)
}

fn jitter(p: &Point, len: f64, dom: &Domain, r: &mut impl Rng) -> Point {
    let u = unit_ball_point(dom.norm(), dom.dim(), r);
    let raw = Point(p.0.iter().zip(&u).map(|(c, x)| c + len * x).collect());
    dom.pull_inside(p, &raw)
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusOutcome {
    pub r: f64,
    pub ball_radius: f64,
    /// `2αr`.
    pub tie_bound: f64,
    pub samples: usize,
    pub max_tie_diameter: f64,
    /// Sets whose tie diameter exceeded the bound.
    pub violations: usize,
    /// Sets with a nearest point outside `B̄(z, αr)`.
    pub containment_violations: usize,
    pub max_hausdorff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PorosityReport {
    pub n_index: usize,
    pub dist_to_set: f64,
    pub base_tie_diameter: f64,
    pub r0: f64,
    pub alpha: f64,
    pub r_grid: Vec<f64>,
    pub per_r: Vec<RadiusOutcome>,
    pub total_violations: usize,
    /// Sampled evidence only; the neighbourhoods are not exhausted.
    pub sampled: bool,
}

impl PorosityReport {
    pub fn passed(&self) -> bool {
        self.total_violations == 0
    }
}

/// For each `r` of a grid in `(0, r0)`, `r0 = min{1/(2(n+1)), dist(x, M)/3}`,
/// builds the spike set and checks `samples` sets of its `r/3` Hausdorff
/// neighbourhood for tie diameter at most `2r/3`.
pub fn porosity_experiment(
    m: &CompactSet,
    x: &Point,
    n_index: usize,
    samples: usize,
    seed: u64,
    dom: &Domain,
) -> Result<PorosityReport> {
    if n_index == 0 {
        return Err(HyperError::Precondition("n must be positive".into()));
    }
    dom.require_inside(x, TAU_CMP)?;
    let gap = dist_point_set(x, m);
    if gap <= TAU_CMP {
        return Err(HyperError::Precondition("the query point lies in the set".into()));
    }
    let base_tie = set_diameter(&projection(x, m, TAU_CMP).minimizers);
    if base_tie < 1.0 / n_index as f64 {
        return Err(HyperError::Precondition(format!(
            "projection tie diameter {base_tie} is below 1/n = {}",
            1.0 / n_index as f64
        )));
    }
    let r0 = (1.0 / (2.0 * (n_index + 1) as f64)).min(gap / 3.0);
    let r_grid: Vec<f64> = (1..=GRID_POINTS)
        .map(|i| r0 * i as f64 / (GRID_POINTS + 1) as f64)
        .collect();
    let norm = m.norm();
    let mut per_r = Vec::with_capacity(r_grid.len());
    for (i, &r) in r_grid.iter().enumerate() {
        let w = spike_set(m, x, r)?;
        let ball = ALPHA * r;
        let tie_bound = 2.0 * ball;
        let neighbors = sample_hausdorff_ball(&w.perturbed, ball, samples, seed.wrapping_add(i as u64), dom, Some(x))?;
        let mut out = RadiusOutcome {
            r,
            ball_radius: ball,
            tie_bound,
            samples: neighbors.len(),
            max_tie_diameter: 0.0,
            violations: 0,
            containment_violations: 0,
            max_hausdorff: 0.0,
        };
        for nb in &neighbors {
            out.max_hausdorff = out.max_hausdorff.max(hausdorff(&w.perturbed, nb));
            let p = projection(x, nb, TAU_CMP);
            out.max_tie_diameter = out.max_tie_diameter.max(p.tie_diameter);
            if !(p.tie_diameter <= tie_bound + TAU_CMP) {
                out.violations += 1;
            }
            if p.minimizers
                .points()
                .iter()
                .any(|q| norm.dist(q, &w.spike) > ball + TAU_CMP)
            {
                out.containment_violations += 1;
            }
        }
        per_r.push(out);
    }
    let total_violations = per_r.iter().map(|o| o.violations + o.containment_violations).sum();
    Ok(PorosityReport {
        n_index,
        dist_to_set: gap,
        base_tie_diameter: base_tie,
        r0,
        alpha: ALPHA,
        r_grid,
        per_r,
        total_violations,
        sampled: true,
    })
}
