//! Single-step perturbations: contraction towards a point, fixed-point
//! isolation and removal, and the spike that forces a unique nearest point.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{check_range, HyperError, Result};
use crate::hyperspace::{self, dist_point_set, hausdorff, projection, CompactSet};
use crate::mapping::{estimate::rho_on, fixed_point_gap, SetMap};
use crate::sampling::{ball_point, rng, sample_points};
use crate::space::Point;
use crate::{DEDUP_TOL, TAU_CMP};

/// `x ↦ λ{x0} + (1 − λ)f(x)`, a strict contraction within `λ·diam(C)` of `f`.
pub fn point_blend(f: &SetMap, x0: &Point, lambda: f64) -> Result<SetMap> {
    check_range("lambda", lambda, lambda > 0.0 && lambda < 1.0, "(0, 1)")?;
    SetMap::blended(Arc::new(f.clone()), x0.clone(), lambda)
}

#[derive(Debug, Clone)]
pub struct Isolation {
    pub map: SetMap,
    /// Radius of the ball around the fixed point on which it is the unique
    /// nearest point of its own image.
    pub radius: f64,
    pub eps_prime: f64,
    pub delta: f64,
}

/// Perturbs `f` by less than `eps` so that the fixed point `x0` becomes
/// isolated: `G(v) ∩ B(x0, r) = {x0}` and `P_{G(v)}(v) = {x0}` for
/// `v ∈ B(x0, r)`, with `r = eps/24`.
pub fn isolate_fixed_point(f: &SetMap, x0: &Point, eps: f64) -> Result<Isolation> {
    let diam = f.domain().diameter();
    check_range("eps", eps, eps > 0.0 && eps < diam, "(0, diam(C))")?;
    let gap = fixed_point_gap(f, x0)?;
    if gap > TAU_CMP {
        return Err(HyperError::NotFixedPoint { gap });
    }
    let eps_prime = eps / 2.0;
    let delta = eps / 4.0;
    let map = SetMap::isolated_fix(Arc::new(f.clone()), x0.clone(), eps_prime, delta)?;
    Ok(Isolation {
        map,
        radius: delta / 6.0,
        eps_prime,
        delta,
    })
}

#[derive(Debug, Clone)]
pub struct FixRemoval {
    pub map: SetMap,
    /// No point of `B(x0, radius)` is a fixed point of `map`.
    pub radius: f64,
    /// `dist(x0, f(x0))` before any change.
    pub gap: f64,
    /// The point the image near `x0` was pushed onto; `None` when `f` was
    /// already fixed-point free at `x0`.
    pub target: Option<Point>,
}

/// Returns a map within `eps` of `f` with no fixed points near `x0`.
pub fn remove_fixed_point_near(f: &SetMap, x0: &Point, eps: f64) -> Result<FixRemoval> {
    let dom = f.domain();
    check_range("eps", eps, eps > 0.0 && eps < dom.diameter(), "(0, diam(C))")?;
    let gap = fixed_point_gap(f, x0)?;
    if gap > TAU_CMP {
        return Ok(FixRemoval {
            map: f.clone(),
            radius: gap / 3.0,
            gap,
            target: None,
        });
    }
    let eps_prime = eps / 2.0;
    let delta = eps / 4.0;
    let z = point_at_distance(f, x0, delta / 4.0)?;
    let map = SetMap::fix_free_patch(Arc::new(f.clone()), x0.clone(), z.clone(), eps_prime, delta)?;
    Ok(FixRemoval {
        map,
        radius: delta / 12.0,
        gap,
        target: Some(z),
    })
}

/// A domain point at distance `t` from `x0`: towards the centroid first,
/// then along the signed coordinate axes.
fn point_at_distance(f: &SetMap, x0: &Point, t: f64) -> Result<Point> {
    let dom = f.domain();
    let norm = dom.norm();
    let c = dom.centroid();
    let to_centroid = norm.dist(x0, &c);
    if to_centroid >= t {
        return Ok(x0.lerp(&c, t / to_centroid));
    }
    for axis in 0..x0.dim() {
        for sign in [1.0, -1.0] {
            let mut coords = x0.0.clone();
            coords[axis] += sign * t;
            let z = Point(coords);
            if dom.contains(&z, 0.0) {
                return Ok(z);
            }
        }
    }
    Err(HyperError::NoAdmissiblePoint)
}

/// Result of the spike construction at a non-fixed point `z`.
#[derive(Debug, Clone)]
pub struct SpikeConstruction {
    pub map: SetMap,
    /// The new unique nearest point of `z`.
    pub spike: Point,
    /// The nearest point of `g(z)` the spike was grown from.
    pub base: Point,
    /// `dist(z, g(z))`.
    pub delta: f64,
    pub sigma: f64,
    pub eps: f64,
    pub eps_prime: f64,
    /// Certified bound of the map that was patched.
    pub inner_lip: f64,
}

/// Grows a spike from the (lexicographically first) nearest point `y` of
/// `g(z)` towards `z`, at distance `ε' = σ(1 − Lip(g))/4` from `y`, so that it
/// becomes the unique nearest point of the new image at `z`.
pub fn attract_projection(g: &SetMap, z: &Point, sigma: f64) -> Result<SpikeConstruction> {
    let lip = g.certified_lip();
    if !(lip < 1.0) {
        return Err(HyperError::NotStrictContraction { lip });
    }
    let image = g.eval(z)?;
    let delta = dist_point_set(z, &image);
    if delta <= TAU_CMP {
        return Err(HyperError::IsFixedPoint { gap: delta });
    }
    check_range("sigma", sigma, sigma > 0.0 && sigma <= delta / 2.0, "(0, delta/2]")?;
    let eps = sigma * (1.0 - lip) / 3.0;
    let eps_prime = sigma * (1.0 - lip) / 4.0;
    let base = projection(z, &image, 0.0).chosen().clone();
    let spike = base.lerp(z, eps_prime / delta);
    let map = SetMap::spike_patch(Arc::new(g.clone()), z.clone(), sigma, spike.clone(), base.clone())?;
    Ok(SpikeConstruction {
        map,
        spike,
        base,
        delta,
        sigma,
        eps,
        eps_prime,
        inner_lip: lip,
    })
}

/// Measured outcome of the six spike properties.
#[derive(Debug, Clone, Serialize)]
pub struct SpikeChecks {
    /// New image at `z` is the old image plus the spike.
    pub image_form: bool,
    /// Nearest point of `z` in the new image is exactly the spike.
    pub unique_projection: bool,
    /// The spike lies outside the closed ball `B̄(z, σ)`.
    pub spike_outside_ball: bool,
    pub lip_bound: f64,
    pub lip_ok: bool,
    pub rho_sampled: f64,
    pub rho_bound: f64,
    pub rho_ok: bool,
    /// Unique projection onto the image at `z` from points of `B(z, ε'/3)`.
    pub nearby_unique: bool,
    pub nearby_samples: usize,
    /// Smallest gap between the runner-up distance and the spike distance
    /// over the nearby samples.
    pub nearby_margin: f64,
}

impl SpikeChecks {
    pub fn all_pass(&self) -> bool {
        self.image_form
            && self.unique_projection
            && self.spike_outside_ball
            && self.lip_ok
            && self.rho_ok
            && self.nearby_unique
    }
}

/// Runs the six spike checks. `samples` points spread over the domain plus a
/// quarter as many inside `B(z, σ)` feed the `ρ` estimate; `nearby` points of
/// `B(z, ε'/3)` feed the stability check.
pub fn verify_spike(
    g: &SetMap,
    z: &Point,
    c: &SpikeConstruction,
    samples: usize,
    nearby: usize,
    seed: u64,
) -> SpikeChecks {
    let norm = g.norm();
    let dom = g.domain();
    let old = g.eval_unchecked(z);
    let new = c.map.eval_unchecked(z);
    let expected = hyperspace::union(&old, &CompactSet::singleton(c.spike.clone(), norm));
    let image_form = hausdorff(&new, &expected) <= DEDUP_TOL && new.len() == expected.len();

    let proj = projection(z, &new, 0.0);
    let unique_projection = proj.is_singleton() && norm.dist(proj.chosen(), &c.spike) <= DEDUP_TOL;
    let spike_outside_ball = norm.dist(&c.spike, z) > c.sigma;

    let lip_bound = c.inner_lip.max(2.0 * c.eps / c.sigma);
    let lip = c.map.certified_lip();
    let lip_ok = lip <= lip_bound && lip < 1.0;

    let mut r = rng(seed);
    let mut pts = sample_points(dom, samples.max(1), seed);
    for _ in 0..samples / 4 {
        pts.push(ball_point(dom, z, c.sigma, &mut r));
    }
    let rho_sampled = rho_on(g, &c.map, &pts);
    let rho_bound = (1.0 + 3.0 * c.inner_lip) * c.sigma / 4.0;
    let rho_ok = rho_sampled <= rho_bound && rho_bound < c.sigma;

    let mut nearby_unique = true;
    let mut nearby_margin = f64::INFINITY;
    for _ in 0..nearby {
        let x = ball_point(dom, z, c.eps_prime / 3.0, &mut r);
        let p = projection(&x, &new, 0.0);
        if !(p.is_singleton() && norm.dist(p.chosen(), &c.spike) <= DEDUP_TOL) {
            nearby_unique = false;
        }
        let spike_d = norm.dist(&x, &c.spike);
        let runner_up = new
            .points()
            .iter()
            .filter(|q| norm.dist(q, &c.spike) > DEDUP_TOL)
            .map(|q| norm.dist(&x, q))
            .fold(f64::INFINITY, f64::min);
        nearby_margin = nearby_margin.min(runner_up - spike_d);
    }

    SpikeChecks {
        image_form,
        unique_projection,
        spike_outside_ball,
        lip_bound,
        lip_ok,
        rho_sampled,
        rho_bound,
        rho_ok,
        nearby_unique,
        nearby_samples: nearby,
        nearby_margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::AffineMap;
    use crate::space::{Domain, Norm};

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec())
    }

    fn square(norm: Norm) -> Domain {
        Domain::cube(2, -1.0, 1.0, norm).unwrap()
    }

    fn constant(pts: &[&[f64]], norm: Norm) -> SetMap {
        let set = CompactSet::new(pts.iter().map(|c| p(c)).collect(), norm).unwrap();
        SetMap::constant(set, square(norm)).unwrap()
    }

    #[test]
    fn spike_worked_example() {
        let g = constant(&[&[1.0, 0.0]], Norm::L2);
        let z = p(&[-1.0, 0.0]);
        let c = attract_projection(&g, &z, 0.5).unwrap();
        assert_eq!(c.delta, 2.0);
        assert!((c.eps - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(c.eps_prime, 0.125);
        assert_eq!(c.base, p(&[1.0, 0.0]));
        assert_eq!(c.spike, p(&[0.875, 0.0]));
        let image = c.map.eval(&z).unwrap();
        assert_eq!(dist_point_set(&c.spike, &g.eval(&z).unwrap()), 0.125);
        assert_eq!(projection(&z, &image, 0.0).minimizers.points(), &[p(&[0.875, 0.0])]);
        let checks = verify_spike(&g, &z, &c, 400, 50, 1);
        assert!(checks.all_pass(), "{checks:?}");
    }

    #[test]
    fn spike_preconditions() {
        let g = constant(&[&[1.0, 0.0]], Norm::L2);
        assert!(matches!(
            attract_projection(&g, &p(&[1.0, 0.0]), 0.1),
            Err(HyperError::IsFixedPoint { .. })
        ));
        assert!(attract_projection(&g, &p(&[-1.0, 0.0]), 1.5).is_err());
        let id = AffineMap::scaling(1.0, p(&[0.0, 0.0]), Norm::L2).unwrap();
        let f = SetMap::finite_union(vec![id], square(Norm::L2)).unwrap();
        assert!(matches!(
            attract_projection(&f, &p(&[0.5, 0.0]), 0.1),
            Err(HyperError::NotStrictContraction { .. })
        ));
    }

    #[test]
    fn blend_halves_the_bound() {
        let m = AffineMap::scaling(0.8, p(&[0.0, 0.0]), Norm::L2).unwrap();
        let f = SetMap::finite_union(vec![m], square(Norm::L2)).unwrap();
        let g = point_blend(&f, &p(&[0.0, 0.0]), 0.5).unwrap();
        assert_eq!(g.certified_lip(), 0.4);
        let c = constant(&[&[1.0, 0.0]], Norm::L2);
        let h = point_blend(&c, &p(&[0.0, 0.0]), 0.5).unwrap();
        assert_eq!(h.eval(&p(&[0.3, -0.7])).unwrap().points(), &[p(&[0.5, 0.0])]);
        assert!(point_blend(&f, &p(&[0.0, 0.0]), 1.0).is_err());
        assert!(point_blend(&f, &p(&[0.0, 0.0]), 0.0).is_err());
    }

    #[test]
    fn isolate_on_constant() {
        let x0 = p(&[0.1, 0.1]);
        let f = constant(&[&[0.1, 0.1]], Norm::L2);
        let iso = isolate_fixed_point(&f, &x0, 0.24).unwrap();
        assert!((iso.radius - 0.01).abs() < 1e-15);
        let v = p(&[0.105, 0.1]);
        assert_eq!(iso.map.eval(&v).unwrap().points(), std::slice::from_ref(&x0));
        assert!(isolate_fixed_point(&f, &p(&[0.5, 0.5]), 0.24).is_err());
        assert!(isolate_fixed_point(&f, &x0, 5.0).is_err());
    }

    #[test]
    fn removal_examples() {
        let c = constant(&[&[0.9, 0.0]], Norm::L2);
        let out = remove_fixed_point_near(&c, &p(&[0.0, 0.0]), 0.4).unwrap();
        assert_eq!(out.radius, 0.3);
        assert!(out.target.is_none());

        let id = AffineMap::scaling(1.0, p(&[0.0, 0.0]), Norm::L2).unwrap();
        let f = SetMap::finite_union(vec![id], square(Norm::L2)).unwrap();
        let x0 = p(&[0.0, 0.0]);
        let out = remove_fixed_point_near(&f, &x0, 0.4).unwrap();
        let z = out.target.clone().unwrap();
        assert!((Norm::L2.dist(&z, &x0) - 0.025).abs() < 1e-15);
        assert_eq!(out.map.eval(&x0).unwrap().points(), &[z]);
        assert!((fixed_point_gap(&out.map, &x0).unwrap() - 0.025).abs() < 1e-15);
        assert!((out.radius - 0.4 / 48.0).abs() < 1e-15);
    }
}
