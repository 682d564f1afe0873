//! Sampled lower bounds on suprema: Lipschitz ratios and the uniform
//! distance `ρ` between maps.

use rayon::prelude::*;

use super::SetMap;
use crate::error::{HyperError, Result};
use crate::hyperspace::{dist_point_set, hausdorff};
use crate::sampling::{ball_point, domain_point, rng, sample_points};
use crate::space::Point;

/// Largest observed `H(f(x), f(y)) / ‖x − y‖` over `samples` deterministic
/// pairs: half spread over the domain, half at short range.
pub fn estimate_lipschitz(f: &SetMap, samples: usize, seed: u64) -> Result<f64> {
    if samples < 2 {
        return Err(HyperError::Precondition(
            "estimate_lipschitz needs at least 2 samples".into(),
        ));
    }
    let dom = f.domain();
    let mut r = rng(seed);
    let local = dom.diameter() * 1e-3;
    let pairs: Vec<(Point, Point)> = (0..samples)
        .map(|i| {
            let x = domain_point(dom, &mut r);
            let y = if i % 2 == 0 {
                domain_point(dom, &mut r)
            } else {
                ball_point(dom, &x, local, &mut r)
            };
            (x, y)
        })
        .collect();
    let norm = f.norm();
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|(x, y)| {
            let d = norm.dist(x, y);
            if d == 0.0 {
                return 0.0;
            }
            hausdorff(&f.eval_unchecked(x), &f.eval_unchecked(y)) / d
        })
        .collect();
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Largest observed `H(f(x), g(x))` over a grid-plus-random sample.
pub fn rho_distance(f: &SetMap, g: &SetMap, samples: usize, seed: u64) -> Result<f64> {
    if f.domain() != g.domain() {
        return Err(HyperError::DomainMismatch);
    }
    let pts = sample_points(f.domain(), samples.max(1), seed);
    Ok(rho_on(f, g, &pts))
}

pub(crate) fn rho_on(f: &SetMap, g: &SetMap, pts: &[Point]) -> f64 {
    let values: Vec<f64> = pts
        .par_iter()
        .map(|x| hausdorff(&f.eval_unchecked(x), &g.eval_unchecked(x)))
        .collect();
    values.into_iter().fold(0.0, f64::max)
}

/// `dist(x, f(x))`.
pub fn fixed_point_gap(f: &SetMap, x: &Point) -> Result<f64> {
    let image = f.eval(x)?;
    Ok(dist_point_set(x, &image))
}
