//! Deterministic sample generation: a regular grid over the domain plus
//! seeded draws. Every sampled supremum in this crate is a lower bound built
//! from these points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::space::{Domain, Norm, Point};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point of norm `< 1`, distributed uniformly in the unit ball of `norm`.
pub fn unit_ball_point<R: Rng + ?Sized>(norm: Norm, dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = match norm {
            Norm::Linf => (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
            Norm::L1 => {
                // d+1 exponentials normalised by their sum: uniform in the simplex.
                let e: Vec<f64> = (0..=dim).map(|_| Exp1.sample(rng)).collect();
                let total: f64 = e.iter().sum();
                e[..dim]
                    .iter()
                    .map(|x| if rng.random_bool(0.5) { x / total } else { -x / total })
                    .collect()
            }
            Norm::L2 => {
                let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
                let len = Norm::L2.of(&g);
                if len == 0.0 {
                    continue;
                }
                let radius = rng.random::<f64>().powf(1.0 / dim as f64);
                g.iter().map(|c| c / len * radius).collect()
            }
        };
        if norm.of(&v) < 1.0 {
            return v;
        }
    }
}

/// A point of the open ball `B(center, radius)` intersected with the domain.
/// `center` must lie in the domain.
pub fn ball_point<R: Rng + ?Sized>(dom: &Domain, center: &Point, radius: f64, rng: &mut R) -> Point {
    let u = unit_ball_point(dom.norm(), dom.dim(), rng);
    let p = Point::new(center.0.iter().zip(&u).map(|(c, x)| c + radius * x).collect());
    dom.pull_inside(center, &p)
}

/// A point of the domain.
pub fn domain_point<R: Rng + ?Sized>(dom: &Domain, rng: &mut R) -> Point {
    match dom.shape() {
        crate::space::Shape::Box { lo, hi } => Point::new(
            lo.iter()
                .zip(hi)
                .map(|(l, h)| if l == h { *l } else { rng.random_range(*l..=*h) })
                .collect(),
        ),
        crate::space::Shape::Ball { center, radius } => {
            let u = unit_ball_point(dom.norm(), dom.dim(), rng);
            Point::new(center.iter().zip(&u).map(|(c, x)| c + radius * x).collect())
        }
    }
}

/// Regular grid over the bounding box, filtered by membership, with at most
/// `budget` points. Includes the box corners for box domains.
pub fn grid_points(dom: &Domain, budget: usize) -> Vec<Point> {
    let d = dom.dim();
    let mut per_axis = 1usize;
    while (per_axis + 1).checked_pow(d as u32).is_some_and(|n| n <= budget) {
        per_axis += 1;
    }
    if per_axis < 2 {
        return vec![dom.centroid()];
    }
    let (lo, hi) = dom.bounding_box();
    let total = per_axis.pow(d as u32);
    (0..total)
        .filter_map(|mut idx| {
            let coords: Vec<f64> = (0..d)
                .map(|axis| {
                    let i = idx % per_axis;
                    idx /= per_axis;
                    let t = i as f64 / (per_axis - 1) as f64;
                    (1.0 - t) * lo[axis] + t * hi[axis]
                })
                .collect();
            let p = Point::new(coords);
            dom.contains(&p, 0.0).then_some(p)
        })
        .collect()
}

/// `count` deterministic points: half grid, the rest seeded draws.
pub fn sample_points(dom: &Domain, count: usize, seed: u64) -> Vec<Point> {
    let mut out = grid_points(dom, count / 2);
    let mut r = rng(seed);
    while out.len() < count {
        out.push(domain_point(dom, &mut r));
    }
    out.truncate(count.max(1));
    out
}
