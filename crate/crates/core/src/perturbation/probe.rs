//! Robustness of a verified chain: trajectories of maps within a certified
//! `ρ`-distance `s` of `G_n`, started within `R` of `x_0`, keep small
//! projection ties and shadow the chain trajectory.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::chain::ChainReport;
use crate::error::{check_range, HyperError, Result};
use crate::hyperspace::projection;
use crate::mapping::SetMap;
use crate::sampling::{ball_point, domain_point, rng, unit_ball_point};
use crate::space::Point;

#[derive(Debug, Clone, Serialize)]
pub struct ProbeOutcome {
    pub kind: String,
    /// Certified upper bound on `ρ(G_n, G')`.
    pub certified_rho: f64,
    pub max_tie_diameter: f64,
    pub max_deviation: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub beta: f64,
    /// Perturbation budget `s = β·ε'_n·r/6`; also the start radius `R`.
    pub s: f64,
    pub start_radius: f64,
    /// Allowed tie diameter `β·ε'_n/3`.
    pub tie_bound: f64,
    /// Allowed distance to the chain trajectory `β·ε'_n/6`.
    pub deviation_bound: f64,
    pub starts: usize,
    pub probes: Vec<ProbeOutcome>,
    pub max_tie_diameter: f64,
    pub max_deviation: f64,
    pub violations: usize,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Runs `probes` certified perturbations of `G_n` (the first is `G_n`
/// itself) from `starts` points of `B(x_0, R)` (the first is `x_0`).
pub fn robustness_probe(
    report: &ChainReport,
    beta: f64,
    probes: usize,
    starts: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if !report.verified {
        return Err(HyperError::Unverified("robustness probe needs a verified chain".into()));
    }
    check_range("beta", beta, beta > 0.0 && beta <= 1.0, "(0, 1]")?;
    let gn = report.last_map();
    let dom = gn.domain();
    let norm = gn.norm();
    let n = report.n;
    let eps_n = report.last_constants().eps_prime;
    let s = beta * eps_n * report.build_radius / 6.0;
    let tie_bound = beta * eps_n / 3.0;
    let deviation_bound = beta * eps_n / 6.0;
    let xs = &report.trajectory;

    let mut r = rng(seed);
    let family = perturbations(report, s, probes.max(1), &mut r)?;
    let mut start_points = vec![xs[0].clone()];
    while start_points.len() < starts.max(1) {
        start_points.push(ball_point(dom, &xs[0], s, &mut r));
    }

    let mut outcomes = Vec::with_capacity(family.len());
    for (kind, certified_rho, g) in family {
        let mut out = ProbeOutcome {
            kind,
            certified_rho,
            max_tie_diameter: 0.0,
            max_deviation: 0.0,
            violations: 0,
        };
        if !(certified_rho < s) {
            out.violations += 1;
        }
        for v0 in &start_points {
            let mut v = v0.clone();
            for (k, x) in xs.iter().enumerate().take(n + 1) {
                let dev = norm.dist(&v, x);
                // The start itself is only known to lie in B(x_0, R).
                let dev_limit = if k == 0 { s } else { deviation_bound };
                out.max_deviation = out.max_deviation.max(if k == 0 { 0.0 } else { dev });
                if !(dev <= dev_limit) {
                    out.violations += 1;
                }
                let image = g.eval_unchecked(&v);
                // Exact ties: late chain constants sit below any fixed slack.
                let p = projection(&v, &image, 0.0);
                out.max_tie_diameter = out.max_tie_diameter.max(p.tie_diameter);
                if !(p.tie_diameter <= tie_bound) {
                    out.violations += 1;
                }
                v = p.chosen().clone();
            }
            let dev = norm.dist(&v, &xs[n + 1]);
            out.max_deviation = out.max_deviation.max(dev);
            if !(dev <= deviation_bound) {
                out.violations += 1;
            }
        }
        outcomes.push(out);
    }

    Ok(ProbeReport {
        beta,
        s,
        start_radius: s,
        tie_bound,
        deviation_bound,
        starts: start_points.len(),
        max_tie_diameter: outcomes.iter().map(|o| o.max_tie_diameter).fold(0.0, f64::max),
        max_deviation: outcomes.iter().map(|o| o.max_deviation).fold(0.0, f64::max),
        violations: outcomes.iter().map(|o| o.violations).sum(),
        probes: outcomes,
    })
}

/// Perturbations of `G_n` whose `ρ`-distance is bounded by construction:
/// blends towards a point (`λ·diam(C)`) and extra spikes grown from a chain
/// point (`Lip·σ + ‖spike − base‖`), alternating, with every fourth one a
/// blend of a spike.
fn perturbations(report: &ChainReport, s: f64, count: usize, r: &mut impl Rng) -> Result<Vec<(String, f64, SetMap)>> {
    let gn = report.last_map();
    let dom = gn.domain();
    let diam = dom.diameter();
    let xs = &report.trajectory;
    let n = report.n;
    let mut out = vec![("identity".to_string(), 0.0, gn.clone())];
    while out.len() < count {
        let i = out.len();
        if i % 2 == 1 {
            let lambda = s / diam * r.random_range(0.05..0.95);
            let anchor = domain_point(dom, r);
            let g = SetMap::blended(Arc::new(gn.clone()), anchor, lambda)?;
            out.push(("point_blend".into(), lambda * diam, g));
        } else {
            let k = r.random_range(0..=n);
            let (spike_map, bound) = extra_spike(gn, &xs[k], &xs[k + 1], s, r)?;
            if i % 4 == 0 {
                let lambda = (s - bound) / diam * r.random_range(0.05..0.95);
                let anchor = domain_point(dom, r);
                let g = SetMap::blended(Arc::new(spike_map), anchor, lambda)?;
                out.push(("spike_then_blend".into(), bound + lambda * diam, g));
            } else {
                out.push(("spike".into(), bound, spike_map));
            }
        }
    }
    Ok(out)
}

/// A spike patch at `center` grown from `base ∈ G_n(center)` to a random
/// point within `σ'/2` of it, with `σ' = s/2`, so that the bound stays below
/// `s` and the Lipschitz bound stays at most 1.
fn extra_spike(gn: &SetMap, center: &Point, base: &Point, s: f64, r: &mut impl Rng) -> Result<(SetMap, f64)> {
    let dom = gn.domain();
    let norm = gn.norm();
    let sigma = s / 2.0;
    let reach = sigma * r.random_range(0.1..0.4);
    let u = unit_ball_point(norm, dom.dim(), r);
    let raw = Point(base.0.iter().zip(&u).map(|(b, c)| b + reach * c).collect());
    let spike = dom.pull_inside(base, &raw);
    let map = SetMap::spike_patch(Arc::new(gn.clone()), center.clone(), sigma, spike.clone(), base.clone())?;
    let bound = gn.certified_lip() * sigma + norm.dist(&spike, base);
    Ok((map, bound))
}
