//! The inductive chain `G_0, …, G_n`: each step patches the previous map so
//! that the next nearest point is unique and stays unique under the later
//! patches.

use serde::Serialize;

use super::constructions::{attract_projection, isolate_fixed_point, verify_spike, SpikeChecks};
use super::primitives::retract_toward_raw;
use crate::error::{check_range, HyperError, Result};
use crate::hyperspace::{dist_point_set, hausdorff, projection};
use crate::mapping::{estimate::rho_on, SetMap};
use crate::sampling::{ball_point, rng, sample_points};
use crate::space::Point;
use crate::trajectory::{run_trajectory, TiePolicy, TrajectoryOptions};
use crate::{DEDUP_TOL, TAU_CMP};

/// Smallest chain radius that stays resolvable against point deduplication.
pub const SIGMA_FLOOR: f64 = 1e3 * DEDUP_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Spike patch at a non-fixed point.
    Spike,
    /// First fixed point reached; it is made isolated.
    IsolateFixedPoint,
    /// Later steps after a fixed point: the map is kept.
    FrozenFixedPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainConstants {
    pub m: usize,
    pub delta: f64,
    pub sigma: f64,
    pub eps: f64,
    pub eps_prime: f64,
    pub fixed_point_branch: bool,
    pub kind: StepKind,
    /// Certified bound of the map that was patched at this step.
    pub lip_before: f64,
    pub lip_after: f64,
}

#[derive(Debug, Clone)]
pub struct ChainOptions {
    /// Domain samples for every sampled `ρ` estimate.
    pub samples: usize,
    pub seed: u64,
    /// Points drawn per index pair for the stability check.
    pub stability_samples: usize,
    pub verify: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            samples: 1000,
            seed: 42,
            stability_samples: 20,
            verify: true,
        }
    }
}

/// Per-step measurements.
#[derive(Debug, Clone, Serialize)]
pub struct StepChecks {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spike: Option<SpikeChecks>,
    /// Sampled `ρ(G_m, f)`.
    pub rho_to_f: f64,
    pub rho_ok: bool,
}

/// Cross-step measurements. Set-equality checks record the largest observed
/// Hausdorff distance as their slack.
#[derive(Debug, Clone, Serialize, Default)]
pub struct ChainChecks {
    pub rho_to_f: f64,
    pub rho_ok: bool,
    pub retraction_nesting: bool,
    pub retraction_nesting_slack: f64,
    pub image_frozen: bool,
    pub image_frozen_slack: f64,
    pub projection_frozen: bool,
    pub stability: bool,
    pub stability_slack: f64,
    pub trajectory_reproduced: bool,
    pub regular: bool,
    pub distinct: bool,
    pub constants_decrease: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ChainReport {
    pub n: usize,
    pub r: f64,
    /// Radius the chain was built with: `r`, or `r/2` after pre-contraction.
    pub build_radius: f64,
    /// Blend weight used to make the input a strict contraction, if any.
    pub precontraction: Option<f64>,
    pub input: SetMap,
    /// The strict contraction the chain starts from.
    pub base: SetMap,
    pub maps: Vec<SetMap>,
    pub trajectory: Vec<Point>,
    pub constants: Vec<ChainConstants>,
    pub steps: Vec<StepChecks>,
    pub checks: ChainChecks,
    pub verified: bool,
    pub options: ChainOptions,
}

impl ChainReport {
    pub fn last_map(&self) -> &SetMap {
        self.maps.last().expect("chains have n + 1 maps")
    }

    pub fn last_constants(&self) -> &ChainConstants {
        self.constants.last().expect("chains have n + 1 steps")
    }

    /// Index of the first fixed point of the trajectory, if one was reached.
    pub fn fixed_point_index(&self) -> Option<usize> {
        self.constants.iter().position(|c| c.fixed_point_branch)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Step<'a> {
            #[serde(flatten)]
            constants: &'a ChainConstants,
            x: &'a Point,
            checks: &'a StepChecks,
        }
        let steps: Vec<Step> = self
            .constants
            .iter()
            .zip(&self.steps)
            .zip(&self.trajectory)
            .map(|((constants, checks), x)| Step { constants, x, checks })
            .collect();
        serde_json::json!({
            "n": self.n,
            "r": self.r,
            "build_radius": self.build_radius,
            "precontraction_lambda": self.precontraction,
            "steps": steps,
            "trajectory": self.trajectory,
            "rho_to_f": self.checks.rho_to_f,
            "checks": self.checks,
            "final_certified_lip": self.last_map().certified_lip(),
            "verified": self.verified,
        })
    }
}

pub fn build_chain(f: &SetMap, x0: &Point, n: usize, r: f64) -> Result<ChainReport> {
    build_chain_with(f, x0, n, r, &ChainOptions::default())
}

pub fn build_chain_with(f: &SetMap, x0: &Point, n: usize, r: f64, opts: &ChainOptions) -> Result<ChainReport> {
    if n == 0 {
        return Err(HyperError::Precondition("chain length n must be positive".into()));
    }
    check_range("r", r, r > 0.0 && r < 1.0, "(0, 1)")?;
    f.domain().require_inside(x0, TAU_CMP)?;
    let diam = f.domain().diameter();

    let (base, build_radius, precontraction) = if f.is_strict_contraction() {
        (f.clone(), r, None)
    } else {
        let lambda = (r / (4.0 * diam)).min(0.5);
        let blended = super::constructions::point_blend(f, &f.domain().centroid(), lambda)?;
        (blended, r / 2.0, Some(lambda))
    };

    let norm = f.norm();
    let mut maps: Vec<SetMap> = Vec::with_capacity(n + 1);
    let mut trajectory: Vec<Point> = vec![x0.clone()];
    let mut constants: Vec<ChainConstants> = Vec::with_capacity(n + 1);
    let mut spikes = Vec::with_capacity(n + 1);
    let mut fixed_reached = false;

    for m in 0..=n {
        let prev = maps.last().unwrap_or(&base).clone();
        let x = trajectory[m].clone();
        let lip_before = prev.certified_lip();
        let spread = trajectory[..m]
            .iter()
            .map(|q| norm.dist(&x, q) / 2.0)
            .fold(f64::INFINITY, f64::min);
        let previous_eps_prime = constants.last().map(|c: &ChainConstants| c.eps_prime / 3.0);

        if fixed_reached {
            let sigma = previous_eps_prime.expect("frozen steps follow a fixed point");
            let (eps, eps_prime) = frozen_constants(sigma, lip_before);
            guard(m, sigma)?;
            constants.push(ChainConstants {
                m,
                delta: 0.0,
                sigma,
                eps,
                eps_prime,
                fixed_point_branch: true,
                kind: StepKind::FrozenFixedPoint,
                lip_before,
                lip_after: lip_before,
            });
            maps.push(prev);
            spikes.push(None);
            trajectory.push(x);
            continue;
        }

        let delta = dist_point_set(&x, &prev.eval(&x)?);
        if delta <= TAU_CMP {
            fixed_reached = true;
            let sigma = match previous_eps_prime {
                None => (build_radius / (n + 1) as f64).min(diam / 2.0),
                Some(e) => e.min(spread),
            };
            guard(m, sigma)?;
            let iso = isolate_fixed_point(&prev, &x, sigma)?;
            let lip_after = iso.map.certified_lip();
            let (eps, eps_prime) = frozen_constants(sigma, lip_after);
            constants.push(ChainConstants {
                m,
                delta,
                sigma,
                eps,
                eps_prime,
                fixed_point_branch: true,
                kind: StepKind::IsolateFixedPoint,
                lip_before,
                lip_after,
            });
            maps.push(iso.map);
            spikes.push(None);
            trajectory.push(x);
            continue;
        }

        let sigma = match previous_eps_prime {
            None => build_radius * (delta / 2.0).min(1.0 / (n + 1) as f64),
            Some(e) => e.min(delta / 2.0).min(spread),
        };
        guard(m, sigma)?;
        let c = attract_projection(&prev, &x, sigma)?;
        constants.push(ChainConstants {
            m,
            delta: c.delta,
            sigma,
            eps: c.eps,
            eps_prime: c.eps_prime,
            fixed_point_branch: false,
            kind: StepKind::Spike,
            lip_before,
            lip_after: c.map.certified_lip(),
        });
        maps.push(c.map.clone());
        trajectory.push(c.spike.clone());
        spikes.push(Some((prev, x, c)));
    }

    let mut report = ChainReport {
        n,
        r,
        build_radius,
        precontraction,
        input: f.clone(),
        base,
        maps,
        trajectory,
        constants,
        steps: Vec::new(),
        checks: ChainChecks::default(),
        verified: false,
        options: opts.clone(),
    };
    if opts.verify {
        verify(&mut report, &spikes);
    } else {
        report.steps = spikes
            .iter()
            .map(|_| StepChecks {
                spike: None,
                rho_to_f: f64::NAN,
                rho_ok: false,
            })
            .collect();
    }
    Ok(report)
}

/// `ε = min{σ/18, σ(1 − L)/3}`, `ε' = min{σ/24, σ(1 − L)/4}`.
fn frozen_constants(sigma: f64, lip: f64) -> (f64, f64) {
    let eps = (sigma / 18.0).min(sigma * (1.0 - lip) / 3.0);
    let eps_prime = (sigma / 24.0).min(sigma * (1.0 - lip) / 4.0);
    (eps, eps_prime)
}

fn guard(step: usize, sigma: f64) -> Result<()> {
    if sigma < SIGMA_FLOOR {
        Err(HyperError::ChainTooFine {
            step,
            sigma,
            floor: SIGMA_FLOOR,
        })
    } else {
        Ok(())
    }
}

type SpikeInput = Option<(SetMap, Point, super::constructions::SpikeConstruction)>;

fn verify(report: &mut ChainReport, spikes: &[SpikeInput]) {
    let opts = report.options.clone();
    let n = report.n;
    let norm = report.input.norm();
    let dom = report.input.domain().clone();
    let xs = report.trajectory.clone();
    let mut failures = Vec::new();

    // Sample points: the domain plus each patch neighbourhood.
    let mut r = rng(opts.seed ^ 0x5eed);
    let mut pts = sample_points(&dom, opts.samples.max(1), opts.seed);
    for (k, c) in report.constants.iter().enumerate() {
        for _ in 0..(opts.samples / 20).max(4) {
            pts.push(ball_point(&dom, &xs[k], c.sigma, &mut r));
        }
    }

    let mut steps = Vec::with_capacity(n + 1);
    let mut rho_max = 0.0_f64;
    for (m, g) in report.maps.iter().enumerate() {
        let spike = spikes[m].as_ref().map(|(prev, z, c)| {
            let checks = verify_spike(
                prev,
                z,
                c,
                opts.samples / 4,
                opts.stability_samples,
                opts.seed + m as u64,
            );
            if !checks.all_pass() {
                failures.push(format!("spike properties fail at step {m}"));
            }
            checks
        });
        let rho = rho_on(g, &report.input, &pts);
        let rho_ok = rho < report.r;
        if !rho_ok {
            failures.push(format!("rho(G_{m}, f) = {rho} is not below r"));
        }
        rho_max = rho_max.max(rho);
        steps.push(StepChecks {
            spike,
            rho_to_f: rho,
            rho_ok,
        });
    }

    let mut ch = ChainChecks {
        rho_to_f: rho_max,
        rho_ok: steps.iter().all(|s| s.rho_ok),
        retraction_nesting: true,
        image_frozen: true,
        projection_frozen: true,
        stability: true,
        ..ChainChecks::default()
    };

    // Retraction nesting: pulling x_k back through the later patch centres
    // lands within σ_k/2 of x_k.
    for j in 0..=n {
        for k in 0..j {
            let mut p = xs[k].clone();
            for l in (k + 1..=j).rev() {
                let c = &report.constants[l];
                match c.kind {
                    StepKind::Spike => p = retract_toward_raw(c.sigma, &xs[l], &p, norm),
                    StepKind::IsolateFixedPoint => p = retract_toward_raw(c.sigma / 2.0, &xs[l], &p, norm),
                    StepKind::FrozenFixedPoint => {}
                }
            }
            let d = norm.dist(&p, &xs[k]);
            ch.retraction_nesting_slack = ch.retraction_nesting_slack.max(d);
            if !(d < report.constants[k].sigma / 2.0) {
                ch.retraction_nesting = false;
                failures.push(format!("retraction nesting fails for k={k}, j={j}"));
            }
        }
    }

    // Frozen images, frozen projections and stability for every k ≤ j.
    let mut sr = rng(opts.seed.wrapping_add(7919));
    for j in 0..=n {
        let gj = &report.maps[j];
        let radius = report.constants[j].eps_prime / 3.0;
        for k in 0..=j {
            let own = report.maps[k].eval_unchecked(&xs[k]);
            let later = gj.eval_unchecked(&xs[k]);
            let h = hausdorff(&own, &later);
            ch.image_frozen_slack = ch.image_frozen_slack.max(h);
            if !(h <= DEDUP_TOL) {
                ch.image_frozen = false;
                failures.push(format!("G_{j}(x_{k}) differs from G_{k}(x_{k}) by {h:e}"));
            }
            let p = projection(&xs[k], &later, 0.0);
            if !(p.is_singleton() && norm.dist(p.chosen(), &xs[k + 1]) <= DEDUP_TOL) {
                ch.projection_frozen = false;
                failures.push(format!("projection of x_{k} onto G_{j}(x_{k}) is not {{x_{}}}", k + 1));
            }
            for _ in 0..opts.stability_samples {
                let v = ball_point(&dom, &xs[k], radius, &mut sr);
                let h = hausdorff(&gj.eval_unchecked(&v), &own);
                ch.stability_slack = ch.stability_slack.max(h);
                if !(h <= DEDUP_TOL) {
                    ch.stability = false;
                    failures.push(format!("G_{j} moves near x_{k} (H = {h:e})"));
                    break;
                }
            }
        }
    }

    // The chain's final map reproduces the trajectory.
    let topts = TrajectoryOptions {
        max_steps: n + 1,
        tie_policy: TiePolicy::Lexicographic,
        fp_tol: 0.0,
        tie_tol: 0.0,
    };
    match run_trajectory(report.last_map(), &xs[0], &topts) {
        Ok(rec) => {
            let mut visited: Vec<&Point> = rec.steps.iter().map(|s| &s.point).collect();
            if let Some(last) = rec.steps.last() {
                visited.push(&last.projection_chosen);
            }
            // A fixed point ends the run early; the chain stays put there.
            while visited.len() < xs.len() {
                let last = *visited.last().expect("at least the start");
                visited.push(last);
            }
            ch.trajectory_reproduced =
                visited.len() == xs.len() && visited.iter().zip(&xs).all(|(a, b)| norm.dist(a, b) <= DEDUP_TOL);
            ch.regular = rec.steps.iter().all(|s| s.tie_diameter == 0.0);
        }
        Err(e) => failures.push(format!("trajectory run failed: {e}")),
    }
    if !ch.trajectory_reproduced {
        failures.push("G_n does not reproduce the chain trajectory".into());
    }
    if !ch.regular {
        failures.push("trajectory of G_n has a projection tie".into());
    }

    // Distinct points until the first fixed point.
    let last_distinct = report.fixed_point_index().unwrap_or(n + 1);
    ch.distinct = (0..=last_distinct).all(|i| (0..i).all(|k| norm.dist(&xs[i], &xs[k]) > DEDUP_TOL));
    if !ch.distinct {
        failures.push("trajectory repeats before a fixed point".into());
    }

    let cs = &report.constants;
    ch.constants_decrease = cs[0].sigma <= report.build_radius / (n + 1) as f64
        && cs
            .iter()
            .all(|c| c.sigma > 0.0 && c.eps_prime > 0.0 && c.eps_prime < c.sigma)
        && cs
            .windows(2)
            .all(|w| w[1].sigma <= w[0].eps_prime / 3.0 && w[1].sigma < w[0].sigma);
    if !ch.constants_decrease {
        failures.push("chain constants do not decrease".into());
    }

    report.verified = failures.is_empty();
    ch.failures = failures;
    report.steps = steps;
    report.checks = ch;
}
