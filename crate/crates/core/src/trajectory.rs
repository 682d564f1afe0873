//! Successive approximations `x_{k+1} ∈ P_{F(x_k)}(x_k)`, regularity, and the
//! sampled membership test for the sets of maps whose trajectories near a
//! start point have small projection ties.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, HyperError, Result};
use crate::hyperspace::projection;
use crate::mapping::SetMap;
use crate::sampling::{ball_point, rng};
use crate::space::Point;
use crate::{DEFAULT_FP_TOL, TAU_CMP};

/// Cap on enumerated branches in [`membership_an`].
pub const BRANCH_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    /// Continue with the lexicographically smallest nearest point.
    #[default]
    Lexicographic,
    /// Stop with [`Termination::TieError`] at the first tie.
    ErrorOnTie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxSteps,
    FixedPoint,
    TieError,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOptions {
    pub max_steps: usize,
    pub tie_policy: TiePolicy,
    /// A step with `dist(x, F(x)) ≤ fp_tol` ends the run.
    pub fp_tol: f64,
    /// Extra slack for counting nearest points as tied.
    pub tie_tol: f64,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        TrajectoryOptions {
            max_steps: 100,
            tie_policy: TiePolicy::Lexicographic,
            fp_tol: DEFAULT_FP_TOL,
            tie_tol: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub point: Point,
    pub image_size: usize,
    pub min_distance: f64,
    pub tie_diameter: f64,
    pub projection_chosen: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub steps: Vec<TrajectoryStep>,
    pub terminated_by: Termination,
}

impl TrajectoryRecord {
    pub fn points(&self) -> Vec<Point> {
        self.steps.iter().map(|s| s.point.clone()).collect()
    }

    /// One JSON object per step, one per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.steps.iter().enumerate() {
            let line = serde_json::json!({
                "step": k,
                "point": s.point,
                "image_size": s.image_size,
                "min_distance": s.min_distance,
                "tie_diameter": s.tie_diameter,
                "projection_chosen": s.projection_chosen,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }

    /// `step, x1, …, xd, min_distance, tie_diameter` rows with a header.
    pub fn to_csv(&self) -> String {
        let d = self.steps.first().map_or(0, |s| s.point.dim());
        let mut out = String::from("step");
        for i in 0..d {
            out.push_str(&format!(",x{}", i + 1));
        }
        out.push_str(",min_distance,tie_diameter\n");
        for (k, s) in self.steps.iter().enumerate() {
            out.push_str(&k.to_string());
            for c in &s.point.0 {
                out.push_str(&format!(",{c}"));
            }
            out.push_str(&format!(",{},{}\n", s.min_distance, s.tie_diameter));
        }
        out
    }
}

/// Iterates nearest-point steps from `x0`.
pub fn run_trajectory(f: &SetMap, x0: &Point, opts: &TrajectoryOptions) -> Result<TrajectoryRecord> {
    if opts.max_steps == 0 {
        return Err(HyperError::Precondition("max_steps must be positive".into()));
    }
    check_range("fp_tol", opts.fp_tol, opts.fp_tol >= 0.0, "[0, inf)")?;
    check_range("tie_tol", opts.tie_tol, opts.tie_tol >= 0.0, "[0, inf)")?;
    let mut x = x0.clone();
    let mut steps = Vec::new();
    loop {
        let image = f.eval(&x)?;
        let p = projection(&x, &image, opts.tie_tol);
        let chosen = p.chosen().clone();
        steps.push(TrajectoryStep {
            point: x,
            image_size: image.len(),
            min_distance: p.min_distance,
            tie_diameter: p.tie_diameter,
            projection_chosen: chosen.clone(),
        });
        let terminated_by = if opts.tie_policy == TiePolicy::ErrorOnTie && p.tie_diameter > TAU_CMP {
            Some(Termination::TieError)
        } else if p.min_distance <= opts.fp_tol {
            Some(Termination::FixedPoint)
        } else if steps.len() >= opts.max_steps {
            Some(Termination::MaxSteps)
        } else {
            None
        };
        if let Some(terminated_by) = terminated_by {
            return Ok(TrajectoryRecord { steps, terminated_by });
        }
        x = chosen;
    }
}

/// Every recorded tie diameter is at most `TAU_CMP`.
pub fn is_regular(rec: &TrajectoryRecord) -> bool {
    is_regular_with(rec, TAU_CMP)
}

pub fn is_regular_with(rec: &TrajectoryRecord, tol: f64) -> bool {
    rec.steps.iter().all(|s| s.tie_diameter <= tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MembershipVerdict {
    /// Every enumerated branch from every sampled start kept its ties at most
    /// `β`. Evidence at this radius only; it does not decide membership.
    VerifiedAtRadius {
        radius: f64,
        starts: usize,
        branches: usize,
        max_tie_diameter: f64,
    },
    /// A branch reached a tie wider than `β`.
    Violated { witness: Vec<Point>, tie_diameter: f64 },
    /// The branch cap was hit before a decision.
    Inconclusive { branches: usize },
}

impl MembershipVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, MembershipVerdict::VerifiedAtRadius { .. })
    }
}

/// Samples starts in `B(x0, radius) ∩ C` (the first is `x0`) and follows
/// every nearest-point branch for `n` steps, checking that each projection
/// set (ties at exact equality) has diameter at most `beta`.
pub fn membership_an(
    f: &SetMap,
    x0: &Point,
    n: usize,
    beta: f64,
    radius: f64,
    probes: usize,
    seed: u64,
) -> Result<MembershipVerdict> {
    check_range("beta", beta, beta > 0.0 && beta <= 1.0, "(0, 1]")?;
    check_range("radius", radius, radius > 0.0, "(0, inf)")?;
    f.domain().require_inside(x0, TAU_CMP)?;
    let dom = f.domain();
    let mut r = rng(seed);
    let mut starts = vec![x0.clone()];
    while starts.len() < probes.max(1) {
        starts.push(ball_point(dom, x0, radius, &mut r));
    }
    let mut branches = 0usize;
    let mut max_tie = 0.0_f64;
    for v0 in &starts {
        // Depth-first over (path so far).
        let mut stack: Vec<Vec<Point>> = vec![vec![v0.clone()]];
        while let Some(path) = stack.pop() {
            let v = path.last().expect("paths are non-empty");
            let p = projection(v, &f.eval_unchecked(v), 0.0);
            max_tie = max_tie.max(p.tie_diameter);
            if p.tie_diameter > beta {
                return Ok(MembershipVerdict::Violated {
                    witness: path,
                    tie_diameter: p.tie_diameter,
                });
            }
            if path.len() > n {
                branches += 1;
                continue;
            }
            for next in p.minimizers.points() {
                if branches + stack.len() >= BRANCH_CAP {
                    return Ok(MembershipVerdict::Inconclusive { branches: BRANCH_CAP });
                }
                let mut extended = path.clone();
                extended.push(next.clone());
                stack.push(extended);
            }
        }
    }
    Ok(MembershipVerdict::VerifiedAtRadius {
        radius,
        starts: starts.len(),
        branches,
        max_tie_diameter: max_tie,
    })
}
