//! `hyperfix verify`: property suites against a loaded map.

use std::path::Path;

use serde_json::{json, Value};

use hyperfix_core::perturbation::verify_spike;
use hyperfix_core::sampling::sample_points;
use hyperfix_core::{
    attract_projection, build_chain_with, dist_point_set, estimate_lipschitz, fixed_point_gap, hausdorff, union,
    ChainOptions, SetMap,
};

use crate::input::{parse_point, read_map};
use crate::report::{config, emit};
use crate::{Common, Failure, Suite};

struct Outcome {
    name: &'static str,
    /// `None` when the suite does not apply to this map.
    passed: Option<bool>,
    details: Value,
}

pub fn verify(c: &Common, map: &Path, suite: Suite, start: Option<&str>) -> Result<(), Failure> {
    let f = read_map(map)?;
    let start = start.map(parse_point).transpose()?;
    if let Some(s) = &start {
        if s.dim() != f.domain().dim() {
            return Err(Failure::Input(format!(
                "start has dimension {}, domain has {}",
                s.dim(),
                f.domain().dim()
            )));
        }
    }
    let wanted = |s: Suite| suite == Suite::All || suite == s;
    let mut outcomes = Vec::new();
    if wanted(Suite::Metric) {
        outcomes.push(metric(&f, c)?);
    }
    if wanted(Suite::Lipschitz) {
        outcomes.push(lipschitz(&f, c)?);
    }
    if wanted(Suite::Construction) {
        outcomes.push(construction(&f, c)?);
    }
    if wanted(Suite::Stability) {
        outcomes.push(stability(&f, c, start)?);
    }
    let passed = outcomes.iter().all(|o| o.passed != Some(false));
    let suite_name = match suite {
        Suite::Metric => "metric",
        Suite::Lipschitz => "lipschitz",
        Suite::Construction => "construction",
        Suite::Stability => "stability",
        Suite::All => "all",
    };
    let cfg = config(c, "verify", &[map], json!({ "suite": suite_name }));
    let result = json!({
        "certified_lip": f.certified_lip(),
        "passed": passed,
        "suites": outcomes.iter().map(|o| json!({
            "name": o.name,
            "status": match o.passed { Some(true) => "pass", Some(false) => "fail", None => "skipped" },
            "details": o.details,
        })).collect::<Vec<_>>(),
    });
    emit(c, cfg, result, || {
        let mut out = String::from("suite,status\n");
        for o in &outcomes {
            let status = match o.passed {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "skipped",
            };
            out.push_str(&format!("{},{status}\n", o.name));
        }
        out
    })?;
    if !passed {
        let failed: Vec<&str> = outcomes
            .iter()
            .filter(|o| o.passed == Some(false))
            .map(|o| o.name)
            .collect();
        return Err(Failure::Check(format!("failed suites: {}", failed.join(", "))));
    }
    Ok(())
}

/// Hausdorff axioms, the point-to-set bound and the union bound on images of
/// sampled points.
fn metric(f: &SetMap, c: &Common) -> Result<Outcome, Failure> {
    let pts = sample_points(f.domain(), c.samples.clamp(4, 400), c.seed);
    let images = pts.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>, _>>()?;
    let k = images.len();
    let mut violations = 0usize;
    let mut worst_slack = f64::INFINITY;
    let mut note = |slack: f64| {
        worst_slack = worst_slack.min(slack);
        if slack < -c.tol {
            violations += 1;
        }
    };
    for i in 0..c.samples.max(1) {
        let (a, b, m, d) = (
            &images[i % k],
            &images[(7 * i + 1) % k],
            &images[(13 * i + 5) % k],
            &images[(3 * i + 2) % k],
        );
        let p = &pts[(11 * i + 3) % k];
        let hab = hausdorff(a, b);
        note(-(hab - hausdorff(b, a)).abs());
        note(-hausdorff(a, a));
        note(hab + hausdorff(b, m) - hausdorff(a, m));
        note(dist_point_set(p, b) + hab - dist_point_set(p, a));
        note(hausdorff(a, m).max(hausdorff(b, d)) - hausdorff(&union(a, b), &union(m, d)));
    }
    Ok(Outcome {
        name: "metric",
        passed: Some(violations == 0),
        details: json!({ "instances": c.samples.max(1), "violations": violations, "min_slack": worst_slack }),
    })
}

/// Sampled Lipschitz ratio against the certified bound.
fn lipschitz(f: &SetMap, c: &Common) -> Result<Outcome, Failure> {
    let est = estimate_lipschitz(f, c.samples.max(2), c.seed)?;
    let lip = f.certified_lip();
    let ok = est <= lip + c.tol && lip <= 1.0;
    Ok(Outcome {
        name: "lipschitz",
        passed: Some(ok),
        details: json!({ "certified_lip": lip, "estimated_lip": est, "slack": lip - est }),
    })
}

/// The spike construction at the first sampled non-fixed point, with
/// `σ = δ/4`. Applies to strict contractions only.
fn construction(f: &SetMap, c: &Common) -> Result<Outcome, Failure> {
    if !f.is_strict_contraction() {
        return Ok(Outcome {
            name: "construction",
            passed: None,
            details: json!({ "reason": "map is not a strict contraction" }),
        });
    }
    let candidates = sample_points(f.domain(), 64, c.seed);
    let mut z = None;
    for p in candidates {
        let gap = fixed_point_gap(f, &p)?;
        if gap > 1e3 * c.tol.max(1e-12) {
            z = Some((p, gap));
            break;
        }
    }
    let Some((z, gap)) = z else {
        return Ok(Outcome {
            name: "construction",
            passed: None,
            details: json!({ "reason": "no sampled point with a positive fixed-point gap" }),
        });
    };
    let sigma = gap / 4.0;
    let built = attract_projection(f, &z, sigma)?;
    let checks = verify_spike(f, &z, &built, c.samples, 50, c.seed);
    Ok(Outcome {
        name: "construction",
        passed: Some(checks.all_pass()),
        details: json!({
            "z": z,
            "delta": built.delta,
            "sigma": built.sigma,
            "eps": built.eps,
            "eps_prime": built.eps_prime,
            "certified_lip": built.map.certified_lip(),
            "checks": checks,
        }),
    })
}

/// A short verified chain (`n = 2`, `r = 0.5`) from `start`.
fn stability(f: &SetMap, c: &Common, start: Option<hyperfix_core::Point>) -> Result<Outcome, Failure> {
    let x0 = start.unwrap_or_else(|| f.domain().centroid());
    let opts = ChainOptions {
        samples: c.samples,
        seed: c.seed,
        ..ChainOptions::default()
    };
    let rep = build_chain_with(f, &x0, 2, 0.5, &opts)?;
    Ok(Outcome {
        name: "stability",
        passed: Some(rep.verified),
        details: json!({
            "start": x0,
            "n": 2,
            "r": 0.5,
            "trajectory": rep.trajectory,
            "checks": rep.checks,
        }),
    })
}
