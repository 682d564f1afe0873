use std::path::Path;

use serde_json::{json, Value};

use hyperfix_core::{
    build_chain_with, evaluate, hausdorff as hausdorff_distance, is_regular_with, porosity_experiment, projection,
    run_trajectory, ChainOptions, CompactSet, Domain, MapDocument, Point, Shape, Termination, TrajectoryOptions,
};

use crate::input::{parse_point, read_domain, read_map, read_set};
use crate::report::{config, emit};
use crate::{Common, Failure};

fn set_json(s: &CompactSet) -> Value {
    json!(s.points())
}

fn checked_hausdorff(a: &CompactSet, b: &CompactSet) -> Result<f64, Failure> {
    if a.dim() != b.dim() {
        return Err(Failure::Input(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    if a.norm() != b.norm() {
        return Err(Failure::Input(format!("norm mismatch: {} vs {}", a.norm(), b.norm())));
    }
    Ok(hausdorff_distance(a, b))
}

pub fn hausdorff(c: &Common, a: &Path, b: &Path) -> Result<(), Failure> {
    let sa = read_set(a, c.norm)?.set;
    let sb = read_set(b, c.norm)?.set;
    let h = checked_hausdorff(&sa, &sb)?;
    let cfg = config(c, "hausdorff", &[a, b], json!({ "norm": sa.norm().name() }));
    emit(c, cfg, json!({ "hausdorff": h }), || format!("hausdorff\n{h}\n"))
}

pub fn project(c: &Common, set: &Path, point: &str) -> Result<(), Failure> {
    let s = read_set(set, c.norm)?.set;
    let x = parse_point(point)?;
    if x.dim() != s.dim() {
        return Err(Failure::Input(format!(
            "point has dimension {}, set has {}",
            x.dim(),
            s.dim()
        )));
    }
    let p = projection(&x, &s, c.tol);
    let cfg = config(c, "project", &[set], json!({ "point": x, "norm": s.norm().name() }));
    let result = json!({
        "min_distance": p.min_distance,
        "tie_diameter": p.tie_diameter,
        "unique": p.is_singleton(),
        "chosen": p.chosen(),
        "minimizers": set_json(&p.minimizers),
    });
    emit(c, cfg, result, || p.minimizers.to_csv())
}

pub fn eval(c: &Common, map: &Path, point: &str) -> Result<(), Failure> {
    let f = read_map(map)?;
    let x = parse_point(point)?;
    let image = evaluate(&f, &x)?;
    let cfg = config(c, "eval", &[map], json!({ "point": x }));
    let result = json!({
        "certified_lip": f.certified_lip(),
        "image_size": image.len(),
        "image": set_json(&image),
    });
    emit(c, cfg, result, || image.to_csv())
}

pub fn trajectory(c: &Common, map: &Path, start: &str, steps: usize) -> Result<(), Failure> {
    let f = read_map(map)?;
    let x0 = parse_point(start)?;
    let opts = TrajectoryOptions {
        max_steps: steps,
        tie_policy: c.tie_break.policy(),
        fp_tol: c.fp_tol,
        tie_tol: c.tol,
    };
    let rec = run_trajectory(&f, &x0, &opts)?;
    let regular = is_regular_with(&rec, c.tol);
    let cfg = config(c, "trajectory", &[map], json!({ "start": x0, "steps": steps }));
    let result = json!({
        "terminated_by": rec.terminated_by,
        "regular": regular,
        "steps": rec.steps,
    });
    emit(c, cfg, result, || rec.to_csv())?;
    if rec.terminated_by == Termination::TieError {
        return Err(Failure::Check(format!(
            "projection tie at step {}",
            rec.steps.len() - 1
        )));
    }
    Ok(())
}

pub fn chain(c: &Common, map: &Path, start: &str, n: usize, r: f64, save_map: Option<&Path>) -> Result<(), Failure> {
    let f = read_map(map)?;
    let x0 = parse_point(start)?;
    let opts = ChainOptions {
        samples: c.samples,
        seed: c.seed,
        ..ChainOptions::default()
    };
    let rep = build_chain_with(&f, &x0, n, r, &opts)?;
    if let Some(path) = save_map {
        std::fs::write(path, MapDocument::from_map(rep.last_map()).to_json())
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    let cfg = config(
        c,
        "chain",
        &[map],
        json!({ "start": x0, "n": n, "r": r, "stability_samples": opts.stability_samples }),
    );
    emit(c, cfg, rep.to_json(), || {
        let d = x0.dim();
        let mut out = String::from("step");
        for i in 0..d {
            out.push_str(&format!(",x{}", i + 1));
        }
        out.push_str(",kind,delta,sigma,eps,eps_prime,lip_after\n");
        for (k, (x, k_c)) in rep.trajectory.iter().zip(&rep.constants).enumerate() {
            out.push_str(&k.to_string());
            for v in x.coords() {
                out.push_str(&format!(",{v}"));
            }
            let kind = serde_json::to_value(k_c.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string));
            out.push_str(&format!(
                ",{},{},{},{},{},{}\n",
                kind.unwrap_or_default(),
                k_c.delta,
                k_c.sigma,
                k_c.eps,
                k_c.eps_prime,
                k_c.lip_after
            ));
        }
        out
    })?;
    if !rep.verified {
        return Err(Failure::Check(format!(
            "chain verification failed: {}",
            rep.checks.failures.join("; ")
        )));
    }
    Ok(())
}

/// Bounding box of the set and `x`, widened by one in every direction.
fn default_domain(s: &CompactSet, x: &Point) -> Result<Domain, Failure> {
    let d = s.dim();
    let mut lo = x.coords().to_vec();
    let mut hi = lo.clone();
    for p in s.points() {
        for i in 0..d {
            lo[i] = lo[i].min(p.coords()[i]);
            hi[i] = hi[i].max(p.coords()[i]);
        }
    }
    let lo = lo.into_iter().map(|v| v - 1.0).collect();
    let hi = hi.into_iter().map(|v| v + 1.0).collect();
    Ok(Domain::new(Shape::Box { lo, hi }, s.norm())?)
}

pub fn porosity(c: &Common, set: &Path, point: &str, n: usize, domain: Option<&Path>) -> Result<(), Failure> {
    let loaded = read_set(set, c.norm)?;
    let s = loaded.set;
    let x = parse_point(point)?;
    if x.dim() != s.dim() {
        return Err(Failure::Input(format!(
            "point has dimension {}, set has {}",
            x.dim(),
            s.dim()
        )));
    }
    let dom = match (domain, loaded.domain) {
        (Some(path), _) => read_domain(path)?,
        (None, Some(d)) => d,
        (None, None) => default_domain(&s, &x)?,
    };
    if dom.norm() != s.norm() {
        return Err(Failure::Input(format!(
            "domain norm {} differs from set norm {}",
            dom.norm(),
            s.norm()
        )));
    }
    let rep = porosity_experiment(&s, &x, n, c.samples, c.seed, &dom)?;
    let mut inputs = vec![set];
    inputs.extend(domain);
    let cfg = config(c, "porosity", &inputs, json!({ "point": x, "n": n, "domain": dom }));
    let result = serde_json::to_value(&rep).map_err(Failure::input)?;
    emit(c, cfg, result, || {
        let mut out =
            String::from("r,ball_radius,tie_bound,samples,max_tie_diameter,violations,containment_violations\n");
        for o in &rep.per_r {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                o.r, o.ball_radius, o.tie_bound, o.samples, o.max_tie_diameter, o.violations, o.containment_violations
            ));
        }
        out
    })?;
    if !rep.passed() {
        return Err(Failure::Check(format!("{} sampled violations", rep.total_violations)));
    }
    Ok(())
}
