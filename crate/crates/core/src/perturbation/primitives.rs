//! Bump functions, radial retractions and the blend map `L` used by the
//! fixed-point patches.

use crate::error::{check_range, HyperError, Result};
use crate::hyperspace::{blend_with_set, restrict_to_ball, BallMode, CompactSet};
use crate::space::{Norm, Point};

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    check_range(name, v, v > 0.0, "(0, inf)")
}

/// Radial retraction onto the closed ball of radius `eps` around the origin.
pub fn retract(eps: f64, v: &Point, norm: Norm) -> Result<Point> {
    check_positive("eps", eps)?;
    let len = norm.of(&v.0);
    if len <= eps {
        Ok(v.clone())
    } else {
        Ok(v.scale(eps / len))
    }
}

/// `x ↦ x − r_eps(x − x0)`: constant `x0` on the closed ball, and otherwise
/// the point of `[x0, x]` at distance `‖x − x0‖ − eps` from `x0`.
pub fn retract_toward(eps: f64, x0: &Point, x: &Point, norm: Norm) -> Result<Point> {
    check_positive("eps", eps)?;
    x.check_dim(x0.dim())?;
    Ok(retract_toward_raw(eps, x0, x, norm))
}

pub(crate) fn retract_toward_raw(eps: f64, x0: &Point, x: &Point, norm: Norm) -> Point {
    let d = norm.dist(x, x0);
    if d <= eps {
        x0.clone()
    } else {
        x0.lerp(x, 1.0 - eps / d)
    }
}

/// `max(δ/2 − ‖x − x0‖, 0) / (δ/2)`: 1 at `x0`, 0 outside `B(x0, δ/2)`.
pub fn bump_lambda(x0: &Point, delta: f64, x: &Point, norm: Norm) -> Result<f64> {
    check_positive("delta", delta)?;
    x.check_dim(x0.dim())?;
    let half = delta / 2.0;
    Ok((half - norm.dist(x, x0)).max(0.0) / half)
}

/// `(4/(3δ))·max(0, ‖x − x0‖ − δ/4)` on the closed ball `B̄(x0, δ)`.
pub fn bump_mu(x0: &Point, delta: f64, x: &Point, norm: Norm) -> Result<f64> {
    check_positive("delta", delta)?;
    x.check_dim(x0.dim())?;
    let d = norm.dist(x, x0);
    if d > delta {
        return Err(HyperError::Precondition(format!(
            "bump_mu is defined on the closed ball of radius {delta}; got distance {d}"
        )));
    }
    Ok(mu_raw(d, delta))
}

pub(crate) fn mu_raw(d: f64, delta: f64) -> f64 {
    (4.0 / (3.0 * delta) * (d - delta / 4.0).max(0.0)).min(1.0)
}

/// Weight of the spike: 1 on `B̄(z, σ/2)`, 0 outside `B(z, σ)`, linear in
/// between with slope `2/σ`.
pub(crate) fn plateau_weight(d: f64, sigma: f64) -> f64 {
    ((sigma - d) / (sigma / 2.0)).clamp(0.0, 1.0)
}

/// `x ↦ (1 − μ(x)){z} + μ(x)·(F(x0) ∩ B̄(z, δ/2))` for `x ∈ B(x0, δ)`, and
/// `F(x0) ∩ B̄(z, δ/2)` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct LMap {
    anchor: Point,
    target: Point,
    delta: f64,
    image: CompactSet,
}

/// Builds `L_{x0,z,δ}` from the image `F(x0)`.
pub fn build_l(x0: &Point, z: &Point, delta: f64, base_image: &CompactSet) -> Result<LMap> {
    check_positive("delta", delta)?;
    z.check_dim(x0.dim())?;
    x0.check_dim(base_image.dim())?;
    let near = restrict_to_ball(base_image, z, delta / 2.0, BallMode::InsideClosed);
    if near.is_empty() {
        return Err(HyperError::Precondition(
            "the base image does not meet the closed ball B(z, delta/2)".into(),
        ));
    }
    Ok(LMap {
        anchor: x0.clone(),
        target: z.clone(),
        delta,
        image: CompactSet::new(near, base_image.norm())?,
    })
}

impl LMap {
    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    pub fn target(&self) -> &Point {
        &self.target
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `F(x0) ∩ B̄(z, δ/2)`.
    pub fn image(&self) -> &CompactSet {
        &self.image
    }

    pub fn eval(&self, x: &Point) -> CompactSet {
        let d = self.image.norm().dist(x, &self.anchor);
        if d < self.delta {
            let mu = mu_raw(d, self.delta);
            blend_with_set(mu, &self.target, &self.image).expect("mu lies in [0, 1]")
        } else {
            self.image.clone()
        }
    }
}
