//! JSON form of a map: `{"domain": {...}, "map": {"node": "...", ...}}`.
//! Every node may carry `certified_lip`; on load it is recomputed and a
//! disagreement is an error.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{AffineMap, MapNode, SetMap};
use crate::error::{HyperError, Result};
use crate::hyperspace::CompactSet;
use crate::space::{Domain, Point};

/// Relative agreement required between a stored and a recomputed bound.
const LIP_AGREEMENT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineDocument {
    #[serde(rename = "A")]
    pub matrix: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum NodeDocument {
    FiniteUnion {
        maps: Vec<AffineDocument>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certified_lip: Option<f64>,
    },
    Constant {
        points: Vec<Point>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certified_lip: Option<f64>,
    },
    PointBlend {
        lambda: f64,
        x0: Point,
        inner: Box<NodeDocument>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certified_lip: Option<f64>,
    },
    RetractPrecompose {
        sigma: f64,
        z: Point,
        inner: Box<NodeDocument>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certified_lip: Option<f64>,
    },
    SpikePatch {
        z: Point,
        sigma: f64,
        z_tilde: Point,
        y: Point,
        inner: Box<NodeDocument>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certified_lip: Option<f64>,
    },
    IsolatedFix {
        x0: Point,
        eps_prime: f64,
        delta: f64,
        inner: Box<NodeDocument>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certified_lip: Option<f64>,
    },
    FixFreePatch {
        x0: Point,
        z: Point,
        eps_prime: f64,
        delta: f64,
        inner: Box<NodeDocument>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certified_lip: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapDocument {
    pub domain: Domain,
    pub map: NodeDocument,
}

impl MapDocument {
    pub fn from_map(f: &SetMap) -> Self {
        MapDocument {
            domain: f.domain().clone(),
            map: node_document(f),
        }
    }

    /// Rebuilds the map through the checked constructors.
    pub fn into_map(self) -> Result<SetMap> {
        build(&self.map, &self.domain)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HyperError::Parse(e.to_string()))
    }
}

fn node_document(f: &SetMap) -> NodeDocument {
    let certified_lip = Some(f.certified_lip());
    let boxed = |m: &SetMap| Box::new(node_document(m));
    match f.node() {
        MapNode::FiniteUnion(maps) => NodeDocument::FiniteUnion {
            maps: maps
                .iter()
                .map(|m| AffineDocument {
                    matrix: m.matrix().to_vec(),
                    b: m.offset().0.clone(),
                })
                .collect(),
            certified_lip,
        },
        MapNode::Constant(set) => NodeDocument::Constant {
            points: set.points().to_vec(),
            certified_lip,
        },
        MapNode::PointBlend { lambda, anchor, inner } => NodeDocument::PointBlend {
            lambda: *lambda,
            x0: anchor.clone(),
            inner: boxed(inner),
            certified_lip,
        },
        MapNode::RetractPrecompose { radius, center, inner } => NodeDocument::RetractPrecompose {
            sigma: *radius,
            z: center.clone(),
            inner: boxed(inner),
            certified_lip,
        },
        MapNode::SpikePatch {
            inner,
            center,
            radius,
            spike,
            base,
            ..
        } => NodeDocument::SpikePatch {
            z: center.clone(),
            sigma: *radius,
            z_tilde: spike.clone(),
            y: base.clone(),
            inner: boxed(inner),
            certified_lip,
        },
        MapNode::IsolatedFix {
            inner,
            anchor,
            outer_radius,
            inner_radius,
            ..
        } => NodeDocument::IsolatedFix {
            x0: anchor.clone(),
            eps_prime: *outer_radius,
            delta: *inner_radius,
            inner: boxed(inner),
            certified_lip,
        },
        MapNode::FixFreePatch {
            inner,
            anchor,
            target,
            outer_radius,
            inner_radius,
            ..
        } => NodeDocument::FixFreePatch {
            x0: anchor.clone(),
            z: target.clone(),
            eps_prime: *outer_radius,
            delta: *inner_radius,
            inner: boxed(inner),
            certified_lip,
        },
    }
}

fn point(p: &Point) -> Result<Point> {
    Point::try_new(p.0.clone())
}

fn build(doc: &NodeDocument, domain: &Domain) -> Result<SetMap> {
    let inner = |d: &NodeDocument| build(d, domain).map(Arc::new);
    let (map, stored) = match doc {
        NodeDocument::FiniteUnion { maps, certified_lip } => {
            let maps = maps
                .iter()
                .map(|m| AffineMap::new(m.matrix.clone(), Point::try_new(m.b.clone())?, domain.norm()))
                .collect::<Result<Vec<_>>>()?;
            (SetMap::finite_union(maps, domain.clone())?, certified_lip)
        }
        NodeDocument::Constant { points, certified_lip } => {
            let pts = points.iter().map(point).collect::<Result<Vec<_>>>()?;
            let set = CompactSet::new(pts, domain.norm())?;
            (SetMap::constant(set, domain.clone())?, certified_lip)
        }
        NodeDocument::PointBlend {
            lambda,
            x0,
            inner: i,
            certified_lip,
        } => (SetMap::blended(inner(i)?, point(x0)?, *lambda)?, certified_lip),
        NodeDocument::RetractPrecompose {
            sigma,
            z,
            inner: i,
            certified_lip,
        } => (SetMap::retract_precompose(inner(i)?, point(z)?, *sigma)?, certified_lip),
        NodeDocument::SpikePatch {
            z,
            sigma,
            z_tilde,
            y,
            inner: i,
            certified_lip,
        } => (
            SetMap::spike_patch(inner(i)?, point(z)?, *sigma, point(z_tilde)?, point(y)?)?,
            certified_lip,
        ),
        NodeDocument::IsolatedFix {
            x0,
            eps_prime,
            delta,
            inner: i,
            certified_lip,
        } => (
            SetMap::isolated_fix(inner(i)?, point(x0)?, *eps_prime, *delta)?,
            certified_lip,
        ),
        NodeDocument::FixFreePatch {
            x0,
            z,
            eps_prime,
            delta,
            inner: i,
            certified_lip,
        } => (
            SetMap::fix_free_patch(inner(i)?, point(x0)?, point(z)?, *eps_prime, *delta)?,
            certified_lip,
        ),
    };
    if let Some(stored) = *stored {
        let computed = map.certified_lip();
        if !((stored - computed).abs() <= LIP_AGREEMENT * computed.max(1.0)) {
            return Err(HyperError::LipschitzMismatch { stored, computed });
        }
    }
    Ok(map)
}
