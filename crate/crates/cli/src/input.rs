use std::path::Path;

use hyperfix_core::hyperspace::SetDocument;
use hyperfix_core::{CompactSet, Domain, MapDocument, Norm, Point, SetMap};

use crate::Failure;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Comma-separated coordinates, e.g. `0.5,-1`.
pub fn parse_point(text: &str) -> Result<Point, Failure> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Input(format!("point {text:?}: {e}")))?;
    Ok(Point::try_new(coords)?)
}

pub struct LoadedSet {
    pub set: CompactSet,
    pub domain: Option<Domain>,
}

pub fn read_set(path: &Path, norm: Option<Norm>) -> Result<LoadedSet, Failure> {
    let doc: SetDocument =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let domain = doc.domain.clone();
    let set = doc.into_set(norm)?;
    Ok(LoadedSet { set, domain })
}

pub fn read_domain(path: &Path) -> Result<Domain, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn read_map(path: &Path) -> Result<SetMap, Failure> {
    let doc = MapDocument::from_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(doc.into_map()?)
}
