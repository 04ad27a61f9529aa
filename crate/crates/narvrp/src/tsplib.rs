//! TSPLIB parser for 2-D Euclidean instances.
//!
//! Only `EDGE_WEIGHT_TYPE: EUC_2D` files with a `NODE_COORD_SECTION` are
//! accepted. Parsed coordinates are min-max rescaled into the unit square
//! (the longest axis spans `[0, 1]`, aspect ratio preserved) because the
//! models are trained on unit-square data; the original coordinates are kept
//! on the instance so lengths can be reported in native units.

use thiserror::Error;

use crate::problem::{Kind, Point, VrpInstance};

#[derive(Debug, Error, PartialEq)]
pub enum TsplibError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required field {0}")]
    Missing(&'static str),
    #[error("unsupported format: {0}")]
    Unsupported(String),
}

fn parse_error(line: usize, message: impl Into<String>) -> TsplibError {
    TsplibError::Parse { line, message: message.into() }
}

/// Parse TSPLIB text into a unit-square instance with `normalized = true`.
pub fn parse_tsplib(text: &str) -> Result<VrpInstance, TsplibError> {
    let mut name = String::from("tsplib");
    let mut dimension: Option<usize> = None;
    let mut edge_weight_type: Option<String> = None;
    let mut coords: Vec<Point> = Vec::new();
    let mut in_coords = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if in_coords {
            if line.eq_ignore_ascii_case("EOF") {
                in_coords = false;
                continue;
            }
            let mut parts = line.split_whitespace();
            let _id = parts
                .next()
                .ok_or_else(|| parse_error(lineno, "expected node line `id x y`"))?;
            let x: f64 = parts
                .next()
                .ok_or_else(|| parse_error(lineno, "missing x coordinate"))?
                .parse()
                .map_err(|_| parse_error(lineno, "x coordinate is not a number"))?;
            let y: f64 = parts
                .next()
                .ok_or_else(|| parse_error(lineno, "missing y coordinate"))?
                .parse()
                .map_err(|_| parse_error(lineno, "y coordinate is not a number"))?;
            coords.push([x, y]);
            if Some(coords.len()) == dimension {
                in_coords = false;
            }
            continue;
        }
        if line.eq_ignore_ascii_case("NODE_COORD_SECTION") {
            if dimension.is_none() {
                return Err(parse_error(lineno, "NODE_COORD_SECTION before DIMENSION"));
            }
            in_coords = true;
            continue;
        }
        if line.eq_ignore_ascii_case("EOF") {
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim().to_ascii_uppercase(), v.trim().to_string()),
            // Keyword-only lines such as DISPLAY_DATA_SECTION are unsupported.
            None => (line.to_ascii_uppercase(), String::new()),
        };
        match key.as_str() {
            "NAME" => name = value,
            "COMMENT" => {}
            "TYPE" => {
                if !value.eq_ignore_ascii_case("TSP") {
                    return Err(TsplibError::Unsupported(format!("TYPE {value}")));
                }
            }
            "DIMENSION" => {
                dimension = Some(
                    value
                        .parse()
                        .map_err(|_| parse_error(lineno, "DIMENSION is not an integer"))?,
                );
            }
            "EDGE_WEIGHT_TYPE" => edge_weight_type = Some(value),
            "EDGE_WEIGHT_FORMAT" | "DISPLAY_DATA_TYPE" | "NODE_COORD_TYPE" => {}
            other => {
                return Err(parse_error(lineno, format!("unrecognized section `{other}`")));
            }
        }
    }

    let dimension = dimension.ok_or(TsplibError::Missing("DIMENSION"))?;
    let ewt = edge_weight_type.ok_or(TsplibError::Missing("EDGE_WEIGHT_TYPE"))?;
    if !ewt.eq_ignore_ascii_case("EUC_2D") {
        return Err(TsplibError::Unsupported(format!("EDGE_WEIGHT_TYPE {ewt}")));
    }
    if coords.is_empty() {
        return Err(TsplibError::Missing("NODE_COORD_SECTION"));
    }
    if coords.len() != dimension {
        return Err(TsplibError::Unsupported(format!(
            "DIMENSION {dimension} but {} coordinate lines",
            coords.len()
        )));
    }
    if dimension < 2 {
        return Err(TsplibError::Unsupported("DIMENSION < 2".into()));
    }

    Ok(rescale_to_unit_square(name, coords))
}

fn rescale_to_unit_square(name: String, raw: Vec<Point>) -> VrpInstance {
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &raw {
        min_x = min_x.min(p[0]);
        max_x = max_x.max(p[0]);
        min_y = min_y.min(p[1]);
        max_y = max_y.max(p[1]);
    }
    let span = (max_x - min_x).max(max_y - min_y);
    let scale = if span > 0.0 { 1.0 / span } else { 1.0 };
    let coords = raw
        .iter()
        .map(|p| [(p[0] - min_x) * scale, (p[1] - min_y) * scale])
        .collect();
    VrpInstance {
        kind: Kind::Tsp,
        coords,
        demands: None,
        capacity: None,
        id: name,
        normalized: true,
        raw_coords: Some(raw),
    }
}
