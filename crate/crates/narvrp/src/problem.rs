//! Problem instances and tours.
//!
//! Node indexing convention, used across the whole crate:
//! * TSP: nodes are `1..=n`; `coords[i]` is the point of node `i + 1`.
//! * CVRP: the depot is node `0` and customers are `1..=n`; `coords[i]` is the
//!   point of node `i`. `demands[i]` is the demand of customer `i + 1`.
//!
//! A [`Tour`] is the action sequence of a solution. For CVRP it excludes the
//! implicit depot start and the final depot return, but contains every
//! intermediate depot visit that splits sub-tours.
//!
//! Instances serialize as JSON objects with fields
//! `{kind, coords, demands, capacity, id, normalized, raw_coords}`; reals are
//! plain JSON doubles (serde_json emits the shortest representation that
//! round-trips the exact f64). Datasets are stored as JSON Lines, one instance
//! per line.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;

/// Problem family of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Tsp,
    Cvrp,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Tsp => write!(f, "tsp"),
            Kind::Cvrp => write!(f, "cvrp"),
        }
    }
}

pub type Point = [f64; 2];

pub fn dist(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// A TSP or CVRP instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VrpInstance {
    pub kind: Kind,
    /// TSP: `n` points. CVRP: `n + 1` points with the depot first.
    pub coords: Vec<Point>,
    /// CVRP only: per-customer demands (`demands[i]` belongs to customer `i+1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demands: Option<Vec<f64>>,
    /// CVRP only: vehicle capacity `Q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
    pub id: String,
    /// Whether coordinates were rescaled into the unit square.
    pub normalized: bool,
    /// Original coordinates when `normalized` rescaled an external instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_coords: Option<Vec<Point>>,
}

impl VrpInstance {
    /// Number of customers (TSP: number of nodes).
    pub fn n(&self) -> usize {
        match self.kind {
            Kind::Tsp => self.coords.len(),
            Kind::Cvrp => self.coords.len() - 1,
        }
    }

    /// Coordinates of a node under the crate-wide indexing convention.
    pub fn point(&self, node: usize) -> Point {
        match self.kind {
            Kind::Tsp => self.coords[node - 1],
            Kind::Cvrp => self.coords[node],
        }
    }

    /// Demand of a CVRP customer.
    pub fn demand(&self, node: usize) -> f64 {
        debug_assert!(node >= 1, "depot has no demand");
        self.demands.as_ref().expect("demands on a TSP instance")[node - 1]
    }

    pub fn cap(&self) -> f64 {
        self.capacity.expect("capacity on a TSP instance")
    }

    /// Number of successor slots in a decoding distribution / tightness row.
    /// TSP: `n` (nodes `1..=n`); CVRP: `n + 1` (slot 0 is the depot).
    pub fn slots(&self) -> usize {
        match self.kind {
            Kind::Tsp => self.n(),
            Kind::Cvrp => self.n() + 1,
        }
    }

    pub fn slot_to_node(&self, slot: usize) -> usize {
        match self.kind {
            Kind::Tsp => slot + 1,
            Kind::Cvrp => slot,
        }
    }

    pub fn node_to_slot(&self, node: usize) -> usize {
        match self.kind {
            Kind::Tsp => node - 1,
            Kind::Cvrp => node,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Uniform TSP instance on the unit square, a pure function of `(n, seed)`.
///
/// Draw order: for each node, x then y.
pub fn generate_tsp(n: usize, seed: u64) -> Result<VrpInstance, ProblemError> {
    if n < 2 {
        return Err(ProblemError::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let mut rng = SplitMix64::new(seed);
    let coords = (0..n).map(|_| [rng.next_f64(), rng.next_f64()]).collect();
    Ok(VrpInstance {
        kind: Kind::Tsp,
        coords,
        demands: None,
        capacity: None,
        id: format!("tsp-n{n}-s{seed}"),
        normalized: false,
        raw_coords: None,
    })
}

/// Uniform CVRP instance, a pure function of `(n, seed)`.
///
/// Draw order: depot x, depot y, then per customer x and y, then per customer
/// one integer draw for the raw demand. Raw demands are uniform over `1..=9`
/// and scaled by `1 / (floor(n / 5) + 30)`; the capacity is 1.
pub fn generate_cvrp(n: usize, seed: u64) -> Result<VrpInstance, ProblemError> {
    if n < 2 {
        return Err(ProblemError::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut coords = Vec::with_capacity(n + 1);
    coords.push([rng.next_f64(), rng.next_f64()]);
    for _ in 0..n {
        coords.push([rng.next_f64(), rng.next_f64()]);
    }
    let denom = (n / 5 + 30) as f64;
    let demands = (0..n).map(|_| (1 + rng.next_below(9)) as f64 / denom).collect();
    Ok(VrpInstance {
        kind: Kind::Cvrp,
        coords,
        demands: Some(demands),
        capacity: Some(1.0),
        id: format!("cvrp-n{n}-s{seed}"),
        normalized: false,
        raw_coords: None,
    })
}

/// Dataset convention: instance `k` uses seed `base_seed + k`.
pub fn generate_dataset(
    kind: Kind,
    n: usize,
    count: usize,
    base_seed: u64,
) -> Result<Vec<VrpInstance>, ProblemError> {
    (0..count)
        .map(|k| {
            let seed = base_seed.wrapping_add(k as u64);
            match kind {
                Kind::Tsp => generate_tsp(n, seed),
                Kind::Cvrp => generate_cvrp(n, seed),
            }
        })
        .collect()
}

/// Write a dataset as JSON Lines.
pub fn write_dataset(path: &Path, instances: &[VrpInstance]) -> Result<(), ProblemError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for inst in instances {
        writeln!(out, "{}", inst.to_json())?;
    }
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Vec<VrpInstance>, ProblemError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(VrpInstance::from_json(&line)?);
    }
    Ok(out)
}

/// An ordered action sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tour {
    pub kind: Kind,
    pub actions: Vec<usize>,
}

impl Tour {
    pub fn new(kind: Kind, actions: Vec<usize>) -> Self {
        Self { kind, actions }
    }
}

/// First feasibility rule a tour violates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("tour kind {tour} does not match instance kind {instance}")]
    KindMismatch { tour: Kind, instance: Kind },
    #[error("tour is empty")]
    Empty,
    #[error("node {node} at position {position} is out of range")]
    NodeOutOfRange { node: usize, position: usize },
    #[error("repeated node {node} at position {position}")]
    RepeatedNode { node: usize, position: usize },
    #[error("tour visits {visited} of {expected} nodes")]
    IncompleteCoverage { visited: usize, expected: usize },
    #[error("depot visit at position {position} must not start or end the tour")]
    DepotAtBoundary { position: usize },
    #[error("consecutive depot visits at position {position}")]
    ConsecutiveDepots { position: usize },
    #[error("sub-tour ending at position {position} carries demand {load} > capacity {capacity}")]
    CapacityExceeded { position: usize, load: f64, capacity: f64 },
}

/// Check every tour invariant; reports the first violated rule.
pub fn validate_tour(instance: &VrpInstance, tour: &Tour) -> Result<(), Violation> {
    if tour.kind != instance.kind {
        return Err(Violation::KindMismatch { tour: tour.kind, instance: instance.kind });
    }
    if tour.actions.is_empty() {
        return Err(Violation::Empty);
    }
    let n = instance.n();
    match instance.kind {
        Kind::Tsp => {
            let mut seen = vec![false; n + 1];
            for (pos, &node) in tour.actions.iter().enumerate() {
                if node < 1 || node > n {
                    return Err(Violation::NodeOutOfRange { node, position: pos + 1 });
                }
                if seen[node] {
                    return Err(Violation::RepeatedNode { node, position: pos + 1 });
                }
                seen[node] = true;
            }
            if tour.actions.len() != n {
                return Err(Violation::IncompleteCoverage {
                    visited: tour.actions.len(),
                    expected: n,
                });
            }
            Ok(())
        }
        Kind::Cvrp => {
            let cap = instance.cap();
            let mut seen = vec![false; n + 1];
            let mut load = 0.0;
            let mut visited = 0usize;
            let last = tour.actions.len() - 1;
            for (pos, &node) in tour.actions.iter().enumerate() {
                if node > n {
                    return Err(Violation::NodeOutOfRange { node, position: pos + 1 });
                }
                if node == 0 {
                    if pos == 0 || pos == last {
                        return Err(Violation::DepotAtBoundary { position: pos + 1 });
                    }
                    if tour.actions[pos - 1] == 0 {
                        return Err(Violation::ConsecutiveDepots { position: pos + 1 });
                    }
                    load = 0.0;
                    continue;
                }
                if seen[node] {
                    return Err(Violation::RepeatedNode { node, position: pos + 1 });
                }
                seen[node] = true;
                visited += 1;
                load += instance.demand(node);
                if load > cap {
                    return Err(Violation::CapacityExceeded { position: pos + 1, load, capacity: cap });
                }
            }
            if visited != n {
                return Err(Violation::IncompleteCoverage { visited, expected: n });
            }
            Ok(())
        }
    }
}

fn length_with(points: &dyn Fn(usize) -> Point, instance: &VrpInstance, tour: &Tour) -> f64 {
    match instance.kind {
        Kind::Tsp => {
            let mut total = 0.0;
            for w in tour.actions.windows(2) {
                total += dist(points(w[0]), points(w[1]));
            }
            total + dist(points(*tour.actions.last().unwrap()), points(tour.actions[0]))
        }
        Kind::Cvrp => {
            let depot = points(0);
            let mut total = 0.0;
            let mut prev = depot;
            for &node in &tour.actions {
                let p = points(node);
                total += dist(prev, p);
                prev = p;
            }
            total + dist(prev, depot)
        }
    }
}

/// Closed tour length in Euclidean distance. TSP tours return to their first
/// node; CVRP sub-tours start and end at the depot.
pub fn tour_length(instance: &VrpInstance, tour: &Tour) -> Result<f64, Violation> {
    validate_tour(instance, tour)?;
    Ok(length_with(&|node| instance.point(node), instance, tour))
}

/// Tour length on the retained pre-rescale coordinates of a parsed instance.
pub fn tour_length_raw(instance: &VrpInstance, tour: &Tour) -> Result<f64, Violation> {
    validate_tour(instance, tour)?;
    let raw = instance.raw_coords.as_ref().expect("instance has no raw coordinates");
    let points = |node: usize| match instance.kind {
        Kind::Tsp => raw[node - 1],
        Kind::Cvrp => raw[node],
    };
    Ok(length_with(&points, instance, tour))
}
