//! Node placement and the distance-ordered candidate next hops of every node.

use std::path::Path;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

pub const BASE_STATION: Position = Position::new(0.0, 0.0);

pub fn distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Fixed sensor positions inside a square field with the base station at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    area_side: f64,
    positions: Vec<Position>,
    dist_to_base: Vec<f64>,
}

impl Topology {
    pub fn from_positions(area_side: f64, positions: Vec<Position>) -> Result<Self> {
        if !(area_side.is_finite() && area_side > 0.0) {
            return Err(Error::config("area_side", format!("must be > 0, got {area_side}")));
        }
        if positions.is_empty() {
            return Err(Error::config("nodes", "topology must contain at least one node"));
        }
        for (id, p) in positions.iter().enumerate() {
            let inside = |v: f64| (0.0..=area_side).contains(&v);
            if !inside(p.x) || !inside(p.y) {
                return Err(Error::config(
                    "positions",
                    format!("node {id} at ({}, {}) lies outside [0, {area_side}]^2", p.x, p.y),
                ));
            }
        }
        let dist_to_base = positions.iter().map(|&p| distance(p, BASE_STATION)).collect();
        Ok(Self { area_side, positions, dist_to_base })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn area_side(&self) -> f64 {
        self.area_side
    }

    pub fn base(&self) -> Position {
        BASE_STATION
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn position(&self, id: usize) -> Position {
        self.positions[id]
    }

    pub fn dist_to_base(&self, id: usize) -> f64 {
        self.dist_to_base[id]
    }

    pub fn distance_between(&self, a: usize, b: usize) -> f64 {
        distance(self.positions[a], self.positions[b])
    }

    /// Node ids ordered farthest-from-base first, ties by ascending id.
    pub fn farthest_first(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.dist_to_base[b].total_cmp(&self.dist_to_base[a]).then(a.cmp(&b))
        });
        order
    }

    /// Writes `node_id,x,y` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)
            .map_err(csv_err)?;
        w.write_record(["node_id", "x", "y"]).map_err(csv_err)?;
        for (id, p) in self.positions.iter().enumerate() {
            w.write_record([id.to_string(), p.x.to_string(), p.y.to_string()]).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads a topology written by [`Topology::write_csv`]. Rows may appear in
    /// any order but ids must cover `0..n` exactly once.
    pub fn read_csv(path: &Path, area_side: f64) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            node_id: usize,
            x: f64,
            y: f64,
        }
        let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
        let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
        let mut rows: Vec<Row> = reader.deserialize().collect::<Result<_, _>>().map_err(csv_err)?;
        rows.sort_by_key(|r| r.node_id);
        for (expected, row) in rows.iter().enumerate() {
            if row.node_id != expected {
                return Err(Error::Format(format!(
                    "{}: node ids must be 0..n without gaps or duplicates (expected {expected}, found {})",
                    path.display(),
                    row.node_id
                )));
            }
        }
        Topology::from_positions(area_side, rows.into_iter().map(|r| Position::new(r.x, r.y)).collect())
    }
}

/// Draws `n` positions with both coordinates from Normal(mean, stddev),
/// resampling any coordinate that falls outside `[0, area_side]`.
pub fn place_nodes(n: usize, area_side: f64, mean: f64, stddev: f64, seed: u64) -> Result<Topology> {
    if n == 0 {
        return Err(Error::config("nodes", "must be > 0"));
    }
    if !(area_side.is_finite() && area_side > 0.0) {
        return Err(Error::config("area_side", format!("must be > 0, got {area_side}")));
    }
    if !(stddev.is_finite() && stddev > 0.0) {
        return Err(Error::config("stddev", format!("must be > 0, got {stddev}")));
    }
    if !mean.is_finite() {
        return Err(Error::config("mean", "must be finite"));
    }
    let normal = Normal::new(mean, stddev).map_err(|e| Error::config("stddev", e.to_string()))?;
    let mut rng = stream_rng(seed, Stream::Placement);
    // A mean far outside the field would make rejection sampling spin forever.
    const MAX_DRAWS: usize = 1_000_000;
    let mut draw = || -> Result<f64> {
        for _ in 0..MAX_DRAWS {
            let v = normal.sample(&mut rng);
            if (0.0..=area_side).contains(&v) {
                return Ok(v);
            }
        }
        Err(Error::config("mean", "placement distribution almost never lands inside the field"))
    };
    let mut positions = Vec::with_capacity(n);
    for _ in 0..n {
        let x = draw()?;
        let y = draw()?;
        positions.push(Position::new(x, y));
    }
    Topology::from_positions(area_side, positions)
}

/// Per-node candidate next hops: every node strictly closer to the base,
/// nearest first. The base station is the implicit final option and is not listed.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateList {
    lists: Vec<Vec<usize>>,
}

impl CandidateList {
    pub fn of(&self, node: usize) -> &[usize] {
        &self.lists[node]
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

pub fn build_candidates(topo: &Topology) -> CandidateList {
    let n = topo.len();
    let lists = (0..n)
        .map(|i| {
            let mut list: Vec<usize> =
                (0..n).filter(|&j| topo.dist_to_base(j) < topo.dist_to_base(i)).collect();
            list.sort_by(|&a, &b| {
                topo.distance_between(i, a).total_cmp(&topo.distance_between(i, b)).then(a.cmp(&b))
            });
            list
        })
        .collect();
    CandidateList { lists }
}
