//! Finite word-metric balls of Cayley graphs and their growth.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fit;
use crate::group::{GroupElement, GroupSpec};

/// Default vertex cap for ball generation.
pub const DEFAULT_BALL_CAP: usize = 5_000_000;

/// The ball `B(n)` of the Cayley graph around the identity, with the
/// edges of the Cayley graph that have both ends inside the ball.
///
/// Vertices are ordered by BFS layer and lexicographically by coordinates
/// within a layer; vertex 0 is the identity.
#[derive(Debug, Clone)]
pub struct BallGraph {
    pub spec: GroupSpec,
    pub radius: u32,
    pub vertices: Vec<GroupElement>,
    pub index_of: HashMap<GroupElement, usize>,
    pub adjacency: Vec<Vec<usize>>,
    pub dist_from_e: Vec<u32>,
}

impl BallGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Vertices at distance at most `r` from the identity.
    pub fn ball(&self, r: u32) -> impl Iterator<Item = &GroupElement> {
        self.vertices
            .iter()
            .zip(&self.dist_from_e)
            .filter(move |(_, d)| **d <= r)
            .map(|(v, _)| v)
    }
}

/// Breadth-first enumeration of `B(n)`; fails once more than `cap`
/// vertices have been discovered.
pub fn generate_ball(spec: &GroupSpec, n: u32, cap: usize) -> Result<BallGraph> {
    let e = spec.identity();
    let mut vertices = vec![e.clone()];
    let mut dist_from_e = vec![0u32];
    let mut index_of = HashMap::from([(e, 0usize)]);
    let mut layer_start = 0;

    for r in 1..=n {
        let layer_end = vertices.len();
        let mut next = Vec::new();
        for v in &vertices[layer_start..layer_end] {
            for s in spec.generators() {
                let w = spec.multiply(v, s)?;
                if !index_of.contains_key(&w) {
                    index_of.insert(w.clone(), usize::MAX);
                    next.push(w);
                }
            }
            if index_of.len() > cap {
                return Err(Error::ResourceCap { radius: n, cap });
            }
        }
        next.sort_unstable();
        for w in next {
            *index_of.get_mut(&w).expect("inserted above") = vertices.len();
            vertices.push(w);
            dist_from_e.push(r);
        }
        layer_start = layer_end;
    }

    let mut adjacency = Vec::with_capacity(vertices.len());
    for v in &vertices {
        let mut nbrs: Vec<usize> = Vec::with_capacity(spec.generators().len());
        for s in spec.generators() {
            let w = spec.multiply(v, s)?;
            if let Some(&j) = index_of.get(&w) {
                nbrs.push(j);
            }
        }
        nbrs.sort_unstable();
        nbrs.dedup();
        adjacency.push(nbrs);
    }

    Ok(BallGraph {
        spec: spec.clone(),
        radius: n,
        vertices,
        index_of,
        adjacency,
        dist_from_e,
    })
}

/// Growth function values `V(n) = |B(n)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTable {
    pub radii: Vec<u32>,
    pub counts: Vec<u64>,
}

impl GrowthTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,V\n");
        for (n, v) in self.radii.iter().zip(&self.counts) {
            let _ = writeln!(out, "{n},{v}");
        }
        out
    }
}

/// `V(n)` for `n = 0..=n_max`, from a single ball of radius `n_max`.
pub fn growth_table(spec: &GroupSpec, n_max: u32, cap: usize) -> Result<GrowthTable> {
    if n_max == 0 {
        return Err(Error::InsufficientData("n_max must be at least 1".into()));
    }
    let ball = generate_ball(spec, n_max, cap)?;
    let mut sphere = vec![0u64; n_max as usize + 1];
    for &d in &ball.dist_from_e {
        sphere[d as usize] += 1;
    }
    let counts = sphere
        .iter()
        .scan(0u64, |acc, s| {
            *acc += s;
            Some(*acc)
        })
        .collect();
    Ok(GrowthTable {
        radii: (0..=n_max).collect(),
        counts,
    })
}

/// Least-squares slope of `ln V(n)` against `ln n` over `n >= n_min`.
pub fn estimate_growth_order(table: &GrowthTable, n_min: u32) -> Result<f64> {
    let n_min = n_min.max(1);
    let points: Vec<(f64, f64)> = table
        .radii
        .iter()
        .zip(&table.counts)
        .filter(|(n, _)| **n >= n_min)
        .map(|(n, v)| (*n as f64, *v as f64))
        .collect();
    if points.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need at least 4 radii >= {n_min}, have {}",
            points.len()
        )));
    }
    fit::log_log_slope(&points)
        .ok_or_else(|| Error::InsufficientData("degenerate growth table".into()))
}
