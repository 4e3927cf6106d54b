//! Sparse symmetric positive definite solves for the interior block.
//!
//! The direct path is an envelope (skyline) Cholesky factorization under a
//! reverse Cuthill–McKee ordering; on ball-like domains the BFS ordering
//! keeps the envelope close to one sphere wide. When the envelope would
//! exceed the memory budget the solver falls back to Jacobi-preconditioned
//! conjugate gradients.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Symmetric sparse matrix stored as full rows (both triangles), each row
/// sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    pub n: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSym {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().map(|&(j, a)| a * x[j]).sum();
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// Reverse Cuthill–McKee ordering; returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseSym) -> Vec<usize> {
    let n = a.n;
    let degree: Vec<usize> = a.rows.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        // start each component from a minimum-degree vertex
        let start = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("unvisited vertex exists");
        let start = pseudo_peripheral(a, start, &visited);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = a.rows[u]
                .iter()
                .map(|e| e.0)
                .filter(|&v| v != u && !visited[v])
                .collect();
            nbrs.sort_by_key(|&v| (degree[v], v));
            for v in nbrs {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// A vertex of (approximately) maximal eccentricity in the component of `start`.
fn pseudo_peripheral(a: &SparseSym, start: usize, blocked: &[bool]) -> usize {
    let mut current = start;
    let mut best_ecc = 0;
    for _ in 0..8 {
        let (far, ecc) = farthest(a, current, blocked);
        if ecc <= best_ecc {
            break;
        }
        best_ecc = ecc;
        current = far;
    }
    current
}

fn farthest(a: &SparseSym, start: usize, blocked: &[bool]) -> (usize, usize) {
    let mut dist = vec![usize::MAX; a.n];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut last = start;
    while let Some(u) = queue.pop_front() {
        let better = dist[u] > dist[last] || (dist[u] == dist[last] && a.rows[u].len() < a.rows[last].len());
        if better {
            last = u;
        }
        for &(v, _) in &a.rows[u] {
            if !blocked[v] && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    (last, dist[last])
}

/// Lower-triangular Cholesky factor `P A Pᵀ = G Gᵀ` stored by rows, each
/// row holding columns `first[i]..=i`.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    perm: Vec<usize>,
    inv_perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    /// Number of stored entries the factorization of `a` would need.
    pub fn envelope_size(a: &SparseSym, perm: &[usize]) -> usize {
        let inv = invert(perm);
        (0..a.n)
            .map(|i| {
                let f = a.rows[perm[i]].iter().map(|e| inv[e.0]).min().unwrap_or(i).min(i);
                i - f + 1
            })
            .sum()
    }

    pub fn factor(a: &SparseSym, perm: Vec<usize>) -> Result<Self> {
        let n = a.n;
        let inv_perm = invert(&perm);
        let first: Vec<usize> = (0..n)
            .map(|i| {
                a.rows[perm[i]]
                    .iter()
                    .map(|e| inv_perm[e.0])
                    .min()
                    .unwrap_or(i)
                    .min(i)
            })
            .collect();
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            offset.push(offset[i] + i - first[i] + 1);
        }
        let mut values = vec![0.0; offset[n]];
        for i in 0..n {
            for &(j_old, v) in &a.rows[perm[i]] {
                let j = inv_perm[j_old];
                if j <= i {
                    values[offset[i] + j - first[i]] = v;
                }
            }
        }
        let scale = a.diag().iter().cloned().fold(0.0f64, f64::max).max(1.0);

        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_i = &values[offset[i] + k0 - fi..offset[i] + j - fi];
                let row_j = &values[offset[j] + k0 - fj..offset[j] + j - fj];
                let dot: f64 = row_i.iter().zip(row_j).map(|(x, y)| x * y).sum();
                let idx = offset[i] + j - fi;
                if j < i {
                    let pivot = values[offset[j + 1] - 1];
                    values[idx] = (values[idx] - dot) / pivot;
                } else {
                    let d = values[idx] - dot;
                    if !(d > 1e-13 * scale) {
                        return Err(Error::SingularInterior {
                            row: perm[i],
                            pivot: d,
                        });
                    }
                    values[idx] = d.sqrt();
                }
            }
        }
        Ok(EnvelopeCholesky {
            perm,
            inv_perm,
            first,
            offset,
            values,
        })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn inv_perm(&self) -> &[usize] {
        &self.inv_perm
    }

    /// In-place `y ← G⁻¹ y` on a vector already in permuted order, skipping
    /// the leading rows where `y` is zero.
    pub fn forward_in_place(&self, y: &mut [f64]) {
        let start = y.iter().position(|v| *v != 0.0).unwrap_or(y.len());
        for i in start..self.n() {
            let fi = self.first[i];
            let k0 = fi.max(start);
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            let dot: f64 = row[k0 - fi..i - fi]
                .iter()
                .zip(&y[k0..i])
                .map(|(a, b)| a * b)
                .sum();
            y[i] = (y[i] - dot) / row[i - fi];
        }
    }

    /// In-place `y ← G⁻ᵀ y` on a permuted vector.
    pub fn backward_in_place(&self, y: &mut [f64]) {
        for i in (0..self.n()).rev() {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for (k, g) in (fi..i).zip(row) {
                y[k] -= g * yi;
            }
        }
    }

    /// Solves `A x = b` in the original ordering.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        self.forward_in_place(&mut y);
        self.backward_in_place(&mut y);
        let mut x = vec![0.0; b.len()];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

/// Jacobi-preconditioned conjugate gradients to relative residual `tol`.
pub fn conjugate_gradient(a: &SparseSym, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.n;
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let inv_diag: Vec<f64> = a
        .diag()
        .iter()
        .map(|d| if *d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        a.mul_vec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::SingularInterior { row: 0, pivot: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) <= tol * bnorm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        residual: norm(&r) / bnorm,
        iterations: max_iter,
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solver for the interior block: direct when the envelope fits the
/// budget, iterative otherwise.
#[derive(Debug, Clone)]
pub enum InteriorSolver {
    Direct(EnvelopeCholesky),
    Iterative(SparseSym),
}

/// Envelope entries allowed before switching to conjugate gradients.
pub const DEFAULT_ENVELOPE_BUDGET: usize = 200_000_000;

pub const CG_TOLERANCE: f64 = 1e-12;

impl InteriorSolver {
    pub fn new(a: &SparseSym, envelope_budget: usize) -> Result<Self> {
        let perm = reverse_cuthill_mckee(a);
        if EnvelopeCholesky::envelope_size(a, &perm) > envelope_budget {
            // a single CG solve also detects singularity
            let ones = vec![1.0; a.n];
            conjugate_gradient(a, &ones, CG_TOLERANCE, 20 * a.n + 100)?;
            return Ok(InteriorSolver::Iterative(a.clone()));
        }
        Ok(InteriorSolver::Direct(EnvelopeCholesky::factor(a, perm)?))
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            InteriorSolver::Direct(f) => Ok(f.solve(b)),
            InteriorSolver::Iterative(a) => conjugate_gradient(a, b, CG_TOLERANCE, 20 * a.n + 100),
        }
    }
}
