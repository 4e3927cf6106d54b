//! Discrete Steklov problem on a graph with boundary.
//!
//! With vertices ordered interior-first, the combinatorial Laplacian of
//! `(Ω̄, E')` splits into blocks
//!
//! ```text
//!     L = [ L_II   L_IB ]
//!         [ L_IBᵀ  L_BB ]
//! ```
//!
//! A function harmonic on the interior is determined by its boundary
//! values, `u_I = -L_II⁻¹ L_IB u_B`, and its normal derivative on the
//! boundary is `Λ u_B` with the Schur complement
//! `Λ = L_BB - L_IBᵀ L_II⁻¹ L_IB`. Steklov eigenvalues are the eigenvalues
//! of `Λ`.

mod lanczos;
mod oracle;
mod sparse;

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

pub use lanczos::{lowest_eigenpairs, LanczosOptions};
pub use oracle::{oracle_full_eigen, ORACLE_MAX_VERTICES};
pub use sparse::{
    conjugate_gradient, reverse_cuthill_mckee, EnvelopeCholesky, InteriorSolver, SparseSym,
    CG_TOLERANCE, DEFAULT_ENVELOPE_BUDGET,
};

use crate::error::Result;
use crate::subgraph::SubgraphWithBoundary;

/// Largest `|B|` solved with the dense symmetric eigensolver.
pub const DENSE_LIMIT: usize = 4000;

/// Relative threshold below which an eigenvalue counts as the trivial `σ_0`.
pub const ZERO_TOL: f64 = 1e-9;

/// Laplacian of `(Ω̄, E')` in interior/boundary block form.
#[derive(Debug, Clone)]
pub struct LaplacianBlocks {
    pub l_ii: SparseSym,
    /// Row `i` lists `(boundary index, value)` for interior vertex `i`.
    pub l_ib: Vec<Vec<(usize, f64)>>,
    /// Boundary degrees; the boundary block is diagonal.
    pub l_bb: Vec<f64>,
}

impl LaplacianBlocks {
    pub fn n_interior(&self) -> usize {
        self.l_ii.n
    }

    pub fn n_boundary(&self) -> usize {
        self.l_bb.len()
    }

    /// `L_IB` as a dense matrix.
    pub fn l_ib_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_interior(), self.n_boundary());
        for (i, row) in self.l_ib.iter().enumerate() {
            for &(b, v) in row {
                m[(i, b)] = v;
            }
        }
        m
    }

    /// The full `|Ω̄| × |Ω̄|` Laplacian.
    pub fn full_dense(&self) -> DMatrix<f64> {
        let (ni, nb) = (self.n_interior(), self.n_boundary());
        let mut m = DMatrix::zeros(ni + nb, ni + nb);
        for i in 0..ni {
            for &(j, v) in &self.l_ii.rows[i] {
                m[(i, j)] = v;
            }
            for &(b, v) in &self.l_ib[i] {
                m[(i, ni + b)] = v;
                m[(ni + b, i)] = v;
            }
        }
        for (b, d) in self.l_bb.iter().enumerate() {
            m[(ni + b, ni + b)] = *d;
        }
        m
    }

    /// `L_IB x` for a boundary vector `x`.
    fn l_ib_mul(&self, x: &[f64]) -> Vec<f64> {
        self.l_ib
            .iter()
            .map(|row| row.iter().map(|&(b, v)| v * x[b]).sum())
            .collect()
    }

    /// Columns of `L_IB`, as sparse `(interior index, value)` lists.
    fn l_ib_columns(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.n_boundary()];
        for (i, row) in self.l_ib.iter().enumerate() {
            for &(b, v) in row {
                cols[b].push((i, v));
            }
        }
        cols
    }
}

/// Assembles the block Laplacian; degrees are counted inside `(Ω̄, E')`.
pub fn assemble(sub: &SubgraphWithBoundary) -> LaplacianBlocks {
    let ni = sub.n_interior();
    let mut ii_rows: Vec<Vec<(usize, f64)>> = (0..ni)
        .map(|i| vec![(i, sub.interior_degrees[i] as f64)])
        .collect();
    let mut l_ib: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ni];
    for &(u, v) in &sub.edges {
        if v < ni {
            ii_rows[u].push((v, -1.0));
            ii_rows[v].push((u, -1.0));
        } else {
            l_ib[u].push((v - ni, -1.0));
        }
    }
    for row in ii_rows.iter_mut().chain(l_ib.iter_mut()) {
        row.sort_by_key(|e| e.0);
    }
    LaplacianBlocks {
        l_ii: SparseSym { n: ni, rows: ii_rows },
        l_ib,
        l_bb: sub.boundary_degrees.iter().map(|&d| d as f64).collect(),
    }
}

/// Harmonic extension of `boundary_values`: solves `L_II u_I = -L_IB u_B`.
pub fn harmonic_extension(blocks: &LaplacianBlocks, boundary_values: &[f64]) -> Result<Vec<f64>> {
    let solver = InteriorSolver::new(&blocks.l_ii, DEFAULT_ENVELOPE_BUDGET)?;
    extend_with(&solver, blocks, boundary_values)
}

fn extend_with(solver: &InteriorSolver, blocks: &LaplacianBlocks, boundary_values: &[f64]) -> Result<Vec<f64>> {
    let rhs: Vec<f64> = blocks.l_ib_mul(boundary_values).iter().map(|v| -v).collect();
    solver.solve(&rhs)
}

/// The Dirichlet-to-Neumann matrix, dense symmetric `|B| × |B|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnMatrix {
    pub entries: DMatrix<f64>,
}

impl DtnMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }
}

/// `Λ = L_BB - L_IBᵀ L_II⁻¹ L_IB`, symmetrized.
pub fn dtn_matrix(blocks: &LaplacianBlocks) -> Result<DtnMatrix> {
    dtn_matrix_with(blocks, DEFAULT_ENVELOPE_BUDGET)
}

/// As [`dtn_matrix`], with an explicit envelope budget for the direct
/// factorization (0 forces the iterative path).
pub fn dtn_matrix_with(blocks: &LaplacianBlocks, envelope_budget: usize) -> Result<DtnMatrix> {
    let (ni, nb) = (blocks.n_interior(), blocks.n_boundary());
    let solver = InteriorSolver::new(&blocks.l_ii, envelope_budget)?;
    let cols = blocks.l_ib_columns();
    let correction = match &solver {
        InteriorSolver::Direct(chol) => {
            // Y = G⁻¹ P L_IB, correction = Yᵀ Y
            let inv = chol.inv_perm();
            let ys: Vec<Vec<f64>> = cols
                .par_iter()
                .map(|col| {
                    let mut y = vec![0.0; ni];
                    for &(i, v) in col {
                        y[inv[i]] = v;
                    }
                    chol.forward_in_place(&mut y);
                    y
                })
                .collect();
            let y = DMatrix::from_fn(ni, nb, |i, j| ys[j][i]);
            y.transpose() * y
        }
        InteriorSolver::Iterative(_) => {
            let xs: Vec<Vec<f64>> = cols
                .par_iter()
                .map(|col| {
                    let mut b = vec![0.0; ni];
                    for &(i, v) in col {
                        b[i] = v;
                    }
                    solver.solve(&b)
                })
                .collect::<Result<_>>()?;
            let x = DMatrix::from_fn(ni, nb, |i, j| xs[j][i]);
            blocks.l_ib_dense().transpose() * x
        }
    };
    let mut lambda = -correction;
    for (b, d) in blocks.l_bb.iter().enumerate() {
        lambda[(b, b)] += d;
    }
    let entries = (&lambda + lambda.transpose()) * 0.5;
    Ok(DtnMatrix { entries })
}

/// Steklov eigenvalues in ascending order, with boundary eigenvectors as
/// columns when available.
#[derive(Debug, Clone)]
pub struct SteklovSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<DMatrix<f64>>,
}

impl SteklovSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Whether `sigma` counts as zero relative to this spectrum's scale.
    pub fn is_trivial(&self, sigma: f64) -> bool {
        sigma <= ZERO_TOL * self.max().max(1.0)
    }

    /// Eigenvalues grouped within `ZERO_TOL` of each other, as
    /// `(representative value, multiplicity)`. Diagnostics only.
    pub fn clusters(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &s in &self.eigenvalues {
            match out.last_mut() {
                Some((v, m)) if (s - *v).abs() <= ZERO_TOL * self.max().max(1.0) => *m += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }

    /// `k,sigma` CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sigma\n");
        for (k, s) in self.eigenvalues.iter().enumerate() {
            let _ = writeln!(out, "{k},{s:.16e}");
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct EigenOptions {
    /// Largest `|B|` handled by the dense solver when only a prefix is requested.
    pub dense_limit: usize,
    pub lanczos: LanczosOptions,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            dense_limit: DENSE_LIMIT,
            lanczos: LanczosOptions::default(),
        }
    }
}

/// Eigen-decomposition of the DtN matrix. With `k_max = Some(k)` and
/// `|B|` above the dense limit only `σ_0..=σ_k` are computed; otherwise the
/// full spectrum is returned.
pub fn steklov_spectrum(dtn: &DtnMatrix, k_max: Option<usize>) -> Result<SteklovSpectrum> {
    steklov_spectrum_with(dtn, k_max, &EigenOptions::default())
}

pub fn steklov_spectrum_with(dtn: &DtnMatrix, k_max: Option<usize>, opts: &EigenOptions) -> Result<SteklovSpectrum> {
    let n = dtn.size();
    if let Some(k) = k_max {
        if n > opts.dense_limit {
            let (vals, vecs) = lowest_eigenpairs(&dtn.entries, k + 1, &opts.lanczos)?;
            return Ok(SteklovSpectrum {
                eigenvalues: vals,
                eigenvectors: Some(vecs),
            });
        }
    }
    let eig = SymmetricEigen::new(dtn.entries.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SteklovSpectrum {
        eigenvalues,
        eigenvectors: Some(eigenvectors),
    })
}

/// Assemble, reduce and diagonalize in one step.
pub fn solve(sub: &SubgraphWithBoundary, k_max: Option<usize>) -> Result<SteklovSpectrum> {
    let blocks = assemble(sub);
    let dtn = dtn_matrix(&blocks)?;
    steklov_spectrum(&dtn, k_max)
}

/// Residuals of the two defining equations for a candidate eigenpair
/// `(sigma, u_B)`: `max |Δu|` over interior vertices and
/// `max |∂u/∂ν - σ u|` over boundary vertices, where `u` is the harmonic
/// extension of `u_B`. Evaluated on the edge list, not on the blocks.
pub fn steklov_residuals(sub: &SubgraphWithBoundary, sigma: f64, boundary_values: &[f64]) -> Result<(f64, f64)> {
    let blocks = assemble(sub);
    let interior = harmonic_extension(&blocks, boundary_values)?;
    let ni = sub.n_interior();
    let u: Vec<f64> = interior.iter().chain(boundary_values).copied().collect();
    let mut flux = vec![0.0; u.len()];
    for &(a, b) in &sub.edges {
        let diff = u[a] - u[b];
        flux[a] += diff;
        flux[b] -= diff;
    }
    let lap = flux[..ni].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let normal = flux[ni..]
        .iter()
        .zip(boundary_values)
        .fold(0.0f64, |m, (f, ub)| m.max((f - sigma * ub).abs()));
    Ok((lap, normal))
}
