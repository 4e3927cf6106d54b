//! Lanczos iteration with full reorthogonalization for the lowest
//! eigenpairs of a symmetric matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Relative residual `‖A v − θ v‖ ≤ tol · ‖A‖` required of each Ritz pair.
    pub tol: f64,
    /// Initial Krylov dimension; doubled on each restart up to `n`.
    pub initial_steps: usize,
    pub max_restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-10,
            initial_steps: 64,
            max_restarts: 8,
        }
    }
}

/// Lowest `count` eigenpairs of `a`, ascending. Eigenvectors are the
/// columns of the returned matrix.
pub fn lowest_eigenpairs(a: &DMatrix<f64>, count: usize, opts: &LanczosOptions) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let count = count.min(n);
    let scale = a.amax().max(f64::MIN_POSITIVE) * n as f64;
    let mut steps = opts.initial_steps.max(2 * count + 10).min(n);
    let mut last_residual = f64::INFINITY;
    for _ in 0..=opts.max_restarts {
        let (vals, vecs, residual) = run(a, count, steps);
        if residual <= opts.tol * scale || steps == n {
            return Ok((vals, vecs));
        }
        last_residual = residual / scale;
        steps = (steps * 2).min(n);
    }
    Err(Error::NoConvergence {
        residual: last_residual,
        iterations: steps,
    })
}

/// One Lanczos run of `m` steps; returns Ritz values, Ritz vectors and the
/// largest true residual among the wanted pairs.
fn run(a: &DMatrix<f64>, count: usize, m: usize) -> (Vec<f64>, DMatrix<f64>, f64) {
    let n = a.nrows();
    let mut basis = DMatrix::<f64>::zeros(n, m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);

    let mut q = start_vector(n);
    let mut k = 0;
    while k < m {
        basis.set_column(k, &q);
        let mut w = a * &q;
        let a_k = q.dot(&w);
        alpha.push(a_k);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            let v = basis.columns(0, k + 1);
            let coeffs = v.transpose() * &w;
            w -= v * coeffs;
        }
        k += 1;
        if k == m {
            break;
        }
        let b = w.norm();
        if b <= 1e-14 * a.amax().max(1.0) {
            // invariant subspace; continue with a fresh orthogonal direction
            match fresh_direction(&basis.columns(0, k).into_owned(), n, k) {
                Some(v) => {
                    beta.push(0.0);
                    q = v;
                }
                None => break,
            }
        } else {
            beta.push(b);
            q = w / b;
        }
    }
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let take = count.min(m);
    let basis = basis.columns(0, m);
    let mut vals = Vec::with_capacity(take);
    let mut vecs = DMatrix::<f64>::zeros(n, take);
    let mut worst: f64 = 0.0;
    for (c, &i) in order.iter().take(take).enumerate() {
        let theta = eig.eigenvalues[i];
        let mut v = basis * eig.eigenvectors.column(i);
        v /= v.norm();
        let r = (a * &v - &v * theta).norm();
        worst = worst.max(r);
        vals.push(theta);
        vecs.set_column(c, &v);
    }
    (vals, vecs, worst)
}

/// Deterministic, non-constant starting vector.
fn start_vector(n: usize) -> DVector<f64> {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let v = DVector::from_fn(n, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    });
    let norm = v.norm();
    v / norm
}

fn fresh_direction(basis: &DMatrix<f64>, n: usize, k: usize) -> Option<DVector<f64>> {
    for e in 0..n {
        let mut v = DVector::<f64>::zeros(n);
        v[(e + k) % n] = 1.0;
        for _ in 0..2 {
            let c = basis.transpose() * &v;
            v -= basis * c;
        }
        let nv = v.norm();
        if nv > 1e-8 {
            return Some(v / nv);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                if i == 0 || i == n - 1 { 1.0 } else { 2.0 }
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn matches_closed_form_path_spectrum() {
        // path Laplacian eigenvalues: 2 - 2 cos(pi k / n)
        let n = 300;
        let a = path_laplacian(n);
        let (vals, vecs) = lowest_eigenpairs(&a, 5, &LanczosOptions::default()).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos();
            assert!((v - exact).abs() < 1e-9, "k={k}: {v} vs {exact}");
        }
        let gram = vecs.transpose() * &vecs;
        assert!((gram - DMatrix::identity(5, 5)).amax() < 1e-8);
    }

    #[test]
    fn small_matrix_runs_to_full_dimension() {
        let a = path_laplacian(6);
        let (vals, _) = lowest_eigenpairs(&a, 6, &LanczosOptions::default()).unwrap();
        let mut dense: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().cloned().collect();
        dense.sort_by(f64::total_cmp);
        for (u, v) in vals.iter().zip(&dense) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let a = path_laplacian(400);
        let opts = LanczosOptions {
            tol: 1e-14,
            initial_steps: 12,
            max_restarts: 0,
        };
        assert!(matches!(
            lowest_eigenpairs(&a, 4, &opts),
            Err(Error::NoConvergence { .. })
        ));
    }
}
