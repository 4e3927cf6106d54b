//! Brute-force Steklov solver used to validate the Schur-complement path.
//!
//! Works on the full `|Ω̄| × |Ω̄|` pencil `L w = σ D w`, `D` the boundary
//! indicator. Since `L + D` is positive definite, with `L + D = R Rᵀ` the
//! pencil is equivalent to the ordinary problem `R⁻¹ D R⁻ᵀ y = μ y` with
//! `μ = 1 / (1 + σ)`; the `|Ω|` infinite eigenvalues of the pencil map to
//! `μ = 0` and are discarded.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::steklov::SteklovSpectrum;
use crate::subgraph::SubgraphWithBoundary;

pub const ORACLE_MAX_VERTICES: usize = 200;

pub fn oracle_full_eigen(sub: &SubgraphWithBoundary) -> Result<SteklovSpectrum> {
    let n = sub.n_total();
    if n > ORACLE_MAX_VERTICES {
        return Err(Error::OracleCap {
            size: n,
            cap: ORACLE_MAX_VERTICES,
        });
    }
    let ni = sub.n_interior();
    let nb = sub.n_boundary();

    let mut m = DMatrix::<f64>::zeros(n, n);
    for &(a, b) in &sub.edges {
        m[(a, a)] += 1.0;
        m[(b, b)] += 1.0;
        m[(a, b)] -= 1.0;
        m[(b, a)] -= 1.0;
    }
    for v in ni..n {
        m[(v, v)] += 1.0;
    }
    let chol = m.cholesky().ok_or(Error::SingularInterior { row: 0, pivot: 0.0 })?;
    let r = chol.l();

    // Z = R⁻¹ E, E = boundary columns of the identity; R⁻¹ D R⁻ᵀ = Z Zᵀ
    let mut e = DMatrix::<f64>::zeros(n, nb);
    for b in 0..nb {
        e[(ni + b, b)] = 1.0;
    }
    let z = r
        .solve_lower_triangular(&e)
        .ok_or(Error::SingularInterior { row: 0, pivot: 0.0 })?;
    let c = &z * z.transpose();
    let eig = c.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let kept = &order[..nb];

    let rt = r.transpose();
    let mut pairs: Vec<(f64, Vec<f64>)> = kept
        .iter()
        .map(|&i| {
            let mu = eig.eigenvalues[i];
            let w = rt
                .solve_upper_triangular(&eig.eigenvectors.column(i).into_owned())
                .expect("triangular factor is nonsingular");
            let mut ub: Vec<f64> = w.iter().skip(ni).copied().collect();
            let norm = ub.iter().map(|x| x * x).sum::<f64>().sqrt();
            ub.iter_mut().for_each(|x| *x /= norm);
            (1.0 / mu - 1.0, ub)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = DMatrix::from_fn(nb, nb, |row, col| pairs[col].1[row]);
    Ok(SteklovSpectrum {
        eigenvalues,
        eigenvectors: Some(eigenvectors),
    })
}
