//! Brute-force reference: assemble the truncated Hamiltonian in the
//! harmonic basis and diagonalize it with cyclic Jacobi rotations.
//!
//! Nothing here touches the flow equations, so agreement between the two
//! paths is a real check of the flow.

use crate::basis::{harmonic_energies, x_power_matrix, BasisConfig};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::models::ModelKind;

pub const DEFAULT_SWEEP_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Sorted eigen-decomposition; column `k` of `eigenvectors` belongs to
/// `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl OracleResult {
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        (0..self.eigenvectors.dim())
            .map(|i| self.eigenvectors[(i, k)])
            .collect()
    }

    /// `V · diag(λ) · Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        Matrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)])
                .sum()
        })
    }
}

/// `diag(i + ½) + g·X₄` for the anharmonic oscillator, or
/// `diag(i + ½) + ½·X₄ − g′·X₂` for the double well.
pub fn build_hamiltonian(kind: ModelKind, g: f64, n: usize) -> Result<SymMatrix> {
    let cfg = BasisConfig::new(n)?;
    let e0 = harmonic_energies(&cfg);
    let x4 = x_power_matrix(4, &cfg)?;
    Ok(match kind {
        ModelKind::Aho => x4.scale(g).add_diagonal(&e0),
        ModelKind::Dwp => {
            let x2 = x_power_matrix(2, &cfg)?;
            x4.scale(0.5).add(&x2.scale(-g)).add_diagonal(&e0)
        }
    })
}

/// Cyclic Jacobi eigen-decomposition. Sweeps stop once the off-diagonal
/// Frobenius norm drops below `sweep_tol` times the diagonal norm.
pub fn jacobi_diagonalize(m: &SymMatrix, sweep_tol: f64) -> Result<OracleResult> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut v = Matrix::identity(n);

    let off_norm = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let diag_norm = |a: &Matrix| -> f64 { (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum::<f64>().sqrt() };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= sweep_tol * diag_norm(&a) || off == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Rutishauser's form: t = tan θ of the smaller rotation angle.
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let eig = a.diagonal();
    // Ties go to the column whose dominant component has the lower index.
    let dominant = |k: usize| -> usize {
        (0..n)
            .max_by(|&i, &j| v[(i, k)].abs().total_cmp(&v[(j, k)].abs()).then(j.cmp(&i)))
            .unwrap_or(0)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig[x].total_cmp(&eig[y]).then_with(|| dominant(x).cmp(&dominant(y))));

    let eigenvalues = order.iter().map(|&k| eig[k]).collect();
    let eigenvectors = Matrix::from_fn(n, |i, col| v[(i, order[col])]);
    Ok(OracleResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Sorted eigenvalues of the truncated model Hamiltonian.
pub fn oracle_spectrum(kind: ModelKind, g: f64, n: usize) -> Result<Vec<f64>> {
    Ok(jacobi_diagonalize(&build_hamiltonian(kind, g, n)?, DEFAULT_SWEEP_TOL)?.eigenvalues)
}
