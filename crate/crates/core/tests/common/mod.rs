#![allow(dead_code)]

use coupling_flow::basis::{x_power_matrix, BasisConfig};
use coupling_flow::oracle::{build_hamiltonian, jacobi_diagonalize};

pub const ORACLE_FD_SWEEP_TOL: f64 = 1e-14;
use coupling_flow::{FlowState, Matrix, ModelKind};

/// Oracle eigen-data of `diag(i + ½) + g·X₄` arranged like a flow state:
/// overlaps[i][j] = j-th harmonic component of eigenvector i, signs chosen
/// so the i-th component is positive (continuous from g = 0).
pub fn oracle_aho_state(n: usize, g: f64) -> FlowState {
    let h = build_hamiltonian(ModelKind::Aho, g, n).unwrap();
    // Eigenvector error scales with the sweep tolerance and is divided by the
    // difference step, so converge well past the default here.
    let r = jacobi_diagonalize(&h, ORACLE_FD_SWEEP_TOL).unwrap();
    let mut c = Matrix::from_fn(n, |i, j| r.eigenvectors[(j, i)]);
    for i in 0..n {
        if c[(i, i)] < 0.0 {
            for j in 0..n {
                c[(i, j)] = -c[(i, j)];
            }
        }
    }
    let x4 = x_power_matrix(4, &BasisConfig::new(n).unwrap()).unwrap();
    let h_int = x4.congruence(&c.transpose());
    FlowState::new(g, r.eigenvalues, h_int, c).unwrap()
}

/// Five-point centered differences of the oracle eigen-data at `g`,
/// packed like [`FlowState::pack`]. The three-point rule's `h²` error is
/// ~1e-5 at `h = 1e-5` for the interaction block, so the `h⁴` stencil is used.
pub fn oracle_derivative(n: usize, g: f64, step: f64) -> Vec<f64> {
    let at = |dg: f64| oracle_aho_state(n, g + dg).pack();
    let (p2, p1, m1, m2) = (at(2.0 * step), at(step), at(-step), at(-2.0 * step));
    (0..p1.len())
        .map(|k| (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * step))
        .collect()
}

/// Largest difference between two ascending-sorted copies of the spectra.
pub fn max_sorted_diff(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
