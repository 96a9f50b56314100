//! Flow state and the right-hand side of the coupling-flow equations.
//!
//! For `H(g) = H₀ + g·H_int` with eigenpairs `E_i(g)`, `|ψ_i(g)⟩` the
//! variables evolve as
//!
//! ```text
//! dE_i/dg      = V_ii
//! dV_ij/dg     = Σ_{k≠i} V_ik V_kj / (E_i − E_k) + Σ_{k≠j} V_ik V_kj / (E_j − E_k)
//! dc_ij/dg     = Σ_{k≠i} V_ki / (E_i − E_k) · c_kj
//! ```
//!
//! where `V_ij = ⟨ψ_i(g)|H_int|ψ_j(g)⟩` and `c_ij = ⟨ψ_j(0)|ψ_i(g)⟩`
//! (row = flowed state, column = initial basis vector).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};

/// Resolvent denominators below this are treated as a degeneracy.
pub const DEFAULT_GAP_FLOOR: f64 = 1e-8;

/// Matrices at least this large are processed row-parallel.
const PARALLEL_MIN_DIM: usize = 64;

/// Eigen-data of `H(g)` tracked along the flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub g: f64,
    pub energies: Vec<f64>,
    pub h_int: SymMatrix,
    pub overlaps: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowDerivative {
    pub d_energies: Vec<f64>,
    pub d_h_int: SymMatrix,
    pub d_overlaps: Matrix,
}

impl FlowState {
    pub fn new(g: f64, energies: Vec<f64>, h_int: SymMatrix, overlaps: Matrix) -> Result<Self> {
        let n = energies.len();
        if h_int.dim() != n || overlaps.dim() != n {
            return Err(Error::InvalidArgument(format!(
                "flow state dimensions disagree: {n} energies, {}x{0} h_int, {}x{1} overlaps",
                h_int.dim(),
                overlaps.dim()
            )));
        }
        Ok(Self {
            g,
            energies,
            h_int,
            overlaps,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Length of the packed vector: `N + 2N²`.
    pub fn packed_len(n: usize) -> usize {
        n + 2 * n * n
    }

    /// Packs as `[energies | h_int row-major | overlaps row-major]`.
    pub fn pack(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(Self::packed_len(self.dim()));
        y.extend_from_slice(&self.energies);
        y.extend_from_slice(self.h_int.as_matrix().as_slice());
        y.extend_from_slice(self.overlaps.as_slice());
        y
    }

    /// Inverse of [`FlowState::pack`]. The interaction block is symmetrized
    /// so the type invariant holds even after integrator round-off.
    pub fn unpack(n: usize, g: f64, y: &[f64]) -> Result<Self> {
        if y.len() != Self::packed_len(n) {
            return Err(Error::InvalidArgument(format!(
                "packed flow state for N = {n} needs {} values, got {}",
                Self::packed_len(n),
                y.len()
            )));
        }
        let (energies, rest) = y.split_at(n);
        let (h, c) = rest.split_at(n * n);
        let h = Matrix::from_row_major(n, h.to_vec())?;
        Ok(Self {
            g,
            energies: energies.to_vec(),
            h_int: SymMatrix::symmetrize(&h),
            overlaps: Matrix::from_row_major(n, c.to_vec())?,
        })
    }

    /// `max |CᵀC − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        self.overlaps.orthogonality_defect()
    }

    /// Largest `|h_int[i][j]|` and `|overlaps[i][j]|` over entries with
    /// `i + j` odd.
    pub fn parity_leakage(&self) -> (f64, f64) {
        let n = self.dim();
        let mut h_max = 0.0_f64;
        let mut c_max = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if (i + j) % 2 == 1 {
                    h_max = h_max.max(self.h_int[(i, j)].abs());
                    c_max = c_max.max(self.overlaps[(i, j)].abs());
                }
            }
        }
        (h_max, c_max)
    }
}

/// Connection matrix `A[i][k] = V_ik / (E_i − E_k)` with zero diagonal.
///
/// Entries with `V_ik == 0` are exactly zero, so uncoupled levels (e.g. of
/// opposite parity) may cross. A coupled pair closer than `gap_floor`
/// yields [`Error::NearDegeneracy`].
pub fn connection(energies: &[f64], h_int: &SymMatrix, gap_floor: f64) -> Result<Matrix> {
    let n = energies.len();
    let mut a = Matrix::zeros(n);
    connection_into(n, energies, h_int.as_matrix().as_slice(), gap_floor, a.as_mut_slice())?;
    Ok(a)
}

pub(crate) fn connection_into(
    n: usize,
    energies: &[f64],
    h: &[f64],
    gap_floor: f64,
    a: &mut [f64],
) -> Result<()> {
    for i in 0..n {
        for k in 0..n {
            let v = h[i * n + k];
            if k == i || v == 0.0 {
                a[i * n + k] = 0.0;
                continue;
            }
            let gap = energies[i] - energies[k];
            if gap.is_nan() || gap.abs() < gap_floor {
                return Err(Error::NearDegeneracy {
                    i: i.min(k),
                    k: i.max(k),
                    gap: gap.abs(),
                    floor: gap_floor,
                });
            }
            a[i * n + k] = v / gap;
        }
    }
    debug_assert!((0..n).all(|i| (0..n).all(|k| a[k * n + i] == -a[i * n + k])));
    Ok(())
}

/// Right-hand side of the flow equations.
pub fn flow_rhs(state: &FlowState, gap_floor: f64) -> Result<FlowDerivative> {
    let n = state.dim();
    let y = state.pack();
    let mut dy = vec![0.0; y.len()];
    flow_rhs_packed(n, &y, &mut dy, gap_floor)?;
    let (d_energies, rest) = dy.split_at(n);
    let (d_h, d_c) = rest.split_at(n * n);
    Ok(FlowDerivative {
        d_energies: d_energies.to_vec(),
        d_h_int: SymMatrix::try_from_matrix(Matrix::from_row_major(n, d_h.to_vec())?)?,
        d_overlaps: Matrix::from_row_major(n, d_c.to_vec())?,
    })
}

/// [`flow_rhs`] on packed vectors (see [`FlowState::pack`]), writing into `dy`.
pub fn flow_rhs_packed(n: usize, y: &[f64], dy: &mut [f64], gap_floor: f64) -> Result<()> {
    let mut a = vec![0.0; n * n];
    let mut m = vec![0.0; n * n];
    flow_rhs_with_scratch(n, y, dy, gap_floor, &mut a, &mut m)
}

/// Leaves the connection matrix in `a` for callers that need it too.
pub(crate) fn flow_rhs_with_scratch(
    n: usize,
    y: &[f64],
    dy: &mut [f64],
    gap_floor: f64,
    a: &mut [f64],
    m: &mut [f64],
) -> Result<()> {
    let (energies, rest) = y.split_at(n);
    let (h, c) = rest.split_at(n * n);
    let (d_e, d_rest) = dy.split_at_mut(n);
    let (d_h, d_c) = d_rest.split_at_mut(n * n);

    connection_into(n, energies, h, gap_floor, a)?;
    for i in 0..n {
        d_e[i] = h[i * n + i];
    }
    // M = A·V is the first resolvent sum; the second is Mᵀ since V is symmetric.
    product_into(n, a, h, m);
    product_into(n, a, c, d_c);
    for i in 0..n {
        for j in i..n {
            let v = m[i * n + j] + m[j * n + i];
            d_h[i * n + j] = v;
            d_h[j * n + i] = v;
        }
    }
    Ok(())
}

/// Smallest `|E_i − E_k|` over pairs with `|V_ik| > coupling_floor`.
/// Returns `(f64::INFINITY, None)` when no pair is coupled.
pub fn min_coupled_gap(state: &FlowState, coupling_floor: f64) -> (f64, Option<(usize, usize)>) {
    let n = state.dim();
    let mut best = (f64::INFINITY, None);
    for i in 0..n {
        for k in i + 1..n {
            if state.h_int[(i, k)].abs() > coupling_floor {
                let gap = (state.energies[i] - state.energies[k]).abs();
                if gap < best.0 {
                    best = (gap, Some((i, k)));
                }
            }
        }
    }
    best
}

/// `out = a·b` for row-major `n × n` buffers. Each output row is summed in
/// the same order whether or not rows run in parallel, so results do not
/// depend on the thread count.
fn product_into(n: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    let row = |(i, out_row): (usize, &mut [f64])| {
        out_row.iter_mut().for_each(|o| *o = 0.0);
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for (o, &bkj) in out_row.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                *o += aik * bkj;
            }
        }
    };
    if n >= PARALLEL_MIN_DIM {
        out.par_chunks_mut(n).enumerate().for_each(row);
    } else {
        out.chunks_mut(n).enumerate().for_each(row);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{harmonic_energies, x_power_matrix, BasisConfig};

    fn aho_start(n: usize) -> FlowState {
        let cfg = BasisConfig::new(n).unwrap();
        FlowState::new(
            0.0,
            harmonic_energies(&cfg),
            x_power_matrix(4, &cfg).unwrap(),
            Matrix::identity(n),
        )
        .unwrap()
    }

    #[test]
    fn ground_energy_slope_is_x4_expectation() {
        let d = flow_rhs(&aho_start(6), DEFAULT_GAP_FLOOR).unwrap();
        assert!((d.d_energies[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn diagonal_interaction_is_stationary() {
        let h = SymMatrix::from_upper_fn(4, |i, j| if i == j { i as f64 } else { 0.0 });
        let s = FlowState::new(0.3, vec![0.1, 1.0, 2.5, 4.0], h, Matrix::identity(4)).unwrap();
        let d = flow_rhs(&s, DEFAULT_GAP_FLOOR).unwrap();
        assert_eq!(d.d_energies, vec![0.0, 1.0, 2.0, 3.0]);
        assert!(d.d_h_int.as_matrix().as_slice().iter().all(|&v| v == 0.0));
        assert!(d.d_overlaps.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn connection_is_antisymmetric() {
        let s = aho_start(10);
        let a = connection(&s.energies, &s.h_int, DEFAULT_GAP_FLOOR).unwrap();
        for i in 0..10 {
            assert_eq!(a[(i, i)], 0.0);
            for k in 0..10 {
                assert_eq!(a[(k, i)], -a[(i, k)]);
            }
        }
    }

    #[test]
    fn pack_roundtrip() {
        let s = aho_start(5);
        let back = FlowState::unpack(5, 0.0, &s.pack()).unwrap();
        assert_eq!(back, s);
        assert!(FlowState::unpack(5, 0.0, &[0.0; 3]).is_err());
    }

    #[test]
    fn near_degeneracy_reports_pair() {
        let h = SymMatrix::from_upper_fn(3, |i, j| if i == 0 && j == 2 { 0.5 } else { 0.0 });
        let s = FlowState::new(0.0, vec![1.0, 2.0, 1.0 + 1e-10], h, Matrix::identity(3)).unwrap();
        match flow_rhs(&s, DEFAULT_GAP_FLOOR) {
            Err(Error::NearDegeneracy { i: 0, k: 2, gap, .. }) => assert!(gap < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn uncoupled_crossing_is_allowed() {
        // Levels 0 and 1 are degenerate but not coupled.
        let h = SymMatrix::from_upper_fn(3, |i, j| if i == 0 && j == 2 { 0.5 } else { 0.0 });
        let s = FlowState::new(0.0, vec![1.0, 1.0, 3.0], h, Matrix::identity(3)).unwrap();
        let d = flow_rhs(&s, DEFAULT_GAP_FLOOR).unwrap();
        assert!(d.d_overlaps.as_slice().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn min_gap_examples() {
        let (gap, pair) = min_coupled_gap(&aho_start(4), 0.0);
        assert_eq!(gap, 2.0);
        assert_eq!(pair, Some((0, 2)));

        let s = FlowState::new(
            0.0,
            vec![0.5, 1.5],
            SymMatrix::zeros(2),
            Matrix::identity(2),
        )
        .unwrap();
        assert_eq!(min_coupled_gap(&s, 0.0), (f64::INFINITY, None));
    }

    #[test]
    fn parity_and_norm_structure() {
        let s = aho_start(12);
        let d = flow_rhs(&s, DEFAULT_GAP_FLOOR).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                if (i + j) % 2 == 1 {
                    assert_eq!(d.d_h_int[(i, j)], 0.0);
                    assert_eq!(d.d_overlaps[(i, j)], 0.0);
                }
            }
            // d/dg |row i|² = 2 Σ_j c_ij dc_ij
            let dn: f64 = (0..12)
                .map(|j| 2.0 * s.overlaps[(i, j)] * d.d_overlaps[(i, j)])
                .sum();
            assert!(dn.abs() < 1e-14);
        }
        assert!(d.d_h_int.as_matrix().is_symmetric());
    }

    #[test]
    fn parallel_rows_match_serial() {
        let n = PARALLEL_MIN_DIM + 3;
        let a: Vec<f64> = (0..n * n).map(|k| ((k * 7919) % 101) as f64 / 37.0 - 1.3).collect();
        let b: Vec<f64> = (0..n * n).map(|k| ((k * 104729) % 97) as f64 / 41.0 - 1.1).collect();
        let mut par = vec![0.0; n * n];
        product_into(n, &a, &b, &mut par);
        let mut serial = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    serial[i * n + j] += a[i * n + k] * b[k * n + j];
                }
            }
        }
        assert_eq!(par, serial);
    }
}
