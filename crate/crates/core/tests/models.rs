mod common;

use coupling_flow::basis::{harmonic_energies, x_power_matrix, BasisConfig};
use coupling_flow::models::{default_x_grid, linspace};
use coupling_flow::oracle::{build_hamiltonian, oracle_spectrum};
use coupling_flow::{
    min_coupled_gap, solve_aho, solve_dwp, IntegratorConfig, Matrix, ModelKind, ModelSpec, Solution,
};
use proptest::prelude::*;

use common::max_sorted_diff;

fn cfg() -> IntegratorConfig {
    IntegratorConfig::default()
}

#[test]
fn aho_spot_values() {
    let (table, last) = solve_aho(50, &[0.1, 1.0], &cfg()).unwrap();
    assert!((table.energy(0, 0) - 0.55914633).abs() < 5e-9);
    assert!((table.energy(1, 1) - 2.7378923).abs() < 5e-8);
    assert_eq!(last.g, 1.0);
}

#[test]
fn dwp_spot_values() {
    let t = solve_dwp(50, &[0.5, 1.0], &cfg()).unwrap();
    assert!((t.energy(0, 0) - 0.53018104538).abs() < 1e-9);
    assert!((t.energy(0, 1) - 1.8998365150).abs() < 1e-9);
    assert!((t.energy(1, 0) - 0.32882650295).abs() < 1e-9);
}

#[test]
fn dwp_chain_starts_at_aho_half() {
    let t = solve_dwp(50, &[0.0], &cfg()).unwrap();
    assert!((t.energy(0, 0) - 0.69617582).abs() < 5e-9);
}

#[test]
fn aho_energies_rise_with_coupling() {
    let g = linspace(0.0, 3.0, 31);
    let sol = Solution::solve(ModelSpec::aho(20).unwrap(), &g, &cfg()).unwrap();
    for w in sol.states.windows(2) {
        for i in 0..20 {
            assert!(w[1].energies[i] > w[0].energies[i]);
        }
    }
    for s in &sol.states {
        assert!((0..20).all(|i| s.h_int[(i, i)] > 0.0));
    }
}

#[test]
fn dwp_slopes_follow_interaction_diagonal() {
    // dE_i/dg′ = V_ii: compare the sign of a centered difference with V_ii.
    let step = 1e-4;
    let centers = [0.5, 2.0, 4.0];
    let g: Vec<f64> = centers.iter().flat_map(|&c| [c - step, c, c + step]).collect();
    let sol = Solution::solve(ModelSpec::dwp(20, &cfg()).unwrap(), &g, &cfg()).unwrap();
    for t in sol.states.chunks(3) {
        for i in 0..6 {
            let slope = (t[2].energies[i] - t[0].energies[i]) / (2.0 * step);
            let v = t[1].h_int[(i, i)];
            assert!(v < 0.0);
            assert_eq!(slope.signum(), v.signum());
            assert!((slope - v).abs() < 1e-6 * v.abs().max(1.0));
        }
    }
}

#[test]
fn overlaps_stay_orthogonal_and_parity_clean() {
    let g = [0.5, 2.0, 6.0];
    for model in [ModelSpec::aho(30).unwrap(), ModelSpec::dwp(30, &cfg()).unwrap()] {
        let sol = Solution::solve(model, &g, &cfg()).unwrap();
        for s in &sol.states {
            assert!(s.orthogonality_defect() < 1e-8);
            let (h, c) = s.parity_leakage();
            assert!(h < 1e-12 && c < 1e-12);
        }
    }
}

#[test]
fn chained_overlaps_diagonalize_harmonic_hamiltonian() {
    let n = 30;
    let model = ModelSpec::dwp(n, &cfg()).unwrap();
    let base = model.base_overlaps().unwrap().clone();
    let sol = Solution::solve(model, &[1.0, 4.0], &cfg()).unwrap();
    for s in &sol.states {
        let w = s.overlaps.matmul(&base);
        let h = build_hamiltonian(ModelKind::Dwp, s.g, n).unwrap();
        let d = w.matmul(h.as_matrix()).matmul(&w.transpose());
        let target = Matrix::from_diagonal(&s.energies);
        assert!(d.max_abs_diff(&target) < 1e-6, "g'={}: {}", s.g, d.max_abs_diff(&target));
    }
}

#[test]
fn parity_partner_gap_is_not_a_degeneracy() {
    let sol = Solution::solve(ModelSpec::dwp(50, &cfg()).unwrap(), &[8.0], &cfg()).unwrap();
    let s = &sol.states[0];
    assert!((s.energies[1] - s.energies[0]).abs() < 1e-4);
    assert_eq!(s.h_int[(0, 1)], 0.0);
    let (gap, pair) = min_coupled_gap(s, 0.0);
    assert!(gap > 0.1, "gap {gap} for {pair:?}");
}

#[test]
fn trace_grows_linearly() {
    // Σ E_i(g) = tr(H₀) + g·tr(X₄) holds exactly in the truncation.
    let n = 20;
    let bc = BasisConfig::new(n).unwrap();
    let tr0: f64 = harmonic_energies(&bc).iter().sum();
    let tr4 = x_power_matrix(4, &bc).unwrap().as_matrix().trace();
    let g = [0.3, 1.0, 4.0];
    let sol = Solution::solve(ModelSpec::aho(n).unwrap(), &g, &cfg()).unwrap();
    for s in &sol.states {
        let sum: f64 = s.energies.iter().sum();
        let exact = tr0 + s.g * tr4;
        assert!(((sum - exact) / exact).abs() < 1e-10);
        assert!((s.h_int.as_matrix().trace() - tr4).abs() < 1e-8 * tr4);
    }
}

#[test]
fn deterministic_solutions() {
    let a = Solution::solve(ModelSpec::aho(12).unwrap(), &[0.5, 2.0], &cfg()).unwrap();
    let b = Solution::solve(ModelSpec::aho(12).unwrap(), &[0.5, 2.0], &cfg()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dwp_doublet_densities() {
    let gp = 6.0;
    let sol = Solution::solve(ModelSpec::dwp(50, &cfg()).unwrap(), &[gp], &cfg()).unwrap();
    let grid = default_x_grid();
    let d0 = sol.density(0, gp, &grid).unwrap();
    let d1 = sol.density(1, gp, &grid).unwrap();
    assert!(!d0.grid_too_narrow && !d1.grid_too_narrow);
    let m = grid.len();
    for k in 0..m {
        assert!((d0.values[k] - d0.values[m - 1 - k]).abs() < 1e-8);
        assert!((d0.values[k] - d1.values[k]).abs() < 1e-3);
    }
    // Peaks sit close to the classical minima ±√(g′ − ½).
    let x_min = (gp - 0.5f64).sqrt();
    let peaks = d0.peaks(1e-3);
    assert_eq!(peaks.len(), 2);
    for p in peaks {
        assert!((grid[p].abs() - x_min).abs() < 0.2, "peak at {}", grid[p]);
    }
    // The odd partner vanishes at the origin.
    assert!(d1.values[m / 2] < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn flow_equals_truncated_diagonalization(n in 4usize..14, g in 0.0f64..4.0) {
        let (table, _) = solve_aho(n, &[g], &cfg()).unwrap();
        let oracle = oracle_spectrum(ModelKind::Aho, g, n).unwrap();
        prop_assert!(max_sorted_diff(&table.energies[0], &oracle) < 1e-8);
    }

    #[test]
    fn dwp_flow_equals_truncated_diagonalization(n in 4usize..14, gp in 0.0f64..6.0) {
        let t = solve_dwp(n, &[gp], &cfg()).unwrap();
        let oracle = oracle_spectrum(ModelKind::Dwp, gp, n).unwrap();
        prop_assert!(max_sorted_diff(&t.energies[0], &oracle) < 1e-8);
    }
}
