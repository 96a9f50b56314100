//! The anharmonic oscillator (AHO) `½p² + ½x² + g·x⁴`, flowed from the
//! harmonic point, and the double well (DWP) `½p² + ½x² + ½x⁴ − g′·x²`,
//! flowed in `g′` from the AHO solution at `g = ½`.

use crate::basis::{harmonic_energies, hermite_functions, x_power_matrix, BasisConfig};
use crate::error::{Error, Result};
use crate::flow::{flow_rhs_with_scratch, FlowState, DEFAULT_GAP_FLOOR};
use crate::integrator::{integrate, IntegratorConfig};
use crate::linalg::Matrix;

/// Coupling at which the AHO solution seeds the double-well flow.
pub const DWP_CHAIN_COUPLING: f64 = 0.5;

/// Tolerance on `g` when matching a requested coupling to a solved one.
const COUPLING_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Aho,
    Dwp,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Aho => "aho",
            ModelKind::Dwp => "dwp",
        }
    }
}

/// A model ready to be flowed: its `g = 0` spectrum and interaction.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Aho { n_states: usize },
    /// Carries the AHO flow state at `g = ½`, whose eigenbasis is the
    /// unperturbed basis of the double-well flow.
    Dwp { aho_half: FlowState },
}

impl ModelSpec {
    pub fn aho(n_states: usize) -> Result<Self> {
        BasisConfig::new(n_states)?;
        Ok(Self::Aho { n_states })
    }

    /// Flows the AHO to `g = ½` and wraps the result.
    pub fn dwp(n_states: usize, config: &IntegratorConfig) -> Result<Self> {
        let states = solve_flow(&aho_initial(n_states)?, &[DWP_CHAIN_COUPLING], config)?;
        let aho_half = states.into_iter().next().expect("one target requested");
        Self::dwp_from_aho(aho_half)
    }

    pub fn dwp_from_aho(aho_half: FlowState) -> Result<Self> {
        if (aho_half.g - DWP_CHAIN_COUPLING).abs() > COUPLING_MATCH_TOL {
            return Err(Error::ChainMismatch(aho_half.g));
        }
        Ok(Self::Dwp { aho_half })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Aho { .. } => ModelKind::Aho,
            ModelSpec::Dwp { .. } => ModelKind::Dwp,
        }
    }

    pub fn n_states(&self) -> usize {
        match self {
            ModelSpec::Aho { n_states } => *n_states,
            ModelSpec::Dwp { aho_half } => aho_half.dim(),
        }
    }

    pub fn initial_state(&self) -> Result<FlowState> {
        match self {
            ModelSpec::Aho { n_states } => aho_initial(*n_states),
            ModelSpec::Dwp { aho_half } => dwp_initial(aho_half),
        }
    }

    /// Overlaps of the unperturbed basis with harmonic states, if the
    /// unperturbed basis is not itself harmonic.
    pub fn base_overlaps(&self) -> Option<&Matrix> {
        match self {
            ModelSpec::Aho { .. } => None,
            ModelSpec::Dwp { aho_half } => Some(&aho_half.overlaps),
        }
    }
}

/// Energies sampled on a coupling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub g_values: Vec<f64>,
    /// `energies[k][i]` is `E_i(g_values[k])` for every level `i < N`.
    pub energies: Vec<Vec<f64>>,
    pub levels_requested: Vec<usize>,
}

impl SpectrumTable {
    fn from_states(states: &[FlowState], levels: Vec<usize>) -> Self {
        Self {
            g_values: states.iter().map(|s| s.g).collect(),
            energies: states.iter().map(|s| s.energies.clone()).collect(),
            levels_requested: levels,
        }
    }

    pub fn energy(&self, g_index: usize, level: usize) -> f64 {
        self.energies[g_index][level]
    }

    /// Index of `g` in `g_values`.
    pub fn position(&self, g: f64) -> Option<usize> {
        self.g_values
            .iter()
            .position(|&v| (v - g).abs() <= COUPLING_MATCH_TOL)
    }

    /// `(g, level, energy)` rows for the requested levels.
    pub fn rows(&self) -> impl Iterator<Item = (f64, usize, f64)> + '_ {
        self.g_values.iter().enumerate().flat_map(move |(k, &g)| {
            self.levels_requested
                .iter()
                .map(move |&i| (g, i, self.energies[k][i]))
        })
    }
}

/// Harmonic starting point: `E_i = i + ½`, `V = X₄`, `c = I`.
pub fn aho_initial(n: usize) -> Result<FlowState> {
    let cfg = BasisConfig::new(n)?;
    FlowState::new(
        0.0,
        harmonic_energies(&cfg),
        x_power_matrix(4, &cfg)?,
        Matrix::identity(n),
    )
}

/// Double-well starting point from the AHO state at `g = ½`: energies carry
/// over, `V_ij = ⟨ψ_i|−x²|ψ_j⟩` in the AHO eigenbasis, overlaps reset to `I`.
pub fn dwp_initial(aho_half: &FlowState) -> Result<FlowState> {
    if (aho_half.g - DWP_CHAIN_COUPLING).abs() > COUPLING_MATCH_TOL {
        return Err(Error::ChainMismatch(aho_half.g));
    }
    let n = aho_half.dim();
    let cfg = BasisConfig::new(n)?;
    let minus_x2 = x_power_matrix(2, &cfg)?.scale(-1.0);
    // Rows of the overlap matrix are eigenvectors, so V = C·(−X₂)·Cᵀ.
    let h_int = minus_x2.congruence(&aho_half.overlaps.transpose());
    FlowState::new(0.0, aho_half.energies.clone(), h_int, Matrix::identity(n))
}

/// Integrates the flow from `initial` and returns the state at each target.
pub fn solve_flow(initial: &FlowState, targets: &[f64], config: &IntegratorConfig) -> Result<Vec<FlowState>> {
    let n = initial.dim();
    let mut a = vec![0.0; n * n];
    let mut m = vec![0.0; n * n];
    let rhs = |_g: f64, y: &[f64], dy: &mut [f64]| {
        flow_rhs_with_scratch(n, y, dy, DEFAULT_GAP_FLOOR, &mut a, &mut m)
    };
    let packed = integrate(rhs, &initial.pack(), initial.g, targets, config)?;
    targets
        .iter()
        .zip(packed)
        .map(|(&g, y)| FlowState::unpack(n, g, &y))
        .collect()
}

fn check_targets(targets: &[f64]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidArgument("no coupling values requested".into()));
    }
    if targets[0] < 0.0 || !targets.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "coupling values must be non-negative and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Flowed states of one model at a list of couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub model: ModelSpec,
    pub states: Vec<FlowState>,
}

impl Solution {
    pub fn solve(model: ModelSpec, targets: &[f64], config: &IntegratorConfig) -> Result<Self> {
        check_targets(targets)?;
        let states = solve_flow(&model.initial_state()?, targets, config)?;
        Ok(Self { model, states })
    }

    pub fn spectrum(&self, levels: &[usize]) -> Result<SpectrumTable> {
        let n = self.model.n_states();
        if let Some(&bad) = levels.iter().find(|&&l| l >= n) {
            return Err(Error::InvalidArgument(format!(
                "level {bad} out of range for N = {n}"
            )));
        }
        Ok(SpectrumTable::from_states(&self.states, levels.to_vec()))
    }

    pub fn state_at(&self, g: f64) -> Option<&FlowState> {
        self.states
            .iter()
            .find(|s| (s.g - g).abs() <= COUPLING_MATCH_TOL)
    }

    /// Expansion of flowed level `level` at coupling `g` in harmonic states.
    pub fn harmonic_coefficients(&self, level: usize, g: f64) -> Result<Vec<f64>> {
        let state = self.state_at(g).ok_or_else(|| {
            Error::InvalidArgument(format!("coupling {g} was not among the solved values"))
        })?;
        let n = state.dim();
        if level >= n {
            return Err(Error::InvalidArgument(format!(
                "level {level} out of range for N = {n}"
            )));
        }
        let row = state.overlaps.row(level).to_vec();
        Ok(match self.model.base_overlaps() {
            None => row,
            Some(base) => (0..n)
                .map(|l| (0..n).map(|k| row[k] * base[(k, l)]).sum())
                .collect(),
        })
    }

    pub fn density(&self, level: usize, g: f64, x_grid: &[f64]) -> Result<Density> {
        wavefunction_density(&self.harmonic_coefficients(level, g)?, x_grid)
    }
}

/// Runs the AHO flow. Returns the table over all levels (requested levels
/// default to every level) and the state at the last target.
pub fn solve_aho(n: usize, g_targets: &[f64], config: &IntegratorConfig) -> Result<(SpectrumTable, FlowState)> {
    let sol = Solution::solve(ModelSpec::aho(n)?, g_targets, config)?;
    let table = sol.spectrum(&(0..n).collect::<Vec<_>>())?;
    let last = sol.states.last().cloned().expect("targets checked non-empty");
    Ok((table, last))
}

/// Runs the double-well flow chained through the AHO at `g = ½`.
pub fn solve_dwp(n: usize, gp_targets: &[f64], config: &IntegratorConfig) -> Result<SpectrumTable> {
    let sol = Solution::solve(ModelSpec::dwp(n, config)?, gp_targets, config)?;
    sol.spectrum(&(0..n).collect::<Vec<_>>())
}

/// Probability density on a position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub x: Vec<f64>,
    /// Normalized so the trapezoid integral over the grid is 1.
    pub values: Vec<f64>,
    /// Trapezoid integral of the raw `|ψ|²` before renormalization.
    pub raw_norm: f64,
    /// Set when `raw_norm < 0.999`: the grid cuts off part of the state.
    pub grid_too_narrow: bool,
}

impl Density {
    /// Indices of interior local maxima higher than `rel_floor` times the
    /// global maximum. The floor screens out the tiny ripples a finite
    /// Hermite expansion leaves in the tails.
    pub fn peaks(&self, rel_floor: f64) -> Vec<usize> {
        let v = &self.values;
        let floor = rel_floor * v.iter().cloned().fold(0.0, f64::max);
        (1..v.len().saturating_sub(1))
            .filter(|&k| v[k] > v[k - 1] && v[k] >= v[k + 1] && v[k] > floor)
            .collect()
    }
}

/// `|Σ_j coeffs[j]·φ_j(x)|²` on `x_grid`.
pub fn wavefunction_density(coeffs: &[f64], x_grid: &[f64]) -> Result<Density> {
    if x_grid.len() < 2 || !x_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "density grid needs at least two strictly increasing points".into(),
        ));
    }
    let raw: Vec<f64> = x_grid
        .iter()
        .map(|&x| {
            let psi: f64 = hermite_functions(coeffs.len(), x)
                .iter()
                .zip(coeffs)
                .map(|(phi, c)| phi * c)
                .sum();
            psi * psi
        })
        .collect();
    let raw_norm = trapezoid(x_grid, &raw);
    Ok(Density {
        x: x_grid.to_vec(),
        values: raw.iter().map(|v| v / raw_norm).collect(),
        raw_norm,
        grid_too_narrow: raw_norm < 0.999,
    })
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Double-well potential `½x² + ½x⁴ − g′x²` on a grid.
pub fn potential_curve(g_prime: f64, x_grid: &[f64]) -> Vec<f64> {
    x_grid
        .iter()
        .map(|&x| {
            let x2 = x * x;
            0.5 * x2 + 0.5 * x2 * x2 - g_prime * x2
        })
        .collect()
}

/// `points` evenly spaced values on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|k| if k == points - 1 { hi } else { lo + k as f64 * step })
                .collect()
        }
    }
}

/// 601 points on `[−6, 6]`.
pub fn default_x_grid() -> Vec<f64> {
    linspace(-6.0, 6.0, 601)
}
