use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coupling_flow::models::linspace;
use coupling_flow::{IntegratorConfig, ModelKind};

#[derive(Debug, Parser)]
#[command(name = "coupling-flow", version, about = "Coupling-strength flow solver for the anharmonic oscillator and double well")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Anharmonic-oscillator spectrum E_i(g) for H = p²/2 + x²/2 + g x⁴
    Aho(SpectrumArgs),
    /// Double-well spectrum E_i(g′) for H = p²/2 + x²/2 + x⁴/2 − g′ x²
    Dwp(SpectrumArgs),
    /// Transition probabilities for a linear ramp g = v t
    Nonadiabatic(NonadiabaticArgs),
    /// Probability densities |ψ_i(x)|²
    Density(DensityArgs),
    /// Double-well potential curve
    Potential(PotentialArgs),
    /// Compare the flow against direct diagonalization or the bundled tables
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Aho,
    Dwp,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Aho => ModelKind::Aho,
            Model::Dwp => ModelKind::Dwp,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Number of harmonic basis states N
    #[arg(long = "n", default_value_t = 50)]
    pub n_states: usize,
    /// Output file (stdout when omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IntegratorArgs {
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub initial_step: Option<f64>,
    #[arg(long)]
    pub max_step: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
}

impl IntegratorArgs {
    pub fn config(&self) -> Result<IntegratorConfig> {
        let mut c = IntegratorConfig::default();
        if let Some(v) = self.rtol {
            c.rel_tol = v;
        }
        if let Some(v) = self.atol {
            c.abs_tol = v;
        }
        if let Some(v) = self.initial_step {
            c.initial_step = v;
        }
        if let Some(v) = self.max_step {
            c.max_step = v;
            if self.initial_step.is_none() {
                c.initial_step = c.initial_step.min(v);
            }
        }
        if let Some(v) = self.max_steps {
            c.max_steps = v;
        }
        if let Err(e) = c.validate() {
            bail!("--rtol/--atol/--initial-step/--max-step/--max-steps: {e}");
        }
        Ok(c)
    }
}

/// Coupling values, either listed or as a range.
#[derive(Debug, Clone, Args)]
pub struct CouplingArgs {
    /// Comma-separated coupling values (g for aho, g′ for dwp)
    #[arg(long = "g", visible_alias = "gp", value_delimiter = ',', conflicts_with_all = ["g_min", "g_max", "g_step"])]
    pub g: Option<Vec<f64>>,
    #[arg(long)]
    pub g_min: Option<f64>,
    #[arg(long)]
    pub g_max: Option<f64>,
    #[arg(long)]
    pub g_step: Option<f64>,
}

impl CouplingArgs {
    pub fn values(&self) -> Result<Vec<f64>> {
        let g = match (&self.g, self.g_min, self.g_max, self.g_step) {
            (Some(list), ..) => list.clone(),
            (None, lo, Some(hi), Some(step)) => {
                let lo = lo.unwrap_or(0.0);
                if step.is_nan() || step <= 0.0 || hi < lo {
                    bail!("--g-step must be positive and --g-max at least --g-min");
                }
                let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|k| lo + k as f64 * step).collect()
            }
            (None, _, None, None) => bail!("--g: give coupling values or --g-max with --g-step"),
            _ => bail!("--g-max and --g-step must be given together"),
        };
        check_couplings(&g)?;
        Ok(g)
    }
}

pub fn check_couplings(g: &[f64]) -> Result<()> {
    if g.is_empty() {
        bail!("--g: no coupling values");
    }
    if g.iter().any(|v| !v.is_finite() || *v < 0.0) {
        bail!("--g: coupling values must be finite and non-negative");
    }
    if !g.windows(2).all(|w| w[0] < w[1]) {
        bail!("--g: coupling values must be strictly increasing");
    }
    Ok(())
}

/// Position grid, listed or as a range (default 601 points on [−6, 6]).
#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Comma-separated positions
    #[arg(long = "x", value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["x_min", "x_max", "x_points"])]
    pub x: Option<Vec<f64>>,
    #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 601)]
    pub x_points: usize,
}

impl GridArgs {
    pub fn values(&self) -> Result<Vec<f64>> {
        let x = match &self.x {
            Some(list) => list.clone(),
            None => {
                if self.x_points < 2 || self.x_max.partial_cmp(&self.x_min) != Some(std::cmp::Ordering::Greater) {
                    bail!("--x-points must be at least 2 and --x-max above --x-min");
                }
                linspace(self.x_min, self.x_max, self.x_points)
            }
        };
        if x.is_empty() || x.iter().any(|v| !v.is_finite()) {
            bail!("--x: positions must be finite");
        }
        if !x.windows(2).all(|w| w[0] < w[1]) {
            bail!("--x: positions must be strictly increasing");
        }
        Ok(x)
    }
}

pub fn check_levels(levels: &[usize], n: usize, flag: &str) -> Result<()> {
    if let Some(l) = levels.iter().find(|&&l| l >= n) {
        bail!("{flag}: level {l} out of range for --n {n}");
    }
    Ok(())
}

pub fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        bail!("--n: need at least 2 basis states, got {n}");
    }
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub couplings: CouplingArgs,
    /// Comma-separated level indices
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 3, 4, 5])]
    pub levels: Vec<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct NonadiabaticArgs {
    /// Ramp rate v in g = v t
    #[arg(long = "v")]
    pub ramp_rate: f64,
    #[arg(long, value_enum, default_value_t = Model::Dwp)]
    pub model: Model,
    /// End of the ramp in coupling units
    #[arg(long = "g-max", default_value_t = coupling_flow::nonadiabatic::DEFAULT_RAMP_G_MAX)]
    pub g_max: f64,
    /// Number of evenly spaced samples on [0, g_max]
    #[arg(long, default_value_t = 121)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub init_level: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 2, 4])]
    pub levels: Vec<usize>,
    /// Levels whose phase spread caps the step size
    #[arg(long, default_value_t = 10)]
    pub phase_levels: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum, default_value_t = Model::Dwp)]
    pub model: Model,
    /// Coupling value (g or g′)
    #[arg(long = "g", visible_alias = "gp")]
    pub g: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1])]
    pub levels: Vec<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl DensityArgs {
    pub fn coupling(&self) -> Result<f64> {
        check_couplings(&[self.g])?;
        Ok(self.g)
    }
}

#[derive(Debug, Clone, Args)]
pub struct PotentialArgs {
    /// Comma-separated g′ values
    #[arg(long = "gp", visible_alias = "g", value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub gp: Vec<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = Model::Aho)]
    pub model: Model,
    /// Coupling values to compare at (ignored with --table)
    #[arg(long = "g", visible_alias = "gp", value_delimiter = ',')]
    pub g: Option<Vec<f64>>,
    /// Compare against the bundled published table for --model instead of the oracle
    #[arg(long)]
    pub table: bool,
    /// Maximum allowed |flow − oracle| over all levels
    #[arg(long, default_value_t = 1e-7)]
    pub threshold: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}
