//! Time-dependent evolution in the adiabatic (instantaneous eigen-) basis
//! for a linear ramp `g = v·t`.
//!
//! With `a_n = α_n e^{−iΘ_n}` the amplitudes obey
//!
//! ```text
//! dα_n/dg = Σ_{m≠n} V_nm / (E_n − E_m) · α_m · e^{i(Θ_n − Θ_m)}
//! dΘ_n/dg = E_n / v
//! ```
//!
//! and are integrated jointly with the flow that supplies `E_n(g)` and
//! `V_nm(g)`. Only monotonic ramps are handled; a general `g(t)` can be
//! split into monotonic pieces and the pieces chained through
//! [`NonadiabaticState`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flow::{flow_rhs_with_scratch, FlowDerivative, FlowState, DEFAULT_GAP_FLOOR};
use crate::integrator::{integrate, IntegratorConfig};
use crate::linalg::{Matrix, SymMatrix};
use crate::models::ModelSpec;

/// Upper end of the default ramp window in `g′`.
pub const DEFAULT_RAMP_G_MAX: f64 = 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct NonadiabaticConfig {
    pub integrator: IntegratorConfig,
    /// Levels whose mutual phase differences bound the step size: the step
    /// is capped at `v·π / (4·ΔE)` with `ΔE` the initial energy spread of
    /// the lowest `phase_levels` levels.
    pub phase_levels: usize,
}

impl Default for NonadiabaticConfig {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::default(),
            phase_levels: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonadiabaticState {
    pub flow: FlowState,
    pub amplitudes: Vec<Complex64>,
    pub phases: Vec<f64>,
    pub ramp_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonadiabaticDerivative {
    pub flow: FlowDerivative,
    pub d_amplitudes: Vec<Complex64>,
    pub d_phases: Vec<f64>,
}

impl NonadiabaticState {
    /// All weight in `init_level`, zero phases.
    pub fn start(flow: FlowState, init_level: usize, ramp_rate: f64) -> Result<Self> {
        let n = flow.dim();
        if init_level >= n {
            return Err(Error::InvalidArgument(format!(
                "initial level {init_level} out of range for N = {n}"
            )));
        }
        check_rate(ramp_rate)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
        amplitudes[init_level] = Complex64::new(1.0, 0.0);
        Ok(Self {
            flow,
            amplitudes,
            phases: vec![0.0; n],
            ramp_rate,
        })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Amplitudes in the adiabatic basis with the dynamical phase restored.
    pub fn dressed_amplitudes(&self) -> Vec<Complex64> {
        self.amplitudes
            .iter()
            .zip(&self.phases)
            .map(|(a, &th)| a * Complex64::from_polar(1.0, -th))
            .collect()
    }

    fn pack(&self) -> Vec<f64> {
        let mut y = self.flow.pack();
        y.extend(self.amplitudes.iter().map(|a| a.re));
        y.extend(self.amplitudes.iter().map(|a| a.im));
        y.extend_from_slice(&self.phases);
        y
    }

    fn unpack(n: usize, g: f64, ramp_rate: f64, y: &[f64]) -> Result<Self> {
        let flow_len = FlowState::packed_len(n);
        let flow = FlowState::unpack(n, g, &y[..flow_len])?;
        let rest = &y[flow_len..];
        let amplitudes = (0..n)
            .map(|k| Complex64::new(rest[k], rest[n + k]))
            .collect();
        Ok(Self {
            flow,
            amplitudes,
            phases: rest[2 * n..3 * n].to_vec(),
            ramp_rate,
        })
    }
}

fn check_rate(v: f64) -> Result<()> {
    if v == 0.0 {
        return Err(Error::ZeroRampRate);
    }
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ramp rate must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Scratch buffers for the augmented right-hand side.
struct AugmentedRhs {
    n: usize,
    v: f64,
    a: Vec<f64>,
    m: Vec<f64>,
    dressed: Vec<Complex64>,
}

impl AugmentedRhs {
    fn new(n: usize, v: f64) -> Self {
        Self {
            n,
            v,
            a: vec![0.0; n * n],
            m: vec![0.0; n * n],
            dressed: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    fn eval(&mut self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let n = self.n;
        let flow_len = FlowState::packed_len(n);
        let (y_flow, y_rest) = y.split_at(flow_len);
        let (dy_flow, dy_rest) = dy.split_at_mut(flow_len);
        flow_rhs_with_scratch(n, y_flow, dy_flow, DEFAULT_GAP_FLOOR, &mut self.a, &mut self.m)?;

        // The connection has a zero diagonal, so ⟨n|∂_g n⟩ drops out.
        debug_assert!((0..n).all(|k| self.a[k * n + k] == 0.0));

        let energies = &y_flow[..n];
        let (re, rest) = y_rest.split_at(n);
        let (im, theta) = rest.split_at(n);
        for m in 0..n {
            self.dressed[m] = Complex64::new(re[m], im[m]) * Complex64::from_polar(1.0, -theta[m]);
        }
        let (d_re, rest) = dy_rest.split_at_mut(n);
        let (d_im, d_theta) = rest.split_at_mut(n);
        for k in 0..n {
            let row = &self.a[k * n..(k + 1) * n];
            let mut s = Complex64::new(0.0, 0.0);
            for (&akm, &b) in row.iter().zip(&self.dressed) {
                if akm != 0.0 {
                    s += akm * b;
                }
            }
            let d = s * Complex64::from_polar(1.0, theta[k]);
            d_re[k] = d.re;
            d_im[k] = d.im;
            d_theta[k] = energies[k] / self.v;
        }
        Ok(())
    }
}

/// Right-hand side of the joint flow/amplitude/phase system.
pub fn nonadiabatic_rhs(state: &NonadiabaticState) -> Result<NonadiabaticDerivative> {
    check_rate(state.ramp_rate)?;
    let n = state.flow.dim();
    let y = state.pack();
    let mut dy = vec![0.0; y.len()];
    AugmentedRhs::new(n, state.ramp_rate).eval(&y, &mut dy)?;

    let flow_len = FlowState::packed_len(n);
    let (d_e, rest) = dy[..flow_len].split_at(n);
    let (d_h, d_c) = rest.split_at(n * n);
    let tail = &dy[flow_len..];
    Ok(NonadiabaticDerivative {
        flow: FlowDerivative {
            d_energies: d_e.to_vec(),
            d_h_int: SymMatrix::try_from_matrix(Matrix::from_row_major(n, d_h.to_vec())?)?,
            d_overlaps: Matrix::from_row_major(n, d_c.to_vec())?,
        },
        d_amplitudes: (0..n).map(|k| Complex64::new(tail[k], tail[n + k])).collect(),
        d_phases: tail[2 * n..].to_vec(),
    })
}

/// One sampled point of a ramp.
#[derive(Debug, Clone, PartialEq)]
pub struct RampSample {
    pub g: f64,
    pub t: f64,
    pub state: NonadiabaticState,
}

impl RampSample {
    pub fn probabilities(&self) -> Vec<f64> {
        self.state.probabilities()
    }

    pub fn phases(&self) -> &[f64] {
        &self.state.phases
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RampTrajectory {
    pub ramp_rate: f64,
    pub init_level: usize,
    pub samples: Vec<RampSample>,
}

impl RampTrajectory {
    /// `max_g |Σ_n |α_n|² − 1|`.
    pub fn unitarity_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.probabilities().iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `|α_level|²` along the trajectory.
    pub fn probability_series(&self, level: usize) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| s.state.amplitudes[level].norm_sqr())
            .collect()
    }

    pub fn last(&self) -> &RampSample {
        self.samples.last().expect("trajectory is never empty")
    }
}

/// Largest step that keeps phase differences among the low levels resolved.
pub fn phase_step_cap(energies: &[f64], ramp_rate: f64, phase_levels: usize) -> f64 {
    let k = phase_levels.clamp(2, energies.len().max(2)).min(energies.len());
    let low = &energies[..k];
    let spread = low.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - low.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread > 0.0 {
        ramp_rate * std::f64::consts::PI / (4.0 * spread)
    } else {
        f64::INFINITY
    }
}

/// Evolves from `α_n = δ_{n,init_level}`, `Θ_n = 0` along `g = v·t` up to
/// `g_max`, sampling at `samples` (increasing, within `[0, g_max]`). The
/// endpoint `g_max` is always the last sample.
pub fn evolve_ramp(
    model: &ModelSpec,
    ramp_rate: f64,
    g_max: f64,
    init_level: usize,
    samples: &[f64],
    config: &NonadiabaticConfig,
) -> Result<RampTrajectory> {
    let initial = NonadiabaticState::start(model.initial_state()?, init_level, ramp_rate)?;
    let mut traj = continue_ramp(initial, g_max, samples, config)?;
    traj.init_level = init_level;
    Ok(traj)
}

/// Continues a ramp from an arbitrary state (at `state.flow.g`) to `g_end`.
/// Chaining calls with different rates covers piecewise-linear `g(t)`;
/// `t` in the samples counts from the start of this segment, and the
/// trajectory's `init_level` is the most populated level of `state`.
pub fn continue_ramp(
    state: NonadiabaticState,
    g_end: f64,
    samples: &[f64],
    config: &NonadiabaticConfig,
) -> Result<RampTrajectory> {
    let ramp_rate = state.ramp_rate;
    check_rate(ramp_rate)?;
    let g0 = state.flow.g;
    if !(g_end >= g0 && g_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ramp end {g_end} must be finite and not before the start {g0}"
        )));
    }
    if !samples.windows(2).all(|w| w[0] < w[1])
        || samples.iter().any(|&g| !(g0..=g_end).contains(&g))
    {
        return Err(Error::InvalidArgument(format!(
            "ramp samples must increase within [{g0}, {g_end}]"
        )));
    }
    let mut targets = samples.to_vec();
    if targets.last().map_or(true, |&g| g < g_end) {
        targets.push(g_end);
    }

    let n = state.flow.dim();
    let cap = phase_step_cap(&state.flow.energies, ramp_rate, config.phase_levels);
    let integ = if cap < config.integrator.max_step {
        config.integrator.clone().with_max_step(cap)
    } else {
        config.integrator.clone()
    };

    let init_level = state
        .amplitudes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map_or(0, |(k, _)| k);
    let mut aug = AugmentedRhs::new(n, ramp_rate);
    let packed = integrate(|_g, y, dy| aug.eval(y, dy), &state.pack(), g0, &targets, &integ)?;
    let samples = targets
        .iter()
        .zip(packed)
        .map(|(&g, y)| {
            Ok(RampSample {
                g,
                t: (g - g0) / ramp_rate,
                state: NonadiabaticState::unpack(n, g, ramp_rate, &y)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RampTrajectory {
        ramp_rate,
        init_level,
        samples,
    })
}
