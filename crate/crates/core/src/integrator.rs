//! Adaptive Dormand–Prince 5(4) integration with targets hit by step clipping.

use crate::error::{Error, Result};

/// Steps smaller than this abort the integration.
pub const MIN_STEP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            initial_step: 1e-3,
            max_step: 0.05,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.initial_step.is_nan() || self.initial_step <= 0.0 {
            return bad("initial step must be positive");
        }
        if self.max_step.is_nan() || self.max_step < self.initial_step {
            return bad("max step must be at least the initial step");
        }
        if self.max_steps == 0 {
            return bad("max steps must be positive");
        }
        Ok(())
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self.initial_step = self.initial_step.min(max_step);
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

// Dormand & Prince (1980) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// Fifth-order weights (also row 7 of the tableau, hence FSAL).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth- minus fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Stage buffers, allocated once per integration.
struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
            err: vec![0.0; n],
        }
    }

    /// One step from `(g, y)` with `k[0] = f(g, y)` already filled. Leaves
    /// the fifth-order solution in `y_new`, the error estimate in `err`,
    /// and `f(g + h, y_new)` in `k[6]`.
    fn step<F>(&mut self, rhs: &mut F, g: f64, y: &[f64], h: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let n = y.len();
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let tmp = &mut self.tmp;

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        rhs(g + C2 * h, tmp, k2)?;
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(g + C3 * h, tmp, k3)?;
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(g + C4 * h, tmp, k4)?;
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(g + C5 * h, tmp, k5)?;
        for i in 0..n {
            tmp[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(g + h, tmp, k6)?;
        for i in 0..n {
            self.y_new[i] = y[i]
                + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        rhs(g + h, &self.y_new, k7)?;
        for i in 0..n {
            self.err[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        Ok(())
    }
}

/// Integrates `dy/dg = rhs(g, y)` from `(g0, y0)` and returns the state at
/// each of `targets` (strictly increasing, first `>= g0`).
pub fn integrate<F>(rhs: F, y0: &[f64], g0: f64, targets: &[f64], config: &IntegratorConfig) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    integrate_with_stats(rhs, y0, g0, targets, config).map(|(states, _)| states)
}

pub fn integrate_with_stats<F>(
    mut rhs: F,
    y0: &[f64],
    g0: f64,
    targets: &[f64],
    config: &IntegratorConfig,
) -> Result<(Vec<Vec<f64>>, IntegrationStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    config.validate()?;
    if !targets.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "integration targets must be strictly increasing".into(),
        ));
    }
    if let Some(&first) = targets.first() {
        if first.is_nan() || first < g0 {
            return Err(Error::InvalidArgument(format!(
                "first target {first} lies before the start {g0}"
            )));
        }
    }

    let n = y0.len();
    let mut stats = IntegrationStats::default();
    let mut out = Vec::with_capacity(targets.len());
    let mut y = y0.to_vec();
    let mut g = g0;
    let mut h = config.initial_step;
    let mut st = Stages::new(n);
    let mut k1_valid = false;

    for &target in targets {
        while g < target {
            if stats.accepted + stats.rejected >= config.max_steps {
                return Err(Error::StepLimitExceeded {
                    max_steps: config.max_steps,
                    target,
                });
            }
            if h < MIN_STEP {
                return Err(Error::StepUnderflow { step: h, g });
            }
            if !k1_valid {
                rhs(g, &y, &mut st.k[0])?;
                stats.rhs_evals += 1;
                k1_valid = true;
            }
            let remaining = target - g;
            let lands = h >= remaining * (1.0 - 1e-9);
            let step = if lands { remaining } else { h };

            st.step(&mut rhs, g, &y, step)?;
            stats.rhs_evals += 6;

            let mut ratio = 0.0_f64;
            for ((yi, yn), e) in y.iter().zip(&st.y_new).zip(&st.err) {
                let scale = config.abs_tol.max(config.rel_tol * yi.abs().max(yn.abs()));
                ratio = ratio.max(e.abs() / scale);
            }
            if !ratio.is_finite() || st.y_new.iter().any(|v| !v.is_finite()) {
                ratio = f64::INFINITY;
            }

            if ratio <= 1.0 {
                stats.accepted += 1;
                g = if lands { target } else { g + step };
                std::mem::swap(&mut y, &mut st.y_new);
                st.k.swap(0, 6);
                let factor = if ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
                };
                // A clipped landing step says nothing about the natural step size.
                let base = if lands { h.max(step) } else { step };
                h = (base * factor).min(config.max_step);
            } else {
                stats.rejected += 1;
                let factor = if ratio.is_finite() {
                    (0.9 * ratio.powf(-0.2)).clamp(0.2, 1.0)
                } else {
                    0.2
                };
                h = step * factor;
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

/// Fixed-step Dormand–Prince propagation with `steps` equal steps; used to
/// measure the order of the scheme.
pub fn integrate_fixed<F>(mut rhs: F, y0: &[f64], g0: f64, g1: f64, steps: usize) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let h = (g1 - g0) / steps as f64;
    let mut st = Stages::new(y0.len());
    let mut y = y0.to_vec();
    rhs(g0, &y, &mut st.k[0])?;
    for s in 0..steps {
        let g = g0 + s as f64 * h;
        st.step(&mut rhs, g, &y, h)?;
        std::mem::swap(&mut y, &mut st.y_new);
        st.k.swap(0, 6);
    }
    Ok(y)
}
