use anyhow::{bail, Context, Result};
use coupling_flow::models::{linspace, potential_curve};
use coupling_flow::nonadiabatic::NonadiabaticConfig;
use coupling_flow::oracle::oracle_spectrum;
use coupling_flow::reference::{reference_table, table_couplings};
use coupling_flow::{evolve_ramp, IntegratorConfig, ModelKind, ModelSpec, Solution};

use crate::args::{
    check_couplings, check_levels, check_n, CommonArgs, DensityArgs, NonadiabaticArgs, PotentialArgs, SpectrumArgs,
    ValidateArgs,
};
use crate::output::{sig, Table};

/// What a successful run concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    ValidationFailed,
}

fn coupling_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Aho => "g",
        ModelKind::Dwp => "gp",
    }
}

fn model_spec(kind: ModelKind, n: usize, cfg: &IntegratorConfig) -> Result<ModelSpec> {
    match kind {
        ModelKind::Aho => ModelSpec::aho(n),
        ModelKind::Dwp => ModelSpec::dwp(n, cfg),
    }
    .with_context(|| format!("models: building the {} model with N={n}", kind.name()))
}

fn solve(kind: ModelKind, n: usize, g: &[f64], cfg: &IntegratorConfig) -> Result<Solution> {
    let spec = model_spec(kind, n, cfg)?;
    Solution::solve(spec, g, cfg).with_context(|| {
        format!(
            "flow solver: model {}, N={n}, {}={g:?}, rtol={:e}, atol={:e}",
            kind.name(),
            coupling_name(kind),
            cfg.rel_tol,
            cfg.abs_tol
        )
    })
}

fn common_meta(t: &mut Table, kind: ModelKind, common: &CommonArgs, cfg: &IntegratorConfig) {
    t.meta(format!("model {}", kind.name()));
    t.meta(format!("N {}", common.n_states));
    t.meta(format!(
        "rtol {:e} atol {:e} max_step {} initial_step {}",
        cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.initial_step
    ));
}

pub fn spectrum(kind: ModelKind, a: &SpectrumArgs) -> Result<Outcome> {
    let n = a.common.n_states;
    check_n(n)?;
    check_levels(&a.levels, n, "--levels")?;
    let g = a.couplings.values()?;
    let cfg = a.common.integrator.config()?;
    let table = solve(kind, n, &g, &cfg)?.spectrum(&a.levels)?;

    let mut t = Table::new(&[coupling_name(kind), "level", "energy"]);
    common_meta(&mut t, kind, &a.common, &cfg);
    for (g, level, e) in table.rows() {
        t.push(vec![format!("{g}"), level.to_string(), sig(e)]);
    }
    t.emit(a.common.format, a.common.output.as_deref())?;
    Ok(Outcome::Done)
}

pub fn nonadiabatic(a: &NonadiabaticArgs) -> Result<Outcome> {
    let n = a.common.n_states;
    check_n(n)?;
    check_levels(&a.levels, n, "--levels")?;
    check_levels(&[a.init_level], n, "--init-level")?;
    if !a.ramp_rate.is_finite() || a.ramp_rate <= 0.0 {
        bail!("--v: ramp rate must be positive and finite, got {}", a.ramp_rate);
    }
    if !a.g_max.is_finite() || a.g_max <= 0.0 {
        bail!("--g-max: must be positive and finite, got {}", a.g_max);
    }
    if a.samples < 2 {
        bail!("--samples: need at least 2, got {}", a.samples);
    }
    let kind = ModelKind::from(a.model);
    let integrator = a.common.integrator.config()?;
    let cfg = NonadiabaticConfig {
        integrator,
        phase_levels: a.phase_levels,
    };
    let spec = model_spec(kind, n, &cfg.integrator)?;
    let samples = linspace(0.0, a.g_max, a.samples);
    let traj = evolve_ramp(&spec, a.ramp_rate, a.g_max, a.init_level, &samples, &cfg).with_context(|| {
        format!(
            "nonadiabatic ramp: model {}, N={n}, v={}, window [0, {}], init level {}",
            kind.name(),
            a.ramp_rate,
            a.g_max,
            a.init_level
        )
    })?;

    let mut t = Table::new(&[coupling_name(kind), "t", "level", "probability", "phase"]);
    common_meta(&mut t, kind, &a.common, &cfg.integrator);
    t.meta(format!(
        "ramp v {} window [0, {}] init_level {} phase_levels {}",
        a.ramp_rate, a.g_max, a.init_level, a.phase_levels
    ));
    t.meta(format!("unitarity drift {:.3e}", traj.unitarity_drift()));
    for s in &traj.samples {
        let p = s.probabilities();
        for &level in &a.levels {
            t.push(vec![
                format!("{}", s.g),
                sig(s.t),
                level.to_string(),
                sig(p[level]),
                sig(s.phases()[level]),
            ]);
        }
    }
    t.emit(a.common.format, a.common.output.as_deref())?;
    Ok(Outcome::Done)
}

pub fn density(a: &DensityArgs) -> Result<Outcome> {
    let n = a.common.n_states;
    check_n(n)?;
    check_levels(&a.levels, n, "--levels")?;
    let g = a.coupling()?;
    let x = a.grid.values()?;
    if x.len() < 2 {
        bail!("--x: a density needs at least two grid points");
    }
    let kind = ModelKind::from(a.model);
    let cfg = a.common.integrator.config()?;
    let sol = solve(kind, n, &[g], &cfg)?;

    let mut t = Table::new(&["x", "level", "density"]);
    common_meta(&mut t, kind, &a.common, &cfg);
    t.meta(format!("{} {g}", coupling_name(kind)));
    let mut columns = Vec::with_capacity(a.levels.len());
    for &level in &a.levels {
        let d = sol
            .density(level, g, &x)
            .with_context(|| format!("models: density of level {level} at {}={g}", coupling_name(kind)))?;
        if d.grid_too_narrow {
            t.meta(format!(
                "warning: level {level} has trapezoid norm {:.6} on this grid (too narrow or too coarse)",
                d.raw_norm
            ));
        }
        columns.push((level, d));
    }
    for (level, d) in &columns {
        for (xi, v) in d.x.iter().zip(&d.values) {
            t.push(vec![format!("{xi}"), level.to_string(), sig(*v)]);
        }
    }
    t.emit(a.common.format, a.common.output.as_deref())?;
    Ok(Outcome::Done)
}

pub fn potential(a: &PotentialArgs) -> Result<Outcome> {
    let x = a.grid.values()?;
    if a.gp.iter().any(|g| !g.is_finite()) {
        bail!("--gp: values must be finite");
    }
    let labels: Vec<String> = a.gp.iter().map(|g| format!("V(gp={g})")).collect();
    let mut header = vec!["x"];
    header.extend(labels.iter().map(String::as_str));
    let mut t = Table::new(&header);
    t.meta("V(x) = x^2/2 + x^4/2 - gp x^2");
    let curves: Vec<Vec<f64>> = a.gp.iter().map(|&g| potential_curve(g, &x)).collect();
    for (k, xi) in x.iter().enumerate() {
        let mut row = vec![format!("{xi}")];
        row.extend(curves.iter().map(|c| sig(c[k])));
        t.push(row);
    }
    t.emit(a.format, a.output.as_deref())?;
    Ok(Outcome::Done)
}

pub fn validate(a: &ValidateArgs) -> Result<Outcome> {
    let n = a.common.n_states;
    check_n(n)?;
    if a.threshold.is_nan() || a.threshold <= 0.0 {
        bail!("--threshold: must be positive, got {}", a.threshold);
    }
    let kind = ModelKind::from(a.model);
    let cfg = a.common.integrator.config()?;
    let name = coupling_name(kind);

    let (mut t, worst) = if a.table {
        let reference = reference_table(kind);
        let g = table_couplings(&reference);
        let sol = solve(kind, n, &g, &cfg)?;
        let mut t = Table::new(&[name, "level", "flow", "table_flow", "table_reference", "rel_diff"]);
        common_meta(&mut t, kind, &a.common, &cfg);
        t.meta("comparison: bundled table, relative to the tabulated flow value");
        let mut worst = 0.0_f64;
        for r in &reference {
            let state = sol.state_at(r.g).expect("solved at every table coupling");
            let e = state.energies[r.level];
            let rel = (e - r.flow).abs() / r.flow.abs();
            worst = worst.max(rel);
            t.push(vec![
                format!("{}", r.g),
                r.level.to_string(),
                sig(e),
                sig(r.flow),
                sig(r.reference),
                format!("{rel:.3e}"),
            ]);
        }
        (t, worst)
    } else {
        let Some(g) = a.g.clone() else {
            bail!("--g: give coupling values, or use --table");
        };
        check_couplings(&g)?;
        let sol = solve(kind, n, &g, &cfg)?;
        let mut t = Table::new(&[name, "level", "flow", "oracle", "abs_diff"]);
        common_meta(&mut t, kind, &a.common, &cfg);
        t.meta("comparison: Jacobi diagonalization, both spectra sorted ascending");
        let mut worst = 0.0_f64;
        for (gk, state) in g.iter().zip(&sol.states) {
            let oracle = oracle_spectrum(kind, *gk, n)
                .with_context(|| format!("oracle: diagonalizing {} at {name}={gk}, N={n}", kind.name()))?;
            let mut flow = state.energies.clone();
            flow.sort_by(f64::total_cmp);
            for (level, (f, o)) in flow.iter().zip(&oracle).enumerate() {
                let d = (f - o).abs();
                worst = worst.max(d);
                t.push(vec![format!("{gk}"), level.to_string(), sig(*f), sig(*o), format!("{d:.3e}")]);
            }
        }
        (t, worst)
    };

    let pass = worst <= a.threshold;
    t.meta(format!(
        "max deviation {worst:.3e} threshold {:e} {}",
        a.threshold,
        if pass { "PASS" } else { "FAIL" }
    ));
    t.emit(a.common.format, a.common.output.as_deref())?;
    if !pass {
        eprintln!(
            "validation failed: max deviation {worst:.3e} exceeds threshold {:e}",
            a.threshold
        );
    }
    Ok(if pass { Outcome::Done } else { Outcome::ValidationFailed })
}
