use coupling_flow::models::linspace;
use coupling_flow::nonadiabatic::{evolve_ramp, NonadiabaticConfig};
use coupling_flow::{IntegratorConfig, ModelSpec, Solution};

fn dwp(n: usize) -> ModelSpec {
    ModelSpec::dwp(n, &IntegratorConfig::default()).unwrap()
}

#[test]
fn near_sudden_ramp_matches_overlaps() {
    let model = dwp(50);
    let cfg = NonadiabaticConfig::default();
    let traj = evolve_ramp(&model, 1000.0, 2.0, 0, &[1.0, 2.0], &cfg).unwrap();
    let pure = Solution::solve(model, &[2.0], &IntegratorConfig::default()).unwrap();
    let c = &pure.states[0].overlaps;
    let p = traj.last().probabilities();
    for n in 0..50 {
        assert!((p[n] - c[(n, 0)].powi(2)).abs() < 0.05, "level {n}");
    }
}

#[test]
fn leakage_grows_with_ramp_rate() {
    let model = dwp(30);
    let cfg = NonadiabaticConfig::default();
    let mut prev = -1.0;
    for v in [0.1, 1.0, 3.0, 30.0, 1000.0] {
        let traj = evolve_ramp(&model, v, 6.0, 0, &[], &cfg).unwrap();
        let leak = 1.0 - traj.last().probabilities()[0];
        assert!(leak >= prev, "v = {v}: leakage {leak} below {prev}");
        assert!(traj.unitarity_drift() < 1e-6);
        prev = leak;
    }
}

#[test]
fn even_start_never_populates_odd_levels() {
    let model = dwp(24);
    let cfg = NonadiabaticConfig::default();
    let traj = evolve_ramp(&model, 2.0, 4.0, 2, &linspace(0.0, 4.0, 41), &cfg).unwrap();
    for s in &traj.samples {
        for (n, a) in s.state.amplitudes.iter().enumerate() {
            if n % 2 == 1 {
                assert!(a.norm() < 1e-12);
            }
        }
    }
}

#[test]
fn slow_ramp_is_adiabatic_on_aho() {
    let model = ModelSpec::aho(16).unwrap();
    let traj = evolve_ramp(&model, 0.05, 1.0, 0, &linspace(0.0, 1.0, 11), &NonadiabaticConfig::default()).unwrap();
    assert!(traj.probability_series(0).iter().all(|&p| p > 0.999));
    let t: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    assert!((t[10] - 20.0).abs() < 1e-12);
}
