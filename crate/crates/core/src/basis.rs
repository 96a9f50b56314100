//! Harmonic-oscillator basis (m = ω = ħ = 1).
//!
//! Matrix elements of `x^p` come from the ladder-operator expansion
//! `x = (a + a†)/√2`, so they are exact closed forms with `|i - j| <= p`.
//! Operators are the `N × N` top-left block of the infinite matrices; the
//! last few rows are therefore not the truncation of a product (e.g.
//! `X₂·X₂ ≠ X₄` near the edge).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Truncation of the harmonic basis plus an optional position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisConfig {
    n_states: usize,
    x_grid: Option<Vec<f64>>,
}

impl BasisConfig {
    pub fn new(n_states: usize) -> Result<Self> {
        if n_states < 2 {
            return Err(Error::InvalidArgument(format!(
                "basis needs at least 2 states, got {n_states}"
            )));
        }
        Ok(Self {
            n_states,
            x_grid: None,
        })
    }

    pub fn with_grid(mut self, x_grid: Vec<f64>) -> Result<Self> {
        if !x_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "x grid must be strictly increasing".into(),
            ));
        }
        if x_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("x grid must be finite".into()));
        }
        self.x_grid = Some(x_grid);
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn x_grid(&self) -> Option<&[f64]> {
        self.x_grid.as_deref()
    }
}

/// `E_i = i + 1/2` for `i < N`.
pub fn harmonic_energies(config: &BasisConfig) -> Vec<f64> {
    (0..config.n_states).map(|i| i as f64 + 0.5).collect()
}

/// `⟨i|x^power|j⟩` for `i, j < N`.
pub fn x_power_matrix(power: u32, config: &BasisConfig) -> Result<SymMatrix> {
    let element: fn(usize, usize) -> f64 = match power {
        1 => x1_element,
        2 => x2_element,
        4 => x4_element,
        p => return Err(Error::UnsupportedPower(p)),
    };
    Ok(SymMatrix::from_upper_fn(config.n_states, element))
}

// All three take i <= j.

fn x1_element(i: usize, j: usize) -> f64 {
    if j == i + 1 {
        (j as f64 / 2.0).sqrt()
    } else {
        0.0
    }
}

fn x2_element(i: usize, j: usize) -> f64 {
    let n = i as f64;
    match j - i {
        0 => n + 0.5,
        2 => 0.5 * ((n + 1.0) * (n + 2.0)).sqrt(),
        _ => 0.0,
    }
}

fn x4_element(i: usize, j: usize) -> f64 {
    let n = i as f64;
    match j - i {
        0 => (6.0 * n * n + 6.0 * n + 3.0) / 4.0,
        2 => (n + 1.5) * ((n + 1.0) * (n + 2.0)).sqrt(),
        4 => 0.25 * ((n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0)).sqrt(),
        _ => 0.0,
    }
}

/// Normalized Hermite function `φ_j(x)`.
pub fn hermite_function(j: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for n in 0..j {
        let nf = n as f64;
        let next = x * (2.0 / (nf + 1.0)).sqrt() * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[φ_0(x), …, φ_{n-1}(x)]` in one pass of the recurrence.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    let mut prev = 0.0;
    for k in 0..n - 1 {
        let kf = k as f64;
        let cur = out[k];
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_hermite;
    use approx::assert_abs_diff_eq;

    fn cfg(n: usize) -> BasisConfig {
        BasisConfig::new(n).unwrap()
    }

    /// `⟨i|x^p|j⟩` by explicitly applying `(a + a†)/√2` p times to |j⟩.
    fn ladder_oracle(p: u32, i: usize, j: usize) -> f64 {
        let len = i.max(j) + p as usize + 2;
        let mut v = vec![0.0; len];
        v[j] = 1.0;
        for _ in 0..p {
            let mut w = vec![0.0; len];
            for (k, &c) in v.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                if k + 1 < len {
                    w[k + 1] += c * ((k + 1) as f64).sqrt();
                }
                if k > 0 {
                    w[k - 1] += c * (k as f64).sqrt();
                }
            }
            v = w.into_iter().map(|c| c / 2f64.sqrt()).collect();
        }
        v[i]
    }

    #[test]
    fn harmonic_energy_examples() {
        assert_eq!(harmonic_energies(&cfg(3)), vec![0.5, 1.5, 2.5]);
        assert_eq!(harmonic_energies(&cfg(2)), vec![0.5, 1.5]);
        assert_eq!(*harmonic_energies(&cfg(50)).last().unwrap(), 49.5);
    }

    #[test]
    fn config_validation() {
        assert!(BasisConfig::new(1).is_err());
        assert!(cfg(4).with_grid(vec![0.0, 0.0]).is_err());
        assert!(cfg(4).with_grid(vec![-1.0, 0.0, 2.0]).is_ok());
    }

    #[test]
    fn matrix_element_examples() {
        let x2 = x_power_matrix(2, &cfg(6)).unwrap();
        let x4 = x_power_matrix(4, &cfg(6)).unwrap();
        assert_abs_diff_eq!(x2[(0, 0)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(x4[(0, 0)], 0.75, epsilon = 1e-15);
        assert_eq!(x4[(0, 1)], 0.0);
        assert_abs_diff_eq!(x4[(0, 2)], 3.0 * 2f64.sqrt() / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn unsupported_power() {
        assert_eq!(
            x_power_matrix(3, &cfg(4)).unwrap_err(),
            Error::UnsupportedPower(3)
        );
    }

    #[test]
    fn agrees_with_ladder_paths() {
        for p in [1, 2, 4] {
            let m = x_power_matrix(p, &cfg(20)).unwrap();
            for i in 0..20 {
                for j in 0..20 {
                    assert_abs_diff_eq!(m[(i, j)], ladder_oracle(p, i, j), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn selection_rules() {
        for p in [1u32, 2, 4] {
            let m = x_power_matrix(p, &cfg(30)).unwrap();
            for i in 0..30 {
                for j in 0..30 {
                    if (i + j + p as usize) % 2 == 1 || i.abs_diff(j) > p as usize {
                        assert_eq!(m[(i, j)], 0.0, "p={p} ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn x4_matches_quadrature() {
        // Orthonormal Hermite polynomials at the nodes, weight e^{-x²} carried by w.
        let (nodes, weights) = gauss_hermite(200);
        let n = 30;
        let polys: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&x| {
                let mut out = vec![PI.powf(-0.25)];
                let mut prev = 0.0;
                for k in 0..n - 1 {
                    let kf = k as f64;
                    let next =
                        x * (2.0 / (kf + 1.0)).sqrt() * out[k] - (kf / (kf + 1.0)).sqrt() * prev;
                    prev = out[k];
                    out.push(next);
                }
                out
            })
            .collect();
        let x4 = x_power_matrix(4, &cfg(n)).unwrap();
        for i in 0..n {
            for j in 0..n {
                let q: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .zip(&polys)
                    .map(|((x, w), p)| w * x.powi(4) * p[i] * p[j])
                    .sum();
                assert_abs_diff_eq!(x4[(i, j)], q, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn x2_squared_matches_x4_away_from_edge() {
        let n = 20;
        let x2 = x_power_matrix(2, &cfg(n)).unwrap();
        let x4 = x_power_matrix(4, &cfg(n)).unwrap();
        let sq = x2.as_matrix().matmul(x2.as_matrix());
        for i in 0..=n - 5 {
            for j in 0..=n - 5 {
                assert_abs_diff_eq!(sq[(i, j)], x4[(i, j)], epsilon = 1e-10);
            }
        }
        // The truncation edge is not a product of truncations.
        assert!((sq[(n - 1, n - 1)] - x4[(n - 1, n - 1)]).abs() > 1.0);
    }

    #[test]
    fn hermite_function_values() {
        assert_abs_diff_eq!(hermite_function(0, 0.0), PI.powf(-0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(hermite_function(0, 0.0), 0.7511255, epsilon = 1e-7);
        assert_eq!(hermite_function(1, 0.0), 0.0);
        let all = hermite_functions(8, 1.3);
        for (j, v) in all.iter().enumerate() {
            assert_eq!(*v, hermite_function(j, 1.3));
        }
    }

    #[test]
    fn hermite_functions_orthonormal() {
        let (nodes, weights) = gauss_hermite(60);
        for i in 0..6 {
            for j in 0..6 {
                let q: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&x, w)| w * (x * x).exp() * hermite_function(i, x) * hermite_function(j, x))
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(q, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn hermite_function_stays_finite() {
        for j in 0..=60 {
            for k in -100..=100 {
                let x = k as f64 / 10.0;
                assert!(hermite_function(j, x).is_finite());
                assert!(hermite_function(j, x).abs() < 1.0);
            }
        }
    }

    #[test]
    fn hermite_function_ode_residual() {
        let h = 1e-4;
        for j in [0usize, 1, 3, 7, 12] {
            for k in -40..=40 {
                let x = k as f64 * 0.1;
                let second = (hermite_function(j, x + h) - 2.0 * hermite_function(j, x)
                    + hermite_function(j, x - h))
                    / (h * h);
                let residual = second + (2.0 * j as f64 + 1.0 - x * x) * hermite_function(j, x);
                assert!(residual.abs() < 1e-6, "j={j} x={x} residual={residual}");
            }
        }
    }
}
