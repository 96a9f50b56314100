//! Gauss–Hermite quadrature for the weight `e^{-x²}`.
//!
//! Used as an independent check on the closed-form matrix elements in
//! [`crate::basis`]; the solver itself never integrates numerically over x.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Hermite rule, nodes ascending.
///
/// Positive roots are bracketed by a sign scan of the Hermite function
/// `φ_n` (bounded, so no overflow) and refined by bisection. Weights use
/// the orthonormal recurrence, so no factorials appear and `n` in the
/// hundreds is fine. The rule integrates `p(x)·e^{-x²}` exactly for
/// polynomials of degree below `2n`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let phi_n = |x: f64| orthonormal_pair(n, x, pim4).0 * (-0.5 * x * x).exp();

    // Roots lie below sqrt(2n + 1); neighbours are at least ~π/sqrt(2n + 1) apart.
    let x_end = (2.0 * nf + 1.0).sqrt() + 1.0;
    let dx = 0.05 / (2.0 * nf + 1.0).sqrt();
    let mut positive = Vec::with_capacity(n / 2);
    let mut lo = if n % 2 == 1 { dx } else { 0.0 };
    let mut f_lo = phi_n(lo);
    while lo < x_end && positive.len() < n / 2 {
        let hi = lo + dx;
        let f_hi = phi_n(hi);
        if f_lo == 0.0 {
            positive.push(lo);
        } else if f_lo.signum() != f_hi.signum() {
            let (mut a, mut b, fa) = (lo, hi, f_lo);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if phi_n(mid).signum() == fa.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            positive.push(0.5 * (a + b));
        }
        lo = hi;
        f_lo = f_hi;
    }
    assert_eq!(positive.len(), n / 2, "root scan missed a root");

    let weight = |z: f64| {
        let (_, p2) = orthonormal_pair(n, z, pim4);
        let pp = (2.0 * nf).sqrt() * p2;
        2.0 / (pp * pp)
    };
    let mut nodes: Vec<f64> = positive.iter().rev().map(|z| -z).collect();
    if n % 2 == 1 {
        nodes.push(0.0);
    }
    nodes.extend(positive.iter().copied());
    let weights = nodes.iter().map(|&z| weight(z)).collect();
    (nodes, weights)
}

/// Returns `(h_n(z), h_{n-1}(z))` of the orthonormal Hermite polynomials
/// (without the Gaussian factor).
fn orthonormal_pair(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}
