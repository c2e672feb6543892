//! Shared quadrature rules: Gauss-Legendre nodes by Newton iteration and
//! a product rule on the unit sphere.

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "empty quadrature rule");
    let mut rule = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess for the i-th root of P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        // Recompute the central weight cleanly at x = 0.
        let mut p0 = 1.0;
        let mut p1 = 0.0;
        for k in 2..=n {
            let kf = k as f64;
            let p2 = (-(kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (0.0 * p1 - p0) / (0.0 - 1.0);
        rule[n / 2] = (0.0, 2.0 / (dp * dp));
    }
    rule
}

/// Gauss-Legendre rule mapped onto `[a, b]`.
pub(crate) fn gauss_legendre_on(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Product rule on the unit sphere: Gauss-Legendre in `cos(theta)` times a
/// uniform (trapezoid) rule in `phi`. Weights sum to `4 pi`; the rule is
/// exact for spherical polynomials of degree up to `min(2*cos_nodes - 1,
/// phi_nodes - 1)`.
pub(crate) fn sphere_rule(cos_nodes: usize, phi_nodes: usize) -> Vec<([f64; 3], f64)> {
    assert!(cos_nodes >= 1 && phi_nodes >= 1, "empty sphere rule");
    let glc = gauss_legendre(cos_nodes);
    let wphi = 2.0 * std::f64::consts::PI / phi_nodes as f64;
    let mut rule = Vec::with_capacity(cos_nodes * phi_nodes);
    for &(c, wc) in &glc {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..phi_nodes {
            let phi = wphi * j as f64;
            rule.push(([s * phi.cos(), s * phi.sin(), c], wc * wphi));
        }
    }
    rule
}
