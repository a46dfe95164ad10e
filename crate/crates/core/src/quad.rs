//! One-dimensional Gauss rules used as integration oracles and as the
//! production path for cross-center flow-out integrals.
//!
//! Radial integrals over `S^d` reduce to `vol(S^{d-1}) *
//! int_{-1}^{1} f(s) (1 - s^2)^{(d-2)/2} ds`; the weight is 1 for `d = 2`
//! (Gauss-Legendre) and `sqrt(1 - s^2)` for `d = 3` (Gauss-Chebyshev of the
//! second kind), so both rules integrate polynomial radial profiles exactly.

use crate::error::{Error, Result};
use crate::geometry::sphere_volume;

/// Nodes and weights of a quadrature rule on `[-1, 1]` (weight function
/// folded into the weights).
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affine image of the rule on `[a, b]` (only meaningful for rules with
    /// unit weight function).
    pub fn mapped(&self, a: f64, b: f64) -> Quadrature {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        Quadrature {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`, nodes by Newton iteration on
/// the Legendre recurrence; exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Quadrature {
    assert!(n >= 1, "empty quadrature rule");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess; the cos argument starts near +1
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Quadrature { nodes, weights }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// `n`-point Gauss rule for the weight `sqrt(1 - x^2)` on `[-1, 1]`
/// (Chebyshev polynomials of the second kind); closed-form nodes.
pub fn chebyshev_second_kind(n: usize) -> Quadrature {
    assert!(n >= 1, "empty quadrature rule");
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for j in (1..=n).rev() {
        let t = j as f64 * std::f64::consts::PI / (n as f64 + 1.0);
        nodes.push(t.cos());
        weights.push(std::f64::consts::PI / (n as f64 + 1.0) * t.sin() * t.sin());
    }
    Quadrature { nodes, weights }
}

/// Rule integrating radial functions over `S^d`:
/// `int_{S^d} f(cos r) dsigma = sum_j w_j f(s_j)` with the surface factor
/// `vol(S^{d-1})` and the latitude weight `(1 - s^2)^{(d-2)/2}` folded in.
/// Supported for `d in {2, 3}` where the weight matches a classical rule.
pub fn radial_rule(d: u32, n: usize) -> Result<Quadrature> {
    let equator = sphere_volume(
        d.checked_sub(1)
            .ok_or_else(|| Error::InvalidArgument("radial rule needs d >= 1".into()))?,
    );
    let mut rule = match d {
        2 => gauss_legendre(n),
        3 => chebyshev_second_kind(n),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "radial quadrature is implemented for d in {{2, 3}}, got {d}"
            )))
        }
    };
    for w in &mut rule.weights {
        *w *= equator;
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_exact_on_polynomials() {
        let rule = gauss_legendre(8);
        // int x^k on [-1,1]
        for k in 0..=15u32 {
            let got = rule.integrate(|x| x.powi(k as i32));
            let want = if k % 2 == 0 {
                2.0 / (k as f64 + 1.0)
            } else {
                0.0
            };
            assert!((got - want).abs() < 1e-14, "k = {k}");
        }
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_five_point_reference_nodes() {
        let rule = gauss_legendre(5);
        let want = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683_1,
            0.0,
            0.538_469_310_105_683_1,
            0.906_179_845_938_664,
        ];
        for (got, want) in rule.nodes.iter().zip(want) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn mapped_rule_integrates_trig() {
        let rule = gauss_legendre(60).mapped(0.0, PI);
        assert!((rule.integrate(f64::sin) - 2.0).abs() < 1e-13);
        assert!((rule.integrate(|t| (t.cos()).powi(2)) - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn chebyshev_second_kind_moments() {
        let rule = chebyshev_second_kind(12);
        // int sqrt(1-x^2) dx = pi/2 ; int x^2 sqrt(1-x^2) dx = pi/8
        assert!((rule.integrate(|_| 1.0) - PI / 2.0).abs() < 1e-14);
        assert!((rule.integrate(|x| x * x) - PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn radial_rules_recover_sphere_volumes() {
        for d in [2u32, 3] {
            let rule = radial_rule(d, 40).unwrap();
            let vol = rule.integrate(|_| 1.0);
            assert!((vol - sphere_volume(d)).abs() < 1e-12 * sphere_volume(d));
        }
        assert!(radial_rule(5, 10).is_err());
    }
}
