use std::f64::consts::PI;

use serde::Serialize;

use super::MathError;

/// Largest supported Gauss-Hermite order.
pub const MAX_ORDER: usize = 200;

/// Default per-axis order for gate integrals; certification doubles it.
pub const DEFAULT_ORDER: usize = 48;

/// Gauss-Hermite rule for the weight `e^{-x²}` on the real line.
///
/// Nodes are ascending and symmetric about zero; weights sum to `√π`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `∫ f(x) e^{-x²} dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Nodes and weights mapped onto the unit-mass normal density
    /// `N(mean, std²)`: `E[f] ≈ Σ w_i f(x_i)` with `Σ w_i = 1`.
    pub fn normal_points(&self, mean: f64, std: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let scale = std::f64::consts::SQRT_2 * std;
        let norm = 1.0 / PI.sqrt();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mean + scale * x, w * norm))
    }
}

/// Builds the `order`-point Gauss-Hermite rule.
///
/// Nodes come from Newton iteration on the orthonormal Hermite recurrence,
/// started from the eigenvalues of the Jacobi matrix. Weights are `2 / p'_n(x_i)²` in the orthonormal
/// normalization, which avoids factorials at every order up to
/// [`MAX_ORDER`].
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule, MathError> {
    if order == 0 || order > MAX_ORDER {
        return Err(MathError::OrderOutOfRange(order));
    }
    let n = order;
    let pim4 = PI.powf(-0.25);
    let half = n.div_ceil(2);
    let guesses = jacobi_eigenvalues(n);
    let mut roots = vec![0.0; half];
    let mut weights = vec![0.0; half];

    for i in 0..half {
        // eigenvalues ascend; roots[i] is the i-th largest
        let mut z = guesses[n - 1 - i];
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = orthonormal_with_derivative(n, z, pim4);
            let step = p / dp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged || !z.is_finite() {
            return Err(MathError::NodeNotConverged { order, index: i });
        }
        let (_, dp) = orthonormal_with_derivative(n, z, pim4);
        roots[i] = z;
        weights[i] = 2.0 / (dp * dp);
    }

    if n % 2 == 1 {
        // the middle root is exactly zero by symmetry
        roots[half - 1] = 0.0;
        let (_, dp) = orthonormal_with_derivative(n, 0.0, pim4);
        weights[half - 1] = 2.0 / (dp * dp);
    }

    let mut nodes = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for i in 0..half {
        nodes.push(-roots[i]);
        ws.push(weights[i]);
    }
    let start = if n % 2 == 1 { half - 1 } else { half };
    for i in (0..start).rev() {
        nodes.push(roots[i]);
        ws.push(weights[i]);
    }
    Ok(QuadratureRule {
        order,
        nodes,
        weights: ws,
    })
}

/// Eigenvalues of the symmetric tridiagonal Jacobi matrix of the Hermite
/// recurrence, ascending. They are accurate to a few ulps of the largest
/// node, which is plenty as Newton starting points.
fn jacobi_eigenvalues(n: usize) -> Vec<f64> {
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        m[(k, k - 1)] = b;
        m[(k - 1, k)] = b;
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Orthonormal Hermite polynomial `p̃_n(z)` (w.r.t. `e^{-z²}`) and its
/// derivative `√(2n) p̃_{n-1}(z)`.
fn orthonormal_with_derivative(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// `∫ x^d e^{-x²} dx` for even `d`, via Γ((d+1)/2) built up exactly.
    fn even_moment(d: usize) -> f64 {
        let mut m = PI.sqrt();
        for k in 0..d / 2 {
            m *= (2 * k + 1) as f64 / 2.0;
        }
        m
    }

    #[test]
    fn small_orders() {
        let r1 = gauss_hermite_rule(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert_relative_eq!(r1.weights[0], PI.sqrt(), max_relative = 1e-15);

        let r2 = gauss_hermite_rule(2).unwrap();
        let root = 1.0 / 2f64.sqrt();
        assert_relative_eq!(r2.nodes[0], -root, max_relative = 1e-15);
        assert_relative_eq!(r2.nodes[1], root, max_relative = 1e-15);
    }

    #[test]
    fn order_bounds() {
        assert_eq!(gauss_hermite_rule(0), Err(MathError::OrderOutOfRange(0)));
        assert_eq!(gauss_hermite_rule(201), Err(MathError::OrderOutOfRange(201)));
        assert!(gauss_hermite_rule(200).is_ok());
    }

    #[test]
    fn second_moment_every_order() {
        for order in 2..=MAX_ORDER {
            let rule = gauss_hermite_rule(order).unwrap();
            let m2 = rule.integrate(|x| x * x);
            assert_relative_eq!(m2, PI.sqrt() / 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn structure_and_node_residuals() {
        let pim4 = PI.powf(-0.25);
        for order in 1..=MAX_ORDER {
            let rule = gauss_hermite_rule(order).unwrap();
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]), "order {order}");
            for i in 0..order {
                assert_eq!(rule.nodes[i], -rule.nodes[order - 1 - i]);
                assert_eq!(rule.weights[i], rule.weights[order - 1 - i]);
                assert!(rule.weights[i] > 0.0);
            }
            let total: f64 = rule.weights.iter().sum();
            assert_relative_eq!(total, PI.sqrt(), max_relative = 1e-12);
            // |H_n(x_i)| <= 1e-10 |H_n'(x_i)|, checked in the orthonormal scaling
            for &x in &rule.nodes {
                let (p, dp) = orthonormal_with_derivative(order, x, pim4);
                assert!(p.abs() <= 1e-10 * dp.abs(), "order {order} node {x}");
            }
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in 1..=60 {
            let rule = gauss_hermite_rule(n).unwrap();
            for d in 0..=(2 * n - 1) {
                let q = rule.integrate(|x| x.powi(d as i32));
                if d % 2 == 1 {
                    assert!(q.abs() <= 1e-12 * even_moment(d + 1).max(1.0), "n={n} d={d} q={q}");
                } else {
                    let exact = even_moment(d);
                    assert!(
                        ((q - exact) / exact).abs() <= 1e-12,
                        "n={n} d={d} q={q} exact={exact}"
                    );
                }
            }
        }
    }
}
