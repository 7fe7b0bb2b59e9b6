//! Gauss-Hermite quadrature.
//!
//! Nodes and weights for integrals of the form
//!
//! ```text
//!   integral over (-inf, inf) of e^(-t^2) f(t) dt  =  sum_i w_i f(t_i)
//! ```
//!
//! Nodes are the roots of the physicists' Hermite polynomial H_n, found by
//! Newton iteration on the orthonormal three-term recurrence; weights follow
//! from the derivative at the root. A rule of degree n integrates
//! polynomials up to degree 2n-1 exactly.

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds an n-point rule. Panics if `n` is 0.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature degree must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];

        let half = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0;
        for i in 0..half {
            // Initial guesses for the roots in decreasing order.
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut deriv = 0.0;
            for _ in 0..200 {
                // Orthonormal Hermite recurrence:
                // p_j(z) = z*sqrt(2/j)*p_{j-1}(z) - sqrt((j-1)/j)*p_{j-2}(z)
                let mut p1 = PI.powf(-0.25);
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                deriv = (2.0 * nf).sqrt() * p2;
                let step = p1 / deriv;
                z -= step;
                if step.abs() <= 1e-15 * (1.0 + z.abs()) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (deriv * deriv);
            weights[n - 1 - i] = weights[i];
        }

        GaussHermite { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature of e^(-t^2) * f(t) over the real line.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_rule_matches_reference_values() {
        let rule = GaussHermite::new(3);
        let nodes_ref = [1.224_744_871_391_589, 0.0, -1.224_744_871_391_589];
        let weights_ref = [
            0.295_408_975_150_919_35,
            1.181_635_900_603_677_4,
            0.295_408_975_150_919_35,
        ];
        for (got, want) in rule.nodes().iter().zip(nodes_ref) {
            assert!((got - want).abs() < 1e-14, "node {got} vs {want}");
        }
        for (got, want) in rule.weights().iter().zip(weights_ref) {
            assert!((got - want).abs() < 1e-14, "weight {got} vs {want}");
        }
    }

    #[test]
    fn integrates_low_moments_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let rule = GaussHermite::new(n);
            assert!((rule.integrate(|_| 1.0) - PI.sqrt()).abs() < 1e-13, "n={n}");
            if n >= 2 {
                assert!(
                    (rule.integrate(|t| t * t) - PI.sqrt() / 2.0).abs() < 1e-13,
                    "n={n}"
                );
            }
            assert!(rule.integrate(|t| t).abs() < 1e-13, "n={n} odd moment");
        }
    }

    #[test]
    fn sixty_four_point_rule_handles_smooth_integrands() {
        // integral e^(-t^2) cos(t) dt = sqrt(pi) * e^(-1/4)
        let rule = GaussHermite::new(64);
        let want = PI.sqrt() * (-0.25f64).exp();
        assert!((rule.integrate(|t| t.cos()) - want).abs() < 1e-13);
    }

    #[test]
    fn weights_are_positive_and_nodes_symmetric() {
        let rule = GaussHermite::new(64);
        assert!(rule.weights().iter().all(|&w| w > 0.0));
        for i in 0..rule.len() {
            let mirrored = rule.nodes()[rule.len() - 1 - i];
            assert!((rule.nodes()[i] + mirrored).abs() < 1e-14);
        }
    }
}
