//! Hermite functions and Gauss–Hermite rules.
//!
//! φₙ(x) = (2ⁿ n! √π)^{-1/2} Hₙ(x) e^{-x²/2} are the position wavefunctions
//! ⟨x|n⟩ of the oscillator. They are generated by the normalized upward
//! recurrence, which never forms Hₙ or e^{x²} separately.

use std::f64::consts::PI;

/// φ₀(x) … φ_{count-1}(x).
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let phi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(phi0);
    if count == 1 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * phi0);
    for n in 1..count - 1 {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// (φ_{n-1}(x), φₙ(x)) for n ≥ 1.
fn hermite_pair(x: f64, n: usize) -> (f64, f64) {
    let mut prev = PI.powf(-0.25) * (-0.5 * x * x).exp();
    let mut cur = std::f64::consts::SQRT_2 * x * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

/// Gauss–Hermite rule with the Gaussian folded into the weights.
///
/// `nodes` are the roots of Hₙ and `weights` are wₖ e^{xₖ²}, so that
/// Σ weights[k]·f(nodes[k]) ≈ ∫ f(x) dx for f(x) = e^{-x²}·(smooth).
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let half = (n + 1) / 2;
        let mut z = 0.0;
        for i in 0..half {
            // Asymptotic starting guesses for the largest roots, walking inward.
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut deriv = 1.0;
            for _ in 0..100 {
                let (prev, cur) = hermite_pair(z, n);
                deriv = (2.0 * nf).sqrt() * prev - z * cur;
                let step = cur / deriv;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            let (prev, cur) = hermite_pair(z, n);
            deriv = if deriv.is_finite() { (2.0 * nf).sqrt() * prev - z * cur } else { deriv };
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            let w = 2.0 / (deriv * deriv);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[half - 1] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_values() {
        let x = 0.7;
        let phi = hermite_functions(x, 3);
        let g = (-x * x / 2.0).exp() * PI.powf(-0.25);
        assert!((phi[0] - g).abs() < 1e-15);
        assert!((phi[1] - g * 2f64.sqrt() * x).abs() < 1e-15);
        assert!((phi[2] - g * (2.0 * x * x - 1.0) / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn orthonormality_by_riemann_sum() {
        let count = 12;
        let h = 0.01;
        let mut gram = vec![vec![0.0; count]; count];
        let mut x = -15.0;
        while x <= 15.0 {
            let phi = hermite_functions(x, count);
            for i in 0..count {
                for j in 0..count {
                    gram[i][j] += phi[i] * phi[j] * h;
                }
            }
            x += h;
        }
        for i in 0..count {
            for j in 0..count {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - expected).abs() < 1e-10, "({i},{j})");
            }
        }
    }

    #[test]
    fn gauss_hermite_moments() {
        for n in [1, 2, 5, 20, 101, 300] {
            let gh = GaussHermite::new(n);
            let integrate = |f: &dyn Fn(f64) -> f64| -> f64 {
                gh.nodes.iter().zip(&gh.weights).map(|(x, w)| w * f(*x) * (-x * x).exp()).sum()
            };
            assert!((integrate(&|_| 1.0) - PI.sqrt()).abs() < 1e-12, "n={n}");
            if n >= 2 {
                assert!((integrate(&|x| x * x) - PI.sqrt() / 2.0).abs() < 1e-12, "n={n}");
            }
            if n >= 3 {
                assert!((integrate(&|x| x.powi(4)) - 3.0 * PI.sqrt() / 4.0).abs() < 1e-11, "n={n}");
            }
        }
    }

    #[test]
    fn gauss_hermite_oscillatory() {
        // ∫ e^{-x²} cos(kx) dx = √π e^{-k²/4}
        let gh = GaussHermite::new(80);
        let k = 6.0;
        let approx: f64 =
            gh.nodes.iter().zip(&gh.weights).map(|(x, w)| w * (k * x).cos() * (-x * x).exp()).sum();
        assert!((approx - PI.sqrt() * (-k * k / 4.0).exp()).abs() < 1e-13);
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let gh = GaussHermite::new(64);
        for w in gh.nodes.windows(2) {
            assert!(w[0] > w[1]);
        }
        for k in 0..32 {
            assert_eq!(gh.nodes[k], -gh.nodes[63 - k]);
        }
    }
}
