use crate::error::Error;

/// Gauss–Legendre rule mapped to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

impl GaussLegendre {
    pub fn new(n: usize) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("quadrature needs at least 2 nodes, got {n}")));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut converged = false;
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    converged = true;
                    break;
                }
            }
            if !converged || !x.is_finite() {
                return Err(Error::Domain(format!("Newton iteration for node {i} of {n} did not converge")));
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Symmetric pair on [-1, 1], mapped to [0, 1].
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
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
    fn integrates_polynomials_exactly() {
        let q = GaussLegendre::new(8).unwrap();
        for k in 0..16 {
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((q.integrate(|x| x.powi(k)) - exact).abs() < 1e-14, "x^{k}");
        }
        assert!((q.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exponential() {
        let q = GaussLegendre::new(64).unwrap();
        let exact = 1.0 - (-1.0f64).exp();
        assert!((q.integrate(|x| (-x).exp()) - exact).abs() < 1e-15);
        assert!(q.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn odd_order_has_midpoint() {
        let q = GaussLegendre::new(5).unwrap();
        assert!((q.nodes[2] - 0.5).abs() < 1e-15);
        assert!(GaussLegendre::new(1).is_err());
    }
}
