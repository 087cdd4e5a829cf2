//! Gauss–Legendre rules and composite rules on uniform grids.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule of the given order, nodes in ascending order.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `∫_{-1}^{1} f(s) ds`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `∫_a^b f(s) ds` by affine mapping.
    pub fn integrate_on<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self.integrate(|s| f(mid + half * s))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Simpson rule on uniformly spaced samples.
///
/// An even number of intervals is integrated by Simpson; if the count is odd
/// the final interval is closed with the trapezoid rule.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    let mut acc = 0.0;
    if even >= 2 {
        acc += values[0] + values[even];
        for (i, v) in values.iter().enumerate().take(even).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc *= h / 3.0;
    }
    if even < intervals {
        acc += 0.5 * h * (values[n - 2] + values[n - 1]);
    }
    acc
}

/// Weights of [`simpson_uniform`] for `n` samples, so that the rule can be
/// applied to many integrands sharing the abscissae.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    if even >= 2 {
        for (i, wi) in w.iter_mut().enumerate().take(even + 1) {
            *wi = if i == 0 || i == even {
                h / 3.0
            } else if i % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            };
        }
    }
    if even < intervals {
        w[n - 2] += 0.5 * h;
        w[n - 1] += 0.5 * h;
    }
    w
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}
