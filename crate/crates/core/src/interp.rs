//! Interpolation of even functions sampled on a uniform grid `x_i = i·h`.
//!
//! Radial characteristic profiles are smooth functions of `x²`, so the cubic
//! interpolant is built in the variable `u = x²` on the nodes `u_i = i²h²`.
//! Polynomials in `x` of degree up to six are then reproduced exactly, which
//! keeps the second and fourth moments (the `x²` and `x⁴` Taylor terms) free
//! of interpolation error. Slopes come from sixth-order centred differences and
//! are passed through Fritsch–Carlson limiting, so monotone data stay
//! monotone and no interval overshoots its end values.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterpKind {
    CubicMonotone,
    Linear,
}

impl std::fmt::Display for InterpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InterpKind::CubicMonotone => "cubic-monotone",
            InterpKind::Linear => "linear",
        })
    }
}

impl std::str::FromStr for InterpKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "cubic-monotone" | "cubic" => Ok(InterpKind::CubicMonotone),
            "linear" => Ok(InterpKind::Linear),
            _ => Err(crate::Error::Parse(format!("unknown interpolation `{s}`"))),
        }
    }
}

/// Interpolant over samples on `0, h, 2h, ...`.
#[derive(Debug, Clone)]
pub struct UniformInterpolant<'a> {
    values: &'a [f64],
    /// Slopes `dy/du` with `u = i²` in index units; empty for linear interpolation.
    slopes: Vec<f64>,
    last: usize,
}

impl<'a> UniformInterpolant<'a> {
    pub fn new(values: &'a [f64], kind: InterpKind) -> Self {
        assert!(values.len() >= 4, "need at least four samples");
        let slopes = match kind {
            InterpKind::CubicMonotone => monotone_slopes(values),
            InterpKind::Linear => Vec::new(),
        };
        Self {
            values,
            slopes,
            last: values.len() - 1,
        }
    }

    /// Value at fractional index `pos >= 0`. Positions past the last node are
    /// clamped to the boundary value; the second component flags the clamp.
    #[inline]
    pub fn eval_index(&self, pos: f64) -> (f64, bool) {
        if pos >= self.last as f64 {
            return (self.values[self.last], pos > self.last as f64 + 1e-9);
        }
        let pos = pos.max(0.0);
        let k = pos as usize;
        let y0 = self.values[k];
        let y1 = self.values[k + 1];
        if self.slopes.is_empty() {
            let t = pos - k as f64;
            return (y0 + t * (y1 - y0), false);
        }
        let kf = k as f64;
        let du = 2.0 * kf + 1.0;
        let t = (pos - kf) * (pos + kf) / du;
        let m0 = self.slopes[k] * du;
        let m1 = self.slopes[k + 1] * du;
        let s = 1.0 - t;
        let h00 = (1.0 + 2.0 * t) * s * s;
        let h10 = t * s * s;
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = -t * t * s;
        (h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1, false)
    }

    #[inline]
    pub fn value_index(&self, pos: f64) -> f64 {
        self.eval_index(pos).0
    }
}

fn monotone_slopes(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    // even extension: y[-k] = y[k]
    let at = |i: isize| -> f64 { y[i.unsigned_abs()] };
    let mut m = vec![0.0; n];
    for (i, slot) in m.iter_mut().enumerate() {
        let ii = i as isize;
        *slot = if i == 0 {
            // dy/du at u = 0 is y''(0)/2
            0.5 * (-49.0 / 18.0 * y[0] + 3.0 * y[1] - 0.3 * y[2] + y[3] / 45.0)
        } else {
            let dx = if i + 3 < n {
                (at(ii + 3) - 9.0 * at(ii + 2) + 45.0 * at(ii + 1) - 45.0 * at(ii - 1) + 9.0 * at(ii - 2) - at(ii - 3))
                    / 60.0
            } else if i + 1 < n {
                0.5 * (y[i + 1] - y[i - 1])
            } else {
                y[i] - y[i - 1]
            };
            dx / (2.0 * i as f64)
        };
    }
    // Fritsch–Carlson limiting on the secants in u
    for k in 0..n - 1 {
        let delta = (y[k + 1] - y[k]) / (2 * k + 1) as f64;
        if delta == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        if m[k] * delta < 0.0 {
            m[k] = 0.0;
        }
        if m[k + 1] * delta < 0.0 {
            m[k + 1] = 0.0;
        }
        let a = m[k] / delta;
        let b = m[k + 1] / delta;
        let r2 = a * a + b * b;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            m[k] = tau * a * delta;
            m[k + 1] = tau * b * delta;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes() {
        let y: Vec<f64> = (0..50).map(|i| (-(i as f64 * 0.1).powi(2)).exp()).collect();
        let it = UniformInterpolant::new(&y, InterpKind::CubicMonotone);
        for (i, v) in y.iter().enumerate() {
            assert_eq!(it.value_index(i as f64), *v);
        }
    }

    #[test]
    fn gaussian_accuracy_is_high_order() {
        let err = |h: f64| {
            let n = (8.0 / h) as usize + 1;
            let y: Vec<f64> = (0..n).map(|i| (-(i as f64 * h).powi(2) / 2.0).exp()).collect();
            let it = UniformInterpolant::new(&y, InterpKind::CubicMonotone);
            (0..(n - 1) * 7)
                .map(|j| {
                    let pos = j as f64 / 7.0 + 0.03;
                    let x = pos * h;
                    (it.value_index(pos) - (-x * x / 2.0).exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        let e1 = err(0.04);
        let e2 = err(0.02);
        assert!(e1 < 1e-6, "{e1}");
        // at least third order
        assert!(e1 / e2 > 7.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn even_sextic_reproduced() {
        let h: f64 = 0.05;
        let f = |x: f64| 1.0 - 0.7 * x * x + 0.2 * x.powi(4) - 0.01 * x.powi(6);
        let y: Vec<f64> = (0..40).map(|i| f(i as f64 * h)).collect();
        let it = UniformInterpolant::new(&y, InterpKind::CubicMonotone);
        // f is monotone for x < 1.4
        for j in 0..250 {
            let pos = j as f64 * 0.1 + 0.013;
            let x = pos * h;
            assert!((it.value_index(pos) - f(x)).abs() < 1e-14, "{pos}");
        }
    }

    #[test]
    fn no_overshoot_on_step() {
        let y = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let it = UniformInterpolant::new(&y, InterpKind::CubicMonotone);
        for j in 0..=50 {
            let v = it.value_index(j as f64 * 0.1);
            assert!((-1e-15..=1.0 + 1e-15).contains(&v));
        }
    }

    #[test]
    fn clamps_past_end() {
        let y = [1.0, 0.5, 0.25, 0.25];
        let it = UniformInterpolant::new(&y, InterpKind::Linear);
        assert_eq!(it.eval_index(5.0), (0.25, true));
        assert_eq!(it.eval_index(3.0), (0.25, false));
        assert_eq!(it.value_index(0.5), 0.75);
    }
}
