use super::CharacteristicProfile;
use crate::error::{Error, Result};
use crate::quadrature::trapezoid_uniform;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentOrder {
    Second,
    Fourth,
}

// 7-point centred stencils at x = 0 for an even function, written on the
// one-sided samples φ(0), φ(H), φ(2H), φ(3H).
fn second_derivative(y: [f64; 4], h: f64) -> f64 {
    (-49.0 / 18.0 * y[0] + 3.0 * y[1] - 0.3 * y[2] + y[3] / 45.0) / (h * h)
}

fn fourth_derivative(y: [f64; 4], h: f64) -> f64 {
    (28.0 / 3.0 * y[0] - 13.0 * y[1] + 4.0 * y[2] - y[3] / 3.0) / h.powi(4)
}

// Weights w_k for steps kH, k = 1, 2, 3, cancelling the H^p and H^{p+2} error terms.
fn richardson_weights(p: i32) -> [f64; 3] {
    let a = nalgebra::Matrix3::new(
        1.0,
        1.0,
        1.0,
        1.0,
        2f64.powi(p),
        3f64.powi(p),
        1.0,
        2f64.powi(p + 2),
        3f64.powi(p + 2),
    );
    let w = a
        .lu()
        .solve(&nalgebra::Vector3::new(1.0, 0.0, 0.0))
        .expect("Vandermonde-type system is regular");
    [w[0], w[1], w[2]]
}

/// Finite-difference derivative at the origin from the first four nodes.
type Derivative = fn([f64; 4], f64) -> f64;

fn extrapolated(phi: &CharacteristicProfile, order: MomentOrder, stride: usize) -> Option<f64> {
    let h = phi.grid.spacing() * stride as f64;
    let (p, d): (i32, Derivative) = match order {
        MomentOrder::Second => (6, second_derivative),
        MomentOrder::Fourth => (4, fourth_derivative),
    };
    let w = richardson_weights(p);
    let mut acc = 0.0;
    for (k, wk) in (1..=3).zip(w) {
        let step = stride * k;
        if 3 * step >= phi.values.len() {
            return None;
        }
        let y = [0, 1, 2, 3].map(|j| phi.values[j * step]);
        acc += wk * d(y, h * k as f64);
    }
    Some(match order {
        MomentOrder::Second => -3.0 * acc,
        MomentOrder::Fourth => 5.0 * acc,
    })
}

/// `m2 = -3φ''(0)` or `m4 = 5φ''''(0)` from Richardson-extrapolated stencils.
///
/// The base stencil spacing is the grid node closest to 0.05; if two
/// spacings disagree by more than 1% the wider one is used.
pub fn moment(phi: &CharacteristicProfile, order: MomentOrder) -> f64 {
    let base = ((0.05 / phi.grid.spacing()).round() as usize).max(1);
    let fine = extrapolated(phi, order, base);
    let coarse = extrapolated(phi, order, 2 * base);
    match (fine, coarse) {
        (Some(f), Some(c)) => {
            if (f - c).abs() > 0.01 * f.abs().max(1e-300) {
                log::warn!(
                    "moment stencil noise {:.3e} exceeds 1% of {f:.6e}; widening",
                    (f - c).abs()
                );
                c
            } else {
                f
            }
        }
        (Some(f), None) => f,
        _ => f64::NAN,
    }
}

/// `max_{x_i ≥ x_floor} |φ1 - φ2|/x_i²`. The default floor is two grid spacings.
pub fn d2_distance(phi1: &CharacteristicProfile, phi2: &CharacteristicProfile, x_floor: Option<f64>) -> Result<f64> {
    phi1.same_grid(phi2)?;
    let grid = phi1.grid;
    let floor = x_floor.unwrap_or(2.0 * grid.spacing());
    let t1 = phi1.temperature();
    let t2 = phi2.temperature();
    if (t1 - t2).abs() > 1e-4 * t1.abs().max(t2.abs()) {
        // warn once per process; repeats go to the debug log
        static WARNED: std::sync::atomic::AtomicBool = std::sync::atomic::AtomicBool::new(false);
        let level = if WARNED.swap(true, std::sync::atomic::Ordering::Relaxed) {
            log::Level::Debug
        } else {
            log::Level::Warn
        };
        log::log!(
            level,
            "d2 between profiles of temperature {t1:.6} and {t2:.6}; small-x limit is {:.6}",
            d2_limit_at_zero(phi1, phi2)
        );
    }
    let mut best = 0.0_f64;
    for i in 1..grid.len() {
        let x = grid.node(i);
        if x < floor * (1.0 - 1e-12) {
            continue;
        }
        best = best.max((phi1.values[i] - phi2.values[i]).abs() / (x * x));
    }
    Ok(best)
}

/// `lim_{x→0} |φ1 - φ2|/x² = |Δm2|/6`.
pub fn d2_limit_at_zero(phi1: &CharacteristicProfile, phi2: &CharacteristicProfile) -> f64 {
    (moment(phi1, MomentOrder::Second) - moment(phi2, MomentOrder::Second)).abs() / 6.0
}

/// Homogeneous Sobolev norm `(4π ∫ x^{2r+2} φ(x)² dx)^{1/2}`.
pub fn sobolev_norm(phi: &CharacteristicProfile, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::OutOfRange {
            name: "r",
            value: r,
            expected: "r >= 0",
        });
    }
    let grid = phi.grid;
    let integrand: Vec<f64> = (0..grid.len())
        .map(|i| grid.node(i).powf(2.0 * r + 2.0) * phi.values[i] * phi.values[i])
        .collect();
    let peak = integrand.iter().cloned().fold(0.0, f64::max);
    let tail = *integrand.last().expect("grid is non-empty");
    if tail > 1e-8 * peak {
        log::warn!(
            "Sobolev integrand not decayed at x_max (tail/peak = {:.2e})",
            tail / peak
        );
    }
    Ok((4.0 * std::f64::consts::PI * trapezoid_uniform(&integrand, grid.spacing())).sqrt())
}

/// `max_i x_i^δ |φ(x_i)|`.
pub fn sup_weighted(phi: &CharacteristicProfile, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            expected: "0 < delta <= 1",
        });
    }
    let grid = phi.grid;
    Ok((0..grid.len())
        .map(|i| grid.node(i).powf(delta) * phi.values[i].abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaConstants {
    pub a1: f64,
    pub a2: f64,
    pub gamma: f64,
    pub gamma_star: f64,
}

/// Decay-rate constants of the `d2` convergence estimate for the constant kernel.
pub fn gamma_constants(alpha: f64, e: f64) -> Result<GammaConstants> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "0 < alpha <= 1",
        });
    }
    if !(e > 0.0 && e <= 1.0) {
        return Err(Error::OutOfRange {
            name: "e",
            value: e,
            expected: "0 < e <= 1",
        });
    }
    let dissipation = (1.0 - e * e) / 8.0;
    let q = 0.5 * (1.0 - e);
    let a1 = 2.0 / (4.0 + alpha) * ((0.5 * (1.0 + e)).powf(2.0 + alpha) + (1.0 - q.powf(4.0 + alpha)) / (1.0 - q * q));
    let a2 = 1.0 - a1 - dissipation * (2.0 + alpha);
    let gamma = (2.0 * a2 / (2.0 + alpha)).min((3.0 - e) * (1.0 + e) / 8.0);
    let gamma_star = (2.0 * alpha / ((2.0 + alpha) * (4.0 + alpha))).min(0.5);
    Ok(GammaConstants {
        a1,
        a2,
        gamma,
        gamma_star,
    })
}
