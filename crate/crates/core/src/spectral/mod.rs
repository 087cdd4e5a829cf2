//! Isotropic inelastic Maxwell equation in Fourier variables.
//!
//! For a radially symmetric density the Fourier transform is a real function
//! `φ(x)` of `x = |η|`. With the constant angular rate the gain term reduces
//! to a one-dimensional integral
//!
//! `Q̂⁺φ(x) = ½ ∫_{-1}^{1} φ(a₋(s)x) φ(a₊(s)x) ds`
//!
//! and the loss term is `φ` itself. The rescaled frame keeps the temperature
//! fixed: `ĝ(x, t) = φ_f(e^{Et}x, t)`, which adds the drift `E x ∂ₓĝ`.

mod functionals;
mod gain;
mod io;
mod solver;

pub use functionals::{
    d2_distance, d2_limit_at_zero, gamma_constants, moment, sobolev_norm, sup_weighted, GammaConstants, MomentOrder,
};
pub use gain::{a_minus, a_plus, gain_fourier, GainOperator};
pub use io::{read_profile, write_profile, ProfileHeader};
pub use solver::{
    evolve, fixed_point_residual, steady_profile, step, DiagnosticRecord, DiagnosticSchedule, EnvelopeReport,
    EvolutionTrace, Solver, SteadyState,
};

use crate::error::{Error, Result};
use crate::interp::InterpKind;
use serde::{Deserialize, Serialize};

/// Uniform radial frequency grid `x_i = i·x_max/(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    n: usize,
    x_max: f64,
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 256;

    pub fn new(n: usize, x_max: f64) -> Result<Self> {
        if n < Self::MIN_POINTS {
            return Err(Error::OutOfRange {
                name: "n",
                value: n as f64,
                expected: "n >= 256",
            });
        }
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(Error::OutOfRange {
                name: "x_max",
                value: x_max,
                expected: "positive and finite",
            });
        }
        Ok(Self { n, x_max })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn spacing(&self) -> f64 {
        self.x_max / (self.n - 1) as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

/// Samples of a radial characteristic function on a grid, at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl CharacteristicProfile {
    pub fn from_values(grid: RadialGrid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        let p = Self { grid, values, time };
        p.validate()?;
        Ok(p)
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: RadialGrid, f: F) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self::from_values(grid, values, 0.0)
    }

    /// `exp(-θx²/2)`, the transform of a Maxwellian with temperature `θ`.
    pub fn maxwellian(grid: RadialGrid, theta: f64) -> Self {
        Self::from_fn(grid, |x| (-0.5 * theta * x * x).exp()).expect("maxwellian is valid")
    }

    /// Mixture `w·M_{θ1} + (1-w)·M_{θ2}`.
    pub fn bi_maxwellian(grid: RadialGrid, w: f64, theta1: f64, theta2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::OutOfRange {
                name: "weight",
                value: w,
                expected: "0 <= w <= 1",
            });
        }
        Self::from_fn(grid, |x| {
            w * (-0.5 * theta1 * x * x).exp() + (1.0 - w) * (-0.5 * theta2 * x * x).exp()
        })
    }

    /// The default initial datum: equal mixture of temperatures 0.6 and 1.4.
    pub fn default_initial(grid: RadialGrid) -> Self {
        Self::bi_maxwellian(grid, 0.5, 0.6, 1.4).expect("valid mixture")
    }

    /// `φ ≡ 1`, a point mass at the origin.
    pub fn point_mass(grid: RadialGrid) -> Self {
        Self {
            grid,
            values: vec![1.0; grid.len()],
            time: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("profile values"));
        }
        if (self.values[0] - 1.0).abs() > 1e-9 {
            return Err(Error::MassDefect {
                mass: self.values[0],
                tol: 1e-9,
            });
        }
        let max_abs = self.max_abs();
        if max_abs > 1.0 + 1e-9 {
            return Err(Error::BoundViolation {
                time: self.time,
                max_abs,
            });
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Temperature per component, `θ = -φ''(0)`.
    pub fn temperature(&self) -> f64 {
        moment(self, MomentOrder::Second) / 3.0
    }

    /// Resample at `x·λ`, clamping past the grid end.
    pub fn dilate(&self, lambda: f64, interp: InterpKind) -> Self {
        let values = gain::dilate_values(&self.values, lambda, interp);
        Self {
            grid: self.grid,
            values,
            time: self.time,
        }
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.grid.n, self.grid.x_max, other.grid.n, other.grid.x_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// The density `f` itself; temperature decays.
    #[serde(rename = "unscaled-f")]
    Unscaled,
    /// The temperature-rescaled density `g`.
    #[serde(rename = "rescaled-g")]
    Rescaled,
}

impl std::fmt::Display for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Frame::Unscaled => "unscaled-f",
            Frame::Rescaled => "rescaled-g",
        })
    }
}

impl std::str::FromStr for Frame {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unscaled-f" | "unscaled" => Ok(Frame::Unscaled),
            "rescaled-g" | "rescaled" => Ok(Frame::Rescaled),
            other => Err(Error::Parse(format!("unknown frame `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n: usize,
    pub x_max: f64,
    pub dt: f64,
    pub t_max: f64,
    pub quad_order: usize,
    pub interp: InterpKind,
    pub frame: Frame,
    /// Longest stretch of time the drift is deferred in the rescaled frame.
    /// The collision operator commutes with dilations, so deferring is exact;
    /// it only reduces how often the profile is resampled.
    pub drift_interval: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 4096,
            x_max: 50.0,
            dt: 0.005,
            t_max: 40.0,
            quad_order: 64,
            interp: InterpKind::CubicMonotone,
            frame: Frame::Rescaled,
            drift_interval: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.n, self.x_max)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::OutOfRange {
                name: "dt",
                value: self.dt,
                expected: "dt > 0",
            });
        }
        if self.quad_order < 32 {
            return Err(Error::OutOfRange {
                name: "quad_order",
                value: self.quad_order as f64,
                expected: "quad_order >= 32",
            });
        }
        if !(self.drift_interval > 0.0) {
            return Err(Error::OutOfRange {
                name: "drift_interval",
                value: self.drift_interval,
                expected: "drift_interval > 0",
            });
        }
        if !(self.t_max >= 0.0) {
            return Err(Error::OutOfRange {
                name: "t_max",
                value: self.t_max,
                expected: "t_max >= 0",
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        assert!(RadialGrid::new(255, 10.0).is_err());
        let g = RadialGrid::new(256, 10.0).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert!((g.node(255) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn profile_validation() {
        let g = RadialGrid::new(256, 10.0).unwrap();
        assert!(CharacteristicProfile::from_fn(g, |x| 1.0 + x).is_err());
        assert!(CharacteristicProfile::from_fn(g, |x| 0.5 * (-x).exp()).is_err());
        assert!(CharacteristicProfile::from_fn(g, |x| (-x * x).exp()).is_ok());
    }

    #[test]
    fn frame_round_trip() {
        for f in [Frame::Unscaled, Frame::Rescaled] {
            assert_eq!(f.to_string().parse::<Frame>().unwrap(), f);
        }
    }
}
