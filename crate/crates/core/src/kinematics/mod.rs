//! Collision kinematics of the inelastic Maxwell model.
//!
//! A kinematically admissible collision is a point `(v, w, ω)` of
//! `R³ × R³ × S²`. Two collision maps act on that space: the reflection map,
//! where `ω = n` is the contact normal, and the swapping map, where `ω = σ` is
//! the post-collisional relative direction. Both are bijections for `e > 0`.

mod identities;
mod maps;
mod montecarlo;
mod rates;

pub use identities::{bobylev_split, check_z_identity, z_combination};
pub use maps::{collide, convert_param, precollide, velocity_jacobian_det, CollisionOutcome, Conversion};
pub use montecarlo::{
    mc_change_of_variables, mc_sphere_identity, CollisionKernel, GaussianBumpKernel, McEstimate, TheoremBranch, XiPoint,
};
pub use rates::{
    dissipation_constant, fisher_growth_exponent, rate_convert, rate_pair_from_btilde, EffectiveRates, FisherGrowth,
    RateFn, RatePair, SpeedRate,
};

use crate::error::{Error, Result};
use crate::Vec3;
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};

/// Restitution coefficient together with the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Restitution {
    e: f64,
    dissipation: f64,
    growth: f64,
    c1: f64,
    omega: f64,
}

impl Restitution {
    /// Constant angular rate `B ≡ 1`, for which `E = (1 - e²)/8`.
    pub fn new(e: f64) -> Result<Self> {
        Self::with_dissipation(e, (1.0 - e * e) / 8.0)
    }

    /// Dissipation constant taken from an arbitrary rate pair.
    pub fn with_rates(e: f64, pair: &RatePair) -> Result<Self> {
        check_e(e)?;
        Self::with_dissipation(e, dissipation_constant(pair, e))
    }

    fn with_dissipation(e: f64, dissipation: f64) -> Result<Self> {
        check_e(e)?;
        let growth = if e == 0.0 {
            f64::INFINITY
        } else {
            (1.0 - e) * (2.0 + e + 15.0 * e * e) / (8.0 * e.powi(3))
        };
        let omega = if e == 0.0 {
            f64::INFINITY
        } else {
            (2.0 + e + 15.0 * e * e) / (4.0 * e.powi(3)) - 0.5 * (1.0 + e)
        };
        Ok(Self {
            e,
            dissipation,
            growth,
            c1: 0.5 * growth - dissipation,
            omega,
        })
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    /// Energy dissipation constant `E`; temperature decays as `exp(-2Et)`.
    pub fn dissipation(&self) -> f64 {
        self.dissipation
    }

    /// Growth factor of the gain-term Fisher bound, `(1-e)(2+e+15e²)/(8e³)`.
    pub fn growth(&self) -> f64 {
        self.growth
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// `(2+e+15e²)/(4e³) - (1+e)/2`, the rate appearing in the small-inelasticity estimate.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `ε = (1 - e)/2`.
    pub fn epsilon(&self) -> f64 {
        0.5 * (1.0 - self.e)
    }
}

fn check_e(e: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&e) || !e.is_finite() {
        return Err(Error::OutOfRange {
            name: "e",
            value: e,
            expected: "0 <= e <= 1",
        });
    }
    Ok(())
}

/// Unit vector, renormalised on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3(Vec3);

impl UnitVector3 {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Degenerate("zero or non-finite direction"));
        }
        Ok(Self(v / n))
    }

    pub fn from_components(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vec3::new(x, y, z))
    }

    /// Uniformly distributed on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
        // UnitSphere output is normalised to rounding; renormalise anyway
        let v = Vec3::new(x, y, z);
        Self(v / v.norm())
    }

    pub fn as_vec(&self) -> &Vec3 {
        &self.0
    }

    pub fn into_inner(self) -> Vec3 {
        self.0
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0.dot(other)
    }
}

impl std::ops::Deref for UnitVector3 {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

/// Which collision map a triple is parameterised for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    /// `ω = n`, the contact normal.
    Reflection,
    /// `ω = σ`, the post-collisional relative direction.
    Swap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionTriple {
    pub v: Vec3,
    pub w: Vec3,
    pub omega: UnitVector3,
    pub param: Param,
}

impl CollisionTriple {
    pub fn new(v: Vec3, w: Vec3, omega: UnitVector3, param: Param) -> Self {
        Self { v, w, omega, param }
    }

    pub fn relative(&self) -> Vec3 {
        self.v - self.w
    }

    pub fn momentum(&self) -> Vec3 {
        self.v + self.w
    }

    pub fn energy(&self) -> f64 {
        self.v.norm_squared() + self.w.norm_squared()
    }
}
