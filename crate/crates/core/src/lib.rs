//! Numerical laboratory for the spatially homogeneous inelastic Maxwell model.
//!
//! The crate is organised around the objects the model is built from:
//!
//! - [`kinematics`]: the inelastic reflection and swapping collision maps, their
//!   inverses, conversions between the two parameterisations and between the
//!   angular rate functions, and Monte Carlo checks of the change-of-variables
//!   identities relating the weak and strong forms of the gain term.
//! - [`spectral`]: the isotropic equation in Fourier variables on a radial
//!   frequency grid, in the unscaled and the temperature-rescaled frame, the
//!   homogeneous cooling state and Fourier-side functionals.
//! - [`realspace`]: radial inverse transform, Fisher information, distances,
//!   relative entropy and a suite of functional inequalities.
//! - [`dsmc`]: Kac-style particle simulation of the full three-dimensional model.
//! - [`harness`]: configuration, rate fitting, verification suites, the
//!   small-inelasticity sweep and the `maxcool` command line.
//!
//! Conventions: the Fourier transform is `f̂(η) = ∫ e^{-iη·v} f(v) dv` with no
//! `2π` factors, the unit sphere carries the uniform measure of total mass
//! `4π`, and temperatures are per velocity component (`m2 = 3θ`).

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dsmc;
pub mod error;
pub mod harness;
pub mod interp;
pub mod kinematics;
pub mod quadrature;
pub mod realspace;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use kinematics::{CollisionTriple, Param, RatePair, Restitution, UnitVector3};
pub use spectral::{CharacteristicProfile, RadialGrid, SolverConfig};

/// Velocity and frequency 3-vectors.
pub type Vec3 = nalgebra::Vector3<f64>;
