use crate::error::Result;
use crate::kinematics::{
    collide, convert_param, precollide, velocity_jacobian_det, CollisionTriple, Conversion, Param, Restitution,
    UnitVector3,
};
use crate::rng::{substream, Domain};
use crate::Vec3;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Tolerances for [`kinematics_audit`], relative to the size of the triple.
pub const ROUND_TRIP_TOL: f64 = 1e-10;
pub const MOMENTUM_TOL: f64 = 1e-12;
pub const ENERGY_TOL: f64 = 1e-10;
pub const PARAM_MAP_TOL: f64 = 1e-10;
pub const JACOBIAN_TOL: f64 = 1e-6;

/// Worst errors seen over a batch of random collision triples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct KinematicsAudit {
    pub e: f64,
    pub triples: usize,
    /// `precollide ∘ collide` and `collide ∘ precollide`, velocities and vector.
    pub round_trip: f64,
    pub momentum: f64,
    /// Energy change against `-(1-e²)/2 ((v-w)·n)²`, with `n` converted from `σ`
    /// on the swapping branch.
    pub energy: f64,
    /// Swapping map against the reflection map at the converted normal, and the
    /// `σ → n → σ` round trip.
    pub param_map: f64,
    /// `||det| - e|` of the reflection map, on a subsample.
    pub jacobian: f64,
    pub jacobian_samples: usize,
}

impl KinematicsAudit {
    pub fn holds(&self) -> bool {
        self.round_trip <= ROUND_TRIP_TOL
            && self.momentum <= MOMENTUM_TOL
            && self.energy <= ENERGY_TOL
            && self.param_map <= PARAM_MAP_TOL
            && self.jacobian <= JACOBIAN_TOL
    }
}

fn gaussian<R: Rng>(rng: &mut R, scale: f64) -> Vec3 {
    Vec3::new(
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
    ) * scale
}

/// Checks the collision maps on `triples` random triples (alternating the two
/// parameterisations) at restitution `e`. The finite-difference Jacobian is
/// evaluated on every `jacobian_every`-th triple.
pub fn kinematics_audit(e: f64, triples: usize, jacobian_every: usize, seed: u64) -> Result<KinematicsAudit> {
    let r = Restitution::new(e)?;
    let mut rng = substream(seed, Domain::TripleSample, (e * 1e6).round() as u64);
    let mut audit = KinematicsAudit {
        e,
        triples,
        ..KinematicsAudit::default()
    };
    let worst = |slot: &mut f64, v: f64| *slot = slot.max(if v.is_nan() { f64::INFINITY } else { v });
    for i in 0..triples {
        // speeds spread over two decades
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        let v = gaussian(&mut rng, scale);
        let w = gaussian(&mut rng, scale);
        let omega = UnitVector3::random(&mut rng);
        let param = if i % 2 == 0 { Param::Reflection } else { Param::Swap };
        let t = CollisionTriple::new(v, w, omega, param);
        let size = v.norm() + w.norm();
        let out = collide(&t, &r).triple;

        let back = precollide(&out, &r)?.triple;
        let fwd = collide(&precollide(&t, &r)?.triple, &r).triple;
        worst(
            &mut audit.round_trip,
            ((back.v - v).norm() + (back.w - w).norm()).max((fwd.v - v).norm() + (fwd.w - w).norm()) / size
                + (back.omega.as_vec() - omega.as_vec()).norm()
                + (fwd.omega.as_vec() - omega.as_vec()).norm(),
        );
        worst(&mut audit.momentum, (out.momentum() - t.momentum()).norm() / size);

        let u = t.relative();
        let k = UnitVector3::new(u)?;
        let n = match param {
            Param::Reflection => omega,
            Param::Swap => convert_param(&k, &omega, Conversion::SigmaToNormal)?,
        };
        let expected = -0.5 * (1.0 - e * e) * u.dot(&n).powi(2);
        worst(
            &mut audit.energy,
            (out.energy() - t.energy() - expected).abs() / (size * size),
        );

        if param == Param::Swap {
            let refl = collide(&CollisionTriple::new(v, w, n, Param::Reflection), &r).triple;
            let sigma_back = convert_param(&k, &n, Conversion::NormalToSigma)?;
            worst(
                &mut audit.param_map,
                ((refl.v - out.v).norm() + (refl.w - out.w).norm()) / size
                    + (sigma_back.as_vec() - omega.as_vec()).norm(),
            );
        }
        if jacobian_every > 0 && i % (2 * jacobian_every) == 0 {
            let det = velocity_jacobian_det(&t, &r, false, 1e-4 * scale)?;
            worst(&mut audit.jacobian, (det.abs() - e).abs());
            audit.jacobian_samples += 1;
        }
    }
    Ok(audit)
}
