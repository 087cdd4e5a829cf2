use super::{CharacteristicProfile, RadialGrid};
use crate::error::{Error, Result};
use crate::interp::{InterpKind, UniformInterpolant};
use crate::kinematics::Restitution;
use crate::quadrature::GaussLegendre;

/// `a₋(s) = ((1+e)/4) √(2(1-s))`, so that `|η₋| = a₋|η|` with `s = η̂·σ`.
pub fn a_minus(s: f64, e: f64) -> f64 {
    0.25 * (1.0 + e) * (2.0 * (1.0 - s)).max(0.0).sqrt()
}

/// `a₊(s)`, with `|η₊| = a₊|η|`. Never exceeds 1.
pub fn a_plus(s: f64, e: f64) -> f64 {
    let p = 0.25 * (3.0 - e);
    let m = 0.25 * (1.0 + e);
    (p * p + m * m + s * (3.0 - e) * (1.0 + e) / 8.0).max(0.0).sqrt()
}

/// Precomputed quadrature for the radial gain integral.
#[derive(Debug, Clone)]
pub struct GainOperator {
    grid: RadialGrid,
    e: f64,
    interp: InterpKind,
    // (a₋, a₊, w/2) per quadrature node
    nodes: Vec<(f64, f64, f64)>,
}

impl GainOperator {
    pub fn new(grid: RadialGrid, restitution: &Restitution, quad_order: usize, interp: InterpKind) -> Self {
        let e = restitution.e();
        let gl = GaussLegendre::new(quad_order);
        let nodes = gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .map(|(&s, &w)| (a_minus(s, e), a_plus(s, e), 0.5 * w))
            .collect();
        Self { grid, e, interp, nodes }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    /// Apply the gain operator to raw samples, returning the number of
    /// interpolation queries that fell past the grid end.
    pub fn apply(&self, values: &[f64], out: &mut [f64]) -> usize {
        debug_assert_eq!(values.len(), self.grid.len());
        let it = UniformInterpolant::new(values, self.interp);
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut clamped = 0;
        for &(am, ap, w) in &self.nodes {
            for (i, o) in out.iter_mut().enumerate().skip(1) {
                let fi = i as f64;
                let (u, c1) = it.eval_index(am * fi);
                let (v, c2) = it.eval_index(ap * fi);
                clamped += c1 as usize + c2 as usize;
                *o += w * u * v;
            }
        }
        out[0] = values[0] * values[0];
        if clamped > 0 {
            log::error!("gain interpolation clamped {clamped} queries past x_max");
        }
        clamped
    }

    pub fn apply_profile(&self, phi: &CharacteristicProfile) -> Result<CharacteristicProfile> {
        if phi.grid != self.grid {
            return Err(Error::GridMismatch("profile and gain operator grids differ".into()));
        }
        let mut out = vec![0.0; phi.values.len()];
        self.apply(&phi.values, &mut out);
        Ok(CharacteristicProfile {
            grid: phi.grid,
            values: out,
            time: phi.time,
        })
    }
}

/// `Q̂⁺φ` with Gauss–Legendre order 64 and monotone cubic interpolation.
pub fn gain_fourier(phi: &CharacteristicProfile, restitution: &Restitution) -> Result<CharacteristicProfile> {
    GainOperator::new(phi.grid, restitution, 64, InterpKind::CubicMonotone).apply_profile(phi)
}

/// `out[i] = φ(λ·x_i)`, with the boundary value past the grid end.
pub(crate) fn dilate_values(values: &[f64], lambda: f64, interp: InterpKind) -> Vec<f64> {
    let it = UniformInterpolant::new(values, interp);
    let mut out: Vec<f64> = (0..values.len()).map(|i| it.value_index(lambda * i as f64)).collect();
    out[0] = values[0];
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{bobylev_split, UnitVector3};
    use crate::rng::{substream, Domain};
    use crate::Vec3;
    use rand::Rng;

    fn grid() -> RadialGrid {
        RadialGrid::new(1024, 20.0).unwrap()
    }

    #[test]
    fn point_mass_is_fixed() {
        let r = Restitution::new(0.6).unwrap();
        let g = gain_fourier(&CharacteristicProfile::point_mass(grid()), &r).unwrap();
        for v in &g.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn elastic_maxwellian_is_fixed() {
        let r = Restitution::new(1.0).unwrap();
        let m = CharacteristicProfile::maxwellian(grid(), 1.0);
        let g = gain_fourier(&m, &r).unwrap();
        let err = g
            .values
            .iter()
            .zip(&m.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn radial_factors_match_split_vectors() {
        let mut rng = substream(4, Domain::TripleSample, 0);
        for _ in 0..10_000 {
            let e: f64 = rng.random_range(0.05..1.0);
            let eta = Vec3::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            let sigma = UnitVector3::random(&mut rng);
            let (p, m) = bobylev_split(&eta, &sigma, e);
            let n2 = eta.norm_squared();
            assert!((m.norm_squared() + p.norm_squared() + 2.0 * m.dot(&p) - n2).abs() < 1e-12 * (1.0 + n2));
            let s = sigma.dot(&(eta / eta.norm()));
            assert!((m.norm() - a_minus(s, e) * eta.norm()).abs() < 1e-12);
            assert!((p.norm() - a_plus(s, e) * eta.norm()).abs() < 1e-12);
            assert!(a_plus(s, e) <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn elastic_factors_are_complementary() {
        for i in 0..=20 {
            let s = -1.0 + 0.1 * i as f64;
            let (m, p) = (a_minus(s, 1.0), a_plus(s, 1.0));
            assert!((m * m + p * p - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gain_keeps_bounds() {
        let r = Restitution::new(0.3).unwrap();
        let phi = CharacteristicProfile::default_initial(grid());
        let g = gain_fourier(&phi, &r).unwrap();
        assert_eq!(g.values[0], 1.0);
        assert!(g.max_abs() <= 1.0 + 1e-12);
    }
}
