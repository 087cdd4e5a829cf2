//! Importance-sampling checks of the collision change-of-variables theorem.
//!
//! Velocities are drawn from a standard Gaussian and the collision vector
//! uniformly on the sphere. Both sides of an identity are estimated from
//! independent streams so their standard errors add in quadrature.

use super::{collide, precollide, CollisionTriple, EffectiveRates, Param, Restitution, UnitVector3};
use crate::error::{Error, Result};
use crate::rng::{substream, Domain};
use crate::Vec3;
use rand::Rng;
use rand_distr::StandardNormal;

const BLOCK: usize = 1 << 15;

/// A point `(v, w, ω)` of the collision space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiPoint {
    pub v: Vec3,
    pub w: Vec3,
    pub omega: Vec3,
}

impl From<&CollisionTriple> for XiPoint {
    fn from(t: &CollisionTriple) -> Self {
        Self {
            v: t.v,
            w: t.w,
            omega: t.omega.into_inner(),
        }
    }
}

/// A test function `K[pre, post]` on pairs of collision-space points.
pub trait CollisionKernel: Sync {
    fn eval(&self, pre: &XiPoint, post: &XiPoint) -> f64;
}

impl<F> CollisionKernel for F
where
    F: Fn(&XiPoint, &XiPoint) -> f64 + Sync,
{
    fn eval(&self, pre: &XiPoint, post: &XiPoint) -> f64 {
        self(pre, post)
    }
}

/// Product of Gaussian bumps in `v, w, v', w'` with a smooth tilt in `ω, ω'`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBumpKernel {
    pub centers: [Vec3; 4],
    pub widths: [f64; 4],
    pub tilt_pre: Vec3,
    pub tilt_post: Vec3,
}

impl GaussianBumpKernel {
    /// Random centres of size about 0.5 and widths in `[0.6, 1.0]`.
    pub fn random(seed: u64, index: u64) -> Self {
        let mut rng = substream(seed, Domain::Kernel, index);
        let mut gauss = || {
            Vec3::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        };
        let centers = [0.5 * gauss(), 0.5 * gauss(), 0.5 * gauss(), 0.5 * gauss()];
        let mut tilt = || {
            let t = gauss();
            0.5 * t / t.norm().max(1e-12)
        };
        let tilt_pre = tilt();
        let tilt_post = tilt();
        let mut rng = substream(seed ^ 0x5eed, Domain::Kernel, index);
        let widths = [0; 4].map(|_| rng.random_range(0.6..1.0));
        Self {
            centers,
            widths,
            tilt_pre,
            tilt_post,
        }
    }
}

impl CollisionKernel for GaussianBumpKernel {
    fn eval(&self, pre: &XiPoint, post: &XiPoint) -> f64 {
        let args = [pre.v, pre.w, post.v, post.w];
        let g: f64 = (0..4)
            .map(|i| (args[i] - self.centers[i]).norm_squared() / (2.0 * self.widths[i].powi(2)))
            .sum();
        (-g).exp() * (1.0 + self.tilt_pre.dot(&pre.omega)) * (1.0 + self.tilt_post.dot(&post.omega))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremBranch {
    /// Swapping map with `σ` as collision vector, weights `B_e^+` and `B`.
    Sigma,
    /// Reflection map with `n` as collision vector, weights `B̃_e^+` and `B̃`.
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub lhs: f64,
    pub rhs: f64,
    pub stderr_lhs: f64,
    pub stderr_rhs: f64,
}

impl McEstimate {
    pub fn combined_stderr(&self) -> f64 {
        self.stderr_lhs.hypot(self.stderr_rhs)
    }

    /// Discrepancy in units of the combined standard error.
    pub fn z_score(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.combined_stderr()
    }

    pub fn agrees(&self, n_sigma: f64) -> bool {
        (self.lhs - self.rhs).abs() <= n_sigma * self.combined_stderr()
    }
}

#[derive(Default, Clone, Copy)]
struct Moments {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    fn mean_stderr(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
        (mean, (var / n).sqrt())
    }
}

/// Standard deviation of the Gaussian proposal on `v` and `w`. It is wider
/// than every bump of [`GaussianBumpKernel`], which keeps the importance
/// weights bounded and their variance honest.
const PROPOSAL_SCALE: f64 = 1.5;

fn gaussian3<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    PROPOSAL_SCALE
        * Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        )
}

fn proposal_density(v: &Vec3, w: &Vec3) -> f64 {
    let s2 = PROPOSAL_SCALE * PROPOSAL_SCALE;
    (-(v.norm_squared() + w.norm_squared()) / (2.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2).powi(3)
}

/// Estimate both sides of the change-of-variables identity
///
/// `∫ K[C⁻¹(ξ), ξ] Φ_e^+ B_e^+ dξ = ∫ K[ξ, C(ξ)] Φ B dξ`
///
/// where the sphere measure is normalised to one.
pub fn mc_change_of_variables<K: CollisionKernel + ?Sized>(
    kernel: &K,
    rates: &EffectiveRates,
    branch: TheoremBranch,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < 2 {
        return Err(Error::TooFewPoints(samples));
    }
    let restitution = Restitution::new(rates.e())?;
    let param = match branch {
        TheoremBranch::Sigma => Param::Swap,
        TheoremBranch::Normal => Param::Reflection,
    };
    let blocks = samples.div_ceil(BLOCK);
    let mut lhs = Moments::default();
    let mut rhs = Moments::default();
    for block in 0..blocks {
        let count = BLOCK.min(samples - block * BLOCK);
        for (side, acc) in [(0u64, &mut lhs), (1u64, &mut rhs)] {
            let mut rng = substream(seed, Domain::MonteCarloBlock, 2 * block as u64 + side);
            let mut local = Moments::default();
            for _ in 0..count {
                let v = gaussian3(&mut rng);
                let w = gaussian3(&mut rng);
                let omega = UnitVector3::random(&mut rng);
                let t = CollisionTriple::new(v, w, omega, param);
                let u = t.relative();
                let r = u.norm();
                if r == 0.0 {
                    local.push(0.0);
                    continue;
                }
                let c = omega.dot(&(u / r));
                let here = XiPoint::from(&t);
                let x = if side == 0 {
                    let pre = precollide(&t, &restitution)?.triple;
                    let (phi, b) = match branch {
                        TheoremBranch::Sigma => (rates.phi_plus(r, c), rates.b_plus(c)),
                        TheoremBranch::Normal => (rates.phitilde_plus(r, c), rates.btilde_plus(c)),
                    };
                    kernel.eval(&XiPoint::from(&pre), &here) * phi * b
                } else {
                    let post = collide(&t, &restitution).triple;
                    let b = match branch {
                        TheoremBranch::Sigma => rates.pair().b(c),
                        TheoremBranch::Normal => rates.pair().btilde(c),
                    };
                    kernel.eval(&here, &XiPoint::from(&post)) * rates.speed(r) * b
                };
                let x = x / proposal_density(&v, &w);
                if !x.is_finite() {
                    return Err(Error::NonFinite("kernel sample"));
                }
                local.push(x);
            }
            acc.merge(&local);
        }
    }
    let (l, sl) = lhs.mean_stderr();
    let (r, sr) = rhs.mean_stderr();
    Ok(McEstimate {
        lhs: l,
        rhs: r,
        stderr_lhs: sl,
        stderr_rhs: sr,
    })
}

/// Both sides of the sphere identity
///
/// `∫ φ((u - |u|σ)/2) dσ = ∫ 2|k·n| φ((u·n)n) dn`
///
/// with `dσ`, `dn` of total mass `4π`.
pub fn mc_sphere_identity<F>(phi: F, u: &Vec3, samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&Vec3) -> f64,
{
    if samples < 2 {
        return Err(Error::TooFewPoints(samples));
    }
    let r = u.norm();
    if r == 0.0 {
        return Err(Error::Degenerate("u must be non-zero"));
    }
    let k = u / r;
    let four_pi = 4.0 * std::f64::consts::PI;
    let mut lhs = Moments::default();
    let mut rhs = Moments::default();
    let blocks = samples.div_ceil(BLOCK);
    for block in 0..blocks {
        let count = BLOCK.min(samples - block * BLOCK);
        let mut rl = substream(seed, Domain::MonteCarloBlock, 2 * block as u64);
        let mut rr = substream(seed, Domain::MonteCarloBlock, 2 * block as u64 + 1);
        for _ in 0..count {
            let s = UnitVector3::random(&mut rl);
            let x = four_pi * phi(&(0.5 * (u - r * s.as_vec())));
            let n = UnitVector3::random(&mut rr);
            let un = u.dot(n.as_vec());
            let y = four_pi * 2.0 * k.dot(n.as_vec()).abs() * phi(&(un * n.as_vec()));
            if !(x.is_finite() && y.is_finite()) {
                return Err(Error::NonFinite("test function sample"));
            }
            lhs.push(x);
            rhs.push(y);
        }
    }
    let (l, sl) = lhs.mean_stderr();
    let (rv, sr) = rhs.mean_stderr();
    Ok(McEstimate {
        lhs: l,
        rhs: rv,
        stderr_lhs: sl,
        stderr_rhs: sr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::RatePair;
    use crate::quadrature::GaussLegendre;

    #[test]
    fn sphere_identity_matches_quadrature() {
        let u = Vec3::new(2.0, 0.0, 0.0);
        let est = mc_sphere_identity(|y| (-y.norm_squared()).exp(), &u, 200_000, 5).unwrap();
        let gl = GaussLegendre::new(64);
        let two_pi = 2.0 * std::f64::consts::PI;
        let lhs = two_pi * gl.integrate(|c| (-4.0 * (1.0 - c) / 2.0).exp());
        let rhs = two_pi * 2.0 * gl.integrate_on(0.0, 1.0, |c| 2.0 * c * (-4.0 * c * c).exp());
        assert!((lhs - rhs).abs() < 1e-12);
        assert!((est.lhs - lhs).abs() < 4.0 * est.stderr_lhs);
        assert!((est.rhs - rhs).abs() < 4.0 * est.stderr_rhs);
        assert!(est.agrees(3.0));
    }

    #[test]
    fn sigma_theorem_small_run() {
        let k = GaussianBumpKernel::random(3, 0);
        let r = EffectiveRates::new(&RatePair::constant(), &Restitution::new(0.7).unwrap()).unwrap();
        let est = mc_change_of_variables(&k, &r, TheoremBranch::Sigma, 100_000, 9).unwrap();
        assert!(est.agrees(4.0), "{est:?}");
    }

    #[test]
    fn reproducible() {
        let k = GaussianBumpKernel::random(3, 1);
        let r = EffectiveRates::new(&RatePair::constant(), &Restitution::new(0.5).unwrap()).unwrap();
        let a = mc_change_of_variables(&k, &r, TheoremBranch::Normal, 5000, 1).unwrap();
        let b = mc_change_of_variables(&k, &r, TheoremBranch::Normal, 5000, 1).unwrap();
        assert_eq!(a, b);
    }
}
