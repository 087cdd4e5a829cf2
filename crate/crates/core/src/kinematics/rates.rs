use super::Restitution;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use std::sync::Arc;

pub type RateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Speed dependence `Φ(|u|)` of the collision rate. Maxwell molecules have `Φ ≡ 1`.
pub type SpeedRate = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Angular collision rate expressed in both parameterisations:
/// `B(k·σ)` for the swapping map and `B̃(k·n)` for the reflection map.
#[derive(Clone)]
pub struct RatePair {
    b: RateFn,
    btilde: RateFn,
    constant: bool,
}

impl std::fmt::Debug for RatePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RatePair")
            .field("B(0)", &(self.b)(0.0))
            .field("Btilde(0.5)", &(self.btilde)(0.5))
            .field("constant", &self.constant)
            .finish()
    }
}

impl RatePair {
    /// `B ≡ 1`, `B̃(t) = 2|t|`.
    pub fn constant() -> Self {
        Self {
            b: Arc::new(|_| 1.0),
            btilde: Arc::new(|t: f64| 2.0 * t.abs()),
            constant: true,
        }
    }

    pub fn b(&self, s: f64) -> f64 {
        (self.b)(s)
    }

    pub fn btilde(&self, t: f64) -> f64 {
        (self.btilde)(t)
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn b_fn(&self) -> RateFn {
        self.b.clone()
    }

    /// `½∫B(s)ds`, which equals `½∫B̃(t)dt`.
    pub fn normalization(&self) -> f64 {
        normalization_of(&*self.btilde)
    }

    /// Upper bound for `B` on a fine grid, used by rejection sampling.
    pub fn sup_b(&self) -> f64 {
        (0..=4000)
            .map(|i| self.b(-1.0 + i as f64 / 2000.0))
            .fold(0.0_f64, f64::max)
    }
}

// B̃ is even with a kink at zero, so integrate on [0, 1] only.
fn normalization_of(btilde: &(dyn Fn(f64) -> f64 + Send + Sync)) -> f64 {
    GaussLegendre::new(64).integrate_on(0.0, 1.0, btilde)
}

fn b_from_btilde(btilde: &RateFn, s: f64) -> f64 {
    // at s = 1 take the one-sided limit B̃'(0+)/2
    let t = (0.5 * (1.0 - s)).max(0.0).sqrt().max(1e-9);
    btilde(t) / (2.0 * t)
}

const CHECK_POINTS: usize = 1001;

fn check_grid() -> impl Iterator<Item = f64> {
    // 1001 points on [-1, 1), the endpoint s = 1 excluded
    (0..CHECK_POINTS).map(|i| -1.0 + 2.0 * i as f64 / CHECK_POINTS as f64)
}

/// Build a rate pair from `B`, renormalising it if `½∫B ≠ 1`.
pub fn rate_convert<F>(b: F) -> Result<RatePair>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let b: RateFn = Arc::new(b);
    for s in check_grid() {
        let (l, r) = (b(s), b(-s));
        if !l.is_finite() {
            return Err(Error::InvalidRate(format!("B({s}) is not finite")));
        }
        if (l - r).abs() > 1e-9 * (1.0 + l.abs()) {
            return Err(Error::InvalidRate(format!("B is not even at s = {s}")));
        }
    }
    let raw = b.clone();
    let btilde_raw: RateFn = Arc::new(move |t: f64| 2.0 * t.abs() * raw(1.0 - 2.0 * t * t));
    let norm = normalization_of(&*btilde_raw);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::InvalidRate(format!("normalisation integral {norm}")));
    }
    let (b, btilde) = if (norm - 1.0).abs() > 1e-10 {
        log::warn!("rate B has ½∫B = {norm}; renormalising");
        let scale = 1.0 / norm;
        let b2 = b.clone();
        let bt2 = btilde_raw.clone();
        (
            Arc::new(move |s: f64| scale * b2(s)) as RateFn,
            Arc::new(move |t: f64| scale * bt2(t)) as RateFn,
        )
    } else {
        (b, btilde_raw)
    };
    for s in check_grid() {
        let back = b_from_btilde(&btilde, s);
        let direct = b(s);
        if (back - direct).abs() > 1e-9 * (1.0 + direct.abs()) {
            return Err(Error::InvalidRate(format!(
                "B -> B̃ -> B mismatch at s = {s}: {direct} vs {back}"
            )));
        }
    }
    Ok(RatePair {
        b,
        btilde,
        constant: false,
    })
}

/// Build a rate pair from `B̃`, the reflection-side rate.
pub fn rate_pair_from_btilde<F>(btilde: F) -> Result<RatePair>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let bt: RateFn = Arc::new(btilde);
    let bt2 = bt.clone();
    let pair = rate_convert(move |s: f64| b_from_btilde(&bt2, s))?;
    Ok(pair)
}

/// Dissipation constant `E = [½∫s²B̃(s)ds](1 - e²)/4`.
pub fn dissipation_constant(pair: &RatePair, e: f64) -> f64 {
    let second = GaussLegendre::new(64).integrate_on(0.0, 1.0, |s| s * s * pair.btilde(s));
    second * (1.0 - e * e) / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherGrowth {
    pub growth: f64,
    pub c1: f64,
    /// `g - 2E`, the exponent of the Fisher information bound along a trajectory.
    pub trajectory_exponent: f64,
}

pub fn fisher_growth_exponent(r: &Restitution) -> Result<FisherGrowth> {
    if r.e() == 0.0 {
        return Err(Error::OutOfRange {
            name: "e",
            value: 0.0,
            expected: "0 < e <= 1",
        });
    }
    Ok(FisherGrowth {
        growth: r.growth(),
        c1: r.c1(),
        trajectory_exponent: r.growth() - 2.0 * r.dissipation(),
    })
}

/// Effective rates seen from the pre-collisional side of the gain term.
#[derive(Clone)]
pub struct EffectiveRates {
    pair: RatePair,
    speed: SpeedRate,
    e: f64,
}

impl EffectiveRates {
    pub fn new(pair: &RatePair, e: &Restitution) -> Result<Self> {
        Self::with_speed(pair, e, Arc::new(|_| 1.0))
    }

    pub fn with_speed(pair: &RatePair, e: &Restitution, speed: SpeedRate) -> Result<Self> {
        if e.e() == 0.0 {
            return Err(Error::NonInvertible);
        }
        Ok(Self {
            pair: pair.clone(),
            speed,
            e: e.e(),
        })
    }

    pub fn pair(&self) -> &RatePair {
        &self.pair
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn speed(&self, r: f64) -> f64 {
        (self.speed)(r)
    }

    fn a_minus_b(&self, s: f64) -> f64 {
        let e2 = self.e * self.e;
        (1.0 + e2) - (1.0 - e2) * s
    }

    /// `B_e^+(s)`.
    pub fn b_plus(&self, s: f64) -> f64 {
        let e2 = self.e * self.e;
        let d = self.a_minus_b(s);
        let arg = (((1.0 + e2) * s - (1.0 - e2)) / d).clamp(-1.0, 1.0);
        self.pair.b(arg) * std::f64::consts::SQRT_2 / d.sqrt() / self.e
    }

    /// `B̃_e^+(s)`.
    pub fn btilde_plus(&self, s: f64) -> f64 {
        let e2 = self.e * self.e;
        let arg = s / (e2 + (1.0 - e2) * s * s).sqrt();
        self.pair.btilde(arg.clamp(-1.0, 1.0)) / self.e
    }

    /// `Φ_e^+(r, s)`.
    pub fn phi_plus(&self, r: f64, s: f64) -> f64 {
        self.speed(r / (std::f64::consts::SQRT_2 * self.e) * self.a_minus_b(s).sqrt())
    }

    /// `Φ̃_e^+(r, s)`.
    pub fn phitilde_plus(&self, r: f64, s: f64) -> f64 {
        let e2 = self.e * self.e;
        self.speed(r / self.e * (e2 + (1.0 - e2) * s * s).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_pair_is_normalised() {
        let p = RatePair::constant();
        assert!((p.normalization() - 1.0).abs() < 1e-13);
        assert_eq!(p.btilde(-0.25), 0.5);
    }

    #[test]
    fn dissipation_examples() {
        let p = RatePair::constant();
        assert!((dissipation_constant(&p, 0.5) - 0.09375).abs() < 1e-15);
        assert!((dissipation_constant(&p, 0.0) - 0.125).abs() < 1e-15);
        assert_eq!(dissipation_constant(&p, 1.0), 0.0);
        let r = Restitution::with_rates(0.5, &p).unwrap();
        assert!((r.dissipation() - 0.09375).abs() < 1e-15);
    }

    #[test]
    fn quadratic_rate_is_renormalised() {
        // ½∫1.5 s² ds = 1/2, so the normalised rate is 3s²
        let p = rate_convert(|s| 1.5 * s * s).unwrap();
        assert!((p.normalization() - 1.0).abs() < 1e-12);
        for i in 0..=20 {
            let t = -1.0 + 0.1 * i as f64;
            let expect = 6.0 * t.abs() * (1.0 - 2.0 * t * t).powi(2);
            assert!((p.btilde(t) - expect).abs() < 1e-12);
            let s = t;
            assert!((p.b(s) - 3.0 * s * s).abs() < 1e-12);
        }
        for s in check_grid() {
            assert!((b_from_btilde(&p.btilde, s) - p.b(s)).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn constant_rate_from_btilde_round_trips() {
        let p = rate_pair_from_btilde(|t: f64| 2.0 * t.abs()).unwrap();
        for s in check_grid() {
            assert!((p.b(s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_rate_rejected() {
        assert!(matches!(rate_convert(|s| 1.0 + 0.5 * s), Err(Error::InvalidRate(_))));
    }

    #[test]
    fn effective_rate_values() {
        let p = RatePair::constant();
        let r = EffectiveRates::new(&p, &Restitution::new(0.5).unwrap()).unwrap();
        assert!((r.b_plus(1.0) - 4.0).abs() < 1e-14);
        // √2/(e·√(2(1+e²)+2(1-e²))) would give √2; the closed form gives 1/e
        assert!((r.b_plus(-1.0) - 2.0).abs() < 1e-14);
        let el = EffectiveRates::new(&p, &Restitution::new(1.0).unwrap()).unwrap();
        let q = rate_convert(|s| 3.0 * s * s).unwrap();
        let elq = EffectiveRates::new(&q, &Restitution::new(1.0).unwrap()).unwrap();
        for i in 0..=10 {
            let s = -1.0 + 0.2 * i as f64;
            assert!((el.b_plus(s) - 1.0).abs() < 1e-14);
            assert!((elq.b_plus(s) - q.b(s)).abs() < 1e-12);
            assert!((elq.btilde_plus(s) - q.btilde(s)).abs() < 1e-12);
            assert_eq!(el.phi_plus(1.3, s), 1.0);
        }
    }

    #[test]
    fn growth_examples() {
        let g = fisher_growth_exponent(&Restitution::new(0.5).unwrap()).unwrap();
        assert!((g.growth - 3.125).abs() < 1e-14);
        let g = fisher_growth_exponent(&Restitution::new(0.95).unwrap()).unwrap();
        assert!((g.growth - 0.120188803032512).abs() < 1e-14);
        assert!((g.trajectory_exponent - 0.0958138030325120).abs() < 1e-14);
        let g = fisher_growth_exponent(&Restitution::new(1.0).unwrap()).unwrap();
        assert_eq!(g.trajectory_exponent, 0.0);
        assert!(fisher_growth_exponent(&Restitution::new(0.0).unwrap()).is_err());
    }
}
