use super::{maxwellian_value, RadialDensity};
use crate::error::{Error, Result};
use crate::spectral::{d2_distance, d2_limit_at_zero, sobolev_norm, CharacteristicProfile};
use serde::Serialize;

/// `4π ∫ r² |f1 - f2| dr`.
pub fn l1_distance(f1: &RadialDensity, f2: &RadialDensity) -> Result<f64> {
    f1.same_grid(f2)?;
    Ok(f1.radial_abs_integral(|i, _| f1.values[i] - f2.values[i]))
}

/// `(4π ∫ r² f² dr)^{1/2}`.
pub fn l2_norm(f: &RadialDensity) -> f64 {
    f.radial_integral(|_, v| v * v).sqrt()
}

/// `H(f|M_θ) = ∫ f ln(f/M_θ)`, over the points where `f > 0`.
pub fn relative_entropy(f: &RadialDensity, theta: f64) -> f64 {
    f.radial_integral(|r, v| {
        if v > 0.0 {
            v * (v / maxwellian_value(r, theta)).ln()
        } else {
            0.0
        }
    })
}

/// The chain `½‖f - M‖₁² ≤ H(f|M) ≤ I(f) - I(M)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropyRoute {
    pub theta: f64,
    pub half_l1_squared: f64,
    pub entropy: f64,
    pub fisher_gap: f64,
    pub csiszar_kullback: bool,
    pub log_sobolev: bool,
}

impl EntropyRoute {
    pub fn holds(&self) -> bool {
        self.csiszar_kullback && self.log_sobolev
    }
}

/// Evaluate the entropy chain against the Maxwellian of temperature `θ`.
///
/// The log-Sobolev step is `H ≤ (θ/2)(I(f) - 3/θ)`; with constant one, as
/// used here, it needs `θ ≤ 2`.
pub fn entropy_route_check(f: &RadialDensity, theta: f64) -> Result<EntropyRoute> {
    if !(theta > 0.0) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            expected: "theta > 0",
        });
    }
    if (f.temperature() - theta).abs() > 1e-4 * theta {
        log::warn!(
            "entropy chain: density temperature {} differs from {theta}",
            f.temperature()
        );
    }
    let m = RadialDensity::maxwellian(f.grid, theta);
    let l1 = l1_distance(f, &m)?;
    let entropy = relative_entropy(f, theta);
    let fisher_gap = super::fisher_information(f) - 3.0 / theta;
    // rounding allowance for the f = M case
    let tiny = 1e-10;
    Ok(EntropyRoute {
        theta,
        half_l1_squared: 0.5 * l1 * l1,
        entropy,
        fisher_gap,
        csiszar_kullback: 0.5 * l1 * l1 <= entropy + tiny,
        log_sobolev: entropy <= fisher_gap + tiny,
    })
}

/// Rate of `L¹` convergence obtained from an `L²` rate `γ̃`.
pub fn l1_rate(gamma_tilde: f64) -> f64 {
    8.0 / 11.0 * gamma_tilde
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    Nash,
    Interpolation,
    L2MomentL1,
}

/// One evaluated inequality in the form `lhs ≤ rhs`.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityOutcome {
    pub kind: InequalityKind,
    pub params: Vec<(String, f64)>,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs/lhs - 1`.
    pub slack: f64,
    pub holds: bool,
}

impl InequalityOutcome {
    fn new(kind: InequalityKind, params: Vec<(&str, f64)>, lhs: f64, rhs: f64) -> Self {
        let slack = if lhs > 0.0 { rhs / lhs - 1.0 } else { f64::INFINITY };
        Self {
            kind,
            params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            lhs,
            rhs,
            slack,
            holds: lhs <= rhs && lhs.is_finite() && rhs.is_finite(),
        }
    }
}

/// `c_{r,δ} ‖g‖_{Ḣ^{r-δ/2}}^{(2r+3)/(2r+3-δ)} ≤ ‖g‖_{Ḣ^r}`.
pub fn nash_check(phi: &CharacteristicProfile, r: f64, delta: f64) -> Result<InequalityOutcome> {
    if !(delta > 0.0 && delta < 1.0 && r >= 0.5 * delta) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            expected: "0 < delta < 1 and r >= delta/2",
        });
    }
    let m = 2.0 * r + 3.0 - delta;
    let c = (0.5 / std::f64::consts::PI).powf(2.0 / m) * (m / (2.0 * r + 3.0)).powf((2.0 * r + 3.0) / m);
    let low = sobolev_norm(phi, r - 0.5 * delta)?;
    let high = sobolev_norm(phi, r)?;
    Ok(InequalityOutcome::new(
        InequalityKind::Nash,
        vec![("r", r), ("delta", delta), ("c", c)],
        c * low.powf((2.0 * r + 3.0) / m),
        high,
    ))
}

fn difference(phi: &CharacteristicProfile, other: &CharacteristicProfile) -> CharacteristicProfile {
    CharacteristicProfile {
        grid: phi.grid,
        values: phi.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        time: phi.time,
    }
}

/// `‖f-g‖_{Ḣ^s} ≤ C(β1,β2) d2(f,g)^{1-β2} min(‖f-g‖_{Ḣ^{r1}}, ‖f-g‖_{Ḣ^{r2}})^{β2}`.
pub fn interpolation_check(
    phi: &CharacteristicProfile,
    other: &CharacteristicProfile,
    s: f64,
    beta1: f64,
    beta2: f64,
) -> Result<InequalityOutcome> {
    if !(beta1 > 0.0 && beta2 > 0.0 && beta2 < 1.0 && s >= 0.0) {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta2,
            expected: "s >= 0, beta1 > 0, 0 < beta2 < 1",
        });
    }
    let r1 = (s + 2.0 * (1.0 - beta2)) / beta2;
    let r2 = (2.0 * s + (7.0 + beta1) * (1.0 - beta2)) / (2.0 * beta2);
    let c = (4.0 * std::f64::consts::PI / 3.0 * (1.0 + 3.0 / beta1)).powf(1.0 - beta2);
    // the supremum over η ≠ 0 includes the small-|η| limit
    let d2 = d2_distance(phi, other, None)?.max(d2_limit_at_zero(phi, other));
    let diff = difference(phi, other);
    let lhs = sobolev_norm(&diff, s)?;
    let high = sobolev_norm(&diff, r1)?.min(sobolev_norm(&diff, r2)?);
    Ok(InequalityOutcome::new(
        InequalityKind::Interpolation,
        vec![
            ("s", s),
            ("beta1", beta1),
            ("beta2", beta2),
            ("r1", r1),
            ("r2", r2),
            ("C", c),
        ],
        lhs,
        c * d2.powf(1.0 - beta2) * high.powf(beta2),
    ))
}

/// `∫|h| ≤ C(p) (∫h²)^{2p/(3+4p)} (∫|v|^{2p}|h|)^{3/(3+4p)}`.
pub fn l2_moment_l1_check(h: &RadialDensity, p: f64) -> Result<InequalityOutcome> {
    if !(p > 0.0) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            expected: "p > 0",
        });
    }
    let a = 2.0 * p / (3.0 + 4.0 * p);
    let b = 3.0 / (3.0 + 4.0 * p);
    let c = ((3.0 / (4.0 * p)).powf(4.0 * p / (3.0 + 4.0 * p)) + (4.0 * p / 3.0).powf(b))
        * (4.0 * std::f64::consts::PI / 3.0).powf(a);
    let l1 = h.abs_moment(0.0);
    let l2sq = h.radial_integral(|_, v| v * v);
    let mom = h.abs_moment(p);
    Ok(InequalityOutcome::new(
        InequalityKind::L2MomentL1,
        vec![("p", p), ("C", c)],
        l1,
        c * l2sq.powf(a) * mom.powf(b),
    ))
}

/// Parameter grids for [`inequality_suite`].
#[derive(Debug, Clone, Serialize)]
pub struct InequalityParams {
    /// `(r, δ)` pairs.
    pub nash: Vec<(f64, f64)>,
    /// `(β1, β2)` pairs, evaluated at `s`.
    pub interpolation: Vec<(f64, f64)>,
    pub s: f64,
    /// Temperature ratio of the Maxwellian partner in the interpolation check.
    pub partner_ratio: f64,
    /// Moment orders `p`.
    pub moments: Vec<f64>,
    /// The `L²+moment` bound is applied to `f` and to `f - M_{κθ}` for these `κ`.
    pub moment_partners: Vec<f64>,
}

fn grid2(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

impl Default for InequalityParams {
    fn default() -> Self {
        Self {
            nash: grid2(&[0.5, 1.0, 2.0], &[0.25, 0.5, 0.75]),
            interpolation: grid2(&[0.5, 1.0, 2.0], &[0.5, 0.6, 0.75]),
            s: 0.0,
            partner_ratio: 1.2,
            moments: vec![1.0, 2.0, 3.0],
            moment_partners: vec![1.2, 0.8],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub outcomes: Vec<InequalityOutcome>,
}

impl SuiteReport {
    pub fn all_hold(&self) -> bool {
        self.outcomes.iter().all(|o| o.holds)
    }

    pub fn min_slack(&self) -> f64 {
        self.outcomes.iter().map(|o| o.slack).fold(f64::INFINITY, f64::min)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InequalityOutcome> {
        self.outcomes.iter().filter(|o| !o.holds)
    }
}

/// Evaluate every inequality of the suite on a matched profile/density pair.
pub fn inequality_suite(
    phi: &CharacteristicProfile,
    f: &RadialDensity,
    params: &InequalityParams,
) -> Result<SuiteReport> {
    let mut outcomes = Vec::new();
    for &(r, delta) in &params.nash {
        outcomes.push(nash_check(phi, r, delta)?);
    }
    let theta = phi.temperature();
    let partner = CharacteristicProfile::maxwellian(phi.grid, params.partner_ratio * theta);
    for &(b1, b2) in &params.interpolation {
        outcomes.push(interpolation_check(phi, &partner, params.s, b1, b2)?);
    }
    let theta_f = f.temperature();
    let mut targets = vec![f.clone()];
    for &k in &params.moment_partners {
        let m = RadialDensity::maxwellian(f.grid, k * theta_f);
        targets.push(RadialDensity::from_values(
            f.grid,
            f.values.iter().zip(&m.values).map(|(a, b)| a - b).collect(),
        )?);
    }
    for h in &targets {
        for &p in &params.moments {
            outcomes.push(l2_moment_l1_check(h, p)?);
        }
    }
    for o in outcomes.iter().filter(|o| !o.holds) {
        log::error!("inequality failed: {o:?}");
    }
    Ok(SuiteReport { outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realspace::{default_r_grid, reconstruct};
    use crate::spectral::RadialGrid;

    fn grid() -> RadialGrid {
        RadialGrid::new(4096, 50.0).unwrap()
    }

    #[test]
    fn l1_between_maxwellians() {
        let rg = RadialGrid::new(2401, 14.0).unwrap();
        let a = RadialDensity::maxwellian(rg, 1.0);
        let b = RadialDensity::maxwellian(rg, 1.2);
        assert_eq!(l1_distance(&a, &a).unwrap(), 0.0);
        assert!((l1_distance(&a, &b).unwrap() - 0.168312729121393).abs() < 1e-8);
    }

    #[test]
    fn parseval() {
        let phi = CharacteristicProfile::default_initial(grid());
        let f = reconstruct(&phi, default_r_grid(&phi).unwrap()).unwrap();
        let lhs = l2_norm(&f);
        let rhs = (2.0 * std::f64::consts::PI).powf(-1.5) * sobolev_norm(&phi, 0.0).unwrap();
        assert!((lhs / rhs - 1.0).abs() < 1e-5);
    }

    #[test]
    fn entropy_chain_examples() {
        let rg = RadialGrid::new(1201, 12.0).unwrap();
        let m = RadialDensity::maxwellian(rg, 1.0);
        let route = entropy_route_check(&m, 1.0).unwrap();
        assert!(route.entropy.abs() < 1e-9 && route.half_l1_squared < 1e-18 && route.fisher_gap.abs() < 1e-6);
        let mix =
            RadialDensity::from_fn(rg, |r| 0.5 * maxwellian_value(r, 0.6) + 0.5 * maxwellian_value(r, 1.4)).unwrap();
        let route = entropy_route_check(&mix, 1.0).unwrap();
        assert!(route.holds());
        assert!((route.entropy - 0.0188762867651133).abs() < 1e-8);
        assert!(
            (route.half_l1_squared - 0.5 * 0.144681820486897f64.powi(2)).abs() < 1e-8,
            "{route:?}"
        );
        assert!((route.fisher_gap - 0.143453653619584).abs() < 1e-6);
    }

    #[test]
    fn interpolation_exponents() {
        let phi = CharacteristicProfile::maxwellian(grid(), 1.0);
        let other = CharacteristicProfile::maxwellian(grid(), 1.2);
        let o = interpolation_check(&phi, &other, 0.0, 1.0, 0.5).unwrap();
        let get = |k: &str| o.params.iter().find(|(n, _)| n == k).unwrap().1;
        assert_eq!(get("r1"), 2.0);
        assert_eq!(get("r2"), 4.0);
        assert!(o.holds, "{o:?}");
    }

    #[test]
    fn l2_to_l1_exponents_at_p2() {
        let rg = RadialGrid::new(1201, 12.0).unwrap();
        let mix =
            RadialDensity::from_fn(rg, |r| 0.5 * maxwellian_value(r, 0.6) + 0.5 * maxwellian_value(r, 1.4)).unwrap();
        let o = l2_moment_l1_check(&mix, 2.0).unwrap();
        assert!((o.lhs - 1.0).abs() < 1e-9);
        let c = o.params[1].1;
        let direct = c * mix.radial_integral(|_, v| v * v).powf(4.0 / 11.0) * 17.4f64.powf(3.0 / 11.0);
        assert!((o.rhs / direct - 1.0).abs() < 1e-6);
        assert!(o.holds);
    }

    #[test]
    fn suite_on_maxwellian() {
        let phi = CharacteristicProfile::maxwellian(grid(), 1.0);
        let f = reconstruct(&phi, default_r_grid(&phi).unwrap()).unwrap();
        let rep = inequality_suite(&phi, &f, &InequalityParams::default()).unwrap();
        assert_eq!(rep.outcomes.len(), 9 + 9 + 9);
        assert!(rep.all_hold(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert!(rep.min_slack() > 0.0);
    }

    #[test]
    fn l1_rate_factor() {
        assert!((l1_rate(0.11) - 0.08).abs() < 1e-15);
    }
}
