use super::{default_r_grid, reconstruct, RadialDensity};
use crate::error::Result;
use crate::kinematics::{fisher_growth_exponent, Restitution};
use crate::quadrature::simpson_weights;
use crate::spectral::{evolve, gain_fourier, CharacteristicProfile, DiagnosticSchedule, Frame, SolverConfig};
use std::f64::consts::PI;

const SUPPORT_FLOOR: f64 = 1e-14;

/// `I(f) = 4π ∫ r² f (d ln f/dr)² dr` on the support where `f > 1e-14·max f`.
///
/// The log-derivative uses fourth-order centred differences, with the even
/// extension `f(-r) = f(r)` at the origin.
pub fn fisher_information(f: &RadialDensity) -> f64 {
    let n = f.values.len();
    let peak = f.values.iter().cloned().fold(0.0, f64::max);
    let cut = f.values.iter().position(|&v| v <= SUPPORT_FLOOR * peak).unwrap_or(n);
    if cut < n {
        let dropped = RadialDensity::from_values(
            f.grid,
            f.values
                .iter()
                .enumerate()
                .map(|(i, &v)| if i >= cut { v.max(0.0) } else { 0.0 })
                .collect(),
        )
        .map(|d| d.mass)
        .unwrap_or(0.0);
        if dropped > 1e-6 {
            log::warn!("Fisher support truncation drops {dropped:.3e} of mass");
        }
    }
    let h = f.grid.spacing();
    let ln: Vec<f64> = f.values[..cut].iter().map(|v| v.ln()).collect();
    let at = |i: isize| ln[i.unsigned_abs()];
    let w = simpson_weights(cut, h);
    let mut acc = 0.0;
    for i in 0..cut {
        let ii = i as isize;
        let d = if i + 2 < cut {
            (-at(ii + 2) + 8.0 * at(ii + 1) - 8.0 * at(ii - 1) + at(ii - 2)) / (12.0 * h)
        } else if i + 1 < cut {
            (ln[i + 1] - ln[i - 1]) / (2.0 * h)
        } else {
            (ln[i] - ln[i - 1]) / h
        };
        let r = f.grid.node(i);
        acc += w[i] * r * r * f.values[i] * d * d;
    }
    4.0 * PI * acc
}

/// Reconstruct on the default radial grid and return the Fisher information.
pub fn profile_fisher(phi: &CharacteristicProfile) -> Result<f64> {
    Ok(fisher_information(&reconstruct(phi, default_r_grid(phi)?)?))
}

/// `sup_x x|φ(x)| / √I(f)`, invariant under dilations.
pub fn fourier_sup_vs_fisher(phi: &CharacteristicProfile, f: &RadialDensity) -> f64 {
    let sup = (0..phi.grid.len())
        .map(|i| phi.grid.node(i) * phi.values[i].abs())
        .fold(0.0, f64::max);
    sup / fisher_information(f).sqrt()
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FisherTrajectoryReport {
    pub times: Vec<f64>,
    pub fisher: Vec<f64>,
    pub bound: Vec<f64>,
    pub exponent: f64,
    /// Smallest `bound·(1 + slack) - I` along the run.
    pub min_margin: f64,
    pub holds: bool,
    /// Whether `I(t)` is non-increasing after the first sample.
    pub monotone_after_transient: bool,
}

/// Track `I(g(t))` along a rescaled run and compare with `exp((g - 2E)t)·I(g(0))`.
pub fn fisher_trajectory_check(
    phi0: &CharacteristicProfile,
    restitution: &Restitution,
    config: &SolverConfig,
    times: &[f64],
    slack: f64,
) -> Result<FisherTrajectoryReport> {
    let mut cfg = *config;
    cfg.frame = Frame::Rescaled;
    let schedule = DiagnosticSchedule {
        times: times.to_vec(),
        fisher: true,
        ..DiagnosticSchedule::default()
    };
    let exponent = fisher_growth_exponent(restitution)?.trajectory_exponent;
    let trace = evolve(phi0, restitution, &cfg, &schedule)?;
    let fisher: Vec<f64> = trace.records.iter().map(|r| r.fisher.expect("requested")).collect();
    let i0 = profile_fisher(phi0)?;
    let bound: Vec<f64> = times.iter().map(|t| (exponent * (t - phi0.time)).exp() * i0).collect();
    let min_margin = fisher
        .iter()
        .zip(&bound)
        .map(|(i, b)| b * (1.0 + slack) - i)
        .fold(f64::INFINITY, f64::min);
    let monotone_after_transient = fisher.windows(2).skip(1).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    if min_margin < 0.0 {
        log::error!("Fisher trajectory bound violated; times {times:?} fisher {fisher:?} bound {bound:?}");
    }
    Ok(FisherTrajectoryReport {
        times: times.to_vec(),
        fisher,
        bound,
        exponent,
        min_margin,
        holds: min_margin >= 0.0,
        monotone_after_transient,
    })
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GainFisherReport {
    pub e: f64,
    pub fisher_f: f64,
    pub fisher_gain: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Single application of the gain term: `I(Q⁺(f,f)) ≤ (1 + g(e)) I(f)`.
pub fn gain_fisher_check(phi: &CharacteristicProfile, restitution: &Restitution) -> Result<GainFisherReport> {
    let growth = fisher_growth_exponent(restitution)?.growth;
    let fisher_f = profile_fisher(phi)?;
    let gain = gain_fourier(phi, restitution)?;
    let fisher_gain = profile_fisher(&gain)?;
    let bound = (1.0 + growth) * fisher_f;
    Ok(GainFisherReport {
        e: restitution.e(),
        fisher_f,
        fisher_gain,
        bound,
        holds: fisher_gain <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::RadialGrid;

    #[test]
    fn maxwellian_fisher() {
        for theta in [1.0, 2.0] {
            let f = RadialDensity::maxwellian(RadialGrid::new(1201, 12.0 * f64::sqrt(theta)).unwrap(), theta);
            let i = fisher_information(&f);
            assert!((i - 3.0 / theta).abs() < 1e-7, "{theta}: {i}");
        }
    }

    #[test]
    fn dilation_covariance() {
        let grid = RadialGrid::new(1201, 12.0).unwrap();
        let f = RadialDensity::from_fn(grid, |r| {
            0.5 * super::super::maxwellian_value(r, 0.6) + 0.5 * super::super::maxwellian_value(r, 1.4)
        })
        .unwrap();
        let i = fisher_information(&f);
        for lambda in [0.5, 2.0] {
            let g = f.dilate(lambda).unwrap();
            let j = fisher_information(&g);
            assert!((j / (lambda * lambda * i) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_fisher_oracle() {
        let phi = CharacteristicProfile::default_initial(RadialGrid::new(4096, 50.0).unwrap());
        let i = profile_fisher(&phi).unwrap();
        assert!((i - 3.14345365361958).abs() < 1e-6, "{i}");
    }

    #[test]
    fn sup_ratio_maxwellian() {
        let expect = (-0.5f64).exp() / 3f64.sqrt();
        for theta in [0.5, 1.0, 2.0] {
            let phi = CharacteristicProfile::maxwellian(RadialGrid::new(8192, 50.0).unwrap(), theta);
            let f = reconstruct(&phi, default_r_grid(&phi).unwrap()).unwrap();
            let ratio = fourier_sup_vs_fisher(&phi, &f);
            assert!((ratio - expect).abs() < 1e-4, "{theta}: {ratio}");
        }
    }
}
