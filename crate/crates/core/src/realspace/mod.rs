//! Real-space side: radial densities reconstructed from characteristic
//! profiles, and the functionals evaluated on them.
//!
//! With `f̂(η) = ∫ e^{-iη·v} f(v) dv` the radial inverse is
//!
//! `f(r) = (1/(2π²r)) ∫₀^∞ φ(x) x sin(xr) dx`.

mod fisher;
mod inequalities;

pub use fisher::{
    fisher_information, fisher_trajectory_check, fourier_sup_vs_fisher, gain_fisher_check, profile_fisher,
    FisherTrajectoryReport, GainFisherReport,
};
pub use inequalities::{
    entropy_route_check, inequality_suite, interpolation_check, l1_distance, l1_rate, l2_moment_l1_check, l2_norm,
    nash_check, relative_entropy, EntropyRoute, InequalityKind, InequalityOutcome, InequalityParams, SuiteReport,
};

use crate::error::{Error, Result};
use crate::interp::{InterpKind, UniformInterpolant};
use crate::quadrature::simpson_weights;
use crate::spectral::{CharacteristicProfile, RadialGrid};
use std::f64::consts::PI;
use std::io::{BufRead, Write};

const CLIP_BUDGET: f64 = 1e-6;
const MASS_TOL: f64 = 1e-6;

/// Samples of an isotropic density `f(|v|)` on a uniform radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensity {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub mass: f64,
    pub m2: f64,
    /// Mass removed by clipping negative lobes to zero.
    pub clipped: f64,
}

impl RadialDensity {
    pub fn from_values(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} radial nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("density values"));
        }
        let mut d = Self {
            grid,
            values,
            mass: 0.0,
            m2: 0.0,
            clipped: 0.0,
        };
        d.mass = d.radial_integral(|_, f| f);
        d.m2 = d.radial_integral(|r, f| r * r * f);
        Ok(d)
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: RadialGrid, f: F) -> Result<Self> {
        Self::from_values(grid, (0..grid.len()).map(|i| f(grid.node(i))).collect())
    }

    /// `(2πθ)^{-3/2} exp(-r²/(2θ))`.
    pub fn maxwellian(grid: RadialGrid, theta: f64) -> Self {
        Self::from_fn(grid, |r| maxwellian_value(r, theta)).expect("finite")
    }

    /// `4π ∫ r² F(r, f(r)) dr` by Simpson's rule.
    pub fn radial_integral<F: Fn(f64, f64) -> f64>(&self, integrand: F) -> f64 {
        let w = simpson_weights(self.grid.len(), self.grid.spacing());
        4.0 * PI
            * self
                .values
                .iter()
                .enumerate()
                .map(|(i, &f)| {
                    let r = self.grid.node(i);
                    w[i] * r * r * integrand(r, f)
                })
                .sum::<f64>()
    }

    /// `4π ∫ r² |F(i, r)| dr`. Panels where the integrand changes sign are
    /// integrated exactly through the local quadratic, so the kinks of `|·|`
    /// cost no accuracy.
    pub fn radial_abs_integral<F: Fn(usize, f64) -> f64>(&self, integrand: F) -> f64 {
        let h = self.grid.spacing();
        let y: Vec<f64> = (0..self.grid.len())
            .map(|i| {
                let r = self.grid.node(i);
                r * r * integrand(i, r)
            })
            .collect();
        4.0 * PI * abs_integral(&y, h)
    }

    pub fn temperature(&self) -> f64 {
        self.m2 / 3.0
    }

    /// `∫|v|^{2p} |f| dv`.
    pub fn abs_moment(&self, p: f64) -> f64 {
        self.radial_abs_integral(|i, r| r.powf(2.0 * p) * self.values[i])
    }

    /// `λ³ f(λ·)`, sampled on the grid scaled by `1/λ`. Exact on samples.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        let grid = RadialGrid::new(self.grid.len(), self.grid.x_max() / lambda)?;
        let l3 = lambda.powi(3);
        Self::from_values(grid, self.values.iter().map(|f| l3 * f).collect())
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("densities live on different radial grids".into()));
        }
        Ok(())
    }
}

// ∫|y| over uniform samples: Simpson panels, with panels containing a sign
// change integrated piecewise through their interpolating quadratic.
fn abs_integral(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut k = 0;
    while k + 2 < n {
        let (y0, y1, y2) = (y[k], y[k + 1], y[k + 2]);
        if y0 * y1 > 0.0 && y1 * y2 > 0.0 || (y0 == 0.0 && y1 == 0.0 && y2 == 0.0) {
            acc += h / 3.0 * (y0.abs() + 4.0 * y1.abs() + y2.abs());
        } else {
            // q(t) = y0 + a t + b t², t in [0, 2]
            let b = 0.5 * (y2 - 2.0 * y1 + y0);
            let a = y1 - y0 - b;
            let antiderivative = |t: f64| y0 * t + 0.5 * a * t * t + b * t * t * t / 3.0;
            let mut cuts = vec![0.0];
            let mut roots = quadratic_roots(b, a, y0);
            roots.retain(|&t| t > 0.0 && t < 2.0);
            roots.sort_by(f64::total_cmp);
            cuts.extend(roots);
            cuts.push(2.0);
            for w in cuts.windows(2) {
                acc += h * (antiderivative(w[1]) - antiderivative(w[0])).abs();
            }
        }
        k += 2;
    }
    if k + 1 < n {
        let (y0, y1) = (y[k], y[k + 1]);
        acc += if y0 * y1 >= 0.0 {
            0.5 * h * (y0.abs() + y1.abs())
        } else {
            0.5 * h * (y0 * y0 + y1 * y1) / (y0.abs() + y1.abs())
        };
    }
    acc
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut r = Vec::with_capacity(2);
    if q != 0.0 {
        r.push(c / q);
    }
    r.push(q / a);
    r
}

pub(crate) fn maxwellian_value(r: f64, theta: f64) -> f64 {
    (2.0 * PI * theta).powf(-1.5) * (-0.5 * r * r / theta).exp()
}

/// Radial grid wide enough for a profile of the given temperature.
pub fn default_r_grid(phi: &CharacteristicProfile) -> Result<RadialGrid> {
    let theta = phi.temperature();
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::OutOfRange {
            name: "temperature",
            value: theta,
            expected: "positive",
        });
    }
    RadialGrid::new(1201, 12.0 * theta.sqrt())
}

/// Radial inverse transform by composite Simpson in `x`.
pub fn reconstruct(phi: &CharacteristicProfile, r_grid: RadialGrid) -> Result<RadialDensity> {
    let tail = phi.values.last().map(|v| v.abs()).unwrap_or(0.0);
    if tail > 1e-8 {
        return Err(Error::NotDecayed { tail });
    }
    // At least 20 samples per period of sin(x r_max); refine by interpolation if not.
    let h0 = phi.grid.spacing();
    let r_max = r_grid.x_max();
    let per_period = 2.0 * PI / (r_max * h0);
    let refine = if per_period >= 20.0 {
        1
    } else {
        (20.0 / per_period).ceil() as usize
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = if refine == 1 {
        (phi.grid.nodes(), phi.values.clone())
    } else {
        let it = UniformInterpolant::new(&phi.values, InterpKind::CubicMonotone);
        let m = (phi.values.len() - 1) * refine + 1;
        (0..m)
            .map(|j| {
                let pos = j as f64 / refine as f64;
                (pos * h0, it.value_index(pos))
            })
            .unzip()
    };
    let h = h0 / refine as f64;
    let w = simpson_weights(xs.len(), h);
    let wy: Vec<f64> = w.iter().zip(&ys).zip(&xs).map(|((w, y), x)| w * y * x).collect();
    let c = 1.0 / (2.0 * PI * PI);
    let mut values = Vec::with_capacity(r_grid.len());
    for k in 0..r_grid.len() {
        let r = r_grid.node(k);
        let f = if r == 0.0 {
            c * wy.iter().zip(&xs).map(|(a, x)| a * x).sum::<f64>()
        } else {
            c / r * wy.iter().zip(&xs).map(|(a, x)| a * (x * r).sin()).sum::<f64>()
        };
        values.push(f);
    }
    let mut negative = vec![0.0; values.len()];
    for (n, v) in negative.iter_mut().zip(values.iter_mut()) {
        if *v < 0.0 {
            *n = -*v;
            *v = 0.0;
        }
    }
    let neg = RadialDensity::from_values(r_grid, negative)?;
    if neg.mass > CLIP_BUDGET {
        return Err(Error::ClippedMass {
            clipped: neg.mass,
            suggested_x_max: 2.0 * phi.grid.x_max(),
        });
    }
    if neg.mass > 0.0 {
        log::debug!("reconstruction clipped {:.3e} of negative mass", neg.mass);
    }
    let mut density = RadialDensity::from_values(r_grid, values)?;
    density.clipped = neg.mass;
    if (density.mass - 1.0).abs() > MASS_TOL {
        return Err(Error::MassDefect {
            mass: density.mass,
            tol: MASS_TOL,
        });
    }
    Ok(density)
}

/// Forward radial transform `φ(x) = (4π/x) ∫ r f(r) sin(xr) dr` at the given frequencies.
pub fn forward_transform(f: &RadialDensity, xs: &[f64]) -> Vec<f64> {
    let w = simpson_weights(f.grid.len(), f.grid.spacing());
    let rs = f.grid.nodes();
    xs.iter()
        .map(|&x| {
            let s: f64 = (0..rs.len())
                .map(|i| {
                    let r = rs[i];
                    let k = if x == 0.0 { r * r } else { r * (x * r).sin() / x };
                    w[i] * f.values[i] * k
                })
                .sum();
            4.0 * PI * s
        })
        .collect()
}

const MAGIC: &str = "# maxcool-density v1";

pub fn write_density<W: Write>(mut out: W, f: &RadialDensity) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    for (i, v) in f.values.iter().enumerate() {
        writeln!(out, "{:e},{:e}", f.grid.node(i), v)?;
    }
    Ok(())
}

pub fn read_density<R: BufRead>(input: R) -> Result<RadialDensity> {
    let mut lines = input.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty density file".into()))??;
    if first.trim() != MAGIC {
        return Err(Error::Parse(format!("missing `{MAGIC}` header")));
    }
    let mut rs = Vec::new();
    let mut fs = Vec::new();
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (r, f) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad row `{line}`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{s}`")))
        };
        rs.push(parse(r)?);
        fs.push(parse(f)?);
    }
    let grid = RadialGrid::new(rs.len(), *rs.last().ok_or(Error::TooFewPoints(0))?)?;
    for (i, r) in rs.iter().enumerate() {
        if (r - grid.node(i)).abs() > 1e-9 * grid.x_max() {
            return Err(Error::GridMismatch(format!(
                "node {i} at {r} is not on a uniform grid from 0"
            )));
        }
    }
    RadialDensity::from_values(grid, fs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_grid() -> RadialGrid {
        RadialGrid::new(4096, 50.0).unwrap()
    }

    #[test]
    fn gaussian_pair() {
        let phi = CharacteristicProfile::maxwellian(phi_grid(), 1.0);
        let rg = default_r_grid(&phi).unwrap();
        let f = reconstruct(&phi, rg).unwrap();
        let err = (0..rg.len())
            .map(|i| (f.values[i] - maxwellian_value(rg.node(i), 1.0)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        assert!((f.mass - 1.0).abs() < 1e-9);
        assert!((f.m2 - 3.0).abs() < 1e-6);
    }

    #[test]
    fn mixture_pair() {
        let phi = CharacteristicProfile::default_initial(phi_grid());
        let rg = default_r_grid(&phi).unwrap();
        let f = reconstruct(&phi, rg).unwrap();
        let err = (0..rg.len())
            .map(|i| {
                let r = rg.node(i);
                let exact = 0.5 * maxwellian_value(r, 0.6) + 0.5 * maxwellian_value(r, 1.4);
                (f.values[i] - exact).abs()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        assert!((f.mass - 1.0).abs() < 1e-6);
        let m2 = crate::spectral::moment(&phi, crate::spectral::MomentOrder::Second);
        assert!((f.m2 - m2).abs() < 1e-4 * m2);
    }

    #[test]
    fn coarse_grid_is_refined() {
        let phi = CharacteristicProfile::maxwellian(RadialGrid::new(400, 20.0).unwrap(), 1.0);
        let rg = RadialGrid::new(601, 12.0).unwrap();
        let f = reconstruct(&phi, rg).unwrap();
        assert!((f.mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn undecayed_profile_rejected() {
        let phi = CharacteristicProfile::maxwellian(RadialGrid::new(256, 3.0).unwrap(), 1.0);
        assert!(matches!(
            reconstruct(&phi, RadialGrid::new(301, 12.0).unwrap()),
            Err(Error::NotDecayed { .. })
        ));
    }

    #[test]
    fn transform_round_trip() {
        let phi = CharacteristicProfile::default_initial(phi_grid());
        let f = reconstruct(&phi, default_r_grid(&phi).unwrap()).unwrap();
        let xs: Vec<f64> = (0..200).map(|i| i as f64 * 0.125).collect();
        let back = forward_transform(&f, &xs);
        for (x, b) in xs.iter().zip(&back) {
            let exact = 0.5 * (-0.3 * x * x).exp() + 0.5 * (-0.7 * x * x).exp();
            assert!((b - exact).abs() < 1e-5, "{x}: {b} vs {exact}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let f = RadialDensity::maxwellian(RadialGrid::new(300, 10.0).unwrap(), 1.3);
        let mut buf = Vec::new();
        write_density(&mut buf, &f).unwrap();
        let back = read_density(&buf[..]).unwrap();
        assert_eq!(back.values, f.values);
    }
}
