//! Kac-style particle simulation of the three-dimensional model.
//!
//! An [`Ensemble`] is an empirical measure of `N` velocities. Time is cut into
//! steps of length `dt`; each step draws a Poisson number of pair events with
//! mean `N dt / 2` (the loss rate per particle is one), and every event picks a
//! uniform distinct pair, samples `σ` from `B(k·σ)/4π` and applies the
//! swapping collision map.

mod ecf;
mod series;

pub use ecf::{ecf, ecf_dilated, fibonacci_directions, EcfEstimate, ECF_DIRECTIONS};
pub use series::{read_series, rescaled_estimates, write_series, DsmcRecord, DsmcSeries, SeriesFrame};

use crate::error::{Error, Result};
use crate::kinematics::{collide, CollisionTriple, Param, RatePair, Restitution, UnitVector3};
use crate::rng::{substream, Domain};
use crate::spectral::{CharacteristicProfile, RadialGrid};
use crate::Vec3;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

/// Isotropic initial law for particles or for the spectral solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialSpec {
    /// Centred Gaussian with per-component temperature `theta`.
    Maxwellian { theta: f64 },
    /// `p M_{θ1} + (1-p) M_{θ2}`.
    Mixture { p: f64, theta1: f64, theta2: f64 },
}

impl InitialSpec {
    /// Per-component temperature of the law.
    pub fn temperature(&self) -> f64 {
        match *self {
            InitialSpec::Maxwellian { theta } => theta,
            InitialSpec::Mixture { p, theta1, theta2 } => p * theta1 + (1.0 - p) * theta2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, expected| Err(Error::OutOfRange { name, value, expected });
        match *self {
            InitialSpec::Maxwellian { theta } if !(theta > 0.0 && theta.is_finite()) => {
                bad("theta", theta, "theta > 0")
            }
            InitialSpec::Mixture { p, .. } if !(0.0..=1.0).contains(&p) => bad("p", p, "0 <= p <= 1"),
            InitialSpec::Mixture { theta1, theta2, .. } if !(theta1 > 0.0 && theta2 > 0.0) => {
                bad("theta", theta1.min(theta2), "theta1, theta2 > 0")
            }
            _ => Ok(()),
        }
    }

    /// The characteristic profile of the law on `grid`.
    pub fn profile(&self, grid: RadialGrid) -> Result<CharacteristicProfile> {
        self.validate()?;
        match *self {
            InitialSpec::Maxwellian { theta } => Ok(CharacteristicProfile::maxwellian(grid, theta)),
            InitialSpec::Mixture { p, theta1, theta2 } => CharacteristicProfile::bi_maxwellian(grid, p, theta1, theta2),
        }
    }
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Mixture {
            p: 0.5,
            theta1: 0.6,
            theta2: 1.4,
        }
    }
}

impl std::fmt::Display for InitialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialSpec::Maxwellian { theta } => write!(f, "maxwellian:{theta}"),
            InitialSpec::Mixture { p, theta1, theta2 } => write!(f, "bimax:{p},{theta1},{theta2}"),
        }
    }
}

/// Parses `maxwellian:θ` or `bimax:p,θ1,θ2`.
impl std::str::FromStr for InitialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = args
            .split(',')
            .filter(|a| !a.trim().is_empty())
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number `{a}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = match (kind.trim(), nums.as_slice()) {
            ("maxwellian" | "max", []) => InitialSpec::Maxwellian { theta: 1.0 },
            ("maxwellian" | "max", [theta]) => InitialSpec::Maxwellian { theta: *theta },
            ("bimax" | "mixture", [p, t1, t2]) => InitialSpec::Mixture {
                p: *p,
                theta1: *t1,
                theta2: *t2,
            },
            _ => {
                return Err(Error::Parse(format!(
                    "unknown initial data `{s}` (expected maxwellian:θ or bimax:p,θ1,θ2)"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Particle ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub velocities: Vec<Vec3>,
    pub t: f64,
    pub seed: u64,
    pub e: f64,
    pub collisions_applied: u64,
    /// Number of completed steps; keys the per-step random stream.
    pub steps: u64,
}

impl Ensemble {
    pub fn from_velocities(velocities: Vec<Vec3>, e: f64, seed: u64) -> Result<Self> {
        if velocities.len() < 2 {
            return Err(Error::OutOfRange {
                name: "N",
                value: velocities.len() as f64,
                expected: "N >= 2",
            });
        }
        Restitution::new(e)?;
        Ok(Self {
            velocities,
            t: 0.0,
            seed,
            e,
            collisions_applied: 0,
            steps: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.velocities.is_empty()
    }

    pub fn mean_velocity(&self) -> Vec3 {
        self.velocities.iter().sum::<Vec3>() / self.len() as f64
    }

    /// `(1/N) Σ |v_i|²`.
    pub fn m2(&self) -> f64 {
        self.velocities.iter().map(|v| v.norm_squared()).sum::<f64>() / self.len() as f64
    }

    /// `(1/N) Σ |v_i|⁴`.
    pub fn m4(&self) -> f64 {
        self.velocities.iter().map(|v| v.norm_squared().powi(2)).sum::<f64>() / self.len() as f64
    }

    /// Total kinetic energy `Σ |v_i|²`.
    pub fn energy(&self) -> f64 {
        self.velocities.iter().map(|v| v.norm_squared()).sum()
    }
}

/// Draws `n` i.i.d. velocities from `spec`, removes the sample mean and
/// rescales so the empirical second moment equals `3θ` exactly.
pub fn sample_initial(spec: InitialSpec, n: usize, e: f64, seed: u64) -> Result<Ensemble> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::OutOfRange {
            name: "N",
            value: n as f64,
            expected: "N >= 2",
        });
    }
    let mut rng = substream(seed, Domain::InitialSample, 0);
    let gauss = |theta: f64, rng: &mut rand_chacha::ChaCha8Rng| {
        let s = theta.sqrt();
        Vec3::new(
            s * rng.sample::<f64, _>(StandardNormal),
            s * rng.sample::<f64, _>(StandardNormal),
            s * rng.sample::<f64, _>(StandardNormal),
        )
    };
    let mut velocities: Vec<Vec3> = (0..n)
        .map(|_| match spec {
            InitialSpec::Maxwellian { theta } => gauss(theta, &mut rng),
            InitialSpec::Mixture { p, theta1, theta2 } => {
                let theta = if rng.random::<f64>() < p { theta1 } else { theta2 };
                gauss(theta, &mut rng)
            }
        })
        .collect();
    let mean = velocities.iter().sum::<Vec3>() / n as f64;
    velocities.iter_mut().for_each(|v| *v -= mean);
    let m2 = velocities.iter().map(|v| v.norm_squared()).sum::<f64>() / n as f64;
    let scale = (3.0 * spec.temperature() / m2).sqrt();
    velocities.iter_mut().for_each(|v| *v *= scale);
    Ensemble::from_velocities(velocities, e, seed)
}

/// Settings for [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t_max: f64,
    pub dt: f64,
    /// Time between recorded estimates; rounded to a whole number of steps.
    pub record_every: f64,
    /// Radial frequencies for the empirical characteristic function.
    pub x_grid: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            t_max: 10.0,
            dt: 0.01,
            record_every: 0.5,
            x_grid: (0..=40).map(|k| 0.25 * k as f64).collect(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return Err(Error::OutOfRange {
                name: "dt",
                value: self.dt,
                expected: "0 < dt <= 0.1",
            });
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::OutOfRange {
                name: "t_max",
                value: self.t_max,
                expected: "t_max >= 0",
            });
        }
        if !(self.record_every > 0.0) {
            return Err(Error::OutOfRange {
                name: "record_every",
                value: self.record_every,
                expected: "record_every > 0",
            });
        }
        if self.x_grid.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Parse("x grid must be finite and non-negative".into()));
        }
        Ok(())
    }

    fn record_stride(&self) -> u64 {
        ((self.record_every / self.dt).round() as u64).max(1)
    }
}

/// Samples `σ` with density `B(k·σ)/4π` by rejection from the uniform law.
struct SigmaSampler {
    pair: RatePair,
    bound: f64,
}

/// Rejection samplers accepting less often than this reject the rate.
const MIN_ACCEPTANCE: f64 = 0.01;

impl SigmaSampler {
    fn new(pair: &RatePair) -> Result<Self> {
        let bound = if pair.is_constant() { 1.0 } else { pair.sup_b() };
        // the mean of B over the sphere is 1, so acceptance is 1/sup B
        if !(bound.is_finite() && 1.0 / bound >= MIN_ACCEPTANCE) {
            return Err(Error::InvalidRate(format!(
                "rejection acceptance {:.3e} below {MIN_ACCEPTANCE}",
                1.0 / bound
            )));
        }
        Ok(Self {
            pair: pair.clone(),
            bound,
        })
    }

    fn sample<R: Rng + ?Sized>(&self, k: Option<&Vec3>, rng: &mut R) -> UnitVector3 {
        loop {
            let sigma = UnitVector3::random(rng);
            let Some(k) = k else { return sigma };
            if self.pair.is_constant() || rng.random::<f64>() * self.bound <= self.pair.b(sigma.dot(k)) {
                return sigma;
            }
        }
    }
}

/// Post-collisional velocities of `(v, w)` under the swapping map.
pub fn collide_pair(v: Vec3, w: Vec3, sigma: UnitVector3, restitution: &Restitution) -> (Vec3, Vec3) {
    let out = collide(&CollisionTriple::new(v, w, sigma, Param::Swap), restitution).triple;
    (out.v, out.w)
}

/// Advances the ensemble by one step of length `dt`.
pub fn step(ens: &mut Ensemble, dt: f64, pair: &RatePair) -> Result<()> {
    let restitution = Restitution::with_rates(ens.e, pair)?;
    let sampler = SigmaSampler::new(pair)?;
    advance(ens, dt, &restitution, &sampler)
}

fn advance(ens: &mut Ensemble, dt: f64, restitution: &Restitution, sampler: &SigmaSampler) -> Result<()> {
    let n = ens.len();
    let mut rng = substream(ens.seed, Domain::CollisionStep, ens.steps);
    let mean = 0.5 * n as f64 * dt;
    let events = Poisson::new(mean)
        .map_err(|_| Error::NonFinite("Poisson mean"))?
        .sample(&mut rng) as u64;
    for _ in 0..events {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (v, w) = (ens.velocities[i], ens.velocities[j]);
        let u = v - w;
        let un = u.norm();
        let k = (un > 0.0).then(|| u / un);
        let sigma = sampler.sample(k.as_ref(), &mut rng);
        let (vp, wp) = collide_pair(v, w, sigma, restitution);
        ens.velocities[i] = vp;
        ens.velocities[j] = wp;
    }
    ens.collisions_applied += events;
    ens.steps += 1;
    ens.t = ens.steps as f64 * dt;
    Ok(())
}

/// Evolves `ens` to `cfg.t_max`, recording moments and the empirical
/// characteristic function at the initial time and every `record_every`.
///
/// The ECF is recorded twice: on `x_grid` and on the dilated grid
/// `e^{Et} x_grid` used by [`rescaled_estimates`].
pub fn run(ens: &mut Ensemble, cfg: &RunConfig, pair: &RatePair) -> Result<DsmcSeries> {
    cfg.validate()?;
    let restitution = Restitution::with_rates(ens.e, pair)?;
    let sampler = SigmaSampler::new(pair)?;
    let dissipation = restitution.dissipation();
    let stride = cfg.record_stride();
    let steps = (cfg.t_max / cfg.dt).round() as u64;
    let directions = fibonacci_directions(ECF_DIRECTIONS);
    let t0 = ens.t;
    let mut records = Vec::with_capacity((steps / stride + 2) as usize);
    let record = |ens: &Ensemble| DsmcRecord::measure(ens, &cfg.x_grid, &directions, dissipation);
    records.push(record(ens));
    for s in 1..=steps {
        advance(ens, cfg.dt, &restitution, &sampler)?;
        ens.t = t0 + s as f64 * cfg.dt;
        if s % stride == 0 || s == steps {
            records.push(record(ens));
        }
    }
    log::debug!(
        "dsmc: N={} e={} t={} collisions={}",
        ens.len(),
        ens.e,
        ens.t,
        ens.collisions_applied
    );
    Ok(DsmcSeries {
        e: ens.e,
        dissipation,
        n: ens.len(),
        seed: ens.seed,
        x_grid: cfg.x_grid.clone(),
        frame: SeriesFrame::Unscaled,
        records,
    })
}

/// Runs one replica per seed from the same initial law, spreading the work
/// over the available cores. The output order follows `seeds`.
pub fn run_replicas(
    spec: InitialSpec,
    n: usize,
    e: f64,
    seeds: &[u64],
    cfg: &RunConfig,
    pair: &RatePair,
) -> Result<Vec<DsmcSeries>> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |w| w.get())
        .min(seeds.len().max(1));
    let one = |seed: u64| -> Result<DsmcSeries> {
        let mut ens = sample_initial(spec, n, e, seed)?;
        run(&mut ens, cfg, pair)
    };
    let mut out: Vec<Option<Result<DsmcSeries>>> = (0..seeds.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (w, chunk) in out.chunks_mut(seeds.len().div_ceil(workers).max(1)).enumerate() {
            let base = w * seeds.len().div_ceil(workers).max(1);
            let one = &one;
            scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(one(seeds[base + i]));
                }
            });
        }
    });
    out.into_iter()
        .map(|r| r.expect("every replica slot is filled"))
        .collect()
}
