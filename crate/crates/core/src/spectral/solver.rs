use super::functionals::{d2_distance, moment, sobolev_norm, sup_weighted, MomentOrder};
use super::gain::{dilate_values, GainOperator};
use super::{CharacteristicProfile, Frame, SolverConfig};
use crate::error::{Error, Result};
use crate::kinematics::Restitution;

const BOUND_SLACK: f64 = 1e-6;

/// Time integrator for one restitution coefficient and configuration.
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    restitution: Restitution,
    gain: GainOperator,
}

/// Integration state. In the rescaled frame the stored samples lag the true
/// profile by a pending dilation: `ĝ(x) = ψ(e^{E·lag} x)`.
#[derive(Debug, Clone)]
struct State {
    psi: Vec<f64>,
    time: f64,
    lag: f64,
}

impl Solver {
    pub fn new(restitution: &Restitution, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        Ok(Self {
            config: *config,
            restitution: *restitution,
            gain: GainOperator::new(grid, restitution, config.quad_order, config.interp),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn restitution(&self) -> &Restitution {
        &self.restitution
    }

    pub fn gain_operator(&self) -> &GainOperator {
        &self.gain
    }

    fn rhs(&self, y: &[f64], out: &mut [f64]) {
        self.gain.apply(y, out);
        for (o, v) in out.iter_mut().zip(y) {
            *o -= v;
        }
    }

    /// One classical Runge–Kutta step of `φ' = Q̂⁺φ - φ`.
    pub fn collision_rk4(&self, y: &[f64], dt: f64) -> Vec<f64> {
        let n = y.len();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        self.rhs(y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * dt * k1[i];
        }
        self.rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * dt * k2[i];
        }
        self.rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + dt * k3[i];
        }
        self.rhs(&tmp, &mut k4);
        (0..n)
            .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }

    // RK4 step with a single retry at half the step if |φ| leaves the unit ball.
    fn guarded_rk4(&self, y: &[f64], dt: f64, time: f64) -> Result<Vec<f64>> {
        let out = self.collision_rk4(y, dt);
        let max_abs = max_abs(&out);
        if max_abs <= 1.0 + BOUND_SLACK && max_abs.is_finite() {
            return Ok(out);
        }
        log::warn!("|phi| = {max_abs} after step at t = {time}; retrying with dt/2");
        let half = self.collision_rk4(y, 0.5 * dt);
        let out = self.collision_rk4(&half, 0.5 * dt);
        let max_abs = self::max_abs(&out);
        if max_abs <= 1.0 + BOUND_SLACK && max_abs.is_finite() {
            Ok(out)
        } else {
            Err(Error::BoundViolation {
                time: time + dt,
                max_abs,
            })
        }
    }

    fn drift_factor(&self, lag: f64) -> f64 {
        (self.restitution.dissipation() * lag).exp()
    }

    fn flush(&self, state: &mut State) {
        if state.lag > 0.0 {
            state.psi = dilate_values(&state.psi, self.drift_factor(state.lag), self.config.interp);
            state.lag = 0.0;
        }
    }

    fn profile_of(&self, state: &State) -> CharacteristicProfile {
        let values = if state.lag > 0.0 {
            dilate_values(&state.psi, self.drift_factor(state.lag), self.config.interp)
        } else {
            state.psi.clone()
        };
        CharacteristicProfile {
            grid: *self.gain.grid(),
            values,
            time: state.time,
        }
    }

    fn advance(&self, state: &mut State, target: f64) -> Result<()> {
        let dt = self.config.dt;
        let eps = 1e-9 * dt;
        while state.time < target - eps {
            let h = dt.min(target - state.time);
            state.psi = self.guarded_rk4(&state.psi, h, state.time)?;
            state.time += h;
            if (target - state.time).abs() <= eps {
                state.time = target;
            }
            if self.config.frame == Frame::Rescaled {
                state.lag += h;
                if state.lag >= self.config.drift_interval - eps {
                    self.flush(state);
                }
            }
        }
        Ok(())
    }

    fn start(&self, phi0: &CharacteristicProfile) -> Result<State> {
        if phi0.grid != *self.gain.grid() {
            return Err(Error::GridMismatch("initial profile does not match solver grid".into()));
        }
        Ok(State {
            psi: phi0.values.clone(),
            time: phi0.time,
            lag: 0.0,
        })
    }

    /// Profile at `t_end`, integrating from `phi0.time`.
    pub fn run_to(&self, phi0: &CharacteristicProfile, t_end: f64) -> Result<CharacteristicProfile> {
        let mut state = self.start(phi0)?;
        self.advance(&mut state, t_end)?;
        Ok(self.profile_of(&state))
    }

    /// A single Strang step: half drift, collision step, half drift.
    pub fn step(&self, phi: &CharacteristicProfile) -> Result<CharacteristicProfile> {
        let dt = self.config.dt;
        let mut values = phi.values.clone();
        let rescaled = self.config.frame == Frame::Rescaled;
        if rescaled {
            values = dilate_values(&values, self.drift_factor(0.5 * dt), self.config.interp);
        }
        values = self.guarded_rk4(&values, dt, phi.time)?;
        if rescaled {
            values = dilate_values(&values, self.drift_factor(0.5 * dt), self.config.interp);
        }
        Ok(CharacteristicProfile {
            grid: phi.grid,
            values,
            time: phi.time + dt,
        })
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter()
        .fold(0.0_f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// One time step of length `config.dt`.
pub fn step(
    phi: &CharacteristicProfile,
    restitution: &Restitution,
    config: &SolverConfig,
) -> Result<CharacteristicProfile> {
    Solver::new(restitution, config)?.step(phi)
}

/// Which diagnostics to record, and when.
#[derive(Debug, Clone, Default)]
pub struct DiagnosticSchedule {
    pub times: Vec<f64>,
    /// Reference profile for the `d2` column.
    pub reference: Option<CharacteristicProfile>,
    pub fisher: bool,
    pub sobolev_orders: Vec<f64>,
    pub sup_deltas: Vec<f64>,
    pub keep_profiles: bool,
}

impl DiagnosticSchedule {
    /// Evenly spaced times `0, every, 2·every, ..., t_max`.
    pub fn every(every: f64, t_max: f64) -> Self {
        let count = (t_max / every + 1e-9).floor() as usize;
        Self {
            times: (0..=count).map(|k| k as f64 * every).collect(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRecord {
    pub time: f64,
    pub temperature: f64,
    pub m4: f64,
    pub d2: Option<f64>,
    pub fisher: Option<f64>,
    /// `(r, Ḣ^r norm)` pairs.
    pub sobolev: Vec<(f64, f64)>,
    /// `(δ, sup_δ)` pairs.
    pub sup: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub records: Vec<DiagnosticRecord>,
    pub profiles: Vec<CharacteristicProfile>,
    pub final_profile: CharacteristicProfile,
}

impl EvolutionTrace {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.time).collect()
    }
}

fn diagnose(phi: &CharacteristicProfile, schedule: &DiagnosticSchedule) -> Result<DiagnosticRecord> {
    let d2 = match &schedule.reference {
        Some(r) => Some(d2_distance(phi, r, None)?),
        None => None,
    };
    let fisher = if schedule.fisher {
        Some(crate::realspace::profile_fisher(phi)?)
    } else {
        None
    };
    let sobolev = schedule
        .sobolev_orders
        .iter()
        .map(|&r| sobolev_norm(phi, r).map(|v| (r, v)))
        .collect::<Result<Vec<_>>>()?;
    let sup = schedule
        .sup_deltas
        .iter()
        .map(|&d| sup_weighted(phi, d).map(|v| (d, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticRecord {
        time: phi.time,
        temperature: moment(phi, MomentOrder::Second) / 3.0,
        m4: moment(phi, MomentOrder::Fourth),
        d2,
        fisher,
        sobolev,
        sup,
    })
}

/// Evolve `phi0` and record diagnostics at the scheduled times.
pub fn evolve(
    phi0: &CharacteristicProfile,
    restitution: &Restitution,
    config: &SolverConfig,
    schedule: &DiagnosticSchedule,
) -> Result<EvolutionTrace> {
    let solver = Solver::new(restitution, config)?;
    evolve_with(&solver, phi0, schedule)
}

pub(crate) fn evolve_with(
    solver: &Solver,
    phi0: &CharacteristicProfile,
    schedule: &DiagnosticSchedule,
) -> Result<EvolutionTrace> {
    if schedule.times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parse("diagnostic times must be strictly increasing".into()));
    }
    if schedule.times.first().is_some_and(|&t| t < phi0.time) {
        return Err(Error::Parse("diagnostic time precedes the initial profile".into()));
    }
    let mut state = solver.start(phi0)?;
    let mut records = Vec::with_capacity(schedule.times.len());
    let mut profiles = Vec::new();
    for &t in &schedule.times {
        solver.advance(&mut state, t)?;
        let phi = solver.profile_of(&state);
        records.push(diagnose(&phi, schedule)?);
        if schedule.keep_profiles {
            profiles.push(phi);
        }
    }
    let end = solver
        .config
        .t_max
        .max(schedule.times.last().copied().unwrap_or(phi0.time));
    solver.advance(&mut state, end)?;
    Ok(EvolutionTrace {
        records,
        profiles,
        final_profile: solver.profile_of(&state),
    })
}

/// Comparison of a profile with `exp(-x²) ≤ φ ≤ e^{-x}(1+x)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnvelopeReport {
    pub temperature: f64,
    /// `max(exp(-x²) - φ)` over the grid, non-positive when the bound holds.
    pub lower_violation: f64,
    /// `max(φ - e^{-x}(1+x))` over the grid.
    pub upper_violation: f64,
    pub holds: bool,
}

impl EnvelopeReport {
    pub fn of(phi: &CharacteristicProfile) -> Self {
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for (i, &v) in phi.values.iter().enumerate().skip(1) {
            let x = phi.grid.node(i);
            lower = lower.max((-x * x).exp() - v);
            upper = upper.max(v - (-x).exp() * (1.0 + x));
        }
        Self {
            temperature: phi.temperature(),
            lower_violation: lower,
            upper_violation: upper,
            holds: lower <= 1e-9 && upper <= 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub profile: CharacteristicProfile,
    pub converged: bool,
    /// `d2(φ(t), φ(t - 5))` at the returned profile.
    pub cauchy_residual: f64,
    pub fixed_point_residual: f64,
    pub envelope: EnvelopeReport,
}

/// Sup norm of `Q̂⁺φ - φ + E x φ'` on the grid.
pub fn fixed_point_residual(solver: &Solver, phi: &CharacteristicProfile) -> f64 {
    let n = phi.values.len();
    let mut g = vec![0.0; n];
    solver.gain.apply(&phi.values, &mut g);
    let h = phi.grid.spacing();
    let y = &phi.values;
    let at = |i: isize| y[i.unsigned_abs()];
    let e_diss = solver.restitution.dissipation();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let ii = i as isize;
        let d = if i + 2 < n {
            (-at(ii + 2) + 8.0 * at(ii + 1) - 8.0 * at(ii - 1) + at(ii - 2)) / (12.0 * h)
        } else {
            (y[i] - y[i - 1]) / h
        };
        let r = g[i] - y[i] + e_diss * phi.grid.node(i) * d;
        worst = worst.max(r.abs());
    }
    worst
}

/// Homogeneous cooling state at unit temperature, by time-marching the
/// rescaled equation from a Maxwellian until `d2(φ(t), φ(t-5)) < tol`.
pub fn steady_profile(restitution: &Restitution, config: &SolverConfig, tol: f64) -> Result<SteadyState> {
    let mut cfg = *config;
    cfg.frame = Frame::Rescaled;
    let solver = Solver::new(restitution, &cfg)?;
    steady_with(&solver, tol)
}

pub(crate) fn steady_with(solver: &Solver, tol: f64) -> Result<SteadyState> {
    const DELTA: f64 = 5.0;
    let grid = *solver.gain.grid();
    let start = CharacteristicProfile::maxwellian(grid, 1.0);
    let mut state = solver.start(&start)?;
    let mut prev = start;
    let mut best: Option<(f64, CharacteristicProfile)> = None;
    let mut converged = false;
    let mut t = 0.0;
    while t + DELTA <= solver.config.t_max + 1e-9 {
        t += DELTA;
        solver.advance(&mut state, t)?;
        let cur = solver.profile_of(&state);
        let res = d2_distance(&cur, &prev, None)?;
        log::debug!("steady t = {t}: Cauchy residual {res:.3e}");
        if best.as_ref().is_none_or(|(b, _)| res <= *b) {
            best = Some((res, cur.clone()));
        }
        prev = cur;
        if res < tol {
            converged = true;
            break;
        }
    }
    let (cauchy_residual, profile) = best.ok_or(Error::OutOfRange {
        name: "t_max",
        value: solver.config.t_max,
        expected: "t_max >= 5 for a steady-state solve",
    })?;
    if !converged {
        log::warn!("steady state not converged by t = {t}: best Cauchy residual {cauchy_residual:.3e}");
    }
    let envelope = EnvelopeReport::of(&profile);
    Ok(SteadyState {
        fixed_point_residual: fixed_point_residual(solver, &profile),
        profile,
        converged,
        cauchy_residual,
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{RadialGrid, SolverConfig};

    fn small(frame: Frame) -> SolverConfig {
        SolverConfig {
            n: 512,
            x_max: 20.0,
            dt: 0.02,
            t_max: 2.0,
            frame,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn elastic_maxwellian_stationary() {
        let cfg = small(Frame::Unscaled);
        let r = Restitution::new(1.0).unwrap();
        let m = CharacteristicProfile::maxwellian(RadialGrid::new(512, 20.0).unwrap(), 1.0);
        let out = Solver::new(&r, &cfg).unwrap().run_to(&m, 1.0).unwrap();
        let err = out
            .values
            .iter()
            .zip(&m.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn point_mass_stationary_unscaled() {
        let cfg = small(Frame::Unscaled);
        let r = Restitution::new(0.4).unwrap();
        let p = CharacteristicProfile::point_mass(RadialGrid::new(512, 20.0).unwrap());
        let out = step(&p, &r, &cfg).unwrap();
        assert!(out.values.iter().all(|v| (v - 1.0).abs() < 1e-13));
    }

    #[test]
    fn rescaled_keeps_temperature() {
        let cfg = small(Frame::Rescaled);
        let r = Restitution::new(0.5).unwrap();
        let phi = CharacteristicProfile::default_initial(RadialGrid::new(512, 20.0).unwrap());
        let trace = evolve(&phi, &r, &cfg, &DiagnosticSchedule::every(0.5, 2.0)).unwrap();
        for rec in &trace.records {
            assert!((rec.temperature - 1.0).abs() < 1e-6, "{rec:?}");
        }
        assert_eq!(trace.records.len(), 5);
    }

    #[test]
    fn schedule_must_increase() {
        let cfg = small(Frame::Rescaled);
        let r = Restitution::new(0.5).unwrap();
        let phi = CharacteristicProfile::default_initial(RadialGrid::new(512, 20.0).unwrap());
        let sched = DiagnosticSchedule {
            times: vec![1.0, 0.5],
            ..Default::default()
        };
        assert!(evolve(&phi, &r, &cfg, &sched).is_err());
    }
}
