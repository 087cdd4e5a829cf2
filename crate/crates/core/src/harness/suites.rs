//! Verification suites. Each suite turns a group of module-level assertions
//! into [`Check`]s; expensive shared inputs (the cooling state, the reference
//! trajectory, the density corpus) are computed once per [`Context`].

use super::kincheck::{self, kinematics_audit};
use super::report::{Artifact, Check, SuiteOutcome};
use super::sweep::sweep_epsilon;
use super::{fit_exponential_rate, ExperimentConfig};
use crate::dsmc::{self, rescaled_estimates, InitialSpec};
use crate::error::{Error, Result};
use crate::interp::UniformInterpolant;
use crate::kinematics::{
    fisher_growth_exponent, mc_change_of_variables, EffectiveRates, GaussianBumpKernel, RatePair, Restitution,
    TheoremBranch,
};
use crate::realspace::{
    default_r_grid, entropy_route_check, fourier_sup_vs_fisher, gain_fisher_check, inequality_suite, reconstruct,
    InequalityKind, InequalityParams, RadialDensity,
};
use crate::spectral::{
    evolve, gamma_constants, sobolev_norm, steady_profile, sup_weighted, CharacteristicProfile, DiagnosticSchedule,
    EnvelopeReport, EvolutionTrace, Frame, SteadyState,
};
use std::cell::OnceCell;
use std::fmt::Write as _;
use std::time::Instant;

/// Restitution values of the kinematics audit.
pub const KINEMATICS_E: [f64; 6] = [0.3, 0.5, 0.7, 0.9, 0.99, 1.0];
/// Restitution values of the change-of-variables Monte Carlo.
pub const CHANGE_OF_VARIABLES_E: [f64; 3] = [0.3, 0.7, 0.99];
/// Restitution of the energy-decay runs.
pub const ENERGY_E: f64 = 0.5;
/// Restitutions of the single-application gain bound.
pub const GAIN_E: [f64; 3] = [0.8, 0.9, 0.99];
/// The Fisher trajectory bound is checked on `t ≤ FISHER_HORIZON`.
pub const FISHER_HORIZON: f64 = 20.0;
/// Relative slack allowed in the Fisher trajectory bound.
pub const FISHER_SLACK: f64 = 0.02;
/// The `d2` decay rate is fitted on `[D2_FIT_START, t_max]`.
pub const D2_FIT_START: f64 = 10.0;
/// Sobolev orders monitored along the reference run.
pub const SOBOLEV_ORDERS: [f64; 3] = [0.5, 1.0, 2.0];
/// Allowed excess of a norm over `max(initial, steady)`.
pub const REGULARITY_MARGIN: f64 = 0.05;
/// Time of the particle/spectral comparison.
pub const CROSS_CHECK_TIME: f64 = 10.0;
/// Relative spread allowed in the dilation-invariant Fourier/Fisher ratio.
pub const SCALE_INVARIANCE_TOL: f64 = 1e-4;

/// A named density in both representations.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub phi: CharacteristicProfile,
    pub density: RadialDensity,
}

/// Configuration plus lazily computed shared inputs.
pub struct Context {
    pub cfg: ExperimentConfig,
    steady: OnceCell<SteadyState>,
    trace: OnceCell<EvolutionTrace>,
    corpus: OnceCell<Vec<CorpusEntry>>,
}

impl Context {
    pub fn new(cfg: ExperimentConfig) -> Self {
        Self {
            cfg,
            steady: OnceCell::new(),
            trace: OnceCell::new(),
            corpus: OnceCell::new(),
        }
    }

    fn restitution(&self) -> Result<Restitution> {
        Restitution::new(self.cfg.e)
    }

    /// Homogeneous cooling state at the configured restitution.
    pub fn steady(&self) -> Result<&SteadyState> {
        if let Some(s) = self.steady.get() {
            return Ok(s);
        }
        let mut solver = self.cfg.solver()?;
        solver.t_max = self.cfg.steady_t_max;
        let s = steady_profile(&self.restitution()?, &solver, self.cfg.steady_tol)?;
        Ok(self.steady.get_or_init(|| s))
    }

    /// Rescaled run from the configured initial data, sampled every unit of
    /// time up to `t_max`, with every diagnostic and every profile kept.
    pub fn trajectory(&self) -> Result<&EvolutionTrace> {
        if let Some(t) = self.trace.get() {
            return Ok(t);
        }
        let reference = self.steady()?.profile.clone();
        let mut solver = self.cfg.solver()?;
        solver.frame = Frame::Rescaled;
        let phi0 = self.cfg.init.profile(solver.grid()?)?;
        let schedule = DiagnosticSchedule {
            reference: Some(reference),
            fisher: true,
            sobolev_orders: SOBOLEV_ORDERS.to_vec(),
            sup_deltas: vec![self.cfg.delta],
            keep_profiles: true,
            ..DiagnosticSchedule::every(1.0, self.cfg.t_max)
        };
        let trace = evolve(&phi0, &self.restitution()?, &solver, &schedule)?;
        Ok(self.trace.get_or_init(|| trace))
    }

    /// Maxwellian, two mixtures, the reference run at `t = 5` and the cooling state.
    pub fn corpus(&self) -> Result<&[CorpusEntry]> {
        if let Some(c) = self.corpus.get() {
            return Ok(c);
        }
        let grid = self.cfg.solver()?.grid()?;
        let trace = self.trajectory()?;
        let evolved = trace
            .profiles
            .iter()
            .find(|p| (p.time - 5.0).abs() < 1e-9)
            .cloned()
            .ok_or(Error::Degenerate("reference run shorter than t = 5"))?;
        let phis = [
            ("maxwellian", InitialSpec::Maxwellian { theta: 1.0 }.profile(grid)?),
            ("mixture-0.5-0.6-1.4", InitialSpec::default().profile(grid)?),
            (
                "mixture-0.25-0.4-1.2",
                InitialSpec::Mixture {
                    p: 0.25,
                    theta1: 0.4,
                    theta2: 1.2,
                }
                .profile(grid)?,
            ),
            ("evolved-t5", evolved),
            ("steady", self.steady()?.profile.clone()),
        ];
        let corpus = phis
            .into_iter()
            .map(|(name, phi)| {
                let density = reconstruct(&phi, default_r_grid(&phi)?)?;
                Ok(CorpusEntry { name, phi, density })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.corpus.get_or_init(|| corpus))
    }
}

fn timed(name: &str, body: impl FnOnce(&mut Vec<Check>, &mut Vec<Artifact>)) -> SuiteOutcome {
    let start = Instant::now();
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    body(&mut checks, &mut artifacts);
    SuiteOutcome::new(name, checks, artifacts, start.elapsed().as_secs_f64())
}

/// Runs `f`, turning an error into a single failed check.
fn guarded(checks: &mut Vec<Check>, name: &str, reference: &str, f: impl FnOnce(&mut Vec<Check>) -> Result<()>) {
    if let Err(err) = f(checks) {
        log::error!("{name}: {err}");
        checks.push(Check::error(name, reference, &err));
    }
}

/// Diagnostics of a trace as CSV.
pub fn trace_csv(trace: &EvolutionTrace) -> String {
    let mut s = String::from("t,temperature,m4,d2,fisher");
    if let Some(r) = trace.records.first() {
        for (d, _) in &r.sup {
            let _ = write!(s, ",sup_{d}");
        }
        for (o, _) in &r.sobolev {
            let _ = write!(s, ",hdot_{o}");
        }
    }
    s.push('\n');
    let opt = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in &trace.records {
        let _ = write!(
            s,
            "{},{:e},{:e},{},{}",
            r.time,
            r.temperature,
            r.m4,
            opt(r.d2),
            opt(r.fisher)
        );
        for (_, v) in r.sup.iter().chain(&r.sobolev) {
            let _ = write!(s, ",{v:e}");
        }
        s.push('\n');
    }
    s
}

/// Collision-map exactness and the change-of-variables identities.
pub fn kinematics(ctx: &Context) -> SuiteOutcome {
    timed("kinematics", |checks, artifacts| {
        let cfg = &ctx.cfg;
        let mut table = String::from("e,triples,round_trip,momentum,energy,param_map,jacobian,jacobian_samples\n");
        for e in KINEMATICS_E {
            guarded(
                checks,
                &format!("exactness e={e}"),
                "collision map identities",
                |checks| {
                    let a = kinematics_audit(e, cfg.triples, 100, cfg.seed)?;
                    let _ = writeln!(
                        table,
                        "{e},{},{:e},{:e},{:e},{:e},{:e},{}",
                        a.triples, a.round_trip, a.momentum, a.energy, a.param_map, a.jacobian, a.jacobian_samples
                    );
                    let detail = format!("{} triples", a.triples);
                    checks.extend([
                        Check::at_most(
                            format!("round-trip e={e}"),
                            "precollide inverts collide",
                            a.round_trip,
                            kincheck::ROUND_TRIP_TOL,
                        )
                        .with_detail(detail.clone()),
                        Check::at_most(
                            format!("momentum e={e}"),
                            "v + w is conserved",
                            a.momentum,
                            kincheck::MOMENTUM_TOL,
                        ),
                        Check::at_most(
                            format!("energy-law e={e}"),
                            "energy loss -(1-e²)/2 ((v-w)·n)²",
                            a.energy,
                            kincheck::ENERGY_TOL,
                        ),
                        Check::at_most(
                            format!("param-map e={e}"),
                            "swapping map equals the reflection map at the converted normal",
                            a.param_map,
                            kincheck::PARAM_MAP_TOL,
                        ),
                        Check::at_most(
                            format!("jacobian e={e}"),
                            "|det| of the reflection map equals e",
                            a.jacobian,
                            kincheck::JACOBIAN_TOL,
                        )
                        .with_detail(format!("{} samples", a.jacobian_samples)),
                    ]);
                    Ok(())
                },
            );
        }
        artifacts.push(Artifact {
            name: "audit".into(),
            contents: table,
        });
        let mut mc = String::from("kernel,e,branch,lhs,rhs,stderr,z\n");
        for k in 0..3u64 {
            let kernel = GaussianBumpKernel::random(cfg.seed, k);
            for e in CHANGE_OF_VARIABLES_E {
                for branch in [TheoremBranch::Sigma, TheoremBranch::Normal] {
                    let name = format!("change-of-variables kernel={k} e={e} {branch:?}").to_lowercase();
                    guarded(checks, &name, "weak and strong gain forms agree", |checks| {
                        let r = Restitution::new(e)?;
                        let rates = EffectiveRates::new(&RatePair::constant(), &r)?;
                        let seed = cfg.seed ^ (k << 32) ^ ((e * 1000.0) as u64) << 8 ^ branch as u64;
                        let est = mc_change_of_variables(&kernel, &rates, branch, cfg.mc_samples, seed)?;
                        let _ = writeln!(
                            mc,
                            "{k},{e},{branch:?},{:e},{:e},{:e},{}",
                            est.lhs,
                            est.rhs,
                            est.combined_stderr(),
                            est.z_score()
                        );
                        checks.push(
                            Check::at_most(
                                name.clone(),
                                "weak and strong gain forms agree",
                                est.z_score().abs(),
                                3.0,
                            )
                            .with_detail(format!("lhs {:.6e} rhs {:.6e}", est.lhs, est.rhs)),
                        );
                        Ok(())
                    });
                }
            }
        }
        artifacts.push(Artifact {
            name: "change-of-variables".into(),
            contents: mc,
        });
    })
}

/// Temperature decay `e^{-2Et}` at `e = 0.5`, from particles and from the
/// unscaled spectral solver.
pub fn energy(ctx: &Context) -> SuiteOutcome {
    timed("energy", |checks, artifacts| {
        let cfg = &ctx.cfg;
        let two_e = (1.0 - ENERGY_E * ENERGY_E) / 4.0;
        let window = (cfg.fit_start, cfg.t_max.min(10.0));
        guarded(checks, "dsmc m2 rate", "temperature decays as exp(-2Et)", |checks| {
            let mut ens = dsmc::sample_initial(cfg.init, cfg.particles, ENERGY_E, cfg.seed)?;
            let run = dsmc::RunConfig {
                t_max: window.1,
                x_grid: Vec::new(),
                ..cfg.dsmc_run()
            };
            let series = dsmc::run(&mut ens, &run, &RatePair::constant())?;
            let fit = fit_exponential_rate(&series.m2_series(), window)?;
            checks.push(
                Check::at_most(
                    "dsmc m2 rate",
                    "temperature decays as exp(-2Et)",
                    (fit.rate / two_e - 1.0).abs(),
                    0.02,
                )
                .with_detail(format!("rate {:.6} vs 2E = {two_e}, R² {:.6}", fit.rate, fit.r_squared)),
            );
            let noise = series
                .records
                .iter()
                .map(|r| r.m1.abs().max() / (4.0 * (r.m2 / ens.len() as f64).sqrt()))
                .fold(0.0, f64::max);
            checks.push(Check::at_most(
                "dsmc momentum",
                "mean velocity within 4 sqrt(m2/N) of zero",
                noise,
                1.0,
            ));
            let mut buf = Vec::new();
            dsmc::write_series(&mut buf, &series)?;
            artifacts.push(Artifact {
                name: "dsmc".into(),
                contents: String::from_utf8_lossy(&buf).into_owned(),
            });
            Ok(())
        });
        guarded(
            checks,
            "dsmc elastic energy",
            "elastic collisions conserve energy",
            |checks| {
                let mut ens = dsmc::sample_initial(cfg.init, 10_000, 1.0, cfg.seed)?;
                let e0 = ens.energy();
                let run = dsmc::RunConfig {
                    t_max: 2.0,
                    x_grid: Vec::new(),
                    ..cfg.dsmc_run()
                };
                dsmc::run(&mut ens, &run, &RatePair::constant())?;
                checks.push(Check::at_most(
                    "dsmc elastic energy",
                    "elastic collisions conserve energy",
                    ((ens.energy() - e0) / e0).abs(),
                    1e-12,
                ));
                Ok(())
            },
        );
        guarded(
            checks,
            "spectral m2 rate",
            "temperature decays as exp(-2Et)",
            |checks| {
                let mut solver = cfg.solver()?;
                solver.frame = Frame::Unscaled;
                let phi0 = cfg.init.profile(solver.grid()?)?;
                let schedule = DiagnosticSchedule::every(0.5, window.1);
                solver.t_max = window.1;
                let trace = evolve(&phi0, &Restitution::new(ENERGY_E)?, &solver, &schedule)?;
                let m2: Vec<(f64, f64)> = trace.records.iter().map(|r| (r.time, 3.0 * r.temperature)).collect();
                let fit = fit_exponential_rate(&m2, window)?;
                checks.push(
                    Check::at_most(
                        "spectral m2 rate",
                        "temperature decays as exp(-2Et)",
                        (fit.rate / two_e - 1.0).abs(),
                        0.005,
                    )
                    .with_detail(format!("rate {:.9} vs 2E = {two_e}", fit.rate)),
                );
                artifacts.push(Artifact {
                    name: "spectral".into(),
                    contents: trace_csv(&trace),
                });
                Ok(())
            },
        );
    })
}

/// Fisher information growth along the reference run and under one
/// application of the gain term.
pub fn fisher(ctx: &Context) -> SuiteOutcome {
    timed("fisher", |checks, artifacts| {
        let reference = "Fisher information grows at most like exp((g(e)-2E)t)";
        guarded(checks, "fisher trajectory", reference, |checks| {
            let trace = ctx.trajectory()?;
            let exponent = fisher_growth_exponent(&ctx.restitution()?)?.trajectory_exponent;
            let i0 = trace.records[0].fisher.ok_or(Error::Degenerate("no Fisher column"))?;
            let mut csv = String::from("t,fisher,bound\n");
            let mut worst: f64 = 0.0;
            for r in trace.records.iter().filter(|r| r.time <= FISHER_HORIZON + 1e-9) {
                let i = r.fisher.ok_or(Error::Degenerate("no Fisher column"))?;
                let bound = (exponent * r.time).exp() * i0;
                worst = worst.max(i / bound);
                let _ = writeln!(csv, "{},{i:e},{bound:e}", r.time);
            }
            checks.push(
                Check::at_most("fisher trajectory", reference, worst, 1.0 + FISHER_SLACK).with_detail(format!(
                    "max I(t)/bound(t) on t <= {FISHER_HORIZON}, exponent {exponent:.6}"
                )),
            );
            artifacts.push(Artifact {
                name: "trajectory".into(),
                contents: csv,
            });
            Ok(())
        });
        let gain_ref = "I(Q+(f,f)) <= (1+g(e)) I(f)";
        guarded(checks, "fisher gain", gain_ref, |checks| {
            let mut csv = String::from("density,e,fisher_f,fisher_gain,bound\n");
            for entry in ctx.corpus()? {
                for e in GAIN_E {
                    let rep = gain_fisher_check(&entry.phi, &Restitution::new(e)?)?;
                    let _ = writeln!(
                        csv,
                        "{},{e},{:e},{:e},{:e}",
                        entry.name, rep.fisher_f, rep.fisher_gain, rep.bound
                    );
                    checks.push(Check::at_most(
                        format!("fisher gain {} e={e}", entry.name),
                        gain_ref,
                        rep.fisher_gain / rep.fisher_f,
                        rep.bound / rep.fisher_f,
                    ));
                }
            }
            artifacts.push(Artifact {
                name: "gain".into(),
                contents: csv,
            });
            Ok(())
        });
    })
}

/// Exponential `d2` decay towards the cooling state.
pub fn weak_decay(ctx: &Context) -> SuiteOutcome {
    timed("weak-decay", |checks, artifacts| {
        let reference = "d2(g(t), g_inf) decays at least like exp(-gamma t)";
        guarded(checks, "d2 rate", reference, |checks| {
            let steady = ctx.steady()?;
            checks.push(
                Check::flag("steady converged", "cooling state reached", steady.converged).with_detail(format!(
                    "Cauchy residual {:.3e}, fixed-point residual {:.3e}",
                    steady.cauchy_residual, steady.fixed_point_residual
                )),
            );
            let trace = ctx.trajectory()?;
            let series: Vec<(f64, f64)> = trace.records.iter().filter_map(|r| r.d2.map(|d| (r.time, d))).collect();
            let gamma = gamma_constants(ctx.cfg.alpha, ctx.cfg.e)?.gamma;
            let fit = fit_exponential_rate(&series, (D2_FIT_START, ctx.cfg.t_max))?;
            checks.push(
                Check::at_least("d2 rate", reference, fit.rate, 0.9 * gamma).with_detail(format!(
                    "gamma({}, {}) = {gamma:.6}, window {:?}, R² {:.6}",
                    ctx.cfg.alpha, ctx.cfg.e, fit.window, fit.r_squared
                )),
            );
            artifacts.push(Artifact {
                name: "trace".into(),
                contents: trace_csv(trace),
            });
            Ok(())
        });
    })
}

/// Uniform bounds on `sup_δ` and homogeneous Sobolev norms along the run.
pub fn regularity(ctx: &Context) -> SuiteOutcome {
    timed("regularity", |checks, _| {
        let reference = "norms stay below max(initial, steady) along the run";
        guarded(checks, "regularity", reference, |checks| {
            let trace = ctx.trajectory()?;
            let steady = &ctx.steady()?.profile;
            let delta = ctx.cfg.delta;
            let mut quantities: Vec<(String, f64, Box<Reading>)> = vec![(
                format!("sup_{delta}"),
                sup_weighted(steady, delta)?,
                Box::new(|r| r.sup[0].1),
            )];
            for (k, &order) in SOBOLEV_ORDERS.iter().enumerate() {
                quantities.push((
                    format!("hdot_{order}"),
                    sobolev_norm(steady, order)?,
                    Box::new(move |r| r.sobolev[k].1),
                ));
            }
            for (name, steady_value, get) in quantities {
                let initial = get(&trace.records[0]);
                let cap = initial.max(steady_value) * (1.0 + REGULARITY_MARGIN);
                let peak = trace.records.iter().map(&get).fold(f64::NEG_INFINITY, f64::max);
                checks.push(
                    Check::at_most(format!("{name} bounded"), reference, peak, cap)
                        .with_detail(format!("initial {initial:.6}, steady {steady_value:.6}")),
                );
            }
            Ok(())
        });
    })
}

/// Nash, interpolation and `L²+moment → L¹` inequalities on the corpus, and
/// the entropy chain.
pub fn inequalities(ctx: &Context) -> SuiteOutcome {
    timed("inequalities", |checks, artifacts| {
        guarded(checks, "inequalities", "functional inequalities", |checks| {
            let params = InequalityParams::default();
            let mut csv = String::from("density,kind,params,lhs,rhs,slack\n");
            for entry in ctx.corpus()? {
                let rep = inequality_suite(&entry.phi, &entry.density, &params)?;
                for o in &rep.outcomes {
                    let p: Vec<String> = o.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    let _ = writeln!(
                        csv,
                        "{},{:?},{},{:e},{:e},{:e}",
                        entry.name,
                        o.kind,
                        p.join(" "),
                        o.lhs,
                        o.rhs,
                        o.slack
                    );
                }
                for kind in [
                    InequalityKind::Nash,
                    InequalityKind::Interpolation,
                    InequalityKind::L2MomentL1,
                ] {
                    let of_kind: Vec<_> = rep.outcomes.iter().filter(|o| o.kind == kind).collect();
                    let min_slack = of_kind.iter().map(|o| o.slack).fold(f64::INFINITY, f64::min);
                    let all = of_kind.iter().all(|o| o.holds);
                    let mut c = Check::at_least(
                        format!("{kind:?} {}", entry.name).to_lowercase(),
                        "inequality holds on the whole parameter grid",
                        min_slack,
                        0.0,
                    )
                    .with_detail(format!("{} cases, minimum slack", of_kind.len()));
                    if !all {
                        c.status = super::Status::Fail;
                    }
                    checks.push(c);
                }
                let theta = entry.density.temperature();
                if theta <= 2.0 {
                    let route = entropy_route_check(&entry.density, theta)?;
                    checks.push(
                        Check::flag(
                            format!("entropy chain {}", entry.name),
                            "Csiszar-Kullback and log-Sobolev chain",
                            route.holds(),
                        )
                        .with_detail(format!(
                            "||f-M||₁²/2 {:.4e} <= H {:.4e} <= I - 3/θ {:.4e}",
                            route.half_l1_squared, route.entropy, route.fisher_gap
                        )),
                    );
                }
            }
            artifacts.push(Artifact {
                name: "outcomes".into(),
                contents: csv,
            });
            Ok(())
        });
    })
}

/// Reads one tracked norm off a diagnostic record.
type Reading = dyn Fn(&crate::spectral::DiagnosticRecord) -> f64;

/// `‖g∞^ε − M‖₁` over the configured `ε` list.
pub fn sweep(ctx: &Context) -> SuiteOutcome {
    timed("sweep", |checks, artifacts| {
        let reference = "distance to the Maxwellian within C eps^1/2 (1+|log eps|^1/2)";
        guarded(checks, "sweep", reference, |checks| {
            let table = sweep_epsilon(&ctx.cfg.eps, &ctx.cfg)?;
            for (eps, why) in &table.dropped {
                checks.push(
                    Check::flag(format!("sweep eps={eps} converged"), "cooling state reached", false)
                        .with_detail(why.clone()),
                );
            }
            for w in table.rows.windows(2) {
                checks.push(Check::at_most(
                    format!("decrease eps={}→{}", w[0].eps, w[1].eps),
                    "distance decreases with eps",
                    w[1].distance / w[0].distance,
                    1.0,
                ));
            }
            for (w, ratio) in table.rows.windows(2).zip(table.constant_ratios()) {
                checks.push(
                    Check::at_most(
                        format!("envelope constant eps={}→{}", w[0].eps, w[1].eps),
                        reference,
                        ratio,
                        3.0,
                    )
                    .with_detail(format!("C = {:.4e} → {:.4e}", w[0].constant, w[1].constant)),
                );
            }
            let scaled: Vec<String> = table
                .rows
                .iter()
                .map(|r| format!("{:.3}", r.distance / (r.eps * r.eps)))
                .collect();
            checks.push(
                Check::info("distance order in eps", "observed order of convergence", table.order())
                    .with_detail(format!("distance/eps² = {}", scaled.join(", "))),
            );
            artifacts.push(Artifact {
                name: "table".into(),
                contents: table.to_csv(),
            });
            Ok(())
        });
    })
}

/// Particle against spectral profile in the rescaled frame, and the two
/// spectral frames against each other.
pub fn frame_consistency(ctx: &Context) -> SuiteOutcome {
    timed("frame-consistency", |checks, artifacts| {
        let cfg = &ctx.cfg;
        let reference = "particle and spectral solutions describe the same law";
        guarded(checks, "dsmc vs spectral", reference, |checks| {
            let trace = ctx.trajectory()?;
            let phi = trace
                .profiles
                .iter()
                .find(|p| (p.time - CROSS_CHECK_TIME).abs() < 1e-9)
                .ok_or(Error::Degenerate("reference run shorter than the comparison time"))?;
            let mut ens = dsmc::sample_initial(cfg.init, cfg.particles, cfg.e, cfg.seed)?;
            let run = dsmc::RunConfig {
                t_max: CROSS_CHECK_TIME,
                record_every: CROSS_CHECK_TIME,
                ..cfg.dsmc_run()
            };
            let series = rescaled_estimates(&dsmc::run(&mut ens, &run, &RatePair::constant())?);
            let last = series.records.last().ok_or(Error::TooFewPoints(0))?;
            let interp = UniformInterpolant::new(&phi.values, cfg.interp);
            let h = phi.grid.spacing();
            let root_n = (cfg.particles as f64).sqrt();
            let mut worst: f64 = 0.0;
            let mut csv = String::from("x,ecf,stderr,spectral\n");
            for (k, &x) in series.x_grid.iter().enumerate() {
                let p = interp.value_index(x / h);
                worst = worst.max((last.ecf[k] - p).abs() * root_n);
                let _ = writeln!(csv, "{x},{:e},{:e},{p:e}", last.ecf[k], last.ecf_stderr[k]);
            }
            checks.push(
                Check::at_most("dsmc ecf vs spectral", reference, worst, 3.0)
                    .with_detail(format!("max sqrt(N)|ecf - phi| on [0, 10] at t = {CROSS_CHECK_TIME}")),
            );
            let m2_dev = (last.m2 - 3.0 * phi.temperature()).abs() * root_n;
            checks.push(Check::info("dsmc rescaled m2 deviation x sqrt(N)", reference, m2_dev));
            artifacts.push(Artifact {
                name: "ecf".into(),
                contents: csv,
            });
            Ok(())
        });
        guarded(
            checks,
            "unscaled vs rescaled",
            "g(x,t) = phi_f(exp(Et)x, t)",
            |checks| {
                let trace = ctx.trajectory()?;
                let phi_g = trace
                    .profiles
                    .iter()
                    .find(|p| (p.time - CROSS_CHECK_TIME).abs() < 1e-9)
                    .ok_or(Error::Degenerate("reference run shorter than the comparison time"))?;
                let mut solver = cfg.solver()?;
                solver.frame = Frame::Unscaled;
                let r = ctx.restitution()?;
                let phi0 = cfg.init.profile(solver.grid()?)?;
                let phi_f = crate::spectral::Solver::new(&r, &solver)?.run_to(&phi0, CROSS_CHECK_TIME)?;
                let mapped = phi_f.dilate((r.dissipation() * CROSS_CHECK_TIME).exp(), cfg.interp);
                let diff = mapped
                    .values
                    .iter()
                    .zip(&phi_g.values)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                checks.push(Check::at_most(
                    "unscaled vs rescaled",
                    "g(x,t) = phi_f(exp(Et)x, t)",
                    diff,
                    1e-6,
                ));
                Ok(())
            },
        );
    })
}

/// Dilation invariance of the Fourier-sup/Fisher ratio, the pinned value of
/// that ratio, and the cooling-state envelope report. The sharp constant and
/// the envelope normalisation themselves are not computable here.
pub fn scale_invariance(ctx: &Context) -> SuiteOutcome {
    timed("scale-invariance", |checks, artifacts| {
        let reference = "sup x|phi| / sqrt(I) is dilation invariant";
        guarded(checks, "scale invariance", reference, |checks| {
            let mut csv = String::from("density,lambda,ratio\n");
            for entry in ctx
                .corpus()?
                .iter()
                .filter(|c| matches!(c.name, "maxwellian" | "mixture-0.5-0.6-1.4" | "steady"))
            {
                let base = fourier_sup_vs_fisher(&entry.phi, &entry.density);
                let mut spread: f64 = 0.0;
                let _ = writeln!(csv, "{},1,{base:e}", entry.name);
                for lambda in [0.5, 2.0] {
                    let phi = entry.phi.dilate(lambda, ctx.cfg.interp);
                    let f = reconstruct(&phi, default_r_grid(&phi)?)?;
                    let ratio = fourier_sup_vs_fisher(&phi, &f);
                    let _ = writeln!(csv, "{},{lambda},{ratio:e}", entry.name);
                    spread = spread.max((ratio / base - 1.0).abs());
                }
                checks.push(
                    Check::at_most(
                        format!("dilation invariance {}", entry.name),
                        reference,
                        spread,
                        SCALE_INVARIANCE_TOL,
                    )
                    .with_detail("lambda in {0.5, 2}"),
                );
                checks.push(Check::info(format!("pinned ratio {}", entry.name), reference, base));
            }
            artifacts.push(Artifact {
                name: "ratios".into(),
                contents: csv,
            });
            let env = EnvelopeReport::of(&ctx.steady()?.profile);
            checks.push(
                Check::info("envelope lower violation", "exp(-x²) <= g_inf", env.lower_violation)
                    .with_detail(format!("temperature {:.6}, holds {}", env.temperature, env.holds)),
            );
            checks.push(Check::info(
                "envelope upper violation",
                "g_inf <= exp(-x)(1+x)",
                env.upper_violation,
            ));
            checks.push(
                Check::info(
                    "sharp constant",
                    "not computable: convention-dependent and never stated",
                    f64::NAN,
                )
                .with_detail("replaced by the dilation-invariance check and the pinned ratios"),
            );
            Ok(())
        });
    })
}
