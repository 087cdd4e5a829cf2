//! The `maxcool` command line.
//!
//! Exit status: 0 on success, 1 on a numerical failure or a failed check,
//! 2 on a usage error or an out-of-range parameter.

use super::suites::{trace_csv, KINEMATICS_E, SOBOLEV_ORDERS};
use super::{kinematics_audit, sweep_epsilon, verify, ExperimentConfig, Suite};
use crate::dsmc::{self, rescaled_estimates};
use crate::error::{Error, Result};
use crate::kinematics::{RatePair, Restitution};
use crate::realspace::{default_r_grid, reconstruct, write_density};
use crate::spectral::{evolve, steady_profile, write_profile, DiagnosticSchedule, Frame};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "maxcool",
    version,
    about = "Inelastic Maxwell gas: spectral and particle solvers"
)]
struct Cli {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Default, Args)]
struct Physics {
    /// Restitution coefficient.
    #[arg(long)]
    e: Option<f64>,
    /// Number of radial frequency nodes.
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    x_max: Option<f64>,
    /// Time step.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Initial data, `maxwellian:θ` or `bimax:p,θ1,θ2`.
    #[arg(long)]
    init: Option<String>,
    /// `rescaled` or `unscaled`.
    #[arg(long)]
    frame: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Physics {
    fn assignments(&self, dt_key: &'static str) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut push = |k, s: Option<String>| {
            if let Some(s) = s {
                v.push((k, s));
            }
        };
        push("e", self.e.map(|x| x.to_string()));
        push("grid_n", self.grid_n.map(|x| x.to_string()));
        push("x_max", self.x_max.map(|x| x.to_string()));
        push(dt_key, self.dt.map(|x| x.to_string()));
        push("t_max", self.t_max.map(|x| x.to_string()));
        push("init", self.init.clone());
        push("frame", self.frame.clone());
        push("seed", self.seed.map(|x| x.to_string()));
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        v
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a profile with the spectral solver and write its diagnostics.
    Evolve {
        #[command(flatten)]
        physics: Physics,
        /// Time between diagnostic rows.
        #[arg(long, default_value_t = 1.0)]
        every: f64,
        /// Also write the final profile here.
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Run the particle simulation and write its moment/ECF series.
    Dsmc {
        #[command(flatten)]
        physics: Physics,
        /// Number of particles.
        #[arg(long = "n")]
        particles: Option<usize>,
        #[arg(long)]
        record_every: Option<f64>,
        /// Independent replicas, written as `<out>.r<k>.csv`.
        #[arg(long)]
        replicas: Option<usize>,
    },
    /// Compute the homogeneous cooling state.
    Steady {
        #[command(flatten)]
        physics: Physics,
        /// Cauchy tolerance on d2 over five time units.
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the reconstructed density here.
        #[arg(long)]
        density_out: Option<PathBuf>,
    },
    /// Distance of the cooling state to the Maxwellian as inelasticity vanishes.
    SweepEps {
        #[command(flatten)]
        physics: Physics,
        /// Descending list, e.g. `0.1,0.05,0.02,0.01`.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Run verification suites and write a JSON report.
    Verify {
        #[command(flatten)]
        physics: Physics,
        /// Suite name, comma-separated names, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long = "n")]
        particles: Option<usize>,
        #[arg(long)]
        triples: Option<usize>,
        #[arg(long)]
        mc_samples: Option<usize>,
    },
    /// Exactness audit of the collision maps on random triples.
    Kincheck {
        #[arg(long)]
        triples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::OutOfRange { .. } | Error::Parse(_) => Failure::Usage(err.to_string()),
            _ => Failure::Numerical(err.to_string()),
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    init_logging(cli.verbose);
    match dispatch(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("maxcool: {msg}");
            eprintln!("run `maxcool --help` for usage");
            2
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("maxcool: numerical failure: {msg}");
            1
        }
    }
}

fn resolve(base: ExperimentConfig, file: Option<&Path>, flags: &[(&str, String)]) -> Result<ExperimentConfig> {
    let mut cfg = base;
    if let Some(path) = file {
        cfg.merge_kv(&std::fs::read_to_string(path)?)?;
    }
    for (k, v) in flags {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Places the configuration comment after the first (format) line.
fn with_config_after_magic(body: &[u8], cfg: &ExperimentConfig) -> String {
    let text = String::from_utf8_lossy(body);
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    format!("{first}\n{}{rest}", cfg.header_comment())
}

fn dispatch(cli: Cli) -> std::result::Result<i32, Failure> {
    let file = cli.config.as_deref();
    match cli.command {
        Command::Evolve {
            physics,
            every,
            profile_out,
        } => {
            let cfg = resolve(ExperimentConfig::default(), file, &physics.assignments("dt"))?;
            if !(every > 0.0) {
                return Err(Failure::Usage("--every must be positive".into()));
            }
            let solver = cfg.solver()?;
            let phi0 = cfg.init.profile(solver.grid()?)?;
            let schedule = DiagnosticSchedule {
                sobolev_orders: SOBOLEV_ORDERS.to_vec(),
                sup_deltas: vec![cfg.delta],
                ..DiagnosticSchedule::every(every, cfg.t_max)
            };
            let trace = evolve(&phi0, &Restitution::new(cfg.e)?, &solver, &schedule)?;
            emit(
                cfg.out.as_deref(),
                &format!("{}{}", cfg.header_comment(), trace_csv(&trace)),
            )?;
            if let Some(p) = profile_out {
                let mut buf = Vec::new();
                write_profile(&mut buf, &trace.final_profile, cfg.e, cfg.frame)?;
                emit(Some(&p), &with_config_after_magic(&buf, &cfg))?;
            }
            Ok(0)
        }
        Command::Dsmc {
            physics,
            particles,
            record_every,
            replicas,
        } => {
            let mut flags = physics.assignments("dsmc_dt");
            flags.extend(particles.map(|n| ("particles", n.to_string())));
            flags.extend(record_every.map(|r| ("record_every", r.to_string())));
            flags.extend(replicas.map(|r| ("replicas", r.to_string())));
            let defaults = ExperimentConfig {
                t_max: 10.0,
                frame: Frame::Unscaled,
                ..ExperimentConfig::default()
            };
            let cfg = resolve(defaults, file, &flags)?;
            let seeds: Vec<u64> = (0..cfg.replicas as u64).map(|k| cfg.seed + k).collect();
            let runs = dsmc::run_replicas(
                cfg.init,
                cfg.particles,
                cfg.e,
                &seeds,
                &cfg.dsmc_run(),
                &RatePair::constant(),
            )?;
            for (k, series) in runs.iter().enumerate() {
                let series = match cfg.frame {
                    Frame::Rescaled => rescaled_estimates(series),
                    Frame::Unscaled => series.clone(),
                };
                let mut buf = Vec::new();
                dsmc::write_series(&mut buf, &series)?;
                let text = format!("{}{}", cfg.header_comment(), String::from_utf8_lossy(&buf));
                let path = match (&cfg.out, runs.len()) {
                    (Some(p), 1) => Some(p.clone()),
                    (Some(p), _) => Some(p.with_extension(format!("r{k}.csv"))),
                    (None, _) => None,
                };
                emit(path.as_deref(), &text)?;
            }
            Ok(0)
        }
        Command::Steady {
            physics,
            tol,
            density_out,
        } => {
            let mut flags = physics.assignments("dt");
            flags.extend(tol.map(|t| ("steady_tol", t.to_string())));
            let cfg = resolve(ExperimentConfig::desk(), file, &flags)?;
            let mut solver = cfg.solver()?;
            solver.t_max = cfg.steady_t_max;
            let steady = steady_profile(&Restitution::new(cfg.e)?, &solver, cfg.steady_tol)?;
            eprintln!(
                "converged {} cauchy {:.3e} fixed-point {:.3e} envelope {}",
                steady.converged, steady.cauchy_residual, steady.fixed_point_residual, steady.envelope.holds
            );
            let mut buf = Vec::new();
            write_profile(&mut buf, &steady.profile, cfg.e, Frame::Rescaled)?;
            emit(cfg.out.as_deref(), &with_config_after_magic(&buf, &cfg))?;
            if let Some(p) = density_out {
                let f = reconstruct(&steady.profile, default_r_grid(&steady.profile)?)?;
                let mut buf = Vec::new();
                write_density(&mut buf, &f)?;
                emit(Some(&p), &with_config_after_magic(&buf, &cfg))?;
            }
            Ok(if steady.converged { 0 } else { 1 })
        }
        Command::SweepEps { physics, eps } => {
            let mut flags = physics.assignments("dt");
            flags.extend(eps.map(|e| ("eps", e)));
            let cfg = resolve(ExperimentConfig::desk(), file, &flags)?;
            let table = sweep_epsilon(&cfg.eps, &cfg)?;
            emit(
                cfg.out.as_deref(),
                &format!("{}{}", cfg.header_comment(), table.to_csv()),
            )?;
            for (eps, why) in &table.dropped {
                eprintln!("dropped eps = {eps}: {why}");
            }
            let ok = table.decreasing() && table.constant_ratios().iter().all(|r| *r <= 3.0);
            Ok(if ok { 0 } else { 1 })
        }
        Command::Verify {
            physics,
            suite,
            report,
            particles,
            triples,
            mc_samples,
        } => {
            let mut flags = physics.assignments("dt");
            flags.extend(report.map(|p| ("report", p.display().to_string())));
            flags.extend(particles.map(|n| ("particles", n.to_string())));
            flags.extend(triples.map(|n| ("triples", n.to_string())));
            flags.extend(mc_samples.map(|n| ("mc_samples", n.to_string())));
            let cfg = resolve(ExperimentConfig::desk(), file, &flags)?;
            let suites = Suite::parse_list(&suite)?;
            let report = verify(&suites, &cfg)?;
            eprint!("{}", report.summary());
            if let Some(path) = &cfg.report {
                for p in report.write(path, &cfg)? {
                    log::info!("wrote {}", p.display());
                }
            }
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::Kincheck { triples, seed } => {
            let mut flags = Vec::new();
            flags.extend(triples.map(|n| ("triples", n.to_string())));
            flags.extend(seed.map(|s| ("seed", s.to_string())));
            let cfg = resolve(ExperimentConfig::default(), file, &flags)?;
            let mut ok = true;
            println!("e,triples,round_trip,momentum,energy,param_map,jacobian,pass");
            for e in KINEMATICS_E {
                let a = kinematics_audit(e, cfg.triples, 100, cfg.seed)?;
                ok &= a.holds();
                println!(
                    "{e},{},{:.3e},{:.3e},{:.3e},{:.3e},{:.3e},{}",
                    a.triples,
                    a.round_trip,
                    a.momentum,
                    a.energy,
                    a.param_map,
                    a.jacobian,
                    a.holds()
                );
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_cli(["maxcool", "frobnicate"]), 2);
        assert_eq!(run_cli(["maxcool", "evolve", "--bogus"]), 2);
        assert_eq!(run_cli(["maxcool", "evolve", "--e", "1.5"]), 2);
        assert_eq!(run_cli(["maxcool", "dsmc", "--init", "cauchy"]), 2);
        assert_eq!(run_cli(["maxcool", "verify", "--suite", "nope"]), 2);
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.cfg");
        std::fs::write(&file, "e = 0.5\nseed = 4\n").unwrap();
        let flags = vec![("e", "0.7".to_string())];
        let cfg = resolve(ExperimentConfig::default(), Some(&file), &flags).unwrap();
        assert_eq!((cfg.e, cfg.seed), (0.7, 4));
    }

    #[test]
    fn dsmc_writes_a_series() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dsmc.csv");
        let code = run_cli([
            "maxcool",
            "dsmc",
            "--e",
            "0.5",
            "--n",
            "2000",
            "--t-max",
            "1",
            "--dt",
            "0.01",
            "--seed",
            "1",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("# config_sha256 = "));
        let series = dsmc::read_series(text.as_bytes()).unwrap();
        assert_eq!(series.n, 2000);
        assert_eq!(series.records.len(), 3);
    }
}
