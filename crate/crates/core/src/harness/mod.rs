//! Configuration, rate fitting, verification suites, the small-inelasticity
//! sweep and the `maxcool` command line.

pub mod cli;
mod config;
mod fit;
mod kincheck;
mod report;
pub mod suites;
mod sweep;

pub use config::ExperimentConfig;
pub use fit::{fit_exponential_rate, RateFit};
pub use kincheck::{kinematics_audit, KinematicsAudit};
pub use report::{Artifact, Check, Report, Status, SuiteOutcome};
pub use suites::Context;
pub use sweep::{envelope, sweep_epsilon, SweepRow, SweepTable};

use crate::error::{Error, Result};

/// Verification suites, in the order `all` runs them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Kinematics,
    Energy,
    Fisher,
    WeakDecay,
    Regularity,
    Inequalities,
    Sweep,
    FrameConsistency,
    ScaleInvariance,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Kinematics,
        Suite::Energy,
        Suite::Fisher,
        Suite::WeakDecay,
        Suite::Regularity,
        Suite::Inequalities,
        Suite::Sweep,
        Suite::FrameConsistency,
        Suite::ScaleInvariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kinematics => "kinematics",
            Suite::Energy => "energy",
            Suite::Fisher => "fisher",
            Suite::WeakDecay => "weak-decay",
            Suite::Regularity => "regularity",
            Suite::Inequalities => "inequalities",
            Suite::Sweep => "sweep",
            Suite::FrameConsistency => "frame-consistency",
            Suite::ScaleInvariance => "scale-invariance",
        }
    }

    pub fn run(self, ctx: &Context) -> SuiteOutcome {
        log::info!("running suite {}", self.name());
        match self {
            Suite::Kinematics => suites::kinematics(ctx),
            Suite::Energy => suites::energy(ctx),
            Suite::Fisher => suites::fisher(ctx),
            Suite::WeakDecay => suites::weak_decay(ctx),
            Suite::Regularity => suites::regularity(ctx),
            Suite::Inequalities => suites::inequalities(ctx),
            Suite::Sweep => suites::sweep(ctx),
            Suite::FrameConsistency => suites::frame_consistency(ctx),
            Suite::ScaleInvariance => suites::scale_invariance(ctx),
        }
    }

    /// Parses a suite name, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        s.split(',')
            .map(|name| {
                Suite::ALL
                    .into_iter()
                    .find(|suite| suite.name() == name.trim())
                    .ok_or_else(|| Error::Parse(format!("unknown suite `{name}`")))
            })
            .collect()
    }
}

/// Runs the suites against one shared [`Context`]. A failing or erroring
/// check never stops the remaining suites.
pub fn verify(suites: &[Suite], cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let ctx = Context::new(cfg.clone());
    let outcomes = suites.iter().map(|s| s.run(&ctx)).collect();
    Ok(Report::new(cfg, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        assert_eq!(Suite::parse_list("all").unwrap().len(), 9);
        assert_eq!(
            Suite::parse_list("fisher,weak-decay").unwrap(),
            vec![Suite::Fisher, Suite::WeakDecay]
        );
        assert!(Suite::parse_list("nope").is_err());
    }

    #[test]
    fn small_kinematics_suite_passes() {
        let cfg = ExperimentConfig {
            triples: 2000,
            mc_samples: 20_000,
            ..ExperimentConfig::desk()
        };
        let report = verify(&[Suite::Kinematics], &cfg).unwrap();
        let suite = &report.suites[0];
        assert_eq!(suite.checks.len(), 6 * 5 + 18);
        assert!(suite.passed, "{}", report.summary());
    }
}
