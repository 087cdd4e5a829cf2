// Particle simulation against the spectral solver.
//
// A Kac-style particle system and the Fourier solver start from the same
// bi-Maxwellian. After a short run the empirical characteristic function of
// the particles is compared with the spectral profile; the gap should be of
// the order of the sampling noise `1/√N`.

use maxcool::dsmc::{run, sample_initial, InitialSpec, RunConfig};
use maxcool::harness::fit_exponential_rate;
use maxcool::kinematics::Restitution;
use maxcool::spectral::{evolve, DiagnosticSchedule, Frame};
use maxcool::{RatePair, SolverConfig};

pub fn run_example() -> maxcool::Result<()> {
    let e = 0.7;
    let n = 20_000;
    let init = InitialSpec::default();
    let cfg = RunConfig {
        t_max: 3.0,
        ..RunConfig::default()
    };

    let mut ens = sample_initial(init, n, e, 3)?;
    let series = run(&mut ens, &cfg, &RatePair::constant())?;
    println!("{} collisions over {} steps", ens.collisions_applied, ens.steps);

    let fit = fit_exponential_rate(&series.m2_series(), (0.0, cfg.t_max))?;
    println!(
        "particle m2 decay rate {:.5}, expected 2E = {:.5}",
        fit.rate,
        2.0 * Restitution::new(e)?.dissipation()
    );

    let solver = SolverConfig {
        n: 1024,
        x_max: 25.0,
        dt: 0.02,
        t_max: cfg.t_max,
        frame: Frame::Unscaled,
        ..SolverConfig::default()
    };
    let trace = evolve(
        &init.profile(solver.grid()?)?,
        &Restitution::new(e)?,
        &solver,
        &DiagnosticSchedule::default(),
    )?;
    let phi = &trace.final_profile;
    let last = series.records.last().expect("the run records its end point");
    let h = phi.grid.spacing();
    let mut worst: f64 = 0.0;
    println!("{:>6} {:>10} {:>10}", "x", "ecf", "spectral");
    for (x, value) in series.x_grid.iter().zip(&last.ecf) {
        let spectral = phi.values[(x / h).round() as usize];
        worst = worst.max((value - spectral).abs());
        println!("{x:>6.2} {value:>10.6} {spectral:>10.6}");
    }
    println!("max gap x sqrt(N) = {:.3}", worst * (n as f64).sqrt());
    Ok(())
}

#[allow(dead_code)]
fn main() -> maxcool::Result<()> {
    run_example()
}
