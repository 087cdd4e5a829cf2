// Cooling of a bi-Maxwellian gas, solved in Fourier variables.
//
// The unscaled frame keeps the physical temperature, which decays like
// `exp(-2Et)` with `E = (1-e²)/8`. The fitted rate is compared with that law.

use maxcool::harness::fit_exponential_rate;
use maxcool::kinematics::Restitution;
use maxcool::spectral::{evolve, CharacteristicProfile, DiagnosticSchedule, Frame};
use maxcool::SolverConfig;

pub fn run_example() -> maxcool::Result<()> {
    let r = Restitution::new(0.5)?;
    let config = SolverConfig {
        n: 1024,
        x_max: 25.0,
        dt: 0.02,
        t_max: 4.0,
        frame: Frame::Unscaled,
        ..SolverConfig::default()
    };
    let phi0 = CharacteristicProfile::bi_maxwellian(config.grid()?, 0.5, 0.6, 1.4)?;
    let trace = evolve(&phi0, &r, &config, &DiagnosticSchedule::every(0.5, config.t_max))?;

    println!("{:>5} {:>12} {:>12}", "t", "theta", "m4");
    for rec in &trace.records {
        println!("{:>5.2} {:>12.8} {:>12.8}", rec.time, rec.temperature, rec.m4);
    }
    let series: Vec<(f64, f64)> = trace.records.iter().map(|rec| (rec.time, rec.temperature)).collect();
    let fit = fit_exponential_rate(&series, (0.0, config.t_max))?;
    println!(
        "fitted temperature decay rate {:.8}, expected 2E = {:.8}",
        fit.rate,
        2.0 * r.dissipation()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> maxcool::Result<()> {
    run_example()
}
