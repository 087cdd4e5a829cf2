// Functional inequalities on a non-Maxwellian density.
//
// Nash-type, interpolation and `L²`+moment bounds are evaluated on the default
// parameter grids, together with the entropy chain
// `½‖f - M‖₁² ≤ H(f|M) ≤ I(f) - 3/θ`.

use maxcool::realspace::{default_r_grid, entropy_route_check, inequality_suite, reconstruct, InequalityParams};
use maxcool::spectral::{CharacteristicProfile, RadialGrid};

pub fn run_example() -> maxcool::Result<()> {
    let phi = CharacteristicProfile::bi_maxwellian(RadialGrid::new(2048, 40.0)?, 0.5, 0.6, 1.4)?;
    let f = reconstruct(&phi, default_r_grid(&phi)?)?;

    let report = inequality_suite(&phi, &f, &InequalityParams::default())?;
    println!(
        "{:<14} {:<28} {:>12} {:>12} {:>8}",
        "kind", "parameters", "lhs", "rhs", "slack"
    );
    for o in &report.outcomes {
        let params: Vec<String> = o.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!(
            "{:<14} {:<28} {:>12.5e} {:>12.5e} {:>8.3}",
            format!("{:?}", o.kind),
            params.join(" "),
            o.lhs,
            o.rhs,
            o.slack
        );
    }
    println!(
        "all hold: {}, smallest slack {:.4}",
        report.all_hold(),
        report.min_slack()
    );

    let chain = entropy_route_check(&f, phi.temperature())?;
    println!(
        "entropy chain: {:.4e} <= {:.4e} <= {:.4e} ({})",
        chain.half_l1_squared,
        chain.entropy,
        chain.fisher_gap,
        chain.holds()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> maxcool::Result<()> {
    run_example()
}
