// Inelastic collision maps in both parameterisations.
//
// One pre-collisional pair is pushed through the reflection map (contact
// normal `n`) and the swapping map (post-collisional direction `σ`), then
// back through the inverse maps. The example also converts between the two
// collision vectors and finishes with a small Monte Carlo check that the
// weak and strong forms of the gain term agree.

use maxcool::kinematics::{
    collide, convert_param, mc_change_of_variables, precollide, velocity_jacobian_det, Conversion, EffectiveRates,
    GaussianBumpKernel, TheoremBranch,
};
use maxcool::{CollisionTriple, Param, RatePair, Restitution, UnitVector3, Vec3};

pub fn run_example() -> maxcool::Result<()> {
    let r = Restitution::new(0.7)?;
    let v = Vec3::new(1.0, 0.2, -0.4);
    let w = Vec3::new(-0.5, 0.9, 0.3);
    let n = UnitVector3::from_components(0.6, -0.3, 0.8)?;

    let before = CollisionTriple::new(v, w, n, Param::Reflection);
    let after = collide(&before, &r).triple;
    let back = precollide(&after, &r)?.triple;
    println!("reflection map, e = {}", r.e());
    println!("  v' = {:.6?}", after.v.as_slice());
    println!("  w' = {:.6?}", after.w.as_slice());
    println!("  energy {:.6} -> {:.6}", before.energy(), after.energy());
    println!("  round trip error {:.2e}", (back.v - v).norm() + (back.w - w).norm());
    println!(
        "  |det| = {:.8} (e = {})",
        velocity_jacobian_det(&before, &r, false, 1e-5)?.abs(),
        r.e()
    );

    // the same collision written with σ
    let k = UnitVector3::new(v - w)?;
    let sigma = convert_param(&k, &n, Conversion::NormalToSigma)?;
    let swapped = collide(&CollisionTriple::new(v, w, sigma, Param::Swap), &r).triple;
    println!("swapping map at σ = {:.6?}", sigma.as_slice());
    println!(
        "  agrees with the reflection map to {:.2e}",
        (swapped.v - after.v).norm() + (swapped.w - after.w).norm()
    );

    let rates = EffectiveRates::new(&RatePair::constant(), &r)?;
    let kernel = GaussianBumpKernel::random(7, 0);
    for branch in [TheoremBranch::Sigma, TheoremBranch::Normal] {
        let est = mc_change_of_variables(&kernel, &rates, branch, 200_000, 42)?;
        println!(
            "change of variables ({branch:?}): lhs {:.5} rhs {:.5} z = {:.2}",
            est.lhs,
            est.rhs,
            est.z_score()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> maxcool::Result<()> {
    run_example()
}
