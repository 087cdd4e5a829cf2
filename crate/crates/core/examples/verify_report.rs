// Running verification suites from code and writing the report.
//
// `maxcool verify` does the same from the command line. The configuration
// here is scaled down so the example finishes in a few seconds.

use maxcool::harness::{verify, ExperimentConfig, Suite};

pub fn run_example() -> maxcool::Result<()> {
    let cfg = ExperimentConfig {
        triples: 20_000,
        mc_samples: 50_000,
        particles: 20_000,
        ..ExperimentConfig::desk()
    };
    let report = verify(&[Suite::Kinematics, Suite::Energy], &cfg)?;
    print!("{}", report.summary());

    let dir = std::env::temp_dir().join(format!("maxcool-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    for path in report.write(&dir.join("report.json"), &cfg)? {
        println!("wrote {}", path.display());
    }
    println!("config sha256 {}", report.config_sha256);
    Ok(())
}

#[allow(dead_code)]
fn main() -> maxcool::Result<()> {
    run_example()
}
