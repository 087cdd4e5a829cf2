use std::process::Command;

fn maxcool() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maxcool"))
}

#[test]
fn help_lists_every_subcommand() {
    let out = maxcool().arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["evolve", "dsmc", "steady", "sweep-eps", "verify", "kincheck"] {
        assert!(text.contains(cmd), "missing {cmd}");
    }
}

#[test]
fn bad_input_exits_two() {
    let out = maxcool().args(["evolve", "--e", "-0.2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = maxcool().args(["dsmc", "--init", "bimax:2,1,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kincheck_reports_every_restitution() {
    let out = maxcool().args(["kincheck", "--triples", "400"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn evolve_writes_config_header_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let prof = dir.path().join("phi.txt");
    let out = maxcool()
        .args([
            "evolve", "--e", "0.8", "--grid-n", "256", "--x-max", "20", "--t-max", "1", "--dt", "0.05",
        ])
        .arg("--out")
        .arg(&csv)
        .arg("--profile-out")
        .arg(&prof)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(&csv).unwrap();
    assert!(trace.contains("# config_sha256 = "));
    assert!(trace.contains("# e = 0.8"));
    let profile = std::fs::read(&prof).unwrap();
    let (phi, header) = maxcool::spectral::read_profile(profile.as_slice()).unwrap();
    assert_eq!(phi.values.len(), 256);
    assert!((header.e - 0.8).abs() < 1e-15);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "e = 0.3\nparticles = 500\nt_max = 0.5\nrecord_every = 0.25\n").unwrap();
    let csv = dir.path().join("dsmc.csv");
    let out = maxcool()
        .args(["dsmc", "--e", "0.6", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let series = maxcool::dsmc::read_series(std::io::BufReader::new(std::fs::File::open(&csv).unwrap())).unwrap();
    assert_eq!(series.n, 500);
    assert!((series.e - 0.6).abs() < 1e-15);
    assert_eq!(series.records.len(), 3);
}
