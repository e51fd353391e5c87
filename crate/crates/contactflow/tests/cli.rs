//! End-to-end checks of the command-line interface and file outputs.

use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contactflow"))
}

const SMALL: &str = "
[sigma]
kind = special
alpha = pi/2

[interface]
kind = diameter
nodes = 81

[solver]
rings = 24

[experiment]
eps = 0.15
t_end = 0.001
report_fractions = 0.0, 1.0
samples = 1500
";

#[test]
fn validate_passes_on_default_setup() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lab.cfg");
    fs::write(&cfg, SMALL).unwrap();
    let out = bin()
        .args(["validate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.lines().all(|l| l.is_empty() || l.starts_with("PASS")), "{stdout}");
}

#[test]
fn config_errors_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.cfg");
    fs::write(&cfg, "[sigma]\nkind = special\n").unwrap();
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("`alpha`"), "{stderr}");

    fs::write(&cfg, "[sigma]\nalpha == pi/2\n").unwrap();
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn validate_flags_inadmissible_bump() {
    // kappa = cos(alpha) breaks the monotonicity of the boundary density
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad_bump.cfg");
    fs::write(
        &cfg,
        "[sigma]\nkind = bump\nkappa = 0.5\nalpha = pi/3\n[interface]\nkind = chord\n",
    )
    .unwrap();
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("sigma"), "{stderr}");
}

#[test]
fn simulate_outputs_are_deterministic_and_well_formed() {
    let run = |dir: &std::path::Path| -> (String, String) {
        let cfg = dir.join("lab.cfg");
        fs::write(&cfg, SMALL).unwrap();
        let out = bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let energy = fs::read_to_string(dir.join("energy_eps0.15.csv")).unwrap();
        let snap = fs::read_to_string(dir.join("snapshot_eps0.15_000.txt")).unwrap();
        (energy, snap)
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let (e1, s1) = run(d1.path());
    let (e2, s2) = run(d2.path());
    assert_eq!(e1, e2, "energy CSV must be byte-identical across runs");
    assert_eq!(s1, s2, "snapshots must be byte-identical across runs");
    // metadata header carries the setup identity
    assert!(e1.starts_with("# identity: well=quartic"), "{e1}");
    assert!(e1.contains("# eps: 0.15"));
    // snapshot format: `# t=<t> eps=<eps>` then `x y u` triples
    let mut lines = s1.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# t=") && head.contains("eps=0.15"), "{head}");
    for l in lines.take(10) {
        assert_eq!(l.split_whitespace().count(), 3, "bad snapshot line {l}");
    }
    // sharp trajectory with index
    let index = fs::read_to_string(d1.path().join("sharp_trajectory/index.txt")).unwrap();
    assert!(index.lines().count() >= 2);
    let first = index.lines().next().unwrap();
    let name = first.split_whitespace().nth(1).unwrap();
    let curve_text = fs::read_to_string(d1.path().join("sharp_trajectory").join(name)).unwrap();
    let curve = contactflow::io::parse_curve(&curve_text).unwrap();
    assert_eq!(curve.nodes.len(), 81);
}

#[test]
fn calibrate_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lab.cfg");
    fs::write(&cfg, SMALL).unwrap();
    let out = bin()
        .args(["calibrate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("calibration_t0.json")).unwrap())
            .unwrap();
    let conds = json["conditions"].as_object().unwrap();
    for name in ["transport_xi", "xi_angle_on_boundary", "weight_coercivity"] {
        let c = &conds[name];
        assert!(c["max_ratio"].is_number());
        assert!(c["worst_point"].is_array());
        assert!(c["samples"].as_u64().unwrap() > 0);
    }
    assert!(json["hard_failures"].as_array().unwrap().is_empty());
}
