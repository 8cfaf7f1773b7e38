use std::path::Path;
use std::process::{Command, Output};

use shuttle_cli::config::ScenarioConfig;
use tempfile::TempDir;

fn shuttle(args: &[&str], config: &str, dir: &Path) -> Output {
    let path = dir.join("scenario_in.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_shuttle"))
        .args(args)
        .arg(&path)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

/// Data rows as (header → field) lookups.
fn rows(csv: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = csv.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect())
        .collect()
}

fn field(row: &[(String, String)], key: &str) -> String {
    row.iter().find(|(k, _)| k == key).unwrap().1.clone()
}

fn value(row: &[(String, String)], key: &str) -> f64 {
    field(row, key).parse().unwrap()
}

/// Cheap harmonic runs: a coarse fixed grid, no refinement.
const HARMONIC_SWEEP: &str = r#"
trap.potential_kind = "HarmonicOnly"
protocol.variant = "UnboundedOptimal"
protocol.tf_s = 0.06
simulation.converge = false
simulation.n_points = 1024
simulation.half_width_m = 8e-5
simulation.dt_s = 1e-4
sweep.tf_min_s = 0.06
sweep.tf_max_s = 0.1
sweep.tf_count = 3
sweep.protocols = ["Polynomial5", "CubicMinHarmonic", "UnboundedOptimal"]
"#;

#[test]
fn effective_config_round_trips() {
    let inputs = [
        "",
        HARMONIC_SWEEP,
        "[trap]\ntrap_depth_J = 1e-28\nrayleigh_m = 8e-3\n[protocol]\nvariant = \"Polynomial5\"\ndelta_m = 1e-3\n",
        "energy.min_energy_constant = { custom = 43.5 }\nenergy.budget_J = 1e-29\nsimulation.compensate = true\n",
    ];
    for text in inputs {
        let c = ScenarioConfig::parse(text).unwrap().effective().unwrap();
        let again = ScenarioConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(again, c, "{text}");
        assert_eq!(again.plan().unwrap(), c.plan().unwrap());
        assert_eq!(again.effective().unwrap(), c);
    }
}

#[test]
fn written_scenario_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let out = shuttle(&["energy"], "sweep.tf_count = 4\n", dir.path());
    assert!(out.status.success());
    let written = ScenarioConfig::parse(&read(dir.path(), "scenario.toml")).unwrap();
    let original = ScenarioConfig::parse("sweep.tf_count = 4\n").unwrap();
    assert_eq!(written.plan().unwrap().tfs, original.plan().unwrap().tfs);
    let again = TempDir::new().unwrap();
    let out = shuttle(&["energy"], &read(dir.path(), "scenario.toml"), again.path());
    assert!(out.status.success());
    assert_eq!(read(dir.path(), "energy.csv"), read(again.path(), "energy.csv"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    for text in ["trap.mass = 1e-25\n", "[simulaton]\n", "output.dir = \"x\"\noutput.colour = 1\n"] {
        let out = shuttle(&["check"], text, dir.path());
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("unknown"), "{text}");
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(shuttle(&["check"], "", d).status.code(), Some(0));
    // Below tf_min for the default bound.
    assert_eq!(shuttle(&["check"], "protocol.tf_s = 0.04\nprotocol.delta_m = 9.7e-4\n", d).status.code(), Some(2));
    assert_eq!(shuttle(&["design"], "protocol.tf_s = 0.04\nprotocol.delta_m = 9.7e-4\n", d).status.code(), Some(2));
    assert_eq!(shuttle(&["check"], "protocol.tf_s = -1.0\n", d).status.code(), Some(1));
    assert_eq!(shuttle(&["check"], "trap.omega0_rad_s = \"fast\"\n", d).status.code(), Some(1));
    // A window a few ground widths across leaks at once.
    let narrow = "trap.potential_kind = \"HarmonicOnly\"\nprotocol.variant = \"Polynomial5\"\n\
                  simulation.converge = false\nsimulation.n_points = 256\nsimulation.half_width_m = 4e-6\n";
    let out = shuttle(&["simulate"], narrow, d);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let bin = env!("CARGO_BIN_EXE_shuttle");
    assert_eq!(Command::new(bin).output().unwrap().status.code(), Some(1));
    assert_eq!(Command::new(bin).args(["launch", "x.toml"]).output().unwrap().status.code(), Some(1));
    assert_eq!(Command::new(bin).args(["check", "/nonexistent/x.toml"]).output().unwrap().status.code(), Some(1));
    assert_eq!(Command::new(bin).arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn check_reports_the_bounds() {
    let dir = TempDir::new().unwrap();
    let out = shuttle(&["check"], "", dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = |key: &str| -> String {
        text.lines()
            .find(|l| l.starts_with(key))
            .unwrap_or_else(|| panic!("{key} missing from\n{text}"))[24..]
            .to_string()
    };
    let tf_min: f64 = line("tf_min").parse().unwrap();
    assert!((tf_min - 0.05104).abs() < 1e-4 && tf_min < 0.052);
    assert_eq!(line("verdict"), "feasible");
    let threshold: f64 = line("perturbative tf").parse().unwrap();
    assert!((threshold / 0.389 - 1.0).abs() < 0.05);

    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "check.json")).unwrap();
    for key in ["config_echo", "feasibility", "results", "warnings"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
    assert_eq!(summary["results"][0]["audit"]["dominates"], true);

    let out = shuttle(&["check"], "protocol.delta_ratio = 1.2\n", dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("bound inactive"));
}

#[test]
fn design_tables() {
    let dir = TempDir::new().unwrap();
    let out = shuttle(&["design"], "output.samples = 1000\n", dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (d, tf) = (0.01, 0.052);
    let delta0 = 14.0 * d / (3.0 * (2.0 * std::f64::consts::PI * 20.0 * tf).powi(2));

    let unbounded = rows(&read(dir.path(), "trajectory_UnboundedOptimal.csv"));
    let u: Vec<(f64, f64)> = unbounded.iter().map(|r| (value(r, "t_s"), value(r, "u_m"))).collect();
    let u_max = u.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    assert!((u_max / delta0 - 1.0).abs() < 1e-9);
    for &(t, u) in &u {
        if t < 0.49 * tf {
            assert!(u <= 0.0, "u({t}) = {u}");
        } else if t > 0.51 * tf {
            assert!(u >= 0.0, "u({t}) = {u}");
        }
    }

    let bounded = rows(&read(dir.path(), "trajectory_BoundedOptimal.csv"));
    let delta = 0.89 * delta0;
    let saturated = bounded.iter().filter(|r| (value(r, "u_m").abs() / delta - 1.0).abs() < 1e-12).count();
    assert!(saturated > 10);
    assert!(bounded.iter().all(|r| value(r, "u_m").abs() <= delta * (1.0 + 1e-12)));

    // The trap path of the quintic has no end jumps; the bang-bang one
    // jumps by δ within the first offset sample.
    let end_slopes = |table: &[Vec<(String, String)>]| {
        let p: Vec<(f64, f64)> = table.iter().map(|r| (value(r, "t_s"), value(r, "x0_m"))).collect();
        let n = p.len();
        let slope = |a: (f64, f64), b: (f64, f64)| ((b.1 - a.1) / (b.0 - a.0)).abs();
        (p[0].1, p[n - 1].1, slope(p[0], p[1]).max(slope(p[n - 2], p[n - 1])) * tf / d)
    };
    let poly = rows(&read(dir.path(), "trajectory_Polynomial5.csv"));
    let (first, last, slope) = end_slopes(&poly);
    assert!(first.abs() < 1e-15 && (last - d).abs() < 1e-15);
    assert!(slope < 10.0, "{slope}");
    assert!(end_slopes(&bounded).2 > 1e6);
    assert_eq!(poly[0].iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>(), ["t_s", "xc_m", "xc_dot_mps", "xc_ddot_mps2", "u_m", "x0_m"]);
}

#[test]
fn energy_sweep_orderings() {
    let dir = TempDir::new().unwrap();
    let out = shuttle(&["energy"], "", dir.path());
    assert!(out.status.success());
    let table = rows(&read(dir.path(), "energy.csv"));
    let series = |p: &str| -> Vec<(f64, String)> {
        table
            .iter()
            .filter(|r| field(r, "protocol") == p)
            .map(|r| (value(r, "tf_s"), field(r, "Epp_avg_J")))
            .collect()
    };
    let cubic = series("CubicMinHarmonic");
    let unbounded = series("UnboundedOptimal");
    let bounded = series("BoundedOptimal");
    let expected = (1296.0 / 5.0) / (3.0 / 7.0 * (14.0f64 / 3.0).powi(4));
    for ((c, u), b) in cubic.iter().zip(&unbounded).zip(&bounded) {
        let (c, u): (f64, f64) = (c.1.parse().unwrap(), u.1.parse().unwrap());
        assert!((c / u / expected - 1.0).abs() < 1e-10);
        // The first time lands on tf_min, where the bound is only just reachable.
        if let Ok(b) = b.1.parse::<f64>() {
            assert!(b >= u * (1.0 - 1e-12));
        }
    }
    // Sorted by protocol, then time.
    let keys: Vec<(String, f64)> = table.iter().map(|r| (field(r, "protocol"), value(r, "tf_s"))).collect();
    let order = ["Polynomial5", "CubicMinHarmonic", "UnboundedOptimal", "BoundedOptimal"];
    let rank = |k: &(String, f64)| (order.iter().position(|o| *o == k.0).unwrap(), k.1);
    assert!(keys.windows(2).all(|w| rank(&w[0]) < rank(&w[1])));
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "energy.json")).unwrap();
    assert_eq!(summary["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn harmonic_sweep_is_exact_and_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let run = |dir: &Path, threads: &str| {
        let out = shuttle(&["sweep", "--threads", threads], HARMONIC_SWEEP, dir);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run(a.path(), "1");
    run(b.path(), "3");
    let csv = read(a.path(), "fidelity.csv");
    assert_eq!(csv, read(b.path(), "fidelity.csv"));
    assert_eq!(read(a.path(), "sweep.json").replace(&*a.path().to_string_lossy(), ""), read(b.path(), "sweep.json").replace(&*b.path().to_string_lossy(), ""));
    let table = rows(&csv);
    assert_eq!(table.len(), 9);
    for r in &table {
        assert_eq!(field(r, "status"), "ok");
        assert!(value(r, "fidelity") >= 1.0 - 1e-6, "{r:?}");
    }
}

#[test]
fn snapshots_are_capped() {
    let dir = TempDir::new().unwrap();
    let text = format!("{HARMONIC_SWEEP}simulation.snapshots = 7\n");
    let out = shuttle(&["simulate"], &text, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let snaps = rows(&read(dir.path(), "snapshots.csv"));
    let mut times: Vec<String> = snaps.iter().map(|r| field(r, "t_s")).collect();
    times.dedup();
    assert!(times.len() <= 7 && times.len() >= 2, "{}", times.len());
    assert_eq!(snaps.len(), times.len() * 1024);
    let too_many = format!("{HARMONIC_SWEEP}simulation.snapshots = 65\n");
    assert_eq!(shuttle(&["simulate"], &too_many, dir.path()).status.code(), Some(1));
}
