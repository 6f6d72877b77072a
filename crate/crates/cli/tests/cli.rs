use std::path::Path;
use std::process::{Command, Output};

fn rom(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rom"))
        .args(args)
        .env("ROM_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn rom_prints_six_decimals() {
    let dir = tempfile::tempdir().unwrap();
    for (state, want) in [("H^2", "1.747547"), ("hoggar", "3.800000"), ("jam(optimal1)", "1.747547"), ("CCZ_123", "2.555556")] {
        let o = rom(dir.path(), &["rom", "--state", state]);
        assert!(o.status.success(), "{state}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o).trim(), want, "{state}");
    }
}

#[test]
fn rom_json_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = rom(dir.path(), &["--json", "rom", "--state", "T_1", "--certificate"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-9);
    assert_eq!(v["status"], "certified");
    let l1: f64 = v["mixture"].as_array().unwrap().iter().map(|t| t["coefficient"].as_f64().unwrap().abs()).sum();
    assert!((l1 - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn generated_basis_is_reusable() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("n2.romb");
    let o = rom(dir.path(), &["gen-basis", "--n", "2", "--out", file.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("60 columns"));
    let o = rom(dir.path(), &["rom", "--state", "H^2", "--basis", file.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "1.747547");
    // Wrong register size is a domain error.
    let o = rom(dir.path(), &["rom", "--state", "H", "--basis", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(rom(dir.path(), &["rom"]).status.code(), Some(2));
    assert_eq!(rom(dir.path(), &["rom", "--state", "bloch("]).status.code(), Some(2));
    assert_eq!(rom(dir.path(), &["gen-basis", "--n", "6"]).status.code(), Some(2));
    assert_eq!(rom(dir.path(), &["rom", "--state", "bloch(1,1,1)"]).status.code(), Some(1));
    assert_eq!(rom(dir.path(), &["synth-bound", "--gate", "CCZ_123", "--known-t", "3"]).status.code(), Some(1));
    assert_eq!(rom(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn synth_bound_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = rom(dir.path(), &["synth-bound", "--gate", "CCZ_123", "--known-t", "4"]);
    assert!(stdout(&o).contains("optimal"));
    let o = rom(dir.path(), &["--json", "synth-bound", "--gate", "CS_12", "--known-t", "4"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["lower_t"], 3);
    assert_eq!(v["verdict"], "gap");
    let o = rom(dir.path(), &["synth-bound", "--gate", "H"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn clifford_equiv_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let o = rom(dir.path(), &["clifford-equiv", "--u", "CCZ_123", "--v", "CS_12CCZ_123"]);
    assert!(stdout(&o).starts_with("found: "), "{}", stdout(&o));
    let o = rom(dir.path(), &["clifford-equiv", "--u", "H", "--v", "F"]);
    assert!(stdout(&o).starts_with("disproved"));
    let o = rom(dir.path(), &["clifford-equiv", "--u", "CCZ_123", "--v", "CS_12,13", "--budget", "5"]);
    assert!(stdout(&o).starts_with("not found"));
}

#[test]
fn bounds_and_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let o = rom(dir.path(), &["--json", "bound", "--state", "H", "--copies", "6"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["lower_bound"].as_f64().unwrap() - 3.1269).abs() < 1e-3);
    let o = rom(dir.path(), &["--json", "bracket", "--hcopies", "7"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["upper"].as_f64().unwrap() - 6.3523).abs() < 1e-3);
    assert!((v["lower"].as_f64().unwrap() - 3.75592).abs() < 1e-3);
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("t.circ");
    std::fs::write(&circuit, "qubits 1\nH 1\nT 1\nOBSERVE X\n").unwrap();
    let args = ["simulate", "--circuit", circuit.to_str().unwrap(), "--seed", "11", "--csv"];
    let a = stdout(&rom(dir.path(), &args));
    let b = stdout(&rom(dir.path(), &args));
    let strip = |s: &str| s.lines().nth(1).unwrap().rsplit_once(',').unwrap().0.to_string();
    assert!(a.starts_with("estimate,l1,N,delta,epsilon,seed,wall_time_s\n"));
    assert_eq!(strip(&a), strip(&b));
    let fields: Vec<&str> = a.lines().nth(1).unwrap().split(',').collect();
    let est: f64 = fields[0].parse().unwrap();
    assert!((est - 0.5f64.sqrt()).abs() < 0.05);
    assert_eq!(fields[2], "8478");

    std::fs::write(&circuit, "qubits 1\nH 1\nFOO 1\nOBSERVE X\n").unwrap();
    let o = rom(dir.path(), &["simulate", "--circuit", circuit.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn classify_three_qubits() {
    let dir = tempfile::tempdir().unwrap();
    let o = rom(dir.path(), &["--json", "classify", "--n", "3"]);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 8);
    let costs: Vec<u64> = rows.iter().map(|r| r["t_cost"].as_u64().unwrap()).collect();
    assert_eq!(costs, [0, 1, 2, 3, 3, 4, 4, 5]);
}

#[test]
fn polar_plot_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = rom(dir.path(), &["polar-plot", "--m", "2", "--steps", "4"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,R");
    assert_eq!(lines.len(), 6);
    // θ = π/2 is the CS resource state.
    let r: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
    assert!((r - 2.2).abs() < 1e-6);
    let svg = dir.path().join("p.svg");
    let o = rom(dir.path(), &["polar-plot", "--m", "1", "--steps", "8", "--out", "svg", "--file", svg.to_str().unwrap()]);
    assert!(o.status.success());
    let body = std::fs::read_to_string(svg).unwrap();
    assert!(body.starts_with("<svg") && body.contains("polyline"));
}
