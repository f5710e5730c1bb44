use std::fs;
use std::process::Command;

const SMALL: [&str; 7] = [
    "positions=[-1.0, 1.0]",
    "fock_dim=8",
    "boson_levels=[2]",
    "boson_populations=[1.0]",
    "t_max=2.0",
    "dt=0.1",
    "window_end=2.0",
];

fn cli(args: &[&str]) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dicke-battery"));
    cmd.args(args);
    for s in SMALL {
        cmd.args(["--set", s]);
    }
    cmd.output().unwrap()
}

#[test]
fn evolve_writes_trace_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let res = cli(&[
        "evolve",
        "--out",
        out.to_str().unwrap(),
        "--method",
        "krylov",
        "--tol",
        "1e-10",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 22);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("trace.json")).unwrap()).unwrap();
    assert_eq!(meta["summary"]["method"], "krylov");
    assert_eq!(meta["config"]["propagation"]["tol"], 1e-10);
}

#[test]
fn config_file_and_overrides_combine() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.toml");
    fs::write(
        &config,
        "sweep_param = \"lambda\"\nsweep_values = [0.2, 0.4]\nlambda = 9.0\n",
    )
    .unwrap();
    let out = dir.path().join("scan");
    let res = cli(&[
        "maxscan",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(out.join("maxscan.csv")).unwrap();
    let first_cells: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(first_cells, ["2.0000000000000001e-1", "4.0000000000000002e-1"]);
}

#[test]
fn spectrum_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let res = cli(&["spectrum", "--out", dir.path().to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(dir.path().join("spectrum_full.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "j_hop,e_1,e_2,e_3,e_4,M_z,O_z,degenerate");
    assert_eq!(csv.lines().count(), 42);
}

#[test]
fn bad_keys_fail_with_the_key_named() {
    let dir = tempfile::tempdir().unwrap();
    let res = cli(&["evolve", "--out", dir.path().to_str().unwrap(), "--set", "lamda=0.3"]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("lamda"));

    let res = cli(&["evolve", "--out", dir.path().to_str().unwrap(), "--set", "p_exp=-1"]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("p_exp"));
}
