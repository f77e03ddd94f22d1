use std::path::Path;
use std::process::{Command, Output};

use photon_gate_core::sweep::read_rows;
use serde_json::Value;

fn photon_gate(args: &[&str]) -> Output {
    photon_gate_env(args, &[])
}

fn photon_gate_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_photon-gate"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn zero_strength_is_identity() {
    let v = json(&photon_gate(&["fidelity", "--interaction.g=0"]));
    let r = &v["result"];
    assert!((num(&r["fidelity"]) - 1.0).abs() < 1e-10);
    assert!(num(&r["phase"]).abs() < 1e-10);
    assert_eq!(v["version"].as_str().unwrap(), photon_gate_core::ARTIFACT_VERSION);
    assert_eq!(num(&v["config"]["geometry"]["sigma_over_lambda"]), 10.0);
    assert_eq!(num(&v["config"]["geometry"]["l_over_sigma"]), 4.0 * std::f64::consts::PI);
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        vec!["fidelity"],
        vec!["fidelity", "--interaction.g=1", "--interaction.bogus=2"],
        vec!["fidelity", "--interaction.g=abc"],
        vec!["fidelity", "--interaction.g=1", "--interaction.target_phase=pi"],
        vec!["frobnicate"],
        vec!["fidelity", "--config", "/nonexistent/run.ini"],
        vec!["modes", "--interaction.g=0.1"],
        vec!["sweep", "--sweep.points=0"],
    ] {
        let out = photon_gate(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = photon_gate(&["fidelity", "--interaction.g=0", "--output.path=/nonexistent/dir/out.json"]);
    assert_eq!(out.status.code(), Some(1));
    let out = photon_gate_env(&["fidelity", "--interaction.g=0"], &[("PHOTON_GATE_THREADS", "many")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two() {
    // the box is far too small for the Gaussian tails
    let out = photon_gate(&[
        "propagate",
        "--interaction.g=1",
        "--numerics.grid=16,16,8",
        "--numerics.extent=3,3,3",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let ini = dir.path().join("run.ini");
    std::fs::write(
        &ini,
        "[geometry]\nseparation = 5\n\n[interaction]\ng = 3\n\n[numerics]\ntol = 1e-9\n",
    )
    .unwrap();
    let v = json(&photon_gate(&["fidelity", "--config", ini.to_str().unwrap(), "--interaction.g=40.25"]));
    assert_eq!(num(&v["config"]["geometry"]["separation"]), 5.0);
    assert_eq!(num(&v["config"]["interaction"]["g"]), 40.25);
    assert_eq!(num(&v["config"]["numerics"]["tol"]), 1e-9);
    assert_eq!(num(&v["result"]["g"]), 40.25);
}

#[test]
fn phase_field_table() {
    let out = photon_gate(&["phase-field", "--interaction.g=0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# photon-gate"));
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 65 * 24);
    assert!(rows.iter().all(|r| r[2] == 0.0));

    // the default z range is symmetric about z = l, and so is the phase
    let out = photon_gate(&["phase-field", "--interaction.g=1", "--phase_field.nrho=3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let phases: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    let nz = 65;
    for i in 0..nz {
        for j in 0..3 {
            let a = phases[i * 3 + j];
            let b = phases[(nz - 1 - i) * 3 + j];
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{i} {j}: {a} {b}");
        }
    }
}

fn read_csv(path: &Path) -> Vec<photon_gate_core::sweep::SweepRow> {
    read_rows(std::fs::read(path).unwrap().as_slice()).unwrap()
}

#[test]
fn sweep_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let svg = dir.path().join("sweep.svg");
    let out = photon_gate(&[
        "sweep",
        "--geometry.separation=10",
        "--sweep.g_min=1",
        "--sweep.g_max=200",
        "--sweep.points=12",
        &format!("--output.path={}", csv.display()),
        &format!("--output.svg={}", svg.display()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&csv);
    assert_eq!(rows.len(), 13);
    assert_eq!(rows[0].g, 0.0);
    assert!(rows.windows(2).all(|w| w[1].phase_unwrapped < w[0].phase_unwrapped));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("# geometry.separation = 10.0"));
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline") && !svg.contains("href"));
}

#[test]
fn tradeoff_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = photon_gate(&[
        "tradeoff",
        "--sweep.separations=26,79",
        &format!("--output.path={}", csv.display()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&csv);
    assert!((rows[0].fidelity - 0.90).abs() <= 0.02, "{}", rows[0].fidelity);
    assert!((rows[1].fidelity - 0.99).abs() <= 0.005, "{}", rows[1].fidelity);
    assert!(rows[1].g > rows[0].g);
}

#[test]
fn output_independent_of_worker_count() {
    let args = ["sweep", "--sweep.g_min=0.01", "--sweep.g_max=2", "--sweep.points=6"];
    let one = photon_gate_env(&args, &[("PHOTON_GATE_THREADS", "1")]);
    let four = photon_gate_env(&args, &[("PHOTON_GATE_THREADS", "4")]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn propagate_without_diffraction_matches_analytic() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("xi.bin");
    let v = json(&photon_gate(&[
        "propagate",
        "--geometry.separation=26",
        "--interaction.g=1345.5",
        "--numerics.grid=32,32,32",
        "--numerics.steps=16",
        "--numerics.diffraction=false",
        &format!("--output.dump={}", dump.display()),
    ]));
    let r = &v["result"];
    assert!(num(&r["deviation_from_analytic"]["overlap_relative"]) < 1e-6, "{r}");
    assert!(r.get("phase_only_on_grid").is_none());
    assert_eq!(num(&r["l_over_r"]), 0.2);
    let d = photon_gate_core::propagator::dump::read_density(std::fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!(d.density.len(), 32 * 32 * 32);
}

#[test]
fn modes_summary() {
    let v = json(&photon_gate(&[
        "modes",
        "--interaction.kind=dipole-simplified",
        "--interaction.g=0",
        "--numerics.max_order=4",
    ]));
    let r = &v["result"];
    assert!(num(&r["unitarity_deficit"]).abs() < 1e-10);
    assert!(num(&r["schmidt"]["entropy"]).abs() < 1e-10);
    assert!((num(&r["c0000"][0]) - 1.0).abs() < 1e-10);
}

#[test]
fn validate_subset() {
    let out = photon_gate(&["validate", "--validate.criteria=1,2,5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
    assert_eq!(photon_gate(&["validate", "--validate.criteria=11"]).status.code(), Some(1));
}
