use std::path::Path;
use std::process::{Command, Output};

fn robin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robin")).args(args).output().expect("spawn robin")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_line(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn model1d_prints_json_ground_state() {
    let v = json_line(&robin(&["model1d", "--alpha", "5", "--delta", "2"]));
    let e = v["E"].as_f64().unwrap();
    assert!(e > -25.0 && e < -25.0 + 1e-6, "{e}");
    assert_eq!(v["end"], "dirichlet");
    let v = json_line(&robin(&["model1d", "--alpha", "5", "--delta", "2", "--beta", "0"]));
    assert!(v["E"].as_f64().unwrap() < -25.0);
}

#[test]
fn curve_info_circle_length() {
    let v = json_line(&robin(&["curve", "--preset", "circle", "--R", "1", "--n", "256", "info"]));
    let l = v["L"].as_f64().unwrap();
    assert!((l - std::f64::consts::TAU).abs() < 1e-9, "{l}");
    assert!((v["min_layer_width"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn curve_samples_csv() {
    let o = robin(&["curve", "--preset", "ellipse", "--semi-a", "2", "--semi-b", "1", "--n", "64", "samples"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "s,x,y,kappa");
    assert_eq!(text.lines().count(), 65);
}

#[test]
fn predict_harmonic_enumeration() {
    let o = robin(&["predict", "harmonic", "--mu", "2", "--mu", "8", "--count", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "3,5,7,7");
}

#[test]
fn predict_degenerate_quadratic_well() {
    // p = 1, C = 1 is the harmonic oscillator: 1, 3, 5
    let o = robin(&["predict", "degenerate", "--p", "1", "--c-p", "1", "--count", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Vec<f64> = stdout(&o).trim().split(',').map(|x| x.parse().unwrap()).collect();
    for (a, b) in v.iter().zip([1.0, 3.0, 5.0]) {
        assert!((a - b).abs() < 1e-6, "{v:?}");
    }
}

#[test]
fn effective_circle_csv() {
    let o = robin(&["effective", "--preset", "circle", "--alpha", "7", "-k", "3", "--n-eff", "512"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "alpha,j,eigenvalue");
    let e1: f64 = rows[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((e1 + 7.0).abs() < 1e-9, "{e1}");
}

#[test]
fn bracket_csv_and_matrix_dump() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("layer");
    let o = robin(&[
        "bracket", "--preset", "circle", "--alpha", "10", "--ns", "32", "--nt", "16", "-k", "2",
        "--matrix-out", prefix.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "alpha,delta,j,lower,upper,midpoint,halfwidth");
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[3] <= f[5] && f[5] <= f[4], "{line}");
    }
    for tag in ["neumann", "dirichlet"] {
        let mtx = std::fs::read_to_string(dir.path().join(format!("layer_{tag}.mtx"))).unwrap();
        assert!(mtx.starts_with("%%MatrixMarket matrix coordinate real symmetric"));
    }
}

#[test]
fn bands_cosine_cell_and_gap_report() {
    let dir = tempfile::tempdir().unwrap();
    let cell = dir.path().join("cell.toml");
    std::fs::write(&cell, "kind = \"cosine\"\nmean = 1.0\namplitude = 1.0\n").unwrap();
    let gaps = dir.path().join("gaps.json");
    let o = robin(&[
        "bands", "--config", cell.to_str().unwrap(), "--alpha", "100", "--thetas", "17", "--j-max", "3", "--n", "256",
        "--budget", "0.5", "--gaps-out", gaps.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "theta,j,epsilon");
    assert_eq!(text.lines().count(), 1 + 3 * 18);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&gaps).unwrap()).unwrap();
    assert!(!report["entries"][0]["gaps"].as_array().unwrap().is_empty());
}

#[test]
fn oracle_disk_json() {
    let v = json_line(&robin(&["oracle", "disk", "--R", "1", "--alpha", "20", "--m", "0"]));
    let e = v["E"].as_f64().unwrap();
    assert!(e < -400.0 && e > -441.0, "{e}");
    let t = json_line(&robin(&["oracle", "disk", "--alpha", "20", "--integrator", "taylor"]));
    assert!((t["E"].as_f64().unwrap() - e).abs() < 1e-8);
}

#[test]
fn sweep_writes_outputs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.toml");
    std::fs::write(
        &plan,
        "alphas = [8.0, 10.0]\n[curve]\nkind = \"circle\"\nR = 1.0\nn = 256\n[grid]\nn_effective = 256\nn_s = 64\nn_t = 32\n[output]\ndir = \"out\"\n",
    )
    .unwrap();
    let a = robin(&["sweep", "--plan", plan.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = robin(&["sweep", "--plan", plan.to_str().unwrap(), "--seed", "50411"]);
    assert_eq!(a.stdout, b.stdout);
    let out = dir.path().join("out");
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.as_bytes(), a.stdout.as_slice());
    assert!(csv.starts_with("alpha,delta,j,lower,upper,midpoint,halfwidth,effective,remainder,predicted\n"));
    assert!(Path::new(&out.join("sweep_plots/remainder.svg")).exists());
    assert!(out.join("sweep.json").exists());
}

#[test]
fn exit_codes() {
    // usage errors
    assert_eq!(robin(&["nonsense"]).status.code(), Some(2));
    assert_eq!(robin(&["model1d", "--alpha", "5", "--delta", "2", "--bogus"]).status.code(), Some(2));
    // validation errors
    assert_eq!(robin(&["model1d", "--alpha", "0.1", "--delta", "2"]).status.code(), Some(2));
    assert_eq!(robin(&["effective", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(robin(&["sweep", "--plan", "/nonexistent/plan.toml"]).status.code(), Some(2));
    // numerical failure: no sign change in the shooting window
    assert_eq!(robin(&["oracle", "disk", "--alpha", "1", "--m", "3"]).status.code(), Some(3));
}

#[test]
fn help_lists_every_flag() {
    let cases: &[(&[&str], &[&str])] = &[
        (&["--help"], &["--seed", "curve", "model1d", "effective", "bands", "bracket", "oracle", "sweep", "predict", "ROBIN_WORKERS"]),
        (
            &["curve", "--help"],
            &["--config", "--preset", "--R", "--semi-a", "--semi-b", "--amplitude", "--mode", "--p", "--c-p", "--r0", "--ell", "--n", "--out"],
        ),
        (&["model1d", "--help"], &["--alpha", "--delta", "--beta", "--out"]),
        (&["effective", "--help"], &["--alpha", "--k", "--n-eff", "--matrix-out", "--config", "--preset"]),
        (&["bands", "--help"], &["--config", "--alpha", "--thetas", "--j-max", "--n", "--budget", "--gaps-out", "--matrix-out"]),
        (&["bracket", "--help"], &["--alpha", "--delta", "--b", "--phi-min", "--ns", "--nt", "--k", "--matrix-out"]),
        (&["oracle", "disk", "--help"], &["--R", "--alpha", "--m", "--integrator", "--e-lo", "--e-hi"]),
        (&["sweep", "--help"], &["--plan", "--out-dir", "--alphas", "--no-plots", "--seed"]),
        (&["predict", "harmonic", "--help"], &["--mu", "--count"]),
        (&["predict", "degenerate", "--help"], &["--p", "--c-p", "--count"]),
    ];
    for (args, flags) in cases {
        let o = robin(args);
        assert!(o.status.success(), "{args:?}");
        let text = stdout(&o);
        for f in *flags {
            assert!(text.contains(f), "{args:?} help lacks {f}");
        }
    }
}
