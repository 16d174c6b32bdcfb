//! Runs the built binary and checks output formats and exit codes.

use std::process::{Command, Output};

fn ortholab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ortholab"))
        .args(args)
        .env_remove("ORTHOLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn eval_values_and_errors() {
    let o = ortholab(&["eval", "rogersL", "0.5"]);
    assert_eq!(code(&o), 0);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - std::f64::consts::PI.powi(2) / 12.0).abs() < 1e-15);

    let o = ortholab(&["eval", "rogersL", "-1"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v + std::f64::consts::PI.powi(2) / 12.0).abs() < 1e-15);

    assert_eq!(
        stdout(&ortholab(&["eval", "li2", "0"])).trim().parse::<f64>().unwrap(),
        0.0
    );
    assert_eq!(code(&ortholab(&["eval", "rogersL", "1.5"])), 2);
    assert_eq!(code(&ortholab(&["eval", "cosh", "1"])), 2);
    assert_eq!(code(&ortholab(&["eval", "li2"])), 2);
}

#[test]
fn eval_json_round_trips() {
    let o = ortholab(&["eval", "li2", "-0.3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["function"], "li2");
    let text = ortholab(&["eval", "li2", "-0.3"]);
    let from_text: f64 = stdout(&text).trim().parse().unwrap();
    assert_eq!(v["value"].as_f64().unwrap().to_bits(), from_text.to_bits());
}

#[test]
fn polygon_json_schema() {
    let o = ortholab(&["polygon", "--regular", "6"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 6);
    assert_eq!(v["vertices_deg"].as_array().unwrap().len(), 6);
    let ortho = v["ortho"].as_array().unwrap();
    assert_eq!(ortho.len(), 9);
    for e in ortho {
        assert!(e["i"].is_u64() && e["j"].is_u64() && e["b"].is_f64() && e["l"].is_f64());
    }
    assert!(v["defect"].as_f64().unwrap().abs() < 1e-9);
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(
        stderr.contains("3 L(2.4999") && stderr.contains("6 L(3.333"),
        "{stderr}"
    );
}

#[test]
fn polygon_triangle_is_empty() {
    let o = ortholab(&["polygon", "--regular", "3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["ortho"].as_array().unwrap().is_empty());
    assert_eq!(v["defect"].as_f64().unwrap(), 0.0);
}

#[test]
fn polygon_from_points_matches_pentagon_cross_ratios() {
    let o = ortholab(&["polygon", "--vertices", "0,0.25,0.5,1,inf", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["i", "j", "b", "l"]);
    let mut b: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    b.sort_by(f64::total_cmp);
    let mut expected = ortholab::polygon::pentagon_cross_ratios(0.25, 0.5).unwrap().to_vec();
    expected.sort_by(f64::total_cmp);
    for (x, y) in b.iter().zip(&expected) {
        assert!((x - y).abs() < 1e-14);
    }
}

#[test]
fn polygon_exit_codes() {
    assert_eq!(code(&ortholab(&["polygon"])), 2);
    assert_eq!(code(&ortholab(&["polygon", "--regular", "2"])), 2);
    assert_eq!(code(&ortholab(&["polygon", "--vertices", "0,1,0.5"])), 2);
    assert_eq!(code(&ortholab(&["polygon", "--vertices", "0,a,1"])), 2);
    // An irregular polygon has a rounding-level defect, above a zero tolerance.
    let o = ortholab(&[
        "polygon",
        "--vertices",
        "0,0.13,0.29,0.61,1.37,3.9,11,inf",
        "--identity-tol",
        "1e-300",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn density_mass_column() {
    let o = ortholab(&["density", "--l", "1.0", "--tmax", "40"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["l", "t", "rho", "mass"]);
    let last: f64 = rows.last().unwrap()[3].parse().unwrap();
    let f = ortholab::density::total_mass_f(1.0).unwrap();
    assert!((last - f).abs() < 1e-4);
}

#[test]
fn density_below_support_is_zero() {
    let o = ortholab(&["density", "--l", "1.0", "--tmax", "0.9"]);
    assert_eq!(code(&o), 0);
    let (_, rows) = parse_csv(&stdout(&o));
    assert!(!rows.is_empty());
    for r in rows {
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(r[3].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn density_values_round_trip() {
    let o = ortholab(&["density", "--l", "0.7", "--tmax", "3", "--step", "0.5"]);
    let (_, rows) = parse_csv(&stdout(&o));
    for r in rows {
        let t: f64 = r[1].parse().unwrap();
        let rho: f64 = r[2].parse().unwrap();
        let direct = ortholab::density::rho_with_tol(0.7, t, 1e-7).unwrap();
        assert_eq!(rho.to_bits(), direct.to_bits());
    }
}

#[test]
fn density_asymptote_columns() {
    let o = ortholab(&["density", "--l", "2.0", "--asymptote", "--tmax", "200", "--step", "50"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(
        header,
        ["l", "t", "rho", "mass", "ratio", "ratio_to_r", "ratio_to_limit"]
    );
    let last: f64 = rows.last().unwrap()[6].parse().unwrap();
    assert!((last - 1.0).abs() < 0.005, "{last}");
}

#[test]
fn density_errors() {
    assert_eq!(code(&ortholab(&["density", "--l", "-1"])), 2);
    assert_eq!(code(&ortholab(&["density", "--l", "1", "--tmax", "500"])), 2);
    assert_eq!(code(&ortholab(&["density", "--l", "1", "--step", "0"])), 2);
    assert_eq!(code(&ortholab(&["density"])), 2);
}

#[test]
fn montecarlo_report_schema_and_seed() {
    let args = ["montecarlo", "--regular", "4", "--samples", "20000"];
    let o = ortholab(&args);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in [
        "seed",
        "n_samples",
        "per_class",
        "cusp_mass",
        "total",
        "expected_total",
        "bins",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["per_class"].as_array().unwrap().len(), 2);
    let again: serde_json::Value = serde_json::from_str(&stdout(&ortholab(&args))).unwrap();
    assert_eq!(v, again);

    let with_env = Command::new(env!("CARGO_BIN_EXE_ortholab"))
        .args(args)
        .env("ORTHOLAB_SEED", "5")
        .output()
        .unwrap();
    let env_v: serde_json::Value = serde_json::from_str(&stdout(&with_env)).unwrap();
    assert_eq!(env_v["seed"], 5);
    let mut flag_args = args.to_vec();
    flag_args.extend(["--seed", "5"]);
    let flag_v: serde_json::Value = serde_json::from_str(&stdout(&ortholab(&flag_args))).unwrap();
    assert_eq!(env_v, flag_v);
    assert_ne!(env_v["digest"], v["digest"]);
}

#[test]
fn montecarlo_chart_and_errors() {
    let o = ortholab(&["montecarlo", "--chart", "-1", "--samples", "20000", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["lo", "hi", "mass"]);
    assert_eq!(rows.len(), 80);
    assert_eq!(code(&ortholab(&["montecarlo"])), 2);
    assert_eq!(code(&ortholab(&["montecarlo", "--chart", "1"])), 2);
    assert_eq!(code(&ortholab(&["montecarlo", "--chart", "-1", "--regular", "4"])), 2);
    let bad_env = Command::new(env!("CARGO_BIN_EXE_ortholab"))
        .args(["montecarlo", "--regular", "4", "--samples", "100"])
        .env("ORTHOLAB_SEED", "-3")
        .output()
        .unwrap();
    assert_eq!(code(&bad_env), 2);
}

#[test]
fn lewin_table() {
    let o = ortholab(&["lewin", "--R", "10000", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["R", "partial_sum", "tail_estimate", "remainder"]);
    assert_eq!(rows.len(), 4);
    let sums: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(sums.windows(2).all(|w| w[1] > w[0]));
    let remainder: f64 = rows[3][3].parse().unwrap();
    assert!(remainder > 0.0 && remainder < 2e-3);
    assert_eq!(code(&ortholab(&["lewin", "--R", "1"])), 2);
}

#[test]
fn verify_subsuites() {
    let o = ortholab(&["verify", "dilog"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("criterion  1") && text.contains("criterion  2"));
    assert!(!text.contains("criterion  3"));

    let o = ortholab(&["verify", "polygon", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
    assert_eq!(v["passed"], true);

    assert_eq!(code(&ortholab(&["verify", "polygon", "--identity-tol", "1e-300"])), 1);
    assert_eq!(code(&ortholab(&["verify", "nothing"])), 2);
}

#[test]
fn verify_montecarlo_digest_is_reproducible() {
    let digest = |o: Output| {
        assert_eq!(code(&o), 0);
        stdout(&o)
            .lines()
            .find(|l| l.starts_with("digest "))
            .unwrap()
            .to_string()
    };
    let first = digest(ortholab(&["verify", "montecarlo", "--seed", "1"]));
    let second = digest(ortholab(&["verify", "montecarlo", "--seed", "1"]));
    assert_eq!(first, second);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("ortholab-cli-test-{}.json", std::process::id()));
    let o = ortholab(&["polygon", "--regular", "5", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["n"], 5);
    std::fs::remove_file(path).unwrap();
}
