use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laguerre-markov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn compute_golden_ratio() {
    let o = run(&["compute", "--n", "2", "--alpha", "0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    let c: f64 = rows[0][2].parse().unwrap();
    assert!((c - 1.618_033_988_749_895).abs() < 1e-12);
}

#[test]
fn compute_single_entry() {
    let o = run(&["compute", "--n", "1", "--alpha", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["c_sq"], 0.25);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["compute", "--n", "0", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--n", "3", "--alpha", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--n", "3"]).status.code(), Some(2));
    assert_eq!(
        run(&["compute", "--n", "3", "--alpha", "1", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "--suite", "nosuch"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_three() {
    let o = run(&["compute", "--n", "30", "--alpha", "100", "--max-iter", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("did not converge"));
}

#[test]
fn out_of_domain_requests_exit_two() {
    // the zero finder only covers Bessel orders >= -1/2
    assert_eq!(
        run(&["asymptotic", "--alpha", "-0.5", "--n-max", "40"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["compute", "--n", "30", "--alpha", "1", "--tol", "1e-16"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bounds_with_computed_value() {
    let o = run(&["bounds", "--n", "3", "--alpha", "2", "--computed", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 12);
    let c_sq: f64 = rows[0][7].parse().unwrap();
    assert!((1.133_333..=2.0).contains(&c_sq) && c_sq <= 4.125);
}

#[test]
fn bounds_turan_case() {
    let o = run(&["bounds", "--n", "2", "--alpha", "0", "--computed", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    let turan = rows.iter().find(|r| r[2] == "turan_exact").unwrap();
    assert_eq!(turan[5], "true");
    let (v, c): (f64, f64) = (turan[4].parse().unwrap(), turan[7].parse().unwrap());
    assert!((v - c).abs() < 1e-10 * c);
}

#[test]
fn bounds_flag_inapplicable() {
    let o = run(&["bounds", "--n", "3", "--alpha", "-0.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    for r in csv_rows(&o) {
        if ["theorem11_upper", "cor12_lower", "cor12_upper"].contains(&r[2].as_str()) {
            assert_eq!(r[5], "false");
        }
    }
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify", "--suite", "theorem11", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("suite,n,alpha,margin,pass,detail\n"));
    assert_eq!(
        run(&["verify", "--suite", "lemma31", "--alpha-min", "1"]).status.code(),
        Some(0)
    );
    let o = run(&["verify", "--suite", "bound_ordering", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL bound_ordering"));
}

#[test]
fn verify_custom_grid() {
    let o = run(&[
        "verify",
        "--suite",
        "cor12",
        "--n-min",
        "3",
        "--n-max",
        "6",
        "--alpha-list",
        "-0.5,2,5",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 4 * 2);
    assert!(rows.iter().all(|r| r[4] == "true"));
}

#[test]
fn verify_seeded_suite_is_bit_stable() {
    let args = [
        "verify",
        "--suite",
        "integral_lemma",
        "--seed",
        "7",
        "--trials",
        "20",
        "--format",
        "csv",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(csv_rows(&a).len(), 20);
}

#[test]
fn asymptotic_reports() {
    let o = run(&["asymptotic", "--alpha", "2", "--n-max", "200", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let c = v[0]["c_bessel"].as_f64().unwrap();
    assert!((c - std::f64::consts::FRAC_1_PI).abs() < 1e-10);

    let o = run(&["asymptotic", "--alpha", "0", "--n-max", "2000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v[0]["relative_difference"].as_f64().unwrap() < 1e-3);

    let o = run(&["asymptotic", "--alpha", "43.4", "--n-max", "100", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let (a, b) = (
        v[0]["cube_root_upper"].as_f64().unwrap(),
        v[0]["quadratic_upper"].as_f64().unwrap(),
    );
    assert!((a - b).abs() / b < 1e-3);
}

#[test]
fn matrix_and_extremal_dumps() {
    let o = run(&["matrix", "--n", "2", "--alpha", "0", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "row,col,value\n1,1,1.0000000000000000e0\n1,2,1.0000000000000000e0\n2,1,1.0000000000000000e0\n2,2,2.0000000000000000e0\n"
    );
    let o = run(&["extremal", "--n", "2", "--alpha", "0", "--format", "csv"]);
    let rows = csv_rows(&o);
    let (a1, a2): (f64, f64) = (rows[0][1].parse().unwrap(), rows[1][1].parse().unwrap());
    assert!((a2 / a1 - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-10);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("lm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.csv");
    let o = run(&[
        "compute",
        "--n",
        "4",
        "--alpha",
        "1",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.starts_with("n,alpha,c,c_sq,residual,iterations\n4,"));
    std::fs::remove_dir_all(dir).unwrap();
}
