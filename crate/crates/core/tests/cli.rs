use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hulthen-susy"))
        .args(args)
        .env_remove("HULTHEN_SUSY_GRID_POINTS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<(String, f64)> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_string(), v.parse().unwrap())
        })
        .collect()
}

#[test]
fn hulthen_spectrum_example() {
    let o = bin(&["spectrum", "--family", "hulthen", "--mu", "2", "--delta", "1", "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("# family=hulthen params=mu=2,delta=1,q=0.5\n"));
    let r = rows(&out);
    assert_eq!(r.len(), 2);
    assert_eq!(r[0].0, "0");
    assert!((r[0].1 + 6.125).abs() < 1e-13);
    assert_eq!(r[1].0, "1");
    assert!((r[1].1 + 0.5).abs() < 1e-13);
}

#[test]
fn empty_hulthen_spectrum_reports_status() {
    let o = bin(&["spectrum", "--family", "hulthen", "--mu", "0.4", "--delta", "1", "--q", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(err.contains("no bound states (q ≥ 2μ/δ²)"), "{err}");
    let out = stdout(&o);
    assert!(out.contains("# status=no bound states (q ≥ 2μ/δ²)"));
    assert!(rows(&out).is_empty());
}

#[test]
fn example_iv_spectrum() {
    let o = bin(&["spectrum", "--family", "example-iv", "--mu", "9", "--delta", "1", "--q", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 2);
    assert_eq!(r[0].0, "-3");
    assert!((r[0].1 + 36.125).abs() < 1e-12);
    assert_eq!(r[1].0, "0");
    assert!((r[1].1 + 0.03125).abs() < 1e-14);
}

#[test]
fn exit_codes() {
    // violated condition
    let o = bin(&["spectrum", "--family", "eckart", "--A", "2", "--B", "3", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("B > A^2"));
    // missing parameter
    assert_eq!(bin(&["spectrum", "--family", "eckart", "--A", "2"]).status.code(), Some(2));
    // unknown flag value
    assert_eq!(bin(&["spectrum", "--family", "nope"]).status.code(), Some(2));
    // example case outside its window
    let o = bin(&["spectrum", "--family", "example-iii", "--mu", "1", "--delta", "1", "--q", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("mu > 2 q delta^2"));
    // wavefunction without --n
    let o = bin(&["table", "--family", "hulthen", "--mu", "2", "--delta", "1", "--q", "0.5", "--what", "wavefunction"]);
    assert_eq!(o.status.code(), Some(2));
    // grid cap exceeded is numeric
    let o = bin(&["verify", "--scope", "oracle", "--grid-points", "100000000"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn json_round_trips() {
    let csv = stdout(&bin(&["spectrum", "--family", "example-iv", "--mu", "9", "--delta", "1", "--q", "1"]));
    let o = bin(&[
        "spectrum", "--family", "example-iv", "--mu", "9", "--delta", "1", "--q", "1", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["meta"]["family"], "example-iv");
    let data = v["data"].as_array().unwrap();
    for ((k, x), d) in rows(&csv).iter().zip(data) {
        assert_eq!(d["index"].as_i64().unwrap().to_string(), *k);
        assert!((d["value"].as_f64().unwrap() - x).abs() <= 1e-14 * x.abs());
    }
    // re-serializing the parsed document reproduces every value exactly
    let again: serde_json::Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
    assert_eq!(data[0]["value"].as_f64(), Some(-36.125));
}

fn trapezoid_norm(out: &str) -> f64 {
    let r = rows(out);
    r.windows(2)
        .map(|w| {
            let (x0, y0) = (w[0].0.parse::<f64>().unwrap(), w[0].1);
            let (x1, y1) = (w[1].0.parse::<f64>().unwrap(), w[1].1);
            0.5 * (x1 - x0) * (y0 * y0 + y1 * y1)
        })
        .sum()
}

#[test]
fn wavefunction_tables_are_normalized() {
    let cases: [&[&str]; 4] = [
        &["--family", "hulthen", "--mu", "2", "--delta", "1", "--q", "0.5"],
        &["--family", "eckart", "--A", "1.5", "--B", "9", "--alpha", "0.7"],
        &["--family", "example-iv", "--mu", "9", "--delta", "1", "--q", "1"],
        &["--family", "hulthen-ext", "--mu", "4.5", "--delta", "1", "--q", "1", "--i", "1"],
    ];
    for case in cases {
        let n = if case[1] == "example-iv" { "-3" } else { "0" };
        let mut args = vec!["table", "--what", "wavefunction", "--n", n];
        args.extend_from_slice(case);
        let o = bin(&args);
        assert_eq!(o.status.code(), Some(0), "{case:?}");
        let out = stdout(&o);
        assert_eq!(rows(&out).len(), 1000);
        let norm = trapezoid_norm(&out);
        assert!((norm - 1.0).abs() < 1e-4, "{case:?}: {norm}");
    }
}

#[test]
fn example_iii_potential_is_finite() {
    let o = bin(&["table", "--family", "example-iii", "--mu", "3", "--delta", "1", "--q", "1", "--samples", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1000);
    assert!(r.iter().all(|(x, v)| x.parse::<f64>().unwrap().is_finite() && v.is_finite()));
}

#[test]
fn explicit_range_is_uniform() {
    let o = bin(&[
        "table", "--family", "hulthen", "--mu", "2", "--delta", "1", "--q", "0.5", "--from", "0", "--to", "2",
        "--samples", "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let xs: Vec<f64> = rows(&stdout(&o)).iter().map(|(x, _)| x.parse().unwrap()).collect();
    assert_eq!(xs, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    // left of the domain edge ln(q)/delta
    let o = bin(&["table", "--family", "hulthen", "--mu", "2", "--delta", "1", "--q", "0.5", "--from", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("hulthen-susy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spec.csv");
    let o = bin(&[
        "spectrum", "--family", "hulthen", "--mu", "2", "--delta", "1", "--q", "0.5", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(rows(&std::fs::read_to_string(&path).unwrap()).len(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_eckart_seed_7_passes() {
    let o = bin(&["verify", "--scope", "eckart", "--seed", "7"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
    assert!(!out.contains("FAIL"));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--scope", "specfun", "--seed", "11"];
    assert_eq!(bin(&args).stdout, bin(&args).stdout);
    let args = ["table", "--family", "example-ii", "--mu", "1", "--delta", "1", "--q", "1", "--what", "wavefunction", "--n", "0"];
    let a = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, bin(&args).stdout);
}
