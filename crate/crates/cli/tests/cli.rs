use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn udn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_udn-cache"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// `(scheme, load_num, load_den, load_float)` of every CSV row.
fn rows(csv: &str) -> Vec<(String, u128, u128, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("regime,K1,K2,t,scheme,load_num,load_den,load_float,asymptotic"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 9, "{l}");
            (f[4].to_string(), f[5].parse().unwrap(), f[6].parse().unwrap(), f[7].parse().unwrap())
        })
        .collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn run_reports_the_worked_example() {
    let o = udn(&["run", "--k1", "3", "--k2", "3", "--t", "2", "--regime", "mid", "--schemes", "a,b,uncoded"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&stdout(&o));
    let loads: Vec<(&str, u128, u128)> = r.iter().map(|(s, n, d, _)| (s.as_str(), *n, *d)).collect();
    assert_eq!(loads, [("A", 56, 3), ("B", 115, 9), ("uncoded", 35, 1)]);
    for (_, n, d, f) in &r {
        assert_eq!(*n as f64 / *d as f64, *f);
    }
}

#[test]
fn run_without_caching_sends_whole_files() {
    for (regime, subtypes) in [("min", 3), ("mid", 8), ("max", 7)] {
        let o = udn(&["run", "--t", "0", "--schemes", "a", "--regime", regime]);
        assert!(o.status.success());
        assert_eq!(rows(&stdout(&o))[0].1, subtypes * 9);
    }
}

#[test]
fn min_regime_scheme_b() {
    let o = udn(&["run", "--k1", "3", "--k2", "3", "--t", "2", "--regime", "min", "--schemes", "b"]);
    assert!(o.status.success());
    let (_, n, d, _) = rows(&stdout(&o))[0].clone();
    assert_eq!(n * 36, 226 * d);
}

#[test]
fn outputs_are_reproducible() {
    let args = ["run", "--k1", "3", "--k2", "4", "--t", "2", "--seed", "5", "--random-demands", "--format", "json"];
    let a = udn(&args);
    let b = udn(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);

    let d1 = scratch("digests-1.jsonl");
    let d2 = scratch("digests-2.jsonl");
    for d in [&d1, &d2] {
        let o = udn(&["run", "--seed", "3", "--digests", d.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let text = fs::read_to_string(&d1).unwrap();
    assert_eq!(text, fs::read_to_string(&d2).unwrap());
    // scheme A: 8 sub-types of 84 signals; scheme B: type I signals go out
    // uncoded, every other sub-type as one block
    assert_eq!(text.lines().count(), 672 + 84 + 7);
}

#[test]
fn verify_passes_with_random_demands() {
    let o = udn(&["verify", "--k1", "3", "--k2", "3", "--t", "2", "--regime", "mid", "--random-demands", "--seed", "7"]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(out.contains("72 users recover"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn verify_reports_a_corrupted_symbol() {
    let o = udn(&["verify", "--corrupt-symbol", "III-2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL scheme B decode"));
}

#[test]
fn verify_three_by_four() {
    let o = udn(&["verify", "--k1", "3", "--k2", "4", "--t", "3", "--packet-bytes", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS scheme B load: simulated 1359/110"));
}

#[test]
fn t_sweep_keeps_the_curve_order() {
    let o = udn(&["sweep", "--over", "t", "--k1", "6", "--k2", "6", "--schemes", "a,b,uncoded"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 37 * 3);
    for (t, chunk) in r.chunks(3).enumerate() {
        let [a, b, c] = [&chunk[0], &chunk[1], &chunk[2]].map(|(_, n, d, _)| (*n, *d));
        // exact comparison of n1/d1 < n2/d2
        let lt = |x: (u128, u128), y: (u128, u128)| x.0 * y.1 < y.0 * x.1;
        if t > 0 && t < 36 {
            assert!(lt(b, a) && lt(a, c), "t = {t}");
        }
    }
}

#[test]
fn grid_sweep_approaches_sixteen() {
    let o = udn(&["sweep", "--over", "k", "--from", "3", "--to", "30", "--schemes", "a,uncoded"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    // only sides divisible by 3 give integer t at M/N = 1/3
    assert_eq!(r.len(), 2 * 10);
    let last_a = r[r.len() - 2].3;
    assert!((last_a - 16.0).abs() < 0.1, "{last_a}");
    let uncoded: Vec<f64> = r.iter().filter(|x| x.0 == "uncoded").map(|x| x.3).collect();
    assert!(uncoded.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["sweep", "--over", "t", "--from", "9", "--to", "3"],
        vec!["sweep", "--over", "k", "--from", "4", "--to", "5"],
        vec!["run", "--k1", "2"],
        vec!["run", "--regime", "huge"],
        vec!["run", "--n-files", "10"],
        vec!["run", "--k1", "6", "--k2", "6", "--t", "9"],
        vec!["oracle", "--k1", "8", "--k2", "8", "--t", "4"],
        vec!["bogus"],
    ] {
        let o = udn(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn demands_from_file() {
    let path = scratch("demands.json");
    let entries: Vec<String> = ["I", "II-1", "II-2"]
        .iter()
        .flat_map(|c| (0..9).map(move |i| format!(r#"{{"class":"{c}","anchor":[{},{}],"file":{}}}"#, i / 3, i % 3, i % 4)))
        .collect();
    fs::write(&path, format!("[{}]", entries.join(","))).unwrap();
    let o = udn(&["run", "--regime", "min", "--n-files", "4", "--demands", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    fs::write(&path, "[]").unwrap();
    let o = udn(&["run", "--regime", "min", "--demands", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_and_census() {
    let o = udn(&["oracle", "--regime", "mid", "--t", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("type IV: closed form 54 (18 + 15 + 12 + 9)"));

    let o = udn(&["census", "--radius", "0.8", "--samples", "20000", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["shapes"].as_array().unwrap().len(), 8);
}
