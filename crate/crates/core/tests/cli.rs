use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn ginin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ginin"))
        .args(args)
        .env_remove("GININ_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ginin_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn sample_file() -> PathBuf {
    let values: Vec<String> = (1..=400).map(|i| format!("{}", (i as f64 * 0.37).sin().abs() * 10.0 + 1.0)).collect();
    tmp_file("sample.txt", &values.join("\n"))
}

fn tuple_file() -> PathBuf {
    let values: Vec<String> = (1..=600).map(|i| format!("{}", ((i * 7919) % 1000) as f64 / 250.0)).collect();
    tmp_file("tuples.txt", &values.join(" "))
}

fn all_commands() -> Vec<Vec<String>> {
    let s = sample_file().display().to_string();
    let t = tuple_file().display().to_string();
    let panel = fixture("two_country.csv").display().to_string();
    [
        vec!["compute", "--dist", "lognormal:0,1", "--order", "2,5,10"],
        vec!["estimate", "--input", &s, "--order", "5"],
        vec!["estimate", "--input", &s, "--order", "3", "--bootstrap", "100", "--level", "0.9", "--scheme", "exact"],
        vec!["simulate", "--dist", "exponential:1", "--order", "3", "--sample-size", "200", "--reps", "50", "--target", "gd"],
        vec!["bounds", "--kind", "sd", "--n", "5"],
        vec!["bounds", "--kind", "ratio", "--m", "2", "--n", "6"],
        vec!["bounds", "--kind", "choquet", "--m", "3", "--n", "4", "--grid", "501"],
        vec!["backtest", "--variant", "gd-m2", "--order", "3", "--input", &t, "--a", "0.5", "--b", "0.9"],
        vec!["analyze", "--input", &panel, "--orders", "2,10", "--shares", "0.01,0.1"],
    ]
    .iter()
    .map(|v| v.iter().map(|s| s.to_string()).collect())
    .collect()
}

#[test]
fn documented_examples() {
    let o = ginin(&["compute", "--dist", "exponential:1", "--order", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row.split(',').nth(3), Some("0.458333333"), "{text}");

    let o = ginin(&["bounds", "--kind", "ratio", "--m", "3", "--n", "4"]);
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let get = |k: &str| row[header.iter().position(|h| *h == k).unwrap()];
    assert_eq!((get("lower"), get("upper")), ("0.875", "1"));

    let o = ginin(&["analyze", "--input", fixture("two_bracket.csv").to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.starts_with("entity,year,gc_2,gc_5,gc_10,gc_20,top_1,top_10\n"), "{text}");
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "0.426315789");
    assert_eq!(row[7], "0.526315789");
}

#[test]
fn every_subcommand_emits_parseable_json() {
    for mut args in all_commands() {
        args.extend(["--format".to_string(), "json".to_string()]);
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = ginin(&argv);
        assert!(o.status.success(), "{argv:?}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap_or_else(|e| panic!("{argv:?}: {e}"));
        assert!(v.is_object() || v.is_array());
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_threads() {
    for args in all_commands() {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = ginin(&argv);
        let b = ginin(&argv);
        let mut threaded = argv.clone();
        threaded.extend(["--threads", "3"]);
        let c = ginin(&threaded);
        assert_eq!(a.stdout, b.stdout, "{argv:?}");
        assert_eq!(a.stdout, c.stdout, "{argv:?}");
    }
}

#[test]
fn seed_comes_from_environment_unless_overridden() {
    let args = ["simulate", "--dist", "exponential:1", "--order", "3", "--sample-size", "100", "--reps", "20"];
    let env = |seed: &str, extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_ginin"))
            .args(args)
            .args(extra)
            .env("GININ_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    let explicit7 = ginin(&[&args[..], &["--seed", "7"]].concat()).stdout;
    assert_eq!(env("7", &[]), explicit7);
    assert_eq!(env("3", &["--seed", "7"]), explicit7);
    assert_ne!(env("3", &[]), explicit7);
    assert_eq!(ginin(&args).stdout, ginin(&[&args[..], &["--seed", "0"]].concat()).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(ginin(&[]).status.code(), Some(1));
    assert_eq!(ginin(&["compute", "--dist", "exponential:1", "--order", "2", "--nope"]).status.code(), Some(1));
    assert_eq!(ginin(&["--help"]).status.code(), Some(0));
    assert_eq!(ginin(&["compute", "--dist", "lognormal:0,-1", "--order", "2"]).status.code(), Some(1));
    let missing = ginin(&["estimate", "--input", "/nonexistent/sample.txt", "--order", "2"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/sample.txt"));
    let strict = ginin(&["compute", "--dist", "lognormal:0,1", "--order", "5", "--quadrature", "--rel-tol", "1e-300"]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("non-convergence"));
    let heavy = ginin(&["simulate", "--dist", "pareto:1.5,1", "--order", "3", "--sample-size", "100", "--reps", "5"]);
    assert_eq!(heavy.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&heavy.stderr).contains("assumption"));
}

#[test]
fn analyze_reports_bad_partitions() {
    let bad = tmp_file("gap.csv", "entity,year,p_lo,p_hi,avg\nX,1,0,0.4,1\nX,1,0.5,1,2\n");
    let o = ginin(&["analyze", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("0.4") && err.contains("0.5"), "{err}");

    let nonmono = tmp_file("nonmono.csv", "entity,year,p_lo,p_hi,avg\nX,1,0,0.5,3\nX,1,0.5,1,2\n");
    assert_eq!(ginin(&["analyze", "--input", nonmono.to_str().unwrap()]).status.code(), Some(1));
    let ok = ginin(&["analyze", "--input", nonmono.to_str().unwrap(), "--allow-nonmonotone"]);
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stderr).contains("sorted"));
}
