use std::process::Command;

fn recdiff(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_recdiff")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn count_from_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let fib = dir.path().join("fib.cfg");
    let pow2 = dir.path().join("pow2.cfg");
    std::fs::write(&fib, "name = \"fib\"\ncoefficients = [1, 1]\ninitial_terms = [0, 1]\n").unwrap();
    std::fs::write(&pow2, "name = \"pow2\"\ncoefficients = [2]\ninitial_terms = [1]\n").unwrap();
    let (code, out, _) = recdiff(&["count", "--seq-u", fib.to_str().unwrap(), "--seq-v", pow2.to_str().unwrap(), "--x", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("# T=35 S=18"), "{out}");
    assert!(out.starts_with("# recdiff "));
}

#[test]
fn invalid_config_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "name = \"bad\"\ncoefficients = [1, 0]\ninitial_terms = [0, 1]\n").unwrap();
    let (code, out, err) = recdiff(&["analyze", "--seq-u", bad.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1, "{err}");
    let (code, _, _) = recdiff(&["analyze", "--seq-u", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(code, 4);
}

#[test]
fn matveev_example() {
    let (code, out, _) = recdiff(&["--no-header", "matveev", "--t", "3", "--D", "2", "--B", "100", "--A", "1", "--A", "1", "--A", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let b = v["bound"].as_f64().unwrap();
    assert!((b / -6.1006e15 - 1.0).abs() < 1e-4, "{b}");
}

#[test]
fn help_lists_subcommands() {
    let (code, out, _) = recdiff(&["--help"]);
    assert_eq!(code, 0);
    for s in ["analyze", "count", "scan", "collisions", "matveev", "independence", "heights", "bounds", "problem1"] {
        assert!(out.contains(s), "{s} missing");
    }
    assert_eq!(recdiff(&["count", "--seq-u", "fib", "--unknown"]).0, 1);
    assert_eq!(recdiff(&["scan", "--x-grid", "1e3", "--output", "xml"]).0, 1);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["--no-header", "scan", "--x-grid", "1e3,1e6", "--output", "structured"];
    let (c1, a, _) = recdiff(&args);
    let (c2, b, _) = recdiff(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn scan_csv_layout() {
    let (code, out, _) = recdiff(&["--no-header", "scan", "--x-grid", "1e3,1e6", "--output", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x,T,S,main,T_ratio,S_ratio,grid,excess");
    assert!(lines[1].starts_with("1000,182,156,143.057995287,"), "{}", lines[1]);
    assert_eq!(lines.len(), 3);
}

#[test]
fn structured_keys_are_sorted() {
    let (_, out, _) = recdiff(&["--no-header", "count", "--seq-u", "pow2", "--seq-v", "pow3", "--x", "2"]);
    let json = out.lines().skip(1).collect::<Vec<_>>().join("\n");
    let keys: Vec<&str> = json.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(out.starts_with("# T=6 S=4"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let (code, out, _) =
        recdiff(&["--out", path.to_str().unwrap(), "problem1", "--alpha", "pi", "--beta", "e", "--x", "10", "--precision", "200"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("\"T\": 9"), "{text}");
}

#[test]
fn heights_and_independence() {
    let (code, out, _) = recdiff(&["--no-header", "heights", "--alpha", "2", "--beta", "3", "--range", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("c0_emp=0.69314718056"), "{out}");
    assert!(out.contains("\nn,m,height,ratio\n"));
    let (code, out, _) = recdiff(&["--no-header", "independence", "--alpha", "4", "--beta", "8"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"verdict\": \"dependent\""), "{out}");
}

#[test]
fn bounds_table() {
    let (code, out, _) = recdiff(&["--no-header", "bounds", "--seq-u", "fib", "--seq-v", "pow2", "--c", "100"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("constant"));
    assert!(out.lines().any(|l| l.starts_with("C18 ")));
    assert!(out.contains("\"evaluations\""));
}
