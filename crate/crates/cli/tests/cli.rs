use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wittpolar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittpolar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// `w_m = Σ p^i a_i^{p^{m-i}}` at integer points, used to recover `S_1`.
fn ghost(p: i64, a: &[i64]) -> Vec<i64> {
    (0..a.len())
        .map(|m| {
            (0..=m)
                .map(|i| p.pow(i as u32) * a[i].pow(p.pow((m - i) as u32) as u32))
                .sum()
        })
        .collect()
}

fn eval_term(t: &Value, point: &[i64], vars: &[&str], names: &[Value]) -> i64 {
    let num: i64 = t["num"].as_str().unwrap().parse().unwrap();
    assert_eq!(t["den"], "1");
    let exp = t["exp"].as_array().unwrap();
    names.iter().zip(exp).fold(num, |acc, (name, e)| {
        let k = vars.iter().position(|v| v == name).unwrap();
        acc * point[k].pow(e.as_u64().unwrap() as u32)
    })
}

#[test]
fn witt_poly_sum_agrees_with_the_ghost_map() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("p2_n2_sum.json");
    let out = wittpolar(&[
        "witt-poly",
        "--p",
        "2",
        "--n",
        "2",
        "--kind",
        "sum",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["format"], "wittpolar/1");
    let vars = ["x0", "x1", "y0", "y1"];
    for point in [[1i64, 2, 3, 4], [-2, 5, 7, -1], [0, 3, 2, 0]] {
        let s: Vec<i64> = v["polys"]
            .as_array()
            .unwrap()
            .iter()
            .map(|poly| {
                let names = poly["vars"].as_array().unwrap();
                poly["terms"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|t| eval_term(t, &point, &vars, names))
                    .sum()
            })
            .collect();
        let gx = ghost(2, &point[..2]);
        let gy = ghost(2, &point[2..]);
        let gs = ghost(2, &s);
        assert_eq!(gs, vec![gx[0] + gy[0], gx[1] + gy[1]]);
    }
    assert_eq!(v["text"][1], "-x0*y0 + x1 + y1");
}

#[test]
fn polarizing_the_truncated_cube_gives_zero_mu() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "a.json",
        r#"{"type":"truncated","field":{"p":3,"m":1},"low":1,"high":3}"#,
    );
    let out = wittpolar(&["polarize", &input]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["algebra"]["dim"], 2);
    assert_eq!(v["algebra"]["mu"], Value::Array(vec![]));
    assert_eq!(v["mu_zero"], true);
}

#[test]
fn teichmuller_suite_passes_for_p3() {
    let out = wittpolar(&["verify", "--suite", "teichmuller", "--p", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["format"], "wittpolar/1");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "f4.json",
        r#"{"type":"extension","field":{"p":2,"m":1},"m":2}"#,
    );
    for args in [
        vec![
            "verify",
            "--suite",
            "idempotent",
            "--suite",
            "cowitt",
            "--seed",
            "7",
        ],
        vec!["split", input.as_str()],
        vec![
            "fgl",
            "--p",
            "3",
            "--precision",
            "10",
            "--log-coeffs",
            "1,1/3,1/9",
        ],
    ] {
        let a = wittpolar(&args);
        let b = wittpolar(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn split_reports_one_orbit_for_f4() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "f4.json",
        r#"{"type":"extension","field":{"p":2,"m":1},"m":2}"#,
    );
    let v = stdout_json(&wittpolar(&["split", &input]));
    assert_eq!(v["decomposition"]["count"], 2);
    assert_eq!(v["decomposition"]["cycles"], "(0 1)");
}

#[test]
fn frobenius_after_verschiebung_is_p() {
    let dir = tempfile::tempdir().unwrap();
    let lit = r#"{"op":"lit","coords":[[[1],[0],[1]],[[0],[1],[1]]]}"#;
    let expr = format!(
        r#"{{"op":"sub","args":[{{"op":"frob","arg":{{"op":"ver","arg":{lit}}}}},{{"op":"multiple","k":2,"arg":{lit}}}]}}"#
    );
    let text = format!(
        r#"{{"algebra":{{"type":"truncated","field":{{"p":2,"m":1}},"low":1,"high":4}},"expr":{expr}}}"#
    );
    let input = write(dir.path(), "e.json", &text);
    let out = wittpolar(&["witt-eval", &input]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let coords = &stdout_json(&out)["result"]["coords"];
    assert!(coords
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c.as_array().unwrap())
        .all(|x| x[0] == 0));
}

#[test]
fn cw_validate_accepts_finite_support() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"algebra":{"type":"truncated","field":{"p":2,"m":1},"low":1,"high":4},"op":"validate",
        "args":[{"tail":[[0],[0],[0]],"exceptions":{"0":[[1],[0],[0]],"-2":[[0],[1],[0]]}}]}"#;
    let input = write(dir.path(), "c.json", text);
    let out = wittpolar(&["cw", &input]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["valid"], true);
}

fn diagnostic(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    let out = wittpolar(&["polarize", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(diagnostic(&out)["error"]["kind"], "parse");

    let out = wittpolar(&["witt-poly", "--p", "4", "--n", "2", "--kind", "sum"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(diagnostic(&out)["format"], "wittpolar/1");

    let out = wittpolar(&["fgl", "--p", "6", "--precision", "4", "--log-coeffs", "1"]);
    assert_eq!(out.status.code(), Some(1));

    let out = wittpolar(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(diagnostic(&out)["error"]["kind"], "usage");

    let out = wittpolar(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn fgl_reports_a_denominator_obstruction() {
    let out = wittpolar(&[
        "fgl",
        "--p",
        "3",
        "--precision",
        "4",
        "--log-coeffs",
        "1,1/9",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["p_integral"], false);
    assert!(!v["denominator_obstruction"].is_null());
}

#[test]
fn help_exits_cleanly() {
    let out = wittpolar(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("witt-poly"));
}
