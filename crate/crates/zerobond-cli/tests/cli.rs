//! End-to-end tests of the `zerobond` binary: output format, exit codes,
//! and byte-stability of the CSV commands.

use std::process::{Command, Output};

const VASICEK: &str = r#"{"model":"vasicek","kappa":0.4,"theta":0.05,"sigma":0.03}"#;

fn zerobond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerobond"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bond_prints_price_and_yield() {
    let out = zerobond(&["bond", "--model", VASICEK, "--r", "0.03", "--maturity", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("price=0.8175"), "{text}");
    assert!(text.contains("yield=0.0402"), "{text}");
}

#[test]
fn bond_at_zero_tenor_reports_undefined_yield() {
    let out = zerobond(&["bond", "--model", VASICEK, "--t", "2", "--r", "0.03", "--maturity", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("yield undefined at zero tenor"));
}

#[test]
fn malformed_model_json_exits_2() {
    let out = zerobond(&["bond", "--model", "{\"model\":\"vasicek\"", "--maturity", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = zerobond(&["bond", "--model", r#"{"model":"heston","x":1}"#, "--maturity", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_parameters_exit_2() {
    let bad = r#"{"model":"vasicek","kappa":-0.4,"theta":0.05,"sigma":0.03}"#;
    let out = zerobond(&["bond", "--model", bad, "--maturity", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn option_deep_out_of_the_money() {
    // K = 10: call ~ 0, put ~ K * B_T - B_S
    let out = zerobond(&[
        "option", "--model", VASICEK, "--r", "0.03", "--strike", "10",
        "--expiry", "3", "--bond-maturity", "5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("call=0.0000000000"), "{text}");
    assert!(text.contains("put=8.1"), "{text}");
}

#[test]
fn option_at_expiry_equals_forward_value() {
    let out = zerobond(&[
        "option", "--model", VASICEK, "--r", "0.0", "--strike", "0.8",
        "--expiry", "5", "--bond-maturity", "5",
    ]);
    assert!(out.status.success());
    // call = B_S - 0.8 B_S = 0.2 * exp(-a(5))
    assert!(stdout(&out).starts_with("call=0.1744"), "{}", stdout(&out));
}

#[test]
fn printed_v_formula_warns_on_stderr() {
    let out = zerobond(&[
        "option", "--model", VASICEK, "--strike", "0.8",
        "--expiry", "3", "--bond-maturity", "5", "--v-formula", "printed",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
}

#[test]
fn figure_csv_is_byte_stable() {
    let a = zerobond(&["figure1"]);
    let b = zerobond(&["figure1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,T,C_merton,C_vasicek"));
    // 11 thetas x 20 expiries
    assert_eq!(text.lines().count(), 1 + 11 * 20);
}

#[test]
fn figure2_header_and_shape() {
    let out = zerobond(&["figure2", "--thetas", "0,0.05", "--expiries", "1,3,5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,T,ln_CV_minus_ln_CM"));
    assert_eq!(text.lines().count(), 1 + 2 * 3);
}

#[test]
fn validate_quick_passes_with_derived_v() {
    let out = zerobond(&["validate", "--budget", "quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn validate_fails_with_printed_v() {
    let out = zerobond(&["validate", "--budget", "quick", "--v-formula", "printed"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn curve_emits_csv_to_file() {
    let dir = std::env::temp_dir().join("zerobond-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curve.csv");
    let out = zerobond(&[
        "curve", "--model", VASICEK, "--r", "0.03",
        "--tenors", "1,5", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("tenor,yield\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn pde_dump_has_expected_columns() {
    let out = zerobond(&[
        "pde-dump", "--model", VASICEK, "--r", "0.03", "--maturity", "2",
        "--n-r", "21", "--n-t", "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("t,r,V\n"));
    // terminal level is all ones
    assert!(text.lines().last().unwrap().ends_with("1.0000000000"));
}
