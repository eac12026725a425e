use std::process::{Command, Output};

use resonance_cli::commands::{EvalPoint, JensenOutput, VerifyReport};
use resonance_cli::{Envelope, SCHEMA};
use resonance_core::counting::CountReport;
use resonance_core::determinants::{determinant, ModelSpec};
use resonance_core::rootfinder::Isolation;

fn resonance(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resonance")).args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = resonance(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn eval_values_round_trip_exactly() {
    let text = stdout_of(&["eval", "--model", "stark", "--f", "0.1", "--at", "1.3,-0.2", "--at", "-0.7,0.4"]);
    let env: Envelope<Vec<EvalPoint>> = serde_json::from_str(&text).unwrap();
    assert_eq!(env.schema, SCHEMA);
    assert_eq!(env.command, "eval");
    let spec = env.model.unwrap();
    assert_eq!(spec, ModelSpec::stark(1.0, 1.0, 0.1).unwrap());
    for p in &env.data {
        let direct = determinant(p.point, &spec).unwrap();
        assert_eq!(p.value, direct.value, "17 digits must reproduce the value bit for bit");
    }
}

#[test]
fn zeros_round_trip_into_isolation() {
    let text = stdout_of(&["zeros", "--model", "free", "--eta", "0.5", "--box", "0.5,8,-1,-0.001"]);
    let env: Envelope<Isolation> = serde_json::from_str(&text).unwrap();
    assert!(env.data.count() >= 2);
    assert_eq!(resonance_cli::output::to_json(&env).unwrap(), text);
    for r in &env.data.resonances {
        assert!(r.residual < -20.0);
        assert!(r.enclosing_box.contains(r.location));
    }
}

#[test]
fn count_reports_round_trip() {
    let text = stdout_of(&["jensen", "--f", "0.1", "--r", "1", "--v", "1.5"]);
    let env: Envelope<JensenOutput> = serde_json::from_str(&text).unwrap();
    let report: &CountReport = &env.data.report;
    assert!(report.jensen_value.unwrap() > 0.0);
    assert!(env.data.count_bound.unwrap() >= 0.0);
    let again = resonance_cli::output::to_json(&env).unwrap();
    assert_eq!(again, text);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    for args in [
        &["zeros", "--f", "0.2", "--box", "0.3,2.5,-0.8,-0.001"][..],
        &["atlas", "--f", "0.1", "--box", "-2,2,-2,2", "--grid", "40x30"][..],
    ] {
        let one = stdout_of(&[args, &["--threads", "1"]].concat());
        let many = stdout_of(&[args, &["--threads", "8"]].concat());
        assert_eq!(one, many, "{args:?}");
    }
}

#[test]
fn verify_reports_strip_membership() {
    let text = stdout_of(&["verify", "--f", "0.2", "--box", "0.3,2.5,-0.8,-0.001"]);
    let env: Envelope<VerifyReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(env.data.zero_count as usize, env.data.zeros.iter().map(|z| z.multiplicity as usize).sum::<usize>());
    assert_eq!(env.data.all_in_strips, env.data.zeros.iter().all(|z| z.in_strips));
}

#[test]
fn atlas_csv_has_fixed_header_and_clipped_logs() {
    let text = stdout_of(&["atlas", "--model", "dirichlet", "--l", "20", "--box", "0.1,4,-1,0", "--grid", "30x10"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,log_abs,arg"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 300);
    assert!(rows.iter().all(|r| r.len() == 4 && r[2].abs() <= 50.0));
}

#[test]
fn svg_is_a_single_document() {
    let text = stdout_of(&["atlas", "--model", "free", "--box", "0,5,-1,1", "--grid", "20x10", "--format", "svg"]);
    assert!(text.starts_with("<svg"));
    assert!(text.trim_end().ends_with("</svg>"));
}

#[test]
fn exit_codes_separate_configuration_from_computation() {
    assert_eq!(resonance(&["zeros", "--model", "stark", "--box", "0,1,0,1"]).status.code(), Some(2));
    assert_eq!(resonance(&["zeros", "--f", "0.1", "--box", "1,0,0,1"]).status.code(), Some(2));
    assert_eq!(resonance(&["eval", "--model", "free", "--kappa", "-1", "--at", "1,0"]).status.code(), Some(2));
    assert_eq!(resonance(&["zeros", "--f", "0.1", "--box", "0,1,0,1", "--format", "svg"]).status.code(), Some(2));
    assert_eq!(resonance(&["census", "--f", "0.1", "--a", "1.5", "--b", "2"]).status.code(), Some(1));
}

#[test]
fn output_flag_writes_the_artifact() {
    let path = std::env::temp_dir().join(format!("resonance-cli-{}.json", std::process::id()));
    let out = resonance(&["eval", "--model", "free", "--at", "1,0", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(written.contains(SCHEMA));
}
