use std::process::{Command, Output};

use a2lab::identities::{IdentityReport, Verdict};
use a2lab::numeric::TransformationResidual;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_a2lab")).args(args).output().expect("spawn a2lab")
}

fn run_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_a2lab")).args(args).env(key, val).output().expect("spawn a2lab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", stdout(o)))
}

#[test]
fn expand_rogers_lists_triangular_numbers() {
    let o = run(&["expand", "rogers", "--order", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<(String, String)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split('\t');
            (it.next().unwrap().to_string(), it.next().unwrap().to_string())
        })
        .collect();
    let expected: Vec<(String, String)> = (0..)
        .map(|n: i64| (n, n * (n + 1) / 2))
        .take_while(|(_, t)| *t < 20)
        .map(|(n, t)| (format!("{t}/1"), if n % 2 == 0 { "1/1".into() } else { "-1/1".into() }))
        .collect();
    assert_eq!(rows, expected);
}

#[test]
fn expand_gfrak_json_leading_terms() {
    let o = run(&["expand", "Gfrak", "--p", "2", "--lambda", "0,0", "--order", "10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let terms = v["terms"].as_array().unwrap();
    // n = (1, 1) is the only lattice point below 3/2: 2Q(1/2, 1/2) = 1/2, and
    // the two middle bracket terms each add q^{1}.
    assert_eq!(terms[0]["exp"], "1/2");
    assert_eq!(terms[0]["coeff"], "1/1");
    assert_eq!(terms[1]["exp"], "3/2");
    assert_eq!(terms[1]["coeff"], "-2/1");
    assert_eq!(v["order"], "10/1");
}

#[test]
fn expand_f_is_windowed_inner() {
    let o = run(&["expand", "f", "--order", "5", "--window", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["region"], "INNER");
    assert_eq!(v["window"], 4);
    assert_eq!(v["qorder"], "5/1");
    let terms = v["terms"].as_array().unwrap();
    let find = |e1: &str, e2: &str| {
        terms.iter().find(|t| t["e1"] == e1 && t["e2"] == e2).unwrap_or_else(|| panic!("no key ({e1}, {e2})"))
    };
    for t in terms {
        for k in ["e1", "e2"] {
            let n: i64 = t[k].as_str().unwrap().trim_end_matches("/1").parse().unwrap();
            assert!(n.abs() <= 4);
        }
    }
    // q^{3/8} (1 + ζ1 q + ...) from the prefactor and one geometric factor.
    assert_eq!(find("0/1", "0/1")["series"]["terms"][0]["exp"], "3/8");
    assert_eq!(find("0/1", "0/1")["series"]["terms"][0]["coeff"], "1/1");
    assert_eq!(find("1/1", "0/1")["series"]["terms"][0]["exp"], "11/8");
    assert_eq!(find("1/1", "0/1")["series"]["terms"][0]["coeff"], "1/1");
}

#[test]
fn verify_single_identity() {
    let o = run(&["verify", "E15", "--order", "30", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r: IdentityReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.verdict, Verdict::Equal);
    assert_eq!(r.id, "E15");
}

#[test]
fn verify_with_parameter_filter() {
    let o = run(&["verify", "E7", "--p", "3", "--r", "1,-1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["params"], serde_json::json!({"p": 3, "r": [1, -1]}));
}

#[test]
fn verify_all_is_ordered_and_equal() {
    let o = run(&["verify", "all", "--order", "15", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let reports: Vec<IdentityReport> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(reports.len() >= 20);
    assert!(reports.iter().all(|r| r.verdict == Verdict::Equal));
    let ids: Vec<&str> = reports.iter().map(|r| r.id.as_str()).collect();
    let registry: Vec<&str> = a2lab::identities::registry().iter().map(|i| i.id).collect();
    assert_eq!(ids, registry);
}

#[test]
fn thread_cap_keeps_output_order() {
    let strip = |o: &Output| -> Vec<String> {
        stdout(o).lines().map(|l| l.split_whitespace().take(2).collect::<Vec<_>>().join(" ")).collect()
    };
    let one = run_env(&["verify", "all", "--order", "6"], "A2LAB_THREADS", "1");
    let two = run_env(&["verify", "all", "--order", "6"], "A2LAB_THREADS", "2");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(strip(&one), strip(&two));
    let bad = run_env(&["verify", "E1"], "A2LAB_THREADS", "many");
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn unknown_identity_is_usage_error() {
    assert_eq!(run(&["verify", "E99"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "E1", "--order", "0"]).status.code(), Some(2));
    assert_eq!(run(&["expand", "nothing"]).status.code(), Some(2));
}

#[test]
fn check_t_mod() {
    let o = run(&[
        "check", "T_MOD", "--gamma", "1,0,6,1", "--tau", "0.1+1.2i", "--z", "0.21+0.3i,0.11+0.4i", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: TransformationResidual = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r.residual < 1e-8);
    assert_eq!(r.tolerance, 1e-8);
}

#[test]
fn check_f_ell_and_membership() {
    let o = run(&["check", "F_ELL", "--m", "2,0", "--l", "0,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(run(&["check", "F_MOD", "--gamma", "1,1,1,2"]).status.code(), Some(2));
    assert_eq!(run(&["check", "F_ELL", "--m", "1,0"]).status.code(), Some(2));
    assert_eq!(run(&["check", "T_MOD", "--gamma", "1,0,2,1"]).status.code(), Some(2));
    assert_eq!(run(&["check", "NOPE", "--gamma", "1,0,0,1"]).status.code(), Some(2));
}

#[test]
fn check_outside_tolerance_exits_one() {
    let o = run(&["check", "J_MOD", "--gamma", "5,1,24,5", "--tolerance", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("fail"));
}

#[test]
fn check_grid() {
    let o = run(&["check", "T_ELL", "--grid", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rs: Vec<TransformationResidual> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rs.len() >= 25);
}

#[test]
fn suite_passes() {
    let o = run(&["suite", "--filter", "E1|E16|E20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("identities 3/3 equal; transformations 200/200 within tolerance"), "{text}");
}
