use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankforge"))
        .args(args)
        .env_remove("RANKFORGE_BUDGET")
        .output()
        .expect("binary runs")
}

fn records(args: &[&str]) -> (i32, Vec<String>) {
    let mut all = vec!["--format", "records"];
    all.extend_from_slice(args);
    let out = run(&all);
    let lines = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    (out.status.code().unwrap(), lines)
}

fn kind<'a>(lines: &'a [String], k: &str) -> Vec<&'a String> {
    lines.iter().filter(|l| l.split(' ').next() == Some(k)).collect()
}

#[test]
fn scott_rank_of_small_orders() {
    let (code, lines) = records(&["scott-rank", &data("orders.structures"), "--oracle"]);
    assert_eq!(code, 0);
    assert!(lines[0].starts_with("CONFIG command=scott-rank"));
    let ranks = kind(&lines, "RANK");
    assert_eq!(ranks[0], "RANK point=L2 delta=1 stab=1");
    assert_eq!(ranks[1], "RANK point=point delta=0 stab=0");
    assert!(kind(&lines, "CHECK")[0].contains("verdict=pass"));
}

#[test]
fn malformed_input_exits_two_without_records() {
    let out = run(&["--format", "records", "scott-rank", &data("malformed.structures")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));
}

#[test]
fn hjorth_on_two_point_swap() {
    let (code, lines) = records(&["hjorth", "--action", &data("sys1.action"), "--dump", "--oracle"]);
    assert_eq!(code, 0);
    assert!(kind(&lines, "TABLE")[0].contains("stab=1"));
    assert_eq!(kind(&lines, "LEQ").len(), 81);
    assert!(lines.contains(&"LEQ level=1 x0=0 V0={s} x1=1 V1={e} val=1".to_string()));
    assert_eq!(kind(&lines, "RANK").len(), 3);
    assert!(kind(&lines, "RANK").iter().all(|r| r.contains("delta=1") && r.ends_with("m=0")));
    assert_eq!(kind(&lines, "PARTITION"), ["PARTITION delta=1 count=3 points=0,1,2"]);
    assert!(kind(&lines, "CHECK")[0].contains("name=oracle-leq verdict=pass"));
}

#[test]
fn trivial_group_settles_in_one_sweep() {
    let (code, lines) = records(&["hjorth", "--action", &data("trivial.action")]);
    assert_eq!(code, 0);
    assert!(kind(&lines, "TABLE")[0].contains("stab=1 levels=1"));
    assert!(kind(&lines, "RANK").iter().all(|r| r.contains("delta=1")));
}

#[test]
fn basis_flag_overrides_the_file() {
    let (_, sparse) = records(&["hjorth", "--action", &data("cyclic.action")]);
    assert!(kind(&sparse, "TABLE")[0].contains("stab=2"));
    let (_, full) = records(&["hjorth", "--action", &data("cyclic.action"), "--basis", "all-subsets"]);
    assert!(kind(&full, "TABLE")[0].contains("stab=1"));
    let (_, capped) = records(&["hjorth", "--action", &data("cyclic.action"), "--max-level", "1"]);
    assert!(kind(&capped, "TABLE")[0].contains("stab=-"));
    assert!(kind(&capped, "RANK").is_empty());
}

#[test]
fn symbolic_window_reports_level_breaks() {
    let (code, lines) = records(&["hjorth", "--symbolic", &data("window.structures"), "-s", "3", "-k", "1"]);
    assert_eq!(code, 0);
    assert!(kind(&lines, "TABLE")[0].contains("breaks=1"));
    assert_eq!(kind(&lines, "BREAK").len(), 1);
}

#[test]
fn oversize_logic_spec_is_a_budget_error() {
    let out = run(&["hjorth", "--logic", "edge:2", "-n", "9"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("universe size is 9, limit 4"));
    let out = Command::new(env!("CARGO_BIN_EXE_rankforge"))
        .args(["compare", "--signature", "edge:2", "-n", "3"])
        .env("RANKFORGE_BUDGET", "n=2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn compare_scans_without_counterexamples() {
    let (code, lines) = records(&["compare", "--signature", "edge:2", "-n", "2"]);
    assert_eq!(code, 0);
    assert!(kind(&lines, "COMPARE")[0].ends_with("counterexamples=0"));
    assert!(!kind(&lines, "REACH").is_empty());
    let (code, lines) = records(&["compare", "--signature=", "-n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(kind(&lines, "REACH").len(), 1);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(run(&["--format", "yaml", "verify", "all"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "lemmas", "--sizes", "q<=3"]).status.code(), Some(2));

    let args = ["verify", "lemmas", "--seed", "3", "--sizes", "g<=4,x<=4,c=20", "--check", "transitivity"];
    let (code, lines) = records(&args);
    assert_eq!(code, 0);
    assert!(lines.last().unwrap().starts_with("SUITE name=lemmas verdict=pass"));

    let mut faulty = args.to_vec();
    faulty.push("--inject-fault");
    let (code, lines) = records(&faulty);
    assert_eq!(code, 1);
    let check = kind(&lines, "CHECK")[0];
    assert!(check.contains("verdict=fail") && check.contains("witness=\"system #"));
}

#[test]
fn records_are_reproducible() {
    let args = ["--format", "records", "verify", "comparison", "--seed", "5"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8_lossy(&a.stdout);
    assert!(text.starts_with("CONFIG command=verify format=records suite=comparison seed=5"));
}
