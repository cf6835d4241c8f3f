//! Acceptance criteria, one line each. Criteria 1 to 11 run the library
//! checks on the seed-7 ensemble (200 systems, |G| <= 8, |X| <= 6) and
//! criterion 12 runs the binary twice.

use std::process::Command;
use std::time::{Duration, Instant};

use rankforge::budget::Budget;
use rankforge::scott::scott_rank;
use rankforge::structures::Structure;
use rankforge::verify::{run_selected, scott_ladder, CheckResult, Suite, VerificationReport, VerifyOptions};

const SEED: u64 = 7;
const ORACLE_LEQ_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_SCOTT_LIMIT: Duration = Duration::from_secs(60);
const COMPARISON_LIMIT: Duration = Duration::from_secs(300);

struct Outcome {
    passed: bool,
    detail: String,
}

fn options() -> VerifyOptions {
    VerifyOptions {
        seed: SEED,
        ..VerifyOptions::default()
    }
}

fn timed(suite: Suite, names: &[&str]) -> (VerificationReport, Duration) {
    let start = Instant::now();
    let report = run_selected(suite, Some(names), &options(), &Budget::default()).expect("suite runs within budget");
    (report, start.elapsed())
}

fn summarize(checks: &[&CheckResult]) -> Outcome {
    let passed = checks.iter().all(|c| c.passed());
    let mut parts: Vec<String> = checks
        .iter()
        .map(|c| format!("{} {}/{}", c.name, c.failures, c.cases))
        .collect();
    if let Some(w) = checks.iter().find_map(|c| c.witness.as_ref()) {
        parts.push(format!("witness: {w}"));
    }
    Outcome {
        passed,
        detail: parts.join(", "),
    }
}

fn pick<'a>(report: &'a VerificationReport, names: &[&str]) -> Vec<&'a CheckResult> {
    names
        .iter()
        .map(|n| report.check(n).unwrap_or_else(|| panic!("check {n} ran")))
        .collect()
}

fn within(mut outcome: Outcome, took: Duration, limit: Duration) -> Outcome {
    outcome.passed &= took < limit;
    outcome.detail = format!("{}; {:.1}s (limit {}s)", outcome.detail, took.as_secs_f64(), limit.as_secs());
    outcome
}

fn ladder() -> Outcome {
    let l2 = scott_rank(&Structure::linear_order(2)).expect("finite structure");
    let rows = scott_ladder(6).expect("ladder computes");
    let engine: Vec<Option<usize>> = rows.iter().map(|r| r.1).collect();
    let agree = rows.iter().all(|r| r.1 == r.2);
    let nondecreasing = engine.windows(2).all(|w| w[0] <= w[1]);
    let levels: Vec<String> = engine.iter().map(|e| e.map_or("-".into(), |v| v.to_string())).collect();
    Outcome {
        passed: l2.value == 1 && agree && nondecreasing && engine.iter().all(Option::is_some),
        detail: format!(
            "rank(L2)={} separating levels {} oracle-agree={agree} nondecreasing={nondecreasing}",
            l2.value,
            levels.join(",")
        ),
    }
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_rankforge"))
            .args(["--format", "records", "--seed", "7", "verify", "all", "--sizes", "g≤8,x≤6,n≤3"])
            .env_remove("RANKFORGE_BUDGET")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let identical = a.stdout == b.stdout;
    let ok = a.status.code() == Some(0) && b.status.code() == Some(0);
    Outcome {
        passed: identical && ok && !a.stdout.is_empty(),
        detail: format!(
            "exit {:?}/{:?}, {} bytes, identical={identical}",
            a.status.code(),
            b.status.code(),
            a.stdout.len()
        ),
    }
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |n, name, o: Outcome| {
        println!("criterion {n:>2} {:<28} {}  {}", name, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };

    let (r, t) = timed(Suite::Lemmas, &["oracle-leq"]);
    report(1, "oracle equivalence (leq)", within(summarize(&pick(&r, &["oracle-leq"])), t, ORACLE_LEQ_LIMIT));

    let (r, t) = timed(Suite::Iso, &["scott-oracle"]);
    report(2, "oracle equivalence (Scott)", within(summarize(&pick(&r, &["scott-oracle"])), t, ORACLE_SCOTT_LIMIT));

    let lemma_names = [
        "transitivity",
        "level-monotone",
        "set-monotone",
        "translation",
        "equivalence",
        "discrete-collapse",
        "fixed-points",
        "rank-comparison",
        "rank-invariance",
    ];
    let (lemmas, _) = timed(Suite::Lemmas, &lemma_names);
    report(
        3,
        "lemma suite",
        summarize(&pick(&lemmas, &["transitivity", "level-monotone", "set-monotone", "translation", "equivalence"])),
    );

    let (iso, _) = timed(Suite::Iso, &["orbit-theorem", "invariant-sets", "scott-iso"]);
    report(4, "isomorphism theorem", summarize(&pick(&iso, &["orbit-theorem", "invariant-sets"])));
    report(5, "finite-discrete collapse", summarize(&pick(&lemmas, &["discrete-collapse"])));
    report(6, "Scott isomorphism", summarize(&pick(&iso, &["scott-iso"])));
    report(7, "Scott rank ladder", ladder());

    let (r, t) = timed(Suite::Comparison, &["comparison"]);
    report(8, "comparison proposition", within(summarize(&pick(&r, &["comparison"])), t, COMPARISON_LIMIT));

    let vaught_names = [
        "vaught-invariance",
        "vaught-duality",
        "vaught-lattice",
        "vaught-monotone",
        "vaught-basis",
        "star-orbit",
    ];
    let (r, _) = timed(Suite::Vaught, &vaught_names);
    report(9, "Vaught laws", summarize(&pick(&r, &vaught_names)));
    report(
        10,
        "fixed points and rank order",
        summarize(&pick(&lemmas, &["fixed-points", "rank-comparison", "rank-invariance"])),
    );

    let (r, _) = timed(Suite::Basis, &["basis-shift", "basis-shift-minimal"]);
    report(11, "basis-shift bound", summarize(&pick(&r, &["basis-shift", "basis-shift-minimal"])));
    report(12, "determinism", determinism());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
