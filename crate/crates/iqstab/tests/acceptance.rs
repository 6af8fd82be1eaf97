//! Acceptance harness: one line per criterion, exit status nonzero if any
//! criterion fails.  Every comparison is exact equality of canonical forms
//! over Q(q); there is no numeric tolerance anywhere.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use iqstab::checks::{run_checks, CheckReport, Status};
use iqstab::rep::DEFAULT_SIZE_BOUND;

/// Exact symbolic equality; no floating point comparison is made.
const TOLERANCE: &str = "exact";

struct Criterion {
    number: usize,
    name: &'static str,
    selections: &'static [&'static str],
    /// Minimum number of checks the selection must produce.
    min_checks: usize,
    budget: Duration,
    skipped_allowed: bool,
}

const CRITERIA: [Criterion; 5] = [
    Criterion { number: 1, name: "calc lemmas", selections: &["lemma-calc-*"], min_checks: 8, budget: Duration::from_secs(60), skipped_allowed: false },
    Criterion { number: 2, name: "w0 suite", selections: &["w0-*"], min_checks: 11, budget: Duration::from_secs(600), skipped_allowed: false },
    Criterion { number: 3, name: "g_m suite", selections: &["g-*"], min_checks: 16, budget: Duration::from_secs(300), skipped_allowed: false },
    Criterion { number: 4, name: "stability", selections: &["theorem-main:*"], min_checks: 31, budget: Duration::from_secs(1800), skipped_allowed: true },
    Criterion {
        number: 5,
        name: "foundation properties",
        selections: &["prop-*", "neg-*", "k-iso-*"],
        min_checks: 54,
        budget: Duration::from_secs(1200),
        skipped_allowed: false,
    },
];

fn parallelism() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn evaluate(c: &Criterion) -> (bool, String) {
    let t = Instant::now();
    let mut reports: Vec<CheckReport> = Vec::new();
    for sel in c.selections {
        match run_checks(sel, parallelism(), DEFAULT_SIZE_BOUND) {
            Ok(r) => reports.extend(r),
            Err(e) => return (false, format!("{sel}: {e}")),
        }
    }
    let elapsed = t.elapsed();
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    let (pass, fail, skip) = (count(Status::Pass), count(Status::Fail), count(Status::Skipped));
    let mut notes = Vec::new();
    for r in reports.iter().filter(|r| r.status != Status::Pass) {
        notes.push(format!("{} {:?}: {}", r.check_id, r.status, r.witness.as_deref().unwrap_or("")));
    }
    let ok = fail == 0 && (c.skipped_allowed || skip == 0) && reports.len() >= c.min_checks && elapsed <= c.budget;
    if reports.len() < c.min_checks {
        notes.push(format!("only {} checks registered, expected at least {}", reports.len(), c.min_checks));
    }
    if elapsed > c.budget {
        notes.push(format!("over budget {:?}", c.budget));
    }
    let summary = format!("{pass} pass, {fail} fail, {skip} skipped in {:.1}s, tolerance {TOLERANCE}", elapsed.as_secs_f64());
    let detail = if notes.is_empty() { summary } else { format!("{summary}\n      {}", notes.join("\n      ")) };
    (ok, detail)
}

fn main() -> ExitCode {
    let mut all = true;
    for c in &CRITERIA {
        let (ok, detail) = evaluate(c);
        all &= ok;
        println!("criterion {} ({}): {} - {}", c.number, c.name, if ok { "PASS" } else { "FAIL" }, detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
