//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use sandpile_lab::abelian_groups::AbelianGroup;
use sandpile_lab::cohen_lenstra::{check_normalization, moment_identity_check};
use sandpile_lab::experiment::{
    run_distribution, run_event_rates, run_moment, Event, ExperimentConfig, ExperimentReport,
};
use sandpile_lab::oracle::{group_count_suite, matrix_tree_suite, smith_suite, structure_suite, SuiteResult};
use sandpile_lab::random_digraph::EdgeModel;

const SEED: u64 = 42;
const WORKERS: usize = 8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn bernoulli_half() -> EdgeModel {
    EdgeModel::bernoulli(0.5).expect("bernoulli(1/2) is balanced")
}

fn constants_json() -> (serde_json::Value, Duration) {
    let (out, elapsed) = timed(|| {
        Command::new(env!("CARGO_BIN_EXE_sandpile-lab"))
            .args(["constants", "--tol", "1e-6"])
            .output()
            .expect("run sandpile-lab")
    });
    assert!(out.status.success(), "constants failed: {}", String::from_utf8_lossy(&out.stderr));
    (serde_json::from_slice(&out.stdout).expect("constants prints JSON"), elapsed)
}

fn constant_value(json: &serde_json::Value, key: &str) -> f64 {
    json[key]["value"].as_str().and_then(|s| s.parse().ok()).expect("decimal value")
}

fn criterion_constant(json: &serde_json::Value, elapsed: Duration, key: &str, target: f64, budget: Duration) -> Outcome {
    let value = constant_value(json, key);
    let pass = (value - target).abs() <= 1e-6 && elapsed < budget;
    Outcome { pass, detail: format!("{key} = {value:.10} (target {target}), {elapsed:.2?} (budget {budget:?})") }
}

fn suites_pass(results: &[SuiteResult]) -> (bool, String) {
    let pass = results.iter().all(SuiteResult::passed);
    let detail = results
        .iter()
        .map(|r| format!("{} {}/{}", r.name, r.cases - r.failures, r.cases))
        .collect::<Vec<_>>()
        .join(", ");
    (pass, detail)
}

fn criterion_matrix_tree() -> Outcome {
    let (suite, elapsed) = timed(|| matrix_tree_suite(10_000, 4, 2, SEED));
    let (ok, detail) = suites_pass(std::slice::from_ref(&suite));
    let pass = ok && suite.cases >= 10_000 && elapsed < Duration::from_secs(60);
    Outcome { pass, detail: format!("{detail}, {elapsed:.2?}") }
}

fn criterion_structure() -> Outcome {
    let (suites, elapsed) = timed(|| structure_suite(1000, 8, SEED));
    let (ok, detail) = suites_pass(&suites);
    let pass = ok && elapsed < Duration::from_secs(120);
    Outcome { pass, detail: format!("{detail}, {elapsed:.2?}") }
}

fn criterion_distribution(report: &ExperimentReport, elapsed: Duration) -> Outcome {
    let groups = [
        ("1", AbelianGroup::trivial()),
        ("Z/2", AbelianGroup::from_cyclic_orders(&[2]).unwrap()),
        ("Z/4", AbelianGroup::from_cyclic_orders(&[4]).unwrap()),
        ("(Z/2)^2", AbelianGroup::from_cyclic_orders(&[2, 2]).unwrap()),
    ];
    let mut pass = elapsed < Duration::from_secs(600);
    let mut parts = Vec::new();
    for (name, g) in &groups {
        match report.outcomes.iter().find(|o| o.group.as_ref() == Some(g)) {
            Some(row) => {
                let inside = row.theory_in_ci99 == Some(true);
                pass &= inside;
                parts.push(format!(
                    "{name}: {:.4} in [{:.4}, {:.4}] vs {:.4}{}",
                    row.frequency,
                    row.ci99.low,
                    row.ci99.high,
                    row.theory.unwrap_or(f64::NAN),
                    if inside { "" } else { " (outside)" }
                ));
            }
            None => {
                pass = false;
                parts.push(format!("{name}: missing"));
            }
        }
    }
    Outcome { pass, detail: format!("{}; {elapsed:.2?}", parts.join("; ")) }
}

fn criterion_moment() -> Outcome {
    let target = AbelianGroup::from_cyclic_orders(&[2]).unwrap();
    let run = |n: usize| {
        let cfg = ExperimentConfig::new(n, 4000, bernoulli_half(), SEED)
            .with_moment(2, target.clone())
            .with_workers(WORKERS);
        run_moment(&cfg).expect("moment run").moment.expect("moment summary")
    };
    let (m50, m100) = (run(50), run(100));
    let (se50, se100) = (m50.estimate.std_error, m100.estimate.std_error);
    let (d50, d100) = (m50.deviation.abs(), m100.deviation.abs());
    let within = d100 <= 3.0 * se100;
    let decay = d100 <= d50 + 2.0 * (se50 * se50 + se100 * se100).sqrt();
    Outcome {
        pass: within && decay,
        detail: format!(
            "n=100 mean {:.4} (se {se100:.4}, {:.2} se from 0.5); n=50 mean {:.4} (se {se50:.4}); decay check {}",
            m100.estimate.mean,
            d100 / se100,
            m50.estimate.mean,
            if decay { "ok" } else { "violated" }
        ),
    }
}

fn criteria_rates() -> (Outcome, Outcome) {
    let cfg = ExperimentConfig::new(100, 4000, bernoulli_half(), SEED).with_workers(WORKERS);
    let (report, elapsed) = timed(|| run_event_rates(&cfg, &[Event::Coeulerian, Event::Cyclic]).expect("rate run"));
    let check = |event: Event, bound: f64, centre: f64, window: f64| {
        let r = report.rate(event).expect("event reported");
        let slack = 3.0 * r.ci95.half_width();
        let under = r.frequency <= bound + slack;
        let near = (r.frequency - centre).abs() <= window;
        Outcome {
            pass: under && near,
            detail: format!(
                "{} {:.4} (95% half-width {:.4}); bound {bound:.4} {}; within {window} of {centre} (conjecture consistency) {}; {elapsed:.2?}",
                event.name(),
                r.frequency,
                r.ci95.half_width(),
                if under { "ok" } else { "exceeded" },
                if near { "ok" } else { "no" }
            ),
        }
    };
    let q = report.rate(Event::Coeulerian).and_then(|r| r.bound.as_ref()).map(|b| b.value).unwrap_or(f64::NAN);
    (check(Event::Coeulerian, q, 0.4358, 0.03), check(Event::Cyclic, 0.9603, 0.9603, 0.02))
}

fn criterion_moment_identity() -> Outcome {
    let z2 = AbelianGroup::from_cyclic_orders(&[2]).unwrap();
    let primes: BTreeSet<u64> = [2].into_iter().collect();
    let moment = moment_identity_check(&z2, &primes, 8).expect("moment identity");
    let mass = check_normalization(2, 8).expect("normalization");
    Outcome {
        pass: (moment - 0.5).abs() <= 1e-3 && mass >= 0.999,
        detail: format!("moment {moment:.8}, normalization {mass:.8}"),
    }
}

fn criterion_oracles() -> Outcome {
    let (suites, elapsed) = timed(|| vec![group_count_suite(32), smith_suite(1000, SEED)]);
    let (pass, detail) = suites_pass(&suites);
    Outcome { pass, detail: format!("{detail}, {elapsed:.2?}") }
}

fn criterion_reproducible(dist_at_8: &ExperimentReport, dist_cfg: &ExperimentConfig) -> Outcome {
    let mut mismatches = Vec::new();
    let dist_at_1 = run_distribution(&dist_cfg.clone().with_workers(1)).expect("distribution run");
    if dist_at_1.to_json() != dist_at_8.to_json() || dist_at_1.to_csv() != dist_at_8.to_csv() {
        mismatches.push("dist");
    }
    let small = ExperimentConfig::new(40, 300, bernoulli_half(), 7);
    let moment_cfg = small.clone().with_moment(4, AbelianGroup::from_cyclic_orders(&[2, 2]).unwrap());
    let a = run_moment(&moment_cfg.clone().with_workers(1)).expect("moment run");
    let b = run_moment(&moment_cfg.with_workers(8)).expect("moment run");
    if a.to_json() != b.to_json() || a.to_csv() != b.to_csv() {
        mismatches.push("moment");
    }
    let a = run_event_rates(&small.clone().with_workers(1), &Event::ALL).expect("rate run");
    let b = run_event_rates(&small.with_workers(8), &Event::ALL).expect("rate run");
    if a.to_json() != b.to_json() || a.to_csv() != b.to_csv() {
        mismatches.push("rate");
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            "dist, moment and rate reports identical at workers 1 and 8".to_string()
        } else {
            format!("reports differ for {}", mismatches.join(", "))
        },
    }
}

fn main() {
    // Accept and ignore libtest arguments such as --nocapture.
    let mut failed = 0;
    let mut report = |n: u32, o: Outcome| {
        if !o.pass {
            failed += 1;
        }
        println!("criterion {n:>2}: {} - {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    };

    let (json, elapsed) = constants_json();
    report(1, criterion_constant(&json, elapsed, "Q", 0.4357571, Duration::from_secs(1)));
    report(2, criterion_constant(&json, elapsed, "cyclic_constant", 0.9603461, Duration::from_secs(5)));
    report(3, criterion_matrix_tree());
    report(4, criterion_structure());

    let dist_cfg = ExperimentConfig::new(100, 4000, bernoulli_half(), SEED).with_primes(&[2]).with_workers(WORKERS);
    let (dist, elapsed) = timed(|| run_distribution(&dist_cfg).expect("distribution run"));
    report(5, criterion_distribution(&dist, elapsed));
    report(6, criterion_moment());
    let (coeulerian, cyclic) = criteria_rates();
    report(7, coeulerian);
    report(8, cyclic);
    report(9, criterion_moment_identity());
    report(10, criterion_oracles());
    report(11, criterion_reproducible(&dist, &dist_cfg));

    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
