//! Acceptance criteria over p in {2, 3, 5, 7} at precision 24, one line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{field_failures, hilbert_mismatches, isotropy_mismatches, quadspace_failures, PRIMES};
use qp_conformal::verify::{run_suite, run_suites, Suite};
use qp_conformal::{Qp, Result};

const SEED: u64 = 20_240_601;
const SAMPLES: usize = 500;

fn fields() -> Vec<Qp> {
    PRIMES.iter().map(|&p| Qp::with_default_precision(p).unwrap()).collect()
}

/// Failure descriptions of the named suites at `n` samples, over every prime.
fn suite_failures(suites: &[Suite], n: usize) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for qp in fields() {
        for &suite in suites {
            let report = run_suite(&qp, suite, SEED, n)?;
            for c in report.checks.iter().filter(|c| !c.passed()) {
                bad.push(format!("p={} {}/{}", qp.prime(), suite.name(), c.name));
            }
        }
    }
    Ok(bad)
}

fn field_characters() -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for qp in fields() {
        bad.extend(field_failures(&qp, SEED, SAMPLES).into_iter().map(|n| format!("p={} {n}", qp.prime())));
        bad.extend(hilbert_mismatches(&qp)?);
    }
    Ok(bad)
}

fn quadratic_spaces() -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for qp in fields() {
        bad.extend(quadspace_failures(&qp, SEED, SAMPLES).into_iter().map(|n| format!("p={} {n}", qp.prime())));
        bad.extend(isotropy_mismatches(&qp)?);
    }
    Ok(bad)
}

fn determinism() -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for qp in fields() {
        let run = || -> Result<String> {
            let reports = run_suites(&qp, &Suite::parse("all")?, SEED, 20)?;
            Ok(serde_json::to_string(&reports).expect("serializable"))
        };
        if run()? != run()? {
            bad.push(format!("p={} reports differ between runs", qp.prime()));
        }
    }
    Ok(bad)
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Box<dyn Fn() -> Result<Vec<String>>>);
    let criteria: Vec<Criterion> = vec![
        ("field and character identities, Hilbert census", Box::new(field_characters)),
        ("quadratic spaces, isotropy census, Witt decomposition", Box::new(quadratic_spaces)),
        ("orbit witnesses and classification, 200 per dim", Box::new(|| suite_failures(&[Suite::Orbit], 200))),
        ("Poincare embedding and partial conformal laws, 200", Box::new(|| suite_failures(&[Suite::Embed], 200))),
        ("spin cover", Box::new(|| suite_failures(&[Suite::Spin], SAMPLES))),
        ("conformal chart and intertwining", Box::new(|| suite_failures(&[Suite::Chart], SAMPLES))),
        (
            "Galilean cocycles, multipliers, affine orbits",
            Box::new(|| suite_failures(&[Suite::Cocycle, Suite::Multiplier, Suite::Galilean], SAMPLES)),
        ),
        ("enlarged orbits, openness, chain descent", Box::new(|| suite_failures(&[Suite::Symmetry], SAMPLES))),
        ("byte-identical reports on rerun", Box::new(determinism)),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (label, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match check() {
            Ok(bad) if bad.is_empty() => (true, String::new()),
            Ok(bad) => (false, format!(": {}", bad.join(", "))),
            Err(e) => (false, format!(": error {e}")),
        };
        if !ok {
            failed += 1;
        }
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict} {label} ({:.1}s){detail}", i + 1, t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
