//! Theorem-verification suites over seeded random instances.
//!
//! Case `i` of a run with seed `s` draws from a ChaCha stream keyed by
//! `(s, i)`, so every violation replays from those two numbers alone.

pub mod instances;
mod suites;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::maxfrat::Budget;
use instances::{Draw, Pool};

pub const SCHEMA: u32 = 1;
pub const DEFAULT_CASES: u64 = 200;

/// Result of checking one case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// The drawn instance misses the hypotheses.
    Vacuous,
    Violated(String),
}

pub(crate) type Check = fn(&mut Draw, Budget) -> Result<Verdict>;

pub struct Suite {
    pub id: &'static str,
    /// The statement the suite exercises.
    pub result: &'static str,
    pub description: &'static str,
    pub(crate) check: Check,
}

pub fn suites() -> &'static [Suite] {
    suites::REGISTRY
}

pub fn find(id: &str) -> Result<&'static Suite> {
    suites()
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownSuite(id.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub case: u64,
    pub detail: String,
    pub inputs: Value,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetStatus {
    Complete,
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite_id: String,
    pub result: String,
    pub seed: u64,
    pub cases_run: u64,
    pub vacuous: u64,
    pub violations: Vec<Violation>,
    pub budget_status: BudgetStatus,
    /// Cases abandoned because an enumeration ran out of budget.
    pub over_budget: Vec<u64>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.budget_status == BudgetStatus::Complete
    }
}

enum CaseOutcome {
    Verdict(Verdict, Value),
    OverBudget,
}

fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

fn run_case(suite: &Suite, pool: &Pool, seed: u64, case: u64, budget: Budget) -> CaseOutcome {
    let mut draw = Draw::new(case_rng(seed, case), pool);
    let verdict = (suite.check)(&mut draw, budget);
    let inputs = Value::Object(std::mem::take(&mut draw.inputs));
    match verdict {
        Ok(v) => CaseOutcome::Verdict(v, inputs),
        Err(Error::BudgetExceeded { .. }) => CaseOutcome::OverBudget,
        Err(e) => CaseOutcome::Verdict(Verdict::Violated(format!("error: {e}")), inputs),
    }
}

/// Runs `cases` cases; deterministic in `(id, seed, cases, budget)` apart
/// from `elapsed_ms`. `budget.threads` bounds the case-level parallelism.
pub fn run_suite(id: &str, seed: u64, cases: u64, budget: Budget) -> Result<VerificationReport> {
    let suite = find(id)?;
    let pool = Pool::new();
    run_with_pool(suite, &pool, seed, cases, budget)
}

pub fn run_with_pool(
    suite: &Suite,
    pool: &Pool,
    seed: u64,
    cases: u64,
    budget: Budget,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let inner = budget.sequential();
    let go = || -> Vec<(u64, CaseOutcome)> {
        (0..cases)
            .into_par_iter()
            .map(|i| (i, run_case(suite, pool, seed, i, inner)))
            .collect()
    };
    let outcomes = match budget.threads {
        0 => go(),
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Input(format!("thread pool: {e}")))?
            .install(go),
    };
    let mut report = VerificationReport {
        schema: SCHEMA,
        suite_id: suite.id.to_string(),
        result: suite.result.to_string(),
        seed,
        cases_run: 0,
        vacuous: 0,
        violations: Vec::new(),
        budget_status: BudgetStatus::Complete,
        over_budget: Vec::new(),
        elapsed_ms: 0,
    };
    for (case, outcome) in outcomes {
        match outcome {
            CaseOutcome::OverBudget => report.over_budget.push(case),
            CaseOutcome::Verdict(v, inputs) => {
                report.cases_run += 1;
                match v {
                    Verdict::Holds => {}
                    Verdict::Vacuous => report.vacuous += 1,
                    Verdict::Violated(detail) => report.violations.push(Violation {
                        case,
                        detail,
                        inputs,
                    }),
                }
            }
        }
    }
    if !report.over_budget.is_empty() {
        report.budget_status = BudgetStatus::Partial;
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Re-runs one case; `Some` carries the violation it reproduces.
pub fn replay(id: &str, seed: u64, case: u64, budget: Budget) -> Result<Option<Violation>> {
    let suite = find(id)?;
    let pool = Pool::new();
    match run_case(suite, &pool, seed, case, budget.sequential()) {
        CaseOutcome::OverBudget => Err(Error::BudgetExceeded {
            visited: budget.max_candidates,
        }),
        CaseOutcome::Verdict(Verdict::Violated(detail), inputs) => Ok(Some(Violation {
            case,
            detail,
            inputs,
        })),
        CaseOutcome::Verdict(..) => Ok(None),
    }
}
