//! The acceptance suite: every experiment at its default size, mapped onto
//! twelve pass/fail criteria.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::experiments::{find, EXPERIMENTS};
use crate::report::{ExperimentReport, Verdict};

pub struct Criterion {
    pub index: usize,
    pub title: &'static str,
    experiment: &'static str,
    /// Assertion ids (or id prefixes ending in `_`) that must all pass.
    assertions: &'static [&'static str],
}

pub const CRITERIA: &[Criterion] = &[
    Criterion {
        index: 1,
        title: "multiplier exactness on plane waves",
        experiment: "operator_crossval",
        assertions: &["multiplier_exactness"],
    },
    Criterion {
        index: 2,
        title: "mass conservation over 1000 strang steps",
        experiment: "conservation",
        assertions: &["mass_drift_"],
    },
    Criterion {
        index: 3,
        title: "regularized energy drift order (strang, lie)",
        experiment: "conservation",
        assertions: &["energy_order_"],
    },
    Criterion {
        index: 4,
        title: "Gronwall bounds for H^s, H^1 and d/dt u",
        experiment: "growth_bounds",
        assertions: &["gronwall_hs", "gronwall_h1", "gronwall_dt"],
    },
    Criterion {
        index: 5,
        title: "log-Lipschitz oracle, 10^6 samples",
        experiment: "inequality_suite",
        assertions: &["lipschitz_violations"],
    },
    Criterion {
        index: 6,
        title: "mu_eps closed form against quadrature",
        experiment: "inequality_suite",
        assertions: &["mu_eps_quadrature"],
    },
    Criterion {
        index: 7,
        title: "eps-Cauchy monotonicity",
        experiment: "eps_cauchy",
        assertions: &["eps_monotone_"],
    },
    Criterion {
        index: 8,
        title: "commutator refinement stability",
        experiment: "commutator_scan",
        assertions: &["refinement_stability"],
    },
    Criterion {
        index: 9,
        title: "weighted-moment bound",
        experiment: "weighted_moment",
        assertions: &["moment_bound_"],
    },
    Criterion {
        index: 10,
        title: "operator cross-validation",
        experiment: "operator_crossval",
        assertions: &[
            "gagliardo_spread",
            "singular_integral_distance",
            "singular_integral_refinement",
        ],
    },
    Criterion {
        index: 11,
        title: "s = 1 Gausson stationary profile",
        experiment: "gausson",
        assertions: &["residual", "stationary_error"],
    },
];

pub const DETERMINISM_INDEX: usize = 12;

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub index: usize,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2}. {}: {}", self.index, self.title, self.detail)
    }
}

fn matches(pattern: &str, id: &str) -> bool {
    if pattern.ends_with('_') {
        id.starts_with(pattern)
    } else {
        id == pattern
    }
}

fn evaluate(c: &Criterion, report: Result<&ExperimentReport, &String>) -> CriterionOutcome {
    let mut outcome = CriterionOutcome {
        index: c.index,
        title: c.title.to_string(),
        passed: false,
        detail: String::new(),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            outcome.detail = format!("{} failed to run: {e}", c.experiment);
            return outcome;
        }
    };
    let mut parts = Vec::new();
    let mut passed = true;
    for pattern in c.assertions {
        let hits: Vec<_> = report
            .assertions
            .iter()
            .filter(|a| a.verdict != Verdict::Diagnostic && matches(pattern, &a.id))
            .collect();
        if hits.is_empty() {
            passed = false;
            parts.push(format!("{pattern}: missing"));
        }
        for a in hits {
            passed &= a.verdict == Verdict::Pass;
            let limit = a.limit.map(|l| format!(" (limit {l:e})")).unwrap_or_default();
            parts.push(format!("{} = {:.4e}{limit}", a.id, a.measured));
        }
    }
    outcome.passed = passed;
    outcome.detail = parts.join("; ");
    outcome
}

/// Runs every experiment with its default configuration into `out/<name>`.
pub fn run_suite(out: &Path, seed: u64) -> BTreeMap<&'static str, Result<ExperimentReport, String>> {
    EXPERIMENTS
        .iter()
        .map(|e| {
            let cfg = e.configured(seed, &out.join(e.name));
            (e.name, (e.run)(&cfg).map_err(|err| format!("{err:#}")))
        })
        .collect()
}

fn csv_files(dir: &Path) -> Result<BTreeMap<PathBuf, Vec<u8>>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).with_context(|| format!("listing {}", d.display()))? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let rel = path.strip_prefix(dir)?.to_path_buf();
                files.insert(rel, fs::read(&path)?);
            }
        }
    }
    Ok(files)
}

fn compare_runs(first: &Path, second: &Path) -> Result<CriterionOutcome> {
    let a = csv_files(first)?;
    let b = csv_files(second)?;
    let mut differing: Vec<String> = a
        .iter()
        .filter(|(k, v)| b.get(*k) != Some(*v))
        .map(|(k, _)| k.display().to_string())
        .collect();
    differing.extend(
        b.keys()
            .filter(|k| !a.contains_key(*k))
            .map(|k| k.display().to_string()),
    );
    let passed = differing.is_empty() && !a.is_empty();
    let detail = if passed {
        format!("{} CSV files byte-identical across two runs", a.len())
    } else if a.is_empty() {
        "no CSV output produced".to_string()
    } else {
        format!("differing: {}", differing.join(", "))
    };
    Ok(CriterionOutcome {
        index: DETERMINISM_INDEX,
        title: "determinism of CSV outputs".to_string(),
        passed,
        detail,
    })
}

/// Runs the whole suite twice under `out` and evaluates all criteria.
pub fn run_acceptance(out: &Path, seed: u64) -> Result<Vec<CriterionOutcome>> {
    let first = out.join("run1");
    let second = out.join("run2");
    for dir in [&first, &second] {
        if dir.exists() {
            fs::remove_dir_all(dir).with_context(|| format!("clearing {}", dir.display()))?;
        }
    }
    let reports = run_suite(&first, seed);
    let mut outcomes: Vec<CriterionOutcome> = CRITERIA
        .iter()
        .map(|c| {
            find(c.experiment).expect("criterion names a registered experiment");
            evaluate(c, reports[c.experiment].as_ref())
        })
        .collect();
    run_suite(&second, seed);
    outcomes.push(compare_runs(&first, &second)?);
    Ok(outcomes)
}
