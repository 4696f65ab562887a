use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::spec::{ProblemSpec, PROBLEM_NAMES};
use crate::problems::Problem;
use crate::verification::suites::{gradient_suite, lemma_suite};
use crate::verification::{CheckVerdict, SuiteSizes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemmas,
    Gradients,
    All,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Lemmas => "lemmas",
            Suite::Gradients => "gradients",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lemmas" => Ok(Suite::Lemmas),
            "gradients" => Ok(Suite::Gradients),
            "all" => Ok(Suite::All),
            _ => Err(Error::Unknown {
                kind: "suite",
                name: s.to_string(),
            }),
        }
    }
}

/// Every problem under its default parameters.
pub fn shipped_problems() -> Vec<Box<dyn Problem<f64>>> {
    PROBLEM_NAMES
        .iter()
        .map(|name| {
            ProblemSpec::named(*name)
                .build()
                .expect("default problems build")
        })
        .collect()
}

/// Runs the selected suite over the shipped problems.
pub fn check(suite: Suite, seed: u64, sizes: &SuiteSizes) -> Result<Vec<CheckVerdict>> {
    let owned = shipped_problems();
    let problems: Vec<&dyn Problem<f64>> = owned.iter().map(|p| p.as_ref()).collect();
    let mut verdicts = Vec::new();
    if matches!(suite, Suite::Lemmas | Suite::All) {
        verdicts.extend(lemma_suite(&problems, sizes, seed)?);
    }
    if matches!(suite, Suite::Gradients | Suite::All) {
        verdicts.extend(gradient_suite(&problems, sizes, seed));
    }
    Ok(verdicts)
}

/// Exit status of a check run: 0 when every verdict holds, 3 otherwise.
pub fn check_exit_code(verdicts: &[CheckVerdict]) -> i32 {
    if verdicts.iter().all(|v| v.holds) {
        0
    } else {
        3
    }
}
