//! Reproducible experiments: spec parsing, runs with CSV/JSON output, preset
//! scenarios and property-check suites.
//!
//! Exit statuses used by the command-line front end: 0 success, 1 numeric
//! abort, 2 bad spec (or I/O failure), 3 check-suite failure.

mod check;
mod run;
mod scenario;
mod spec;

pub use check::{check, check_exit_code, shipped_problems, Suite};
pub use run::{
    format_float, run, run_with, Abort, Checkpoint, Finals, RunOutcome, RunSummary, CSV_HEADER,
};
pub use scenario::{
    describe, members, run_scenario, Certification, MemberResult, Scenario, ScenarioMember,
    ScenarioOutcome, FIG1_ITERS, FIG2_ITERS, FIG2_SEEDS, FIGA_ITERS,
};
pub use spec::{
    exit_code, ExperimentSpec, OptimizerSpec, ProblemParams, ProblemSpec, PROBLEM_NAMES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC_ABORT: i32 = 1;
pub const EXIT_BAD_SPEC: i32 = 2;
pub const EXIT_CHECK_FAILURE: i32 = 3;
