//! Brute-force checks of the identities and inequalities behind the convergence analysis.

mod rate;
mod sequences;
pub mod suites;
mod z_identity;

pub use rate::{fit_rate, RateFit, MIN_CHECKPOINTS};
pub use sequences::{check_seq_adagrad, check_seq_exp, SeqCheck, SEQ_TOLERANCE};
pub use suites::{CheckVerdict, SuiteSizes};
pub use z_identity::{check_z_identity, RunTrace, ZTrace};
