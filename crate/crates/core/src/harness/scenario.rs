use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::run::{run, write_file, RunOutcome, RunSummary};
use crate::harness::spec::{ExperimentSpec, OptimizerSpec, ProblemSpec};
use crate::monitor::Verdict;
use crate::optimizer::{StepSchedule, Variant};

/// Preset experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Scenario {
    Fig1,
    Fig2,
    #[serde(rename = "figA1")]
    FigA1,
    #[serde(rename = "figA2")]
    FigA2,
    #[serde(rename = "figA3")]
    FigA3,
    #[serde(rename = "figA4")]
    FigA4,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Fig1,
        Scenario::Fig2,
        Scenario::FigA1,
        Scenario::FigA2,
        Scenario::FigA3,
        Scenario::FigA4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2 => "fig2",
            Scenario::FigA1 => "figA1",
            Scenario::FigA2 => "figA2",
            Scenario::FigA3 => "figA3",
            Scenario::FigA4 => "figA4",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown {
                kind: "scenario",
                name: s.to_string(),
            })
    }
}

pub const FIG1_ITERS: usize = 10_000;
pub const FIG2_ITERS: usize = 100_000;
pub const FIGA_ITERS: usize = 10_000;
/// Seeds of the stochastic scenario.
pub const FIG2_SEEDS: [u64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

/// One member run of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioMember {
    /// File stem, e.g. `fig1_adam` or `fig2_amsgrad_seed3`.
    pub label: String,
    pub spec: ExperimentSpec,
}

fn member(scenario: Scenario, spec: ExperimentSpec, seeded: bool) -> ScenarioMember {
    let mut label = format!("{}_{}", scenario, spec.optimizer.variant);
    if seeded {
        label.push_str(&format!("_seed{}", spec.seed));
    }
    ScenarioMember { label, spec }
}

fn experiment(
    problem: ProblemSpec,
    optimizer: OptimizerSpec,
    iters: usize,
    x1: f64,
    seed: u64,
) -> ExperimentSpec {
    ExperimentSpec {
        seed,
        x1: Some(vec![x1]),
        ..ExperimentSpec::new(problem, optimizer, iters)
    }
}

/// `beta1 = 0`, `eps = 0`, `beta2` only where the variant uses it.
fn optimizer(variant: Variant, alpha: StepSchedule<f64>, beta2: f64) -> OptimizerSpec {
    let spec = OptimizerSpec::new(variant, alpha);
    if variant.uses_beta2() {
        spec.with_beta2(beta2)
    } else {
        spec
    }
}

/// Fixed starting point and settings per scenario, recorded in the certification file.
pub fn describe(scenario: Scenario) -> &'static str {
    match scenario {
        Scenario::Fig1 => "piecewise_quadratic b=10, x1=5, alpha=0.01, beta1=0, beta2=0.9, eps=0, T=10000",
        Scenario::Fig2 => "term_b_counterexample, x1=0.5, alpha=1, beta1=0, beta2=0.1, eps=0, T=100000, seeds 1..10",
        Scenario::FigA1 => "quadratic_100, x1=5, alpha=0.1, beta1=0, beta2=0.9, eps=0, T=10000",
        Scenario::FigA2 => "quadratic_100, x1=5, alpha=0.01, beta1=0, beta2=0.9, eps=0, T=10000",
        Scenario::FigA3 => "quadratic_100, x1=5, alpha=0.001, beta1=0, beta2=0.9, eps=0, T=10000",
        Scenario::FigA4 => "quadratic_100, x1=5, alpha=0.1/sqrt(t), beta1=0, beta2=0.9, eps=0, T=10000",
    }
}

/// The member runs of a scenario, in output order.
pub fn members(scenario: Scenario) -> Vec<ScenarioMember> {
    let trio = [Variant::Sgd, Variant::Adam, Variant::AmsGrad];
    let quadratic = |alpha: StepSchedule<f64>| {
        trio.iter()
            .map(|&v| {
                let spec = experiment(
                    ProblemSpec::named("quadratic_100"),
                    optimizer(v, alpha.clone(), 0.9),
                    FIGA_ITERS,
                    5.0,
                    0,
                );
                member(scenario, spec, false)
            })
            .collect()
    };
    match scenario {
        Scenario::Fig1 => trio
            .iter()
            .map(|&v| {
                let spec = experiment(
                    ProblemSpec::named("piecewise_quadratic"),
                    optimizer(v, StepSchedule::constant(0.01), 0.9),
                    FIG1_ITERS,
                    5.0,
                    0,
                );
                member(scenario, spec, false)
            })
            .collect(),
        Scenario::Fig2 => [Variant::Adam, Variant::AmsGrad]
            .iter()
            .flat_map(|&v| {
                FIG2_SEEDS.iter().map(move |&seed| {
                    let spec = experiment(
                        ProblemSpec::named("term_b_counterexample"),
                        optimizer(v, StepSchedule::constant(1.0), 0.1),
                        FIG2_ITERS,
                        0.5,
                        seed,
                    );
                    member(scenario, spec, true)
                })
            })
            .collect(),
        Scenario::FigA1 => quadratic(StepSchedule::constant(0.1)),
        Scenario::FigA2 => quadratic(StepSchedule::constant(0.01)),
        Scenario::FigA3 => quadratic(StepSchedule::constant(0.001)),
        Scenario::FigA4 => quadratic(StepSchedule::inverse_sqrt(0.1)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberResult {
    pub label: String,
    pub summary: RunSummary,
}

/// Combined verdicts of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub scenario: Scenario,
    pub settings: String,
    pub runs: Vec<MemberResult>,
    /// Most frequent verdict per variant (`suspect` on a tie).
    pub aggregate: BTreeMap<String, Verdict>,
}

impl Certification {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certification serializes")
    }

    pub fn verdict(&self, variant: Variant) -> Option<Verdict> {
        self.aggregate.get(variant.name()).copied()
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub scenario: Scenario,
    pub members: Vec<(ScenarioMember, RunOutcome)>,
    pub certification: Certification,
}

fn majority(verdicts: &[Verdict]) -> Verdict {
    let count = |v: Verdict| verdicts.iter().filter(|&&x| x == v).count();
    let mut ranked =
        [Verdict::Converging, Verdict::Suspect, Verdict::Diverging].map(|v| (count(v), v));
    ranked.sort_by_key(|r| std::cmp::Reverse(r.0));
    if ranked[0].0 == ranked[1].0 {
        Verdict::Suspect
    } else {
        ranked[0].1
    }
}

/// Runs every member of the scenario, in parallel, and certifies the results.
pub fn run_scenario(scenario: Scenario) -> Result<ScenarioOutcome> {
    let outcomes = members(scenario)
        .into_par_iter()
        .map(|m| run(&m.spec).map(|o| (m, o)))
        .collect::<Result<Vec<_>>>()?;
    let runs: Vec<MemberResult> = outcomes
        .iter()
        .map(|(m, o)| MemberResult {
            label: m.label.clone(),
            summary: o.summary(),
        })
        .collect();
    let mut by_variant: BTreeMap<String, Vec<Verdict>> = BTreeMap::new();
    for (m, o) in &outcomes {
        by_variant
            .entry(m.spec.optimizer.variant.name().to_string())
            .or_default()
            .push(o.verdict);
    }
    let aggregate = by_variant
        .into_iter()
        .map(|(k, vs)| (k, majority(&vs)))
        .collect();
    Ok(ScenarioOutcome {
        scenario,
        members: outcomes,
        certification: Certification {
            scenario,
            settings: describe(scenario).to_string(),
            runs,
            aggregate,
        },
    })
}

impl ScenarioOutcome {
    /// Writes one CSV per member and `<scenario>_certification.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut paths = Vec::with_capacity(self.members.len() + 1);
        for (m, o) in &self.members {
            let path = dir.join(format!("{}.csv", m.label));
            write_file(&path, &o.to_csv())?;
            paths.push(path);
        }
        let path = dir.join(format!("{}_certification.json", self.scenario));
        write_file(&path, &self.certification.to_json())?;
        paths.push(path);
        Ok(paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(sc.name().parse::<Scenario>().unwrap(), sc);
            let json = serde_json::to_string(&sc).unwrap();
            assert_eq!(json, format!("\"{}\"", sc.name()));
        }
        assert!("fig3".parse::<Scenario>().is_err());
    }

    #[test]
    fn member_counts() {
        assert_eq!(members(Scenario::Fig1).len(), 3);
        assert_eq!(members(Scenario::Fig2).len(), 20);
        assert_eq!(members(Scenario::FigA4).len(), 3);
    }

    #[test]
    fn majority_vote() {
        use Verdict::*;
        assert_eq!(majority(&[Diverging, Diverging, Converging]), Diverging);
        assert_eq!(majority(&[Diverging, Converging]), Suspect);
    }
}
