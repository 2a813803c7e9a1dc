//! The reduction catalog, its test instances, and the certification driver.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::LengthSpec;
use crate::principles::{
    coloring_to_text, injection_catalog, verify, Arity, Coloring, DigitKind, Family, Rule,
    Solution, Stat, Status, Witness,
};
use crate::search::{solve, SearchBudget, SearchStatus, SolveConfig};

use super::ReductionStep;

/// Every reduction in the catalog with its default parameters.
pub fn catalog() -> Vec<ReductionStep> {
    let ids = [
        "fut-from-ht",
        "ht-from-fut",
        "apartness-base-convert",
        "color-doubling",
        "color-doubling-2",
        "ht-exact-from-rt",
        "ipt-from-ht-eq2",
        "divide-sum",
        "ipht-from-ipt",
        "ipt-from-ipht",
        "ipht-from-ht-large",
        "exists-pair-from-rt3",
        "ht-large-from-rt-large",
        "weaken",
        "ipt-to-ht-le2-4",
        "ipt-to-fut-le2",
    ];
    ids.iter()
        .map(|id| lookup(id).expect("catalog ids resolve"))
        .collect()
}

/// Resolves a catalog id (or the `fixture-corrupted` negative control).
pub fn lookup(id: &str) -> Result<ReductionStep> {
    let le2 = LengthSpec::AtMost(2);
    match id {
        "fut-from-ht" => ReductionStep::fut_from_ht(le2, 2, 2),
        "ht-from-fut" => ReductionStep::ht_from_fut(le2, 2, 2),
        "apartness-base-convert" => ReductionStep::apartness_base_convert(le2, 2, 3, 2),
        "color-doubling" => ReductionStep::color_doubling(2, 2),
        "color-doubling-2" => ReductionStep::color_doubling_two_apart(2, 2),
        "ht-exact-from-rt" => ReductionStep::ht_exact_from_rt(2, 2, 2),
        "ipt-from-ht-eq2" => Ok(ReductionStep::ipt_from_ht_eq2()),
        "divide-sum" => ReductionStep::divide_sum(2, 4, 2, Some(2)),
        "ipht-from-ipt" => ReductionStep::ipht_from_ipt(ReductionStep::default_carriers(24)),
        "ipt-from-ipht" => Ok(ReductionStep::ipt_from_ipht()),
        "ipht-from-ht-large" => Ok(ReductionStep::ipht_from_ht_large()),
        "exists-pair-from-rt3" => Ok(ReductionStep::exists_pair_from_rt3()),
        "ht-large-from-rt-large" => ReductionStep::ht_large_from_rt_large(2),
        "weaken" => ReductionStep::weaken(Family::HT, 2, 2, Some(2)),
        "ipt-to-ht-le2-4" => ReductionStep::ipt_to_ht_le2_4(),
        "ipt-to-fut-le2" => ReductionStep::ipt_to_fut_le2(),
        "fixture-corrupted" => Ok(ReductionStep::corrupted(ReductionStep::weaken(
            Family::HT,
            2,
            2,
            None,
        )?)),
        other => Err(Error::UnknownReduction(other.into())),
    }
}

/// Tab-separated `id source target anchor` rows with a header line.
pub fn catalog_tsv() -> String {
    let mut out = String::from("id\tsource\ttarget\tanchor\n");
    for s in catalog() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            s.id, s.source, s.target, s.anchor
        ));
    }
    out
}

/// All maps `0..len → 0..k`, in lexicographic order.
fn maps(len: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..k).map(move |c| {
                    let mut m = m.clone();
                    m.push(c);
                    m
                })
            })
            .collect();
    }
    out
}

/// Deterministic rule instances for `arity` with `k` colors, at most
/// `limit` of them. Nat instances mix residues, digit statistics, digit
/// weights and important-digit parities; tuple and set instances use
/// statistics of their arguments.
pub fn catalog_instances(arity: Arity, k: u32, limit: usize) -> Result<Vec<Coloring>> {
    if k == 0 {
        return Err(Error::domain("a coloring needs at least one color"));
    }
    let mut rules: Vec<Rule> = (0..k).map(Rule::Constant).collect();
    match arity {
        Arity::Nat => {
            if k == 2 {
                rules.extend(injection_catalog().into_iter().map(Rule::ImportantParity));
            }
            for len in 2..=4usize {
                for map in maps(len, k) {
                    rules.push(Rule::Mod {
                        modulus: len as u64,
                        map: map.clone(),
                    });
                    rules.push(Rule::Weight {
                        base: 2,
                        map: map.clone(),
                    });
                    for kind in [
                        DigitKind::Least,
                        DigitKind::Greatest,
                        DigitKind::Coefficient,
                    ] {
                        rules.push(Rule::Digit {
                            base: 3,
                            kind,
                            map: map.clone(),
                        });
                    }
                    rules.push(Rule::Digit {
                        base: 2,
                        kind: DigitKind::Least,
                        map,
                    });
                }
            }
        }
        Arity::Tuple(_) | Arity::Set => {
            for len in 2..=4usize {
                for map in maps(len, k) {
                    for stat in [Stat::Sum, Stat::Min, Stat::Max, Stat::Size, Stat::Span] {
                        rules.push(Rule::Stat {
                            stat,
                            map: map.clone(),
                        });
                    }
                }
            }
        }
    }
    let mut out: Vec<Coloring> = Vec::new();
    for rule in rules {
        if out.len() >= limit {
            break;
        }
        // Maps that use fewer than k colors still give valid k-colorings;
        // constant maps only duplicate the constants.
        if let Rule::Mod { map, .. }
        | Rule::Weight { map, .. }
        | Rule::Digit { map, .. }
        | Rule::Stat { map, .. } = &rule
        {
            if map.iter().all(|&c| c == map[0]) {
                continue;
            }
        }
        let c = Coloring::rule(arity, k, rule)?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifyConfig {
    pub budget: SearchBudget,
    /// Threads for the instance sweep; the searches themselves run sequentially.
    pub jobs: usize,
}

impl CertifyConfig {
    pub fn new(budget: SearchBudget) -> Self {
        CertifyConfig { budget, jobs: 1 }
    }
}

/// The first failing instance of a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub instance: String,
    pub target_solution: Option<Solution>,
    pub pulled_back: Option<Solution>,
    pub reason: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "counterexample: {}", self.reason)?;
        if let Some(s) = &self.target_solution {
            writeln!(f, "  target solution: {s}")?;
        }
        if let Some(s) = &self.pulled_back {
            writeln!(f, "  pulled back: {s}")?;
        }
        write!(f, "  instance:")?;
        for line in self.instance.lines() {
            write!(f, "\n    {line}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CertifyReport {
    pub id: String,
    pub instances: usize,
    /// Target searches that found a solution.
    pub found: usize,
    pub passed: usize,
    /// Found solutions too short for the backward map.
    pub short: usize,
    /// Pulled-back solutions that verify only vacuously.
    pub vacuous: usize,
    pub failures: usize,
    pub first_counterexample: Option<Counterexample>,
}

impl CertifyReport {
    pub fn is_pass(&self) -> bool {
        self.failures == 0
    }

    /// Nothing was actually certified.
    pub fn is_vacuous(&self) -> bool {
        self.passed == 0
    }
}

impl fmt::Display for CertifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "certify {}: instances={} found={} passed={} short={} vacuous={} failures={}",
            self.id,
            self.instances,
            self.found,
            self.passed,
            self.short,
            self.vacuous,
            self.failures
        )?;
        if self.is_vacuous() {
            write!(f, " (vacuous pass)")?;
        }
        if let Some(c) = &self.first_counterexample {
            write!(f, "\n{c}")?;
        }
        Ok(())
    }
}

enum Outcome {
    NotFound,
    Passed,
    Short,
    Vacuous,
    Failed(Counterexample),
}

fn run_one(step: &ReductionStep, inst: &Coloring, config: &SolveConfig) -> Outcome {
    let fail = |target_solution, pulled_back, reason: String| {
        Outcome::Failed(Counterexample {
            instance: coloring_to_text(inst),
            target_solution,
            pulled_back,
            reason,
        })
    };
    let image = match step.forward(inst) {
        Ok(c) => c,
        Err(e) => return fail(None, None, format!("forward failed: {e}")),
    };
    let outcome = match solve(&step.target, &image, config) {
        Ok(o) => o,
        Err(e) => return fail(None, None, format!("search failed: {e}")),
    };
    let Some(found) = outcome
        .solution
        .filter(|_| outcome.status == SearchStatus::Found)
    else {
        return Outcome::NotFound;
    };
    let back = match step.backward(&found, inst) {
        Ok(s) => s,
        Err(Error::TooShort(_) | Error::Interleave(_) | Error::Chunk(_)) => return Outcome::Short,
        Err(e) => return fail(Some(found), None, format!("backward failed: {e}")),
    };
    match verify(&step.source, inst, &back) {
        Ok(r) => match r.status {
            Status::Valid => Outcome::Passed,
            Status::Vacuous => Outcome::Vacuous,
            Status::Invalid => {
                let w = r
                    .witness
                    .as_ref()
                    .map_or_else(|| "no witness".to_string(), Witness::to_string);
                fail(
                    Some(found),
                    Some(back),
                    format!("pulled-back solution is invalid: {w}"),
                )
            }
        },
        Err(e) => fail(Some(found), Some(back), format!("verification failed: {e}")),
    }
}

/// Runs forward, search, backward and verification on every instance.
pub fn certify(
    step: &ReductionStep,
    instances: &[Coloring],
    config: &CertifyConfig,
) -> Result<CertifyReport> {
    let mut budget = config.budget;
    budget.target_size = budget.target_size.max(step.min_solution_size());
    budget.validate()?;
    let solve_config = SolveConfig {
        budget,
        jobs: 1,
        carriers: step.carriers(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        instances
            .par_iter()
            .map(|c| run_one(step, c, &solve_config))
            .collect()
    });
    let mut report = CertifyReport {
        id: step.id.clone(),
        instances: instances.len(),
        ..Default::default()
    };
    for o in outcomes {
        if !matches!(o, Outcome::NotFound) {
            report.found += 1;
        }
        match o {
            Outcome::NotFound => {}
            Outcome::Passed => report.passed += 1,
            Outcome::Short => report.short += 1,
            Outcome::Vacuous => report.vacuous += 1,
            Outcome::Failed(c) => {
                report.failures += 1;
                report.first_counterexample.get_or_insert(c);
            }
        }
    }
    Ok(report)
}
