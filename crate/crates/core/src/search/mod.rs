//! Deterministic brute-force witness search.
//!
//! Every engine returns the lexicographically least solution within its
//! candidate space, so sequential and parallel runs agree exactly.

mod engine;
mod enumerate;
mod polarized;

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{support_set, ApartSet, BlockSequence, FiniteSet, LengthSpec};
use crate::principles::{
    verify, verify_ht, verify_large_ramsey, verify_rt, Arity, Coloring, Family, PrincipleId, Rule,
    Solution, Status,
};

pub use engine::{CandidateIter, Candidates, Objective};
pub use enumerate::{canonical_count, enumerate_colorings, witness_number, RestrictedGrowth};

use engine::{Raw, RawStatus};
use polarized::{polarized_dfs, PolarRaw, Selection};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Highest exponent (in the candidate base) a member may use.
    pub max_exponent: u32,
    /// Cap on candidate extensions tried.
    pub max_nodes: u64,
    /// Requested number of members (per coordinate for polarized searches).
    pub target_size: usize,
    /// Optional bound on every admissible sum.
    pub sum_cap: Option<u64>,
}

impl SearchBudget {
    pub fn new(max_exponent: u32, max_nodes: u64, target_size: usize) -> Result<Self> {
        let b = SearchBudget {
            max_exponent,
            max_nodes,
            target_size,
            sum_cap: None,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_exponent == 0 || self.max_exponent > 62 {
            return Err(Error::domain("max exponent must lie in 1..=62"));
        }
        if self.max_nodes == 0 || self.target_size == 0 {
            return Err(Error::domain("node cap and target size must be positive"));
        }
        Ok(())
    }

    /// Largest value with greatest base-2 exponent at most `max_exponent`.
    fn value_bound(&self) -> u64 {
        u64::MAX >> (63 - self.max_exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Found,
    Exhausted,
    CapHit,
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStatus::Found => "found",
            SearchStatus::Exhausted => "exhausted",
            SearchStatus::CapHit => "cap-hit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub solution: Option<Solution>,
    pub nodes: u64,
    pub prunes: u64,
    pub depth: usize,
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        self.status == SearchStatus::Found
    }

    /// `stat key=value` records, one per line.
    pub fn stat_lines(&self) -> String {
        format!(
            "stat status={}\nstat nodes={}\nstat prunes={}\nstat depth={}\n",
            self.status, self.nodes, self.prunes, self.depth
        )
    }

    fn from_raw(raw: Raw, build: impl FnOnce(FiniteSet) -> Result<Solution>) -> Result<Self> {
        let status = match raw.status {
            RawStatus::Found => SearchStatus::Found,
            RawStatus::CapHit => SearchStatus::CapHit,
            _ => SearchStatus::Exhausted,
        };
        let solution = match status {
            SearchStatus::Found => {
                let set = FiniteSet::from_sorted_unchecked(raw.members);
                Some(build(set)?.with_color(raw.color))
            }
            _ => None,
        };
        let out = SearchOutcome {
            status,
            solution,
            nodes: raw.nodes,
            prunes: raw.prunes,
            depth: raw.depth,
        };
        log::info!("{}", out.stat_lines().trim_end().replace('\n', " "));
        Ok(out)
    }

    fn from_polar(raw: PolarRaw) -> Self {
        let status = if raw.sets.is_some() {
            SearchStatus::Found
        } else if raw.cap_hit {
            SearchStatus::CapHit
        } else {
            SearchStatus::Exhausted
        };
        let depth = raw
            .sets
            .as_ref()
            .map_or(0, |s| s.iter().map(FiniteSet::len).sum());
        SearchOutcome {
            status,
            solution: raw
                .sets
                .map(|s| Solution::polarized(s).with_color(raw.color)),
            nodes: raw.nodes,
            prunes: raw.prunes,
            depth,
        }
    }
}

fn expect_arity(c: &Coloring, arity: Arity) -> Result<()> {
    if c.arity() != arity {
        return Err(Error::domain(format!(
            "expected a {arity} coloring, got {}",
            c.arity()
        )));
    }
    Ok(())
}

/// Asserts the engine's soundness contract on a found solution.
fn assert_sound(outcome: &SearchOutcome, check: impl FnOnce(&Solution) -> Result<Status>) {
    if let Some(s) = &outcome.solution {
        let status = check(s).unwrap_or(Status::Invalid);
        assert_ne!(
            status,
            Status::Invalid,
            "search returned an invalid solution {s}"
        );
    }
}

fn set_solution(set: FiniteSet, apart: Option<u32>) -> Result<Solution> {
    Ok(match apart {
        Some(t) => Solution::apart(ApartSet::new(set, t)?),
        None => Solution::plain(set),
    })
}

fn candidates(apart: Option<u32>, budget: &SearchBudget, start: u64) -> Candidates {
    match apart {
        Some(t) => Candidates::Apart {
            base: t,
            max_exponent: budget.max_exponent,
        },
        None => Candidates::Range {
            start,
            end: budget.value_bound(),
        },
    }
}

/// Least set (apart when `apart` is given) whose admissible sums are
/// monochromatic for `f`.
pub fn search_sums(
    f: &Coloring,
    spec: &LengthSpec,
    apart: Option<u32>,
    budget: &SearchBudget,
    jobs: usize,
) -> Result<SearchOutcome> {
    expect_arity(f, Arity::Nat)?;
    spec.validate()?;
    budget.validate()?;
    let cands = candidates(apart, budget, 1);
    let obj = Objective::Sums {
        f,
        spec,
        cap: budget.sum_cap,
    };
    let raw = engine::dfs_parallel(obj, &cands, budget.target_size, budget.max_nodes, jobs)?;
    let out = SearchOutcome::from_raw(raw, |s| set_solution(s, apart))?;
    assert_sound(&out, |s| {
        Ok(verify_ht(f, spec, s.shape.as_set().expect("set shape"), apart)?.status)
    });
    Ok(out)
}

/// HT^{spec} with `t`-apartness, sequentially.
pub fn search_apart_homogeneous(
    f: &Coloring,
    spec: &LengthSpec,
    t: u32,
    budget: &SearchBudget,
) -> Result<SearchOutcome> {
    search_sums(f, spec, Some(t), budget, 1)
}

/// Least subset of `ground` of `target` elements on which the tuple
/// coloring `c` is constant.
pub fn search_tuple_homogeneous(
    c: &Coloring,
    n: u32,
    ground: &FiniteSet,
    target: usize,
    max_nodes: u64,
) -> Result<SearchOutcome> {
    expect_arity(c, Arity::Tuple(n))?;
    let cands = Candidates::Ground(ground.as_slice().to_vec());
    search_tuples_in(c, n, &cands, target, max_nodes, 1, None)
}

fn search_tuples_in(
    c: &Coloring,
    n: u32,
    cands: &Candidates,
    target: usize,
    max_nodes: u64,
    jobs: usize,
    apart: Option<u32>,
) -> Result<SearchOutcome> {
    if target < n as usize {
        return Err(Error::domain(format!(
            "target size {target} is below the dimension {n}"
        )));
    }
    let obj = Objective::Tuples { c, n: n as usize };
    let raw = engine::dfs_parallel(obj, cands, target, max_nodes, jobs)?;
    let out = SearchOutcome::from_raw(raw, |s| set_solution(s, apart))?;
    assert_sound(&out, |s| {
        Ok(verify_rt(c, n, s.shape.as_set().expect("set shape"))?.status)
    });
    Ok(out)
}

/// Least set on whose exactly large subsets the set coloring `c` is constant.
pub fn search_large_homogeneous(
    c: &Coloring,
    cands: &Candidates,
    target: usize,
    max_nodes: u64,
    jobs: usize,
    apart: Option<u32>,
) -> Result<SearchOutcome> {
    expect_arity(c, Arity::Set)?;
    let raw = engine::dfs_parallel(Objective::LargeSets { c }, cands, target, max_nodes, jobs)?;
    let out = SearchOutcome::from_raw(raw, |s| set_solution(s, apart))?;
    assert_sound(&out, |s| {
        Ok(verify_large_ramsey(c, s.shape.as_set().expect("set shape"))?.status)
    });
    Ok(out)
}

/// Least `(H_1, …, H_n)`, `H_i ⊆ carriers[i]`, `|H_i| = size`, with every
/// increasing selection colored alike. Vacuous configurations are rejected.
pub fn search_increasing_polarized(
    c: &Coloring,
    n: u32,
    carriers: &[FiniteSet],
    size: usize,
    max_nodes: u64,
) -> Result<SearchOutcome> {
    let cands: Vec<Candidates> = carriers
        .iter()
        .map(|s| Candidates::Ground(s.as_slice().to_vec()))
        .collect();
    search_polarized_in(c, n, &cands, size, max_nodes, None)
}

/// Polarized search over arbitrary candidate spaces. A `Nat` coloring is
/// checked on selection sums (`sums` gives increasing-only and the apartness
/// base); a tuple coloring on increasing selections.
pub fn search_polarized_in(
    c: &Coloring,
    n: u32,
    carriers: &[Candidates],
    size: usize,
    max_nodes: u64,
    sums: Option<(bool, Option<u32>)>,
) -> Result<SearchOutcome> {
    if carriers.len() != n as usize || n == 0 {
        return Err(Error::domain(format!(
            "need {n} carriers, got {}",
            carriers.len()
        )));
    }
    let sel = match sums {
        None => {
            expect_arity(c, Arity::Tuple(n))?;
            Selection::Tuples(c)
        }
        Some((increasing, apart)) => {
            expect_arity(c, Arity::Nat)?;
            Selection::Sums {
                f: c,
                increasing,
                apart,
            }
        }
    };
    let out = SearchOutcome::from_polar(polarized_dfs(sel, carriers, size, max_nodes));
    assert_sound(&out, |s| {
        let crate::principles::Shape::Polarized(hs) = &s.shape else {
            unreachable!()
        };
        Ok(match sums {
            None => crate::principles::verify_ipt(c, n, hs)?.status,
            Some((inc, apart)) => {
                crate::principles::verify_polarized_ht(c, n, hs, inc, apart)?.status
            }
        })
    });
    Ok(out)
}

/// Reference search: enumerates complete candidate sets in lexicographic
/// order and checks each with the verifier, without any pruning.
pub fn search_unpruned(
    objective: Objective<'_>,
    cands: &Candidates,
    target: usize,
    apart: Option<u32>,
    limit: u64,
) -> Result<Option<FiniteSet>> {
    engine::unpruned(cands, target, limit, |set| {
        let report = match objective {
            Objective::Sums { f, spec, cap } => {
                if let Some(cap) = cap {
                    match crate::numerics::enumerate_sums(set, spec) {
                        Ok(sums) if sums.max().map_or(true, |m| m <= cap) => {}
                        _ => return false,
                    }
                }
                verify_ht(f, spec, set, apart)
            }
            Objective::Tuples { c, n } => verify_rt(c, n as u32, set),
            Objective::LargeSets { c } => verify_large_ramsey(c, set),
        };
        matches!(report, Ok(r) if r.status != Status::Invalid)
    })
}

/// Carriers `S_j = {2^{2ni + 2j + 1}}` for an `n`-fold polarized search
/// whose union must be 2-apart.
pub fn apart_carriers(n: u32, max_exponent: u32) -> Vec<FiniteSet> {
    (0..n)
        .map(|j| {
            FiniteSet::new(
                (0..)
                    .map(|i| 2 * n * i + 2 * j + 1)
                    .take_while(|&e| e <= max_exponent.min(63))
                    .map(|e| 1u64 << e),
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    pub budget: SearchBudget,
    pub jobs: usize,
    /// Carriers for the polarized families; defaults are used when absent.
    pub carriers: Option<Vec<FiniteSet>>,
}

impl SolveConfig {
    pub fn new(budget: SearchBudget) -> Self {
        SolveConfig {
            budget,
            jobs: 1,
            carriers: None,
        }
    }
}

/// Runs the search matching `principle` on the instance `coloring`.
pub fn solve(
    principle: &PrincipleId,
    coloring: &Coloring,
    config: &SolveConfig,
) -> Result<SearchOutcome> {
    let budget = &config.budget;
    budget.validate()?;
    let dimension = principle.dimension.unwrap_or(2);
    let out = match principle.family {
        Family::HT => {
            let spec = principle
                .length
                .as_ref()
                .ok_or_else(|| Error::domain("HT needs a length spec"))?;
            search_sums(coloring, spec, principle.apart, budget, config.jobs)?
        }
        Family::HTExists => {
            let mut nodes = 0;
            let mut prunes = 0;
            let mut cap_hit = false;
            let target = budget.target_size as u32;
            for b in 2..=target {
                for a in 1..b {
                    let spec = LengthSpec::ExplicitSet(vec![a, b]);
                    let left = SearchBudget {
                        max_nodes: budget.max_nodes - nodes,
                        ..*budget
                    };
                    let mut out =
                        search_sums(coloring, &spec, principle.apart, &left, config.jobs)?;
                    nodes += out.nodes;
                    prunes += out.prunes;
                    match out.status {
                        SearchStatus::Found => {
                            if let Some(s) = out.solution.as_mut() {
                                s.lengths = Some(vec![a, b]);
                            }
                            return Ok(SearchOutcome {
                                nodes,
                                prunes,
                                ..out
                            });
                        }
                        SearchStatus::CapHit => cap_hit = true,
                        SearchStatus::Exhausted => {}
                    }
                    if nodes >= budget.max_nodes {
                        cap_hit = true;
                        break;
                    }
                }
                if cap_hit {
                    break;
                }
            }
            let status = if cap_hit {
                SearchStatus::CapHit
            } else {
                SearchStatus::Exhausted
            };
            SearchOutcome {
                status,
                solution: None,
                nodes,
                prunes,
                depth: 0,
            }
        }
        Family::FUT => {
            let spec = principle
                .length
                .as_ref()
                .ok_or_else(|| Error::domain("FUT needs a length spec"))?;
            expect_arity(coloring, Arity::Set)?;
            let pulled = Coloring::rule(
                Arity::Nat,
                coloring.colors(),
                Rule::Support {
                    base: 2,
                    inner: Box::new(coloring.clone()),
                },
            )?;
            let out = search_sums(&pulled, spec, Some(2), budget, config.jobs)?;
            let solution = match out.solution {
                Some(s) => {
                    let set = s.shape.as_set().expect("set shape");
                    let blocks = set
                        .iter()
                        .map(|&h| support_set(h, 2))
                        .collect::<Result<Vec<_>>>()?;
                    Some(Solution::blocks(BlockSequence::new(blocks)?).with_color(s.claimed_color))
                }
                None => None,
            };
            SearchOutcome { solution, ..out }
        }
        Family::RT => {
            let cands = candidates(principle.apart, budget, 0);
            search_tuples_in(
                coloring,
                dimension,
                &cands,
                budget.target_size,
                budget.max_nodes,
                config.jobs,
                principle.apart,
            )?
        }
        Family::RTLarge => {
            let cands = candidates(principle.apart, budget, 0);
            search_large_homogeneous(
                coloring,
                &cands,
                budget.target_size,
                budget.max_nodes,
                config.jobs,
                principle.apart,
            )?
        }
        Family::IPT | Family::IPHT | Family::PHT => {
            let carriers: Vec<Candidates> =
                match (&config.carriers, principle.family, principle.apart) {
                    (Some(c), _, _) => c
                        .iter()
                        .map(|s| Candidates::Ground(s.as_slice().to_vec()))
                        .collect(),
                    (None, Family::IPT, _) => {
                        vec![
                            Candidates::Range {
                                start: 0,
                                end: budget.value_bound()
                            };
                            dimension as usize
                        ]
                    }
                    (None, _, Some(_)) => apart_carriers(dimension, budget.max_exponent)
                        .into_iter()
                        .map(|s| Candidates::Ground(s.into_vec()))
                        .collect(),
                    (None, _, None) => {
                        vec![
                            Candidates::Range {
                                start: 1,
                                end: budget.value_bound()
                            };
                            dimension as usize
                        ]
                    }
                };
            let sums = match principle.family {
                Family::IPT => None,
                Family::IPHT => Some((true, principle.apart)),
                _ => Some((false, principle.apart)),
            };
            search_polarized_in(
                coloring,
                dimension,
                &carriers,
                budget.target_size,
                budget.max_nodes,
                sums,
            )?
        }
    };
    if let Some(s) = &out.solution {
        debug_assert!(verify(principle, coloring, s)
            .map(|r| r.status != Status::Invalid)
            .unwrap_or(false));
    }
    Ok(out)
}
