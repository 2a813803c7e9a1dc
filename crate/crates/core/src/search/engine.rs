use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{mu, next_combination, FiniteSet, LengthSpec};
use crate::principles::Coloring;

/// Where the members of a solution are drawn from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidates {
    /// Positive integers with greatest base-`base` exponent at most
    /// `max_exponent`; each member starts above the previous member's
    /// greatest exponent.
    Apart { base: u32, max_exponent: u32 },
    /// Every integer in `start..=end`.
    Range { start: u64, end: u64 },
    /// The elements of a fixed ground set.
    Ground(Vec<u64>),
}

impl Candidates {
    /// Candidates for the next member after `prev`, increasing.
    pub fn after(&self, prev: Option<u64>) -> CandidateIter<'_> {
        match self {
            Candidates::Apart { base, max_exponent } => {
                let t = u64::from(*base);
                let end = t.checked_pow(max_exponent + 1).unwrap_or(u64::MAX);
                let step = match prev {
                    None => Some(1),
                    Some(p) => t.checked_pow(mu(p, *base) + 1),
                };
                match step {
                    Some(step) if step < end => CandidateIter::Step {
                        next: Some(step),
                        step,
                        end,
                    },
                    _ => CandidateIter::Step {
                        next: None,
                        step: 1,
                        end: 0,
                    },
                }
            }
            Candidates::Range { start, end } => {
                let first = match prev {
                    None => Some(*start),
                    Some(p) => p.checked_add(1).map(|v| v.max(*start)),
                };
                let first = first.filter(|v| v <= end);
                match end.checked_add(1) {
                    Some(e) => CandidateIter::Step {
                        next: first,
                        step: 1,
                        end: e,
                    },
                    None => CandidateIter::Inclusive { next: first },
                }
            }
            Candidates::Ground(g) => {
                let from = match prev {
                    None => 0,
                    Some(p) => g.partition_point(|&v| v <= p),
                };
                CandidateIter::Slice(g[from..].iter())
            }
        }
    }

    /// Upper bound on how many further members can follow `x`. Never
    /// increases as `x` grows.
    pub fn room_after(&self, x: u64) -> u64 {
        match self {
            Candidates::Apart { base, max_exponent } => {
                u64::from(max_exponent.saturating_sub(mu(x, *base)))
            }
            Candidates::Range { end, .. } => end.saturating_sub(x),
            Candidates::Ground(g) => (g.len() - g.partition_point(|&v| v <= x)) as u64,
        }
    }
}

pub enum CandidateIter<'a> {
    Step {
        next: Option<u64>,
        step: u64,
        end: u64,
    },
    Inclusive {
        next: Option<u64>,
    },
    Slice(std::slice::Iter<'a, u64>),
}

impl Iterator for CandidateIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        match self {
            CandidateIter::Step { next, step, end } => {
                let v = next.filter(|v| v < end)?;
                *next = v.checked_add(*step);
                Some(v)
            }
            CandidateIter::Inclusive { next } => {
                let v = (*next)?;
                *next = v.checked_add(1);
                Some(v)
            }
            CandidateIter::Slice(it) => it.next().copied(),
        }
    }
}

/// What a homogeneous set must satisfy.
#[derive(Debug, Clone, Copy)]
pub enum Objective<'a> {
    /// `f` constant on the admissible sums, each at most `cap`.
    Sums {
        f: &'a Coloring,
        spec: &'a LengthSpec,
        cap: Option<u64>,
    },
    /// `c` constant on increasing `n`-tuples.
    Tuples { c: &'a Coloring, n: usize },
    /// `c` constant on exactly large subsets.
    LargeSets { c: &'a Coloring },
}

pub(crate) enum Extend {
    Keep(Option<u32>),
    Prune,
    /// Prune this candidate and every larger one at the same level.
    StopLevel,
}

fn eval(c: &Coloring, args: &[u64]) -> Option<u32> {
    match c.color(args) {
        Ok(v) => Some(v),
        Err(e @ Error::Overflow(_)) => {
            log::warn!("pruning branch: {e}");
            None
        }
        Err(e) => {
            log::debug!("pruning branch: {e}");
            None
        }
    }
}

/// Visits every `r`-subset of `0..n` as index lists.
fn for_each_combination(n: usize, r: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    if r > n {
        return true;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        if !visit(&idx) {
            return false;
        }
        if r == 0 || !next_combination(&mut idx, n) {
            return true;
        }
    }
}

impl Objective<'_> {
    /// Checks every new object formed by appending `x` to `chosen`.
    pub(crate) fn extend(&self, chosen: &[u64], x: u64, color: Option<u32>) -> Extend {
        let mut color = color;
        let mut agree = |c: Option<u32>| match (c, color) {
            (None, _) => false,
            (Some(c), None) => {
                color = Some(c);
                true
            }
            (Some(c), Some(k)) => c == k,
        };
        let ok = match *self {
            Objective::Sums { f, spec, cap } => {
                if cap.is_some_and(|cap| x > cap) {
                    return Extend::StopLevel;
                }
                let sum_ok = |idx: &[usize], agree: &mut dyn FnMut(Option<u32>) -> bool| {
                    let s = idx.iter().try_fold(x, |a, &i| a.checked_add(chosen[i]));
                    match s {
                        None => {
                            log::warn!("pruning branch: 64-bit overflow in a sum with {x}");
                            false
                        }
                        Some(s) if cap.is_some_and(|cap| s > cap) => false,
                        Some(s) => agree(eval(f, &[s])),
                    }
                };
                match spec {
                    LengthSpec::ExactlyLarge => {
                        large_subsets(chosen, x, |idx| sum_ok(idx, &mut agree))
                    }
                    _ => spec.fixed_lengths().into_iter().all(|len| {
                        len <= chosen.len() + 1
                            && for_each_combination(chosen.len(), len - 1, |idx| {
                                sum_ok(idx, &mut agree)
                            })
                            || len > chosen.len() + 1
                    }),
                }
            }
            Objective::Tuples { c, n } => {
                let mut buf = Vec::with_capacity(n);
                n == 0
                    || for_each_combination(chosen.len(), n - 1, |idx| {
                        buf.clear();
                        buf.extend(idx.iter().map(|&i| chosen[i]));
                        buf.push(x);
                        agree(eval(c, &buf))
                    })
            }
            Objective::LargeSets { c } => {
                let mut buf = Vec::new();
                large_subsets(chosen, x, |idx| {
                    buf.clear();
                    buf.extend(idx.iter().map(|&i| chosen[i]));
                    buf.push(x);
                    agree(eval(c, &buf))
                })
            }
        };
        if ok {
            Extend::Keep(color)
        } else {
            Extend::Prune
        }
    }
}

/// Visits the index sets `I` such that `{chosen[i] : i ∈ I} ∪ {x}` is exactly
/// large and contains `x`.
fn large_subsets(chosen: &[u64], x: u64, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    if x == 0 {
        return visit(&[]);
    }
    let m = chosen.len();
    for (i, &h) in chosen.iter().enumerate() {
        // |S| = h + 1: h itself, x, and h - 1 members strictly between.
        let between = m - i - 1;
        if h == 0 || h - 1 > between as u64 {
            continue;
        }
        let r = (h - 1) as usize;
        let mut full = Vec::with_capacity(r + 1);
        let cont = for_each_combination(between, r, |idx| {
            full.clear();
            full.push(i);
            full.extend(idx.iter().map(|&j| j + i + 1));
            visit(&full)
        });
        if !cont {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RawStatus {
    Found,
    Exhausted,
    CapHit,
    Cancelled,
    StopLevel,
}

#[derive(Debug, Clone)]
pub(crate) struct Raw {
    pub status: RawStatus,
    pub members: Vec<u64>,
    pub color: Option<u32>,
    pub nodes: u64,
    pub prunes: u64,
    pub depth: usize,
}

struct Dfs<'a> {
    obj: Objective<'a>,
    cands: &'a Candidates,
    target: usize,
    cap: u64,
    nodes: u64,
    prunes: u64,
    depth: usize,
    chosen: Vec<u64>,
    cancel: Option<(&'a AtomicUsize, usize)>,
}

impl Dfs<'_> {
    fn cancelled(&self) -> bool {
        self.cancel
            .is_some_and(|(best, me)| best.load(Ordering::Relaxed) < me)
    }

    /// Tries one candidate as the next member; recurses on success.
    fn step(&mut self, x: u64, color: Option<u32>) -> Option<(RawStatus, Option<u32>)> {
        let needed = (self.target - self.chosen.len() - 1) as u64;
        if self.cands.room_after(x) < needed {
            return Some((RawStatus::StopLevel, None));
        }
        self.nodes += 1;
        match self.obj.extend(&self.chosen, x, color) {
            Extend::Prune => {
                self.prunes += 1;
                None
            }
            Extend::StopLevel => {
                self.prunes += 1;
                Some((RawStatus::StopLevel, None))
            }
            Extend::Keep(c) => {
                self.chosen.push(x);
                self.depth = self.depth.max(self.chosen.len());
                if self.chosen.len() == self.target {
                    return Some((RawStatus::Found, c));
                }
                let r = self.level(c);
                if r.0 != RawStatus::Exhausted {
                    return Some(r);
                }
                self.chosen.pop();
                None
            }
        }
    }

    fn level(&mut self, color: Option<u32>) -> (RawStatus, Option<u32>) {
        let cands = self.cands;
        for x in cands.after(self.chosen.last().copied()) {
            if self.nodes >= self.cap {
                return (RawStatus::CapHit, None);
            }
            if self.cancelled() {
                return (RawStatus::Cancelled, None);
            }
            match self.step(x, color) {
                None => {}
                Some((RawStatus::StopLevel, _)) => break,
                Some(r) => return r,
            }
        }
        (RawStatus::Exhausted, None)
    }

    fn finish(self, status: RawStatus, color: Option<u32>) -> Raw {
        let found = status == RawStatus::Found;
        Raw {
            status,
            members: if found { self.chosen } else { Vec::new() },
            color: if found { color } else { None },
            nodes: if status == RawStatus::CapHit {
                self.cap
            } else {
                self.nodes
            },
            prunes: self.prunes,
            depth: self.depth,
        }
    }
}

fn new_dfs<'a>(
    obj: Objective<'a>,
    cands: &'a Candidates,
    target: usize,
    cap: u64,
    cancel: Option<(&'a AtomicUsize, usize)>,
) -> Dfs<'a> {
    Dfs {
        obj,
        cands,
        target,
        cap,
        nodes: 0,
        prunes: 0,
        depth: 0,
        chosen: Vec::new(),
        cancel,
    }
}

/// Sequential lexicographic-least search.
pub(crate) fn dfs(obj: Objective<'_>, cands: &Candidates, target: usize, cap: u64) -> Raw {
    let mut d = new_dfs(obj, cands, target, cap, None);
    if target == 0 {
        return d.finish(RawStatus::Found, None);
    }
    let (status, color) = d.level(None);
    d.finish(status, color)
}

/// The subtree below first member `x`, as the sequential search would
/// explore it with `cap` nodes left.
fn branch(
    obj: Objective<'_>,
    cands: &Candidates,
    target: usize,
    cap: u64,
    x: u64,
    best: &AtomicUsize,
    index: usize,
) -> Raw {
    let mut d = new_dfs(obj, cands, target, cap, Some((best, index)));
    if cap == 0 {
        return d.finish(RawStatus::CapHit, None);
    }
    let (status, color) = d.step(x, None).unwrap_or((RawStatus::Exhausted, None));
    if status == RawStatus::Found {
        best.fetch_min(index, Ordering::Relaxed);
    }
    d.finish(status, color)
}

/// Parallel search over first members. Branches run in batches with the
/// budget left at the start of the batch and are replayed in order with
/// cumulative node counts, so the outcome equals the sequential one.
pub(crate) fn dfs_parallel(
    obj: Objective<'_>,
    cands: &Candidates,
    target: usize,
    cap: u64,
    jobs: usize,
) -> Result<Raw> {
    if jobs <= 1 || target == 0 {
        return Ok(dfs(obj, cands, target, cap));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::domain(format!("cannot start {jobs} worker threads: {e}")))?;
    let mut first = cands.after(None);
    let (mut nodes, mut prunes, mut depth) = (0u64, 0u64, 0usize);
    let done = |status, nodes, prunes, depth| Raw {
        status,
        members: Vec::new(),
        color: None,
        nodes,
        prunes,
        depth,
    };
    loop {
        let xs: Vec<u64> = first.by_ref().take(jobs * 4).collect();
        if xs.is_empty() {
            return Ok(done(RawStatus::Exhausted, nodes, prunes, depth));
        }
        if nodes >= cap {
            return Ok(done(RawStatus::CapHit, cap, prunes, depth));
        }
        let remaining = cap - nodes;
        let best = AtomicUsize::new(usize::MAX);
        let results: Vec<Raw> = pool.install(|| {
            xs.par_iter()
                .enumerate()
                .map(|(i, &x)| branch(obj, cands, target, remaining, x, &best, i))
                .collect()
        });
        for (r, &x) in results.into_iter().zip(&xs) {
            debug_assert_ne!(r.status, RawStatus::Cancelled);
            if r.status == RawStatus::CapHit || nodes + r.nodes > cap {
                // Replay the truncated branch with the exact budget for its statistics.
                let exact = branch(
                    obj,
                    cands,
                    target,
                    cap - nodes,
                    x,
                    &AtomicUsize::new(usize::MAX),
                    0,
                );
                return Ok(done(
                    RawStatus::CapHit,
                    cap,
                    prunes + exact.prunes,
                    depth.max(exact.depth),
                ));
            }
            nodes += r.nodes;
            prunes += r.prunes;
            depth = depth.max(r.depth);
            match r.status {
                RawStatus::Found => {
                    return Ok(Raw {
                        nodes,
                        prunes,
                        depth,
                        ..r
                    })
                }
                RawStatus::StopLevel => {
                    return Ok(done(RawStatus::Exhausted, nodes, prunes, depth))
                }
                _ => {}
            }
            if nodes >= cap {
                // The sequential search would stop before the next candidate.
                return Ok(done(RawStatus::CapHit, cap, prunes, depth));
            }
        }
    }
}

/// Enumerates every candidate sequence of length `target` in lexicographic
/// order and returns the first one accepted by `accept`, checking only
/// complete sequences. At most `limit` sequences are examined.
pub(crate) fn unpruned(
    cands: &Candidates,
    target: usize,
    limit: u64,
    mut accept: impl FnMut(&FiniteSet) -> bool,
) -> Result<Option<FiniteSet>> {
    fn rec(
        cands: &Candidates,
        target: usize,
        buf: &mut Vec<u64>,
        seen: &mut u64,
        limit: u64,
        accept: &mut dyn FnMut(&FiniteSet) -> bool,
    ) -> Result<Option<FiniteSet>> {
        if buf.len() == target {
            *seen += 1;
            if *seen > limit {
                return Err(Error::Budget(format!("more than {limit} candidate sets")));
            }
            let set = FiniteSet::from_sorted_unchecked(buf.clone());
            return Ok(accept(&set).then_some(set));
        }
        for x in cands.after(buf.last().copied()) {
            buf.push(x);
            let r = rec(cands, target, buf, seen, limit, accept)?;
            buf.pop();
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }
    rec(
        cands,
        target,
        &mut Vec::with_capacity(target),
        &mut 0,
        limit,
        &mut accept,
    )
}
