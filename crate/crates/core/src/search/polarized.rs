use std::ops::ControlFlow;

use crate::numerics::{check_apart, FiniteSet};
use crate::principles::Coloring;
use crate::search::engine::Candidates;

/// What every selection of a polarized solution must satisfy.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Selection<'a> {
    /// `c` constant on increasing selections.
    Tuples(&'a Coloring),
    /// `f` constant on the sums of (increasing) selections; the union is
    /// `apart`-apart when a base is given.
    Sums {
        f: &'a Coloring,
        increasing: bool,
        apart: Option<u32>,
    },
}

pub(crate) struct PolarRaw {
    pub sets: Option<Vec<FiniteSet>>,
    pub color: Option<u32>,
    pub cap_hit: bool,
    pub nodes: u64,
    pub prunes: u64,
}

struct State<'a> {
    sel: Selection<'a>,
    carriers: &'a [Candidates],
    size: usize,
    cap: u64,
    nodes: u64,
    prunes: u64,
    sets: Vec<Vec<u64>>,
}

enum Flow {
    Found(Option<u32>),
    Exhausted,
    CapHit,
}

impl State<'_> {
    fn union_apart(&self, x: u64) -> bool {
        let Selection::Sums { apart: Some(t), .. } = self.sel else {
            return true;
        };
        let mut union: Vec<u64> = self.sets.iter().flatten().copied().chain([x]).collect();
        union.sort_unstable();
        if union.windows(2).any(|w| w[0] == w[1]) || union.first() == Some(&0) {
            return false;
        }
        matches!(check_apart(&union, t), Ok(a) if a.is_apart())
    }

    /// Color of the selections that use `x` in the last coordinate.
    fn check_last(&self, x: u64, color: Option<u32>) -> Option<Option<u32>> {
        let n = self.sets.len();
        let earlier: Vec<FiniteSet> = self.sets[..n - 1]
            .iter()
            .map(|s| FiniteSet::from_sorted_unchecked(s.clone()))
            .collect();
        let increasing = match self.sel {
            Selection::Tuples(_) => true,
            Selection::Sums { increasing, .. } => increasing,
        };
        let mut color = color;
        let mut buf = Vec::with_capacity(n);
        let clash = crate::principles::visit_selections(&earlier, increasing, |sel| {
            if increasing && sel.last().is_some_and(|&l| l >= x) {
                return ControlFlow::Continue(());
            }
            buf.clear();
            buf.extend_from_slice(sel);
            buf.push(x);
            let c = match self.sel {
                Selection::Tuples(c) => c.color(&buf).ok(),
                Selection::Sums { f, .. } => buf
                    .iter()
                    .try_fold(0u64, |a, &v| a.checked_add(v))
                    .and_then(|s| f.color_nat(s).ok()),
            };
            match (c, color) {
                (None, _) => ControlFlow::Break(()),
                (Some(c), Some(k)) if c != k => ControlFlow::Break(()),
                (Some(c), _) => {
                    color = Some(c);
                    ControlFlow::Continue(())
                }
            }
        });
        clash.is_none().then_some(color)
    }

    fn level(&mut self, color: Option<u32>) -> Flow {
        let n = self.sets.len();
        let Some(j) = self.sets.iter().position(|s| s.len() < self.size) else {
            // Vacuous solutions are rejected.
            return if color.is_some() {
                Flow::Found(color)
            } else {
                Flow::Exhausted
            };
        };
        let carriers = self.carriers;
        for x in carriers[j].after(self.sets[j].last().copied()) {
            if self.nodes >= self.cap {
                return Flow::CapHit;
            }
            self.nodes += 1;
            if !self.union_apart(x) {
                self.prunes += 1;
                continue;
            }
            let next = if j == n - 1 {
                self.check_last(x, color)
            } else {
                Some(color)
            };
            let Some(next) = next else {
                self.prunes += 1;
                continue;
            };
            self.sets[j].push(x);
            match self.level(next) {
                Flow::Exhausted => {
                    self.sets[j].pop();
                }
                other => return other,
            }
        }
        Flow::Exhausted
    }
}

/// Lexicographic-least `(H_1, …, H_n)` with `H_i` drawn from `carriers[i]`
/// and `|H_i| = size`, ordered by the concatenation `H_1 H_2 …`.
pub(crate) fn polarized_dfs(
    sel: Selection<'_>,
    carriers: &[Candidates],
    size: usize,
    cap: u64,
) -> PolarRaw {
    let mut st = State {
        sel,
        carriers,
        size,
        cap,
        nodes: 0,
        prunes: 0,
        sets: vec![Vec::new(); carriers.len()],
    };
    let flow = if carriers.is_empty() || size == 0 {
        Flow::Exhausted
    } else {
        st.level(None)
    };
    let (sets, color, cap_hit) = match flow {
        Flow::Found(c) => (
            Some(
                st.sets
                    .iter()
                    .map(|s| FiniteSet::from_sorted_unchecked(s.clone()))
                    .collect(),
            ),
            c,
            false,
        ),
        Flow::Exhausted => (None, None, false),
        Flow::CapHit => (None, None, true),
    };
    PolarRaw {
        sets,
        color,
        cap_hit,
        nodes: if cap_hit { cap } else { st.nodes },
        prunes: st.prunes,
    }
}
