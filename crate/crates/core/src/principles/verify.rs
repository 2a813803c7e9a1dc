use std::fmt;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::numerics::{
    check_apart, checked_sum, enumerate_unions, visit_subsets, Apartness, BlockSequence, FiniteSet,
    LengthSpec,
};
use crate::principles::{Arity, Coloring, Family, PrincipleId, Shape, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Valid,
    Invalid,
    /// Nothing was checked: no admissible sum, union, tuple or selection exists.
    Vacuous,
}

/// A colored object: its terms and, for sums, the value that was colored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Object {
    pub terms: Vec<u64>,
    pub sum: Option<u64>,
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.terms.iter().map(u64::to_string).collect();
        match self.sum {
            Some(s) => write!(f, "{}={s}", terms.join("+")),
            None => write!(f, "({})", terms.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Clash {
        first: Object,
        first_color: u32,
        second: Object,
        second_color: u32,
    },
    NotApart(u64, u64),
    ClaimMismatch {
        claimed: u32,
        actual: u32,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Clash {
                first,
                first_color,
                second,
                second_color,
            } => write!(
                f,
                "{first} has color {first_color} but {second} has color {second_color}"
            ),
            Witness::NotApart(x, y) => write!(f, "{x} and {y} are not apart"),
            Witness::ClaimMismatch { claimed, actual } => {
                write!(
                    f,
                    "claimed color {claimed} but the objects have color {actual}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub status: Status,
    pub color: Option<u32>,
    pub witness: Option<Witness>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.status == Status::Valid
    }

    fn invalid(witness: Witness) -> Self {
        VerificationReport {
            status: Status::Invalid,
            color: None,
            witness: Some(witness),
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.status, self.color, &self.witness) {
            (Status::Valid, Some(c), _) => write!(f, "valid color {c}"),
            (Status::Vacuous, _, _) => write!(f, "vacuous"),
            (_, _, Some(w)) => write!(f, "invalid: {w}"),
            _ => write!(f, "invalid"),
        }
    }
}

enum Stop {
    Clash(Witness),
    Fail(Error),
}

/// Remembers the first colored object and reports the first disagreement.
#[derive(Default)]
struct Tracker {
    first: Option<(Object, u32)>,
}

impl Tracker {
    fn observe(&mut self, obj: Object, color: Result<u32>) -> ControlFlow<Stop> {
        let color = match color {
            Ok(c) => c,
            Err(e) => return ControlFlow::Break(Stop::Fail(e)),
        };
        match &self.first {
            None => {
                self.first = Some((obj, color));
                ControlFlow::Continue(())
            }
            Some((_, c)) if *c == color => ControlFlow::Continue(()),
            Some((first, c)) => ControlFlow::Break(Stop::Clash(Witness::Clash {
                first: first.clone(),
                first_color: *c,
                second: obj,
                second_color: color,
            })),
        }
    }

    fn finish(self, stop: Option<Stop>) -> Result<VerificationReport> {
        match stop {
            Some(Stop::Fail(e)) => Err(e),
            Some(Stop::Clash(w)) => Ok(VerificationReport::invalid(w)),
            None => Ok(match self.first {
                Some((_, c)) => VerificationReport {
                    status: Status::Valid,
                    color: Some(c),
                    witness: None,
                },
                None => VerificationReport {
                    status: Status::Vacuous,
                    color: None,
                    witness: None,
                },
            }),
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

fn apart_witness(members: &[u64], base: Option<u32>) -> Result<Option<Witness>> {
    match base {
        Some(t) => Ok(match check_apart(members, t)? {
            Apartness::Apart => None,
            Apartness::Violation(x, y) => Some(Witness::NotApart(x, y)),
        }),
        None => Ok(None),
    }
}

/// `f` is constant on FS^{spec}(H), and `H` is `t`-apart when a base is given.
pub fn verify_ht(
    f: &Coloring,
    spec: &LengthSpec,
    h: &FiniteSet,
    apart: Option<u32>,
) -> Result<VerificationReport> {
    expect_arity(f, Arity::Nat)?;
    spec.validate()?;
    if h.min() == Some(0) {
        return Err(Error::domain(
            "Hindman solutions contain positive integers only",
        ));
    }
    if let Some(w) = apart_witness(h.as_slice(), apart)? {
        return Ok(VerificationReport::invalid(w));
    }
    let values = h.as_slice();
    let mut tracker = Tracker::default();
    let stop = visit_subsets(values, spec, |idx| match checked_sum(values, idx) {
        Ok(s) => {
            let terms = idx.iter().map(|&i| values[i]).collect();
            tracker.observe(
                Object {
                    terms,
                    sum: Some(s),
                },
                f.color_nat(s),
            )
        }
        Err(e) => ControlFlow::Break(Stop::Fail(e)),
    });
    tracker.finish(stop)
}

/// `c` is constant on the admissible unions of the block sequence.
pub fn verify_fut(
    c: &Coloring,
    spec: &LengthSpec,
    blocks: &BlockSequence,
) -> Result<VerificationReport> {
    expect_arity(c, Arity::Set)?;
    let mut tracker = Tracker::default();
    let mut stop = None;
    for u in enumerate_unions(blocks, spec)? {
        let color = c.color(u.as_slice());
        if let ControlFlow::Break(s) = tracker.observe(
            Object {
                terms: u.into_vec(),
                sum: None,
            },
            color,
        ) {
            stop = Some(s);
            break;
        }
    }
    tracker.finish(stop)
}

/// `c` is constant on all increasing `n`-tuples from `H`.
pub fn verify_rt(c: &Coloring, n: u32, h: &FiniteSet) -> Result<VerificationReport> {
    expect_arity(c, Arity::Tuple(n))?;
    if h.len() < n as usize {
        return Err(Error::domain(format!(
            "need at least {n} elements, got {}",
            h.len()
        )));
    }
    let values = h.as_slice();
    let mut tracker = Tracker::default();
    let stop = visit_subsets(values, &LengthSpec::Exactly(n), |idx| {
        let tuple: Vec<u64> = idx.iter().map(|&i| values[i]).collect();
        let color = c.color(&tuple);
        tracker.observe(
            Object {
                terms: tuple,
                sum: None,
            },
            color,
        )
    });
    tracker.finish(stop)
}

/// `c` is constant on all exactly large subsets of `H`.
pub fn verify_large_ramsey(c: &Coloring, h: &FiniteSet) -> Result<VerificationReport> {
    expect_arity(c, Arity::Set)?;
    let values = h.as_slice();
    let mut tracker = Tracker::default();
    let stop = visit_subsets(values, &LengthSpec::ExactlyLarge, |idx| {
        let set: Vec<u64> = idx.iter().map(|&i| values[i]).collect();
        let color = c.color(&set);
        tracker.observe(
            Object {
                terms: set,
                sum: None,
            },
            color,
        )
    });
    tracker.finish(stop)
}

/// Visits selections `(x_1, …, x_n)` with `x_i ∈ sets[i]`, strictly
/// increasing when `increasing` is set, in lexicographic order.
pub(crate) fn visit_selections<B>(
    sets: &[FiniteSet],
    increasing: bool,
    mut visit: impl FnMut(&[u64]) -> ControlFlow<B>,
) -> Option<B> {
    fn rec<B>(
        sets: &[FiniteSet],
        increasing: bool,
        buf: &mut Vec<u64>,
        visit: &mut impl FnMut(&[u64]) -> ControlFlow<B>,
    ) -> Option<B> {
        let i = buf.len();
        if i == sets.len() {
            return match visit(buf) {
                ControlFlow::Break(b) => Some(b),
                ControlFlow::Continue(()) => None,
            };
        }
        for &x in sets[i].iter() {
            if increasing && i > 0 && x <= buf[i - 1] {
                continue;
            }
            buf.push(x);
            let r = rec(sets, increasing, buf, visit);
            buf.pop();
            if r.is_some() {
                return r;
            }
        }
        None
    }
    rec(
        sets,
        increasing,
        &mut Vec::with_capacity(sets.len()),
        &mut visit,
    )
}

/// `c` is constant on every increasing selection `x_1 < … < x_n`,
/// `x_i ∈ H_i`. Reports `Vacuous` when no such selection exists.
pub fn verify_ipt(c: &Coloring, n: u32, hs: &[FiniteSet]) -> Result<VerificationReport> {
    expect_arity(c, Arity::Tuple(n))?;
    if hs.len() != n as usize {
        return Err(Error::domain(format!("need {n} sets, got {}", hs.len())));
    }
    if hs.iter().any(FiniteSet::is_empty) {
        return Err(Error::domain("polarized solutions need non-empty sets"));
    }
    let mut tracker = Tracker::default();
    let stop = visit_selections(hs, true, |sel| {
        tracker.observe(
            Object {
                terms: sel.to_vec(),
                sum: None,
            },
            c.color(sel),
        )
    });
    tracker.finish(stop)
}

/// `f` is constant on the sums of all (or all increasing) selections from
/// `H_1 × … × H_n`; with a base given, the union must also be apart.
pub fn verify_polarized_ht(
    f: &Coloring,
    n: u32,
    hs: &[FiniteSet],
    increasing: bool,
    apart: Option<u32>,
) -> Result<VerificationReport> {
    expect_arity(f, Arity::Nat)?;
    if hs.len() != n as usize {
        return Err(Error::domain(format!("need {n} sets, got {}", hs.len())));
    }
    if hs.iter().any(FiniteSet::is_empty) {
        return Err(Error::domain("polarized solutions need non-empty sets"));
    }
    if apart.is_some() {
        let mut union: Vec<u64> = hs.iter().flat_map(|h| h.iter().copied()).collect();
        union.sort_unstable();
        if let Some(w) = union.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::domain(format!(
                "{} occurs in more than one set",
                w[0]
            )));
        }
        if let Some(w) = apart_witness(&union, apart)? {
            return Ok(VerificationReport::invalid(w));
        }
    }
    let mut tracker = Tracker::default();
    let stop = visit_selections(hs, increasing, |sel| {
        match sel.iter().try_fold(0u64, |a, &x| a.checked_add(x)) {
            Some(s) => tracker.observe(
                Object {
                    terms: sel.to_vec(),
                    sum: Some(s),
                },
                f.color_nat(s),
            ),
            None => ControlFlow::Break(Stop::Fail(Error::overflow(format!("sum of {sel:?}")))),
        }
    });
    tracker.finish(stop)
}

fn shape_error(p: &PrincipleId, s: &Solution) -> Error {
    Error::Shape {
        principle: p.to_string(),
        found: s.shape.kind().to_string(),
    }
}

/// Checks `solution` against the instance `coloring` of `principle`.
pub fn verify(
    principle: &PrincipleId,
    coloring: &Coloring,
    solution: &Solution,
) -> Result<VerificationReport> {
    if coloring.colors() > principle.colors {
        return Err(Error::domain(format!(
            "instance uses {} colors but {principle} allows {}",
            coloring.colors(),
            principle.colors
        )));
    }
    let dimension = principle.dimension.unwrap_or(2);
    let report = match (principle.family, &solution.shape) {
        (Family::HT, shape) => {
            let set = shape
                .as_set()
                .ok_or_else(|| shape_error(principle, solution))?;
            let spec = principle
                .length
                .clone()
                .ok_or_else(|| Error::domain("HT needs a length spec"))?;
            verify_ht(coloring, &spec, set, principle.apart)?
        }
        (Family::HTExists, shape) => {
            let set = shape
                .as_set()
                .ok_or_else(|| shape_error(principle, solution))?;
            match solution.lengths.as_deref() {
                Some(&[a, b]) if 0 < a && a < b => verify_ht(
                    coloring,
                    &LengthSpec::ExplicitSet(vec![a, b]),
                    set,
                    principle.apart,
                )?,
                _ => return Err(Error::domain("an existential solution needs lengths a < b")),
            }
        }
        (Family::FUT, Shape::Blocks(b)) => {
            let spec = principle
                .length
                .clone()
                .ok_or_else(|| Error::domain("FUT needs a length spec"))?;
            verify_fut(coloring, &spec, b)?
        }
        (Family::RT, shape) => {
            let set = shape
                .as_set()
                .ok_or_else(|| shape_error(principle, solution))?;
            verify_rt(coloring, dimension, set)?
        }
        (Family::RTLarge, shape) => {
            let set = shape
                .as_set()
                .ok_or_else(|| shape_error(principle, solution))?;
            verify_large_ramsey(coloring, set)?
        }
        (Family::IPT, Shape::Polarized(hs)) => verify_ipt(coloring, dimension, hs)?,
        (Family::IPHT, Shape::Polarized(hs)) => {
            verify_polarized_ht(coloring, dimension, hs, true, principle.apart)?
        }
        (Family::PHT, Shape::Polarized(hs)) => {
            verify_polarized_ht(coloring, dimension, hs, false, principle.apart)?
        }
        _ => return Err(shape_error(principle, solution)),
    };
    match (solution.claimed_color, report.color) {
        (Some(claimed), Some(actual)) if claimed != actual => {
            Ok(VerificationReport::invalid(Witness::ClaimMismatch {
                claimed,
                actual,
            }))
        }
        _ => Ok(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::principles::{Rule, Stat};

    fn set(v: &[u64]) -> FiniteSet {
        FiniteSet::new(v.iter().copied())
    }

    fn mod_nat(m: u64) -> Coloring {
        Coloring::rule(
            Arity::Nat,
            m as u32,
            Rule::Mod {
                modulus: m,
                map: (0..m as u32).collect(),
            },
        )
        .unwrap()
    }

    fn pair_sum_mod2() -> Coloring {
        Coloring::rule(
            Arity::Tuple(2),
            2,
            Rule::Stat {
                stat: Stat::Sum,
                map: vec![0, 1],
            },
        )
        .unwrap()
    }

    #[test]
    fn ht_examples() {
        let zero = Coloring::constant(Arity::Nat, 1, 0).unwrap();
        let r = verify_ht(&zero, &LengthSpec::AtMost(2), &set(&[1, 4, 16]), None).unwrap();
        assert_eq!((r.status, r.color), (Status::Valid, Some(0)));

        let r = verify_ht(&mod_nat(2), &LengthSpec::Exactly(2), &set(&[1, 4]), None).unwrap();
        assert_eq!((r.status, r.color), (Status::Valid, Some(1)));

        let r = verify_ht(&mod_nat(2), &LengthSpec::AtMost(1), &set(&[1, 2, 4]), None).unwrap();
        assert_eq!(r.status, Status::Invalid);
        match r.witness.unwrap() {
            Witness::Clash {
                first,
                second,
                first_color,
                second_color,
            } => {
                assert_eq!((first.sum, second.sum), (Some(1), Some(2)));
                assert_eq!((first_color, second_color), (1, 0));
            }
            w => panic!("unexpected witness {w}"),
        }
    }

    #[test]
    fn ht_apartness_and_vacuity() {
        let zero = Coloring::constant(Arity::Nat, 1, 0).unwrap();
        let r = verify_ht(&zero, &LengthSpec::AtMost(2), &set(&[3, 6]), Some(2)).unwrap();
        assert_eq!(r.witness, Some(Witness::NotApart(3, 6)));
        let r = verify_ht(&zero, &LengthSpec::Exactly(3), &set(&[1, 2]), None).unwrap();
        assert_eq!(r.status, Status::Vacuous);
        let table = Coloring::table(Arity::Nat, 2, 1, 4, vec![0, 0, 0, 0], None).unwrap();
        assert!(matches!(
            verify_ht(&table, &LengthSpec::AtMost(2), &set(&[1, 4]), None),
            Err(Error::Window { .. })
        ));
    }

    #[test]
    fn fut_examples() {
        let size = Coloring::rule(
            Arity::Set,
            2,
            Rule::Stat {
                stat: Stat::Size,
                map: vec![0, 1],
            },
        )
        .unwrap();
        let b = BlockSequence::new(vec![set(&[1]), set(&[3])]).unwrap();
        let r = verify_fut(&size, &LengthSpec::Exactly(2), &b).unwrap();
        assert_eq!((r.status, r.color), (Status::Valid, Some(0)));

        let min = Coloring::rule(
            Arity::Set,
            2,
            Rule::Stat {
                stat: Stat::Min,
                map: vec![0, 1],
            },
        )
        .unwrap();
        let b = BlockSequence::new(vec![set(&[1]), set(&[2])]).unwrap();
        assert_eq!(
            verify_fut(&min, &LengthSpec::AtMost(2), &b).unwrap().status,
            Status::Invalid
        );

        let one = Coloring::constant(Arity::Set, 2, 1).unwrap();
        let b =
            BlockSequence::new(vec![set(&[0, 2]), set(&[5]), set(&[6, 9]), set(&[11])]).unwrap();
        let r = verify_fut(&one, &LengthSpec::AtMost(3), &b).unwrap();
        assert_eq!((r.status, r.color), (Status::Valid, Some(1)));
    }

    #[test]
    fn rt_examples() {
        let zero = Coloring::constant(Arity::Tuple(2), 2, 0).unwrap();
        assert!(verify_rt(&zero, 2, &set(&[1, 2, 3])).unwrap().is_valid());
        let r = verify_rt(&pair_sum_mod2(), 2, &set(&[1, 3, 5])).unwrap();
        assert_eq!((r.status, r.color), (Status::Valid, Some(0)));
        assert_eq!(
            verify_rt(&pair_sum_mod2(), 2, &set(&[1, 2, 3]))
                .unwrap()
                .status,
            Status::Invalid
        );
        assert!(verify_rt(&pair_sum_mod2(), 2, &set(&[1])).is_err());
    }

    #[test]
    fn ipt_examples() {
        // Increasing pairs (1,4),(1,8),(3,4),(3,8) have sums 5,9,7,11: all odd.
        let r = verify_ipt(&pair_sum_mod2(), 2, &[set(&[1, 3]), set(&[4, 8])]).unwrap();
        assert_eq!((r.status, r.color), (Status::Valid, Some(1)));
        let r = verify_ipt(&pair_sum_mod2(), 2, &[set(&[5]), set(&[3])]).unwrap();
        assert_eq!(r.status, Status::Vacuous);
        let zero = Coloring::constant(Arity::Tuple(2), 2, 0).unwrap();
        let r = verify_ipt(&zero, 2, &[set(&[0, 7]), set(&[2, 9])]).unwrap();
        assert_eq!(r.color, Some(0));
    }

    #[test]
    fn polarized_examples() {
        let r = verify_polarized_ht(&mod_nat(2), 2, &[set(&[2]), set(&[8])], true, None).unwrap();
        assert_eq!((r.status, r.color), (Status::Valid, Some(0)));
        let r =
            verify_polarized_ht(&mod_nat(3), 2, &[set(&[1, 2]), set(&[4])], true, None).unwrap();
        assert_eq!(r.status, Status::Invalid);
        let zero = Coloring::constant(Arity::Nat, 2, 0).unwrap();
        let r = verify_polarized_ht(&zero, 2, &[set(&[2]), set(&[8])], false, Some(2)).unwrap();
        assert!(r.is_valid());
        assert!(verify_polarized_ht(&zero, 2, &[set(&[2]), set(&[2])], false, Some(2)).is_err());
        let r = verify_polarized_ht(&zero, 2, &[set(&[2]), set(&[3])], false, Some(2)).unwrap();
        assert_eq!(r.witness, Some(Witness::NotApart(2, 3)));
    }

    #[test]
    fn dispatch_checks_shape_and_claim() {
        let p = PrincipleId::ht(LengthSpec::AtMost(2), 2, Some(2));
        let blocks = Solution::blocks(BlockSequence::new(vec![set(&[1])]).unwrap());
        assert!(matches!(
            verify(&p, &mod_nat(2), &blocks),
            Err(Error::Shape { .. })
        ));
        let s = Solution::plain(set(&[2, 8])).with_color(Some(1));
        let r = verify(&p, &mod_nat(2), &s).unwrap();
        assert_eq!(
            r.witness,
            Some(Witness::ClaimMismatch {
                claimed: 1,
                actual: 0
            })
        );
    }
}
