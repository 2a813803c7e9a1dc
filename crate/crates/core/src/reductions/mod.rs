//! Strong computable reductions as (instance-forward, solution-backward)
//! pairs, their certification, and the range decoders.

mod catalog;
mod decode;

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{
    encode_set, lam, mu, support_set, ApartSet, BlockSequence, FiniteSet, LengthSpec,
};
use crate::principles::{Arity, Coloring, Family, PrincipleId, Rule, Shape, Solution};

pub use catalog::{
    catalog, catalog_instances, catalog_tsv, certify, lookup, CertifyConfig, CertifyReport,
    Counterexample,
};
pub use decode::{important_parity_coloring, Decoded, RangeDecoder, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepKind {
    Identity,
    /// Set coloring `c` to `n ↦ c(exponents of n in base t)`.
    FutFromHt {
        base: u32,
    },
    /// Nat coloring `d` to `S ↦ d(Σ t^s)`.
    HtFromFut {
        base: u32,
    },
    /// `g = f` on least base-3 coefficient 1, `k + f` on 2; thins back to a 3-apart set.
    ColorDoubling,
    /// Tuple coloring `c(a_1, …, a_n) = f(a_1 + … + a_n)`.
    HtExactFromRt,
    /// `f(n) = c(λ(n), μ(n))`, 0 on powers of 2; back to odd λ's and even μ's.
    IptFromHtEq2,
    /// Back to sums of consecutive disjoint blocks of `d` members.
    DivideSum {
        d: usize,
    },
    /// `c(x, y) = f(x + y)` searched inside the carriers.
    IphtFromIpt {
        carriers: Vec<FiniteSet>,
    },
    /// As `IptFromHtEq2` after interleaving the two sets.
    IptFromIpht,
    /// Back through consecutive exactly large chunks.
    IphtFromHtLarge,
    /// `c(x_1,x_2,x_3) = ⟨f(x_1), f(x_1+x_2), f(x_1+x_2+x_3)⟩`; back by pigeonhole.
    ExistsPairFromRt3,
    /// `c(S) = f(Σ S)` on exactly large sets.
    HtLargeFromRtLarge,
    /// A solution of the weaker length spec solves the stronger one.
    Weaken,
    Composite(Vec<ReductionStep>),
    /// Negative control: perturbs the inner step's backward output.
    Corrupted(Box<ReductionStep>),
}

/// A reduction from `source` to `target`: instances of `source` go forward
/// to instances of `target`, solutions of `target` come back as solutions
/// of `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub id: String,
    pub source: PrincipleId,
    pub target: PrincipleId,
    pub anchor: String,
    pub kind: StepKind,
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} <= {}", self.id, self.source, self.target)
    }
}

fn step(
    id: &str,
    source: PrincipleId,
    target: PrincipleId,
    anchor: &str,
    kind: StepKind,
) -> ReductionStep {
    ReductionStep {
        id: id.into(),
        source,
        target,
        anchor: anchor.into(),
        kind,
    }
}

fn check_unions_spec(spec: &LengthSpec) -> Result<()> {
    spec.validate()?;
    match spec {
        LengthSpec::AtMost(_) | LengthSpec::Exactly(_) | LengthSpec::AllUpTo(_) => Ok(()),
        other => Err(Error::domain(format!(
            "finite unions do not support length spec {other}"
        ))),
    }
}

fn check_base(t: u32) -> Result<()> {
    if t < 2 {
        return Err(Error::domain("apartness bases are at least 2"));
    }
    Ok(())
}

fn nat_rule(colors: u32, rule: Rule) -> Result<Coloring> {
    Coloring::rule(Arity::Nat, colors, rule)
}

fn members(sol: &Solution) -> Result<&FiniteSet> {
    sol.shape.as_set().ok_or_else(|| Error::Shape {
        principle: "a set principle".into(),
        found: sol.shape.kind().into(),
    })
}

fn polarized(sol: &Solution) -> Result<&[FiniteSet]> {
    match &sol.shape {
        Shape::Polarized(hs) => Ok(hs),
        other => Err(Error::Shape {
            principle: "a polarized principle".into(),
            found: other.kind().into(),
        }),
    }
}

fn apart_solution(set: FiniteSet, t: Option<u32>) -> Result<Solution> {
    Ok(match t {
        Some(t) => Solution::apart(ApartSet::new(set, t)?),
        None => Solution::plain(set),
    })
}

/// The same shape with different members.
fn reshape(sol: &Solution, set: FiniteSet) -> Result<Solution> {
    let t = match &sol.shape {
        Shape::Apart(a) => Some(a.base()),
        _ => None,
    };
    apart_solution(set, t)
}

/// `H_1 = {λ(h_1), λ(h_3), …}`, `H_2 = {μ(h_2), μ(h_4), …}`.
fn lambda_mu_split(chain: &[u64]) -> Vec<FiniteSet> {
    let h1 = chain.iter().step_by(2).map(|&h| u64::from(lam(h, 2)));
    let h2 = chain
        .iter()
        .skip(1)
        .step_by(2)
        .map(|&h| u64::from(mu(h, 2)));
    vec![FiniteSet::new(h1), FiniteSet::new(h2)]
}

impl ReductionStep {
    pub fn identity(p: PrincipleId) -> Self {
        step(
            "identity",
            p.clone(),
            p,
            "identity on instances and solutions",
            StepKind::Identity,
        )
    }

    /// FUT^{spec}_k to HT^{spec}_k with `t`-apartness.
    pub fn fut_from_ht(spec: LengthSpec, k: u32, t: u32) -> Result<Self> {
        check_unions_spec(&spec)?;
        check_base(t)?;
        Ok(step(
            "fut-from-ht",
            PrincipleId::fut(spec.clone(), k),
            PrincipleId::ht(spec, k, Some(t)),
            "color an integer by its set of base-t exponents; blocks are the exponent sets of the apart members",
            StepKind::FutFromHt { base: t },
        ))
    }

    /// HT^{spec}_k with `t`-apartness to FUT^{spec}_k.
    pub fn ht_from_fut(spec: LengthSpec, k: u32, t: u32) -> Result<Self> {
        check_unions_spec(&spec)?;
        check_base(t)?;
        Ok(step(
            "ht-from-fut",
            PrincipleId::ht(spec.clone(), k, Some(t)),
            PrincipleId::fut(spec, k),
            "color a set by the integer with those base-t exponents; members are the encoded blocks",
            StepKind::HtFromFut { base: t },
        ))
    }

    /// HT^{spec}_k with `s`-apartness to HT^{spec}_k with `t`-apartness.
    pub fn apartness_base_convert(spec: LengthSpec, k: u32, t: u32, s: u32) -> Result<Self> {
        let c = compose(
            &Self::ht_from_fut(spec.clone(), k, s)?,
            &Self::fut_from_ht(spec, k, t)?,
        )?;
        Ok(c.renamed(
            "apartness-base-convert",
            "change the apartness base through block sequences",
        ))
    }

    /// HT^{≤n}_k with 3-apartness to HT^{≤n}_{2k}.
    pub fn color_doubling(n: u32, k: u32) -> Result<Self> {
        if n < 2 || k < 1 {
            return Err(Error::domain("color doubling needs n >= 2 and k >= 1"));
        }
        Ok(step(
            "color-doubling",
            PrincipleId::ht(LengthSpec::AtMost(n), k, Some(3)),
            PrincipleId::ht(LengthSpec::AtMost(n), 2 * k, None),
            "split each color by the least base-3 coefficient; distinct least exponents give a 3-apart subset",
            StepKind::ColorDoubling,
        ))
    }

    /// As `color_doubling`, returning 2-apart solutions.
    pub fn color_doubling_two_apart(n: u32, k: u32) -> Result<Self> {
        let convert = Self::apartness_base_convert(LengthSpec::AtMost(n), k, 3, 2)?;
        Ok(compose(&convert, &Self::color_doubling(n, k)?)?.renamed(
            "color-doubling-2",
            "color doubling followed by a change of apartness base",
        ))
    }

    /// HT^{=n}_k with `t`-apartness to RT^n_k on a `t`-apart ground set.
    pub fn ht_exact_from_rt(n: u32, k: u32, t: u32) -> Result<Self> {
        check_base(t)?;
        if n == 0 {
            return Err(Error::domain("tuple dimension must be positive"));
        }
        Ok(step(
            "ht-exact-from-rt",
            PrincipleId::ht(LengthSpec::Exactly(n), k, Some(t)),
            PrincipleId::dimensional(Family::RT, n, k, Some(t)),
            "color a tuple by its sum; a homogeneous apart set is returned unchanged",
            StepKind::HtExactFromRt,
        ))
    }

    /// IPT^2_2 to HT^{=2}_2 with apartness.
    pub fn ipt_from_ht_eq2() -> Self {
        step(
            "ipt-from-ht-eq2",
            PrincipleId::dimensional(Family::IPT, 2, 2, None),
            PrincipleId::ht(LengthSpec::Exactly(2), 2, Some(2)),
            "color n by the pair (least, greatest exponent); odd members give the least exponents, even ones the greatest",
            StepKind::IptFromHtEq2,
        )
    }

    /// HT^{=n}_k to HT^{=m}_k for `n | m` (same apartness on both sides).
    pub fn divide_sum(n: u32, m: u32, k: u32, apart: Option<u32>) -> Result<Self> {
        if n < 2 || m < 2 || m % n != 0 {
            return Err(Error::domain(format!(
                "divide-sum needs 2 <= n, n | m; got n={n}, m={m}"
            )));
        }
        Ok(step(
            "divide-sum",
            PrincipleId::ht(LengthSpec::Exactly(n), k, apart),
            PrincipleId::ht(LengthSpec::Exactly(m), k, apart),
            "sums of consecutive disjoint blocks of m/n members",
            StepKind::DivideSum {
                d: (m / n) as usize,
            },
        ))
    }

    /// IPHT^2_2 with apartness to IPT^2_2 solved inside two carriers whose
    /// union is 2-apart.
    pub fn ipht_from_ipt(carriers: Vec<FiniteSet>) -> Result<Self> {
        if carriers.len() != 2 || carriers.iter().any(FiniteSet::is_empty) {
            return Err(Error::domain("ipht-from-ipt needs two non-empty carriers"));
        }
        let mut union: Vec<u64> = carriers.iter().flat_map(|c| c.iter().copied()).collect();
        union.sort_unstable();
        if union.windows(2).any(|w| w[0] == w[1])
            || union[0] == 0
            || !crate::numerics::check_apart(&union, 2)?.is_apart()
        {
            return Err(Error::domain(
                "carriers must be disjoint with a 2-apart union",
            ));
        }
        Ok(step(
            "ipht-from-ipt",
            PrincipleId::dimensional(Family::IPHT, 2, 2, Some(2)),
            PrincipleId::dimensional(Family::IPT, 2, 2, None),
            "color a pair by the color of its sum, restricted to disjoint carriers with apart union",
            StepKind::IphtFromIpt { carriers },
        ))
    }

    /// Default carriers `{2^{4i+1}}` and `{2^{4i+3}}` up to `2^max_exponent`.
    pub fn default_carriers(max_exponent: u32) -> Vec<FiniteSet> {
        crate::search::apart_carriers(2, max_exponent)
    }

    /// IPT^2_2 to IPHT^2_2 with apartness.
    pub fn ipt_from_ipht() -> Self {
        step(
            "ipt-from-ipht",
            PrincipleId::dimensional(Family::IPT, 2, 2, None),
            PrincipleId::dimensional(Family::IPHT, 2, 2, Some(2)),
            "color n by the pair (least, greatest exponent); interleave the two sets, then split",
            StepKind::IptFromIpht,
        )
    }

    /// IPHT^2_2 with apartness to HT^{!ω}_2 with apartness.
    pub fn ipht_from_ht_large() -> Self {
        step(
            "ipht-from-ht-large",
            PrincipleId::dimensional(Family::IPHT, 2, 2, Some(2)),
            PrincipleId::ht(LengthSpec::ExactlyLarge, 2, Some(2)),
            "chunk into consecutive exactly large sets; chunk sums without their largest term, and the largest terms",
            StepKind::IphtFromHtLarge,
        )
    }

    /// HT^{∃{a<b}}_2 with apartness to RT^3_8 on a 2-apart ground set.
    pub fn exists_pair_from_rt3() -> Self {
        step(
            "exists-pair-from-rt3",
            PrincipleId::ht_exists(2, Some(2)),
            PrincipleId::dimensional(Family::RT, 3, 8, Some(2)),
            "color a triple by the colors of its three prefix sums; two equal bits give the lengths",
            StepKind::ExistsPairFromRt3,
        )
    }

    /// HT^{!ω}_2 with `t`-apartness to Ramsey for exactly large sets on a
    /// `t`-apart ground set.
    pub fn ht_large_from_rt_large(t: u32) -> Result<Self> {
        check_base(t)?;
        let mut target = PrincipleId::rt_large(2);
        target.apart = Some(t);
        Ok(step(
            "ht-large-from-rt-large",
            PrincipleId::ht(LengthSpec::ExactlyLarge, 2, Some(t)),
            target,
            "color an exactly large set by the color of its sum",
            StepKind::HtLargeFromRtLarge,
        ))
    }

    /// X^{=n}_k to X^{≤n}_k for X in {HT, FUT}.
    pub fn weaken(family: Family, n: u32, k: u32, apart: Option<u32>) -> Result<Self> {
        let (source, target) = match family {
            Family::HT => (
                PrincipleId::ht(LengthSpec::Exactly(n), k, apart),
                PrincipleId::ht(LengthSpec::AtMost(n), k, apart),
            ),
            Family::FUT => (
                PrincipleId::fut(LengthSpec::Exactly(n), k),
                PrincipleId::fut(LengthSpec::AtMost(n), k),
            ),
            other => return Err(Error::domain(format!("cannot weaken {}", other.name()))),
        };
        Ok(step(
            "weaken",
            source,
            target,
            "sums of at most n terms include sums of exactly n",
            StepKind::Weaken,
        ))
    }

    /// IPT^2_2 to HT^{≤2}_4.
    pub fn ipt_to_ht_le2_4() -> Result<Self> {
        let chain = [
            Self::ipt_from_ht_eq2(),
            Self::weaken(Family::HT, 2, 2, Some(2))?,
            Self::apartness_base_convert(LengthSpec::AtMost(2), 2, 3, 2)?,
            Self::color_doubling(2, 2)?,
        ];
        Ok(compose_all(&chain)?.renamed(
            "ipt-to-ht-le2-4",
            "transitivity through exact pairs, base change and color doubling",
        ))
    }

    /// IPT^2_2 to FUT^{≤2}_2.
    pub fn ipt_to_fut_le2() -> Result<Self> {
        let chain = [
            Self::ipt_from_ht_eq2(),
            Self::ht_from_fut(LengthSpec::Exactly(2), 2, 2)?,
            Self::weaken(Family::FUT, 2, 2, None)?,
        ];
        Ok(compose_all(&chain)?.renamed(
            "ipt-to-fut-le2",
            "transitivity through exact pairs and block sequences",
        ))
    }

    /// Negative control wrapping `inner`: the backward output has its
    /// largest member (or element) moved up by one.
    pub fn corrupted(inner: ReductionStep) -> Self {
        ReductionStep {
            id: "fixture-corrupted".into(),
            source: inner.source.clone(),
            target: inner.target.clone(),
            anchor: "negative control, never a valid reduction".into(),
            kind: StepKind::Corrupted(Box::new(inner)),
        }
    }

    pub fn renamed(mut self, id: &str, anchor: &str) -> Self {
        self.id = id.into();
        self.anchor = anchor.into();
        self
    }

    /// Step ids of a composite, or the id itself.
    pub fn chain(&self) -> Vec<String> {
        match &self.kind {
            StepKind::Composite(steps) => steps.iter().flat_map(ReductionStep::chain).collect(),
            _ => vec![self.id.clone()],
        }
    }

    /// Carriers the target search must stay inside, if any.
    pub fn carriers(&self) -> Option<Vec<FiniteSet>> {
        match &self.kind {
            StepKind::IphtFromIpt { carriers } => Some(carriers.clone()),
            StepKind::Composite(steps) => steps.last().and_then(ReductionStep::carriers),
            StepKind::Corrupted(inner) => inner.carriers(),
            _ => None,
        }
    }

    /// Smallest target solution size the backward map can work with.
    pub fn min_solution_size(&self) -> usize {
        match &self.kind {
            StepKind::IptFromHtEq2 => 5,
            StepKind::IptFromIpht => 2,
            StepKind::DivideSum { d } => 2 * d,
            StepKind::IphtFromHtLarge => 7,
            StepKind::ExistsPairFromRt3 => 5,
            StepKind::Composite(steps) => steps
                .iter()
                .map(ReductionStep::min_solution_size)
                .max()
                .unwrap_or(1),
            StepKind::Corrupted(inner) => inner.min_solution_size(),
            _ => 1,
        }
    }

    /// Maps an instance of `source` to an instance of `target`.
    pub fn forward(&self, c: &Coloring) -> Result<Coloring> {
        let want = self.source.instance_arity();
        if c.arity() != want || c.colors() > self.source.colors {
            return Err(Error::domain(format!(
                "{} expects a {want} coloring with at most {} colors, got {} with {}",
                self.id,
                self.source.colors,
                c.arity(),
                c.colors()
            )));
        }
        let k = c.colors();
        let boxed = || Box::new(c.clone());
        match &self.kind {
            StepKind::Identity
            | StepKind::Weaken
            | StepKind::DivideSum { .. }
            | StepKind::IphtFromHtLarge => Ok(c.clone()),
            StepKind::FutFromHt { base } => nat_rule(
                k,
                Rule::Support {
                    base: *base,
                    inner: boxed(),
                },
            ),
            StepKind::HtFromFut { base } => Coloring::rule(
                Arity::Set,
                k,
                Rule::Encode {
                    base: *base,
                    inner: boxed(),
                },
            ),
            StepKind::ColorDoubling => nat_rule(2 * k, Rule::Doubling { inner: boxed() }),
            StepKind::HtExactFromRt => Coloring::rule(
                self.target.instance_arity(),
                k,
                Rule::SumOf { inner: boxed() },
            ),
            StepKind::IptFromHtEq2 | StepKind::IptFromIpht => {
                nat_rule(k, Rule::LambdaMu { inner: boxed() })
            }
            StepKind::IphtFromIpt { .. } => {
                Coloring::rule(Arity::Tuple(2), k, Rule::SumOf { inner: boxed() })
            }
            StepKind::ExistsPairFromRt3 => {
                if k != 2 {
                    return Err(Error::domain("prefix-sum triples need a 2-coloring"));
                }
                Coloring::rule(Arity::Tuple(3), 8, Rule::PrefixSums { inner: boxed() })
            }
            StepKind::HtLargeFromRtLarge => {
                Coloring::rule(Arity::Set, k, Rule::SumOf { inner: boxed() })
            }
            StepKind::Composite(steps) => {
                steps.iter().try_fold(c.clone(), |acc, s| s.forward(&acc))
            }
            StepKind::Corrupted(inner) => inner.forward(c),
        }
    }

    /// Maps a solution of `forward(original)` back to a solution of `original`.
    pub fn backward(&self, sol: &Solution, original: &Coloring) -> Result<Solution> {
        let color = None;
        let out = match &self.kind {
            StepKind::Identity
            | StepKind::Weaken
            | StepKind::HtExactFromRt
            | StepKind::HtLargeFromRtLarge => {
                return Ok(Solution {
                    claimed_color: sol.claimed_color,
                    ..sol.clone()
                })
            }
            StepKind::FutFromHt { base } => {
                let h = members(sol)?;
                let blocks = h
                    .iter()
                    .map(|&x| support_set(x, *base))
                    .collect::<Result<Vec<_>>>()?;
                Solution::blocks(BlockSequence::new(blocks)?)
            }
            StepKind::HtFromFut { base } => {
                let Shape::Blocks(b) = &sol.shape else {
                    return Err(Error::Shape {
                        principle: self.target.to_string(),
                        found: sol.shape.kind().into(),
                    });
                };
                let encoded = b
                    .blocks()
                    .iter()
                    .map(|s| encode_set(s, *base))
                    .collect::<Result<Vec<_>>>()?;
                Solution::apart(ApartSet::new(FiniteSet::new(encoded), *base)?)
            }
            StepKind::ColorDoubling => {
                let h = members(sol)?;
                let thinned = thin_to_apart(h.as_slice(), 3)?;
                Solution::apart(ApartSet::new(FiniteSet::new(thinned), 3)?)
            }
            StepKind::IptFromHtEq2 => {
                let h = members(sol)?.as_slice();
                let start = h.iter().position(|&x| lam(x, 2) > 0).unwrap_or(h.len());
                let rest = &h[start..];
                if rest.len() < 4 {
                    return Err(Error::TooShort(format!(
                        "{} members with positive least exponent, need 4",
                        rest.len()
                    )));
                }
                Solution::polarized(lambda_mu_split(rest))
            }
            StepKind::DivideSum { d } => {
                let h = members(sol)?.as_slice();
                let n = self
                    .source
                    .length
                    .as_ref()
                    .and_then(LengthSpec::max_len)
                    .unwrap_or(2);
                if h.len() < d * n {
                    return Err(Error::TooShort(format!(
                        "{} members, need {}",
                        h.len(),
                        d * n
                    )));
                }
                let sums = h
                    .chunks_exact(*d)
                    .map(|c| c.iter().try_fold(0u64, |a, &x| a.checked_add(x)))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::overflow("block sum"))?;
                reshape(sol, FiniteSet::new(sums))?
            }
            StepKind::IphtFromIpt { carriers } => {
                let hs = polarized(sol)?;
                if hs.len() != 2 || !hs.iter().zip(carriers).all(|(h, c)| h.is_subset_of(c)) {
                    return Err(Error::domain("the solution leaves the carriers"));
                }
                let mut union: Vec<u64> = hs.iter().flat_map(|h| h.iter().copied()).collect();
                union.sort_unstable();
                if !crate::numerics::check_apart(&union, 2)?.is_apart() {
                    return Err(Error::domain("the union of the solution is not 2-apart"));
                }
                Solution::polarized(hs.to_vec())
            }
            StepKind::IptFromIpht => {
                let hs = polarized(sol)?;
                if hs.len() != 2 {
                    return Err(Error::domain("expected two sets"));
                }
                let chain = interleave(&hs[0], &hs[1]);
                if chain.len() < 4 {
                    return Err(Error::Interleave(4));
                }
                Solution::polarized(lambda_mu_split(&chain))
            }
            StepKind::IphtFromHtLarge => {
                let chunks = large_chunks(members(sol)?.as_slice())?;
                let (h1, h2): (Vec<u64>, Vec<u64>) = chunks
                    .iter()
                    .map(|c| (c.sum - c.largest, c.largest))
                    .unzip();
                Solution::polarized(vec![FiniteSet::new(h1), FiniteSet::new(h2)])
            }
            StepKind::ExistsPairFromRt3 => {
                let h = members(sol)?.as_slice();
                if h.len() < 3 {
                    return Err(Error::TooShort(format!("{} members, need 3", h.len())));
                }
                let bits = prefix_bits(original, &h[..3])?;
                let (a, b) = pigeonhole(bits);
                // Sums whose top term lacks 3 - a larger members are not covered
                // by any homogeneous triple.
                let keep = h.len() - (3 - a);
                let mut out = reshape(sol, FiniteSet::new(h[..keep].iter().copied()))?;
                out.lengths = Some(vec![a as u32, b as u32]);
                out
            }
            StepKind::Composite(steps) => {
                let mut instances = vec![original.clone()];
                for s in &steps[..steps.len() - 1] {
                    let next = s.forward(instances.last().expect("non-empty"))?;
                    instances.push(next);
                }
                let mut cur = sol.clone();
                for (s, inst) in steps.iter().zip(&instances).rev() {
                    cur = s.backward(&cur, inst)?;
                }
                return Ok(cur);
            }
            StepKind::Corrupted(inner) => {
                let good = inner.backward(sol, original)?;
                return corrupt(&good);
            }
        };
        Ok(out.with_color(color))
    }
}

fn corrupt(sol: &Solution) -> Result<Solution> {
    match &sol.shape {
        Shape::Plain(_) | Shape::Apart(_) => {
            let mut v = members(sol)?.as_slice().to_vec();
            if let Some(last) = v.last_mut() {
                *last += 1;
            }
            Ok(Solution {
                shape: Shape::Plain(FiniteSet::new(v)),
                ..sol.clone()
            })
        }
        Shape::Polarized(hs) => {
            let mut hs = hs.clone();
            hs.swap(0, 1);
            Ok(Solution {
                shape: Shape::Polarized(hs),
                ..sol.clone()
            })
        }
        Shape::Blocks(b) => {
            let mut blocks = b.blocks().to_vec();
            blocks.pop();
            Ok(Solution {
                shape: Shape::Blocks(BlockSequence::new(blocks)?),
                ..sol.clone()
            })
        }
    }
}

/// Keeps the smallest member, then repeatedly the next member whose least
/// exponent exceeds the greatest exponent of the last kept one. Fails if two
/// members share a least exponent.
pub fn thin_to_apart(h: &[u64], t: u32) -> Result<Vec<u64>> {
    let mut seen = std::collections::HashMap::new();
    for &x in h {
        if x == 0 {
            return Err(Error::domain("members must be positive"));
        }
        if let Some(prev) = seen.insert(lam(x, t), x) {
            return Err(Error::Thinning(prev, x, lam(x, t)));
        }
    }
    let mut out: Vec<u64> = Vec::new();
    for &x in h {
        if out.last().map_or(true, |&p| lam(x, t) > mu(p, t)) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Greedy alternating chain `a_1 < b_1 < a_2 < b_2 < …`, `a_i ∈ first`,
/// `b_i ∈ second`, always taking the smallest admissible element.
pub fn interleave(first: &FiniteSet, second: &FiniteSet) -> Vec<u64> {
    let mut chain = Vec::new();
    let mut sides = [first.as_slice(), second.as_slice()];
    loop {
        let side = chain.len() % 2;
        let after = chain.last().copied();
        let pos = sides[side]
            .iter()
            .position(|&x| after.map_or(true, |a| x > a));
        match pos {
            Some(p) => {
                chain.push(sides[side][p]);
                sides[side] = &sides[side][p + 1..];
            }
            None => return chain,
        }
    }
}

/// An exactly large chunk of consecutive members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub members: Vec<u64>,
    pub sum: u64,
    pub largest: u64,
}

/// Splits `h` greedily into consecutive exactly large chunks, dropping an
/// incomplete tail. At least two chunks are required.
pub fn large_chunks(h: &[u64]) -> Result<Vec<Chunk>> {
    let mut chunks = Vec::new();
    let mut i = 0;
    while i < h.len() {
        let size = h[i].saturating_add(1);
        if size > (h.len() - i) as u64 {
            break;
        }
        let members = h[i..i + size as usize].to_vec();
        let sum = members
            .iter()
            .try_fold(0u64, |a, &x| a.checked_add(x))
            .ok_or_else(|| Error::overflow("chunk sum"))?;
        let largest = *members.last().expect("chunks are non-empty");
        chunks.push(Chunk {
            members,
            sum,
            largest,
        });
        i += size as usize;
    }
    if chunks.len() < 2 {
        return Err(Error::Chunk(chunks.len()));
    }
    Ok(chunks)
}

/// `(f(x_1), f(x_1+x_2), f(x_1+x_2+x_3))`.
fn prefix_bits(f: &Coloring, x: &[u64]) -> Result<[u32; 3]> {
    let s1 = x[0];
    let s2 = s1
        .checked_add(x[1])
        .ok_or_else(|| Error::overflow("prefix sum"))?;
    let s3 = s2
        .checked_add(x[2])
        .ok_or_else(|| Error::overflow("prefix sum"))?;
    Ok([f.color_nat(s1)?, f.color_nat(s2)?, f.color_nat(s3)?])
}

/// The least pair `a < b ≤ 3` (ordered by `b`, then `a`) with equal bits.
pub fn pigeonhole(bits: [u32; 3]) -> (usize, usize) {
    [(1, 2), (1, 3), (2, 3)]
        .into_iter()
        .find(|&(a, b)| bits[a - 1] == bits[b - 1])
        .expect("two of three bits agree when the colors are 0 and 1")
}

/// Composes `a` then `b`: forward is `b ∘ a`, backward is `a ∘ b`.
pub fn compose(a: &ReductionStep, b: &ReductionStep) -> Result<ReductionStep> {
    if a.target != b.source {
        return Err(Error::Composition(
            a.id.clone(),
            a.target.to_string(),
            b.id.clone(),
            b.source.to_string(),
        ));
    }
    let flatten = |s: &ReductionStep| match &s.kind {
        StepKind::Composite(v) => v.clone(),
        StepKind::Identity => Vec::new(),
        _ => vec![s.clone()],
    };
    let mut steps = flatten(a);
    steps.extend(flatten(b));
    let kind = match steps.len() {
        0 => StepKind::Identity,
        1 => return Ok(steps.pop().expect("one step")),
        _ => StepKind::Composite(steps),
    };
    Ok(ReductionStep {
        id: format!("{}+{}", a.id, b.id),
        source: a.source.clone(),
        target: b.target.clone(),
        anchor: "composition of reductions".into(),
        kind,
    })
}

pub fn compose_all(steps: &[ReductionStep]) -> Result<ReductionStep> {
    let (first, rest) = steps
        .split_first()
        .ok_or_else(|| Error::domain("nothing to compose"))?;
    rest.iter()
        .try_fold(first.clone(), |acc, s| compose(&acc, s))
}
