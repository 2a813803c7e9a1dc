//! Acceptance suite: one test per criterion, run one at a time so the
//! timings are meaningful. Each prints a single pass/fail line to stderr.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use hindman::numerics::{
    check_apart, encode_set, is_exactly_large, least_exponent, support_set, ApartSet, FiniteSet,
    LengthSpec,
};
use hindman::principles::{
    injection_catalog, parse_rule_expr, verify, verify_fut, verify_ht, verify_ipt,
    verify_polarized_ht, verify_rt, Arity, Coloring, PrincipleId, Rule, Shape, Solution, Status,
    Witness,
};
use hindman::reductions::{
    catalog, catalog_instances, certify, large_chunks, lookup, CertifyConfig, RangeDecoder,
    ReductionStep, Verdict,
};
use hindman::search::{
    enumerate_colorings, search_sums, search_unpruned, solve, Candidates, Objective,
    RestrictedGrowth, SearchBudget, SolveConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

type Outcome = Result<String, String>;

fn criterion(n: u32, name: &str, limit: Duration, body: impl FnOnce() -> Outcome) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let result = body();
    let took = start.elapsed();
    let (ok, detail) = match result {
        Ok(d) if took <= limit => (true, d),
        Ok(d) => (
            false,
            format!("{d}; over the {:.0}s limit", limit.as_secs_f64()),
        ),
        Err(d) => (false, d),
    };
    let verdict = if ok { "PASS" } else { "FAIL" };
    let line = format!(
        "criterion {n:>2} [PRIMARY] {name}: {verdict} ({detail}; {:.2}s)\n",
        took.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "{line}");
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

#[test]
fn c01_encode_roundtrip() {
    criterion(1, "encode/support roundtrip", secs(5), || {
        let mut checked = 0u64;
        for t in [2u32, 3, 5] {
            for mask in 1u32..1 << 20 {
                let s = FiniteSet::new((0..20u64).filter(|i| mask >> i & 1 == 1));
                let n = encode_set(&s, t).map_err(|e| e.to_string())?;
                let back = support_set(n, t).map_err(|e| e.to_string())?;
                check(back == s, || format!("t={t} S={s} came back as {back}"))?;
                checked += 1;
            }
        }
        Ok(format!("{checked} sets"))
    });
}

fn certify_all(
    step: &ReductionStep,
    instances: &[Coloring],
    budget: SearchBudget,
) -> Result<(usize, usize), String> {
    let r = certify(step, instances, &CertifyConfig::new(budget)).map_err(|e| e.to_string())?;
    check(r.is_pass(), || r.to_string())?;
    Ok((r.passed, r.found))
}

#[test]
fn c02_fut_ht_transport() {
    criterion(2, "FUT/HT transport", secs(60), || {
        let sets = catalog_instances(Arity::Set, 2, 50).map_err(|e| e.to_string())?;
        let nats = catalog_instances(Arity::Nat, 2, 50).map_err(|e| e.to_string())?;
        check(sets.len() == 50 && nats.len() == 50, || {
            "catalog too small".into()
        })?;
        let budget = SearchBudget::new(20, 200_000, 4).unwrap();
        let mut passed = 0;
        for t in [2, 3] {
            for spec in [LengthSpec::AtMost(2), LengthSpec::Exactly(2)] {
                let fut = ReductionStep::fut_from_ht(spec.clone(), 2, t).unwrap();
                let (p, _) = certify_all(&fut, &sets, budget)?;
                let ht = ReductionStep::ht_from_fut(spec.clone(), 2, t).unwrap();
                let (q, _) = certify_all(&ht, &nats, budget)?;
                check(p > 0 && q > 0, || {
                    format!("nothing certified for t={t} {spec}")
                })?;
                passed += p + q;
            }
        }
        // Direct transport identity on the found block sequences.
        for c in &sets {
            let pulled = Coloring::rule(
                Arity::Nat,
                2,
                Rule::Support {
                    base: 2,
                    inner: Box::new(c.clone()),
                },
            )
            .unwrap();
            let out = search_sums(&pulled, &LengthSpec::AtMost(2), Some(2), &budget, 1)
                .map_err(|e| e.to_string())?;
            let Some(s) = out.solution else { continue };
            let h = s.shape.as_set().unwrap();
            let blocks: Vec<FiniteSet> = h.iter().map(|&x| support_set(x, 2).unwrap()).collect();
            let b = hindman::numerics::BlockSequence::new(blocks).unwrap();
            let a = verify_fut(c, &LengthSpec::AtMost(2), &b).map_err(|e| e.to_string())?;
            let z = verify_ht(&pulled, &LengthSpec::AtMost(2), h, Some(2))
                .map_err(|e| e.to_string())?;
            check(a.status == z.status && a.color == z.color, || {
                format!("transport mismatch on {h}")
            })?;
        }
        Ok(format!(
            "{passed} pulled-back solutions verified, 0 failures"
        ))
    });
}

#[test]
fn c03_color_doubling() {
    criterion(3, "color doubling and thinning", secs(120), || {
        let budget = SearchBudget::new(12, 100_000, 4).unwrap();
        let (mut instances_used, mut found, mut verified) = (0, 0, 0);
        for k in [1u32, 2] {
            let inst = catalog_instances(Arity::Nat, k, 60).map_err(|e| e.to_string())?;
            instances_used += inst.len();
            for n in [2u32, 3] {
                let step = ReductionStep::color_doubling(n, k).unwrap();
                for f in &inst {
                    let g = step.forward(f).map_err(|e| e.to_string())?;
                    let out = solve(&step.target, &g, &SolveConfig::new(budget))
                        .map_err(|e| e.to_string())?;
                    let Some(h) = out.solution else { continue };
                    found += 1;
                    let members = h.shape.as_set().unwrap();
                    let mut lambdas: Vec<u32> = members
                        .iter()
                        .map(|&x| least_exponent(x, 3).unwrap())
                        .collect();
                    lambdas.sort_unstable();
                    lambdas.dedup();
                    check(lambdas.len() == members.len(), || {
                        format!("k={k} n={n}: {members} repeats a base-3 λ")
                    })?;
                    let back = step
                        .backward(&h, f)
                        .map_err(|e| format!("k={k} n={n} H={members}: {e}"))?;
                    let thinned = back.shape.as_set().unwrap();
                    check(
                        check_apart(thinned.as_slice(), 3).unwrap().is_apart(),
                        || format!("{thinned} not 3-apart"),
                    )?;
                    let rep = verify_ht(f, &LengthSpec::AtMost(n), thinned, Some(3))
                        .map_err(|e| e.to_string())?;
                    check(rep.is_valid(), || {
                        format!("k={k} n={n} H'={thinned}: {rep}")
                    })?;
                    verified += 1;
                }
            }
        }
        check(instances_used >= 50, || {
            format!("only {instances_used} instances")
        })?;
        check(found > 0, || "no g-solution found".into())?;
        Ok(format!(
            "{instances_used} instances, {found} g-solutions, {verified} thinned and verified"
        ))
    });
}

#[test]
fn c04_ipt_transport() {
    criterion(4, "IPT transport from exact pairs", secs(300), || {
        let fallback = parse_rule_expr("stat sum 0,1", Arity::Tuple(2), 2).unwrap();
        let mut inst: Vec<Coloring> =
            enumerate_colorings(Arity::Tuple(2), 2, 0, 5, Some(fallback), 1 << 20)
                .map_err(|e| e.to_string())?
                .collect();
        check(inst.len() == 1 << 14, || {
            format!("{} canonical tables", inst.len())
        })?;
        inst.extend(catalog_instances(Arity::Tuple(2), 2, 50).map_err(|e| e.to_string())?);
        let step = ReductionStep::ipt_from_ht_eq2();
        let budget = SearchBudget::new(16, 50_000, 5).unwrap();
        let r = certify(&step, &inst, &CertifyConfig::new(budget)).map_err(|e| e.to_string())?;
        check(r.is_pass(), || r.to_string())?;
        check(r.passed > 0, || r.to_string())?;
        // Color agreement on the rule instances.
        for c in &inst[1 << 14..] {
            let f = step.forward(c).unwrap();
            let out =
                solve(&step.target, &f, &SolveConfig::new(budget)).map_err(|e| e.to_string())?;
            let Some(h) = out.solution else { continue };
            let Ok(back) = step.backward(&h, c) else {
                continue;
            };
            let Shape::Polarized(hs) = &back.shape else {
                return Err("shape".into());
            };
            let rep = verify_ipt(c, 2, hs).map_err(|e| e.to_string())?;
            check(rep.color == h.claimed_color, || {
                format!("color mismatch on {h}")
            })?;
        }
        Ok(format!(
            "{} instances: {} verified, {} too short, {} vacuous flagged, {} not found",
            r.instances,
            r.passed,
            r.short,
            r.vacuous,
            r.instances - r.found
        ))
    });
}

#[test]
fn c05_decoder_agreement() {
    criterion(5, "range decoder agreement", secs(300), || {
        let mut decided = [0usize; 2];
        for f in injection_catalog() {
            for (i, spec) in [LengthSpec::AtMost(2), LengthSpec::Exactly(3)]
                .into_iter()
                .enumerate()
            {
                let Some(d) = RangeDecoder::search(f.clone(), spec.clone(), 10, 14, 20_000_000)
                    .map_err(|e| e.to_string())?
                else {
                    continue;
                };
                for x in 1..=8 {
                    let out = d.decode(x).map_err(|e| e.to_string())?;
                    if out.verdict == Verdict::Inconclusive {
                        continue;
                    }
                    decided[i] += 1;
                    let truth = f.in_range(x);
                    check((out.verdict == Verdict::InRange) == truth, || {
                        format!(
                            "{f} {spec} x={x}: decoded {} but truth is {truth}",
                            out.verdict
                        )
                    })?;
                }
            }
        }
        check(decided.iter().all(|&d| d >= 10), || {
            format!("under-powered: decided {decided:?}")
        })?;
        Ok(format!(
            "decided le2={} eq3={}, all agree with ground truth",
            decided[0], decided[1]
        ))
    });
}

#[test]
fn c06_pigeonhole() {
    criterion(6, "pigeonhole backward map", secs(10), || {
        let step = ReductionStep::exists_pair_from_rt3();
        let h = FiniteSet::new([1, 2, 4, 8, 16]);
        let mut ok = 0;
        for bits in 0u32..8 {
            let (c1, c2, c3) = (bits >> 2 & 1, bits >> 1 & 1, bits & 1);
            // Sums of j distinct powers of two have weight j.
            let f = Coloring::rule(
                Arity::Nat,
                2,
                Rule::Weight {
                    base: 2,
                    map: vec![0, c1, c2, c3],
                },
            )
            .unwrap();
            let c = step.forward(&f).map_err(|e| e.to_string())?;
            let rt = verify_rt(&c, 3, &h).map_err(|e| e.to_string())?;
            check(rt.is_valid() && rt.color == Some(bits), || {
                format!("bits {bits:03b}: H not homogeneous")
            })?;
            let sol = Solution::apart(ApartSet::new(h.clone(), 2).unwrap());
            let back = step.backward(&sol, &f).map_err(|e| e.to_string())?;
            let l = back.lengths.clone().unwrap_or_default();
            check(l.len() == 2 && l[0] < l[1], || {
                format!("bits {bits:03b}: lengths {l:?}")
            })?;
            let pair = LengthSpec::ExplicitSet(l.clone());
            let on_back = verify_ht(&f, &pair, back.shape.as_set().unwrap(), Some(2))
                .map_err(|e| e.to_string())?;
            let on_h = verify_ht(&f, &pair, &h, Some(2)).map_err(|e| e.to_string())?;
            let full = verify(&step.source, &f, &back).map_err(|e| e.to_string())?;
            check(
                on_back.is_valid() && on_h.is_valid() && full.is_valid(),
                || format!("bits {bits:03b}: {on_back} / {on_h} / {full}"),
            )?;
            ok += 1;
        }
        Ok(format!("{ok}/8 bit-triples"))
    });
}

#[test]
fn c07_divisibility() {
    criterion(7, "divisibility transport", secs(120), || {
        // Every canonical coloring of the reachable four-term sums up to 60
        // (integers with at least four binary digits); other points and
        // values beyond the window follow n mod 2.
        let window: Vec<u64> = (1..=60u64).filter(|n| n.count_ones() >= 4).collect();
        let points = window.len();
        let fallback = parse_rule_expr("mod 2 0,1", Arity::Nat, 2).unwrap();
        let step = ReductionStep::divide_sum(2, 4, 2, Some(2)).unwrap();
        let budget = SearchBudget {
            sum_cap: None,
            ..SearchBudget::new(10, 200_000, 8).unwrap()
        };
        let (mut found, mut verified, mut statuses) = (0, 0, std::collections::BTreeMap::new());
        let base: Vec<u32> = (1..=60u64).map(|p| (p % 2) as u32).collect();
        for rg in RestrictedGrowth::new(points, 2) {
            let mut table = base.clone();
            for (&p, &c) in window.iter().zip(&rg) {
                table[p as usize - 1] = c;
            }
            let f = Coloring::table(Arity::Nat, 2, 1, 60, table, Some(fallback.clone()))
                .map_err(|e| e.to_string())?;
            let out =
                solve(&step.target, &f, &SolveConfig::new(budget)).map_err(|e| e.to_string())?;
            *statuses.entry(out.status.to_string()).or_insert(0) += 1;
            let Some(h) = out.solution else { continue };
            found += 1;
            let back = step.backward(&h, &f).map_err(|e| e.to_string())?;
            let rep = verify_ht(
                &f,
                &LengthSpec::Exactly(2),
                back.shape.as_set().unwrap(),
                Some(2),
            )
            .map_err(|e| e.to_string())?;
            check(rep.is_valid(), || format!("H={} H+={back}: {rep}", h))?;
            verified += 1;
        }
        check(found > 0, || format!("no H found: {statuses:?}"))?;
        check(
            statuses.values().sum::<usize>() == 1 << (points - 1),
            || format!("{statuses:?}"),
        )?;
        Ok(format!(
            "{} colorings of {points} reachable sums, {found} found, {verified} verified",
            1 << (points - 1)
        ))
    });
}

fn random_chunkable(rng: &mut ChaCha8Rng) -> Vec<u64> {
    // Exponent intervals [lo, hi] laid out left to right below 2^22.
    let len = rng.gen_range(20..=22usize);
    let mut members = vec![1u64, 2];
    let mut next = 2u32;
    while members.len() < len {
        let left = (len - members.len()) as u32;
        let room = 22 - next;
        let width = if room > left && rng.gen_bool(0.3) {
            1
        } else {
            0
        };
        let lo = next;
        let hi = lo + width;
        let mut v = (1u64 << lo) | (1u64 << hi);
        if hi > lo + 1 {
            v |= rng.gen_range(0..1u64 << (hi - lo - 1)) << (lo + 1);
        }
        members.push(v);
        next = hi + 1;
    }
    members
}

#[test]
fn c08_large_chunking() {
    criterion(8, "exactly large chunking", secs(30), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let step = ReductionStep::ipht_from_ht_large();
        let f = Coloring::constant(Arity::Nat, 2, 0).unwrap();
        for round in 0..20 {
            let h = random_chunkable(&mut rng);
            check(h.len() >= 20 && *h.last().unwrap() < 1 << 22, || {
                format!("round {round}: bad sample")
            })?;
            let set =
                ApartSet::new(FiniteSet::new(h.iter().copied()), 2).map_err(|e| e.to_string())?;
            let chunks = large_chunks(&h).map_err(|e| format!("round {round}: {e}"))?;
            check(chunks.len() >= 2, || {
                format!("round {round}: {} chunks", chunks.len())
            })?;
            let mut at = 0;
            for (i, c) in chunks.iter().enumerate() {
                let s = FiniteSet::new(c.members.iter().copied());
                check(is_exactly_large(&s).unwrap(), || {
                    format!("round {round}: chunk {i} not exactly large")
                })?;
                check(c.members == h[at..at + c.members.len()], || {
                    format!("round {round}: chunk {i} not consecutive")
                })?;
                check(c.sum == c.members.iter().sum::<u64>(), || "sum".into())?;
                check(c.largest == *c.members.last().unwrap(), || "largest".into())?;
                if i > 0 {
                    check(chunks[i - 1].largest < c.members[0], || {
                        "meshed chunks".into()
                    })?;
                }
                at += c.members.len();
            }
            let back = step
                .backward(&Solution::apart(set), &f)
                .map_err(|e| e.to_string())?;
            let Shape::Polarized(hs) = &back.shape else {
                return Err("shape".into());
            };
            for (j, c) in chunks.iter().enumerate() {
                check(
                    hs[0].as_slice()[j] == c.sum - c.largest && hs[1].as_slice()[j] == c.largest,
                    || format!("round {round}: chunk {j} values"),
                )?;
            }
            let rep = verify_polarized_ht(&f, 2, hs, true, Some(2)).map_err(|e| e.to_string())?;
            check(rep.is_valid(), || format!("round {round}: {rep}"))?;
        }
        Ok("20/20 sets".into())
    });
}

#[test]
fn c09_determinism_and_pruning() {
    criterion(
        9,
        "parallel/sequential and pruned/unpruned equivalence",
        secs(180),
        || {
            let budget = SearchBudget::new(12, 20_000, 4).unwrap();
            let mut compared = 0;
            for step in catalog() {
                let inst = catalog_instances(step.source.instance_arity(), step.source.colors, 50)
                    .map_err(|e| e.to_string())?;
                let mut b = budget;
                b.target_size = b.target_size.max(step.min_solution_size());
                for c in &inst {
                    let image = step.forward(c).map_err(|e| e.to_string())?;
                    let seq = SolveConfig {
                        carriers: step.carriers(),
                        ..SolveConfig::new(b)
                    };
                    let par = SolveConfig {
                        jobs: 4,
                        ..seq.clone()
                    };
                    let x = solve(&step.target, &image, &seq).map_err(|e| e.to_string())?;
                    let y = solve(&step.target, &image, &par).map_err(|e| e.to_string())?;
                    check(x == y, || {
                        format!(
                            "{}: sequential {:?} vs parallel {:?}",
                            step.id, x.solution, y.solution
                        )
                    })?;
                    compared += 1;
                }
            }
            let mut oracle = 0;
            let nats = catalog_instances(Arity::Nat, 2, 30).map_err(|e| e.to_string())?;
            for f in &nats {
                for spec in [
                    LengthSpec::AtMost(2),
                    LengthSpec::Exactly(2),
                    LengthSpec::ExactlyLarge,
                ] {
                    for (e, target) in [(8u32, 3usize), (12, 2)] {
                        let b = SearchBudget::new(e, u64::MAX, target).unwrap();
                        let pruned =
                            search_sums(f, &spec, Some(2), &b, 1).map_err(|e| e.to_string())?;
                        let cands = Candidates::Apart {
                            base: 2,
                            max_exponent: e,
                        };
                        let obj = Objective::Sums {
                            f,
                            spec: &spec,
                            cap: None,
                        };
                        let brute = search_unpruned(obj, &cands, target, Some(2), u64::MAX)
                            .map_err(|e| e.to_string())?;
                        let got = pruned.solution.map(|s| s.shape.as_set().unwrap().clone());
                        check(got == brute, || {
                            format!("{spec} e={e}: pruned {got:?} vs unpruned {brute:?}")
                        })?;
                        oracle += 1;
                    }
                }
            }
            Ok(format!(
                "{compared} parallel/sequential pairs, {oracle} pruned/unpruned pairs"
            ))
        },
    );
}

#[test]
fn c10_negative_controls() {
    criterion(10, "negative controls", secs(60), || {
        let args: Vec<String> = [
            "hindman",
            "certify",
            "--id",
            "fixture-corrupted",
            "--count",
            "20",
            "--max-exp",
            "10",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = hindman::cli::run(&args, &mut out, &mut err);
        let out = String::from_utf8(out).unwrap();
        check(code == 1 && out.contains("counterexample"), || {
            format!("certify exit {code}: {out}")
        })?;
        check(lookup("fixture-corrupted").is_ok(), || {
            "fixture missing".into()
        })?;

        let f = parse_rule_expr("mod 2 0,1", Arity::Nat, 2).unwrap();
        let p = PrincipleId::ht(LengthSpec::AtMost(2), 2, Some(2));
        let bad = Solution::apart(ApartSet::new(FiniteSet::new([1, 2]), 2).unwrap());
        let rep = verify(&p, &f, &bad).map_err(|e| e.to_string())?;
        let clash = matches!(rep.witness, Some(Witness::Clash { first_color, second_color, .. }) if first_color != second_color);
        check(rep.status == Status::Invalid && clash, || {
            format!("verifier said {rep}")
        })?;
        Ok(format!(
            "certify exit 1 with counterexample; verifier witness: {}",
            rep.witness.unwrap()
        ))
    });
}
