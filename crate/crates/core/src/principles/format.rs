//! Line-oriented text forms for colorings and solutions.
//!
//! A coloring file is the header `hindman-coloring 1` followed by one node
//! in preorder:
//!
//! ```text
//! rule <arity> <k> <name> <params...>     (rules with an inner coloring are followed by it)
//! table <arity> <k> <lo>..<hi>
//! entry <args...> <color>                 (one per window point, canonical order)
//! fallback none | fallback                (the latter followed by a node)
//! ```
//!
//! A solution file is the header `hindman-solution 1` followed by
//! `shape`, `color`, `lengths` and one `set` line per component.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numerics::{ApartSet, BlockSequence, FiniteSet};
use crate::principles::{
    window_args, Arity, Body, Coloring, DigitKind, Injection, Rule, Shape, Solution, Stat,
};

const COLORING_HEADER: &str = "hindman-coloring 1";
const SOLUTION_HEADER: &str = "hindman-solution 1";

fn join_map(map: &[u32]) -> String {
    map.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn write_node(c: &Coloring, out: &mut String) {
    let head = format!("{} {}", c.arity(), c.colors());
    match c.body() {
        Body::Rule(rule) => {
            let (params, inner): (String, Option<&Coloring>) = match rule {
                Rule::Constant(v) => (format!("constant {v}"), None),
                Rule::Mod { modulus, map } => (format!("mod {modulus} {}", join_map(map)), None),
                Rule::Stat { stat, map } => {
                    (format!("stat {} {}", stat.name(), join_map(map)), None)
                }
                Rule::Digit { base, kind, map } => (
                    format!("digit {base} {} {}", kind.name(), join_map(map)),
                    None,
                ),
                Rule::Weight { base, map } => (format!("weight {base} {}", join_map(map)), None),
                Rule::ImportantParity(f) => (format!("important-parity {f}"), None),
                Rule::Support { base, inner } => (format!("support {base}"), Some(inner)),
                Rule::Encode { base, inner } => (format!("encode {base}"), Some(inner)),
                Rule::Doubling { inner } => ("doubling".into(), Some(inner)),
                Rule::SumOf { inner } => ("sum-of".into(), Some(inner)),
                Rule::LambdaMu { inner } => ("lambda-mu".into(), Some(inner)),
                Rule::PrefixSums { inner } => ("prefix-sums".into(), Some(inner)),
            };
            let _ = writeln!(out, "rule {head} {params}");
            if let Some(inner) = inner {
                write_node(inner, out);
            }
        }
        Body::Table(t) => {
            let _ = writeln!(out, "table {head} {}..{}", t.lo, t.hi);
            for (args, color) in window_args(c.arity(), t.lo, t.hi).iter().zip(&t.colors) {
                out.push_str("entry");
                for a in args {
                    let _ = write!(out, " {a}");
                }
                let _ = writeln!(out, " {color}");
            }
            match &t.fallback {
                None => out.push_str("fallback none\n"),
                Some(fb) => {
                    out.push_str("fallback\n");
                    write_node(fb, out);
                }
            }
        }
    }
}

pub fn coloring_to_text(c: &Coloring) -> String {
    let mut out = format!("{COLORING_HEADER}\n");
    write_node(c, &mut out);
    out
}

struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(items: Vec<(usize, &'a str)>) -> Self {
        Lines { items, pos: 0 }
    }

    fn next(&mut self) -> Result<(usize, &'a str)> {
        let last = self.items.last().map_or(0, |l| l.0);
        let item = self
            .items
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::parse(last, "unexpected end of input"))?;
        self.pos += 1;
        Ok(item)
    }

    fn finish(&self) -> Result<()> {
        match self.items.get(self.pos) {
            Some((line, text)) => Err(Error::parse(
                *line,
                format!("unexpected trailing line `{text}`"),
            )),
            None => Ok(()),
        }
    }
}

fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))
}

fn parse_map(line: usize, tok: Option<&str>) -> Result<Vec<u32>> {
    let tok = tok.ok_or_else(|| Error::parse(line, "missing color map"))?;
    tok.split(',')
        .map(|c| num(line, Some(c.trim()), "color"))
        .collect()
}

/// Arity and color count of an inner coloring, when the line omits them.
fn child_defaults(rule_name: &str, arity: Arity, k: u32) -> (Arity, u32) {
    match rule_name {
        "support" => (Arity::Set, k),
        "encode" | "sum-of" => (Arity::Nat, k),
        "doubling" => (Arity::Nat, (k / 2).max(1)),
        "lambda-mu" => (Arity::Tuple(2), k),
        "prefix-sums" => (Arity::Nat, 2),
        _ => (arity, k),
    }
}

/// Splits off `<arity> <k>` if present; otherwise uses the defaults.
fn head<'a>(
    line: usize,
    toks: &mut std::iter::Peekable<impl Iterator<Item = &'a str>>,
    defaults: Option<(Arity, u32)>,
) -> Result<(Arity, u32)> {
    if let Some(arity) = toks.peek().and_then(|t| t.parse::<Arity>().ok()) {
        toks.next();
        let k = num(line, toks.next(), "color count")?;
        return Ok((arity, k));
    }
    defaults.ok_or_else(|| Error::parse(line, "missing arity and color count"))
}

fn parse_node(lines: &mut Lines<'_>, defaults: Option<(Arity, u32)>) -> Result<Coloring> {
    let (line, text) = lines.next()?;
    let mut toks = text.split_whitespace().peekable();
    let wrap = |e: Error| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    };
    match toks.next() {
        Some("rule") => {
            let (arity, k) = head(line, &mut toks, defaults)?;
            let name = toks
                .next()
                .ok_or_else(|| Error::parse(line, "missing rule name"))?;
            let inner = |lines: &mut Lines<'_>| -> Result<Box<Coloring>> {
                Ok(Box::new(parse_node(
                    lines,
                    Some(child_defaults(name, arity, k)),
                )?))
            };
            let rule = match name {
                "constant" => Rule::Constant(num(line, toks.next(), "color")?),
                "mod" => {
                    let modulus = num(line, toks.next(), "modulus")?;
                    Rule::Mod {
                        modulus,
                        map: parse_map(line, toks.next())?,
                    }
                }
                "stat" => {
                    let s = toks.next().unwrap_or("");
                    let stat = Stat::from_name(s)
                        .ok_or_else(|| Error::parse(line, format!("unknown statistic `{s}`")))?;
                    Rule::Stat {
                        stat,
                        map: parse_map(line, toks.next())?,
                    }
                }
                "digit" => {
                    let base = num(line, toks.next(), "base")?;
                    let s = toks.next().unwrap_or("");
                    let kind = DigitKind::from_name(s)
                        .ok_or_else(|| Error::parse(line, format!("unknown digit kind `{s}`")))?;
                    Rule::Digit {
                        base,
                        kind,
                        map: parse_map(line, toks.next())?,
                    }
                }
                "weight" => {
                    let base = num(line, toks.next(), "base")?;
                    Rule::Weight {
                        base,
                        map: parse_map(line, toks.next())?,
                    }
                }
                "important-parity" => {
                    let f = Injection::parse_tokens(&mut toks)
                        .ok_or_else(|| Error::parse(line, "bad injection"))?;
                    Rule::ImportantParity(f)
                }
                "support" => Rule::Support {
                    base: num(line, toks.next(), "base")?,
                    inner: inner(lines)?,
                },
                "encode" => Rule::Encode {
                    base: num(line, toks.next(), "base")?,
                    inner: inner(lines)?,
                },
                "doubling" => Rule::Doubling {
                    inner: inner(lines)?,
                },
                "sum-of" => Rule::SumOf {
                    inner: inner(lines)?,
                },
                "lambda-mu" => Rule::LambdaMu {
                    inner: inner(lines)?,
                },
                "prefix-sums" => Rule::PrefixSums {
                    inner: inner(lines)?,
                },
                other => return Err(Error::parse(line, format!("unknown rule `{other}`"))),
            };
            if let Some(extra) = toks.next() {
                return Err(Error::parse(line, format!("unexpected token `{extra}`")));
            }
            Coloring::rule(arity, k, rule).map_err(wrap)
        }
        Some("table") => {
            let (arity, k) = head(line, &mut toks, defaults)?;
            let window = toks
                .next()
                .ok_or_else(|| Error::parse(line, "missing window"))?;
            let (lo, hi) = window
                .split_once("..")
                .ok_or_else(|| Error::parse(line, format!("bad window `{window}`")))?;
            let lo: u64 = num(line, Some(lo), "window start")?;
            let hi: u64 = num(line, Some(hi), "window end")?;
            if hi < lo || (arity == Arity::Set && hi - lo >= crate::principles::MAX_SET_WINDOW) {
                return Err(Error::parse(line, format!("unsupported window {lo}..{hi}")));
            }
            let expected = window_args(arity, lo, hi);
            let mut entries = Vec::with_capacity(expected.len());
            for args in &expected {
                let (eline, etext) = lines.next()?;
                let mut et = etext.split_whitespace();
                if et.next() != Some("entry") {
                    return Err(Error::parse(eline, "expected an entry line"));
                }
                let nums: Vec<u64> = et
                    .map(|t| num(eline, Some(t), "entry value"))
                    .collect::<Result<_>>()?;
                let (color, got) = nums
                    .split_last()
                    .ok_or_else(|| Error::parse(eline, "empty entry"))?;
                if got != args.as_slice() {
                    return Err(Error::parse(
                        eline,
                        format!("expected entry for {args:?}, found {got:?}"),
                    ));
                }
                entries.push(
                    u32::try_from(*color).map_err(|_| Error::parse(eline, "color too large"))?,
                );
            }
            let (fline, ftext) = lines.next()?;
            let fallback = match ftext.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["fallback", "none"] => None,
                ["fallback"] => Some(parse_node(lines, Some((arity, k)))?),
                _ => {
                    return Err(Error::parse(
                        fline,
                        "expected `fallback none` or `fallback`",
                    ))
                }
            };
            Coloring::table(arity, k, lo, hi, entries, fallback).map_err(wrap)
        }
        _ => Err(Error::parse(
            line,
            format!("expected a rule or table line, found `{text}`"),
        )),
    }
}

pub fn coloring_from_text(text: &str) -> Result<Coloring> {
    let items = content_lines(text);
    match items.first() {
        Some((_, h)) if *h == COLORING_HEADER => {}
        Some((line, h)) => {
            return Err(Error::parse(
                *line,
                format!("expected header `{COLORING_HEADER}`, found `{h}`"),
            ))
        }
        None => return Err(Error::parse(0, "empty coloring file")),
    }
    let mut lines = Lines::new(items[1..].to_vec());
    let c = parse_node(&mut lines, None)?;
    lines.finish()?;
    Ok(c)
}

/// Parses the inline form used on the command line: node lines separated by
/// `;`, with the leading `rule` keyword and the `<arity> <k>` pair optional.
/// Missing arity and color count default to `arity` and `colors` at the top
/// and are inferred for inner colorings.
pub fn parse_rule_expr(expr: &str, arity: Arity, colors: u32) -> Result<Coloring> {
    let items: Vec<(usize, String)> = expr
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            let keyword = s.split_whitespace().next().unwrap_or("");
            let line = if ["rule", "table", "entry", "fallback"].contains(&keyword) {
                s.to_string()
            } else {
                format!("rule {s}")
            };
            (i + 1, line)
        })
        .collect();
    let mut lines = Lines::new(items.iter().map(|(i, s)| (*i, s.as_str())).collect());
    let c = parse_node(&mut lines, Some((arity, colors)))?;
    lines.finish()?;
    Ok(c)
}

fn set_line(out: &mut String, s: &FiniteSet) {
    out.push_str("set");
    for x in s {
        let _ = write!(out, " {x}");
    }
    out.push('\n');
}

pub fn solution_to_text(s: &Solution) -> String {
    let mut out = format!("{SOLUTION_HEADER}\n");
    match &s.shape {
        Shape::Plain(_) => out.push_str("shape plain\n"),
        Shape::Apart(a) => {
            let _ = writeln!(out, "shape apart {}", a.base());
        }
        Shape::Blocks(_) => out.push_str("shape blocks\n"),
        Shape::Polarized(_) => out.push_str("shape polarized\n"),
    }
    match s.claimed_color {
        Some(c) => {
            let _ = writeln!(out, "color {c}");
        }
        None => out.push_str("color none\n"),
    }
    match &s.lengths {
        Some(l) => {
            let _ = writeln!(out, "lengths {}", join_map(l));
        }
        None => out.push_str("lengths none\n"),
    }
    match &s.shape {
        Shape::Plain(set) => set_line(&mut out, set),
        Shape::Apart(a) => set_line(&mut out, a.members()),
        Shape::Blocks(b) => b.blocks().iter().for_each(|x| set_line(&mut out, x)),
        Shape::Polarized(sets) => sets.iter().for_each(|x| set_line(&mut out, x)),
    }
    out
}

pub fn solution_from_text(text: &str) -> Result<Solution> {
    let items = content_lines(text);
    let mut lines = Lines::new(items);
    let (line, header) = lines
        .next()
        .map_err(|_| Error::parse(0, "empty solution file"))?;
    if header != SOLUTION_HEADER {
        return Err(Error::parse(
            line,
            format!("expected header `{SOLUTION_HEADER}`, found `{header}`"),
        ));
    }
    let mut field = |name: &str| -> Result<(usize, Vec<&str>)> {
        let (line, text) = lines.next()?;
        let mut toks = text.split_whitespace();
        if toks.next() != Some(name) {
            return Err(Error::parse(line, format!("expected `{name}` line")));
        }
        Ok((line, toks.collect()))
    };
    let (shape_line, shape) = field("shape")?;
    let (color_line, color) = field("color")?;
    let claimed_color = match color.as_slice() {
        ["none"] => None,
        [c] => Some(num(color_line, Some(c), "color")?),
        _ => {
            return Err(Error::parse(
                color_line,
                "expected `color <c>` or `color none`",
            ))
        }
    };
    let (len_line, lengths) = field("lengths")?;
    let lengths = match lengths.as_slice() {
        ["none"] => None,
        [l] => Some(parse_map(len_line, Some(l))?),
        _ => {
            return Err(Error::parse(
                len_line,
                "expected `lengths a,b` or `lengths none`",
            ))
        }
    };
    let mut sets = Vec::new();
    let mut last_line = len_line;
    while lines.pos < lines.items.len() {
        let (line, text) = lines.next()?;
        let mut toks = text.split_whitespace();
        if toks.next() != Some("set") {
            return Err(Error::parse(line, "expected a `set` line"));
        }
        let elems: Vec<u64> = toks
            .map(|t| num(line, Some(t), "element"))
            .collect::<Result<_>>()?;
        let set = FiniteSet::from_sorted(elems).map_err(|e| Error::parse(line, e.to_string()))?;
        sets.push(set);
        last_line = line;
    }
    let one = |mut sets: Vec<FiniteSet>| -> Result<FiniteSet> {
        if sets.len() != 1 {
            return Err(Error::parse(
                last_line,
                format!("expected exactly one set line, found {}", sets.len()),
            ));
        }
        Ok(sets.remove(0))
    };
    let wrap = |e: Error| Error::parse(shape_line, e.to_string());
    let shape = match shape.as_slice() {
        ["plain"] => Shape::Plain(one(sets)?),
        ["apart", t] => Shape::Apart(
            ApartSet::new(one(sets)?, num(shape_line, Some(t), "base")?).map_err(wrap)?,
        ),
        ["blocks"] => Shape::Blocks(BlockSequence::new(sets).map_err(wrap)?),
        ["polarized"] => Shape::Polarized(sets),
        _ => return Err(Error::parse(shape_line, "unknown shape")),
    };
    Ok(Solution {
        shape,
        claimed_color,
        lengths,
    })
}
