//! Command-line front end. Reports go to `out` and are deterministic for
//! fixed flags; timing and diagnostics go to `err`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::numerics::LengthSpec;
use crate::principles::{
    coloring_from_text, coloring_to_text, parse_rule_expr, solution_from_text, solution_to_text,
    verify, Arity, Coloring, Family, Injection, PrincipleId, Status,
};
use crate::reductions::{
    catalog_instances, catalog_tsv, certify, lookup, CertifyConfig, Decoded, RangeDecoder,
    ReductionStep, Verdict,
};
use crate::search::{enumerate_colorings, solve, witness_number, SearchBudget, SolveConfig};

#[derive(Parser, Debug)]
#[command(
    name = "hindman",
    version,
    about = "Bounded Hindman-type principles: search, verification and reductions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search a solution of a principle on one instance.
    Solve {
        #[command(flatten)]
        principle: PrincipleArgs,
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Write the solution here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against an instance.
    Verify {
        #[command(flatten)]
        principle: PrincipleArgs,
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Map an instance forward along a reduction.
    Reduce {
        #[arg(long)]
        id: String,
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Map a target solution back along a reduction and verify it.
    Pullback {
        #[arg(long)]
        id: String,
        /// The original (source) instance.
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward, solve, pull back and verify over a sweep of instances.
    Certify {
        #[arg(long)]
        id: String,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Number of instances swept.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Enumerate canonical tables over `lo..hi` instead of catalog rules.
        #[arg(long)]
        window: Option<String>,
        /// Fallback rule outside the window.
        #[arg(long)]
        rule: Option<String>,
    },
    /// Decide range membership of an injection from a homogeneous set.
    Decode {
        /// le2, eqA or large.
        #[arg(long, default_value = "le2")]
        mode: String,
        /// Sum length for eqA.
        #[arg(long, default_value_t = 3)]
        a: u32,
        #[arg(long, default_value = "identity")]
        injection: String,
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 10)]
        size: usize,
        #[arg(long = "max-exp", default_value_t = 14)]
        max_exp: u32,
        #[arg(long = "max-nodes", default_value_t = 5_000_000)]
        max_nodes: u64,
    },
    /// List the reductions as tab-separated rows.
    Catalog,
    /// Least N such that every coloring of 1..=N has an apart solution.
    Number {
        #[arg(long, default_value = "<=1")]
        len: LengthSpec,
        #[arg(long, default_value_t = 2)]
        colors: u32,
        #[arg(long, default_value_t = 2)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        apart: u32,
        #[arg(long = "max-n", default_value_t = 64)]
        max_n: u64,
        /// Cap on canonical colorings per N.
        #[arg(long, default_value_t = 1 << 20)]
        count: u64,
    },
}

#[derive(Args, Debug)]
struct PrincipleArgs {
    /// HT, FUT, RT, IPT, IPHT, PHT, HT-exists or RT-large.
    #[arg(long, default_value = "HT")]
    principle: String,
    #[arg(long)]
    len: Option<LengthSpec>,
    #[arg(long, default_value_t = 2)]
    colors: u32,
    #[arg(long)]
    apart: Option<u32>,
    /// Tuple dimension for RT, IPT, IPHT and PHT.
    #[arg(long, default_value_t = 2)]
    dim: u32,
}

impl PrincipleArgs {
    fn build(&self) -> Result<PrincipleId> {
        let family = Family::from_name(&self.principle)
            .ok_or_else(|| Error::domain(format!("unknown principle `{}`", self.principle)))?;
        let mut id = match family {
            Family::HT | Family::FUT => {
                let len = self
                    .len
                    .clone()
                    .ok_or_else(|| Error::domain("--len is required for HT and FUT"))?;
                if family == Family::HT {
                    PrincipleId::ht(len, self.colors, self.apart)
                } else {
                    PrincipleId::fut(len, self.colors)
                }
            }
            Family::HTExists => PrincipleId::ht_exists(self.colors, self.apart),
            Family::RTLarge => PrincipleId::rt_large(self.colors),
            _ => PrincipleId::dimensional(family, self.dim, self.colors, self.apart),
        };
        if family == Family::RTLarge {
            id.apart = self.apart;
        }
        Ok(id)
    }
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Inline rule, e.g. "mod 2 0,1" or "stat sum 0,1".
    #[arg(long)]
    rule: Option<String>,
    /// Instance file in the coloring text format.
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

impl InstanceArgs {
    fn load(&self, arity: Arity, colors: u32) -> Result<Coloring> {
        match (&self.rule, &self.input) {
            (Some(r), None) => parse_rule_expr(r, arity, colors),
            (None, Some(p)) => coloring_from_text(&read(p)?),
            _ => Err(Error::domain("give exactly one of --rule and --in")),
        }
    }
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long, default_value_t = 4)]
    size: usize,
    #[arg(long = "max-exp", default_value_t = 12)]
    max_exp: u32,
    #[arg(long = "max-nodes", default_value_t = 1_000_000)]
    max_nodes: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl BudgetArgs {
    fn build(&self) -> Result<SearchBudget> {
        SearchBudget::new(self.max_exp, self.max_nodes, self.size)
    }

    fn echo(&self) -> String {
        format!(
            "size={} max-exp={} max-nodes={} jobs={}",
            self.size, self.max_exp, self.max_nodes, self.jobs
        )
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p)
        .map_err(|e| Error::domain(format!("cannot read {}: {e}", p.display())))
}

fn write_file(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text).map_err(|e| Error::domain(format!("cannot write {}: {e}", p.display())))
}

/// A finished command: report text for stdout and an exit code.
struct Report {
    text: String,
    code: i32,
}

impl Report {
    fn new() -> Self {
        Report {
            text: String::new(),
            code: 0,
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code: 0 on success, 1 on a negative result, 2 on usage errors.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let stream: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(stream, "{}", e.render());
            return code;
        }
    };
    let start = Instant::now();
    let result = dispatch(cli.command);
    let code = match result {
        Ok(r) => {
            let _ = out.write_all(r.text.as_bytes());
            r.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    };
    let _ = writeln!(err, "elapsed: {:.3}s", start.elapsed().as_secs_f64());
    let _ = out.flush();
    code
}

fn dispatch(cmd: Command) -> Result<Report> {
    match cmd {
        Command::Solve {
            principle,
            instance,
            budget,
            out,
        } => cmd_solve(&principle, &instance, &budget, out.as_deref()),
        Command::Verify {
            principle,
            instance,
            solution,
        } => cmd_verify(&principle, &instance, &solution),
        Command::Reduce { id, instance, out } => cmd_reduce(&id, &instance, out.as_deref()),
        Command::Pullback {
            id,
            instance,
            solution,
            out,
        } => cmd_pullback(&id, &instance, &solution, out.as_deref()),
        Command::Certify {
            id,
            budget,
            count,
            window,
            rule,
        } => cmd_certify(&id, &budget, count, window.as_deref(), rule.as_deref()),
        Command::Decode {
            mode,
            a,
            injection,
            x,
            size,
            max_exp,
            max_nodes,
        } => cmd_decode(&mode, a, &injection, x, size, max_exp, max_nodes),
        Command::Catalog => {
            let mut r = Report::new();
            r.text = catalog_tsv();
            Ok(r)
        }
        Command::Number {
            len,
            colors,
            size,
            apart,
            max_n,
            count,
        } => {
            let mut r = Report::new();
            r.line(format!(
                "command: number len={len} colors={colors} size={size} apart={apart} max-n={max_n}"
            ));
            match witness_number(&len, colors, size, apart, max_n, count) {
                Ok(n) => r.line(format!("number: {n}")),
                Err(Error::Budget(msg)) => {
                    r.line(format!("number: unknown ({msg})"));
                    r.code = 1;
                }
                Err(e) => return Err(e),
            }
            Ok(r)
        }
    }
}

fn cmd_solve(
    p: &PrincipleArgs,
    inst: &InstanceArgs,
    budget: &BudgetArgs,
    out: Option<&Path>,
) -> Result<Report> {
    let principle = p.build()?;
    let coloring = inst.load(principle.instance_arity(), principle.colors)?;
    let config = SolveConfig {
        jobs: budget.jobs.max(1),
        ..SolveConfig::new(budget.build()?)
    };
    let outcome = solve(&principle, &coloring, &config)?;
    let mut r = Report::new();
    r.line(format!(
        "command: solve principle={principle} {}",
        budget.echo()
    ));
    r.line(format!("status: {}", outcome.status));
    if let Some(s) = &outcome.solution {
        r.line(format!("solution: {s}"));
        if let Some(c) = s.claimed_color {
            r.line(format!("color: {c}"));
        }
        if let Some(path) = out {
            write_file(path, &solution_to_text(s))?;
        }
    } else {
        r.code = 1;
    }
    r.text.push_str(&outcome.stat_lines());
    Ok(r)
}

fn cmd_verify(p: &PrincipleArgs, inst: &InstanceArgs, solution: &Path) -> Result<Report> {
    let principle = p.build()?;
    let coloring = inst.load(principle.instance_arity(), principle.colors)?;
    let sol = solution_from_text(&read(solution)?)?;
    let report = verify(&principle, &coloring, &sol)?;
    let mut r = Report::new();
    r.line(format!("command: verify principle={principle}"));
    r.line(format!("solution: {sol}"));
    r.line(format!("result: {report}"));
    r.code = i32::from(!report.is_valid());
    Ok(r)
}

fn step_lines(r: &mut Report, step: &ReductionStep) {
    r.line(format!(
        "reduction: {} ({} <= {})",
        step.id, step.source, step.target
    ));
    r.line(format!("anchor: {}", step.anchor));
    let chain = step.chain();
    if chain.len() > 1 {
        r.line(format!("chain: {}", chain.join(" -> ")));
    }
}

fn cmd_reduce(id: &str, inst: &InstanceArgs, out: Option<&Path>) -> Result<Report> {
    let step = lookup(id)?;
    let coloring = inst.load(step.source.instance_arity(), step.source.colors)?;
    let image = step.forward(&coloring)?;
    let text = coloring_to_text(&image);
    let mut r = Report::new();
    r.line("command: reduce");
    step_lines(&mut r, &step);
    match out {
        Some(path) => write_file(path, &text)?,
        None => r.text.push_str(&text),
    }
    Ok(r)
}

fn cmd_pullback(
    id: &str,
    inst: &InstanceArgs,
    solution: &Path,
    out: Option<&Path>,
) -> Result<Report> {
    let step = lookup(id)?;
    let coloring = inst.load(step.source.instance_arity(), step.source.colors)?;
    let target_solution = solution_from_text(&read(solution)?)?;
    let back = step.backward(&target_solution, &coloring)?;
    let report = verify(&step.source, &coloring, &back)?;
    let mut r = Report::new();
    r.line("command: pullback");
    step_lines(&mut r, &step);
    r.line(format!("target solution: {target_solution}"));
    r.line(format!("source solution: {back}"));
    r.line(format!("verify: {report}"));
    if let Some(path) = out {
        write_file(path, &solution_to_text(&back))?;
    }
    r.code = i32::from(report.status != Status::Valid);
    Ok(r)
}

fn parse_window(w: &str) -> Result<(u64, u64)> {
    let bad = || Error::domain(format!("malformed window `{w}` (expected lo..hi)"));
    let (lo, hi) = w.split_once("..").ok_or_else(bad)?;
    Ok((
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
    ))
}

fn cmd_certify(
    id: &str,
    budget: &BudgetArgs,
    count: usize,
    window: Option<&str>,
    rule: Option<&str>,
) -> Result<Report> {
    let step = lookup(id)?;
    let arity = step.source.instance_arity();
    let k = step.source.colors;
    let instances = match window {
        Some(w) => {
            let (lo, hi) = parse_window(w)?;
            let fallback = rule.map(|r| parse_rule_expr(r, arity, k)).transpose()?;
            enumerate_colorings(arity, k, lo, hi, fallback, 1 << 24)?
                .take(count)
                .collect()
        }
        None => catalog_instances(arity, k, count)?,
    };
    let config = CertifyConfig {
        budget: budget.build()?,
        jobs: budget.jobs.max(1),
    };
    let report = certify(&step, &instances, &config)?;
    let mut r = Report::new();
    let mut head = format!("command: certify count={count} {}", budget.echo());
    if let Some(w) = window {
        let _ = write!(head, " window={w}");
    }
    r.line(head);
    step_lines(&mut r, &step);
    r.line(report.to_string());
    r.line(if report.is_pass() {
        "result: pass"
    } else {
        "result: fail"
    });
    r.code = i32::from(!report.is_pass());
    Ok(r)
}

fn cmd_decode(
    mode: &str,
    a: u32,
    injection: &str,
    x: u64,
    size: usize,
    max_exp: u32,
    max_nodes: u64,
) -> Result<Report> {
    let f: Injection = injection.parse()?;
    let spec = match mode {
        "le2" => LengthSpec::AtMost(2),
        "eqA" | "eqa" => {
            if a < 3 {
                return Err(Error::domain("eqA needs --a >= 3"));
            }
            LengthSpec::Exactly(a)
        }
        "large" => LengthSpec::ExactlyLarge,
        other => return Err(Error::domain(format!("unknown decode mode `{other}`"))),
    };
    let mut r = Report::new();
    r.line(format!(
        "command: decode mode={mode} injection={f} x={x} size={size} max-exp={max_exp} max-nodes={max_nodes}"
    ));
    let truth = if f.in_range(x) {
        Verdict::InRange
    } else {
        Verdict::NotInRange
    };
    let decoded = match RangeDecoder::search(f, spec, size, max_exp, max_nodes)? {
        Some(d) => {
            r.line(format!("set: {} color {}", d.set().members(), d.color()));
            d.decode(x)?
        }
        None => {
            r.line("set: none within budget");
            Decoded {
                verdict: Verdict::Inconclusive,
                n: None,
                k: None,
            }
        }
    };
    let mut line = format!("verdict: {}", decoded.verdict);
    if let Some(n) = decoded.n {
        let _ = write!(line, " n={n}");
    }
    if let Some(k) = decoded.k {
        let _ = write!(line, " k={k}");
    }
    r.line(line);
    r.line(format!("truth: {truth}"));
    let agrees = decoded.verdict == Verdict::Inconclusive || decoded.verdict == truth;
    r.line(format!("agreement: {}", if agrees { "yes" } else { "no" }));
    r.code = i32::from(!agrees);
    Ok(r)
}
