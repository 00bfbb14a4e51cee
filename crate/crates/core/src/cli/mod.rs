//! Command-line interface. [`run`] parses arguments and returns the exit code with
//! everything that would be printed, so it can be driven from tests.

pub mod render;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::activation::{check_dim2_nogo, classify, is_m_activable, verify_activation, Class, ClassifyConfig, MStatus};
use crate::diagram::grid;
use crate::fixtures::{activation_fixture, protocol_fixture, ACTIVATION_FIXTURES, PROTOCOL_FIXTURES};
use crate::measure::{apply, preserves_orthogonality, LocalPvm, OpCheck};
use crate::opsolve::{enumerate_op_pvms, rank1_op_directions, Irreducibility, SolverConfig};
use crate::protocol::{execute_and_verify, lemma1_protocol, lpcc_search, ProtocolTree, SearchConfig, Status, DEFAULT_DEPTH};
use crate::states::{build_named_set, NamedSet, Orthogonality, Partition, StateSet};
use crate::theorems::{lemma, theorem, CheckStatus};

pub use report::{Report, Verdict};

pub const EXIT_CONFIRMED: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "lpcc", version, about = "Exact checks of local distinguishability and nonlocality activation")]
struct Cli {
    /// Machine-readable report on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Forbid the seeded numeric fallback in the solver.
    #[arg(long, global = true)]
    exact_only: bool,
    /// Seed for the numeric fallback.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, inspect and export state sets.
    #[command(subcommand)]
    Sets(SetsCmd),
    /// Apply or check a local projective measurement.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Orthogonality-preserving measurements of a group.
    Solve(SolveArgs),
    /// Verify, search for or construct discrimination protocols.
    #[command(subcommand)]
    Protocol(ProtocolCmd),
    /// Verify that a first-round measurement activates nonlocality.
    Activate(ActivateArgs),
    /// Place a set on the locality line.
    Classify(ClassifyArgs),
    /// Replay one of the bundled theorems (1-5).
    Theorem { n: u32 },
    /// Replay the bundled lemma (1).
    Lemma { n: u32 },
    /// Occupancy grid of a set in a two-block partition.
    Diagram(DiagramArgs),
    /// Check that every rank-1 measurement of the two-dimensional parties reduces the set.
    Nogo(SetArgs),
}

#[derive(Args, Debug, Clone)]
struct SetArgs {
    /// Built-in set (S1, S2, S2prime, S2doubleprime, S1m, S2m, domino, union).
    #[arg(long)]
    name: Option<String>,
    /// Parameter of the S1m / S2m families (also accepted as --name S1m:4). Under
    /// `classify` this is the number of blocks for m-activability instead.
    #[arg(long)]
    m: Option<usize>,
    /// State set JSON file.
    #[arg(long, conflicts_with = "name")]
    file: Option<PathBuf>,
    /// Comma-separated kets, e.g. "00,0(1+2)".
    #[arg(long, conflicts_with_all = ["name", "file"], requires = "dims")]
    kets: Option<String>,
    /// Local dimensions for --kets, e.g. 3,3.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
}

#[derive(Subcommand, Debug)]
enum SetsCmd {
    /// List the built-in sets.
    List,
    /// Print the states.
    Show(SetArgs),
    /// Check mutual orthogonality.
    Check(SetArgs),
    /// Write the set as JSON.
    Export(SetArgs),
}

#[derive(Args, Debug)]
struct PvmArgs {
    /// Measuring parties, e.g. B or BC.
    #[arg(long)]
    group: String,
    /// Elements separated by ';', kets in an element by ',' (e.g. "0,1;2").
    #[arg(long)]
    pvm: String,
}

#[derive(Subcommand, Debug)]
enum MeasureCmd {
    /// Post-measurement branches.
    Apply {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        pvm: PvmArgs,
    },
    /// Whether the measurement preserves orthogonality.
    Check {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        pvm: PvmArgs,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long)]
    group: String,
    /// Also assemble candidate PVMs from the directions.
    #[arg(long)]
    enumerate: bool,
}

#[derive(Subcommand, Debug)]
enum ProtocolCmd {
    /// Execute a protocol script and verify every leaf.
    Run {
        #[command(flatten)]
        set: SetArgs,
        /// Protocol JSON file.
        #[arg(long, conflicts_with = "fixture")]
        script: Option<PathBuf>,
        /// Bundled protocol (s1-protocol, s2-protocol), which also supplies the set.
        #[arg(long)]
        fixture: Option<String>,
    },
    /// Bounded search for a protocol.
    Search {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        partition: Option<String>,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Constructive protocol for product sets with at most two active parties.
    Lemma1(SetArgs),
}

#[derive(Args, Debug)]
struct ActivateArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Bundled first round (s1-activation-b, s2-activation-bc), which also supplies set and partition.
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long, required_unless_present = "fixture")]
    group: Option<String>,
    #[arg(long, required_unless_present = "fixture")]
    pvm: Option<String>,
    /// Defaults to the finest partition.
    #[arg(long)]
    partition: Option<String>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Pair allowed a joint first round, e.g. B,C (repeatable).
    #[arg(long)]
    joint: Vec<String>,
    /// Strong variant of m-activability (with --m).
    #[arg(long, requires = "m")]
    strong: bool,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

#[derive(Args, Debug)]
struct DiagramArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long)]
    partition: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Ascii)]
    format: Format,
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    solver: SolverConfig,
    report: Report,
}

type CmdResult = Result<(Verdict, Value, String), String>;

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_CONFIRMED };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code, stdout: String::new(), stderr: text }
            } else {
                Output { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut solver = if cli.exact_only { SolverConfig::exact() } else { SolverConfig::default() };
    if let Some(seed) = cli.seed {
        solver.seed = seed;
    }
    let echo: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut ctx = Ctx { solver, report: Report::new(echo) };
    let start = Instant::now();
    let result = dispatch(&cli.command, &mut ctx);
    let elapsed = start.elapsed();
    match result {
        Ok((verdict, value, text)) => {
            let code = verdict.exit_code();
            let stdout = if cli.json {
                let r = ctx.report.finish(verdict, value, elapsed);
                serde_json::to_string_pretty(&r).expect("report serializes") + "\n"
            } else {
                text
            };
            Output { code, stdout, stderr: String::new() }
        }
        Err(msg) => Output { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load_set(a: &SetArgs, ctx: &mut Ctx) -> Result<StateSet, String> {
    let set = if let Some(name) = &a.name {
        let (name, m) = match name.split_once(':') {
            Some((n, k)) => (n, Some(k.parse::<usize>().map_err(|_| format!("bad family parameter in {name}"))?)),
            None => (name.as_str(), a.m),
        };
        let n: NamedSet = name.parse().map_err(err)?;
        build_named_set(n, m).map_err(err)?
    } else if let Some(path) = &a.file {
        let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        ctx.report.input(&path.display().to_string(), src.as_bytes());
        StateSet::from_json(&src).map_err(err)?
    } else if let Some(kets) = &a.kets {
        let list: Vec<&str> = kets.split(',').map(str::trim).filter(|k| !k.is_empty()).collect();
        StateSet::from_kets(&a.dims, &list, "user").map_err(err)?
    } else {
        return Err("a set is required: --name, --file or --kets with --dims".into());
    };
    ctx.report.input("set", set.to_json().as_bytes());
    Ok(set)
}

fn parse_partition(src: Option<&str>, s: &StateSet) -> Result<Partition, String> {
    match src {
        Some(p) => Partition::parse(p, s.spec()).map_err(err),
        None => Ok(Partition::finest(s.spec().parties())),
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> CmdResult {
    match cmd {
        Command::Sets(c) => sets(c, ctx),
        Command::Measure(c) => measure(c, ctx),
        Command::Solve(a) => solve(a, ctx),
        Command::Protocol(c) => protocol(c, ctx),
        Command::Activate(a) => activate(a, ctx),
        Command::Classify(a) => classify_cmd(a, ctx),
        Command::Theorem { n } => replay(theorem(*n, &ctx.solver), "theorem", *n),
        Command::Lemma { n } => replay(lemma(*n, &ctx.solver), "lemma", *n),
        Command::Diagram(a) => diagram(a, ctx),
        Command::Nogo(a) => {
            let s = load_set(a, ctx)?;
            let r = check_dim2_nogo(&s, &ctx.solver).map_err(err)?;
            let v = if r.holds { Verdict::Confirmed } else { Verdict::Refuted };
            let text = format!(
                "{} rank-1 measurements of the two-dimensional parties checked; reduction {}\nfirst party: {}\n",
                r.checks.len(),
                if r.holds { "holds" } else { "fails" },
                render::certificate_text(&r.first_party, s.spec())
            );
            Ok((v, render::nogo(&r, s.spec()), text))
        }
    }
}

fn sets(c: &SetsCmd, ctx: &mut Ctx) -> CmdResult {
    match c {
        SetsCmd::List => {
            let names: Vec<&str> = NamedSet::ALL.iter().map(|n| n.name()).collect();
            let mut text = String::new();
            for n in NamedSet::ALL {
                let s = build_named_set(n, n.takes_m().then_some(1)).map_err(err)?;
                let dims: Vec<String> = s.spec().dims().iter().map(|d| d.to_string()).collect();
                let m = if n.takes_m() { " (--m k)" } else { "" };
                text.push_str(&format!("{:<14} {:>3} states in {}{m}\n", n.name(), s.len(), dims.join("x")));
            }
            Ok((Verdict::Confirmed, json!(names), text))
        }
        SetsCmd::Show(a) => {
            let s = load_set(a, ctx)?;
            Ok((Verdict::Confirmed, serde_json::to_value(s.to_json_value()).map_err(err)?, s.to_string()))
        }
        SetsCmd::Export(a) => {
            let s = load_set(a, ctx)?;
            let text = s.to_json() + "\n";
            Ok((Verdict::Confirmed, serde_json::to_value(s.to_json_value()).map_err(err)?, text))
        }
        SetsCmd::Check(a) => {
            let s = load_set(a, ctx)?;
            Ok(match s.check_mutual_orthogonality() {
                Orthogonality::Ok => (
                    Verdict::Confirmed,
                    json!({ "orthogonal": true, "states": s.len() }),
                    format!("orthogonality ok: {} states\n", s.len()),
                ),
                Orthogonality::Witness { i, j, value } => {
                    let (a, b) = (&s.states()[i].label, &s.states()[j].label);
                    (
                        Verdict::Refuted,
                        json!({ "orthogonal": false, "pair": [a, b], "inner": value.to_string() }),
                        format!("not orthogonal: <{a}|{b}> = {value}\n"),
                    )
                }
            })
        }
    }
}

fn measure(c: &MeasureCmd, ctx: &mut Ctx) -> CmdResult {
    let (MeasureCmd::Apply { set, pvm } | MeasureCmd::Check { set, pvm }) = c;
    let s = load_set(set, ctx)?;
    let lp = LocalPvm::parse(s.spec(), &pvm.group, &pvm.pvm).map_err(err)?;
    match c {
        MeasureCmd::Apply { .. } => {
            let bs = apply(&s, &lp).map_err(err)?;
            Ok((Verdict::Confirmed, render::branches(&bs), render::branches_text(&bs)))
        }
        MeasureCmd::Check { .. } => Ok(match preserves_orthogonality(&s, &lp).map_err(err)? {
            OpCheck::Ok => (Verdict::Confirmed, json!({ "preserves": true }), "orthogonality preserved\n".into()),
            OpCheck::Witness { outcome, i, j, value } => {
                let (a, b) = (&s.states()[i].label, &s.states()[j].label);
                (
                    Verdict::Refuted,
                    json!({ "preserves": false, "outcome": outcome, "pair": [a, b], "inner": value.to_string() }),
                    format!("outcome {outcome} breaks orthogonality of {a} and {b} (inner product {value})\n"),
                )
            }
        }),
    }
}

fn solve(a: &SolveArgs, ctx: &mut Ctx) -> CmdResult {
    let s = load_set(&a.set, ctx)?;
    let group = s.spec().parse_group(&a.group).map_err(err)?;
    let dims = render::group_dims(s.spec(), &group);
    let r = rank1_op_directions(&s, &group, &ctx.solver);
    let mut value = json!({ "rank1": render::solution(&r, s.spec()) });
    let mut text = format!(
        "group {} (dimension {}, occupied {})\n",
        s.spec().group_label(&group),
        r.group_dim,
        r.support_dim
    );
    if let Some(n) = &r.none_found {
        text.push_str(&format!("no rank-1 orthogonality-preserving direction ({})\n", n.method));
    }
    for d in &r.solutions {
        match &d.vector {
            Some(v) => text.push_str(&format!("  {} [{}]\n", crate::diagram::ket_string(v, &dims), d.exactness)),
            None => text.push_str(&format!("  {:?} [{}]\n", d.approx, d.exactness)),
        }
    }
    for f in &r.families {
        text.push_str(&format!("  family: {}\n", f.describe()));
    }
    if !r.complete {
        text.push_str(&format!("{} cells unresolved\n", r.unresolved_cells));
    }
    if a.enumerate {
        let e = enumerate_op_pvms(&s, &group, s.spec().group_dim(&group), &ctx.solver);
        value["pvms"] = render::enumeration(&e, s.spec());
        text.push_str(&format!("{} candidate PVMs{}\n", e.pvms.len(), if e.complete { "" } else { " (partial)" }));
        for lp in &e.pvms {
            text.push_str(&format!("  {}\n", render::pvm_string(lp, s.spec())));
        }
    }
    let v = if r.complete { Verdict::Confirmed } else { Verdict::Unknown };
    Ok((v, value, text))
}

fn protocol(c: &ProtocolCmd, ctx: &mut Ctx) -> CmdResult {
    match c {
        ProtocolCmd::Run { set, script, fixture } => {
            let (s, tree) = match (fixture, script) {
                (Some(name), _) => {
                    let fx = protocol_fixture(name)
                        .ok_or_else(|| format!("unknown fixture {name}; available: {}", PROTOCOL_FIXTURES.join(", ")))?
                        .map_err(err)?;
                    ctx.report.input(name, fx.tree.to_json(fx.set.spec()).as_bytes());
                    (fx.set, fx.tree)
                }
                (None, Some(path)) => {
                    let s = load_set(set, ctx)?;
                    let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                    ctx.report.input(&path.display().to_string(), src.as_bytes());
                    let t = ProtocolTree::from_json(&src, s.spec()).map_err(err)?;
                    (s, t)
                }
                (None, None) => return Err("--script or --fixture is required".into()),
            };
            Ok(match execute_and_verify(&s, &tree) {
                Ok(v) => (Verdict::Confirmed, render::verdict(&v, s.spec()), v.to_string()),
                Err(e) => (Verdict::Refuted, json!({ "error": e.to_string() }), format!("protocol rejected: {e}\n")),
            })
        }
        ProtocolCmd::Search { set, partition, depth } => {
            let s = load_set(set, ctx)?;
            let p = parse_partition(partition.as_deref(), &s)?;
            let v = lpcc_search(&s, &p, &SearchConfig { depth: *depth, solver: ctx.solver.clone() });
            let verdict = match &v.status {
                Status::Distinguishable(_) => Verdict::Confirmed,
                Status::Indistinguishable(_) => Verdict::Refuted,
                Status::Unknown(_) => Verdict::Unknown,
            };
            Ok((verdict, render::verdict(&v, s.spec()), v.to_string()))
        }
        ProtocolCmd::Lemma1(a) => {
            let s = load_set(a, ctx)?;
            match lemma1_protocol(&s) {
                Ok(t) => {
                    let v = execute_and_verify(&s, &t).map_err(err)?;
                    Ok((Verdict::Confirmed, render::verdict(&v, s.spec()), v.to_string()))
                }
                Err(e) => Ok((Verdict::Refuted, json!({ "error": e.to_string() }), format!("not applicable: {e}\n"))),
            }
        }
    }
}

fn activate(a: &ActivateArgs, ctx: &mut Ctx) -> CmdResult {
    let (s, lp, p) = if let Some(name) = &a.fixture {
        let fx = activation_fixture(name)
            .ok_or_else(|| format!("unknown fixture {name}; available: {}", ACTIVATION_FIXTURES.join(", ")))?
            .map_err(err)?;
        ctx.report.input(name, fx.set.to_json().as_bytes());
        (fx.set, fx.first, fx.partition)
    } else {
        let s = load_set(&a.set, ctx)?;
        let group = a.group.as_deref().unwrap_or_default();
        let lp = LocalPvm::parse(s.spec(), group, a.pvm.as_deref().unwrap_or_default()).map_err(err)?;
        let p = parse_partition(a.partition.as_deref(), &s)?;
        (s, lp, p)
    };
    let r = verify_activation(&s, &lp, &p, &ctx.solver).map_err(err)?;
    let refuted = r.redundancy.is_redundant()
        || r.branches.iter().any(|b| matches!(b.irreducibility, Irreducibility::Reducible { .. }));
    let v = if r.activated {
        Verdict::Confirmed
    } else if refuted {
        Verdict::Refuted
    } else {
        Verdict::Unknown
    };
    Ok((v, render::activation(&r, s.spec()), render::activation_text(&r, s.spec())))
}

fn classify_cmd(a: &ClassifyArgs, ctx: &mut Ctx) -> CmdResult {
    let set = SetArgs { m: None, ..a.set.clone() };
    let s = load_set(&set, ctx)?;
    let mut config = ClassifyConfig { depth: a.depth, solver: ctx.solver.clone(), ..Default::default() };
    for j in &a.joint {
        let g = s.spec().parse_group(j).map_err(err)?;
        if g.len() != 2 {
            return Err(format!("--joint expects two parties, got {j}"));
        }
        config.joint_pairs.push((g[0], g[1]));
    }
    if let Some(m) = a.set.m {
        let r = is_m_activable(&s, m, a.strong, &config).map_err(err)?;
        let (v, head) = match &r.status {
            MStatus::Activable { partition, .. } => (Verdict::Confirmed, format!("{m}-activable in {}", partition.label(s.spec()))),
            MStatus::NotActivable => (Verdict::Refuted, format!("not {m}-activable")),
            MStatus::Unknown(_) => (Verdict::Unknown, format!("{m}-activability undecided")),
        };
        let mut text = format!("{}{head}\n", if a.strong { "strong: " } else { "" });
        for t in &r.trace {
            text.push_str(&format!("  {t}\n"));
        }
        return Ok((v, render::m_activable(&r, s.spec()), text));
    }
    let c = classify(&s, &config);
    let v = if c.class == Class::Unknown { Verdict::Unknown } else { Verdict::Confirmed };
    let mut text = c.class.to_string();
    if let Some(e) = &c.evidence {
        text.push_str(&format!(" ({e})"));
    }
    text.push('\n');
    if let Some(w) = &c.witness {
        text.push_str(&render::activation_text(w, s.spec()));
    }
    for t in &c.trace {
        text.push_str(&format!("  {t}\n"));
    }
    Ok((v, render::locality(&c, s.spec()), text))
}

fn replay(r: Option<crate::theorems::TheoremReport>, what: &str, n: u32) -> CmdResult {
    let r = r.ok_or_else(|| format!("no bundled {what} {n}"))?;
    let v = match r.status() {
        CheckStatus::Pass => Verdict::Confirmed,
        CheckStatus::Fail => Verdict::Refuted,
        CheckStatus::Unknown => Verdict::Unknown,
    };
    Ok((v, serde_json::to_value(&r).map_err(err)?, r.to_string()))
}

fn diagram(a: &DiagramArgs, ctx: &mut Ctx) -> CmdResult {
    let s = load_set(&a.set, ctx)?;
    let p = parse_partition(a.partition.as_deref(), &s)?;
    let g = grid(&s, &p).map_err(err)?;
    let doc = match a.format {
        Format::Ascii => g.to_ascii(),
        Format::Svg => g.to_svg(),
    };
    let value = json!({ "rows": g.rows, "cols": g.cols, "cells": g.cells, "labels": g.labels, "document": doc });
    Ok((Verdict::Confirmed, value, doc))
}
