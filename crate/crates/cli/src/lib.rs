//! `densekit` command line: generators, solvers, reductions and the CSP engine.
//!
//! Every command prints either an instance (for `gen`) or a pretty JSON report with
//! sorted keys and `"schema": 1`. All randomness comes from `--seed`.

pub mod gen;
pub mod oracles;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use densekit::csp::{self, Assignment, Csp2Instance};
use densekit::dkc_gp::{approx_dkc, approx_gp, LpDkc, LpGp};
use densekit::dks::{bdks_via_dks, dks_via_bdks, BdksFromDks, DksFromBdks};
use densekit::gp_mbcs::{crossing_upper_bound, gp_via_mbcs, mbcs_via_gp, GpViaMbcs, MbcsViaGp};
use densekit::inflate::{dks_via_dkc, dks_via_gp, DksViaDkc, DksViaGp};
use densekit::oracle::{BdksOracle, DkcOracle, DksOracle, GpOracle, GpSolution, MbcsOracle, OracleDescriptor};
use densekit::{parse_bipartite, parse_graph, BipartiteGraph, Graph, Profile, SidedSet, Subgraph, VertexSet};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use oracles::{Base, OracleSpec};

pub const SCHEMA: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Core(#[from] densekit::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use densekit::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                E::Parse(_) => 2,
                E::InvalidVertex(..)
                | E::InvalidEdge(..)
                | E::InvalidParameter(_)
                | E::Precondition(_)
                | E::NoBalancedCut
                | E::Degenerate
                | E::ProfileInequality(..) => 3,
                _ => 4,
            },
        }
    }
}

impl From<densekit::ParseError> for CliError {
    fn from(e: densekit::ParseError) -> Self {
        CliError::Core(e.into())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "densekit", version, about = "Dense subgraph solvers and the reductions between them")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one problem with the chosen oracle.
    Solve(SolveArgs),
    /// Run a reduction on top of a sub-oracle.
    Reduce(ReduceArgs),
    /// Label-cover style CSP engine.
    #[command(subcommand)]
    Csp(CspCommand),
    /// Write a seeded instance to stdout.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = Profile::Desk)]
    profile: Profile,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Params {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    h: Option<usize>,
    /// Crossing budget for MBCS.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Problem {
    Dks,
    Bdks,
    Dkc,
    Gp,
    Mbcs,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(value_enum)]
    problem: Problem,
    /// Edge list (`n m` header) or, for bdks, bipartite list (`nA nB m` header).
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    params: Params,
    #[arg(long, default_value = "exact")]
    oracle: OracleSpec,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Route {
    BdksFromDks,
    DksFromBdks,
    DkcFromBdks,
    GpFromBdks,
    DksFromDkc,
    DksFromGp,
    MbcsFromGp,
    GpFromMbcs,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(value_enum)]
    route: Route,
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    params: Params,
    /// Sub-oracle fed to the reduction.
    #[arg(long, default_value = "exact")]
    oracle: OracleSpec,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct CspRun {
    #[arg(long)]
    instance: PathBuf,
    /// BDkS oracle: exact or greedy.
    #[arg(long, default_value = "exact")]
    oracle: OracleSpec,
    /// Approximation ratio credited to the oracle.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum CspCommand {
    /// Print YES or NO, then the report.
    Decide(CspRun),
    /// Partition the constraints into bad sets and good rounds with witnesses.
    Decompose(CspRun),
    /// Check that no assignment satisfies more than |C'|/gamma of the listed constraints.
    VerifyBad {
        #[arg(long)]
        instance: PathBuf,
        /// Comma separated constraint ids, or `all`.
        #[arg(long, default_value = "all")]
        constraints: String,
        #[arg(long, default_value_t = 4.0)]
        gamma: f64,
    },
    /// Check that a witness satisfies at least |C'|/beta^3 of the listed constraints.
    VerifyGood {
        #[arg(long)]
        instance: PathBuf,
        /// JSON object `{"x": [..], "y": [..]}` with 0-based values.
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, default_value = "all")]
        constraints: String,
        /// Defaults to the profile's beta for the instance.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = Profile::Desk)]
        profile: Profile,
    },
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    Gnp {
        #[arg(long)]
        n: usize,
        /// Second side; makes the output bipartite.
        #[arg(long)]
        nb: Option<usize>,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    PlantedDense {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        p_in: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    PlantedCsp {
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        c: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    DisjointCliques {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
}

/// What a finished invocation wants printed, and its exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("densekit: error: {e}\n") },
    }
}

fn dispatch(cmd: Command) -> CliResult<String> {
    match cmd {
        Command::Solve(a) => solve(a).map(render),
        Command::Reduce(a) => reduce(a).map(render),
        Command::Csp(c) => run_csp(c),
        Command::Gen(g) => run_gen(g),
    }
}

fn render(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("reports are plain JSON values");
    s.push('\n');
    s
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), msg: e.to_string() })
}

fn load_graph(path: &Path) -> CliResult<Graph> {
    Ok(parse_graph(&read(path)?)?)
}

fn load_bipartite(path: &Path) -> CliResult<BipartiteGraph> {
    Ok(parse_bipartite(&read(path)?)?)
}

fn load_csp(path: &Path) -> CliResult<Csp2Instance> {
    Ok(csp::parse_csp(&read(path)?)?)
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn broken(what: String) -> CliError {
    CliError::Core(densekit::Error::Invariant(what))
}

fn header(command: &str, name: &str, run: &RunArgs, spec: OracleSpec) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert(if command == "solve" { "problem" } else { "route" }.into(), json!(name));
    m.insert("profile".into(), json!(run.profile.name()));
    m.insert("seed".into(), json!(run.seed));
    m.insert("oracle_spec".into(), json!(spec.to_string()));
    m
}

fn params_json(p: &Params) -> Value {
    json!({ "k": p.k, "k1": p.k1, "k2": p.k2, "r": p.r, "h": p.h, "budget": p.budget })
}

fn check_dks(g: &Graph, s: &VertexSet, k: usize) -> CliResult<usize> {
    g.check_set(s)?;
    if s.len() > k {
        return Err(broken(format!("{} vertices returned for k = {k}", s.len())));
    }
    Ok(g.induced_edge_count(s)?)
}

fn check_bdks(g: &BipartiteGraph, s: &SidedSet, k1: usize, k2: usize) -> CliResult<usize> {
    g.check(s)?;
    if s.a.len() > k1 || s.b.len() > k2 {
        return Err(broken(format!("sides {}×{} exceed {k1}×{k2}", s.a.len(), s.b.len())));
    }
    Ok(g.edge_count(s))
}

fn check_mbcs(g: &Graph, s: &Subgraph, budget: u64) -> CliResult<usize> {
    s.validate(g)?;
    let crossing = crossing_upper_bound(s);
    if crossing > budget {
        return Err(broken(format!("crossing bound {crossing} exceeds budget {budget}")));
    }
    Ok(s.edge_count())
}

fn check_gp(g: &Graph, s: &GpSolution, r: usize, h: usize) -> CliResult<usize> {
    s.validate(g, r, h)?;
    Ok(s.value)
}

fn guarantee(inner: &OracleDescriptor, outer: &OracleDescriptor) -> Value {
    json!({ "alpha_in": inner.alpha, "alpha_out": outer.alpha })
}

fn solve(a: SolveArgs) -> CliResult<Value> {
    let name = format!("{:?}", a.problem).to_lowercase();
    let mut out = header("solve", &name, &a.run, a.oracle);
    out.insert("params".into(), params_json(&a.params));
    let (profile, seed, p) = (a.run.profile, a.run.seed, &a.params);
    let (value, solution, descriptor, trace) = match a.problem {
        Problem::Dks => {
            let g = load_graph(&a.graph)?;
            let k = need(p.k, "k")?;
            let o = oracles::dks(a.oracle)?;
            let s = o.solve(&g, k)?;
            (check_dks(&g, &s, k)?, to_json(&s), o.descriptor(), json!({ "oracle_calls": 1 }))
        }
        Problem::Bdks => {
            let g = load_bipartite(&a.graph)?;
            let (k1, k2) = (need(p.k1, "k1")?, need(p.k2, "k2")?);
            let o = oracles::bdks(a.oracle)?;
            let s = o.solve(&g, k1, k2)?;
            (check_bdks(&g, &s, k1, k2)?, to_json(&s), o.descriptor(), json!({ "oracle_calls": 1 }))
        }
        Problem::Dkc => {
            let g = load_graph(&a.graph)?;
            let k = need(p.k, "k")?;
            let o = oracles::dkc(a.oracle, profile, seed);
            let (s, padding, trace) = match a.oracle {
                OracleSpec::Lp(b) => {
                    let (s, report) = approx_dkc(&g, k, &*oracles::bdks_base(b), &profile.lp(), &mut rng(seed))?;
                    (s, report.padding, to_json(&report))
                }
                OracleSpec::Base(_) => (o.solve(&g, k)?, 0, json!({ "oracle_calls": 1 })),
            };
            s.validate(&g.with_isolated(padding), k)?;
            (s.value, to_json(&s), o.descriptor(), trace)
        }
        Problem::Gp => {
            let g = load_graph(&a.graph)?;
            let (r, h) = (need(p.r, "r")?, need(p.h, "h")?);
            let o = oracles::gp(a.oracle, profile, seed);
            let (s, trace) = match a.oracle {
                OracleSpec::Lp(b) => {
                    let (s, report) = approx_gp(&g, r, h, &*oracles::bdks_base(b), &profile.lp(), &mut rng(seed))?;
                    (s, to_json(&report))
                }
                OracleSpec::Base(_) => (o.solve(&g, r, h)?, json!({ "oracle_calls": 1 })),
            };
            (check_gp(&g, &s, r, h)?, to_json(&s), o.descriptor(), trace)
        }
        Problem::Mbcs => {
            let g = load_graph(&a.graph)?;
            let budget = need(p.budget, "budget")?;
            let o = oracles::mbcs(a.oracle, profile, seed);
            let (s, trace) = match a.oracle {
                OracleSpec::Lp(_) => {
                    let report = mbcs_via_gp(&g, budget, &*oracles::gp(a.oracle, profile, seed), &profile.cut())?;
                    let trace = json!({ "candidates": to_json(&report.candidates), "certificate": to_json(&report.certificate) });
                    (report.subgraph, trace)
                }
                OracleSpec::Base(_) => (o.solve(&g, budget)?, json!({ "oracle_calls": 1 })),
            };
            (check_mbcs(&g, &s, budget)?, to_json(&s), o.descriptor(), trace)
        }
    };
    out.insert("value".into(), json!(value));
    out.insert("solution".into(), solution);
    out.insert("guarantee".into(), json!({ "alpha": descriptor.alpha, "exact": descriptor.exact }));
    out.insert("oracle".into(), to_json(&descriptor));
    out.insert("trace".into(), trace);
    Ok(Value::Object(out))
}

fn base_only(spec: OracleSpec, what: &str) -> CliResult<Base> {
    match spec {
        OracleSpec::Base(b) => Ok(b),
        OracleSpec::Lp(_) => Err(CliError::Usage(format!("the {what} sub-oracle must be exact or greedy"))),
    }
}

fn reduce(a: ReduceArgs) -> CliResult<Value> {
    let name = a.route.to_possible_value().expect("routes have names").get_name().to_string();
    let mut out = header("reduce", &name, &a.run, a.oracle);
    out.insert("params".into(), params_json(&a.params));
    let (profile, seed, p) = (a.run.profile, a.run.seed, &a.params);
    let (value, solution, guar, trace) = match a.route {
        Route::BdksFromDks => {
            let g = load_bipartite(&a.graph)?;
            let (k1, k2) = (need(p.k1, "k1")?, need(p.k2, "k2")?);
            let w = BdksFromDks(oracles::dks(a.oracle)?);
            let b = bdks_via_dks(&g, k1, k2, &*w.0)?;
            let value = check_bdks(&g, &b.solution, k1, k2)?;
            (
                value,
                to_json(&b.solution),
                guarantee(&w.0.descriptor(), &w.descriptor()),
                json!({ "oracle_value": b.oracle_value }),
            )
        }
        Route::DksFromBdks => {
            let g = load_graph(&a.graph)?;
            let k = need(p.k, "k")?;
            let w = DksFromBdks(oracles::bdks(a.oracle)?);
            let b = dks_via_bdks(&g, k, &*w.0)?;
            let value = check_dks(&g, &b.solution, k)?;
            (
                value,
                to_json(&b.solution),
                guarantee(&w.0.descriptor(), &w.descriptor()),
                json!({ "oracle_value": b.oracle_value }),
            )
        }
        Route::DkcFromBdks => {
            let g = load_graph(&a.graph)?;
            let k = need(p.k, "k")?;
            let w = LpDkc { bdks: oracles::bdks_base(base_only(a.oracle, "bdks")?), cfg: profile.lp(), seed };
            let (s, report) = approx_dkc(&g, k, &*w.bdks, &w.cfg, &mut rng(seed))?;
            s.validate(&g.with_isolated(report.padding), k)?;
            (s.value, to_json(&s), guarantee(&w.bdks.descriptor(), &DkcOracle::descriptor(&w)), to_json(&report))
        }
        Route::GpFromBdks => {
            let g = load_graph(&a.graph)?;
            let (r, h) = (need(p.r, "r")?, need(p.h, "h")?);
            let w = LpGp { bdks: oracles::bdks_base(base_only(a.oracle, "bdks")?), cfg: profile.lp(), seed };
            let (s, report) = approx_gp(&g, r, h, &*w.bdks, &w.cfg, &mut rng(seed))?;
            let value = check_gp(&g, &s, r, h)?;
            (value, to_json(&s), guarantee(&w.bdks.descriptor(), &GpOracle::descriptor(&w)), to_json(&report))
        }
        Route::DksFromDkc => {
            let g = load_graph(&a.graph)?;
            let k = need(p.k, "k")?;
            let w = DksViaDkc { dkc: oracles::dkc(a.oracle, profile, seed), cfg: profile.inflation(), seed };
            let (s, report) = dks_via_dkc(&g, k, &*w.dkc, &w.cfg, &mut rng(seed))?;
            let value = check_dks(&g, &s, k)?;
            (value, to_json(&s), guarantee(&w.dkc.descriptor(), &w.descriptor()), to_json(&report))
        }
        Route::DksFromGp => {
            let g = load_graph(&a.graph)?;
            let k = need(p.k, "k")?;
            let w = DksViaGp { gp: oracles::gp(a.oracle, profile, seed), cfg: profile.inflation(), seed };
            let (s, report) = dks_via_gp(&g, k, &*w.gp, &w.cfg, &mut rng(seed))?;
            let value = check_dks(&g, &s, k)?;
            (value, to_json(&s), guarantee(&w.gp.descriptor(), &w.descriptor()), to_json(&report))
        }
        Route::MbcsFromGp => {
            let g = load_graph(&a.graph)?;
            let budget = need(p.budget, "budget")?;
            let w = MbcsViaGp { gp: oracles::gp(a.oracle, profile, seed), profile: profile.cut() };
            let report = mbcs_via_gp(&g, budget, &*w.gp, &w.profile)?;
            let value = check_mbcs(&g, &report.subgraph, budget)?;
            let trace =
                json!({ "candidates": to_json(&report.candidates), "certificate": to_json(&report.certificate) });
            (value, to_json(&report.subgraph), guarantee(&w.gp.descriptor(), &w.descriptor()), trace)
        }
        Route::GpFromMbcs => {
            let g = load_graph(&a.graph)?;
            let (r, h) = (need(p.r, "r")?, need(p.h, "h")?);
            let w = GpViaMbcs { mbcs: oracles::mbcs(a.oracle, profile, seed), profile: profile.cut(), seed };
            let report = gp_via_mbcs(&g, r, h, &*w.mbcs, &w.profile, &mut rng(seed))?;
            let value = check_gp(&g, &report.solution, r, h)?;
            (value, to_json(&report.solution), guarantee(&w.mbcs.descriptor(), &w.descriptor()), to_json(&report.trace))
        }
    };
    out.insert("value".into(), json!(value));
    out.insert("solution".into(), solution);
    out.insert("guarantee".into(), guar);
    out.insert("trace".into(), trace);
    Ok(Value::Object(out))
}

fn constraint_ids(inst: &Csp2Instance, list: &str) -> CliResult<Vec<usize>> {
    if list.trim() == "all" {
        return Ok(inst.all_ids());
    }
    let mut ids = Vec::new();
    for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let id: usize = tok.parse().map_err(|_| CliError::Usage(format!("bad constraint id `{tok}`")))?;
        if id >= inst.m() {
            return Err(CliError::Usage(format!("constraint id {id} out of range (m = {})", inst.m())));
        }
        ids.push(id);
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

fn csp_header(action: &str, c: &CspRun, inst: &Csp2Instance) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!("csp"));
    m.insert("action".into(), json!(action));
    m.insert("profile".into(), json!(c.run.profile.name()));
    m.insert("seed".into(), json!(c.run.seed));
    m.insert("oracle_spec".into(), json!(c.oracle.to_string()));
    m.insert(
        "instance".into(),
        json!({ "nx": inst.nx(), "ny": inst.ny(), "alphabet": inst.alphabet(), "constraints": inst.m() }),
    );
    m
}

fn csp_oracle(c: &CspRun) -> CliResult<Box<dyn BdksOracle>> {
    oracles::bdks(c.oracle)
}

fn run_csp(cmd: CspCommand) -> CliResult<String> {
    match cmd {
        CspCommand::Decide(c) => {
            let inst = load_csp(&c.instance)?;
            let cfg = c.run.profile.csp(&inst, c.alpha);
            let d = csp::decide_yes_no(&inst, &*csp_oracle(&c)?, &cfg, &mut rng(c.run.seed))?;
            if let Some(dec) = &d.decomposition {
                check_decomposition(&inst, dec, &cfg)?;
            }
            let mut out = csp_header("decide", &c, &inst);
            out.insert("answer".into(), to_json(&d.answer));
            out.insert("bad".into(), json!(d.bad));
            out.insert("round_sizes".into(), json!(d.round_sizes));
            out.insert("exhaustive".into(), json!(d.exhaustive));
            out.insert("config".into(), to_json(&cfg));
            Ok(format!("{}\n{}", d.answer, render(Value::Object(out))))
        }
        CspCommand::Decompose(c) => {
            let inst = load_csp(&c.instance)?;
            let cfg = c.run.profile.csp(&inst, c.alpha);
            let dec = csp::main_decompose(&inst, &*csp_oracle(&c)?, &cfg, &mut rng(c.run.seed))?;
            check_decomposition(&inst, &dec, &cfg)?;
            let mut out = csp_header("decompose", &c, &inst);
            out.insert("config".into(), to_json(&cfg));
            out.insert("decomposition".into(), to_json(&dec));
            Ok(render(Value::Object(out)))
        }
        CspCommand::VerifyBad { instance, constraints, gamma } => {
            let inst = load_csp(&instance)?;
            let ids = constraint_ids(&inst, &constraints)?;
            let bad = csp::verify_bad_set(&inst, &ids, gamma)?;
            let (best, _) = csp::max_satisfied(&inst, &ids, csp::DEFAULT_CSP_CEILING)?;
            Ok(render(json!({
                "schema": SCHEMA,
                "command": "csp",
                "action": "verify-bad",
                "constraints": ids.len(),
                "gamma": gamma,
                "max_satisfied": best,
                "bad": bad,
            })))
        }
        CspCommand::VerifyGood { instance, witness, constraints, beta, profile } => {
            let inst = load_csp(&instance)?;
            let ids = constraint_ids(&inst, &constraints)?;
            let asg: Assignment = serde_json::from_str(&read(&witness)?)
                .map_err(|e| CliError::Usage(format!("witness {}: {e}", witness.display())))?;
            if asg.x.len() != inst.nx()
                || asg.y.len() != inst.ny()
                || asg.x.iter().chain(&asg.y).any(|&v| v >= inst.alphabet())
            {
                return Err(CliError::Usage("witness does not match the instance".into()));
            }
            let beta = beta.unwrap_or_else(|| profile.csp(&inst, 1.0).beta);
            let good = csp::verify_good_witness(&inst, &ids, &asg, beta);
            Ok(render(json!({
                "schema": SCHEMA,
                "command": "csp",
                "action": "verify-good",
                "constraints": ids.len(),
                "beta": beta,
                "quota": csp::good_quota(ids.len(), beta),
                "satisfied": inst.count_satisfied(&ids, &asg),
                "good": good,
            })))
        }
    }
}

/// Re-checks a decomposition before it is printed: exact partition, bad sets verified,
/// witnesses verified.
fn check_decomposition(inst: &Csp2Instance, dec: &csp::MainDecomposition, cfg: &csp::CspConfig) -> CliResult<()> {
    let mut seen = vec![0usize; inst.m()];
    for &c in dec.bad.iter().chain(dec.rounds.iter().flat_map(|r| r.good.iter())) {
        seen[c] += 1;
    }
    if seen.iter().any(|&s| s != 1) {
        return Err(broken("decomposition is not a partition of the constraints".into()));
    }
    if !dec.bad.is_empty() && !csp::verify_bad_set(inst, &dec.bad, cfg.gamma)? {
        return Err(broken("bad part is satisfiable beyond its threshold".into()));
    }
    for round in &dec.rounds {
        if !csp::verify_good_witness(inst, &round.good, &round.witness, cfg.beta) {
            return Err(broken("round witness misses its quota".into()));
        }
    }
    Ok(())
}

fn run_gen(cmd: GenCommand) -> CliResult<String> {
    match cmd {
        GenCommand::Gnp { n, nb, p, seed } => gen::gnp(n, nb, p, &mut rng(seed)),
        GenCommand::PlantedDense { n, k, p, p_in, seed } => gen::planted_dense(n, k, p, p_in, &mut rng(seed)),
        GenCommand::PlantedCsp { x, y, a, c, d, seed } => gen::planted(x, y, a, c, d, &mut rng(seed)),
        GenCommand::DisjointCliques { sizes } => gen::disjoint_cliques(&sizes),
    }
}
