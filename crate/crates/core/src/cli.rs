//! The `charsub` command line. [`run`] is the whole program minus process
//! exit, so tests can drive it directly.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::acceptance::{self, DEFAULT_SEED};
use crate::arith::Rational;
use crate::density::{
    block_counts, c2_witness_search, check_c1, decide_statistical_t_d, lift, per_block_c1c2_bound, statistical_trace,
    upper_density, DensityEstimate, IndexSet, Strategy, DEFAULT_EXTRA_BLOCKS,
};
use crate::error::Error;
use crate::lemma_lab::{rationals_experiment, sweep_l2, t1_threshold_experiment, verify_basic1, verify_l1, verify_l3};
use crate::membership::{
    decide_t_u, derived_covering, orbit, verify_t0_hypotheses, ChainLike, CirclePoint, DecideConfig, DEFAULT_RATIO_CAP,
    DEFAULT_WINDOW,
};
use crate::sequences::{ArithChain, DerivedSeq, IntSequence, SeqDescriptor};

#[derive(Parser, Debug)]
#[command(name = "charsub", version, about = "Exact computations with characterized subgroups of the circle group")]
struct Cli {
    /// Emit JSON (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Emit CSV with a header row.
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: number of processors).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Run the acceptance suite.
    #[arg(long)]
    selftest: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
struct SeqArgs {
    /// Sequence descriptor, e.g. `factorial`, `geometric:2`, `ratios:2,3:repeat`, `ratios::pow2`.
    #[arg(long)]
    seq: SeqDescriptor,
    /// Use the derived sequence of the chain.
    #[arg(long)]
    derived: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sequence construction.
    #[command(subcommand)]
    Seq(SeqCommand),
    /// Seminorms `‖u_n x‖` for `n = 1..=horizon`.
    Orbit {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        x: CirclePoint,
        #[arg(long, default_value_t = 20)]
        horizon: u64,
    },
    /// Decide `x ∈ t_u(𝕋)` with a certificate.
    Member {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        x: CirclePoint,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: u64,
        #[arg(long, default_value_t = DEFAULT_RATIO_CAP)]
        cap: i64,
    },
    /// Check bounded ratios and anchor divisibility on a prefix.
    VerifyT0 {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 50)]
        horizon: u64,
    },
    /// Finite-horizon upper density of an index set.
    Density {
        /// `naturals`, `every:N`, `geometric:C`, `explicit:1,4,9`, `ranges:1-5,9-12`.
        #[arg(long)]
        set: IndexSet,
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value_t = 1)]
        tail_start: u64,
    },
    /// Union of derived blocks over an index set.
    Lift {
        #[arg(long)]
        seq: SeqDescriptor,
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        set: IndexSet,
    },
    /// Prefix evidence for block growth.
    C1 {
        #[arg(long)]
        seq: SeqDescriptor,
        #[arg(long, default_value_t = 60)]
        blocks: usize,
        /// Also tabulate the per-block density bound for this growth factor.
        #[arg(long)]
        tau: Option<Rational>,
    },
    /// Search for an infinite block set with a sparse lift.
    C2Search {
        #[arg(long)]
        seq: SeqDescriptor,
        #[arg(long, default_value_t = 64)]
        blocks: usize,
        #[arg(long, default_value_t = 1)]
        tail_start: u64,
        /// Repeatable; defaults to geometric:3/2, geometric:2, geometric:4, every:8, greedy:4.
        #[arg(long)]
        strategy: Vec<Strategy>,
    },
    /// Exact per-block exceptional counts.
    Blocks {
        #[arg(long)]
        seq: SeqDescriptor,
        #[arg(long)]
        x: CirclePoint,
        #[arg(long)]
        eps: Rational,
        #[arg(long, default_value_t = 20)]
        blocks: usize,
    },
    /// Decide statistical membership for the derived sequence.
    Smember {
        #[arg(long)]
        seq: SeqDescriptor,
        #[arg(long)]
        x: CirclePoint,
        #[arg(long, default_value_t = DEFAULT_EXTRA_BLOCKS)]
        extra_blocks: usize,
    },
    /// Density trace of `{n : ‖u_n x‖ >= eps}` by enumeration.
    Strace {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        x: CirclePoint,
        #[arg(long)]
        eps: Rational,
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value_t = 1)]
        tail_start: u64,
    },
    /// Lemma verifiers.
    #[command(subcommand)]
    Lemma(LemmaCommand),
    /// Experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Subcommand, Debug)]
enum SeqCommand {
    /// The first terms and ratios of a chain.
    Gen {
        #[arg(long)]
        seq: SeqDescriptor,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Anchors and leading terms of the derived sequence.
    Derive {
        #[arg(long)]
        seq: SeqDescriptor,
        #[arg(long, default_value_t = 5)]
        blocks: usize,
        /// Maximum number of terms listed.
        #[arg(long, default_value_t = 1000)]
        limit: u64,
    },
}

#[derive(Subcommand, Debug)]
enum LemmaCommand {
    /// Multiples of α in a closed interval; `--cases N` samples random instances.
    L1 {
        #[arg(long, allow_hyphen_values = true)]
        low: Option<Rational>,
        #[arg(long, allow_hyphen_values = true)]
        high: Option<Rational>,
        #[arg(long)]
        alpha: Option<Rational>,
        #[arg(long)]
        cases: Option<u64>,
    },
    /// Exhaustive sweep of the `p/9` counting bound.
    L2 {
        #[arg(long, default_value_t = 300)]
        pmax: u64,
        #[arg(long, default_value_t = 64)]
        denmax: u64,
        #[arg(long, value_delimiter = ',', default_value = "1/10,1/20,1/100")]
        eps: Vec<Rational>,
    },
    /// Least block `k >= l` with `|N_k(eps)| >= |N_k| / 9`.
    L3 {
        #[arg(long)]
        seq: SeqDescriptor,
        #[arg(long)]
        x: CirclePoint,
        #[arg(long)]
        eps: Rational,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 60)]
        blocks: usize,
    },
    /// Escape witness `v_m ‖z‖ > 1/(2q)` with its sandwich.
    B1 {
        #[arg(long)]
        seq: SeqDescriptor,
        #[arg(long, allow_hyphen_values = true)]
        z: Rational,
        /// Ratio bound; defaults to the largest ratio of the materialized prefix.
        #[arg(long)]
        q: Option<Rational>,
        #[arg(long, default_value_t = 64)]
        count: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Every reduced p/q with q <= Q is a member for the factorial-derived sequence.
    Kunen {
        #[arg(long, default_value_t = 200)]
        q: u64,
    },
    /// Block-end densities against the threshold `(1/10)(1 - 1/τ)`.
    T1 {
        #[arg(long)]
        seq: SeqDescriptor,
        #[arg(long)]
        x: CirclePoint,
        #[arg(long)]
        eps: Rational,
        #[arg(long, default_value_t = 20)]
        blocks: usize,
    },
}

/// Exit status and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// A command's result: JSON, an optional table for `--csv`, and whether its
/// assertions held.
struct Report {
    json: Value,
    table: Option<Table>,
    ok: bool,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Report {
    fn new(value: impl Serialize) -> Self {
        Report { json: serde_json::to_value(value).expect("serializable"), table: None, ok: true }
    }

    fn table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table { header, rows });
        self
    }

    fn ok(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::HorizonExhausted { .. }) { EXIT_ASSERTION } else { EXIT_USAGE };
        Failure { code, kind: e.kind(), message: e.to_string() }
    }
}

type CmdResult = std::result::Result<Report, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: EXIT_OK, stdout: e.to_string(), stderr: String::new() };
            }
            let msg = e.render().to_string();
            return failure(&argv, Failure { code: EXIT_USAGE, kind: "usage", message: msg.trim().to_string() });
        }
    };
    let threads = cli.workers.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => return failure(&argv, Failure { code: EXIT_USAGE, kind: "usage", message: e.to_string() }),
    };
    let result = pool.install(|| dispatch(&cli));
    match result {
        Ok(report) => render(&argv, &cli, report),
        Err(f) => failure(&argv, f),
    }
}

fn failure(argv: &[String], f: Failure) -> Outcome {
    let body = json!({ "error": f.kind, "message": f.message, "args": argv.get(1..).unwrap_or(&[]) });
    Outcome { code: f.code, stdout: String::new(), stderr: format!("{body}\n") }
}

fn render(argv: &[String], cli: &Cli, report: Report) -> Outcome {
    let code = if report.ok { EXIT_OK } else { EXIT_ASSERTION };
    let stdout = if cli.csv {
        let Some(table) = report.table else {
            return failure(argv, Failure { code: EXIT_USAGE, kind: "usage", message: "this command has no CSV form".into() });
        };
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&table.header).expect("in-memory write");
        for row in &table.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    } else {
        format!("{}\n", report.json)
    };
    let stderr = if report.ok { String::new() } else { format!("{}\n", json!({ "error": "assertion_failed", "args": &argv[1..] })) };
    Outcome { code, stdout, stderr }
}

fn dispatch(cli: &Cli) -> CmdResult {
    if cli.selftest {
        return selftest(cli.seed);
    }
    let Some(command) = &cli.command else {
        return Err(Failure { code: EXIT_USAGE, kind: "usage", message: "a subcommand or --selftest is required".into() });
    };
    match command {
        Command::Seq(SeqCommand::Gen { seq, count }) => seq_gen(seq, *count),
        Command::Seq(SeqCommand::Derive { seq, blocks, limit }) => seq_derive(seq, *blocks, *limit),
        Command::Orbit { seq, x, horizon } => orbit_cmd(seq, x, *horizon),
        Command::Member { seq, x, window, cap } => member(seq, x, *window, *cap),
        Command::VerifyT0 { seq, horizon } => verify_t0(seq, *horizon),
        Command::Density { set, horizon, tail_start } => {
            let est = upper_density(set, *horizon, *tail_start)?;
            Ok(density_report(est))
        }
        Command::Lift { seq, blocks, set } => lift_cmd(seq, *blocks, set),
        Command::C1 { seq, blocks, tau } => c1(seq, *blocks, tau.as_ref()),
        Command::C2Search { seq, blocks, tail_start, strategy } => c2(seq, *blocks, *tail_start, strategy),
        Command::Blocks { seq, x, eps, blocks } => blocks_cmd(seq, x, eps, *blocks),
        Command::Smember { seq, x, extra_blocks } => {
            let a = ArithChain::build(seq.clone(), 2)?;
            Ok(Report::new(decide_statistical_t_d(&a, x, *extra_blocks)?))
        }
        Command::Strace { seq, x, eps, horizon, tail_start } => {
            let u = sequence(seq, *horizon)?;
            Ok(density_report(statistical_trace(u.as_ref(), x, eps, *horizon, *tail_start)?))
        }
        Command::Lemma(cmd) => lemma(cmd, cli.seed),
        Command::Experiment(cmd) => experiment(cmd),
    }
}

fn selftest(seed: u64) -> CmdResult {
    let outcomes = acceptance::run_all(seed);
    let ok = outcomes.iter().all(|o| o.passed);
    let rows = outcomes.iter().map(|o| vec![o.id.to_string(), o.title.to_string(), o.passed.to_string()]).collect();
    Ok(Report::new(json!({ "seed": seed, "passed": ok, "criteria": outcomes }))
        .table(vec!["id", "title", "passed"], rows)
        .ok(ok))
}

/// The chain, or its derived sequence, materialized through index `horizon`.
fn sequence(seq: &SeqArgs, horizon: u64) -> std::result::Result<Box<dyn IntSequence>, Failure> {
    if seq.derived {
        let d = DerivedSeq::new(ArithChain::build(seq.seq.clone(), 2)?, 1)?;
        Ok(Box::new(derived_covering(&d, horizon)?.into_owned()))
    } else {
        let n = usize::try_from(horizon).map_err(|_| Error::OutOfHorizon { index: horizon, horizon: usize::MAX as u64 })?;
        Ok(Box::new(ArithChain::build(seq.seq.clone(), n)?))
    }
}

fn seq_gen(seq: &SeqDescriptor, count: usize) -> CmdResult {
    let a = ArithChain::build(seq.clone(), count)?;
    let terms: Vec<String> = a.terms().iter().map(ToString::to_string).collect();
    let ratios: Vec<String> = a.ratios().iter().map(ToString::to_string).collect();
    let rows = terms.iter().zip(&ratios).enumerate().map(|(i, (t, q))| vec![(i + 1).to_string(), t.clone(), q.clone()]).collect();
    Ok(Report::new(json!({ "descriptor": seq, "terms": terms, "ratios": ratios })).table(vec!["n", "a_n", "q_n"], rows))
}

fn seq_derive(seq: &SeqDescriptor, blocks: usize, limit: u64) -> CmdResult {
    let d = DerivedSeq::new(ArithChain::build(seq.clone(), 2)?, blocks)?;
    let shown = d.horizon().min(limit);
    let mut rows = Vec::new();
    let mut terms = Vec::new();
    for n in 1..=shown {
        let (k, r) = d.block_of(n)?;
        let t = d.term(n).expect("within horizon").to_string();
        rows.push(vec![n.to_string(), k.to_string(), r.to_string(), t.clone()]);
        terms.push(t);
    }
    Ok(Report::new(json!({
        "descriptor": seq, "blocks": blocks, "anchors": d.anchors(), "horizon": d.horizon(), "terms": terms,
    }))
    .table(vec!["n", "k", "r", "d_n"], rows))
}

fn orbit_cmd(seq: &SeqArgs, x: &CirclePoint, horizon: u64) -> CmdResult {
    let u = sequence(seq, horizon)?;
    let values = orbit(u.as_ref(), x, 1..=horizon)?;
    let rows = values.iter().enumerate().map(|(i, v)| {
        let n = i as u64 + 1;
        vec![n.to_string(), u.term(n).expect("within horizon").to_string(), v.to_string()]
    });
    let rows = rows.collect();
    let vals: Vec<String> = values.iter().map(ToString::to_string).collect();
    Ok(Report::new(json!({ "x": x.to_string(), "horizon": horizon, "values": vals })).table(vec!["n", "u_n", "seminorm"], rows))
}

fn member(seq: &SeqArgs, x: &CirclePoint, window: u64, cap: i64) -> CmdResult {
    let cfg = DecideConfig { ratio_cap: Rational::from(cap), window };
    let a = ArithChain::build(seq.seq.clone(), 2)?;
    let verdict = if seq.derived {
        decide_t_u(ChainLike::Derived(&DerivedSeq::new(a, 1)?), x, &cfg)?
    } else {
        decide_t_u(ChainLike::Chain(&a), x, &cfg)?
    };
    Ok(Report::new(verdict))
}

fn verify_t0(seq: &SeqArgs, horizon: u64) -> CmdResult {
    let u = sequence(seq, horizon)?;
    let anchors: Vec<u64> = if seq.derived {
        let d = DerivedSeq::new(ArithChain::build(seq.seq.clone(), 2)?, 1)?;
        derived_covering(&d, horizon)?.anchors().iter().copied().filter(|&n| n <= horizon).collect()
    } else {
        (1..=horizon).collect()
    };
    let rep = verify_t0_hypotheses(u.as_ref(), &anchors, horizon)?;
    Ok(Report::new(rep))
}

fn density_report(est: DensityEstimate) -> Report {
    let rows = est.trace.iter().map(|(n, d)| vec![n.to_string(), d.to_string()]).collect();
    Report::new(est).table(vec!["n", "partial_density"], rows)
}

fn lift_cmd(seq: &SeqDescriptor, blocks: usize, set: &IndexSet) -> CmdResult {
    let d = DerivedSeq::new(ArithChain::build(seq.clone(), 2)?, blocks)?;
    let IndexSet::Ranges { ranges } = lift(&d, set)? else { unreachable!("lift returns ranges") };
    let count: u64 = ranges.iter().map(|(s, e)| e - s + 1).sum();
    let rows = ranges.iter().map(|(s, e)| vec![s.to_string(), e.to_string()]).collect();
    Ok(Report::new(json!({ "horizon": d.horizon(), "count": count, "ranges": ranges })).table(vec!["start", "end"], rows))
}

fn c1(seq: &SeqDescriptor, blocks: usize, tau: Option<&Rational>) -> CmdResult {
    let d = DerivedSeq::new(ArithChain::build(seq.clone(), 2)?, blocks)?;
    let rep = check_c1(&d, blocks)?;
    let mut json = serde_json::to_value(&rep).expect("serializable");
    let (header, rows, ok) = match tau {
        Some(tau) => {
            let bounds = per_block_c1c2_bound(&d, tau, blocks)?;
            let rows = bounds.iter().map(|b| vec![b.k.to_string(), b.lhs.to_string(), b.middle.to_string(), b.rhs.to_string(), b.holds.to_string()]).collect();
            json["per_block"] = serde_json::to_value(&bounds).expect("serializable");
            (vec!["k", "lhs", "middle", "rhs", "holds"], rows, bounds.iter().all(|b| b.holds))
        }
        None => {
            let rows = (1..=blocks)
                .map(|k| vec![k.to_string(), d.anchor(k).to_string(), d.anchor(k + 1).to_string(), Rational::new(d.anchor(k + 1), d.anchor(k)).expect("positive").to_string()])
                .collect();
            (vec!["k", "n_k", "n_k1", "ratio"], rows, true)
        }
    };
    Ok(Report { json, table: Some(Table { header, rows }), ok })
}

fn c2(seq: &SeqDescriptor, blocks: usize, tail_start: u64, strategies: &[Strategy]) -> CmdResult {
    let d = DerivedSeq::new(ArithChain::build(seq.clone(), 2)?, blocks)?;
    let strategies = if strategies.is_empty() { Strategy::defaults() } else { strategies.to_vec() };
    let search = c2_witness_search(&d, &strategies, blocks, tail_start)?;
    let rows = search
        .evaluated
        .iter()
        .map(|o| vec![o.strategy.clone(), o.estimate.sup_tail_partial.to_string(), o.estimate.argmax.to_string()])
        .collect();
    Ok(Report::new(search).table(vec!["strategy", "sup_tail_partial", "argmax"], rows))
}

fn blocks_cmd(seq: &SeqDescriptor, x: &CirclePoint, eps: &Rational, blocks: usize) -> CmdResult {
    let a = ArithChain::build(seq.clone(), 2)?;
    let counts = block_counts(&a, x, eps, blocks)?;
    let rows = counts
        .iter()
        .map(|c| vec![c.k.to_string(), c.size.to_string(), c.count_at_least_eps.to_string(), c.count_nonzero.to_string()])
        .collect();
    Ok(Report::new(counts).table(vec!["k", "size", "count_at_least_eps", "count_nonzero"], rows))
}

fn lemma(cmd: &LemmaCommand, seed: u64) -> CmdResult {
    match cmd {
        LemmaCommand::L1 { cases: Some(_), low: Some(_), .. } => {
            Err(Failure { code: EXIT_USAGE, kind: "usage", message: "--cases excludes an explicit interval".into() })
        }
        LemmaCommand::L1 { cases: Some(n), .. } => {
            let (passed, detail) = acceptance::l1_random(seed, *n)?;
            Ok(Report::new(detail).ok(passed))
        }
        LemmaCommand::L1 { low: Some(low), high: Some(high), alpha: Some(alpha), .. } => {
            let c = verify_l1(low, high, alpha)?;
            let ok = c.holds;
            Ok(Report::new(c).ok(ok))
        }
        LemmaCommand::L1 { .. } => {
            Err(Failure { code: EXIT_USAGE, kind: "usage", message: "give --low, --high and --alpha, or --cases".into() })
        }
        LemmaCommand::L2 { pmax, denmax, eps } => {
            let rep = sweep_l2(*pmax, *denmax, eps)?;
            let rows = rep.failures.iter().map(|f| vec![f.alpha.to_string(), f.eps.to_string(), f.p.to_string(), f.count.to_string()]).collect();
            let ok = rep.passed();
            Ok(Report::new(rep).table(vec!["alpha", "eps", "p", "count"], rows).ok(ok))
        }
        LemmaCommand::L3 { seq, x, eps, l, blocks } => {
            let a = ArithChain::build(seq.clone(), 2)?;
            Ok(Report::new(verify_l3(&a, x, eps, *l, *blocks)?))
        }
        LemmaCommand::B1 { seq, z, q, count } => {
            let a = ArithChain::build(seq.clone(), *count)?;
            let q = match q {
                Some(q) => q.clone(),
                None => a.ratio_bound(a.horizon())?,
            };
            let w = verify_basic1(&a, &q, z)?;
            let ok = w.sandwich_holds;
            Ok(Report::new(w).ok(ok))
        }
    }
}

fn experiment(cmd: &ExperimentCommand) -> CmdResult {
    match cmd {
        ExperimentCommand::Kunen { q } => {
            let rep = rationals_experiment(*q)?;
            let ok = rep.passed();
            Ok(Report::new(rep).ok(ok))
        }
        ExperimentCommand::T1 { seq, x, eps, blocks } => {
            let a = ArithChain::build(seq.clone(), 2)?;
            let rep = t1_threshold_experiment(&a, x, eps, *blocks)?;
            let rows = rep.block_end_densities.iter().map(|(n, d)| vec![n.to_string(), d.to_string()]).collect();
            let ok = rep.holds;
            Ok(Report::new(rep).table(vec!["n", "partial_density"], rows).ok(ok))
        }
    }
}
