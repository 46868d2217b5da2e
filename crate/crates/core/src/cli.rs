//! `hdsearch` command line: `compute`, `dynamic`, `conformance`, `gen`, `list`.
//!
//! Output is plain `key=value` lines. Exit status is 0 when nothing
//! contradicted a contract, 1 when something did, 2 on unusable input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forest::{enumerate_trees, gen_tree, parse_edge_list, to_edge_list, Forest, TreeKind};
use crate::hd::ParamVariant;
use crate::oracle::{gap_characterization_check, stable_exact};
use crate::protocol::{run_static_with, CodingScheme};
use crate::{dynamic, registry, strategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "hdsearch", version, about = "Process number, search numbers and pathwidth of trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Param {
    Pn,
    Ns,
    Es,
    Pw,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::Pn, Param::Ns, Param::Es, Param::Pw];

    pub fn name(self) -> &'static str {
        match self {
            Param::Pn => "pn",
            Param::Ns => "ns",
            Param::Es => "es",
            Param::Pw => "pw",
        }
    }

    /// Rules the convergecast runs with; pw rides on ns.
    pub fn variant(self) -> Result<ParamVariant> {
        let name = if self == Param::Pw { "ns" } else { self.name() };
        Ok(registry::rules(name)?.variant())
    }

    /// Reported value from the run's value.
    pub fn report(self, run_value: usize) -> usize {
        if self == Param::Pw {
            run_value.saturating_sub(1)
        } else {
            run_value
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the convergecast on one tree.
    Compute {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "pn")]
        param: Param,
        #[arg(long, default_value = "known")]
        encoding: String,
        #[arg(long, default_value = "shuffle")]
        schedule: String,
        /// Scheduler seed; defaults to $SWEEP_SEED, else 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        stats: bool,
        /// Extract and check a process strategy (pn only).
        #[arg(long)]
        strategy: bool,
        /// Dump every visit and message.
        #[arg(long)]
        transcript: bool,
    },
    /// Replay an add/del/query/reroot script.
    Dynamic {
        script: PathBuf,
        #[arg(long, value_enum, default_value = "pn")]
        param: Param,
        #[arg(long, default_value = "known")]
        encoding: String,
        /// Stop insertion updates once a descriptor comes back unchanged.
        #[arg(long)]
        early_stop: bool,
        #[arg(long)]
        stats: bool,
    },
    /// Compare the convergecast with the exact solvers on every tree up to a size.
    Conformance {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// One parameter; all of them when absent.
        #[arg(long, value_enum)]
        param: Option<Param>,
        #[arg(long, default_value = "known")]
        encoding: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 picks the machine's parallelism.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Also write each counterexample as an edge-list file here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print a generated tree in edge-list form.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        /// Size arguments: k for path, star and theorem1; n for random;
        /// three leg lengths for spider.
        sizes: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Registered rules, encodings, schedules and oracles.
    List,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Path,
    Star,
    Spider,
    Theorem1,
    Random,
}

fn tree_kind(kind: GenKind, sizes: &[usize], seed: u64) -> Result<TreeKind> {
    let want = if kind == GenKind::Spider { 3 } else { 1 };
    if sizes.len() != want {
        return Err(Error::Argument(format!("{kind:?} takes {want} size argument(s), got {}", sizes.len())));
    }
    Ok(match kind {
        GenKind::Path => TreeKind::Path(sizes[0]),
        GenKind::Star => TreeKind::Star(sizes[0]),
        GenKind::Spider => TreeKind::Spider(sizes[0], sizes[1], sizes[2]),
        GenKind::Theorem1 => TreeKind::Theorem1(sizes[0]),
        GenKind::Random => TreeKind::Random { n: sizes[0], seed },
    })
}

/// Parse `args` (program name first), run, and return the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, Error::Contract(_)) {
                EXIT_VIOLATION
            } else {
                EXIT_ERROR
            }
        }
    }
}

fn default_seed() -> Result<u64> {
    match std::env::var("SWEEP_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Argument(format!("SWEEP_SEED={s:?} is not an integer"))),
        Err(_) => Ok(0),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Argument(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, line: impl AsRef<str>) -> Result<()> {
    writeln!(out, "{}", line.as_ref()).map_err(|e| Error::Argument(format!("write failed: {e}")))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Compute { input, param, encoding, schedule, seed, stats, strategy, transcript } => {
            let tree = parse_edge_list(&read(&input)?)?;
            if !tree.is_connected() {
                return Err(Error::Structural(format!("{} has {} components, expected one tree", input.display(), tree.components().len())));
            }
            if strategy && param != Param::Pn {
                return Err(Error::Argument("--strategy needs --param pn".into()));
            }
            let seed = seed.map_or_else(default_seed, Ok)?;
            let mut sched = registry::scheduler(&schedule, seed)?;
            let run = run_static_with(&tree, param.variant()?, registry::coding(&encoding)?, sched.as_mut())?;
            emit(out, format!("param={} value={}", param.name(), param.report(run.value.value)))?;
            if stats {
                let c = run.counters;
                emit(out, format!("messages={} bits={} steps={}", c.messages, c.bits, c.steps))?;
            }
            if transcript {
                for line in &run.transcript {
                    emit(out, format!("event={line}"))?;
                }
            }
            if strategy {
                let s = strategy::extract(&tree, &run)?;
                let peak = strategy::validate(tree.graph(), &s)?;
                let actions: Vec<String> = s.actions.iter().map(|a| a.to_string()).collect();
                emit(out, format!("strategy={}", actions.join(",")))?;
                emit(out, format!("strategy_peak={peak}"))?;
                if peak != run.value.value {
                    return Err(Error::Contract(format!("strategy uses {peak} agents, computed pn is {}", run.value.value)));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Dynamic { script, param, encoding, early_stop, stats } => {
            let (queries, df) = dynamic::run_script(&read(&script)?, param.variant()?, registry::coding(&encoding)?, early_stop)?;
            for mut q in queries {
                q.result.value = param.report(q.result.value);
                emit(out, q.to_string())?;
            }
            df.check_invariants()?;
            if stats {
                let c = df.counters();
                emit(out, format!("messages={} bits={} steps={} components={}", c.messages, c.bits, c.steps, df.values().len()))?;
            }
            Ok(EXIT_OK)
        }
        Command::Conformance { max_n, param, encoding, seed, jobs, out_dir } => {
            let params: Vec<Param> = param.map_or(Param::ALL.to_vec(), |p| vec![p]);
            let seed = seed.map_or_else(default_seed, Ok)?;
            let scheme = registry::coding(&encoding)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
            let report = pool.install(|| conformance(max_n, &params, scheme, seed))?;
            for line in report.summary() {
                emit(out, line)?;
            }
            for (i, cx) in report.counterexamples.iter().enumerate() {
                let mut line = format!("counterexample check={} n={} {} edges={}", cx.check, cx.tree.len(), cx.detail, inline_edges(&cx.tree));
                if let Some(dir) = &out_dir {
                    let path = dir.join(format!("cx-{}-{i}.txt", cx.check));
                    std::fs::create_dir_all(dir)
                        .and_then(|_| std::fs::write(&path, to_edge_list(&cx.tree)))
                        .map_err(|e| Error::Argument(format!("{}: {e}", path.display())))?;
                    line.push_str(&format!(" file={}", path.display()));
                }
                emit(out, line)?;
            }
            Ok(if report.counterexamples.is_empty() { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Gen { kind, sizes, seed } => {
            let seed = seed.map_or_else(default_seed, Ok)?;
            let t = gen_tree(tree_kind(kind, &sizes, seed)?)?;
            out.write_all(to_edge_list(&t).as_bytes()).map_err(|e| Error::Argument(format!("write failed: {e}")))?;
            Ok(EXIT_OK)
        }
        Command::List => {
            for line in registry::listing() {
                emit(out, line)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn inline_edges(t: &Forest) -> String {
    let e: Vec<String> = t.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect();
    if e.is_empty() {
        "-".into()
    } else {
        e.join(",")
    }
}

#[derive(Debug)]
pub struct Counterexample {
    pub check: String,
    pub detail: String,
    pub tree: Forest,
}

/// Pass/fail tallies per check, in a fixed order.
#[derive(Debug, Default)]
pub struct ConformanceReport {
    pub checks: Vec<(String, usize, usize)>,
    pub counterexamples: Vec<Counterexample>,
    pub trees: usize,
}

impl ConformanceReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.2).sum()
    }

    pub fn summary(&self) -> Vec<String> {
        let mut out = vec![format!("trees={}", self.trees)];
        out.extend(self.checks.iter().map(|(name, pass, fail)| format!("check={name} pass={pass} fail={fail}")));
        out.push(format!("pass={} fail={}", self.checks.iter().map(|c| c.1).sum::<usize>(), self.failures()));
        out
    }
}

struct TreeOutcome {
    results: Vec<(String, std::result::Result<(), String>)>,
}

fn check_tree(t: &Forest, params: &[Param], scheme: CodingScheme, seed: u64) -> Result<TreeOutcome> {
    let mut results = Vec::new();
    let mut computed = std::collections::BTreeMap::new();
    for &p in params {
        let mut sched = registry::scheduler("shuffle", seed)?;
        let run = run_static_with(t, p.variant()?, scheme, sched.as_mut())?;
        let got = p.report(run.value.value);
        let want = registry::oracle(p.name())?.value(t.graph())?;
        let verdict = if got == want { Ok(()) } else { Err(format!("want={want} got={got}")) };
        results.push((p.name().to_string(), verdict));
        if p == Param::Pn && t.len() > 1 {
            let stable = stable_exact(t.graph(), run.root)?;
            let verdict = if stable == run.value.stable { Ok(()) } else { Err(format!("root={} want_stable={stable} got_stable={}", run.root, run.value.stable)) };
            results.push(("pn_stability".into(), verdict));
        }
        computed.insert(p, got);
    }
    if let Some(&es) = computed.get(&Param::Es) {
        let ns = match computed.get(&Param::Ns) {
            Some(&ns) => ns,
            None => run_static_with(t, ParamVariant::NodeSearch, scheme, registry::scheduler("shuffle", seed)?.as_mut())?.value.value,
        };
        let ok = es + 1 == ns || es == ns;
        results.push(("es_bound".into(), if ok { Ok(()) } else { Err(format!("es={es} ns={ns}")) }));
    }
    if params.contains(&Param::Pn) {
        let ok = gap_characterization_check(t)?;
        results.push(("gap_lemma".into(), if ok { Ok(()) } else { Err("sides_disagree".into()) }));
    }
    Ok(TreeOutcome { results })
}

/// Every tree with `1..=max_n` vertices against the oracles for `params`,
/// plus the es bound and the gap characterisation where they apply.
pub fn conformance(max_n: usize, params: &[Param], scheme: CodingScheme, seed: u64) -> Result<ConformanceReport> {
    let mut limit = usize::MAX;
    for p in params {
        limit = limit.min(registry::oracle(p.name())?.max_n());
    }
    if params.contains(&Param::Pn) {
        limit = limit.min(registry::oracle("pw")?.max_n());
    }
    if max_n > limit {
        return Err(Error::Argument(format!("--max-n {max_n} is past the exact solvers' limit {limit}")));
    }
    let mut trees = Vec::new();
    for n in 1..=max_n {
        trees.extend(enumerate_trees(n)?);
    }
    let outcomes: Vec<TreeOutcome> = trees.par_iter().map(|t| check_tree(t, params, scheme, seed)).collect::<Result<_>>()?;

    let mut report = ConformanceReport { trees: trees.len(), ..Default::default() };
    for (t, o) in trees.iter().zip(outcomes) {
        for (name, verdict) in o.results {
            let idx = match report.checks.iter().position(|c| c.0 == name) {
                Some(i) => i,
                None => {
                    report.checks.push((name.clone(), 0, 0));
                    report.checks.len() - 1
                }
            };
            match verdict {
                Ok(()) => report.checks[idx].1 += 1,
                Err(detail) => {
                    report.checks[idx].2 += 1;
                    report.counterexamples.push(Counterexample { check: name, detail, tree: t.clone() });
                }
            }
        }
    }
    Ok(report)
}
