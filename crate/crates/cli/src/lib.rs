//! The `tca` command line: compile agent programs, transform graphs,
//! schedule, validate, check feasibility and draw Gantt charts.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tca_core::comms::{check_visibility, CommLink, Verdict};
use tca_core::corpus::{self, ChainParams, TreeParams};
use tca_core::feasibility::{feasible_chains, feasible_trees, FeasibilityError, SearchBudget};
use tca_core::frontend::compile_source;
use tca_core::gantt::{default_tick, render_svg, render_text};
use tca_core::io::{
    graph_from_json, graph_to_json, schedule_from_json, schedule_to_json, GRAPH_FORMAT_VERSION,
    SCHEDULE_FORMAT_VERSION,
};
use tca_core::scheduler::{
    check_correct, explore_tree_schedule, simulate, validate_schedule, ChoiceOracle, ChoiceScript,
    FirstBranch, MissPolicy, ScheduleMapping, ScheduleRun, SimOptions, Status,
};
use tca_core::transform::{apply_cdi, extract_chains, simplify, to_absolute, unfold, ChoiceSet};
use tca_core::{classify, parse_rat, ExecTimeMap, GraphClass, Labeling, Rat, TcaError, TcaGraph, TimeStamp};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (graph format 1, schedule format 1)"
);

#[derive(Parser, Debug)]
#[command(name = "tca", version, long_version = LONG_VERSION, about = "Time-constrained automata toolchain")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MissArg {
    Halt,
    Record,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GanttFormat {
    Text,
    Svg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CorpusKind {
    Chains,
    Trees,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Compile a .psi program into one graph file per agent.
    Compile {
        source: PathBuf,
        /// Output directory.
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
    /// Remove redundant constraints and merge after/before pairs.
    Simplify {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Expand a graph into an absolute tree up to the horizon.
    Unfold {
        graph: PathBuf,
        #[arg(long, value_parser = rational)]
        horizon: Rat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Annotate choice nodes with the earliest deadline of their branches.
    Cdi {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the EDF scheduler over a set of tasks.
    Schedule {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long, value_parser = rational)]
        horizon: Rat,
        /// Choice script: lines `agent index branch`, or `default N`.
        #[arg(long, conflicts_with = "choices_all")]
        choices: Option<PathBuf>,
        /// Explore every combination of choices.
        #[arg(long)]
        choices_all: bool,
        #[arg(long, default_value_t = 1024)]
        max_branches: usize,
        #[arg(long, value_enum, default_value = "halt")]
        miss_policy: MissArg,
        /// Also write the event trace, one JSON object per line.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a schedule against the graphs it was produced from.
    Validate {
        schedule: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        against: Vec<PathBuf>,
    },
    /// Decide whether a correct schedule exists, by exhaustive search.
    Feasible {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long, value_parser = rational)]
        horizon: Rat,
        #[arg(long, default_value_t = 2_000_000)]
        max_states: usize,
        /// Write the verdict as JSON.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw a schedule.
    Gantt {
        schedule: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: GanttFormat,
        /// Tick length; defaults to the finest needed by the schedule.
        #[arg(long, value_parser = rational)]
        tick: Option<Rat>,
        #[arg(long, default_value_t = 24)]
        px_per_tick: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the visibility dates of a communication manifest.
    Visibility {
        manifest: PathBuf,
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long, value_parser = rational)]
        horizon: Rat,
    },
    /// Generate random instances.
    Corpus {
        #[arg(long, value_enum, default_value = "chains")]
        kind: CorpusKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn rational(s: &str) -> Result<Rat, String> {
    let r = parse_rat(s).map_err(|e| e.to_string())?;
    if r < Rat::from_integer(0) {
        return Err("must not be negative".into());
    }
    Ok(r)
}

/// Failure that maps to exit code 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<i32, InputError>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<TcaGraph, InputError> {
    graph_from_json(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_graphs(paths: &[PathBuf]) -> Result<Vec<TcaGraph>, InputError> {
    paths.iter().map(|p| load_graph(p)).collect()
}

fn load_schedule(path: &Path) -> Result<ScheduleRun, InputError> {
    schedule_from_json(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// Writes `text` to `path`, or to stdout when there is none.
fn emit(io: &mut Io, path: Option<&Path>, text: &str) -> Result<(), InputError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| InputError(format!("{}: {e}", p.display()))),
        None => Ok(io.out.write_all(text.as_bytes())?),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

fn status_name(s: Status) -> String {
    serde_json::to_value(s)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn compile_cmd(io: &mut Io, source: &Path, dir: &Path) -> Outcome {
    let src = read(source)?;
    let graphs = match compile_source(&src) {
        Ok(g) => g,
        Err(e) => {
            write!(io.err, "{}", e.render(&source.display().to_string(), &src))?;
            return Ok(2);
        }
    };
    fs::create_dir_all(dir)?;
    for g in &graphs {
        let path = dir.join(format!("{}.tca", g.name));
        fs::write(&path, graph_to_json(g))?;
        writeln!(io.out, "{}", path.display())?;
    }
    Ok(0)
}

fn transform_cmd(io: &mut Io, input: &Path, output: Option<&Path>, f: impl Fn(&TcaGraph) -> Result<TcaGraph, TcaError>) -> Outcome {
    let g = load_graph(input)?;
    let out = f(&g)?;
    emit(io, output, &graph_to_json(&out))?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn schedule_cmd(
    io: &mut Io,
    paths: &[PathBuf],
    horizon: Rat,
    choices: Option<&Path>,
    choices_all: bool,
    max_branches: usize,
    miss: MissArg,
    trace: Option<&Path>,
    output: Option<&Path>,
) -> Outcome {
    let mut script = match choices {
        Some(p) => Some(ChoiceScript::parse(&read(p)?).map_err(|e| InputError(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let graphs = load_graphs(paths)?;
    let exec = ExecTimeMap::from_graphs(&graphs);
    let mut opts = SimOptions::new(horizon);
    opts.miss_policy = match miss {
        MissArg::Halt => MissPolicy::Halt,
        MissArg::Record => MissPolicy::Record,
    };

    if choices_all {
        let ts = explore_tree_schedule(&graphs, &exec, &opts, max_branches)?;
        let branches = ts.branches();
        let mut listed = Vec::new();
        for b in &branches {
            writeln!(
                io.err,
                "branch [{}]: {}",
                b.choices.iter().map(|c| c.arc.as_str()).collect::<Vec<_>>().join(", "),
                status_name(b.status)
            )?;
            listed.push(json!({
                "choices": b.choices,
                "status": b.status,
                "segments": b.segments,
                "events": b.events,
            }));
        }
        let doc = json!({
            "format_version": SCHEDULE_FORMAT_VERSION,
            "horizon": ts.horizon.to_string(),
            "tasks": ts.tasks,
            "truncated": ts.truncated,
            "branches": listed,
            "tree": ts.root,
        });
        emit(io, output, &pretty(&doc))?;
        if ts.truncated {
            writeln!(io.err, "warning: branch budget of {max_branches} reached")?;
        }
        return Ok(if ts.miss_free() { 0 } else { 1 });
    }

    let oracle: &mut dyn ChoiceOracle = match script.as_mut() {
        Some(s) => s,
        None => &mut FirstBranch,
    };
    let run = match simulate(&graphs, &exec, oracle, &opts) {
        Ok(run) => run,
        Err(TcaError::ZenoCycle(nodes)) => {
            writeln!(io.err, "zeno cycle through {}", nodes.join(", "))?;
            ScheduleRun {
                mapping: ScheduleMapping {
                    tasks: graphs.iter().map(|g| g.name.clone()).collect(),
                    segments: Vec::new(),
                    horizon: TimeStamp::Finite(horizon),
                },
                events: Vec::new(),
                markers: Vec::new(),
                status: Status::Zeno,
            }
        }
        Err(e) => return Err(e.into()),
    };
    emit(io, output, &schedule_to_json(&run))?;
    if let Some(t) = trace {
        let mut lines = String::new();
        for e in &run.events {
            lines.push_str(&serde_json::to_string(e)?);
            lines.push('\n');
        }
        fs::write(t, lines)?;
    }
    if output.is_some() {
        writeln!(io.out, "status: {}", status_name(run.status))?;
    }
    Ok(if run.status == Status::Ok { 0 } else { 1 })
}

/// The chains a schedule actually followed: automata are unfolded to the
/// schedule horizon, then the choices recorded in its trace are applied.
fn followed_chains(graphs: &[TcaGraph], run: &ScheduleRun) -> Result<Vec<TcaGraph>, InputError> {
    let mut trees = Vec::with_capacity(graphs.len());
    for g in graphs {
        let t = match (classify(g), g.labeling) {
            (GraphClass::Automaton, _) => {
                let h = run
                    .mapping
                    .horizon
                    .finite()
                    .ok_or_else(|| InputError("cyclic graph needs a finite schedule horizon".into()))?;
                unfold(g, h)?
            }
            (_, Labeling::Relative) => to_absolute(g)?,
            _ => g.clone(),
        };
        trees.push(apply_cdi(&t)?);
    }
    let mut choices = ChoiceSet::new();
    for (task, occ, arc) in run.choices() {
        choices.insert(task, occ.to_vec(), arc);
    }
    Ok(extract_chains(&trees, &choices)?)
}

fn validate_cmd(io: &mut Io, schedule: &Path, against: &[PathBuf]) -> Outcome {
    let run = load_schedule(schedule)?;
    let graphs = load_graphs(against)?;
    if graphs.len() != run.mapping.tasks.len() {
        return Err(InputError(format!(
            "schedule has {} tasks but {} graphs were given",
            run.mapping.tasks.len(),
            graphs.len()
        )));
    }
    let chains = followed_chains(&graphs, &run)?;
    let mut violations = validate_schedule(&chains, &run.mapping);
    if violations.is_empty() && run.status == Status::Ok {
        violations = check_correct(&chains, &run.mapping, &ExecTimeMap::from_graphs(&graphs));
    }
    if violations.is_empty() {
        writeln!(io.out, "valid")?;
        Ok(0)
    } else {
        write!(io.out, "{}", pretty(&serde_json::to_value(&violations)?))?;
        Ok(1)
    }
}

fn feasible_cmd(io: &mut Io, paths: &[PathBuf], horizon: Rat, max_states: usize, output: Option<&Path>) -> Outcome {
    let graphs = load_graphs(paths)?;
    let exec = ExecTimeMap::from_graphs(&graphs);
    let budget = SearchBudget {
        max_states,
        ..SearchBudget::default()
    };
    let chains = graphs.iter().all(|g| classify(g) == GraphClass::Chain);
    let result = if chains {
        feasible_chains(&graphs, &exec, horizon, &budget)
    } else {
        feasible_trees(&graphs, &exec, horizon, &budget)
    };
    let verdict = match result {
        Ok(v) => v,
        Err(FeasibilityError::BudgetExceeded(msg)) => {
            writeln!(io.out, "unknown")?;
            writeln!(io.err, "search budget exceeded: {msg}")?;
            return Ok(2);
        }
        Err(FeasibilityError::Tca(e)) => return Err(e.into()),
    };
    let word = if verdict.feasible { "feasible" } else { "infeasible" };
    writeln!(io.out, "{word}")?;
    if let Some(c) = &verdict.certificate {
        writeln!(io.out, "overload on [{}, {}): demand {}", c.start, c.end, c.demand)?;
    }
    if let Some(p) = output {
        let doc = json!({
            "format_version": SCHEDULE_FORMAT_VERSION,
            "verdict": word,
            "horizon": horizon.to_string(),
            "witness": verdict.witness,
            "certificate": verdict.certificate,
            "stats": verdict.stats,
        });
        emit(io, Some(p), &pretty(&doc))?;
    }
    Ok(if verdict.feasible { 0 } else { 1 })
}

fn gantt_cmd(io: &mut Io, schedule: &Path, format: GanttFormat, tick: Option<Rat>, ppt: u32, output: Option<&Path>) -> Outcome {
    let run = load_schedule(schedule)?;
    let tick = tick.unwrap_or_else(|| default_tick(&run.mapping, &run.markers));
    if tick <= Rat::from_integer(0) {
        return Err(InputError("tick must be positive".into()));
    }
    let text = match format {
        GanttFormat::Text => render_text(&run.mapping, &run.markers, tick),
        GanttFormat::Svg => render_svg(&run.mapping, &run.markers, tick, ppt),
    };
    emit(io, output, &text)?;
    Ok(0)
}

fn visibility_cmd(io: &mut Io, manifest: &Path, paths: &[PathBuf], horizon: Rat) -> Outcome {
    let text = read(manifest)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", manifest.display())))?;
    let links: Vec<CommLink> = match value {
        Value::Array(_) => serde_json::from_value(value)?,
        other => vec![serde_json::from_value(other)?],
    };
    let graphs = load_graphs(paths)?;
    let mut all_ok = true;
    for link in &links {
        let rep = check_visibility(link, &graphs, horizon)?;
        writeln!(
            io.out,
            "{}.{} -> {}.{} at {}",
            link.sender.agent, link.sender.block, link.receiver.agent, link.receiver.block, link.visibility
        )?;
        for p in &rep.pairs {
            let verdict = match &p.verdict {
                Verdict::Accepted => "accepted".to_string(),
                Verdict::SenderUnbounded => "rejected: sender has no deadline".to_string(),
                Verdict::SenderLate { deadline } => format!("rejected: sender deadline {deadline} is after visibility"),
                Verdict::ReceiverEarly { start } => format!("rejected: receiver may start at {start}"),
            };
            writeln!(io.out, "  #{} {} / {} (visible at {}): {verdict}", p.index, p.sender, p.receiver, p.visibility)?;
        }
        if let Some((s, r)) = rep.count_mismatch {
            writeln!(io.out, "  occurrence count mismatch: {s} sends, {r} receives")?;
        }
        all_ok &= rep.accepted();
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn corpus_cmd(io: &mut Io, kind: CorpusKind, seed: u64, count: usize, dir: &Path) -> Outcome {
    let mut rng = corpus::rng(seed);
    for i in 0..count {
        let inst = match kind {
            CorpusKind::Chains => corpus::chain_instance(&mut rng, &ChainParams::default()),
            CorpusKind::Trees => corpus::tree_instance(&mut rng, &TreeParams::default()),
        };
        let sub = dir.join(format!("{i:04}"));
        fs::create_dir_all(&sub)?;
        for g in &inst.graphs {
            fs::write(sub.join(format!("{}.tca", g.name)), graph_to_json(g))?;
        }
        fs::write(sub.join("horizon"), format!("{}\n", inst.horizon))?;
    }
    writeln!(io.out, "wrote {count} instances to {}", dir.display())?;
    Ok(0)
}

fn dispatch(io: &mut Io, cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Compile { source, output } => compile_cmd(io, &source, &output),
        Cmd::Simplify { graph, output } => transform_cmd(io, &graph, output.as_deref(), simplify),
        Cmd::Unfold { graph, horizon, output } => transform_cmd(io, &graph, output.as_deref(), |g| unfold(g, horizon)),
        Cmd::Cdi { graph, output } => transform_cmd(io, &graph, output.as_deref(), apply_cdi),
        Cmd::Schedule {
            graphs,
            horizon,
            choices,
            choices_all,
            max_branches,
            miss_policy,
            trace,
            output,
        } => schedule_cmd(
            io,
            &graphs,
            horizon,
            choices.as_deref(),
            choices_all,
            max_branches,
            miss_policy,
            trace.as_deref(),
            output.as_deref(),
        ),
        Cmd::Validate { schedule, against } => validate_cmd(io, &schedule, &against),
        Cmd::Feasible {
            graphs,
            horizon,
            max_states,
            output,
        } => feasible_cmd(io, &graphs, horizon, max_states, output.as_deref()),
        Cmd::Gantt {
            schedule,
            format,
            tick,
            px_per_tick,
            output,
        } => gantt_cmd(io, &schedule, format, tick, px_per_tick, output.as_deref()),
        Cmd::Visibility { manifest, graphs, horizon } => visibility_cmd(io, &manifest, &graphs, horizon),
        Cmd::Corpus {
            kind,
            seed,
            count,
            output,
        } => corpus_cmd(io, kind, seed, count, &output),
    }
}

/// Runs one invocation; `args` includes the program name. Returns the
/// exit code: 0 success, 1 reported violation, miss or infeasibility,
/// 2 usage or input error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(&mut io, cli.cmd) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(io.err, "tca: error: {msg}");
            2
        }
    }
}

#[doc(hidden)]
pub const FORMAT_VERSIONS: (u32, u32) = (GRAPH_FORMAT_VERSION, SCHEDULE_FORMAT_VERSION);
