//! Event-driven simulation of EDF-dyn on a single processor.
//!
//! Each task follows one path through its graph. The current block of a
//! task may start once every after date met so far has passed; its
//! deadline is the smallest before date reachable from the node the block
//! leads to, looking through choice nodes. On chains this is EDF-dyn; on
//! trees and automata it is EDF-dyn-min. Automata are unfolded on the fly:
//! relative dates are converted to absolute ones as nodes are entered.
//!
//! The scheduler only acts at releases, completions and deadlines; between
//! two such instants the running task does not change.

use crate::error::TcaError;
use crate::model::{
    classify, min_reachable_deadlines, require_progress, require_well_formed, ExecTimeMap, GraphClass,
    GraphIndex, Labeling, NodeKind, TcaGraph,
};
use crate::time::{Rat, TimeStamp};

use super::oracle::{ChoiceOracle, ChoiceQuery};
use super::{EventKind, Marker, ScheduleMapping, ScheduleRun, SchedulerEvent, Segment, Status};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MissPolicy {
    /// Stop the whole run at the first deadline miss.
    #[default]
    Halt,
    /// Report the miss, deem the block complete and continue.
    Record,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimOptions {
    pub horizon: TimeStamp,
    pub miss_policy: MissPolicy,
}

impl SimOptions {
    pub fn new(horizon: impl Into<TimeStamp>) -> Self {
        SimOptions {
            horizon: horizon.into(),
            miss_policy: MissPolicy::Halt,
        }
    }
}

/// EDF-dyn on chains.
pub fn edf_dyn(chains: &[TcaGraph], exec: &ExecTimeMap, opts: &SimOptions) -> Result<ScheduleRun, TcaError> {
    for c in chains {
        if classify(c) != GraphClass::Chain {
            return Err(TcaError::Malformed(format!("`{}` is not a chain", c.name)));
        }
    }
    simulate(chains, exec, &mut super::FirstBranch, opts)
}

/// EDF-dyn-min on trees or automata, with choices supplied by `oracle`.
pub fn edf_dyn_min(
    graphs: &[TcaGraph],
    exec: &ExecTimeMap,
    oracle: &mut dyn ChoiceOracle,
    opts: &SimOptions,
) -> Result<ScheduleRun, TcaError> {
    simulate(graphs, exec, oracle, opts)
}

struct Task<'g> {
    name: String,
    ix: GraphIndex<'g>,
    md: Vec<TimeStamp>,
    relative: bool,
    /// Node the current block leaves from, and the base of its dates.
    node: usize,
    base: Rat,
    /// Release date of the current block.
    start: Rat,
    path: Vec<String>,
    arc: Option<usize>,
    remaining: Rat,
    deadline: TimeStamp,
    choices_made: usize,
    suspended: bool,
    done: bool,
}

impl Task<'_> {
    fn graph(&self) -> &TcaGraph {
        self.ix.graph
    }

    fn arc_key(&self) -> String {
        self.graph().arcs[self.arc.expect("current block")].key().to_string()
    }

    fn incomplete(&self) -> bool {
        !self.done && self.arc.is_some() && self.remaining > Rat::from_integer(0)
    }
}

struct Sim<'g, 'o> {
    tasks: Vec<Task<'g>>,
    exec: &'g ExecTimeMap,
    oracle: &'o mut dyn ChoiceOracle,
    opts: &'g SimOptions,
    events: Vec<SchedulerEvent>,
    markers: Vec<Marker>,
    segments: Vec<Segment>,
}

pub fn simulate(
    graphs: &[TcaGraph],
    exec: &ExecTimeMap,
    oracle: &mut dyn ChoiceOracle,
    opts: &SimOptions,
) -> Result<ScheduleRun, TcaError> {
    let mut tasks = Vec::with_capacity(graphs.len());
    for (i, g) in graphs.iter().enumerate() {
        require_well_formed(g)?;
        let ix = g.index();
        let cyclic = !ix.is_acyclic();
        match g.labeling {
            Labeling::Absolute if cyclic => return Err(TcaError::Cyclic),
            Labeling::Relative => require_progress(&ix)?,
            _ => {}
        }
        let name = if g.name.is_empty() {
            format!("task{i}")
        } else {
            g.name.clone()
        };
        if cyclic && !opts.horizon.is_finite() {
            return Err(TcaError::UnboundedHorizon(name));
        }
        let md = min_reachable_deadlines(&ix);
        let init = ix.initial.expect("well-formed");
        tasks.push(Task {
            name,
            md,
            relative: g.labeling == Labeling::Relative,
            node: init,
            base: Rat::from_integer(0),
            start: Rat::from_integer(0),
            path: Vec::new(),
            arc: None,
            remaining: Rat::from_integer(0),
            deadline: TimeStamp::Infinite,
            choices_made: 0,
            suspended: false,
            done: false,
            ix,
        });
    }
    let mut sim = Sim {
        tasks,
        exec,
        oracle,
        opts,
        events: Vec::new(),
        markers: Vec::new(),
        segments: Vec::new(),
    };
    let status = sim.run()?;
    Ok(ScheduleRun {
        mapping: ScheduleMapping {
            tasks: sim.tasks.iter().map(|t| t.name.clone()).collect(),
            segments: sim.segments,
            horizon: opts.horizon,
        },
        events: sim.events,
        markers: sim.markers,
        status,
    })
}

impl Sim<'_, '_> {
    fn emit(&mut self, time: Rat, kind: EventKind) {
        self.events.push(SchedulerEvent { time, kind });
    }

    /// Moves task `ti` onto node `v` and picks its next block, completing
    /// zero-cost blocks on the way.
    fn enter(&mut self, ti: usize, mut v: usize, mut base: Rat, now: Rat) -> Result<(), TcaError> {
        loop {
            let task = &mut self.tasks[ti];
            task.node = v;
            task.base = base;
            task.arc = None;
            let g = task.ix.graph;
            let node = &g.nodes[v];
            let relative = task.relative;
            let abs = |d: Rat| if relative { base + d } else { d };
            if let Some(d) = node.kind.date() {
                let kind = match node.kind {
                    NodeKind::After(_) => "after",
                    NodeKind::Before(_) => "before",
                    _ => "sync",
                };
                let time = abs(d);
                if TimeStamp::Finite(time) <= self.opts.horizon {
                    self.markers.push(Marker {
                        task: ti,
                        time,
                        kind: kind.into(),
                    });
                }
            }
            let task = &mut self.tasks[ti];
            if let Some(a) = node.kind.after_date().map(abs) {
                if TimeStamp::Finite(a) > self.opts.horizon {
                    task.done = true;
                    return Ok(());
                }
                task.start = task.start.max(a);
            }
            let outs = &task.ix.out[v];
            if outs.is_empty() || node.frontier {
                task.done = true;
                return Ok(());
            }
            let arc = if outs.len() == 1 {
                outs[0]
            } else {
                let options: Vec<String> = outs.iter().map(|&a| g.arcs[a].key().to_string()).collect();
                let decision = self.oracle.choose(&ChoiceQuery {
                    task: ti,
                    task_name: &task.name,
                    index: task.choices_made,
                    occurrence: &task.path,
                    time: now,
                    options: &options,
                })?;
                let outs = &task.ix.out[v];
                let arc = *outs.get(decision.branch).ok_or_else(|| {
                    TcaError::Oracle(format!("branch {} out of range", decision.branch))
                })?;
                task.choices_made += 1;
                let occurrence = task.path.clone();
                self.emit(
                    now,
                    EventKind::ChoiceTaken {
                        task: ti,
                        occurrence,
                        arc: options[decision.branch].clone(),
                        defaulted: decision.defaulted,
                    },
                );
                arc
            };
            let task = &mut self.tasks[ti];
            let key = g.arcs[arc].key().to_string();
            task.remaining = self.exec.cost(ti, &key).unwrap_or(g.arcs[arc].block.cost);
            task.arc = Some(arc);
            task.path.push(key.clone());
            let w = task.ix.to(arc);
            let next_base = if task.relative {
                base + node.kind.after_date().unwrap_or_default()
            } else {
                base
            };
            let deadline = task.md[w].shifted(next_base);
            if deadline != task.deadline {
                task.deadline = deadline;
                self.emit(now, EventKind::DeadlineUpdate { task: ti, deadline });
            }
            let task = &mut self.tasks[ti];
            if task.start > now {
                task.suspended = true;
                let until = task.start;
                self.emit(now, EventKind::Suspend { task: ti, until });
                return Ok(());
            }
            if task.remaining > Rat::from_integer(0) {
                return Ok(());
            }
            let occurrence = task.path.clone();
            self.emit(
                now,
                EventKind::BlockComplete {
                    task: ti,
                    occurrence,
                    block: key,
                },
            );
            v = w;
            base = next_base;
        }
    }

    fn complete(&mut self, ti: usize, now: Rat) -> Result<(), TcaError> {
        let task = &self.tasks[ti];
        let arc = task.arc.expect("current block");
        let g = task.ix.graph;
        let next_base = if task.relative {
            task.base + g.nodes[task.node].kind.after_date().unwrap_or_default()
        } else {
            task.base
        };
        let w = task.ix.to(arc);
        let (occurrence, block) = (task.path.clone(), task.arc_key());
        self.emit(
            now,
            EventKind::BlockComplete {
                task: ti,
                occurrence,
                block,
            },
        );
        self.enter(ti, w, next_base, now)
    }

    /// Handles everything happening at instant `t`. Returns false when the
    /// run must halt.
    fn settle(&mut self, t: Rat) -> Result<bool, TcaError> {
        let zero = Rat::from_integer(0);
        loop {
            let mut changed = false;
            for ti in 0..self.tasks.len() {
                let task = &mut self.tasks[ti];
                if !task.done && task.suspended && task.start <= t {
                    task.suspended = false;
                    self.emit(t, EventKind::Release { task: ti });
                    changed = true;
                }
            }
            for ti in 0..self.tasks.len() {
                let task = &self.tasks[ti];
                if !task.done && !task.suspended && task.arc.is_some() && task.remaining == zero {
                    self.complete(ti, t)?;
                    changed = true;
                }
            }
            let mut missed = false;
            for ti in 0..self.tasks.len() {
                let task = &self.tasks[ti];
                let Some(d) = task.deadline.finite() else {
                    continue;
                };
                if task.incomplete() && d <= t && TimeStamp::Finite(d) <= self.opts.horizon {
                    let occurrence = task.path.clone();
                    self.emit(
                        t,
                        EventKind::DeadlineMiss {
                            task: ti,
                            occurrence,
                            deadline: d,
                        },
                    );
                    missed = true;
                    let task = &mut self.tasks[ti];
                    task.remaining = zero;
                    task.suspended = false;
                }
            }
            if missed && self.opts.miss_policy == MissPolicy::Halt {
                return Ok(false);
            }
            if !(changed || missed) {
                return Ok(true);
            }
        }
    }

    fn run(&mut self) -> Result<Status, TcaError> {
        let mut t = Rat::from_integer(0);
        let mut any_miss = false;
        for ti in 0..self.tasks.len() {
            let init = self.tasks[ti].node;
            self.enter(ti, init, t, t)?;
        }
        loop {
            let before = self.events.len();
            let go_on = self.settle(t)?;
            any_miss |= self.events[before..]
                .iter()
                .any(|e| matches!(e.kind, EventKind::DeadlineMiss { .. }));
            if !go_on || self.tasks.iter().all(|k| k.done) || TimeStamp::Finite(t) >= self.opts.horizon {
                break;
            }
            let running = (0..self.tasks.len())
                .filter(|&i| {
                    let k = &self.tasks[i];
                    k.incomplete() && !k.suspended
                })
                .min_by_key(|&i| (self.tasks[i].deadline, i));
            let mut next = self.opts.horizon;
            if let Some(r) = running {
                next = next.min(TimeStamp::Finite(t + self.tasks[r].remaining));
            }
            for k in &self.tasks {
                if k.done {
                    continue;
                }
                if k.suspended {
                    next = next.min(TimeStamp::Finite(k.start));
                }
                if k.incomplete() && k.deadline > TimeStamp::Finite(t) && k.deadline <= self.opts.horizon {
                    next = next.min(k.deadline);
                }
            }
            let Some(tn) = next.finite() else {
                break;
            };
            if let Some(r) = running {
                let task = &mut self.tasks[r];
                task.remaining -= tn - t;
                let (occurrence, block) = (task.path.clone(), task.arc_key());
                match self.segments.last_mut() {
                    Some(s) if s.task == r && s.occurrence == occurrence && s.end == t => s.end = tn,
                    _ => self.segments.push(Segment {
                        task: r,
                        occurrence,
                        block,
                        start: t,
                        end: tn,
                    }),
                }
            }
            t = tn;
        }
        Ok(if any_miss { Status::DeadlineMiss } else { Status::Ok })
    }
}
