//! Schedules of tree-shaped (or cyclic) task sets as functions of the
//! choices made: every combination of choices is simulated and the runs
//! are merged into a tree sharing their common prefixes.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::TcaError;
use crate::model::{ExecTimeMap, TcaGraph};
use crate::time::{serde_rat, serde_stamp, Rat, TimeStamp};

use super::oracle::{ChoiceOracle, ChoiceQuery, Decision};
use super::sim::{simulate, SimOptions};
use super::{EventKind, ScheduleRun, SchedulerEvent, Segment, Status};

/// The choice leading into a subtree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchLabel {
    pub task: usize,
    pub occurrence: Vec<String>,
    pub arc: String,
    #[serde(with = "serde_rat")]
    pub time: Rat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TreeScheduleNode {
    /// Segments and events shared by every run below this node, up to the
    /// next choice.
    pub segments: Vec<Segment>,
    pub events: Vec<SchedulerEvent>,
    /// Set on leaves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
    pub children: Vec<(BranchLabel, TreeScheduleNode)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeSchedule {
    pub tasks: Vec<String>,
    #[serde(with = "serde_stamp")]
    pub horizon: TimeStamp,
    pub root: TreeScheduleNode,
    /// The branch budget ran out before every combination was explored.
    pub truncated: bool,
}

/// One fully resolved run, read back from a [`TreeSchedule`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub choices: Vec<BranchLabel>,
    pub segments: Vec<Segment>,
    pub events: Vec<SchedulerEvent>,
    pub status: Status,
}

impl TreeSchedule {
    pub fn branches(&self) -> Vec<Branch> {
        let mut out = Vec::new();
        let mut acc = Branch {
            choices: Vec::new(),
            segments: Vec::new(),
            events: Vec::new(),
            status: Status::Ok,
        };
        collect(&self.root, &mut acc, &mut out);
        out
    }

    pub fn miss_free(&self) -> bool {
        self.branches().iter().all(|b| b.status != Status::DeadlineMiss)
    }
}

fn push_merged(segments: &mut Vec<Segment>, s: &Segment) {
    match segments.last_mut() {
        Some(last) if last.task == s.task && last.occurrence == s.occurrence && last.end == s.start => {
            last.end = s.end
        }
        _ => segments.push(s.clone()),
    }
}

fn collect(node: &TreeScheduleNode, acc: &mut Branch, out: &mut Vec<Branch>) {
    let saved = (acc.choices.len(), acc.segments.clone(), acc.events.len());
    for s in &node.segments {
        push_merged(&mut acc.segments, s);
    }
    acc.events.extend(node.events.iter().cloned());
    if node.children.is_empty() {
        let mut leaf = acc.clone();
        leaf.status = node.status.unwrap_or(Status::Ok);
        out.push(leaf);
    }
    for (label, child) in &node.children {
        acc.choices.push(label.clone());
        let before = acc.events.len();
        acc.events.push(SchedulerEvent {
            time: label.time,
            kind: EventKind::ChoiceTaken {
                task: label.task,
                occurrence: label.occurrence.clone(),
                arc: label.arc.clone(),
                defaulted: false,
            },
        });
        collect(child, acc, out);
        acc.events.truncate(before);
        acc.choices.pop();
    }
    acc.choices.truncate(saved.0);
    acc.segments = saved.1;
    acc.events.truncate(saved.2);
}

/// Answers from a fixed prefix of branch indices, then branch 0, and
/// records the fan-out of every query.
struct Explorer {
    prefix: Vec<usize>,
    fanouts: Vec<usize>,
}

impl ChoiceOracle for Explorer {
    fn choose(&mut self, q: &ChoiceQuery<'_>) -> Result<Decision, TcaError> {
        let branch = self.prefix.get(self.fanouts.len()).copied().unwrap_or(0);
        self.fanouts.push(q.options.len());
        Ok(Decision {
            branch,
            defaulted: false,
        })
    }
}

/// Branch indices taken at each choice, and the run they produce.
pub type BranchRun = (Vec<usize>, ScheduleRun);

/// Runs the simulator under every combination of choices, breadth-first
/// over choice occurrences. Returns each run with the branch indices it
/// took, sorted by those indices, and whether `max_branches` cut the
/// exploration short.
pub fn explore_with(
    graphs: &[TcaGraph],
    exec: &ExecTimeMap,
    opts: &SimOptions,
    max_branches: usize,
) -> Result<(Vec<BranchRun>, bool), TcaError> {
    let mut queue = VecDeque::from([Vec::new()]);
    let mut runs = Vec::new();
    let mut truncated = false;
    while let Some(prefix) = queue.pop_front() {
        if runs.len() >= max_branches {
            truncated = true;
            break;
        }
        let mut oracle = Explorer {
            prefix,
            fanouts: Vec::new(),
        };
        let run = simulate(graphs, exec, &mut oracle, opts)?;
        let Explorer { prefix, fanouts } = oracle;
        let decisions: Vec<usize> = (0..fanouts.len())
            .map(|j| prefix.get(j).copied().unwrap_or(0))
            .collect();
        for j in prefix.len()..fanouts.len() {
            for b in 1..fanouts[j] {
                let mut p = decisions[..j].to_vec();
                p.push(b);
                queue.push_back(p);
            }
        }
        runs.push((decisions, run));
    }
    runs.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((runs, truncated))
}

pub fn explore_tree_schedule(
    graphs: &[TcaGraph],
    exec: &ExecTimeMap,
    opts: &SimOptions,
    max_branches: usize,
) -> Result<TreeSchedule, TcaError> {
    let (runs, truncated) = explore_with(graphs, exec, opts, max_branches)?;
    let tasks = runs
        .first()
        .map(|(_, r)| r.mapping.tasks.clone())
        .unwrap_or_default();
    let group: Vec<&(Vec<usize>, ScheduleRun)> = runs.iter().collect();
    let root = build(&group, 0, 0, Rat::from_integer(0));
    Ok(TreeSchedule {
        tasks,
        horizon: opts.horizon,
        root,
        truncated,
    })
}

fn choice_positions(run: &ScheduleRun) -> Vec<usize> {
    run.events
        .iter()
        .enumerate()
        .filter(|(_, e)| matches!(e.kind, EventKind::ChoiceTaken { .. }))
        .map(|(i, _)| i)
        .collect()
}

/// Segments of `run` clipped to `[from, until)`.
fn clip(run: &ScheduleRun, from: Rat, until: Option<Rat>) -> Vec<Segment> {
    run.mapping
        .segments
        .iter()
        .filter_map(|s| {
            let start = s.start.max(from);
            let end = until.map_or(s.end, |u| s.end.min(u));
            (start < end).then(|| Segment {
                start,
                end,
                ..s.clone()
            })
        })
        .collect()
}

/// Builds the subtree for runs sharing their first `depth` decisions.
/// `ev_from` and `from` locate the end of the parent's content.
fn build(runs: &[&(Vec<usize>, ScheduleRun)], depth: usize, ev_from: usize, from: Rat) -> TreeScheduleNode {
    let first = &runs[0].1;
    if runs.len() == 1 || runs.iter().any(|(d, _)| d.len() <= depth) {
        return TreeScheduleNode {
            segments: clip(first, from, None),
            events: first.events[ev_from..].to_vec(),
            status: Some(first.status),
            children: Vec::new(),
        };
    }
    let at = choice_positions(first)[depth];
    let tau = first.events[at].time;
    let mut node = TreeScheduleNode {
        segments: clip(first, from, Some(tau)),
        events: first.events[ev_from..at].to_vec(),
        status: None,
        children: Vec::new(),
    };
    let mut i = 0;
    while i < runs.len() {
        let b = runs[i].0[depth];
        let j = i + runs[i..].iter().take_while(|(d, _)| d[depth] == b).count();
        let run = &runs[i].1;
        let EventKind::ChoiceTaken {
            task,
            occurrence,
            arc,
            ..
        } = &run.events[at].kind
        else {
            unreachable!("choice positions agree within a group");
        };
        let label = BranchLabel {
            task: *task,
            occurrence: occurrence.clone(),
            arc: arc.clone(),
            time: tau,
        };
        node.children.push((label, build(&runs[i..j], depth + 1, at + 1, tau)));
        i = j;
    }
    node
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum CoincidenceViolation {
    /// Two branches differ at `time`, before the instant of the first
    /// choice that tells them apart.
    PrefixDivergence {
        #[serde(with = "serde_rat")]
        time: Rat,
        left: usize,
        right: usize,
    },
}

fn strip_defaulted(e: &SchedulerEvent) -> SchedulerEvent {
    let mut e = e.clone();
    if let EventKind::ChoiceTaken { defaulted, .. } = &mut e.kind {
        *defaulted = false;
    }
    e
}

/// Checks that every two branches agree strictly before the instant of
/// the first choice on which they differ.
pub fn check_prefix_coincidence(ts: &TreeSchedule) -> Vec<CoincidenceViolation> {
    let branches = ts.branches();
    let mut out = Vec::new();
    for (l, a) in branches.iter().enumerate() {
        for (r, b) in branches.iter().enumerate().skip(l + 1) {
            let Some(k) = a
                .choices
                .iter()
                .zip(&b.choices)
                .position(|(x, y)| x != y)
            else {
                continue;
            };
            let tau = a.choices[k].time.min(b.choices[k].time);
            let segs = |br: &Branch| -> Vec<Segment> {
                let mut v: Vec<Segment> = Vec::new();
                for s in &br.segments {
                    if s.start < tau {
                        push_merged(
                            &mut v,
                            &Segment {
                                end: s.end.min(tau),
                                ..s.clone()
                            },
                        );
                    }
                }
                v
            };
            let evs = |br: &Branch| -> Vec<SchedulerEvent> {
                br.events
                    .iter()
                    .filter(|e| e.time < tau)
                    .map(strip_defaulted)
                    .collect()
            };
            let (sa, sb) = (segs(a), segs(b));
            let (ea, eb) = (evs(a), evs(b));
            let mut diverge: Option<Rat> = None;
            if let Some(i) = (0..sa.len().max(sb.len())).find(|&i| sa.get(i) != sb.get(i)) {
                let t = [sa.get(i), sb.get(i)].into_iter().flatten().map(|s| s.start).min();
                diverge = t;
            }
            if let Some(i) = (0..ea.len().max(eb.len())).find(|&i| ea.get(i) != eb.get(i)) {
                let t = [ea.get(i), eb.get(i)].into_iter().flatten().map(|e| e.time).min();
                diverge = match (diverge, t) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
            }
            if let Some(time) = diverge {
                out.push(CoincidenceViolation::PrefixDivergence { time, left: l, right: r });
            }
        }
    }
    out
}
