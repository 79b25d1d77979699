//! Exhaustive feasibility oracles for small instances.
//!
//! All dates, costs and the horizon are scaled by their common
//! denominator so that every constraint date is an integer. Preemption at
//! integer instants then loses nothing: a correct schedule can be
//! rearranged slot by slot inside integer-dated windows. The search
//! assigns each unit slot `[k, k+1)` to one task or leaves it idle.
//!
//! For trees the choices are made by an adversary at each instant of
//! choice, after which the search continues separately for every branch;
//! everything scheduled before that instant is therefore shared by all
//! branches. The search does not use deadline ordering at all.

mod search;

use serde::Serialize;
use thiserror::Error;

use crate::error::TcaError;
use crate::model::{classify, ExecTimeMap, GraphClass, Labeling, TcaGraph};
use crate::scheduler::ScheduleMapping;
use crate::time::{common_denominator, scaled_integer, serde_rat, Rat, TimeStamp};
use crate::transform::{to_absolute, unfold};

pub use search::SearchStats;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("instance too large for exhaustive search: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Tca(#[from] TcaError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Upper bound on horizon (in scaled ticks) times number of tasks.
    pub max_slot_tasks: u64,
    pub max_states: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_slot_tasks: 4096,
            max_states: 2_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct DNode {
    pub after: Option<i64>,
    /// Before date or inherited deadline, whichever is smaller.
    pub deadline: Option<i64>,
    pub frontier: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct DArc {
    pub key: String,
    pub to: usize,
    pub cost: i64,
    /// Largest after date on the path from the root to the arc's source.
    pub start: i64,
    /// Arc keys from the root up to and including this arc.
    pub path: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct DTask {
    pub name: String,
    pub nodes: Vec<DNode>,
    pub arcs: Vec<DArc>,
    pub out: Vec<Vec<usize>>,
    pub initial: usize,
    /// Smallest deadline reachable from each node, inclusive.
    pub min_deadline: Vec<Option<i64>>,
}

/// Integer-scaled trees (chains being the choice-free case).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteInstance {
    pub(crate) tasks: Vec<DTask>,
    /// Every original date equals the scaled one divided by `scale`.
    pub scale: i64,
    pub horizon: i64,
}

impl DiscreteInstance {
    /// Scales `graphs` for search. Acyclic graphs are used as they are;
    /// graphs with joins or cycles are unfolded up to `horizon` first.
    pub fn new(graphs: &[TcaGraph], exec: &ExecTimeMap, horizon: Rat) -> Result<Self, FeasibilityError> {
        let mut trees = Vec::with_capacity(graphs.len());
        for (i, g) in graphs.iter().enumerate() {
            let g = exec.apply(i, g);
            let t = match (classify(&g), g.labeling) {
                (GraphClass::Automaton, _) => unfold(&g, horizon)?,
                (_, Labeling::Relative) => to_absolute(&g)?,
                _ => g,
            };
            trees.push(t);
        }
        let mut values = vec![horizon];
        for t in &trees {
            for n in &t.nodes {
                values.extend(n.kind.date());
                values.extend(n.inherited_deadline);
            }
            values.extend(t.arcs.iter().map(|a| a.block.cost));
        }
        let scale = common_denominator(values);
        let sc = |r: Rat| scaled_integer(r, scale).expect("common denominator");
        let tasks = trees
            .iter()
            .enumerate()
            .map(|(i, t)| discretize(i, t, &sc))
            .collect();
        Ok(DiscreteInstance {
            tasks,
            scale,
            horizon: sc(horizon),
        })
    }

    fn unscale(&self, v: i64) -> Rat {
        Rat::new(v, self.scale)
    }

    fn check_budget(&self, budget: &SearchBudget) -> Result<(), FeasibilityError> {
        let slots = self.horizon.max(0) as u64 * self.tasks.len().max(1) as u64;
        if slots > budget.max_slot_tasks {
            return Err(FeasibilityError::BudgetExceeded(format!(
                "{} scaled ticks x {} tasks exceeds {}",
                self.horizon,
                self.tasks.len(),
                budget.max_slot_tasks
            )));
        }
        Ok(())
    }
}

fn discretize(i: usize, t: &TcaGraph, sc: &dyn Fn(Rat) -> i64) -> DTask {
    let ix = t.index();
    let nodes: Vec<DNode> = t
        .nodes
        .iter()
        .map(|n| DNode {
            after: n.kind.after_date().map(sc),
            deadline: n.deadline_date().map(sc),
            frontier: n.frontier,
        })
        .collect();
    let mut arcs: Vec<Option<DArc>> = vec![None; t.arcs.len()];
    let initial = ix.initial.expect("well-formed");
    let mut stack = vec![(initial, 0i64, Vec::<String>::new())];
    while let Some((v, start, path)) = stack.pop() {
        let start = start.max(nodes[v].after.unwrap_or(0));
        for &a in &ix.out[v] {
            let mut p = path.clone();
            p.push(t.arcs[a].key().to_string());
            arcs[a] = Some(DArc {
                key: t.arcs[a].key().to_string(),
                to: ix.to(a),
                cost: sc(t.arcs[a].block.cost),
                start,
                path: p.clone(),
            });
            stack.push((ix.to(a), start, p));
        }
    }
    let order = ix.topological_order().expect("trees are acyclic");
    let mut min_deadline: Vec<Option<i64>> = nodes.iter().map(|n| n.deadline).collect();
    for &v in order.iter().rev() {
        for &a in &ix.out[v] {
            let w = ix.to(a);
            min_deadline[v] = match (min_deadline[v], min_deadline[w]) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            };
        }
    }
    DTask {
        name: if t.name.is_empty() {
            format!("task{i}")
        } else {
            t.name.clone()
        },
        nodes,
        arcs: arcs.into_iter().map(|a| a.expect("tree arcs are reachable")).collect(),
        out: ix.out.clone(),
        initial,
        min_deadline,
    }
}

/// An interval whose mandatory demand exceeds its length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverloadCertificate {
    #[serde(with = "serde_rat")]
    pub start: Rat,
    #[serde(with = "serde_rat")]
    pub end: Rat,
    #[serde(with = "serde_rat")]
    pub demand: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub witness: Option<ScheduleMapping>,
    pub certificate: Option<OverloadCertificate>,
    pub stats: SearchStats,
}

/// Exhaustive search on chains. A feasible verdict carries a witness
/// schedule; an infeasible one carries an overloaded interval when one
/// exists.
pub fn feasible_chains(
    chains: &[TcaGraph],
    exec: &ExecTimeMap,
    horizon: Rat,
    budget: &SearchBudget,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    for c in chains {
        if classify(c) != GraphClass::Chain {
            return Err(TcaError::Malformed(format!("`{}` is not a chain", c.name)).into());
        }
    }
    decide(chains, exec, horizon, budget)
}

/// Exhaustive AND-OR search on trees (or automata, unfolded to the
/// horizon). Witnesses are produced only for choice-free inputs.
pub fn feasible_trees(
    trees: &[TcaGraph],
    exec: &ExecTimeMap,
    horizon: Rat,
    budget: &SearchBudget,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    decide(trees, exec, horizon, budget)
}

fn decide(
    graphs: &[TcaGraph],
    exec: &ExecTimeMap,
    horizon: Rat,
    budget: &SearchBudget,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    let inst = DiscreteInstance::new(graphs, exec, horizon)?;
    inst.check_budget(budget)?;
    let mut s = search::Search::new(&inst, budget.max_states);
    let feasible = s.run()?;
    let choice_free = inst.tasks.iter().all(|t| t.out.iter().all(|o| o.len() <= 1));
    let witness = if feasible && choice_free {
        Some(s.witness(TimeStamp::Finite(horizon)))
    } else {
        None
    };
    let certificate = if feasible { None } else { overload(&inst) };
    Ok(FeasibilityVerdict {
        feasible,
        witness,
        certificate,
        stats: s.stats(),
    })
}

/// Looks for `[s, e)` where the blocks that must run entirely inside it
/// need more than `e - s`. Only blocks on every path (before the first
/// choice) are counted.
fn overload(inst: &DiscreteInstance) -> Option<OverloadCertificate> {
    let mut windows = Vec::new();
    for t in &inst.tasks {
        let mut v = t.initial;
        while let [a] = t.out[v][..] {
            let arc = &t.arcs[a];
            if let Some(d) = t.min_deadline[arc.to].filter(|&d| d <= inst.horizon) {
                windows.push((arc.start, d, arc.cost));
            }
            v = arc.to;
        }
    }
    let mut best: Option<(i64, i64, i64)> = None;
    for &(s, _, _) in &windows {
        for &(_, e, _) in &windows {
            if e <= s {
                continue;
            }
            let demand: i64 = windows
                .iter()
                .filter(|&&(ws, we, _)| ws >= s && we <= e)
                .map(|w| w.2)
                .sum();
            let excess = demand - (e - s);
            if excess > 0 && best.is_none_or(|(bs, be, bd)| excess > bd - (be - bs)) {
                best = Some((s, e, demand));
            }
        }
    }
    // A block alone in an empty window.
    if best.is_none() {
        best = windows
            .iter()
            .find(|&&(s, e, c)| e <= s && c > 0)
            .map(|&(s, e, c)| (s, e, c));
    }
    best.map(|(s, e, d)| OverloadCertificate {
        start: inst.unscale(s),
        end: inst.unscale(e),
        demand: inst.unscale(d),
    })
}

#[cfg(test)]
mod tests;
