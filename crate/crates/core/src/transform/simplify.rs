//! Removal of redundant constraints and merging of after/before pairs.
//!
//! Rules, applied until a fixpoint is reached:
//!
//! * an after node dominated on every incoming path by an earlier anchor
//!   of later-or-equal date loses its after part;
//! * an after node followed by a before node of earlier date, or of the
//!   same date with a non-empty block in between, is unsatisfiable;
//!   at the same date with only empty blocks in between the pair becomes
//!   a single synchronization point;
//! * a before node followed on every path by a before node of
//!   earlier-or-equal date loses its before part.
//!
//! Nodes are never deleted: a node that loses its constraint becomes
//! `Plain`, so arc ids and block provenance survive.

use std::collections::{HashMap, HashSet};

use crate::error::TcaError;
use crate::model::{require_progress, require_well_formed, GraphIndex, Labeling, NodeKind, TcaGraph};
use crate::time::Rat;

fn zero() -> Rat {
    Rat::from_integer(0)
}

pub fn simplify(graph: &TcaGraph) -> Result<TcaGraph, TcaError> {
    require_well_formed(graph)?;
    {
        let ix = graph.index();
        match graph.labeling {
            Labeling::Absolute if !ix.is_acyclic() => return Err(TcaError::Cyclic),
            Labeling::Relative => require_progress(&ix)?,
            _ => {}
        }
    }
    let mut g = graph.clone();
    loop {
        let changed_after = drop_redundant_after(&mut g);
        if let Some((n, m)) = after_before_pairs(&g)? {
            merge_sync(&mut g, n, m);
            continue;
        }
        if let Some(v) = first_redundant_before(&g) {
            g.nodes[v].kind = match g.nodes[v].kind {
                NodeKind::Sync(d) => NodeKind::After(d),
                _ => NodeKind::Plain,
            };
            continue;
        }
        if !changed_after {
            return Ok(g);
        }
    }
}

fn drop_after_part(kind: NodeKind) -> NodeKind {
    match kind {
        NodeKind::Sync(d) => NodeKind::Before(d),
        NodeKind::After(_) => NodeKind::Plain,
        k => k,
    }
}

fn drop_redundant_after(g: &mut TcaGraph) -> bool {
    let redundant: Vec<usize> = {
        let ix = g.index();
        match g.labeling {
            Labeling::Absolute => {
                let order = ix.topological_order().expect("acyclic");
                // Smallest, over incoming paths, of the largest anchor date
                // strictly before the node; None when some path has none.
                let mut dom: Vec<Option<Option<Rat>>> = vec![None; g.nodes.len()];
                for &v in &order {
                    let here = if ix.inc[v].is_empty() {
                        None
                    } else {
                        ix.inc[v]
                            .iter()
                            .map(|&a| {
                                let u = ix.from(a);
                                let prev = dom[u].flatten();
                                match (prev, g.nodes[u].kind.after_date()) {
                                    (Some(x), Some(y)) => Some(x.max(y)),
                                    (x, y) => x.or(y),
                                }
                            })
                            .try_fold(None::<Rat>, |acc, m| {
                                let m = m?;
                                Some(Some(acc.map_or(m, |a| a.min(m))))
                            })
                            .flatten()
                    };
                    dom[v] = Some(here);
                }
                (0..g.nodes.len())
                    .filter(|&v| match (g.nodes[v].kind.after_date(), dom[v].flatten()) {
                        (Some(d), Some(m)) => m >= d,
                        _ => false,
                    })
                    .collect()
            }
            Labeling::Relative => {
                let unanchored = unanchored_nodes(&ix);
                (0..g.nodes.len())
                    .filter(|&v| g.nodes[v].kind.after_date() == Some(zero()) && !unanchored[v])
                    .collect()
            }
        }
    };
    for &v in &redundant {
        g.nodes[v].kind = drop_after_part(g.nodes[v].kind);
    }
    !redundant.is_empty()
}

/// Nodes reachable from the initial node along a path with no anchor
/// strictly before them.
fn unanchored_nodes(ix: &GraphIndex<'_>) -> Vec<bool> {
    let g = ix.graph;
    let mut seen = vec![false; g.nodes.len()];
    let Some(init) = ix.initial else {
        return seen;
    };
    let mut stack = vec![init];
    seen[init] = true;
    while let Some(v) = stack.pop() {
        if g.nodes[v].kind.is_anchor() {
            continue;
        }
        for &a in &ix.out[v] {
            let t = ix.to(a);
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// Finds the first unsatisfiable after/before pair (as an error) or the
/// first mergeable pair (anchor, before node) with a simple empty path
/// between them.
fn after_before_pairs(g: &TcaGraph) -> Result<Option<(usize, usize)>, TcaError> {
    let ix = g.index();
    let mut candidates = Vec::new();
    let impossible = |n: usize, m: usize| TcaError::ImpossibleConstraints {
        after: g.nodes[n].id.clone(),
        before: g.nodes[m].id.clone(),
    };
    match g.labeling {
        Labeling::Absolute => {
            for n in 0..g.nodes.len() {
                let Some(d) = g.nodes[n].kind.after_date() else {
                    continue;
                };
                let mut seen = HashSet::new();
                let mut stack: Vec<(usize, bool)> = ix.out[n]
                    .iter()
                    .map(|&a| (ix.to(a), g.arcs[a].block.cost > zero()))
                    .collect();
                while let Some((m, positive)) = stack.pop() {
                    if !seen.insert((m, positive)) {
                        continue;
                    }
                    if let Some(dm) = g.nodes[m].kind.before_date() {
                        if dm < d || (dm == d && positive) {
                            return Err(impossible(n, m));
                        }
                        if dm == d {
                            candidates.push((n, m));
                        }
                    }
                    for &a in &ix.out[m] {
                        stack.push((ix.to(a), positive || g.arcs[a].block.cost > zero()));
                    }
                }
            }
        }
        Labeling::Relative => {
            for m in 0..g.nodes.len() {
                if g.nodes[m].kind != NodeKind::Before(zero()) {
                    continue;
                }
                let mut seen = HashSet::new();
                let mut stack: Vec<(usize, bool)> = ix.inc[m]
                    .iter()
                    .map(|&a| (ix.from(a), g.arcs[a].block.cost > zero()))
                    .collect();
                while let Some((u, positive)) = stack.pop() {
                    if !seen.insert((u, positive)) {
                        continue;
                    }
                    if g.nodes[u].kind.is_anchor() {
                        if positive {
                            return Err(impossible(u, m));
                        }
                        candidates.push((u, m));
                        continue;
                    }
                    for &a in &ix.inc[u] {
                        stack.push((ix.from(a), positive || g.arcs[a].block.cost > zero()));
                    }
                }
            }
        }
    }
    Ok(candidates
        .into_iter()
        .find(|&(n, m)| simple_empty_path(&ix, n, m)))
}

fn simple_empty_path(ix: &GraphIndex<'_>, n: usize, m: usize) -> bool {
    let g = ix.graph;
    if ix.out[n].len() != 1 {
        return false;
    }
    let mut v = m;
    loop {
        if ix.inc[v].len() != 1 {
            return false;
        }
        let a = ix.inc[v][0];
        if g.arcs[a].block.cost != zero() {
            return false;
        }
        let u = ix.from(a);
        if u == n {
            return true;
        }
        let node = &g.nodes[u];
        if node.kind != NodeKind::Plain
            || node.inherited_deadline.is_some()
            || ix.out[u].len() != 1
            || u == m
        {
            return false;
        }
        v = u;
    }
}

fn merge_sync(g: &mut TcaGraph, n: usize, m: usize) {
    if let NodeKind::After(d) = g.nodes[n].kind {
        g.nodes[n].kind = NodeKind::Sync(d);
    }
    g.nodes[m].kind = NodeKind::Plain;
}

fn first_redundant_before(g: &TcaGraph) -> Option<usize> {
    let ix = g.index();
    (0..g.nodes.len()).find(|&n| {
        let Some(d) = g.nodes[n].kind.before_date() else {
            return false;
        };
        if ix.out[n].is_empty() || g.nodes[n].frontier {
            return false;
        }
        let start = shift(g, n);
        let mut memo = HashMap::new();
        ix.out[n]
            .iter()
            .all(|&a| dominated(&ix, ix.to(a), start, d, &mut memo))
    })
}

fn shift(g: &TcaGraph, v: usize) -> Rat {
    match g.labeling {
        Labeling::Relative => g.nodes[v].kind.after_date().unwrap_or_default(),
        Labeling::Absolute => zero(),
    }
}

/// Every maximal path from `v` meets a before part whose date, in the
/// reference base, is at most `limit`. `offset` is the position of `v`'s
/// base relative to the reference base.
fn dominated(
    ix: &GraphIndex<'_>,
    v: usize,
    offset: Rat,
    limit: Rat,
    memo: &mut HashMap<(usize, Rat), bool>,
) -> bool {
    if let Some(&r) = memo.get(&(v, offset)) {
        return r;
    }
    let g = ix.graph;
    let node = &g.nodes[v];
    let result = if node
        .kind
        .before_date()
        .is_some_and(|d| offset + d <= limit)
    {
        true
    } else if ix.out[v].is_empty() || node.frontier || offset > limit {
        false
    } else {
        // Seed the memo to cut cycles; dates grow around every cycle so a
        // revisit at the same offset cannot contribute.
        memo.insert((v, offset), false);
        let next = offset + shift(g, v);
        ix.out[v]
            .iter()
            .all(|&a| dominated(ix, ix.to(a), next, limit, memo))
    };
    memo.insert((v, offset), result);
    result
}
