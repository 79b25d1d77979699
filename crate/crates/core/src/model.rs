//! The time-constrained graph model.
//!
//! A [`TcaGraph`] is a directed multigraph whose arcs carry blocks of code
//! and whose nodes carry at most one time constraint. Chains, trees and
//! automata are all represented by the same type; [`classify`] tells them
//! apart structurally.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::error::TcaError;
use crate::time::{Rat, TimeStamp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Labeling {
    Relative,
    Absolute,
}

/// The constraint borne by a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Plain,
    /// Succeeding blocks start no earlier than the date.
    After(Rat),
    /// Preceding blocks finish no later than the date.
    Before(Rat),
    /// Both an after and a before constraint at one date.
    Sync(Rat),
}

impl NodeKind {
    pub fn date(self) -> Option<Rat> {
        match self {
            NodeKind::Plain => None,
            NodeKind::After(d) | NodeKind::Before(d) | NodeKind::Sync(d) => Some(d),
        }
    }

    /// Date of the after part, if any. Relative dates are measured from
    /// the most recent node for which this is `Some`.
    pub fn after_date(self) -> Option<Rat> {
        match self {
            NodeKind::After(d) | NodeKind::Sync(d) => Some(d),
            _ => None,
        }
    }

    pub fn before_date(self) -> Option<Rat> {
        match self {
            NodeKind::Before(d) | NodeKind::Sync(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_anchor(self) -> bool {
        self.after_date().is_some()
    }

    pub fn symbol(self) -> &'static str {
        match self {
            NodeKind::Plain => "o",
            NodeKind::After(_) => ">",
            NodeKind::Before(_) => "<",
            NodeKind::Sync(_) => "<>",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Deadline inherited by a choice node (see `transform::apply_cdi`).
    /// Interpreted in the same base as the node's own date.
    pub inherited_deadline: Option<Rat>,
    /// Originating automaton node, for nodes produced by unfolding.
    pub origin: Option<String>,
    /// Set on nodes where an unfolding was cut at its horizon.
    pub frontier: bool,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Self {
        Node {
            id: id.into(),
            kind,
            inherited_deadline: None,
            origin: None,
            frontier: false,
        }
    }

    /// Smallest before-style date borne by the node, annotation included.
    pub fn deadline_date(&self) -> Option<Rat> {
        match (self.kind.before_date(), self.inherited_deadline) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn key(&self) -> &str {
        self.origin.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    /// Required execution time. Zero models an empty block.
    pub cost: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub id: String,
    pub from: String,
    pub to: String,
    pub block: Block,
    /// Originating automaton arc, for arcs produced by unfolding.
    pub origin: Option<String>,
}

impl Arc {
    pub fn new(
        id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        name: impl Into<String>,
        cost: Rat,
    ) -> Self {
        Arc {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            block: Block {
                name: name.into(),
                cost,
            },
            origin: None,
        }
    }

    /// Identity used in occurrence paths: the originating arc when the
    /// arc comes from an unfolding, its own id otherwise.
    pub fn key(&self) -> &str {
        self.origin.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TcaGraph {
    pub name: String,
    pub labeling: Labeling,
    pub initial: String,
    pub nodes: Vec<Node>,
    pub arcs: Vec<Arc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GraphClass {
    Chain,
    Tree,
    Automaton,
}

/// A node or an arc of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Node(String),
    Arc(String),
}

/// Adjacency view over a graph. Arcs whose endpoints are undeclared are
/// left out of the adjacency lists.
pub struct GraphIndex<'g> {
    pub graph: &'g TcaGraph,
    node_ix: HashMap<&'g str, usize>,
    arc_ix: HashMap<&'g str, usize>,
    pub out: Vec<Vec<usize>>,
    pub inc: Vec<Vec<usize>>,
    pub arc_from: Vec<Option<usize>>,
    pub arc_to: Vec<Option<usize>>,
    pub initial: Option<usize>,
}

impl<'g> GraphIndex<'g> {
    pub fn new(graph: &'g TcaGraph) -> Self {
        let mut node_ix = HashMap::new();
        for (i, n) in graph.nodes.iter().enumerate() {
            node_ix.entry(n.id.as_str()).or_insert(i);
        }
        let mut arc_ix = HashMap::new();
        for (i, a) in graph.arcs.iter().enumerate() {
            arc_ix.entry(a.id.as_str()).or_insert(i);
        }
        let n = graph.nodes.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut arc_from = Vec::with_capacity(graph.arcs.len());
        let mut arc_to = Vec::with_capacity(graph.arcs.len());
        for (i, a) in graph.arcs.iter().enumerate() {
            let f = node_ix.get(a.from.as_str()).copied();
            let t = node_ix.get(a.to.as_str()).copied();
            if let (Some(f), Some(t)) = (f, t) {
                out[f].push(i);
                inc[t].push(i);
            }
            arc_from.push(f);
            arc_to.push(t);
        }
        let initial = node_ix.get(graph.initial.as_str()).copied();
        GraphIndex {
            graph,
            node_ix,
            arc_ix,
            out,
            inc,
            arc_from,
            arc_to,
            initial,
        }
    }

    pub fn node(&self, id: &str) -> Option<usize> {
        self.node_ix.get(id).copied()
    }

    pub fn arc(&self, id: &str) -> Option<usize> {
        self.arc_ix.get(id).copied()
    }

    pub fn from(&self, arc: usize) -> usize {
        self.arc_from[arc].expect("dangling arc")
    }

    pub fn to(&self, arc: usize) -> usize {
        self.arc_to[arc].expect("dangling arc")
    }

    pub fn is_choice(&self, node: usize) -> bool {
        self.out[node].len() >= 2
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Kahn's algorithm; `None` when a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.graph.nodes.len();
        let mut indeg: Vec<usize> = self.inc.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &a in &self.out[v] {
                let t = self.to(a);
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    queue.push_back(t);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn reachable_from_initial(&self) -> Vec<bool> {
        let mut seen = vec![false; self.graph.nodes.len()];
        let Some(init) = self.initial else {
            return seen;
        };
        let mut stack = vec![init];
        seen[init] = true;
        while let Some(v) = stack.pop() {
            for &a in &self.out[v] {
                let t = self.to(a);
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Nodes lying on (or between) cycles that contain no after/sync node
    /// of strictly positive date.
    pub fn zeno_nodes(&self) -> Vec<usize> {
        let g = self.graph;
        let n = g.nodes.len();
        let progress = |v: usize| {
            g.nodes[v]
                .kind
                .after_date()
                .is_some_and(|d| d > Rat::from_integer(0))
        };
        let mut alive: Vec<bool> = (0..n).map(|v| !progress(v)).collect();
        // Peel nodes without an alive predecessor or successor until stable.
        loop {
            let mut changed = false;
            for v in 0..n {
                if !alive[v] {
                    continue;
                }
                let has_out = self.out[v].iter().any(|&a| alive[self.to(a)]);
                let has_in = self.inc[v].iter().any(|&a| alive[self.from(a)]);
                if !has_out || !has_in {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..n).filter(|&v| alive[v]).collect()
    }
}

impl TcaGraph {
    pub fn new(name: impl Into<String>, labeling: Labeling, initial: impl Into<String>) -> Self {
        TcaGraph {
            name: name.into(),
            labeling,
            initial: initial.into(),
            nodes: Vec::new(),
            arcs: Vec::new(),
        }
    }

    pub fn with_node(mut self, id: &str, kind: NodeKind) -> Self {
        self.nodes.push(Node::new(id, kind));
        self
    }

    pub fn with_arc(mut self, id: &str, from: &str, to: &str, name: &str, cost: Rat) -> Self {
        self.arcs.push(Arc::new(id, from, to, name, cost));
        self
    }

    pub fn index(&self) -> GraphIndex<'_> {
        GraphIndex::new(self)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn arc(&self, id: &str) -> Option<&Arc> {
        self.arcs.iter().find(|a| a.id == id)
    }

    /// Returns the arc with the given id, or the unique arc whose block
    /// bears that name.
    pub fn find_block(&self, id_or_name: &str) -> Option<&Arc> {
        self.arc(id_or_name).or_else(|| {
            let mut it = self.arcs.iter().filter(|a| a.block.name == id_or_name);
            match (it.next(), it.next()) {
                (Some(a), None) => Some(a),
                _ => None,
            }
        })
    }
}

/// Execution-time function: the cost of every block, per task.
///
/// Keys are arc keys ([`Arc::key`]), so an unfolded tree shares the costs
/// of the automaton it came from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExecTimeMap {
    per_task: Vec<BTreeMap<String, Rat>>,
}

impl ExecTimeMap {
    /// The costs declared on the blocks themselves.
    pub fn from_graphs(graphs: &[TcaGraph]) -> Self {
        ExecTimeMap {
            per_task: graphs
                .iter()
                .map(|g| {
                    g.arcs
                        .iter()
                        .map(|a| (a.key().to_string(), a.block.cost))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn set(&mut self, task: usize, arc_key: &str, cost: Rat) {
        if self.per_task.len() <= task {
            self.per_task.resize(task + 1, BTreeMap::new());
        }
        self.per_task[task].insert(arc_key.to_string(), cost);
    }

    pub fn with(mut self, task: usize, arc_key: &str, cost: Rat) -> Self {
        self.set(task, arc_key, cost);
        self
    }

    pub fn cost(&self, task: usize, arc_key: &str) -> Option<Rat> {
        self.per_task.get(task)?.get(arc_key).copied()
    }

    /// Rewrites block costs of `graph` (task `task`) from the map.
    pub fn apply(&self, task: usize, graph: &TcaGraph) -> TcaGraph {
        let mut g = graph.clone();
        for a in &mut g.arcs {
            if let Some(c) = self.cost(task, a.key()) {
                a.block.cost = c;
            }
        }
        g
    }
}

pub fn classify(graph: &TcaGraph) -> GraphClass {
    let ix = graph.index();
    if !ix.is_acyclic() {
        return GraphClass::Automaton;
    }
    let n = graph.nodes.len();
    if (0..n).all(|v| ix.out[v].len() <= 1 && ix.inc[v].len() <= 1) {
        return GraphClass::Chain;
    }
    let tree = (0..n).all(|v| {
        if Some(v) == ix.initial {
            ix.inc[v].is_empty()
        } else {
            ix.inc[v].len() == 1
        }
    });
    if tree {
        GraphClass::Tree
    } else {
        GraphClass::Automaton
    }
}

/// A broken structural invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum GraphViolation {
    DuplicateNode { node: String },
    DuplicateArc { arc: String },
    UnknownInitial { node: String },
    DanglingArc { arc: String, node: String },
    Unreachable { node: String },
    ZenoCycle { nodes: Vec<String> },
    AbsoluteCyclic,
    NegativeCost { arc: String },
    NegativeDate { node: String },
    MisplacedInheritedDeadline { node: String },
}

pub fn validate_graph(graph: &TcaGraph) -> Vec<GraphViolation> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for n in &graph.nodes {
        if !seen.insert(n.id.as_str()) {
            out.push(GraphViolation::DuplicateNode { node: n.id.clone() });
        }
    }
    let mut seen = std::collections::HashSet::new();
    for a in &graph.arcs {
        if !seen.insert(a.id.as_str()) {
            out.push(GraphViolation::DuplicateArc { arc: a.id.clone() });
        }
    }
    let ix = graph.index();
    if ix.initial.is_none() {
        out.push(GraphViolation::UnknownInitial {
            node: graph.initial.clone(),
        });
    }
    for (i, a) in graph.arcs.iter().enumerate() {
        if ix.arc_from[i].is_none() {
            out.push(GraphViolation::DanglingArc {
                arc: a.id.clone(),
                node: a.from.clone(),
            });
        }
        if ix.arc_to[i].is_none() {
            out.push(GraphViolation::DanglingArc {
                arc: a.id.clone(),
                node: a.to.clone(),
            });
        }
        if a.block.cost < Rat::from_integer(0) {
            out.push(GraphViolation::NegativeCost { arc: a.id.clone() });
        }
    }
    if ix.initial.is_some() {
        let reach = ix.reachable_from_initial();
        for (v, n) in graph.nodes.iter().enumerate() {
            if !reach[v] {
                out.push(GraphViolation::Unreachable { node: n.id.clone() });
            }
        }
    }
    for (v, n) in graph.nodes.iter().enumerate() {
        let negative = |d: Rat| d < Rat::from_integer(0);
        if n.kind.date().is_some_and(negative) || n.inherited_deadline.is_some_and(negative) {
            out.push(GraphViolation::NegativeDate { node: n.id.clone() });
        }
        // An annotation that could be folded into the node's own kind has
        // no business outside a choice node.
        if n.inherited_deadline.is_some()
            && !ix.is_choice(v)
            && matches!(n.kind, NodeKind::Plain | NodeKind::Before(_))
        {
            out.push(GraphViolation::MisplacedInheritedDeadline { node: n.id.clone() });
        }
    }
    match graph.labeling {
        Labeling::Absolute => {
            if !ix.is_acyclic() {
                out.push(GraphViolation::AbsoluteCyclic);
            }
        }
        Labeling::Relative => {
            let zeno = ix.zeno_nodes();
            if !zeno.is_empty() {
                out.push(GraphViolation::ZenoCycle {
                    nodes: zeno.iter().map(|&v| graph.nodes[v].id.clone()).collect(),
                });
            }
        }
    }
    out
}

/// Fails with [`TcaError::ZenoCycle`] when the progress condition is broken.
pub(crate) fn require_progress(ix: &GraphIndex<'_>) -> Result<(), TcaError> {
    let zeno = ix.zeno_nodes();
    if zeno.is_empty() {
        Ok(())
    } else {
        Err(TcaError::ZenoCycle(
            zeno.iter().map(|&v| ix.graph.nodes[v].id.clone()).collect(),
        ))
    }
}

/// Structural sanity required by the algorithms (ids resolve, every node
/// reachable). Violations of the timing invariants are not checked here.
pub(crate) fn require_well_formed(graph: &TcaGraph) -> Result<(), TcaError> {
    let structural: Vec<_> = validate_graph(graph)
        .into_iter()
        .filter(|v| {
            matches!(
                v,
                GraphViolation::DuplicateNode { .. }
                    | GraphViolation::DuplicateArc { .. }
                    | GraphViolation::UnknownInitial { .. }
                    | GraphViolation::DanglingArc { .. }
                    | GraphViolation::Unreachable { .. }
            )
        })
        .collect();
    if structural.is_empty() {
        Ok(())
    } else {
        Err(TcaError::Malformed(format!("{structural:?}")))
    }
}

/// Strict precedence under the transitive closure of "immediately
/// precedes" (node → outgoing arc → target node).
pub fn precedes(graph: &TcaGraph, x: &Element, y: &Element) -> Result<bool, TcaError> {
    let ix = graph.index();
    let resolve = |e: &Element| -> Result<(bool, usize), TcaError> {
        match e {
            Element::Node(id) => ix
                .node(id)
                .map(|v| (true, v))
                .ok_or_else(|| TcaError::UnknownElement(id.clone())),
            Element::Arc(id) => ix
                .arc(id)
                .filter(|&a| ix.arc_from[a].is_some() && ix.arc_to[a].is_some())
                .map(|a| (false, a))
                .ok_or_else(|| TcaError::UnknownElement(id.clone())),
        }
    };
    let (x_node, x) = resolve(x)?;
    let (y_node, y) = resolve(y)?;
    if !ix.is_acyclic() {
        return Err(TcaError::Cyclic);
    }
    // Nodes strictly after x.
    let mut stack: Vec<usize> = if x_node {
        ix.out[x].iter().map(|&a| ix.to(a)).collect()
    } else {
        vec![ix.to(x)]
    };
    if !y_node && x_node && ix.from(y) == x {
        return Ok(true);
    }
    let mut seen = vec![false; graph.nodes.len()];
    while let Some(v) = stack.pop() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if y_node && v == y {
            return Ok(true);
        }
        if !y_node && ix.from(y) == v {
            return Ok(true);
        }
        stack.extend(ix.out[v].iter().map(|&a| ix.to(a)));
    }
    Ok(false)
}

/// The implicit time window of a block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicitWindow {
    /// Greatest after/sync date among preceding nodes (0 when none).
    pub start: Rat,
    /// Per maximal path through the block (in arc declaration order), the
    /// smallest before-style date succeeding it.
    pub deadlines: Vec<TimeStamp>,
}

impl ImplicitWindow {
    pub fn min_deadline(&self) -> TimeStamp {
        self.deadlines
            .iter()
            .copied()
            .min()
            .unwrap_or(TimeStamp::Infinite)
    }
}

fn require_absolute_acyclic(graph: &TcaGraph, ix: &GraphIndex<'_>) -> Result<(), TcaError> {
    if graph.labeling != Labeling::Absolute {
        return Err(TcaError::NotAbsolute);
    }
    if !ix.is_acyclic() {
        return Err(TcaError::Cyclic);
    }
    Ok(())
}

pub fn implicit_window(graph: &TcaGraph, arc_id: &str) -> Result<ImplicitWindow, TcaError> {
    let ix = graph.index();
    let arc = ix
        .arc(arc_id)
        .filter(|&a| ix.arc_from[a].is_some() && ix.arc_to[a].is_some())
        .ok_or_else(|| TcaError::UnknownElement(arc_id.to_string()))?;
    require_absolute_acyclic(graph, &ix)?;

    // Start: ancestors of the source node, inclusive.
    let mut start = Rat::from_integer(0);
    let mut seen = vec![false; graph.nodes.len()];
    let mut stack = vec![ix.from(arc)];
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut seen[v], true) {
            continue;
        }
        if let Some(d) = graph.nodes[v].kind.after_date() {
            start = start.max(d);
        }
        stack.extend(ix.inc[v].iter().map(|&a| ix.from(a)));
    }

    // Deadlines: one per maximal path from the target node.
    let mut deadlines = Vec::new();
    fn walk(ix: &GraphIndex<'_>, v: usize, best: TimeStamp, out: &mut Vec<TimeStamp>) {
        let node = &ix.graph.nodes[v];
        let best = match node.deadline_date() {
            Some(d) => best.min(TimeStamp::Finite(d)),
            None => best,
        };
        if ix.out[v].is_empty() {
            out.push(best);
        }
        for &a in &ix.out[v] {
            walk(ix, ix.to(a), best, out);
        }
    }
    walk(&ix, ix.to(arc), TimeStamp::Infinite, &mut deadlines);
    Ok(ImplicitWindow { start, deadlines })
}

pub fn min_possible_deadline(graph: &TcaGraph, arc_id: &str) -> Result<TimeStamp, TcaError> {
    implicit_window(graph, arc_id).map(|w| w.min_deadline())
}

/// For every node `v`, the smallest before-style date reachable from `v`
/// (inclusive), expressed in the base of `v`'s own date.
///
/// On relative graphs passing through an after/sync node shifts the base
/// by its date; shifts are non-negative so this is a shortest-path
/// problem, solved by Bellman-Ford relaxation.
pub(crate) fn min_reachable_deadlines(ix: &GraphIndex<'_>) -> Vec<TimeStamp> {
    let g = ix.graph;
    let n = g.nodes.len();
    let shift = |v: usize| match g.labeling {
        Labeling::Relative => g.nodes[v].kind.after_date().unwrap_or_default(),
        Labeling::Absolute => Rat::from_integer(0),
    };
    let mut md: Vec<TimeStamp> = g
        .nodes
        .iter()
        .map(|node| {
            node.deadline_date()
                .map(TimeStamp::Finite)
                .unwrap_or(TimeStamp::Infinite)
        })
        .collect();
    for _ in 0..=n {
        let mut changed = false;
        for v in 0..n {
            for &a in &ix.out[v] {
                let cand = md[ix.to(a)].shifted(shift(v));
                if cand < md[v] {
                    md[v] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    md
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::time::rat;

    #[test]
    fn classify_fixtures() {
        assert_eq!(classify(&f1()), GraphClass::Chain);
        assert_eq!(classify(&f9()), GraphClass::Tree);
    }

    #[test]
    fn validate_detects_dangling_and_zeno() {
        assert!(validate_graph(&f1()).is_empty());
        let mut g = f1();
        g.arcs[0].to = "ghost".into();
        let v = validate_graph(&g);
        assert!(v.contains(&GraphViolation::DanglingArc {
            arc: g.arcs[0].id.clone(),
            node: "ghost".into()
        }));

        let zeno = TcaGraph::new("z", Labeling::Relative, "n0")
            .with_node("n0", NodeKind::Plain)
            .with_arc("x", "n0", "n0", "x", rat(1));
        assert_eq!(
            validate_graph(&zeno),
            vec![GraphViolation::ZenoCycle {
                nodes: vec!["n0".into()]
            }]
        );
    }

    #[test]
    fn zero_dated_after_does_not_count_as_progress() {
        let g = TcaGraph::new("z", Labeling::Relative, "n0")
            .with_node("n0", NodeKind::After(rat(0)))
            .with_arc("x", "n0", "n0", "x", rat(1));
        assert!(!g.index().zeno_nodes().is_empty());
        let g = TcaGraph::new("p", Labeling::Relative, "n0")
            .with_node("n0", NodeKind::Sync(rat(1)))
            .with_arc("x", "n0", "n0", "x", rat(1));
        assert!(validate_graph(&g).is_empty());
    }

    #[test]
    fn precedes_on_chain_and_tree() {
        let a = |s: &str| Element::Arc(s.into());
        let g = f1();
        assert!(precedes(&g, &a("a"), &a("d")).unwrap());
        assert!(!precedes(&g, &a("d"), &a("a")).unwrap());
        let t = f9();
        assert!(!precedes(&t, &a("b"), &a("c")).unwrap());
        assert!(!precedes(&t, &a("c"), &a("b")).unwrap());
        assert!(precedes(&t, &Element::Node("C".into()), &a("c")).unwrap());
        assert!(matches!(
            precedes(&t, &a("zz"), &a("c")),
            Err(TcaError::UnknownElement(_))
        ));
    }

    #[test]
    fn precedes_is_a_strict_partial_order() {
        for g in [f1(), f9()] {
            let elems: Vec<Element> = g
                .nodes
                .iter()
                .map(|n| Element::Node(n.id.clone()))
                .chain(g.arcs.iter().map(|a| Element::Arc(a.id.clone())))
                .collect();
            let p = |x: &Element, y: &Element| precedes(&g, x, y).unwrap();
            for x in &elems {
                assert!(!p(x, x));
                for y in &elems {
                    if p(x, y) {
                        assert!(!p(y, x));
                    }
                    for z in &elems {
                        if p(x, y) && p(y, z) {
                            assert!(p(x, z));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn implicit_windows_on_fixtures() {
        let g = f1();
        let w = implicit_window(&g, "a").unwrap();
        assert_eq!((w.start, w.deadlines.clone()), (rat(1), vec![TimeStamp::Finite(rat(5))]));
        let w = implicit_window(&g, "d").unwrap();
        assert_eq!((w.start, w.deadlines.clone()), (rat(7), vec![TimeStamp::Finite(rat(10))]));
        let t = f9();
        let w = implicit_window(&t, "a").unwrap();
        assert_eq!(w.start, rat(0));
        assert_eq!(w.deadlines, vec![TimeStamp::Finite(rat(6)), TimeStamp::Finite(rat(7))]);
    }

    #[test]
    fn min_possible_deadline_examples() {
        assert_eq!(min_possible_deadline(&f9(), "a").unwrap(), TimeStamp::Finite(rat(6)));
        assert_eq!(min_possible_deadline(&f1(), "c").unwrap(), TimeStamp::Finite(rat(7)));
        let open = TcaGraph::new("o", Labeling::Absolute, "r")
            .with_node("r", NodeKind::After(rat(0)))
            .with_node("C", NodeKind::Plain)
            .with_node("x", NodeKind::Plain)
            .with_node("y", NodeKind::Plain)
            .with_arc("a", "r", "C", "a", rat(1))
            .with_arc("b", "C", "x", "b", rat(1))
            .with_arc("c", "C", "y", "c", rat(1));
        assert_eq!(min_possible_deadline(&open, "a").unwrap(), TimeStamp::Infinite);
        assert!(matches!(
            min_possible_deadline(&f1(), "nope"),
            Err(TcaError::UnknownElement(_))
        ));
    }

    #[test]
    fn windows_are_ordered_along_simplified_chain() {
        let g = f1();
        let mut prev: Option<ImplicitWindow> = None;
        for a in &g.arcs {
            let w = implicit_window(&g, &a.id).unwrap();
            assert!(TimeStamp::Finite(w.start) <= w.min_deadline());
            if let Some(p) = prev {
                assert!(p.start <= w.start);
                assert!(p.min_deadline() <= w.min_deadline());
            }
            prev = Some(w);
        }
    }

    #[test]
    fn min_possible_deadline_matches_path_enumeration() {
        let t = f9();
        let ix = t.index();
        let md = min_reachable_deadlines(&ix);
        for a in &t.arcs {
            let w = implicit_window(&t, &a.id).unwrap();
            let to = ix.node(&a.to).unwrap();
            assert_eq!(md[to], w.min_deadline());
        }
    }
}
