use std::collections::{BTreeMap, BTreeSet};

use crate::error::TcaError;
use crate::model::{Arc, Labeling, Node, NodeKind, TcaGraph};
use crate::time::Rat;
use crate::transform::simplify;

use super::parser::{Agent, Program, Stmt, StmtKind};
use super::{FrontendError, Span};

struct RawNode {
    kind: NodeKind,
    span: Span,
    alive: bool,
    /// Where this node went when it was merged away.
    merged_into: Option<usize>,
}

struct RawArc {
    from: usize,
    to: usize,
    names: Vec<String>,
    cost: Rat,
    alive: bool,
}

impl RawArc {
    fn is_empty(&self) -> bool {
        self.names.is_empty() && self.cost == Rat::from_integer(0)
    }
}

struct Builder {
    nodes: Vec<RawNode>,
    arcs: Vec<RawArc>,
    initial: usize,
    /// Work statements seen since the last node.
    pending: Vec<(String, Rat)>,
    /// Loop and while heads with the span of the statement.
    loops: Vec<(usize, Span)>,
}

fn advances_time(body: &[Stmt]) -> bool {
    let zero = Rat::from_integer(0);
    body.iter().any(|s| match &s.kind {
        StmtKind::Work { cost, .. } => *cost > zero,
        StmtKind::After(d) | StmtKind::Advance(d) => *d > zero,
        StmtKind::Before(_) => false,
        StmtKind::IfChoice { then, els } => advances_time(then) || advances_time(els),
        StmtKind::WhileChoice(b) | StmtKind::Loop(b) => advances_time(b),
    })
}

/// The single node equivalent to `u` followed by `v` through an empty
/// block, if one exists. Dates of `v` count from `u`'s date when `u` is
/// an anchor.
fn combine(u: NodeKind, v: NodeKind) -> Option<NodeKind> {
    use NodeKind::*;
    let zero = Rat::from_integer(0);
    match (u, v) {
        (k, Plain) | (Plain, k) => Some(k),
        (Before(b), Before(c)) => Some(Before(b.min(c))),
        (Before(b), After(a)) if a == b => Some(Sync(a)),
        (Before(b), Sync(a)) if a <= b => Some(Sync(a)),
        (After(a), After(b)) => Some(After(a + b)),
        (After(a), Sync(b)) => Some(Sync(a + b)),
        (After(a), Before(b)) if b == zero => Some(Sync(a)),
        (Sync(a), Before(_)) => Some(Sync(a)),
        (Sync(a), After(b) | Sync(b)) if b == zero => Some(Sync(a)),
        _ => None,
    }
}

impl Builder {
    fn node(&mut self, kind: NodeKind, span: Span) -> usize {
        self.nodes.push(RawNode {
            kind,
            span,
            alive: true,
            merged_into: None,
        });
        self.nodes.len() - 1
    }

    fn flush(&mut self, from: usize, to: usize) {
        let (names, costs): (Vec<String>, Vec<Rat>) = self.pending.drain(..).unzip();
        self.arcs.push(RawArc {
            from,
            to,
            names,
            cost: costs.into_iter().sum(),
            alive: true,
        });
    }

    fn body(&mut self, stmts: &[Stmt], mut cur: Option<usize>) -> Result<Option<usize>, FrontendError> {
        for s in stmts {
            let Some(c) = cur else {
                return Err(FrontendError::Unreachable { span: s.span });
            };
            cur = self.stmt(s, c)?;
        }
        Ok(cur)
    }

    fn stmt(&mut self, s: &Stmt, cur: usize) -> Result<Option<usize>, FrontendError> {
        let timed = |b: &mut Builder, kind| {
            let n = b.node(kind, s.span);
            b.flush(cur, n);
            Ok(Some(n))
        };
        match &s.kind {
            StmtKind::Work { name, cost } => {
                self.pending.push((name.clone(), *cost));
                Ok(Some(cur))
            }
            StmtKind::After(d) => timed(self, NodeKind::After(*d)),
            StmtKind::Before(d) => timed(self, NodeKind::Before(*d)),
            StmtKind::Advance(d) => timed(self, NodeKind::Sync(*d)),
            StmtKind::IfChoice { then, els } => {
                let c = self.node(NodeKind::Plain, s.span);
                self.flush(cur, c);
                let join = self.node(NodeKind::Plain, s.span);
                let mut reached = false;
                for branch in [then, els] {
                    if let Some(end) = self.body(branch, Some(c))? {
                        self.flush(end, join);
                        reached = true;
                    }
                }
                if reached {
                    Ok(Some(join))
                } else {
                    self.nodes[join].alive = false;
                    Ok(None)
                }
            }
            StmtKind::WhileChoice(body) | StmtKind::Loop(body) => {
                if !advances_time(body) {
                    return Err(FrontendError::EmptyLoop { span: s.span });
                }
                let head = self.node(NodeKind::Plain, s.span);
                self.flush(cur, head);
                self.loops.push((head, s.span));
                if let Some(end) = self.body(body, Some(head))? {
                    self.flush(end, head);
                }
                Ok(matches!(s.kind, StmtKind::WhileChoice(_)).then_some(head))
            }
        }
    }

    fn degree(&self, v: usize) -> (usize, usize) {
        let live = || self.arcs.iter().filter(|a| a.alive);
        (
            live().filter(|a| a.to == v).count(),
            live().filter(|a| a.from == v).count(),
        )
    }

    fn absorb(&mut self, gone: usize, into: usize) {
        for a in self.arcs.iter_mut().filter(|a| a.alive) {
            if a.from == gone {
                a.from = into;
            }
            if a.to == gone {
                a.to = into;
            }
        }
        self.nodes[gone].alive = false;
        self.nodes[gone].merged_into = Some(into);
    }

    fn resolve(&self, mut v: usize) -> usize {
        while let Some(n) = self.nodes[v].merged_into {
            v = n;
        }
        v
    }

    /// Tries to remove empty arc `e`; true on success.
    fn contract_one(&mut self, e: usize) -> bool {
        let (u, v) = (self.arcs[e].from, self.arcs[e].to);
        if u == v {
            return false;
        }
        let (u_in, u_out) = self.degree(u);
        let (v_in, v_out) = self.degree(v);
        let (ku, kv) = (self.nodes[u].kind, self.nodes[v].kind);
        if u_out == 1 && v_in == 1 {
            if let Some(k) = combine(ku, kv) {
                self.arcs[e].alive = false;
                let (keep, gone) = if v == self.initial { (v, u) } else { (u, v) };
                self.nodes[keep].kind = k;
                self.absorb(gone, keep);
                return true;
            }
        }
        if ku == NodeKind::Plain && u_out == 1 && u != self.initial {
            self.arcs[e].alive = false;
            self.absorb(u, v);
            return true;
        }
        // Folding a terminal node into a choice would erase a branch.
        if kv == NodeKind::Plain && v_in == 1 && v != self.initial && (v_out == 1 || u_out == 1) {
            self.arcs[e].alive = false;
            self.absorb(v, u);
            return true;
        }
        if ku == NodeKind::Plain && u == self.initial && u_in == 0 && u_out == 1 {
            self.arcs[e].alive = false;
            self.nodes[u].alive = false;
            self.nodes[u].merged_into = Some(v);
            self.initial = v;
            return true;
        }
        false
    }

    fn contract(&mut self) {
        loop {
            let candidates: Vec<usize> = (0..self.arcs.len())
                .filter(|&e| self.arcs[e].alive && self.arcs[e].is_empty())
                .collect();
            if !candidates.into_iter().any(|e| self.contract_one(e)) {
                break;
            }
        }
    }

    /// Renumbers surviving nodes `n0..` and names arcs after their blocks
    /// where that is unambiguous.
    fn finish(&self, name: &str) -> (TcaGraph, BTreeMap<String, usize>) {
        let mut ids = vec![String::new(); self.nodes.len()];
        let mut by_id = BTreeMap::new();
        for (i, v) in (0..self.nodes.len()).filter(|&v| self.nodes[v].alive).enumerate() {
            ids[v] = format!("n{i}");
            by_id.insert(ids[v].clone(), v);
        }
        let arcs: Vec<&RawArc> = self.arcs.iter().filter(|a| a.alive).collect();
        let labels: Vec<String> = arcs.iter().map(|a| a.names.join(";")).collect();
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for l in &labels {
            *seen.entry(l.as_str()).or_default() += 1;
        }
        let mut taken: BTreeSet<String> = labels
            .iter()
            .filter(|l| !l.is_empty() && seen[l.as_str()] == 1)
            .cloned()
            .collect();
        let mut next = 0;
        let mut g = TcaGraph::new(name, Labeling::Relative, ids[self.initial].clone());
        for v in (0..self.nodes.len()).filter(|&v| self.nodes[v].alive) {
            g.nodes.push(Node::new(ids[v].clone(), self.nodes[v].kind));
        }
        for (a, label) in arcs.iter().zip(&labels) {
            let id = if !label.is_empty() && seen[label.as_str()] == 1 {
                label.clone()
            } else {
                while taken.contains(&format!("e{next}")) {
                    next += 1;
                }
                let id = format!("e{next}");
                taken.insert(id.clone());
                id
            };
            g.arcs.push(Arc::new(id, &ids[a.from], &ids[a.to], label, a.cost));
        }
        (g, by_id)
    }
}

fn compile_agent(agent: &Agent) -> Result<TcaGraph, FrontendError> {
    let mut b = Builder {
        nodes: Vec::new(),
        arcs: Vec::new(),
        initial: 0,
        pending: Vec::new(),
        loops: Vec::new(),
    };
    let start = b.node(NodeKind::Plain, agent.span);
    if let Some(end) = b.body(&agent.body, Some(start))? {
        if !b.pending.is_empty() || b.degree(end).1 > 0 {
            let last = b.node(NodeKind::Plain, agent.span);
            b.flush(end, last);
        }
    }
    b.contract();
    let (graph, by_id) = b.finish(&agent.name);
    let span_of = |id: &str| by_id.get(id).map_or(agent.span, |&v| b.nodes[v].span);

    let zeno: BTreeSet<usize> = graph
        .index()
        .zeno_nodes()
        .into_iter()
        .map(|v| by_id[&graph.nodes[v].id])
        .collect();
    if !zeno.is_empty() {
        let span = b
            .loops
            .iter()
            .find(|(head, _)| zeno.contains(&b.resolve(*head)))
            .map_or_else(|| b.nodes[*zeno.first().unwrap()].span, |(_, s)| *s);
        let nodes = graph
            .nodes
            .iter()
            .filter(|n| zeno.contains(&by_id[&n.id]))
            .map(|n| n.id.clone())
            .collect();
        return Err(FrontendError::ZenoCycle { span, nodes });
    }
    match simplify(&graph) {
        Ok(g) => Ok(g),
        Err(TcaError::ImpossibleConstraints { after, before }) => Err(FrontendError::ImpossibleConstraints {
            span: span_of(&before),
            after,
            before,
        }),
        Err(other) => unreachable!("compiled graph rejected by simplify: {other}"),
    }
}

/// One relative, simplified automaton per agent.
pub fn compile(program: &Program) -> Result<Vec<TcaGraph>, FrontendError> {
    program.agents.iter().map(compile_agent).collect()
}
