//! Seeded generators of small random instances, used by the agreement
//! tests and by `tca corpus`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Arc, Labeling, Node, NodeKind, TcaGraph};
use crate::time::{rat, Rat};

/// A set of tasks to be scheduled together up to `horizon`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graphs: Vec<TcaGraph>,
    pub horizon: Rat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainParams {
    pub max_tasks: usize,
    pub max_blocks: usize,
    pub max_horizon: i64,
    pub max_cost: i64,
    /// Allow dates that decrease along a chain, producing after/before
    /// pairs that cannot both hold.
    pub inversions: bool,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            max_tasks: 3,
            max_blocks: 3,
            max_horizon: 16,
            max_cost: 4,
            inversions: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeParams {
    pub max_tasks: usize,
    /// Choice nodes over the whole instance.
    pub max_choices: usize,
    pub max_horizon: i64,
    pub max_cost: i64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_tasks: 2,
            max_choices: 2,
            max_horizon: 12,
            max_cost: 3,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct Builder<'r, R: Rng> {
    rng: &'r mut R,
    graph: TcaGraph,
    max_cost: i64,
    inversions: bool,
    nodes: usize,
}

impl<R: Rng> Builder<'_, R> {
    fn node(&mut self, kind: NodeKind) -> String {
        let id = format!("n{}", self.nodes);
        self.nodes += 1;
        self.graph.nodes.push(Node::new(id.clone(), kind));
        id
    }

    fn cost(&mut self) -> i64 {
        self.rng.gen_range(0..=self.max_cost)
    }

    fn arc(&mut self, from: &str, to: &str, cost: i64) {
        let id = format!("b{}", self.graph.arcs.len());
        self.graph.arcs.push(Arc::new(&id, from, to, &id, rat(cost)));
    }

    /// A random node kind dated a little after `now + cost`; returns the
    /// kind and the new reference date.
    fn kind(&mut self, now: i64, cost: i64, last: bool) -> (NodeKind, i64) {
        let step = (cost + self.rng.gen_range(-1..=4)).max(0);
        let mut d = now + step;
        if self.inversions && self.rng.gen_bool(0.25) {
            d = (now - self.rng.gen_range(0..=2)).max(0);
        }
        let r = rat(d);
        let roll = self.rng.gen_range(0..10);
        match roll {
            _ if last && roll < 8 => (NodeKind::Before(r), d),
            0..=2 => (NodeKind::Plain, d),
            3..=5 => (NodeKind::Before(r), d),
            6..=7 => (NodeKind::After(r), d),
            _ => (NodeKind::Sync(r), d),
        }
    }

    /// Appends a path of `blocks` arcs after `from`, returning the last node
    /// and reference date.
    fn path(&mut self, from: &str, now: i64, blocks: usize, end_is_leaf: bool) -> (String, i64) {
        let (mut cur, mut now) = (from.to_string(), now);
        for i in 0..blocks {
            let cost = self.cost();
            let (k, d) = self.kind(now, cost, end_is_leaf && i + 1 == blocks);
            let n = self.node(k);
            self.arc(&cur, &n, cost);
            cur = n;
            now = d;
        }
        (cur, now)
    }
}

pub fn random_chain<R: Rng>(rng: &mut R, name: &str, horizon: i64, p: &ChainParams) -> TcaGraph {
    let mut b = Builder {
        rng,
        graph: TcaGraph::new(name, Labeling::Absolute, "n0"),
        max_cost: p.max_cost,
        inversions: p.inversions,
        nodes: 0,
    };
    let start = b.rng.gen_range(0..=horizon / 3);
    b.node(NodeKind::After(rat(start)));
    let blocks = b.rng.gen_range(1..=p.max_blocks);
    b.path("n0", start, blocks, true);
    b.graph
}

pub fn chain_instance<R: Rng>(rng: &mut R, p: &ChainParams) -> Instance {
    let horizon = rng.gen_range(4..=p.max_horizon);
    let tasks = rng.gen_range(1..=p.max_tasks);
    let graphs = (0..tasks)
        .map(|i| random_chain(rng, &format!("c{i}"), horizon, p))
        .collect();
    Instance {
        graphs,
        horizon: rat(horizon),
    }
}

fn random_tree<R: Rng>(rng: &mut R, name: &str, horizon: i64, choices: usize, max_cost: i64) -> TcaGraph {
    let mut b = Builder {
        rng,
        graph: TcaGraph::new(name, Labeling::Absolute, "n0"),
        max_cost,
        inversions: false,
        nodes: 0,
    };
    let start = b.rng.gen_range(0..=horizon / 4);
    b.node(NodeKind::After(rat(start)));
    // Frontier of open leaves: (node, reference date).
    let mut open = vec![("n0".to_string(), start)];
    let mut left = choices;
    while let Some((leaf, now)) = open.pop() {
        let blocks = b.rng.gen_range(1..=2);
        if left > 0 {
            let (c, now) = b.path(&leaf, now, blocks, false);
            left -= 1;
            for _ in 0..2 {
                let blocks = b.rng.gen_range(1..=2);
                let cost = b.cost();
                let (first, d) = b.kind(now, cost, false);
                let n = b.node(first);
                b.arc(&c, &n, cost);
                if left > 0 && b.rng.gen_bool(0.5) {
                    open.push((n, d));
                } else {
                    b.path(&n, d, blocks - 1, true);
                }
            }
        } else {
            b.path(&leaf, now, blocks, true);
        }
    }
    b.graph
}

pub fn tree_instance<R: Rng>(rng: &mut R, p: &TreeParams) -> Instance {
    let horizon = rng.gen_range(4..=p.max_horizon);
    let tasks = rng.gen_range(1..=p.max_tasks);
    let mut left = p.max_choices;
    let mut graphs = Vec::new();
    for i in 0..tasks {
        let c = if i + 1 == tasks { left } else { rng.gen_range(0..=left) };
        left -= c;
        graphs.push(random_tree(rng, &format!("t{i}"), horizon, c, p.max_cost));
    }
    Instance {
        graphs,
        horizon: rat(horizon),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify, validate_graph, GraphClass};

    #[test]
    fn generators_are_deterministic_and_well_formed() {
        let a = chain_instance(&mut rng(7), &ChainParams::default());
        let b = chain_instance(&mut rng(7), &ChainParams::default());
        assert_eq!(a, b);
        for seed in 0..50 {
            let inst = chain_instance(&mut rng(seed), &ChainParams::default());
            for g in &inst.graphs {
                assert_eq!(classify(g), GraphClass::Chain);
                assert!(validate_graph(g).is_empty(), "{g:?}");
            }
            let inst = tree_instance(&mut rng(seed), &TreeParams::default());
            let choices: usize = inst
                .graphs
                .iter()
                .map(|g| {
                    let ix = g.index();
                    (0..g.nodes.len()).filter(|&v| ix.is_choice(v)).count()
                })
                .sum();
            assert!(choices <= 2);
            for g in &inst.graphs {
                assert_ne!(classify(g), GraphClass::Automaton);
                assert!(validate_graph(g).is_empty(), "{g:?}");
            }
        }
    }
}
