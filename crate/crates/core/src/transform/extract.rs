use std::collections::BTreeMap;

use crate::error::TcaError;
use crate::model::{require_well_formed, Labeling, Node, NodeKind, TcaGraph};

use super::relabel::to_absolute;

/// Resolved choices: for a task and the path of arc keys leading to a
/// choice node, the key of the arc taken there.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChoiceSet {
    pub choices: BTreeMap<(usize, Vec<String>), String>,
}

impl ChoiceSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, task: usize, occurrence: Vec<String>, arc: impl Into<String>) {
        self.choices.insert((task, occurrence), arc.into());
    }

    pub fn with(mut self, task: usize, occurrence: &[&str], arc: &str) -> Self {
        self.insert(task, occurrence.iter().map(|s| s.to_string()).collect(), arc);
        self
    }

    pub fn get(&self, task: usize, occurrence: &[String]) -> Option<&str> {
        self.choices
            .get(&(task, occurrence.to_vec()))
            .map(String::as_str)
    }
}

/// Folds a node's inherited deadline into its own constraint where the
/// result is expressible by a single node kind.
fn fold_inherited(node: &Node) -> Node {
    let mut out = node.clone();
    let Some(tau) = node.inherited_deadline else {
        return out;
    };
    let folded = match node.kind {
        NodeKind::Plain => Some(NodeKind::Before(tau)),
        NodeKind::Before(d) => Some(NodeKind::Before(d.min(tau))),
        NodeKind::After(d) if d == tau => Some(NodeKind::Sync(d)),
        NodeKind::Sync(d) if d <= tau => Some(NodeKind::Sync(d)),
        _ => None,
    };
    if let Some(k) = folded {
        out.kind = k;
        out.inherited_deadline = None;
    }
    out
}

/// Resolves the choices of each tree and returns one absolute chain per
/// task. Node and arc ids are kept; inherited deadlines on the chosen
/// path are folded into the chain's constraints.
pub fn extract_chains(trees: &[TcaGraph], choices: &ChoiceSet) -> Result<Vec<TcaGraph>, TcaError> {
    trees
        .iter()
        .enumerate()
        .map(|(task, tree)| extract_one(task, tree, choices))
        .collect()
}

fn extract_one(task: usize, tree: &TcaGraph, choices: &ChoiceSet) -> Result<TcaGraph, TcaError> {
    require_well_formed(tree)?;
    let abs;
    let tree = match tree.labeling {
        Labeling::Absolute => tree,
        Labeling::Relative => {
            abs = to_absolute(tree)?;
            &abs
        }
    };
    let ix = tree.index();
    if !ix.is_acyclic() {
        return Err(TcaError::Cyclic);
    }
    let mut chain = TcaGraph::new(tree.name.clone(), Labeling::Absolute, tree.initial.clone());
    let mut v = ix.initial.expect("well-formed");
    let mut path: Vec<String> = Vec::new();
    loop {
        chain.nodes.push(fold_inherited(&tree.nodes[v]));
        let next = match ix.out[v].as_slice() {
            [] => break,
            [a] => *a,
            outs => {
                let key = choices.get(task, &path).ok_or_else(|| TcaError::UnresolvedChoice {
                    task,
                    occurrence: path.clone(),
                })?;
                *outs
                    .iter()
                    .find(|&&a| tree.arcs[a].key() == key)
                    .ok_or_else(|| TcaError::BadChoice {
                        task,
                        occurrence: path.clone(),
                        arc: key.to_string(),
                    })?
            }
        };
        chain.arcs.push(tree.arcs[next].clone());
        path.push(tree.arcs[next].key().to_string());
        v = ix.to(next);
    }
    Ok(chain)
}
