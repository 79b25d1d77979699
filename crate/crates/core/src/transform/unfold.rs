use std::collections::HashMap;

use crate::error::TcaError;
use crate::model::{classify, require_progress, require_well_formed, Arc, GraphClass, Labeling, Node, NodeKind, TcaGraph};
use crate::time::Rat;

use super::relabel::{to_absolute, with_date};

/// Expands a graph into an absolute-labeled tree.
///
/// Trees are relabeled in place. Graphs with joins are expanded so that
/// every path gets its own copies; copies are named `{origin}#{k}` and
/// record the original id in `origin`. Cyclic graphs are cut at the first
/// after/sync node dated beyond `horizon`, which is kept as a `frontier`
/// leaf.
pub fn unfold(graph: &TcaGraph, horizon: Rat) -> Result<TcaGraph, TcaError> {
    require_well_formed(graph)?;
    let ix = graph.index();
    let cyclic = !ix.is_acyclic();
    match graph.labeling {
        Labeling::Absolute if cyclic => return Err(TcaError::Cyclic),
        Labeling::Relative => require_progress(&ix)?,
        _ => {}
    }
    if classify(graph) != GraphClass::Automaton {
        return match graph.labeling {
            Labeling::Absolute => Ok(graph.clone()),
            Labeling::Relative => to_absolute(graph),
        };
    }

    let mut out = TcaGraph::new(graph.name.clone(), Labeling::Absolute, "");
    let mut counters: HashMap<String, usize> = HashMap::new();
    let mut fresh = |key: &str| {
        let k = counters.entry(key.to_string()).or_insert(0);
        let id = format!("{key}#{k}");
        *k += 1;
        id
    };
    let init = ix.initial.expect("well-formed");
    // (original node, base of its dates, arc leading here as (orig arc, new source))
    type Pending = (usize, Rat, Option<(usize, String)>);
    let mut stack: Vec<Pending> = vec![(init, Rat::from_integer(0), None)];
    while let Some((v, base, via)) = stack.pop() {
        let orig = &graph.nodes[v];
        let abs = |d: Rat| match graph.labeling {
            Labeling::Relative => base + d,
            Labeling::Absolute => d,
        };
        let id = fresh(orig.key());
        let kind = match orig.kind.date() {
            Some(d) => with_date(orig.kind, abs(d)),
            None => NodeKind::Plain,
        };
        let cut = cyclic && kind.after_date().is_some_and(|d| d > horizon);
        out.nodes.push(Node {
            id: id.clone(),
            kind,
            inherited_deadline: orig.inherited_deadline.map(abs),
            origin: Some(orig.key().to_string()),
            frontier: cut || orig.frontier,
        });
        match via {
            None => out.initial = id.clone(),
            Some((a, from)) => {
                let arc = &graph.arcs[a];
                out.arcs.push(Arc {
                    id: fresh(arc.key()),
                    from,
                    to: id.clone(),
                    block: arc.block.clone(),
                    origin: Some(arc.key().to_string()),
                });
            }
        }
        if cut {
            continue;
        }
        let next_base = kind.after_date().unwrap_or(base);
        let next_base = match graph.labeling {
            Labeling::Relative => next_base,
            Labeling::Absolute => base,
        };
        for &a in ix.out[v].iter().rev() {
            stack.push((ix.to(a), next_base, Some((a, id.clone()))));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{f1, f3};
    use crate::time::rat;

    #[test]
    fn chains_and_trees_relabel() {
        assert_eq!(unfold(&f1(), rat(100)).unwrap(), f1());
        assert_eq!(unfold(&f3(), rat(100)).unwrap(), f1());
    }

    #[test]
    fn self_loop_is_cut_past_the_horizon() {
        let g = TcaGraph::new("p", Labeling::Relative, "n")
            .with_node("n", NodeKind::After(rat(2)))
            .with_arc("x", "n", "n", "x", rat(1));
        let u = unfold(&g, rat(7)).unwrap();
        let kinds: Vec<_> = u.nodes.iter().map(|n| (n.id.as_str(), n.kind, n.frontier)).collect();
        assert_eq!(
            kinds,
            vec![
                ("n#0", NodeKind::After(rat(2)), false),
                ("n#1", NodeKind::After(rat(4)), false),
                ("n#2", NodeKind::After(rat(6)), false),
                ("n#3", NodeKind::After(rat(8)), true),
            ]
        );
        assert_eq!(u.arcs.len(), 3);
        assert!(u.arcs.iter().all(|a| a.key() == "x"));
        assert_eq!(classify(&u), GraphClass::Chain);
    }

    #[test]
    fn joins_are_duplicated() {
        let g = TcaGraph::new("j", Labeling::Absolute, "r")
            .with_node("r", NodeKind::After(rat(0)))
            .with_node("m", NodeKind::Plain)
            .with_node("t", NodeKind::Before(rat(9)))
            .with_arc("p", "r", "m", "p", rat(1))
            .with_arc("q", "r", "m", "q", rat(2))
            .with_arc("z", "m", "t", "z", rat(1));
        let u = unfold(&g, rat(0)).unwrap();
        assert_eq!(u.nodes.len(), 5);
        assert_eq!(classify(&u), GraphClass::Tree);
        assert!(u.nodes.iter().any(|n| n.id == "t#1" && n.kind == NodeKind::Before(rat(9))));
    }

    #[test]
    fn zeno_is_rejected() {
        let g = TcaGraph::new("z", Labeling::Relative, "n")
            .with_node("n", NodeKind::Plain)
            .with_arc("x", "n", "n", "x", rat(1));
        assert!(matches!(unfold(&g, rat(5)), Err(TcaError::ZenoCycle(_))));
    }
}
