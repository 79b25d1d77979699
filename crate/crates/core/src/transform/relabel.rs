use crate::error::TcaError;
use crate::model::{GraphIndex, Labeling, NodeKind, TcaGraph};
use crate::time::Rat;

/// For every node, the date of the nearest after/sync node strictly
/// before it (0 for the initial node). `date_of` gives the absolute date
/// of an anchor given its own base.
fn bases(
    ix: &GraphIndex<'_>,
    order: &[usize],
    anchor_abs: impl Fn(usize, Rat) -> Option<Rat>,
) -> Result<Vec<Rat>, TcaError> {
    let g = ix.graph;
    let mut base: Vec<Option<Rat>> = vec![None; g.nodes.len()];
    if let Some(init) = ix.initial {
        base[init] = Some(Rat::from_integer(0));
    }
    for &v in order {
        let Some(b) = base[v] else {
            continue;
        };
        let next = anchor_abs(v, b).unwrap_or(b);
        for &a in &ix.out[v] {
            let t = ix.to(a);
            match base[t] {
                None => base[t] = Some(next),
                Some(prev) if prev != next => {
                    return Err(TcaError::AmbiguousBase(g.nodes[t].id.clone()))
                }
                Some(_) => {}
            }
        }
    }
    Ok(base.into_iter().map(Option::unwrap_or_default).collect())
}

pub(super) fn with_date(kind: NodeKind, d: Rat) -> NodeKind {
    match kind {
        NodeKind::Plain => NodeKind::Plain,
        NodeKind::After(_) => NodeKind::After(d),
        NodeKind::Before(_) => NodeKind::Before(d),
        NodeKind::Sync(_) => NodeKind::Sync(d),
    }
}

/// Rewrites every date relative to the nearest preceding after/sync node.
pub fn to_relative(graph: &TcaGraph) -> Result<TcaGraph, TcaError> {
    if graph.labeling != Labeling::Absolute {
        return Err(TcaError::NotAbsolute);
    }
    let ix = graph.index();
    let order = ix.topological_order().ok_or(TcaError::Cyclic)?;
    let base = bases(&ix, &order, |v, _| graph.nodes[v].kind.after_date())?;
    let mut out = graph.clone();
    out.labeling = Labeling::Relative;
    for (v, node) in out.nodes.iter_mut().enumerate() {
        let rel = |d: Rat| -> Result<Rat, TcaError> {
            if d < base[v] {
                Err(TcaError::NotSimplified(node.id.clone()))
            } else {
                Ok(d - base[v])
            }
        };
        if let Some(d) = node.kind.date() {
            node.kind = with_date(node.kind, rel(d)?);
        }
        if let Some(d) = node.inherited_deadline {
            node.inherited_deadline = Some(rel(d)?);
        }
    }
    Ok(out)
}

/// Accumulates relative dates from the initial node.
pub fn to_absolute(graph: &TcaGraph) -> Result<TcaGraph, TcaError> {
    if graph.labeling != Labeling::Relative {
        return Err(TcaError::NotRelative);
    }
    let ix = graph.index();
    let order = ix.topological_order().ok_or(TcaError::Cyclic)?;
    let base = bases(&ix, &order, |v, b| {
        graph.nodes[v].kind.after_date().map(|d| b + d)
    })?;
    let mut out = graph.clone();
    out.labeling = Labeling::Absolute;
    for (v, node) in out.nodes.iter_mut().enumerate() {
        if let Some(d) = node.kind.date() {
            node.kind = with_date(node.kind, base[v] + d);
        }
        if let Some(d) = node.inherited_deadline {
            node.inherited_deadline = Some(base[v] + d);
        }
    }
    Ok(out)
}
