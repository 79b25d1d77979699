use crate::error::TcaError;
use crate::model::{min_reachable_deadlines, require_progress, require_well_formed, Labeling, TcaGraph};
use crate::time::TimeStamp;

/// Annotates every choice node with the smallest deadline reachable
/// through any of its branches (the choice-deadline inheritance).
///
/// Existing annotations are discarded and recomputed. A choice from
/// which no deadline is reachable gets no annotation.
pub fn apply_cdi(graph: &TcaGraph) -> Result<TcaGraph, TcaError> {
    require_well_formed(graph)?;
    let mut g = graph.clone();
    for n in &mut g.nodes {
        n.inherited_deadline = None;
    }
    let ix = g.index();
    match g.labeling {
        Labeling::Absolute if !ix.is_acyclic() => return Err(TcaError::Cyclic),
        Labeling::Relative => require_progress(&ix)?,
        _ => {}
    }
    let md = min_reachable_deadlines(&ix);
    let annotations: Vec<_> = (0..g.nodes.len())
        .map(|c| {
            if !ix.is_choice(c) {
                return None;
            }
            let shift = match g.labeling {
                Labeling::Relative => g.nodes[c].kind.after_date().unwrap_or_default(),
                Labeling::Absolute => Default::default(),
            };
            ix.out[c]
                .iter()
                .map(|&a| md[ix.to(a)].shifted(shift))
                .min()
                .and_then(TimeStamp::finite)
        })
        .collect();
    drop(ix);
    for (n, tau) in g.nodes.iter_mut().zip(annotations) {
        n.inherited_deadline = tau;
    }
    Ok(g)
}
