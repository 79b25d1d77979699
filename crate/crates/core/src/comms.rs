//! Static check that a sender/receiver pair communicates deterministically:
//! every sending block is over before the visibility date and every
//! receiving block starts after it, whatever the scheduler does.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::TcaError;
use crate::model::{NodeKind, TcaGraph};
use crate::time::{serde_rat, serde_stamp, Rat, TimeStamp};
use crate::transform::unfold;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoint {
    pub agent: String,
    /// Arc id, or block name when unambiguous.
    pub block: String,
}

/// One link of a communication manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommLink {
    pub sender: Endpoint,
    pub receiver: Endpoint,
    #[serde(serialize_with = "serde_stamp::serialize", deserialize_with = "stamp_or_int")]
    pub visibility: TimeStamp,
}

fn stamp_or_int<'de, D: Deserializer<'de>>(d: D) -> Result<TimeStamp, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Int(n) => Ok(TimeStamp::Finite(Rat::from_integer(n))),
        Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Accepted,
    /// No before/sync node bounds the sending block on some path.
    SenderUnbounded,
    SenderLate {
        #[serde(with = "serde_rat")]
        deadline: Rat,
    },
    ReceiverEarly {
        #[serde(with = "serde_rat")]
        start: Rat,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdict {
    /// Position of the occurrence along its path (0 for the first).
    pub index: usize,
    pub sender: String,
    pub receiver: String,
    /// Absolute visibility date for this pair.
    #[serde(with = "serde_stamp")]
    pub visibility: TimeStamp,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub pairs: Vec<PairVerdict>,
    /// Sender and receiver occurrence counts, when they differ.
    pub count_mismatch: Option<(usize, usize)>,
}

impl VisibilityReport {
    pub fn accepted(&self) -> bool {
        self.count_mismatch.is_none() && self.pairs.iter().all(|p| p.verdict == Verdict::Accepted)
    }

    pub fn first_violation(&self) -> Option<&PairVerdict> {
        self.pairs.iter().find(|p| p.verdict != Verdict::Accepted)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CommError {
    #[error("no agent named `{0}`")]
    UnknownAgent(String),
    #[error("agent `{agent}` has no block `{block}`")]
    UnknownArc { agent: String, block: String },
    #[error("no occurrence of `{0}` starts inside the horizon")]
    HorizonTooSmall(String),
    #[error("sender and receiver must be different agents")]
    SameAgent,
    #[error(transparent)]
    Tca(#[from] TcaError),
}

/// One occurrence of a block in an unfolded tree.
#[derive(Clone, Debug)]
struct Occurrence {
    id: String,
    index: usize,
    /// Greatest after/sync date at or before the source node.
    start: Rat,
    /// Over every path through the block, the nearest before-style date;
    /// the largest of those.
    latest_deadline: TimeStamp,
}

fn occurrences(graph: &TcaGraph, block: &str, horizon: Rat) -> Result<(Vec<Occurrence>, bool), CommError> {
    let key = graph
        .arc(block)
        .or_else(|| graph.find_block(block))
        .map(|a| a.key().to_string())
        .ok_or_else(|| CommError::UnknownArc {
            agent: graph.name.clone(),
            block: block.to_string(),
        })?;
    let cyclic = !graph.index().is_acyclic();
    let tree = unfold(graph, horizon)?;
    let ix = tree.index();
    let n = tree.nodes.len();
    let order = ix.topological_order().expect("unfolding is a tree");
    let zero = Rat::from_integer(0);

    let mut start = vec![zero; n];
    let mut parent_arc: Vec<Option<usize>> = vec![None; n];
    for &v in &order {
        if let Some(d) = tree.nodes[v].kind.after_date() {
            start[v] = start[v].max(d);
        }
        for &a in &ix.out[v] {
            let t = ix.to(a);
            start[t] = start[v];
            parent_arc[t] = Some(a);
        }
    }
    let mut bound = vec![TimeStamp::Infinite; n];
    for &v in order.iter().rev() {
        let below = ix.out[v].iter().map(|&a| bound[ix.to(a)]).max();
        let own = match tree.nodes[v].kind {
            NodeKind::Before(d) | NodeKind::Sync(d) => TimeStamp::Finite(d),
            _ => TimeStamp::Infinite,
        };
        bound[v] = below.map_or(own, |b| b.min(own));
    }

    let mut out = Vec::new();
    for (a, arc) in tree.arcs.iter().enumerate() {
        if arc.key() != key {
            continue;
        }
        let (from, to) = (ix.from(a), ix.to(a));
        if cyclic && start[from] >= horizon {
            continue;
        }
        let mut index = 0;
        let mut v = from;
        while let Some(p) = parent_arc[v] {
            if tree.arcs[p].key() == key {
                index += 1;
            }
            v = ix.from(p);
        }
        out.push(Occurrence {
            id: arc.id.clone(),
            index,
            start: start[from],
            latest_deadline: bound[to],
        });
    }
    Ok((out, cyclic))
}

/// Checks `link` on the unfoldings of the two agents up to `horizon`,
/// pairing the k-th sender occurrence with the k-th receiver occurrence.
/// On a cyclic sender the visibility date counts from the start of each
/// sending occurrence, like the sender's own relative dates.
pub fn check_visibility(link: &CommLink, graphs: &[TcaGraph], horizon: Rat) -> Result<VisibilityReport, CommError> {
    if link.sender.agent == link.receiver.agent {
        return Err(CommError::SameAgent);
    }
    let find = |agent: &str| {
        graphs
            .iter()
            .find(|g| g.name == agent)
            .ok_or_else(|| CommError::UnknownAgent(agent.to_string()))
    };
    let (sg, rg) = (find(&link.sender.agent)?, find(&link.receiver.agent)?);
    let (sends, cyclic) = occurrences(sg, &link.sender.block, horizon)?;
    let (recvs, _) = occurrences(rg, &link.receiver.block, horizon)?;
    if sends.is_empty() {
        return Err(CommError::HorizonTooSmall(link.sender.block.clone()));
    }
    if recvs.is_empty() {
        return Err(CommError::HorizonTooSmall(link.receiver.block.clone()));
    }

    let by_index = |occs: &[Occurrence]| {
        let mut m: BTreeMap<usize, Vec<Occurrence>> = BTreeMap::new();
        for o in occs {
            m.entry(o.index).or_default().push(o.clone());
        }
        m
    };
    let (s_by, r_by) = (by_index(&sends), by_index(&recvs));
    let mut pairs = Vec::new();
    for (k, ss) in &s_by {
        let Some(rs) = r_by.get(k) else {
            continue;
        };
        for s in ss {
            let visibility = if cyclic {
                link.visibility.shifted(s.start)
            } else {
                link.visibility
            };
            for r in rs {
                let verdict = match s.latest_deadline {
                    TimeStamp::Infinite => Verdict::SenderUnbounded,
                    TimeStamp::Finite(d) if TimeStamp::Finite(d) > visibility => {
                        Verdict::SenderLate { deadline: d }
                    }
                    _ if TimeStamp::Finite(r.start) < visibility => Verdict::ReceiverEarly { start: r.start },
                    _ => Verdict::Accepted,
                };
                pairs.push(PairVerdict {
                    index: *k,
                    sender: s.id.clone(),
                    receiver: r.id.clone(),
                    visibility,
                    verdict,
                });
            }
        }
    }
    let count_mismatch = (s_by.len() != r_by.len()).then_some((s_by.len(), r_by.len()));
    Ok(VisibilityReport { pairs, count_mismatch })
}

pub fn link_from_json(text: &str) -> Result<CommLink, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Labeling;
    use crate::time::rat;

    fn sender(before: i64) -> TcaGraph {
        TcaGraph::new("s", Labeling::Absolute, "n0")
            .with_node("n0", NodeKind::After(rat(0)))
            .with_node("n1", NodeKind::Before(rat(before)))
            .with_node("n2", NodeKind::Plain)
            .with_arc("s", "n0", "n1", "s", rat(1))
            .with_arc("t", "n1", "n2", "t", rat(1))
    }

    fn receiver(after: i64) -> TcaGraph {
        TcaGraph::new("r", Labeling::Absolute, "m0")
            .with_node("m0", NodeKind::After(rat(after)))
            .with_node("m1", NodeKind::Plain)
            .with_arc("r", "m0", "m1", "r", rat(1))
    }

    fn link(vis: i64) -> CommLink {
        link_from_json(&format!(
            r#"{{"sender": {{"agent": "s", "block": "s"}}, "receiver": {{"agent": "r", "block": "r"}}, "visibility": {vis}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn synchronized_pair_is_accepted() {
        let rep = check_visibility(&link(3), &[sender(3), receiver(3)], rat(10)).unwrap();
        assert!(rep.accepted(), "{rep:?}");
        assert_eq!(rep.pairs.len(), 1);
    }

    #[test]
    fn early_receiver_is_rejected() {
        let rep = check_visibility(&link(3), &[sender(3), receiver(2)], rat(10)).unwrap();
        assert_eq!(
            rep.first_violation().unwrap().verdict,
            Verdict::ReceiverEarly { start: rat(2) }
        );
    }

    #[test]
    fn late_and_unbounded_senders() {
        let rep = check_visibility(&link(3), &[sender(4), receiver(3)], rat(10)).unwrap();
        assert_eq!(rep.pairs[0].verdict, Verdict::SenderLate { deadline: rat(4) });
        let mut unbounded = sender(3);
        unbounded.nodes[1].kind = NodeKind::Plain;
        let rep = check_visibility(&link(3), &[unbounded, receiver(3)], rat(10)).unwrap();
        assert_eq!(rep.pairs[0].verdict, Verdict::SenderUnbounded);
    }

    #[test]
    fn lookup_errors() {
        let gs = [sender(3), receiver(3)];
        let mut l = link(3);
        l.sender.block = "zz".into();
        assert!(matches!(check_visibility(&l, &gs, rat(10)), Err(CommError::UnknownArc { .. })));
        l.sender.agent = "q".into();
        assert_eq!(check_visibility(&l, &gs, rat(10)), Err(CommError::UnknownAgent("q".into())));
    }

    fn periodic(name: &str, block: &str, after: i64, before: i64) -> TcaGraph {
        TcaGraph::new(name, Labeling::Relative, "h")
            .with_node("h", NodeKind::After(rat(after)))
            .with_node("d", NodeKind::Before(rat(before)))
            .with_arc(block, "h", "d", block, rat(1))
            .with_arc("back", "d", "h", "", rat(0))
    }

    #[test]
    fn periodic_pairs_by_index() {
        // Sender finishes within 2 of each period start, receiver starts
        // 2 after it: the same period boundary.
        let gs = [periodic("s", "s", 2, 2), periodic("r", "r", 2, 2)];
        let l = link(2);
        let rep = check_visibility(&l, &gs, rat(7)).unwrap();
        assert!(rep.count_mismatch.is_none());
        assert_eq!(rep.pairs.iter().map(|p| p.index).collect::<Vec<_>>(), vec![0, 1, 2]);
        // Visibility counts from each sending occurrence's start.
        assert_eq!(rep.pairs[1].visibility, TimeStamp::Finite(rat(6)));
        // Receiver occurrence k starts at 2(k+1) < 2(k+1) + 2.
        assert!(!rep.accepted());
        let rep = check_visibility(&link(3), &[periodic("s", "s", 2, 2), periodic("r", "r", 2, 2)], rat(1));
        assert!(matches!(rep, Err(CommError::HorizonTooSmall(_))));
    }

    #[test]
    fn mismatched_periods_are_flagged() {
        let gs = [periodic("s", "s", 1, 1), periodic("r", "r", 2, 2)];
        let rep = check_visibility(&link(1), &gs, rat(6)).unwrap();
        // Starts 1..5 against 2 and 4.
        assert_eq!(rep.count_mismatch, Some((5, 2)));
        assert!(!rep.accepted());
    }

    #[test]
    fn manifest_accepts_strings() {
        let l: CommLink = serde_json::from_str(
            r#"{"sender": {"agent": "s", "block": "s"}, "receiver": {"agent": "r", "block": "r"}, "visibility": "7/2"}"#,
        )
        .unwrap();
        assert_eq!(l.visibility, TimeStamp::Finite(crate::time::ratio(7, 2)));
    }
}
