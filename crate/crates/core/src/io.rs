//! JSON file format for graphs.
//!
//! ```json
//! {
//!   "format": 1,
//!   "name": "f1",
//!   "labeling": "absolute",
//!   "initial": "n0",
//!   "nodes": [
//!     {"id": "n0", "kind": "after", "date": "1"},
//!     {"id": "C", "kind": "plain", "inherited_deadline": "6"}
//!   ],
//!   "arcs": [
//!     {"id": "a", "from": "n0", "to": "C", "block": {"name": "a", "cost": "3/2"}}
//!   ]
//! }
//! ```
//!
//! Dates and costs are canonical rational strings (`p` or `p/q`); an
//! inherited deadline of `"inf"` is equivalent to no annotation.

use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::model::{Arc, Block, Labeling, Node, NodeKind, TcaGraph};
use crate::scheduler::{Marker, ScheduleMapping, ScheduleRun, SchedulerEvent, Segment, Status};
use crate::time::{format_rat, parse_rat, serde_stamp, TimeStamp};

pub const GRAPH_FORMAT_VERSION: u32 = 1;
pub const SCHEDULE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    #[serde(default = "default_version")]
    format: u32,
    #[serde(default)]
    name: String,
    labeling: String,
    initial: String,
    nodes: Vec<NodeDoc>,
    arcs: Vec<ArcDoc>,
}

fn default_version() -> u32 {
    GRAPH_FORMAT_VERSION
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    id: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    date: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inherited_deadline: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    frontier: bool,
}

#[derive(Serialize, Deserialize)]
struct ArcDoc {
    id: String,
    from: String,
    to: String,
    block: BlockDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct BlockDoc {
    name: String,
    cost: String,
}

pub fn graph_to_json(g: &TcaGraph) -> String {
    let doc = GraphDoc {
        format: GRAPH_FORMAT_VERSION,
        name: g.name.clone(),
        labeling: match g.labeling {
            Labeling::Relative => "relative".into(),
            Labeling::Absolute => "absolute".into(),
        },
        initial: g.initial.clone(),
        nodes: g
            .nodes
            .iter()
            .map(|n| {
                let (kind, date) = match n.kind {
                    NodeKind::Plain => ("plain", None),
                    NodeKind::After(d) => ("after", Some(d)),
                    NodeKind::Before(d) => ("before", Some(d)),
                    NodeKind::Sync(d) => ("sync", Some(d)),
                };
                NodeDoc {
                    id: n.id.clone(),
                    kind: kind.into(),
                    date: date.map(format_rat),
                    inherited_deadline: n.inherited_deadline.map(format_rat),
                    origin: n.origin.clone(),
                    frontier: n.frontier,
                }
            })
            .collect(),
        arcs: g
            .arcs
            .iter()
            .map(|a| ArcDoc {
                id: a.id.clone(),
                from: a.from.clone(),
                to: a.to.clone(),
                block: BlockDoc {
                    name: a.block.name.clone(),
                    cost: format_rat(a.block.cost),
                },
                origin: a.origin.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}

pub fn graph_from_json(text: &str) -> Result<TcaGraph, FormatError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    if doc.format != GRAPH_FORMAT_VERSION {
        return Err(FormatError::Invalid(format!(
            "unsupported graph format version {}",
            doc.format
        )));
    }
    let labeling = match doc.labeling.as_str() {
        "relative" => Labeling::Relative,
        "absolute" => Labeling::Absolute,
        other => return Err(FormatError::Invalid(format!("unknown labeling `{other}`"))),
    };
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for n in doc.nodes {
        let date = || -> Result<_, FormatError> {
            let d = n
                .date
                .as_deref()
                .ok_or_else(|| FormatError::Invalid(format!("node `{}` needs a date", n.id)))?;
            Ok(parse_rat(d)?)
        };
        let kind = match n.kind.as_str() {
            "plain" => NodeKind::Plain,
            "after" => NodeKind::After(date()?),
            "before" => NodeKind::Before(date()?),
            "sync" => NodeKind::Sync(date()?),
            other => {
                return Err(FormatError::Invalid(format!(
                    "node `{}`: unknown kind `{other}`",
                    n.id
                )))
            }
        };
        let inherited_deadline = match n.inherited_deadline.as_deref() {
            None => None,
            Some(s) => s.parse::<TimeStamp>()?.finite(),
        };
        nodes.push(Node {
            id: n.id,
            kind,
            inherited_deadline,
            origin: n.origin,
            frontier: n.frontier,
        });
    }
    let mut arcs = Vec::with_capacity(doc.arcs.len());
    for a in doc.arcs {
        arcs.push(Arc {
            id: a.id,
            from: a.from,
            to: a.to,
            block: Block {
                name: a.block.name,
                cost: parse_rat(&a.block.cost)?,
            },
            origin: a.origin,
        });
    }
    Ok(TcaGraph {
        name: doc.name,
        labeling,
        initial: doc.initial,
        nodes,
        arcs,
    })
}

/// Schedule file: the run's mapping flattened next to its trace.
#[derive(Serialize, Deserialize)]
struct ScheduleDoc {
    format_version: u32,
    status: Status,
    #[serde(with = "serde_stamp")]
    horizon: TimeStamp,
    tasks: Vec<String>,
    segments: Vec<Segment>,
    events: Vec<SchedulerEvent>,
    markers: Vec<Marker>,
}

pub fn schedule_to_json(run: &ScheduleRun) -> String {
    let doc = ScheduleDoc {
        format_version: SCHEDULE_FORMAT_VERSION,
        status: run.status,
        horizon: run.mapping.horizon,
        tasks: run.mapping.tasks.clone(),
        segments: run.mapping.segments.clone(),
        events: run.events.clone(),
        markers: run.markers.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("schedule serializes");
    s.push('\n');
    s
}

pub fn schedule_from_json(text: &str) -> Result<ScheduleRun, FormatError> {
    let doc: ScheduleDoc = serde_json::from_str(text)?;
    if doc.format_version != SCHEDULE_FORMAT_VERSION {
        return Err(FormatError::Invalid(format!(
            "unsupported schedule format version {}",
            doc.format_version
        )));
    }
    Ok(ScheduleRun {
        mapping: ScheduleMapping {
            tasks: doc.tasks,
            segments: doc.segments,
            horizon: doc.horizon,
        },
        events: doc.events,
        markers: doc.markers,
        status: doc.status,
    })
}
