//! Single-processor scheduling: the EDF-dyn / EDF-dyn-min simulator,
//! tree-schedule exploration and the schedule checkers.

mod oracle;
mod sim;
mod tree;
mod validate;

use serde::{Deserialize, Serialize};

use crate::time::{serde_rat, serde_stamp, Rat, TimeStamp};

pub use oracle::{ChoiceOracle, ChoiceQuery, ChoiceScript, ChoiceSetOracle, Decision, FirstBranch};
pub use sim::{edf_dyn, edf_dyn_min, simulate, MissPolicy, SimOptions};
pub use tree::{
    check_prefix_coincidence, explore_tree_schedule, explore_with, Branch, BranchLabel, CoincidenceViolation,
    TreeSchedule, TreeScheduleNode,
};
pub use validate::{check_correct, validate_schedule, ScheduleViolation};

/// One contiguous stretch of processor time given to a block occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub task: usize,
    /// Arc keys from the task's initial node up to and including `block`.
    pub occurrence: Vec<String>,
    pub block: String,
    #[serde(with = "serde_rat")]
    pub start: Rat,
    #[serde(with = "serde_rat")]
    pub end: Rat,
}

impl Segment {
    pub fn duration(&self) -> Rat {
        self.end - self.start
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleMapping {
    /// Task names, indexed by `Segment::task`.
    pub tasks: Vec<String>,
    pub segments: Vec<Segment>,
    #[serde(with = "serde_stamp")]
    pub horizon: TimeStamp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventKind {
    Release {
        task: usize,
    },
    Suspend {
        task: usize,
        #[serde(with = "serde_rat")]
        until: Rat,
    },
    DeadlineUpdate {
        task: usize,
        #[serde(with = "serde_stamp")]
        deadline: TimeStamp,
    },
    BlockComplete {
        task: usize,
        occurrence: Vec<String>,
        block: String,
    },
    ChoiceTaken {
        task: usize,
        occurrence: Vec<String>,
        arc: String,
        defaulted: bool,
    },
    DeadlineMiss {
        task: usize,
        occurrence: Vec<String>,
        #[serde(with = "serde_rat")]
        deadline: Rat,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulerEvent {
    #[serde(with = "serde_rat")]
    pub time: Rat,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// A constraint date met by a task during the run, kept for rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    pub task: usize,
    #[serde(with = "serde_rat")]
    pub time: Rat,
    /// `after`, `before` or `sync`.
    pub kind: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    DeadlineMiss,
    Zeno,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleRun {
    pub mapping: ScheduleMapping,
    pub events: Vec<SchedulerEvent>,
    pub markers: Vec<Marker>,
    pub status: Status,
}

impl ScheduleRun {
    pub fn missed(&self) -> bool {
        self.status == Status::DeadlineMiss
    }

    /// `(task, occurrence, arc)` for every choice taken, in trace order.
    pub fn choices(&self) -> impl Iterator<Item = (usize, &[String], &str)> {
        self.events.iter().filter_map(|e| match &e.kind {
            EventKind::ChoiceTaken {
                task,
                occurrence,
                arc,
                ..
            } => Some((*task, occurrence.as_slice(), arc.as_str())),
            _ => None,
        })
    }
}
