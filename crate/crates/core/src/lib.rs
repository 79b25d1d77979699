//! Time-constrained automata: model, transformations, scheduling,
//! feasibility checking, a small agent language and communication checks.

pub mod error;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod time;
pub mod transform;
pub mod scheduler;
pub mod feasibility;
pub mod corpus;
pub mod frontend;
pub mod comms;
pub mod gantt;

pub use error::{FormatError, ParseRationalError, TcaError};
pub use model::{
    classify, implicit_window, min_possible_deadline, precedes, validate_graph, Arc, Block,
    Element, ExecTimeMap, GraphClass, GraphIndex, GraphViolation, ImplicitWindow, Labeling, Node,
    NodeKind, TcaGraph,
};
pub use time::{format_rat, parse_rat, rat, ratio, Rat, TimeStamp};
