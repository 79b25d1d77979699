//! Graph-to-graph transformations.

mod cdi;
mod extract;
mod relabel;
mod simplify;
mod unfold;

pub use cdi::apply_cdi;
pub use extract::{extract_chains, ChoiceSet};
pub use relabel::{to_absolute, to_relative};
pub use simplify::simplify;
pub use unfold::unfold;
