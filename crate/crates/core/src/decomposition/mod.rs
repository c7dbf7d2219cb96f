//! Tree decompositions, elimination orderings, bounds and exact treewidth.

mod eo;
mod exact;
mod heuristic;
mod pid;
mod td;
mod work;

pub use eo::{eo_to_td, fill_in_width, ordering_width, td_to_eo, EliminationOrdering};
pub use exact::{treewidth_exact, CancelToken, ExactAlgorithm, ExactOptions, ExactOutcome, TreewidthSolution};
pub use heuristic::{heuristic_order, lower_bound, Heuristic, LowerBound};
pub use td::{read_comments, read_td, validate_td, TreeDecomposition, ValidationReport, Violation};
