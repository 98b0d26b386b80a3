//! Closed-form and numerical performance-ratio analysis.

mod gnp;
mod proposal;
mod recurrence;
mod steady;
mod tree;

pub use gnp::{dense_gnp_ratio, pr_curve_gnp, GnpCurvePoint};
pub use proposal::{grid_proposal_probabilities, LeftRecursion, ProposalProbabilities};
pub use recurrence::*;
pub use steady::steady_state_participants;
pub use tree::{
    expected_root_weight, fixed_point_rhs, fixed_point_rhs_closed, monte_carlo_root_weight, sample_tree_forest,
    solve_tree_fixed_point, truncation_depth, FixedPointSolution, RootWeight, RootWeightMode, TreeForest,
    DEFAULT_TOLERANCE, TREE_NODE_CAP,
};
