//! Concrete action systems: finite permutation groups on finite discrete
//! spaces, the logic action of `S_n` on structures over `0..n`, and a finite
//! window of the logic action of `S_∞` on finitely supported structures.

mod comparison;
mod discrete;
mod group;
mod logic;
mod symbolic;
mod trace;

pub use comparison::{comparison_for, comparison_scan, scan, Comparison, ComparisonOutcome, ComparisonReport, Reach};
pub use discrete::{build_finite_discrete, parse_action_file, ActionFile, BasisSpec, CcMode, FiniteDiscreteAction};
pub use group::PermGroup;
pub use logic::{build_finite_logic, FiniteLogicAction};
pub use symbolic::{build_symbolic_logic, window_drift, Descriptor, SymbolicLogicAction, WindowDrift};
pub use trace::{diagonal_position, encode_action_trace};
