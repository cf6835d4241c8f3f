//! Rank engines for finite group actions and finite relational structures.
//!
//! The crate computes the Hjorth comparison relations `≤_α` between
//! (point, basic open set) pairs of an abstract [`hjorth::ActionSystem`],
//! the induced equivalences `≡_α`, and the Hjorth rank of a point. The same
//! machinery is instantiated for finite permutation actions, for the logic
//! action of `S_n` on finite structures, and for a symbolic window of the
//! logic action of `S_∞` on finitely supported structures.
//!
//! Alongside, [`scott`] computes back-and-forth equivalence and Scott rank of
//! finite structures by level-synchronous partition refinement, and
//! [`oracle`] holds deliberately naive reference implementations that the
//! engines are checked against.
//!
//! Transfinite levels are represented by naturals: every decreasing chain of
//! relations on a finite set stabilizes, and the stabilized relation stands in
//! for every limit stage. See [`Level`].

pub mod actions;
pub mod bits;
pub mod budget;
mod error;
pub mod gen;
pub mod hjorth;
mod level;
pub mod oracle;
pub mod scott;
pub mod structures;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use level::Level;
