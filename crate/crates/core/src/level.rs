use std::fmt;
use std::str::FromStr;

use crate::Error;

/// A level of a stratified relation.
///
/// Finite inputs only ever produce finitely many distinct levels, so limit
/// ordinals collapse onto the stabilized relation, exposed as `Stab`. Asking
/// for a natural level past stabilization returns the stabilized value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    At(usize),
    Stab,
}

impl Level {
    /// Resolves the level against a stabilization index.
    pub fn resolve(self, stab: usize) -> usize {
        match self {
            Level::At(a) => a.min(stab),
            Level::Stab => stab,
        }
    }
}

impl From<usize> for Level {
    fn from(a: usize) -> Self {
        Level::At(a)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::At(a) => write!(f, "{a}"),
            Level::Stab => f.write_str("stab"),
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("stab") {
            return Ok(Level::Stab);
        }
        s.parse::<usize>()
            .map(Level::At)
            .map_err(|_| Error::Usage(format!("invalid level `{s}`")))
    }
}
