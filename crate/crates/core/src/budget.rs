//! Size limits for system construction and table computation.

use crate::{Error, Result};

pub const BUDGET_ENV: &str = "RANKFORGE_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Group order of finite permutation actions.
    pub group: usize,
    /// Points of finite permutation actions and of symbolic logic systems.
    pub points: usize,
    /// Universe size of the finite logic action.
    pub universe: usize,
    /// Support window of the symbolic logic action.
    pub support: usize,
    /// Tuple length of logic-action basis descriptors.
    pub tuple_len: usize,
    /// Total bits of one level of the comparison table, summed over components.
    pub cells: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            group: 16,
            points: 12,
            universe: 4,
            support: 3,
            tuple_len: 3,
            cells: 1 << 30,
        }
    }
}

impl Budget {
    /// Effectively unbounded; used by library callers that size their own inputs.
    pub fn unlimited() -> Self {
        Budget {
            group: usize::MAX,
            points: usize::MAX,
            universe: usize::MAX,
            support: usize::MAX,
            tuple_len: usize::MAX,
            cells: u128::MAX,
        }
    }

    /// Defaults, overridden by `RANKFORGE_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(spec) => Budget::default().with_overrides(&spec),
            Err(_) => Ok(Budget::default()),
        }
    }

    /// Applies `key=value` overrides separated by commas, e.g. `g=32,n=5`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("budget entry `{item}` is not key=value")))?;
            let value: u128 = value
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("budget value `{value}` is not a number")))?;
            let small = usize::try_from(value).unwrap_or(usize::MAX);
            match key.trim() {
                "g" | "group" => self.group = small,
                "x" | "points" => self.points = small,
                "n" | "universe" => self.universe = small,
                "s" | "support" => self.support = small,
                "k" | "tuple_len" => self.tuple_len = small,
                "cells" => self.cells = value,
                other => return Err(Error::Usage(format!("unknown budget key `{other}`"))),
            }
        }
        Ok(self)
    }

    pub(crate) fn check(what: &str, actual: usize, limit: usize) -> Result<()> {
        if actual > limit {
            return Err(Error::budget(what, actual as u128, limit as u128));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let b = Budget::default().with_overrides("g=32, n=5,cells=99").unwrap();
        assert_eq!((b.group, b.universe, b.cells), (32, 5, 99));
        assert_eq!(b.points, 12);
        assert!(Budget::default().with_overrides("q=1").is_err());
        assert!(Budget::default().with_overrides("g").is_err());
    }
}
