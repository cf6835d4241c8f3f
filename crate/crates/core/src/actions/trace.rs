use crate::hjorth::ActionSystem;
use crate::{Error, Result};

/// Position of `(k, l)` when the pairs of `0..rows × 0..cols` are listed by
/// `k + l`, then by `l`. This is the diagonal pairing restricted to the
/// rectangle, so positions fill `0..rows·cols` without gaps.
pub fn diagonal_position(k: usize, l: usize, rows: usize, cols: usize) -> usize {
    let d = k + l;
    let before: usize = (0..d).map(|e| diagonal_len(e, rows, cols)).sum();
    // on diagonal d, l runs from max(0, d - rows + 1) upward
    let l_min = (d + 1).saturating_sub(rows);
    before + (l - l_min)
}

fn diagonal_len(d: usize, rows: usize, cols: usize) -> usize {
    let l_min = (d + 1).saturating_sub(rows);
    let l_max = d.min(cols.saturating_sub(1));
    (l_max + 1).saturating_sub(l_min)
}

/// The bit sequence recording, for each basis element `V_k` and point `l`,
/// whether `V_k·x` meets `{l}`.
pub fn encode_action_trace<S: ActionSystem + ?Sized>(sys: &S, x: usize) -> Result<Vec<bool>> {
    let group = sys
        .group()
        .ok_or_else(|| Error::Unsupported("trace encoding needs the group action".into()))?;
    let (rows, cols) = (sys.num_basis(), sys.num_points());
    if x >= cols {
        return Err(Error::UnknownPoint(x));
    }
    let mut out = vec![false; rows * cols];
    for k in 0..rows {
        for g in group.members(k).iter() {
            out[diagonal_position(k, group.act(g, x), rows, cols)] = true;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_positions_are_a_bijection() {
        for rows in 1..6 {
            for cols in 1..6 {
                let mut seen = vec![false; rows * cols];
                for k in 0..rows {
                    for l in 0..cols {
                        let p = diagonal_position(k, l, rows, cols);
                        assert!(!std::mem::replace(&mut seen[p], true));
                    }
                }
                assert!(seen.iter().all(|&s| s));
            }
        }
        assert_eq!(diagonal_position(0, 0, 3, 3), 0);
        assert_eq!(diagonal_position(1, 0, 3, 3), 1);
        assert_eq!(diagonal_position(0, 1, 3, 3), 2);
    }
}
