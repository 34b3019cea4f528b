//! Kuhn-Munkres assignment in O(n³) using row/column potentials.
//!
//! Generic over the cost type so integer costs are solved exactly.

use num_traits::{Bounded, Num, Signed};

/// Cost element. Potentials go negative, so the type must be signed.
pub trait Cost: Num + Signed + Bounded + PartialOrd + Copy {}

impl<T: Num + Signed + Bounded + PartialOrd + Copy> Cost for T {}

/// Minimum-cost perfect matching on a square matrix.
/// Returns `assignment[row] = column`.
///
/// Panics if the matrix is not square.
pub fn solve_min<C: Cost>(cost: &[Vec<C>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    assert!(cost.iter().all(|r| r.len() == n), "cost matrix must be square");

    // 1-based potentials; column 0 is a sentinel.
    let two = C::one() + C::one();
    let inf = C::max_value() / (two * two);
    let mut u = vec![C::zero(); n + 1];
    let mut v = vec![C::zero(); n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut min_v = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < min_v[j] {
                    min_v[j] = reduced;
                    way[j] = j0;
                }
                if min_v[j] < delta {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] = u[row_of[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    min_v[j] = min_v[j] - delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0; n];
    for j in 1..=n {
        if row_of[j] != 0 {
            assignment[row_of[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Maximum-weight one-to-one matching on a rectangular matrix.
///
/// The matrix is padded to a square with zero weights and solved as a
/// minimum-cost problem on `max - weight`. Returns, for each row, the
/// matched column or `None` when the row was matched to padding.
pub fn max_weight_matching<C: Cost>(weights: &[Vec<C>]) -> Vec<Option<usize>> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let size = rows.max(cols);
    if size == 0 {
        return vec![None; rows];
    }
    let max = weights
        .iter()
        .flatten()
        .copied()
        .fold(C::zero(), |m, w| if w > m { w } else { m });
    let cost: Vec<Vec<C>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    let w = if i < rows && j < cols { weights[i][j] } else { C::zero() };
                    max - w
                })
                .collect()
        })
        .collect();
    solve_min(&cost)
        .into_iter()
        .take(rows)
        .map(|j| (j < cols).then_some(j))
        .collect()
}
