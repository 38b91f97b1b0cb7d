//! Small dense linear algebra over the residue field `F_p`, used for the
//! dimension counts in the digit route: rank, span membership. Entries are
//! machine integers `< p`; `p < 2^32` keeps products inside `u64`... inside
//! `u128` intermediates where needed.

use crate::matrix::DvrMatrix;
use crate::ring::pow_mod_u64;

fn inv_mod(x: u64, p: u64) -> u64 {
    debug_assert!(x % p != 0, "inverse of zero in F_p");
    pow_mod_u64(x, p - 2, p)
}

/// In-place row echelon; returns the rank.
pub(crate) fn row_reduce(rows: &mut [Vec<u64>], p: u64) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..nrows).find(|&i| rows[i][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col] % p, p);
        for x in rows[rank].iter_mut() {
            *x = ((*x as u128 * inv as u128) % p as u128) as u64;
        }
        for i in 0..nrows {
            if i == rank || rows[i][col] % p == 0 {
                continue;
            }
            let c = rows[i][col] % p;
            for j in 0..ncols {
                let sub = (c as u128 * rows[rank][j] as u128) % p as u128;
                rows[i][j] = ((rows[i][j] as u128 + p as u128 * p as u128 - sub)
                    % p as u128) as u64;
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

pub(crate) fn rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    row_reduce(&mut rows, p)
}

/// Is `target` an `F_p`-linear combination of `columns`? (All vectors have
/// the same length; compared by rank growth.)
pub(crate) fn in_span(columns: &[Vec<u64>], target: &[u64], p: u64) -> bool {
    let dim = target.len();
    let base: Vec<Vec<u64>> = (0..dim)
        .map(|i| columns.iter().map(|c| c[i] % p).collect())
        .collect();
    let mut extended = base.clone();
    for (i, row) in extended.iter_mut().enumerate() {
        row.push(target[i] % p);
    }
    rank(base, p) == rank(extended, p)
}

/// Residue-field image of a matrix, row-major.
pub(crate) fn residue_rows(m: &DvrMatrix) -> Vec<Vec<u64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).residue()).collect())
        .collect()
}

/// Residue-field image of a column vector.
pub(crate) fn residue_column(v: &DvrMatrix) -> Vec<u64> {
    debug_assert_eq!(v.cols(), 1);
    (0..v.rows()).map(|i| v.get(i, 0).residue()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_known_matrices() {
        assert_eq!(rank(vec![vec![1, 2], vec![2, 4]], 5), 1);
        assert_eq!(rank(vec![vec![1, 2], vec![2, 5]], 5), 2);
        assert_eq!(rank(vec![vec![0, 0], vec![0, 0]], 3), 0);
        // Mod 3 the second row is 2x the first.
        assert_eq!(rank(vec![vec![1, 2], vec![2, 1]], 3), 1);
        assert_eq!(rank(vec![vec![1, 2], vec![2, 1]], 5), 2);
    }

    #[test]
    fn rank_is_bounded_by_both_dimensions() {
        assert_eq!(rank(vec![vec![1, 0, 0], vec![0, 1, 0]], 2), 2);
        assert_eq!(rank(vec![vec![1], vec![1], vec![0]], 2), 1);
    }

    #[test]
    fn span_membership() {
        let cols = vec![vec![1, 0, 1], vec![0, 1, 1]];
        assert!(in_span(&cols, &[1, 1, 2], 3));
        assert!(in_span(&cols, &[0, 0, 0], 3));
        assert!(!in_span(&cols, &[0, 0, 1], 3));
        assert!(in_span(&[], &[0, 0], 2));
        assert!(!in_span(&[], &[1, 0], 2));
    }
}
