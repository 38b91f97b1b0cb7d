//! Smith normal form over a truncated DVR, with invertible transform
//! tracking.
//!
//! Every matrix over `R/pi^m` can be brought to a diagonal of uniformizer
//! powers `diag(pi^a_1, ..., pi^a_r, 0, ...)` with `a_1 <= a_2 <= ...` by
//! invertible row and column operations, because the minimum-valuation entry
//! of the working submatrix divides every other entry exactly. Pivoting on it
//! clears its row and column in a single pass (the ultrametric keeps the rest
//! of the submatrix at valuation >= the pivot's), so the exponents come out
//! nondecreasing with no unit normalization step.
//!
//! At finite precision the diagonal has a *censored* tail: once the working
//! submatrix is identically zero mod `pi^m` the remaining slots could be
//! genuine zeros or torsion of exponent >= m, and the routine reports them as
//! [`Valuation::Censored`] rather than guessing.

use crate::matrix::DvrMatrix;
use crate::ring::{DvrElement, Valuation};

/// Exact quotient `x / pivot` for `val(x) >= val(pivot)`, both nonzero.
/// The returned `q` satisfies `q * pivot == x` exactly at working precision,
/// because the stored unit parts multiply to a stored unit.
fn divide_exact(x: &DvrElement, pivot: &DvrElement) -> DvrElement {
    let dx = x.unit_decompose().expect("dividend must be nonzero");
    let dp = pivot.unit_decompose().expect("pivot must be nonzero");
    debug_assert!(
        dx.exponent >= dp.exponent,
        "dividend valuation below pivot valuation"
    );
    let q = &dx.unit * &dp.unit.invert().expect("unit part is invertible");
    q.shift_up(dx.exponent - dp.exponent)
}

/// Outcome of [`smith_normal_form`]: `d = u * original * v` with all four
/// transforms invertible and their inverses tracked alongside.
#[derive(Debug, Clone)]
pub struct SnfResult {
    /// The diagonalized matrix.
    pub d: DvrMatrix,
    /// Row transform (left factor) and its inverse.
    pub u: DvrMatrix,
    pub u_inv: DvrMatrix,
    /// Column transform (right factor) and its inverse.
    pub v: DvrMatrix,
    pub v_inv: DvrMatrix,
    /// Diagonal valuations, length `min(rows, cols)`: a nondecreasing finite
    /// prefix followed by a censored tail.
    pub exponents: Vec<Valuation>,
    /// Number of uncensored diagonal slots.
    pub rank: usize,
}

/// Summary of the cokernel `target / image` read off the diagonal.
///
/// Censored diagonal slots are counted into `free_rank` (they are
/// indistinguishable from vanishing columns at this precision) and also
/// reported in `censored` so callers can see how many of those free summands
/// might really be torsion of exponent >= m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CokernelStructure {
    /// Number of `R/pi^m` summands (including censored slots).
    pub free_rank: usize,
    /// Finite torsion exponents `1 <= a < m`, nondecreasing.
    pub torsion: Vec<u32>,
    /// How many of the free summands are precision-ambiguous.
    pub censored: usize,
}

/// Diagonalize `m` by tracked elementary operations.
///
/// Pivot selection is deterministic: the minimum-valuation entry of the
/// working submatrix, scanning row-major and keeping the first strict
/// minimum.
pub fn smith_normal_form(m: &DvrMatrix) -> SnfResult {
    let ring = m.ring().clone();
    let (rows, cols) = (m.rows(), m.cols());
    let steps = rows.min(cols);

    let mut work = m.clone();
    let mut u = DvrMatrix::identity(&ring, rows);
    let mut u_inv = DvrMatrix::identity(&ring, rows);
    let mut v = DvrMatrix::identity(&ring, cols);
    let mut v_inv = DvrMatrix::identity(&ring, cols);
    let mut exponents = Vec::with_capacity(steps);

    for t in 0..steps {
        // Find the first strict minimum-valuation entry, row-major.
        let mut best: Option<(usize, usize, u32)> = None;
        for i in t..rows {
            for j in t..cols {
                if let Valuation::Finite(a) = work.valuation(i, j) {
                    if best.map_or(true, |(_, _, b)| a < b) {
                        best = Some((i, j, a));
                    }
                }
            }
        }
        let Some((pi, pj, a)) = best else {
            break; // submatrix is zero mod pi^m: censored tail
        };

        work.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        work.swap_cols(t, pj);
        v.swap_cols(t, pj);
        v_inv.swap_rows(t, pj);

        let pivot = work.get(t, t);
        // Clear the column: row_i -= q * row_t, with the inverse transform
        // picking up the opposite column operation.
        for i in t + 1..rows {
            let x = work.get(i, t);
            if x.is_zero() {
                continue;
            }
            let q = divide_exact(&x, &pivot);
            let c = -&q;
            work.row_addmul(i, t, &c);
            u.row_addmul(i, t, &c);
            u_inv.col_addmul(t, i, &q);
        }
        // Clear the row. Column t below the pivot is already zero, so these
        // operations touch row t only and the submatrix valuations are
        // unchanged — one pass suffices.
        for j in t + 1..cols {
            let x = work.get(t, j);
            if x.is_zero() {
                continue;
            }
            let q = divide_exact(&x, &pivot);
            let c = -&q;
            work.col_addmul(j, t, &c);
            v.col_addmul(j, t, &c);
            v_inv.row_addmul(t, j, &q);
        }
        exponents.push(Valuation::Finite(a));
    }

    let rank = exponents.len();
    let censored = Valuation::Censored(ring.precision());
    exponents.resize(steps, censored);

    SnfResult {
        d: work,
        u,
        u_inv,
        v,
        v_inv,
        exponents,
        rank,
    }
}

impl SnfResult {
    fn precision(&self) -> u32 {
        self.d.ring().precision()
    }

    /// Column vectors spanning the kernel of the original matrix at working
    /// precision.
    ///
    /// Diagonal slot `i` with exponent `a` contributes `pi^(m-a) * v_col(i)`
    /// when `1 <= a < m` and nothing when `a = 0`; censored slots and columns
    /// beyond the diagonal contribute `v_col(i)` itself. (Censored-slot
    /// columns are genuine kernel vectors *of the stored matrix*; whether
    /// they stay in the kernel at higher precision is unknowable here.)
    pub fn kernel_spanning_set(&self) -> Vec<DvrMatrix> {
        let ring = self.d.ring();
        let m = self.precision();
        let mut out = Vec::new();
        for (i, &e) in self.exponents.iter().enumerate() {
            match e {
                Valuation::Finite(0) => {}
                Valuation::Finite(a) => {
                    let scale = ring.one().shift_up(m - a);
                    out.push(self.v.col(i).scale(&scale));
                }
                Valuation::Censored(_) => out.push(self.v.col(i)),
            }
        }
        for j in self.exponents.len()..self.v.cols() {
            out.push(self.v.col(j));
        }
        out
    }

    /// The columns of `v` spanning the non-torsion part of the kernel:
    /// censored diagonal slots plus everything beyond the diagonal.
    pub fn kernel_free_basis(&self) -> Vec<DvrMatrix> {
        (self.rank..self.v.cols()).map(|j| self.v.col(j)).collect()
    }

    /// Cokernel of the original matrix, read off the diagonal.
    pub fn cokernel(&self) -> CokernelStructure {
        let torsion: Vec<u32> = self
            .exponents
            .iter()
            .filter_map(|e| e.finite())
            .filter(|&a| a >= 1)
            .collect();
        let censored = self.exponents.len() - self.rank;
        CokernelStructure {
            free_rank: self.d.rows() - self.rank,
            torsion,
            censored,
        }
    }
}

/// Valuation of the determinant of a square matrix, computed by untracked
/// elimination: the valuations of the pivots sum to `val(det)`, censoring
/// once the sum reaches the working precision or the remaining submatrix
/// vanishes.
pub fn det_valuation(m: &DvrMatrix) -> Valuation {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let precision = m.ring().precision();
    let n = m.rows();
    let mut work = m.clone();
    let mut acc = Valuation::Finite(0);
    for t in 0..n {
        let mut best: Option<(usize, usize, u32)> = None;
        for i in t..n {
            for j in t..n {
                if let Valuation::Finite(a) = work.valuation(i, j) {
                    if best.map_or(true, |(_, _, b)| a < b) {
                        best = Some((i, j, a));
                    }
                }
            }
        }
        let Some((pi, pj, a)) = best else {
            return Valuation::Censored(precision);
        };
        work.swap_rows(t, pi);
        work.swap_cols(t, pj);
        acc = acc.product(Valuation::Finite(a), precision);
        if acc.is_censored() {
            return acc;
        }
        let pivot = work.get(t, t);
        for i in t + 1..n {
            let x = work.get(i, t);
            if x.is_zero() {
                continue;
            }
            let q = divide_exact(&x, &pivot);
            work.row_addmul(i, t, &-&q);
        }
    }
    acc
}

/// Advance `idx` to the next k-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// For each `r` from 1 to `min(rows, cols)`, the minimum valuation over all
/// `r x r` minors of `val(det(minor))`. Equals the partial sums of the
/// diagonal exponents wherever those are uncensored.
///
/// Cost grows with binomial coefficients; intended for the modest matrix
/// sizes where an independent cross-check of the normal form is wanted.
pub fn determinantal_valuations(m: &DvrMatrix) -> Vec<Valuation> {
    let precision = m.ring().precision();
    let steps = m.rows().min(m.cols());
    let mut out = Vec::with_capacity(steps);
    let mut censored_from_here = false;
    for r in 1..=steps {
        if censored_from_here {
            out.push(Valuation::Censored(precision));
            continue;
        }
        let mut best = Valuation::Censored(precision);
        let mut row_idx: Vec<usize> = (0..r).collect();
        loop {
            let mut col_idx: Vec<usize> = (0..r).collect();
            loop {
                let v = det_valuation(&m.select(&row_idx, &col_idx));
                if v < best {
                    best = v;
                }
                if !next_combination(&mut col_idx, m.cols()) {
                    break;
                }
            }
            if !next_combination(&mut row_idx, m.rows()) {
                break;
            }
        }
        // Larger minors expand in terms of smaller ones, so once the minimum
        // censors it stays censored.
        censored_from_here = best.is_censored();
        out.push(best);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{Signed, Zero};
    use proptest::prelude::*;

    // ---- independent oracle: integer minors + gcd valuations ---------------
    //
    // Over the integers, the r-th determinantal divisor d_r (gcd of all r x r
    // minors) determines the diagonal exponents: a_r = val_p(d_r) -
    // val_p(d_{r-1}). Reducing mod p^m censors every exponent >= m. This
    // oracle shares no code with the elimination above: plain BigInt Laplace
    // expansion and gcds.

    fn int_det(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> BigInt {
        if rows.is_empty() {
            return BigInt::from(1);
        }
        let mut acc = BigInt::zero();
        let rest_rows = &rows[1..];
        for (k, &j) in cols.iter().enumerate() {
            let entry = BigInt::from(m[rows[0]][j]);
            if entry.is_zero() {
                continue;
            }
            let rest_cols: Vec<usize> = cols
                .iter()
                .enumerate()
                .filter(|&(c, _)| c != k)
                .map(|(_, &x)| x)
                .collect();
            let sub = int_det(m, rest_rows, &rest_cols);
            if k % 2 == 0 {
                acc += entry * sub;
            } else {
                acc -= entry * sub;
            }
        }
        acc
    }

    fn val_p(x: &BigInt, p: u64) -> u32 {
        let mut v = 0;
        let p = BigInt::from(p);
        let mut rest = x.abs();
        while (&rest % &p).is_zero() {
            v += 1;
            rest /= &p;
        }
        v
    }

    fn oracle_exponents(entries: &[Vec<i64>], p: u64, m: u32) -> Vec<Valuation> {
        let nr = entries.len();
        let nc = entries.first().map_or(0, Vec::len);
        let steps = nr.min(nc);
        let mut out = Vec::new();
        let mut prev = 0u32;
        'outer: for r in 1..=steps {
            let mut gcd = BigInt::zero();
            let mut rows: Vec<usize> = (0..r).collect();
            loop {
                let mut cols: Vec<usize> = (0..r).collect();
                loop {
                    gcd = gcd.gcd(&int_det(entries, &rows, &cols));
                    if !next_combination(&mut cols, nc) {
                        break;
                    }
                }
                if !next_combination(&mut rows, nr) {
                    break;
                }
            }
            if gcd.is_zero() {
                break 'outer; // true rank < r: censored from here on
            }
            let total = val_p(&gcd, p);
            let exp = total - prev;
            if exp >= m {
                break 'outer; // exponent leaves the precision window
            }
            out.push(Valuation::Finite(exp));
            prev = total;
        }
        out.resize(steps, Valuation::Censored(m));
        out
    }

    fn check_invariants(mat: &DvrMatrix, snf: &SnfResult) {
        let n1 = mat.rows();
        let n0 = mat.cols();
        assert_eq!(&(&snf.u * mat) * &snf.v, snf.d, "d != u*m*v");
        assert_eq!(
            &snf.u * &snf.u_inv,
            DvrMatrix::identity(mat.ring(), n1),
            "u_inv is not a right inverse"
        );
        assert_eq!(
            &snf.u_inv * &snf.u,
            DvrMatrix::identity(mat.ring(), n1),
            "u_inv is not a left inverse"
        );
        assert_eq!(
            &snf.v * &snf.v_inv,
            DvrMatrix::identity(mat.ring(), n0),
            "v_inv is not a right inverse"
        );
        assert_eq!(
            &snf.v_inv * &snf.v,
            DvrMatrix::identity(mat.ring(), n0),
            "v_inv is not a left inverse"
        );
        // d really is diagonal with the reported exponents.
        for i in 0..n1 {
            for j in 0..n0 {
                if i != j {
                    assert!(snf.d.get(i, j).is_zero(), "off-diagonal residue");
                }
            }
        }
        for (i, &e) in snf.exponents.iter().enumerate() {
            assert_eq!(snf.d.valuation(i, i), e, "diagonal slot {i}");
        }
        // Nondecreasing.
        for w in snf.exponents.windows(2) {
            assert!(w[0] <= w[1], "exponents decrease");
        }
        // Transforms are unimodular.
        assert_eq!(det_valuation(&snf.u), Valuation::Finite(0), "u not a unit");
        assert_eq!(det_valuation(&snf.v), Valuation::Finite(0), "v not a unit");
    }

    #[test]
    fn diagonal_matrix_is_read_off() {
        let ring = Ring::padic(3, 4).unwrap();
        let m = DvrMatrix::from_i64_rows(
            &ring,
            &[vec![1, 0, 0], vec![0, 3, 0], vec![0, 0, 0]],
        );
        let snf = smith_normal_form(&m);
        check_invariants(&m, &snf);
        assert_eq!(
            snf.exponents,
            vec![
                Valuation::Finite(0),
                Valuation::Finite(1),
                Valuation::Censored(4)
            ]
        );
        assert_eq!(snf.rank, 2);
        assert_eq!(snf.exponents, oracle_exponents(&[vec![1, 0, 0], vec![0, 3, 0], vec![0, 0, 0]], 3, 4));
    }

    #[test]
    fn triangle_coboundary_exponents() {
        // Circulant-style 3x3 with a single holonomy obstruction of
        // valuation 1 at p = 3.
        let rows = vec![vec![2, 1, 0], vec![0, -1, 1], vec![1, 0, -1]];
        let ring = Ring::padic(3, 4).unwrap();
        let m = DvrMatrix::from_i64_rows(&ring, &rows);
        let snf = smith_normal_form(&m);
        check_invariants(&m, &snf);
        assert_eq!(
            snf.exponents,
            vec![
                Valuation::Finite(0),
                Valuation::Finite(0),
                Valuation::Finite(1)
            ]
        );
        assert_eq!(snf.rank, 3);
        assert_eq!(snf.exponents, oracle_exponents(&rows, 3, 4));
    }

    #[test]
    fn zero_matrix_is_fully_censored() {
        let ring = Ring::padic(2, 5).unwrap();
        let m = DvrMatrix::zeros(&ring, 2, 3);
        let snf = smith_normal_form(&m);
        check_invariants(&m, &snf);
        assert_eq!(
            snf.exponents,
            vec![Valuation::Censored(5), Valuation::Censored(5)]
        );
        assert_eq!(snf.rank, 0);
    }

    #[test]
    fn high_valuation_entries_censor() {
        // 12 = 4*3 has valuation 2 at p = 2; at precision 2 it is
        // indistinguishable from zero.
        let ring = Ring::padic(2, 2).unwrap();
        let m = DvrMatrix::from_i64_rows(&ring, &[vec![12, 2], vec![2, 1]]);
        let snf = smith_normal_form(&m);
        check_invariants(&m, &snf);
        assert_eq!(snf.exponents, oracle_exponents(&[vec![12, 2], vec![2, 1]], 2, 2));
        assert_eq!(snf.rank, snf.exponents.iter().filter(|e| !e.is_censored()).count());
    }

    #[test]
    fn cokernel_of_mixed_diagonal() {
        let ring = Ring::padic(3, 4).unwrap();
        let m = DvrMatrix::from_i64_rows(
            &ring,
            &[vec![1, 0, 0], vec![0, 3, 0], vec![0, 0, 0]],
        );
        let coker = smith_normal_form(&m).cokernel();
        assert_eq!(
            coker,
            CokernelStructure {
                free_rank: 1,
                torsion: vec![1],
                censored: 1,
            }
        );
    }

    #[test]
    fn kernel_spanning_set_of_triangle() {
        let ring = Ring::padic(3, 4).unwrap();
        let m = DvrMatrix::from_i64_rows(&ring, &[vec![2, 1, 0], vec![0, -1, 1], vec![1, 0, -1]]);
        let snf = smith_normal_form(&m);
        let kernel = snf.kernel_spanning_set();
        // exponents (0, 0, 1): only the last slot contributes pi^(m-1) v_2.
        assert_eq!(kernel.len(), 1);
        assert!((&m * &kernel[0]).is_zero());
        assert_eq!(kernel[0].min_valuation(), Valuation::Finite(3));
        assert!(snf.kernel_free_basis().is_empty());
    }

    /// Exhaustively count kernel vectors of a small matrix over Z/4 and
    /// compare against the size predicted by the diagonal, then check the
    /// spanning set generates a subgroup of exactly that size.
    fn exhaustive_kernel_check(entries: &[Vec<i64>]) {
        let ring = Ring::padic(2, 2).unwrap();
        let m = DvrMatrix::from_i64_rows(&ring, entries);
        let n0 = m.cols();
        let modulus = 4u64;

        let as_vector = |digits: &[u64]| {
            let mut v = DvrMatrix::zeros(&ring, n0, 1);
            for (i, &d) in digits.iter().enumerate() {
                v.set_u64(i, 0, d);
            }
            v
        };

        let mut kernel_count = 0u64;
        for code in 0..modulus.pow(n0 as u32) {
            let digits: Vec<u64> = (0..n0)
                .map(|i| (code / modulus.pow(i as u32)) % modulus)
                .collect();
            if (&m * &as_vector(&digits)).is_zero() {
                kernel_count += 1;
            }
        }

        let snf = smith_normal_form(&m);
        let mut expected = 1u64;
        for &e in &snf.exponents {
            expected *= match e {
                Valuation::Finite(a) => 2u64.pow(a),
                Valuation::Censored(_) => 4,
            };
        }
        expected *= 4u64.pow((n0 - snf.exponents.len()) as u32);
        assert_eq!(kernel_count, expected, "kernel size vs diagonal");

        // The spanning set generates the whole kernel: enumerate all
        // coefficient combinations and collect distinct vectors.
        let gens = snf.kernel_spanning_set();
        let mut span = std::collections::HashSet::new();
        let combos = modulus.pow(gens.len() as u32);
        for code in 0..combos {
            let mut acc = DvrMatrix::zeros(&ring, n0, 1);
            for (g, gen) in gens.iter().enumerate() {
                let c = (code / modulus.pow(g as u32)) % modulus;
                acc = &acc + &gen.scale(&ring.from_u64(c));
            }
            assert!((&m * &acc).is_zero(), "spanning vector outside kernel");
            span.insert(format!("{acc}"));
        }
        assert_eq!(span.len() as u64, kernel_count, "span size vs kernel size");
    }

    #[test]
    fn kernel_spanning_set_is_complete_for_small_matrices() {
        exhaustive_kernel_check(&[vec![2, 1, 0], vec![0, 2, 2]]);
        exhaustive_kernel_check(&[vec![1, 1], vec![1, 3], vec![2, 0]]);
        exhaustive_kernel_check(&[vec![2, 2], vec![2, 2]]);
        exhaustive_kernel_check(&[vec![0, 0], vec![0, 0]]);
        exhaustive_kernel_check(&[vec![1, 2, 3], vec![2, 0, 1]]);
    }

    #[test]
    fn determinant_valuation_matches_integer_determinant() {
        let cases: Vec<(Vec<Vec<i64>>, u64, u32)> = vec![
            (vec![vec![2, 1], vec![1, 2]], 3, 4), // det 3
            (vec![vec![2, 1], vec![1, 2]], 2, 4), // det 3, unit at p=2
            (vec![vec![4, 2], vec![2, 4]], 2, 6), // det 12, val 2
            (vec![vec![1, 1], vec![1, 1]], 5, 3), // det 0: censored
            (vec![vec![8, 0], vec![0, 8]], 2, 4), // det 64, val 6 >= m
        ];
        for (entries, p, m) in cases {
            let ring = Ring::padic(p, m).unwrap();
            let mat = DvrMatrix::from_i64_rows(&ring, &entries);
            let d = int_det(&entries, &[0, 1], &[0, 1]);
            let expected = if d.is_zero() || val_p(&d, p) >= m {
                Valuation::Censored(m)
            } else {
                Valuation::Finite(val_p(&d, p))
            };
            assert_eq!(det_valuation(&mat), expected, "case {entries:?} p={p}");
        }
    }

    #[test]
    fn determinantal_valuations_are_snf_partial_sums() {
        let rows = vec![vec![2, 1, 0], vec![0, -1, 1], vec![1, 0, -1]];
        let ring = Ring::padic(3, 4).unwrap();
        let m = DvrMatrix::from_i64_rows(&ring, &rows);
        let s = determinantal_valuations(&m);
        assert_eq!(
            s,
            vec![
                Valuation::Finite(0),
                Valuation::Finite(0),
                Valuation::Finite(1)
            ]
        );
        // Partial sums of exponents (0, 0, 1) are (0, 0, 1).
        let snf = smith_normal_form(&m);
        let mut acc = 0;
        for (r, &e) in snf.exponents.iter().enumerate() {
            acc += e.finite().unwrap();
            assert_eq!(s[r], Valuation::Finite(acc));
        }
    }

    fn arb_entries(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-40i64..40, cols), rows)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_snf_matches_integer_minor_oracle(
            entries in arb_entries(3, 4),
            p in prop_oneof![Just(2u64), Just(3), Just(5)],
            m in 2u32..6,
        ) {
            let ring = Ring::padic(p, m).unwrap();
            let mat = DvrMatrix::from_i64_rows(&ring, &entries);
            let snf = smith_normal_form(&mat);
            check_invariants(&mat, &snf);
            prop_assert_eq!(&snf.exponents, &oracle_exponents(&entries, p, m));
        }

        #[test]
        fn prop_snf_invariants_hold_for_power_series(
            entries in arb_entries(4, 3),
            m in 2u32..6,
        ) {
            let ring = Ring::power_series(2, m).unwrap();
            let mat = DvrMatrix::from_i64_rows(&ring, &entries);
            let snf = smith_normal_form(&mat);
            check_invariants(&mat, &snf);
        }

        #[test]
        fn prop_kernel_vectors_annihilate(
            entries in arb_entries(3, 3),
            m in 2u32..8,
        ) {
            let ring = Ring::padic(2, m).unwrap();
            let mat = DvrMatrix::from_i64_rows(&ring, &entries);
            for k in smith_normal_form(&mat).kernel_spanning_set() {
                prop_assert!((&mat * &k).is_zero());
            }
        }

        #[test]
        fn prop_exponents_clip_under_reduction(
            entries in arb_entries(3, 4),
            p in prop_oneof![Just(2u64), Just(3), Just(5)],
            m in 2u32..6,
        ) {
            // Reducing the matrix mod pi^k clips the diagonal: exponents
            // below k survive, everything else censors at k.
            let ring = Ring::padic(p, m).unwrap();
            let mat = DvrMatrix::from_i64_rows(&ring, &entries);
            let full = smith_normal_form(&mat).exponents;
            for k in 1..=m {
                let reduced = smith_normal_form(&mat.reduce_mod(k).unwrap());
                let clipped: Vec<Valuation> = full
                    .iter()
                    .map(|e| match e.finite() {
                        Some(a) if a < k => Valuation::Finite(a),
                        _ => Valuation::Censored(k),
                    })
                    .collect();
                prop_assert_eq!(&reduced.exponents, &clipped, "k = {}", k);
            }
        }

        #[test]
        fn prop_determinantal_valuations_match_partial_sums(
            entries in arb_entries(3, 3),
            p in prop_oneof![Just(2u64), Just(3)],
            m in 2u32..6,
        ) {
            let ring = Ring::padic(p, m).unwrap();
            let mat = DvrMatrix::from_i64_rows(&ring, &entries);
            let s = determinantal_valuations(&mat);
            let snf = smith_normal_form(&mat);
            let mut acc = Valuation::Finite(0);
            for (r, &e) in snf.exponents.iter().enumerate() {
                acc = acc.product(e, m);
                // Where the partial sum is observable the two agree; where it
                // censors, the minor minimum must censor too.
                prop_assert_eq!(s[r], acc);
            }
        }

        #[test]
        fn prop_divide_exact_reconstructs(
            x_raw in 1u64..4096,
            piv_raw in 1u64..4096,
            m in 3u32..10,
        ) {
            let ring = Ring::padic(2, m).unwrap();
            let x = ring.from_u64(x_raw);
            let pivot = ring.from_u64(piv_raw);
            prop_assume!(!x.is_zero() && !pivot.is_zero());
            prop_assume!(pivot.valuation() <= x.valuation());
            let q = divide_exact(&x, &pivot);
            prop_assert_eq!(&q * &pivot, x);
        }
    }
}
