//! Cohomology extraction on top of the Smith normal form: the three integral
//! idempotents (kernel, saturation, free), the saturation quotient as an
//! independent route to the torsion exponents, and the `H^0`/`H^1` summary.
//!
//! With `D = U·M·V` in Smith form and `r` the number of uncensored pivots,
//! the projectors are
//!
//! ```text
//!     P_ker  = V · diag(0,..,0, 1,..,1) · V^-1        (n_0 × n_0)
//!     P_sat  = U^-1 · diag(1,..,1, 0,..,0) · U        (n_1 × n_1)
//!     P_free = I − P_sat
//! ```
//!
//! `P_ker` projects 0-cochains onto the kernel of the coboundary, `P_sat`
//! projects 1-cochains onto the saturation of its image (the largest
//! submodule in which the image has finite index), and `P_free` picks out a
//! complement whose classes inject into the free part of `H^1`.

use crate::matrix::DvrMatrix;
use crate::error::Result;
use crate::snf::{smith_normal_form, SnfResult};

/// The kernel/saturation/free idempotents attached to one coboundary.
#[derive(Debug, Clone)]
pub struct ProjectorTriple {
    /// Projection of 0-cochains onto `ker δ`.
    pub p_ker: DvrMatrix,
    /// Projection of 1-cochains onto the saturation of `im δ`.
    pub p_sat: DvrMatrix,
    /// Complementary projection `I − p_sat`.
    pub p_free: DvrMatrix,
    /// Set when censored diagonal slots make the saturation ambiguous at
    /// working precision: the projectors are still exact for the stored
    /// matrix, but a higher-precision refinement could shrink the kernel.
    pub precision_limited: bool,
}

/// `H^0` and `H^1` read off the Smith diagonal.
#[derive(Debug, Clone)]
pub struct CohomologySummary {
    /// Free rank of the kernel of the coboundary.
    pub h0_rank: usize,
    /// Column vectors spanning the free part of the kernel.
    pub h0_basis: Vec<DvrMatrix>,
    /// Free rank of the cokernel.
    pub h1_free_rank: usize,
    /// Finite torsion exponents `>= 1`, nondecreasing.
    pub h1_torsion: Vec<u32>,
    /// Column vectors whose classes generate the free part of `H^1`.
    pub h1_free_basis: Vec<DvrMatrix>,
    /// Diagonal slots that vanished at working precision; their true
    /// exponents (free vs. very long torsion) are not determined.
    pub censored: usize,
}

/// Build the three idempotents from a Smith decomposition.
pub fn projectors(snf: &SnfResult) -> ProjectorTriple {
    let ring = snf.d.ring();
    let n0 = snf.v.rows();
    let n1 = snf.u.rows();
    let r = snf.rank;

    let mut e0 = DvrMatrix::zeros(ring, n0, n0);
    for i in r..n0 {
        e0.set_u64(i, i, 1);
    }
    let p_ker = &(&snf.v * &e0) * &snf.v_inv;

    let mut e1 = DvrMatrix::zeros(ring, n1, n1);
    for i in 0..r {
        e1.set_u64(i, i, 1);
    }
    let p_sat = &(&snf.u_inv * &e1) * &snf.u;
    let p_free = &DvrMatrix::identity(ring, n1) - &p_sat;

    ProjectorTriple {
        p_ker,
        p_sat,
        p_free,
        precision_limited: snf.exponents.iter().any(|e| e.is_censored()),
    }
}

/// Torsion exponents of `sat(im δ)/im δ`, recomputed by a second elimination
/// run on the first `rank` rows of `U·δ` rather than read off the diagonal.
/// Agrees with [`SnfResult::cokernel`] torsion; kept separate as a
/// cross-check path.
pub fn saturation_quotient(delta: &DvrMatrix, snf: &SnfResult) -> Vec<u32> {
    let ud = &snf.u * delta;
    let rows: Vec<usize> = (0..snf.rank).collect();
    let cols: Vec<usize> = (0..ud.cols()).collect();
    let top = ud.select(&rows, &cols);
    let mut out: Vec<u32> = smith_normal_form(&top)
        .exponents
        .iter()
        .filter_map(|e| e.finite())
        .filter(|&a| a >= 1)
        .collect();
    out.sort_unstable();
    out
}

/// Is the column vector `w` in the saturation of the image? Equivalent to
/// coordinates `rank..n_1` of `U·w` vanishing at working precision.
pub fn in_saturation(w: &DvrMatrix, snf: &SnfResult) -> bool {
    assert_eq!(w.cols(), 1, "saturation membership expects a column vector");
    let uw = &snf.u * w;
    (snf.rank..uw.rows()).all(|i| uw.get(i, 0).is_zero())
}

/// Does reduction mod `pi^k` commute with applying each projector? Checked
/// on the standard spanning set: reduce-then-apply against apply-then-reduce
/// for every basis vector. (Reduction is a ring map, so this must hold; a
/// `false` would expose an arithmetic bug rather than a mathematical
/// possibility.)
pub fn reduction_commutes_check(p: &ProjectorTriple, k: u32) -> Result<bool> {
    for proj in [&p.p_ker, &p.p_sat, &p.p_free] {
        let reduced = proj.reduce_mod(k)?;
        for j in 0..proj.cols() {
            let apply_then_reduce = proj.col(j).reduce_mod(k)?;
            let reduce_then_apply = reduced.col(j);
            if !(&apply_then_reduce - &reduce_then_apply).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Assemble the `H^0`/`H^1` summary from a Smith decomposition.
pub fn cohomology_summary(snf: &SnfResult) -> CohomologySummary {
    let coker = snf.cokernel();
    let h0_basis = snf.kernel_free_basis();
    let n1 = snf.u.rows();
    let h1_free_basis: Vec<DvrMatrix> =
        (snf.rank..n1).map(|j| snf.u_inv.col(j)).collect();
    CohomologySummary {
        h0_rank: h0_basis.len(),
        h0_basis,
        h1_free_rank: coker.free_rank,
        h1_torsion: coker.torsion,
        h1_free_basis,
        censored: coker.censored,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp;
    use crate::matrix::DvrMatrix;
    use crate::ring::{Ring, Valuation};
    use crate::snf::smith_normal_form;
    use proptest::prelude::*;

    /// Solvability of `δx = w`: coordinate `i < rank` of `U·w` needs
    /// valuation at least the pivot exponent; coordinates past the rank must
    /// vanish outright.
    fn in_image(w: &DvrMatrix, snf: &SnfResult) -> bool {
        let uw = &snf.u * w;
        for (i, e) in snf.exponents.iter().enumerate() {
            match e.finite() {
                Some(a) => {
                    if uw.get(i, 0).valuation() < Valuation::Finite(a) {
                        return false;
                    }
                }
                None => {
                    if !uw.get(i, 0).is_zero() {
                        return false;
                    }
                }
            }
        }
        (snf.exponents.len()..uw.rows()).all(|i| uw.get(i, 0).is_zero())
    }

    #[test]
    fn identity_coboundary_has_trivial_kernel_and_full_saturation() {
        let ring = Ring::padic(3, 5).unwrap();
        let delta = DvrMatrix::identity(&ring, 3);
        let snf = smith_normal_form(&delta);
        let proj = projectors(&snf);
        assert!(proj.p_ker.is_zero());
        assert!((&proj.p_sat - &DvrMatrix::identity(&ring, 3)).is_zero());
        assert!(proj.p_free.is_zero());
        assert!(!proj.precision_limited);

        let summary = cohomology_summary(&snf);
        assert_eq!(summary.h0_rank, 0);
        assert_eq!(summary.h1_free_rank, 0);
        assert!(summary.h1_torsion.is_empty());
        assert_eq!(summary.censored, 0);
    }

    #[test]
    fn zero_coboundary_is_all_kernel_all_free() {
        let ring = Ring::padic(2, 4).unwrap();
        let delta = DvrMatrix::zeros(&ring, 2, 2);
        let snf = smith_normal_form(&delta);
        let proj = projectors(&snf);
        assert!((&proj.p_ker - &DvrMatrix::identity(&ring, 2)).is_zero());
        assert!(proj.p_sat.is_zero());
        assert!((&proj.p_free - &DvrMatrix::identity(&ring, 2)).is_zero());
        // The zero matrix is the canonical precision-limited case: every
        // diagonal slot is censored.
        assert!(proj.precision_limited);

        let summary = cohomology_summary(&snf);
        assert_eq!(summary.h0_rank, 2);
        assert_eq!(summary.h1_free_rank, 2);
        assert!(summary.h1_torsion.is_empty());
        assert_eq!(summary.censored, 2);
    }

    #[test]
    fn triangle_is_pure_torsion() {
        let ring = Ring::padic(3, 8).unwrap();
        let delta = DvrMatrix::from_i64_rows(
            &ring,
            &[vec![2, 1, 0], vec![0, -1, 1], vec![1, 0, -1]],
        );
        let snf = smith_normal_form(&delta);
        let proj = projectors(&snf);

        // H^0 = 0 and H^1 is pure torsion, so saturation is everything.
        assert!(proj.p_ker.is_zero());
        assert!(proj.p_free.is_zero());
        assert!((&proj.p_sat - &DvrMatrix::identity(&ring, 3)).is_zero());
        for j in 0..3 {
            assert!(in_saturation(&delta.col(j), &snf));
        }

        assert_eq!(saturation_quotient(&delta, &snf), vec![1]);
        let summary = cohomology_summary(&snf);
        assert_eq!(summary.h0_rank, 0);
        assert_eq!(summary.h1_free_rank, 0);
        assert_eq!(summary.h1_torsion, vec![1]);
        assert_eq!(summary.censored, 0);

        assert!(reduction_commutes_check(&proj, 1).unwrap());
        assert!(reduction_commutes_check(&proj, 8).unwrap());
    }

    #[test]
    fn rectangular_summary_matches_diagonal() {
        let ring = Ring::padic(5, 6).unwrap();
        let delta = DvrMatrix::from_i64_rows(
            &ring,
            &[vec![5, 0], vec![0, 1], vec![0, 0]],
        );
        let snf = smith_normal_form(&delta);
        let summary = cohomology_summary(&snf);
        assert_eq!(summary.h0_rank, 0);
        assert_eq!(summary.h1_free_rank, 1);
        assert_eq!(summary.h1_torsion, vec![1]);
        assert_eq!(summary.censored, 0);
        assert_eq!(summary.h1_free_basis.len(), 1);
        assert_eq!(saturation_quotient(&delta, &snf), vec![1]);

        // The free-basis class is genuinely outside the image.
        assert!(!in_image(&summary.h1_free_basis[0], &snf));
        // ... while every coboundary is inside.
        let x = DvrMatrix::from_i64_rows(&ring, &[vec![7], vec![11]]);
        assert!(in_image(&(&delta * &x), &snf));
    }

    fn small_ring() -> impl Strategy<Value = Ring> {
        (prop_oneof![Just(2u64), Just(3), Just(5)], 3u32..8)
            .prop_map(|(p, m)| Ring::padic(p, m).unwrap())
    }

    fn random_matrix() -> impl Strategy<Value = DvrMatrix> {
        (small_ring(), 1usize..5, 1usize..5).prop_flat_map(|(ring, r, c)| {
            proptest::collection::vec(proptest::num::i64::ANY, r * c).prop_map(
                move |entries| {
                    let rows: Vec<Vec<i64>> = entries
                        .chunks(c)
                        .map(|chunk| chunk.to_vec())
                        .collect();
                    DvrMatrix::from_i64_rows(&ring, &rows)
                },
            )
        })
    }

    proptest! {
        #[test]
        fn projectors_are_idempotent_and_complementary(delta in random_matrix()) {
            let snf = smith_normal_form(&delta);
            let proj = projectors(&snf);
            for p in [&proj.p_ker, &proj.p_sat, &proj.p_free] {
                prop_assert!((&(p * p) - p).is_zero());
            }
            let ring = delta.ring();
            let n1 = delta.rows();
            let sum = &proj.p_sat + &proj.p_free;
            prop_assert!((&sum - &DvrMatrix::identity(ring, n1)).is_zero());
            prop_assert!((&proj.p_sat * &proj.p_free).is_zero());
        }

        #[test]
        fn projectors_interact_correctly_with_the_coboundary(delta in random_matrix()) {
            let snf = smith_normal_form(&delta);
            let proj = projectors(&snf);
            prop_assert!((&(&proj.p_sat * &delta) - &delta).is_zero());
            prop_assert!((&delta * &proj.p_ker).is_zero());
            // The kernel projector has free rank n_0 - r and no torsion.
            let ker_snf = smith_normal_form(&proj.p_ker);
            prop_assert_eq!(ker_snf.rank, delta.cols() - snf.rank);
            let torsion_free = ker_snf
                .exponents
                .iter()
                .all(|e| e.is_censored() || e.finite() == Some(0));
            prop_assert!(torsion_free);
        }

        #[test]
        fn saturation_quotient_matches_cokernel_torsion(delta in random_matrix()) {
            let snf = smith_normal_form(&delta);
            let mut torsion = snf.cokernel().torsion;
            torsion.sort_unstable();
            prop_assert_eq!(saturation_quotient(&delta, &snf), torsion);
        }

        #[test]
        fn reduction_commutes_at_every_slice(delta in random_matrix()) {
            let snf = smith_normal_form(&delta);
            let proj = projectors(&snf);
            for k in 1..=delta.ring().precision() {
                prop_assert!(reduction_commutes_check(&proj, k).unwrap());
            }
        }

        #[test]
        fn free_basis_classes_stay_out_of_the_image(
            delta in random_matrix(),
            coeffs in proptest::collection::vec(proptest::num::i64::ANY, 0..8),
        ) {
            let snf = smith_normal_form(&delta);
            let summary = cohomology_summary(&snf);
            let ring = delta.ring();
            let p = ring.prime();

            // Independence over the residue field.
            let residue_rows: Vec<Vec<u64>> = (0..delta.rows())
                .map(|i| {
                    summary
                        .h1_free_basis
                        .iter()
                        .map(|b| b.get(i, 0).residue())
                        .collect()
                })
                .collect();
            prop_assert_eq!(
                fp::rank(residue_rows, p),
                summary.h1_free_basis.len()
            );

            // No nonzero combination lands in im(δ).
            if !summary.h1_free_basis.is_empty() {
                let mut w = DvrMatrix::zeros(ring, delta.rows(), 1);
                let mut nonzero = false;
                for (b, &c) in summary.h1_free_basis.iter().zip(&coeffs) {
                    let scaled = b.scale(&ring.from_i64(c));
                    w = &w + &scaled;
                    nonzero |= !ring.from_i64(c).is_zero();
                }
                if nonzero {
                    prop_assert!(!in_image(&w, &snf));
                }
            }
        }

        #[test]
        fn kernel_basis_annihilates_and_is_independent(delta in random_matrix()) {
            let snf = smith_normal_form(&delta);
            let summary = cohomology_summary(&snf);
            let p = delta.ring().prime();
            for v in &summary.h0_basis {
                prop_assert!((&delta * v).is_zero());
            }
            let residue_rows: Vec<Vec<u64>> = (0..delta.cols())
                .map(|i| {
                    summary
                        .h0_basis
                        .iter()
                        .map(|b| b.get(i, 0).residue())
                        .collect()
                })
                .collect();
            prop_assert_eq!(fp::rank(residue_rows, p), summary.h0_rank);
        }
    }
}
