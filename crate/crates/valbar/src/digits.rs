//! The digit route to the arithmetic barcode.
//!
//! Where the Smith normal form reads torsion exponents off a diagonal, this
//! module recovers them through connecting-map ranks: for each level `k` the
//! kernel of the coboundary mod `pi^k` is lifted one digit higher, pushed
//! through the coboundary, and the leading digit of the result is projected
//! into residue-field cohomology. The dimension `d_k` of that image counts
//! the torsion summands of exponent between 1 and `k`, so the increment
//! sequence recovers the whole exponent multiset — without ever consulting
//! the full-precision diagonal. Keeping the two routes genuinely independent
//! is what makes their agreement a meaningful cross-check.
//!
//! The module also houses the Bockstein rank (how much of the mod-`pi`
//! kernel is obstructed from lifting), per-class lifting diagnostics, barcode
//! assembly from either route, and the congruence stability check.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::fp;
use crate::matrix::DvrMatrix;
use crate::ring::Valuation;
use crate::snf::{smith_normal_form, SnfResult};

/// Connecting-map ranks `d_0..d_{m-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitProfile {
    /// `d[k]` = dimension over the residue field of the level-`k` digit
    /// image. Always starts at `d[0] = 0` and is nondecreasing.
    pub d: Vec<usize>,
    /// True when the profile has provably stopped growing: the last two
    /// entries agree *and* no diagonal slot was censored. A censored slot
    /// could still produce a new bar at higher precision, so it blocks the
    /// flag even when the visible entries have flattened out.
    pub stabilized: bool,
    /// Number of diagonal slots that vanished at working precision,
    /// recovered from residue-rank bookkeeping rather than the diagonal.
    pub censored: usize,
}

/// Multiset of torsion bar lengths plus free and undecidable counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Barcode {
    /// Sorted lengths of the finite bars, each in `1..m`.
    pub finite_bars: Vec<u32>,
    /// Free rank of `H^1`: bars that never die.
    pub infinite_bars: usize,
    /// Bars known only to be of length `>= m`; finite-vs-infinite is
    /// undecidable at working precision.
    pub censored_bars: usize,
}

/// Outcome of a per-class lifting probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftReport {
    /// Does the class extend to every level the ring can see?
    pub liftable: bool,
    /// Largest `k` such that the class extends compatibly mod `pi^k`;
    /// `Censored(m)` when it survives the full working precision.
    pub max_level: Valuation,
}

/// Result of comparing two coboundaries entrywise.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    /// Minimal entrywise valuation of the difference; `Censored(m)` for
    /// matrices that agree at working precision.
    pub congruence_level: Valuation,
    /// Do the finite bars shorter than the congruence level agree as
    /// multisets? Should always hold; a `false` exposes an arithmetic bug.
    pub truncated_equal: bool,
    pub barcode_a: Barcode,
    pub barcode_b: Barcode,
}

/// The dimension `d_k` of the level-`k` digit image.
///
/// Recipe: (1) span the kernel of `delta mod pi^k`; (2) lift each spanning
/// vector to the slice one digit deeper, reusing the same integer
/// representative; (3) apply `delta mod pi^{k+1}` — every entry of the
/// result is divisible by `pi^k`; (4) strip the `pi^k` and reduce mod `pi`;
/// (5) count dimensions in the quotient by the image of `delta mod pi`.
///
/// The kernel in step 1 is computed by elimination over the slice ring
/// itself; the full-precision diagonal is never consulted.
pub fn digit_rank(delta: &DvrMatrix, k: u32) -> Result<usize> {
    let available = delta.ring().precision();
    if k + 1 > available {
        return Err(Error::PrecisionExceeded {
            k,
            needed: k + 1,
            available,
        });
    }
    if k == 0 {
        return Ok(0);
    }
    let delta_k = delta.reduce_mod(k)?;
    let kernel = smith_normal_form(&delta_k).kernel_spanning_set();
    digit_rank_with_kernel(delta, k, &kernel)
}

/// Steps 2–5 of [`digit_rank`] with the step-1 kernel supplied by the
/// caller. The vectors must live over the `k`-digit slice ring and span the
/// kernel of `delta mod pi^k`; tests use this entry point to swap the
/// elimination kernel for an exhaustively enumerated one.
pub fn digit_rank_with_kernel(
    delta: &DvrMatrix,
    k: u32,
    kernel: &[DvrMatrix],
) -> Result<usize> {
    let ring = delta.ring();
    let available = ring.precision();
    if k + 1 > available {
        return Err(Error::PrecisionExceeded {
            k,
            needed: k + 1,
            available,
        });
    }
    if k == 0 {
        return Ok(0);
    }
    let slice_up = ring.slice(k + 1)?;
    let slice_k = ring.slice(k)?;
    let delta_up = delta.reduce_mod(k + 1)?;
    let (n1, n0) = (delta.rows(), delta.cols());
    let p = ring.prime();
    let pk = BigUint::from(p).pow(k);

    let base = fp::residue_rows(delta);
    let base_rank = fp::rank(base.clone(), p);
    let mut augmented = base;

    for v in kernel {
        assert_eq!(
            v.ring(),
            &slice_k,
            "kernel vector from the wrong ring slice"
        );
        assert_eq!((v.rows(), v.cols()), (n0, 1), "kernel vector shape");

        // Same-integer lift: the canonical representative below pi^k is
        // already a representative below pi^{k+1}.
        let mut lift = DvrMatrix::zeros(&slice_up, n0, 1);
        for i in 0..n0 {
            lift.set(i, 0, slice_up.from_biguint(v.raw(i, 0).clone()));
        }
        let w = &delta_up * &lift;
        let mut digit = Vec::with_capacity(n1);
        for i in 0..n1 {
            debug_assert!(
                w.get(i, 0).valuation() >= Valuation::Finite(k),
                "image of a kernel lift must be divisible by pi^k"
            );
            // The canonical representative is < p^{k+1}, so after dropping
            // k digits a single residue digit remains.
            digit.push((w.raw(i, 0) / &pk).to_u64().expect("single digit"));
        }
        for (row, d) in augmented.iter_mut().zip(digit) {
            row.push(d);
        }
    }

    Ok(fp::rank(augmented, p) - base_rank)
}

/// The full profile `d_0..d_{m-1}` plus stabilization bookkeeping.
pub fn digit_profile(delta: &DvrMatrix) -> Result<DigitProfile> {
    let ring = delta.ring();
    let m = ring.precision();
    let p = ring.prime();

    let mut d = vec![0usize];
    for k in 1..m {
        d.push(digit_rank(delta, k)?);
    }

    // Censored-slot count without looking at the diagonal: of the
    // min(n_0, n_1) elimination slots, the residue rank accounts for the
    // exponent-zero ones and d_{m-1} for the visible torsion; whatever is
    // left vanished at working precision.
    let residue_rank = fp::rank(fp::residue_rows(delta), p);
    let steps = delta.rows().min(delta.cols());
    let d_last = *d.last().expect("profile has at least d_0");
    debug_assert!(residue_rank + d_last <= steps);
    let censored = steps - residue_rank - d_last;

    let flat = m == 1 || d[m as usize - 1] == d[m as usize - 2];
    Ok(DigitProfile {
        d,
        stabilized: flat && censored == 0,
        censored,
    })
}

/// Torsion exponents recovered from the profile increments: length `l`
/// appears with multiplicity `d_l - d_{l-1}`. The boolean is the profile's
/// `stabilized` flag; when false the multiset is only a lower bound — a
/// censored slot or still-growing tail could hide longer bars.
pub fn exponents_from_digits(profile: &DigitProfile) -> (Vec<u32>, bool) {
    let mut out = Vec::new();
    for l in 1..profile.d.len() {
        let inc = profile.d[l] - profile.d[l - 1];
        out.extend(std::iter::repeat(l as u32).take(inc));
    }
    (out, profile.stabilized)
}

/// Rank of the Bockstein obstruction: the dimension of the mod-`pi` kernel
/// minus the dimension of the part that comes from reducing full-precision
/// kernel vectors. Counts the torsion summands with exponent in `1..m`.
pub fn bockstein_rank(delta: &DvrMatrix) -> usize {
    let p = delta.ring().prime();
    let n0 = delta.cols();
    let ker_bar = n0 - fp::rank(fp::residue_rows(delta), p);

    let snf = smith_normal_form(delta);
    let reductions: Vec<Vec<u64>> = snf
        .kernel_spanning_set()
        .iter()
        .map(fp::residue_column)
        .collect();
    let rows: Vec<Vec<u64>> = (0..n0)
        .map(|i| reductions.iter().map(|c| c[i]).collect())
        .collect();
    let lifted = fp::rank(rows, p);
    ker_bar - lifted
}

/// How far a mod-`pi` kernel class extends through the precision tower.
///
/// `alpha` is read modulo `pi`: it must be a column of height `n_0` over a
/// ring with the same kind and residue characteristic as `delta`'s. The
/// probe binary-searches the largest `k` such that `alpha` is a residue
/// reduction of some kernel vector mod `pi^k` (extension is monotone in
/// `k`, so bisection is sound).
pub fn lifting_check(alpha: &DvrMatrix, delta: &DvrMatrix) -> Result<LiftReport> {
    let ring = delta.ring();
    let m = ring.precision();
    let p = ring.prime();
    let n0 = delta.cols();

    if alpha.ring().kind() != ring.kind() || alpha.ring().prime() != p {
        return Err(Error::RingMismatch {
            a: alpha.ring().to_string(),
            b: ring.to_string(),
        });
    }
    if alpha.rows() != n0 || alpha.cols() != 1 {
        return Err(Error::ShapeMismatch {
            a_rows: alpha.rows(),
            a_cols: alpha.cols(),
            b_rows: n0,
            b_cols: 1,
        });
    }

    let alpha_res = fp::residue_column(alpha);
    let delta_res = fp::residue_rows(delta);
    let is_cocycle = delta_res.iter().all(|row| {
        row.iter()
            .zip(&alpha_res)
            .fold(0u64, |acc, (&a, &x)| {
                ((acc as u128 + a as u128 * x as u128) % p as u128) as u64
            })
            == 0
    });
    if !is_cocycle {
        return Err(Error::NotACocycle);
    }

    let extends_to = |k: u32| -> Result<bool> {
        let reduced = delta.reduce_mod(k)?;
        let reductions: Vec<Vec<u64>> = smith_normal_form(&reduced)
            .kernel_spanning_set()
            .iter()
            .map(fp::residue_column)
            .collect();
        Ok(fp::in_span(&reductions, &alpha_res, p))
    };

    // extends_to(1) restates the cocycle condition, so the search invariant
    // "lo is extendable" holds from the start.
    debug_assert!(extends_to(1)?);
    let mut lo = 1u32;
    let mut hi = m;
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        if extends_to(mid)? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }

    Ok(LiftReport {
        liftable: lo == m,
        max_level: if lo == m {
            Valuation::Censored(m)
        } else {
            Valuation::Finite(lo)
        },
    })
}

/// Assemble the barcode from a Smith decomposition. `target_dim` is the rank
/// of the cochain group the cokernel lives in (the row count of the
/// coboundary).
pub fn barcode_from_snf(snf: &SnfResult, target_dim: usize) -> Barcode {
    let mut finite: Vec<u32> = snf
        .exponents
        .iter()
        .filter_map(|e| e.finite())
        .filter(|&a| a >= 1)
        .collect();
    finite.sort_unstable();
    Barcode {
        finite_bars: finite,
        infinite_bars: target_dim - snf.rank,
        censored_bars: snf.exponents.len() - snf.rank,
    }
}

/// Assemble the barcode from the digit route alone: finite bars from the
/// profile increments, free rank from residue-rank bookkeeping, censored
/// count carried by the profile.
pub fn barcode_from_digits(delta: &DvrMatrix, profile: &DigitProfile) -> Barcode {
    let p = delta.ring().prime();
    let (finite, _) = exponents_from_digits(profile);
    let residue_rank = fp::rank(fp::residue_rows(delta), p);
    let d_last = *profile.d.last().expect("profile has at least d_0");
    Barcode {
        finite_bars: finite,
        infinite_bars: delta.rows() - residue_rank - d_last,
        censored_bars: profile.censored,
    }
}

/// Entrywise congruence level of two coboundaries and agreement of their
/// barcodes below it: bars shorter than the congruence level must match
/// exactly, whatever happens at or above it.
pub fn stability_check(a: &DvrMatrix, b: &DvrMatrix) -> Result<StabilityReport> {
    if a.ring() != b.ring() {
        return Err(Error::RingMismatch {
            a: a.ring().to_string(),
            b: b.ring().to_string(),
        });
    }
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::ShapeMismatch {
            a_rows: a.rows(),
            a_cols: a.cols(),
            b_rows: b.rows(),
            b_cols: b.cols(),
        });
    }
    let m = a.ring().precision();
    let congruence_level = (a - b).min_valuation();
    let threshold = match congruence_level {
        Valuation::Finite(s) => s,
        Valuation::Censored(_) => m,
    };

    let barcode_a = barcode_from_snf(&smith_normal_form(a), a.rows());
    let barcode_b = barcode_from_snf(&smith_normal_form(b), b.rows());
    let below = |bc: &Barcode| -> Vec<u32> {
        bc.finite_bars
            .iter()
            .copied()
            .filter(|&l| l < threshold)
            .collect()
    };
    let truncated_equal = below(&barcode_a) == below(&barcode_b);

    Ok(StabilityReport {
        congruence_level,
        truncated_equal,
        barcode_a,
        barcode_b,
    })
}
