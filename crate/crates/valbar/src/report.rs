//! Report assembly: runs every applicable barcode route on an input,
//! compares them, and renders the result as text or JSON.
//!
//! The Smith-normal-form route is authoritative; the digit route always
//! runs alongside it, and for rank-1 sheaves whose components carry at
//! most one cycle the holonomy route joins as a third check. The
//! `agreement` flag records whether every computed route produced the same
//! barcode — a `false` here means a bug, and the command-line tool turns
//! it into a dedicated exit status. All collections are emitted in fixed
//! orders, so identical inputs yield byte-identical reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::digits::{
    barcode_from_digits, barcode_from_snf, bockstein_rank, digit_profile, Barcode,
    DigitProfile,
};
use crate::doc::{RingKindSpec, RingSpec};
use crate::error::Result;
use crate::holonomy::{
    bar_from_holonomy, blockwise_barcode, cycle_holonomy_rank1,
    fundamental_cycle_basis, CycleBar,
};
use crate::matrix::DvrMatrix;
use crate::ring::{DvrElement, Ring, RingKind, Valuation};
use crate::sheaf::NetworkSheaf;
use crate::snf::smith_normal_form;

/// Knobs for [`analyze_sheaf`] and [`analyze_matrix`].
#[derive(Debug, Clone, Default)]
pub struct AnalyzeOptions {
    /// Run a randomized gauge-invariance self-check with this seed: the
    /// sheaf is rescaled by random unit gauges and must produce the same
    /// barcode.
    pub seed: Option<u64>,
    /// Test hook: tamper with the digit profile after computing it, so
    /// the routes disagree and the disagreement path can be exercised.
    pub corrupt_digit_route: bool,
}

/// A barcode in report form: sorted finite bar lengths plus the counts of
/// infinite and censored bars.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BarcodeSummary {
    pub finite: Vec<u32>,
    pub infinite: usize,
    pub censored: usize,
}

impl From<&Barcode> for BarcodeSummary {
    fn from(b: &Barcode) -> BarcodeSummary {
        BarcodeSummary {
            finite: b.finite_bars.clone(),
            infinite: b.infinite_bars,
            censored: b.censored_bars,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigitProfileSummary {
    pub d: Vec<usize>,
    pub stabilized: bool,
    pub censored: usize,
}

/// One rank-1 cycle's holonomy bar. Censored bars render as `>=m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleRow {
    pub cycle: usize,
    pub edge: String,
    pub bar: String,
}

/// The barcode each route produced; absent routes were not applicable.
#[derive(Debug, Clone, Serialize)]
pub struct RouteBarcodes {
    pub snf: BarcodeSummary,
    pub digits: BarcodeSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<BarcodeSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfCheck {
    pub seed: u64,
    pub gauge_invariant: bool,
}

/// Everything the analysis pipeline found, ready for rendering.
#[derive(Debug, Clone, Serialize)]
pub struct BarcodeReport {
    pub ring: RingSpec,
    pub barcode: BarcodeSummary,
    pub snf_exponents: Vec<String>,
    pub digit_profile: DigitProfileSummary,
    pub bockstein_rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<Vec<CycleRow>>,
    pub routes: RouteBarcodes,
    pub agreement: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_check: Option<SelfCheck>,
}

fn ring_spec(ring: &Ring) -> RingSpec {
    RingSpec {
        kind: match ring.kind() {
            RingKind::PAdic => RingKindSpec::PAdic,
            RingKind::PowerSeries => RingKindSpec::PowerSeries,
        },
        p: ring.prime(),
        m: ring.precision(),
    }
}

fn corrupt(profile: &mut DigitProfile) {
    profile.censored += 1;
}

/// Runs the SNF and digit routes on a bare coboundary matrix and compares
/// them.
pub fn analyze_matrix(delta: &DvrMatrix, options: &AnalyzeOptions) -> Result<BarcodeReport> {
    let snf = smith_normal_form(delta);
    let snf_barcode = barcode_from_snf(&snf, delta.rows());

    let mut profile = digit_profile(delta)?;
    if options.corrupt_digit_route {
        corrupt(&mut profile);
    }
    let digit_barcode = barcode_from_digits(delta, &profile);

    let agreement = snf_barcode == digit_barcode;
    Ok(BarcodeReport {
        ring: ring_spec(delta.ring()),
        barcode: (&snf_barcode).into(),
        snf_exponents: snf.exponents.iter().map(Valuation::to_string).collect(),
        digit_profile: DigitProfileSummary {
            d: profile.d.clone(),
            stabilized: profile.stabilized,
            censored: profile.censored,
        },
        bockstein_rank: bockstein_rank(delta),
        cycles: None,
        routes: RouteBarcodes {
            snf: (&snf_barcode).into(),
            digits: (&digit_barcode).into(),
            holonomy: None,
        },
        agreement,
        self_check: None,
    })
}

/// Runs every applicable route on a sheaf: SNF and digits always, the
/// blockwise holonomy route when the sheaf is rank-1 with unit weights and
/// each component carries at most one cycle. A rank-1 sheaf also gets a
/// per-cycle bar table whether or not the blockwise route applies.
pub fn analyze_sheaf(sheaf: &NetworkSheaf, options: &AnalyzeOptions) -> Result<BarcodeReport> {
    let delta = sheaf.coboundary();
    let mut report = analyze_matrix(&delta, options)?;

    if sheaf.is_rank_one() {
        let basis = fundamental_cycle_basis(sheaf.graph());
        let mut rows = Vec::with_capacity(basis.fundamental_cycles.len());
        let mut all_bars_defined = true;
        for (i, cycle) in basis.fundamental_cycles.iter().enumerate() {
            match cycle_holonomy_rank1(sheaf, cycle) {
                Ok(h) => {
                    let bar = match bar_from_holonomy(&h) {
                        CycleBar::Empty => "0".to_string(),
                        CycleBar::Finite(a) => a.to_string(),
                        CycleBar::Unbounded => {
                            Valuation::Censored(sheaf.ring().precision()).to_string()
                        }
                    };
                    rows.push(CycleRow {
                        cycle: i,
                        edge: sheaf.graph().edge(cycle.edges[0].0).id.clone(),
                        bar,
                    });
                }
                Err(_) => {
                    all_bars_defined = false;
                    break;
                }
            }
        }
        if all_bars_defined {
            report.cycles = Some(rows);
            if let Ok(b) = blockwise_barcode(sheaf, &basis) {
                let summary: BarcodeSummary = (&b).into();
                report.agreement = report.agreement && summary == report.routes.snf;
                report.routes.holonomy = Some(summary);
            }
        }
    }

    if let Some(seed) = options.seed {
        let invariant = gauge_self_check(sheaf, seed, &report.routes.snf)?;
        report.agreement = report.agreement && invariant;
        report.self_check = Some(SelfCheck {
            seed,
            gauge_invariant: invariant,
        });
    }
    Ok(report)
}

/// Rescales every vertex stalk by a random unimodular gauge drawn from the
/// seed and checks that the barcode does not move.
fn gauge_self_check(sheaf: &NetworkSheaf, seed: u64, expected: &BarcodeSummary) -> Result<bool> {
    let ring = sheaf.ring().clone();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let gauges: Vec<DvrMatrix> = (0..sheaf.graph().vertex_count())
        .map(|v| random_unit_gauge(&ring, sheaf.vertex_ranks()[v], &mut rng))
        .collect();
    let gauged = sheaf.gauge_transform(&gauges)?;
    let snf = smith_normal_form(&gauged.coboundary());
    let barcode = barcode_from_snf(&snf, gauged.c1_rank());
    Ok(&BarcodeSummary::from(&barcode) == expected)
}

fn random_unit(ring: &Ring, rng: &mut ChaCha12Rng) -> DvrElement {
    loop {
        let x = ring.from_i64(rng.random_range(1..=i64::MAX / 2));
        if x.is_unit() {
            return x;
        }
    }
}

/// A random invertible matrix: unit diagonal times shears on both sides.
fn random_unit_gauge(ring: &Ring, rank: usize, rng: &mut ChaCha12Rng) -> DvrMatrix {
    let mut lower = DvrMatrix::identity(ring, rank);
    let mut upper = DvrMatrix::identity(ring, rank);
    for i in 0..rank {
        upper.set(i, i, random_unit(ring, rng));
        for j in 0..i {
            lower.set(i, j, ring.from_i64(rng.random_range(0..1 << 20)));
        }
        for j in (i + 1)..rank {
            upper.set(i, j, ring.from_i64(rng.random_range(0..1 << 20)));
        }
    }
    &lower * &upper
}

/// Renders a report for terminal reading. The layout is fixed; identical
/// reports render to identical text.
pub fn render_text(report: &BarcodeReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let ring = match report.ring.kind {
        RingKindSpec::PAdic => format!("Z/{}^{}", report.ring.p, report.ring.m),
        RingKindSpec::PowerSeries => format!("F_{}[[t]]/t^{}", report.ring.p, report.ring.m),
    };
    let _ = writeln!(out, "ring            {ring}");

    let bars = &report.barcode;
    let finite = bars
        .finite
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(
        out,
        "barcode         finite [{finite}]  infinite {}  censored {}",
        bars.infinite, bars.censored
    );
    let _ = writeln!(out, "snf exponents   {}", report.snf_exponents.join(" "));

    let d = report
        .digit_profile
        .d
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    let status = if report.digit_profile.stabilized {
        "stabilized"
    } else {
        "not stabilized"
    };
    let _ = writeln!(out, "digit profile   {d}  ({status})");
    let _ = writeln!(out, "bockstein rank  {}", report.bockstein_rank);

    if let Some(cycles) = &report.cycles {
        let _ = writeln!(out, "cycle bars");
        for row in cycles {
            let _ = writeln!(out, "  cycle {} (edge {}): {}", row.cycle, row.edge, row.bar);
        }
    }
    if let Some(check) = &report.self_check {
        let verdict = if check.gauge_invariant { "ok" } else { "FAILED" };
        let _ = writeln!(out, "self check      seed {} gauge invariance {verdict}", check.seed);
    }

    let mut routes = vec!["snf", "digits"];
    if report.routes.holonomy.is_some() {
        routes.push("holonomy");
    }
    let verdict = if report.agreement {
        "agreement"
    } else {
        "DISAGREEMENT"
    };
    let _ = writeln!(out, "routes          {}: {verdict}", routes.join(" vs "));
    out
}
