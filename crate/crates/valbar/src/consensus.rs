//! Analysis of quantized clock networks.
//!
//! Each edge of a communication graph carries an exact rational ratio of
//! the two endpoint clock rates. Compiling those ratios into a rank-1 sheaf
//! over `Z/2^m` turns synchronization questions into barcode questions: a
//! cycle whose holonomy differs from 1 at valuation `a` is invisible to
//! registers narrower than `a + 1` bits and visible to everything wider.
//! The module also handles vector-valued sensor networks, where each edge
//! transports a `d`-dimensional state by an invertible matrix and the
//! per-cycle defect may differ from direction to direction.

use crate::error::{Error, Result};
use crate::graph::{Graph, Orientation};
use crate::holonomy::{
    bar_from_holonomy, cycle_holonomy_rank1, cycle_torsion_block, fundamental_cycle_basis,
    matrix_holonomy, CycleBar, CycleBasis,
};
use crate::matrix::DvrMatrix;
use crate::ring::{DvrElement, Ring, Valuation};
use crate::sheaf::NetworkSheaf;
use crate::snf::det_valuation;

/// An exact positive rational `num/den`: the measured ratio of the head
/// clock's rate to the tail clock's rate along one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Ratio {
        Ratio { num, den }
    }
}

/// A communication graph together with one exact rate ratio per edge.
#[derive(Debug, Clone)]
pub struct ClockNetwork {
    graph: Graph,
    ratios: Vec<Ratio>,
}

impl ClockNetwork {
    /// Pairs a graph with its edge ratios. Every edge needs exactly one
    /// ratio and every ratio must be a positive rational.
    pub fn new(graph: Graph, ratios: Vec<Ratio>) -> Result<ClockNetwork> {
        if ratios.len() != graph.edge_count() {
            return Err(Error::RatioCount {
                edges: graph.edge_count(),
                ratios: ratios.len(),
            });
        }
        for (e, r) in ratios.iter().enumerate() {
            if r.num <= 0 || r.den <= 0 {
                return Err(Error::Validation(format!(
                    "edge {}: ratio {}/{} is not a positive rational",
                    graph.edge(e).id,
                    r.num,
                    r.den
                )));
            }
        }
        Ok(ClockNetwork { graph, ratios })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn ratios(&self) -> &[Ratio] {
        &self.ratios
    }
}

/// The sheaf compiled from a clock network, along with everything derived
/// on the way: two-adic exponents and unit parts of the ratios, the gauge
/// that clears tree-edge exponents, and the leftover exponent per cycle.
#[derive(Debug, Clone)]
pub struct ClockSheafBuild {
    pub sheaf: NetworkSheaf,
    pub cycles: CycleBasis,
    /// Two-adic exponent of each edge ratio.
    pub kappa: Vec<i64>,
    /// Odd part of each edge ratio, lifted into `Z/2^m`.
    pub units: Vec<DvrElement>,
    /// Per-vertex rescaling exponent: relabeling each clock by `2^{s_v}`
    /// makes every spanning-tree ratio an odd unit.
    pub gauge: Vec<i64>,
    /// Net two-adic exponent around each fundamental cycle. A nonzero
    /// entry means the rates around that cycle multiply to a genuine power
    /// of two, which no relabeling can remove; such cycles are reported as
    /// rate-scale inconsistent instead of contributing a torsion bar.
    pub residual: Vec<i64>,
}

/// Compiles a clock network into a rank-1 sheaf over `Z/2^m`.
///
/// Each ratio splits as `2^kappa * u` with `u` odd. A spanning-tree gauge
/// `s` solving `s_tail - s_head = -kappa` on tree edges absorbs the
/// two-adic parts there, so every stored edge weight is the unit part `u`
/// and the sheaf is well defined over the truncated ring. Around each
/// fundamental cycle the exponents telescope to a residual that the gauge
/// cannot touch; cycles with nonzero residual are flagged in `residual`
/// rather than treated as torsion. The weight sits on the tail restriction
/// (head restriction 1), matching the vector convention where the edge
/// transports the tail state onto the head.
pub fn build_clock_sheaf(network: &ClockNetwork, precision: u32) -> Result<ClockSheafBuild> {
    let ring = Ring::padic(2, precision)?;
    let graph = network.graph().clone();
    let mut kappa = Vec::with_capacity(graph.edge_count());
    let mut units = Vec::with_capacity(graph.edge_count());
    for r in network.ratios() {
        let (k, u) = ring.lift_rational(r.num, r.den)?;
        kappa.push(k);
        units.push(u);
    }

    let cycles = fundamental_cycle_basis(&graph);
    let forest = &cycles.spanning_forest;
    let mut gauge = vec![0i64; graph.vertex_count()];
    for &v in &forest.order {
        let Some(e) = forest.parent_edge[v] else {
            continue;
        };
        let parent = forest.parent[v].expect("non-root vertex has a parent");
        let edge = graph.edge(e);
        gauge[v] = if v == edge.head {
            gauge[parent] + kappa[e]
        } else {
            gauge[parent] - kappa[e]
        };
    }
    for (e, edge) in graph.edges().iter().enumerate() {
        if forest.is_tree_edge[e] {
            debug_assert_eq!(kappa[e] + gauge[edge.tail] - gauge[edge.head], 0);
        }
    }

    let mut residual = Vec::with_capacity(cycles.fundamental_cycles.len());
    for cycle in &cycles.fundamental_cycles {
        let mut net = 0i64;
        for &(e, o) in &cycle.edges {
            net += match o {
                Orientation::Forward => kappa[e],
                Orientation::Reverse => -kappa[e],
            };
        }
        residual.push(net);
    }

    let ones: Vec<DvrElement> = (0..graph.edge_count()).map(|_| ring.one()).collect();
    let sheaf = NetworkSheaf::rank_one(graph, ring, &units, &ones)?;
    Ok(ClockSheafBuild {
        sheaf,
        cycles,
        kappa,
        units,
        gauge,
        residual,
    })
}

/// What one fundamental cycle looks like to a `bits`-bit register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDetection {
    /// Index into the fundamental cycle basis.
    pub cycle: usize,
    /// Identifier of the non-tree edge that defines the cycle.
    pub edge_id: String,
    /// Torsion bar of the cycle holonomy when the cycle is rate-consistent:
    /// `Finite(a)` when the holonomy is `1 mod 2^a` but not `mod 2^{a+1}`,
    /// `Censored` when it equals 1 to working precision. `None` marks a
    /// rate-scale inconsistent cycle, which carries no torsion bar.
    pub bar: Option<Valuation>,
    /// Net power of two around the cycle; zero iff rate-consistent.
    pub residual_exponent: i64,
    /// Whether the register observes the defect. Rate-scale mismatches are
    /// visible at any width; a torsion bar of length `a` needs `a + 1` bits.
    pub detectable: bool,
}

/// Per-cycle detectability of synchronization defects at a fixed register
/// width, with the smallest width that would catch them all.
#[derive(Debug, Clone)]
pub struct DetectionReport {
    pub bits: u32,
    pub precision: u32,
    pub cycles: Vec<CycleDetection>,
    /// One more than the largest uncensored bar among rate-consistent
    /// cycles; 1 when there is none (in particular for trees). Censored
    /// cycles are indistinguishable from exact agreement at this precision
    /// and cannot drive a recommendation.
    pub recommended_bits: u32,
}

/// Reports which cycle defects a `bits`-bit register can see.
///
/// Detection is decided by the literal congruence: the holonomy is reduced
/// mod `2^bits` and compared against 1, so the report stays meaningful as
/// an independent check on the bar lengths.
pub fn detection_report(
    network: &ClockNetwork,
    bits: u32,
    precision: u32,
) -> Result<DetectionReport> {
    if bits == 0 || bits > precision {
        return Err(Error::BadBitWidth { bits, precision });
    }
    let build = build_clock_sheaf(network, precision)?;
    let ring = build.sheaf.ring().clone();
    let one_at_bits = ring.slice(bits)?.one();

    let mut rows = Vec::with_capacity(build.cycles.fundamental_cycles.len());
    let mut recommended = 1u32;
    for (i, cycle) in build.cycles.fundamental_cycles.iter().enumerate() {
        let edge_id = network.graph().edge(cycle.edges[0].0).id.clone();
        if build.residual[i] != 0 {
            rows.push(CycleDetection {
                cycle: i,
                edge_id,
                bar: None,
                residual_exponent: build.residual[i],
                detectable: true,
            });
            continue;
        }
        let h = cycle_holonomy_rank1(&build.sheaf, cycle)?;
        let bar = match bar_from_holonomy(&h) {
            CycleBar::Empty => Valuation::Finite(0),
            CycleBar::Finite(a) => Valuation::Finite(a),
            CycleBar::Unbounded => Valuation::Censored(precision),
        };
        if let Valuation::Finite(a) = bar {
            recommended = recommended.max(a + 1);
        }
        let detectable = h.reduce_mod(bits)? != one_at_bits;
        rows.push(CycleDetection {
            cycle: i,
            edge_id,
            bar: Some(bar),
            residual_exponent: 0,
            detectable,
        });
    }
    Ok(DetectionReport {
        bits,
        precision,
        cycles: rows,
        recommended_bits: recommended,
    })
}

/// Builds the sheaf of a vector-valued sensor network: every stalk is
/// `R^rank`, each edge transports the tail state onto the head by its
/// transform (head restriction is the identity). Transforms must be square
/// of the stated rank, live over `ring`, and be invertible.
pub fn build_vector_sheaf(
    graph: Graph,
    ring: Ring,
    transforms: Vec<DvrMatrix>,
    rank: usize,
) -> Result<NetworkSheaf> {
    if transforms.len() != graph.edge_count() {
        return Err(Error::Validation(format!(
            "{} edge transforms for {} edges",
            transforms.len(),
            graph.edge_count()
        )));
    }
    for (i, t) in transforms.iter().enumerate() {
        if t.rows() != rank || t.cols() != rank {
            return Err(Error::TransformShape {
                index: i,
                rank,
                rows: t.rows(),
                cols: t.cols(),
            });
        }
        if t.ring() != &ring {
            return Err(Error::RingMismatch {
                a: ring.to_string(),
                b: t.ring().to_string(),
            });
        }
        if det_valuation(t) != Valuation::Finite(0) {
            return Err(Error::SingularRestriction {
                edge: graph.edge(i).id.clone(),
            });
        }
    }
    let vertex_ranks = vec![rank; graph.vertex_count()];
    let edge_ranks = vec![rank; graph.edge_count()];
    let head_maps = (0..graph.edge_count())
        .map(|_| DvrMatrix::identity(&ring, rank))
        .collect();
    NetworkSheaf::new(graph, ring, vertex_ranks, edge_ranks, transforms, head_maps)
}

/// Directional structure of one cycle's defect: the elementary divisor
/// exponents of `H(C) - I` and how far they spread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleAnisotropy {
    /// Index into the fundamental cycle basis.
    pub cycle: usize,
    /// Identifier of the non-tree edge that defines the cycle.
    pub edge_id: String,
    pub exponents: Vec<Valuation>,
    /// Largest minus smallest finite exponent; `None` when no direction
    /// carries a finite defect.
    pub spread: Option<u32>,
}

/// Measures, cycle by cycle, how anisotropic the holonomy defect is. A
/// spread of zero means every direction drifts at the same order; a large
/// spread means some state directions lose synchronization much earlier
/// than others.
pub fn anisotropy_report(sheaf: &NetworkSheaf) -> Result<Vec<CycleAnisotropy>> {
    let basis = fundamental_cycle_basis(sheaf.graph());
    let mut out = Vec::with_capacity(basis.fundamental_cycles.len());
    for (i, cycle) in basis.fundamental_cycles.iter().enumerate() {
        let h = matrix_holonomy(sheaf, cycle)?;
        let exponents = cycle_torsion_block(&h);
        let finite: Vec<u32> = exponents.iter().filter_map(|v| v.finite()).collect();
        let spread = match (finite.iter().max(), finite.iter().min()) {
            (Some(hi), Some(lo)) => Some(hi - lo),
            _ => None,
        };
        out.push(CycleAnisotropy {
            cycle: i,
            edge_id: sheaf.graph().edge(cycle.edges[0].0).id.clone(),
            exponents,
            spread,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::{barcode_from_digits, barcode_from_snf, digit_profile, Barcode};
    use crate::holonomy::blockwise_barcode;
    use crate::snf::smith_normal_form;
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::from_pairs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn clock(graph: Graph, ratios: &[(i64, i64)]) -> ClockNetwork {
        let rs = ratios.iter().map(|&(n, d)| Ratio::new(n, d)).collect();
        ClockNetwork::new(graph, rs).unwrap()
    }

    /// Two disjoint triangles with holonomy offsets at valuations 2 and 4.
    fn planted_pair() -> ClockNetwork {
        let graph =
            Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        clock(graph, &[(1, 1), (1, 1), (5, 1), (1, 1), (1, 1), (17, 1)])
    }

    #[test]
    fn ratio_validation_catches_count_and_sign_errors() {
        let short = vec![Ratio::new(1, 1)];
        match ClockNetwork::new(triangle(), short) {
            Err(Error::RatioCount { edges: 3, ratios: 1 }) => {}
            other => panic!("expected ratio count error, got {other:?}"),
        }
        let zero = vec![Ratio::new(0, 1), Ratio::new(1, 1), Ratio::new(1, 1)];
        assert!(matches!(
            ClockNetwork::new(triangle(), zero),
            Err(Error::Validation(_))
        ));
        let negative = vec![Ratio::new(3, -5), Ratio::new(1, 1), Ratio::new(1, 1)];
        assert!(matches!(
            ClockNetwork::new(triangle(), negative),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn tree_network_has_empty_barcode_and_one_bit() {
        let graph = Graph::from_pairs(2, &[(0, 1)]).unwrap();
        let network = clock(graph, &[(3, 5)]);
        let build = build_clock_sheaf(&network, 8).unwrap();
        assert_eq!(build.kappa, vec![0]);
        assert!(build.cycles.fundamental_cycles.is_empty());

        let snf = smith_normal_form(&build.sheaf.coboundary());
        let barcode = barcode_from_snf(&snf, build.sheaf.c1_rank());
        assert_eq!(
            barcode,
            Barcode {
                finite_bars: vec![],
                infinite_bars: 0,
                censored_bars: 0
            }
        );

        let report = detection_report(&network, 4, 8).unwrap();
        assert!(report.cycles.is_empty());
        assert_eq!(report.recommended_bits, 1);
    }

    #[test]
    fn planted_offset_sixteen_needs_five_bits() {
        let network = clock(triangle(), &[(17, 1), (1, 1), (1, 1)]);
        for bits in 1..=8 {
            let report = detection_report(&network, bits, 8).unwrap();
            assert_eq!(report.cycles.len(), 1);
            let row = &report.cycles[0];
            assert_eq!(row.bar, Some(Valuation::Finite(4)));
            assert_eq!(row.residual_exponent, 0);
            assert_eq!(row.detectable, bits >= 5, "width {bits}");
            assert_eq!(report.recommended_bits, 5);
        }
    }

    #[test]
    fn opposite_scalings_cancel_around_cycle() {
        let network = clock(triangle(), &[(2, 1), (1, 2), (1, 1)]);
        let build = build_clock_sheaf(&network, 8).unwrap();
        assert_eq!(build.kappa, vec![1, -1, 0]);
        assert_eq!(build.gauge, vec![0, 1, 0]);
        assert_eq!(build.residual, vec![0]);

        let h = cycle_holonomy_rank1(&build.sheaf, &build.cycles.fundamental_cycles[0]).unwrap();
        assert_eq!(bar_from_holonomy(&h), CycleBar::Unbounded);

        let report = detection_report(&network, 8, 8).unwrap();
        assert_eq!(report.cycles[0].bar, Some(Valuation::Censored(8)));
        assert!(!report.cycles[0].detectable);
        assert_eq!(report.recommended_bits, 1);
    }

    #[test]
    fn net_power_of_two_is_flagged_separately() {
        let network = clock(triangle(), &[(2, 1), (1, 1), (1, 1)]);
        let build = build_clock_sheaf(&network, 8).unwrap();
        // The spanning tree from v0 picks up e0 and e2, leaving e1 as the
        // cycle edge: the gauge clears both tree exponents and the stray
        // power of two telescopes onto the cycle.
        assert_eq!(build.gauge, vec![0, 1, 0]);
        assert_eq!(build.residual, vec![1]);
        // The stored weights are the odd parts, so the sheaf itself is
        // still a unit sheaf and its holonomy ignores the scale mismatch.
        let h = cycle_holonomy_rank1(&build.sheaf, &build.cycles.fundamental_cycles[0]).unwrap();
        assert_eq!(h, build.sheaf.ring().one());

        let report = detection_report(&network, 1, 8).unwrap();
        let row = &report.cycles[0];
        assert_eq!(row.bar, None);
        assert_eq!(row.residual_exponent, 1);
        assert!(row.detectable);
        assert_eq!(report.recommended_bits, 1);
    }

    #[test]
    fn equal_rationals_lift_equally() {
        let graph = Graph::from_pairs(2, &[(0, 1)]).unwrap();
        let a = build_clock_sheaf(&clock(graph.clone(), &[(6, 10)]), 8).unwrap();
        let b = build_clock_sheaf(&clock(graph, &[(3, 5)]), 8).unwrap();
        assert_eq!(a.kappa, b.kappa);
        assert_eq!(a.units, b.units);
    }

    #[test]
    fn planted_bars_two_and_four_detection() {
        let network = planted_pair();
        let report = detection_report(&network, 3, 8).unwrap();
        let bars: Vec<_> = report.cycles.iter().map(|c| c.bar).collect();
        assert_eq!(
            bars,
            vec![Some(Valuation::Finite(2)), Some(Valuation::Finite(4))]
        );
        let seen: Vec<bool> = report.cycles.iter().map(|c| c.detectable).collect();
        assert_eq!(seen, vec![true, false]);

        let wide = detection_report(&network, 5, 8).unwrap();
        let seen: Vec<bool> = wide.cycles.iter().map(|c| c.detectable).collect();
        assert_eq!(seen, vec![true, true]);
        assert_eq!(wide.recommended_bits, 5);

        let narrow = detection_report(&network, 2, 8).unwrap();
        let seen: Vec<bool> = narrow.cycles.iter().map(|c| c.detectable).collect();
        assert_eq!(seen, vec![false, false]);
    }

    #[test]
    fn clock_barcode_agrees_across_routes() {
        let build = build_clock_sheaf(&planted_pair(), 8).unwrap();
        let delta = build.sheaf.coboundary();
        let expected = Barcode {
            finite_bars: vec![2, 4],
            infinite_bars: 0,
            censored_bars: 0,
        };

        let snf = smith_normal_form(&delta);
        assert_eq!(barcode_from_snf(&snf, build.sheaf.c1_rank()), expected);

        let profile = digit_profile(&delta).unwrap();
        assert_eq!(barcode_from_digits(&delta, &profile), expected);

        assert_eq!(
            blockwise_barcode(&build.sheaf, &build.cycles).unwrap(),
            expected
        );
    }

    #[test]
    fn bit_width_bounds_are_enforced() {
        let network = clock(triangle(), &[(1, 1), (1, 1), (1, 1)]);
        assert!(matches!(
            detection_report(&network, 0, 8),
            Err(Error::BadBitWidth { bits: 0, precision: 8 })
        ));
        assert!(matches!(
            detection_report(&network, 9, 8),
            Err(Error::BadBitWidth { bits: 9, precision: 8 })
        ));
        assert!(detection_report(&network, 8, 8).is_ok());
    }

    #[test]
    fn vector_sheaf_rejects_bad_transforms() {
        let ring = Ring::padic(2, 8).unwrap();
        let graph = Graph::from_pairs(2, &[(0, 1)]).unwrap();

        let skew = DvrMatrix::zeros(&ring, 2, 3);
        match build_vector_sheaf(graph.clone(), ring.clone(), vec![skew], 2) {
            Err(Error::TransformShape { index: 0, rank: 2, rows: 2, cols: 3 }) => {}
            other => panic!("expected shape error, got {other:?}"),
        }

        let mut halting = DvrMatrix::identity(&ring, 2);
        halting.set(0, 0, ring.from_i64(2));
        match build_vector_sheaf(graph.clone(), ring.clone(), vec![halting], 2) {
            Err(Error::SingularRestriction { edge }) => assert_eq!(edge, "e0"),
            other => panic!("expected singular transform error, got {other:?}"),
        }

        let other_ring = Ring::padic(3, 8).unwrap();
        let foreign = DvrMatrix::identity(&other_ring, 2);
        assert!(matches!(
            build_vector_sheaf(graph.clone(), ring.clone(), vec![foreign], 2),
            Err(Error::RingMismatch { .. })
        ));

        assert!(matches!(
            build_vector_sheaf(graph, ring, vec![], 2),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn identity_transforms_give_constant_barcode() {
        let ring = Ring::padic(2, 8).unwrap();
        let transforms = (0..3).map(|_| DvrMatrix::identity(&ring, 2)).collect();
        let sheaf = build_vector_sheaf(triangle(), ring, transforms, 2).unwrap();

        let snf = smith_normal_form(&sheaf.coboundary());
        let barcode = barcode_from_snf(&snf, sheaf.c1_rank());
        assert!(barcode.finite_bars.is_empty());
        assert_eq!(barcode.infinite_bars, 2 * sheaf.graph().first_betti());

        let basis = fundamental_cycle_basis(sheaf.graph());
        let h = matrix_holonomy(&sheaf, &basis.fundamental_cycles[0]).unwrap();
        assert_eq!(
            cycle_torsion_block(&h),
            vec![Valuation::Censored(8), Valuation::Censored(8)]
        );
    }

    #[test]
    fn near_identity_exponents_add_the_step_order() {
        // Transports I + 2^k A_i compose to I + 2^k (sum A_i) up to 2^{2k},
        // so for k larger than every exponent of the sum, the cycle block
        // is k plus the exponents of the sum.
        let ring = Ring::padic(2, 12).unwrap();
        let k = 3u32;
        let step = ring.from_i64(1 << k);
        let mut a1 = DvrMatrix::zeros(&ring, 2, 2);
        a1.set(0, 0, ring.one());
        let mut a2 = DvrMatrix::zeros(&ring, 2, 2);
        a2.set(1, 1, ring.from_i64(2));
        let a3 = DvrMatrix::zeros(&ring, 2, 2);

        let transforms: Vec<DvrMatrix> = [a1, a2, a3]
            .into_iter()
            .map(|a| &DvrMatrix::identity(&ring, 2) + &a.scale(&step))
            .collect();
        let sheaf = build_vector_sheaf(triangle(), ring, transforms, 2).unwrap();

        let report = anisotropy_report(&sheaf).unwrap();
        assert_eq!(report.len(), 1);
        assert_eq!(
            report[0].exponents,
            vec![Valuation::Finite(3), Valuation::Finite(4)]
        );
        assert_eq!(report[0].spread, Some(1));
    }

    #[test]
    fn isotropic_defect_has_zero_spread() {
        let ring = Ring::padic(2, 8).unwrap();
        let graph = Graph::from_pairs(2, &[(0, 1), (1, 0)]).unwrap();
        let scaled = DvrMatrix::identity(&ring, 2).scale(&ring.from_i64(5));
        let transforms = vec![DvrMatrix::identity(&ring, 2), scaled];
        let sheaf = build_vector_sheaf(graph, ring, transforms, 2).unwrap();

        let report = anisotropy_report(&sheaf).unwrap();
        assert_eq!(
            report[0].exponents,
            vec![Valuation::Finite(2), Valuation::Finite(2)]
        );
        assert_eq!(report[0].spread, Some(0));
    }

    fn odd(x: i64) -> i64 {
        2 * x + 1
    }

    proptest! {
        /// Detection by literal congruence matches the bar-length
        /// threshold: a bar of length `a` is seen exactly by widths > `a`,
        /// and detectability only improves with width.
        #[test]
        fn detection_is_monotone_and_matches_bar(a in 0i64..200, b in 0i64..200) {
            let m = 10u32;
            let network = clock(triangle(), &[(odd(a), odd(b)), (1, 1), (1, 1)]);
            let full = detection_report(&network, m, m).unwrap();
            let bar = full.cycles[0].bar.unwrap();
            let mut prev = false;
            for bits in 1..=m {
                let report = detection_report(&network, bits, m).unwrap();
                let seen = report.cycles[0].detectable;
                match bar {
                    Valuation::Finite(len) => prop_assert_eq!(seen, bits >= len + 1),
                    Valuation::Censored(_) => prop_assert!(!seen),
                }
                prop_assert!(!prev || seen);
                prev = seen;
                let expected_bits = match bar {
                    Valuation::Finite(len) => len + 1,
                    Valuation::Censored(_) => 1,
                };
                prop_assert_eq!(report.recommended_bits, expected_bits);
            }
        }

        /// The gauge clears tree-edge exponents, the per-cycle residual
        /// equals the two-adic valuation of the exact rational product
        /// around the cycle, and the sheaf holonomy equals that product's
        /// odd part (inverted, since weights transport tail onto head).
        #[test]
        fn gauge_telescopes_and_preserves_unit_parts(
            n in 2usize..7,
            raw_edges in proptest::collection::vec((0usize..7, 0usize..7), 1..10),
            raw_ratios in proptest::collection::vec((1i64..64, 1i64..64), 10),
        ) {
            let pairs: Vec<(usize, usize)> =
                raw_edges.iter().map(|&(t, h)| (t % n, h % n)).collect();
            let graph = Graph::from_pairs(n, &pairs).unwrap();
            let ratios: Vec<(i64, i64)> = raw_ratios[..pairs.len()].to_vec();
            let network = clock(graph, &ratios);
            let m = 9u32;
            let build = build_clock_sheaf(&network, m).unwrap();
            let ring = build.sheaf.ring().clone();

            let forest = &build.cycles.spanning_forest;
            for (e, edge) in network.graph().edges().iter().enumerate() {
                prop_assert_eq!(build.sheaf.tail_weight(e), build.units[e].clone());
                if forest.is_tree_edge[e] {
                    prop_assert_eq!(
                        build.kappa[e] + build.gauge[edge.tail] - build.gauge[edge.head],
                        0
                    );
                }
            }

            for (i, cycle) in build.cycles.fundamental_cycles.iter().enumerate() {
                let mut num: i128 = 1;
                let mut den: i128 = 1;
                for &(e, o) in &cycle.edges {
                    let r = network.ratios()[e];
                    match o {
                        Orientation::Forward => {
                            num *= r.num as i128;
                            den *= r.den as i128;
                        }
                        Orientation::Reverse => {
                            num *= r.den as i128;
                            den *= r.num as i128;
                        }
                    }
                }
                let strip = |mut x: i128| {
                    let mut v = 0i64;
                    while x % 2 == 0 {
                        x /= 2;
                        v += 1;
                    }
                    (v, x)
                };
                let (vn, odd_num) = strip(num);
                let (vd, odd_den) = strip(den);
                prop_assert_eq!(build.residual[i], vn - vd);

                let h = cycle_holonomy_rank1(&build.sheaf, cycle).unwrap();
                let modulus = 1i128 << m;
                let expected = ring.from_i64((odd_den.rem_euclid(modulus)) as i64)
                    * ring.from_i64((odd_num.rem_euclid(modulus)) as i64).invert().unwrap();
                prop_assert_eq!(h, expected);
            }
        }

        /// On a single cycle the full coboundary barcode is already
        /// determined by the holonomy block `H - I`: its positive finite
        /// exponents are the finite bars, and its censored count gives both
        /// the free rank and the censored bars.
        #[test]
        fn cycle_block_matches_full_smith_on_single_cycles(
            len in 2usize..5,
            d in 1usize..4,
            raw in proptest::collection::vec(-50i64..50, 4 * 9 * 9),
        ) {
            let ring = Ring::padic(2, 10).unwrap();
            let pairs: Vec<(usize, usize)> = (0..len).map(|v| (v, (v + 1) % len)).collect();
            let graph = Graph::from_pairs(len, &pairs).unwrap();

            let mut at = 0usize;
            let mut take = || {
                let x = raw[at % raw.len()];
                at += 1;
                x
            };
            let transforms: Vec<DvrMatrix> = (0..len)
                .map(|_| {
                    let mut lower = DvrMatrix::identity(&ring, d);
                    let mut upper = DvrMatrix::identity(&ring, d);
                    for i in 0..d {
                        for j in 0..d {
                            let x = take();
                            if j < i {
                                lower.set(i, j, ring.from_i64(x));
                            } else if j > i {
                                upper.set(i, j, ring.from_i64(x));
                            } else {
                                upper.set(i, i, ring.from_i64(2 * x + 1));
                            }
                        }
                    }
                    &lower * &upper
                })
                .collect();
            let sheaf = build_vector_sheaf(graph, ring, transforms, d).unwrap();

            let basis = fundamental_cycle_basis(sheaf.graph());
            prop_assert_eq!(basis.fundamental_cycles.len(), 1);
            let h = matrix_holonomy(&sheaf, &basis.fundamental_cycles[0]).unwrap();
            let block = cycle_torsion_block(&h);

            let mut finite: Vec<u32> = block
                .iter()
                .filter_map(|v| v.finite())
                .filter(|&a| a >= 1)
                .collect();
            finite.sort_unstable();
            let censored = block.iter().filter(|v| v.is_censored()).count();

            let snf = smith_normal_form(&sheaf.coboundary());
            let barcode = barcode_from_snf(&snf, sheaf.c1_rank());
            prop_assert_eq!(barcode.finite_bars, finite);
            prop_assert_eq!(barcode.infinite_bars, censored);
            prop_assert_eq!(barcode.censored_bars, censored);
        }
    }
}
