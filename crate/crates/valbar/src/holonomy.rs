//! Cycle-holonomy shortcuts to the barcode.
//!
//! Around any cycle of a rank-1 unit sheaf the restriction weights compose
//! to a single unit `h`, and the cycle's entire contribution to `H^1` is
//! read off `val(h − 1)`: nothing when the composite twists at the residue
//! level, one finite bar of that length when it twists part-way up the
//! precision tower, and a free generator when it does not twist at all. For
//! higher-rank sheaves the analogue is an accumulated transform `H(C)` whose
//! `H − I` diagonal plays the same role blockwise.
//!
//! Holonomy orientation around a cycle follows the weight composition
//! (head weight times inverse tail weight per forward edge); the matrix
//! transport `T_e = head_map^{-1} · tail_map` composes the other way, so on
//! the same cycle the scalar and the 1×1 matrix holonomies come out mutually
//! inverse. Both sit at the same distance from 1, so every bar statement is
//! convention-independent — only the frozen element values differ.

use crate::digits::Barcode;
use crate::error::{Error, Result};
use crate::graph::{Cycle, Graph, Orientation, SpanningForest};
use crate::matrix::DvrMatrix;
use crate::ring::{DvrElement, Valuation};
use crate::sheaf::NetworkSheaf;
use crate::snf::smith_normal_form;

/// A deterministic fundamental-cycle basis: BFS spanning forest from the
/// lowest-index vertex of each component, one cycle per non-tree edge in
/// index order.
#[derive(Debug, Clone)]
pub struct CycleBasis {
    pub spanning_forest: SpanningForest,
    pub fundamental_cycles: Vec<Cycle>,
}

/// What one cycle contributes to the barcode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleBar {
    /// `val(h − 1) = 0`: the cycle adds nothing to `H^1`.
    Empty,
    /// A single finite bar of this length.
    Finite(u32),
    /// `h ≡ 1` at working precision: a free generator at this precision,
    /// indistinguishable from torsion of exponent `>= m`, so it counts as
    /// one infinite bar *and* one censored bar.
    Unbounded,
}

pub fn fundamental_cycle_basis(graph: &Graph) -> CycleBasis {
    CycleBasis {
        spanning_forest: graph.spanning_forest(),
        fundamental_cycles: graph.fundamental_cycles(),
    }
}

/// Composite weight around a cycle of a rank-1 unit sheaf: per forward
/// edge the factor is `head_weight · tail_weight^{-1}`, inverted for edges
/// traversed against their orientation.
pub fn cycle_holonomy_rank1(
    sheaf: &NetworkSheaf,
    cycle: &Cycle,
) -> Result<DvrElement> {
    require_rank_one(sheaf)?;
    let ring = sheaf.ring();
    let mut h = ring.one();
    for &(e, orientation) in &cycle.edges {
        let tail = unit_weight(sheaf, e, sheaf.tail_weight(e))?;
        let head = unit_weight(sheaf, e, sheaf.head_weight(e))?;
        let factor = match orientation {
            Orientation::Forward => &head * &tail.invert()?,
            Orientation::Reverse => &tail * &head.invert()?,
        };
        h = &h * &factor;
    }
    Ok(h)
}

/// Classify a cycle's contribution from its holonomy.
pub fn bar_from_holonomy(h: &DvrElement) -> CycleBar {
    assert!(h.is_unit(), "holonomy of a unit sheaf must be a unit");
    let deviation = h - &h.ring().one();
    match deviation.valuation() {
        Valuation::Finite(0) => CycleBar::Empty,
        Valuation::Finite(a) => CycleBar::Finite(a),
        Valuation::Censored(_) => CycleBar::Unbounded,
    }
}

/// Accumulated edge transport around a cycle: `T_e = head_map^{-1} ·
/// tail_map` per forward edge (inverted for reversed traversal), composed in
/// walk order as `T_{e_k} ··· T_{e_1}`.
pub fn matrix_holonomy(sheaf: &NetworkSheaf, cycle: &Cycle) -> Result<DvrMatrix> {
    let ring = sheaf.ring();
    let Some(&(e0, o0)) = cycle.edges.first() else {
        return Ok(DvrMatrix::identity(ring, 0));
    };
    let start = match o0 {
        Orientation::Forward => sheaf.graph().edge(e0).tail,
        Orientation::Reverse => sheaf.graph().edge(e0).head,
    };
    let mut h = DvrMatrix::identity(ring, sheaf.vertex_ranks()[start]);
    for &(e, orientation) in &cycle.edges {
        let t = edge_transport(sheaf, e, orientation)?;
        h = &t * &h;
    }
    Ok(h)
}

fn edge_transport(
    sheaf: &NetworkSheaf,
    e: usize,
    orientation: Orientation,
) -> Result<DvrMatrix> {
    let tail = sheaf.tail_map(e);
    let head = sheaf.head_map(e);
    if tail.rows() != tail.cols() || head.rows() != head.cols() {
        return Err(Error::Validation(format!(
            "edge {} transport needs square restrictions, got {}x{} and {}x{}",
            sheaf.graph().edge(e).id,
            tail.rows(),
            tail.cols(),
            head.rows(),
            head.cols(),
        )));
    }
    let invert = |m: &DvrMatrix| -> Result<DvrMatrix> {
        m.inverse().map_err(|_| Error::SingularRestriction {
            edge: sheaf.graph().edge(e).id.clone(),
        })
    };
    // Both restrictions must be invertible for the transport to be
    // meaningful in either direction, so both are checked every time.
    let tail_inv = invert(tail)?;
    let head_inv = invert(head)?;
    Ok(match orientation {
        Orientation::Forward => &head_inv * tail,
        Orientation::Reverse => &tail_inv * head,
    })
}

/// Bar lengths contributed by one cycle of a rank-`d` sheaf: the Smith
/// exponents of `H − I`, censored slots included.
pub fn cycle_torsion_block(h: &DvrMatrix) -> Vec<Valuation> {
    assert_eq!(h.rows(), h.cols(), "holonomy matrix must be square");
    let deviation = h - &DvrMatrix::identity(h.ring(), h.rows());
    smith_normal_form(&deviation).exponents
}

/// Assemble the barcode cycle-by-cycle when the cycles provably do not
/// couple: every connected component may carry at most one fundamental
/// cycle. Sharing a component — even without sharing edges or vertices —
/// lets relations replay through the connecting gauge and collapse bars, so
/// anything beyond one cycle per component returns `NotBlockDecomposable`
/// and the caller falls back to the full Smith route.
pub fn blockwise_barcode(
    sheaf: &NetworkSheaf,
    basis: &CycleBasis,
) -> Result<Barcode> {
    require_rank_one(sheaf)?;
    let graph = sheaf.graph();
    let labels = graph.component_labels();
    let mut cycles_per_component = vec![0usize; graph.component_count()];
    for cycle in &basis.fundamental_cycles {
        let (e, _) = cycle.edges[0];
        cycles_per_component[labels[graph.edge(e).tail]] += 1;
    }
    if let Some(component) = cycles_per_component.iter().position(|&c| c > 1) {
        return Err(Error::NotBlockDecomposable {
            detail: format!(
                "component {component} carries {} fundamental cycles",
                cycles_per_component[component]
            ),
        });
    }

    let mut barcode = Barcode {
        finite_bars: Vec::new(),
        infinite_bars: 0,
        censored_bars: 0,
    };
    for cycle in &basis.fundamental_cycles {
        let h = cycle_holonomy_rank1(sheaf, cycle)?;
        match bar_from_holonomy(&h) {
            CycleBar::Empty => {}
            CycleBar::Finite(a) => barcode.finite_bars.push(a),
            CycleBar::Unbounded => {
                barcode.infinite_bars += 1;
                barcode.censored_bars += 1;
            }
        }
    }
    barcode.finite_bars.sort_unstable();
    Ok(barcode)
}

fn require_rank_one(sheaf: &NetworkSheaf) -> Result<()> {
    if !sheaf.is_rank_one() {
        let offender = sheaf
            .vertex_ranks()
            .iter()
            .chain(sheaf.edge_ranks())
            .copied()
            .find(|&r| r != 1)
            .unwrap_or(1);
        return Err(Error::NotRankOne { rank: offender });
    }
    Ok(())
}

fn unit_weight(
    sheaf: &NetworkSheaf,
    e: usize,
    w: DvrElement,
) -> Result<DvrElement> {
    if !w.is_unit() {
        return Err(Error::NonUnitWeight {
            edge: sheaf.graph().edge(e).id.clone(),
            valuation: w.valuation().to_string(),
        });
    }
    Ok(w)
}
