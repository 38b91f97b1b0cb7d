//! Network sheaves: a module of coefficients on each vertex and edge of a
//! directed graph, with a restriction map into each edge from both endpoints.
//!
//! The only global operator needed downstream is the coboundary
//! `delta: C^0 -> C^1` sending a vertex cochain `x` to
//! `(delta x)_e = T_e(x_tail) - H_e(x_head)`, where `T_e`/`H_e` are the
//! tail-side and head-side restriction maps. Orientation is a bookkeeping
//! choice: flipping an edge negates its block row, which changes nothing
//! about kernels, images or diagonal exponents.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::DvrMatrix;
use crate::ring::{DvrElement, Ring, Valuation};

#[derive(Debug, Clone)]
pub struct NetworkSheaf {
    graph: Graph,
    ring: Ring,
    vertex_ranks: Vec<usize>,
    edge_ranks: Vec<usize>,
    tail_maps: Vec<DvrMatrix>,
    head_maps: Vec<DvrMatrix>,
}

impl NetworkSheaf {
    /// Assemble a sheaf from explicit restriction maps. The map into edge
    /// `e` from its tail (resp. head) must have shape
    /// `edge_rank(e) x vertex_rank(tail)` (resp. head).
    pub fn new(
        graph: Graph,
        ring: Ring,
        vertex_ranks: Vec<usize>,
        edge_ranks: Vec<usize>,
        tail_maps: Vec<DvrMatrix>,
        head_maps: Vec<DvrMatrix>,
    ) -> Result<NetworkSheaf> {
        if vertex_ranks.len() != graph.vertex_count() {
            return Err(Error::Validation(format!(
                "{} vertex ranks for {} vertices",
                vertex_ranks.len(),
                graph.vertex_count()
            )));
        }
        if edge_ranks.len() != graph.edge_count()
            || tail_maps.len() != graph.edge_count()
            || head_maps.len() != graph.edge_count()
        {
            return Err(Error::Validation(format!(
                "{} edge ranks, {} tail maps, {} head maps for {} edges",
                edge_ranks.len(),
                tail_maps.len(),
                head_maps.len(),
                graph.edge_count()
            )));
        }
        for (ei, e) in graph.edges().iter().enumerate() {
            for (map, v) in [(&tail_maps[ei], e.tail), (&head_maps[ei], e.head)] {
                if map.ring() != &ring {
                    return Err(Error::RingMismatch {
                        a: ring.to_string(),
                        b: map.ring().to_string(),
                    });
                }
                if map.rows() != edge_ranks[ei] || map.cols() != vertex_ranks[v] {
                    return Err(Error::RestrictionShape {
                        vertex: graph.vertex_name(v).to_string(),
                        edge: e.id.clone(),
                        got_rows: map.rows(),
                        got_cols: map.cols(),
                        want_rows: edge_ranks[ei],
                        want_cols: vertex_ranks[v],
                    });
                }
            }
        }
        Ok(NetworkSheaf {
            graph,
            ring,
            vertex_ranks,
            edge_ranks,
            tail_maps,
            head_maps,
        })
    }

    /// Rank-one sheaf with unit scalar restriction weights on every edge
    /// side. Non-unit weights are rejected: they would make the restriction
    /// maps non-injective and the transport interpretation breaks down.
    pub fn rank_one(
        graph: Graph,
        ring: Ring,
        tail_weights: &[DvrElement],
        head_weights: &[DvrElement],
    ) -> Result<NetworkSheaf> {
        let scalar = |w: &DvrElement, e: usize| -> Result<DvrMatrix> {
            if !w.is_unit() {
                return Err(Error::NonUnitWeight {
                    edge: graph.edge(e).id.clone(),
                    valuation: w.valuation().to_string(),
                });
            }
            let mut m = DvrMatrix::zeros(&ring, 1, 1);
            m.set(0, 0, w.clone());
            Ok(m)
        };
        let tail_maps = tail_weights
            .iter()
            .enumerate()
            .map(|(e, w)| scalar(w, e))
            .collect::<Result<Vec<_>>>()?;
        let head_maps = head_weights
            .iter()
            .enumerate()
            .map(|(e, w)| scalar(w, e))
            .collect::<Result<Vec<_>>>()?;
        let vertex_ranks = vec![1; graph.vertex_count()];
        let edge_ranks = vec![1; graph.edge_count()];
        NetworkSheaf::new(graph, ring, vertex_ranks, edge_ranks, tail_maps, head_maps)
    }

    /// The rank-one sheaf with every restriction weight equal to 1.
    pub fn constant(graph: Graph, ring: Ring) -> NetworkSheaf {
        let ones_v = vec![ring.one(); graph.edge_count()];
        NetworkSheaf::rank_one(graph, ring, &ones_v, &ones_v)
            .expect("constant weights are units")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn vertex_ranks(&self) -> &[usize] {
        &self.vertex_ranks
    }

    pub fn edge_ranks(&self) -> &[usize] {
        &self.edge_ranks
    }

    pub fn tail_map(&self, e: usize) -> &DvrMatrix {
        &self.tail_maps[e]
    }

    pub fn head_map(&self, e: usize) -> &DvrMatrix {
        &self.head_maps[e]
    }

    pub fn is_rank_one(&self) -> bool {
        self.vertex_ranks.iter().all(|&r| r == 1) && self.edge_ranks.iter().all(|&r| r == 1)
    }

    /// Total rank of the vertex cochain space `C^0`.
    pub fn c0_rank(&self) -> usize {
        self.vertex_ranks.iter().sum()
    }

    /// Total rank of the edge cochain space `C^1`.
    pub fn c1_rank(&self) -> usize {
        self.edge_ranks.iter().sum()
    }

    /// Column offset of vertex `v`'s block in the coboundary.
    pub fn vertex_offset(&self, v: usize) -> usize {
        self.vertex_ranks[..v].iter().sum()
    }

    /// Row offset of edge `e`'s block in the coboundary.
    pub fn edge_offset(&self, e: usize) -> usize {
        self.edge_ranks[..e].iter().sum()
    }

    /// The coboundary matrix, `c1_rank x c0_rank`, edge blocks as rows in
    /// edge order and vertex blocks as columns in vertex order. A self-loop
    /// accumulates both of its contributions into the same block.
    pub fn coboundary(&self) -> DvrMatrix {
        let mut delta = DvrMatrix::zeros(&self.ring, self.c1_rank(), self.c0_rank());
        for (ei, e) in self.graph.edges().iter().enumerate() {
            let row = self.edge_offset(ei);
            delta.add_block(row, self.vertex_offset(e.tail), &self.tail_maps[ei]);
            delta.add_block(row, self.vertex_offset(e.head), &-&self.head_maps[ei]);
        }
        delta
    }

    /// The same sheaf with every restriction map truncated to precision `k`.
    pub fn reduce_mod(&self, k: u32) -> Result<NetworkSheaf> {
        let tail_maps = self
            .tail_maps
            .iter()
            .map(|m| m.reduce_mod(k))
            .collect::<Result<Vec<_>>>()?;
        let head_maps = self
            .head_maps
            .iter()
            .map(|m| m.reduce_mod(k))
            .collect::<Result<Vec<_>>>()?;
        NetworkSheaf::new(
            self.graph.clone(),
            self.ring.slice(k)?,
            self.vertex_ranks.clone(),
            self.edge_ranks.clone(),
            tail_maps,
            head_maps,
        )
    }

    /// Change basis at every vertex by an invertible gauge `g_v`:
    /// restriction maps become `T_e g_tail` and `H_e g_head`. The coboundary
    /// transforms by a block-diagonal invertible right factor, so diagonal
    /// exponents, kernels and cokernels are unchanged up to that
    /// identification.
    pub fn gauge_transform(&self, gauges: &[DvrMatrix]) -> Result<NetworkSheaf> {
        if gauges.len() != self.graph.vertex_count() {
            return Err(Error::Validation(format!(
                "{} gauges for {} vertices",
                gauges.len(),
                self.graph.vertex_count()
            )));
        }
        for (v, g) in gauges.iter().enumerate() {
            let rank = self.vertex_ranks[v];
            if g.rows() != rank || g.cols() != rank || g.inverse().is_err() {
                return Err(Error::NonUnitGauge {
                    vertex: self.graph.vertex_name(v).to_string(),
                });
            }
        }
        let tail_maps = self
            .graph
            .edges()
            .iter()
            .enumerate()
            .map(|(ei, e)| &self.tail_maps[ei] * &gauges[e.tail])
            .collect();
        let head_maps = self
            .graph
            .edges()
            .iter()
            .enumerate()
            .map(|(ei, e)| &self.head_maps[ei] * &gauges[e.head])
            .collect();
        NetworkSheaf::new(
            self.graph.clone(),
            self.ring.clone(),
            self.vertex_ranks.clone(),
            self.edge_ranks.clone(),
            tail_maps,
            head_maps,
        )
    }

    /// Scalar restriction weight helpers for rank-one sheaves.
    pub fn tail_weight(&self, e: usize) -> DvrElement {
        debug_assert_eq!(self.edge_ranks[e], 1);
        self.tail_maps[e].get(0, 0)
    }

    pub fn head_weight(&self, e: usize) -> DvrElement {
        debug_assert_eq!(self.edge_ranks[e], 1);
        self.head_maps[e].get(0, 0)
    }

    /// Smallest valuation at which this sheaf's coboundary differs from
    /// another's, i.e. the entrywise minimum of `val(delta - delta')`.
    /// Censored when the coboundaries agree at working precision.
    pub fn coboundary_distance(&self, other: &NetworkSheaf) -> Result<Valuation> {
        let a = self.coboundary();
        let b = other.coboundary();
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
        Ok((&a - &b).min_valuation())
    }
}
