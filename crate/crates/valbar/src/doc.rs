//! On-disk document formats.
//!
//! Sheaves, bare matrices and clock networks are described in a small JSON
//! schema. Matrix entries are either integers (interpreted mod `p^m`) or
//! fraction strings like `"3/5"`, which are lifted through the ring and
//! must have nonnegative valuation. Restriction matrices may be omitted,
//! in which case the incidence map defaults to the identity. The parsed
//! document keeps entries exactly as written, so parse → serialize → parse
//! is the identity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::consensus::{ClockNetwork, Ratio};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::matrix::DvrMatrix;
use crate::ring::{DvrElement, Ring};
use crate::sheaf::NetworkSheaf;

/// Ring parameters as they appear in documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    #[serde(default, skip_serializing_if = "is_default_kind")]
    pub kind: RingKindSpec,
    pub p: u64,
    pub m: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RingKindSpec {
    #[default]
    #[serde(rename = "p-adic")]
    PAdic,
    #[serde(rename = "power-series")]
    PowerSeries,
}

fn is_default_kind(kind: &RingKindSpec) -> bool {
    *kind == RingKindSpec::PAdic
}

impl RingSpec {
    pub fn to_ring(self) -> Result<Ring> {
        match self.kind {
            RingKindSpec::PAdic => Ring::padic(self.p, self.m),
            RingKindSpec::PowerSeries => Ring::power_series(self.p, self.m),
        }
    }
}

/// One matrix entry as written in a document: a plain integer or a
/// fraction string such as `"3/5"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Fraction(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub tail: String,
    pub head: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub rank: usize,
}

fn one() -> usize {
    1
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_one(rank: &usize) -> bool {
    *rank == 1
}

/// The restriction matrix attached to one vertex-edge incidence. On a
/// self-loop the entry applies to both incidences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionSpec {
    pub vertex: String,
    pub edge: String,
    pub matrix: Vec<Vec<Entry>>,
}

/// A network sheaf as described on disk, optionally carrying clock-network
/// ratios (one fraction string per edge).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafDocument {
    pub ring: RingSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<VertexSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub restrictions: Vec<RestrictionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock_ratios: Option<BTreeMap<String, String>>,
}

/// A bare matrix with its ring, for the subcommands that operate on one
/// coboundary rather than a whole sheaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub ring: RingSpec,
    pub matrix: Vec<Vec<Entry>>,
}

pub fn parse_sheaf_document(text: &str) -> Result<SheafDocument> {
    let doc: SheafDocument = serde_json::from_str(text)?;
    doc.validate()?;
    Ok(doc)
}

pub fn parse_matrix_document(text: &str) -> Result<MatrixDocument> {
    Ok(serde_json::from_str(text)?)
}

pub fn serialize_document<T: Serialize>(doc: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    Ok(text)
}

/// Splits `"a/b"` (or a bare `"a"`) into numerator and denominator.
fn parse_fraction(text: &str) -> Result<(i64, i64)> {
    let bad = |t: &str| Error::Validation(format!("malformed fraction {t:?}"));
    let mut parts = text.trim().splitn(2, '/');
    let num: i64 = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| bad(text))?;
    let den: i64 = match parts.next() {
        Some(s) => s.trim().parse().map_err(|_| bad(text))?,
        None => 1,
    };
    Ok((num, den))
}

/// Turns one document entry into a ring element. Fractions pass through
/// the two-part lift and must have nonnegative valuation to live in the
/// ring at all.
fn entry_to_element(ring: &Ring, entry: &Entry) -> Result<DvrElement> {
    match entry {
        Entry::Int(x) => Ok(ring.from_i64(*x)),
        Entry::Fraction(text) => {
            let (num, den) = parse_fraction(text)?;
            let (kappa, unit) = ring.lift_rational(num, den)?;
            if kappa < 0 {
                return Err(Error::NegativeValuation { num, den, kappa });
            }
            let mut x = unit;
            let pi = ring.from_i64(ring.prime() as i64);
            for _ in 0..kappa {
                x = x * pi.clone();
            }
            Ok(x)
        }
    }
}

fn entries_to_matrix(
    ring: &Ring,
    rows: &[Vec<Entry>],
    cols_hint: usize,
) -> Result<DvrMatrix> {
    let cols = rows.first().map_or(cols_hint, Vec::len);
    let mut m = DvrMatrix::zeros(ring, rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Validation(format!(
                "matrix row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, entry) in row.iter().enumerate() {
            m.set(i, j, entry_to_element(ring, entry)?);
        }
    }
    Ok(m)
}

impl SheafDocument {
    /// Referential-integrity checks that do not need the ring: unique ids,
    /// edges pointing at declared vertices, restrictions pointing at real
    /// incidences, clock ratios covering the edge set exactly.
    pub fn validate(&self) -> Result<()> {
        let mut vertex_ids = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if vertex_ids.insert(v.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate vertex id {:?}", v.id)));
            }
        }
        let mut edge_ids = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if edge_ids.insert(e.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate edge id {:?}", e.id)));
            }
            for endpoint in [&e.tail, &e.head] {
                if !vertex_ids.contains_key(endpoint) {
                    return Err(Error::Validation(format!(
                        "edge {:?} references unknown vertex {endpoint:?}",
                        e.id
                    )));
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for r in &self.restrictions {
            let Some(&e) = edge_ids.get(&r.edge) else {
                return Err(Error::Validation(format!(
                    "restriction references unknown edge {:?}",
                    r.edge
                )));
            };
            let edge = &self.edges[e];
            if r.vertex != edge.tail && r.vertex != edge.head {
                return Err(Error::Validation(format!(
                    "restriction vertex {:?} is not an endpoint of edge {:?}",
                    r.vertex, r.edge
                )));
            }
            if !seen.insert((r.vertex.clone(), r.edge.clone())) {
                return Err(Error::Validation(format!(
                    "duplicate restriction for vertex {:?} on edge {:?}",
                    r.vertex, r.edge
                )));
            }
        }
        if let Some(ratios) = &self.clock_ratios {
            for id in ratios.keys() {
                if !edge_ids.contains_key(id) {
                    return Err(Error::Validation(format!(
                        "clock ratio references unknown edge {id:?}"
                    )));
                }
            }
            for e in &self.edges {
                if !ratios.contains_key(&e.id) {
                    return Err(Error::Validation(format!(
                        "edge {:?} has no clock ratio",
                        e.id
                    )));
                }
            }
        }
        Ok(())
    }

    fn graph(&self) -> Result<Graph> {
        let names: Vec<String> = self.vertices.iter().map(|v| v.id.clone()).collect();
        let index = |id: &str| {
            self.vertices
                .iter()
                .position(|v| v.id == id)
                .expect("validated endpoint")
        };
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                id: e.id.clone(),
                tail: index(&e.tail),
                head: index(&e.head),
            })
            .collect();
        Graph::new(names, edges)
    }

    /// Builds the network sheaf the document describes. Missing
    /// restrictions default to the identity, which requires the vertex and
    /// edge ranks to agree.
    pub fn to_sheaf(&self) -> Result<NetworkSheaf> {
        self.validate()?;
        let ring = self.ring.to_ring()?;
        let graph = self.graph()?;
        let vertex_ranks: Vec<usize> = self.vertices.iter().map(|v| v.rank).collect();
        let edge_ranks: Vec<usize> = self.edges.iter().map(|e| e.rank).collect();

        let mut tail_maps: Vec<Option<DvrMatrix>> = vec![None; self.edges.len()];
        let mut head_maps: Vec<Option<DvrMatrix>> = vec![None; self.edges.len()];
        for r in &self.restrictions {
            let e = graph.edge_index(&r.edge).expect("validated edge");
            let edge = graph.edge(e);
            let v = graph.vertex_index(&r.vertex).expect("validated vertex");
            let want_rows = edge_ranks[e];
            let want_cols = vertex_ranks[v];
            let m = entries_to_matrix(&ring, &r.matrix, want_cols)?;
            if m.rows() != want_rows || m.cols() != want_cols {
                return Err(Error::RestrictionShape {
                    vertex: r.vertex.clone(),
                    edge: r.edge.clone(),
                    got_rows: m.rows(),
                    got_cols: m.cols(),
                    want_rows,
                    want_cols,
                });
            }
            if v == edge.tail {
                tail_maps[e] = Some(m.clone());
            }
            if v == edge.head {
                head_maps[e] = Some(m);
            }
        }

        let fill = |maps: Vec<Option<DvrMatrix>>, side: &str| -> Result<Vec<DvrMatrix>> {
            maps.into_iter()
                .enumerate()
                .map(|(e, m)| match m {
                    Some(m) => Ok(m),
                    None => {
                        let edge = graph.edge(e);
                        let v = if side == "tail" { edge.tail } else { edge.head };
                        if vertex_ranks[v] != edge_ranks[e] {
                            return Err(Error::Validation(format!(
                                "edge {:?} has no {side} restriction and ranks {} vs {} \
                                 rule out the identity default",
                                edge.id, edge_ranks[e], vertex_ranks[v]
                            )));
                        }
                        Ok(DvrMatrix::identity(&ring, edge_ranks[e]))
                    }
                })
                .collect()
        };
        let tails = fill(tail_maps, "tail")?;
        let heads = fill(head_maps, "head")?;
        NetworkSheaf::new(graph, ring, vertex_ranks, edge_ranks, tails, heads)
    }

    /// Reads the clock-network block into a network: one positive fraction
    /// per edge, in edge order.
    pub fn to_clock_network(&self) -> Result<ClockNetwork> {
        self.validate()?;
        let Some(ratio_map) = &self.clock_ratios else {
            return Err(Error::Validation(
                "document has no clock_ratios block".into(),
            ));
        };
        let graph = self.graph()?;
        let mut ratios = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let text = ratio_map.get(&e.id).expect("validated coverage");
            let (num, den) = parse_fraction(text)?;
            ratios.push(Ratio::new(num, den));
        }
        ClockNetwork::new(graph, ratios)
    }
}

impl MatrixDocument {
    pub fn to_matrix(&self) -> Result<DvrMatrix> {
        let ring = self.ring.to_ring()?;
        entries_to_matrix(&ring, &self.matrix, 0)
    }
}
