//! Directed multigraphs: vertices, named directed edges, connected
//! components, spanning forests and fundamental cycle bases.
//!
//! Edge direction fixes which restriction map is "tail-side" and which is
//! "head-side"; the underlying topology (components, cycles) ignores it.

use crate::error::{Error, Result};

/// Traversal direction along a directed edge: `Forward` runs tail to head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Forward,
    Reverse,
}

impl Orientation {
    pub fn reversed(self) -> Orientation {
        match self {
            Orientation::Forward => Orientation::Reverse,
            Orientation::Reverse => Orientation::Forward,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone)]
pub struct Graph {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(vertex_names: Vec<String>, edges: Vec<Edge>) -> Result<Graph> {
        let n = vertex_names.len();
        for e in &edges {
            if e.tail >= n || e.head >= n {
                return Err(Error::Validation(format!(
                    "edge {} references a missing vertex (tail {}, head {}, {} vertices)",
                    e.id, e.tail, e.head, n
                )));
            }
        }
        Ok(Graph {
            vertex_names,
            edges,
        })
    }

    /// Convenience constructor with synthesized names: vertices `v0..`,
    /// edges `e0..` from `(tail, head)` pairs.
    pub fn from_pairs(vertex_count: usize, pairs: &[(usize, usize)]) -> Result<Graph> {
        let vertex_names = (0..vertex_count).map(|i| format!("v{i}")).collect();
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(i, &(tail, head))| Edge {
                id: format!("e{i}"),
                tail,
                head,
            })
            .collect();
        Graph::new(vertex_names, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Connected-component label per vertex. Labels are consecutive from 0,
    /// assigned in order of each component's lowest vertex index.
    pub fn component_labels(&self) -> Vec<usize> {
        let forest = self.spanning_forest();
        let mut labels = vec![usize::MAX; self.vertex_count()];
        for (c, &root) in forest.roots.iter().enumerate() {
            // Roots come out in ascending index order from the BFS sweep.
            let mut stack = vec![root];
            labels[root] = c;
            while let Some(v) = stack.pop() {
                for &w in &forest.children[v] {
                    labels[w] = c;
                    stack.push(w);
                }
            }
        }
        labels
    }

    pub fn component_count(&self) -> usize {
        self.spanning_forest().roots.len()
    }

    /// First Betti number `|E| - |V| + #components` of the underlying
    /// undirected graph: the number of independent cycles.
    pub fn first_betti(&self) -> usize {
        self.edge_count() + self.component_count() - self.vertex_count()
    }

    /// Breadth-first spanning forest. Deterministic: components are rooted at
    /// their lowest-index vertex in increasing order, the queue is FIFO, and
    /// each vertex scans its incident edges in edge-index order.
    pub fn spanning_forest(&self) -> SpanningForest {
        let n = self.vertex_count();
        // Incident edge lists in index order (self-loops listed once).
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            incident[e.tail].push(i);
            if e.head != e.tail {
                incident[e.head].push(i);
            }
        }
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut is_tree_edge = vec![false; self.edge_count()];
        let mut visited = vec![false; n];
        let mut roots = Vec::new();
        let mut order = Vec::new();

        for start in 0..n {
            if visited[start] {
                continue;
            }
            roots.push(start);
            visited[start] = true;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &ei in &incident[v] {
                    let e = &self.edges[ei];
                    let w = if e.tail == v { e.head } else { e.tail };
                    if visited[w] {
                        continue;
                    }
                    visited[w] = true;
                    parent[w] = Some(v);
                    parent_edge[w] = Some(ei);
                    children[v].push(w);
                    is_tree_edge[ei] = true;
                    queue.push_back(w);
                }
            }
        }

        SpanningForest {
            parent,
            parent_edge,
            children,
            is_tree_edge,
            roots,
            order,
        }
    }

    /// Fundamental cycle basis with respect to the BFS spanning forest: one
    /// cycle per non-tree edge (taken in edge-index order), consisting of
    /// that edge traversed forward followed by the tree path from its head
    /// back to its tail.
    pub fn fundamental_cycles(&self) -> Vec<Cycle> {
        let forest = self.spanning_forest();
        let mut cycles = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            if forest.is_tree_edge[ei] {
                continue;
            }
            let mut steps = vec![(ei, Orientation::Forward)];
            steps.extend(forest.tree_path(self, e.head, e.tail));
            cycles.push(Cycle { edges: steps });
        }
        cycles
    }
}

/// A closed walk, as edge indices with traversal orientations, in walk order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub edges: Vec<(usize, Orientation)>,
}

#[derive(Debug, Clone)]
pub struct SpanningForest {
    /// BFS parent per vertex (`None` at roots).
    pub parent: Vec<Option<usize>>,
    /// The tree edge connecting each vertex to its parent.
    pub parent_edge: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub is_tree_edge: Vec<bool>,
    /// One root per component, in ascending vertex order.
    pub roots: Vec<usize>,
    /// BFS visit order over all components.
    pub order: Vec<usize>,
}

impl SpanningForest {
    fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[v] {
            v = p;
            d += 1;
        }
        d
    }

    /// One step toward the root: the parent vertex plus the traversal
    /// orientation of the connecting edge when walking child -> parent.
    fn step_up(&self, graph: &Graph, v: usize) -> (usize, usize, Orientation) {
        let p = self.parent[v].expect("step_up at a root");
        let ei = self.parent_edge[v].expect("parent edge exists");
        let e = graph.edge(ei);
        let orient = if e.tail == v {
            Orientation::Forward
        } else {
            Orientation::Reverse
        };
        (p, ei, orient)
    }

    /// The unique tree path from `from` to `to` (same component), as oriented
    /// edge traversals.
    pub fn tree_path(&self, graph: &Graph, from: usize, to: usize) -> Vec<(usize, Orientation)> {
        // Climb both endpoints to their common ancestor.
        let mut up_from = Vec::new(); // walked in order: from -> lca
        let mut up_to = Vec::new(); // walked in order: to -> lca
        let (mut a, mut b) = (from, to);
        let (mut da, mut db) = (self.depth(a), self.depth(b));
        while da > db {
            let (p, ei, o) = self.step_up(graph, a);
            up_from.push((ei, o));
            a = p;
            da -= 1;
        }
        while db > da {
            let (p, ei, o) = self.step_up(graph, b);
            up_to.push((ei, o));
            b = p;
            db -= 1;
        }
        while a != b {
            let (pa, ea, oa) = self.step_up(graph, a);
            up_from.push((ea, oa));
            a = pa;
            let (pb, eb, ob) = self.step_up(graph, b);
            up_to.push((eb, ob));
            b = pb;
        }
        // from -> lca, then lca -> to (the second leg reversed).
        up_from
            .into_iter()
            .chain(
                up_to
                    .into_iter()
                    .rev()
                    .map(|(ei, o)| (ei, o.reversed())),
            )
            .collect()
    }
}
