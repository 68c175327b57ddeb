//! Dual graphs of stable pointed curves and their subcurve combinatorics.
//!
//! A [`DualGraph`] has one vertex per irreducible component (weighted by its
//! geometric genus), one edge per node and the markings attached to the
//! vertices carrying them. Loops and parallel edges are allowed. A loop adds
//! two to the valence of its vertex and never crosses between a subcurve and
//! its complement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type EdgeId = u32;
pub type Marking = u32;

/// Subcurves are stored as bitmasks over vertex positions.
pub const MAX_VERTICES: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub h: u32,
    pub markings: BTreeSet<Marking>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub ends: [VertexId; 2],
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    genus: i64,
    n: u32,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct DualGraph {
    genus: i64,
    n: u32,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    /// Endpoints of each edge as vertex positions.
    ends: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for DualGraph {
    type Error = Error;

    fn try_from(repr: GraphRepr) -> Result<Self> {
        DualGraph::from_parts(repr.genus, repr.n, repr.vertices, repr.edges)
    }
}

impl From<DualGraph> for GraphRepr {
    fn from(graph: DualGraph) -> Self {
        GraphRepr {
            genus: graph.genus,
            n: graph.n,
            vertices: graph.vertices,
            edges: graph.edges,
        }
    }
}

/// A violated [`DualGraph`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    Disconnected,
    MarkingPartition(String),
    GenusMismatch { declared: i64, computed: i64 },
    VertexInstability { vertex: VertexId, value: i64 },
    GenusTooSmall(i64),
    NoMarkings,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Disconnected => write!(f, "graph is disconnected"),
            Diagnostic::MarkingPartition(detail) => {
                write!(f, "marking partition violated: {detail}")
            }
            Diagnostic::GenusMismatch { declared, computed } => write!(
                f,
                "genus mismatch: declared {declared}, sum(h) + #E - #V + 1 = {computed}"
            ),
            Diagnostic::VertexInstability { vertex, value } => write!(
                f,
                "vertex instability at vertex {vertex}: 2h - 2 + val + #markings = {value}"
            ),
            Diagnostic::GenusTooSmall(g) => write!(f, "genus must be at least 1, got {g}"),
            Diagnostic::NoMarkings => write!(f, "number of markings must be at least 1"),
        }
    }
}

impl DualGraph {
    /// Builds a graph with a declared genus, rejecting only structural
    /// problems (duplicate ids, dangling edge ends, too many vertices).
    /// Semantic invariants are reported by [`DualGraph::validate`].
    pub fn from_parts(genus: i64, n: u32, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::MalformedGraph("graph has no vertices".into()));
        }
        if vertices.len() > MAX_VERTICES {
            return Err(Error::MalformedGraph(format!(
                "at most {MAX_VERTICES} vertices supported, got {}",
                vertices.len()
            )));
        }
        let mut index = BTreeMap::new();
        for (pos, v) in vertices.iter().enumerate() {
            if index.insert(v.id, pos).is_some() {
                return Err(Error::MalformedGraph(format!(
                    "duplicate vertex id {}",
                    v.id
                )));
            }
        }
        let mut seen_edges = BTreeSet::new();
        let mut ends = Vec::with_capacity(edges.len());
        for e in &edges {
            if !seen_edges.insert(e.id) {
                return Err(Error::MalformedGraph(format!("duplicate edge id {}", e.id)));
            }
            let lookup = |v: VertexId| {
                index.get(&v).copied().ok_or_else(|| {
                    Error::MalformedGraph(format!("edge {} ends at unknown vertex {v}", e.id))
                })
            };
            ends.push([lookup(e.ends[0])?, lookup(e.ends[1])?]);
        }
        Ok(DualGraph {
            genus,
            n,
            vertices,
            edges,
            ends,
        })
    }

    /// Builds a graph whose vertex and edge ids are their positions and whose
    /// genus is computed from the genus formula.
    pub fn new(n: u32, vertices: &[(u32, &[Marking])], edges: &[(usize, usize)]) -> Result<Self> {
        let verts: Vec<Vertex> = vertices
            .iter()
            .enumerate()
            .map(|(i, (h, m))| Vertex {
                id: i as VertexId,
                h: *h,
                markings: m.iter().copied().collect(),
            })
            .collect();
        let edge_list: Vec<Edge> = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Edge {
                id: i as EdgeId,
                ends: [a as VertexId, b as VertexId],
            })
            .collect();
        let mut graph = DualGraph::from_parts(0, n, verts, edge_list)?;
        graph.genus = graph.computed_genus();
        Ok(graph)
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Endpoint positions of the edge at position `edge`.
    pub fn ends(&self, edge: usize) -> [usize; 2] {
        self.ends[edge]
    }

    pub fn vertex_ids(&self) -> Vec<VertexId> {
        self.vertices.iter().map(|v| v.id).collect()
    }

    pub fn vertex_position(&self, id: VertexId) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_position(&self, id: EdgeId) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn is_loop(&self, edge: usize) -> bool {
        let [a, b] = self.ends[edge];
        a == b
    }

    /// Valence of the vertex at position `v`; loops count twice.
    pub fn valence(&self, v: usize) -> i64 {
        self.ends
            .iter()
            .map(|&[a, b]| (a == v) as i64 + (b == v) as i64)
            .sum()
    }

    /// `2h - 2 + val`, the degree of the dualizing sheaf on the component.
    pub fn canonical_degree(&self, v: usize) -> i64 {
        2 * self.vertices[v].h as i64 - 2 + self.valence(v)
    }

    /// `sum(h) + #E - #V + 1`.
    pub fn computed_genus(&self) -> i64 {
        let h: i64 = self.vertices.iter().map(|v| v.h as i64).sum();
        h + self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.vertices.len()) - 1
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.vertices.len();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = nv;
        for &[a, b] in &self.ends {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        components == 1
    }

    /// Every violated invariant, in a fixed order. Empty iff the graph is a
    /// valid dual graph of a stable pointed curve with `g, n >= 1`.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if !self.is_connected() {
            out.push(Diagnostic::Disconnected);
        }

        let mut owner: BTreeMap<Marking, VertexId> = BTreeMap::new();
        for v in &self.vertices {
            for &m in &v.markings {
                if m == 0 || m > self.n {
                    out.push(Diagnostic::MarkingPartition(format!(
                        "marking {m} on vertex {} is outside 1..={}",
                        v.id, self.n
                    )));
                } else if let Some(prev) = owner.insert(m, v.id) {
                    out.push(Diagnostic::MarkingPartition(format!(
                        "marking {m} assigned to vertices {prev} and {}",
                        v.id
                    )));
                }
            }
        }
        let missing: Vec<String> = (1..=self.n)
            .filter(|m| !owner.contains_key(m))
            .map(|m| m.to_string())
            .collect();
        if !missing.is_empty() {
            out.push(Diagnostic::MarkingPartition(format!(
                "markings {} not assigned",
                missing.join(",")
            )));
        }

        let computed = self.computed_genus();
        if computed != self.genus {
            out.push(Diagnostic::GenusMismatch {
                declared: self.genus,
                computed,
            });
        }

        for (pos, v) in self.vertices.iter().enumerate() {
            let value = self.canonical_degree(pos) + v.markings.len() as i64;
            if value <= 0 {
                out.push(Diagnostic::VertexInstability {
                    vertex: v.id,
                    value,
                });
            }
        }

        if self.genus < 1 {
            out.push(Diagnostic::GenusTooSmall(self.genus));
        }
        if self.n < 1 {
            out.push(Diagnostic::NoMarkings);
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(
                diags.iter().map(|d| d.to_string()).collect(),
            ))
        }
    }

    /// All nonempty proper subcurves, ordered by bitmask.
    pub fn subcurves(&self) -> impl Iterator<Item = Subcurve> + '_ {
        let full = self.full_mask();
        (1..full).map(|mask| Subcurve { mask })
    }

    pub fn crossing_count(&self, c0: &Subcurve) -> Result<usize> {
        c0.check(self)?;
        Ok(self.crossing_count_mask(c0.mask))
    }

    pub(crate) fn crossing_count_mask(&self, mask: u64) -> usize {
        self.ends
            .iter()
            .filter(|&&[a, b]| crosses(mask, a, b))
            .count()
    }

    /// Number of spanning trees of the underlying loopless multigraph,
    /// by the matrix-tree theorem with a fraction-free determinant.
    pub fn spanning_tree_count(&self) -> Result<u64> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let nv = self.vertices.len();
        if nv == 1 {
            return Ok(1);
        }
        let mut lap = vec![vec![0i128; nv]; nv];
        for &[a, b] in &self.ends {
            if a != b {
                lap[a][a] += 1;
                lap[b][b] += 1;
                lap[a][b] -= 1;
                lap[b][a] -= 1;
            }
        }
        let minor: Vec<Vec<i128>> = lap[1..].iter().map(|row| row[1..].to_vec()).collect();
        let det = bareiss_determinant(minor);
        u64::try_from(det)
            .map_err(|_| Error::Precondition(format!("tree count {det} out of range")))
    }
}

pub(crate) fn crosses(mask: u64, a: usize, b: usize) -> bool {
    ((mask >> a) & 1) != ((mask >> b) & 1)
}

/// Exact determinant of an integer matrix by Bareiss elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// A nonempty proper set of vertices, i.e. a union of irreducible components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subcurve {
    mask: u64,
}

impl Subcurve {
    pub fn from_positions(positions: &[usize]) -> Self {
        Subcurve {
            mask: positions.iter().fold(0, |m, &p| m | (1u64 << p)),
        }
    }

    pub fn from_ids(graph: &DualGraph, ids: &[VertexId]) -> Result<Self> {
        let positions = ids
            .iter()
            .map(|&id| graph.vertex_position(id).ok_or(Error::InvalidSubcurve))
            .collect::<Result<Vec<_>>>()?;
        let c0 = Subcurve::from_positions(&positions);
        c0.check(graph)?;
        Ok(c0)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, position: usize) -> bool {
        (self.mask >> position) & 1 == 1
    }

    pub fn complement(&self, graph: &DualGraph) -> Subcurve {
        Subcurve {
            mask: graph.full_mask() & !self.mask,
        }
    }

    pub fn vertex_ids(&self, graph: &DualGraph) -> Vec<VertexId> {
        graph
            .vertices()
            .iter()
            .enumerate()
            .filter(|(p, _)| self.contains(*p))
            .map(|(_, v)| v.id)
            .collect()
    }

    pub fn check(&self, graph: &DualGraph) -> Result<()> {
        let full = graph.full_mask();
        if self.mask == 0 || self.mask & !full != 0 || self.mask == full {
            return Err(Error::InvalidSubcurve);
        }
        Ok(())
    }
}
