//! Undirected loop-free multigraphs with stable edge identities, plus the
//! structural operations shared by every counting engine.
//!
//! Vertices are dense `0..vertex_count` internally; the text format is
//! 1-based, so parsing subtracts one and serialization adds it back. A
//! gadget's extra root vertex is simply appended at index `n` and therefore
//! serializes as `n+1`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop edge {0}-{0} is not allowed")]
    LoopEdge(usize),
    #[error("edge endpoint {0} out of range (vertex count {1})")]
    VertexOutOfRange(usize, usize),
    #[error("orientation has {got} bits but the graph has {expected} edges")]
    OrientationLength { expected: usize, got: usize },
    #[error("vertex {0} has odd degree")]
    OddDegree(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header (expected `p euler <n> <m>`)")]
    MalformedHeader { line: usize },
    #[error("line {line}: malformed edge line (expected `e <u> <v>`)")]
    MalformedEdge { line: usize },
    #[error("line {line}: vertex id {id} out of range 1..={max}")]
    VertexOutOfRange { line: usize, id: i64, max: usize },
    #[error("line {line}: loop edge {v}-{v}")]
    LoopEdge { line: usize, v: usize },
    #[error("edge count mismatch: header declares {declared}, found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("line {line}: unexpected content after {declared} edges")]
    TrailingEdges { line: usize, declared: usize },
}

/// Undirected multigraph. Parallel edges are permitted and distinguished by
/// their position in the edge list (the edge id); loops are forbidden.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        for &(a, b) in &edges {
            if a == b {
                return Err(GraphError::LoopEdge(a));
            }
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(GraphError::VertexOutOfRange(v, vertex_count));
                }
            }
        }
        Ok(Multigraph {
            vertex_count,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.vertex_count];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Vertices of positive degree, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.degrees()
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d > 0)
            .map(|(v, _)| v)
            .collect()
    }

    /// Parse the line-oriented edge-list format: a `p euler <n> <m>` header,
    /// then exactly `m` lines `e <u> <v>` with 1-based vertex ids; `c` lines
    /// are comments.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            match header {
                None => {
                    let mut parts = trimmed.split_whitespace();
                    let ok = parts.next() == Some("p") && parts.next() == Some("euler");
                    let n = parts.next().and_then(|t| t.parse::<usize>().ok());
                    let m = parts.next().and_then(|t| t.parse::<usize>().ok());
                    match (ok, n, m, parts.next()) {
                        (true, Some(n), Some(m), None) => header = Some((n, m)),
                        _ => return Err(ParseError::MalformedHeader { line }),
                    }
                }
                Some((n, m)) => {
                    if edges.len() == m {
                        return Err(ParseError::TrailingEdges { line, declared: m });
                    }
                    let mut parts = trimmed.split_whitespace();
                    if parts.next() != Some("e") {
                        return Err(ParseError::MalformedEdge { line });
                    }
                    let u = parts.next().and_then(|t| t.parse::<i64>().ok());
                    let v = parts.next().and_then(|t| t.parse::<i64>().ok());
                    let (u, v) = match (u, v, parts.next()) {
                        (Some(u), Some(v), None) => (u, v),
                        _ => return Err(ParseError::MalformedEdge { line }),
                    };
                    for id in [u, v] {
                        if id < 1 || id as usize > n {
                            return Err(ParseError::VertexOutOfRange { line, id, max: n });
                        }
                    }
                    if u == v {
                        return Err(ParseError::LoopEdge {
                            line,
                            v: u as usize,
                        });
                    }
                    edges.push((u as usize - 1, v as usize - 1));
                }
            }
        }
        let (n, m) = header.ok_or(ParseError::MalformedHeader { line: 1 })?;
        if edges.len() != m {
            return Err(ParseError::EdgeCountMismatch {
                declared: m,
                found: edges.len(),
            });
        }
        Ok(Multigraph {
            vertex_count: n,
            edges,
        })
    }

    /// Serialize back to the edge-list format, preserving edge order and ids.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p euler {} {}", self.vertex_count, self.edges.len()).unwrap();
        for &(a, b) in &self.edges {
            writeln!(out, "e {} {}", a + 1, b + 1).unwrap();
        }
        out
    }

    /// Half-degrees `d_v` (the degree of `v` is `2 d_v`). Defined only when
    /// every degree is even.
    pub fn half_degrees(&self) -> Result<HalfDegreeProfile, GraphError> {
        let deg = self.degrees();
        for (v, &d) in deg.iter().enumerate() {
            if d % 2 != 0 {
                return Err(GraphError::OddDegree(v));
            }
        }
        Ok(HalfDegreeProfile {
            half: deg.iter().map(|d| d / 2).collect(),
        })
    }

    /// True iff the graph has at least one edge, every degree is even, and
    /// the support (vertices of positive degree) is connected. Isolated
    /// vertices are ignored.
    pub fn is_eulerian(&self) -> bool {
        if self.edges.is_empty() {
            return false;
        }
        if self.degrees().iter().any(|d| d % 2 != 0) {
            return false;
        }
        self.support_connected()
    }

    /// Connectivity of the subgraph induced by vertices of positive degree.
    /// Vacuously true for the edgeless graph.
    pub fn support_connected(&self) -> bool {
        let deg = self.degrees();
        let Some(start) = deg.iter().position(|&d| d > 0) else {
            return true;
        };
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        deg.iter()
            .enumerate()
            .all(|(v, &d)| d == 0 || seen[v])
    }

    /// Replace every parallel edge beyond the first of its bundle by a
    /// two-edge path through a fresh vertex. The result is simple; original
    /// vertex ids are preserved and fresh vertices get ids `n`, `n+1`, ...
    pub fn subdivide_parallel(&self) -> Multigraph {
        let mut seen = std::collections::HashSet::new();
        let mut next = self.vertex_count;
        let mut edges = Vec::new();
        for &(a, b) in &self.edges {
            let key = (a.min(b), a.max(b));
            if seen.insert(key) {
                edges.push((a, b));
            } else {
                let w = next;
                next += 1;
                edges.push((a, w));
                edges.push((w, b));
            }
        }
        Multigraph {
            vertex_count: next,
            edges,
        }
    }

    /// Apply an orientation: arc `i` is edge `i` as stored when bit `i` is
    /// set, reversed otherwise. Arc ids equal edge ids.
    pub fn orient(&self, o: &Orientation) -> Result<DirectedMultigraph, GraphError> {
        if o.len() != self.edges.len() {
            return Err(GraphError::OrientationLength {
                expected: self.edges.len(),
                got: o.len(),
            });
        }
        let arcs = self
            .edges
            .iter()
            .zip(o.bits())
            .map(|(&(a, b), f)| if f { (a, b) } else { (b, a) })
            .collect();
        Ok(DirectedMultigraph {
            vertex_count: self.vertex_count,
            arcs,
        })
    }
}

/// Per-vertex half-degrees of an even-degree multigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfDegreeProfile {
    half: Vec<usize>,
}

impl HalfDegreeProfile {
    pub fn half_degree(&self, v: usize) -> usize {
        self.half[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.half
    }
}

/// A direction for every edge of some multigraph: bit `i` set means edge `i`
/// runs from its stored first endpoint to its second.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orientation {
    bits: Vec<bool>,
}

impl Orientation {
    pub fn new(bits: Vec<bool>) -> Self {
        Orientation { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, edge: usize) -> bool {
        self.bits[edge]
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }
}

/// Directed multigraph; arises from orienting a `Multigraph` or directly in
/// the directed counting engines. Parallel arcs permitted, loops not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedMultigraph {
    vertex_count: usize,
    arcs: Vec<(usize, usize)>,
}

impl DirectedMultigraph {
    pub fn new(vertex_count: usize, arcs: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        for &(t, h) in &arcs {
            if t == h {
                return Err(GraphError::LoopEdge(t));
            }
            for v in [t, h] {
                if v >= vertex_count {
                    return Err(GraphError::VertexOutOfRange(v, vertex_count));
                }
            }
        }
        Ok(DirectedMultigraph { vertex_count, arcs })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.vertex_count];
        for &(t, _) in &self.arcs {
            out[t] += 1;
        }
        out
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut inn = vec![0usize; self.vertex_count];
        for &(_, h) in &self.arcs {
            inn[h] += 1;
        }
        inn
    }

    /// In-degree equals out-degree at every vertex.
    pub fn is_balanced(&self) -> bool {
        self.out_degrees() == self.in_degrees()
    }

    /// Vertices touched by at least one arc, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut touched = vec![false; self.vertex_count];
        for &(t, h) in &self.arcs {
            touched[t] = true;
            touched[h] = true;
        }
        touched
            .iter()
            .enumerate()
            .filter(|&(_, &t)| t)
            .map(|(v, _)| v)
            .collect()
    }

    /// Weak connectivity of the support.
    pub fn support_connected(&self) -> bool {
        let support = self.support();
        let Some(&start) = support.first() else {
            return true;
        };
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(t, h) in &self.arcs {
            adj[t].push(h);
            adj[h].push(t);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        support.iter().all(|&v| seen[v])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn triangle() -> Multigraph {
        Multigraph::parse("p euler 3 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap()
    }

    fn digon() -> Multigraph {
        Multigraph::parse("p euler 2 2\ne 1 2\ne 1 2\n").unwrap()
    }

    fn bowtie() -> Multigraph {
        // triangles {1,2,5} and {3,4,5} sharing vertex 5
        Multigraph::parse("p euler 5 6\ne 1 2\ne 2 5\ne 1 5\ne 3 4\ne 4 5\ne 3 5\n").unwrap()
    }

    #[test]
    fn parse_triangle() {
        let g = triangle();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (0, 2)]);
    }

    #[test]
    fn parse_digon_keeps_parallel_edges() {
        let g = digon();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges()[0], g.edges()[1]);
    }

    #[test]
    fn parse_rejects_loop_with_line_number() {
        let err = Multigraph::parse("p euler 2 1\ne 1 1\n").unwrap_err();
        assert_eq!(err, ParseError::LoopEdge { line: 2, v: 1 });
    }

    #[test]
    fn parse_rejects_bad_header() {
        assert!(matches!(
            Multigraph::parse("p euler x 3\n"),
            Err(ParseError::MalformedHeader { line: 1 })
        ));
        assert!(matches!(
            Multigraph::parse(""),
            Err(ParseError::MalformedHeader { .. })
        ));
    }

    #[test]
    fn parse_rejects_out_of_range_vertex() {
        let err = Multigraph::parse("p euler 2 1\ne 1 3\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::VertexOutOfRange {
                line: 2,
                id: 3,
                max: 2
            }
        );
    }

    #[test]
    fn parse_rejects_edge_count_mismatch() {
        let err = Multigraph::parse("p euler 3 3\ne 1 2\ne 2 3\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::EdgeCountMismatch {
                declared: 3,
                found: 2
            }
        );
    }

    #[test]
    fn serialize_round_trip_is_identity() {
        for g in [triangle(), digon(), bowtie()] {
            assert_eq!(Multigraph::parse(&g.serialize()).unwrap(), g);
        }
    }

    #[test]
    fn half_degrees_triangle_and_bowtie() {
        let d = triangle().half_degrees().unwrap();
        assert_eq!(d.as_slice(), &[1, 1, 1]);
        let d = bowtie().half_degrees().unwrap();
        assert_eq!(d.as_slice(), &[1, 1, 1, 1, 2]);
    }

    #[test]
    fn half_degrees_rejects_odd_degree() {
        let path = Multigraph::parse("p euler 2 1\ne 1 2\n").unwrap();
        assert_eq!(path.half_degrees(), Err(GraphError::OddDegree(0)));
    }

    #[test]
    fn eulerian_predicate() {
        assert!(triangle().is_eulerian());
        assert!(digon().is_eulerian());
        assert!(bowtie().is_eulerian());
        // two disjoint triangles
        let g =
            Multigraph::parse("p euler 6 6\ne 1 2\ne 2 3\ne 1 3\ne 4 5\ne 5 6\ne 4 6\n").unwrap();
        assert!(!g.is_eulerian());
        // edgeless
        let g = Multigraph::parse("p euler 3 0\n").unwrap();
        assert!(!g.is_eulerian());
        // isolated vertex next to a triangle is fine
        let g = Multigraph::parse("p euler 4 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap();
        assert!(g.is_eulerian());
    }

    #[test]
    fn subdivide_digon_gives_triangle_shape() {
        let g = digon().subdivide_parallel();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (2, 1)]);
        // result has no parallel bundles
        let mut keys: Vec<_> = g
            .edges()
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), g.edge_count());
    }

    #[test]
    fn subdivide_is_identity_on_simple_graphs() {
        assert_eq!(triangle().subdivide_parallel(), triangle());
    }

    #[test]
    fn orient_triangle() {
        let g = triangle();
        let d = g.orient(&Orientation::new(vec![true, true, true])).unwrap();
        assert_eq!(d.arcs(), &[(0, 1), (1, 2), (0, 2)]);
        let d = g.orient(&Orientation::new(vec![true, true, false])).unwrap();
        assert!(d.is_balanced());
    }

    #[test]
    fn orient_digon_antiparallel() {
        let d = digon()
            .orient(&Orientation::new(vec![true, false]))
            .unwrap();
        assert_eq!(d.arcs(), &[(0, 1), (1, 0)]);
    }

    #[test]
    fn orient_length_mismatch() {
        let err = triangle()
            .orient(&Orientation::new(vec![true]))
            .unwrap_err();
        assert_eq!(
            err,
            GraphError::OrientationLength {
                expected: 3,
                got: 1
            }
        );
    }
}
