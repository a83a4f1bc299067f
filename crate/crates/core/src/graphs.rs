//! Decorated graphs indexing the torus-fixed loci of M̄_{g,n}(P^N, d), g ≤ 1.
//!
//! A vertex is a connected component of the preimage of a fixed point
//! (a contracted curve, a node, or a bare point); an edge is a degree-d_e
//! cover of the coordinate line joining two fixed points. Graphs are stored
//! in canonical labeling, so structural equality is isomorphism.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("genus {0} localization graphs are not supported (only g <= 1)")]
    UnsupportedGenus(u8),
    #[error("invalid enumeration request: {0}")]
    InvalidRequest(String),
    #[error("malformed graph: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocVertex {
    pub fixed_point: usize,
    pub genus: u8,
    /// Sorted marking labels.
    pub markings: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocEdge {
    /// Endpoint vertex indices, smaller first.
    pub ends: (usize, usize),
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocGraph {
    pub vertices: Vec<LocVertex>,
    pub edges: Vec<LocEdge>,
    pub automorphism_order: u64,
}

/// How a vertex enters the localization measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VertexKind {
    /// Carries a moduli factor M̄_{g, val+marks}.
    Stable,
    /// Genus 0, one edge, no marking: a bare point on the edge.
    UnmarkedLeaf,
    /// Genus 0, one edge, one marking sitting on the edge component.
    MarkedLeaf,
    /// Genus 0, two edges, no marking: a node joining two edge components.
    Bridge,
}

/// Automorphism group order of the decorated graph and the separate
/// ∏ d_e factor coming from the deck transformations of the edge covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AutomorphismData {
    pub automorphisms: u64,
    pub edge_degree_factor: u64,
}

impl AutomorphismData {
    pub fn total(&self) -> u64 {
        self.automorphisms * self.edge_degree_factor
    }
}

type Encoding = (Vec<LocVertex>, Vec<(usize, usize, u32)>);

impl LocGraph {
    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.ends.0 == v) as usize + (e.ends.1 == v) as usize)
            .sum()
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        let vert = &self.vertices[v];
        let val = self.valence(v);
        let marks = vert.markings.len();
        match (vert.genus, val, marks) {
            (0, 1, 0) => VertexKind::UnmarkedLeaf,
            (0, 1, 1) => VertexKind::MarkedLeaf,
            (0, 2, 0) => VertexKind::Bridge,
            _ => VertexKind::Stable,
        }
    }

    pub fn stability_flags(&self) -> Vec<VertexKind> {
        (0..self.vertices.len()).map(|v| self.kind(v)).collect()
    }

    pub fn degree(&self) -> u32 {
        self.edges.iter().map(|e| e.degree).sum()
    }

    pub fn first_betti(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn genus(&self) -> usize {
        self.vertices.iter().map(|v| v.genus as usize).sum::<usize>() + self.first_betti()
    }

    pub fn marking_count(&self) -> usize {
        self.vertices.iter().map(|v| v.markings.len()).sum()
    }

    /// Vertex index carrying marking `m`.
    pub fn marking_vertex(&self, m: usize) -> Option<usize> {
        self.vertices.iter().position(|v| v.markings.contains(&m))
    }

    /// Checks every structural invariant of a localization graph.
    pub fn validate(&self, target_dim: usize) -> Result<(), GraphError> {
        let bad = |s: String| Err(GraphError::Malformed(s));
        if self.vertices.is_empty() {
            return bad("no vertices".into());
        }
        if self.edges.len() + 1 < self.vertices.len() {
            return bad("too few edges to be connected".into());
        }
        for e in &self.edges {
            let (a, b) = e.ends;
            if a >= b || b >= self.vertices.len() {
                return bad(format!("bad endpoints {:?}", e.ends));
            }
            if e.degree == 0 {
                return bad("edge of degree 0".into());
            }
            if self.vertices[a].fixed_point == self.vertices[b].fixed_point {
                return bad("edge joins equal fixed points".into());
            }
        }
        for v in &self.vertices {
            if v.fixed_point > target_dim {
                return bad(format!("fixed point {} out of range", v.fixed_point));
            }
            if v.genus > 1 {
                return bad("vertex genus above 1".into());
            }
        }
        if !is_connected(self.vertices.len(), self.edges.iter().map(|e| e.ends)) {
            return bad("not connected".into());
        }
        if self.genus() > 1 {
            return bad("total genus above 1".into());
        }
        let mut seen: Vec<usize> = self.vertices.iter().flat_map(|v| v.markings.clone()).collect();
        seen.sort_unstable();
        if seen != (0..seen.len()).collect::<Vec<_>>() {
            return bad("marking labels must be 0..n, each exactly once".into());
        }
        Ok(())
    }

    fn encode(&self, order: &[usize]) -> Encoding {
        // order[new] = old
        let mut inv = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }
        let verts = order.iter().map(|&old| self.vertices[old].clone()).collect();
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (inv[e.ends.0], inv[e.ends.1]);
                (a.min(b), a.max(b), e.degree)
            })
            .collect();
        edges.sort_unstable();
        (verts, edges)
    }

    // Vertex invariant used to restrict the permutations tried by the
    // canonical labeling: decoration plus the multiset of incident
    // (edge degree, neighbour decoration).
    fn vertex_invariant(&self, v: usize) -> (LocVertex, Vec<(u32, usize, u8)>) {
        let mut inc: Vec<_> = self
            .edges
            .iter()
            .filter_map(|e| {
                let other = if e.ends.0 == v {
                    e.ends.1
                } else if e.ends.1 == v {
                    e.ends.0
                } else {
                    return None;
                };
                let o = &self.vertices[other];
                Some((e.degree, o.fixed_point, o.genus))
            })
            .collect();
        inc.sort_unstable();
        (self.vertices[v].clone(), inc)
    }

    /// Relabel into canonical form and fill in the automorphism order.
    pub fn canonicalize(&self) -> LocGraph {
        let n = self.vertices.len();
        let mut idx: Vec<usize> = (0..n).collect();
        let invariants: Vec<_> = (0..n).map(|v| self.vertex_invariant(v)).collect();
        idx.sort_by(|&a, &b| invariants[a].cmp(&invariants[b]));
        // blocks of equal invariant
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &v in &idx {
            match blocks.last_mut() {
                Some(b) if invariants[b[0]] == invariants[v] => b.push(v),
                _ => blocks.push(vec![v]),
            }
        }
        let mut best: Option<Encoding> = None;
        let mut hits = 0u64;
        for order in block_permutations(&blocks) {
            let enc = self.encode(&order);
            match &best {
                Some(b) if enc > *b => {}
                Some(b) if enc == *b => hits += 1,
                _ => {
                    best = Some(enc);
                    hits = 1;
                }
            }
        }
        let (vertices, edges) = best.expect("at least one ordering");
        let parallel = parallel_edge_symmetry(&edges);
        LocGraph {
            vertices,
            edges: edges
                .into_iter()
                .map(|(a, b, degree)| LocEdge { ends: (a, b), degree })
                .collect(),
            automorphism_order: hits * parallel,
        }
    }
}

/// ∏ m! over classes of parallel edges with equal degree.
fn parallel_edge_symmetry(edges: &[(usize, usize, u32)]) -> u64 {
    let mut counts: BTreeMap<(usize, usize, u32), u64> = BTreeMap::new();
    for e in edges {
        *counts.entry(*e).or_default() += 1;
    }
    counts.values().map(|&m| (1..=m).product::<u64>()).product()
}

fn block_permutations(blocks: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for block in blocks {
        let perms = permutations(block);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for prefix in &out {
            for p in &perms {
                let mut o: Vec<usize> = prefix.clone();
                o.extend_from_slice(p);
                next.push(o);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

pub(crate) fn is_connected(n: usize, edges: impl Iterator<Item = (usize, usize)> + Clone) -> bool {
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for (a, b) in edges.clone() {
            for (p, q) in [(a, b), (b, a)] {
                if p == x && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Automorphism order and ∏ d_e, recomputed from the graph itself.
pub fn graph_automorphisms(graph: &LocGraph) -> AutomorphismData {
    AutomorphismData {
        automorphisms: graph.canonicalize().automorphism_order,
        edge_degree_factor: graph.edges.iter().map(|e| e.degree as u64).product(),
    }
}

// An undecorated multigraph with edge degrees and vertex genera.
#[derive(Clone)]
struct Shape {
    genera: Vec<u8>,
    edges: Vec<(usize, usize, u32)>,
}

impl Shape {
    fn as_graph(&self) -> LocGraph {
        LocGraph {
            vertices: self
                .genera
                .iter()
                .map(|&genus| LocVertex {
                    fixed_point: 0,
                    genus,
                    markings: Vec::new(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b, degree)| LocEdge {
                    ends: (a.min(b), a.max(b)),
                    degree,
                })
                .collect(),
            automorphism_order: 1,
        }
    }
}

// Trees with total edge degree `d`, grown one leaf at a time.
fn trees(d: u32) -> Vec<Shape> {
    fn grow(shape: &Shape, budget: u32, out: &mut Vec<Shape>) {
        if budget == 0 {
            out.push(shape.clone());
            return;
        }
        let v = shape.genera.len();
        for parent in 0..v {
            for deg in 1..=budget {
                let mut s = shape.clone();
                s.genera.push(0);
                s.edges.push((parent, v, deg));
                grow(&s, budget - deg, out);
            }
        }
    }
    let mut out = Vec::new();
    grow(
        &Shape {
            genera: vec![0],
            edges: Vec::new(),
        },
        d,
        &mut out,
    );
    out
}

fn dedupe_shapes(shapes: Vec<Shape>) -> Vec<Shape> {
    let mut seen: BTreeMap<Encoding, Shape> = BTreeMap::new();
    for s in shapes {
        let c = s.as_graph().canonicalize();
        let key = c.encode(&(0..c.vertices.len()).collect::<Vec<_>>());
        seen.entry(key).or_insert_with(|| Shape {
            genera: c.vertices.iter().map(|v| v.genus).collect(),
            edges: c.edges.iter().map(|e| (e.ends.0, e.ends.1, e.degree)).collect(),
        });
    }
    seen.into_values().collect()
}

fn shapes(d: u32, genus: u8) -> Vec<Shape> {
    if genus == 0 {
        return dedupe_shapes(trees(d));
    }
    let mut out = Vec::new();
    // one genus-1 vertex on a tree
    for t in trees(d) {
        for v in 0..t.genera.len() {
            let mut s = t.clone();
            s.genera[v] = 1;
            out.push(s);
        }
    }
    // one extra edge closing a single cycle; the tree carries degree d - k
    for k in 1..d {
        for t in dedupe_shapes(trees(d - k)) {
            let n = t.genera.len();
            for a in 0..n {
                for b in a + 1..n {
                    let mut s = t.clone();
                    s.edges.push((a, b, k));
                    out.push(s);
                }
            }
        }
    }
    dedupe_shapes(out)
}

/// All isomorphism classes of localization graphs for M̄_{g,n}(P^N, d).
pub fn enumerate_loc_graphs(
    target_dim: usize,
    degree: u32,
    genus: u8,
    markings: usize,
) -> Result<Vec<LocGraph>, GraphError> {
    if genus > 1 {
        return Err(GraphError::UnsupportedGenus(genus));
    }
    if target_dim < 1 || degree < 1 {
        return Err(GraphError::InvalidRequest(format!(
            "need N >= 1 and d >= 1, got N = {target_dim}, d = {degree}"
        )));
    }
    let mut found: BTreeMap<Encoding, LocGraph> = BTreeMap::new();
    for shape in shapes(degree, genus) {
        let base = shape.as_graph();
        let nv = base.vertices.len();
        for colors in proper_colorings(nv, &shape.edges, target_dim + 1) {
            for assignment in marking_assignments(markings, nv) {
                let mut g = base.clone();
                for (v, c) in colors.iter().enumerate() {
                    g.vertices[v].fixed_point = *c;
                }
                for (m, &v) in assignment.iter().enumerate() {
                    g.vertices[v].markings.push(m);
                }
                let c = g.canonicalize();
                let key = c.encode(&(0..nv).collect::<Vec<_>>());
                found.entry(key).or_insert(c);
            }
        }
    }
    let out: Vec<LocGraph> = found.into_values().collect();
    debug_assert!(out
        .iter()
        .all(|g| g.validate(target_dim).is_ok() && g.genus() == genus as usize && g.degree() == degree));
    Ok(out)
}

fn proper_colorings(n: usize, edges: &[(usize, usize, u32)], colors: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn go(
        v: usize,
        n: usize,
        edges: &[(usize, usize, u32)],
        colors: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if v == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..colors {
            let clash = edges
                .iter()
                .any(|&(a, b, _)| (a == v && b < v && cur[b] == c) || (b == v && a < v && cur[a] == c));
            if !clash {
                cur[v] = c;
                go(v + 1, n, edges, colors, cur, out);
            }
        }
    }
    go(0, n, edges, colors, &mut cur, &mut out);
    out
}

fn marking_assignments(markings: usize, vertices: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..markings {
        out = out
            .into_iter()
            .flat_map(|a: Vec<usize>| {
                (0..vertices).map(move |v| {
                    let mut b = a.clone();
                    b.push(v);
                    b
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge(d: u32) -> LocGraph {
        LocGraph {
            vertices: vec![
                LocVertex {
                    fixed_point: 0,
                    genus: 0,
                    markings: vec![],
                },
                LocVertex {
                    fixed_point: 1,
                    genus: 0,
                    markings: vec![],
                },
            ],
            edges: vec![LocEdge {
                ends: (0, 1),
                degree: d,
            }],
            automorphism_order: 1,
        }
    }

    #[test]
    fn p1_line() {
        let gs = enumerate_loc_graphs(1, 1, 0, 0).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].automorphism_order, 1);
        assert_eq!(gs[0].edges[0].degree, 1);
    }

    #[test]
    fn p4_lines() {
        let gs = enumerate_loc_graphs(4, 1, 0, 0).unwrap();
        assert_eq!(gs.len(), 10);
        let mut pairs: Vec<_> = gs
            .iter()
            .map(|g| {
                let (a, b) = (g.vertices[0].fixed_point, g.vertices[1].fixed_point);
                (a.min(b), a.max(b))
            })
            .collect();
        pairs.sort();
        pairs.dedup();
        assert_eq!(pairs.len(), 10);
    }

    #[test]
    fn p1_conics() {
        let gs = enumerate_loc_graphs(1, 2, 0, 0).unwrap();
        // one double cover of the line, and the two-edge paths 0-1-0 and 1-0-1
        assert_eq!(gs.len(), 3);
        let single: Vec<_> = gs.iter().filter(|g| g.edges.len() == 1).collect();
        assert_eq!(single.len(), 1);
        assert_eq!(
            graph_automorphisms(single[0]),
            AutomorphismData {
                automorphisms: 1,
                edge_degree_factor: 2
            }
        );
        for g in gs.iter().filter(|g| g.edges.len() == 2) {
            assert_eq!(g.automorphism_order, 2);
        }
    }

    #[test]
    fn automorphisms_of_small_graphs() {
        assert_eq!(
            graph_automorphisms(&single_edge(1)),
            AutomorphismData {
                automorphisms: 1,
                edge_degree_factor: 1
            }
        );
        // the two endpoints carry different fixed points, so no swap
        assert_eq!(graph_automorphisms(&single_edge(2)).automorphisms, 1);
        assert_eq!(graph_automorphisms(&single_edge(2)).total(), 2);
        // double edge between two vertices: the edges swap
        let cycle = LocGraph {
            edges: vec![
                LocEdge {
                    ends: (0, 1),
                    degree: 1,
                },
                LocEdge {
                    ends: (0, 1),
                    degree: 1,
                },
            ],
            ..single_edge(1)
        };
        assert_eq!(graph_automorphisms(&cycle).automorphisms, 2);
        let uneven = LocGraph {
            edges: vec![
                LocEdge {
                    ends: (0, 1),
                    degree: 1,
                },
                LocEdge {
                    ends: (0, 1),
                    degree: 2,
                },
            ],
            ..single_edge(1)
        };
        assert_eq!(
            graph_automorphisms(&uneven),
            AutomorphismData {
                automorphisms: 1,
                edge_degree_factor: 2
            }
        );
    }

    #[test]
    fn flags() {
        let mut g = single_edge(1);
        g.vertices[1].markings.push(0);
        assert_eq!(
            g.stability_flags(),
            vec![VertexKind::UnmarkedLeaf, VertexKind::MarkedLeaf]
        );
        g.vertices[0].genus = 1;
        assert_eq!(g.kind(0), VertexKind::Stable);
    }

    #[test]
    fn rejects_genus_two() {
        assert_eq!(
            enumerate_loc_graphs(2, 1, 2, 0),
            Err(GraphError::UnsupportedGenus(2))
        );
        assert!(enumerate_loc_graphs(0, 1, 0, 0).is_err());
        assert!(enumerate_loc_graphs(2, 0, 0, 0).is_err());
    }

    #[test]
    fn validate_catches_bad_graphs() {
        let mut g = single_edge(1);
        g.vertices[1].fixed_point = 0;
        assert!(g.validate(1).is_err());
        let mut g = single_edge(1);
        g.vertices[0].markings.push(1);
        assert!(g.validate(1).is_err());
        assert!(single_edge(1).validate(0).is_err());
    }

    #[test]
    fn canonical_form_ignores_input_labeling() {
        let a = LocGraph {
            vertices: vec![
                LocVertex {
                    fixed_point: 2,
                    genus: 0,
                    markings: vec![0],
                },
                LocVertex {
                    fixed_point: 0,
                    genus: 1,
                    markings: vec![],
                },
                LocVertex {
                    fixed_point: 1,
                    genus: 0,
                    markings: vec![],
                },
            ],
            edges: vec![
                LocEdge {
                    ends: (0, 1),
                    degree: 1,
                },
                LocEdge {
                    ends: (1, 2),
                    degree: 2,
                },
            ],
            automorphism_order: 1,
        };
        let b = LocGraph {
            vertices: vec![
                a.vertices[2].clone(),
                a.vertices[0].clone(),
                a.vertices[1].clone(),
            ],
            edges: vec![
                LocEdge {
                    ends: (1, 2),
                    degree: 1,
                },
                LocEdge {
                    ends: (0, 2),
                    degree: 2,
                },
            ],
            automorphism_order: 1,
        };
        assert_eq!(a.canonicalize(), b.canonicalize());
    }
}
