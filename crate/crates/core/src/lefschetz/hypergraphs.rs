//! Decorated stable graphs of genus g (no legs), the combinatorial support
//! of the quantized recursion.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{LefschetzError, Locus};
use crate::graphs::{is_connected, permutations};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HypergraphVertex {
    pub genus: u32,
    pub decoration: Option<Locus>,
}

/// Vertices and an edge multiset of unordered pairs, smaller index first;
/// `(v, v)` is a loop. Stored in canonical labeling.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hypergraph {
    pub vertices: Vec<HypergraphVertex>,
    pub edges: Vec<(usize, usize)>,
}

impl Hypergraph {
    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn first_betti(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn genus(&self) -> u32 {
        self.vertices.iter().map(|v| v.genus).sum::<u32>() + self.first_betti() as u32
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.vertices.len(), self.edges.iter().copied())
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertices.len()).all(|v| 2 * self.vertices[v].genus as usize + self.valence(v) >= 3)
    }

    /// Checks connectivity, stability, and the decoration rule.
    pub fn is_valid(&self) -> bool {
        if !self.is_connected() || !self.is_stable() {
            return false;
        }
        if self.edges.is_empty() {
            self.vertices[0].decoration.is_some()
        } else {
            self.vertices
                .iter()
                .all(|v| matches!(v.decoration, Some(Locus::D0) | Some(Locus::X0)))
        }
    }

    /// The same graph in its lexicographically smallest labeling.
    pub fn canonicalize(&self) -> Hypergraph {
        let n = self.vertices.len();
        let ids: Vec<usize> = (0..n).collect();
        let mut best: Option<Hypergraph> = None;
        for perm in permutations(&ids) {
            // perm[new] = old
            let mut inv = vec![0; n];
            for (new, &old) in perm.iter().enumerate() {
                inv[old] = new;
            }
            let vertices: Vec<_> = perm.iter().map(|&old| self.vertices[old]).collect();
            if let Some(b) = &best {
                if vertices > b.vertices {
                    continue;
                }
            }
            let mut edges: Vec<_> = self
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (inv[a], inv[b]);
                    (x.min(y), x.max(y))
                })
                .collect();
            edges.sort_unstable();
            let cand = Hypergraph { vertices, edges };
            if best.as_ref().is_none_or(|b| &cand < b) {
                best = Some(cand);
            }
        }
        best.expect("at least one labeling")
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self
            .vertices
            .iter()
            .map(|v| match v.decoration {
                Some(l) => format!("{}:{}", v.genus, l),
                None => v.genus.to_string(),
            })
            .collect();
        let es: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "[{}] {{{}}}", vs.join(", "), es.join(", "))
    }
}

fn multisets(items: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
    if cur.len() == size {
        out(cur);
        return;
    }
    for i in start..items {
        cur.push(i);
        multisets(items, size, i, cur, out);
        cur.pop();
    }
}

fn genus_assignments(v: usize, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() == v {
        out.push(cur.clone());
        return;
    }
    let used: u32 = cur.iter().sum();
    for gi in 0..=budget - used {
        cur.push(gi);
        genus_assignments(v, budget, cur, out);
        cur.pop();
    }
}

/// Undecorated stable graphs of genus g ≥ 2 without legs, by brute force
/// over at most 2g−2 vertices and 3g−3 edges.
pub fn enumerate_stable_graphs(g: u32) -> Result<Vec<Hypergraph>, LefschetzError> {
    if g < 2 {
        return Err(LefschetzError::GenusOutOfRegime(g));
    }
    let mut found = BTreeSet::new();
    for nv in 1..=(2 * g as usize - 2) {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        let mut assignments = Vec::new();
        genus_assignments(nv, g, &mut Vec::new(), &mut assignments);
        for genera in assignments {
            let b1 = (g - genera.iter().sum::<u32>()) as usize;
            let ne = b1 + nv - 1;
            if ne > 3 * g as usize - 3 {
                continue;
            }
            let vertices: Vec<_> = genera
                .iter()
                .map(|&genus| HypergraphVertex {
                    genus,
                    decoration: None,
                })
                .collect();
            multisets(pairs.len(), ne, 0, &mut Vec::new(), &mut |choice| {
                let h = Hypergraph {
                    vertices: vertices.clone(),
                    edges: choice.iter().map(|&i| pairs[i]).collect(),
                };
                if h.is_connected() && h.is_stable() {
                    found.insert(h.canonicalize());
                }
            });
        }
    }
    Ok(found.into_iter().collect())
}

/// All decorated hypergraphs of genus g ≥ 2: the three single-vertex
/// graphs, and every graph with edges decorated by D_0 and X_0 only.
pub fn enumerate_hypergraphs(g: u32) -> Result<Vec<Hypergraph>, LefschetzError> {
    let mut found = BTreeSet::new();
    for base in enumerate_stable_graphs(g)? {
        let choices: &[Locus] = if base.edges.is_empty() {
            &[Locus::D0, Locus::X0, Locus::XInf]
        } else {
            &[Locus::D0, Locus::X0]
        };
        let nv = base.vertices.len();
        let total = choices.len().pow(nv as u32);
        for code in 0..total {
            let mut h = base.clone();
            let mut c = code;
            for v in h.vertices.iter_mut() {
                v.decoration = Some(choices[c % choices.len()]);
                c /= choices.len();
            }
            found.insert(h.canonicalize());
        }
    }
    Ok(found.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_graph_counts() {
        assert_eq!(enumerate_stable_graphs(2).unwrap().len(), 7);
        assert!(matches!(
            enumerate_stable_graphs(1),
            Err(LefschetzError::GenusOutOfRegime(1))
        ));
    }

    #[test]
    fn decorated_invariants() {
        let hs = enumerate_hypergraphs(2).unwrap();
        assert_eq!(hs.iter().filter(|h| h.edges.is_empty()).count(), 3);
        for h in &hs {
            assert!(h.is_valid(), "{h}");
            assert_eq!(h.genus(), 2);
        }
        // two genus-1 vertices joined by an edge: {D0,D0}, {D0,X0}, {X0,X0}
        let dumbbell = hs
            .iter()
            .filter(|h| h.vertices.len() == 2 && h.vertices.iter().all(|v| v.genus == 1))
            .count();
        assert_eq!(dumbbell, 3);
    }

    #[test]
    fn canonical_form_is_label_free() {
        let v = |genus, d| HypergraphVertex {
            genus,
            decoration: Some(d),
        };
        let a = Hypergraph {
            vertices: vec![v(1, Locus::D0), v(0, Locus::X0)],
            edges: vec![(0, 1), (1, 1)],
        };
        let b = Hypergraph {
            vertices: vec![v(0, Locus::X0), v(1, Locus::D0)],
            edges: vec![(0, 0), (0, 1)],
        };
        assert_eq!(a.canonicalize(), b.canonicalize());
        assert!(a.is_valid());
        let bad = Hypergraph {
            vertices: vec![v(1, Locus::XInf), v(0, Locus::X0)],
            edges: vec![(0, 1), (1, 1)],
        };
        assert!(!bad.is_valid());
    }
}
