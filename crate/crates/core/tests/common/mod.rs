//! Stable graphs by closure under degeneration: every stable graph is
//! reached from the single genus-g vertex by adding loops and splitting
//! vertices.

#![allow(dead_code)]

use std::collections::BTreeSet;

use gwql_core::lefschetz::{Hypergraph, Locus};

#[derive(Clone)]
pub struct G {
    pub genera: Vec<u32>,
    pub edges: Vec<(usize, usize)>,
}

fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

// minimum over relabelings of (labels, adjacency multiplicity matrix)
fn key(labels: &[u64], edges: &[(usize, usize)]) -> Vec<u64> {
    let n = labels.len();
    let mut best: Option<Vec<u64>> = None;
    for p in perms(n) {
        let mut k: Vec<u64> = p.iter().map(|&i| labels[i]).collect();
        let mut pos = vec![0; n];
        for (new, &old) in p.iter().enumerate() {
            pos[old] = new;
        }
        let mut m = vec![0u64; n * n];
        for &(a, b) in edges {
            let (x, y) = (pos[a], pos[b]);
            m[x * n + y] += 1;
            if x != y {
                m[y * n + x] += 1;
            }
        }
        k.extend(m);
        if best.as_ref().is_none_or(|b| &k < b) {
            best = Some(k);
        }
    }
    best.unwrap()
}

fn valence(g: &G, v: usize) -> u32 {
    g.edges
        .iter()
        .map(|&(a, b)| (a == v) as u32 + (b == v) as u32)
        .sum()
}

fn stable(g: &G) -> bool {
    (0..g.genera.len()).all(|v| 2 * g.genera[v] + valence(g, v) >= 3)
}

fn degenerations(g: &G) -> Vec<G> {
    let mut out = Vec::new();
    for v in 0..g.genera.len() {
        if g.genera[v] >= 1 {
            let mut h = g.clone();
            h.genera[v] -= 1;
            h.edges.push((v, v));
            out.push(h);
        }
        // ends at v, as (edge index, which end)
        let ends: Vec<(usize, bool)> = g
            .edges
            .iter()
            .enumerate()
            .flat_map(|(i, &(a, b))| {
                let mut e = Vec::new();
                if a == v {
                    e.push((i, false));
                }
                if b == v {
                    e.push((i, true));
                }
                e
            })
            .collect();
        let new = g.genera.len();
        for h1 in 0..=g.genera[v] {
            for mask in 0u32..(1 << ends.len()) {
                let mut h = g.clone();
                h.genera[v] = h1;
                h.genera.push(g.genera[v] - h1);
                for (bit, &(i, second)) in ends.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        if second {
                            h.edges[i].1 = new;
                        } else {
                            h.edges[i].0 = new;
                        }
                    }
                }
                h.edges.push((v, new));
                if stable(&h) {
                    out.push(h);
                }
            }
        }
    }
    out
}

pub fn closure(genus: u32) -> Vec<G> {
    let start = G {
        genera: vec![genus],
        edges: vec![],
    };
    let mut seen = BTreeSet::new();
    seen.insert(key(&[genus as u64], &[]));
    let mut all = vec![start.clone()];
    let mut frontier = vec![start];
    while let Some(g) = frontier.pop() {
        for h in degenerations(&g) {
            let labels: Vec<u64> = h.genera.iter().map(|&x| x as u64).collect();
            if seen.insert(key(&labels, &h.edges)) {
                all.push(h.clone());
                frontier.push(h);
            }
        }
    }
    all
}

pub fn decorated_oracle(genus: u32) -> BTreeSet<Vec<u64>> {
    let mut out = BTreeSet::new();
    for g in closure(genus) {
        let n = g.genera.len();
        let choices: u64 = if g.edges.is_empty() { 3 } else { 2 };
        for code in 0..choices.pow(n as u32) {
            let mut c = code;
            let labels: Vec<u64> = g
                .genera
                .iter()
                .map(|&x| {
                    let d = c % choices;
                    c /= choices;
                    x as u64 * 10 + d
                })
                .collect();
            out.insert(key(&labels, &g.edges));
        }
    }
    out
}

pub fn to_key(h: &Hypergraph) -> Vec<u64> {
    let labels: Vec<u64> = h
        .vertices
        .iter()
        .map(|v| {
            let d = match v.decoration.unwrap() {
                Locus::D0 => 0,
                Locus::X0 => 1,
                Locus::XInf => 2,
            };
            v.genus as u64 * 10 + d
        })
        .collect();
    key(&labels, &h.edges)
}
