use std::collections::BTreeMap;

use crate::family::{Edge, MemberRef, Triangle, TriangleFamily, Vertex};

/// The graph formed by all member edges, with every member copy recorded
/// as an owner of each of its three edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionGraph {
    n: usize,
    owners: BTreeMap<Edge, Vec<MemberRef>>,
    neighbors: Vec<Vec<Vertex>>,
}

impl UnionGraph {
    pub fn of(family: &TriangleFamily) -> UnionGraph {
        let mut owners: BTreeMap<Edge, Vec<MemberRef>> = BTreeMap::new();
        for r in family.copies() {
            for e in family.triangle(r).edges() {
                owners.entry(e).or_default().push(r);
            }
        }
        UnionGraph::from_owners(family.n(), owners)
    }

    /// A plain graph (no owners) on `n` vertices, mainly for tests and the
    /// triangle-uniqueness checks.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: usize, edges: I) -> UnionGraph {
        let owners = edges.into_iter().map(|e| (e, Vec::new())).collect();
        UnionGraph::from_owners(n, owners)
    }

    fn from_owners(n: usize, owners: BTreeMap<Edge, Vec<MemberRef>>) -> UnionGraph {
        let mut neighbors = vec![Vec::new(); n];
        for e in owners.keys() {
            neighbors[e.u()].push(e.v());
            neighbors[e.v()].push(e.u());
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        UnionGraph {
            n,
            owners,
            neighbors,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.owners.len()
    }

    /// Edges in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.owners.keys().copied()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a != b && self.owners.contains_key(&Edge::new(a, b))
    }

    /// Owner copies of `e` in member order; empty if `e` is absent.
    pub fn owners(&self, e: Edge) -> &[MemberRef] {
        self.owners.get(&e).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors[v].len()
    }

    pub fn is_independent(&self, set: &[Vertex]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| !self.has_edge(a, b)))
    }

    /// Every triangle of the graph itself (not only family members), in
    /// lexicographic order.
    pub fn triangles(&self) -> Vec<Triangle> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for &y in self.neighbors[x].iter().filter(|&&y| y > x) {
                for &z in self.neighbors[y].iter().filter(|&&z| z > y) {
                    if self.has_edge(x, z) {
                        out.push(Triangle::new(x, y, z).expect("distinct by construction"));
                    }
                }
            }
        }
        out
    }

    /// Adjacency as one 64-bit mask per vertex, when `n <= 64`.
    pub fn adjacency_masks(&self) -> Option<Vec<u64>> {
        if self.n > 64 {
            return None;
        }
        Some(
            self.neighbors
                .iter()
                .map(|ns| ns.iter().fold(0u64, |m, &v| m | (1 << v)))
                .collect(),
        )
    }
}
