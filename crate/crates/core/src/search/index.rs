use crate::family::{Triangle, TriangleFamily, Vertex};

/// Colex position of the pair `a < b`.
#[inline]
pub fn pair_index(a: Vertex, b: Vertex) -> usize {
    debug_assert!(a < b);
    b * (b - 1) / 2 + a
}

/// Colex position of the triple `a < b < c`.
#[inline]
pub fn triple_index(a: Vertex, b: Vertex, c: Vertex) -> usize {
    debug_assert!(a < b && b < c);
    c * (c - 1) * (c - 2) / 6 + pair_index(a, b)
}

/// All triangles on `n` vertices in colex order (position = `triple_index`).
pub fn colex_pool(n: usize) -> Vec<Triangle> {
    let mut pool = Vec::with_capacity(n * n.saturating_sub(1) * n.saturating_sub(2) / 6);
    for c in 2..n {
        for b in 1..c {
            for a in 0..b {
                pool.push(Triangle::new(a, b, c).expect("distinct"));
            }
        }
    }
    pool
}

fn sort3(a: Vertex, b: Vertex, c: Vertex) -> (Vertex, Vertex, Vertex) {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let (b, c) = if b < c { (b, c) } else { (c, b) };
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    (a, b, c)
}

/// Whether a triple whose edges have `e1, e2, e3` owner copies, `k` of which
/// are copies of the triple itself, admits three distinct representatives.
///
/// A copy owning two edges of the triple must be the triple itself, so the
/// unions in Hall's condition are `e_i + e_j - k` and `e1 + e2 + e3 - 2k`.
#[inline]
pub fn rainbow_by_counts(k: u32, e1: u32, e2: u32, e3: u32) -> bool {
    e1 >= 1
        && e2 >= 1
        && e3 >= 1
        && e1 + e2 >= k + 2
        && e2 + e3 >= k + 2
        && e1 + e3 >= k + 2
        && e1 + e2 + e3 >= 2 * k + 3
}

/// Owner counts per edge and multiplicity per triangle, maintained
/// incrementally so a single added copy can be tested in `O(n)`.
#[derive(Clone, Debug)]
pub struct OwnerIndex {
    n: usize,
    edge_owners: Vec<u32>,
    multiplicity: Vec<u8>,
}

impl OwnerIndex {
    pub fn new(n: usize) -> Self {
        OwnerIndex {
            n,
            edge_owners: vec![0; n * n.saturating_sub(1) / 2],
            multiplicity: vec![0; n * n.saturating_sub(1) * n.saturating_sub(2) / 6],
        }
    }

    pub fn of(f: &TriangleFamily) -> Self {
        let mut idx = OwnerIndex::new(f.n());
        for m in f.members() {
            for _ in 0..m.multiplicity {
                idx.add(m.triangle);
            }
        }
        idx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn owners(&self, a: Vertex, b: Vertex) -> u32 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edge_owners[pair_index(a, b)]
    }

    pub fn multiplicity(&self, t: Triangle) -> u8 {
        let [a, b, c] = t.vertices();
        self.multiplicity[triple_index(a, b, c)]
    }

    pub fn add(&mut self, t: Triangle) {
        let [a, b, c] = t.vertices();
        self.multiplicity[triple_index(a, b, c)] += 1;
        for e in t.edges() {
            self.edge_owners[pair_index(e.u(), e.v())] += 1;
        }
    }

    pub fn remove(&mut self, t: Triangle) {
        let [a, b, c] = t.vertices();
        self.multiplicity[triple_index(a, b, c)] -= 1;
        for e in t.edges() {
            self.edge_owners[pair_index(e.u(), e.v())] -= 1;
        }
    }

    /// No edge of `t` is owned yet.
    pub fn edges_private(&self, t: Triangle) -> bool {
        t.edges().iter().all(|e| self.owners(e.u(), e.v()) == 0)
    }

    /// Whether one more copy of `t` keeps the family rainbow-free, assuming
    /// it is rainbow-free now. Any new rainbow triple must use the new copy,
    /// so it contains an edge of `t`; only those triples are examined.
    pub fn extend_ok(&self, t: Triangle) -> bool {
        let [a, b, c] = t.vertices();
        let bump = |x: Vertex, y: Vertex| -> u32 {
            self.owners(x, y) + u32::from(t.contains_vertex(x) && t.contains_vertex(y))
        };
        for (u, v) in [(a, b), (b, c), (a, c)] {
            let uv = self.owners(u, v) + 1;
            for w in 0..self.n {
                if w == u || w == v {
                    continue;
                }
                let uw = bump(u, w);
                if uw == 0 {
                    continue;
                }
                let vw = bump(v, w);
                if vw == 0 {
                    continue;
                }
                let (x, y, z) = sort3(u, v, w);
                let k = u32::from(self.multiplicity[triple_index(x, y, z)])
                    + u32::from(w == a || w == b || w == c);
                if rainbow_by_counts(k, uv, vw, uw) {
                    return false;
                }
            }
        }
        true
    }
}

/// `f + t` is rainbow-free, for a rainbow-free `f` with a current index.
pub fn extend_ok(f: &TriangleFamily, t: Triangle, index: &OwnerIndex) -> bool {
    debug_assert_eq!(f.n(), index.n());
    index.extend_ok(t)
}
