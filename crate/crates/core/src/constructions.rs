//! Named families: the extremal pair construction, its generalization, and
//! doubled multisets.

use thiserror::Error;

use crate::family::{FamilyError, Mode, Triangle, TriangleFamily};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("n = {0} must be a positive multiple of 4")]
    NotMultipleOfFour(usize),
    #[error("{pairs} pairs and {apexes} apexes do not fit on {n} vertices")]
    Capacity {
        n: usize,
        pairs: usize,
        apexes: usize,
    },
    #[error("family is already in multiset mode")]
    AlreadyMultiset,
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// `n/4` disjoint pairs `{2i, 2i+1}`, each joined to every apex in
/// `n/2..n`. Size `n²/8`.
pub fn t_star(n: usize) -> Result<TriangleFamily, ConstructionError> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(ConstructionError::NotMultipleOfFour(n));
    }
    pair_family(n, n / 4, n / 2)
}

/// Pair `i` is `{2i, 2i+1}`; the apexes are the last `apexes` vertices.
/// Every pair forms a triangle with every apex.
pub fn pair_family(
    n: usize,
    pairs: usize,
    apexes: usize,
) -> Result<TriangleFamily, ConstructionError> {
    if pairs == 0 || apexes == 0 || 2 * pairs + apexes > n {
        return Err(ConstructionError::Capacity { n, pairs, apexes });
    }
    let triples = (0..pairs).flat_map(|i| (n - apexes..n).map(move |a| [2 * i, 2 * i + 1, a]));
    Ok(TriangleFamily::from_triples(n, Mode::Set, triples)?)
}

/// Every member of a set-mode family taken twice.
pub fn double(f: &TriangleFamily) -> Result<TriangleFamily, ConstructionError> {
    if f.mode() != Mode::Set {
        return Err(ConstructionError::AlreadyMultiset);
    }
    Ok(TriangleFamily::from_members(
        f.n(),
        Mode::Multiset,
        f.members().iter().map(|m| (m.triangle, 2)),
    )?)
}

/// Six pairwise edge-disjoint triangles on nine vertices whose union graph
/// has no other triangle, so their doubling is rainbow-free.
///
/// This is the first such support in lexicographic order of 6-subsets of
/// the triangles on nine vertices; `fig5_support_is_first_found` in the
/// tests regenerates it.
pub const FIG5_SUPPORT: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 3, 4],
    [1, 5, 6],
    [2, 7, 8],
    [3, 5, 7],
    [4, 6, 8],
];

pub fn fig5_support() -> TriangleFamily {
    TriangleFamily::from_triples(9, Mode::Set, FIG5_SUPPORT).expect("constant is valid")
}

/// Twelve triangles on nine vertices without a rainbow triangle.
pub fn fig5() -> TriangleFamily {
    double(&fig5_support()).expect("support is a set")
}

/// All triangles on `n` vertices in lexicographic order.
pub fn all_triangles(n: usize) -> Vec<Triangle> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push(Triangle::new(a, b, c).expect("distinct"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rainbow::find_rainbow;
    use crate::union_graph::UnionGraph;

    #[test]
    fn t_star_sizes() {
        assert_eq!(
            t_star(4).unwrap().to_trifam(),
            "trifam 1\nmode set\nn 4\n0 1 2\n0 1 3\n"
        );
        assert_eq!(t_star(8).unwrap().size(), 8);
        let t12 = t_star(12).unwrap();
        assert_eq!(t12.size(), 18);
        assert!(find_rainbow(&t12).is_none());
        for n in (4..=40).step_by(4) {
            assert_eq!(t_star(n).unwrap().size() * 8, n * n);
        }
    }

    #[test]
    fn t_star_rejects_bad_n() {
        for n in [0, 2, 6, 10] {
            assert_eq!(t_star(n), Err(ConstructionError::NotMultipleOfFour(n)));
        }
    }

    #[test]
    fn pair_family_examples() {
        let book = pair_family(5, 1, 3).unwrap();
        assert_eq!(book.size(), 3);
        assert!(find_rainbow(&book).is_none());
        let f = pair_family(7, 2, 3).unwrap();
        assert_eq!(f.size(), 6);
        assert!(find_rainbow(&f).is_none());
        assert_eq!(pair_family(12, 3, 6).unwrap(), t_star(12).unwrap());
        assert!(pair_family(5, 2, 2).is_err());
        assert!(pair_family(5, 0, 2).is_err());
    }

    #[test]
    fn pair_family_sweep_is_rainbow_free() {
        for pairs in 1..=3 {
            for apexes in 1..=5 {
                for n in 2 * pairs + apexes..=2 * pairs + apexes + 2 {
                    let f = pair_family(n, pairs, apexes).unwrap();
                    assert!(find_rainbow(&f).is_none(), "n={n} p={pairs} a={apexes}");
                }
            }
        }
    }

    #[test]
    fn doubling() {
        let one = TriangleFamily::from_triples(3, Mode::Set, [[0, 1, 2]]).unwrap();
        let d = double(&one).unwrap();
        assert_eq!(d.to_trifam(), "trifam 1\nmode multiset\nn 3\n0 1 2 x2\n");
        assert_eq!(double(&d), Err(ConstructionError::AlreadyMultiset));
        let empty = TriangleFamily::new(4, Mode::Set).unwrap();
        assert!(double(&empty).unwrap().is_empty());
    }

    #[test]
    fn fig5_properties() {
        let s = fig5_support();
        assert_eq!((s.n(), s.size()), (9, 6));
        let g = UnionGraph::of(&s);
        assert_eq!(g.edge_count(), 18, "pairwise edge-disjoint");
        assert_eq!(g.triangles().len(), 6, "no triangle beyond the members");
        let f = fig5();
        assert_eq!(f.size(), 12);
        assert!(find_rainbow(&f).is_none());
    }

    /// Oracle: scan 6-subsets of the 84 triangles on 9 vertices in
    /// lexicographic order, pruning on edge overlap, and take the first one
    /// whose doubling is rainbow-free.
    #[test]
    fn fig5_support_is_first_found() {
        fn go(
            pool: &[Triangle],
            start: usize,
            used: &mut Vec<Triangle>,
            edges: &mut std::collections::HashSet<crate::family::Edge>,
        ) -> Option<Vec<Triangle>> {
            if used.len() == 6 {
                let f =
                    TriangleFamily::from_members(9, Mode::Multiset, used.iter().map(|&t| (t, 2)))
                        .unwrap();
                return find_rainbow(&f).is_none().then(|| used.clone());
            }
            for i in start..pool.len() {
                let t = pool[i];
                if t.edges().iter().any(|e| edges.contains(e)) {
                    continue;
                }
                used.push(t);
                edges.extend(t.edges());
                let found = go(pool, i + 1, used, edges);
                for e in t.edges() {
                    edges.remove(&e);
                }
                used.pop();
                if found.is_some() {
                    return found;
                }
            }
            None
        }
        let pool = all_triangles(9);
        assert_eq!(pool.len(), 84);
        let found = go(&pool, 0, &mut Vec::new(), &mut Default::default()).unwrap();
        let found: Vec<[usize; 3]> = found.iter().map(|t| t.vertices()).collect();
        assert_eq!(found, FIG5_SUPPORT.to_vec());
    }
}
