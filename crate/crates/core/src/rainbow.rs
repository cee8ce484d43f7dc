//! Rainbow-triangle detection with explicit certificates.

use std::fmt;

use crate::family::{Edge, MemberRef, TriangleFamily, Vertex};
use crate::union_graph::UnionGraph;

/// A vertex triple together with an injective choice of member copies, one
/// containing each of its edges. Edges are listed as `xy`, `yz`, `xz`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RainbowCertificate {
    pub vertices: [Vertex; 3],
    pub assignment: [(Edge, MemberRef); 3],
}

impl fmt::Display for RainbowCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.vertices;
        writeln!(f, "rainbow {x} {y} {z}")?;
        for (e, r) in &self.assignment {
            writeln!(
                f,
                "edge {} {} owner {} copy {}",
                e.u(),
                e.v(),
                r.index,
                r.copy
            )?;
        }
        Ok(())
    }
}

/// Every copy of every member containing `e`, in member order.
pub fn edge_owners(f: &TriangleFamily, e: Edge) -> Vec<MemberRef> {
    f.copies()
        .filter(|&r| f.triangle(r).contains_edge(e))
        .collect()
}

/// Distinct representatives for three owner lists, choosing the
/// lexicographically least assignment.
pub fn distinct_representatives(
    first: &[MemberRef],
    second: &[MemberRef],
    third: &[MemberRef],
) -> Option<[MemberRef; 3]> {
    if !hall_condition(first, second, third) {
        return None;
    }
    for &a in first {
        for &b in second.iter().filter(|&&b| b != a) {
            if let Some(&c) = third.iter().find(|&&c| c != a && c != b) {
                return Some([a, b, c]);
            }
        }
    }
    None
}

fn hall_condition(a: &[MemberRef], b: &[MemberRef], c: &[MemberRef]) -> bool {
    let union_size = |lists: &[&[MemberRef]]| {
        let mut all: Vec<MemberRef> = lists.iter().flat_map(|l| l.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    };
    !a.is_empty()
        && !b.is_empty()
        && !c.is_empty()
        && union_size(&[a, b]) >= 2
        && union_size(&[b, c]) >= 2
        && union_size(&[a, c]) >= 2
        && union_size(&[a, b, c]) >= 3
}

/// Rainbow certificate for the triple `x < y < z`, if one exists.
pub fn rainbow_on(g: &UnionGraph, x: Vertex, y: Vertex, z: Vertex) -> Option<RainbowCertificate> {
    let edges = [Edge::new(x, y), Edge::new(y, z), Edge::new(x, z)];
    let [a, b, c] = edges.map(|e| g.owners(e));
    let [ra, rb, rc] = distinct_representatives(a, b, c)?;
    Some(RainbowCertificate {
        vertices: [x, y, z],
        assignment: [(edges[0], ra), (edges[1], rb), (edges[2], rc)],
    })
}

/// The lexicographically least rainbow triple, with its least assignment.
pub fn find_rainbow(f: &TriangleFamily) -> Option<RainbowCertificate> {
    if f.size() < 3 {
        return None;
    }
    find_rainbow_in(&UnionGraph::of(f))
}

pub fn find_rainbow_in(g: &UnionGraph) -> Option<RainbowCertificate> {
    for x in 0..g.n() {
        for &y in g.neighbors(x).iter().filter(|&&y| y > x) {
            for &z in g.neighbors(y).iter().filter(|&&z| z > y) {
                if g.has_edge(x, z) {
                    if let Some(cert) = rainbow_on(g, x, y, z) {
                        return Some(cert);
                    }
                }
            }
        }
    }
    None
}

pub fn is_rainbow_free(f: &TriangleFamily) -> bool {
    find_rainbow(f).is_none()
}

/// Checks a certificate against `f` without trusting its producer.
pub fn verify_certificate(f: &TriangleFamily, c: &RainbowCertificate) -> bool {
    let [x, y, z] = c.vertices;
    if !(x < y && y < z && z < f.n()) {
        return false;
    }
    let expected = [Edge::new(x, y), Edge::new(y, z), Edge::new(x, z)];
    let valid_ref = |r: &MemberRef| {
        f.members()
            .get(r.index)
            .is_some_and(|m| r.copy < m.multiplicity)
    };
    let refs = c.assignment.map(|(_, r)| r);
    c.assignment
        .iter()
        .zip(expected)
        .all(|((e, r), want)| *e == want && valid_ref(r) && f.triangle(*r).contains_edge(*e))
        && refs[0] != refs[1]
        && refs[1] != refs[2]
        && refs[0] != refs[2]
}

/// How many of the member's three edges lie in some other triangle of the
/// family. Further copies of the member's own triangle do not count.
pub fn shared_edge_count(f: &TriangleFamily, m: MemberRef) -> usize {
    let t = f.triangle(m);
    t.edges()
        .iter()
        .filter(|&&e| {
            f.members()
                .iter()
                .any(|other| other.triangle != t && other.triangle.contains_edge(e))
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::t_star;
    use crate::family::{Mode, Triangle};

    fn family(n: usize, triples: &[[usize; 3]]) -> TriangleFamily {
        TriangleFamily::from_triples(n, Mode::Set, triples.iter().copied()).unwrap()
    }

    #[test]
    fn owners_in_member_order() {
        let f = family(3, &[[0, 1, 2]]);
        assert_eq!(edge_owners(&f, Edge::new(0, 1)), vec![MemberRef::new(0, 0)]);
        let d =
            TriangleFamily::from_members(3, Mode::Multiset, [(Triangle::new(0, 1, 2).unwrap(), 2)])
                .unwrap();
        assert_eq!(
            edge_owners(&d, Edge::new(0, 1)),
            vec![MemberRef::new(0, 0), MemberRef::new(0, 1)]
        );
        assert_eq!(edge_owners(&t_star(8).unwrap(), Edge::new(0, 1)).len(), 4);
    }

    #[test]
    fn three_spokes_make_a_rainbow() {
        let f = family(6, &[[0, 1, 3], [1, 2, 4], [0, 2, 5]]);
        let c = find_rainbow(&f).unwrap();
        assert_eq!(c.vertices, [0, 1, 2]);
        assert_eq!(
            c.assignment,
            [
                (Edge::new(0, 1), MemberRef::new(0, 0)),
                (Edge::new(1, 2), MemberRef::new(1, 0)),
                (Edge::new(0, 2), MemberRef::new(2, 0)),
            ]
        );
        assert!(verify_certificate(&f, &c));
        assert_eq!(
            c.to_string(),
            "rainbow 0 1 2\nedge 0 1 owner 0 copy 0\nedge 1 2 owner 1 copy 0\nedge 0 2 owner 2 copy 0\n"
        );
    }

    #[test]
    fn member_triple_can_itself_be_rainbow() {
        let f = family(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3]]);
        let c = find_rainbow(&f).unwrap();
        assert_eq!(c.vertices, [0, 1, 2]);
        assert_eq!(
            c.assignment.map(|(_, r)| r.index),
            [1, 0, 2],
            "xy -> m1, yz -> m0, xz -> m2"
        );
    }

    #[test]
    fn fewer_than_three_copies_is_rainbow_free() {
        assert!(find_rainbow(&family(4, &[[0, 1, 2], [0, 1, 3]])).is_none());
        let d =
            TriangleFamily::from_members(3, Mode::Multiset, [(Triangle::new(0, 1, 2).unwrap(), 2)])
                .unwrap();
        assert!(find_rainbow(&d).is_none());
    }

    #[test]
    fn t_star_is_rainbow_free() {
        for n in [4, 8, 12, 16] {
            assert!(find_rainbow(&t_star(n).unwrap()).is_none());
        }
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let f = family(6, &[[0, 1, 3], [1, 2, 4], [0, 2, 5]]);
        let good = find_rainbow(&f).unwrap();

        let mut same_owner = good.clone();
        same_owner.assignment[1].1 = same_owner.assignment[0].1;
        assert!(!verify_certificate(&f, &same_owner));

        let mut wrong_member = good.clone();
        wrong_member.assignment[0].1 = MemberRef::new(1, 0);
        assert!(!verify_certificate(&f, &wrong_member));

        let mut missing_copy = good;
        missing_copy.assignment[2].1 = MemberRef::new(2, 1);
        assert!(!verify_certificate(&f, &missing_copy));
    }

    #[test]
    fn shared_edges() {
        assert_eq!(
            shared_edge_count(&family(3, &[[0, 1, 2]]), MemberRef::new(0, 0)),
            0
        );
        let ts = t_star(8).unwrap();
        for r in ts.copies() {
            assert_eq!(shared_edge_count(&ts, r), 1);
        }
        let f = family(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3]]);
        assert_eq!(shared_edge_count(&f, MemberRef::new(0, 0)), 2);
        let fig5 = crate::constructions::fig5();
        for r in fig5.copies() {
            assert_eq!(shared_edge_count(&fig5, r), 0);
        }
    }
}
