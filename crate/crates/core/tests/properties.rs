mod common;

use proptest::prelude::*;

use rainbow_core::canon::{are_isomorphic, canonical_form};
use rainbow_core::constructions::all_triangles;
use rainbow_core::rainbow::shared_edge_count;
use rainbow_core::rs::{check_t2_constraints, decompose, unique_triangle_property};
use rainbow_core::{find_rainbow, is_rainbow_free, Edge, Mode, TriangleFamily, UnionGraph};

fn family(max_n: usize, max_members: usize) -> impl Strategy<Value = TriangleFamily> {
    (3..=max_n, any::<bool>()).prop_flat_map(move |(n, multiset)| {
        let pool = all_triangles(n);
        let len = pool.len();
        let mode = if multiset { Mode::Multiset } else { Mode::Set };
        proptest::collection::btree_map(0..len, 1..=mode.max_multiplicity(), 0..=max_members)
            .prop_map(move |picks| {
                TriangleFamily::from_members(n, mode, picks.into_iter().map(|(i, m)| (pool[i], m)))
                    .unwrap()
            })
    })
}

/// Keeps only members that leave the family rainbow-free, in order.
fn rainbow_free_part(f: &TriangleFamily) -> TriangleFamily {
    let mut out = TriangleFamily::new(f.n(), f.mode()).unwrap();
    for m in f.members() {
        for _ in 0..m.multiplicity {
            if let Ok(g) = out.with_added(m.triangle) {
                if is_rainbow_free(&g) {
                    out = g;
                }
            }
        }
    }
    out
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn trifam_round_trip(f in family(12, 20)) {
        let text = f.to_trifam();
        prop_assert_eq!(TriangleFamily::parse_trifam(&text).unwrap(), f.normalized());
    }

    #[test]
    fn canonical_form_ignores_labels((f, p) in family(9, 12).prop_flat_map(|f| {
        let n = f.n();
        (Just(f), permutation(n))
    })) {
        let g = f.relabel(&p);
        prop_assert_eq!(canonical_form(&f), canonical_form(&g));
        prop_assert!(are_isomorphic(&f, &g));
    }

    #[test]
    fn rainbow_freeness_is_hereditary(f in family(8, 10)) {
        let free = rainbow_free_part(&f);
        for r in free.copies() {
            prop_assert!(is_rainbow_free(&free.without_copy(r)));
        }
        if find_rainbow(&f).is_some() {
            for t in all_triangles(f.n()) {
                if let Ok(g) = f.with_added(t) {
                    prop_assert!(find_rainbow(&g).is_some());
                }
            }
        }
    }

    #[test]
    fn members_share_at_most_one_edge(f in family(9, 16)) {
        let free = rainbow_free_part(&f);
        for r in free.copies() {
            prop_assert!(shared_edge_count(&free, r) <= 1);
        }
    }

    #[test]
    fn decomposition_consequences(f in family(9, 16)) {
        let free = rainbow_free_part(&f);
        let d = decompose(&free).unwrap();
        prop_assert_eq!(d.total(), free.size());
        prop_assert_eq!(d.g2.edge_count(), 3 * d.t2.size());
        let check = check_t2_constraints(&d, &free);
        prop_assert!(check.holds(), "{:?}", check.violations);
        prop_assert!(!check.contradicts_original);
        prop_assert!(unique_triangle_property(&d.g2).is_ok());
        for m in d.t2.members() {
            prop_assert!(d.t1.contains_triangle(m.triangle));
        }
    }

    #[test]
    fn unique_triangle_matches_enumeration(
        n in 3usize..=12,
        bits in proptest::collection::vec(any::<bool>(), 66),
    ) {
        let mut edges = Vec::new();
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                if bits[k % bits.len()] {
                    edges.push(Edge::new(a, b));
                }
                k += 1;
            }
        }
        let g = UnionGraph::from_edges(n, edges.iter().copied());
        let tris = common::graph_triangles(n, &|a, b| g.has_edge(a, b));
        let expected = edges
            .iter()
            .all(|e| tris.iter().filter(|t| t.contains(&e.u()) && t.contains(&e.v())).count() == 1);
        prop_assert_eq!(unique_triangle_property(&g).is_ok(), expected);
    }
}
