//! Multiset decomposition into the distinct support and the doubled part,
//! and the unique-triangle checks on the doubled part's graph.

use std::fmt::Write as _;

use num_rational::Ratio;
use thiserror::Error;

use crate::family::{Edge, Member, Mode, Triangle, TriangleFamily};
use crate::rainbow::is_rainbow_free;
use crate::union_graph::UnionGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("multiplicity {multiplicity} of {triangle} exceeds 2")]
    Multiplicity {
        triangle: Triangle,
        multiplicity: u8,
    },
}

/// `t1` holds one copy of every triangle, `t2` those appearing twice, and
/// `g2` is the union graph of `t2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultisetDecomposition {
    pub t1: TriangleFamily,
    pub t2: TriangleFamily,
    pub g2: UnionGraph,
}

impl MultisetDecomposition {
    pub fn total(&self) -> usize {
        self.t1.size() + self.t2.size()
    }
}

pub fn decompose(f: &TriangleFamily) -> Result<MultisetDecomposition, DecomposeError> {
    if let Some(m) = f.members().iter().find(|m| m.multiplicity > 2) {
        return Err(DecomposeError::Multiplicity {
            triangle: m.triangle,
            multiplicity: m.multiplicity,
        });
    }
    let support = f.support();
    let doubled = TriangleFamily::from_members(
        f.n(),
        Mode::Set,
        f.members()
            .iter()
            .filter(|m| m.multiplicity == 2)
            .map(|m: &Member| (m.triangle, 1)),
    )
    .expect("subset of a valid family");
    let g2 = UnionGraph::of(&doubled);
    Ok(MultisetDecomposition {
        t1: support,
        t2: doubled,
        g2,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DoubledViolation {
    /// Two doubled triangles share an edge.
    SharedEdge {
        edge: Edge,
        triangles: [Triangle; 2],
    },
    /// The doubled part's graph has a triangle that is not a doubled member.
    ExtraTriangle(Triangle),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubledCheck {
    pub edge_disjoint: bool,
    pub no_extra_triangles: bool,
    pub violations: Vec<DoubledViolation>,
    pub contradicts_original: bool,
}

impl DoubledCheck {
    pub fn holds(&self) -> bool {
        self.edge_disjoint && self.no_extra_triangles
    }
}

/// Doubled members are pairwise edge-disjoint and their graph has no other
/// triangle. Both are forced when the original family is rainbow-free, so
/// `contradicts_original` flags a failure on a rainbow-free input.
pub fn check_t2_constraints(d: &MultisetDecomposition, original: &TriangleFamily) -> DoubledCheck {
    let mut check = check_doubled_constraints(d);
    check.contradicts_original = !check.holds() && is_rainbow_free(original);
    check
}

pub fn check_doubled_constraints(d: &MultisetDecomposition) -> DoubledCheck {
    let mut violations = Vec::new();
    for e in d.g2.edges() {
        let owners = d.g2.owners(e);
        if owners.len() > 1 {
            violations.push(DoubledViolation::SharedEdge {
                edge: e,
                triangles: [d.t2.triangle(owners[0]), d.t2.triangle(owners[1])],
            });
        }
    }
    let edge_disjoint = violations.is_empty();
    for t in d.g2.triangles() {
        if !d.t2.contains_triangle(t) {
            violations.push(DoubledViolation::ExtraTriangle(t));
        }
    }
    let no_extra_triangles = !violations
        .iter()
        .any(|v| matches!(v, DoubledViolation::ExtraTriangle(_)));
    DoubledCheck {
        edge_disjoint,
        no_extra_triangles,
        violations,
        contradicts_original: false,
    }
}

/// Whether every edge of `g` lies in exactly one triangle of `g`; on failure
/// the first offending edge and its triangle count.
pub fn unique_triangle_property(g: &UnionGraph) -> Result<(), (Edge, usize)> {
    for e in g.edges() {
        let count = g
            .neighbors(e.u())
            .iter()
            .filter(|&&w| w != e.v() && g.has_edge(e.v(), w))
            .count();
        if count != 1 {
            return Err((e, count));
        }
    }
    Ok(())
}

/// Text summary of the two-part bound. The sub-quadratic term on the doubled
/// part is asymptotic and reported without a verdict.
pub fn bound_report(d: &MultisetDecomposition) -> String {
    let n = d.t1.n() as i64;
    let bound = Ratio::new(n * n, 8);
    let t1 = d.t1.size() as i64;
    let t2 = d.t2.size();
    let edges = d.g2.edge_count();
    let mut s = String::new();
    let _ = writeln!(s, "n {n}");
    let _ = writeln!(
        s,
        "t1 {t1} <= {bound} {}",
        if Ratio::from_integer(t1) <= bound {
            "pass"
        } else {
            "fail"
        }
    );
    let _ = writeln!(
        s,
        "t2 {t2} g2_edges {edges} = 3*t2 {}",
        if edges == 3 * t2 { "pass" } else { "fail" }
    );
    let check = check_doubled_constraints(d);
    let _ = writeln!(s, "t2_edge_disjoint {}", check.edge_disjoint);
    let _ = writeln!(s, "g2_no_extra_triangles {}", check.no_extra_triangles);
    let _ = writeln!(
        s,
        "g2_unique_triangle {}",
        unique_triangle_property(&d.g2).is_ok()
    );
    let _ = writeln!(s, "total {} = t1 + t2", d.total());
    let _ = writeln!(
        s,
        "t2_subquadratic informational (asymptotic, not checkable at fixed n)"
    );
    s
}
