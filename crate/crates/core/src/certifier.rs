//! Instance-level replay of the counting argument behind the `n²/8` bound
//! and of the structural analysis of families attaining it.
//!
//! Every quantity the argument mentions is computed on the concrete family:
//! a maximum independent set `A` of the union graph and its complement `B`,
//! the assignment of each triangle to one of its edges inside `B`, the
//! per-vertex independent sets that bound the load on each vertex of `B`,
//! and the chain `2|T| <= |A||B| <= n²/4`. For families of size exactly
//! `n²/8` the colored multigraph on `B` is built and checked for the
//! matched-pairs shape.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::canon::are_isomorphic;
use crate::constructions::t_star;
use crate::family::{Edge, MemberRef, Mode, TriangleFamily, Vertex};
use crate::mis::{max_independent_set_with_limit, MisLimitExceeded, DEFAULT_MIS_LIMIT};
use crate::rainbow::{find_rainbow, rainbow_on, RainbowCertificate};
use crate::union_graph::UnionGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("family contains a rainbow triangle:\n{0}")]
    Rainbow(RainbowCertificate),
    #[error(transparent)]
    MisLimit(#[from] MisLimitExceeded),
    #[error("member {0:?} has no edge inside B")]
    NoEdgeInB(MemberRef),
    #[error("member {0:?} does not have exactly two vertices in B")]
    NotSplit(MemberRef),
}

/// `A` is a maximum independent set of the union graph, `B` its complement,
/// `e_b` the union-graph edges with both ends in `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    pub a: Vec<Vertex>,
    pub b: Vec<Vertex>,
    pub e_b: Vec<Edge>,
    in_b: Vec<bool>,
}

impl Bipartition {
    pub fn maximum(g: &UnionGraph, mis_limit: usize) -> Result<Bipartition, MisLimitExceeded> {
        let a = max_independent_set_with_limit(g, mis_limit)?;
        Ok(Bipartition::from_a(g, a))
    }

    /// Takes `a` as given; callers are responsible for its maximality.
    pub fn from_a(g: &UnionGraph, a: Vec<Vertex>) -> Bipartition {
        let mut in_b = vec![true; g.n()];
        for &v in &a {
            in_b[v] = false;
        }
        let b = (0..g.n()).filter(|&v| in_b[v]).collect();
        let e_b = g.edges().filter(|e| in_b[e.u()] && in_b[e.v()]).collect();
        Bipartition { a, b, e_b, in_b }
    }

    pub fn in_b(&self, v: Vertex) -> bool {
        self.in_b[v]
    }

    pub fn edge_in_b(&self, e: Edge) -> bool {
        self.in_b[e.u()] && self.in_b[e.v()]
    }
}

/// One chosen `B`-edge per member copy and the resulting loads `d(e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaAssignment {
    pub beta: BTreeMap<MemberRef, Edge>,
    pub d: BTreeMap<Edge, usize>,
}

impl BetaAssignment {
    pub fn load(&self, e: Edge) -> usize {
        self.d.get(&e).copied().unwrap_or(0)
    }

    /// Member copies mapped to `e`, in copy order.
    pub fn preimage(&self, e: Edge) -> impl Iterator<Item = MemberRef> + '_ {
        self.beta
            .iter()
            .filter(move |(_, &x)| x == e)
            .map(|(&r, _)| r)
    }
}

pub fn build_beta(f: &TriangleFamily, p: &Bipartition) -> Result<BetaAssignment, CertifyError> {
    let g = UnionGraph::of(f);
    let mut beta = BTreeMap::new();
    let mut d = BTreeMap::new();
    for r in f.copies() {
        let t = f.triangle(r);
        let inside: Vec<Edge> = t.edges().into_iter().filter(|&e| p.edge_in_b(e)).collect();
        let mut inside_sorted = inside.clone();
        inside_sorted.sort_unstable();
        let chosen = match inside_sorted.as_slice() {
            [] => return Err(CertifyError::NoEdgeInB(r)),
            [only] => *only,
            all => all
                .iter()
                .copied()
                .find(|&e| g.owners(e).iter().any(|&o| o != r))
                .unwrap_or(all[0]),
        };
        beta.insert(r, chosen);
        *d.entry(chosen).or_insert(0) += 1;
    }
    Ok(BetaAssignment { beta, d })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eq1Check {
    pub holds: bool,
    pub lhs: usize,
    pub rhs: usize,
}

/// Double count of the loads over `B`, which must equal `2|T|`.
pub fn check_eq1(f: &TriangleFamily, p: &Bipartition, beta: &BetaAssignment) -> Eq1Check {
    let lhs: usize = p.b.iter().map(|&b| vertex_load(p, beta, b)).sum();
    let rhs = 2 * f.size();
    Eq1Check {
        holds: lhs == rhs,
        lhs,
        rhs,
    }
}

fn vertex_load(p: &Bipartition, beta: &BetaAssignment, b: Vertex) -> usize {
    p.e_b
        .iter()
        .filter(|e| e.contains(b))
        .map(|&e| beta.load(e))
        .sum()
}

/// Independent set certifying that the load on `b` is at most `|A|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependentWitness {
    pub b: Vertex,
    /// Picked vertex per contributing member copy, in pick order.
    pub contributors: Vec<(Vertex, MemberRef)>,
    /// `Σ d(e)` over `B`-edges at `b`.
    pub load: usize,
}

impl IndependentWitness {
    /// The picked vertices, ascending.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.contributors.iter().map(|&(x, _)| x).collect();
        v.sort_unstable();
        v
    }

    pub fn size(&self) -> usize {
        self.contributors.len()
    }
}

/// Why a witness could not be built. Either case means the input was not
/// rainbow-free or `A` was not maximum; `triple` is the triangle the
/// contradiction points at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessFailure {
    Repeated {
        b: Vertex,
        vertex: Vertex,
        members: [MemberRef; 2],
    },
    Adjacent {
        b: Vertex,
        triple: [Vertex; 3],
        certificate: Option<RainbowCertificate>,
    },
}

pub fn build_witness(
    f: &TriangleFamily,
    p: &Bipartition,
    beta: &BetaAssignment,
    b: Vertex,
) -> Result<IndependentWitness, WitnessFailure> {
    build_witness_in(&UnionGraph::of(f), f, p, beta, b)
}

fn build_witness_in(
    g: &UnionGraph,
    f: &TriangleFamily,
    p: &Bipartition,
    beta: &BetaAssignment,
    b: Vertex,
) -> Result<IndependentWitness, WitnessFailure> {
    let mut contributors: Vec<(Vertex, MemberRef)> = Vec::new();
    let mut load = 0;
    for &e in p.e_b.iter().filter(|e| e.contains(b)) {
        let d = beta.load(e);
        load += d;
        for r in beta.preimage(e) {
            let pick = if d == 1 {
                e.other(b).expect("b is an endpoint")
            } else {
                f.triangle(r)
                    .opposite(e)
                    .expect("beta edge lies in its triangle")
            };
            if let Some(&(_, prev)) = contributors.iter().find(|&&(v, _)| v == pick) {
                return Err(WitnessFailure::Repeated {
                    b,
                    vertex: pick,
                    members: [prev, r],
                });
            }
            contributors.push((pick, r));
        }
    }
    for (i, &(x, _)) in contributors.iter().enumerate() {
        for &(y, _) in &contributors[i + 1..] {
            if g.has_edge(x, y) {
                let mut triple = [b, x, y];
                triple.sort_unstable();
                let certificate = if triple[0] != triple[1] && triple[1] != triple[2] {
                    rainbow_on(g, triple[0], triple[1], triple[2])
                } else {
                    None
                };
                return Err(WitnessFailure::Adjacent {
                    b,
                    triple,
                    certificate,
                });
            }
        }
    }
    Ok(IndependentWitness {
        b,
        contributors,
        load,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eq2Entry {
    pub b: Vertex,
    pub load: usize,
    pub equality: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eq2Check {
    pub holds: bool,
    pub a_size: usize,
    pub per_b: Vec<Eq2Entry>,
}

/// The load on every vertex of `B` is at most `|A|`.
pub fn check_eq2(p: &Bipartition, beta: &BetaAssignment) -> Eq2Check {
    let a_size = p.a.len();
    let per_b: Vec<Eq2Entry> =
        p.b.iter()
            .map(|&b| {
                let load = vertex_load(p, beta, b);
                Eq2Entry {
                    b,
                    load,
                    equality: load == a_size,
                }
            })
            .collect();
    Eq2Check {
        holds: per_b.iter().all(|e| e.load <= a_size),
        a_size,
        per_b,
    }
}

/// `2|T| <= |A||B| <= n²/4` in exact arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCheck {
    pub holds: bool,
    pub twice_size: i64,
    pub product: i64,
    pub quarter_n_squared: Ratio<i64>,
    /// `|A||B| - 2|T|`
    pub first_slack: i64,
    /// `n²/4 - |A||B|`
    pub second_slack: Ratio<i64>,
    /// `|T| <= n²/8`, implied when both links hold.
    pub size_bound: bool,
}

pub fn check_master_chain(f: &TriangleFamily, p: &Bipartition) -> ChainCheck {
    let n = f.n() as i64;
    let twice_size = 2 * f.size() as i64;
    let product = (p.a.len() * p.b.len()) as i64;
    let quarter = Ratio::new(n * n, 4);
    let first_slack = product - twice_size;
    let second_slack = quarter - Ratio::from_integer(product);
    ChainCheck {
        holds: first_slack >= 0 && second_slack >= Ratio::from_integer(0),
        twice_size,
        product,
        quarter_n_squared: quarter,
        first_slack,
        second_slack,
        size_bound: Ratio::from_integer(f.size() as i64) <= Ratio::new(n * n, 8),
    }
}

/// First member copy with all three vertices in `B`.
pub fn step1_violation(f: &TriangleFamily, p: &Bipartition) -> Option<MemberRef> {
    f.copies()
        .find(|&r| f.triangle(r).vertices().iter().all(|&v| p.in_b(v)))
}

/// No member lies entirely inside `B`.
pub fn check_step1(f: &TriangleFamily, p: &Bipartition) -> bool {
    step1_violation(f, p).is_none()
}

/// Multigraph on `B`: one edge per member (its `B`-edge), colored by the
/// member's vertex in `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredMultigraph {
    pub vertices: Vec<Vertex>,
    pub palette: Vec<Vertex>,
    pub edges: Vec<(Edge, Vertex)>,
}

impl ColoredMultigraph {
    pub fn m(&self) -> usize {
        self.vertices.len()
    }

    fn parallel_count(&self, e: Edge) -> usize {
        self.edges.iter().filter(|(x, _)| *x == e).count()
    }

    fn is_simple(&self, e: Edge) -> bool {
        self.parallel_count(e) == 1
    }
}

pub fn build_tb(f: &TriangleFamily, p: &Bipartition) -> Result<ColoredMultigraph, CertifyError> {
    let mut edges = Vec::with_capacity(f.size());
    for r in f.copies() {
        let vs = f.triangle(r).vertices();
        let (inside, outside): (Vec<Vertex>, Vec<Vertex>) = vs.iter().partition(|&&v| p.in_b(v));
        match (inside.as_slice(), outside.as_slice()) {
            ([x, y], [a]) => edges.push((Edge::new(*x, *y), *a)),
            _ => return Err(CertifyError::NotSplit(r)),
        }
    }
    Ok(ColoredMultigraph {
        vertices: p.b.clone(),
        palette: p.a.clone(),
        edges,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TbProperties {
    pub triangle_free: bool,
    pub path_end_colors_differ: bool,
    pub same_color_edges_simple: bool,
    pub regular: bool,
}

impl TbProperties {
    pub fn all(&self) -> bool {
        self.triangle_free
            && self.path_end_colors_differ
            && self.same_color_edges_simple
            && self.regular
    }
}

pub fn check_tb_properties(g: &ColoredMultigraph) -> TbProperties {
    let simple: BTreeSet<Edge> = g.edges.iter().map(|&(e, _)| e).collect();
    let adjacent = |x: Vertex, y: Vertex| x != y && simple.contains(&Edge::new(x, y));

    let triangle_free = simple.iter().all(|e| {
        g.vertices
            .iter()
            .all(|&z| !(adjacent(e.u(), z) && adjacent(e.v(), z)))
    });

    let incident = |v: Vertex| g.edges.iter().filter(move |(e, _)| e.contains(v));
    let mut path_end_colors_differ = true;
    'paths: for &(mid, _) in &g.edges {
        for (x, y) in [(mid.u(), mid.v()), (mid.v(), mid.u())] {
            for &(first, c1) in incident(x) {
                let p = first.other(x).expect("incident");
                if p == y {
                    continue;
                }
                for &(last, c3) in incident(y) {
                    let q = last.other(y).expect("incident");
                    if q == x || q == p {
                        continue;
                    }
                    if c1 == c3 {
                        path_end_colors_differ = false;
                        break 'paths;
                    }
                }
            }
        }
    }

    let mut same_color_edges_simple = true;
    'pairs: for (i, &(e1, c1)) in g.edges.iter().enumerate() {
        for &(e2, c2) in &g.edges[i + 1..] {
            let share = e1.contains(e2.u()) || e1.contains(e2.v());
            if share && c1 == c2 && !(g.is_simple(e1) && g.is_simple(e2)) {
                same_color_edges_simple = false;
                break 'pairs;
            }
        }
    }

    let m = g.m();
    let regular = g.vertices.iter().all(|&v| incident(v).count() == m);

    TbProperties {
        triangle_free,
        path_end_colors_differ,
        same_color_edges_simple,
        regular,
    }
}

/// `B` splits into `m/2` pairs, every edge runs inside a pair, and each pair
/// carries exactly `m` edges using every color once.
pub fn check_matched_pairs(g: &ColoredMultigraph) -> bool {
    let m = g.m();
    if m == 0 {
        return g.edges.is_empty();
    }
    if !m.is_multiple_of(2) || g.palette.len() != m {
        return false;
    }
    let mut partner: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for &(e, _) in &g.edges {
        for (x, y) in [(e.u(), e.v()), (e.v(), e.u())] {
            if *partner.entry(x).or_insert(y) != y {
                return false;
            }
        }
    }
    if partner.len() != m {
        return false;
    }
    let palette: BTreeSet<Vertex> = g.palette.iter().copied().collect();
    let mut by_pair: BTreeMap<Edge, Vec<Vertex>> = BTreeMap::new();
    for &(e, c) in &g.edges {
        by_pair.entry(e).or_default().push(c);
    }
    by_pair.len() == m / 2
        && by_pair.values().all(|colors| {
            let distinct: BTreeSet<Vertex> = colors.iter().copied().collect();
            colors.len() == m && distinct == palette
        })
}

/// Structure checks that apply only to families of size exactly `n²/8`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalAnalysis {
    pub tb: Option<ColoredMultigraph>,
    pub tb_properties: Option<TbProperties>,
    pub matched_pairs: bool,
    pub is_tstar: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifierReport {
    pub n: usize,
    pub mode: Mode,
    /// Size of the input counted with multiplicity.
    pub input_size: usize,
    /// The set-mode family the argument runs on (the support in multiset mode).
    pub analyzed: TriangleFamily,
    pub partition: Bipartition,
    pub beta: BetaAssignment,
    pub eq1: Eq1Check,
    pub witnesses: Vec<IndependentWitness>,
    pub witness_failures: Vec<WitnessFailure>,
    pub eq2: Eq2Check,
    pub chain: ChainCheck,
    pub step1_no_triangle_in_b: bool,
    pub extremal: Option<ExtremalAnalysis>,
}

impl CertifierReport {
    pub fn is_extremal(&self) -> bool {
        self.extremal.is_some()
    }

    /// Every witness has the claimed size and is independent in the union graph.
    pub fn witnesses_sound(&self) -> bool {
        let g = UnionGraph::of(&self.analyzed);
        self.witness_failures.is_empty()
            && self.witnesses.len() == self.partition.b.len()
            && self.witnesses.iter().all(|w| {
                let vs = w.vertices();
                let mut dedup = vs.clone();
                dedup.dedup();
                dedup.len() == w.load && g.is_independent(&vs) && w.size() <= self.partition.a.len()
            })
    }

    /// All checks that apply to this input pass.
    pub fn passed(&self) -> bool {
        let base = self.eq1.holds && self.eq2.holds && self.chain.holds && self.witnesses_sound();
        match &self.extremal {
            None => base,
            Some(x) => {
                base && self.step1_no_triangle_in_b
                    && x.tb_properties.is_some_and(|p| p.all())
                    && x.matched_pairs
                    && x.is_tstar
            }
        }
    }

    /// Stable `(key, value)` listing used by both output formats.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        let verdict = |b: bool| if b { "pass" } else { "fail" }.to_string();
        let flag = |b: bool| b.to_string();
        let list = |vs: &[Vertex]| join(vs.iter().map(|v| v.to_string()));
        let mut out = vec![
            ("n", self.n.to_string()),
            ("mode", self.mode.to_string()),
            ("size", self.input_size.to_string()),
            ("analyzed_size", self.analyzed.size().to_string()),
            ("a_size", self.partition.a.len().to_string()),
            ("b_size", self.partition.b.len().to_string()),
            ("a", list(&self.partition.a)),
            ("b", list(&self.partition.b)),
            (
                "e_b",
                join(
                    self.partition
                        .e_b
                        .iter()
                        .map(|e| format!("{}-{}", e.u(), e.v())),
                ),
            ),
            (
                "d",
                join(
                    self.beta
                        .d
                        .iter()
                        .map(|(e, d)| format!("{}-{}:{}", e.u(), e.v(), d)),
                ),
            ),
            ("eq1", verdict(self.eq1.holds)),
            ("eq1_lhs", self.eq1.lhs.to_string()),
            ("eq1_rhs", self.eq1.rhs.to_string()),
            ("eq2", verdict(self.eq2.holds)),
            (
                "eq2_loads",
                join(self.eq2.per_b.iter().map(|e| format!("{}:{}", e.b, e.load))),
            ),
            (
                "eq2_equalities",
                self.eq2
                    .per_b
                    .iter()
                    .filter(|e| e.equality)
                    .count()
                    .to_string(),
            ),
            ("witnesses", verdict(self.witnesses_sound())),
            (
                "witness_sizes",
                join(
                    self.witnesses
                        .iter()
                        .map(|w| format!("{}:{}", w.b, w.size())),
                ),
            ),
            ("chain", verdict(self.chain.holds)),
            ("chain_2t", self.chain.twice_size.to_string()),
            ("chain_ab", self.chain.product.to_string()),
            ("chain_n2_over_4", self.chain.quarter_n_squared.to_string()),
            ("chain_slack_1", self.chain.first_slack.to_string()),
            ("chain_slack_2", self.chain.second_slack.to_string()),
            ("size_bound", verdict(self.chain.size_bound)),
            ("extremal", flag(self.is_extremal())),
            ("step1", flag(self.step1_no_triangle_in_b)),
        ];
        let na = || "n/a".to_string();
        match &self.extremal {
            Some(x) => {
                let props = x.tb_properties;
                let prop =
                    |get: fn(&TbProperties) -> bool| props.map_or_else(na, |p| flag(get(&p)));
                out.push(("tb_triangle_free", prop(|p| p.triangle_free)));
                out.push(("tb_path_colors", prop(|p| p.path_end_colors_differ)));
                out.push(("tb_same_color_simple", prop(|p| p.same_color_edges_simple)));
                out.push(("tb_regular", prop(|p| p.regular)));
                out.push(("matched_pairs", flag(x.matched_pairs)));
                out.push(("is_tstar", flag(x.is_tstar)));
            }
            None => {
                for key in [
                    "tb_triangle_free",
                    "tb_path_colors",
                    "tb_same_color_simple",
                    "tb_regular",
                    "matched_pairs",
                    "is_tstar",
                ] {
                    out.push((key, na()));
                }
            }
        }
        out.push(("result", verdict(self.passed())));
        out
    }

    pub fn render(&self, porcelain: bool) -> String {
        let mut s = String::new();
        for (k, v) in self.fields() {
            if porcelain {
                let _ = writeln!(s, "{k}={v}");
            } else {
                let _ = writeln!(s, "{k} {v}");
            }
        }
        s
    }
}

fn join<I: Iterator<Item = String>>(items: I) -> String {
    let v: Vec<String> = items.collect();
    if v.is_empty() {
        "-".to_string()
    } else {
        v.join(" ")
    }
}

pub fn certify(f: &TriangleFamily) -> Result<CertifierReport, CertifyError> {
    certify_with_limit(f, DEFAULT_MIS_LIMIT)
}

pub fn certify_with_limit(
    f: &TriangleFamily,
    mis_limit: usize,
) -> Result<CertifierReport, CertifyError> {
    if let Some(cert) = find_rainbow(f) {
        return Err(CertifyError::Rainbow(cert));
    }
    let analyzed = f.support();
    let g = UnionGraph::of(&analyzed);
    let partition = Bipartition::maximum(&g, mis_limit)?;
    let beta = build_beta(&analyzed, &partition)?;
    let eq1 = check_eq1(&analyzed, &partition, &beta);

    let results: Vec<Result<IndependentWitness, WitnessFailure>> = partition
        .b
        .par_iter()
        .map(|&b| build_witness_in(&g, &analyzed, &partition, &beta, b))
        .collect();
    let (mut witnesses, mut witness_failures) = (Vec::new(), Vec::new());
    for r in results {
        match r {
            Ok(w) => witnesses.push(w),
            Err(e) => witness_failures.push(e),
        }
    }

    let eq2 = check_eq2(&partition, &beta);
    let chain = check_master_chain(&analyzed, &partition);
    let step1 = check_step1(&analyzed, &partition);

    let n = analyzed.n();
    let extremal = (8 * analyzed.size() == n * n).then(|| {
        let tb = build_tb(&analyzed, &partition).ok();
        let tb_properties = tb.as_ref().map(check_tb_properties);
        let matched_pairs = tb.as_ref().is_some_and(check_matched_pairs);
        let is_tstar = t_star(n).is_ok_and(|ts| are_isomorphic(&analyzed, &ts));
        ExtremalAnalysis {
            tb,
            tb_properties,
            matched_pairs,
            is_tstar,
        }
    });

    Ok(CertifierReport {
        n,
        mode: f.mode(),
        input_size: f.size(),
        analyzed,
        partition,
        beta,
        eq1,
        witnesses,
        witness_failures,
        eq2,
        chain,
        step1_no_triangle_in_b: step1,
        extremal,
    })
}
