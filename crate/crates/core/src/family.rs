//! Triangle families and the TRIFAM v1 text format.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Vertices are dense 0-based indices into `[0, n)`.
pub type Vertex = usize;

/// An unordered vertex pair, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    u: Vertex,
    v: Vertex,
}

impl Edge {
    /// Normalizes the pair. Panics on a loop.
    pub fn new(a: Vertex, b: Vertex) -> Self {
        assert_ne!(a, b, "edge endpoints must differ");
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn u(&self) -> Vertex {
        self.u
    }

    pub fn v(&self) -> Vertex {
        self.v
    }

    pub fn contains(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`, if `x` is an endpoint.
    pub fn other(&self, x: Vertex) -> Option<Vertex> {
        if x == self.u {
            Some(self.v)
        } else if x == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.u, self.v)
    }
}

/// A vertex triple stored in ascending order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle([Vertex; 3]);

impl Triangle {
    /// Sorts the three vertices; fails if any two coincide.
    pub fn new(a: Vertex, b: Vertex, c: Vertex) -> Result<Self, FamilyError> {
        let mut v = [a, b, c];
        v.sort_unstable();
        if v[0] == v[1] || v[1] == v[2] {
            return Err(FamilyError::RepeatedVertex(a, b, c));
        }
        Ok(Triangle(v))
    }

    pub fn vertices(&self) -> [Vertex; 3] {
        self.0
    }

    /// Edges in the order `ab`, `bc`, `ac`.
    pub fn edges(&self) -> [Edge; 3] {
        let [a, b, c] = self.0;
        [
            Edge { u: a, v: b },
            Edge { u: b, v: c },
            Edge { u: a, v: c },
        ]
    }

    pub fn contains_vertex(&self, x: Vertex) -> bool {
        self.0.contains(&x)
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.contains_vertex(e.u) && self.contains_vertex(e.v)
    }

    /// The vertex of the triangle outside `e`, when `e` is one of its edges.
    pub fn opposite(&self, e: Edge) -> Option<Vertex> {
        if !self.contains_edge(e) {
            return None;
        }
        self.0.iter().copied().find(|&x| !e.contains(x))
    }

    /// Image under a vertex map.
    pub fn relabel(&self, perm: &[Vertex]) -> Triangle {
        let [a, b, c] = self.0;
        let mut v = [perm[a], perm[b], perm[c]];
        v.sort_unstable();
        Triangle(v)
    }
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Set,
    Multiset,
}

impl Mode {
    pub fn max_multiplicity(self) -> u8 {
        match self {
            Mode::Set => 1,
            Mode::Multiset => 2,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Set => "set",
            Mode::Multiset => "multiset",
        })
    }
}

impl FromStr for Mode {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "set" => Ok(Mode::Set),
            "multiset" => Ok(Mode::Multiset),
            other => Err(FamilyError::UnknownMode(other.to_string())),
        }
    }
}

/// One copy of one member. Two copies of a doubled triangle are distinct colors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemberRef {
    pub index: usize,
    pub copy: u8,
}

impl MemberRef {
    pub fn new(index: usize, copy: u8) -> Self {
        MemberRef { index, copy }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Member {
    pub triangle: Triangle,
    pub multiplicity: u8,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("triangle ({0}, {1}, {2}) repeats a vertex")]
    RepeatedVertex(Vertex, Vertex, Vertex),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("triangle {0} listed twice")]
    DuplicateTriangle(Triangle),
    #[error("multiplicity {multiplicity} not allowed in {mode} mode")]
    BadMultiplicity { multiplicity: u32, mode: Mode },
    #[error("unknown mode {0:?}")]
    UnknownMode(String),
    #[error("vertex count must be at least 1")]
    Empty,
}

/// A set or multiset of triangles on `n` labeled vertices.
///
/// Member order is preserved as built; repetition is expressed through
/// `multiplicity`, never by listing a triangle twice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleFamily {
    n: usize,
    mode: Mode,
    members: Vec<Member>,
}

impl TriangleFamily {
    pub fn new(n: usize, mode: Mode) -> Result<Self, FamilyError> {
        if n == 0 {
            return Err(FamilyError::Empty);
        }
        Ok(TriangleFamily {
            n,
            mode,
            members: Vec::new(),
        })
    }

    /// Builds a family from `(triangle, multiplicity)` pairs, validating each.
    pub fn from_members<I>(n: usize, mode: Mode, members: I) -> Result<Self, FamilyError>
    where
        I: IntoIterator<Item = (Triangle, u8)>,
    {
        let mut f = TriangleFamily::new(n, mode)?;
        for (t, m) in members {
            f.push(t, m)?;
        }
        Ok(f)
    }

    /// Convenience constructor for families with every multiplicity 1.
    pub fn from_triples<I>(n: usize, mode: Mode, triples: I) -> Result<Self, FamilyError>
    where
        I: IntoIterator<Item = [Vertex; 3]>,
    {
        let mut f = TriangleFamily::new(n, mode)?;
        for [a, b, c] in triples {
            f.push(Triangle::new(a, b, c)?, 1)?;
        }
        Ok(f)
    }

    pub fn push(&mut self, t: Triangle, multiplicity: u8) -> Result<(), FamilyError> {
        if let Some(&v) = t.vertices().iter().find(|&&v| v >= self.n) {
            return Err(FamilyError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            });
        }
        if multiplicity == 0 || multiplicity > self.mode.max_multiplicity() {
            return Err(FamilyError::BadMultiplicity {
                multiplicity: multiplicity as u32,
                mode: self.mode,
            });
        }
        if self.members.iter().any(|m| m.triangle == t) {
            return Err(FamilyError::DuplicateTriangle(t));
        }
        self.members.push(Member {
            triangle: t,
            multiplicity,
        });
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    /// Number of triangles counted with multiplicity.
    pub fn size(&self) -> usize {
        self.members.iter().map(|m| m.multiplicity as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Every member copy, in member order.
    pub fn copies(&self) -> impl Iterator<Item = MemberRef> + '_ {
        self.members
            .iter()
            .enumerate()
            .flat_map(|(i, m)| (0..m.multiplicity).map(move |c| MemberRef::new(i, c)))
    }

    pub fn triangle(&self, r: MemberRef) -> Triangle {
        self.members[r.index].triangle
    }

    pub fn contains_triangle(&self, t: Triangle) -> bool {
        self.members.iter().any(|m| m.triangle == t)
    }

    /// Members sorted lexicographically by triple.
    pub fn normalized(&self) -> TriangleFamily {
        let mut members = self.members.clone();
        members.sort_by_key(|m| m.triangle);
        TriangleFamily {
            n: self.n,
            mode: self.mode,
            members,
        }
    }

    /// Distinct support as a set-mode family, member order kept.
    pub fn support(&self) -> TriangleFamily {
        TriangleFamily {
            n: self.n,
            mode: Mode::Set,
            members: self
                .members
                .iter()
                .map(|m| Member {
                    triangle: m.triangle,
                    multiplicity: 1,
                })
                .collect(),
        }
    }

    /// Image under the vertex map `perm` (`perm[old] = new`), normalized.
    pub fn relabel(&self, perm: &[Vertex]) -> TriangleFamily {
        assert_eq!(perm.len(), self.n, "permutation length must equal n");
        let mut members: Vec<Member> = self
            .members
            .iter()
            .map(|m| Member {
                triangle: m.triangle.relabel(perm),
                multiplicity: m.multiplicity,
            })
            .collect();
        members.sort_by_key(|m| m.triangle);
        TriangleFamily {
            n: self.n,
            mode: self.mode,
            members,
        }
    }

    /// Same triangles with every copy listed, minus the member copy `r`.
    pub fn without_copy(&self, r: MemberRef) -> TriangleFamily {
        let mut out = self.clone();
        if out.members[r.index].multiplicity > 1 {
            out.members[r.index].multiplicity -= 1;
        } else {
            out.members.remove(r.index);
        }
        out
    }

    /// Adds one copy of `t`, bumping the multiplicity if already present.
    pub fn with_added(&self, t: Triangle) -> Result<TriangleFamily, FamilyError> {
        let mut out = self.clone();
        if let Some(m) = out.members.iter_mut().find(|m| m.triangle == t) {
            let next = m.multiplicity + 1;
            if next > out.mode.max_multiplicity() {
                return Err(FamilyError::BadMultiplicity {
                    multiplicity: next as u32,
                    mode: out.mode,
                });
            }
            m.multiplicity = next;
        } else {
            out.push(t, 1)?;
        }
        Ok(out)
    }

    /// Serializes to normalized TRIFAM v1 text.
    pub fn to_trifam(&self) -> String {
        let mut out = format!("trifam 1\nmode {}\nn {}\n", self.mode, self.n);
        for m in self.normalized().members {
            out.push_str(&m.triangle.to_string());
            if m.multiplicity == 2 {
                out.push_str(" x2");
            }
            out.push('\n');
        }
        out
    }

    /// Parses TRIFAM v1 text, preserving member order.
    pub fn parse_trifam(text: &str) -> Result<TriangleFamily, ParseError> {
        let mut lines = text
            .split('\n')
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let header = |lines: &mut dyn Iterator<Item = (usize, &str)>, key: &str| {
            let (no, line) = lines.next().ok_or(ParseError {
                line: 0,
                kind: ParseErrorKind::MissingHeader(key.to_string()),
            })?;
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(k), Some(v), None) if k == key => Ok((no, v.to_string())),
                _ => Err(ParseError {
                    line: no,
                    kind: ParseErrorKind::MalformedHeader(line.to_string()),
                }),
            }
        };

        let (no, version) = header(&mut lines, "trifam")?;
        if version != "1" {
            return Err(ParseError {
                line: no,
                kind: ParseErrorKind::UnsupportedVersion(version),
            });
        }
        let (no, mode) = header(&mut lines, "mode")?;
        let mode: Mode = mode.parse().map_err(|e| ParseError {
            line: no,
            kind: ParseErrorKind::Family(e),
        })?;
        let (no, n) = header(&mut lines, "n")?;
        let n: usize = n.parse().map_err(|_| ParseError {
            line: no,
            kind: ParseErrorKind::MalformedHeader(format!("n {n}")),
        })?;
        let mut family = TriangleFamily::new(n, mode).map_err(|e| ParseError {
            line: no,
            kind: ParseErrorKind::Family(e),
        })?;

        let mut seen = HashSet::new();
        for (no, line) in lines {
            let err = |kind| ParseError { line: no, kind };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let (verts, mult) = match fields.as_slice() {
                [a, b, c] => ([*a, *b, *c], 1u32),
                [a, b, c, m] => {
                    let k = m
                        .strip_prefix('x')
                        .and_then(|k| k.parse::<u32>().ok())
                        .ok_or_else(|| err(ParseErrorKind::MalformedLine(line.to_string())))?;
                    ([*a, *b, *c], k)
                }
                _ => return Err(err(ParseErrorKind::MalformedLine(line.to_string()))),
            };
            let mut v = [0usize; 3];
            for (slot, s) in v.iter_mut().zip(verts) {
                *slot = s
                    .parse()
                    .map_err(|_| err(ParseErrorKind::MalformedLine(line.to_string())))?;
            }
            let t = Triangle::new(v[0], v[1], v[2]).map_err(|e| err(ParseErrorKind::Family(e)))?;
            if t.vertices() != v {
                return Err(err(ParseErrorKind::NotAscending(line.to_string())));
            }
            if !seen.insert(t) {
                return Err(err(ParseErrorKind::Family(FamilyError::DuplicateTriangle(
                    t,
                ))));
            }
            if mult == 0 || mult > mode.max_multiplicity() as u32 {
                return Err(err(ParseErrorKind::Family(FamilyError::BadMultiplicity {
                    multiplicity: mult,
                    mode,
                })));
            }
            family
                .push(t, mult as u8)
                .map_err(|e| err(ParseErrorKind::Family(e)))?;
        }
        Ok(family)
    }
}

impl fmt::Display for TriangleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_trifam())
    }
}

impl FromStr for TriangleFamily {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TriangleFamily::parse_trifam(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing `{0}` header")]
    MissingHeader(String),
    #[error("malformed header {0:?}")]
    MalformedHeader(String),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(String),
    #[error("malformed triangle line {0:?}")]
    MalformedLine(String),
    #[error("vertices not ascending in {0:?}")]
    NotAscending(String),
    #[error(transparent)]
    Family(FamilyError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_set_family() {
        let f: TriangleFamily = "trifam 1\nmode set\nn 4\n0 1 2\n0 1 3\n".parse().unwrap();
        assert_eq!(f.n(), 4);
        assert_eq!(f.mode(), Mode::Set);
        assert_eq!(f.size(), 2);
        assert_eq!(f.members()[1].triangle, Triangle::new(0, 1, 3).unwrap());
    }

    #[test]
    fn parses_multiplicity_suffix() {
        let f: TriangleFamily = "trifam 1\nmode multiset\nn 3\n0 1 2 x2\n".parse().unwrap();
        assert_eq!(f.members().len(), 1);
        assert_eq!(f.members()[0].multiplicity, 2);
        assert_eq!(f.size(), 2);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let f: TriangleFamily = "# header comment\ntrifam 1\n\nmode set\nn 5\n# body\n\n2 3 4\n"
            .parse()
            .unwrap();
        assert_eq!(f.size(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            "trifam 1\nmode set\nn 3\n0 1 1\n",
            "trifam 2\nmode set\nn 3\n",
            "trifam 1\nmode bag\nn 3\n",
            "trifam 1\nmode set\n",
            "trifam 1\nmode set\nn 0\n",
            "trifam 1\nmode set\nn 3\n0 1 3\n",
            "trifam 1\nmode set\nn 4\n0 1 2\n0 1 2\n",
            "trifam 1\nmode set\nn 3\n0 1 2 x2\n",
            "trifam 1\nmode multiset\nn 3\n0 1 2 x3\n",
            "trifam 1\nmode multiset\nn 3\n0 1 2 x0\n",
            "trifam 1\nmode set\nn 3\n2 1 0\n",
            "trifam 1\nmode set\nn 3\n0 1\n",
            "hello world\n",
        ];
        for c in cases {
            assert!(TriangleFamily::parse_trifam(c).is_err(), "accepted {c:?}");
        }
    }

    #[test]
    fn serialization_sorts_members() {
        let f = TriangleFamily::from_triples(4, Mode::Set, [[0, 1, 3], [0, 1, 2]]).unwrap();
        assert_eq!(f.to_trifam(), "trifam 1\nmode set\nn 4\n0 1 2\n0 1 3\n");
    }

    #[test]
    fn empty_family_serializes_to_header() {
        let f = TriangleFamily::new(5, Mode::Set).unwrap();
        assert_eq!(f.to_trifam(), "trifam 1\nmode set\nn 5\n");
        assert_eq!(TriangleFamily::parse_trifam(&f.to_trifam()).unwrap(), f);
    }

    #[test]
    fn triangle_geometry() {
        let t = Triangle::new(4, 1, 7).unwrap();
        assert_eq!(t.vertices(), [1, 4, 7]);
        assert_eq!(t.opposite(Edge::new(7, 1)), Some(4));
        assert_eq!(t.opposite(Edge::new(1, 2)), None);
        assert_eq!(Edge::new(3, 1).other(1), Some(3));
    }

    #[test]
    fn copies_enumerate_multiplicities() {
        let f = TriangleFamily::from_members(
            6,
            Mode::Multiset,
            [
                (Triangle::new(0, 1, 2).unwrap(), 2),
                (Triangle::new(3, 4, 5).unwrap(), 1),
            ],
        )
        .unwrap();
        let copies: Vec<_> = f.copies().collect();
        assert_eq!(
            copies,
            vec![
                MemberRef::new(0, 0),
                MemberRef::new(0, 1),
                MemberRef::new(1, 0)
            ]
        );
        assert_eq!(f.without_copy(MemberRef::new(0, 1)).size(), 2);
        assert!(f.with_added(Triangle::new(0, 1, 2).unwrap()).is_err());
    }
}
