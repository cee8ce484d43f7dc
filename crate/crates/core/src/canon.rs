//! Canonical labeling of triangle families.
//!
//! Vertices are first split into cells by an iterated degree/multiplicity
//! refinement. The canonical labeling is then the cell-respecting labeling
//! whose image is least, where the image is read one block per label: the
//! block for label `k` holds the triangles whose largest label is `k`.
//! Comparing block by block lets the backtracking prune a labeling as soon
//! as one block exceeds the best image found so far.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::family::{Mode, TriangleFamily, Vertex};

/// Relabel-invariant encoding of a family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Triangle of the image whose largest label is implicit: `(middle, low, multiplicity)`.
type BlockEntry = (u32, u32, u8);

struct Incidence {
    /// Per vertex: the other two vertices and the multiplicity of each member through it.
    around: Vec<Vec<(Vertex, Vertex, u8)>>,
}

impl Incidence {
    fn new(f: &TriangleFamily) -> Self {
        let mut around = vec![Vec::new(); f.n()];
        for m in f.members() {
            let [a, b, c] = m.triangle.vertices();
            around[a].push((b, c, m.multiplicity));
            around[b].push((a, c, m.multiplicity));
            around[c].push((a, b, m.multiplicity));
        }
        Incidence { around }
    }
}

/// Iterated color refinement; returns a color per vertex where equal colors
/// mark candidates for the same label range and isolated vertices sort last.
fn refine(f: &TriangleFamily, inc: &Incidence) -> Vec<usize> {
    let n = f.n();
    let initial: Vec<(bool, usize, usize)> = (0..n)
        .map(|v| {
            let weighted: usize = inc.around[v].iter().map(|&(_, _, m)| m as usize).sum();
            (inc.around[v].is_empty(), weighted, inc.around[v].len())
        })
        .collect();
    let mut colors = rank(&initial);
    loop {
        let signatures: Vec<(usize, Vec<(u8, usize, usize)>)> = (0..n)
            .map(|v| {
                let mut sig: Vec<(u8, usize, usize)> = inc.around[v]
                    .iter()
                    .map(|&(x, y, m)| {
                        let (cx, cy) = (colors[x], colors[y]);
                        (m, cx.min(cy), cx.max(cy))
                    })
                    .collect();
                sig.sort_unstable();
                (colors[v], sig)
            })
            .collect();
        let next = rank(&signatures);
        let before = colors.iter().max().map_or(0, |c| c + 1);
        let after = next.iter().max().map_or(0, |c| c + 1);
        colors = next;
        if after == before {
            return colors;
        }
    }
}

/// Dense ranks of the keys under their natural order.
fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

struct LabelSearch<'a> {
    inc: &'a Incidence,
    /// Vertices grouped by color, colors ascending.
    slots: Vec<Vec<Vertex>>,
    /// Color owning each label position.
    slot_color: Vec<usize>,
    /// First label of the isolated cell, or `n`.
    isolated_from: usize,
    label: Vec<Option<usize>>,
    order: Vec<Vertex>,
    blocks: Vec<Vec<BlockEntry>>,
    best: Option<(Vec<Vec<BlockEntry>>, Vec<Vertex>)>,
    /// Automorphisms found from leaves tying the best image, as `old -> old` maps.
    automorphisms: Vec<Vec<Vertex>>,
    improvements: usize,
}

/// Returned by a subtree: keep going, or unwind to the node at this depth.
const CONTINUE: usize = usize::MAX;

impl<'a> LabelSearch<'a> {
    fn block_for(&self, v: Vertex, k: usize) -> Vec<BlockEntry> {
        let mut block: Vec<BlockEntry> = self.inc.around[v]
            .iter()
            .filter_map(|&(x, y, m)| {
                let (lx, ly) = (self.label[x]?, self.label[y]?);
                debug_assert!(lx < k && ly < k);
                Some((lx.max(ly) as u32, lx.min(ly) as u32, m))
            })
            .collect();
        block.sort_unstable();
        block
    }

    fn leaf(&mut self, tied: bool) -> usize {
        let mut order = self.order.clone();
        order.extend(
            self.slots
                .last()
                .into_iter()
                .flatten()
                .copied()
                .filter(|&v| self.label[v].is_none()),
        );
        match &self.best {
            Some((_, best_order)) if tied => {
                // Same image: `best_order[i] -> order[i]` is an automorphism.
                // Everything below the first point of divergence is its image
                // of a subtree already searched.
                let mut gamma = vec![0; order.len()];
                for (&from, &to) in best_order.iter().zip(&order) {
                    gamma[from] = to;
                }
                let diverge = best_order
                    .iter()
                    .zip(&order)
                    .position(|(a, b)| a != b)
                    .unwrap_or(order.len());
                self.automorphisms.push(gamma);
                diverge
            }
            _ => {
                self.improvements += 1;
                self.best = Some((self.blocks.clone(), order));
                CONTINUE
            }
        }
    }

    /// Orbit representative of each vertex under the stored automorphisms
    /// that fix the current prefix pointwise.
    fn stabilizer_orbits(&self) -> Vec<Vertex> {
        let n = self.label.len();
        let mut parent: Vec<Vertex> = (0..n).collect();
        fn find(parent: &mut [Vertex], mut x: Vertex) -> Vertex {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for gamma in &self.automorphisms {
            if self.order.iter().all(|&v| gamma[v] == v) {
                for (v, &w) in gamma.iter().enumerate() {
                    let (a, b) = (find(&mut parent, v), find(&mut parent, w));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }

    fn run(&mut self, k: usize, mut tied: bool) -> usize {
        if k == self.isolated_from {
            return self.leaf(tied);
        }
        let color = self.slot_color[k];
        let candidates: Vec<Vertex> = self.slots[color]
            .iter()
            .copied()
            .filter(|&v| self.label[v].is_none())
            .collect();
        let mut tried: Vec<Vertex> = Vec::new();
        let mut known = 0;
        let mut orbit: Vec<Vertex> = Vec::new();
        for v in candidates {
            if known != self.automorphisms.len() {
                orbit = self.stabilizer_orbits();
                known = self.automorphisms.len();
            }
            if !orbit.is_empty() && tried.iter().any(|&u| orbit[u] == orbit[v]) {
                continue;
            }
            tried.push(v);
            self.label[v] = Some(k);
            let block = self.block_for(v, k);
            let mut next_tied = tied;
            let proceed = match (&self.best, tied) {
                (Some((best, _)), true) => match block.cmp(&best[k]) {
                    Ordering::Less => {
                        next_tied = false;
                        true
                    }
                    Ordering::Equal => true,
                    Ordering::Greater => false,
                },
                _ => true,
            };
            let mut outcome = CONTINUE;
            if proceed {
                let improvements = self.improvements;
                self.blocks.push(block);
                self.order.push(v);
                outcome = self.run(k + 1, next_tied);
                // A new best below shares this prefix, so siblings compare against it.
                tied |= self.improvements != improvements;
                self.order.pop();
                self.blocks.pop();
            }
            self.label[v] = None;
            if outcome < k {
                return outcome;
            }
        }
        CONTINUE
    }
}

/// Vertex map `perm[old] = new` sending `f` to its canonical image.
pub fn canonical_labeling(f: &TriangleFamily) -> Vec<Vertex> {
    let n = f.n();
    let inc = Incidence::new(f);
    let colors = refine(f, &inc);
    let color_count = colors.iter().max().map_or(0, |c| c + 1);
    let mut slots = vec![Vec::new(); color_count];
    for (v, &c) in colors.iter().enumerate() {
        slots[c].push(v);
    }
    let mut slot_color = Vec::with_capacity(n);
    for (c, cell) in slots.iter().enumerate() {
        slot_color.extend(std::iter::repeat_n(c, cell.len()));
    }
    let isolated_from = match slots.last() {
        Some(cell) if inc.around[cell[0]].is_empty() => n - cell.len(),
        _ => n,
    };
    let mut search = LabelSearch {
        inc: &inc,
        slots,
        slot_color,
        isolated_from,
        label: vec![None; n],
        order: Vec::with_capacity(n),
        blocks: Vec::with_capacity(n),
        best: None,
        automorphisms: Vec::new(),
        improvements: 0,
    };
    // Tied against a missing best means "no comparison yet".
    search.run(0, true);
    let (_, order) = search.best.expect("at least one labeling");
    let mut perm = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    perm
}

/// The canonical representative of `f`'s isomorphism class, normalized.
pub fn canonical_family(f: &TriangleFamily) -> TriangleFamily {
    f.relabel(&canonical_labeling(f))
}

pub fn canonical_form(f: &TriangleFamily) -> CanonicalCode {
    encode(&canonical_family(f))
}

/// Byte encoding of an already-canonical family.
pub(crate) fn encode(f: &TriangleFamily) -> CanonicalCode {
    let mut out = Vec::with_capacity(8 + 13 * f.members().len());
    out.extend_from_slice(&(f.n() as u32).to_le_bytes());
    out.push(match f.mode() {
        Mode::Set => 0,
        Mode::Multiset => 1,
    });
    let mut members: Vec<_> = f.members().to_vec();
    members.sort_by_key(|m| m.triangle);
    for m in members {
        for v in m.triangle.vertices() {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        out.push(m.multiplicity);
    }
    CanonicalCode(out)
}

/// Multiplicity-preserving vertex isomorphism test. Families on different
/// vertex counts or in different modes are never isomorphic.
pub fn are_isomorphic(a: &TriangleFamily, b: &TriangleFamily) -> bool {
    if a.n() != b.n() || a.mode() != b.mode() || a.size() != b.size() {
        return false;
    }
    if a.members().len() != b.members().len() || degree_profile(a) != degree_profile(b) {
        return false;
    }
    canonical_form(a) == canonical_form(b)
}

fn degree_profile(f: &TriangleFamily) -> Vec<usize> {
    let mut deg = vec![0usize; f.n()];
    for m in f.members() {
        for v in m.triangle.vertices() {
            deg[v] += m.multiplicity as usize;
        }
    }
    deg.sort_unstable();
    deg
}

/// Groups families by isomorphism class, keyed and ordered by canonical code.
pub fn classify<'a, I>(families: I) -> BTreeMap<CanonicalCode, Vec<&'a TriangleFamily>>
where
    I: IntoIterator<Item = &'a TriangleFamily>,
{
    let mut classes: BTreeMap<CanonicalCode, Vec<&TriangleFamily>> = BTreeMap::new();
    for f in families {
        classes.entry(canonical_form(f)).or_default().push(f);
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{pair_family, t_star};
    use crate::family::Triangle;

    #[test]
    fn highly_symmetric_families_stay_fast() {
        let big = t_star(40).unwrap();
        let perm: Vec<Vertex> = (0..40).map(|v| (v * 17 + 3) % 40).collect();
        assert!(are_isomorphic(&big, &big.relabel(&perm)));
        let lopsided = pair_family(40, 9, 22).unwrap();
        assert!(!are_isomorphic(
            &lopsided,
            &pair_family(40, 11, 18).unwrap()
        ));
        assert_eq!(
            canonical_form(&lopsided),
            canonical_form(&lopsided.relabel(&perm))
        );
    }

    #[test]
    fn single_triangle_any_labeling() {
        let base = TriangleFamily::from_triples(3, Mode::Set, [[0, 1, 2]]).unwrap();
        assert_eq!(
            canonical_form(&base),
            canonical_form(&base.relabel(&[2, 0, 1]))
        );
    }

    #[test]
    fn isolated_vertices_only_affect_n() {
        let a = TriangleFamily::from_triples(6, Mode::Set, [[3, 4, 5]]).unwrap();
        let b = TriangleFamily::from_triples(6, Mode::Set, [[0, 1, 2]]).unwrap();
        assert_eq!(canonical_form(&a), canonical_form(&b));
        let c = TriangleFamily::from_triples(7, Mode::Set, [[0, 1, 2]]).unwrap();
        assert_ne!(canonical_form(&a), canonical_form(&c));
    }

    #[test]
    fn t_star_differs_from_book() {
        let book = pair_family(8, 1, 4).unwrap();
        assert_ne!(canonical_form(&t_star(8).unwrap()), canonical_form(&book));
        assert!(!are_isomorphic(&t_star(8).unwrap(), &book));
    }

    #[test]
    fn edge_sharing_vs_vertex_sharing() {
        let a = TriangleFamily::from_triples(5, Mode::Set, [[0, 1, 2], [0, 1, 3]]).unwrap();
        let b = TriangleFamily::from_triples(5, Mode::Set, [[0, 1, 2], [0, 3, 4]]).unwrap();
        assert!(!are_isomorphic(&a, &b));
        assert!(are_isomorphic(&a, &a));
    }

    #[test]
    fn multiplicity_is_preserved() {
        let t = |a, b, c| Triangle::new(a, b, c).unwrap();
        let a = TriangleFamily::from_members(6, Mode::Multiset, [(t(0, 1, 2), 2), (t(3, 4, 5), 1)])
            .unwrap();
        let b = TriangleFamily::from_members(6, Mode::Multiset, [(t(0, 1, 2), 1), (t(3, 4, 5), 2)])
            .unwrap();
        let c = TriangleFamily::from_members(6, Mode::Multiset, [(t(0, 1, 2), 1), (t(3, 4, 5), 1)])
            .unwrap();
        assert!(are_isomorphic(&a, &b));
        assert!(!are_isomorphic(&a, &c));
    }

    #[test]
    fn mismatched_n_is_not_isomorphic() {
        let a = TriangleFamily::from_triples(4, Mode::Set, [[0, 1, 2]]).unwrap();
        let b = TriangleFamily::from_triples(5, Mode::Set, [[0, 1, 2]]).unwrap();
        assert!(!are_isomorphic(&a, &b));
    }

    #[test]
    fn canonical_family_is_a_fixed_point() {
        let f = pair_family(7, 2, 3).unwrap();
        let c = canonical_family(&f);
        assert_eq!(canonical_family(&c), c);
        assert!(are_isomorphic(&f, &c));
    }
}
