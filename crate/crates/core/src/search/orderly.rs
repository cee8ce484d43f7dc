//! Orderly generation over the colex triangle pool.
//!
//! A family is a set of items `(pool index, multiplicity)`. Item keys are
//! `index` in set mode and `2 * index + multiplicity - 1` in multiset mode.
//! A family is canonical when its sorted key list is least among all its
//! relabelings. Dropping the largest key of a canonical family leaves a
//! canonical family, so extending canonical families only by larger keys and
//! keeping canonical children visits every isomorphism class exactly once.

use std::sync::atomic::Ordering;

use crate::family::{Mode, Triangle, TriangleFamily};

use super::index::{pair_index, OwnerIndex};
use super::Shared;

pub(crate) type Item = (usize, u8);

const UNLABELED: u8 = u8::MAX;

/// Tests whether no relabeling of a family has a smaller sorted key list.
///
/// Labels are handed out in increasing order. Once labels `0..c` are placed,
/// the image's triangles with largest label `c - 1` are fixed, and in colex
/// order those form the next block of the key list, so each block can be
/// compared against the family's own block as soon as it is complete.
pub(crate) struct CanonTester {
    n: usize,
    multiset: bool,
    around: Vec<Vec<(u8, u8, u8)>>,
    own_blocks: Vec<u128>,
    isolated: Vec<bool>,
    active: usize,
    label: Vec<u8>,
}

impl CanonTester {
    pub(crate) fn new(n: usize, multiset: bool) -> Self {
        CanonTester {
            n,
            multiset,
            around: vec![Vec::new(); n],
            own_blocks: vec![0; n],
            isolated: vec![true; n],
            active: 0,
            label: vec![UNLABELED; n],
        }
    }

    #[inline]
    fn bit(&self, lo: usize, mid: usize, m: u8) -> u128 {
        let p = pair_index(lo, mid);
        if self.multiset {
            1u128 << (2 * p + (m as usize - 1))
        } else {
            1u128 << p
        }
    }

    pub(crate) fn is_canonical(&mut self, pool: &[Triangle], items: &[Item]) -> bool {
        for v in 0..self.n {
            self.around[v].clear();
            self.own_blocks[v] = 0;
            self.isolated[v] = true;
        }
        for &(idx, m) in items {
            let [a, b, c] = pool[idx].vertices();
            self.own_blocks[c] |= self.bit(a, b, m);
            self.around[a].push((b as u8, c as u8, m));
            self.around[b].push((a as u8, c as u8, m));
            self.around[c].push((a as u8, b as u8, m));
            self.isolated[a] = false;
            self.isolated[b] = false;
            self.isolated[c] = false;
        }
        self.active = self.isolated.iter().filter(|&&i| !i).count();
        !self.finds_smaller(0, 0)
    }

    fn finds_smaller(&mut self, c: usize, placed: usize) -> bool {
        if placed == self.active {
            // The rest of the image is empty: equal or larger.
            return false;
        }
        let mut isolated_tried = false;
        for v in 0..self.n {
            if self.label[v] != UNLABELED {
                continue;
            }
            if self.isolated[v] {
                if isolated_tried {
                    continue;
                }
                isolated_tried = true;
            }
            let mut block = 0u128;
            for &(x, y, m) in &self.around[v] {
                let (lx, ly) = (self.label[x as usize], self.label[y as usize]);
                if lx != UNLABELED && ly != UNLABELED {
                    let (lo, hi) = if lx < ly { (lx, ly) } else { (ly, lx) };
                    block |= self.bit(lo as usize, hi as usize, m);
                }
            }
            let diff = block ^ self.own_blocks[c];
            if diff != 0 {
                let lowest = diff & diff.wrapping_neg();
                if block & lowest != 0 {
                    return true;
                }
                continue;
            }
            self.label[v] = c as u8;
            let found = self.finds_smaller(c + 1, placed + usize::from(!self.isolated[v]));
            self.label[v] = UNLABELED;
            if found {
                return true;
            }
        }
        false
    }
}

/// Depth-first walk of the orderly tree below one node.
pub(crate) struct Explorer<'a> {
    pub(crate) shared: &'a Shared,
    pub(crate) pool: &'a [Triangle],
    pub(crate) mode: Mode,
    pub(crate) prove: Option<usize>,
    pub(crate) item_id: usize,
    pub(crate) index: OwnerIndex,
    pub(crate) items: Vec<Item>,
    pub(crate) size: usize,
    pub(crate) tester: CanonTester,
    pub(crate) best: usize,
    pub(crate) witnesses: Vec<Vec<Item>>,
    pub(crate) found: Option<Vec<Item>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
}

impl<'a> Explorer<'a> {
    pub(crate) fn new(
        shared: &'a Shared,
        pool: &'a [Triangle],
        n: usize,
        mode: Mode,
        prove: Option<usize>,
        item_id: usize,
    ) -> Self {
        Explorer {
            shared,
            pool,
            mode,
            prove,
            item_id,
            index: OwnerIndex::new(n),
            items: Vec::new(),
            size: 0,
            tester: CanonTester::new(n, mode == Mode::Multiset),
            best: 0,
            witnesses: Vec::new(),
            found: None,
        }
    }

    pub(crate) fn push(&mut self, (idx, m): Item) {
        for _ in 0..m {
            self.index.add(self.pool[idx]);
        }
        self.items.push((idx, m));
        self.size += m as usize;
    }

    pub(crate) fn pop(&mut self) {
        let (idx, m) = self.items.pop().expect("non-empty path");
        for _ in 0..m {
            self.index.remove(self.pool[idx]);
        }
        self.size -= m as usize;
    }

    /// Extensions of the current node, multiplicity-2 items first, each in
    /// pool order, together with an upper bound on the size reachable below.
    pub(crate) fn children(&mut self) -> (Vec<Item>, usize) {
        let start = self.items.last().map_or(0, |&(idx, _)| idx + 1);
        let mut doubles = Vec::new();
        let mut singles = Vec::new();
        let mut bound = self.size;
        for idx in start..self.pool.len() {
            let t = self.pool[idx];
            if !self.index.extend_ok(t) {
                continue;
            }
            singles.push((idx, 1));
            bound += 1;
            if self.mode == Mode::Multiset && self.index.edges_private(t) {
                self.index.add(t);
                let ok = self.index.extend_ok(t);
                self.index.remove(t);
                if ok {
                    doubles.push((idx, 2));
                    bound += 1;
                }
            }
        }
        doubles.extend(singles);
        (doubles, bound)
    }

    pub(crate) fn canonical(&mut self) -> bool {
        self.tester.is_canonical(self.pool, &self.items)
    }

    fn stopped(&self) -> bool {
        if self.shared.stop.load(Ordering::Relaxed) {
            return true;
        }
        self.prove.is_some() && self.shared.found_min.load(Ordering::Relaxed) < self.item_id
    }

    /// Counts and records the current node. Returns `Stop` on node-limit
    /// exhaustion or when a proof target is reached.
    pub(crate) fn record(&mut self) -> Flow {
        let visited = self.shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.shared.node_limit.is_some_and(|limit| visited > limit) {
            self.shared.stop.store(true, Ordering::Relaxed);
            return Flow::Stop;
        }
        self.shared.best.fetch_max(self.size, Ordering::Relaxed);
        match self.prove {
            Some(k) => {
                self.best = self.best.max(self.size);
                if self.size >= k {
                    self.found = Some(self.items.clone());
                    self.shared
                        .found_min
                        .fetch_min(self.item_id, Ordering::Relaxed);
                    return Flow::Stop;
                }
            }
            None => {
                if self.size > self.best {
                    self.best = self.size;
                    self.witnesses.clear();
                }
                if self.size == self.best && self.size >= self.shared.best.load(Ordering::Relaxed) {
                    self.witnesses.push(self.items.clone());
                }
            }
        }
        Flow::Continue
    }

    /// Full exploration of the subtree rooted at the current node.
    pub(crate) fn explore(&mut self) -> Flow {
        if self.stopped() {
            return Flow::Stop;
        }
        if self.record() == Flow::Stop {
            return Flow::Stop;
        }
        let (children, bound) = self.children();
        let threshold = match self.prove {
            Some(k) => k,
            None => self.shared.best.load(Ordering::Relaxed),
        };
        if bound < threshold {
            return Flow::Continue;
        }
        for child in children {
            self.push(child);
            if self.canonical() && self.explore() == Flow::Stop {
                self.pop();
                return Flow::Stop;
            }
            self.pop();
        }
        Flow::Continue
    }
}

/// Materializes a path as a family.
pub(crate) fn family_of(n: usize, mode: Mode, pool: &[Triangle], items: &[Item]) -> TriangleFamily {
    TriangleFamily::from_members(n, mode, items.iter().map(|&(idx, m)| (pool[idx], m)))
        .expect("search paths are valid families")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::index::colex_pool;

    fn items_of(pool: &[Triangle], triples: &[[usize; 3]]) -> Vec<Item> {
        let mut items: Vec<Item> = triples
            .iter()
            .map(|&[a, b, c]| {
                let t = Triangle::new(a, b, c).unwrap();
                (pool.iter().position(|&p| p == t).unwrap(), 1)
            })
            .collect();
        items.sort_unstable();
        items
    }

    #[test]
    fn first_triangle_is_canonical() {
        let pool = colex_pool(5);
        let mut t = CanonTester::new(5, false);
        assert!(t.is_canonical(&pool, &items_of(&pool, &[[0, 1, 2]])));
        assert!(!t.is_canonical(&pool, &items_of(&pool, &[[2, 3, 4]])));
        assert!(t.is_canonical(&pool, &[]));
    }

    #[test]
    fn sharing_edge_prefers_low_labels() {
        let pool = colex_pool(5);
        let mut t = CanonTester::new(5, false);
        // colex: 012 < 013 < 023 < 123 < 014 ...
        assert!(t.is_canonical(&pool, &items_of(&pool, &[[0, 1, 2], [0, 1, 3]])));
        assert!(!t.is_canonical(&pool, &items_of(&pool, &[[0, 1, 2], [1, 2, 3]])));
        assert!(!t.is_canonical(&pool, &items_of(&pool, &[[0, 1, 2], [0, 1, 4]])));
    }

    #[test]
    fn multiplicity_one_sorts_first() {
        let pool = colex_pool(6);
        let mut t = CanonTester::new(6, true);
        let a = pool.iter().position(|p| p.vertices() == [0, 1, 2]).unwrap();
        let b = pool.iter().position(|p| p.vertices() == [3, 4, 5]).unwrap();
        assert!(t.is_canonical(&pool, &[(a, 1), (b, 2)]));
        assert!(!t.is_canonical(&pool, &[(a, 2), (b, 1)]));
    }

    #[test]
    fn exactly_one_canonical_labeling_per_class() {
        // Every 2-subset of triangles on 5 vertices: canonical members must be
        // pairwise non-isomorphic and cover all classes.
        use crate::canon::canonical_form;
        use std::collections::BTreeSet;
        let pool = colex_pool(5);
        let mut tester = CanonTester::new(5, false);
        let mut all = BTreeSet::new();
        let mut canonical = Vec::new();
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let f = family_of(5, Mode::Set, &pool, &[(i, 1), (j, 1)]);
                all.insert(canonical_form(&f));
                if tester.is_canonical(&pool, &[(i, 1), (j, 1)]) {
                    canonical.push(canonical_form(&f));
                }
            }
        }
        let distinct: BTreeSet<_> = canonical.iter().cloned().collect();
        assert_eq!(distinct.len(), canonical.len());
        assert_eq!(distinct, all);
    }
}
