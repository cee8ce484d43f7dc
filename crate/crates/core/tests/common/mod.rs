//! Slow, obviously-correct reference implementations.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rainbow_core::canon::{canonical_form, CanonicalCode};
use rainbow_core::constructions::all_triangles;
use rainbow_core::{Mode, Triangle, TriangleFamily, Vertex};

/// Every member copy as a flat list of triangles.
fn copies(f: &TriangleFamily) -> Vec<Triangle> {
    f.members()
        .iter()
        .flat_map(|m| std::iter::repeat_n(m.triangle, m.multiplicity as usize))
        .collect()
}

/// A rainbow triangle exists iff some vertex triple has three distinct
/// copies covering its three edges. Tries every ordered choice.
pub fn has_rainbow(f: &TriangleFamily) -> bool {
    let c = copies(f);
    let has = |i: usize, a: Vertex, b: Vertex| c[i].contains_vertex(a) && c[i].contains_vertex(b);
    for x in 0..f.n() {
        for y in x + 1..f.n() {
            for z in y + 1..f.n() {
                for i in 0..c.len() {
                    if !has(i, x, y) {
                        continue;
                    }
                    for j in 0..c.len() {
                        if j == i || !has(j, y, z) {
                            continue;
                        }
                        for k in 0..c.len() {
                            if k != i && k != j && has(k, x, z) {
                                return true;
                            }
                        }
                    }
                }
            }
        }
    }
    false
}

/// Adds one copy of `t`, or `None` if the mode forbids it.
pub fn plus(f: &TriangleFamily, t: Triangle) -> Option<TriangleFamily> {
    f.with_added(t).ok()
}

/// Every family of at most `max_copies` copies over `n` vertices, multiplicity
/// capped by the mode, members in lexicographic triangle order.
pub fn all_families(n: usize, mode: Mode, max_copies: usize) -> Vec<TriangleFamily> {
    fn go(
        pool: &[Triangle],
        from: usize,
        left: usize,
        cap: u8,
        cur: &mut Vec<(Triangle, u8)>,
        out: &mut Vec<Vec<(Triangle, u8)>>,
    ) {
        out.push(cur.clone());
        for i in from..pool.len() {
            for m in 1..=cap.min(left as u8) {
                cur.push((pool[i], m));
                go(pool, i + 1, left - m as usize, cap, cur, out);
                cur.pop();
            }
        }
    }
    let pool = all_triangles(n);
    let mut raw = Vec::new();
    go(
        &pool,
        0,
        max_copies,
        mode.max_multiplicity(),
        &mut Vec::new(),
        &mut raw,
    );
    raw.into_iter()
        .map(|ms| TriangleFamily::from_members(n, mode, ms).unwrap())
        .collect()
}

/// All rainbow-free families, found by growing one triangle at a time in
/// pool order. Rainbow-freeness is hereditary, so nothing is missed.
pub fn all_rainbow_free(n: usize, mode: Mode) -> Vec<TriangleFamily> {
    fn go(
        n: usize,
        mode: Mode,
        pool: &[Triangle],
        from: usize,
        cur: &mut Vec<(Triangle, u8)>,
        out: &mut Vec<TriangleFamily>,
    ) {
        let f = TriangleFamily::from_members(n, mode, cur.iter().copied()).unwrap();
        if has_rainbow(&f) {
            return;
        }
        out.push(f);
        for i in from..pool.len() {
            for m in 1..=mode.max_multiplicity() {
                cur.push((pool[i], m));
                go(n, mode, pool, i + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, mode, &all_triangles(n), 0, &mut Vec::new(), &mut out);
    out
}

/// Maximum size and the canonical codes of all classes attaining it.
pub fn brute_maximum(n: usize, mode: Mode) -> (usize, Vec<CanonicalCode>) {
    let all = all_rainbow_free(n, mode);
    let best = all.iter().map(|f| f.size()).max().unwrap_or(0);
    let classes: BTreeMap<CanonicalCode, ()> = all
        .iter()
        .filter(|f| f.size() == best)
        .map(|f| (canonical_form(f), ()))
        .collect();
    (best, classes.into_keys().collect())
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

pub fn brute_isomorphic(a: &TriangleFamily, b: &TriangleFamily, perms: &[Vec<usize>]) -> bool {
    if a.n() != b.n() || a.mode() != b.mode() || a.size() != b.size() {
        return false;
    }
    let target = b.normalized();
    perms.iter().any(|p| a.relabel(p) == target)
}

/// Triangles of a graph by direct triple enumeration.
pub fn graph_triangles(n: usize, adj: &dyn Fn(Vertex, Vertex) -> bool) -> Vec<[Vertex; 3]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if adj(a, b) && adj(b, c) && adj(a, c) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}
