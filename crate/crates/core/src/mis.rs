//! Exact maximum independent set on up to 64 vertices.

use thiserror::Error;

use crate::family::Vertex;
use crate::union_graph::UnionGraph;

pub const DEFAULT_MIS_LIMIT: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("exact independent set limited to {limit} vertices, got {n}")]
pub struct MisLimitExceeded {
    pub n: usize,
    pub limit: usize,
}

struct Solver<'a> {
    adj: &'a [u64],
}

impl Solver<'_> {
    /// Independence number of the subgraph induced on `cand`.
    fn alpha(&self, cand: u64) -> u32 {
        let mut best = 0;
        self.branch(cand, 0, &mut best);
        best
    }

    fn branch(&self, mut cand: u64, taken: u32, best: &mut u32) {
        // Isolated vertices of the candidate subgraph are always taken.
        let mut taken = taken;
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.adj[v] & cand == 0 {
                cand &= !(1 << v);
                taken += 1;
            }
        }
        if cand == 0 {
            *best = (*best).max(taken);
            return;
        }
        if taken + cand.count_ones() <= *best {
            return;
        }
        let mut pick = 0;
        let mut pick_deg = 0;
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.adj[v] & cand).count_ones();
            if d > pick_deg {
                pick = v;
                pick_deg = d;
            }
        }
        let bit = 1u64 << pick;
        self.branch(cand & !bit & !self.adj[pick], taken + 1, best);
        self.branch(cand & !bit, taken, best);
    }
}

/// The lexicographically least maximum independent set (ascending vertex list).
pub fn max_independent_set(g: &UnionGraph) -> Result<Vec<Vertex>, MisLimitExceeded> {
    max_independent_set_with_limit(g, DEFAULT_MIS_LIMIT)
}

pub fn max_independent_set_with_limit(
    g: &UnionGraph,
    limit: usize,
) -> Result<Vec<Vertex>, MisLimitExceeded> {
    let n = g.n();
    if n > limit.min(64) {
        return Err(MisLimitExceeded { n, limit });
    }
    let adj = g.adjacency_masks().expect("n <= 64");
    let solver = Solver { adj: &adj };
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut need = solver.alpha(all);
    let mut cand = all;
    let mut chosen = Vec::with_capacity(need as usize);
    for v in 0..n {
        if need == 0 {
            break;
        }
        let bit = 1u64 << v;
        if cand & bit == 0 {
            continue;
        }
        let later = cand & !((bit << 1).wrapping_sub(1));
        let with_v = later & !adj[v];
        if 1 + solver.alpha(with_v) >= need {
            chosen.push(v);
            need -= 1;
            cand = with_v;
        } else {
            cand = later;
        }
    }
    Ok(chosen)
}
