//! Qualitative solving combined with k-coloring of the induced overlap graph.

use alloc::vec;
use alloc::vec::Vec;

use super::{solve_with, Assignment, Clock, SolveConfig, SolveError, SolveResult};
use crate::calculus::Calculus;
use crate::network::NormalizedNetwork;
use crate::relation::RelationSet;

/// Undirected arcs `(x, y)`, `x < y`, between elements whose relation (in
/// either direction) lies in `overlap`.
pub fn overlap_graph(model: &Assignment, overlap: RelationSet) -> Vec<(usize, usize)> {
    let n = model.len();
    let mut arcs = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let fwd = model.get(x, y).is_some_and(|r| overlap.contains(r));
            let bwd = model.get(y, x).is_some_and(|r| overlap.contains(r));
            if fwd || bwd {
                arcs.push((x, y));
            }
        }
    }
    arcs
}

/// Exact k-coloring by backtracking with DSatur vertex selection. Returns a
/// color in `0..k` per vertex, or `None` when no proper coloring exists.
pub fn color_graph(n: usize, arcs: &[(usize, usize)], k: usize) -> Option<Vec<usize>> {
    if n == 0 {
        return Some(Vec::new());
    }
    if k == 0 {
        return None;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in arcs {
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let mut colors = vec![usize::MAX; n];
    if dsatur(&adj, k, &mut colors, 0, 0) {
        Some(colors)
    } else {
        None
    }
}

fn dsatur(adj: &[Vec<usize>], k: usize, colors: &mut [usize], colored: usize, used: usize) -> bool {
    if colored == colors.len() {
        return true;
    }
    // most saturated vertex, then highest degree, then lowest index
    let mut best: Option<(usize, usize, usize)> = None;
    for v in 0..adj.len() {
        if colors[v] != usize::MAX {
            continue;
        }
        let mut seen = 0u64;
        let mut sat = 0;
        for &u in &adj[v] {
            let c = colors[u];
            if c != usize::MAX {
                if c < 64 {
                    if seen & (1 << c) == 0 {
                        seen |= 1 << c;
                        sat += 1;
                    }
                } else {
                    sat += 1;
                }
            }
        }
        let key = (sat, adj[v].len());
        if best.is_none_or(|(s, d, _)| key > (s, d)) {
            best = Some((sat, adj[v].len(), v));
        }
    }
    let (_, _, v) = best.unwrap();
    // a fresh color beyond `used` is interchangeable with any other fresh one
    for c in 0..k.min(used + 1) {
        if adj[v].iter().all(|&u| colors[u] != c) {
            colors[v] = c;
            if dsatur(adj, k, colors, colored + 1, used.max(c + 1)) {
                return true;
            }
            colors[v] = usize::MAX;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringOutcome {
    pub result: SolveResult,
    /// Color per element, present iff the result is SAT.
    pub coloring: Option<Vec<usize>>,
    pub arcs: Vec<(usize, usize)>,
}

/// Coloring and arcs of an accepted model.
type Found = (Vec<usize>, Vec<(usize, usize)>);

/// Finds a qualitative model whose overlap graph is `k`-colorable. Models
/// whose graph cannot be colored are skipped and the qualitative search
/// continues.
pub fn solve_with_coloring(
    calc: &Calculus,
    net: &NormalizedNetwork,
    overlap: RelationSet,
    k: usize,
    cfg: &SolveConfig,
    clock: Option<&mut dyn Clock>,
) -> Result<ColoringOutcome, SolveError> {
    let cfg = SolveConfig {
        max_models: Some(1),
        ..cfg.clone()
    };
    let mut found: Option<Found> = None;
    let result = solve_with(calc, net, &cfg, clock, &mut |m| {
        let arcs = overlap_graph(m, overlap);
        match color_graph(m.len(), &arcs, k) {
            Some(colors) => {
                found = Some((colors, arcs));
                true
            }
            None => false,
        }
    })?;
    let (coloring, arcs) = match found {
        Some((c, a)) => (Some(c), a),
        None => (None, Vec::new()),
    };
    Ok(ColoringOutcome {
        result,
        coloring,
        arcs,
    })
}
