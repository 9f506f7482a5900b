//! Exhaustive shortest pivot paths by breadth-first search over bases.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::lp::{is_optimal, BasisSignature, PivotPath, SimplexState, StandardFormLP};
use crate::mcts::{action_set, ActionSetVariant};
use crate::{Error, Result};

/// Default cap on the number of distinct bases visited.
pub const DEFAULT_MAX_NODES: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct ShortestPaths {
    /// Fewest pivots to any optimal basis; `None` if none is reachable.
    pub min_length: Option<usize>,
    /// Every distinct entering sequence of length `min_length` that ends
    /// in an optimal basis, sorted.
    pub all_paths: Vec<PivotPath>,
    /// Optimal bases at depth `min_length`, sorted.
    pub optimal_bases: Vec<BasisSignature>,
    /// Distinct bases discovered.
    pub explored: usize,
}

struct Vertex {
    state: SimplexState,
    depth: usize,
    /// `(predecessor vertex, entering column)` for every shortest edge in.
    preds: Vec<(usize, usize)>,
}

/// Breadth-first search from `initial` with one edge per action of
/// `variant`, the target fixed by the ratio test. Unbounded edges are
/// skipped. The search stops after the first level holding an optimal
/// basis.
pub fn bfs_shortest_pivot(
    lp: &StandardFormLP,
    initial: &SimplexState,
    variant: ActionSetVariant,
    max_nodes: usize,
) -> Result<ShortestPaths> {
    let mut index: BTreeMap<BasisSignature, usize> = BTreeMap::new();
    let mut vertices = vec![Vertex {
        state: initial.clone(),
        depth: 0,
        preds: Vec::new(),
    }];
    index.insert(initial.signature(), 0);

    let mut frontier = vec![0usize];
    let mut depth = 0;
    let goals = loop {
        let goals: Vec<usize> = frontier
            .iter()
            .copied()
            .filter(|&v| is_optimal(&vertices[v].state))
            .collect();
        if !goals.is_empty() {
            break goals;
        }
        if frontier.is_empty() {
            return Ok(ShortestPaths {
                min_length: None,
                all_paths: Vec::new(),
                optimal_bases: Vec::new(),
                explored: vertices.len(),
            });
        }
        let mut next = Vec::new();
        for &v in &frontier {
            let actions = match action_set(&vertices[v].state, variant) {
                Ok(a) => a,
                Err(Error::EmptyActionSet) => continue,
                Err(e) => return Err(e),
            };
            for a in actions {
                let mut target = vertices[v].state.clone();
                match target.pivot_in_place(lp, a) {
                    Ok(_) => {}
                    Err(Error::Unbounded { .. }) => continue,
                    Err(e) => return Err(e),
                }
                let sig = target.signature();
                match index.get(&sig) {
                    Some(&w) => {
                        if vertices[w].depth == depth + 1 {
                            vertices[w].preds.push((v, a));
                        }
                    }
                    None => {
                        if vertices.len() >= max_nodes {
                            return Err(Error::GraphTooLarge { limit: max_nodes });
                        }
                        let w = vertices.len();
                        vertices.push(Vertex {
                            state: target,
                            depth: depth + 1,
                            preds: vec![(v, a)],
                        });
                        index.insert(sig, w);
                        next.push(w);
                    }
                }
            }
        }
        frontier = next;
        depth += 1;
    };

    let mut all_paths = Vec::new();
    for &g in &goals {
        let objective = vertices[g].state.objective();
        let mut suffix = Vec::with_capacity(depth);
        collect(&vertices, g, &mut suffix, &mut |rev: &[usize]| {
            let entering = rev.iter().rev().copied().collect();
            all_paths.push(PivotPath {
                entering,
                final_objective: objective,
            });
        });
    }
    all_paths.sort_by(|a, b| a.entering.cmp(&b.entering));
    all_paths.dedup_by(|a, b| a.entering == b.entering);
    let mut optimal_bases: Vec<_> = goals
        .iter()
        .map(|&g| vertices[g].state.signature())
        .collect();
    optimal_bases.sort();

    Ok(ShortestPaths {
        min_length: Some(depth),
        all_paths,
        optimal_bases,
        explored: vertices.len(),
    })
}

fn collect(vertices: &[Vertex], v: usize, suffix: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if vertices[v].depth == 0 {
        emit(suffix);
        return;
    }
    for &(p, a) in &vertices[v].preds {
        suffix.push(a);
        collect(vertices, p, suffix, emit);
        suffix.pop();
    }
}

/// Number of columns in `b1` but not in `b2`.
pub fn basis_distance(b1: &BasisSignature, b2: &BasisSignature) -> usize {
    let (x, y) = (b1.indices(), b2.indices());
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    x.len() - shared
}
