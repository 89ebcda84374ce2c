//! Exact all-pairs shortest paths.
//!
//! Distances are `Option<i64>`; `None` is unreachable. Supported sizes are
//! n ≤ 10^3 nodes with edge weights ≤ 10^6, which keeps every intermediate
//! sum far below `i64::MAX`.

use thiserror::Error;

use crate::model::{CostView, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApspError {
    #[error("negative weight {weight} on edge ({u},{v})")]
    NegativeWeight { u: NodeId, v: NodeId, weight: i64 },
    #[error("node {node} out of range (node_count {node_count})")]
    InvalidNode { node: NodeId, node_count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    n: usize,
    dist: Vec<Option<i64>>,
}

impl CostMatrix {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: NodeId, v: NodeId) -> Option<i64> {
        self.dist[u * self.n + v]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Option<i64>]> {
        self.dist.chunks(self.n.max(1))
    }
}

/// Floyd-Warshall, loop order k, i, j ascending.
pub fn floyd_all_pairs(view: &CostView) -> Result<CostMatrix, ApspError> {
    let n = view.node_count();
    let mut dist = vec![None; n * n];
    for u in 0..n {
        for v in 0..n {
            let w = view.weight(u, v);
            if let Some(weight) = w {
                if weight < 0 {
                    return Err(ApspError::NegativeWeight { u, v, weight });
                }
            }
            dist[u * n + v] = if u == v { Some(0) } else { w };
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = dist[i * n + k] else { continue };
            for j in 0..n {
                let Some(kj) = dist[k * n + j] else { continue };
                let through = ik + kj;
                let slot = &mut dist[i * n + j];
                if slot.is_none_or(|d| through < d) {
                    *slot = Some(through);
                }
            }
        }
    }
    Ok(CostMatrix { n, dist })
}

/// Minimum weight over all simple `src`–`dst` paths by exhaustive DFS.
/// Exponential; intended for test graphs of a dozen nodes.
pub fn oracle_shortest(view: &CostView, src: NodeId, dst: NodeId) -> Option<i64> {
    fn walk(view: &CostView, at: NodeId, dst: NodeId, so_far: i64, visited: &mut Vec<bool>, best: &mut Option<i64>) {
        if at == dst {
            if best.is_none_or(|b| so_far < b) {
                *best = Some(so_far);
            }
            return;
        }
        for (next, w) in view.neighbors(at) {
            if visited[next] {
                continue;
            }
            visited[next] = true;
            walk(view, next, dst, so_far + w, visited, best);
            visited[next] = false;
        }
    }

    let mut visited = vec![false; view.node_count()];
    visited[src] = true;
    let mut best = None;
    walk(view, src, dst, 0, &mut visited, &mut best);
    best
}

/// Rows × columns slice of a distance matrix, labelled by node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    pub rows: Vec<NodeId>,
    pub cols: Vec<NodeId>,
    pub values: Vec<Vec<Option<i64>>>,
}

impl DistanceTable {
    pub fn get(&self, row: usize, col: usize) -> Option<i64> {
        self.values[row][col]
    }
}

pub fn select_distances(matrix: &CostMatrix, rows: &[NodeId], cols: &[NodeId]) -> Result<DistanceTable, ApspError> {
    let check = |node: NodeId| {
        if node < matrix.n {
            Ok(())
        } else {
            Err(ApspError::InvalidNode { node, node_count: matrix.n })
        }
    };
    rows.iter().chain(cols).try_for_each(|&v| check(v))?;
    let values = rows.iter().map(|&r| cols.iter().map(|&c| matrix.get(r, c)).collect()).collect();
    Ok(DistanceTable { rows: rows.to_vec(), cols: cols.to_vec(), values })
}
