//! Reverse Cuthill–McKee ordering on the nonzero pattern of a symmetric matrix.

use std::collections::VecDeque;

use super::dense::SymMatrix;

/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(m: &SymMatrix) -> Vec<usize> {
    let n = m.order();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|&(j, &v)| j != i && v != 0.0)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        let start = pseudo_peripheral(seed, &adj, &degree);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// George–Liu style search: repeat BFS from the lowest-degree node of the
/// deepest level while the eccentricity keeps growing.
fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut current = seed;
    let (mut depth, mut last) = bfs_levels(current, adj);
    for _ in 0..8 {
        let cand = *last.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
        let (d, l) = bfs_levels(cand, adj);
        if d <= depth {
            break;
        }
        current = cand;
        depth = d;
        last = l;
    }
    current
}

fn bfs_levels(start: usize, adj: &[Vec<usize>]) -> (usize, Vec<usize>) {
    let n = adj.len();
    let mut level = vec![usize::MAX; n];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut max_level = 0;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                max_level = max_level.max(level[w]);
                queue.push_back(w);
            }
        }
    }
    let last = (0..n).filter(|&v| level[v] == max_level).collect();
    (max_level, last)
}
