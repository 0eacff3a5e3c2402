//! Agglomerative greedy modularity (CNM-style): repeatedly merge the
//! community pair with the largest positive modularity gain, breaking ties
//! toward the smallest (i, j) pair. Deterministic, order-independent.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use crate::graph::Graph;

#[derive(Debug)]
struct MergeCand {
    dq: f64,
    i: usize,
    j: usize,
    stamp_i: u64,
    stamp_j: u64,
}

impl PartialEq for MergeCand {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for MergeCand {}

impl PartialOrd for MergeCand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MergeCand {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on gain; among equal gains the smallest (i, j) wins.
        self.dq
            .total_cmp(&other.dq)
            .then_with(|| other.i.cmp(&self.i))
            .then_with(|| other.j.cmp(&self.j))
    }
}

pub(super) fn greedy_modularity(graph: &Graph) -> Vec<usize> {
    let n = graph.vertex_count();
    let m = graph.edge_count() as f64;
    if n == 0 || m == 0.0 {
        return (0..n).collect();
    }

    // parent[v]: community representative, path-compressed on lookup.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }

    // Per-community edge counts to neighboring communities and degree sums.
    let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    let mut degree: Vec<f64> = (0..n).map(|v| graph.degree(v) as f64).collect();
    let mut stamp: Vec<u64> = vec![0; n];
    for &(u, v) in graph.edges() {
        *links[u].entry(v).or_insert(0.0) += 1.0;
        *links[v].entry(u).or_insert(0.0) += 1.0;
    }

    let dq = |m_ab: f64, d_a: f64, d_b: f64| m_ab / m - d_a * d_b / (2.0 * m * m);

    let mut heap = BinaryHeap::new();
    for u in 0..n {
        for (&v, &w) in &links[u] {
            if u < v {
                heap.push(MergeCand {
                    dq: dq(w, degree[u], degree[v]),
                    i: u,
                    j: v,
                    stamp_i: 0,
                    stamp_j: 0,
                });
            }
        }
    }

    while let Some(cand) = heap.pop() {
        if cand.dq <= 0.0 {
            break;
        }
        if stamp[cand.i] != cand.stamp_i || stamp[cand.j] != cand.stamp_j {
            continue; // stale entry
        }
        let (keep, gone) = (cand.i, cand.j);

        // Merge `gone` into `keep` (keep < gone by construction).
        parent[gone] = keep;
        degree[keep] += degree[gone];
        stamp[keep] += 1;
        stamp[gone] += 1;

        let gone_links = std::mem::take(&mut links[gone]);
        links[keep].remove(&gone);
        for (nb, w) in gone_links {
            if nb == keep {
                continue;
            }
            links[nb].remove(&gone);
            *links[keep].entry(nb).or_insert(0.0) += w;
            *links[nb].entry(keep).or_insert(0.0) += w;
        }
        let neighbors: Vec<(usize, f64)> = links[keep].iter().map(|(&k, &w)| (k, w)).collect();
        for (nb, w) in neighbors {
            let (a, b) = (keep.min(nb), keep.max(nb));
            heap.push(MergeCand {
                dq: dq(w, degree[a], degree[b]),
                i: a,
                j: b,
                stamp_i: stamp[a],
                stamp_j: stamp[b],
            });
        }
    }

    (0..n).map(|v| find(&mut parent, v)).collect()
}
