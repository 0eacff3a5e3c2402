//! Two-phase Louvain modularity maximization.
//!
//! The local-moving sweep visits vertices in the supplied ordering and breaks
//! modularity-gain ties toward the lowest community index, so a run is a pure
//! function of (graph, ordering). Aggregated levels derive their visit order
//! from the first appearance of any member vertex in the base ordering.

use crate::graph::{Graph, VertexOrdering};

/// Weighted multigraph for the aggregation levels.
struct Level {
    n: usize,
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    /// Weighted degree including twice the self-loop weight.
    degrees: Vec<f64>,
    /// Total edge weight m (self-loops included once).
    total_weight: f64,
    /// Visit order for the local-moving sweep at this level.
    order: Vec<usize>,
}

impl Level {
    fn from_graph(graph: &Graph, ordering: &VertexOrdering) -> Level {
        let n = graph.vertex_count();
        let adj = (0..n)
            .map(|v| graph.neighbors(v).iter().map(|&u| (u, 1.0)).collect())
            .collect();
        Level {
            n,
            adj,
            self_loops: vec![0.0; n],
            degrees: (0..n).map(|v| graph.degree(v) as f64).collect(),
            total_weight: graph.edge_count() as f64,
            order: ordering.permutation().to_vec(),
        }
    }

    /// One complete local-moving phase; returns the node->community map and
    /// whether any node moved.
    fn local_move(&self) -> (Vec<usize>, bool) {
        let mut community: Vec<usize> = (0..self.n).collect();
        let mut comm_degree: Vec<f64> = self.degrees.clone();
        let two_m = 2.0 * self.total_weight;
        let mut any_moved = false;

        loop {
            let mut moved_in_sweep = false;
            for &v in &self.order {
                let home = community[v];
                // Detach v before evaluating candidate communities.
                comm_degree[home] -= self.degrees[v];

                // Weight from v to each adjacent community, plus its home.
                let mut cand: Vec<(usize, f64)> = Vec::with_capacity(self.adj[v].len() + 1);
                let weight_to = |cand: &mut Vec<(usize, f64)>, c: usize, w: f64| {
                    match cand.iter_mut().find(|(cc, _)| *cc == c) {
                        Some((_, acc)) => *acc += w,
                        None => cand.push((c, w)),
                    }
                };
                weight_to(&mut cand, home, 0.0);
                for &(u, w) in &self.adj[v] {
                    weight_to(&mut cand, community[u], w);
                }

                let mut best_comm = home;
                let mut best_gain = f64::NEG_INFINITY;
                for &(c, k_vc) in &cand {
                    let gain = k_vc / self.total_weight
                        - comm_degree[c] * self.degrees[v] / (two_m * self.total_weight);
                    if gain > best_gain || (gain == best_gain && c < best_comm) {
                        best_gain = gain;
                        best_comm = c;
                    }
                }

                comm_degree[best_comm] += self.degrees[v];
                if best_comm != home {
                    community[v] = best_comm;
                    moved_in_sweep = true;
                    any_moved = true;
                }
            }
            if !moved_in_sweep {
                break;
            }
        }
        (community, any_moved)
    }

    /// Collapses communities into super-vertices. `community` must use dense
    /// ids `0..k`; the new visit order lists super-vertices by the first
    /// appearance of a member in this level's order.
    fn aggregate(&self, community: &[usize], k: usize) -> Level {
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> =
            vec![std::collections::BTreeMap::new(); k];
        let mut self_loops = vec![0.0; k];
        for v in 0..self.n {
            self_loops[community[v]] += self.self_loops[v];
            for &(u, w) in &self.adj[v] {
                if v < u {
                    let (cv, cu) = (community[v], community[u]);
                    if cv == cu {
                        self_loops[cv] += w;
                    } else {
                        *weights[cv].entry(cu).or_insert(0.0) += w;
                        *weights[cu].entry(cv).or_insert(0.0) += w;
                    }
                }
            }
        }
        let adj: Vec<Vec<(usize, f64)>> = weights
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        let degrees: Vec<f64> = (0..k)
            .map(|c| adj[c].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self_loops[c])
            .collect();

        let mut order = Vec::with_capacity(k);
        let mut seen = vec![false; k];
        for &v in &self.order {
            let c = community[v];
            if !seen[c] {
                seen[c] = true;
                order.push(c);
            }
        }

        Level {
            n: k,
            adj,
            self_loops,
            degrees,
            total_weight: self.total_weight,
            order,
        }
    }
}

/// Renumbers community labels densely, in node-id order.
fn compact(community: &[usize]) -> (Vec<usize>, usize) {
    let mut remap = vec![usize::MAX; community.len()];
    let mut next = 0;
    let dense: Vec<usize> = community
        .iter()
        .map(|&c| {
            if remap[c] == usize::MAX {
                remap[c] = next;
                next += 1;
            }
            remap[c]
        })
        .collect();
    (dense, next)
}

pub(super) fn louvain(graph: &Graph, ordering: &VertexOrdering) -> Vec<usize> {
    let n = graph.vertex_count();
    if n == 0 {
        return Vec::new();
    }
    if graph.edge_count() == 0 {
        return (0..n).collect();
    }

    // assignment[v] = community of original vertex v, refined level by level.
    let mut assignment: Vec<usize> = (0..n).collect();
    let mut level = Level::from_graph(graph, ordering);
    let mut last_q = f64::NEG_INFINITY;

    loop {
        let (community, moved) = level.local_move();
        let (dense, k) = compact(&community);
        for a in assignment.iter_mut() {
            *a = dense[*a];
        }

        let q = level_modularity(&level, &dense);
        debug_assert!(q >= last_q - 1e-12, "modularity decreased: {last_q} -> {q}");
        last_q = q;

        if !moved || k == level.n {
            return assignment;
        }
        level = level.aggregate(&dense, k);
    }
}

/// Modularity of a community map over a level's weighted multigraph.
fn level_modularity(level: &Level, community: &[usize]) -> f64 {
    let m = level.total_weight;
    let k = community.iter().copied().max().map_or(0, |x| x + 1);
    let mut intra = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for v in 0..level.n {
        intra[community[v]] += level.self_loops[v];
        degree[community[v]] += level.degrees[v];
        for &(u, w) in &level.adj[v] {
            if v < u && community[v] == community[u] {
                intra[community[v]] += w;
            }
        }
    }
    (0..k)
        .map(|c| intra[c] / m - (degree[c] / (2.0 * m)).powi(2))
        .sum()
}
