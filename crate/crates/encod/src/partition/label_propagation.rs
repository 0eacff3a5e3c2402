//! Asynchronous label propagation with seeded tie-breaking.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexOrdering};

/// The classic algorithm can oscillate, so sweeps are capped.
const MAX_SWEEPS: usize = 100;

pub(super) fn label_propagation(graph: &Graph, ordering: &VertexOrdering) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut labels: Vec<usize> = (0..n).collect();
    if n == 0 {
        return labels;
    }
    // Tie-breaks come from a generator derived from the ordering seed so a
    // run is fully determined by (graph, ordering).
    let mut rng = ChaCha8Rng::seed_from_u64(ordering.seed() ^ 0xA5A5_5A5A_0F0F_F0F0);

    let mut counts: Vec<usize> = vec![0; n];
    for _ in 0..MAX_SWEEPS {
        let mut changed = false;
        for &v in ordering.permutation() {
            let neigh = graph.neighbors(v);
            if neigh.is_empty() {
                continue;
            }
            let mut touched: Vec<usize> = Vec::with_capacity(neigh.len());
            let mut best = 0usize;
            for &u in neigh {
                let l = labels[u];
                if counts[l] == 0 {
                    touched.push(l);
                }
                counts[l] += 1;
                best = best.max(counts[l]);
            }
            let mut tied: Vec<usize> = touched
                .iter()
                .copied()
                .filter(|&l| counts[l] == best)
                .collect();
            tied.sort_unstable();
            for &l in &touched {
                counts[l] = 0;
            }
            let pick = if tied.len() == 1 {
                tied[0]
            } else {
                tied[rng.random_range(0..tied.len())]
            };
            if pick != labels[v] {
                labels[v] = pick;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    labels
}
