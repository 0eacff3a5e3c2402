//! Planted overlapping-community benchmarks and pairwise co-occurrence
//! analysis over the base ensemble.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cover::OverlapCover;
use crate::error::{EncodError, Result};
use crate::graph::{Graph, VertexSet};
use crate::partition::BaseEnsemble;

/// Parameters of the planted benchmark.
#[derive(Debug, Clone)]
pub struct PlantedConfig {
    pub n: usize,
    /// Number of planted communities.
    pub communities: usize,
    /// Community capacity; c * s must cover n.
    pub community_size: usize,
    /// Fraction of vertices that also join a second community.
    pub overlap_frac: f64,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

impl PlantedConfig {
    pub fn validate(&self) -> Result<()> {
        if self.communities == 0 || self.n < self.communities {
            return Err(EncodError::Config(format!(
                "{} communities over {} vertices would leave some community empty",
                self.communities, self.n
            )));
        }
        if self.communities * self.community_size < self.n {
            return Err(EncodError::Config(format!(
                "capacity {} x {} cannot hold {} vertices",
                self.communities, self.community_size, self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.p_in)
            || !(0.0..=1.0).contains(&self.p_out)
            || self.p_out >= self.p_in
        {
            return Err(EncodError::Config(format!(
                "edge probabilities must satisfy 0 <= p_out < p_in <= 1, got p_in={} p_out={}",
                self.p_in, self.p_out
            )));
        }
        if !(0.0..=1.0).contains(&self.overlap_frac) {
            return Err(EncodError::Config(format!(
                "overlap fraction must lie in [0, 1], got {}",
                self.overlap_frac
            )));
        }
        Ok(())
    }
}

/// Generates a graph with planted overlapping ground truth: vertices get a
/// round-robin home community, a seeded fraction joins one more, and each
/// pair is edged with p_in when it shares a community and p_out otherwise.
pub fn generate_planted(config: &PlantedConfig) -> Result<(Graph, OverlapCover)> {
    config.validate()?;
    let n = config.n;
    let c = config.communities;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut membership: Vec<Vec<usize>> = (0..n).map(|v| vec![v % c]).collect();
    let overlap_count = (config.overlap_frac * n as f64).round() as usize;
    let mut chosen: Vec<usize> = rand::seq::index::sample(&mut rng, n, overlap_count).into_vec();
    chosen.sort_unstable();
    for v in chosen {
        if c < 2 {
            break;
        }
        let home = v % c;
        let mut second = rng.random_range(0..c - 1);
        if second >= home {
            second += 1;
        }
        membership[v].push(second);
        membership[v].sort_unstable();
    }

    let shares = |u: usize, v: usize| {
        membership[u]
            .iter()
            .any(|m| membership[v].contains(m))
    };
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if shares(u, v) { config.p_in } else { config.p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::from_edges(n, &edges);

    let mut sets = vec![VertexSet::new(); c];
    for (v, comms) in membership.iter().enumerate() {
        for &j in comms {
            sets[j].insert(v);
        }
    }
    let cover = OverlapCover::from_communities(sets, n);
    cover.validate()?;
    Ok((graph, cover))
}

/// One populated co-occurrence bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveBin {
    pub bin_low: f64,
    pub bin_high: f64,
    /// P(edge | shared-partition fraction falls in this bin).
    pub p_edge: f64,
    /// P(>=1 common reference community | fraction falls in this bin).
    pub p_shared_comm: f64,
    pub pair_count: usize,
}

/// For every vertex pair, the fraction of base partitions co-assigning the
/// pair, bucketed into ten equal bins; each populated bin reports the edge
/// frequency and the reference co-membership frequency.
pub fn cooccurrence_curve(
    graph: &Graph,
    ensemble: &BaseEnsemble,
    reference: &OverlapCover,
) -> Vec<CurveBin> {
    let n = graph.vertex_count();
    let partitions = ensemble.partitions();
    let total = partitions.len();
    let mut pair_count = [0usize; 10];
    let mut edge_count = [0usize; 10];
    let mut shared_count = [0usize; 10];
    for u in 0..n {
        for v in (u + 1)..n {
            let together = partitions
                .iter()
                .filter(|p| p.community_of(u) == p.community_of(v))
                .count();
            let k = together as f64 / total as f64;
            let bin = ((k * 10.0).floor() as usize).min(9);
            pair_count[bin] += 1;
            if graph.has_edge(u, v) {
                edge_count[bin] += 1;
            }
            if reference.shared_count(u, v) > 0 {
                shared_count[bin] += 1;
            }
        }
    }
    (0..10)
        .filter(|&b| pair_count[b] > 0)
        .map(|b| CurveBin {
            bin_low: b as f64 / 10.0,
            bin_high: (b + 1) as f64 / 10.0,
            p_edge: edge_count[b] as f64 / pair_count[b] as f64,
            p_shared_comm: shared_count[b] as f64 / pair_count[b] as f64,
            pair_count: pair_count[b],
        })
        .collect()
}

/// Tab-separated rendering of the curve table.
pub fn curve_table(bins: &[CurveBin]) -> String {
    let mut out = String::from("# bin_low\tbin_high\tp_edge\tp_shared_comm\tpair_count\n");
    for b in bins {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            b.bin_low, b.bin_high, b.p_edge, b.p_shared_comm, b.pair_count
        ));
    }
    out
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&rx), mean(&ry));
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        num += (a - mx) * (b - my);
        dx += (a - mx) * (a - mx);
        dy += (b - my) * (b - my);
    }
    if dx == 0.0 || dy == 0.0 {
        return 0.0;
    }
    num / (dx.sqrt() * dy.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_ensemble, partition, BaseAlgorithm, DisjointPartition};
    use crate::graph::random_ordering;

    fn base_config() -> PlantedConfig {
        PlantedConfig {
            n: 40,
            communities: 4,
            community_size: 14,
            overlap_frac: 0.2,
            p_in: 0.6,
            p_out: 0.02,
            seed: 7,
        }
    }

    #[test]
    fn separable_case_recovers_exactly() {
        let config = PlantedConfig {
            p_in: 1.0,
            p_out: 0.0,
            overlap_frac: 0.0,
            ..base_config()
        };
        let (g, truth) = generate_planted(&config).unwrap();
        for alg in BaseAlgorithm::ALL {
            let p = partition(&g, alg, &random_ordering(&g, 3));
            assert_eq!(p.community_count(), 4, "{}", alg.name());
            let detected: Vec<VertexSet> = p.communities();
            for c in truth.communities() {
                assert!(detected.contains(c), "{} missed a clique", alg.name());
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let config = base_config();
        let (g1, t1) = generate_planted(&config).unwrap();
        let (g2, t2) = generate_planted(&config).unwrap();
        assert_eq!(g1.edges(), g2.edges());
        assert_eq!(t1.communities(), t2.communities());
    }

    #[test]
    fn edge_counts_follow_binomial_concentration() {
        let config = base_config();
        for seed in 0..20u64 {
            let cfg = PlantedConfig { seed, ..config.clone() };
            let (g, truth) = generate_planted(&cfg).unwrap();
            let n = cfg.n;
            let mut intra = 0usize;
            let mut inter = 0usize;
            for u in 0..n {
                for v in (u + 1)..n {
                    if truth.shared_count(u, v) > 0 {
                        intra += 1;
                    } else {
                        inter += 1;
                    }
                }
            }
            let mean = cfg.p_in * intra as f64 + cfg.p_out * inter as f64;
            let var = cfg.p_in * (1.0 - cfg.p_in) * intra as f64
                + cfg.p_out * (1.0 - cfg.p_out) * inter as f64;
            let sigma = var.sqrt();
            let observed = g.edge_count() as f64;
            assert!(
                (observed - mean).abs() <= 3.0 * sigma,
                "seed {seed}: observed {observed}, expected {mean} +- {}",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn generated_cover_satisfies_cover_conditions() {
        for seed in 0..5u64 {
            let cfg = PlantedConfig { seed, overlap_frac: 0.5, ..base_config() };
            let (_, truth) = generate_planted(&cfg).unwrap();
            truth.validate().unwrap();
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(generate_planted(&PlantedConfig { n: 3, ..base_config() }).is_err());
        assert!(generate_planted(&PlantedConfig {
            community_size: 2,
            ..base_config()
        })
        .is_err());
        assert!(generate_planted(&PlantedConfig {
            p_out: 0.9,
            ..base_config()
        })
        .is_err());
        assert!(generate_planted(&PlantedConfig {
            overlap_frac: 1.5,
            ..base_config()
        })
        .is_err());
    }

    #[test]
    fn identical_partitions_populate_two_bins() {
        let (g, truth) = generate_planted(&base_config()).unwrap();
        let p = partition(&g, BaseAlgorithm::Louvain, &random_ordering(&g, 1));
        let ensemble = BaseEnsemble::new(vec![p.clone(), p.clone(), p]);
        let bins = cooccurrence_curve(&g, &ensemble, &truth);
        assert_eq!(bins.len(), 2);
        assert_eq!(bins[0].bin_low, 0.0);
        assert_eq!(bins[1].bin_high, 1.0);
    }

    /// Independent oracle: recompute every pair's fraction and bin tallies
    /// with explicit community-set comparisons.
    fn curve_oracle(g: &Graph, ensemble: &BaseEnsemble, reference: &OverlapCover) -> Vec<CurveBin> {
        let n = g.vertex_count();
        let comm_sets: Vec<Vec<VertexSet>> = ensemble
            .partitions()
            .iter()
            .map(DisjointPartition::communities)
            .collect();
        let mut tallies: Vec<(usize, usize, usize)> = vec![(0, 0, 0); 10];
        for u in 0..n {
            for v in (u + 1)..n {
                let mut together = 0usize;
                for sets in &comm_sets {
                    if sets
                        .iter()
                        .any(|c| c.contains(&u) && c.contains(&v))
                    {
                        together += 1;
                    }
                }
                let k = together as f64 / comm_sets.len() as f64;
                let bin = ((k * 10.0).floor() as usize).min(9);
                tallies[bin].0 += 1;
                if g.edges().contains(&(u, v)) {
                    tallies[bin].1 += 1;
                }
                let shared = reference
                    .communities()
                    .iter()
                    .any(|c| c.contains(&u) && c.contains(&v));
                if shared {
                    tallies[bin].2 += 1;
                }
            }
        }
        (0..10)
            .filter(|&b| tallies[b].0 > 0)
            .map(|b| CurveBin {
                bin_low: b as f64 / 10.0,
                bin_high: (b + 1) as f64 / 10.0,
                p_edge: tallies[b].1 as f64 / tallies[b].0 as f64,
                p_shared_comm: tallies[b].2 as f64 / tallies[b].0 as f64,
                pair_count: tallies[b].0,
            })
            .collect()
    }

    #[test]
    fn curve_matches_pair_enumeration_oracle() {
        let (g, truth) = generate_planted(&base_config()).unwrap();
        let ensemble = build_ensemble(&g, &BaseAlgorithm::ALL, 3, 11);
        let bins = cooccurrence_curve(&g, &ensemble, &truth);
        let oracle = curve_oracle(&g, &ensemble, &truth);
        assert_eq!(bins, oracle);
        for b in &bins {
            assert!(b.p_edge >= 0.0 && b.p_edge <= 1.0);
            assert!(b.p_shared_comm >= 0.0 && b.p_shared_comm <= 1.0);
        }
    }

    #[test]
    fn spearman_basics() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let up = [0.1, 0.2, 0.3, 0.4];
        let down = [4.0, 3.0, 2.0, 1.0];
        assert!((spearman(&x, &up) - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &down) + 1.0).abs() < 1e-12);
        let tied = [1.0, 1.0, 2.0, 2.0];
        assert!(spearman(&x, &tied) > 0.8);
    }
}
