//! Base disjoint community structures: native partitioners (Louvain, label
//! propagation, greedy modularity), external partition ingestion, and the
//! ensemble built from K seeded vertex orderings per algorithm.

mod greedy_modularity;
mod label_propagation;
mod louvain;

use std::collections::HashMap;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{EncodError, Result};
use crate::graph::{random_ordering, Graph, VertexOrdering, VertexSet};

/// The native base algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseAlgorithm {
    Louvain,
    LabelPropagation,
    GreedyModularity,
}

impl BaseAlgorithm {
    pub const ALL: [BaseAlgorithm; 3] = [
        BaseAlgorithm::Louvain,
        BaseAlgorithm::LabelPropagation,
        BaseAlgorithm::GreedyModularity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BaseAlgorithm::Louvain => "louvain",
            BaseAlgorithm::LabelPropagation => "label_propagation",
            BaseAlgorithm::GreedyModularity => "greedy_modularity",
        }
    }
}

impl FromStr for BaseAlgorithm {
    type Err = EncodError;

    fn from_str(s: &str) -> Result<BaseAlgorithm> {
        match s {
            "louvain" => Ok(BaseAlgorithm::Louvain),
            "lp" | "label_propagation" => Ok(BaseAlgorithm::LabelPropagation),
            "greedy" | "greedy_modularity" => Ok(BaseAlgorithm::GreedyModularity),
            other => Err(EncodError::Config(format!(
                "unknown base algorithm '{other}' (expected louvain, lp, or greedy)"
            ))),
        }
    }
}

/// One disjoint community structure with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointPartition {
    assignment: Vec<usize>,
    community_count: usize,
    algorithm: String,
    ordering_seed: u64,
}

impl DisjointPartition {
    /// Compacts raw community labels to dense indices in vertex-id
    /// first-appearance order.
    pub(crate) fn from_raw(raw: &[usize], algorithm: &str, ordering_seed: u64) -> DisjointPartition {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let mut assignment = Vec::with_capacity(raw.len());
        for &label in raw {
            let next = remap.len();
            let id = *remap.entry(label).or_insert(next);
            assignment.push(id);
        }
        DisjointPartition {
            assignment,
            community_count: remap.len(),
            algorithm: algorithm.to_owned(),
            ordering_seed,
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    pub fn ordering_seed(&self) -> u64 {
        self.ordering_seed
    }

    /// Communities as vertex sets, indexed by community id.
    pub fn communities(&self) -> Vec<VertexSet> {
        let mut sets = vec![VertexSet::new(); self.community_count];
        for (v, &c) in self.assignment.iter().enumerate() {
            sets[c].insert(v);
        }
        sets
    }

    /// Checks the structural invariants: dense indices, no empty community.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.community_count];
        for &c in &self.assignment {
            if c >= self.community_count {
                return Err(EncodError::InvariantViolation(format!(
                    "community index {c} out of range"
                )));
            }
            seen[c] = true;
        }
        if let Some(empty) = seen.iter().position(|&s| !s) {
            return Err(EncodError::InvariantViolation(format!(
                "community {empty} is empty"
            )));
        }
        Ok(())
    }

    /// Renders the `<label> <community-id>` document format.
    pub fn to_partition_string(&self, graph: &Graph) -> String {
        let mut out = String::new();
        for (v, &c) in self.assignment.iter().enumerate() {
            out.push_str(&format!("{} {}\n", graph.label(v), c));
        }
        out
    }
}

/// The ordered collection of base partitions feeding feature extraction.
#[derive(Debug, Clone)]
pub struct BaseEnsemble {
    partitions: Vec<DisjointPartition>,
    total_communities: usize,
}

impl BaseEnsemble {
    pub fn new(partitions: Vec<DisjointPartition>) -> BaseEnsemble {
        let total_communities = partitions.iter().map(|p| p.community_count()).sum();
        BaseEnsemble {
            partitions,
            total_communities,
        }
    }

    pub fn partitions(&self) -> &[DisjointPartition] {
        &self.partitions
    }

    /// Total number of base communities across all partitions.
    pub fn total_communities(&self) -> usize {
        self.total_communities
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Fixed splittable derivation of the ordering seed for run (m, k).
pub fn ordering_seed(base_seed: u64, algorithm_index: usize, ordering_index: usize) -> u64 {
    let slot = ((algorithm_index as u64) << 32) | ordering_index as u64;
    splitmix64(base_seed ^ splitmix64(slot))
}

/// Runs one base algorithm on one vertex ordering.
///
/// The visit order is taken from `ordering` wherever the algorithm leaves it
/// free, so the result is deterministic in (graph, algorithm, ordering).
pub fn partition(
    graph: &Graph,
    algorithm: BaseAlgorithm,
    ordering: &VertexOrdering,
) -> DisjointPartition {
    let raw = match algorithm {
        BaseAlgorithm::Louvain => louvain::louvain(graph, ordering),
        BaseAlgorithm::LabelPropagation => label_propagation::label_propagation(graph, ordering),
        BaseAlgorithm::GreedyModularity => greedy_modularity::greedy_modularity(graph),
    };
    DisjointPartition::from_raw(&raw, algorithm.name(), ordering.seed())
}

/// Runs every algorithm on K seeded orderings derived from `base_seed`.
pub fn build_ensemble(
    graph: &Graph,
    algorithms: &[BaseAlgorithm],
    k: usize,
    base_seed: u64,
) -> BaseEnsemble {
    let jobs: Vec<(usize, BaseAlgorithm, usize)> = algorithms
        .iter()
        .enumerate()
        .flat_map(|(m, &alg)| (0..k).map(move |i| (m, alg, i)))
        .collect();
    // Each run is a pure function of (graph, seed); the ordered collect makes
    // the ensemble independent of scheduling.
    let partitions: Vec<DisjointPartition> = jobs
        .par_iter()
        .map(|&(m, alg, i)| {
            let ordering = random_ordering(graph, ordering_seed(base_seed, m, i));
            partition(graph, alg, &ordering)
        })
        .collect();
    BaseEnsemble::new(partitions)
}

/// Parses a `<label> <community-id>` document into a partition over `graph`.
pub fn ingest_partition(text: &str, graph: &Graph) -> Result<DisjointPartition> {
    let n = graph.vertex_count();
    let mut raw: Vec<Option<String>> = vec![None; n];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [label, community] = tokens.as_slice() else {
            return Err(EncodError::Parse {
                line: lineno + 1,
                msg: format!("expected '<vertex> <community>', found {} tokens", tokens.len()),
            });
        };
        let v = graph
            .vertex_by_label(label)
            .ok_or_else(|| EncodError::Label((*label).to_owned()))?;
        if raw[v].is_some() {
            return Err(EncodError::Duplicate((*label).to_owned()));
        }
        raw[v] = Some((*community).to_owned());
    }
    if let Some(missing) = raw.iter().position(|c| c.is_none()) {
        return Err(EncodError::Coverage(format!(
            "vertex {} has no community assignment",
            graph.label(missing)
        )));
    }
    // Compact arbitrary community tokens in vertex-id first-appearance order.
    let mut remap: HashMap<String, usize> = HashMap::new();
    let mut assignment = Vec::with_capacity(n);
    for token in raw.into_iter().flatten() {
        let next = remap.len();
        assignment.push(*remap.entry(token).or_insert(next));
    }
    let partition = DisjointPartition {
        community_count: remap.len(),
        assignment,
        algorithm: "external".to_owned(),
        ordering_seed: 0,
    };
    partition.validate()?;
    Ok(partition)
}

/// Newman-Girvan modularity Q = sum_c [e_c/m - (d_c/2m)^2].
pub fn modularity(graph: &Graph, partition: &DisjointPartition) -> f64 {
    let m = graph.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let c = partition.community_count();
    let mut intra = vec![0usize; c];
    let mut degree = vec![0usize; c];
    for &(u, v) in graph.edges() {
        if partition.community_of(u) == partition.community_of(v) {
            intra[partition.community_of(u)] += 1;
        }
    }
    for v in 0..graph.vertex_count() {
        degree[partition.community_of(v)] += graph.degree(v);
    }
    (0..c)
        .map(|i| intra[i] as f64 / m - (degree[i] as f64 / (2.0 * m)).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_ordering;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph(text: &str) -> Graph {
        Graph::from_edge_list_str(text).unwrap()
    }

    fn two_triangles() -> Graph {
        graph("a b\nb c\nc a\nd e\ne f\nf d")
    }

    #[test]
    fn disconnected_triangles_are_found_by_every_algorithm() {
        let g = two_triangles();
        for alg in BaseAlgorithm::ALL {
            for seed in [0u64, 1, 2] {
                let ordering = random_ordering(&g, seed);
                let p = partition(&g, alg, &ordering);
                p.validate().unwrap();
                assert_eq!(p.community_count(), 2, "{} seed {seed}", alg.name());
                let comms = p.communities();
                let tri_a: VertexSet = [0, 1, 2].into_iter().collect();
                let tri_b: VertexSet = [3, 4, 5].into_iter().collect();
                assert!(comms.contains(&tri_a) && comms.contains(&tri_b));
            }
        }
    }

    #[test]
    fn label_propagation_on_edgeless_graph_gives_singletons() {
        let g = graph("a\nb\nc\nd");
        let p = partition(
            &g,
            BaseAlgorithm::LabelPropagation,
            &random_ordering(&g, 5),
        );
        assert_eq!(p.community_count(), 4);
    }

    #[test]
    fn empty_graph_gives_empty_partition() {
        let g = graph("");
        for alg in BaseAlgorithm::ALL {
            let p = partition(&g, alg, &random_ordering(&g, 1));
            assert_eq!(p.community_count(), 0);
            assert_eq!(p.vertex_count(), 0);
        }
    }

    #[test]
    fn single_vertex_gives_one_singleton() {
        let g = graph("x");
        for alg in BaseAlgorithm::ALL {
            let p = partition(&g, alg, &random_ordering(&g, 1));
            assert_eq!(p.community_count(), 1);
        }
    }

    /// Brute-force modularity: count intra edges and degrees straight from
    /// the edge list, independently of `modularity`'s bucketing.
    fn modularity_oracle(g: &Graph, assignment: &[usize]) -> f64 {
        let m = g.edge_count() as f64;
        if m == 0.0 {
            return 0.0;
        }
        let c = assignment.iter().copied().max().map_or(0, |x| x + 1);
        let mut q = 0.0;
        for comm in 0..c {
            let members: Vec<usize> = (0..g.vertex_count())
                .filter(|&v| assignment[v] == comm)
                .collect();
            let mut e_c = 0.0;
            for (i, &u) in members.iter().enumerate() {
                for &v in &members[i + 1..] {
                    if g.has_edge(u, v) {
                        e_c += 1.0;
                    }
                }
            }
            let d_c: usize = members.iter().map(|&v| g.degree(v)).sum();
            q += e_c / m - (d_c as f64 / (2.0 * m)).powi(2);
        }
        q
    }

    fn planted_two_block(n: usize, p_in: f64, p_out: f64, seed: u64) -> (Graph, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut text = String::new();
        let block = |v: usize| v % 2;
        for u in 0..n {
            text.push_str(&format!("{u}\n"));
            for v in (u + 1)..n {
                let p = if block(u) == block(v) { p_in } else { p_out };
                if rng.random::<f64>() < p {
                    text.push_str(&format!("{u} {v}\n"));
                }
            }
        }
        let g = graph(&text);
        let planted = (0..n).map(block).collect();
        (g, planted)
    }

    #[test]
    fn louvain_reaches_planted_two_block_modularity() {
        let (g, planted) = planted_two_block(30, 0.5, 0.02, 42);
        let q_planted = modularity_oracle(&g, &planted);
        for seed in [1u64, 2, 3] {
            let p = partition(&g, BaseAlgorithm::Louvain, &random_ordering(&g, seed));
            let q = modularity_oracle(&g, p.assignment());
            assert!(
                q >= q_planted - 0.05,
                "louvain Q {q} below planted Q {q_planted} - 0.05"
            );
        }
    }

    #[test]
    fn louvain_never_decreases_modularity_from_singletons() {
        for seed in 0..5u64 {
            let (g, _) = planted_two_block(24, 0.4, 0.1, seed);
            let p = partition(&g, BaseAlgorithm::Louvain, &random_ordering(&g, seed));
            let q_singletons = modularity_oracle(&g, &(0..24).collect::<Vec<_>>());
            assert!(modularity(&g, &p) >= q_singletons);
        }
    }

    #[test]
    fn ensemble_counts_and_xi() {
        let g = two_triangles();
        let single = build_ensemble(&g, &[BaseAlgorithm::Louvain], 1, 9);
        assert_eq!(single.partitions().len(), 1);

        let full = build_ensemble(&g, &BaseAlgorithm::ALL, 8, 9);
        assert_eq!(full.partitions().len(), 24);
        let xi: usize = full.partitions().iter().map(|p| p.community_count()).sum();
        assert_eq!(full.total_communities(), xi);
    }

    #[test]
    fn ensemble_is_reproducible() {
        let (g, _) = planted_two_block(20, 0.4, 0.05, 3);
        let a = build_ensemble(&g, &BaseAlgorithm::ALL, 4, 77);
        let b = build_ensemble(&g, &BaseAlgorithm::ALL, 4, 77);
        assert_eq!(a.partitions(), b.partitions());
    }

    #[test]
    fn every_ensemble_partition_is_valid() {
        let (g, _) = planted_two_block(26, 0.35, 0.08, 12);
        let ens = build_ensemble(&g, &BaseAlgorithm::ALL, 3, 5);
        for p in ens.partitions() {
            p.validate().unwrap();
            assert_eq!(p.vertex_count(), g.vertex_count());
        }
    }

    #[test]
    fn ingest_basic_partition() {
        let g = graph("a b\nb c");
        let p = ingest_partition("a 0\nb 0\nc 1", &g).unwrap();
        assert_eq!(p.community_count(), 2);
        assert_eq!(p.assignment(), &[0, 0, 1]);
        assert_eq!(p.algorithm(), "external");
    }

    #[test]
    fn ingest_compacts_sparse_ids() {
        let g = graph("a b\nb c");
        let p = ingest_partition("a 5\nb 5\nc 9", &g).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 1]);
    }

    #[test]
    fn ingest_reports_missing_vertex_by_name() {
        let g = graph("a b\nb c");
        let err = ingest_partition("a 0\nb 0", &g).unwrap_err();
        match err {
            EncodError::Coverage(msg) => assert!(msg.contains('c'), "{msg}"),
            other => panic!("expected coverage error, got {other}"),
        }
    }

    #[test]
    fn ingest_rejects_unknown_and_duplicate_labels() {
        let g = graph("a b");
        assert!(matches!(
            ingest_partition("a 0\nb 0\nz 1", &g),
            Err(EncodError::Label(_))
        ));
        assert!(matches!(
            ingest_partition("a 0\na 1\nb 0", &g),
            Err(EncodError::Duplicate(_))
        ));
    }

    #[test]
    fn partition_round_trip() {
        let g = two_triangles();
        let p = partition(&g, BaseAlgorithm::Louvain, &random_ordering(&g, 4));
        let again = ingest_partition(&p.to_partition_string(&g), &g).unwrap();
        assert_eq!(again.assignment(), p.assignment());
    }

    #[test]
    fn modularity_single_community_is_zero() {
        let g = two_triangles();
        let p = ingest_partition("a 0\nb 0\nc 0\nd 0\ne 0\nf 0", &g).unwrap();
        assert!(modularity(&g, &p).abs() < 1e-15);
    }

    #[test]
    fn modularity_split_triangles_is_half() {
        let g = two_triangles();
        let p = ingest_partition("a 0\nb 0\nc 0\nd 1\ne 1\nf 1", &g).unwrap();
        assert!((modularity(&g, &p) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn modularity_zero_edges_is_zero() {
        let g = graph("a\nb");
        let p = ingest_partition("a 0\nb 1", &g).unwrap();
        assert_eq!(modularity(&g, &p), 0.0);
    }

    #[test]
    fn modularity_matches_edge_counting_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..10u64 {
            let (g, _) = planted_two_block(18, 0.3, 0.15, trial);
            let raw: Vec<usize> = (0..18).map(|_| rng.random_range(0..4)).collect();
            let p = DisjointPartition::from_raw(&raw, "random", 0);
            let q = modularity(&g, &p);
            let oracle = modularity_oracle(&g, p.assignment());
            assert!((q - oracle).abs() < 1e-12, "trial {trial}: {q} vs {oracle}");
        }
    }

    #[test]
    fn ordering_seeds_are_splittable() {
        assert_ne!(ordering_seed(42, 0, 0), ordering_seed(42, 0, 1));
        assert_ne!(ordering_seed(42, 0, 0), ordering_seed(42, 1, 0));
        assert_ne!(ordering_seed(42, 0, 0), ordering_seed(43, 0, 0));
        assert_eq!(ordering_seed(42, 2, 5), ordering_seed(42, 2, 5));
    }
}
