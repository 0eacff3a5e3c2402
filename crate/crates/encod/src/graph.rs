//! Undirected simple graph with string labels and dense internal ids.
//!
//! All algorithms in this crate work on dense ids `0..n`; labels only matter
//! at the file boundary. Graphs are immutable after construction and safe to
//! share across threads.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{EncodError, Result};

/// A set of internal vertex ids, used to restrict operations to an induced
/// subgraph and to represent community membership.
pub type VertexSet = BTreeSet<usize>;

/// Immutable undirected simple graph.
///
/// No self-loops, no duplicate edges; adjacency lists are sorted and
/// symmetric; internal ids are dense `0..n` in label first-appearance order.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

/// One parsed edge-list item, in document order.
enum Item {
    Edge(String, String),
    Vertex(String),
}

impl Graph {
    /// Builds a graph from items in first-appearance label order. Duplicate
    /// edges and self-loops are dropped silently.
    fn build(items: Vec<Item>) -> Graph {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let intern = |name: &str, labels: &mut Vec<String>, index: &mut HashMap<String, usize>| {
            if let Some(&id) = index.get(name) {
                return id;
            }
            let id = labels.len();
            labels.push(name.to_owned());
            index.insert(name.to_owned(), id);
            id
        };

        let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
        for item in &items {
            match item {
                Item::Edge(a, b) => {
                    let u = intern(a, &mut labels, &mut index);
                    let v = intern(b, &mut labels, &mut index);
                    if u != v {
                        edge_set.insert((u.min(v), u.max(v)));
                    }
                }
                Item::Vertex(s) => {
                    intern(s, &mut labels, &mut index);
                }
            }
        }

        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(edge_set.len());
        for &(u, v) in &edge_set {
            adjacency[u].push(v);
            adjacency[v].push(u);
            edges.push((u, v));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }

        Graph {
            adjacency,
            edges,
            labels,
            index,
        }
    }

    /// Builds a graph on vertices `0..n` with decimal labels from a list of
    /// id pairs. Duplicates and self-loops are dropped as in parsing.
    pub fn from_edges(n: usize, edge_pairs: &[(usize, usize)]) -> Graph {
        let mut items: Vec<Item> = (0..n).map(|v| Item::Vertex(v.to_string())).collect();
        items.extend(
            edge_pairs
                .iter()
                .map(|&(u, v)| Item::Edge(u.to_string(), v.to_string())),
        );
        Graph::build(items)
    }

    /// Parses an edge-list document: one edge per line as `<label> <label>`,
    /// single-token lines declare isolated vertices, `#` starts a comment.
    pub fn from_edge_list_str(text: &str) -> Result<Graph> {
        let mut items = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                [single] => items.push(Item::Vertex((*single).to_owned())),
                [a, b] => items.push(Item::Edge((*a).to_owned(), (*b).to_owned())),
                _ => {
                    return Err(EncodError::Parse {
                        line: lineno + 1,
                        msg: format!("expected 1 or 2 tokens, found {}", tokens.len()),
                    })
                }
            }
        }
        Ok(Graph::build(items))
    }

    /// Renders the graph back to the edge-list format. Isolated vertices are
    /// written as single-token lines.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            out.push_str(&format!("{} {}\n", self.labels[u], self.labels[v]));
        }
        for v in 0..self.vertex_count() {
            if self.adjacency[v].is_empty() {
                out.push_str(&format!("{}\n", self.labels[v]));
            }
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as (u, v) with u < v, in ascending order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// The full vertex set `0..n`.
    pub fn all_vertices(&self) -> VertexSet {
        (0..self.vertex_count()).collect()
    }
}

/// A permutation of the vertex ids together with the seed that produced it.
#[derive(Debug, Clone)]
pub struct VertexOrdering {
    permutation: Vec<usize>,
    seed: u64,
}

impl VertexOrdering {
    /// Identity ordering, used when an algorithm's visit order is irrelevant.
    pub fn identity(n: usize) -> VertexOrdering {
        VertexOrdering {
            permutation: (0..n).collect(),
            seed: 0,
        }
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }
}

/// Uniformly random vertex ordering, deterministic in `seed`
/// (Fisher-Yates over a seeded generator).
pub fn random_ordering(graph: &Graph, seed: u64) -> VertexOrdering {
    let n = graph.vertex_count();
    let mut permutation: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        permutation.swap(i, j);
    }
    VertexOrdering { permutation, seed }
}

/// Fraction of connected pairs among `v`'s neighbors inside the induced
/// subgraph `G[restrict]`; 0 when `v` has fewer than two neighbors there.
pub fn clustering_coefficient(graph: &Graph, v: usize, restrict: &VertexSet) -> Result<f64> {
    if !restrict.contains(&v) {
        return Err(EncodError::Domain(format!(
            "vertex {} is not in the restriction set",
            graph.label(v)
        )));
    }
    let inside: Vec<usize> = graph
        .neighbors(v)
        .iter()
        .copied()
        .filter(|u| restrict.contains(u))
        .collect();
    let k = inside.len();
    if k < 2 {
        return Ok(0.0);
    }
    let mut connected = 0usize;
    for i in 0..k {
        for j in (i + 1)..k {
            if graph.has_edge(inside[i], inside[j]) {
                connected += 1;
            }
        }
    }
    Ok(connected as f64 / (k * (k - 1) / 2) as f64)
}

/// BFS inside `G[restrict]`, dense result: `dist[v] = usize::MAX` when `v` is
/// outside the restriction or unreachable.
pub(crate) fn bfs_dense(graph: &Graph, source: usize, restrict: &VertexSet) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut dist = vec![usize::MAX; n];
    dist[source] = 0;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &w in graph.neighbors(u) {
            if dist[w] == usize::MAX && restrict.contains(&w) {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Unweighted shortest-path distances from `source` within the induced
/// subgraph `G[restrict]`. Unreachable vertices are absent from the map.
pub fn bfs_distances(
    graph: &Graph,
    source: usize,
    restrict: &VertexSet,
) -> Result<HashMap<usize, usize>> {
    if !restrict.contains(&source) {
        return Err(EncodError::Domain(format!(
            "source {} is not in the restriction set",
            graph.label(source)
        )));
    }
    let dense = bfs_dense(graph, source, restrict);
    Ok(dense
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d != usize::MAX)
        .map(|(v, &d)| (v, d))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(text: &str) -> Graph {
        Graph::from_edge_list_str(text).unwrap()
    }

    #[test]
    fn load_basic_edge_list() {
        let g = graph("a b\nb c");
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.label(0), "a");
        assert_eq!(g.vertex_by_label("c"), Some(2));
    }

    #[test]
    fn load_drops_duplicates_and_loops() {
        let g = graph("a b\nb a\na a");
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn load_single_token_is_isolated_vertex() {
        let g = graph("x");
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn load_rejects_malformed_line_with_line_number() {
        let err = Graph::from_edge_list_str("a b\na b 1.5").unwrap_err();
        match err {
            EncodError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn load_skips_comments_and_blank_lines() {
        let g = graph("# header\n\na b\n   \n# trailing");
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn degree_sum_is_twice_edge_count() {
        let g = graph("a b\nb c\nc a\nc d\ne");
        let degree_sum: usize = (0..g.vertex_count()).map(|v| g.degree(v)).sum();
        assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = graph("a b\nb c\nd");
        let again = graph(&g.to_edge_list_string());
        assert_eq!(again.vertex_count(), g.vertex_count());
        assert_eq!(again.edges(), g.edges());
    }

    #[test]
    fn ordering_single_vertex() {
        let g = graph("x");
        for seed in [0u64, 7, 982] {
            assert_eq!(random_ordering(&g, seed).permutation(), &[0]);
        }
    }

    #[test]
    fn ordering_deterministic_in_seed() {
        let g = graph("a b\nb c\nc d\nd e");
        let a = random_ordering(&g, 7);
        let b = random_ordering(&g, 7);
        assert_eq!(a.permutation(), b.permutation());
        assert_eq!(a.seed(), 7);
    }

    #[test]
    fn orderings_differ_across_seeds() {
        // n=5 has 120 permutations; over 100 seed pairs at least 99 must differ.
        let g = graph("a b\nb c\nc d\nd e");
        let mut differing = 0;
        for s in 0..100u64 {
            let a = random_ordering(&g, 2 * s);
            let b = random_ordering(&g, 2 * s + 1);
            if a.permutation() != b.permutation() {
                differing += 1;
            }
        }
        assert!(differing >= 99, "only {differing} of 100 seed pairs differed");
    }

    #[test]
    fn ordering_is_bijection() {
        let g = graph("a b\nb c\nc d\nd e\ne f\nf g");
        for seed in 0..50u64 {
            let ord = random_ordering(&g, seed);
            let mut seen = vec![false; g.vertex_count()];
            for &v in ord.permutation() {
                assert!(!seen[v]);
                seen[v] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn clustering_triangle_is_one() {
        let g = graph("a b\nb c\nc a");
        let all = g.all_vertices();
        assert_eq!(clustering_coefficient(&g, 0, &all).unwrap(), 1.0);
    }

    #[test]
    fn clustering_star_center_is_zero() {
        let g = graph("c a\nc b\nc d");
        let all = g.all_vertices();
        assert_eq!(clustering_coefficient(&g, 0, &all).unwrap(), 0.0);
    }

    #[test]
    fn clustering_requires_membership() {
        let g = graph("a b\nb c");
        let restrict: VertexSet = [1, 2].into_iter().collect();
        assert!(clustering_coefficient(&g, 0, &restrict).is_err());
    }

    /// Brute-force oracle: enumerate neighbor pairs of v inside the
    /// restriction and count edges directly from the edge list.
    fn clustering_oracle(g: &Graph, v: usize, restrict: &VertexSet) -> f64 {
        let neigh: Vec<usize> = restrict
            .iter()
            .copied()
            .filter(|&u| u != v && g.edges().contains(&(u.min(v), u.max(v))))
            .collect();
        if neigh.len() < 2 {
            return 0.0;
        }
        let mut pairs = 0usize;
        let mut closed = 0usize;
        for (i, &a) in neigh.iter().enumerate() {
            for &b in &neigh[i + 1..] {
                pairs += 1;
                if g.edges().contains(&(a.min(b), a.max(b))) {
                    closed += 1;
                }
            }
        }
        closed as f64 / pairs as f64
    }

    #[test]
    fn clustering_matches_pair_enumeration_oracle() {
        // 4-cycle plus one chord.
        let g = graph("a b\nb c\nc d\nd a\na c");
        let all = g.all_vertices();
        for v in 0..g.vertex_count() {
            assert_eq!(
                clustering_coefficient(&g, v, &all).unwrap(),
                clustering_oracle(&g, v, &all)
            );
        }
        // Restricted variant on a larger random-ish graph.
        let g = graph("0 1\n1 2\n2 3\n3 0\n0 2\n2 4\n4 5\n5 3\n1 5");
        let restrict: VertexSet = [0, 1, 2, 3, 5].into_iter().collect();
        for &v in &restrict {
            assert_eq!(
                clustering_coefficient(&g, v, &restrict).unwrap(),
                clustering_oracle(&g, v, &restrict)
            );
        }
    }

    #[test]
    fn bfs_path_distances() {
        let g = graph("a b\nb c");
        let all = g.all_vertices();
        let d = bfs_distances(&g, 0, &all).unwrap();
        assert_eq!(d[&0], 0);
        assert_eq!(d[&1], 1);
        assert_eq!(d[&2], 2);
    }

    #[test]
    fn bfs_induced_disconnection() {
        let g = graph("a b\nb c");
        let restrict: VertexSet = [0, 2].into_iter().collect();
        let d = bfs_distances(&g, 0, &restrict).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[&0], 0);
    }

    #[test]
    fn bfs_requires_source_in_restriction() {
        let g = graph("a b");
        let restrict: VertexSet = [1].into_iter().collect();
        assert!(bfs_distances(&g, 0, &restrict).is_err());
    }

    /// Floyd-Warshall oracle over the induced subgraph.
    fn floyd_warshall(g: &Graph, restrict: &VertexSet) -> Vec<Vec<usize>> {
        const INF: usize = usize::MAX / 4;
        let n = g.vertex_count();
        let mut d = vec![vec![INF; n]; n];
        for &v in restrict {
            d[v][v] = 0;
        }
        for &(u, v) in g.edges() {
            if restrict.contains(&u) && restrict.contains(&v) {
                d[u][v] = 1;
                d[v][u] = 1;
            }
        }
        for &k in restrict {
            for &i in restrict {
                for &j in restrict {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        d
    }

    fn random_test_graph(n: usize, p: f64, seed: u64) -> Graph {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut text = String::new();
        for u in 0..n {
            text.push_str(&format!("{u}\n"));
            for v in (u + 1)..n {
                if rng.random::<f64>() < p {
                    text.push_str(&format!("{u} {v}\n"));
                }
            }
        }
        graph(&text)
    }

    #[test]
    fn bfs_matches_floyd_warshall_oracle() {
        const INF: usize = usize::MAX / 4;
        let g = random_test_graph(20, 0.15, 11);
        let all = g.all_vertices();
        let fw = floyd_warshall(&g, &all);
        for s in 0..g.vertex_count() {
            let d = bfs_distances(&g, s, &all).unwrap();
            for v in 0..g.vertex_count() {
                match d.get(&v) {
                    Some(&dv) => assert_eq!(dv, fw[s][v]),
                    None => assert!(fw[s][v] >= INF),
                }
            }
        }
    }

    #[test]
    fn bfs_triangle_inequality() {
        let g = random_test_graph(16, 0.2, 3);
        let all = g.all_vertices();
        let dist: Vec<_> = (0..g.vertex_count())
            .map(|s| bfs_dense(&g, s, &all))
            .collect();
        for a in 0..g.vertex_count() {
            for b in 0..g.vertex_count() {
                for c in 0..g.vertex_count() {
                    let (ab, bc, ac) = (dist[a][b], dist[b][c], dist[a][c]);
                    if ab != usize::MAX && bc != usize::MAX {
                        assert!(ac != usize::MAX && ac <= ab + bc);
                    }
                }
            }
        }
    }
}
