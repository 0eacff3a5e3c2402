//! Per-vertex feature vectors derived from the base ensemble.
//!
//! For every base community the vertex's involvement is turned into a
//! distance, and the distance vector is normalized into a probability vector
//! whose entries are strictly positive and sum to one. Explicit vertex
//! features can be ingested instead, row-normalized to the same contract.

use std::str::FromStr;

use crate::error::{EncodError, Result};
use crate::graph::{bfs_dense, clustering_coefficient, Graph, VertexSet};
use crate::partition::BaseEnsemble;

/// How strongly a vertex belongs to a base community, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvolvementKind {
    Closeness,
    Permanence,
    Binary,
}

impl InvolvementKind {
    pub fn name(&self) -> &'static str {
        match self {
            InvolvementKind::Closeness => "closeness",
            InvolvementKind::Permanence => "permanence",
            InvolvementKind::Binary => "binary",
        }
    }
}

impl FromStr for InvolvementKind {
    type Err = EncodError;

    fn from_str(s: &str) -> Result<InvolvementKind> {
        match s {
            "closeness" => Ok(InvolvementKind::Closeness),
            "permanence" => Ok(InvolvementKind::Permanence),
            "binary" => Ok(InvolvementKind::Binary),
            other => Err(EncodError::Config(format!(
                "unknown involvement kind '{other}' (expected closeness, permanence, or binary)"
            ))),
        }
    }
}

/// Closeness: |C| divided by the sum of shortest-path distances from `v` to
/// the members of `C` inside `G[C]`. Members unreachable in the induced
/// subgraph contribute distance |C|; the result is clamped to [0, 1].
fn closeness(graph: &Graph, v: usize, community: &VertexSet) -> f64 {
    let size = community.len();
    let dist = bfs_dense(graph, v, community);
    let mut total = 0usize;
    for &u in community {
        total += if dist[u] == usize::MAX { size } else { dist[u] };
    }
    if total == 0 {
        return 1.0;
    }
    (size as f64 / total as f64).min(1.0)
}

/// Raw permanence I/(D*Emax) - (1 - c_in), rescaled from [-1, 1] to [0, 1].
///
/// With only (graph, v, C) available the exterior is treated as a single
/// community, so Emax is the external degree of v. Degenerate terms: Emax = 0
/// is treated as 1, and an isolated vertex has raw permanence 0.
fn permanence(graph: &Graph, v: usize, community: &VertexSet) -> f64 {
    let total_degree = graph.degree(v);
    let raw = if total_degree == 0 {
        0.0
    } else {
        let internal = graph
            .neighbors(v)
            .iter()
            .filter(|u| community.contains(u))
            .count();
        let external = total_degree - internal;
        let e_max = external.max(1) as f64;
        let c_in = clustering_coefficient(graph, v, community)
            .expect("membership checked by involvement");
        internal as f64 / (total_degree as f64 * e_max) - (1.0 - c_in)
    };
    (raw + 1.0) / 2.0
}

/// Involvement of `v` in `community`; errors when `v` is not a member.
pub fn involvement(
    graph: &Graph,
    v: usize,
    community: &VertexSet,
    kind: InvolvementKind,
) -> Result<f64> {
    if !community.contains(&v) {
        return Err(EncodError::Domain(format!(
            "vertex {} is not a member of the community",
            graph.label(v)
        )));
    }
    Ok(match kind {
        InvolvementKind::Binary => 1.0,
        InvolvementKind::Closeness => closeness(graph, v, community),
        InvolvementKind::Permanence => permanence(graph, v, community),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    Ensemble,
    Explicit,
}

/// Dense per-vertex probability vectors of uniform dimension.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    n: usize,
    dim: usize,
    mode: FeatureMode,
}

impl FeatureMatrix {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> FeatureMode {
        self.mode
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.dim..(v + 1) * self.dim]
    }

    /// Renders the `<label> <v1> ... <vd>` document format.
    pub fn to_feature_string(&self, graph: &Graph) -> String {
        let mut out = String::new();
        for v in 0..self.n {
            out.push_str(graph.label(v));
            for x in self.row(v) {
                out.push_str(&format!(" {x:.17}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the feature matrix from the ensemble: distance 1 - involvement for
/// member communities, maximal distance 1 for the rest, then the
/// distance-to-probability normalization
/// `P(C_i|v) = (D_v - AF_i + 1) / (xi * D_v + xi - sum_k AF_k)`.
pub fn extract_features(
    ensemble: &BaseEnsemble,
    graph: &Graph,
    kind: InvolvementKind,
) -> Result<FeatureMatrix> {
    let xi = ensemble.total_communities();
    if xi == 0 {
        return Err(EncodError::EmptyEnsemble);
    }
    let n = graph.vertex_count();

    // Member involvements, computed once per (partition, community).
    let mut member_distance: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut member_column: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut column = 0usize;
    for part in ensemble.partitions() {
        for community in part.communities() {
            for &v in &community {
                let inv = involvement(graph, v, &community, kind)?;
                member_distance[v].push(1.0 - inv);
                member_column[v].push(column);
            }
            column += 1;
        }
    }
    debug_assert_eq!(column, xi);

    let mut data = vec![0.0; n * xi];
    for v in 0..n {
        let row = &mut data[v * xi..(v + 1) * xi];
        row.fill(1.0);
        for (&col, &d) in member_column[v].iter().zip(&member_distance[v]) {
            row[col] = d;
        }
        let d_max = row.iter().copied().fold(0.0f64, f64::max);
        let sum: f64 = row.iter().sum();
        let denom = xi as f64 * d_max + xi as f64 - sum;
        for x in row.iter_mut() {
            *x = (d_max - *x + 1.0) / denom;
        }
    }

    Ok(FeatureMatrix {
        data,
        n,
        dim: xi,
        mode: FeatureMode::Ensemble,
    })
}

/// Parses `<label> <v1> ... <vd>` rows and L1-normalizes each one.
pub fn ingest_vertex_features(text: &str, graph: &Graph) -> Result<FeatureMatrix> {
    let n = graph.vertex_count();
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut dim: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().expect("non-empty line has a first token");
        let v = graph
            .vertex_by_label(label)
            .ok_or_else(|| EncodError::Label(label.to_owned()))?;
        if rows[v].is_some() {
            return Err(EncodError::Duplicate(label.to_owned()));
        }
        let values: Vec<f64> = tokens
            .map(|t| {
                t.parse::<f64>().map_err(|_| EncodError::Parse {
                    line: lineno + 1,
                    msg: format!("invalid feature value '{t}'"),
                })
            })
            .collect::<Result<_>>()?;
        if values.is_empty() {
            return Err(EncodError::Parse {
                line: lineno + 1,
                msg: "feature row has no values".to_owned(),
            });
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(EncodError::Parse {
                    line: lineno + 1,
                    msg: format!("expected {d} feature values, found {}", values.len()),
                })
            }
            _ => {}
        }
        if let Some(bad) = values.iter().find(|x| **x < 0.0 || !x.is_finite()) {
            return Err(EncodError::Domain(format!(
                "feature value {bad} for vertex {label} is not a finite non-negative number"
            )));
        }
        let total: f64 = values.iter().sum();
        if total == 0.0 {
            return Err(EncodError::DegenerateRow(format!(
                "vertex {label} has an all-zero feature row"
            )));
        }
        rows[v] = Some(values.iter().map(|x| x / total).collect());
    }
    if let Some(missing) = rows.iter().position(|r| r.is_none()) {
        return Err(EncodError::Coverage(format!(
            "vertex {} has no feature row",
            graph.label(missing)
        )));
    }
    let dim = dim.unwrap_or(0);
    let mut data = Vec::with_capacity(n * dim);
    for row in rows.into_iter().flatten() {
        data.extend(row);
    }
    Ok(FeatureMatrix {
        data,
        n,
        dim,
        mode: FeatureMode::Explicit,
    })
}
