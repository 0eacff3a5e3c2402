//! Overlapping community covers: a list of vertex sets whose union is the
//! whole vertex set, each carrying the similarity threshold its members
//! satisfy, plus a per-vertex membership index kept consistent with the
//! community list.

use crate::error::{EncodError, Result};
use crate::graph::{Graph, VertexSet};
use crate::partition::DisjointPartition;

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapCover {
    communities: Vec<VertexSet>,
    thresholds: Vec<f64>,
    memberships: Vec<Vec<usize>>,
    n: usize,
}

impl OverlapCover {
    /// One singleton community per vertex, each with threshold 1.0 (the
    /// supremum of cosine similarity, standing in for an arbitrarily high
    /// initial threshold).
    pub fn singletons(n: usize) -> OverlapCover {
        OverlapCover {
            communities: (0..n).map(|v| VertexSet::from([v])).collect(),
            thresholds: vec![1.0; n],
            memberships: (0..n).map(|v| vec![v]).collect(),
            n,
        }
    }

    /// Builds a cover from explicit communities, all thresholds 1.0.
    pub fn from_communities(communities: Vec<VertexSet>, n: usize) -> OverlapCover {
        let thresholds = vec![1.0; communities.len()];
        OverlapCover::from_parts(communities, thresholds, n)
    }

    pub fn from_parts(
        communities: Vec<VertexSet>,
        thresholds: Vec<f64>,
        n: usize,
    ) -> OverlapCover {
        assert_eq!(communities.len(), thresholds.len());
        let mut memberships = vec![Vec::new(); n];
        for (j, community) in communities.iter().enumerate() {
            for &v in community {
                memberships[v].push(j);
            }
        }
        OverlapCover {
            communities,
            thresholds,
            memberships,
            n,
        }
    }

    /// A disjoint partition viewed as a cover.
    pub fn from_partition(partition: &DisjointPartition) -> OverlapCover {
        OverlapCover::from_communities(partition.communities(), partition.vertex_count())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn communities(&self) -> &[VertexSet] {
        &self.communities
    }

    pub fn community(&self, j: usize) -> &VertexSet {
        &self.communities[j]
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn set_threshold(&mut self, j: usize, tau: f64) {
        self.thresholds[j] = tau;
    }

    /// Community ids containing `v`, ascending.
    pub fn memberships(&self, v: usize) -> &[usize] {
        &self.memberships[v]
    }

    /// Number of communities containing both `u` and `v`.
    pub fn shared_count(&self, u: usize, v: usize) -> usize {
        let (mut i, mut j) = (0, 0);
        let (mu, mv) = (&self.memberships[u], &self.memberships[v]);
        let mut shared = 0;
        while i < mu.len() && j < mv.len() {
            match mu[i].cmp(&mv[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    shared += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        shared
    }

    /// Community ids containing both `u` and `v`, ascending.
    pub fn shared_communities(&self, u: usize, v: usize) -> Vec<usize> {
        let (mut i, mut j) = (0, 0);
        let (mu, mv) = (&self.memberships[u], &self.memberships[v]);
        let mut shared = Vec::new();
        while i < mu.len() && j < mv.len() {
            match mu[i].cmp(&mv[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    shared.push(mu[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        shared
    }

    /// Adds `v` to community `j`; no-op if already a member.
    pub fn insert_member(&mut self, j: usize, v: usize) {
        if self.communities[j].insert(v) {
            let pos = self.memberships[v].binary_search(&j).unwrap_err();
            self.memberships[v].insert(pos, j);
        }
    }

    /// Removes `v` from community `j`; no-op if not a member.
    pub fn remove_member(&mut self, j: usize, v: usize) {
        if self.communities[j].remove(&v) {
            let pos = self.memberships[v]
                .binary_search(&j)
                .expect("membership index consistent");
            self.memberships[v].remove(pos);
        }
    }

    /// Replaces the whole community list, recomputing the membership index.
    pub fn replace(&mut self, communities: Vec<VertexSet>, thresholds: Vec<f64>) {
        *self = OverlapCover::from_parts(communities, thresholds, self.n);
    }

    /// Checks the cover conditions: union of communities is V and no
    /// community is empty.
    pub fn validate(&self) -> Result<()> {
        for (j, community) in self.communities.iter().enumerate() {
            if community.is_empty() {
                return Err(EncodError::InvariantViolation(format!(
                    "community {j} is empty"
                )));
            }
            if let Some(&v) = community.iter().next_back() {
                if v >= self.n {
                    return Err(EncodError::InvariantViolation(format!(
                        "community {j} contains out-of-range vertex {v}"
                    )));
                }
            }
        }
        if let Some(v) = self.memberships.iter().position(|m| m.is_empty()) {
            return Err(EncodError::InvariantViolation(format!(
                "vertex {v} belongs to no community"
            )));
        }
        Ok(())
    }

    /// One community per line as space-separated vertex labels, members in
    /// ascending internal-id order.
    pub fn to_cover_string(&self, graph: &Graph) -> String {
        let mut out = String::new();
        for community in &self.communities {
            let line: Vec<&str> = community.iter().map(|&v| graph.label(v)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Sidecar `<community-index> <threshold>` lines.
    pub fn to_thresholds_string(&self) -> String {
        let mut out = String::new();
        for (j, tau) in self.thresholds.iter().enumerate() {
            out.push_str(&format!("{j} {tau}\n"));
        }
        out
    }
}

/// Parses a cover document (one community per line, space-separated labels).
///
/// Vertices missing from every line are repaired into singleton communities;
/// their labels are returned so callers can warn.
pub fn parse_cover(text: &str, graph: &Graph) -> Result<(OverlapCover, Vec<String>)> {
    let n = graph.vertex_count();
    let mut communities: Vec<VertexSet> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut community = VertexSet::new();
        for token in line.split_whitespace() {
            let v = graph
                .vertex_by_label(token)
                .ok_or_else(|| EncodError::Label(token.to_owned()))?;
            community.insert(v);
        }
        communities.push(community);
    }
    let mut covered = vec![false; n];
    for community in &communities {
        for &v in community {
            covered[v] = true;
        }
    }
    let mut repaired = Vec::new();
    for (v, seen) in covered.iter().enumerate() {
        if !seen {
            communities.push(VertexSet::from([v]));
            repaired.push(graph.label(v).to_owned());
        }
    }
    Ok((OverlapCover::from_communities(communities, n), repaired))
}
