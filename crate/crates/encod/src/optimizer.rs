//! Likelihood-driven search for the overlapping cover.
//!
//! Vertices live in feature space; a cover plus its per-community thresholds
//! induces an edge probability for every vertex pair through the membership
//! similarity beta = exp(beta1^2 - beta2^2). The optimizer starts from
//! singleton communities, repeatedly perturbs memberships, refreshes
//! thresholds, and keeps the proposal whenever the joint log likelihood of
//! the observed edges does not drop below the best seen so far.

use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cover::OverlapCover;
use crate::error::{EncodError, Result};
use crate::features::FeatureMatrix;
use crate::graph::{Graph, VertexSet};

/// Floor for the inverted term (s - tau_j + lambda) in beta1/beta2.
const TERM_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityKind {
    Cosine,
    Pearson,
}

impl SimilarityKind {
    pub fn name(&self) -> &'static str {
        match self {
            SimilarityKind::Cosine => "cosine",
            SimilarityKind::Pearson => "pearson",
        }
    }
}

impl FromStr for SimilarityKind {
    type Err = EncodError;

    fn from_str(s: &str) -> Result<SimilarityKind> {
        match s {
            "cosine" => Ok(SimilarityKind::Cosine),
            "pearson" => Ok(SimilarityKind::Pearson),
            other => Err(EncodError::Config(format!(
                "unknown similarity kind '{other}' (expected cosine or pearson)"
            ))),
        }
    }
}

/// Pairwise feature similarity in [0, 1]: cosine directly (feature vectors
/// are non-negative), Pearson mapped by (r + 1)/2.
pub fn similarity(u: &[f64], v: &[f64], kind: SimilarityKind) -> Result<f64> {
    debug_assert_eq!(u.len(), v.len());
    let norm =
        |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm(u) == 0.0 || norm(v) == 0.0 {
        return Err(EncodError::DegenerateVector(
            "similarity of an all-zero vector is undefined".to_owned(),
        ));
    }
    match kind {
        SimilarityKind::Cosine => {
            let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
            Ok(dot / (norm(u) * norm(v)))
        }
        SimilarityKind::Pearson => {
            let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
            let (mu, mv) = (mean(u), mean(v));
            let mut num = 0.0;
            let mut du = 0.0;
            let mut dv = 0.0;
            for (a, b) in u.iter().zip(v) {
                num += (a - mu) * (b - mv);
                du += (a - mu) * (a - mu);
                dv += (b - mv) * (b - mv);
            }
            // Constant probability vectors of equal dimension are identical,
            // so both-degenerate means r = 1; one-degenerate carries no
            // linear relation and maps to the neutral 0.5.
            let r = if du == 0.0 && dv == 0.0 {
                1.0
            } else if du == 0.0 || dv == 0.0 {
                0.0
            } else {
                num / (du.sqrt() * dv.sqrt())
            };
            Ok((r + 1.0) / 2.0)
        }
    }
}

/// Precomputed symmetric similarity matrix with an exact unit diagonal.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    n: usize,
    vals: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_features(features: &FeatureMatrix, kind: SimilarityKind) -> Result<SimilarityMatrix> {
        let n = features.vertex_count();
        let mut vals = vec![1.0; n * n];
        for u in 0..n {
            for v in (u + 1)..n {
                let s = similarity(features.row(u), features.row(v), kind)?;
                vals[u * n + v] = s;
                vals[v * n + u] = s;
            }
        }
        Ok(SimilarityMatrix { n, vals })
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.vals[u * self.n + v]
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }
}

/// Average similarity of `v` with the members of `community`, including the
/// self term when `v` is a member.
pub fn sim_vertex_community(
    community: &VertexSet,
    v: usize,
    sims: &SimilarityMatrix,
) -> f64 {
    if community.is_empty() {
        return 0.0;
    }
    let total: f64 = community.iter().map(|&u| sims.get(u, v)).sum();
    total / community.len() as f64
}

#[inline]
fn inv_term(s: f64, tau: f64, lambda: f64) -> f64 {
    1.0 / (s - tau + lambda).max(TERM_FLOOR)
}

/// Membership similarity beta(u,v) = exp(beta1^2 - beta2^2), where beta1
/// sums (s - tau_j + lambda)^-1 over communities containing both endpoints
/// and beta2 over every other community.
pub fn membership_similarity(
    u: usize,
    v: usize,
    cover: &OverlapCover,
    s: f64,
    lambda: f64,
) -> f64 {
    let shared = cover.shared_communities(u, v);
    let mut beta1 = 0.0;
    let mut total = 0.0;
    let mut si = 0;
    for (j, &tau) in cover.thresholds().iter().enumerate() {
        let term = inv_term(s, tau, lambda);
        total += term;
        if si < shared.len() && shared[si] == j {
            beta1 += term;
            si += 1;
        }
    }
    let beta2 = (total - beta1).max(0.0);
    (beta1 * beta1 - beta2 * beta2).exp()
}

/// Edge probability beta/(1 + beta), strictly increasing in beta.
pub fn edge_probability(beta: f64) -> f64 {
    1.0 / (1.0 + beta.recip())
}

/// log(1 + e^x) without overflow; the exponent is never taken outside
/// [-50, 50].
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 50.0 {
        x
    } else if x < -50.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Exact log likelihood of the graph under (cover, thresholds):
/// `sum_{(u,v) in E} phi(u,v) - sum_{u<v} log(1 + e^phi(u,v))` with
/// `phi = beta1^2 - beta2^2` and lambda recomputed as the maximum threshold.
pub fn log_likelihood(graph: &Graph, cover: &OverlapCover, sims: &SimilarityMatrix) -> f64 {
    let n = graph.vertex_count();
    let lambda = max_threshold(cover);

    // Group identical thresholds so the all-communities sum is one pass over
    // distinct values instead of one over every community.
    let mut taus: Vec<f64> = cover.thresholds().to_vec();
    taus.sort_by(f64::total_cmp);
    let mut hist: Vec<(f64, f64)> = Vec::new();
    for t in taus {
        match hist.last_mut() {
            Some((tau, count)) if *tau == t => *count += 1.0,
            _ => hist.push((t, 1.0)),
        }
    }

    // Pair terms are independent; partial sums are produced per source
    // vertex and reduced in index order, so the result is bit-identical
    // regardless of thread count.
    let thresholds = cover.thresholds();
    let partials: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|u| {
            let adj = graph.neighbors(u);
            let mut ai = adj.partition_point(|&w| w <= u);
            let mu = cover.memberships(u);
            let mut ll = 0.0;
            for v in (u + 1)..n {
                let s = sims.get(u, v);

                let mut beta1 = 0.0;
                let mv = cover.memberships(v);
                let (mut i, mut j) = (0, 0);
                while i < mu.len() && j < mv.len() {
                    match mu[i].cmp(&mv[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            beta1 += inv_term(s, thresholds[mu[i]], lambda);
                            i += 1;
                            j += 1;
                        }
                    }
                }
                let mut total = 0.0;
                for &(tau, count) in &hist {
                    total += count * inv_term(s, tau, lambda);
                }
                let beta2 = (total - beta1).max(0.0);
                let phi = beta1 * beta1 - beta2 * beta2;

                if ai < adj.len() && adj[ai] == v {
                    ll += phi;
                    ai += 1;
                }
                ll -= softplus(phi);
            }
            ll
        })
        .collect();
    partials.iter().sum()
}

/// Convenience entry point matching the operation contract: builds the
/// similarity matrix from features before evaluating.
pub fn log_likelihood_from_features(
    graph: &Graph,
    cover: &OverlapCover,
    features: &FeatureMatrix,
    config: &EncodConfig,
) -> Result<f64> {
    let sims = SimilarityMatrix::from_features(features, config.similarity)?;
    Ok(log_likelihood(graph, cover, &sims))
}

fn max_threshold(cover: &OverlapCover) -> f64 {
    cover
        .thresholds()
        .iter()
        .fold(0.0f64, |acc, &t| acc.max(t))
}

#[inline]
fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Number of communities to add a vertex to: ceil((p1 + |S1|)/|S1|).
pub fn additions_count(s1_len: usize, p1: usize) -> usize {
    ceil_div(p1 + s1_len, s1_len)
}

/// Number of communities to remove a vertex from: ceil((p2 + |S1|)/|S1|).
pub fn removals_count(s1_len: usize, p2: usize) -> usize {
    ceil_div(p2 + s1_len, s1_len)
}

/// One manipulation sweep: every vertex in id order is added to a random
/// draw of communities it is outside of and removed from a random draw of
/// its own, with counts shrinking as its membership grows.
///
/// Degenerate draws (|S2| <= 1, |S1| <= 1) perform nothing on that side; a
/// removal that would empty a community or strip the vertex's last
/// membership is skipped so the cover conditions keep holding.
pub fn manipulate(cover: &mut OverlapCover, rng: &mut ChaCha8Rng) {
    let n = cover.vertex_count();
    for v in 0..n {
        let s1: Vec<usize> = cover.memberships(v).to_vec();
        let community_count = cover.community_count();
        let s2: Vec<usize> = {
            let mut out = Vec::with_capacity(community_count - s1.len());
            let mut si = 0;
            for j in 0..community_count {
                if si < s1.len() && s1[si] == j {
                    si += 1;
                } else {
                    out.push(j);
                }
            }
            out
        };
        if s1.is_empty() {
            debug_assert!(false, "vertex {v} lost all memberships");
            continue;
        }

        let additions = if s2.len() <= 1 {
            0
        } else {
            let p1 = rng.random_range(1..s2.len());
            additions_count(s1.len(), p1)
        };
        if additions > 0 {
            for idx in rand::seq::index::sample(rng, s2.len(), additions) {
                cover.insert_member(s2[idx], v);
            }
        }

        let removals = if s1.len() <= 1 {
            0
        } else {
            let p2 = rng.random_range(1..s1.len());
            removals_count(s1.len(), p2)
        };
        if removals > 0 {
            let mut chosen: Vec<usize> = rand::seq::index::sample(rng, s1.len(), removals)
                .into_iter()
                .map(|idx| s1[idx])
                .collect();
            chosen.sort_unstable();
            for j in chosen {
                if cover.community(j).len() > 1 && cover.memberships(v).len() > 1 {
                    cover.remove_member(j, v);
                }
            }
        }
    }
}

/// Recomputes every community threshold as the minimum member-to-community
/// similarity; communities falling below `tau_l` are dissolved and their
/// members re-added as singleton communities with threshold 1.0. Exact
/// duplicate communities collapse to one.
pub fn update_thresholds(cover: &mut OverlapCover, sims: &SimilarityMatrix, tau_l: f64) {
    let n = cover.vertex_count();
    let taus: Vec<f64> = cover
        .communities()
        .par_iter()
        .map(|community| {
            community
                .iter()
                .map(|&v| sim_vertex_community(community, v, sims))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let mut kept: Vec<VertexSet> = Vec::with_capacity(cover.community_count());
    let mut kept_taus: Vec<f64> = Vec::with_capacity(cover.community_count());
    let mut singleton_present = vec![false; n];
    let mut seen: std::collections::HashSet<&VertexSet> = std::collections::HashSet::new();
    let mut dissolved_members: Vec<usize> = Vec::new();

    for (community, &tau) in cover.communities().iter().zip(&taus) {
        if community.is_empty() || !seen.insert(community) {
            continue;
        }
        if tau < tau_l {
            dissolved_members.extend(community.iter().copied());
        } else {
            if community.len() == 1 {
                singleton_present[*community.iter().next().expect("non-empty")] = true;
            }
            kept.push(community.clone());
            kept_taus.push(tau);
        }
    }

    for v in dissolved_members {
        if !singleton_present[v] {
            singleton_present[v] = true;
            kept.push(VertexSet::from([v]));
            kept_taus.push(1.0);
        }
    }

    cover.replace(kept, kept_taus);
}

/// Loop controls and model options for the optimizer.
#[derive(Debug, Clone)]
pub struct EncodConfig {
    /// Global minimum community threshold; communities below it dissolve.
    pub tau_l: f64,
    pub similarity: SimilarityKind,
    /// Iterations without improvement before stopping; `None` means |V|.
    pub patience: Option<usize>,
    /// Hard cap on iterations.
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for EncodConfig {
    fn default() -> EncodConfig {
        EncodConfig {
            tau_l: 0.20,
            similarity: SimilarityKind::Cosine,
            patience: None,
            max_iterations: 2000,
            seed: 42,
        }
    }
}

impl EncodConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_l > 0.0 && self.tau_l < 1.0) {
            return Err(EncodError::Config(format!(
                "tau_l must lie strictly between 0 and 1, got {}",
                self.tau_l
            )));
        }
        if self.patience == Some(0) {
            return Err(EncodError::Config("patience must be at least 1".to_owned()));
        }
        Ok(())
    }
}

/// Record of one optimizer run.
#[derive(Debug, Clone)]
pub struct RunTrace {
    /// Log likelihood of every accepted cover, starting with the initial one.
    pub accepted: Vec<f64>,
    /// Number of proposal iterations performed.
    pub iterations: usize,
    /// Log likelihood of the returned cover.
    pub final_log_likelihood: f64,
}

/// Runs the full search and returns the best cover found.
pub fn run(graph: &Graph, features: &FeatureMatrix, config: &EncodConfig) -> Result<OverlapCover> {
    run_traced(graph, features, config).map(|(cover, _)| cover)
}

/// As `run`, additionally reporting the accepted-likelihood trace.
pub fn run_traced(
    graph: &Graph,
    features: &FeatureMatrix,
    config: &EncodConfig,
) -> Result<(OverlapCover, RunTrace)> {
    config.validate()?;
    let n = graph.vertex_count();
    if features.vertex_count() != n {
        return Err(EncodError::Config(format!(
            "feature matrix covers {} vertices but the graph has {n}",
            features.vertex_count()
        )));
    }

    if n <= 1 {
        let cover = OverlapCover::singletons(n);
        let trace = RunTrace {
            accepted: vec![0.0],
            iterations: 0,
            final_log_likelihood: 0.0,
        };
        return Ok((cover, trace));
    }

    let sims = SimilarityMatrix::from_features(features, config.similarity)?;
    let mut best = OverlapCover::singletons(n);
    let mut best_ll = log_likelihood(graph, &best, &sims);
    let mut accepted = vec![best_ll];

    let patience = config.patience.unwrap_or(n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stall = 0usize;
    let mut iterations = 0usize;

    while iterations < config.max_iterations && stall < patience {
        iterations += 1;
        let mut proposal = best.clone();
        manipulate(&mut proposal, &mut rng);
        update_thresholds(&mut proposal, &sims, config.tau_l);
        let ll = log_likelihood(graph, &proposal, &sims);
        if ll >= best_ll {
            best = proposal;
            best_ll = ll;
            accepted.push(ll);
            stall = 0;
        } else {
            stall += 1;
        }
    }

    debug_assert!(best.validate().is_ok());
    let trace = RunTrace {
        accepted,
        iterations,
        final_log_likelihood: best_ll,
    };
    Ok((best, trace))
}
