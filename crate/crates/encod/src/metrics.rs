//! Agreement metrics between two overlapping covers: overlapping NMI in the
//! lack-of-information form, the unadjusted Omega index, and the symmetric
//! best-match F-Score.

use crate::cover::OverlapCover;
use crate::error::{EncodError, Result};
use crate::graph::VertexSet;

/// Scores of a detected cover against a reference cover.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub onmi: f64,
    pub omega: f64,
    pub fscore: f64,
    pub detected_communities: usize,
    pub reference_communities: usize,
}

/// Unadjusted Omega index: the fraction of unordered vertex pairs whose
/// shared-community count agrees between the two covers. Defined as 1 for
/// fewer than two vertices.
pub fn omega_index(a: &OverlapCover, b: &OverlapCover, n: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    let mut agreements = 0usize;
    let mut pairs = 0usize;
    for u in 0..n {
        for v in (u + 1)..n {
            pairs += 1;
            if a.shared_count(u, v) == b.shared_count(u, v) {
                agreements += 1;
            }
        }
    }
    agreements as f64 / pairs as f64
}

fn f1(x: &VertexSet, y: &VertexSet) -> f64 {
    let common = x.intersection(y).count();
    if common == 0 {
        return 0.0;
    }
    2.0 * common as f64 / (x.len() + y.len()) as f64
}

/// Symmetric best-match F-Score:
/// `1/2 [ avg_A max_B F1(A,B) + avg_B max_A F1(A,B) ]`.
pub fn fscore(a: &OverlapCover, b: &OverlapCover) -> Result<f64> {
    if a.community_count() == 0 || b.community_count() == 0 {
        return Err(EncodError::InvariantViolation(
            "fscore requires both covers to be non-empty".to_owned(),
        ));
    }
    if a.communities().iter().chain(b.communities()).any(|c| c.is_empty()) {
        return Err(EncodError::InvariantViolation(
            "fscore encountered an empty community".to_owned(),
        ));
    }
    let one_sided = |from: &OverlapCover, to: &OverlapCover| -> f64 {
        let total: f64 = from
            .communities()
            .iter()
            .map(|x| {
                to.communities()
                    .iter()
                    .map(|y| f1(x, y))
                    .fold(0.0f64, f64::max)
            })
            .sum();
        total / from.community_count() as f64
    };
    Ok((one_sided(a, b) + one_sided(b, a)) / 2.0)
}

fn h(count: usize, n: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        let p = count as f64 / n as f64;
        -p * p.ln()
    }
}

fn community_entropy(size: usize, n: usize) -> f64 {
    h(size, n) + h(n - size, n)
}

/// Best-match conditional entropy H(X_k | Y) over binary membership
/// variables, with the non-negativity constraint on the paired terms: a
/// candidate H(X_k | Y_l) only counts when h(z11) + h(z00) >= h(z01) + h(z10),
/// and the result never exceeds H(X_k).
fn conditional_entropy(x_k: &VertexSet, other: &OverlapCover, n: usize) -> f64 {
    let h_xk = community_entropy(x_k.len(), n);
    let mut best = h_xk;
    for y_l in other.communities() {
        let z11 = x_k.intersection(y_l).count();
        let z10 = x_k.len() - z11;
        let z01 = y_l.len() - z11;
        let z00 = n - z11 - z10 - z01;
        if h(z11, n) + h(z00, n) < h(z01, n) + h(z10, n) {
            continue;
        }
        let joint = h(z11, n) + h(z10, n) + h(z01, n) + h(z00, n);
        let cond = joint - community_entropy(y_l.len(), n);
        if cond < best {
            best = cond;
        }
    }
    best.max(0.0)
}

fn dedup_communities(cover: &OverlapCover) -> Vec<&VertexSet> {
    let mut sets: Vec<&VertexSet> = cover.communities().iter().collect();
    sets.sort();
    sets.dedup();
    sets
}

/// Normalized-conditional-entropy ratio H(a|b)/H(a); zero-entropy covers
/// (every community equal to V) carry no information, giving ratio 0 against
/// an identical cover and 1 otherwise.
fn lack_of_information(a: &OverlapCover, b: &OverlapCover, n: usize) -> f64 {
    let total_entropy: f64 = a
        .communities()
        .iter()
        .map(|c| community_entropy(c.len(), n))
        .sum();
    if total_entropy == 0.0 {
        return if dedup_communities(a) == dedup_communities(b) {
            0.0
        } else {
            1.0
        };
    }
    let total_conditional: f64 = a
        .communities()
        .iter()
        .map(|c| conditional_entropy(c, b, n))
        .sum();
    total_conditional / total_entropy
}

/// Overlapping NMI: `1 - 1/2 [ H(a|b)/H(a) + H(b|a)/H(b) ]`, clamped to
/// [0, 1].
pub fn onmi(a: &OverlapCover, b: &OverlapCover, n: usize) -> f64 {
    let value = 1.0 - (lack_of_information(a, b, n) + lack_of_information(b, a, n)) / 2.0;
    value.clamp(0.0, 1.0)
}

/// Computes all three metrics of `detected` against `reference`.
pub fn evaluate(detected: &OverlapCover, reference: &OverlapCover, n: usize) -> Result<MetricReport> {
    Ok(MetricReport {
        onmi: onmi(detected, reference, n),
        omega: omega_index(detected, reference, n),
        fscore: fscore(detected, reference)?,
        detected_communities: detected.community_count(),
        reference_communities: reference.community_count(),
    })
}
