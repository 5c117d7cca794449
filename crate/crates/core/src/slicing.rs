//! Partitioning of the observed response range into slices.
//!
//! Slice `r` (0-based) covers `(edges[r], edges[r+1]]`, except that slice 0
//! also contains `edges[0]`. A response sitting exactly on an interior edge
//! therefore belongs to the lower slice, and equal responses always share a
//! slice.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlicingKind {
    EqualWidth,
    EqualCount,
}

impl fmt::Display for SlicingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlicingKind::EqualWidth => "equal-width",
            SlicingKind::EqualCount => "equal-count",
        })
    }
}

impl FromStr for SlicingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal-width" => Ok(SlicingKind::EqualWidth),
            "equal-count" => Ok(SlicingKind::EqualCount),
            other => Err(Error::BadParameter {
                name: "slicing".into(),
                reason: format!("expected equal-width or equal-count, got `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlicingStrategy {
    pub kind: SlicingKind,
    pub requested: usize,
}

impl SlicingStrategy {
    pub fn equal_count(requested: usize) -> Self {
        Self {
            kind: SlicingKind::EqualCount,
            requested,
        }
    }

    pub fn equal_width(requested: usize) -> Self {
        Self {
            kind: SlicingKind::EqualWidth,
            requested,
        }
    }

    /// Equal-count slicing with [`default_slice_count`] slices.
    pub fn default_for(samples: usize, dim: usize) -> Self {
        Self::equal_count(default_slice_count(samples, dim))
    }
}

/// `min(20, max(2, ⌊N / max(2m, 10)⌋))`, never more than `N`.
pub fn default_slice_count(samples: usize, dim: usize) -> usize {
    let per = (2 * dim).max(10);
    (samples / per).clamp(2, 20).min(samples.max(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlicePartition {
    edges: Vec<f64>,
    membership: Vec<Vec<usize>>,
    degenerate: bool,
}

impl SlicePartition {
    /// Number of nonempty slices actually produced.
    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Sample indices of each slice, ascending.
    pub fn membership(&self) -> &[Vec<usize>] {
        &self.membership
    }

    pub fn counts(&self) -> Vec<usize> {
        self.membership.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.membership.iter().map(Vec::len).sum()
    }

    /// Smallest per-slice sample count.
    pub fn min_count(&self) -> usize {
        self.membership.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// True when every response was identical.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Slice holding `value`; values outside the trained range are clamped
    /// to the end slices.
    pub fn assign(&self, value: f64) -> usize {
        let interior = &self.edges[1..self.edges.len() - 1];
        // first interior edge >= value
        interior.partition_point(|&e| e < value)
    }

    /// Merges slices holding fewer than `min_count` samples into their
    /// smaller neighbour (the lower one on ties) until every slice qualifies
    /// or a single slice remains.
    pub fn merge_small(&self, min_count: usize) -> SlicePartition {
        let mut edges = self.edges.clone();
        let mut members = self.membership.clone();
        while members.len() > 1 {
            let Some(r) = members.iter().position(|s| s.len() < min_count) else {
                break;
            };
            let into_lower = match (r.checked_sub(1), members.get(r + 1)) {
                (Some(lower), Some(upper)) => members[lower].len() <= upper.len(),
                (Some(_), None) => true,
                _ => false,
            };
            // slices r-1 and r share edges[r]; slices r and r+1 share edges[r+1]
            let (keep, absorbed, shared_edge) = if into_lower {
                (r - 1, r, r)
            } else {
                (r, r + 1, r + 1)
            };
            let moved = members.remove(absorbed);
            members[keep].extend(moved);
            members[keep].sort_unstable();
            edges.remove(shared_edge);
        }
        SlicePartition {
            edges,
            membership: members,
            degenerate: self.degenerate,
        }
    }
}

/// Slices `y` according to `strategy`.
///
/// The achieved slice count may fall below the requested one when ties or
/// gaps leave slices empty; empty slices are merged away.
pub fn partition(y: &[f64], strategy: SlicingStrategy) -> Result<SlicePartition> {
    let n = y.len();
    if n == 0 {
        return Err(Error::InvalidInput("cannot slice an empty response vector".into()));
    }
    if strategy.requested == 0 {
        return Err(Error::BadParameter {
            name: "slices".into(),
            reason: "slice count must be at least 1".into(),
        });
    }
    if strategy.requested > n {
        return Err(Error::TooManySlices {
            requested: strategy.requested,
            samples: n,
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("responses must be finite".into()));
    }

    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = sorted[0];
    let hi = sorted[n - 1];
    if lo == hi {
        return Ok(SlicePartition {
            edges: vec![lo, hi],
            membership: vec![(0..n).collect()],
            degenerate: true,
        });
    }

    let r = strategy.requested;
    let mut edges = Vec::with_capacity(r + 1);
    edges.push(lo);
    match strategy.kind {
        SlicingKind::EqualCount => {
            for k in 1..r {
                // the lower k slices take the first ⌊kN/R⌋ order statistics;
                // ties with the last of them follow it down
                edges.push(sorted[k * n / r - 1]);
            }
        }
        SlicingKind::EqualWidth => {
            let width = hi - lo;
            for k in 1..r {
                edges.push(lo + width * (k as f64) / (r as f64));
            }
        }
    }
    edges.push(hi);

    let mut membership = vec![Vec::new(); r];
    let interior = &edges[1..r];
    for (i, &v) in y.iter().enumerate() {
        membership[interior.partition_point(|&e| e < v)].push(i);
    }

    // slice 0 always holds the minimum; any later empty slice is folded into
    // its lower neighbour by extending that neighbour's upper edge
    let mut kept_edges = vec![edges[0]];
    let mut kept = Vec::with_capacity(r);
    for (k, members) in membership.into_iter().enumerate() {
        if members.is_empty() {
            *kept_edges.last_mut().unwrap() = edges[k + 1];
        } else {
            kept.push(members);
            kept_edges.push(edges[k + 1]);
        }
    }

    Ok(SlicePartition {
        edges: kept_edges,
        membership: kept,
        degenerate: false,
    })
}
