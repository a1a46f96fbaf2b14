//! Interference counts under the max-neighbor range assignment.
//!
//! Sensor `j` interferes with sensor `i != j` when `|x_i - x_j| <= R_j`.
//! Membership is decided by exact comparison of coordinate differences, so
//! a farther neighbor sitting on the boundary of an interval always counts.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{from_gaps, Coordinate, GapSequence, PointSet};

/// Per-sensor interference counts with the maximum and its first position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterferenceProfile {
    counts: Vec<usize>,
    max: usize,
    argmax: usize,
}

impl InterferenceProfile {
    pub fn from_counts(counts: Vec<usize>) -> Self {
        let (argmax, max) =
            counts.iter().copied().enumerate().fold(
                (0, 0),
                |best, (i, z)| if z > best.1 { (i, z) } else { best },
            );
        InterferenceProfile {
            counts,
            max,
            argmax,
        }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn max(&self) -> usize {
        self.max
    }

    /// Smallest index attaining the maximum.
    pub fn argmax(&self) -> usize {
        self.argmax
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One-sided interference counts. `threshold` is `None` for the
/// unrestricted variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SidedProfile {
    pub counts: Vec<usize>,
    pub side: Side,
    pub threshold: Option<f64>,
}

/// `x_i - x_j <= R_j`, for `i` at or right of `j`.
fn covers_rightward<T: Coordinate>(p: &[T], j: usize, i: usize) -> bool {
    let within = |a: &T, b: &T| T::cmp_differences(&p[i], &p[j], a, b) != Ordering::Greater;
    (j > 0 && within(&p[j], &p[j - 1])) || (j + 1 < p.len() && within(&p[j + 1], &p[j]))
}

/// `x_j - x_i <= R_j`, for `i` at or left of `j`.
fn covers_leftward<T: Coordinate>(p: &[T], j: usize, i: usize) -> bool {
    let within = |a: &T, b: &T| T::cmp_differences(&p[j], &p[i], a, b) != Ordering::Greater;
    (j > 0 && within(&p[j], &p[j - 1])) || (j + 1 < p.len() && within(&p[j + 1], &p[j]))
}

fn covers<T: Coordinate>(p: &[T], j: usize, i: usize) -> bool {
    if i >= j {
        covers_rightward(p, j, i)
    } else {
        covers_leftward(p, j, i)
    }
}

/// First index in `lo..hi` where `pred` turns false, given `pred` is
/// true on a prefix of the range.
fn partition_index(mut lo: usize, mut hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Inclusive index range `[first, last]` of sensors inside `I_j`, `j` included.
fn reach<T: Coordinate>(p: &[T], j: usize) -> (usize, usize) {
    let last = partition_index(j + 1, p.len(), |i| covers_rightward(p, j, i)) - 1;
    // Leftward coverage holds on a suffix of 0..j; search for its start.
    let first = partition_index(0, j, |i| !covers_leftward(p, j, i));
    (first, last)
}

/// Covered index ranges of every broadcast interval.
pub fn coverage_ranges<T: Coordinate>(points: &PointSet<T>) -> Result<Vec<(usize, usize)>> {
    points.require_at_least(2)?;
    let p = points.positions();
    Ok((0..p.len()).map(|j| reach(p, j)).collect())
}

/// Direct O(n²) evaluation of the definition.
pub fn interference_naive<T: Coordinate>(points: &PointSet<T>) -> Result<InterferenceProfile> {
    points.require_at_least(2)?;
    let p = points.positions();
    let counts = (0..p.len())
        .map(|i| (0..p.len()).filter(|&j| j != i && covers(p, j, i)).count())
        .collect();
    Ok(InterferenceProfile::from_counts(counts))
}

/// O(n log n): binary-search each interval's covered index range, then
/// stab-count with a difference array.
pub fn interference_fast<T: Coordinate>(points: &PointSet<T>) -> Result<InterferenceProfile> {
    let n = points.len();
    let mut delta = vec![0i64; n + 1];
    for (first, last) in coverage_ranges(points)? {
        delta[first] += 1;
        delta[last + 1] -= 1;
    }
    let mut running = 0i64;
    let counts = delta[..n]
        .iter()
        .map(|d| {
            running += d;
            // every interval contains its own center
            (running - 1) as usize
        })
        .collect();
    Ok(InterferenceProfile::from_counts(counts))
}

pub fn max_interference<T: Coordinate>(points: &PointSet<T>) -> Result<usize> {
    Ok(interference_fast(points)?.max())
}

fn sided_counts<T: Coordinate>(
    points: &PointSet<T>,
    side: Side,
    eligible: impl Fn(usize) -> bool,
) -> Result<Vec<usize>> {
    let n = points.len();
    let mut delta = vec![0i64; n + 1];
    for (j, (first, last)) in coverage_ranges(points)?.into_iter().enumerate() {
        if !eligible(j) {
            continue;
        }
        // contributors on the left reach rightward and vice versa
        let (from, to) = match side {
            Side::Left => (j + 1, last + 1),
            Side::Right => (first, j),
        };
        if from < to {
            delta[from] += 1;
            delta[to] -= 1;
        }
    }
    let mut running = 0i64;
    Ok(delta[..n]
        .iter()
        .map(|d| {
            running += d;
            running as usize
        })
        .collect())
}

/// Counts, for each `x_t`, the sensors `x_i < x_t` with `x_t - x_i <= R_i`.
pub fn left_interference<T: Coordinate>(points: &PointSet<T>) -> Result<SidedProfile> {
    let counts = sided_counts(points, Side::Left, |_| true)?;
    Ok(SidedProfile {
        counts,
        side: Side::Left,
        threshold: None,
    })
}

/// Counts, for each `x_t`, the sensors `x_i > x_t` with `x_i - x_t <= R_i`.
pub fn right_interference<T: Coordinate>(points: &PointSet<T>) -> Result<SidedProfile> {
    let counts = sided_counts(points, Side::Right, |_| true)?;
    Ok(SidedProfile {
        counts,
        side: Side::Right,
        threshold: None,
    })
}

/// Left-interference restricted to contributors whose immediately-left gap
/// is at most `threshold`. The first sensor's left gap is the anchor gap.
pub fn short_range_left_interference(
    sequence: &GapSequence,
    threshold: f64,
) -> Result<SidedProfile> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    if sequence.len() < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            actual: sequence.len(),
        });
    }
    let points = from_gaps(sequence)?;
    let left_gaps = sequence.gaps();
    let counts = sided_counts(&points, Side::Left, |i| left_gaps[i] <= threshold)?;
    Ok(SidedProfile {
        counts,
        side: Side::Left,
        threshold: Some(threshold),
    })
}
