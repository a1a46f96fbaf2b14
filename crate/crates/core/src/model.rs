//! Points on a line, their spacings, and the max-neighbor range assignment.
//!
//! Every sensor gets the distance to its farther adjacent neighbor as its
//! range (the single neighbor at either end), and broadcasts over the
//! closed interval of that radius around itself.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Largest coordinate magnitude accepted for `f64` points. Keeps every
/// difference of two coordinates finite so exact comparisons stay valid.
pub const MAX_F64_MAGNITUDE: f64 = 1.0e300;

/// A coordinate type usable for point positions.
///
/// `cmp_differences` must compare `a - b` against `c - d` exactly, without
/// rounding. Interference counts are built on that primitive alone.
pub trait Coordinate: Clone + PartialOrd + Debug + Send + Sync {
    fn is_admissible(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn cmp_differences(a: &Self, b: &Self, c: &Self, d: &Self) -> Ordering;
}

/// Error-free difference: `a - b == s + e` exactly (Knuth's TwoSum).
fn two_diff(a: f64, b: f64) -> (f64, f64) {
    let s = a - b;
    let bb = s - a;
    let e = (a - (s - bb)) - (b + bb);
    (s, e)
}

impl Coordinate for f64 {
    fn is_admissible(&self) -> bool {
        self.is_finite() && self.abs() <= MAX_F64_MAGNITUDE
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }

    fn negated(&self) -> Self {
        -self
    }

    fn cmp_differences(a: &Self, b: &Self, c: &Self, d: &Self) -> Ordering {
        let (s1, e1) = two_diff(*a, *b);
        let (s2, e2) = two_diff(*c, *d);
        // Rounding is monotone, so unequal leading parts decide the order.
        match s1.partial_cmp(&s2).expect("admissible coordinates") {
            Ordering::Equal => e1.partial_cmp(&e2).expect("admissible coordinates"),
            ord => ord,
        }
    }
}

impl Coordinate for BigInt {
    fn is_admissible(&self) -> bool {
        true
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }

    fn negated(&self) -> Self {
        -self
    }

    fn cmp_differences(a: &Self, b: &Self, c: &Self, d: &Self) -> Ordering {
        (a - b).cmp(&(c - d))
    }
}

fn coord_cmp<T: Coordinate>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b)
        .expect("admissible coordinates are totally ordered")
}

/// Strictly increasing sensor positions.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T = f64> {
    positions: Vec<T>,
}

impl<T: Coordinate> PointSet<T> {
    /// Sorts raw positions and rejects duplicates or non-finite values.
    ///
    /// Error indices refer to the caller's original ordering.
    pub fn from_unsorted(raw: Vec<T>) -> Result<Self> {
        if let Some(index) = raw.iter().position(|x| !x.is_admissible()) {
            return Err(Error::NonFinite { index });
        }
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&i, &j| coord_cmp(&raw[i], &raw[j]).then(i.cmp(&j)));
        for w in order.windows(2) {
            if coord_cmp(&raw[w[0]], &raw[w[1]]) != Ordering::Less {
                return Err(Error::Duplicate { index: w[1] });
            }
        }
        let mut slots: Vec<Option<T>> = raw.into_iter().map(Some).collect();
        let positions = order
            .iter()
            .map(|&i| slots[i].take().expect("each index appears once"))
            .collect();
        Ok(PointSet { positions })
    }

    /// Accepts positions that are already strictly increasing.
    pub fn from_sorted(positions: Vec<T>) -> Result<Self> {
        if let Some(index) = positions.iter().position(|x| !x.is_admissible()) {
            return Err(Error::NonFinite { index });
        }
        for i in 1..positions.len() {
            match coord_cmp(&positions[i - 1], &positions[i]) {
                Ordering::Less => {}
                Ordering::Equal => return Err(Error::Duplicate { index: i }),
                Ordering::Greater => return Err(Error::NotIncreasing { index: i }),
            }
        }
        Ok(PointSet { positions })
    }

    pub fn positions(&self) -> &[T] {
        &self.positions
    }

    pub fn into_positions(self) -> Vec<T> {
        self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// The reflection `{-x}`, re-sorted. Index `i` maps to `n - 1 - i`.
    pub fn mirror(&self) -> Self {
        PointSet {
            positions: self
                .positions
                .iter()
                .rev()
                .map(Coordinate::negated)
                .collect(),
        }
    }

    pub(crate) fn require_at_least(&self, required: usize) -> Result<()> {
        if self.len() < required {
            return Err(Error::TooFewPoints {
                required,
                actual: self.len(),
            });
        }
        Ok(())
    }
}

impl PointSet<f64> {
    /// Applies `x -> scale * x + shift` to every position.
    ///
    /// Exact whenever `scale` is a power of two and the shifted values stay
    /// representable; callers relying on invariance should use dyadic data.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {scale}"
            )));
        }
        PointSet::from_sorted(self.positions.iter().map(|x| scale * x + shift).collect())
    }
}

/// Positive spacings following an anchor. The anchor is a reference origin,
/// not a sensor: the first sensor sits at `anchor + gaps[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSequence {
    anchor: f64,
    gaps: Vec<f64>,
}

impl GapSequence {
    pub fn new(anchor: f64, gaps: Vec<f64>) -> Result<Self> {
        if !anchor.is_admissible() {
            return Err(Error::InvalidParameter(format!(
                "anchor must be finite, got {anchor}"
            )));
        }
        if let Some(index) = gaps.iter().position(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::NonPositiveGap { index });
        }
        Ok(GapSequence { anchor, gaps })
    }

    /// Gaps anchored at the origin.
    pub fn from_gaps(gaps: Vec<f64>) -> Result<Self> {
        Self::new(0.0, gaps)
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }
}

/// Anchor and consecutive spacings of a point set: `anchor = x_1`,
/// `gaps[i] = x_{i+1} - x_i`.
pub fn gaps(points: &PointSet) -> Result<GapSequence> {
    points.require_at_least(1)?;
    let p = points.positions();
    let gaps = p.windows(2).map(|w| w[1] - w[0]).collect();
    GapSequence::new(p[0], gaps)
}

/// Prefix sums of the gaps starting from the anchor; the anchor itself is
/// not part of the returned set.
pub fn from_gaps(sequence: &GapSequence) -> Result<PointSet> {
    let mut at = sequence.anchor;
    let positions = sequence
        .gaps
        .iter()
        .map(|g| {
            at += g;
            at
        })
        .collect();
    PointSet::from_sorted(positions)
}

/// Like [`from_gaps`] but keeps the anchor as the first sensor, which makes
/// it the exact inverse of [`gaps`] on dyadic data.
pub fn from_gaps_with_anchor(sequence: &GapSequence) -> Result<PointSet> {
    let mut positions = Vec::with_capacity(sequence.len() + 1);
    positions.push(sequence.anchor);
    positions.extend(from_gaps(sequence)?.into_positions());
    PointSet::from_sorted(positions)
}

/// One broadcast radius per sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeAssignment<T = f64> {
    ranges: Vec<T>,
}

impl<T> RangeAssignment<T> {
    pub fn ranges(&self) -> &[T] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

/// Distance from each sensor to its farther adjacent neighbor.
pub fn assign_ranges<T: Coordinate>(points: &PointSet<T>) -> Result<RangeAssignment<T>> {
    points.require_at_least(2)?;
    let p = points.positions();
    let n = p.len();
    let ranges = (0..n)
        .map(|i| {
            let left = (i > 0).then(|| p[i].minus(&p[i - 1]));
            let right = (i + 1 < n).then(|| p[i + 1].minus(&p[i]));
            match (left, right) {
                (Some(l), Some(r)) => {
                    if T::cmp_differences(&p[i], &p[i - 1], &p[i + 1], &p[i]) == Ordering::Greater {
                        l
                    } else {
                        r
                    }
                }
                (Some(l), None) => l,
                (None, Some(r)) => r,
                (None, None) => unreachable!("n >= 2"),
            }
        })
        .collect();
    Ok(RangeAssignment { ranges })
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<T = f64> {
    pub lo: T,
    pub hi: T,
}

impl<T: Coordinate> Interval<T> {
    pub fn contains(&self, x: &T) -> bool {
        self.lo <= *x && *x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet<T = f64> {
    intervals: Vec<Interval<T>>,
}

impl<T> IntervalSet<T> {
    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// `[x_i - R_i, x_i + R_i]` for every sensor.
///
/// Endpoints are rounded for `f64`; interference counting does not use
/// them and compares exact differences instead.
pub fn broadcast_intervals<T: Coordinate>(
    points: &PointSet<T>,
    ranges: &RangeAssignment<T>,
) -> Result<IntervalSet<T>> {
    if points.len() != ranges.len() {
        return Err(Error::LengthMismatch {
            left: points.len(),
            right: ranges.len(),
        });
    }
    let intervals = points
        .positions()
        .iter()
        .zip(ranges.ranges())
        .map(|(x, r)| Interval {
            lo: x.minus(r),
            hi: x.plus(r),
        })
        .collect();
    Ok(IntervalSet { intervals })
}
