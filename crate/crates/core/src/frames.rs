//! k-frames: gap windows whose first gap lies in `[1, 2]` and where every
//! later gap is between a quarter and a half of its predecessor. The sensor
//! just after a frame is covered by every sensor inside it, so frames are
//! the local configuration behind the `sqrt(log n)` lower bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{exponential, Purpose, Seed};
use crate::interference::interference_fast;
use crate::model::{from_gaps_with_anchor, GapSequence};
use crate::stats::Proportion;

/// Trials per independent stream in Monte Carlo estimates.
const CHUNK: u64 = 1 << 16;

/// The frame predicate on a window of `k + 1` gaps. Comparisons are closed.
pub fn is_frame(window: &[f64]) -> Result<bool> {
    let (&first, _) = window
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("frame window must not be empty".into()))?;
    Ok((1.0..=2.0).contains(&first)
        && window
            .windows(2)
            .all(|w| w[0] / 4.0 <= w[1] && w[1] <= w[0] / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    /// Windows starting at multiples of `k`, as in the block argument.
    Disjoint,
    /// Every start position.
    Sliding,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalProbability {
    pub probability: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameReport {
    pub k: usize,
    pub mode: ScanMode,
    pub starts: Vec<usize>,
    pub probability_bound: f64,
    pub empirical_probability: Option<EmpiricalProbability>,
}

/// Finds every start index where the following `k + 1` gaps form a k-frame.
pub fn scan_frames(sequence: &GapSequence, k: usize, mode: ScanMode) -> Result<FrameReport> {
    if k < 1 {
        return Err(Error::InvalidParameter(
            "frame order k must be at least 1".into(),
        ));
    }
    let gaps = sequence.gaps();
    if gaps.len() < k + 1 {
        return Err(Error::InvalidParameter(format!(
            "need at least {} gaps for a {k}-frame, got {}",
            k + 1,
            gaps.len()
        )));
    }
    let stride = match mode {
        ScanMode::Disjoint => k,
        ScanMode::Sliding => 1,
    };
    let mut starts = Vec::new();
    for start in (0..=gaps.len() - (k + 1)).step_by(stride) {
        if is_frame(&gaps[start..=start + k])? {
            starts.push(start);
        }
    }
    Ok(FrameReport {
        k,
        mode,
        starts,
        probability_bound: frame_probability_bound(k),
        empirical_probability: None,
    })
}

/// Interference at the sensor right after the frame starting at `start`.
///
/// The anchor counts as a sensor here: the frame's first gap must begin
/// at a real sensor, otherwise that sensor's range is not bounded below by
/// the gap. The result is at least `k` whenever the window is a frame.
pub fn frame_interference_witness(sequence: &GapSequence, start: usize, k: usize) -> Result<usize> {
    let gaps = sequence.gaps();
    let window = gaps.get(start..start + k + 1).ok_or_else(|| {
        Error::InvalidParameter(format!("window {start}..={} out of range", start + k))
    })?;
    if !is_frame(window)? {
        return Err(Error::NotAFrame { start, k });
    }
    let points = from_gaps_with_anchor(sequence)?;
    Ok(interference_fast(&points)?.counts()[start + k + 1])
}

/// Lower bound `2^{-(k+2)^2}` on the probability that `k + 1` independent
/// Exponential(1) variables form a k-frame.
pub fn frame_probability_bound(k: usize) -> f64 {
    let e = (k as f64 + 2.0).powi(2);
    (-e).exp2()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameEstimate {
    pub k: usize,
    pub bound: f64,
    pub empirical: f64,
    pub trials: u64,
    pub hits: u64,
    pub std_error: f64,
    pub ci95: [f64; 2],
    pub seed: u64,
}

fn tuple_is_frame(rng: &mut impl rand::Rng, k: usize) -> bool {
    let mut prev = exponential(rng);
    if !(1.0..=2.0).contains(&prev) {
        return false;
    }
    for _ in 0..k {
        let x = exponential(rng);
        if !(prev / 4.0 <= x && x <= prev / 2.0) {
            return false;
        }
        prev = x;
    }
    true
}

/// Fraction of independent Exponential(1) `(k + 1)`-tuples forming a frame.
///
/// Trials are split into fixed chunks, each with its own stream, so the
/// estimate does not depend on the thread count. Tuples are drawn lazily
/// and abandoned at the first failed condition.
pub fn estimate_frame_probability(k: usize, trials: u64, master: u64) -> Result<FrameEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let chunks = trials.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = Seed::stream(master, Purpose::FrameTuples, k as u64, chunk).rng();
            let len = CHUNK.min(trials - chunk * CHUNK);
            (0..len).filter(|_| tuple_is_frame(&mut rng, k)).count() as u64
        })
        .sum();
    let p = Proportion::new(hits, trials);
    Ok(FrameEstimate {
        k,
        bound: frame_probability_bound(k),
        empirical: p.fraction,
        trials,
        hits,
        std_error: p.std_error,
        ci95: p.ci95,
        seed: master,
    })
}

/// Frame order and failure bound for the high-probability lower bound at
/// `n` sensors with tail parameter `c`. Logarithms are base 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundParameters {
    pub k: usize,
    /// `exp(-n^{1-c} / sqrt(c log2 n))`.
    pub failure_probability_bound: f64,
    /// `(1 - n^{-c})^{floor(n/k)}`, the disjoint-block form.
    pub block_failure_bound: f64,
}

pub fn lower_bound_parameters(n: u64, c: f64) -> Result<LowerBoundParameters> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 2, got {n}"
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "c must be positive, got {c}"
        )));
    }
    let nf = n as f64;
    let root = (c * nf.log2()).sqrt();
    let k = root.floor() as i64 - 2;
    if k < 1 {
        return Err(Error::BelowFrameThreshold { k });
    }
    let failure_probability_bound = (-nf.powf(1.0 - c) / root).exp();
    let blocks = (n / k as u64) as f64;
    let block_failure_bound = (blocks * (-nf.powf(-c)).ln_1p()).exp();
    Ok(LowerBoundParameters {
        k: k as usize,
        failure_probability_bound,
        block_failure_bound,
    })
}
