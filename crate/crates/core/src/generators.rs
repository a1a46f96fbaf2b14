//! Seeded point models.
//!
//! Every random stream is a ChaCha8 generator keyed by the 256-bit tuple
//! `(master, purpose, n, index)`. Distinct labels give independent streams,
//! and a stream never depends on which thread or in what order it is drawn.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{from_gaps, GapSequence, PointSet};

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_100_704;

/// What a stream is used for. Part of the stream key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Points,
    Trial,
    FrameTuples,
    Tail,
    Embedding,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Points => 1,
            Purpose::Trial => 2,
            Purpose::FrameTuples => 3,
            Purpose::Tail => 4,
            Purpose::Embedding => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub master: u64,
    pub purpose: Purpose,
    pub n: u64,
    pub index: u64,
}

impl Seed {
    /// A seed for plain one-off generation.
    pub fn new(master: u64) -> Self {
        Seed {
            master,
            purpose: Purpose::Points,
            n: 0,
            index: 0,
        }
    }

    pub fn stream(master: u64, purpose: Purpose, n: u64, index: u64) -> Self {
        Seed {
            master,
            purpose,
            n,
            index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        for (chunk, word) in
            key.chunks_exact_mut(8)
                .zip([self.master, self.purpose.tag(), self.n, self.index])
        {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

impl Default for Seed {
    fn default() -> Self {
        Seed::new(DEFAULT_SEED)
    }
}

/// Uniform draw from the open interval (0, 1).
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Exponential(1) by inversion, `-ln(1 - u)` with `u` in `[0, 1)`.
/// A zero draw is redrawn so every gap is strictly positive.
pub fn exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        let x = -(-u).ln_1p();
        if x > 0.0 {
            return x;
        }
    }
}

/// Order statistics of `n` i.i.d. uniforms on (0, 1).
pub fn uniform_points(n: usize, seed: Seed) -> PointSet {
    let mut rng = seed.rng();
    uniform_points_from(n, &mut rng)
}

pub(crate) fn uniform_points_from<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PointSet {
    let mut values: Vec<f64> = (0..n).map(|_| open_unit(rng)).collect();
    loop {
        values.sort_unstable_by(f64::total_cmp);
        values.dedup();
        if values.len() == n {
            break;
        }
        // collisions: top up with fresh draws and re-sort
        let missing = n - values.len();
        values.extend((0..missing).map(|_| open_unit(rng)));
    }
    PointSet::from_sorted(values).expect("sorted and deduplicated")
}

/// `m` i.i.d. Exponential(1) gaps anchored at the origin.
pub fn exponential_gaps(m: usize, seed: Seed) -> GapSequence {
    let mut rng = seed.rng();
    exponential_gaps_from(m, &mut rng)
}

pub(crate) fn exponential_gaps_from<R: Rng + ?Sized>(m: usize, rng: &mut R) -> GapSequence {
    let gaps = (0..m).map(|_| exponential(rng)).collect();
    GapSequence::from_gaps(gaps).expect("exponential draws are positive")
}

/// Uniform order statistics built from normalized exponential prefix sums:
/// draws `n + 1` gaps and divides the first `n` prefix sums by the total.
pub fn uniform_via_exponentials(n: usize, seed: Seed) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut rng = seed.rng();
    Ok(uniform_via_exponentials_from(n, &mut rng))
}

pub(crate) fn uniform_via_exponentials_from<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PointSet {
    loop {
        let sequence = exponential_gaps_from(n + 1, rng);
        let sums = from_gaps(&sequence)
            .expect("positive gaps")
            .into_positions();
        let total = sums[n];
        let normalized: Vec<f64> = sums[..n].iter().map(|s| s / total).collect();
        // a gap far below the running sum's precision can collapse two points
        if let Ok(points) = PointSet::from_sorted(normalized) {
            if points.positions().last().is_none_or(|&x| x < 1.0) {
                return points;
            }
        }
    }
}

fn check_chain_args(n: usize, ratio: f64) -> Result<()> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "ratio must lie in (0, 1), got {ratio}"
        )));
    }
    if n < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            actual: n,
        });
    }
    Ok(())
}

/// Exponential node chain `x_i = ratio^(n-i)`, gaps shrinking toward the
/// left end. Fails once the smallest positions underflow and collide.
pub fn exponential_chain(n: usize, ratio: f64) -> Result<PointSet> {
    check_chain_args(n, ratio)?;
    let mut positions = vec![0.0; n];
    let mut x = 1.0;
    for slot in positions.iter_mut().rev() {
        *slot = x;
        x *= ratio;
    }
    PointSet::from_sorted(positions).map_err(|_| {
        Error::InvalidParameter(format!(
            "chain of {n} points with ratio {ratio} is not representable in double precision"
        ))
    })
}

/// The chain with ratio `1/base`, scaled by `base^(n-1)` to integer
/// positions `base^(i-1)`. Scaling leaves interference unchanged, and the
/// integers stay exact for any `n`.
pub fn exponential_chain_exact(n: usize, base: u32) -> Result<PointSet<BigInt>> {
    if base < 2 {
        return Err(Error::InvalidParameter(format!(
            "base must be at least 2, got {base}"
        )));
    }
    check_chain_args(n, 1.0 / base as f64)?;
    let base = BigInt::from(base);
    let mut positions = Vec::with_capacity(n);
    let mut x = BigInt::from(1);
    for _ in 0..n {
        let next = &x * &base;
        positions.push(x);
        x = next;
    }
    PointSet::from_sorted(positions)
}

/// `x_i = i / (n + 1)` for `i = 1..=n`.
pub fn equally_spaced(n: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let step = (n + 1) as f64;
    PointSet::from_sorted((1..=n).map(|i| i as f64 / step).collect())
}

/// Point models selectable from configs and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Uniform,
    Expgaps,
    Chain,
    Equal,
}

impl GeneratorKind {
    pub fn is_random(self) -> bool {
        matches!(self, GeneratorKind::Uniform | GeneratorKind::Expgaps)
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Uniform => "uniform",
            GeneratorKind::Expgaps => "expgaps",
            GeneratorKind::Chain => "chain",
            GeneratorKind::Equal => "equal",
        })
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GeneratorKind::Uniform),
            "expgaps" => Ok(GeneratorKind::Expgaps),
            "chain" => Ok(GeneratorKind::Chain),
            "equal" => Ok(GeneratorKind::Equal),
            other => Err(Error::InvalidParameter(format!(
                "unknown generator kind `{other}`"
            ))),
        }
    }
}
