//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p highway-interference --test acceptance`.

use std::process::Command;
use std::time::Instant;

use highway_interference::experiments::{
    fit_scaling, plateau_spread, run_trials, tail_estimate, ExperimentConfig,
};
use highway_interference::frames::{
    estimate_frame_probability, frame_interference_witness, frame_probability_bound,
};
use highway_interference::generators::{
    exponential, exponential_chain, exponential_chain_exact, uniform_points,
    uniform_via_exponentials, GeneratorKind, Purpose, Seed, DEFAULT_SEED,
};
use highway_interference::interference::{
    interference_fast, interference_naive, left_interference,
};
use highway_interference::model::{assign_ranges, broadcast_intervals, GapSequence, PointSet};
use highway_interference::stats::{ks_two_sample_critical, ks_two_sample_statistic};
use rand::Rng;

// Pinned thresholds.
const C4_K0_EXACT: f64 = 0.232_544_157_934_235_6; // e^-1 - e^-2
const C4_K0_TOLERANCE: f64 = 0.002;
const C4_TRIALS: u64 = 10_000_000;
const C5_MAX_SPREAD: f64 = 0.30;
const C5_MIN_R2: f64 = 0.95;
const C6_N: usize = 1 << 16;
const C6_THRESHOLD: usize = 24;
const C6_TRIALS: usize = 10_000;
const C6_MAX_FRACTION: f64 = 0.01;
const C7_ALPHA: f64 = 0.01;

type Criterion = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// C1: Fast engine equals the naive oracle on 1,000 uniform point sets.
fn oracle_equivalence() -> Outcome {
    let mut schedule = Seed::stream(DEFAULT_SEED, Purpose::Points, 0, 1).rng();
    let mut mismatches = 0;
    let mut largest = 0;
    for t in 0..1000u64 {
        let n = schedule.random_range(2..=2048usize);
        largest = largest.max(n);
        let p = uniform_points(n, Seed::stream(DEFAULT_SEED, Purpose::Points, n as u64, t));
        if interference_fast(&p).unwrap() != interference_naive(&p).unwrap() {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("1000 sets, max n {largest}, {mismatches} mismatches"),
    )
}

/// C2: Halving chain: leftmost count n-2 and Z_S = n-2.
fn worst_case_chain() -> Outcome {
    let mut failures = Vec::new();
    for n in [3usize, 4, 10, 100, 1000, 10_000] {
        let (fast, naive) = if n <= 1000 {
            let p = exponential_chain(n, 0.5).unwrap();
            (
                interference_fast(&p).unwrap(),
                Some(interference_naive(&p).unwrap()),
            )
        } else {
            (
                interference_fast(&exponential_chain_exact(n, 2).unwrap()).unwrap(),
                None,
            )
        };
        if let Some(naive) = &naive {
            if *naive != fast {
                failures.push(format!("n={n}: fast != naive"));
            }
        }
        if fast.counts()[0] != n - 2 || fast.max() != n - 2 {
            failures.push(format!(
                "n={n}: leftmost={} Z_S={} expected {}",
                fast.counts()[0],
                fast.max(),
                n - 2
            ));
        }
    }
    if failures.is_empty() {
        outcome(true, "n in {3,4,10,100,1000,10^4}: leftmost = Z_S = n-2")
    } else {
        outcome(false, failures.join("; "))
    }
}

/// C3: Generated k-frames embedded in random gaps give interference >= k
/// at the post-frame sensor.
fn frame_witness() -> Outcome {
    let mut rng = Seed::stream(DEFAULT_SEED, Purpose::Embedding, 0, 0).rng();
    let mut failures = 0;
    let mut oracle_mismatch = 0;
    for _ in 0..10_000 {
        let k = rng.random_range(1..=6usize);
        let mut frame = vec![rng.random_range(1.0..=2.0)];
        for _ in 0..k {
            let prev = *frame.last().unwrap();
            frame.push(rng.random_range(prev / 4.0..=prev / 2.0));
        }
        let before = rng.random_range(0..=12usize);
        let after = rng.random_range(0..=12usize);
        let scale: f64 = [0.01, 1.0, 100.0][rng.random_range(0..3)];
        let mut gaps: Vec<f64> = (0..before).map(|_| scale * exponential(&mut rng)).collect();
        gaps.extend(&frame);
        gaps.extend((0..after).map(|_| scale * exponential(&mut rng)));
        let anchor = rng.random_range(-10.0..10.0);
        let sequence = GapSequence::new(anchor, gaps).unwrap();
        let z = frame_interference_witness(&sequence, before, k).unwrap();
        if z < k {
            failures += 1;
        }
        let points = highway_interference::model::from_gaps_with_anchor(&sequence).unwrap();
        if interference_naive(&points).unwrap().counts()[before + k + 1] != z {
            oracle_mismatch += 1;
        }
    }
    outcome(
        failures == 0 && oracle_mismatch == 0,
        format!("10000 embeddings: {failures} below k, {oracle_mismatch} oracle mismatches"),
    )
}

/// C4: Frame frequency at k = 0, 1 against the lower bound, and the exact
/// k = 0 probability.
fn frame_probability() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [0usize, 1] {
        let e = estimate_frame_probability(k, C4_TRIALS, DEFAULT_SEED).unwrap();
        let floor = frame_probability_bound(k) - 3.0 * e.std_error;
        pass &= e.empirical >= floor;
        parts.push(format!("k={k}: {:.6} vs bound {:.6}", e.empirical, e.bound));
        if k == 0 {
            let off = (e.empirical - C4_K0_EXACT).abs();
            pass &= off <= C4_K0_TOLERANCE;
            parts.push(format!("|k0 - (e^-1 - e^-2)| = {off:.6}"));
        }
    }
    outcome(pass, parts.join(", "))
}

/// C5: Scaling law over n = 2^10..2^20.
fn scaling_law() -> Outcome {
    let config = ExperimentConfig::new(
        vec![1 << 10, 1 << 12, 1 << 14, 1 << 16, 1 << 18, 1 << 20],
        500,
        DEFAULT_SEED,
        GeneratorKind::Uniform,
    )
    .with_override(1 << 20, 100);
    let rows = run_trials(&config).unwrap();
    let increasing = rows.windows(2).all(|w| w[1].mean > w[0].mean);
    let spread = plateau_spread(&rows);
    let per_ln: Vec<f64> = rows.iter().map(|r| r.mean / (r.n as f64).ln()).collect();
    let decreasing = per_ln.windows(2).all(|w| w[1] < w[0]);
    let fit = fit_scaling(&rows).unwrap();
    let means: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.mean)).collect();
    outcome(
        increasing && spread <= C5_MAX_SPREAD && decreasing && fit.r2 >= C5_MIN_R2,
        format!(
            "means [{}] increasing={increasing}, spread={spread:.4} (<= {C5_MAX_SPREAD}), mean/ln n decreasing={decreasing}, R2={:.4} (>= {C5_MIN_R2}), a={:.3} b={:.3}",
            means.join(", "),
            fit.r2,
            fit.a,
            fit.b
        ),
    )
}

/// C6: Upper tail at n = 2^16.
fn tail_decay() -> Outcome {
    let t = tail_estimate(C6_N, C6_THRESHOLD, C6_TRIALS, DEFAULT_SEED).unwrap();
    outcome(
        t.fraction <= C6_MAX_FRACTION && t.min_observed >= 1,
        format!(
            "P(Z_S >= {C6_THRESHOLD}) = {} (<= {C6_MAX_FRACTION}), observed Z_S in [{}, {}]",
            t.fraction, t.min_observed, t.max_observed
        ),
    )
}

/// C7: Median order statistic from normalized exponentials vs. sorted uniforms.
fn distributional_identity() -> Outcome {
    let n: usize = 101;
    let mid = n.div_ceil(2) - 1;
    let draws = 10_000u64;
    let via_exp: Vec<f64> = (0..draws)
        .map(|t| {
            uniform_via_exponentials(
                n,
                Seed::stream(DEFAULT_SEED, Purpose::Embedding, n as u64, t),
            )
            .unwrap()
            .positions()[mid]
        })
        .collect();
    let direct: Vec<f64> = (0..draws)
        .map(|t| {
            uniform_points(n, Seed::stream(DEFAULT_SEED, Purpose::Points, n as u64, t)).positions()
                [mid]
        })
        .collect();
    let d = ks_two_sample_statistic(&via_exp, &direct);
    let critical = ks_two_sample_critical(via_exp.len(), direct.len(), C7_ALPHA);
    outcome(
        d < critical,
        format!("D = {d:.5}, critical(alpha=0.01) = {critical:.5}"),
    )
}

/// Points on the grid `2^-40 * Z` inside (0, 1), so every transform below is exact.
fn dyadic_points(rng: &mut impl Rng, n: usize) -> PointSet {
    let raw: Vec<f64> = (0..n)
        .map(|_| rng.random_range(1..(1u64 << 40)) as f64 / (1u64 << 40) as f64)
        .collect();
    let mut v = raw;
    v.sort_by(f64::total_cmp);
    v.dedup();
    PointSet::from_sorted(v).unwrap()
}

/// C8: Mirror, dyadic affine, decomposition and sum identities.
fn invariance_suite() -> Outcome {
    let mut rng = Seed::stream(DEFAULT_SEED, Purpose::Points, 0, 8).rng();
    let mut broken = [0usize; 4];
    let mut checked = 0;
    while checked < 1000 {
        let size = rng.random_range(2..=400);
        let p = dyadic_points(&mut rng, size);
        if p.len() < 2 {
            continue;
        }
        checked += 1;
        let n = p.len();
        let z = interference_fast(&p).unwrap();

        let mut mirrored = interference_fast(&p.mirror()).unwrap().counts().to_vec();
        mirrored.reverse();
        if mirrored != z.counts() {
            broken[0] += 1;
        }

        let shift_exp = rng.random_range(-30..=30);
        let alpha = 2f64.powi(shift_exp);
        let beta =
            alpha * rng.random_range(-(1i64 << 48)..(1i64 << 48)) as f64 / (1u64 << 40) as f64;
        let moved = p.affine(alpha, beta).unwrap();
        let exact = moved
            .positions()
            .iter()
            .zip(p.positions())
            .all(|(y, x)| (y - beta) / alpha == *x);
        if !exact || interference_fast(&moved).unwrap() != z {
            broken[1] += 1;
        }

        let left = left_interference(&p).unwrap().counts;
        let left_of_mirror = left_interference(&p.mirror()).unwrap().counts;
        if (0..n).any(|i| z.counts()[i] != left[i] + left_of_mirror[n - 1 - i]) {
            broken[2] += 1;
        }

        let intervals = broadcast_intervals(&p, &assign_ranges(&p).unwrap()).unwrap();
        let inside: usize = intervals
            .intervals()
            .iter()
            .map(|iv| p.positions().iter().filter(|x| iv.contains(x)).count() - 1)
            .sum();
        if inside != z.counts().iter().sum::<usize>() {
            broken[3] += 1;
        }
    }
    outcome(
        broken.iter().all(|&b| b == 0),
        format!(
            "{checked} instances: mirror {} / affine {} / decomposition {} / sum {} failures",
            broken[0], broken[1], broken[2], broken[3]
        ),
    )
}

/// C9: `simulate` output is byte-identical for 1, 4 and 8 threads.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in [1, 4, 8] {
        let path = dir.path().join(format!("run{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_highway"))
            .args([
                "simulate",
                "--n-grid",
                "2^6,2^8,2^10,2^12",
                "--trials",
                "64",
                "--seed",
                "99",
            ])
            .args(["--threads", &threads.to_string(), "--out"])
            .arg(&path)
            .status()
            .unwrap();
        if !status.success() {
            return outcome(false, format!("simulate failed with {threads} threads"));
        }
        outputs.push(std::fs::read(&path).unwrap());
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(
        same,
        format!(
            "{} bytes, identical across 1/4/8 threads: {same}",
            outputs[0].len()
        ),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("C1 oracle equivalence", oracle_equivalence),
        ("C2 worst-case chain", worst_case_chain),
        ("C3 frame witness", frame_witness),
        ("C4 frame probability bound", frame_probability),
        ("C5 scaling law", scaling_law),
        ("C6 tail decay", tail_decay),
        ("C7 distributional identity", distributional_identity),
        ("C8 invariance suite", invariance_suite),
        ("C9 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = check();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "[{verdict}] {name} ({:.1}s): {}",
            start.elapsed().as_secs_f64(),
            result.detail
        );
        failed += usize::from(!result.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
