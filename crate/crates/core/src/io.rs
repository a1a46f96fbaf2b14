//! Points files and interference profile exports.
//!
//! A points file holds one decimal position per line in strictly ascending
//! order. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interference::InterferenceProfile;
use crate::model::{Coordinate, PointSet};

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut positions: Vec<f64> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let x: f64 = line.parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("not a number: `{line}`"),
        })?;
        if !x.is_admissible() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("non-finite position `{line}`"),
            });
        }
        if let Some(&prev) = positions.last() {
            if x == prev {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("duplicate position {x}"),
                });
            }
            if x < prev {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("position {x} is below its predecessor {prev}"),
                });
            }
        }
        positions.push(x);
    }
    PointSet::from_sorted(positions)
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_points(&text)
}

/// Shortest round-trip decimal form, one position per line.
pub fn format_points(points: &PointSet) -> String {
    let mut out = String::with_capacity(points.len() * 20);
    for x in points.positions() {
        writeln!(out, "{x}").unwrap();
    }
    out
}

pub fn write_points(points: &PointSet, path: &Path) -> Result<()> {
    write_file(path, &format_points(points))
}

/// `index,position,z` rows and a trailing `# z_max=.. argmax=..` line.
pub fn profile_to_csv(points: &PointSet, profile: &InterferenceProfile) -> Result<String> {
    check_lengths(points, profile)?;
    let mut out = String::from("index,position,z\n");
    for (i, (x, z)) in points.positions().iter().zip(profile.counts()).enumerate() {
        writeln!(out, "{i},{x},{z}").unwrap();
    }
    writeln!(out, "# z_max={} argmax={}", profile.max(), profile.argmax()).unwrap();
    Ok(out)
}

pub fn profile_to_json(points: &PointSet, profile: &InterferenceProfile) -> Result<String> {
    check_lengths(points, profile)?;
    #[derive(Serialize)]
    struct Doc<'a> {
        positions: &'a [f64],
        counts: &'a [usize],
        max: usize,
        argmax: usize,
    }
    let doc = Doc {
        positions: points.positions(),
        counts: profile.counts(),
        max: profile.max(),
        argmax: profile.argmax(),
    };
    Ok(serde_json::to_string(&doc)? + "\n")
}

fn check_lengths(points: &PointSet, profile: &InterferenceProfile) -> Result<()> {
    if points.len() != profile.len() {
        return Err(Error::LengthMismatch {
            left: points.len(),
            right: profile.len(),
        });
    }
    Ok(())
}
