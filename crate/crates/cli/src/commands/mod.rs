pub mod correlate;
pub mod extract;
pub mod fit;
pub mod report;
pub mod rules;
pub mod simulate;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use metasoc_core::constructions::MetaphorProfile;
use serde::de::DeserializeOwned;

use crate::run::{Classify, Failure, Outputs};

pub const PROFILE_SUFFIX: &str = ".profile.json";

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path, out: &mut Outputs) -> Result<T, Failure> {
    out.input(path);
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).input()?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display())).input()
}

/// Every `*.profile.json` in `dir`, in file-name order.
pub(crate) fn load_profiles(dir: &Path, out: &mut Outputs) -> Result<Vec<MetaphorProfile>, Failure> {
    let entries = fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display())).input()?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(PROFILE_SUFFIX)))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(crate::run::input_error(format!("no *{PROFILE_SUFFIX} files in {}", dir.display())));
    }
    paths.iter().map(|p| read_json(p, out)).collect()
}

/// `lo:hi:step` (inclusive) or a single value. Values are rounded to 1e-9
/// so that grid points like 1.0 come out exact.
pub(crate) fn parse_range(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number {p:?} in {text:?}")))
        .collect::<anyhow::Result<_>>()?;
    match parts[..] {
        [v] => Ok(vec![v]),
        [lo, hi, step] => {
            if step.is_nan() || step <= 0.0 || hi < lo {
                bail!("range {text:?} needs lo ≤ hi and a positive step");
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9).collect())
        }
        _ => bail!("expected a value or lo:hi:step, got {text:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.5:2.5:0.5").unwrap(), vec![0.5, 1.0, 1.5, 2.0, 2.5]);
        assert_eq!(parse_range("2").unwrap(), vec![2.0]);
        let xs = parse_range("0.2:5:0.05").unwrap();
        assert_eq!(xs.len(), 97);
        assert!(xs.contains(&1.0));
        assert_eq!(*xs.last().unwrap(), 5.0);
        assert!(parse_range("1:0:1").is_err());
        assert!(parse_range("1:2").is_err());
        assert!(parse_range("1:2:0").is_err());
    }
}
