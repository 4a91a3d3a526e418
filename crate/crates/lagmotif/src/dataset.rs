//! On-disk layout of generated benchmark pairs.
//!
//! Each pair is stored as three files sharing the stem `{family}_{seed}`
//! (seed zero-padded to six digits): `_leader.csv`, `_follower.csv` and a
//! `_truth.json` sidecar holding the serialized ground truth.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lagmotif_core::synth::Family;
use lagmotif_core::{GroundTruth, LabeledPair};

use crate::io::{load_csv, read_json, series_csv, to_io, write_atomic};
use crate::report::to_json;

const TRUTH_SUFFIX: &str = "_truth.json";

pub fn pair_stem(family: Family, seed: u64) -> String {
    format!("{family}_{seed:06}")
}

fn paths(dir: &Path, stem: &str) -> [PathBuf; 3] {
    [
        dir.join(format!("{stem}_leader.csv")),
        dir.join(format!("{stem}_follower.csv")),
        dir.join(format!("{stem}{TRUTH_SUFFIX}")),
    ]
}

pub fn write_pair(dir: &Path, pair: &LabeledPair) -> Result<()> {
    let stem = pair_stem(pair.truth.family, pair.truth.seed);
    let [leader, follower, truth] = paths(dir, &stem);
    write_atomic(leader, series_csv(&pair.leader).as_bytes())?;
    write_atomic(follower, series_csv(&pair.follower).as_bytes())?;
    write_atomic(truth, to_json(&pair.truth).as_bytes())?;
    Ok(())
}

/// Loads every pair in `dir`, ordered by family then seed.
pub fn load_dataset(dir: &Path) -> Result<Vec<LabeledPair>> {
    let entries = fs::read_dir(dir).map_err(|e| to_io(dir, e))?;
    let mut stems = Vec::new();
    for entry in entries {
        let name = entry?.file_name();
        if let Some(stem) = name.to_str().and_then(|n| n.strip_suffix(TRUTH_SUFFIX)) {
            stems.push(stem.to_owned());
        }
    }
    if stems.is_empty() {
        bail!("{}: no *{TRUTH_SUFFIX} files", dir.display());
    }
    let mut pairs = stems
        .iter()
        .map(|stem| load_pair(dir, stem).with_context(|| format!("loading pair {stem}")))
        .collect::<Result<Vec<_>>>()?;
    pairs.sort_by_key(|p| (p.truth.family, p.truth.seed));
    Ok(pairs)
}

fn load_pair(dir: &Path, stem: &str) -> Result<LabeledPair> {
    let [leader, follower, truth] = paths(dir, stem);
    let truth: GroundTruth = read_json(&truth)?;
    let leader = load_csv(&leader)?.with_name("leader");
    let follower = load_csv(&follower)?.with_name("follower");
    for (series, role) in [(&leader, "leader"), (&follower, "follower")] {
        if series.len() != truth.series_length {
            bail!(
                "{stem}: {role} has {} samples, ground truth records {}",
                series.len(),
                truth.series_length
            );
        }
    }
    let within = |ivs: &[lagmotif_core::Interval]| {
        ivs.iter()
            .all(|iv| iv.start < iv.end && iv.end <= truth.series_length)
    };
    if !within(&truth.leader_intervals) || !within(&truth.follower_intervals) {
        bail!("{stem}: ground-truth interval outside the series");
    }
    Ok(LabeledPair {
        leader,
        follower,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use lagmotif_core::synth::{gen_pair, GeneratorConfig};

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let config = GeneratorConfig::with_length(400);
        let mut written = Vec::new();
        for family in [Family::Noncontinuous, Family::Single] {
            for seed in [3, 1] {
                let pair = gen_pair(family, seed, config).unwrap();
                write_pair(dir.path(), &pair).unwrap();
                written.push(pair);
            }
        }
        let loaded = load_dataset(dir.path()).unwrap();
        let keys: Vec<_> = loaded
            .iter()
            .map(|p| (p.truth.family, p.truth.seed))
            .collect();
        assert_eq!(
            keys,
            vec![
                (Family::Single, 1),
                (Family::Single, 3),
                (Family::Noncontinuous, 1),
                (Family::Noncontinuous, 3)
            ]
        );
        for pair in &loaded {
            let original = written
                .iter()
                .find(|p| p.truth.family == pair.truth.family && p.truth.seed == pair.truth.seed)
                .unwrap();
            assert_eq!(pair.truth, original.truth);
            assert_eq!(pair.leader.values(), original.leader.values());
            assert_eq!(pair.follower.values(), original.follower.values());
        }
    }

    #[test]
    fn empty_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_dataset(dir.path()).is_err());
    }
}
