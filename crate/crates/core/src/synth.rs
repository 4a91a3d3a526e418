//! Seeded leader/follower benchmark generators with full ground truth.
//!
//! Three families are produced:
//!
//! * **single**: one sine motif in the leader, repeated later in the follower;
//! * **continuous**: a train of up to ten copies of one motif separated by
//!   noise gaps of `⌈1.2 · motif length⌉`, replayed by the follower with
//!   per-motif lags;
//! * **noncontinuous**: the continuous layout with a block of noise spliced
//!   into the middle of the follower's replay, after which the follower is
//!   trimmed back to its original length.
//!
//! Non-motif samples are `N(0, 0.5²)`; the follower additionally receives
//! two independent `N(0, 0.1²)` passes. All draws come from a ChaCha8
//! stream keyed by the seed and the family, so every pair is a pure
//! function of `(family, seed, length, form)`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{series::add_noise_in_place, Error, Result, TimeSeries};

pub const DEFAULT_SERIES_LENGTH: usize = 2000;
pub const BACKGROUND_SIGMA: f64 = 0.5;
pub const FOLLOWER_NOISE_SIGMA: f64 = 0.1;
pub const FOLLOWER_NOISE_PASSES: usize = 2;
pub const MAX_LAG: usize = 3;
pub const MAX_MOTIFS: usize = 10;
pub const X1_RANGE: (f64, f64) = (0.2, 2.0);
pub const X2_RANGE: (f64, f64) = (3.0, 5.0);
/// Follower replay starts this fraction of the series after the leader.
pub const FOLLOW_OFFSET_FRACTION: (f64, f64) = (0.20, 0.35);
/// Motif length of the multi-motif families, as a fraction of the series.
pub const TRAIN_MOTIF_FRACTION: (f64, f64) = (0.025, 0.10);
/// Motif length of the single-motif family, as a fraction of the series.
pub const SINGLE_MOTIF_FRACTION: (f64, f64) = (0.15, 0.25);
/// Noise gap between consecutive motifs, relative to the motif length.
pub const GAP_RATIO: f64 = 1.2;
/// Length of the spliced-in noise block, as a fraction of the series.
pub const INTERRUPT_FRACTION: (f64, f64) = (0.10, 0.15);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Family {
    Single,
    Continuous,
    Noncontinuous,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Single, Family::Continuous, Family::Noncontinuous];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Single => "single",
            Family::Continuous => "continuous",
            Family::Noncontinuous => "noncontinuous",
        }
    }

    fn stream(self) -> u64 {
        match self {
            Family::Single => 1,
            Family::Continuous => 2,
            Family::Noncontinuous => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Family::Single),
            "continuous" => Ok(Family::Continuous),
            "noncontinuous" => Ok(Family::Noncontinuous),
            _ => Err(Error::InvalidParams("unknown family")),
        }
    }
}

/// Shape of the generated motif.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MotifForm {
    /// `sin(n · x1 / x2)`.
    #[default]
    Sine,
    /// `n · sin(x1 / x2)`, a straight ramp.
    Ramp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MotifParams {
    /// Highest sample index; the motif has `length + 1` samples.
    pub length: usize,
    pub x1: f64,
    pub x2: f64,
}

impl MotifParams {
    pub fn validate(&self) -> Result<()> {
        if !(X1_RANGE.0..=X1_RANGE.1).contains(&self.x1) {
            return Err(Error::InvalidParams("x1 outside [0.2, 2.0]"));
        }
        if !(X2_RANGE.0..=X2_RANGE.1).contains(&self.x2) {
            return Err(Error::InvalidParams("x2 outside [3.0, 5.0]"));
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        self.length + 1
    }
}

/// Motif samples for `n = 0 ..= length`.
pub fn gen_motif(params: &MotifParams, form: MotifForm) -> Result<Vec<f64>> {
    params.validate()?;
    let ratio = params.x1 / params.x2;
    Ok((0..=params.length)
        .map(|n| match form {
            MotifForm::Sine => libm::sin(n as f64 * ratio),
            MotifForm::Ramp => n as f64 * libm::sin(ratio),
        })
        .collect())
}

/// Half-open sample range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// Noise block spliced into a noncontinuous follower.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interrupt {
    pub start: usize,
    pub length: usize,
    /// Index of the first motif shifted by the splice.
    pub first_shifted_motif: usize,
}

/// Everything needed to audit a generated pair without its samples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroundTruth {
    pub family: Family,
    pub seed: u64,
    pub series_length: usize,
    pub form: MotifForm,
    pub motifs: Vec<MotifParams>,
    pub leader_intervals: Vec<Interval>,
    pub follower_intervals: Vec<Interval>,
    pub lags: Vec<usize>,
    /// Distance from each leader motif to its replay before lag and splice.
    pub follow_offset: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub interrupt: Option<Interrupt>,
}

impl GroundTruth {
    /// Expected follower start of motif `k` from the recorded layout.
    pub fn expected_follower_start(&self, k: usize) -> usize {
        let shift = match self.interrupt {
            Some(cut) if k >= cut.first_shifted_motif => cut.length,
            _ => 0,
        };
        self.leader_intervals[k].start + self.follow_offset + self.lags[k] + shift
    }

    pub fn leader_mask(&self) -> Vec<bool> {
        intervals_mask(&self.leader_intervals, self.series_length)
    }

    pub fn follower_mask(&self) -> Vec<bool> {
        intervals_mask(&self.follower_intervals, self.series_length)
    }
}

fn intervals_mask(intervals: &[Interval], len: usize) -> Vec<bool> {
    let mut mask = alloc::vec![false; len];
    for iv in intervals {
        mask[iv.range()].fill(true);
    }
    mask
}

/// A generated leader/follower pair.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabeledPair {
    pub leader: TimeSeries,
    pub follower: TimeSeries,
    pub truth: GroundTruth,
}

/// Length and motif shape shared by all generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub series_length: usize,
    pub form: MotifForm,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            series_length: DEFAULT_SERIES_LENGTH,
            form: MotifForm::Sine,
        }
    }
}

impl GeneratorConfig {
    pub fn with_length(series_length: usize) -> Self {
        Self {
            series_length,
            ..Self::default()
        }
    }
}

fn rng_for(family: Family, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(family.stream());
    rng
}

fn ceil_fraction<R: Rng>(rng: &mut R, len: usize, range: (f64, f64)) -> usize {
    let f = rng.random_range(range.0..=range.1);
    libm::ceil(len as f64 * f) as usize
}

fn draw_motif<R: Rng>(rng: &mut R, length: usize) -> MotifParams {
    MotifParams {
        length,
        x1: rng.random_range(X1_RANGE.0..=X1_RANGE.1),
        x2: rng.random_range(X2_RANGE.0..=X2_RANGE.1),
    }
}

fn background<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let normal = Normal::new(0.0, BACKGROUND_SIGMA).expect("valid sigma");
    (0..len).map(|_| normal.sample(rng)).collect()
}

fn finish<R: Rng>(
    rng: &mut R,
    leader: Vec<f64>,
    mut follower: Vec<f64>,
    truth: GroundTruth,
) -> Result<LabeledPair> {
    for _ in 0..FOLLOWER_NOISE_PASSES {
        add_noise_in_place(&mut follower, FOLLOWER_NOISE_SIGMA, rng);
    }
    Ok(LabeledPair {
        leader: TimeSeries::new(leader)?.with_name("leader"),
        follower: TimeSeries::new(follower)?.with_name("follower"),
        truth,
    })
}

/// One motif in the leader and its delayed copy in the follower.
pub fn gen_single_motif_pair(seed: u64, series_length: usize) -> Result<LabeledPair> {
    gen_single_motif_pair_with(seed, GeneratorConfig::with_length(series_length))
}

pub fn gen_single_motif_pair_with(seed: u64, config: GeneratorConfig) -> Result<LabeledPair> {
    let len = config.series_length;
    let required = min_length_single(len);
    if len < required || len < 8 {
        return Err(Error::LengthTooShort {
            required: required.max(8),
            actual: len,
        });
    }
    let mut rng = rng_for(Family::Single, seed);
    let motif_len = ceil_fraction(&mut rng, len, SINGLE_MOTIF_FRACTION);
    let params = draw_motif(&mut rng, motif_len);
    let offset = ceil_fraction(&mut rng, len, FOLLOW_OFFSET_FRACTION);
    let lag = rng.random_range(0..=MAX_LAG);
    let samples = params.samples();
    let slack = len - (samples + offset + lag);
    let start = rng.random_range(0..=slack);

    let motif = gen_motif(&params, config.form)?;
    let mut leader = background(&mut rng, len);
    let mut follower = background(&mut rng, len);
    let lead_iv = Interval::new(start, start + samples);
    let follow_iv = Interval::new(start + offset + lag, start + offset + lag + samples);
    leader[lead_iv.range()].copy_from_slice(&motif);
    follower[follow_iv.range()].copy_from_slice(&motif);

    let truth = GroundTruth {
        family: Family::Single,
        seed,
        series_length: len,
        form: config.form,
        motifs: alloc::vec![params],
        leader_intervals: alloc::vec![lead_iv],
        follower_intervals: alloc::vec![follow_iv],
        lags: alloc::vec![lag],
        follow_offset: offset,
        interrupt: None,
    };
    finish(&mut rng, leader, follower, truth)
}

/// Worst-case footprint of the single-motif layout.
fn min_length_single(len: usize) -> usize {
    let motif = libm::ceil(len as f64 * SINGLE_MOTIF_FRACTION.1) as usize + 1;
    let offset = libm::ceil(len as f64 * FOLLOW_OFFSET_FRACTION.1) as usize;
    motif + offset + MAX_LAG
}

/// A train of motifs replayed by the follower without interruption.
pub fn gen_continuous_pair(seed: u64, series_length: usize) -> Result<LabeledPair> {
    gen_train_pair(
        Family::Continuous,
        seed,
        GeneratorConfig::with_length(series_length),
    )
}

/// As [`gen_continuous_pair`], with a noise block spliced into the middle of
/// the follower's replay.
pub fn gen_noncontinuous_pair(seed: u64, series_length: usize) -> Result<LabeledPair> {
    gen_train_pair(
        Family::Noncontinuous,
        seed,
        GeneratorConfig::with_length(series_length),
    )
}

/// Generates one pair of the given family.
pub fn gen_pair(family: Family, seed: u64, config: GeneratorConfig) -> Result<LabeledPair> {
    match family {
        Family::Single => gen_single_motif_pair_with(seed, config),
        Family::Continuous | Family::Noncontinuous => gen_train_pair(family, seed, config),
    }
}

fn gen_train_pair(family: Family, seed: u64, config: GeneratorConfig) -> Result<LabeledPair> {
    let len = config.series_length;
    let spliced = family == Family::Noncontinuous;
    let min_count = if spliced { 2 } else { 1 };
    let required = min_length_train(len, min_count, spliced);
    if len < required || len < 8 {
        return Err(Error::LengthTooShort {
            required: required.max(8),
            actual: len,
        });
    }

    let mut rng = rng_for(family, seed);
    let motif_len = ceil_fraction(&mut rng, len, TRAIN_MOTIF_FRACTION);
    let samples = motif_len + 1;
    let gap = libm::ceil(motif_len as f64 * GAP_RATIO) as usize;
    let offset = ceil_fraction(&mut rng, len, FOLLOW_OFFSET_FRACTION);
    let cut_len = if spliced {
        ceil_fraction(&mut rng, len, INTERRUPT_FRACTION)
    } else {
        0
    };
    // room for the leader's train once the follower's replay must also fit
    let room = len - offset - MAX_LAG - cut_len;
    let count = ((room + gap) / (samples + gap)).min(MAX_MOTIFS);
    debug_assert!(count >= min_count);
    let span = count * samples + (count - 1) * gap;
    let first = rng.random_range(0..=room - span);

    // one shape per pair, repeated along the train
    let shape = draw_motif(&mut rng, motif_len);
    let motifs: Vec<MotifParams> = alloc::vec![shape; count];
    let lags: Vec<usize> = (0..count).map(|_| rng.random_range(0..=MAX_LAG)).collect();

    let mut leader = background(&mut rng, len);
    let mut follower = background(&mut rng, len);
    let mut leader_intervals = Vec::with_capacity(count);
    let mut follower_intervals = Vec::with_capacity(count);
    for (k, params) in motifs.iter().enumerate() {
        let motif = gen_motif(params, config.form)?;
        let lead = first + k * (samples + gap);
        let follow = lead + offset + lags[k];
        leader[lead..lead + samples].copy_from_slice(&motif);
        follower[follow..follow + samples].copy_from_slice(&motif);
        leader_intervals.push(Interval::new(lead, lead + samples));
        follower_intervals.push(Interval::new(follow, follow + samples));
    }

    let interrupt = if spliced {
        let shifted = count.div_ceil(2);
        // splice in the middle of the gap after the first half of the replay
        let before = follower_intervals[shifted - 1].end;
        let after = follower_intervals[shifted].start;
        let at = before + (after - before) / 2;
        let block = background(&mut rng, cut_len);
        follower.splice(at..at, block);
        follower.truncate(len);
        for iv in &mut follower_intervals[shifted..] {
            iv.start += cut_len;
            iv.end += cut_len;
        }
        Some(Interrupt {
            start: at,
            length: cut_len,
            first_shifted_motif: shifted,
        })
    } else {
        None
    };

    let truth = GroundTruth {
        family,
        seed,
        series_length: len,
        form: config.form,
        motifs,
        leader_intervals,
        follower_intervals,
        lags,
        follow_offset: offset,
        interrupt,
    };
    finish(&mut rng, leader, follower, truth)
}

/// Worst-case footprint of a train with `count` motifs.
fn min_length_train(len: usize, count: usize, spliced: bool) -> usize {
    let motif = libm::ceil(len as f64 * TRAIN_MOTIF_FRACTION.1) as usize;
    let gap = libm::ceil(motif as f64 * GAP_RATIO) as usize;
    let offset = libm::ceil(len as f64 * FOLLOW_OFFSET_FRACTION.1) as usize;
    let cut = if spliced {
        libm::ceil(len as f64 * INTERRUPT_FRACTION.1) as usize
    } else {
        0
    };
    count * (motif + 1) + (count - 1) * gap + offset + MAX_LAG + cut
}

/// All three families over `seeds`, family by family.
pub fn gen_mixed_dataset(seeds: Range<u64>, config: GeneratorConfig) -> Result<Vec<LabeledPair>> {
    let mut out = Vec::new();
    for family in Family::ALL {
        for seed in seeds.clone() {
            out.push(gen_pair(family, seed, config)?);
        }
    }
    Ok(out)
}

/// One family over `seeds`.
pub fn gen_dataset(
    family: Family,
    seeds: Range<u64>,
    config: GeneratorConfig,
) -> Result<Vec<LabeledPair>> {
    seeds.map(|seed| gen_pair(family, seed, config)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn motif_examples() {
        let p = MotifParams {
            length: 0,
            x1: 1.0,
            x2: 4.0,
        };
        assert_eq!(gen_motif(&p, MotifForm::Sine).unwrap(), alloc::vec![0.0]);

        let p = MotifParams {
            length: 4,
            x1: 2.0,
            x2: 4.0,
        };
        let got = gen_motif(&p, MotifForm::Sine).unwrap();
        let expected = [0.0f64, 0.5, 1.0, 1.5, 2.0].map(f64::sin);
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-15);
        }
        let ramp = gen_motif(&p, MotifForm::Ramp).unwrap();
        assert!((ramp[3] - 3.0 * 0.5f64.sin()).abs() < 1e-15);

        // slowest motif rises over its first quarter period (n·0.04 < π/2)
        let p = MotifParams {
            length: 39,
            x1: 0.2,
            x2: 5.0,
        };
        let v = gen_motif(&p, MotifForm::Sine).unwrap();
        assert!(v.windows(2).all(|w| w[1] > w[0]));

        let bad = MotifParams {
            length: 3,
            x1: 2.5,
            x2: 4.0,
        };
        assert!(matches!(
            gen_motif(&bad, MotifForm::Sine),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn single_is_deterministic_and_bounded() {
        let a = gen_single_motif_pair(0, 2000).unwrap();
        assert_eq!(a, gen_single_motif_pair(0, 2000).unwrap());
        assert_ne!(a, gen_single_motif_pair(1, 2000).unwrap());
        let t = &a.truth;
        let delta = t.follower_intervals[0].start - t.leader_intervals[0].start;
        assert!((400..=703).contains(&delta), "delta {delta}");
        assert_eq!(a.leader.len(), 2000);
        assert_eq!(a.follower.len(), 2000);
    }

    #[test]
    fn too_short_is_rejected() {
        assert!(matches!(
            gen_single_motif_pair(0, 5),
            Err(Error::LengthTooShort { .. })
        ));
        assert!(matches!(
            gen_continuous_pair(0, 5),
            Err(Error::LengthTooShort { .. })
        ));
        assert!(matches!(
            gen_noncontinuous_pair(0, 5),
            Err(Error::LengthTooShort { .. })
        ));
        assert!(gen_noncontinuous_pair(0, 200).is_ok());
    }

    #[test]
    fn continuous_structure() {
        for seed in 0..20 {
            let p = gen_continuous_pair(seed, 2000).unwrap();
            let t = &p.truth;
            assert!((1..=MAX_MOTIFS).contains(&t.motifs.len()));
            let motif_len = t.motifs[0].length;
            let gap = libm::ceil(motif_len as f64 * 1.2) as usize;
            for w in t.leader_intervals.windows(2) {
                assert!(w[1].start - w[0].end >= gap);
            }
        }
        assert_eq!(gen_continuous_pair(5, 2000), gen_continuous_pair(5, 2000));
    }

    #[test]
    fn noncontinuous_splice_avoids_motifs() {
        for seed in 0..20 {
            let p = gen_noncontinuous_pair(seed, 2000).unwrap();
            assert_eq!(p.follower.len(), 2000);
            let t = &p.truth;
            let cut = t.interrupt.unwrap();
            let block = Interval::new(cut.start, cut.start + cut.length);
            assert!(t.follower_intervals.iter().all(|iv| !iv.overlaps(&block)));
            assert!((200..=300).contains(&cut.length));
        }
    }

    #[test]
    fn mixed_cardinality() {
        let cfg = GeneratorConfig::default();
        let pairs = gen_mixed_dataset(0..10, cfg).unwrap();
        assert_eq!(pairs.len(), 30);
        for family in Family::ALL {
            assert_eq!(
                pairs.iter().filter(|p| p.truth.family == family).count(),
                10
            );
        }
        assert_eq!(pairs, gen_mixed_dataset(0..10, cfg).unwrap());
    }

    fn audit(pair: &LabeledPair) -> core::result::Result<(), TestCaseError> {
        let t = &pair.truth;
        prop_assert_eq!(t.leader_intervals.len(), t.follower_intervals.len());
        prop_assert_eq!(t.leader_intervals.len(), t.lags.len());
        prop_assert!(t.lags.len() <= MAX_MOTIFS && !t.lags.is_empty());
        for ivs in [&t.leader_intervals, &t.follower_intervals] {
            for w in ivs.windows(2) {
                prop_assert!(w[0].end <= w[1].start);
            }
            prop_assert!(ivs.last().unwrap().end <= t.series_length);
        }
        for k in 0..t.lags.len() {
            prop_assert!(t.lags[k] <= MAX_LAG);
            prop_assert_eq!(t.follower_intervals[k].start, t.expected_follower_start(k));
            let motif = gen_motif(&t.motifs[k], t.form).unwrap();
            // leader motifs are noise-free copies
            prop_assert_eq!(
                &pair.leader.values()[t.leader_intervals[k].range()],
                motif.as_slice()
            );
            // follower motifs differ only by the two small noise passes
            let follower = &pair.follower.values()[t.follower_intervals[k].range()];
            let resid: f64 = follower
                .iter()
                .zip(&motif)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                / motif.len() as f64;
            prop_assert!(libm::sqrt(resid) < 0.3, "residual {}", libm::sqrt(resid));
        }
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn ground_truth_sound(seed in 0u64..100_000, family in 0usize..3, len in 600usize..3000) {
            let pair = gen_pair(Family::ALL[family], seed, GeneratorConfig::with_length(len)).unwrap();
            prop_assert_eq!(pair.leader.len(), len);
            prop_assert_eq!(pair.follower.len(), len);
            audit(&pair)?;
        }
    }
}
