//! Confusion-matrix scoring for leadership direction and per-time-step
//! following-motif detection, plus the noise-sweep protocol.

use alloc::vec::Vec;
use core::iter::Sum;
use core::ops::{Add, AddAssign};

use crate::{
    follow::{following_motif_method, FollowParams},
    series::add_gaussian_noise,
    synth::LabeledPair,
    Error, Result, TimeSeries,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[cfg_attr(feature = "serde", serde(rename = "fn"))]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Records one binary outcome.
    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn scaled(&self, k: u64) -> Self {
        Self {
            tp: self.tp * k,
            fp: self.fp * k,
            fn_: self.fn_ * k,
            tn: self.tn * k,
        }
    }
}

impl Add for ConfusionCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            tp: self.tp + rhs.tp,
            fp: self.fp + rhs.fp,
            fn_: self.fn_ + rhs.fn_,
            tn: self.tn + rhs.tn,
        }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Precision, recall, F1 and accuracy; any `0 / 0` is reported as 0.
pub fn metrics_from_counts(c: &ConfusionCounts) -> Result<MetricsReport> {
    if c.total() == 0 {
        return Err(Error::EmptyCounts);
    }
    let (tp, fp, fn_, tn) = (c.tp as f64, c.fp as f64, c.fn_ as f64, c.tn as f64);
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    Ok(MetricsReport {
        precision,
        recall,
        f1: ratio(2.0 * precision * recall, precision + recall),
        accuracy: (tp + tn) / (tp + fp + fn_ + tn),
    })
}

/// Presents every pair in both orders. In the true order a positive
/// decision is a TP and a negative one a FN; in the swapped order a
/// positive decision is a FP and a negative one a TN. Errors count as
/// wrong answers.
pub fn leadership_counts<F>(mut method: F, dataset: &[LabeledPair]) -> Result<ConfusionCounts>
where
    F: FnMut(&TimeSeries, &TimeSeries) -> Result<bool>,
{
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut counts = ConfusionCounts::default();
    for pair in dataset {
        let forward = method(&pair.leader, &pair.follower).unwrap_or(false);
        counts.record(forward, true);
        let backward = method(&pair.follower, &pair.leader).unwrap_or(true);
        counts.record(backward, false);
    }
    Ok(counts)
}

/// [`leadership_counts`] reduced to metrics.
pub fn eval_leadership<F>(method: F, dataset: &[LabeledPair]) -> Result<MetricsReport>
where
    F: FnMut(&TimeSeries, &TimeSeries) -> Result<bool>,
{
    metrics_from_counts(&leadership_counts(method, dataset)?)
}

/// Per-time-step masks of both series of one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeriesMasks {
    pub leader: Vec<bool>,
    pub follower: Vec<bool>,
}

impl SeriesMasks {
    pub fn truth_of(pair: &LabeledPair) -> Self {
        Self {
            leader: pair.truth.leader_mask(),
            follower: pair.truth.follower_mask(),
        }
    }
}

/// Confusion counts of one predicted mask against its truth.
pub fn timestep_counts(predicted: &[bool], truth: &[bool]) -> Result<ConfusionCounts> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &t) in predicted.iter().zip(truth) {
        counts.record(p, t);
    }
    Ok(counts)
}

/// Time-step counts split by series.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimestepCounts {
    pub leader: ConfusionCounts,
    pub follower: ConfusionCounts,
}

impl TimestepCounts {
    pub fn combined(&self) -> ConfusionCounts {
        self.leader + self.follower
    }
}

impl Add for TimestepCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            leader: self.leader + rhs.leader,
            follower: self.follower + rhs.follower,
        }
    }
}

impl Sum for TimestepCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

pub fn pair_timestep_counts(
    predicted: &SeriesMasks,
    truth: &SeriesMasks,
) -> Result<TimestepCounts> {
    Ok(TimestepCounts {
        leader: timestep_counts(&predicted.leader, &truth.leader)?,
        follower: timestep_counts(&predicted.follower, &truth.follower)?,
    })
}

/// Micro-averaged per-time-step metrics over both series of every pair.
pub fn eval_timesteps(predicted: &[SeriesMasks], truth: &[SeriesMasks]) -> Result<MetricsReport> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let counts = predicted
        .iter()
        .zip(truth)
        .map(|(p, t)| pair_timestep_counts(p, t))
        .sum::<Result<TimestepCounts>>()?;
    metrics_from_counts(&counts.combined())
}

/// One row of a noise sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    pub noise: f64,
    pub lead_value: f64,
    pub lead_decision: bool,
    /// Per-time-step metrics, present when ground truth was supplied.
    pub metrics: Option<MetricsReport>,
}

/// Adds seeded noise of each `sigma` to both series (the follower uses
/// `seed + 1`), reruns the following-motif method and scores the masks
/// against `truth` when given. Rows follow the order of `sigmas`.
pub fn noise_sweep(
    leader: &TimeSeries,
    follower: &TimeSeries,
    truth: Option<&SeriesMasks>,
    sigmas: &[f64],
    params: FollowParams,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if sigmas.is_empty() {
        return Err(Error::EmptyDataset);
    }
    sigmas
        .iter()
        .map(|&sigma| {
            let noisy_leader = add_gaussian_noise(leader, sigma, seed)?;
            let noisy_follower = add_gaussian_noise(follower, sigma, seed.wrapping_add(1))?;
            let report = following_motif_method(&noisy_leader, &noisy_follower, params)?;
            let metrics = truth
                .map(|t| {
                    let predicted = SeriesMasks {
                        leader: report.leader_mask.clone(),
                        follower: report.follower_mask.clone(),
                    };
                    metrics_from_counts(&pair_timestep_counts(&predicted, t)?.combined())
                })
                .transpose()?;
            Ok(SweepRow {
                noise: sigma,
                lead_value: report.lead_value,
                lead_decision: report.lead_decision,
                metrics,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_dataset, Family, GeneratorConfig};
    use alloc::vec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn counts(tp: u64, fp: u64, fn_: u64, tn: u64) -> ConfusionCounts {
        ConfusionCounts { tp, fp, fn_, tn }
    }

    #[test]
    fn metric_examples() {
        let m = metrics_from_counts(&counts(10, 0, 0, 10)).unwrap();
        assert_eq!(
            (m.precision, m.recall, m.f1, m.accuracy),
            (1.0, 1.0, 1.0, 1.0)
        );

        let m = metrics_from_counts(&counts(3, 1, 1, 5)).unwrap();
        assert!((m.precision - 0.75).abs() < 1e-15);
        assert!((m.recall - 0.75).abs() < 1e-15);
        assert!((m.f1 - 0.75).abs() < 1e-15);
        assert!((m.accuracy - 0.8).abs() < 1e-15);

        let m = metrics_from_counts(&counts(0, 0, 5, 5)).unwrap();
        assert_eq!(
            (m.precision, m.recall, m.f1, m.accuracy),
            (0.0, 0.0, 0.0, 0.5)
        );

        assert_eq!(
            metrics_from_counts(&counts(0, 0, 0, 0)),
            Err(Error::EmptyCounts)
        );
    }

    fn tiny_dataset(n: u64) -> Vec<LabeledPair> {
        gen_dataset(Family::Single, 0..n, GeneratorConfig::with_length(400)).unwrap()
    }

    #[test]
    fn oracle_method_is_perfect() {
        let data = tiny_dataset(5);
        let m = eval_leadership(|a, _| Ok(a.name() == Some("leader")), &data).unwrap();
        assert_eq!(
            (m.precision, m.recall, m.f1, m.accuracy),
            (1.0, 1.0, 1.0, 1.0)
        );
        assert_eq!(
            eval_leadership(|_, _| Ok(true), &[]),
            Err(Error::EmptyDataset)
        );
    }

    #[test]
    fn coin_flip_is_half_right() {
        let data = tiny_dataset(500);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let m = eval_leadership(|_, _| Ok(rng.random_bool(0.5)), &data).unwrap();
        assert!((m.accuracy - 0.5).abs() < 0.05, "accuracy {}", m.accuracy);
    }

    #[test]
    fn errors_count_as_wrong() {
        let data = tiny_dataset(3);
        let c = leadership_counts(|_, _| Err(Error::EmptyMotifSet), &data).unwrap();
        assert_eq!(c, counts(0, 3, 3, 0));
    }

    #[test]
    fn timestep_examples() {
        let truth = vec![SeriesMasks {
            leader: vec![true, false, true, false],
            follower: vec![false, false, true, true],
        }];
        let m = eval_timesteps(&truth, &truth).unwrap();
        assert_eq!(
            (m.precision, m.recall, m.f1, m.accuracy),
            (1.0, 1.0, 1.0, 1.0)
        );

        let none = vec![SeriesMasks {
            leader: vec![false; 4],
            follower: vec![false; 4],
        }];
        let m = eval_timesteps(&none, &truth).unwrap();
        assert_eq!((m.precision, m.recall), (0.0, 0.0));
        assert!((m.accuracy - 4.0 / 8.0).abs() < 1e-15);

        let short = vec![SeriesMasks {
            leader: vec![false; 3],
            follower: vec![false; 4],
        }];
        assert!(matches!(
            eval_timesteps(&short, &truth),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn sweep_rows_follow_sigmas() {
        let pair = &tiny_dataset(1)[0];
        let truth = SeriesMasks::truth_of(pair);
        let params = FollowParams::new(40, 10.0);
        let rows = noise_sweep(
            &pair.leader,
            &pair.follower,
            Some(&truth),
            &[0.0, 0.05, 0.01],
            params,
            3,
        )
        .unwrap();
        assert_eq!(
            rows.iter().map(|r| r.noise).collect::<Vec<_>>(),
            vec![0.0, 0.05, 0.01]
        );
        let direct = following_motif_method(&pair.leader, &pair.follower, params).unwrap();
        assert_eq!(rows[0].lead_value, direct.lead_value);
        assert!(rows.iter().all(|r| r.metrics.is_some()));
        assert!(noise_sweep(&pair.leader, &pair.follower, None, &[], params, 3).is_err());
    }

    fn arb_counts() -> impl Strategy<Value = ConfusionCounts> {
        (0u64..500, 0u64..500, 0u64..500, 0u64..500)
            .prop_filter("non-empty", |c| c.0 + c.1 + c.2 + c.3 > 0)
            .prop_map(|(tp, fp, fn_, tn)| counts(tp, fp, fn_, tn))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn metrics_identities(c in arb_counts(), k in 1u64..50) {
            let m = metrics_from_counts(&c).unwrap();
            for v in [m.precision, m.recall, m.f1, m.accuracy] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            if m.precision + m.recall > 0.0 {
                let f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
                prop_assert!((m.f1 - f1).abs() < 1e-12);
            }
            let acc = (c.tp + c.tn) as f64 / c.total() as f64;
            prop_assert!((m.accuracy - acc).abs() < 1e-12);
            let s = metrics_from_counts(&c.scaled(k)).unwrap();
            prop_assert!((s.precision - m.precision).abs() < 1e-12);
            prop_assert!((s.recall - m.recall).abs() < 1e-12);
            prop_assert!((s.f1 - m.f1).abs() < 1e-12);
            prop_assert!((s.accuracy - m.accuracy).abs() < 1e-12);
        }

        #[test]
        fn micro_average_is_sum_of_pairs(masks in prop::collection::vec((prop::collection::vec(any::<bool>(), 6), prop::collection::vec(any::<bool>(), 6)), 1..6)) {
            let predicted: Vec<SeriesMasks> = masks.iter().map(|(p, _)| SeriesMasks { leader: p.clone(), follower: p.iter().map(|b| !b).collect() }).collect();
            let truth: Vec<SeriesMasks> = masks.iter().map(|(_, t)| SeriesMasks { leader: t.clone(), follower: t.clone() }).collect();
            let micro = eval_timesteps(&predicted, &truth).unwrap();
            let summed: ConfusionCounts = predicted.iter().zip(&truth)
                .map(|(p, t)| pair_timestep_counts(p, t).unwrap().combined())
                .sum();
            prop_assert_eq!(micro, metrics_from_counts(&summed).unwrap());
        }

        #[test]
        fn negated_method_complements_accuracy(seed in 0u64..1000) {
            let data = tiny_dataset(4);
            let decide = |a: &TimeSeries, b: &TimeSeries| -> bool {
                (a.values()[0] + b.values()[1] + seed as f64).sin() > 0.0
            };
            let m = eval_leadership(|a, b| Ok(decide(a, b)), &data).unwrap();
            let n = eval_leadership(|a, b| Ok(!decide(a, b)), &data).unwrap();
            prop_assert!((m.accuracy + n.accuracy - 1.0).abs() < 1e-12);
        }
    }
}
