//! Benchmark scoring over labeled datasets: leadership direction for every
//! method and per-time-step motif masks for the following-motif method.

use std::fmt;

use anyhow::Result;
use lagmotif_core::baselines::default_max_lag;
use lagmotif_core::synth::Family;
use lagmotif_core::{
    eval::pair_timestep_counts, following_motif_method, max_cross_correlation_lead,
    metrics_from_counts, ConfusionCounts, FollowParams, LabeledPair, MetricsReport, SeriesMasks,
    TimeSeries,
};
use serde::{Deserialize, Serialize};

/// Percentile gap used for the benchmark tables. The method's own default
/// (0.01) keeps nearly half of every profile and floods the masks on the
/// synthetic families.
pub const BENCHMARK_PERCENTILE_GAP: f64 = 32.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Following-motif method.
    Fmm,
    /// Maximum cross-correlation baseline.
    Xcorr,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fmm => "fmm",
            Method::Xcorr => "xcorr",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub method: Method,
    pub params: FollowParams,
    /// Cross-correlation lag radius; `None` uses half the shorter series.
    pub max_lag: Option<usize>,
}

impl EvalConfig {
    pub fn fmm(params: FollowParams) -> Self {
        Self {
            method: Method::Fmm,
            params,
            max_lag: None,
        }
    }

    pub fn xcorr(max_lag: Option<usize>) -> Self {
        Self {
            method: Method::Xcorr,
            params: FollowParams::default(),
            max_lag,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub counts: ConfusionCounts,
    pub metrics: MetricsReport,
}

impl Score {
    fn from_counts(counts: ConfusionCounts) -> Result<Self> {
        Ok(Self {
            metrics: metrics_from_counts(&counts)?,
            counts,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyEvaluation {
    /// Family name, or `all` for the pooled row.
    pub family: String,
    pub pairs: usize,
    /// Method invocations that returned an error; each is scored as wrong.
    pub failures: usize,
    pub leadership: Score,
    /// Micro-averaged over leader and follower time steps (fmm only).
    pub timesteps: Option<Score>,
    /// The same time steps split by series (fmm only).
    pub timesteps_by_series: Option<SeriesScores>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesScores {
    pub leader: Score,
    pub follower: Score,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub method: Method,
    pub window: Option<usize>,
    pub percentile_gap: Option<f64>,
    pub max_lag: Option<usize>,
    pub families: Vec<FamilyEvaluation>,
    pub overall: FamilyEvaluation,
}

impl Evaluation {
    pub fn family(&self, family: Family) -> Option<&FamilyEvaluation> {
        self.families.iter().find(|f| f.family == family.as_str())
    }
}

#[derive(Default, Clone, Copy)]
struct Outcome {
    leadership: ConfusionCounts,
    leader_steps: ConfusionCounts,
    follower_steps: ConfusionCounts,
    failures: usize,
}

impl std::ops::Add for Outcome {
    type Output = Outcome;

    fn add(self, o: Outcome) -> Outcome {
        Outcome {
            leadership: self.leadership + o.leadership,
            leader_steps: self.leader_steps + o.leader_steps,
            follower_steps: self.follower_steps + o.follower_steps,
            failures: self.failures + o.failures,
        }
    }
}

/// Scores `dataset` in both presentation orders. Pairs are processed in
/// parallel; the result does not depend on the thread count.
pub fn evaluate(dataset: &[LabeledPair], config: &EvalConfig) -> Result<Evaluation> {
    anyhow::ensure!(!dataset.is_empty(), "empty dataset");
    let outcomes = par_map(dataset, |pair| score_pair(pair, config));
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let mut families = Vec::new();
    for family in Family::ALL {
        let members: Vec<Outcome> = dataset
            .iter()
            .zip(&outcomes)
            .filter(|(p, _)| p.truth.family == family)
            .map(|(_, o)| *o)
            .collect();
        if !members.is_empty() {
            families.push(summarize(family.as_str(), &members, config)?);
        }
    }
    let overall = summarize("all", &outcomes, config)?;
    let fmm = config.method == Method::Fmm;
    Ok(Evaluation {
        method: config.method,
        window: fmm.then_some(config.params.window),
        percentile_gap: fmm.then_some(config.params.percentile_gap),
        max_lag: if fmm { None } else { config.max_lag },
        families,
        overall,
    })
}

fn summarize(name: &str, outcomes: &[Outcome], config: &EvalConfig) -> Result<FamilyEvaluation> {
    let total = outcomes.iter().fold(Outcome::default(), |a, &b| a + b);
    Ok(FamilyEvaluation {
        family: name.to_owned(),
        pairs: outcomes.len(),
        failures: total.failures,
        leadership: Score::from_counts(total.leadership)?,
        timesteps: match config.method {
            Method::Fmm => Some(Score::from_counts(
                total.leader_steps + total.follower_steps,
            )?),
            Method::Xcorr => None,
        },
        timesteps_by_series: match config.method {
            Method::Fmm => Some(SeriesScores {
                leader: Score::from_counts(total.leader_steps)?,
                follower: Score::from_counts(total.follower_steps)?,
            }),
            Method::Xcorr => None,
        },
    })
}

fn score_pair(pair: &LabeledPair, config: &EvalConfig) -> Result<Outcome> {
    let xcorr = |a: &TimeSeries, b: &TimeSeries| {
        let lag = config.max_lag.unwrap_or_else(|| default_max_lag(a, b));
        max_cross_correlation_lead(a, b, lag).map(|r| r.decision)
    };
    let mut out = Outcome::default();
    let (forward, backward) = match config.method {
        Method::Fmm => {
            let forward = following_motif_method(&pair.leader, &pair.follower, config.params);
            let predicted = match &forward {
                Ok(r) => SeriesMasks {
                    leader: r.leader_mask.clone(),
                    follower: r.follower_mask.clone(),
                },
                Err(_) => SeriesMasks {
                    leader: vec![false; pair.leader.len()],
                    follower: vec![false; pair.follower.len()],
                },
            };
            let steps = pair_timestep_counts(&predicted, &SeriesMasks::truth_of(pair))?;
            out.leader_steps = steps.leader;
            out.follower_steps = steps.follower;
            let backward = following_motif_method(&pair.follower, &pair.leader, config.params);
            (
                forward.map(|r| r.lead_decision),
                backward.map(|r| r.lead_decision),
            )
        }
        Method::Xcorr => (
            xcorr(&pair.leader, &pair.follower),
            xcorr(&pair.follower, &pair.leader),
        ),
    };
    out.failures = usize::from(forward.is_err()) + usize::from(backward.is_err());
    out.leadership.record(forward.unwrap_or(false), true);
    out.leadership.record(backward.unwrap_or(true), false);
    Ok(out)
}

fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("evaluation worker panicked"))
            .collect()
    })
}
