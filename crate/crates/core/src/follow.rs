//! Following-motif inference.
//!
//! Two routes are provided:
//!
//! * [`infer_following_motifs_exact`] enumerates, for every window of the
//!   leader, its tied plain-Euclidean nearest neighbors in the follower and
//!   keeps those that are equal and do not precede it. This is the formal,
//!   noise-free definition of a variable-lag following motif.
//! * [`following_motif_method`] is the robust route for noisy data: it
//!   joins both series against each other, keeps the positions whose profile
//!   falls below the `(50 - gap)`-th percentile, and scores leadership by the
//!   mean index difference between the follower's and the leader's motif
//!   positions.

use alloc::vec::Vec;

use crate::{
    matrix_profile::{matrix_profile_ab, MatrixProfile},
    series::squared_distance,
    Error, Result, TimeSeries,
};

/// Absolute tolerance used when collecting tied nearest neighbors.
pub const NEIGHBOR_TIE_TOLERANCE: f64 = 1e-12;

/// Profile values at or below this are exact matches and always count as
/// motif positions, even when they coincide with the percentile threshold.
pub const EXACT_MATCH_DISTANCE: f64 = 1e-9;

/// A leader window at `leader_start` reproduced by the follower `lag`
/// samples later.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FollowingMotifPair {
    pub leader_start: usize,
    pub follower_start: usize,
    pub lag: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FollowingMotifSet {
    pub pairs: Vec<FollowingMotifPair>,
    pub window: usize,
}

impl FollowingMotifSet {
    pub fn contains(&self, leader_start: usize, follower_start: usize) -> bool {
        self.pairs
            .iter()
            .any(|p| p.leader_start == leader_start && p.follower_start == follower_start)
    }
}

/// All nearest neighbors of one query window that share the minimum
/// distance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NearestNeighborMatch {
    pub query_start: usize,
    pub neighbor_starts: Vec<usize>,
    pub distance: f64,
}

fn check_window(window: usize, n_w: usize, n_u: usize) -> Result<()> {
    if window < 2 {
        return Err(Error::InvalidWindow { window });
    }
    let max = n_w.min(n_u);
    if window > max {
        return Err(Error::WindowTooLarge { window, max });
    }
    Ok(())
}

/// Plain-Euclidean similar join: every window of `w` with its set of tied
/// nearest windows in `u`.
pub fn nearest_neighbor_sets(
    w: &TimeSeries,
    u: &TimeSeries,
    window: usize,
) -> Result<Vec<NearestNeighborMatch>> {
    check_window(window, w.len(), u.len())?;
    let cutoff = NEIGHBOR_TIE_TOLERANCE * NEIGHBOR_TIE_TOLERANCE;
    Ok(w.values()
        .windows(window)
        .enumerate()
        .map(|(i, query)| {
            let mut best = f64::INFINITY;
            let mut starts = Vec::new();
            for (j, cand) in u.values().windows(window).enumerate() {
                let d2 = bounded_sq_distance(query, cand, best + cutoff);
                if d2 < best - cutoff {
                    best = d2;
                    starts.clear();
                    starts.push(j);
                } else if d2 <= best + cutoff {
                    starts.push(j);
                    best = best.min(d2);
                }
            }
            // drop entries admitted before a marginally smaller minimum arrived
            let reference = best;
            starts.retain(|&j| {
                squared_distance(query, &u.values()[j..j + window]) <= reference + cutoff
            });
            NearestNeighborMatch {
                query_start: i,
                neighbor_starts: starts,
                distance: libm::sqrt(best),
            }
        })
        .collect())
}

/// Squared distance with early abandoning once `limit` is exceeded.
fn bounded_sq_distance(a: &[f64], b: &[f64], limit: f64) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += (x - y) * (x - y);
        if acc > limit {
            return acc;
        }
    }
    acc
}

/// Exact variable-lag following motifs of `u` following `w`.
///
/// A pair `(i, j)` is reported when `u`'s window at `j` is one of the tied
/// nearest neighbors of `w`'s window at `i`, `j >= i`, and the two windows
/// agree element-wise within `epsilon`.
pub fn infer_following_motifs_exact(
    w: &TimeSeries,
    u: &TimeSeries,
    window: usize,
    epsilon: f64,
) -> Result<FollowingMotifSet> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let joins = nearest_neighbor_sets(w, u, window)?;
    let mut pairs = Vec::new();
    for nn in &joins {
        let i = nn.query_start;
        let query = &w.values()[i..i + window];
        for &j in nn.neighbor_starts.iter().filter(|&&j| j >= i) {
            let cand = &u.values()[j..j + window];
            if query
                .iter()
                .zip(cand)
                .all(|(x, y)| (x - y).abs() <= epsilon)
            {
                pairs.push(FollowingMotifPair {
                    leader_start: i,
                    follower_start: j,
                    lag: j - i,
                    distance: nn.distance,
                });
            }
        }
    }
    Ok(FollowingMotifSet { pairs, window })
}

/// Parameters of [`following_motif_method`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FollowParams {
    pub window: usize,
    /// In percentile points: motif positions are those below the
    /// `(50 - percentile_gap)`-th percentile of the profile.
    pub percentile_gap: f64,
}

impl Default for FollowParams {
    fn default() -> Self {
        Self {
            window: 300,
            percentile_gap: 0.01,
        }
    }
}

impl FollowParams {
    pub fn new(window: usize, percentile_gap: f64) -> Self {
        Self {
            window,
            percentile_gap,
        }
    }
}

/// Outcome of [`following_motif_method`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FollowReport {
    /// `true` when the first input leads (`lead_value > 0`).
    pub lead_decision: bool,
    /// Mean of `follower_index - leader_index` over the aligned motif
    /// positions, in samples.
    pub lead_value: f64,
    /// `lead_value` divided by the number of aligned positions.
    pub lead_value_per_pair: f64,
    /// `lead_value` divided by the leader's length.
    pub lead_value_per_sample: f64,
    pub leader_motif_indices: Vec<usize>,
    pub follower_motif_indices: Vec<usize>,
    pub leader_threshold: f64,
    pub follower_threshold: f64,
    pub leader_mask: Vec<bool>,
    pub follower_mask: Vec<bool>,
    pub aligned_pairs: Vec<(usize, usize)>,
    pub window: usize,
    pub percentile_gap: f64,
}

/// Robust leadership inference between a candidate leader and follower.
pub fn following_motif_method(
    leader: &TimeSeries,
    follower: &TimeSeries,
    params: FollowParams,
) -> Result<FollowReport> {
    check_gap(params.percentile_gap)?;
    let window = params.window;
    let mp_leader = matrix_profile_ab(leader, follower, window)?;
    let mp_follower = matrix_profile_ab(follower, leader, window)?;

    let leader_threshold = motif_threshold(&mp_leader.profile, params.percentile_gap);
    let follower_threshold = motif_threshold(&mp_follower.profile, params.percentile_gap);
    let leader_idx = below(&mp_leader.profile, leader_threshold);
    let follower_idx = below(&mp_follower.profile, follower_threshold);

    let value = lead_value(&follower_idx, &leader_idx)?;
    let aligned = align_intervals(&leader_idx, &follower_idx);
    Ok(FollowReport {
        lead_decision: value > 0.0,
        lead_value: value,
        lead_value_per_pair: value / aligned.len() as f64,
        lead_value_per_sample: value / leader.len() as f64,
        leader_mask: expand_indices_to_mask(&leader_idx, window, leader.len())?,
        follower_mask: expand_indices_to_mask(&follower_idx, window, follower.len())?,
        leader_motif_indices: leader_idx,
        follower_motif_indices: follower_idx,
        leader_threshold,
        follower_threshold,
        aligned_pairs: aligned,
        window,
        percentile_gap: params.percentile_gap,
    })
}

fn check_gap(gap: f64) -> Result<()> {
    if gap > 0.0 && gap < 50.0 {
        Ok(())
    } else {
        Err(Error::InvalidPercentileGap(gap))
    }
}

/// Linear-interpolation percentile (`q` in `[0, 100]`) of non-empty data.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = libm::floor(rank) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn motif_threshold(profile: &[f64], gap: f64) -> f64 {
    percentile(profile, 50.0 - gap)
}

fn below(profile: &[f64], threshold: f64) -> Vec<usize> {
    profile
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d < threshold || d <= EXACT_MATCH_DISTANCE)
        .map(|(i, _)| i)
        .collect()
}

/// Positions whose profile value lies strictly below the
/// `(50 - percentile_gap)`-th percentile, in increasing order. Exact
/// matches (see [`EXACT_MATCH_DISTANCE`]) are always included.
pub fn extract_motif_indices(profile: &MatrixProfile, percentile_gap: f64) -> Result<Vec<usize>> {
    check_gap(percentile_gap)?;
    if profile.is_empty() {
        return Ok(Vec::new());
    }
    Ok(below(
        &profile.profile,
        motif_threshold(&profile.profile, percentile_gap),
    ))
}

/// Mean of `follower[k] - leader[k]` over the common prefix of both index
/// vectors. Positive when the follower's motifs come later.
pub fn lead_value(follower_indices: &[usize], leader_indices: &[usize]) -> Result<f64> {
    if follower_indices.is_empty() || leader_indices.is_empty() {
        return Err(Error::EmptyMotifSet);
    }
    let len = follower_indices.len().min(leader_indices.len());
    let sum: f64 = follower_indices
        .iter()
        .zip(leader_indices)
        .map(|(&f, &l)| f as f64 - l as f64)
        .sum();
    Ok(sum / len as f64)
}

/// Marks every time step covered by a window starting at one of `indices`.
pub fn expand_indices_to_mask(
    indices: &[usize],
    window: usize,
    series_length: usize,
) -> Result<Vec<bool>> {
    let max = series_length.saturating_sub(window);
    let mut mask = alloc::vec![false; series_length];
    if indices.is_empty() {
        return Ok(mask);
    }
    if window == 0 || window > series_length {
        return Err(Error::IndexOutOfRange {
            index: indices[0],
            max,
        });
    }
    for &index in indices {
        if index > max {
            return Err(Error::IndexOutOfRange { index, max });
        }
        mask[index..index + window].fill(true);
    }
    Ok(mask)
}

/// Pairs the k-th leader position with the k-th follower position over the
/// common prefix.
pub fn align_intervals(
    leader_indices: &[usize],
    follower_indices: &[usize],
) -> Vec<(usize, usize)> {
    leader_indices
        .iter()
        .copied()
        .zip(follower_indices.iter().copied())
        .collect()
}

/// Maximal runs of `true` as half-open `(start, end)` ranges.
pub fn mask_runs(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &on) in mask.iter().enumerate() {
        match (on, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, mask.len()));
    }
    runs
}
