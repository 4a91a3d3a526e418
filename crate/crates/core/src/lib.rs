//! Variable-lag following-motif inference between two time series.
//!
//! Given a candidate leader and follower, the crate decides which series
//! leads, which time steps take part in the following relation and how the
//! two sides align, using AB-join matrix profiles under z-normalized
//! Euclidean distance. An exact (noise-free) inference path based on plain
//! Euclidean nearest neighbors is provided alongside the robust
//! percentile-threshold method.
//!
//! The crate also carries the seeded benchmark generators, a maximum
//! cross-correlation baseline and the confusion-matrix scoring used to
//! evaluate both leadership direction and per-time-step detection.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line live in the companion `lagmotif` crate.

#![no_std]
#![deny(missing_debug_implementations, rustdoc::broken_intra_doc_links)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baselines;
mod error;
pub mod eval;
pub mod follow;
pub mod matrix_profile;
pub mod series;
pub mod synth;

pub use self::{
    baselines::{max_cross_correlation_lead, CrossCorrResult},
    error::{Error, Result},
    eval::{
        eval_leadership, eval_timesteps, metrics_from_counts, noise_sweep, ConfusionCounts,
        MetricsReport, SeriesMasks, SweepRow,
    },
    follow::{
        align_intervals, expand_indices_to_mask, extract_motif_indices, following_motif_method,
        infer_following_motifs_exact, lead_value, FollowParams, FollowReport, FollowingMotifPair,
        FollowingMotifSet, NearestNeighborMatch,
    },
    matrix_profile::{matrix_profile_ab, matrix_profile_naive, matrix_profile_self, MatrixProfile},
    series::{
        add_gaussian_noise, distance_profile_plain, distance_profile_znorm, downsample_mean,
        subsequence, znormalize, SubseqSpec, TimeSeries,
    },
    synth::{Family, GroundTruth, Interval, LabeledPair, MotifForm, MotifParams},
};
