//! AB-join and self-join matrix profiles under z-normalized Euclidean
//! distance.
//!
//! The optimized join walks the distance matrix diagonal by diagonal and
//! updates the centered cross products in O(1) per cell, so a join costs
//! O(n_A · n_B) regardless of the window. Cells whose correlation is within
//! a hair of 1 are recomputed directly, and every reported profile value
//! is recomputed from the raw windows, so near-zero distances are exact
//! rather than the residue of a cancellation.
//!
//! [`matrix_profile_naive`] is the independent double-loop reference.

use alloc::vec::Vec;

use crate::{
    series::{mean_std, znormalize, FLAT_EPSILON},
    Error, Result, TimeSeries,
};

/// Correlations above this are recomputed from the raw windows.
const NEAR_PERFECT_CORRELATION: f64 = 1.0 - 1e-8;

/// Per-position nearest-neighbor distances of one series' windows to
/// another's (or its own, for a self-join).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatrixProfile {
    /// Minimum z-normalized distance for each window of the profiled series.
    pub profile: Vec<f64>,
    /// Start of the nearest window in the neighbor series (smallest on ties).
    pub indices: Vec<usize>,
    pub window: usize,
    /// Length of the profiled series.
    pub series_len: usize,
    /// Length of the series searched for neighbors.
    pub neighbor_len: usize,
    /// Set for self-joins.
    #[cfg_attr(feature = "serde", serde(default))]
    pub exclusion_radius: Option<usize>,
}

impl MatrixProfile {
    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }
}

/// Default trivial-match exclusion radius for self-joins, `⌈window / 2⌉`.
pub fn default_exclusion_radius(window: usize) -> usize {
    window.div_ceil(2)
}

fn check_window(window: usize, n_a: usize, n_b: usize) -> Result<()> {
    if window < 2 {
        return Err(Error::InvalidWindow { window });
    }
    let max = n_a.min(n_b);
    if window > max {
        return Err(Error::WindowTooLarge { window, max });
    }
    Ok(())
}

/// Matrix profile of `a` against `b`: for every window of `a`, the distance
/// to and position of its nearest window in `b`. No exclusion zone.
pub fn matrix_profile_ab(a: &TimeSeries, b: &TimeSeries, window: usize) -> Result<MatrixProfile> {
    check_window(window, a.len(), b.len())?;
    let (profile, indices) = diagonal_join(a.values(), b.values(), window, None);
    Ok(MatrixProfile {
        profile,
        indices,
        window,
        series_len: a.len(),
        neighbor_len: b.len(),
        exclusion_radius: None,
    })
}

/// Self-join of `a`, skipping candidates with `|i - j| <= exclusion_radius`
/// (defaults to [`default_exclusion_radius`]).
pub fn matrix_profile_self(
    a: &TimeSeries,
    window: usize,
    exclusion_radius: Option<usize>,
) -> Result<MatrixProfile> {
    check_window(window, a.len(), a.len())?;
    let radius = exclusion_radius.unwrap_or_else(|| default_exclusion_radius(window));
    let (profile, indices) = diagonal_join(a.values(), a.values(), window, Some(radius));
    if profile.iter().any(|d| d.is_infinite()) {
        return Err(Error::DegenerateSeries(
            "exclusion radius leaves no admissible neighbor",
        ));
    }
    Ok(MatrixProfile {
        profile,
        indices,
        window,
        series_len: a.len(),
        neighbor_len: a.len(),
        exclusion_radius: Some(radius),
    })
}

/// Brute-force AB-join: z-normalizes every window and compares all pairs.
pub fn matrix_profile_naive(
    a: &TimeSeries,
    b: &TimeSeries,
    window: usize,
) -> Result<MatrixProfile> {
    check_window(window, a.len(), b.len())?;
    let zb = b
        .values()
        .windows(window)
        .map(znormalize)
        .collect::<Result<Vec<_>>>()?;
    let mut profile = Vec::with_capacity(a.len() - window + 1);
    let mut indices = Vec::with_capacity(a.len() - window + 1);
    for wa in a.values().windows(window) {
        let za = znormalize(wa)?;
        let mut best = f64::INFINITY;
        let mut best_j = 0;
        for (j, zw) in zb.iter().enumerate() {
            let mut acc = 0.0;
            for k in 0..window {
                let d = za[k] - zw[k];
                acc += d * d;
            }
            let d = libm::sqrt(acc);
            if d < best {
                best = d;
                best_j = j;
            }
        }
        profile.push(best);
        indices.push(best_j);
    }
    Ok(MatrixProfile {
        profile,
        indices,
        window,
        series_len: a.len(),
        neighbor_len: b.len(),
        exclusion_radius: None,
    })
}

/// Per-window statistics shared by the diagonal walk.
struct WindowStats {
    mean: Vec<f64>,
    std: Vec<f64>,
    /// `1 / ‖w - μ‖`, zero for flat windows.
    inv_norm: Vec<f64>,
    /// Half the change of the entering/leaving sample.
    df: Vec<f64>,
    /// Sum of the entering/leaving samples' deviations from their means.
    dg: Vec<f64>,
}

impl WindowStats {
    fn new(x: &[f64], m: usize) -> Self {
        let count = x.len() - m + 1;
        let mut mean = Vec::with_capacity(count);
        let mut std = Vec::with_capacity(count);
        let mut inv_norm = Vec::with_capacity(count);
        for w in x.windows(m) {
            let (mu, sd) = mean_std(w);
            mean.push(mu);
            std.push(sd);
            inv_norm.push(if sd < FLAT_EPSILON {
                0.0
            } else {
                1.0 / (sd * libm::sqrt(m as f64))
            });
        }
        let mut df = alloc::vec![0.0; count];
        let mut dg = alloc::vec![0.0; count];
        for i in 1..count {
            df[i] = 0.5 * (x[i + m - 1] - x[i - 1]);
            dg[i] = (x[i + m - 1] - mean[i]) + (x[i - 1] - mean[i - 1]);
        }
        Self {
            mean,
            std,
            inv_norm,
            df,
            dg,
        }
    }

    fn is_flat(&self, i: usize) -> bool {
        self.inv_norm[i] == 0.0
    }
}

/// Squared z-normalized distance computed directly from the raw windows.
fn direct_sq_distance(
    a: &[f64],
    sa: &WindowStats,
    i: usize,
    b: &[f64],
    sb: &WindowStats,
    j: usize,
    m: usize,
) -> f64 {
    let (flat_a, flat_b) = (sa.is_flat(i), sb.is_flat(j));
    if flat_a && flat_b {
        return 0.0;
    }
    let mut acc = 0.0;
    for k in 0..m {
        let za = if flat_a {
            0.0
        } else {
            (a[i + k] - sa.mean[i]) / sa.std[i]
        };
        let zb = if flat_b {
            0.0
        } else {
            (b[j + k] - sb.mean[j]) / sb.std[j]
        };
        let d = za - zb;
        acc += d * d;
    }
    acc
}

fn diagonal_join(
    a: &[f64],
    b: &[f64],
    m: usize,
    exclusion: Option<usize>,
) -> (Vec<f64>, Vec<usize>) {
    let na = a.len() - m + 1;
    let nb = b.len() - m + 1;
    let sa = WindowStats::new(a, m);
    let sb = WindowStats::new(b, m);
    let two_m = 2.0 * m as f64;
    let max_sq = 2.0 * two_m;

    let mut best = alloc::vec![f64::INFINITY; na];
    let mut best_j = alloc::vec![0usize; na];

    // Diagonals in increasing j - i, so for a fixed row the candidates
    // arrive in increasing j and a strict comparison keeps the smallest j.
    for k in -(na as isize - 1)..=(nb as isize - 1) {
        if let Some(r) = exclusion {
            if k.unsigned_abs() <= r {
                continue;
            }
        }
        let (i0, j0) = if k < 0 {
            ((-k) as usize, 0)
        } else {
            (0, k as usize)
        };
        let len = (na - i0).min(nb - j0);
        let mut cov = 0.0;
        for t in 0..m {
            cov += (a[i0 + t] - sa.mean[i0]) * (b[j0 + t] - sb.mean[j0]);
        }
        // Slices up front keep bounds checks out of the inner loop.
        let rows = i0..i0 + len;
        let cols = j0..j0 + len;
        let (a_df, a_dg, a_inv) = (
            &sa.df[rows.clone()],
            &sa.dg[rows.clone()],
            &sa.inv_norm[rows],
        );
        let (b_df, b_dg, b_inv) = (
            &sb.df[cols.clone()],
            &sb.dg[cols.clone()],
            &sb.inv_norm[cols],
        );
        let best = &mut best[i0..i0 + len];
        let best_j = &mut best_j[i0..i0 + len];
        for step in 0..len {
            if step > 0 {
                cov += a_df[step] * b_dg[step] + b_df[step] * a_dg[step];
            }
            let (ia, ib) = (a_inv[step], b_inv[step]);
            let d2 = if ia == 0.0 || ib == 0.0 {
                if ia == ib {
                    0.0
                } else {
                    m as f64
                }
            } else {
                let rho = cov * ia * ib;
                if rho > NEAR_PERFECT_CORRELATION {
                    direct_sq_distance(a, &sa, i0 + step, b, &sb, j0 + step, m)
                } else {
                    (two_m * (1.0 - rho)).clamp(0.0, max_sq)
                }
            };
            if d2 < best[step] {
                best[step] = d2;
                best_j[step] = j0 + step;
            }
        }
    }

    let profile = best
        .iter()
        .enumerate()
        .map(|(i, &d2)| {
            if d2.is_infinite() {
                f64::INFINITY
            } else {
                libm::sqrt(direct_sq_distance(a, &sa, i, b, &sb, best_j[i], m))
            }
        })
        .collect();
    (profile, best_j)
}
