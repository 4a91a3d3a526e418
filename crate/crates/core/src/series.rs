//! Series representation, z-normalization, distance profiles and the
//! preprocessing steps (group-mean downsampling, Gaussian noise injection).

use alloc::{string::String, vec::Vec};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Result};

/// Windows whose population standard deviation falls below this value are
/// treated as flat and z-normalize to the all-zero vector.
pub const FLAT_EPSILON: f64 = 1e-12;

/// An ordered, non-empty sequence of finite samples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TimeSeries {
    values: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    name: Option<String>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Returns `a * x + b` for every sample.
    pub fn affine(&self, scale: f64, offset: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| scale * v + offset).collect();
        let mut out = Self::new(values)?;
        out.name.clone_from(&self.name);
        Ok(out)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for TimeSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Raw {
            values: Vec<f64>,
            #[serde(default)]
            name: Option<String>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let series = TimeSeries::new(raw.values).map_err(serde::de::Error::custom)?;
        Ok(match raw.name {
            Some(name) => series.with_name(name),
            None => series,
        })
    }
}

/// Location of a length-`length` window starting at `start` (zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubseqSpec {
    pub start: usize,
    pub length: usize,
}

impl SubseqSpec {
    pub fn new(start: usize, length: usize) -> Self {
        Self { start, length }
    }
}

/// Returns `(u[t], ..., u[t + m - 1])`.
pub fn subsequence(u: &TimeSeries, spec: SubseqSpec) -> Result<&[f64]> {
    if spec.length < 2 {
        return Err(Error::InvalidWindow {
            window: spec.length,
        });
    }
    match spec.start.checked_add(spec.length) {
        Some(end) if end <= u.len() => Ok(&u.values[spec.start..end]),
        _ => Err(Error::OutOfBounds {
            start: spec.start,
            length: spec.length,
            series_len: u.len(),
        }),
    }
}

/// Mean and population standard deviation (two-pass).
pub(crate) fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

/// Z-normalizes `x` with the population standard deviation. Flat input
/// (σ below [`FLAT_EPSILON`]) maps to zeros.
pub fn znormalize(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::InvalidWindow { window: x.len() });
    }
    let (mean, std) = mean_std(x);
    if std < FLAT_EPSILON {
        return Ok(alloc::vec![0.0; x.len()]);
    }
    Ok(x.iter().map(|v| (v - mean) / std).collect())
}

/// Raw Euclidean distance from `q` to every length-`q.len()` window of `u`.
pub fn distance_profile_plain(q: &[f64], u: &TimeSeries) -> Result<Vec<f64>> {
    let m = q.len();
    if m == 0 {
        return Err(Error::InvalidWindow { window: 0 });
    }
    if m > u.len() {
        return Err(Error::QueryTooLong {
            query: m,
            series: u.len(),
        });
    }
    Ok(u.values
        .windows(m)
        .map(|w| libm::sqrt(squared_distance(q, w)))
        .collect())
}

/// Z-normalized Euclidean distance from `q` to every length-`q.len()`
/// window of `u`. Every entry lies in `[0, 2√m]`.
pub fn distance_profile_znorm(q: &[f64], u: &TimeSeries) -> Result<Vec<f64>> {
    let m = q.len();
    if m < 2 {
        return Err(Error::InvalidWindow { window: m });
    }
    if m > u.len() {
        return Err(Error::QueryTooLong {
            query: m,
            series: u.len(),
        });
    }
    let zq = znormalize(q)?;
    Ok(u.values
        .windows(m)
        .map(|w| {
            let (mean, std) = mean_std(w);
            znorm_distance_to(&zq, w, mean, std)
        })
        .collect())
}

/// Distance between an already z-normalized vector and the z-normalized
/// form of `w`, given `w`'s mean and standard deviation.
pub(crate) fn znorm_distance_to(zq: &[f64], w: &[f64], mean: f64, std: f64) -> f64 {
    let sum = if std < FLAT_EPSILON {
        zq.iter().map(|a| a * a).sum::<f64>()
    } else {
        let inv = 1.0 / std;
        zq.iter()
            .zip(w)
            .map(|(a, b)| {
                let d = a - (b - mean) * inv;
                d * d
            })
            .sum::<f64>()
    };
    libm::sqrt(sum)
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Replaces consecutive groups of `⌈n · group_fraction⌉` samples by their
/// mean. The last group may be shorter.
pub fn downsample_mean(u: &TimeSeries, group_fraction: f64) -> Result<TimeSeries> {
    if !(group_fraction > 0.0 && group_fraction <= 1.0) {
        return Err(Error::InvalidFraction(group_fraction));
    }
    let group = (libm::ceil(u.len() as f64 * group_fraction) as usize).max(1);
    let values = u
        .values
        .chunks(group)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    let mut out = TimeSeries::new(values)?;
    out.name.clone_from(&u.name);
    Ok(out)
}

/// Adds i.i.d. `N(0, sigma²)` noise drawn from a generator seeded with
/// `seed`. `sigma == 0` returns the input unchanged.
pub fn add_gaussian_noise(u: &TimeSeries, sigma: f64, seed: u64) -> Result<TimeSeries> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidSigma(sigma));
    }
    if sigma == 0.0 {
        return Ok(u.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = u.values.clone();
    add_noise_in_place(&mut values, sigma, &mut rng);
    let mut out = TimeSeries::new(values)?;
    out.name.clone_from(&u.name);
    Ok(out)
}

pub(crate) fn add_noise_in_place<R: rand::Rng>(values: &mut [f64], sigma: f64, rng: &mut R) {
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    for v in values {
        *v += normal.sample(rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn lcg(seed: u64, n: usize) -> Vec<f64> {
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (0..n)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            })
            .collect()
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(TimeSeries::new(vec![]), Err(Error::EmptySeries));
        assert_eq!(
            TimeSeries::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        );
        assert!(TimeSeries::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn subsequence_examples() {
        let u = ts(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(subsequence(&u, SubseqSpec::new(1, 2)).unwrap(), &[2.0, 3.0]);
        let u = ts(&[5.0, 5.0]);
        assert_eq!(subsequence(&u, SubseqSpec::new(0, 2)).unwrap(), &[5.0, 5.0]);
        let u = ts(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            subsequence(&u, SubseqSpec::new(2, 2)),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(matches!(
            subsequence(&u, SubseqSpec::new(0, 1)),
            Err(Error::InvalidWindow { window: 1 })
        ));
        assert!(subsequence(&u, SubseqSpec::new(usize::MAX, 2)).is_err());
    }

    #[test]
    fn znormalize_examples() {
        assert_eq!(znormalize(&[0.0, 2.0]).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(znormalize(&[5.0, 5.0, 5.0]).unwrap(), vec![0.0; 3]);
        assert!(matches!(
            znormalize(&[1.0]),
            Err(Error::InvalidWindow { .. })
        ));

        let z = znormalize(&lcg(3, 8)).unwrap();
        let mean = z.iter().sum::<f64>() / 8.0;
        let std = libm::sqrt(z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 8.0);
        assert!(mean.abs() < 1e-12);
        assert!((std - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plain_profile_examples() {
        let u = ts(&[1.0, 2.0, 1.0, 2.0]);
        let d = distance_profile_plain(&[1.0, 2.0], &u).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d[0], 0.0);
        assert!((d[1] - libm::sqrt(2.0)).abs() < 1e-15);
        assert_eq!(d[2], 0.0);
        assert!(matches!(
            distance_profile_plain(&[1.0; 5], &u),
            Err(Error::QueryTooLong {
                query: 5,
                series: 4
            })
        ));
    }

    #[test]
    fn plain_profile_matches_brute_force() {
        let u = ts(&lcg(11, 64));
        let q = lcg(12, 5);
        let got = distance_profile_plain(&q, &u).unwrap();
        assert_eq!(got.len(), 60);
        for (t, g) in got.iter().enumerate() {
            let acc: f64 = q
                .iter()
                .enumerate()
                .map(|(k, x)| (x - u.values()[t + k]).powi(2))
                .sum();
            assert!((g - acc.sqrt()).abs() < 1e-9);
        }
        // identity at a copied offset
        let q = u.values()[17..22].to_vec();
        assert_eq!(distance_profile_plain(&q, &u).unwrap()[17], 0.0);
    }

    #[test]
    fn znorm_profile_examples() {
        let u = ts(&[0.0, 1.0, 0.0, 1.0]);
        let d = distance_profile_znorm(&[0.0, 1.0], &u).unwrap();
        assert!(d[0].abs() < 1e-15);
        assert!((d[1] - 2.0 * libm::sqrt(2.0)).abs() < 1e-12);
        assert!(d[2].abs() < 1e-15);

        let u = ts(&lcg(5, 40));
        let q: Vec<f64> = u.values()[9..19].iter().map(|v| 2.5 * v - 4.0).collect();
        assert!(distance_profile_znorm(&q, &u).unwrap()[9] < 1e-9);
        assert!(matches!(
            distance_profile_znorm(&[1.0], &u),
            Err(Error::InvalidWindow { window: 1 })
        ));
    }

    #[test]
    fn znorm_profile_matches_naive() {
        let u = ts(&lcg(21, 64));
        let q = lcg(22, 7);
        let got = distance_profile_znorm(&q, &u).unwrap();
        // oracle: z-normalize each window independently with explicit loops
        let zn = |x: &[f64]| -> Vec<f64> {
            let m = x.len() as f64;
            let mu: f64 = x.iter().sum::<f64>() / m;
            let sd = (x.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / m).sqrt();
            x.iter().map(|v| (v - mu) / sd).collect()
        };
        let zq = zn(&q);
        for (t, w) in u.values().windows(7).enumerate() {
            let zw = zn(w);
            let d: f64 = zq
                .iter()
                .zip(&zw)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!((got[t] - d).abs() < 1e-9, "offset {t}");
        }
    }

    #[test]
    fn downsample_examples() {
        let u = ts(&[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(downsample_mean(&u, 0.5).unwrap().values(), &[2.0, 6.0]);
        let u = ts(&(0..10).map(f64::from).collect::<Vec<_>>());
        assert_eq!(downsample_mean(&u, 1.0).unwrap().values(), &[4.5]);
        assert!(matches!(
            downsample_mean(&u, 0.0),
            Err(Error::InvalidFraction(_))
        ));
        assert!(matches!(
            downsample_mean(&u, 1.5),
            Err(Error::InvalidFraction(_))
        ));

        let raw = lcg(8, 100);
        let out = downsample_mean(&ts(&raw), 0.05).unwrap();
        assert_eq!(out.len(), 20);
        for g in 0..20 {
            let mut s = 0.0;
            for k in 0..5 {
                s += raw[g * 5 + k];
            }
            assert!((out.values()[g] - s / 5.0).abs() < 1e-12);
        }
        // uneven tail
        let out = downsample_mean(&ts(&[1.0, 2.0, 3.0, 4.0, 5.0]), 0.4).unwrap();
        assert_eq!(out.values(), &[1.5, 3.5, 5.0]);
    }

    #[test]
    fn noise_examples() {
        let u = ts(&lcg(1, 50));
        assert_eq!(add_gaussian_noise(&u, 0.0, 9).unwrap(), u);
        assert_eq!(
            add_gaussian_noise(&u, 0.3, 9).unwrap(),
            add_gaussian_noise(&u, 0.3, 9).unwrap()
        );
        assert_ne!(
            add_gaussian_noise(&u, 0.3, 9).unwrap(),
            add_gaussian_noise(&u, 0.3, 10).unwrap()
        );
        assert!(add_gaussian_noise(&u, -1.0, 0).is_err());

        let u = ts(&vec![0.0; 10_000]);
        let out = add_gaussian_noise(&u, 0.5, 42).unwrap();
        let n = out.len() as f64;
        let mean = out.values().iter().sum::<f64>() / n;
        let var = out.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var.sqrt() - 0.5).abs() < 0.02);
    }

    fn finite_vec(len: core::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn znormalize_affine_invariant(x in finite_vec(2..40), a in 0.01f64..50.0, b in -1e3f64..1e3) {
            let (_, std) = mean_std(&x);
            prop_assume!(std > 1e-3);
            let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let zx = znormalize(&x).unwrap();
            let zy = znormalize(&y).unwrap();
            for (p, q) in zx.iter().zip(&zy) {
                prop_assert!((p - q).abs() < 1e-9);
            }
        }

        #[test]
        fn znormalize_idempotent(x in finite_vec(2..40)) {
            let (_, std) = mean_std(&x);
            prop_assume!(std > 1e-3);
            let once = znormalize(&x).unwrap();
            let twice = znormalize(&once).unwrap();
            for (p, q) in once.iter().zip(&twice) {
                prop_assert!((p - q).abs() < 1e-9);
            }
        }

        #[test]
        fn znorm_profile_bounded(q in finite_vec(2..12), u in finite_vec(12..60)) {
            let u = TimeSeries::new(u).unwrap();
            let bound = 2.0 * libm::sqrt(q.len() as f64);
            for d in distance_profile_znorm(&q, &u).unwrap() {
                prop_assert!(d >= 0.0 && d <= bound + 1e-9);
            }
        }

        #[test]
        fn plain_profile_zero_iff_equal(u in prop::collection::vec(-3i32..3, 6..30), m in 2usize..5, t in 0usize..20) {
            let u: Vec<f64> = u.into_iter().map(f64::from).collect();
            prop_assume!(m <= u.len());
            let t = t % (u.len() - m + 1);
            let q = u[t..t + m].to_vec();
            let series = TimeSeries::new(u.clone()).unwrap();
            let d = distance_profile_plain(&q, &series).unwrap();
            for (s, w) in u.windows(m).enumerate() {
                prop_assert_eq!(d[s] == 0.0, w == q.as_slice());
            }
        }

        #[test]
        fn downsample_preserves_mean(groups in 1usize..20, size in 1usize..8, seed in 0u64..1000) {
            let n = groups * size;
            let raw = lcg(seed, n);
            let fraction = size as f64 / n as f64;
            // only exact multiples qualify: ⌈n·f⌉ must equal `size`
            prop_assume!(libm::ceil(n as f64 * fraction) as usize == size);
            let out = downsample_mean(&TimeSeries::new(raw.clone()).unwrap(), fraction).unwrap();
            let before = raw.iter().sum::<f64>() / n as f64;
            let after = out.values().iter().sum::<f64>() / out.len() as f64;
            prop_assert!((before - after).abs() < 1e-9);
        }
    }
}
