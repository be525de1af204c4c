//! Time-series container and the transforms used before correlating trending
//! series: alignment, first differences, linear detrending and smoothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered sequence of observations on integer time stamps (years).
///
/// Construction validates that stamps strictly increase, values are finite and
/// there is at least one observation; every method can rely on that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct TimeSeries {
    label: String,
    times: Vec<i64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSeries {
    label: String,
    times: Vec<i64>,
    values: Vec<f64>,
}

impl TryFrom<RawSeries> for TimeSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        TimeSeries::new(raw.label, raw.times, raw.values)
    }
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, times: Vec<i64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::ShapeMismatch {
                times: times.len(),
                values: values.len(),
            });
        }
        if times.is_empty() {
            return Err(Error::EmptySeries);
        }
        for pair in times.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::UnorderedTimes(pair[1]));
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(times[i]));
        }
        Ok(Self {
            label: label.into(),
            times,
            values,
        })
    }

    /// Series on consecutive stamps `start, start + 1, ...`.
    pub fn from_values(label: impl Into<String>, start: i64, values: Vec<f64>) -> Result<Self> {
        let times = (0..values.len() as i64).map(|i| start + i).collect();
        Self::new(label, times, values)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn times(&self) -> &[i64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first_time(&self) -> i64 {
        self.times[0]
    }

    pub fn last_time(&self) -> i64 {
        self.times[self.times.len() - 1]
    }

    /// True when every stamp follows its predecessor by exactly one.
    pub fn is_contiguous(&self) -> bool {
        self.times.windows(2).all(|w| w[1] - w[0] == 1)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn derived(&self, suffix: &str, times: Vec<i64>, values: Vec<f64>) -> TimeSeries {
        TimeSeries {
            label: format!("{}{}", self.label, suffix),
            times,
            values,
        }
    }
}

/// Two series restricted to their common time stamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub times: Vec<i64>,
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub dropped_a: usize,
    pub dropped_b: usize,
}

impl AlignedPair {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Rebuilds the two sides as labelled series on the common stamps.
    pub fn into_series(self, a_label: &str, b_label: &str) -> (TimeSeries, TimeSeries) {
        let a = TimeSeries {
            label: a_label.to_owned(),
            times: self.times.clone(),
            values: self.a_values,
        };
        let b = TimeSeries {
            label: b_label.to_owned(),
            times: self.times,
            values: self.b_values,
        };
        (a, b)
    }
}

/// Pairs the observations of `a` and `b` that share a time stamp.
pub fn align(a: &TimeSeries, b: &TimeSeries) -> Result<AlignedPair> {
    let (mut i, mut j) = (0, 0);
    let mut times = Vec::new();
    let mut a_values = Vec::new();
    let mut b_values = Vec::new();
    while i < a.len() && j < b.len() {
        let (ta, tb) = (a.times[i], b.times[j]);
        if ta == tb {
            times.push(ta);
            a_values.push(a.values[i]);
            b_values.push(b.values[j]);
            i += 1;
            j += 1;
        } else if ta < tb {
            i += 1;
        } else {
            j += 1;
        }
    }
    if times.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(AlignedPair {
        dropped_a: a.len() - times.len(),
        dropped_b: b.len() - times.len(),
        times,
        a_values,
        b_values,
    })
}

/// First differences of a series, with a flag for uneven stamp spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Differenced {
    pub series: TimeSeries,
    /// Set when some consecutive stamps are more than one unit apart. The raw
    /// difference is still reported for those steps (no per-unit rescaling).
    pub has_gaps: bool,
}

pub fn difference(s: &TimeSeries) -> Result<Differenced> {
    if s.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: s.len(),
        });
    }
    let values = s.values.windows(2).map(|w| w[1] - w[0]).collect();
    let times = s.times[1..].to_vec();
    Ok(Differenced {
        has_gaps: !s.is_contiguous(),
        series: s.derived(" (changes)", times, values),
    })
}

/// Inverse of [`difference`]: running sum of `changes` anchored at `first`.
pub fn cumulative_sum(first: f64, changes: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(changes.len() + 1);
    let mut acc = first;
    out.push(acc);
    for &c in changes {
        acc += c;
        out.push(acc);
    }
    out
}

/// Residuals of an OLS fit of the values on their time stamps.
pub fn detrend_linear(s: &TimeSeries) -> Result<TimeSeries> {
    if s.len() < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: s.len(),
        });
    }
    let n = s.len() as f64;
    let t_mean = s.times.iter().map(|&t| t as f64).sum::<f64>() / n;
    let y_mean = s.values.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&t, &y) in s.times.iter().zip(&s.values) {
        let dt = t as f64 - t_mean;
        sxx += dt * dt;
        sxy += dt * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateTime);
    }
    let slope = sxy / sxx;
    let values = s
        .times
        .iter()
        .zip(&s.values)
        .map(|(&t, &y)| (y - y_mean) - slope * (t as f64 - t_mean))
        .collect();
    Ok(s.derived(" (detrended)", s.times.clone(), values))
}

/// Centered moving average with uniform weights.
///
/// Near either end the window is truncated to the observations that exist, so
/// the output has the same length as the input.
pub fn moving_average(s: &TimeSeries, window: usize) -> Result<TimeSeries> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidWindow(window));
    }
    let half = window / 2;
    let n = s.len();
    // prefix sums keep this O(n) for wide windows
    let prefix = cumulative_sum(0.0, &s.values);
    let values = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1) as f64
        })
        .collect();
    Ok(s.derived(" (smoothed)", s.times.clone(), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn years(start: i64, end: i64) -> TimeSeries {
        let times: Vec<i64> = (start..=end).collect();
        let values = times.iter().map(|&t| t as f64 * 0.5).collect();
        TimeSeries::new("s", times, values).unwrap()
    }

    #[test]
    fn rejects_invalid_series() {
        assert!(matches!(
            TimeSeries::new("x", vec![], vec![]),
            Err(Error::EmptySeries)
        ));
        assert!(matches!(
            TimeSeries::new("x", vec![1, 1], vec![0.0, 1.0]),
            Err(Error::UnorderedTimes(1))
        ));
        assert!(matches!(
            TimeSeries::new("x", vec![1, 2], vec![0.0, f64::NAN]),
            Err(Error::NonFiniteValue(2))
        ));
        assert!(TimeSeries::new("x", vec![1], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn align_partial_overlap() {
        let a = years(1900, 2000);
        let b = years(1950, 2000);
        let pair = align(&a, &b).unwrap();
        assert_eq!(pair.times.first(), Some(&1950));
        assert_eq!(pair.times.last(), Some(&2000));
        assert_eq!(pair.len(), 51);
        assert_eq!(pair.dropped_a, 50);
        assert_eq!(pair.dropped_b, 0);
        assert_eq!(pair.a_values[0], 975.0);
    }

    #[test]
    fn align_identical_ranges() {
        let a = years(1900, 1950);
        let pair = align(&a, &a).unwrap();
        assert_eq!((pair.dropped_a, pair.dropped_b), (0, 0));
    }

    #[test]
    fn align_disjoint() {
        let a = TimeSeries::new("a", vec![1, 3, 5], vec![1.0; 3]).unwrap();
        let b = TimeSeries::new("b", vec![2, 4, 6], vec![1.0; 3]).unwrap();
        assert!(matches!(align(&a, &b), Err(Error::EmptyIntersection)));
    }

    #[test]
    fn difference_examples() {
        let c = TimeSeries::from_values("c", 1, vec![5.0, 5.0, 5.0]).unwrap();
        assert_eq!(difference(&c).unwrap().series.values(), &[0.0, 0.0]);

        let s = TimeSeries::from_values("s", 1, vec![1.0, 3.0, 6.0]).unwrap();
        let d = difference(&s).unwrap();
        assert_eq!(d.series.values(), &[2.0, 3.0]);
        assert_eq!(d.series.times(), &[2, 3]);
        assert!(!d.has_gaps);

        let ramp: Vec<f64> = (0..50).map(|t| 0.1 * t as f64).collect();
        let r = TimeSeries::from_values("r", 0, ramp).unwrap();
        for v in difference(&r).unwrap().series.values() {
            assert_abs_diff_eq!(*v, 0.1, epsilon = 1e-12);
        }

        let one = TimeSeries::from_values("o", 0, vec![1.0]).unwrap();
        assert!(matches!(
            difference(&one),
            Err(Error::TooShort { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn difference_flags_gaps_without_rescaling() {
        let s = TimeSeries::new("g", vec![1, 2, 5], vec![0.0, 1.0, 4.0]).unwrap();
        let d = difference(&s).unwrap();
        assert!(d.has_gaps);
        assert_eq!(d.series.values(), &[1.0, 3.0]);
    }

    #[test]
    fn detrend_examples() {
        let line: Vec<f64> = (0..20).map(|t| 2.0 * t as f64 + 1.0).collect();
        let s = TimeSeries::from_values("l", 0, line).unwrap();
        for r in detrend_linear(&s).unwrap().values() {
            assert!(r.abs() < 1e-9);
        }

        // slope 0.5, intercept 0.5 by hand
        let s = TimeSeries::from_values("h", 0, vec![0.0, 2.0, 1.0]).unwrap();
        let d = detrend_linear(&s).unwrap();
        let expected = [-0.5, 1.0, -0.5];
        for (got, want) in d.values().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }

        let short = TimeSeries::from_values("s", 0, vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            detrend_linear(&short),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn moving_average_examples() {
        let s = TimeSeries::from_values("m", 0, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(moving_average(&s, 1).unwrap().values(), s.values());
        let m = moving_average(&s, 3).unwrap();
        let expected = [1.5, 2.0, 3.0, 4.0, 4.5];
        for (got, want) in m.values().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let c = TimeSeries::from_values("c", 0, vec![3.25; 30]).unwrap();
        for v in moving_average(&c, 11).unwrap().values() {
            assert_abs_diff_eq!(*v, 3.25, epsilon = 1e-12);
        }
        assert!(matches!(
            moving_average(&s, 4),
            Err(Error::InvalidWindow(4))
        ));
        assert!(matches!(
            moving_average(&s, 0),
            Err(Error::InvalidWindow(0))
        ));
    }

    fn arb_series() -> impl Strategy<Value = TimeSeries> {
        (
            -50i64..50,
            prop::collection::vec((1i64..4, -1e3f64..1e3), 3..60),
        )
            .prop_map(|(start, steps)| {
                let mut t = start;
                let mut times = Vec::new();
                let mut values = Vec::new();
                for (gap, v) in steps {
                    t += gap;
                    times.push(t);
                    values.push(v);
                }
                TimeSeries::new("p", times, values).unwrap()
            })
    }

    proptest! {
        #[test]
        fn difference_then_cumsum_reconstructs(s in arb_series()) {
            let d = difference(&s).unwrap();
            let back = cumulative_sum(s.values()[0], d.series.values());
            for (x, y) in back.iter().zip(s.values()) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()));
            }
        }

        #[test]
        fn difference_of_linear_trend_is_constant(a in -10f64..10.0, b in -10f64..10.0, n in 2usize..80) {
            let vals: Vec<f64> = (0..n).map(|t| a + b * t as f64).collect();
            let s = TimeSeries::from_values("t", 0, vals).unwrap();
            for v in difference(&s).unwrap().series.values() {
                prop_assert!((v - b).abs() < 1e-9);
            }
        }

        #[test]
        fn align_is_symmetric(a in arb_series(), b in arb_series()) {
            match (align(&a, &b), align(&b, &a)) {
                (Ok(ab), Ok(ba)) => {
                    prop_assert_eq!(&ab.times, &ba.times);
                    prop_assert_eq!(ab.dropped_a, ba.dropped_b);
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "asymmetric outcome"),
            }
        }

        #[test]
        fn smoothing_stays_within_range(s in arb_series(), half in 0usize..8) {
            let m = moving_average(&s, 2 * half + 1).unwrap();
            let lo = s.values().iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = s.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(m.len(), s.len());
            for v in m.values() {
                prop_assert!(*v >= lo - 1e-9 && *v <= hi + 1e-9);
            }
        }

        #[test]
        fn detrend_is_orthogonal_and_idempotent(s in arb_series()) {
            let d = detrend_linear(&s).unwrap();
            let scale: f64 = s.values().iter().map(|v| v.abs()).sum::<f64>() + 1.0;
            let n = s.len() as f64;
            let t_mean = s.times().iter().map(|&t| t as f64).sum::<f64>() / n;
            let t_scale: f64 = s.times().iter().map(|&t| (t as f64 - t_mean).abs()).sum::<f64>() + 1.0;
            let sum: f64 = d.values().iter().sum();
            let cross: f64 = d.values().iter().zip(s.times()).map(|(r, &t)| r * (t as f64 - t_mean)).sum();
            prop_assert!(sum.abs() <= 1e-9 * scale);
            prop_assert!(cross.abs() <= 1e-9 * scale * t_scale);
            let dd = detrend_linear(&d).unwrap();
            for (x, y) in dd.values().iter().zip(d.values()) {
                prop_assert!((x - y).abs() <= 1e-9 * scale);
            }
        }
    }
}
