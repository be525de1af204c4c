use rand::Rng;
use rand_distr::{Distribution, Hypergeometric};

use crate::error::{Error, Result};
use crate::special::ln_binomial_pmf;

/// How many tokens of each type land in a uniform sample of `sample_size`
/// tokens drawn without replacement from the multiset described by `counts`.
///
/// Types are visited in slice order; each draw is hypergeometric conditional
/// on the population and capacity left after the previous types, so the joint
/// result is an exact multivariate hypergeometric sample. No tokens are
/// materialized.
pub fn sample_type_counts<R: Rng + ?Sized>(
    counts: &[u64],
    sample_size: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if counts.is_empty() {
        return Err(Error::EmptyCounts);
    }
    let corpus_total: u64 = counts.iter().sum();
    if sample_size > corpus_total {
        return Err(Error::SampleTooLarge {
            sample_size,
            corpus_total,
        });
    }
    let mut out = vec![0u64; counts.len()];
    let mut population = corpus_total;
    let mut remaining = sample_size;
    for (slot, &c) in out.iter_mut().zip(counts) {
        if remaining == 0 {
            break;
        }
        let k = hypergeometric(rng, population, c, remaining);
        *slot = k;
        remaining -= k;
        population -= c;
    }
    debug_assert_eq!(remaining, 0);
    Ok(out)
}

/// Number of distinct types in a uniform sample of `sample_size` tokens.
pub fn sample_distinct_types<R: Rng + ?Sized>(
    counts: &[u64],
    sample_size: u64,
    rng: &mut R,
) -> Result<u64> {
    let sampled = sample_type_counts(counts, sample_size, rng)?;
    Ok(sampled.iter().filter(|&&k| k > 0).count() as u64)
}

/// Exact expectation of [`sample_distinct_types`]:
/// `sum_w 1 - C(N - c_w, s) / C(N, s)`.
pub fn expected_distinct_types(counts: &[u64], sample_size: u64) -> f64 {
    let total: u64 = counts.iter().sum();
    let s = sample_size as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            if total - c < sample_size {
                return 1.0;
            }
            // C(N - c, s) / C(N, s) = prod_{i<c} (N - s - i) / (N - i)
            let log_miss: f64 = (0..c).map(|i| (-s / (total - i) as f64).ln_1p()).sum();
            1.0 - log_miss.exp()
        })
        .sum()
}

/// Below this distance between the mode and the edge of the support the
/// variate is drawn by inversion. The library sampler covers that regime too,
/// but its setup there is linear in the population size.
const INVERSION_SPAN: u64 = 10;

/// Hypergeometric variate: successes when drawing `draws` items from
/// `total`, of which `marked` are successes.
fn hypergeometric<R: Rng + ?Sized>(rng: &mut R, total: u64, marked: u64, draws: u64) -> u64 {
    if draws == 0 || marked == 0 {
        return 0;
    }
    if marked == total {
        return draws;
    }
    if draws == total {
        return marked;
    }
    let lo = draws.saturating_sub(total - marked);
    let hi = draws.min(marked);
    let mode = ((draws + 1) as f64 * (marked + 1) as f64 / (total + 2) as f64).floor() as u64;
    if mode.saturating_sub(lo) < INVERSION_SPAN {
        return hypergeometric_inversion(rng, total, marked, draws);
    }
    if hi.saturating_sub(mode) < INVERSION_SPAN {
        // count the unmarked items instead; their mode sits near the bottom
        return draws - hypergeometric_inversion(rng, total, total - marked, draws);
    }
    match Hypergeometric::new(total, marked, draws) {
        Ok(dist) => dist.sample(rng),
        Err(_) => hypergeometric_inversion(rng, total, marked, draws),
    }
}

/// Log hypergeometric probability of `k` marked items among `draws`, as a
/// ratio of three binomial terms evaluated at the sampling fraction.
fn ln_hypergeometric_pmf(total: u64, marked: u64, draws: u64, k: u64) -> f64 {
    let p = draws as f64 / total as f64;
    let q = (total - draws) as f64 / total as f64;
    let unmarked = total - marked;
    ln_binomial_pmf(k as f64, marked as f64, p, q)
        + ln_binomial_pmf((draws - k) as f64, unmarked as f64, p, q)
        - ln_binomial_pmf(draws as f64, total as f64, p, q)
}

/// Inversion by sequential search from the lower end of the support, stepping
/// the probability with the pmf ratio. Short when the mode is near the bottom.
fn hypergeometric_inversion<R: Rng + ?Sized>(
    rng: &mut R,
    total: u64,
    marked: u64,
    draws: u64,
) -> u64 {
    let lo = draws.saturating_sub(total - marked);
    let hi = draws.min(marked);
    let unmarked = total - marked;
    let mut p = ln_hypergeometric_pmf(total, marked, draws, lo).exp();
    let mut u: f64 = rng.random();
    let mut k = lo;
    while k < hi {
        if u < p {
            return k;
        }
        u -= p;
        p *= (marked - k) as f64 * (draws - k) as f64
            / ((k + 1) as f64 * (unmarked + k + 1 - draws) as f64);
        k += 1;
    }
    hi
}
