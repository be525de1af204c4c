use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ngram::YearCountTable;
use super::sampling::sample_distinct_types;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TtrConfig {
    pub sample_size: u64,
    /// Years with fewer tokens than this are skipped.
    pub min_corpus: u64,
    pub master_seed: u64,
    /// Independent samples per year. The first one always defines the
    /// reported ratio; extra repeats only feed `ttr_mean` / `ttr_sd`.
    pub repeats: u32,
}

impl Default for TtrConfig {
    fn default() -> Self {
        Self {
            sample_size: 1_000_000,
            min_corpus: 1_000_000,
            master_seed: 0,
            repeats: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    InsufficientCorpus,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::InsufficientCorpus => "insufficient corpus",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtrPoint {
    pub year: i64,
    pub sampled_types: u64,
    pub sample_size: u64,
    pub ttr: f64,
    pub corpus_total: u64,
    pub skipped: Option<SkipReason>,
    pub ttr_mean: Option<f64>,
    pub ttr_sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TtrOutput {
    /// Ratios of the non-skipped years.
    pub series: TimeSeries,
    pub points: Vec<TtrPoint>,
}

/// Type-token ratio per year, each from its own seeded sample of
/// `sample_size` tokens. Years are sampled in parallel; every year draws from
/// a sub-stream keyed by the year, so results do not depend on which other
/// years are present.
pub fn ttr_series(table: &YearCountTable, config: &TtrConfig) -> Result<TtrOutput> {
    if table.is_empty() {
        return Err(Error::EmptyCounts);
    }
    if config.sample_size == 0 {
        return Err(Error::InvalidParameter(
            "sample size must be positive".into(),
        ));
    }
    let threshold = config.min_corpus.max(config.sample_size);
    let repeats = config.repeats.max(1);
    let years: Vec<_> = table.iter().collect();

    let points = years
        .par_iter()
        .map(|&(year, counts)| {
            let corpus_total = counts.corpus_total();
            if corpus_total < threshold {
                return Ok(TtrPoint {
                    year,
                    sampled_types: 0,
                    sample_size: config.sample_size,
                    ttr: f64::NAN,
                    corpus_total,
                    skipped: Some(SkipReason::InsufficientCorpus),
                    ttr_mean: None,
                    ttr_sd: None,
                });
            }
            let ordered = counts.counts_in_order();
            let draws = (0..repeats)
                .map(|rep| {
                    let mut rng = rng::substream2(
                        config.master_seed,
                        Domain::Year,
                        year as u64,
                        u64::from(rep),
                    );
                    sample_distinct_types(&ordered, config.sample_size, &mut rng)
                })
                .collect::<Result<Vec<u64>>>()?;
            let ratios: Vec<f64> = draws
                .iter()
                .map(|&d| d as f64 / config.sample_size as f64)
                .collect();
            let (ttr_mean, ttr_sd) = if repeats > 1 {
                let n = ratios.len() as f64;
                let mean = ratios.iter().sum::<f64>() / n;
                let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (Some(mean), Some(var.sqrt()))
            } else {
                (None, None)
            };
            Ok(TtrPoint {
                year,
                sampled_types: draws[0],
                sample_size: config.sample_size,
                ttr: ratios[0],
                corpus_total,
                skipped: None,
                ttr_mean,
                ttr_sd,
            })
        })
        .collect::<Result<Vec<TtrPoint>>>()?;

    let (times, values): (Vec<i64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.skipped.is_none())
        .map(|p| (p.year, p.ttr))
        .unzip();
    if times.is_empty() {
        return Err(Error::NoEligibleYears {
            min_corpus: threshold,
        });
    }
    let series = TimeSeries::new("type-token ratio", times, values)?;
    Ok(TtrOutput { series, points })
}

/// Writes `year,ttr,sampled_types,corpus_total,skipped`, plus
/// `ttr_mean,ttr_sd` when repeats were drawn.
pub fn write_ttr_csv<W: Write>(points: &[TtrPoint], writer: W) -> Result<()> {
    let with_repeats = points.iter().any(|p| p.ttr_mean.is_some());
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["year", "ttr", "sampled_types", "corpus_total", "skipped"];
    if with_repeats {
        header.extend(["ttr_mean", "ttr_sd"]);
    }
    w.write_record(&header)?;
    for p in points {
        let skipped = p.skipped.is_some();
        let mut row = vec![
            p.year.to_string(),
            if skipped {
                String::new()
            } else {
                format!("{:.9}", p.ttr)
            },
            if skipped {
                String::new()
            } else {
                p.sampled_types.to_string()
            },
            p.corpus_total.to_string(),
            skipped.to_string(),
        ];
        if with_repeats {
            row.push(p.ttr_mean.map(|v| format!("{v:.9}")).unwrap_or_default());
            row.push(p.ttr_sd.map(|v| format!("{v:.9}")).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_table(years: &[i64], types: usize, each: u64) -> YearCountTable {
        let names: Vec<String> = (0..types).map(|i| format!("w{i}")).collect();
        YearCountTable::from_entries(
            years
                .iter()
                .flat_map(|&y| names.iter().map(move |n| (y, n.as_str(), each))),
        )
    }

    #[test]
    fn identical_years_same_seed_give_constant_series() {
        // one year per table so every run uses the same sub-stream key
        let config = TtrConfig {
            sample_size: 5_000,
            min_corpus: 5_000,
            master_seed: 7,
            repeats: 1,
        };
        let a = ttr_series(&uniform_table(&[1990], 500, 20), &config).unwrap();
        let b = ttr_series(&uniform_table(&[1990], 500, 20), &config).unwrap();
        assert_eq!(a.series.values(), b.series.values());
    }

    #[test]
    fn small_years_are_skipped() {
        let mut entries: Vec<(i64, String, u64)> = vec![(1949, "x".into(), 999_999)];
        entries.push((1950, "x".into(), 600_000));
        entries.push((1950, "y".into(), 400_000));
        let table =
            YearCountTable::from_entries(entries.iter().map(|(y, t, c)| (*y, t.as_str(), *c)));
        let out = ttr_series(&table, &TtrConfig::default()).unwrap();
        assert_eq!(out.points[0].skipped, Some(SkipReason::InsufficientCorpus));
        assert_eq!(
            out.points[0].skipped.unwrap().as_str(),
            "insufficient corpus"
        );
        assert_eq!(out.series.times(), &[1950]);
        assert_eq!(out.points[1].sampled_types, 2);
        assert_eq!(out.series.values(), &[2e-6]);
    }

    #[test]
    fn no_eligible_years() {
        let table = uniform_table(&[1900, 1901], 10, 10);
        assert!(matches!(
            ttr_series(&table, &TtrConfig::default()),
            Err(Error::NoEligibleYears { .. })
        ));
    }

    #[test]
    fn adding_years_does_not_perturb_others() {
        let config = TtrConfig {
            sample_size: 2_000,
            min_corpus: 2_000,
            master_seed: 99,
            repeats: 1,
        };
        let small = ttr_series(&uniform_table(&[1950], 300, 10), &config).unwrap();
        let large = ttr_series(&uniform_table(&[1949, 1950, 1951], 300, 10), &config).unwrap();
        assert_eq!(small.points[0], large.points[1]);
    }

    #[test]
    fn richer_corpus_dominates() {
        let rich = uniform_table(&[2000], 10_000, 100);
        let poor = uniform_table(&[2000], 1_000, 1_000);
        let mut rich_sum = 0u64;
        let mut poor_sum = 0u64;
        for seed in 0..1_000u64 {
            let config = TtrConfig {
                sample_size: 50_000,
                min_corpus: 50_000,
                master_seed: seed,
                repeats: 1,
            };
            rich_sum += ttr_series(&rich, &config).unwrap().points[0].sampled_types;
            poor_sum += ttr_series(&poor, &config).unwrap().points[0].sampled_types;
        }
        assert!(rich_sum > poor_sum);
    }

    #[test]
    fn repeats_and_csv() {
        let table = uniform_table(&[1900, 1901], 100, 50);
        let config = TtrConfig {
            sample_size: 1_000,
            min_corpus: 1_000,
            master_seed: 1,
            repeats: 5,
        };
        let out = ttr_series(&table, &config).unwrap();
        let single = ttr_series(
            &table,
            &TtrConfig {
                repeats: 1,
                ..config
            },
        )
        .unwrap();
        assert_eq!(out.series, single.series);
        assert!(out.points[0].ttr_sd.unwrap() >= 0.0);

        let mut buf = Vec::new();
        write_ttr_csv(&single.points, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("year,ttr,sampled_types,corpus_total,skipped")
        );
        assert!(lines.next().unwrap().starts_with("1900,0."));

        let mut buf = Vec::new();
        write_ttr_csv(&out.points, &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("year,ttr,sampled_types,corpus_total,skipped,ttr_mean,ttr_sd\n"));
    }
}
