use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Tokens whose per-year total is below this are dropped (values below 1
    /// behave as 1).
    pub min_count: u64,
    pub year_range: Option<RangeInclusive<i64>>,
    /// Abort on the first malformed line instead of skipping and counting it.
    pub strict: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            min_count: 1,
            year_range: None,
            strict: false,
        }
    }
}

/// What happened to every parsed line and token occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub lines: u64,
    pub malformed_lines: u64,
    pub first_malformed: Option<u64>,
    pub parsed_rows: u64,
    pub parsed_count: u64,
    pub out_of_range_rows: u64,
    pub out_of_range_count: u64,
    pub below_min_entries: u64,
    pub below_min_count: u64,
    pub retained_entries: u64,
    pub retained_count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct YearCounts {
    counts: HashMap<String, u64>,
    corpus_total: u64,
}

impl YearCounts {
    pub fn corpus_total(&self) -> u64 {
        self.corpus_total
    }

    pub fn distinct_types(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, token: &str) -> Option<u64> {
        self.counts.get(token).copied()
    }

    /// Counts ordered by token, the fixed order used for sampling.
    pub fn counts_in_order(&self) -> Vec<u64> {
        let mut entries: Vec<(&String, &u64)> = self.counts.iter().collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(b.0));
        entries.into_iter().map(|(_, &c)| c).collect()
    }
}

/// Per-year token counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct YearCountTable {
    years: BTreeMap<i64, YearCounts>,
}

impl YearCountTable {
    /// Builds a table from `(year, token, count)` triples, summing duplicates
    /// and skipping zero counts.
    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (i64, &'a str, u64)>) -> Self {
        let mut table = Self::default();
        for (year, token, count) in entries {
            if count > 0 {
                table.add(year, token, count);
            }
        }
        table
    }

    fn add(&mut self, year: i64, token: &str, count: u64) {
        let year = self.years.entry(year).or_default();
        match year.counts.get_mut(token) {
            Some(c) => *c += count,
            None => {
                year.counts.insert(token.to_owned(), count);
            }
        }
        year.corpus_total += count;
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i64> + '_ {
        self.years.keys().copied()
    }

    pub fn year(&self, year: i64) -> Option<&YearCounts> {
        self.years.get(&year)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &YearCounts)> {
        self.years.iter().map(|(&y, c)| (y, c))
    }

    pub fn corpus_total(&self, year: i64) -> u64 {
        self.years.get(&year).map_or(0, |y| y.corpus_total)
    }

    pub fn distinct_types(&self, year: i64) -> usize {
        self.years.get(&year).map_or(0, |y| y.counts.len())
    }
}

fn parse_line(line: &str) -> std::result::Result<(&str, i64, u64), String> {
    let mut fields = line.split('\t');
    let token = fields.next().unwrap_or_default();
    let (Some(year), Some(matches), Some(volumes), None) =
        (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err("expected 4 tab-separated fields".into());
    };
    if token.is_empty() {
        return Err("empty token".into());
    }
    let year = year
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("bad year `{year}`"))?;
    let matches = matches
        .trim()
        .parse::<u64>()
        .map_err(|_| format!("bad match count `{matches}`"))?;
    volumes
        .trim()
        .parse::<u64>()
        .map_err(|_| format!("bad volume count `{volumes}`"))?;
    Ok((token, year, matches))
}

/// Reads `token<TAB>year<TAB>match_count<TAB>volume_count` lines in one pass.
///
/// Rows for the same token and year are summed before the minimum-count
/// filter is applied.
pub fn ingest_ngram_counts<R: BufRead>(
    mut reader: R,
    options: &IngestOptions,
) -> Result<(YearCountTable, IngestStats)> {
    let mut table = YearCountTable::default();
    let mut stats = IngestStats::default();
    let mut buf = String::new();
    let mut line_no = 0u64;
    loop {
        buf.clear();
        if reader.read_line(&mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = buf.trim_end_matches(['\n', '\r']);
        if line.is_empty() {
            continue;
        }
        stats.lines += 1;
        let (token, year, count) = match parse_line(line) {
            Ok(parsed) => parsed,
            Err(reason) => {
                if options.strict {
                    return Err(Error::MalformedLine {
                        line: line_no,
                        reason,
                    });
                }
                stats.malformed_lines += 1;
                stats.first_malformed.get_or_insert(line_no);
                continue;
            }
        };
        stats.parsed_rows += 1;
        stats.parsed_count += count;
        if let Some(range) = &options.year_range {
            if !range.contains(&year) {
                stats.out_of_range_rows += 1;
                stats.out_of_range_count += count;
                continue;
            }
        }
        if count == 0 {
            // contributes nothing; recorded as below the minimum
            stats.below_min_entries += 1;
            continue;
        }
        table.add(year, token, count);
    }

    let min_count = options.min_count.max(1);
    for counts in table.years.values_mut() {
        counts.counts.retain(|_, c| {
            if *c < min_count {
                stats.below_min_entries += 1;
                stats.below_min_count += *c;
                false
            } else {
                true
            }
        });
        counts.corpus_total = counts.counts.values().sum();
        stats.retained_entries += counts.counts.len() as u64;
        stats.retained_count += counts.corpus_total;
    }
    table.years.retain(|_, c| !c.counts.is_empty());
    Ok((table, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ingest(text: &str, options: &IngestOptions) -> Result<(YearCountTable, IngestStats)> {
        ingest_ngram_counts(text.as_bytes(), options)
    }

    #[test]
    fn single_row() {
        let (table, stats) =
            ingest("aardvark\t1950\t120\t40\n", &IngestOptions::default()).unwrap();
        assert_eq!(table.year(1950).unwrap().get("aardvark"), Some(120));
        assert_eq!(table.corpus_total(1950), 120);
        assert_eq!(table.distinct_types(1950), 1);
        assert_eq!(stats.parsed_rows, 1);
    }

    #[test]
    fn duplicates_are_summed() {
        let text = "cat\t1900\t3\t1\ncat\t1900\t4\t2\ndog\t1900\t1\t1\n";
        let (table, _) = ingest(text, &IngestOptions::default()).unwrap();
        assert_eq!(table.year(1900).unwrap().get("cat"), Some(7));
        assert_eq!(table.corpus_total(1900), 8);
    }

    #[test]
    fn min_count_applies_to_year_totals() {
        let text = "rare\t1950\t20\t3\nrare\t1950\t19\t2\ncommon\t1950\t40\t9\nsplit\t1950\t30\t1\nsplit\t1950\t10\t1\n";
        let opts = IngestOptions {
            min_count: 40,
            ..IngestOptions::default()
        };
        let (table, stats) = ingest(text, &opts).unwrap();
        let year = table.year(1950).unwrap();
        assert_eq!(year.get("rare"), None);
        assert_eq!(year.get("common"), Some(40));
        assert_eq!(year.get("split"), Some(40));
        assert_eq!(stats.below_min_count, 39);
        assert_eq!(
            stats.retained_count + stats.below_min_count,
            stats.parsed_count
        );
    }

    #[test]
    fn year_range_filter() {
        let text = "a\t1899\t5\t1\na\t1900\t6\t1\na\t2001\t7\t1\n";
        let opts = IngestOptions {
            year_range: Some(1900..=2000),
            ..IngestOptions::default()
        };
        let (table, stats) = ingest(text, &opts).unwrap();
        assert_eq!(table.years().collect::<Vec<_>>(), vec![1900]);
        assert_eq!(stats.out_of_range_rows, 2);
        assert_eq!(stats.out_of_range_count, 12);
    }

    #[test]
    fn malformed_lines() {
        let text = "good\t1900\t5\t1\nbad line\nworse\t19x0\t1\t1\r\nalso\t1900\t2\t1\r\n";
        let (table, stats) = ingest(text, &IngestOptions::default()).unwrap();
        assert_eq!(stats.malformed_lines, 2);
        assert_eq!(stats.first_malformed, Some(2));
        assert_eq!(table.corpus_total(1900), 7);

        let strict = IngestOptions {
            strict: true,
            ..IngestOptions::default()
        };
        match ingest(text, &strict) {
            Err(Error::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed line, got {other:?}"),
        }
        assert!(ingest("x\t1900\t-3\t1\n", &strict).is_err());
        assert!(ingest("x\t1900\t3\n", &strict).is_err());
        assert!(ingest("x\t1900\t3\t1\textra\n", &strict).is_err());
    }

    #[test]
    fn counts_in_token_order() {
        let table = YearCountTable::from_entries([(1, "b", 2), (1, "a", 5), (1, "c", 1)]);
        assert_eq!(table.year(1).unwrap().counts_in_order(), vec![5, 2, 1]);
    }

    proptest! {
        #[test]
        fn ingestion_conserves_counts(
            rows in prop::collection::vec((0usize..6, 1895i64..1906, 0u64..60), 0..80),
            min_count in 0u64..50,
        ) {
            let tokens = ["a", "b", "c", "d", "e", "f"];
            let mut text = String::new();
            for (tok, year, count) in &rows {
                text.push_str(&format!("{}\t{}\t{}\t1\n", tokens[*tok], year, count));
            }
            let opts = IngestOptions { min_count, year_range: Some(1900..=2000), strict: true };
            let (table, stats) = ingest(&text, &opts).unwrap();
            prop_assert_eq!(
                stats.retained_count + stats.below_min_count + stats.out_of_range_count,
                stats.parsed_count
            );
            let table_total: u64 = table.iter().map(|(_, y)| y.corpus_total()).sum();
            prop_assert_eq!(table_total, stats.retained_count);
            for (_, year) in table.iter() {
                let order = year.counts_in_order();
                prop_assert_eq!(order.iter().sum::<u64>(), year.corpus_total());
                prop_assert!(order.iter().all(|&c| c >= min_count.max(1)));
            }
        }
    }
}
