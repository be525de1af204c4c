//! Lexical diversity from 1-gram count files: streaming ingestion of
//! per-year token counts and type-token ratios on fixed-size random samples.

mod ngram;
mod sampling;
mod ttr;

pub use ngram::{ingest_ngram_counts, IngestOptions, IngestStats, YearCountTable, YearCounts};
pub use sampling::{expected_distinct_types, sample_distinct_types, sample_type_counts};
pub use ttr::{ttr_series, write_ttr_csv, SkipReason, TtrConfig, TtrOutput, TtrPoint};
