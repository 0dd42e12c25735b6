use serde::Serialize;

use super::encode::Target;
use super::raw::RawTable;
use crate::error::{Error, Result};

/// Descriptive statistics of a raw (unscaled) column.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ColumnStats {
    pub mean: f64,
    pub median: f64,
    pub mode: f64,
    pub std_dev: f64,
    pub max: f64,
    pub min: f64,
}

/// Mean, lower median, smallest mode, sample standard deviation and extremes.
pub fn summary_stats(column: &[f64]) -> Result<ColumnStats> {
    let n = column.len();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "summary statistics of an empty column".into(),
        ));
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mean = sorted.iter().sum::<f64>() / n as f64;
    let median = sorted[(n - 1) / 2];
    let std_dev = if n > 1 {
        (sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };

    // runs in ascending order; strict `>` keeps the smallest value on ties
    let (mut mode, mut best) = (sorted[0], 0usize);
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        if j - i > best {
            best = j - i;
            mode = sorted[i];
        }
        i = j;
    }

    Ok(ColumnStats {
        mean,
        median,
        mode,
        std_dev,
        max: sorted[n - 1],
        min: sorted[0],
    })
}

/// Non-empty numeric values of one raw column.
pub fn raw_numeric_column(raw: &RawTable, column: &str) -> Result<Vec<f64>> {
    let j = raw.column_index(column)?;
    let mut out = Vec::with_capacity(raw.len());
    for (r, row) in raw.rows.iter().enumerate() {
        let v = row[j].trim();
        if v.is_empty() {
            continue;
        }
        out.push(v.parse::<f64>().map_err(|_| Error::NotNumeric {
            row: r + 1,
            column: column.to_string(),
            value: v.to_string(),
        })?);
    }
    Ok(out)
}

/// Published summary of the three outputs, integer-rounded.
pub const PUBLISHED_STATS: [(Target, ColumnStats); 3] = [
    (
        Target::Comments,
        ColumnStats {
            mean: 7.0,
            median: 3.0,
            mode: 0.0,
            std_dev: 21.0,
            max: 372.0,
            min: 0.0,
        },
    ),
    (
        Target::Likes,
        ColumnStats {
            mean: 178.0,
            median: 101.0,
            mode: 98.0,
            std_dev: 323.0,
            max: 5172.0,
            min: 0.0,
        },
    ),
    (
        Target::Shares,
        ColumnStats {
            mean: 27.0,
            median: 19.0,
            mode: 13.0,
            std_dev: 43.0,
            max: 790.0,
            min: 0.0,
        },
    ),
];

pub const STAT_NAMES: [&str; 6] = ["mean", "median", "mode", "std_dev", "max", "min"];

impl ColumnStats {
    pub fn values(&self) -> [f64; 6] {
        [
            self.mean,
            self.median,
            self.mode,
            self.std_dev,
            self.max,
            self.min,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatCheck {
    pub target: Target,
    pub statistic: &'static str,
    pub expected: f64,
    pub computed: f64,
    pub matched: bool,
}

/// Compares every published cell with the value recomputed from `raw`,
/// after rounding half away from zero.
pub fn validate_published_stats(raw: &RawTable) -> Result<Vec<StatCheck>> {
    let mut out = Vec::with_capacity(18);
    for (target, expected) in PUBLISHED_STATS {
        let stats = summary_stats(&raw_numeric_column(raw, target.column())?)?;
        for ((name, e), c) in STAT_NAMES
            .into_iter()
            .zip(expected.values())
            .zip(stats.values())
        {
            out.push(StatCheck {
                target,
                statistic: name,
                expected: e,
                computed: c,
                matched: c.round() == e,
            });
        }
    }
    Ok(out)
}
