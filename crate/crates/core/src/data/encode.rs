use std::fmt;

use serde::{Deserialize, Serialize};

use super::raw::RawTable;
use crate::error::{Error, Result};
use crate::numerics::Mat;

/// Inputs known before a post is published, in model input order.
pub const FEATURE_COLUMNS: [&str; 7] = [
    "Page total likes",
    "Type",
    "Category",
    "Post Month",
    "Post Weekday",
    "Post Hour",
    "Paid",
];

pub const TYPE_COLUMN: &str = "Type";

/// Post types in alphabetical order; the position is the integer code.
pub const POST_TYPES: [&str; 4] = ["Link", "Photo", "Status", "Video"];

/// Engagement outputs, one model per column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Comments,
    Likes,
    Shares,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::Comments, Target::Likes, Target::Shares];

    pub fn index(self) -> usize {
        match self {
            Target::Comments => 0,
            Target::Likes => 1,
            Target::Shares => 2,
        }
    }

    /// Column header in the source file.
    pub fn column(self) -> &'static str {
        match self {
            Target::Comments => "comment",
            Target::Likes => "like",
            Target::Shares => "share",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::Comments => "comments",
            Target::Likes => "likes",
            Target::Shares => "shares",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Target::Comments => "Comments",
            Target::Likes => "Likes",
            Target::Shares => "Shares",
        }
    }

    pub fn parse(s: &str) -> Option<Target> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s || t.column() == s)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Numeric view of the raw table before scaling.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedTable {
    /// T × 7 in [`FEATURE_COLUMNS`] order.
    pub features: Mat<f64>,
    /// T × 3 in [`Target::ALL`] order.
    pub targets: Mat<f64>,
    /// Raw row index (0-based data row) of every retained row.
    pub row_ids: Vec<usize>,
    /// Raw row indices removed because a feature or target was missing.
    pub dropped_rows: Vec<usize>,
}

impl EncodedTable {
    pub fn len(&self) -> usize {
        self.row_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_ids.is_empty()
    }

    pub fn target(&self, t: Target) -> Vec<f64> {
        self.targets.column(t.index())
    }
}

pub fn encode_post_type(label: &str) -> Result<f64> {
    POST_TYPES
        .iter()
        .position(|&c| c == label)
        .map(|i| i as f64)
        .ok_or_else(|| Error::UnknownCategory(label.to_string()))
}

fn parse_number(value: &str, row: usize, column: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::NotNumeric {
            row: row + 1,
            column: column.to_string(),
            value: value.to_string(),
        })
}

/// Parses the seven inputs and three outputs; rows with any empty field among
/// them are dropped and reported.
pub fn encode_features(raw: &RawTable) -> Result<EncodedTable> {
    let feature_idx: Vec<usize> = FEATURE_COLUMNS
        .iter()
        .map(|c| raw.column_index(c))
        .collect::<Result<_>>()?;
    let target_idx: Vec<usize> = Target::ALL
        .iter()
        .map(|t| raw.column_index(t.column()))
        .collect::<Result<_>>()?;

    let mut features = Vec::with_capacity(raw.len() * FEATURE_COLUMNS.len());
    let mut targets = Vec::with_capacity(raw.len() * Target::ALL.len());
    let mut row_ids = Vec::with_capacity(raw.len());
    let mut dropped_rows = Vec::new();

    'rows: for (r, row) in raw.rows.iter().enumerate() {
        let mut frow = [0.0; FEATURE_COLUMNS.len()];
        let mut trow = [0.0; 3];
        let mut missing = false;
        for (k, &j) in feature_idx.iter().enumerate() {
            let v = row[j].trim();
            if v.is_empty() {
                missing = true;
                continue;
            }
            frow[k] = if FEATURE_COLUMNS[k] == TYPE_COLUMN {
                encode_post_type(v)?
            } else {
                parse_number(v, r, FEATURE_COLUMNS[k])?
            };
        }
        for (k, &j) in target_idx.iter().enumerate() {
            let v = row[j].trim();
            if v.is_empty() {
                missing = true;
                continue;
            }
            trow[k] = parse_number(v, r, Target::ALL[k].column())?;
        }
        if missing {
            dropped_rows.push(r);
            continue 'rows;
        }
        features.extend_from_slice(&frow);
        targets.extend_from_slice(&trow);
        row_ids.push(r);
    }

    let t = row_ids.len();
    Ok(EncodedTable {
        features: Mat::from_vec(t, FEATURE_COLUMNS.len(), features)?,
        targets: Mat::from_vec(t, 3, targets)?,
        row_ids,
        dropped_rows,
    })
}
