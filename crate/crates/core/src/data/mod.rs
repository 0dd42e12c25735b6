//! Ingestion of the semicolon-delimited post-metrics file, categorical
//! encoding, train-fitted min–max scaling, seeded splits and the descriptive
//! statistics check against the published summary table.

mod dataset;
mod encode;
mod raw;
mod scaler;
mod split;
mod stats;

pub use dataset::{prepare, split, Dataset, DatasetScaler, DatasetView};
pub use encode::{
    encode_features, encode_post_type, EncodedTable, Target, FEATURE_COLUMNS, POST_TYPES,
    TYPE_COLUMN,
};
pub use raw::{load_raw, RawTable};
pub use scaler::{apply_scaler, fit_scaler, invert_scaler, ScalerParams};
pub use split::{split_indices, SplitSpec, DEFAULT_TRAIN_ROWS};
pub use stats::{
    raw_numeric_column, summary_stats, validate_published_stats, ColumnStats, StatCheck, STAT_NAMES,
    PUBLISHED_STATS,
};

/// Row count of the public file.
pub const EXPECTED_ROWS: usize = 500;

/// Column count of the public file.
pub const EXPECTED_COLUMNS: usize = 19;
