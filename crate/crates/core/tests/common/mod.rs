#![allow(dead_code)]

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

pub mod oracles;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use postbench::numerics::Rng;

pub const HEADER: [&str; 19] = [
    "Page total likes",
    "Type",
    "Category",
    "Post Month",
    "Post Weekday",
    "Post Hour",
    "Paid",
    "Lifetime Post Total Reach",
    "Lifetime Post Total Impressions",
    "Lifetime Engaged Users",
    "Lifetime Post Consumers",
    "Lifetime Post Consumptions",
    "Lifetime Post Impressions by people who have liked your Page",
    "Lifetime Post reach by people who like your Page",
    "Lifetime People who have liked your Page and engaged with your post",
    "comment",
    "like",
    "share",
    "Total Interactions",
];

const TYPES: [&str; 4] = ["Photo", "Status", "Link", "Video"];

/// Deterministic stand-in for the public file: same schema and delimiter,
/// heavy-tailed counts that depend on the inputs, and a few blank cells.
pub fn synthetic_csv(rows: usize, seed: u64) -> String {
    let mut rng = Rng::seed_from_u64(seed);
    let mut out = HEADER.join(";");
    out.push('\n');
    for i in 0..rows {
        let month = 12 - (i * 12 / rows.max(1)) as u32;
        let page_likes = 81_370 + 58_000 * (rows - i) / rows.max(1);
        let ty = TYPES[match rng.below(100) {
            0..=84 => 0,
            85..=93 => 1,
            94..=97 => 2,
            _ => 3,
        }];
        let category = 1 + rng.below(3);
        let weekday = 1 + rng.below(7);
        let hour = 1 + rng.below(23);
        let paid = u64::from(rng.next_f64() < 0.28);
        let g = |rng: &mut Rng| {
            // sum of uniforms, roughly normal
            (0..4).map(|_| rng.next_f64()).sum::<f64>() - 2.0
        };
        let base = 4.3
            + 0.5 * paid as f64
            + if ty == "Status" { -0.6 } else { 0.0 }
            + if ty == "Video" { 0.4 } else { 0.0 }
            + 0.08 * category as f64
            - 0.02 * (hour as f64 - 10.0).abs()
            + 0.03 * month as f64;
        let like = (base + 0.9 * g(&mut rng)).exp().round() as u64;
        let comment = ((base - 3.1 + 1.1 * g(&mut rng)).exp() - 0.6).max(0.0).round() as u64;
        let share = ((base - 2.0 + 0.8 * g(&mut rng)).exp()).round() as u64;
        let reach = like * 60 + rng.below(5000) as u64;
        let mut cells: Vec<String> = vec![
            page_likes.to_string(),
            ty.to_string(),
            category.to_string(),
            month.to_string(),
            weekday.to_string(),
            hour.to_string(),
            paid.to_string(),
            reach.to_string(),
            (reach * 2).to_string(),
            (like + comment + share + rng.below(300) as u64).to_string(),
            (like / 2 + rng.below(200) as u64).to_string(),
            (like + rng.below(400) as u64).to_string(),
            (reach + rng.below(1000) as u64).to_string(),
            (reach / 2).to_string(),
            (like / 3).to_string(),
            comment.to_string(),
            like.to_string(),
            share.to_string(),
            (comment + like + share).to_string(),
        ];
        // blanks like the public file has in a handful of rows
        if i % 125 == 17 {
            cells[17].clear();
        }
        if i % 250 == 42 {
            cells[6].clear();
        }
        let _ = writeln!(out, "{}", cells.join(";"));
    }
    out
}

pub fn write_fixture(dir: &Path, rows: usize, seed: u64) -> PathBuf {
    let path = dir.join("posts.csv");
    std::fs::write(&path, synthetic_csv(rows, seed)).unwrap();
    path
}

/// Location of the public file, if present.
pub fn real_data_path() -> Option<PathBuf> {
    let candidates = [
        std::env::var_os("POSTBENCH_DATA").map(PathBuf::from),
        Some(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/dataset_Facebook.csv")),
    ];
    candidates.into_iter().flatten().find(|p| p.is_file())
}
