use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use postbench::bench::{emit_all, train_single, Method, RunConfig};
use postbench::data::{
    encode_features, load_raw, prepare, raw_numeric_column, summary_stats, validate_published_stats,
    SplitSpec, Target, EXPECTED_COLUMNS, EXPECTED_ROWS,
};
use postbench::format::fmt_sig;

#[derive(Parser)]
#[command(name = "postbench", version, about = "ESN, SVR and ANFIS on post engagement metrics")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the published descriptive statistics and diff them.
    ValidateData { path: PathBuf },
    /// Print summary statistics of the three output columns.
    Stats { path: PathBuf },
    /// Train one model on one target and write its JSON dump.
    Train {
        config: PathBuf,
        #[arg(long, value_parser = parse_method)]
        model: Method,
        #[arg(long, value_parser = parse_target)]
        target: Target,
        /// Split seed; defaults to the first configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; defaults to `<output_dir>/<model>_<target>.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full multi-seed run and report files.
    Reproduce {
        config: PathBuf,
        /// Overrides `data_path` from the config.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Write the scaled dataset of one split as CSV.
    DumpData {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::parse(s).ok_or_else(|| format!("unknown model `{s}` (svr, esn, anfis, baseline)"))
}

fn parse_target(s: &str) -> Result<Target, String> {
    Target::parse(s).ok_or_else(|| format!("unknown target `{s}` (comments, likes, shares)"))
}

type CmdResult = Result<ExitCode, postbench::Error>;

fn validate_data(path: &Path) -> CmdResult {
    let raw = load_raw(path)?;
    if raw.header.len() != EXPECTED_COLUMNS || raw.len() != EXPECTED_ROWS {
        println!(
            "note: {} rows x {} columns (expected {EXPECTED_ROWS} x {EXPECTED_COLUMNS})",
            raw.len(),
            raw.header.len()
        );
    }
    let checks = validate_published_stats(&raw)?;
    println!("{:<9} {:<8} {:>10} {:>14}  status", "target", "stat", "expected", "computed");
    for c in &checks {
        println!(
            "{:<9} {:<8} {:>10} {:>14}  {}",
            c.target.name(),
            c.statistic,
            c.expected,
            fmt_sig(c.computed, 9),
            if c.matched { "MATCH" } else { "MISMATCH" }
        );
    }
    let bad = checks.iter().filter(|c| !c.matched).count();
    if bad == 0 {
        println!("all {} cells match", checks.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{bad} of {} cells differ", checks.len());
        Ok(ExitCode::from(1))
    }
}

fn stats(path: &Path) -> CmdResult {
    let raw = load_raw(path)?;
    println!("{:<9} {:>10} {:>8} {:>8} {:>10} {:>8} {:>8}", "target", "mean", "median", "mode", "std_dev", "max", "min");
    for t in Target::ALL {
        let s = summary_stats(&raw_numeric_column(&raw, t.column())?)?;
        println!(
            "{:<9} {:>10} {:>8} {:>8} {:>10} {:>8} {:>8}",
            t.name(),
            fmt_sig(s.mean, 6),
            fmt_sig(s.median, 6),
            fmt_sig(s.mode, 6),
            fmt_sig(s.std_dev, 6),
            fmt_sig(s.max, 6),
            fmt_sig(s.min, 6)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn load_config(path: &Path) -> Result<RunConfig, postbench::Error> {
    Ok(RunConfig::load(path)?.with_env_overrides())
}

fn write_out(path: &Path, text: &str) -> Result<(), postbench::Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| postbench::Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    std::fs::write(path, text).map_err(|e| postbench::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn train(config: &Path, model: Method, target: Target, seed: Option<u64>, out: Option<PathBuf>) -> CmdResult {
    let config = load_config(config)?;
    let seed = seed.unwrap_or(config.seeds[0]);
    let encoded = encode_features(&load_raw(&config.data_path)?)?;
    let scored = train_single(&config, &encoded, model, target, seed)?;
    let out = out.unwrap_or_else(|| config.output_dir.join(format!("{model}_{target}.json")));
    let mut text = serde_json::to_string_pretty(&scored.dump)?;
    text.push('\n');
    write_out(&out, &text)?;
    println!(
        "{} {} seed {seed}: train MSE {}, test MSE {}",
        model.title(),
        target.title(),
        fmt_sig(scored.train_mse, 6),
        fmt_sig(scored.test_mse, 6)
    );
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn reproduce(config: &Path, data: Option<PathBuf>) -> CmdResult {
    let mut config = load_config(config)?;
    if let Some(d) = data {
        config.data_path = d;
    }
    let report = postbench::bench::run_experiment(&config)?;
    print!("{}", report.to_markdown());
    for p in emit_all(&report, &config.output_dir)? {
        println!("wrote {}", p.display());
    }
    Ok(if report.any_failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn dump_data(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> CmdResult {
    let config = load_config(config)?;
    let seed = seed.unwrap_or(config.seeds[0]);
    let encoded = encode_features(&load_raw(&config.data_path)?)?;
    let (dataset, _, _) = prepare(
        &encoded,
        &SplitSpec {
            seed,
            ..config.split
        },
    )?;
    let out = out.unwrap_or_else(|| config.output_dir.join(format!("dataset_seed{seed}.csv")));
    let mut buf = Vec::new();
    dataset
        .write_canonical_csv(&mut buf)
        .expect("writing to memory");
    write_out(&out, &String::from_utf8(buf).expect("ascii csv"))?;
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ValidateData { path } => validate_data(&path),
        Command::Stats { path } => stats(&path),
        Command::Train {
            config,
            model,
            target,
            seed,
            out,
        } => train(&config, model, target, seed, out),
        Command::Reproduce { config, data } => reproduce(&config, data),
        Command::DumpData { config, seed, out } => dump_data(&config, seed, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
