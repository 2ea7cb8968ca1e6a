//! `renorm`: command-line driver for the renormalization experiments.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use renorm_core::experiments::{self, parse_levels, Cell, Experiment, ExperimentConfig, ExperimentResult};
use renorm_core::Error;

#[derive(Parser, Debug)]
#[command(name = "renorm", version, about = "Numerical renormalization of critical circle maps")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Working precision.
    #[arg(long, global = true, value_enum)]
    precision: Option<PrecisionArg>,
    /// Seed for sampled experiments.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, alias = "emit")]
    out: Option<PathBuf>,
    /// Output format; inferred from the output extension when absent.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// `key = value` configuration file, overridden by flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Add a hexadecimal column after every float column (CSV only).
    #[arg(long, global = true)]
    hexfloat: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum PrecisionArg {
    F64,
    Extended,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
struct MapArgs {
    /// Map family: arnold, blaschke or rigid.
    #[arg(long)]
    family: Option<String>,
    /// Rotation number: golden, silver or cf:a,b,... (trailing `...` repeats).
    #[arg(long)]
    rotation: Option<String>,
    /// Closest-return depth used for tuning.
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct LevelArgs {
    /// Level range `a..b`, or `n` for `1..n`.
    #[arg(long)]
    levels: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tune a family to a rotation number by combinatorial bisection.
    Tune {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Per-level renormalizations of one tuned map.
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        levels: LevelArgs,
        /// Grid points per branch for the C^0 distance.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// C^0 distance between renormalizations of two tuned maps.
    Converge {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        levels: LevelArgs,
        /// Second family.
        #[arg(long)]
        family_b: Option<String>,
        /// Second rotation number; defaults to `--rotation`.
        #[arg(long)]
        rotation_b: Option<String>,
        /// Grid points per branch for the C^0 distance.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Adjacent-atom ratios and distortion of dynamical partitions.
    Realbounds {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        levels: LevelArgs,
    },
    /// Conformal distortion of the extended return maps.
    Beltrami {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        levels: LevelArgs,
        /// Sample points per branch domain.
        #[arg(long)]
        samples: Option<usize>,
        /// Relative size of the complex neighbourhood.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Rotation number of the glued renormalizations.
    GlueCheck {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        levels: LevelArgs,
        /// Iterates used for the rotation number.
        #[arg(long)]
        iterates: Option<u64>,
    },
    /// Pull-back of Poincare disks through the extended lift.
    Schwarz {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        levels: LevelArgs,
        /// Starting view angle of the Poincare disks, in (0, pi).
        #[arg(long)]
        theta: Option<f64>,
        /// Boundary points per disk.
        #[arg(long)]
        boundary_samples: Option<usize>,
    },
    /// Kernel constant C(U) of a rectangle or disk.
    QcConstant {
        /// `rect:x0,x1,y0,y1` or `disk:cx,cy,r`.
        #[arg(long)]
        domain: Option<String>,
        /// Quadrature nodes per axis.
        #[arg(long)]
        resolution: Option<usize>,
    },
}

fn set<T: ToString>(cfg: &mut ExperimentConfig, key: &str, value: &Option<T>) -> Result<()> {
    if let Some(v) = value {
        cfg.set(key, &v.to_string())?;
    }
    Ok(())
}

fn apply_map(cfg: &mut ExperimentConfig, map: &MapArgs) -> Result<()> {
    set(cfg, "family", &map.family)?;
    set(cfg, "rotation", &map.rotation)?;
    set(cfg, "depth", &map.depth)
}

fn apply_levels(cfg: &mut ExperimentConfig, levels: &LevelArgs) -> Result<()> {
    if let Some(l) = &levels.levels {
        cfg.levels = parse_levels(l)?;
    }
    Ok(())
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let experiment = match &cli.command {
        Command::Tune { .. } => Experiment::Tune,
        Command::Orbit { .. } => Experiment::Orbit,
        Command::Converge { .. } => Experiment::Converge,
        Command::Realbounds { .. } => Experiment::Realbounds,
        Command::Beltrami { .. } => Experiment::Beltrami,
        Command::GlueCheck { .. } => Experiment::GlueCheck,
        Command::Schwarz { .. } => Experiment::Schwarz,
        Command::QcConstant { .. } => Experiment::QcConstant,
    };
    let mut cfg = ExperimentConfig::new(experiment);
    if let Some(path) = &cli.global.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.apply_kv(&text)?;
        cfg.experiment = experiment;
    }
    if let Some(p) = cli.global.precision {
        cfg.set("precision", if matches!(p, PrecisionArg::F64) { "f64" } else { "extended" })?;
    }
    set(&mut cfg, "seed", &cli.global.seed)?;
    match &cli.command {
        Command::Tune { map } => apply_map(&mut cfg, map)?,
        Command::Orbit { map, levels, grid } => {
            apply_map(&mut cfg, map)?;
            apply_levels(&mut cfg, levels)?;
            set(&mut cfg, "grid", grid)?;
        }
        Command::Converge {
            map,
            levels,
            family_b,
            rotation_b,
            grid,
        } => {
            apply_map(&mut cfg, map)?;
            apply_levels(&mut cfg, levels)?;
            set(&mut cfg, "family_b", family_b)?;
            set(&mut cfg, "rotation_b", rotation_b)?;
            set(&mut cfg, "grid", grid)?;
        }
        Command::Realbounds { map, levels } => {
            apply_map(&mut cfg, map)?;
            apply_levels(&mut cfg, levels)?;
        }
        Command::Beltrami {
            map,
            levels,
            samples,
            alpha,
        } => {
            apply_map(&mut cfg, map)?;
            apply_levels(&mut cfg, levels)?;
            set(&mut cfg, "samples", samples)?;
            set(&mut cfg, "alpha", alpha)?;
        }
        Command::GlueCheck { map, levels, iterates } => {
            apply_map(&mut cfg, map)?;
            apply_levels(&mut cfg, levels)?;
            set(&mut cfg, "iterates", iterates)?;
        }
        Command::Schwarz {
            map,
            levels,
            theta,
            boundary_samples,
        } => {
            apply_map(&mut cfg, map)?;
            apply_levels(&mut cfg, levels)?;
            set(&mut cfg, "theta", theta)?;
            set(&mut cfg, "boundary_samples", boundary_samples)?;
        }
        Command::QcConstant { domain, resolution } => {
            set(&mut cfg, "domain", domain)?;
            set(&mut cfg, "resolution", resolution)?;
        }
    }
    Ok(cfg)
}

/// `0x1.8p+1` style rendering of a double.
fn hexfloat(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let digits = format!("{mant:013x}");
    let digits = digits.trim_end_matches('0');
    let frac = if digits.is_empty() { String::new() } else { format!(".{digits}") };
    format!("{sign}0x{lead}{frac}p{e:+}")
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => format!("{x:?}"),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn write_csv<W: Write>(result: &ExperimentResult, hex: bool, out: W) -> Result<()> {
    let float_cols: Vec<bool> = (0..result.columns.len())
        .map(|i| hex && result.rows.iter().any(|r| matches!(r[i], Cell::Float(_))))
        .collect();
    let mut w = csv::Writer::from_writer(out);
    let mut header = Vec::new();
    for (c, &f) in result.columns.iter().zip(&float_cols) {
        header.push(c.clone());
        if f {
            header.push(format!("{c}_hex"));
        }
    }
    w.write_record(&header)?;
    for row in &result.rows {
        let mut rec = Vec::new();
        for (c, &f) in row.iter().zip(&float_cols) {
            rec.push(cell_text(c));
            if f {
                rec.push(c.as_f64().map(hexfloat).unwrap_or_default());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn emit(result: &ExperimentResult, global: &Global, default: Format) -> Result<()> {
    let format = global.format.unwrap_or_else(|| match &global.out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
        Some(_) => Format::Csv,
        None => default,
    });
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(result, global.hexfloat, &mut buf)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &result.to_json())?;
            buf.push(b'\n');
        }
    }
    match &global.out {
        Some(path) => write_file(path, &buf),
        None => Ok(io::stdout().write_all(&buf)?),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidInput(_)) => 2,
        Some(Error::PrecisionExhausted(_) | Error::IntegerOverflow { .. }) => 3,
        Some(Error::CombinatoricsMismatch { .. } | Error::BisectionStall { .. }) => 4,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<Option<Error>> {
    let cfg = build_config(cli)?;
    let result = experiments::run(&cfg)?;
    let default = if cfg.experiment == Experiment::Tune { Format::Json } else { Format::Csv };
    emit(&result, &cli.global, default)?;
    if let (Some(col), Some(fit)) = (&result.fit_column, &result.fit) {
        eprintln!("fit on {col}: rate {:.6}, R^2 {:.4}", fit.rate, fit.r_squared);
    }
    Ok(result.truncation)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(trunc)) => {
            eprintln!("renorm: output truncated: {trunc}");
            ExitCode::from(exit_code(&anyhow::Error::new(trunc)))
        }
        Err(e) => {
            eprintln!("renorm: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
