//! Experiment drivers: each runner turns an [`ExperimentConfig`] into a table
//! of per-level records plus metadata and an optional log-linear fit.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arith::ContinuedFraction;
use crate::complexext::{beltrami_decay, schwarz_inclusion_check, ExtendedLift};
use crate::error::{Error, Result};
use crate::fit::geometric_rate;
use crate::maps::{rotation_number, tune_parameter, CircleLift, Family, Tuned, DEFAULT_Q_CAP};
use crate::pairs::{glue, metric_d_checked, pair_rotation_number, renormalization_of_lift, Height};
use crate::partitions::bounds_record;
use crate::qc::{constant_cu, PlaneDomain};

/// Deepest closest-return level an experiment may request.
pub const MAX_DEPTH: usize = 40;
/// Renormalizations used to read the heights of a glued pair.
const HEIGHT_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F64,
    Extended,
}

impl Precision {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "f64" => Ok(Precision::F64),
            "extended" => Ok(Precision::Extended),
            other => Err(Error::InvalidInput(format!("unknown precision '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::F64 => "f64",
            Precision::Extended => "extended",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Tune,
    Orbit,
    Converge,
    Realbounds,
    Beltrami,
    GlueCheck,
    Schwarz,
    QcConstant,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Tune,
        Experiment::Orbit,
        Experiment::Converge,
        Experiment::Realbounds,
        Experiment::Beltrami,
        Experiment::GlueCheck,
        Experiment::Schwarz,
        Experiment::QcConstant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Tune => "tune",
            Experiment::Orbit => "orbit",
            Experiment::Converge => "converge",
            Experiment::Realbounds => "realbounds",
            Experiment::Beltrami => "beltrami",
            Experiment::GlueCheck => "glue-check",
            Experiment::Schwarz => "schwarz",
            Experiment::QcConstant => "qc-constant",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown experiment '{s}'")))
    }
}

/// Everything a runner needs. Unused fields are ignored by each experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub family: Family,
    /// Second family for `converge`.
    pub family_b: Family,
    pub rotation: String,
    /// Second rotation number for `converge`; defaults to `rotation`.
    pub rotation_b: Option<String>,
    /// Closest-return depth the maps are tuned to.
    pub depth: usize,
    /// Inclusive level range.
    pub levels: (usize, usize),
    pub samples: usize,
    pub alpha: f64,
    pub theta: f64,
    pub boundary_samples: usize,
    /// Grid points per branch for the pair metric.
    pub grid: usize,
    pub resolution: usize,
    pub domain: String,
    pub iterates: u64,
    pub seed: u64,
    pub precision: Precision,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            family: Family::Arnold,
            family_b: Family::Blaschke,
            rotation: "golden".into(),
            rotation_b: None,
            depth: 14,
            levels: (1, 12),
            samples: 256,
            alpha: crate::complexext::DEFAULT_ALPHA,
            theta: std::f64::consts::FRAC_PI_2,
            boundary_samples: 64,
            grid: 256,
            resolution: 256,
            domain: "rect:-1,2,-1,1".into(),
            iterates: 10_000,
            seed: 0,
            precision: Precision::F64,
        }
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::InvalidInput(format!("bad value '{value}' for '{key}'"));
        let v = value.trim();
        match key.trim() {
            "experiment" => self.experiment = Experiment::parse(v)?,
            "family" => self.family = Family::parse(v)?,
            "family_b" => self.family_b = Family::parse(v)?,
            "rotation" => self.rotation = v.to_string(),
            "rotation_b" => self.rotation_b = (!v.is_empty()).then(|| v.to_string()),
            "depth" => self.depth = v.parse().map_err(|_| bad())?,
            "levels" => self.levels = parse_levels(v)?,
            "samples" => self.samples = v.parse().map_err(|_| bad())?,
            "alpha" => self.alpha = v.parse().map_err(|_| bad())?,
            "theta" => self.theta = v.parse().map_err(|_| bad())?,
            "boundary_samples" => self.boundary_samples = v.parse().map_err(|_| bad())?,
            "grid" => self.grid = v.parse().map_err(|_| bad())?,
            "resolution" => self.resolution = v.parse().map_err(|_| bad())?,
            "domain" => self.domain = v.to_string(),
            "iterates" => self.iterates = v.parse().map_err(|_| bad())?,
            "seed" => self.seed = v.parse().map_err(|_| bad())?,
            "precision" => self.precision = Precision::parse(v)?,
            other => return Err(Error::InvalidInput(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Overlay a `key = value` file; `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::new(Experiment::Tune);
        cfg.apply_kv(text)?;
        Ok(cfg)
    }

    /// Inverse of [`ExperimentConfig::from_kv`].
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        put("experiment", self.experiment.name().into());
        put("family", self.family.name().into());
        put("family_b", self.family_b.name().into());
        put("rotation", self.rotation.clone());
        put("rotation_b", self.rotation_b.clone().unwrap_or_default());
        put("depth", self.depth.to_string());
        put("levels", format!("{}..{}", self.levels.0, self.levels.1));
        put("samples", self.samples.to_string());
        put("alpha", format!("{:?}", self.alpha));
        put("theta", format!("{:?}", self.theta));
        put("boundary_samples", self.boundary_samples.to_string());
        put("grid", self.grid.to_string());
        put("resolution", self.resolution.to_string());
        put("domain", self.domain.clone());
        put("iterates", self.iterates.to_string());
        put("seed", self.seed.to_string());
        put("precision", self.precision.name().into());
        s
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.levels;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidInput(format!("empty or invalid level range {lo}..{hi}")));
        }
        if hi + 2 > MAX_DEPTH || self.depth > MAX_DEPTH {
            return Err(Error::InvalidInput(format!("depth beyond {MAX_DEPTH} is not supported")));
        }
        if self.samples == 0 || self.boundary_samples == 0 || self.grid < 2 || self.resolution < 4 {
            return Err(Error::InvalidInput("sample counts must be positive".into()));
        }
        let theta_ok = self.theta > 0.0 && self.theta < std::f64::consts::PI;
        if self.alpha.is_nan() || self.alpha <= 0.0 || !theta_ok {
            return Err(Error::InvalidInput("alpha must be positive and theta in (0, pi)".into()));
        }
        if self.iterates == 0 {
            return Err(Error::InvalidInput("iterates must be positive".into()));
        }
        if self.precision == Precision::Extended {
            return Err(Error::InvalidInput(
                "extended precision is only available for continued-fraction arithmetic".into(),
            ));
        }
        ContinuedFraction::parse(&self.rotation)?;
        if let Some(r) = &self.rotation_b {
            ContinuedFraction::parse(r)?;
        }
        if self.experiment == Experiment::QcConstant {
            PlaneDomain::parse(&self.domain)?;
        }
        Ok(())
    }

    fn tune_depth(&self) -> usize {
        self.depth.max(self.levels.1 + 2)
    }
}

/// `a..b` (inclusive) or a single `n` meaning `1..n`.
pub fn parse_levels(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidInput(format!("bad level range '{s}'"));
    match s.split_once("..") {
        Some((a, b)) => Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)),
        None => Ok((1, s.trim().parse().map_err(|_| bad())?)),
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Float(x) => Some(x),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<Height> for Cell {
    fn from(h: Height) -> Self {
        match h {
            Height::Finite(r) => Cell::Int(r as i64),
            Height::Infinite => Cell::Text("inf".into()),
        }
    }
}

/// Exponential fit of one column against the level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    /// Fitted ratio between successive levels.
    pub rate: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
}

/// Per-level table plus metadata. A failure after some rows were produced is
/// kept in `truncation` and the partial table is still returned.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub metadata: Metadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Column the fit was taken on.
    pub fit_column: Option<String>,
    pub fit: Option<FitSummary>,
    pub truncation: Option<Error>,
}

impl ExperimentResult {
    fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        Self {
            metadata: Metadata {
                experiment: config.experiment.name().into(),
                version: env!("CARGO_PKG_VERSION").into(),
                seed: config.seed,
                wall_time_s: 0.0,
                config: config.clone(),
            },
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fit_column: None,
            fit: None,
            truncation: None,
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].clone()).collect())
    }

    pub fn float_column(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.iter().map(Cell::as_f64).collect()
    }

    /// Recompute the fit from the stored records.
    pub fn refit(&self) -> Option<FitSummary> {
        let col = self.float_column(self.fit_column.as_deref()?)?;
        let (rate, r_squared) = geometric_rate(&col)?;
        Some(FitSummary { rate, r_squared })
    }

    fn set_fit(&mut self, column: &str) {
        self.fit_column = Some(column.into());
        self.fit = self.refit();
    }

    /// `{"metadata": .., "fit": .., "truncated": .., "records": [{..}, ..]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let records: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), serde_json::to_value(v).unwrap_or(serde_json::Value::Null)))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::json!({
            "metadata": self.metadata,
            "fit_column": self.fit_column,
            "fit": self.fit,
            "truncated": self.truncation.as_ref().map(|e| e.to_string()),
            "records": records,
        })
    }

    /// Records keyed by column name.
    pub fn records(&self) -> Vec<BTreeMap<String, Cell>> {
        self.rows
            .iter()
            .map(|row| self.columns.iter().cloned().zip(row.iter().cloned()).collect())
            .collect()
    }
}

fn tuned(family: Family, rotation: &str, depth: usize) -> Result<Tuned> {
    let cf = ContinuedFraction::parse(rotation)?;
    tune_parameter(family, &cf, depth, DEFAULT_Q_CAP)
}

/// Run `body` once per level, keeping rows produced before the first error.
fn per_level(
    result: &mut ExperimentResult,
    levels: (usize, usize),
    mut body: impl FnMut(usize) -> Result<Vec<Vec<Cell>>>,
) -> Result<()> {
    for n in levels.0..=levels.1 {
        match body(n) {
            Ok(rows) => rows.into_iter().for_each(|r| result.push(r)),
            Err(e) if result.rows.is_empty() => return Err(e),
            Err(e) => {
                result.truncation = Some(e);
                break;
            }
        }
    }
    Ok(())
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let mut result = match config.experiment {
        Experiment::Tune => run_tune(config),
        Experiment::Orbit => run_orbit(config),
        Experiment::Converge => run_converge(config),
        Experiment::Realbounds => run_realbounds(config),
        Experiment::Beltrami => run_beltrami(config),
        Experiment::GlueCheck => run_glue_check(config),
        Experiment::Schwarz => run_schwarz(config),
        Experiment::QcConstant => run_qc_constant(config),
    }?;
    result.metadata.wall_time_s = start.elapsed().as_secs_f64();
    Ok(result)
}

pub fn run_tune(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let t = tuned(config.family, &config.rotation, config.depth)?;
    let mut r = ExperimentResult::new(
        config,
        &[
            "family",
            "rotation",
            "param",
            "bracket_lo",
            "bracket_hi",
            "matched_depth",
            "certified_depth",
            "iterations",
        ],
    );
    r.push(vec![
        t.family.name().into(),
        config.rotation.as_str().into(),
        t.param.into(),
        t.bracket.0.into(),
        t.bracket.1.into(),
        t.matched_depth.into(),
        t.certified_depth.into(),
        t.iterations.into(),
    ]);
    Ok(r)
}

pub fn run_orbit(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let lift = tuned(config.family, &config.rotation, config.tune_depth())?.lift();
    let mut r = ExperimentResult::new(
        config,
        &["level", "eta0", "xi0", "height", "seam_residual", "commutator_residual", "d0_prev"],
    );
    let mut prev = None;
    per_level(&mut r, config.levels, |n| {
        let z = renormalization_of_lift(lift.clone(), n)?;
        let seam = glue(&z)?.seam_residual;
        let d0_prev = match &prev {
            Some(p) => crate::pairs::metric_d(0, p, &z, config.grid)?,
            None => f64::NAN,
        };
        let row = vec![
            n.into(),
            z.eta0().into(),
            z.xi0().into(),
            z.height()?.into(),
            seam.into(),
            z.commutator_residual().into(),
            d0_prev.into(),
        ];
        prev = Some(z);
        Ok(vec![row])
    })?;
    Ok(r)
}

pub fn run_converge(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let depth = config.tune_depth();
    let f = tuned(config.family, &config.rotation, depth)?.lift();
    let rot_b = config.rotation_b.as_deref().unwrap_or(&config.rotation);
    let g = tuned(config.family_b, rot_b, depth)?.lift();
    let mut r = ExperimentResult::new(
        config,
        &["level", "d0", "d0_coarse", "grid_agrees", "height_f", "height_g"],
    );
    per_level(&mut r, config.levels, |n| {
        let zf = renormalization_of_lift(f.clone(), n)?;
        let zg = renormalization_of_lift(g.clone(), n)?;
        let d = metric_d_checked(0, &zf, &zg, config.grid)?;
        Ok(vec![vec![
            n.into(),
            d.value.into(),
            d.coarse.into(),
            d.agrees.into(),
            zf.height()?.into(),
            zg.height()?.into(),
        ]])
    })?;
    r.set_fit("d0");
    Ok(r)
}

pub fn run_realbounds(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let lift = tuned(config.family, &config.rotation, config.tune_depth())?.lift();
    let mut r = ExperimentResult::new(
        config,
        &["level", "max_ratio", "min_ratio", "max_atom", "distortion_long", "distortion_short"],
    );
    per_level(&mut r, config.levels, |n| {
        let b = bounds_record(lift.as_ref(), n)?;
        Ok(vec![vec![
            n.into(),
            b.max_ratio.into(),
            b.min_ratio.into(),
            b.max_atom.into(),
            b.distortion_long.into(),
            b.distortion_short.into(),
        ]])
    })?;
    r.set_fit("max_atom");
    Ok(r)
}

pub fn run_beltrami(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let lift = tuned(config.family, &config.rotation, config.tune_depth())?.lift();
    let ext = ExtendedLift::new(lift)?;
    let mut r = ExperimentResult::new(
        config,
        &["level", "sup_mu_eta", "sup_mu_xi", "skipped_fraction", "sup_mu_real", "flagged"],
    );
    per_level(&mut r, config.levels, |n| {
        let rec = beltrami_decay(&ext, &[n], config.samples, config.alpha, config.seed)?[0];
        Ok(vec![vec![
            n.into(),
            rec.sup_mu_eta.into(),
            rec.sup_mu_xi.into(),
            rec.skipped_fraction.into(),
            rec.sup_mu_real.into(),
            rec.flagged.into(),
        ]])
    })?;
    r.set_fit("sup_mu_eta");
    Ok(r)
}

/// Rotation number of the glued `R^n f`, against `1/(1 + G^n(theta))`.
pub fn run_glue_check(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let cf = ContinuedFraction::parse(&config.rotation)?;
    let lift = tune_parameter(config.family, &cf, config.tune_depth(), DEFAULT_Q_CAP)?.lift();
    let mut r = ExperimentResult::new(
        config,
        &[
            "level",
            "rho_glued",
            "rho_heights",
            "expected",
            "abs_error",
            "enclosure",
            "seam_residual",
        ],
    );
    per_level(&mut r, config.levels, |n| {
        let z = renormalization_of_lift(lift.clone(), n)?;
        let g = glue(&z)?;
        let rho = rotation_number(&g, config.iterates).value;
        let (_, tail) = pair_rotation_number(&z, HEIGHT_DEPTH)?;
        let expected = 1.0 / (1.0 + cf.shift(n).value());
        Ok(vec![vec![
            n.into(),
            rho.into(),
            (1.0 / (1.0 + tail)).into(),
            expected.into(),
            (rho - expected).abs().into(),
            (1.0 / config.iterates as f64).into(),
            g.seam_residual.into(),
        ]])
    })?;
    Ok(r)
}

pub fn run_schwarz(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let lift = tuned(config.family, &config.rotation, config.tune_depth())?.lift();
    let ext = ExtendedLift::new(lift)?;
    let mut r = ExperimentResult::new(
        config,
        &[
            "level",
            "j",
            "theta_in",
            "theta_out",
            "margin",
            "schwarz_constant",
            "failed_points",
        ],
    );
    per_level(&mut r, config.levels, |n| {
        let rep = schwarz_inclusion_check(&ext, n, config.theta, config.boundary_samples)?;
        Ok(rep
            .steps
            .iter()
            .map(|s| {
                vec![
                    n.into(),
                    s.j.into(),
                    s.theta_in.into(),
                    s.theta_out.into(),
                    s.margin.into(),
                    s.schwarz_constant.into(),
                    s.failed_points.into(),
                ]
            })
            .collect())
    })?;
    Ok(r)
}

pub fn run_qc_constant(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let domain = PlaneDomain::parse(&config.domain)?;
    let k = constant_cu(&domain, config.resolution)?;
    let mut r = ExperimentResult::new(
        config,
        &["domain", "resolution", "c_u", "c_u_fine", "rel_diff", "argmax_re", "argmax_im"],
    );
    r.push(vec![
        config.domain.as_str().into(),
        config.resolution.into(),
        k.value.into(),
        k.fine.into(),
        ((k.fine - k.value).abs() / k.fine).into(),
        k.argmax.0.into(),
        k.argmax.1.into(),
    ]);
    Ok(r)
}

/// Lift of a tuned family member, for callers that bypass the runners.
pub fn tuned_lift(family: Family, rotation: &str, depth: usize) -> Result<Arc<dyn CircleLift>> {
    Ok(tuned(family, rotation, depth)?.lift())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip() {
        let mut cfg = ExperimentConfig::new(Experiment::Beltrami);
        cfg.levels = (3, 9);
        cfg.alpha = 0.1 + 0.2;
        cfg.rotation_b = Some("silver".into());
        cfg.seed = 42;
        assert_eq!(ExperimentConfig::from_kv(&cfg.to_kv()).unwrap(), cfg);
    }

    #[test]
    fn kv_parsing_rejects_unknown_keys() {
        assert!(ExperimentConfig::from_kv("colour = blue").is_err());
        assert!(ExperimentConfig::from_kv("depth 12").is_err());
        let cfg = ExperimentConfig::from_kv("# comment\nexperiment = orbit\nlevels = 12 # trailing\n").unwrap();
        assert_eq!(cfg.levels, (1, 12));
        assert_eq!(cfg.experiment, Experiment::Orbit);
    }

    #[test]
    fn empty_level_range_is_rejected_before_work() {
        let mut cfg = ExperimentConfig::new(Experiment::Converge);
        cfg.levels = (5, 4);
        assert!(matches!(run(&cfg), Err(Error::InvalidInput(_))));
        cfg.levels = (0, 4);
        assert!(matches!(run(&cfg), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn identical_maps_are_at_distance_zero() {
        let mut cfg = ExperimentConfig::new(Experiment::Converge);
        cfg.family_b = Family::Arnold;
        cfg.levels = (3, 6);
        cfg.grid = 64;
        let r = run(&cfg).unwrap();
        assert!(r.float_column("d0").unwrap().iter().all(|&d| d == 0.0));
        assert!(r.fit.is_none());
    }

    #[test]
    fn stored_fit_matches_refit() {
        let mut cfg = ExperimentConfig::new(Experiment::Converge);
        cfg.levels = (3, 7);
        cfg.grid = 64;
        let r = run(&cfg).unwrap();
        assert_eq!(r.fit, r.refit());
        let json = r.to_json();
        assert_eq!(json["records"].as_array().unwrap().len(), 5);
        let echoed: ExperimentConfig = serde_json::from_value(json["metadata"]["config"].clone()).unwrap();
        assert_eq!(echoed, cfg);
    }
}
