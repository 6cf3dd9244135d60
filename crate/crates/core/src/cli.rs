//! The `ladder-fpp` command line: exact speeds, chain solves, simulation and
//! λ sweeps.
//!
//! Exit codes: 0 success, 1 numeric or I/O failure, 2 usage error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::diagonal_exact::{self, DiagParams};
use crate::fpp_sim::{self, GraphSpec, SimConfig, SimError, SimReport};
use crate::front_chain::{self, ChainFamily};
use crate::ladder_exact::{self, LadderParams};
use crate::{ExactError, SpeedResult};

/// Tail mass accepted by chain solves before the truncation is doubled.
const CHAIN_TOL: f64 = 1e-10;
/// Significant digits in sweep output.
const CSV_DIGITS: i32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Ladder, vertical intensity λ, horizontal 1.
    Ladder,
    /// Ladder with both diagonals, vertical λ, all others 1.
    Diagonal,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Ladder => "ladder",
            Model::Diagonal => "diagonal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Parser)]
#[command(name = "ladder-fpp", version, about = "Front speeds for first-passage percolation on ladder graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct ModelArgs {
    /// Model, as a positional word or with --model.
    #[arg(value_enum, conflicts_with = "model_flag")]
    model: Option<Model>,
    /// Vertical intensity, positional or with --lambda.
    #[arg(allow_negative_numbers = true, conflicts_with = "lambda_flag")]
    lambda: Option<f64>,
    #[arg(long = "model", value_enum, id = "model_flag")]
    model_flag: Option<Model>,
    #[arg(long = "lambda", allow_negative_numbers = true, id = "lambda_flag")]
    lambda_flag: Option<f64>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<(Model, f64), CliError> {
        let model = self
            .model
            .or(self.model_flag)
            .ok_or_else(|| CliError::Usage("missing model (ladder or diagonal)".into()))?;
        let lambda = self
            .lambda
            .or(self.lambda_flag)
            .ok_or_else(|| CliError::Usage("missing lambda".into()))?;
        Ok((model, lambda))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form speed, cross-checked against a truncated chain solve.
    Exact {
        #[command(flatten)]
        model: ModelArgs,
        /// Initial truncation for the cross-check.
        #[arg(long, default_value_t = 200)]
        truncation: usize,
    },
    /// Speed from the truncated front-process chain alone.
    Chain {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 200)]
        truncation: usize,
    },
    /// Monte Carlo estimate on a graph given as a TOML file or a model.
    Simulate {
        /// Graph spec file (keys vertical, horiz0, horiz1, diag_up, diag_down).
        spec: Option<PathBuf>,
        #[arg(long, value_enum)]
        model: Option<Model>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        height: u64,
        #[arg(long, default_value_t = 16)]
        replicas: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Burn-in height; defaults to 1% of the height.
        #[arg(long)]
        burn_in: Option<u64>,
        /// Also write the full report as TOML here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact speeds over a grid of λ, as CSV.
    Sweep {
        #[arg(value_enum, conflicts_with = "model_flag")]
        model: Option<Model>,
        #[arg(long = "model", value_enum, id = "model_flag")]
        model_flag: Option<Model>,
        #[arg(long)]
        lambda_min: f64,
        #[arg(long)]
        lambda_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Scale::Linear)]
        scale: Scale,
        /// CSV destination; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::ParameterOutOfRange { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<front_chain::ChainError> for CliError {
    fn from(e: front_chain::ChainError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Stalled { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    match run(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Exact { model, truncation } => {
            let (m, l) = model.resolve()?;
            cmd_exact(m, l, truncation, out)
        }
        Command::Chain { model, truncation } => {
            let (m, l) = model.resolve()?;
            cmd_chain(m, l, truncation, out)
        }
        Command::Simulate {
            spec,
            model,
            lambda,
            height,
            replicas,
            seed,
            burn_in,
            out: path,
        } => {
            let graph = match (spec, model) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage("give either a spec file or --model, not both".into()))
                }
                (Some(p), None) => GraphSpec::from_toml(&fs::read_to_string(&p)?)?,
                (None, Some(m)) => {
                    let l = lambda.ok_or_else(|| CliError::Usage("--model needs --lambda".into()))?;
                    match m {
                        Model::Ladder => GraphSpec::ladder(l),
                        Model::Diagonal => GraphSpec::diagonal_ladder(l),
                    }
                }
                (None, None) => return Err(CliError::Usage("need a spec file or --model".into())),
            };
            let mut cfg = SimConfig::new(height, replicas, seed);
            if let Some(b) = burn_in {
                cfg.burn_in_height = b;
            }
            cmd_simulate(&graph, &cfg, path, out)
        }
        Command::Sweep {
            model,
            model_flag,
            lambda_min,
            lambda_max,
            points,
            scale,
            out: path,
        } => {
            let m = model
                .or(model_flag)
                .ok_or_else(|| CliError::Usage("missing model (ladder or diagonal)".into()))?;
            let text = cmd_sweep(m, lambda_min, lambda_max, points, scale, err)?;
            match path {
                Some(p) => fs::write(p, text)?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(())
        }
    }
}

/// Closed-form speed for a model.
pub fn exact_speed(model: Model, lambda: f64) -> Result<SpeedResult, ExactError> {
    match model {
        Model::Ladder => ladder_exact::speed_ladder(LadderParams::new(lambda)?),
        Model::Diagonal => diagonal_exact::speed_diagonal(DiagParams::new(lambda)?),
    }
}

/// Speed from the truncated chain, regrown until the tail is below 1e-10.
pub fn chain_speed(model: Model, lambda: f64, truncation: usize) -> Result<(SpeedResult, usize), CliError> {
    let family = match model {
        Model::Ladder => ChainFamily::Ladder { lambda },
        Model::Diagonal => ChainFamily::Diagonal { lambda },
    };
    let (chain, dist) = front_chain::solve_family(family, truncation, CHAIN_TOL)?;
    let result = front_chain::speed_at_stationarity(&chain, &dist)?;
    Ok((result, chain.truncation()))
}

fn cmd_exact(model: Model, lambda: f64, truncation: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let exact = exact_speed(model, lambda)?;
    let (chain, k) = chain_speed(model, lambda, truncation)?;
    writeln!(out, "model: {}", model.name())?;
    writeln!(out, "lambda: {lambda}")?;
    writeln!(out, "speed: {}", exact.speed)?;
    writeln!(out, "pi0: {}", exact.pi0.unwrap_or(f64::NAN))?;
    writeln!(out, "method: {}", exact.method)?;
    writeln!(out, "chain speed (K={k}): {}", chain.speed)?;
    writeln!(out, "abs diff: {:e}", (exact.speed - chain.speed).abs())?;
    Ok(())
}

fn cmd_chain(model: Model, lambda: f64, truncation: usize, out: &mut dyn Write) -> Result<(), CliError> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(CliError::Usage(format!("lambda must be non-negative, got {lambda}")));
    }
    if truncation < 2 {
        return Err(CliError::Usage("truncation must be at least 2".into()));
    }
    let (r, k) = chain_speed(model, lambda, truncation)?;
    writeln!(out, "model: {}", model.name())?;
    writeln!(out, "lambda: {lambda}")?;
    writeln!(out, "speed: {}", r.speed)?;
    writeln!(out, "pi0: {}", r.pi0.unwrap_or(f64::NAN))?;
    writeln!(out, "method: {}", r.method)?;
    writeln!(out, "truncation: {k}")?;
    writeln!(out, "error bound: {:e}", r.error_bound.unwrap_or(0.0))?;
    Ok(())
}

/// (2 tan 1 − 1)/(2 tan 1 − 2): speed of the ladder with one diagonal at
/// unit intensities.
pub fn ladder_one_diagonal_speed() -> f64 {
    let t = 2.0 * 1f64.tan();
    (t - 1.0) / (t - 2.0)
}

/// Exact speed for graphs that are a rescaled member of a solved family,
/// with a short description. Speeds scale linearly with a common factor on
/// all intensities, and swapping the two levels maps one diagonal onto the
/// other.
pub fn reference_speed(spec: &GraphSpec) -> Option<(String, f64)> {
    let h = spec.horiz0?;
    if spec.horiz1 != Some(h) {
        return None;
    }
    let lam = spec.vertical.map_or(0.0, |v| v / h);
    match (spec.diag_up, spec.diag_down) {
        (None, None) => {
            if spec.vertical.is_none() {
                return Some(("independent lanes".into(), h));
            }
            let s = ladder_exact::speed_ladder(LadderParams::new(lam).ok()?).ok()?;
            Some((format!("ladder, lambda = {lam}"), h * s.speed))
        }
        (Some(a), Some(b)) if a == h && b == h => {
            let s = diagonal_exact::speed_diagonal(DiagParams::new(lam).ok()?).ok()?;
            Some((format!("diagonal ladder, lambda = {lam}"), h * s.speed))
        }
        (Some(a), None) | (None, Some(a)) if a == h && spec.vertical == Some(h) => {
            Some(("ladder with one diagonal".into(), h * ladder_one_diagonal_speed()))
        }
        _ => None,
    }
}

fn cmd_simulate(
    graph: &GraphSpec,
    cfg: &SimConfig,
    path: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let checked = fpp_sim::validate(graph)?;
    let est = fpp_sim::estimate_speed(&checked, cfg)?;
    writeln!(out, "mean speed: {}", est.mean_speed)?;
    writeln!(out, "std error: {}", est.std_error)?;
    writeln!(out, "replicas: {}", est.replicas)?;
    writeln!(out, "height: {}", cfg.target_height)?;
    writeln!(out, "seed: {}", cfg.seed)?;
    if let Some((what, v)) = reference_speed(graph) {
        writeln!(out, "exact ({what}): {v}")?;
        writeln!(out, "z-score: {:.3}", est.z_score(v))?;
    }
    if let Some(p) = path {
        fs::write(p, SimReport::new(&est, cfg, graph).to_toml())?;
    }
    Ok(())
}

/// `x` to `digits` significant digits, trailing zeros trimmed.
pub fn format_significant(x: f64, digits: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = digits - 1 - mag;
    if !(0..=20).contains(&decimals) {
        return format!("{:.*e}", (digits - 1) as usize, x);
    }
    let s = format!("{:.*}", decimals as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn sweep_grid(min: f64, max: f64, points: usize, scale: Scale) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    if !(min < max) || !min.is_finite() || !max.is_finite() {
        return Err(CliError::Usage(format!("need lambda-min < lambda-max, got {min} and {max}")));
    }
    if scale == Scale::Log && min <= 0.0 {
        return Err(CliError::Usage("log scale needs lambda-min > 0".into()));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / last;
            if i == 0 {
                return min;
            }
            if i + 1 == points {
                return max;
            }
            match scale {
                Scale::Linear => min + (max - min) * t,
                Scale::Log => (min.ln() + (max.ln() - min.ln()) * t).exp(),
            }
        })
        .collect())
}

/// CSV `lambda,speed,pi0,method`, one row per grid point. Writes a warning
/// to `err` wherever the speed fails to increase.
pub fn cmd_sweep(
    model: Model,
    min: f64,
    max: f64,
    points: usize,
    scale: Scale,
    err: &mut dyn Write,
) -> Result<String, CliError> {
    let grid = sweep_grid(min, max, points, scale)?;
    let mut csv = String::from("lambda,speed,pi0,method\n");
    let mut prev: Option<(f64, f64)> = None;
    for l in grid {
        let r = exact_speed(model, l)?;
        if let Some((pl, ps)) = prev {
            if r.speed <= ps {
                writeln!(err, "warning: speed does not increase between lambda = {pl} and {l}")?;
            }
        }
        prev = Some((l, r.speed));
        csv.push_str(&format!(
            "{},{},{},{}\n",
            format_significant(l, CSV_DIGITS),
            format_significant(r.speed, CSV_DIGITS),
            format_significant(r.pi0.unwrap_or(f64::NAN), CSV_DIGITS),
            r.method
        ));
    }
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["ladder-fpp"];
        full.extend_from_slice(args);
        let code = main_with_args(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(1.464_718_427_628_694_6, 12), "1.46471842763");
        assert_eq!(format_significant(0.04, 12), "0.04");
        assert_eq!(format_significant(20.0, 12), "20");
        assert_eq!(format_significant(1e-30, 3), "1.00e-30");
    }

    #[test]
    fn exact_positional_and_flags_agree() {
        let (c1, o1, _) = run_args(&["exact", "ladder", "1"]);
        let (c2, o2, _) = run_args(&["exact", "--model", "ladder", "--lambda", "1"]);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(o1, o2);
        assert!(o1.contains("speed: 1.46471842762"));
        assert!(o1.contains("method: exact-bessel"));
    }

    #[test]
    fn exact_out_of_regime_is_usage_error() {
        let (code, _, err) = run_args(&["exact", "ladder", "0.01"]);
        assert_eq!(code, 2);
        assert!(err.contains("lambda"));
        let (code, _, _) = run_args(&["exact", "ladder"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_args(&["frobnicate"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn sweep_row_count_and_log_guard() {
        let mut err = Vec::new();
        let csv = cmd_sweep(Model::Ladder, 0.5, 2.0, 2, Scale::Linear, &mut err).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("lambda,speed,pi0,method\n0.5,"));
        assert!(matches!(
            cmd_sweep(Model::Diagonal, 0.0, 2.0, 5, Scale::Log, &mut err),
            Err(CliError::Usage(_))
        ));
        assert!(err.is_empty());
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = sweep_grid(0.04, 1e3, 7, Scale::Log).unwrap();
        assert_eq!(g[0], 0.04);
        assert_eq!(g[6], 1e3);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn reference_detection() {
        let (_, v) = reference_speed(&GraphSpec::ladder(1.0)).unwrap();
        assert!((v - 1.464_718_427_628_694_6).abs() < 1e-12);
        let (_, v) = reference_speed(&GraphSpec::ladder(1.0).scaled(2.0)).unwrap();
        assert!((v - 2.0 * 1.464_718_427_628_694_6).abs() < 1e-12);
        let (_, v) = reference_speed(&GraphSpec::diagonal_ladder(1.0).scaled(3.0)).unwrap();
        assert!((v - 3.0 * 2.813_779_211_991_87).abs() < 1e-9);
        let mirrored = GraphSpec {
            diag_up: None,
            diag_down: Some(1.0),
            ..GraphSpec::ladder_one_diagonal()
        };
        let (_, v) = reference_speed(&mirrored).unwrap();
        assert!((v - 1.897_009_456_245_975).abs() < 1e-12);
        let odd = GraphSpec {
            horiz1: Some(2.0),
            ..GraphSpec::ladder(1.0)
        };
        assert!(reference_speed(&odd).is_none());
    }

    #[test]
    fn simulate_needs_two_replicas() {
        let (code, _, err) = run_args(&[
            "simulate", "--model", "ladder", "--lambda", "1", "--height", "1000", "--replicas", "1",
        ]);
        assert_eq!(code, 2, "{err}");
    }
}
