//! The `coopifc` command-line front end.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 2 for usage or validation errors and 3 for
//! numerical degeneracy. Output goes to the given writers so the whole front
//! end can be driven from tests.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{maximize, sum_rate_upper, BoundId, InputCovariance};
use crate::gdof::{self, AlphaGrid, GdofCurve};
use crate::ksum::{self, DestInputs};
use crate::model::{
    apply_mode, build_symmetric, validate_channel, ChannelParams, CooperationMode, ModeTag, SymmetricParams,
};
use crate::optimize::OptimizerConfig;
use crate::svg::{Plot, Series};
use crate::{log2_1p, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "coopifc", version, about = "Outer bounds and GDoF curves for the cooperative Gaussian interference channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximize outer bounds for a channel and report the sum-rate bound.
    EvalBounds(EvalBoundsArgs),
    /// Symmetric GDoF of one or more cooperation modes over an α grid.
    GdofSweep(GdofSweepArgs),
    /// Write the six-mode comparison figure data (CSV per mode plus SVG).
    ReproduceFig(ReproduceFigArgs),
    /// Print the term chain of a partial-sum-rate bound.
    KsumGen(KsumArgs),
    /// Evaluate a partial-sum-rate chain on a channel.
    KsumEval(KsumArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
    Text,
}

#[derive(Debug, Args)]
pub struct ChannelSource {
    /// Channel JSON file with fields K, H, P, SigmaZ, C and optional Delta.
    #[arg(long, value_name = "FILE", conflicts_with = "sym")]
    pub channel: Option<PathBuf>,
    /// Symmetric exponent JSON file (snr, alpha, beta_s, ...).
    #[arg(long, value_name = "FILE")]
    pub sym: Option<PathBuf>,
    /// Cooperation mode applied to --sym.
    #[arg(long, value_name = "NAME", requires = "sym")]
    pub mode: Option<ModeTag>,
    /// Cooperation strength of --mode.
    #[arg(long, value_name = "F", default_value_t = 0.0)]
    pub beta: f64,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    /// Optimizer settings as JSON (restarts, max_iters, tol, seed, free_noise).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    pub restarts: Option<usize>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EvalBoundsArgs {
    #[command(flatten)]
    pub source: ChannelSource,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Comma-separated bounds to report, e.g. `cut-r1a,thm2b,cut:1,4`.
    /// Defaults to every named bound.
    #[arg(long, value_name = "LIST")]
    pub bounds: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GdofSweepArgs {
    /// Mode name, or a comma-separated list of modes.
    #[arg(long, value_name = "NAME", default_value = "no-coop")]
    pub mode: String,
    #[arg(long, value_name = "F", default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, value_name = "A:B:STEP", default_value = "0:3:0.005")]
    pub grid: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceFigArgs {
    /// 2 for β = 0.125, 3 for β = 2.5.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub which: u8,
    /// Output directory.
    #[arg(long, value_name = "PATH", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct KsumArgs {
    /// Number of user pairs; taken from --channel when omitted.
    #[arg(long = "K", value_name = "N")]
    pub k: Option<usize>,
    /// Users in the partial sum.
    #[arg(long, value_name = "LIST")]
    pub subset: Option<String>,
    /// Chain order; a permutation of --subset.
    #[arg(long, value_name = "LIST")]
    pub order: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub channel: Option<PathBuf>,
    /// Input covariance JSON (matrix of [re, im]); defaults to diag(P).
    #[arg(long, value_name = "FILE")]
    pub cov: Option<PathBuf>,
    /// omit, condition or auto.
    #[arg(long, value_name = "POLICY")]
    pub dest_inputs: Option<DestInputs>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    lines: Vec<String>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Degenerate { .. } | Error::NegativeInformation(_) => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        };
        Failure { code, lines: vec![e.to_string()] }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, lines: vec![msg.into()] }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::EvalBounds(a) => run_eval_bounds(&a, out),
        Command::GdofSweep(a) => run_gdof_sweep(&a, out),
        Command::ReproduceFig(a) => run_reproduce_fig(&a, out),
        Command::KsumGen(a) => run_ksum(&a, false, out),
        Command::KsumEval(a) => run_ksum(&a, true, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            for line in f.lines {
                let _ = writeln!(err, "error: {line}");
            }
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_file(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Loads the channel and, for symmetric inputs, the SNR used for normalization.
fn load_channel(src: &ChannelSource) -> std::result::Result<(ChannelParams, Option<f64>), Failure> {
    let (ch, snr) = match (&src.channel, &src.sym) {
        (Some(path), None) => (ChannelParams::from_json_str(&read_file(path)?)?, None),
        (None, Some(path)) => {
            let sym = SymmetricParams::from_json_str(&read_file(path)?)?;
            let ch = match src.mode {
                Some(tag) => apply_mode(&CooperationMode::preset(tag, src.beta), &sym).channel()?,
                None => build_symmetric(&sym)?,
            };
            (ch, Some(sym.snr))
        }
        _ => return Err(usage("exactly one of --channel or --sym is required")),
    };
    let diags = validate_channel(&ch);
    if !diags.is_empty() {
        return Err(Failure { code: EXIT_USAGE, lines: diags.iter().map(|d| d.to_string()).collect() });
    }
    Ok((ch, snr))
}

fn optimizer_config(a: &OptimizerArgs) -> std::result::Result<OptimizerConfig, Failure> {
    let mut cfg = match &a.config {
        Some(path) => serde_json::from_str(&read_file(path)?).map_err(Error::from)?,
        None => OptimizerConfig::default(),
    };
    if let Some(r) = a.restarts {
        cfg.restarts = r;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// Splits a bound list. Generic cuts contain commas themselves, so a token
/// that is a bare number continues the preceding `cut:` entry.
fn parse_bound_list(list: &str) -> std::result::Result<Vec<BoundId>, Failure> {
    let mut items: Vec<String> = Vec::new();
    for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match items.last_mut() {
            Some(last) if last.starts_with("cut:") && tok.chars().all(|c| c.is_ascii_digit()) => {
                last.push(',');
                last.push_str(tok);
            }
            _ => items.push(tok.to_string()),
        }
    }
    if items.is_empty() {
        return Err(usage("empty bound list"));
    }
    items.iter().map(|s| s.parse::<BoundId>().map_err(Failure::from)).collect()
}

pub fn run_eval_bounds_json(
    ch: &ChannelParams,
    snr: Option<f64>,
    ids: Option<&[BoundId]>,
    cfg: &OptimizerConfig,
) -> crate::Result<serde_json::Value> {
    let mut reports = Vec::new();
    let mut headline = serde_json::Value::Null;
    let named = BoundId::named();
    let wanted: Vec<BoundId> = ids.map(<[BoundId]>::to_vec).unwrap_or_else(|| if ch.k == 2 { named.clone() } else { Vec::new() });
    if ch.k == 2 {
        let sr = sum_rate_upper(ch, cfg)?;
        for id in &wanted {
            match sr.reports.iter().find(|r| &r.id == id) {
                Some(r) => reports.push(r.clone()),
                None => reports.push(maximize(ch, id, cfg)?),
            }
        }
        headline = json!({
            "headline_bits": sr.headline_bits,
            "headline_normalized": snr.map(|s| sr.headline_bits / log2_1p(s)),
            "binding": sr.binding,
            "constituents": sr.constituents,
        });
    } else {
        for id in &wanted {
            reports.push(maximize(ch, id, cfg)?);
        }
    }
    Ok(json!({
        "K": ch.k,
        "seed": cfg.seed,
        "restarts": cfg.restarts,
        "bounds": reports,
        "sum_rate_upper": headline,
    }))
}

fn run_eval_bounds(a: &EvalBoundsArgs, out: &mut dyn Write) -> CmdResult {
    let (ch, snr) = load_channel(&a.source)?;
    let cfg = optimizer_config(&a.optimizer)?;
    let ids = a.bounds.as_deref().map(parse_bound_list).transpose()?;
    let value = run_eval_bounds_json(&ch, snr, ids.as_deref(), &cfg)?;
    let text = serde_json::to_string_pretty(&value).map_err(Error::from)? + "\n";
    emit(out, a.out.as_deref(), &text)
}

fn parse_modes(list: &str) -> std::result::Result<Vec<ModeTag>, Failure> {
    list.split(',').map(|s| s.trim().parse::<ModeTag>().map_err(Failure::from)).collect()
}

/// 2d against α, one polyline per curve.
pub fn curves_svg(title: &str, curves: &[GdofCurve]) -> String {
    Plot {
        title: title.into(),
        x_label: "alpha".into(),
        y_label: "2d".into(),
        series: curves
            .iter()
            .map(|c| Series { label: c.mode.to_string(), points: c.points.iter().map(|p| (p.alpha, p.two_d())).collect() })
            .collect(),
    }
    .render()
}

fn csv_string(curves: &[GdofCurve]) -> std::result::Result<String, Failure> {
    let mut buf = Vec::new();
    gdof::write_csv(&mut buf, curves)?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

fn run_gdof_sweep(a: &GdofSweepArgs, out: &mut dyn Write) -> CmdResult {
    let modes = parse_modes(&a.mode)?;
    let grid: AlphaGrid = a.grid.parse()?;
    if !(a.beta >= 0.0) {
        return Err(usage("beta must be nonnegative"));
    }
    let curves = modes.iter().map(|&m| gdof::sweep(m, a.beta, &grid.points())).collect::<crate::Result<Vec<_>>>()?;
    let text = match a.format {
        Format::Csv => csv_string(&curves)?,
        Format::Svg => curves_svg(&format!("Symmetric GDoF, beta = {}", a.beta), &curves),
        Format::Json => serde_json::to_string_pretty(&curves).map_err(Error::from)? + "\n",
        Format::Text => return Err(usage("gdof-sweep supports csv, svg and json")),
    };
    emit(out, a.out.as_deref(), &text)
}

/// Cooperation strength of a comparison figure.
pub fn figure_beta(which: u8) -> Option<f64> {
    match which {
        2 => Some(0.125),
        3 => Some(2.5),
        _ => None,
    }
}

/// Six-mode curves of a comparison figure over the default grid.
pub fn figure_curves(which: u8) -> crate::Result<Vec<GdofCurve>> {
    let beta = figure_beta(which).ok_or_else(|| Error::InvalidParams(format!("no figure {which}")))?;
    let alphas = AlphaGrid::figure().points();
    ModeTag::FIGURE.iter().map(|&m| gdof::sweep(m, beta, &alphas)).collect()
}

fn run_reproduce_fig(a: &ReproduceFigArgs, out: &mut dyn Write) -> CmdResult {
    let curves = figure_curves(a.which)?;
    fs::create_dir_all(&a.out)?;
    for c in &curves {
        let path = a.out.join(format!("fig{}_{}.csv", a.which, c.mode));
        fs::write(&path, csv_string(std::slice::from_ref(c))?)?;
        writeln!(out, "{}", path.display())?;
    }
    let beta = figure_beta(a.which).expect("validated by clap");
    let path = a.out.join(format!("fig{}.svg", a.which));
    fs::write(&path, curves_svg(&format!("Symmetric GDoF vs alpha, beta = {beta}"), &curves))?;
    writeln!(out, "{}", path.display())?;
    Ok(())
}

fn parse_users(list: &str) -> std::result::Result<Vec<usize>, Failure> {
    list.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("invalid user subset: bad user '{t}'"))))
        .collect()
}

fn ksum_order(a: &KsumArgs) -> std::result::Result<Option<Vec<usize>>, Failure> {
    let subset = a.subset.as_deref().map(parse_users).transpose()?;
    let order = a.order.as_deref().map(parse_users).transpose()?;
    match (subset, order) {
        (Some(s), Some(o)) => {
            let (mut ss, mut os) = (s.clone(), o.clone());
            ss.sort_unstable();
            os.sort_unstable();
            if ss != os {
                return Err(usage("invalid user subset: --order must be a permutation of --subset"));
            }
            Ok(Some(o))
        }
        (s, o) => Ok(o.or(s)),
    }
}

fn run_ksum(a: &KsumArgs, require_channel: bool, out: &mut dyn Write) -> CmdResult {
    let users = ksum_order(a)?.ok_or_else(|| usage("--subset or --order is required"))?;
    let ch = match &a.channel {
        Some(path) => {
            let ch = ChannelParams::from_json_str(&read_file(path)?)?;
            let diags = validate_channel(&ch);
            if !diags.is_empty() {
                return Err(Failure { code: EXIT_USAGE, lines: diags.iter().map(|d| d.to_string()).collect() });
            }
            Some(ch)
        }
        None if require_channel => return Err(usage("ksum-eval requires --channel")),
        None => None,
    };
    let k = match (a.k, &ch) {
        (Some(k), Some(ch)) if k != ch.k => return Err(usage(format!("--K {k} does not match channel K={}", ch.k))),
        (Some(k), _) => k,
        (None, Some(ch)) => ch.k,
        (None, None) => return Err(usage("--K is required without --channel")),
    };
    let policy = a.dest_inputs.unwrap_or(if ch.is_some() { DestInputs::Auto } else { DestInputs::Omit });
    let resolved = ch.as_ref().map_or(policy, |c| policy.resolve(c));
    let spec = ksum::generate_terms_with(k, &users, resolved)?;

    let mut value = spec.to_json();
    let mut text = spec.render();
    if let Some(ch) = &ch {
        let q = match &a.cov {
            Some(path) => {
                let q = InputCovariance::from_json_str(&read_file(path)?)?;
                q.check_power(&ch.p)?;
                q
            }
            None => InputCovariance::diagonal(&ch.p),
        };
        let inband = ksum::eval_terms(ch, &q, &spec)?;
        let discrepancy = ksum::consistency_check(ch, &q, &spec)?;
        let budget = ksum::oob_budget(ch, &users);
        text.push_str(&format!("inband_bits = {inband:.9}\n"));
        text.push_str(&format!("oob_budget_bits = {budget:.9}\n"));
        text.push_str(&format!("total_bits = {:.9}\n", inband + budget));
        text.push_str(&format!("consistency_discrepancy = {discrepancy:.3e}\n"));
        value["inband_bits"] = json!(inband);
        value["oob_budget_bits"] = json!(budget);
        value["total_bits"] = json!(inband + budget);
        value["consistency_discrepancy"] = json!(discrepancy);
        if a.order.is_none() && users.len() > 1 {
            let best = ksum::tightest_order(ch, &q, &users, resolved)?;
            let order = best.order.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            text.push_str(&format!("tightest_order = {order} ({:.9} bits)\n", best.total_bits));
            value["tightest_order"] = json!(best);
        }
    }
    if spec.dest_inputs {
        text.push_str("# destination inputs added to every conditioning set\n");
    }
    let text = match a.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&value).map_err(Error::from)? + "\n",
        _ => return Err(usage("ksum commands support text and json")),
    };
    emit(out, a.out.as_deref(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("coopifc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bound_lists_keep_generic_cuts_together() {
        let ids = parse_bound_list("cut-r1a,cut:1,4,thm2b").unwrap();
        assert_eq!(ids.len(), 3);
        assert_eq!(ids[1].label(), "cut:1,4");
    }

    #[test]
    fn sweep_rows() {
        let (code, out, _) = call(&["gdof-sweep", "--mode", "no-coop", "--beta", "0", "--grid", "0:3:0.5"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 8);
    }

    #[test]
    fn bad_grid_is_usage_error() {
        let (code, _, err) = call(&["gdof-sweep", "--grid", "3:0:0.5"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("grid not increasing"));
    }

    #[test]
    fn ksum_out_of_range() {
        let (code, _, err) = call(&["ksum-gen", "--K", "4", "--subset", "1,5"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("user index out of range"));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(call(&["gdof-sweep", "--nope"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }
}
