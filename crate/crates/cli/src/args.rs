//! Command-line flags, the key=value config file, and their merge into
//! resolved [`Settings`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use lmgfs_core::{Delta, Method};
use serde::Serialize;

use crate::error::{CliError, CliResult};

const CONFIG_HELP: &str = "\
CONFIG FILE:
  --config reads a flat text file of key=value lines. Blank lines and lines
  starting with '#' are ignored. Keys are the long flag names without the
  leading dashes; lists are comma separated:

      gamma = 0.5
      tau = 0.5
      n = 64,128,256,512
      h-start = 0.5
      h-stop = 1.5
      h-count = 101
      # or: h-list = 0.6,0.9,1.1
      delta = auto
      methods = finite-difference,analytic
      formats = csv,json,plotscript
      out = results
      jobs = 4
      skip-errors = true

  sweep-tau also reads tau-start, tau-stop, tau-count or tau-list, and
  peak-scan reads check. Flags override the file and the file overrides
  defaults. For a grid (h or tau), the highest layer that sets any of its
  keys decides: its list is used if it has one, otherwise start, stop and
  count are each taken from the highest layer that sets them.

EXIT CODES:
  0 success, 1 usage error, 2 I/O error, 3 numerical failure";

#[derive(Debug, Parser)]
#[command(
    name = "lmgfs",
    version,
    about = "Fidelity susceptibility and entanglement sweeps for the Lipkin-Meshkov-Glick model",
    after_help = CONFIG_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the field h at fixed block fraction.
    SweepH(CommonArgs),
    /// Sweep the block fraction tau at one or more fixed fields.
    SweepTau(TauArgs),
    /// Compare numerics against the thermodynamic-limit closed forms.
    Compare(CommonArgs),
    /// Locate the peak of chi_r(h) for each N.
    PeakScan(PeakArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Anisotropy gamma in [0, 1].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Block fraction M/N in (0, 1]; M is rounded to the nearest integer.
    #[arg(long, conflicts_with = "m")]
    pub tau: Option<f64>,
    /// Explicit block size M, used for every N.
    #[arg(long)]
    pub m: Option<usize>,
    /// System size; repeat the flag or give a comma-separated list.
    #[arg(long = "n", value_name = "N", value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub h_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub h_stop: Option<f64>,
    #[arg(long)]
    pub h_count: Option<usize>,
    /// Explicit comma-separated h values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["h_start", "h_stop", "h_count"])]
    pub h_list: Option<Vec<f64>>,
    /// Finite-difference step, a positive number or "auto".
    #[arg(long)]
    pub delta: Option<String>,
    /// Comma-separated subset of finite-difference, spectral, analytic.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv, json, plotscript.
    #[arg(long, value_delimiter = ',')]
    pub formats: Option<Vec<String>>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Record failed points and carry on instead of exiting with code 3.
    #[arg(long)]
    pub skip_errors: bool,
    /// key=value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub tau_start: Option<f64>,
    #[arg(long)]
    pub tau_stop: Option<f64>,
    #[arg(long)]
    pub tau_count: Option<usize>,
    /// Explicit comma-separated tau values.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["tau_start", "tau_stop", "tau_count"])]
    pub tau_list: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct PeakArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Fail (exit 3) unless |h* - 1| strictly decreases and the peak height
    /// strictly increases with N.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodSel {
    FiniteDifference,
    Spectral,
    Analytic,
}

impl MethodSel {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodSel::FiniteDifference => "finite-difference",
            MethodSel::Spectral => "spectral",
            MethodSel::Analytic => "analytic",
        }
    }

    pub fn numeric(&self) -> Option<Method> {
        match self {
            MethodSel::FiniteDifference => Some(Method::FiniteDifference),
            MethodSel::Spectral => Some(Method::Spectral),
            MethodSel::Analytic => None,
        }
    }
}

impl fmt::Display for MethodSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodSel {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim() {
            "finite-difference" | "fd" => Ok(MethodSel::FiniteDifference),
            "spectral" => Ok(MethodSel::Spectral),
            "analytic" => Ok(MethodSel::Analytic),
            other => Err(CliError::Usage(format!(
                "unknown method {other:?} (expected finite-difference, spectral or analytic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    PlotScript,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "plotscript" | "plot-script" => Ok(Format::PlotScript),
            other => Err(CliError::Usage(format!(
                "unknown format {other:?} (expected csv, json or plotscript)"
            ))),
        }
    }
}

impl Format {
    fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::PlotScript => "plotscript",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    SweepH,
    SweepTau,
    Compare,
    PeakScan,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::SweepH => "sweep-h",
            CommandKind::SweepTau => "sweep-tau",
            CommandKind::Compare => "compare",
            CommandKind::PeakScan => "peak-scan",
        }
    }
}

/// How the subsystem is chosen for each N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Split {
    Tau(f64),
    M(usize),
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct Settings {
    pub command: CommandKind,
    pub gamma: f64,
    pub split: Split,
    pub n_list: Vec<usize>,
    pub h_grid: Vec<f64>,
    /// Requested block fractions; only for sweep-tau.
    pub tau_grid: Vec<f64>,
    pub delta: Delta,
    pub methods: Vec<MethodSel>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub jobs: usize,
    pub skip_errors: bool,
    pub check: bool,
    /// Resolved values in config-file syntax, for output headers.
    pub echo: BTreeMap<String, String>,
}

impl Settings {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    pub fn numeric_methods(&self) -> Vec<Method> {
        self.methods.iter().filter_map(|m| m.numeric()).collect()
    }

    pub fn wants_analytic(&self) -> bool {
        self.methods.contains(&MethodSel::Analytic)
    }
}

/// One layer of raw string values (flags or config file).
type Layer = BTreeMap<String, String>;

const KNOWN_KEYS: &[&str] = &[
    "gamma",
    "tau",
    "m",
    "n",
    "h-start",
    "h-stop",
    "h-count",
    "h-list",
    "tau-start",
    "tau-stop",
    "tau-count",
    "tau-list",
    "delta",
    "methods",
    "out",
    "formats",
    "jobs",
    "skip-errors",
    "check",
];

const H_KEYS: &[&str] = &["h-start", "h-stop", "h-count", "h-list"];
const TAU_KEYS: &[&str] = &["tau-start", "tau-stop", "tau-count", "tau-list"];

/// Parse a key=value config file.
pub fn parse_config(text: &str, origin: &Path) -> CliResult<Layer> {
    let mut layer = Layer::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected key=value, got {line:?}",
                origin.display(),
                index + 1
            )));
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "{}:{}: unknown key {key:?}",
                origin.display(),
                index + 1
            )));
        }
        if layer.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!(
                "{}:{}: key {key:?} given twice",
                origin.display(),
                index + 1
            )));
        }
    }
    Ok(layer)
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn flag_layer(args: &CommonArgs) -> Layer {
    let mut layer = Layer::new();
    let mut put = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            layer.insert(key.to_string(), v);
        }
    };
    put("gamma", args.gamma.map(|v| v.to_string()));
    put("tau", args.tau.map(|v| v.to_string()));
    put("m", args.m.map(|v| v.to_string()));
    put("n", (!args.n.is_empty()).then(|| join(&args.n)));
    put("h-start", args.h_start.map(|v| v.to_string()));
    put("h-stop", args.h_stop.map(|v| v.to_string()));
    put("h-count", args.h_count.map(|v| v.to_string()));
    put("h-list", args.h_list.as_ref().map(|v| join(v)));
    put("delta", args.delta.clone());
    put("methods", args.methods.as_ref().map(|v| v.join(",")));
    put("out", args.out.as_ref().map(|p| p.display().to_string()));
    put("formats", args.formats.as_ref().map(|v| v.join(",")));
    put("jobs", args.jobs.map(|v| v.to_string()));
    put("skip-errors", args.skip_errors.then(|| "true".to_string()));
    layer
}

fn defaults(kind: CommandKind) -> Layer {
    let mut layer: Layer = [
        ("gamma", "0.5"),
        ("tau", "0.5"),
        ("n", "64,128,256,512"),
        ("h-start", "0.5"),
        ("h-stop", "1.5"),
        ("h-count", "101"),
        ("tau-start", "0.05"),
        ("tau-stop", "1"),
        ("tau-count", "20"),
        ("delta", "auto"),
        ("methods", "finite-difference"),
        ("out", "lmgfs-out"),
        ("formats", "csv"),
        ("skip-errors", "false"),
        ("check", "false"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    match kind {
        CommandKind::SweepTau => {
            for key in ["h-start", "h-stop", "h-count"] {
                layer.remove(key);
            }
            layer.insert("h-list".into(), "0.6,1,1.1".into());
        }
        CommandKind::Compare => {
            layer.insert("methods".into(), "finite-difference,analytic".into());
        }
        CommandKind::PeakScan => {
            layer.insert("h-stop".into(), "1.3".into());
            layer.insert("h-count".into(), "161".into());
        }
        CommandKind::SweepH => {}
    }
    layer
}

/// Merge layers, highest precedence first. Grid keys move as a group.
fn merge(layers: &[Layer]) -> Layer {
    let mut merged = Layer::new();
    for group in [H_KEYS, TAU_KEYS] {
        if let Some(layer) = layers.iter().find(|l| group.iter().any(|k| l.contains_key(*k))) {
            let explicit_list = layer.contains_key(group[3]);
            for key in group {
                if let Some(v) = layer.get(*key) {
                    merged.insert(key.to_string(), v.clone());
                } else if !explicit_list && *key != group[3] {
                    // Range keys missing from the chosen layer fall back to lower layers.
                    if let Some(v) = layers.iter().find_map(|l| l.get(*key)) {
                        merged.insert(key.to_string(), v.clone());
                    }
                }
            }
        }
    }
    for layer in layers.iter().rev() {
        for (k, v) in layer {
            if !H_KEYS.contains(&k.as_str()) && !TAU_KEYS.contains(&k.as_str()) {
                merged.insert(k.clone(), v.clone());
            }
        }
    }
    // An explicit tau or m in a higher layer overrides the other key from a lower one.
    if let Some(layer) = layers.iter().find(|l| l.contains_key("tau") || l.contains_key("m")) {
        if layer.contains_key("m") {
            merged.remove("tau");
        } else {
            merged.remove("m");
        }
    }
    merged
}

fn get<T: FromStr>(layer: &Layer, key: &str) -> CliResult<Option<T>> {
    layer
        .get(key)
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| CliError::Usage(format!("invalid value for {key}: {v:?}")))
        })
        .transpose()
}

fn get_list<T: FromStr>(layer: &Layer, key: &str) -> CliResult<Option<Vec<T>>> {
    layer
        .get(key)
        .map(|v| {
            if v.trim().is_empty() {
                return Ok(Vec::new());
            }
            v.split(',')
                .map(|item| {
                    item.trim()
                        .parse::<T>()
                        .map_err(|_| CliError::Usage(format!("invalid entry {item:?} in {key}")))
                })
                .collect()
        })
        .transpose()
}

fn parse_bool(layer: &Layer, key: &str) -> CliResult<bool> {
    match layer.get(key).map(|s| s.trim()) {
        None | Some("false") | Some("no") | Some("0") => Ok(false),
        Some("true") | Some("yes") | Some("1") => Ok(true),
        Some(other) => Err(CliError::Usage(format!("invalid boolean for {key}: {other:?}"))),
    }
}

fn parse_delta(text: &str) -> CliResult<Delta> {
    if text.trim() == "auto" {
        return Ok(Delta::Auto);
    }
    match text.trim().parse::<f64>() {
        Ok(d) if d > 0.0 && d.is_finite() => Ok(Delta::Fixed(d)),
        _ => Err(CliError::Usage(format!(
            "delta must be a positive number or \"auto\", got {text:?}"
        ))),
    }
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            (1.0 - t) * start + t * stop
        })
        .collect()
}

fn grid(layer: &Layer, prefix: &str) -> CliResult<Vec<f64>> {
    let list_key = format!("{prefix}-list");
    let values = if let Some(list) = get_list::<f64>(layer, &list_key)? {
        list
    } else {
        let start = get::<f64>(layer, &format!("{prefix}-start"))?;
        let stop = get::<f64>(layer, &format!("{prefix}-stop"))?;
        let count = get::<usize>(layer, &format!("{prefix}-count"))?;
        match (start, stop, count) {
            (Some(a), Some(b), Some(c)) => linspace(a, b, c),
            _ => {
                return Err(CliError::Usage(format!(
                    "{prefix} grid needs {prefix}-start, {prefix}-stop and {prefix}-count, or {prefix}-list"
                )))
            }
        }
    };
    if values.is_empty() {
        return Err(CliError::Usage(format!("the {prefix} grid is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage(format!("the {prefix} grid has non-finite values")));
    }
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(CliError::Usage(format!("the {prefix} grid must be strictly monotone")));
    }
    Ok(values)
}

fn read_config(path: &Path) -> CliResult<Layer> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

/// Resolve a parsed command line into settings.
pub fn resolve(command: Command) -> CliResult<Settings> {
    let (kind, common, extra, check) = match command {
        Command::SweepH(c) => (CommandKind::SweepH, c, Layer::new(), false),
        Command::Compare(c) => (CommandKind::Compare, c, Layer::new(), false),
        Command::PeakScan(p) => (CommandKind::PeakScan, p.common, Layer::new(), p.check),
        Command::SweepTau(t) => {
            let mut extra = Layer::new();
            if let Some(v) = t.tau_start {
                extra.insert("tau-start".into(), v.to_string());
            }
            if let Some(v) = t.tau_stop {
                extra.insert("tau-stop".into(), v.to_string());
            }
            if let Some(v) = t.tau_count {
                extra.insert("tau-count".into(), v.to_string());
            }
            if let Some(v) = &t.tau_list {
                extra.insert("tau-list".into(), join(v));
            }
            (CommandKind::SweepTau, t.common, extra, false)
        }
    };
    let mut flags = flag_layer(&common);
    flags.extend(extra);
    if check {
        flags.insert("check".into(), "true".into());
    }
    let file = match &common.config {
        Some(path) => read_config(path)?,
        None => Layer::new(),
    };
    let merged = merge(&[flags, file, defaults(kind)]);
    build(kind, &merged)
}

fn build(kind: CommandKind, layer: &Layer) -> CliResult<Settings> {
    let gamma: f64 = get(layer, "gamma")?.expect("defaulted");
    if !(0.0..=1.0).contains(&gamma) {
        return Err(CliError::Usage(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let n_list: Vec<usize> = get_list(layer, "n")?.expect("defaulted");
    if n_list.is_empty() {
        return Err(CliError::Usage("the N list is empty".into()));
    }
    if let Some(bad) = n_list.iter().find(|&&n| n < 2) {
        return Err(CliError::Usage(format!("N must be at least 2, got {bad}")));
    }
    let split = match (get::<usize>(layer, "m")?, get::<f64>(layer, "tau")?) {
        (Some(m), _) => {
            if let Some(n) = n_list.iter().find(|&&n| m < 1 || m > n) {
                return Err(CliError::Usage(format!("M={m} does not fit N={n}")));
            }
            Split::M(m)
        }
        (None, Some(tau)) => {
            if !(tau > 0.0 && tau <= 1.0) {
                return Err(CliError::Usage(format!("tau must lie in (0, 1], got {tau}")));
            }
            Split::Tau(tau)
        }
        (None, None) => unreachable!("tau is defaulted"),
    };
    let h_grid = grid(layer, "h")?;
    if let Some(h) = h_grid.iter().find(|&&h| h < 0.0) {
        return Err(CliError::Usage(format!("h must be >= 0, got {h}")));
    }
    let tau_grid = if kind == CommandKind::SweepTau {
        if matches!(split, Split::M(_)) {
            return Err(CliError::Usage("sweep-tau varies the block size; --m is not allowed".into()));
        }
        let taus = grid(layer, "tau")?;
        if let Some(t) = taus.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
            return Err(CliError::Usage(format!("tau values must lie in (0, 1], got {t}")));
        }
        taus
    } else {
        Vec::new()
    };
    let delta = parse_delta(layer.get("delta").expect("defaulted"))?;
    let mut methods: Vec<MethodSel> = get_list(layer, "methods")?.expect("defaulted");
    methods.sort();
    methods.dedup();
    if methods.is_empty() {
        return Err(CliError::Usage("no methods selected".into()));
    }
    let has_numeric = methods.iter().any(|m| m.numeric().is_some());
    let has_analytic = methods.contains(&MethodSel::Analytic);
    match kind {
        CommandKind::Compare if !(has_numeric && has_analytic) => {
            return Err(CliError::Usage(
                "compare needs analytic and at least one numeric method".into(),
            ))
        }
        CommandKind::PeakScan if !has_numeric => {
            return Err(CliError::Usage("peak-scan needs a numeric method".into()))
        }
        _ => {}
    }
    if has_analytic && gamma >= 1.0 {
        return Err(CliError::Usage(
            "closed forms are not available at gamma = 1; drop the analytic method".into(),
        ));
    }
    let mut formats: Vec<Format> = get_list(layer, "formats")?.expect("defaulted");
    formats.sort();
    formats.dedup();
    if formats.is_empty() {
        return Err(CliError::Usage("no output formats selected".into()));
    }
    let jobs = match get::<usize>(layer, "jobs")? {
        Some(0) => return Err(CliError::Usage("jobs must be at least 1".into())),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let out = PathBuf::from(layer.get("out").expect("defaulted"));
    let skip_errors = parse_bool(layer, "skip-errors")?;
    let check = parse_bool(layer, "check")?;

    let mut echo = BTreeMap::new();
    echo.insert("gamma".into(), gamma.to_string());
    match split {
        Split::Tau(t) if kind != CommandKind::SweepTau => {
            echo.insert("tau".into(), t.to_string());
        }
        Split::M(m) => {
            echo.insert("m".into(), m.to_string());
        }
        _ => {}
    }
    echo.insert("n".into(), join(&n_list));
    echo.insert("h-list".into(), join(&h_grid));
    if kind == CommandKind::SweepTau {
        echo.insert("tau-list".into(), join(&tau_grid));
    }
    echo.insert(
        "delta".into(),
        match delta {
            Delta::Auto => "auto".into(),
            Delta::Fixed(d) => d.to_string(),
        },
    );
    echo.insert("methods".into(), join(&methods));
    echo.insert(
        "formats".into(),
        formats.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(","),
    );
    echo.insert("skip-errors".into(), skip_errors.to_string());
    if kind == CommandKind::PeakScan {
        echo.insert("check".into(), check.to_string());
    }

    Ok(Settings {
        command: kind,
        gamma,
        split,
        n_list,
        h_grid,
        tau_grid,
        delta,
        methods,
        out,
        formats,
        jobs,
        skip_errors,
        check,
        echo,
    })
}
