//! `hbcast` command-line frontend.
//!
//! Exit codes: 0 on success, 1 when an alias-free simulation (or the
//! threshold cross-check) disagrees with the closed forms, 2 on invalid
//! input or I/O failure.
//!
//! CSV output has a header row, comma separators, LF line endings and 17
//! significant digits per number. JSON output is one object per run with a
//! `version` field and fixed key order.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::model::{ChannelSpec, DistortionPair, PowerSplit, SourceSpec};
use crate::regions::{
    compare_schemes, sweep_frontier, uniform_grid, ComparisonReport, Prediction, RegionCurve,
    Scheme, Verdict, DEFAULT_GRID_POINTS,
};
use crate::simulate::{self, LatticeMode, SimConfig, SimMode, SimResult};

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// Relative `--output` paths are resolved against this directory when set.
pub const OUTPUT_DIR_ENV: &str = "HBCAST_OUTPUT_DIR";

/// Half-width, in standard errors, of the simulation consistency band.
pub const CONSISTENCY_SIGMAS: f64 = 4.0;

pub const REGION_CSV_HEADER: &str = "scheme,alpha1,d1,d2,conditional";
pub const THRESHOLD_CSV_HEADER: &str =
    "alpha1,threshold,p_over_n1,hybrid_beats_a_predicted,hybrid_beats_a_observed,agree";
pub const COMPARE_CSV_HEADER: &str =
    "alpha1,scheme,d1,d2,conditional,d1_winner,hybrid_vs_a,threshold,prediction,agree";

#[derive(Debug, Parser)]
#[command(
    name = "hbcast",
    version,
    about = "Distortion regions and Monte Carlo transceivers for Gaussian sources over a degraded Gaussian broadcast channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every applicable scheme's (D1, D2) at one power split
    Region(RegionArgs),
    /// Frontiers over a grid of power splits
    Sweep(SweepArgs),
    /// Pointwise comparison of all schemes over a grid
    Compare(GridArgs),
    /// SNR-threshold prediction versus observed hybrid/Scheme A ordering
    Threshold(GridArgs),
    /// Monte Carlo run of the hybrid or uncoded transceiver
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Variance of each source component
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma2: f64,
    /// Correlation coefficient, 0 <= rho < 1
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rho: f64,
    /// Transmit power budget P
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub power: f64,
    /// Noise variance at Receiver 1
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub n1: f64,
    /// Noise variance at Receiver 2 (must exceed n1)
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub n2: f64,
}

impl ModelArgs {
    fn build(&self) -> Result<(SourceSpec, ChannelSpec), CliError> {
        let source = SourceSpec::new(self.sigma2, self.rho).map_err(CliError::invalid)?;
        let channel = ChannelSpec::new(self.power, self.n1, self.n2).map_err(CliError::invalid)?;
        Ok((source, channel))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Fraction of power for the coded branch, in [0, 1]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha1: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of uniformly spaced alpha1 points on [0, 1]
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid: usize,
    /// Explicit comma-separated alpha1 values (overrides --grid)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha1: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutputArgs,
}

impl GridArgs {
    fn points(&self) -> Vec<f64> {
        match &self.alpha1 {
            Some(v) => v.clone(),
            None => uniform_grid(self.grid),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated schemes: outer, hybrid, hybrid-independent,
    /// hybrid-correlated, uncoded, separation-a, separation-b, or all
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub schemes: Vec<String>,
    /// Also write a gnuplot script plotting the emitted CSV (needs --output)
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Hybrid,
    Uncoded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeArg {
    Ideal,
    Physical,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha1: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Hybrid)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = LatticeArg::Ideal)]
    pub lattice: LatticeArg,
    /// Lattice second-moment inflation factor (physical lattice only)
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub inflation: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1000)]
    pub blocklength: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = rayon default); does not change the output
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("formula consistency failure: {0}")]
    Consistency(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Consistency(_) => 1,
            CliError::Invalid(_) | CliError::Io { .. } => 2,
        }
    }
}

/// Parses `args` (including the program name), executes the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Region(a) => cmd_region(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Threshold(a) => cmd_threshold(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
    }
}

/// Formats `x` with 17 significant digits; positional notation for
/// moderate magnitudes, scientific otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub scheme: Scheme,
    pub alpha1: f64,
    #[serde(flatten)]
    pub pair: DistortionPair,
}

impl RegionRow {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.scheme,
            fmt_f64(self.alpha1),
            fmt_f64(self.pair.d1),
            fmt_f64(self.pair.d2),
            self.pair.conditional
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub version: u32,
    pub command: String,
    pub source: SourceSpec,
    pub channel: ChannelSpec,
    pub rows: Vec<RegionRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDoc {
    pub version: u32,
    pub command: String,
    pub source: SourceSpec,
    pub channel: ChannelSpec,
    pub curves: Vec<RegionCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareDoc {
    pub version: u32,
    pub command: String,
    pub report: ComparisonReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub alpha1: f64,
    pub threshold: Option<f64>,
    pub p_over_n1: f64,
    pub predicted: Prediction,
    pub observed: Verdict,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDoc {
    pub version: u32,
    pub command: String,
    pub source: SourceSpec,
    pub channel: ChannelSpec,
    pub rows: Vec<ThresholdRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateDoc {
    pub version: u32,
    pub command: String,
    pub source: SourceSpec,
    pub channel: ChannelSpec,
    pub alpha1: f64,
    pub config: SimConfig,
    pub result: SimResult,
    pub consistency_sigmas: f64,
    /// Whether a FAIL status is a formula violation (alias-free runs only).
    pub formula_check: bool,
    pub status: Status,
}

fn emit(out_args: &OutputArgs, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match &out_args.output {
        Some(path) => {
            let path = resolve_output(path);
            std::fs::write(&path, text).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

/// Applies [`OUTPUT_DIR_ENV`] to relative paths.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn split_of(alpha1: f64) -> Result<PowerSplit, CliError> {
    PowerSplit::new(alpha1).map_err(CliError::invalid)
}

pub fn cmd_region(args: &RegionArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (source, channel) = args.model.build()?;
    let split = split_of(args.alpha1)?;
    let rows = Scheme::ALL
        .into_iter()
        .filter(|s| s.applies_to(&source))
        .map(|scheme| {
            let pair = scheme
                .point(&source, &channel, split)
                .map_err(CliError::invalid)?;
            Ok(RegionRow {
                scheme,
                alpha1: split.alpha1(),
                pair,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let text = match args.out.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_table(REGION_CSV_HEADER, rows.iter().map(RegionRow::csv)),
        Format::Json => to_json(&RegionDoc {
            version: SCHEMA_VERSION,
            command: "region".into(),
            source,
            channel,
            rows,
        }),
    };
    emit(&args.out, &text, out)
}

/// Resolves `--schemes` names. `hybrid` picks the independent or correlated
/// variant from `rho`; `all` expands to every scheme defined for the source.
pub fn parse_schemes(names: &[String], source: &SourceSpec) -> Result<Vec<Scheme>, CliError> {
    let mut schemes = Vec::new();
    for name in names {
        let name = name.trim();
        let add: Vec<Scheme> = match name.to_ascii_lowercase().as_str() {
            "all" => Scheme::ALL
                .into_iter()
                .filter(|s| s.applies_to(source))
                .collect(),
            "hybrid" if source.is_independent() => vec![Scheme::HybridIndependent],
            "hybrid" => vec![Scheme::HybridCorrelated],
            other => vec![other.parse::<Scheme>().map_err(CliError::Invalid)?],
        };
        for s in add {
            if !s.applies_to(source) {
                return Err(CliError::Invalid(format!(
                    "{s} is only defined for independent sources (rho = 0)"
                )));
            }
            if !schemes.contains(&s) {
                schemes.push(s);
            }
        }
    }
    if schemes.is_empty() {
        return Err(CliError::Invalid("no schemes selected".into()));
    }
    Ok(schemes)
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (source, channel) = args.grid.model.build()?;
    let schemes = parse_schemes(&args.schemes, &source)?;
    let grid = args.grid.points();
    let curves = schemes
        .iter()
        .map(|&s| sweep_frontier(s, &source, &channel, &grid).map_err(CliError::invalid))
        .collect::<Result<Vec<_>, _>>()?;
    let format = args.grid.out.format.unwrap_or(Format::Csv);
    if args.plot.is_some() && (format != Format::Csv || args.grid.out.output.is_none()) {
        return Err(CliError::Invalid(
            "--plot needs CSV written to a file via --output".into(),
        ));
    }
    let text = match format {
        Format::Csv => csv_table(
            REGION_CSV_HEADER,
            curves.iter().flat_map(|c| {
                c.points.iter().map(move |&(alpha1, pair)| {
                    RegionRow {
                        scheme: c.scheme,
                        alpha1,
                        pair,
                    }
                    .csv()
                })
            }),
        ),
        Format::Json => to_json(&SweepDoc {
            version: SCHEMA_VERSION,
            command: "sweep".into(),
            source,
            channel,
            curves,
        }),
    };
    emit(&args.grid.out, &text, out)?;
    if let (Some(script), Some(data)) = (&args.plot, &args.grid.out.output) {
        let script = resolve_output(script);
        let data = resolve_output(data);
        let text = gnuplot_script(&script, &data, &schemes);
        std::fs::write(&script, text).map_err(|source| CliError::Io {
            path: script.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

/// Path of `target` relative to the directory containing `script`.
fn relative_to_script(script: &Path, target: &Path) -> PathBuf {
    let absolute = |p: &Path| -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            std::env::current_dir().unwrap_or_default().join(p)
        }
    };
    let b = absolute(script.parent().unwrap_or(Path::new("")));
    let t = absolute(target);
    let bc: Vec<_> = b.components().collect();
    let tc: Vec<_> = t.components().collect();
    let common = bc.iter().zip(&tc).take_while(|(x, y)| x == y).count();
    let mut rel = PathBuf::new();
    for _ in common..bc.len() {
        rel.push("..");
    }
    for c in &tc[common..] {
        rel.push(c.as_os_str());
    }
    rel
}

pub fn gnuplot_script(script: &Path, data: &Path, schemes: &[Scheme]) -> String {
    let rel = relative_to_script(script, data);
    let names: Vec<&str> = schemes.iter().map(|s| s.name()).collect();
    format!(
        "# Distortion frontiers; run from this script's directory.\n\
         set datafile separator ','\n\
         set xlabel 'D1'\n\
         set ylabel 'D2'\n\
         set key top right\n\
         set grid\n\
         plot for [s in \"{}\"] '{}' skip 1 using (strcol(1) eq s ? $3 : NaN):4 with lines title s\n",
        names.join(" "),
        rel.display()
    )
}

pub fn cmd_compare(args: &GridArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (source, channel) = args.model.build()?;
    let report = compare_schemes(&source, &channel, &args.points()).map_err(CliError::invalid)?;
    let text = match args.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut lines = Vec::new();
            for row in &report.rows {
                let winner = row.d1_winner.map(|s| s.name()).unwrap_or("TIE");
                let threshold = row.threshold.map(fmt_f64).unwrap_or_else(|| "inf".into());
                for (scheme, pair) in &row.points {
                    lines.push(format!(
                        "{},{},{},{},{},{},{},{},{},{}",
                        fmt_f64(row.alpha1),
                        scheme,
                        fmt_f64(pair.d1),
                        fmt_f64(pair.d2),
                        pair.conditional,
                        winner,
                        verdict_label(row.hybrid_vs_a),
                        threshold,
                        prediction_label(row.prediction),
                        row.agrees
                    ));
                }
            }
            csv_table(COMPARE_CSV_HEADER, lines)
        }
        Format::Json => to_json(&CompareDoc {
            version: SCHEMA_VERSION,
            command: "compare".into(),
            report,
        }),
    };
    emit(&args.out, &text, out)
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::First => "true",
        Verdict::Second => "false",
        Verdict::Tie => "tie",
    }
}

fn prediction_label(p: Prediction) -> &'static str {
    match p {
        Prediction::HybridWins => "true",
        Prediction::NoWin => "false",
        Prediction::Boundary => "boundary",
    }
}

pub fn cmd_threshold(args: &GridArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (source, channel) = args.model.build()?;
    let report = compare_schemes(&source, &channel, &args.points()).map_err(CliError::invalid)?;
    let rows: Vec<ThresholdRow> = report
        .rows
        .iter()
        .map(|r| ThresholdRow {
            alpha1: r.alpha1,
            threshold: r.threshold,
            p_over_n1: report.p_over_n1,
            predicted: r.prediction,
            observed: r.hybrid_vs_a,
            agree: r.agrees,
        })
        .collect();
    let text = match args.out.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_table(
            THRESHOLD_CSV_HEADER,
            rows.iter().map(|r| {
                format!(
                    "{},{},{},{},{},{}",
                    fmt_f64(r.alpha1),
                    r.threshold.map(fmt_f64).unwrap_or_else(|| "inf".into()),
                    fmt_f64(r.p_over_n1),
                    prediction_label(r.predicted),
                    verdict_label(r.observed),
                    r.agree
                )
            }),
        ),
        Format::Json => to_json(&ThresholdDoc {
            version: SCHEMA_VERSION,
            command: "threshold".into(),
            source,
            channel,
            rows: rows.clone(),
        }),
    };
    emit(&args.out, &text, out)?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.agree)
        .map(|r| fmt_f64(r.alpha1))
        .collect();
    if !bad.is_empty() {
        return Err(CliError::Consistency(format!(
            "threshold prediction disagrees with the closed forms at alpha1 = {}",
            bad.join(", ")
        )));
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (source, channel) = args.model.build()?;
    let split = split_of(args.alpha1)?;
    let config = SimConfig {
        blocklength: args.blocklength,
        trials: args.trials,
        seed: args.seed,
        mode: match args.mode {
            ModeArg::Hybrid => SimMode::Hybrid,
            ModeArg::Uncoded => SimMode::Uncoded,
        },
        lattice_mode: match args.lattice {
            LatticeArg::Ideal => LatticeMode::Ideal,
            LatticeArg::Physical => LatticeMode::Physical,
        },
        inflation: args.inflation,
    };
    config.validate().map_err(CliError::invalid)?;

    let run = || simulate::run(&source, &channel, split, &config);
    let result = if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build()
            .map_err(CliError::invalid)?
            .install(run)
    } else {
        run()
    }
    .map_err(CliError::invalid)?;

    let formula_check = result.is_formula_check();
    let status = if result.consistent(CONSISTENCY_SIGMAS) {
        Status::Pass
    } else {
        Status::Fail
    };
    let doc = SimulateDoc {
        version: SCHEMA_VERSION,
        command: "simulate".into(),
        source,
        channel,
        alpha1: split.alpha1(),
        config,
        result,
        consistency_sigmas: CONSISTENCY_SIGMAS,
        formula_check,
        status,
    };
    let text = match args.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&doc),
        Format::Csv => csv_table("field,value", simulate_fields(&doc)),
    };
    emit(&args.out, &text, out)?;
    if formula_check && status == Status::Fail {
        let r = &doc.result;
        return Err(CliError::Consistency(format!(
            "empirical (d1, d2) = ({}, {}) outside {CONSISTENCY_SIGMAS} standard errors of ({}, {})",
            r.empirical_d1.mean, r.empirical_d2.mean, r.analytic.d1, r.analytic.d2
        )));
    }
    Ok(())
}

fn simulate_fields(doc: &SimulateDoc) -> Vec<String> {
    let r = &doc.result;
    let mut rows = vec![
        format!(
            "mode,{}",
            if r.mode == SimMode::Hybrid {
                "hybrid"
            } else {
                "uncoded"
            }
        ),
        format!(
            "lattice,{}",
            if r.lattice_mode == LatticeMode::Ideal {
                "ideal"
            } else {
                "physical"
            }
        ),
        format!("inflation,{}", fmt_f64(r.inflation)),
        format!("samples,{}", r.samples),
        format!("seed,{}", r.seed),
    ];
    let mut est = |name: &str, e: Option<simulate::Estimate>| {
        if let Some(e) = e {
            rows.push(format!("{name},{}", fmt_f64(e.mean)));
            rows.push(format!("{name}_std_error,{}", fmt_f64(e.std_error)));
        }
    };
    est("empirical_d1", Some(r.empirical_d1));
    est("empirical_d2", Some(r.empirical_d2));
    est("empirical_power", Some(r.empirical_power));
    est("w_variance", r.w_variance);
    est("w12_variance", r.w12_variance);
    est("w_cross_correlation", r.w_cross_correlation);
    est("x1_s2_cross", r.x1_s2_cross);
    rows.push(format!("overload_rate,{}", fmt_f64(r.overload_rate)));
    rows.push(format!("analytic_d1,{}", fmt_f64(r.analytic.d1)));
    rows.push(format!("analytic_d2,{}", fmt_f64(r.analytic.d2)));
    rows.push(format!(
        "status,{}",
        if doc.status == Status::Pass {
            "PASS"
        } else {
            "FAIL"
        }
    ));
    rows
}
