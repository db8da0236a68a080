//! Command-line front end: `mine`, `evaluate` and `generate`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, Schema};
use crate::encoding::Scheme;
use crate::fitness::{parse_objectives, Objective};
use crate::miner::{generate_planted, mine_with_trace, MiningConfig, MoMode, Preset};
use crate::optimizers::{AcoRParams, Algorithm, BatParams, OptimizerConfig, PsoParams};
use crate::rule::{ConditionRecord, InterestingnessVariant, Metrics, RuleRecord};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data(msg: impl std::fmt::Display) -> CliError {
    CliError::Data(msg.to_string())
}

fn runtime(msg: impl std::fmt::Display) -> CliError {
    CliError::Runtime(msg.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "narm", version, about = "Numerical association rule mining without discretization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine rules from a CSV dataset.
    Mine(MineArgs),
    /// Recompute the measures of existing rules on a dataset.
    Evaluate(EvaluateArgs),
    /// Write a synthetic dataset with a planted rule.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Pso,
    Bat,
    Acor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EncodingArg {
    Triplet,
    Aeav,
    Gaussian,
    Cutpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MoArg {
    Weighted,
    Pareto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InterestingnessArg {
    Normalized,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    Rpsoa,
    Mopar,
    Parcd,
    Acor,
    MobArm,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Pso => Algorithm::Pso(PsoParams::default()),
            AlgorithmArg::Bat => Algorithm::Bat(BatParams::default()),
            AlgorithmArg::Acor => Algorithm::AcoR(AcoRParams::default()),
        }
    }
}

impl From<EncodingArg> for Scheme {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Triplet => Scheme::Triplet,
            EncodingArg::Aeav => Scheme::AeAv,
            EncodingArg::Gaussian => Scheme::Gaussian,
            EncodingArg::Cutpoint => Scheme::CutPoint,
        }
    }
}

impl From<InterestingnessArg> for InterestingnessVariant {
    fn from(i: InterestingnessArg) -> Self {
        match i {
            InterestingnessArg::Normalized => InterestingnessVariant::Normalized,
            InterestingnessArg::Literal => InterestingnessVariant::Literal,
        }
    }
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Rpsoa => Preset::Rpsoa,
            PresetArg::Mopar => Preset::Mopar,
            PresetArg::Parcd => Preset::Parcd,
            PresetArg::Acor => Preset::AcoR,
            PresetArg::MobArm => Preset::MobArm,
        }
    }
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Dataset CSV file.
    #[arg(long)]
    input: PathBuf,
    /// The CSV has no header row; columns are named col0, col1, ...
    #[arg(long)]
    no_header: bool,
    /// Schema file (`name,kind` per line) overriding inferred column kinds.
    #[arg(long)]
    schema: Option<PathBuf>,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset, CliError> {
        let schema = match &self.schema {
            Some(p) => Some(Schema::from_path(p).map_err(|e| data(format!("{}: {e}", p.display())))?),
            None => None,
        };
        let file = File::open(&self.input).map_err(|e| data(format!("{}: {e}", self.input.display())))?;
        Dataset::read_csv(file, !self.no_header, schema.as_ref())
            .map_err(|e| data(format!("{}: {e}", self.input.display())))
    }

    fn provenance(&self, out: &mut Vec<String>) {
        out.push(format!("--input {}", self.input.display()));
        if self.no_header {
            out.push("--no-header".into());
        }
        if let Some(s) = &self.schema {
            out.push(format!("--schema {}", s.display()));
        }
    }
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct MineArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Flat key=value file whose entries act as flags; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fill algorithm, encoding, objectives, mode and weights from a
    /// published configuration.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    #[arg(long, value_enum)]
    algorithm: Option<AlgorithmArg>,
    #[arg(long, value_enum)]
    encoding: Option<EncodingArg>,
    /// Comma-separated objectives, each a measure or a weighted sum such as
    /// `0.5*support+0.5*confidence`.
    #[arg(long)]
    objectives: Option<String>,
    #[arg(long, value_enum)]
    mo: Option<MoArg>,
    /// Comma-separated weights, one per objective (weighted mode only).
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    pop: usize,
    #[arg(long, default_value_t = 10_000)]
    evals: usize,
    #[arg(long, default_value_t = 0.0)]
    min_supp: f64,
    #[arg(long, default_value_t = 0.0)]
    min_conf: f64,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    #[arg(long, value_enum, default_value = "normalized")]
    interestingness: InterestingnessArg,
    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 100)]
    archive_capacity: usize,
    /// Also write the per-generation convergence trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rules file as written by `mine` (JSON or CSV).
    #[arg(long)]
    rules: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: TableFormat,
    #[arg(long, value_enum, default_value = "normalized")]
    interestingness: InterestingnessArg,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct GenerateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    attrs: usize,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    freq: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Dataset CSV path; the ground truth goes to `<stem>.truth.json`.
    #[arg(long)]
    output: PathBuf,
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    match execute(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(args: Vec<OsString>) -> Result<(), CliError> {
    let args = splice_config(args)?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprint!("{e}");
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            return Err(usage(line.trim_start_matches("error: ")));
        }
    };
    match cli.command {
        Command::Mine(a) => cmd_mine(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

/// Expands `--config <file>` into flags inserted right after the subcommand,
/// so flags given on the command line override them.
fn splice_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let Some(s) = a.to_str() else { continue };
        if s == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(args) };
    if args.len() < 2 {
        return Ok(args);
    }
    let text = fs::read_to_string(&path)
        .map_err(|e| usage(format!("config file {}: {e}", path.display())))?;
    let flags = config_flags(&text).map_err(|e| usage(format!("config file {}: {e}", path.display())))?;
    let mut out = args[..2].to_vec();
    out.extend(flags.into_iter().map(OsString::from));
    out.extend_from_slice(&args[2..]);
    Ok(out)
}

/// Turns `key=value` lines into `--key value` flags. Blank lines and lines
/// starting with `#` are skipped; boolean flags take `true` or `false`.
pub fn config_flags(text: &str) -> Result<Vec<String>, String> {
    let mut flags = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "config" {
            return Err(format!("line {}: nested config files are not supported", n + 1));
        }
        match (key, value) {
            ("no-header", "true") => flags.push("--no-header".to_string()),
            ("no-header", "false") => {}
            ("no-header", _) => return Err(format!("line {}: no-header takes true or false", n + 1)),
            _ => {
                flags.push(format!("--{key}"));
                flags.push(value.to_string());
            }
        }
    }
    Ok(flags)
}

fn parse_weights(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("invalid weight `{}`", w.trim())))
        })
        .collect()
}

fn mo_name(mode: MoMode) -> &'static str {
    match mode {
        MoMode::WeightedSum => "weighted",
        MoMode::Pareto => "pareto",
    }
}

fn arg_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn list(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn objectives_text(objectives: &[Objective]) -> String {
    objectives.iter().map(Objective::to_string).collect::<Vec<_>>().join(",")
}

fn resolve_config(a: &MineArgs) -> Result<MiningConfig, CliError> {
    let preset = a.preset.map(|p| Preset::from(p).settings());
    let algorithm = match (a.algorithm, &preset) {
        (Some(alg), _) => alg.into(),
        (None, Some(p)) => p.algorithm.clone(),
        (None, None) => return Err(usage("--algorithm is required (or use --preset)")),
    };
    let scheme = match (a.encoding, &preset) {
        (Some(e), _) => e.into(),
        (None, Some(p)) => p.scheme,
        (None, None) => return Err(usage("--encoding is required (or use --preset)")),
    };
    let objectives = match (&a.objectives, &preset) {
        (Some(text), _) => parse_objectives(text).map_err(|e| usage(e.to_string()))?,
        (None, Some(p)) => p.objectives.clone(),
        (None, None) => return Err(usage("--objectives is required (or use --preset)")),
    };
    let mode = match (a.mo, &preset) {
        (Some(MoArg::Weighted), _) => MoMode::WeightedSum,
        (Some(MoArg::Pareto), _) => MoMode::Pareto,
        (None, Some(p)) => p.mode,
        (None, None) => return Err(usage("--mo is required (or use --preset)")),
    };
    let weights = match &a.weights {
        Some(text) => Some(parse_weights(text)?),
        // preset weights only apply when the preset's objectives are in use
        None if a.objectives.is_none() => preset.as_ref().and_then(|p| p.weights.clone()),
        None => None,
    };
    let weights = match (mode, weights) {
        (MoMode::WeightedSum, None) => return Err(usage("--mo weighted requires --weights")),
        (MoMode::Pareto, Some(_)) if a.weights.is_some() => {
            return Err(usage("--weights is only valid with --mo weighted"))
        }
        (MoMode::Pareto, _) => None,
        (MoMode::WeightedSum, w) => w,
    };
    let config = MiningConfig {
        scheme,
        objectives,
        mode,
        weights,
        optimizer: OptimizerConfig::new(algorithm, a.pop, a.evals, a.seed),
        min_support: a.min_supp,
        min_confidence: a.min_conf,
        interestingness: a.interestingness.into(),
        archive_capacity: a.archive_capacity,
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn provenance_line(a: &MineArgs, config: &MiningConfig, fingerprint: &str) -> String {
    let mut parts = vec!["narm mine".to_string()];
    a.data.provenance(&mut parts);
    parts.push(format!("--algorithm {}", config.optimizer.algorithm.name()));
    let encoding = match config.scheme {
        Scheme::Triplet => EncodingArg::Triplet,
        Scheme::AeAv => EncodingArg::Aeav,
        Scheme::Gaussian => EncodingArg::Gaussian,
        Scheme::CutPoint => EncodingArg::Cutpoint,
    };
    parts.push(format!("--encoding {}", arg_name(encoding)));
    parts.push(format!("--objectives {}", objectives_text(&config.objectives)));
    parts.push(format!("--mo {}", mo_name(config.mode)));
    if let Some(w) = &config.weights {
        parts.push(format!("--weights {}", list(w)));
    }
    parts.push(format!("--seed {}", config.optimizer.seed));
    parts.push(format!("--pop {}", config.optimizer.population_size));
    parts.push(format!("--evals {}", config.optimizer.max_evaluations));
    parts.push(format!("--min-supp {}", config.min_support));
    parts.push(format!("--min-conf {}", config.min_confidence));
    parts.push(format!("--interestingness {}", arg_name(a.interestingness)));
    parts.push(format!("--archive-capacity {}", config.archive_capacity));
    parts.push(format!("--format {}", arg_name(a.format)));
    parts.push(format!("--output {}", a.output.display()));
    format!("{} fingerprint={fingerprint}", parts.join(" "))
}

fn write_file<F>(path: &Path, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), String>,
{
    let file = File::create(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    write(&mut w).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    w.flush().map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn cmd_mine(a: MineArgs) -> Result<(), CliError> {
    let config = resolve_config(&a)?;
    let threads = match a.threads {
        Some(0) => return Err(usage("--threads must be at least 1")),
        Some(n) => n,
        None => 0,
    };
    let dataset = a.data.load()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| runtime(format!("thread pool: {e}")))?;

    let start = Instant::now();
    let run = pool.install(|| mine_with_trace(&dataset, &config)).map_err(|e| {
        if e.is_config() {
            usage(e.to_string())
        } else {
            runtime(e)
        }
    })?;
    let elapsed = start.elapsed();

    let set = &run.rules;
    write_file(&a.output, |w| match a.format {
        OutputFormat::Json => {
            set.write_json(&dataset, &mut *w).map_err(|e| e.to_string())?;
            writeln!(w).map_err(|e| e.to_string())
        }
        OutputFormat::Csv => set.write_csv(&dataset, &mut *w).map_err(|e| e.to_string()),
    })?;
    if let Some(path) = &a.trace {
        write_file(path, |w| run.trace.write_csv(&mut *w).map_err(|e| e.to_string()))?;
    }

    println!("rules: {}", set.rules.len());
    match set.rules.first() {
        Some(best) => {
            println!("best: {} | {}", best.rule.display(&dataset), best.metrics);
        }
        None => println!("best: none"),
    }
    println!(
        "runtime: {:.3}s ({} evaluations, {} generations)",
        elapsed.as_secs_f64(),
        run.trace.evaluations_used,
        run.trace.generations()
    );
    println!("provenance: {}", provenance_line(&a, &config, &set.provenance.dataset_fingerprint));
    Ok(())
}

#[derive(Deserialize)]
struct RulesFile {
    rules: Vec<RuleRecord>,
}

/// Reads rules written by `mine`: a JSON object with a `rules` array, a bare
/// JSON array, or the CSV export.
fn read_rules(path: &Path) -> Result<Vec<RuleRecord>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let trimmed = text.trim_start();
    let json_err = |e: serde_path_to_error::Error<serde_json::Error>| {
        let inner = e.inner();
        data(format!(
            "{}: malformed rules file at `{}` (line {}, column {}): {inner}",
            path.display(),
            e.path(),
            inner.line(),
            inner.column()
        ))
    };
    if trimmed.starts_with('{') {
        let de = &mut serde_json::Deserializer::from_str(&text);
        let file: RulesFile = serde_path_to_error::deserialize(de).map_err(json_err)?;
        Ok(file.rules)
    } else if trimmed.starts_with('[') {
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(json_err)
    } else {
        read_rules_csv(&text).map_err(|e| data(format!("{}: malformed rules file: {e}", path.display())))
    }
}

fn read_rules_csv(text: &str) -> Result<Vec<RuleRecord>, String> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format!("missing column `{name}`"))
    };
    let (ant, cons) = (column("antecedent")?, column("consequent")?);
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let line = i + 2;
        let side = |j: usize| {
            parse_side(row.get(j).unwrap_or("")).map_err(|e| format!("line {line}: {e}"))
        };
        out.push(RuleRecord { antecedent: side(ant)?, consequent: side(cons)?, metrics: None });
    }
    Ok(out)
}

/// Parses the display form of one rule side, e.g. `a∈[1,3], c=x`.
fn parse_side(text: &str) -> Result<Vec<ConditionRecord>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(", ")
        .map(|cond| {
            if let Some((name, rest)) = cond.split_once("∈[") {
                let (lb, ub) = rest
                    .strip_suffix(']')
                    .and_then(|r| r.split_once(','))
                    .ok_or_else(|| format!("malformed interval `{cond}`"))?;
                let num = |s: &str| s.parse::<f64>().map_err(|_| format!("invalid bound in `{cond}`"));
                Ok(ConditionRecord::Interval { attribute: name.to_string(), lb: num(lb)?, ub: num(ub)? })
            } else if let Some((name, value)) = cond.split_once('=') {
                Ok(ConditionRecord::Category { attribute: name.to_string(), value: value.to_string() })
            } else {
                Err(format!("malformed condition `{cond}`"))
            }
        })
        .collect()
}

#[derive(Serialize)]
struct EvaluatedRule {
    rule: String,
    #[serde(flatten)]
    record: RuleRecord,
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<(), CliError> {
    let dataset = a.data.load()?;
    let records = read_rules(&a.rules)?;
    let variant = a.interestingness.into();
    let mut evaluated = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let rule = record
            .to_rule(&dataset)
            .map_err(|e| data(format!("{}: rule {i}: {e}", a.rules.display())))?;
        let metrics = Metrics::evaluate(&rule, &dataset, variant)
            .map_err(|e| data(format!("{}: rule {i}: {e}", a.rules.display())))?;
        evaluated.push((rule, metrics));
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match a.format {
        TableFormat::Table => {
            let mut r = writeln!(
                out,
                "{:>5} {:>10} {:>10} {:>10} {:>10} {:>10}  rule",
                "#", "support", "confidence", "comprehens", "interest", "amplitude"
            );
            for (i, (rule, m)) in evaluated.iter().enumerate() {
                r = r.and_then(|_| {
                    writeln!(
                        out,
                        "{i:>5} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}  {}",
                        m.support,
                        m.confidence,
                        m.comprehensibility,
                        m.interestingness,
                        m.amplitude,
                        rule.display(&dataset)
                    )
                });
            }
            r
        }
        TableFormat::Json => {
            let rows: Vec<EvaluatedRule> = evaluated
                .iter()
                .map(|(rule, m)| EvaluatedRule {
                    rule: rule.display(&dataset).to_string(),
                    record: RuleRecord::from_rule(rule, &dataset, Some(*m)),
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &rows)
                .map_err(std::io::Error::other)
                .and_then(|_| writeln!(out))
        }
    };
    result.map_err(runtime)
}

#[derive(Serialize)]
struct GroundTruth {
    attributes: usize,
    rows: usize,
    planted_frequency: f64,
    seed: u64,
    rule: RuleRecord,
}

fn cmd_generate(a: GenerateArgs) -> Result<(), CliError> {
    let (dataset, rule) =
        generate_planted(a.attrs, a.rows, a.freq, a.seed).map_err(|e| usage(e.to_string()))?;
    let metrics = Metrics::evaluate(&rule, &dataset, InterestingnessVariant::Normalized)
        .map_err(runtime)?;
    write_file(&a.output, |w| dataset.write_csv(&mut *w).map_err(|e| e.to_string()))?;
    let sidecar = a.output.with_extension("truth.json");
    let truth = GroundTruth {
        attributes: a.attrs,
        rows: a.rows,
        planted_frequency: a.freq,
        seed: a.seed,
        rule: RuleRecord::from_rule(&rule, &dataset, Some(metrics)),
    };
    write_file(&sidecar, |w| {
        serde_json::to_writer_pretty(&mut *w, &truth).map_err(|e| e.to_string())?;
        writeln!(w).map_err(|e| e.to_string())
    })?;
    println!(
        "wrote {} ({} rows, {} attributes) and {}",
        a.output.display(),
        dataset.len(),
        dataset.num_attributes(),
        sidecar.display()
    );
    println!("planted: {} | {metrics}", rule.display(&dataset));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines_become_flags() {
        let flags = config_flags("# comment\nseed = 5\n\nno-header=true\nmo=pareto\n").unwrap();
        assert_eq!(flags, ["--seed", "5", "--no-header", "--mo", "pareto"]);
        assert!(config_flags("seed").is_err());
        assert!(config_flags("config=x").is_err());
        assert!(config_flags("no-header=maybe").is_err());
    }

    #[test]
    fn sides_parse_back() {
        let parsed = parse_side("a∈[1,3.5], c=x=y").unwrap();
        assert_eq!(
            parsed,
            vec![
                ConditionRecord::Interval { attribute: "a".into(), lb: 1.0, ub: 3.5 },
                ConditionRecord::Category { attribute: "c".into(), value: "x=y".into() },
            ]
        );
        assert!(parse_side("a∈[1;3]").is_err());
        assert!(parse_side("nothing").is_err());
        assert!(parse_side("").unwrap().is_empty());
    }

    #[test]
    fn weighted_without_weights_is_usage_error() {
        let code = run(["narm", "mine", "--input", "x.csv", "--algorithm", "pso", "--encoding", "triplet",
            "--objectives", "support", "--mo", "weighted", "--output", "o.json"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["narm", "--help"]), 0);
        assert_eq!(run(["narm", "mine", "--help"]), 0);
        assert_eq!(run(["narm", "frobnicate"]), 1);
    }
}
