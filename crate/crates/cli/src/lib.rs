//! The `icsq` command line.
//!
//! Reports go to stdout and errors to stderr. Exit codes: 0 success,
//! 1 error diagnostics or a failed analysis, 2 unreadable or unparsable
//! input, 3 invalid flags.

pub mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use icsq_core::bell::{self, AngleSettings, CorrelationTable, LhvStrategy};
use icsq_core::check::{self, Model, QueryError};
use icsq_core::ks;
use icsq_core::lang::{self, Scenario};
use icsq_core::quantum::repeatability_check;
use icsq_core::scenarios;
use serde::Serialize;

pub use render::{render_diagnostics, render_parse_errors, Format, Source};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "icsq",
    version,
    about = "Check configuration-relative outcome claims and run the supporting quantum analyses"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// ANSI color in text reports (0 or 1).
    #[arg(long, global = true, env = "ICSQ_COLOR", value_name = "0|1", action = clap::ArgAction::Set, value_parser = parse_switch, default_value = "0")]
    pub color: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and type-check a scenario file.
    Check { file: PathBuf },
    /// Born probabilities of a configuration's outcomes on a structure.
    Prob {
        file: PathBuf,
        #[arg(long)]
        structure: String,
        #[arg(long)]
        config: String,
    },
    /// Singlet correlations, CHSH value, local bound and joint-distribution existence.
    Bell {
        /// Four angles a,a',b,b' (radians unless --degrees).
        #[arg(long, allow_hyphen_values = true, value_parser = parse_angles)]
        angles: Angles,
        #[arg(long)]
        degrees: bool,
    },
    /// Kochen-Specker colorability of a bundled instance or an instance file.
    Ks {
        /// `cabello-18`, `peres-33`, or a path.
        #[arg(long)]
        instance: String,
    },
    /// Sample a measurement repeatedly and compare frequencies with the Born rule.
    Repeat {
        file: PathBuf,
        #[arg(long)]
        structure: String,
        #[arg(long)]
        config: String,
        /// Number of draws.
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Largest allowed |frequency - probability|.
        #[arg(long, default_value_t = 0.01, value_parser = parse_tolerance)]
        tol: f64,
    },
    /// List the bundled case studies, optionally writing them to a directory.
    Examples {
        #[arg(long, value_name = "DIR")]
        write: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles(pub [f64; 4]);

fn parse_angles(s: &str) -> Result<Angles, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, ap, b, bp] = parts[..] else {
        return Err(format!("expected four comma-separated angles, got {}", parts.len()));
    };
    let mut out = [0.0; 4];
    for (slot, text) in out.iter_mut().zip([a, ap, b, bp]) {
        let v: f64 = text.parse().map_err(|_| format!("`{text}` is not a number"))?;
        if !v.is_finite() {
            return Err(format!("`{text}` is not finite"));
        }
        *slot = v;
    }
    Ok(Angles(out))
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("tolerance must be positive".into())
    }
}

fn parse_switch(s: &str) -> Result<bool, String> {
    match s {
        "0" | "" => Ok(false),
        "1" => Ok(true),
        _ => Err(format!("expected 0 or 1, got `{s}`")),
    }
}

/// A command that stopped early.
struct Exit {
    code: i32,
    /// For stderr; empty when the report already went to stdout.
    message: String,
}

impl Exit {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Exit { code, message: message.into() }
    }
}

type Outcome = Result<i32, Exit>;

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let text = e.render().to_string();
            return match e.kind() {
                DisplayHelp | DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            if !e.message.is_empty() {
                let _ = writeln!(err, "icsq: {}", e.message);
            }
            e.code
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let report = match &cli.command {
        Command::Check { file } => return cmd_check(cli, file, out),
        Command::Prob { file, structure, config } => cmd_prob(cli, file, structure, config)?,
        Command::Bell { angles, degrees } => cmd_bell(cli, *angles, *degrees),
        Command::Ks { instance } => cmd_ks(cli, instance)?,
        Command::Repeat { file, structure, config, n, tol } => cmd_repeat(cli, file, structure, config, *n, *tol)?,
        Command::Examples { write } => cmd_examples(cli, write.as_deref())?,
    };
    emit(out, &report.text)?;
    Ok(report.code)
}

struct Report {
    text: String,
    code: i32,
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Exit> {
    out.write_all(text.as_bytes()).map_err(|e| Exit::new(EXIT_INPUT, format!("writing output: {e}")))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report serializes");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

/// Reads and parses a scenario. Syntax errors are the report when `out` is
/// given, and go to stderr as text otherwise.
fn load(cli: &Cli, path: &Path, out: Option<&mut dyn Write>) -> Result<(String, Scenario), Exit> {
    let text = read(path)?;
    match lang::parse(&text) {
        Ok(s) => Ok((text, s)),
        Err(errors) => {
            let shown = path.display().to_string();
            let src = Source { path: &shown, text: &text };
            match out {
                Some(out) => {
                    emit(out, &render_parse_errors(&errors, cli.format, Some(src), cli.color))?;
                    Err(Exit::new(EXIT_INPUT, ""))
                }
                None => {
                    let rendered = render_parse_errors(&errors, Format::Text, Some(src), cli.color);
                    Err(Exit::new(EXIT_INPUT, format!("{shown} does not parse\n{}", rendered.trim_end())))
                }
            }
        }
    }
}

fn cmd_check(cli: &Cli, path: &Path, out: &mut dyn Write) -> Outcome {
    let (text, scenario) = load(cli, path, Some(&mut *out))?;
    let report = check::check(&scenario).map_err(|e| Exit::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let shown = path.display().to_string();
    let mut rendered =
        render_diagnostics(&report.diagnostics, cli.format, Some(Source { path: &shown, text: &text }), cli.color);
    if cli.format == Format::Text {
        let errors = report.diagnostics.iter().filter(|d| d.is_error()).count();
        let warnings = report.diagnostics.len() - errors;
        rendered.push_str(&format!(
            "{shown}: {errors} error(s), {warnings} warning(s); {} of {} statements admissible\n",
            report.admissible_statements.len(),
            scenario.statements.len()
        ));
    }
    emit(out, &rendered)?;
    Ok(if report.has_errors() { EXIT_DIAGNOSTICS } else { EXIT_OK })
}

fn query_error(e: QueryError) -> Exit {
    match e {
        QueryError::UnknownStructure(_) | QueryError::UnknownConfiguration(_) => Exit::new(EXIT_USAGE, e.to_string()),
        _ => Exit::new(EXIT_DIAGNOSTICS, e.to_string()),
    }
}

fn lower(path: &Path, scenario: &Scenario) -> Result<Model, Exit> {
    Model::lower(scenario).map(|(m, _)| m).map_err(|e| Exit::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct OutcomeProbability {
    outcome: String,
    probability: f64,
}

#[derive(Serialize)]
struct ProbReport<'a> {
    structure: &'a str,
    config: &'a str,
    distribution: Vec<OutcomeProbability>,
}

fn cmd_prob(cli: &Cli, path: &Path, structure: &str, config: &str) -> Result<Report, Exit> {
    let (_, scenario) = load(cli, path, None)?;
    let model = lower(path, &scenario)?;
    let dist = model.probabilities(structure, config).map_err(query_error)?;
    let text = match cli.format {
        Format::Json => json(&ProbReport {
            structure,
            config,
            distribution: dist
                .entries()
                .iter()
                .map(|(l, p)| OutcomeProbability { outcome: l.to_string(), probability: *p })
                .collect(),
        }),
        Format::Text => {
            let width = dist.entries().iter().map(|(l, _)| l.to_string().len()).max().unwrap_or(0);
            let mut s = format!("P(outcome | {structure}, {config})\n");
            for (l, p) in dist.entries() {
                s.push_str(&format!("  {:<width$}  {p:.10}\n", l.to_string()));
            }
            s
        }
    };
    Ok(Report { text, code: EXIT_OK })
}

#[derive(Serialize)]
struct AngleReport {
    a: f64,
    a_prime: f64,
    b: f64,
    b_prime: f64,
}

#[derive(Serialize)]
struct CorrelationReport {
    a_b: f64,
    a_b_prime: f64,
    a_prime_b: f64,
    a_prime_b_prime: f64,
}

#[derive(Serialize)]
struct StrategyReport {
    a: i8,
    a_prime: i8,
    b: i8,
    b_prime: i8,
}

impl From<LhvStrategy> for StrategyReport {
    fn from(s: LhvStrategy) -> Self {
        StrategyReport { a: s.alice[0], a_prime: s.alice[1], b: s.bob[0], b_prime: s.bob[1] }
    }
}

#[derive(Serialize)]
struct WeightedStrategy {
    strategy: StrategyReport,
    weight: f64,
}

#[derive(Serialize)]
struct BellReport {
    angles: AngleReport,
    #[serde(rename = "E")]
    e: CorrelationReport,
    /// |S|; the signed combination is `S_signed`.
    #[serde(rename = "S")]
    s: f64,
    #[serde(rename = "S_signed")]
    s_signed: f64,
    tsirelson_bound: f64,
    lhv_max: f64,
    lhv_witness: StrategyReport,
    joint_distribution_exists: bool,
    joint_distribution: Option<Vec<WeightedStrategy>>,
}

fn cmd_bell(cli: &Cli, angles: Angles, degrees: bool) -> Report {
    let [a, ap, b, bp] = if degrees { angles.0.map(f64::to_radians) } else { angles.0 };
    let settings = AngleSettings::new(a, ap, b, bp);
    let table = CorrelationTable::from_singlet(&settings);
    let e = table.correlations();
    let s_signed = table.chsh();
    let lhv = bell::lhv_max_chsh();
    let joint = bell::joint_distribution_exists(&table);
    let weights = joint.witness.map(|w| {
        w.iter()
            .enumerate()
            .filter(|(_, &x)| x > 1e-12)
            .map(|(k, &x)| WeightedStrategy { strategy: LhvStrategy::from_index(k as u8).into(), weight: x })
            .collect::<Vec<_>>()
    });
    let report = BellReport {
        angles: AngleReport { a, a_prime: ap, b, b_prime: bp },
        e: CorrelationReport { a_b: e[0][0], a_b_prime: e[0][1], a_prime_b: e[1][0], a_prime_b_prime: e[1][1] },
        s: s_signed.abs(),
        s_signed,
        tsirelson_bound: 2.0 * std::f64::consts::SQRT_2,
        lhv_max: lhv.max,
        lhv_witness: lhv.witness.into(),
        joint_distribution_exists: joint.exists,
        joint_distribution: weights,
    };
    let text = match cli.format {
        Format::Json => json(&report),
        Format::Text => {
            let mut s = format!("angles (rad): a = {a:.7}, a' = {ap:.7}, b = {b:.7}, b' = {bp:.7}\n");
            s.push_str(&format!("E(a,b)   = {:+.10}\nE(a,b')  = {:+.10}\n", e[0][0], e[0][1]));
            s.push_str(&format!("E(a',b)  = {:+.10}\nE(a',b') = {:+.10}\n", e[1][0], e[1][1]));
            s.push_str(&format!(
                "S = {:+.10}  (|S| = {:.10}, quantum bound {:.10})\n",
                s_signed,
                s_signed.abs(),
                report.tsirelson_bound
            ));
            let w = &report.lhv_witness;
            s.push_str(&format!(
                "local hidden variables: max |S| = {} (a={:+}, a'={:+}, b={:+}, b'={:+})\n",
                lhv.max, w.a, w.a_prime, w.b, w.b_prime
            ));
            s.push_str(&format!(
                "joint distribution over all four settings: {}\n",
                if joint.exists { "exists" } else { "does not exist" }
            ));
            if let Some(ws) = &report.joint_distribution {
                for ws in ws {
                    let t = &ws.strategy;
                    s.push_str(&format!(
                        "  {:.10}  a={:+} a'={:+} b={:+} b'={:+}\n",
                        ws.weight, t.a, t.a_prime, t.b, t.b_prime
                    ));
                }
            }
            s
        }
    };
    Report { text, code: EXIT_OK }
}

#[derive(Serialize)]
struct KsReport<'a> {
    instance: &'a str,
    dim: usize,
    rays: usize,
    contexts: usize,
    colorable: bool,
    /// Rays assigned 1 by the witness coloring.
    witness: Option<Vec<usize>>,
    nodes_explored: u64,
    parity_obstruction: bool,
}

fn cmd_ks(cli: &Cli, name: &str) -> Result<Report, Exit> {
    let inst = match ks::builtin(name) {
        Some(i) => i,
        None => {
            let path = Path::new(name);
            if !path.exists() {
                return Err(Exit::new(
                    EXIT_USAGE,
                    format!("`{name}` is neither a bundled instance ({}) nor a file", ks::BUILTIN_NAMES.join(", ")),
                ));
            }
            ks::parse_instance(&read(path)?).map_err(|e| Exit::new(EXIT_INPUT, format!("{name}: {e}")))?
        }
    };
    let issues = ks::verify_instance(&inst);
    if !issues.is_empty() {
        let list: Vec<String> = issues.iter().map(|i| format!("  {i}")).collect();
        return Err(Exit::new(EXIT_DIAGNOSTICS, format!("{name} is not a valid instance:\n{}", list.join("\n"))));
    }
    let result = ks::color(&inst);
    let report = KsReport {
        instance: name,
        dim: inst.dim,
        rays: inst.rays.len(),
        contexts: inst.contexts.len(),
        colorable: result.colorable,
        witness: result.witness.as_ref().map(|c| c.ones().collect()),
        nodes_explored: result.nodes_explored,
        parity_obstruction: ks::parity_obstruction(&inst),
    };
    let text = match cli.format {
        Format::Json => json(&report),
        Format::Text => {
            let mut s = format!(
                "instance: {name} (dim {}, {} rays, {} contexts)\ncolorable: {}\n",
                report.dim, report.rays, report.contexts, report.colorable
            );
            if let Some(w) = &report.witness {
                let rays: Vec<String> = w.iter().map(usize::to_string).collect();
                s.push_str(&format!("witness (rays colored 1): {}\n", rays.join(" ")));
            }
            s.push_str(&format!("nodes explored: {}\n", report.nodes_explored));
            if report.parity_obstruction {
                s.push_str(
                    "parity obstruction: every ray lies in an even number of contexts, and the context count is odd\n",
                );
            }
            s
        }
    };
    Ok(Report { text, code: EXIT_OK })
}

#[derive(Serialize)]
struct OutcomeSample {
    outcome: String,
    count: u64,
    frequency: f64,
    probability: f64,
}

#[derive(Serialize)]
struct RepeatReport<'a> {
    structure: &'a str,
    config: &'a str,
    n: u64,
    seed: u64,
    tol: f64,
    outcomes: Vec<OutcomeSample>,
    max_abs_deviation: f64,
    pass: bool,
}

fn cmd_repeat(cli: &Cli, path: &Path, structure: &str, config: &str, n: u64, tol: f64) -> Result<Report, Exit> {
    let (_, scenario) = load(cli, path, None)?;
    let model = lower(path, &scenario)?;
    let (st, cfg) = model.structure_for(structure, config).map_err(query_error)?;
    let r = repeatability_check(&st, cfg, cli.seed, n, tol).map_err(|e| Exit::new(EXIT_DIAGNOSTICS, e.to_string()))?;
    let outcomes: Vec<OutcomeSample> = r
        .probabilities
        .entries()
        .iter()
        .zip(r.counts.entries())
        .map(|((l, p), (_, c))| OutcomeSample {
            outcome: l.to_string(),
            count: *c,
            frequency: *c as f64 / n as f64,
            probability: *p,
        })
        .collect();
    let report = RepeatReport {
        structure,
        config,
        n,
        seed: cli.seed,
        tol,
        outcomes,
        max_abs_deviation: r.max_abs_deviation,
        pass: r.pass,
    };
    let text = match cli.format {
        Format::Json => json(&report),
        Format::Text => {
            let width = report.outcomes.iter().map(|o| o.outcome.len()).max().unwrap_or(0).max(7);
            let mut s = format!("{structure} measured with {config}: n = {n}, seed = {}, tol = {tol}\n", cli.seed);
            s.push_str(&format!(
                "  {:<width$}  {:>10}  {:>10}  {:>12}\n",
                "outcome", "count", "frequency", "probability"
            ));
            for o in &report.outcomes {
                s.push_str(&format!(
                    "  {:<width$}  {:>10}  {:>10.6}  {:>12.6}\n",
                    o.outcome, o.count, o.frequency, o.probability
                ));
            }
            s.push_str(&format!(
                "max deviation {:.6}: {}\n",
                report.max_abs_deviation,
                if report.pass { "pass" } else { "FAIL" }
            ));
            s
        }
    };
    Ok(Report { text, code: if r.pass { EXIT_OK } else { EXIT_DIAGNOSTICS } })
}

#[derive(Serialize)]
struct ExampleEntry {
    name: &'static str,
    file: &'static str,
    statements: usize,
}

#[derive(Serialize)]
struct ExamplesReport {
    examples: Vec<ExampleEntry>,
    written: Vec<String>,
}

fn cmd_examples(cli: &Cli, dir: Option<&Path>) -> Result<Report, Exit> {
    let cases = scenarios::all();
    let mut written = Vec::new();
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| Exit::new(EXIT_INPUT, format!("{}: {e}", dir.display())))?;
        for c in &cases {
            let path = dir.join(c.file_name);
            fs::write(&path, c.source).map_err(|e| Exit::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
            written.push(path.display().to_string());
        }
    }
    let report = ExamplesReport {
        examples: cases
            .iter()
            .map(|c| ExampleEntry { name: c.name, file: c.file_name, statements: c.scenario.statements.len() })
            .collect(),
        written,
    };
    let text = match cli.format {
        Format::Json => json(&report),
        Format::Text => {
            let mut s = String::new();
            for e in &report.examples {
                s.push_str(&format!("{:<14} {:<20} {} statements\n", e.name, e.file, e.statements));
            }
            for w in &report.written {
                s.push_str(&format!("wrote {w}\n"));
            }
            s
        }
    };
    Ok(Report { text, code: EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_parse() {
        assert_eq!(parse_angles("0, 1.5,-2,3e-1").unwrap(), Angles([0.0, 1.5, -2.0, 0.3]));
        assert!(parse_angles("0,1,2").is_err());
        assert!(parse_angles("0,1,2,x").is_err());
        assert!(parse_angles("0,1,2,inf").is_err());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(parse_tolerance("0").is_err());
        assert!(parse_tolerance("-0.1").is_err());
        assert_eq!(parse_tolerance("0.05"), Ok(0.05));
    }

    #[test]
    fn switch_values() {
        assert_eq!(parse_switch("1"), Ok(true));
        assert_eq!(parse_switch("0"), Ok(false));
        assert!(parse_switch("yes").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
