use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use elgot_iter::algebra::{
    check_derived_algebras, check_elgot_laws, check_loop_splitting, check_search_correspondence, LawSizes,
    PartialAlgebra,
};
use elgot_iter::delay::{self, check_delay_laws, DelayLawConfig};
use elgot_iter::elgot::{check_elgot_monad_axioms, check_sigma_laws};
use elgot_iter::finset::{self, check_finset_suite};
use elgot_iter::lang::{self, check_lang_suite, Program, Store, Trace, TraceStatus};
use elgot_iter::partial::{
    check_collapse_coherence, check_equational_lifting, check_kleene_suite, check_restriction_axioms,
    collapse_finite_counted, Partial,
};
use elgot_iter::{Exec, LawReport, SuiteConfig};

/// Programs in the generated corpus checked by the `lang` suite.
const LANG_CORPUS: usize = 100;

#[derive(Parser)]
#[command(name = "elgot-iter", version, about = "Evaluate while-programs and check iteration laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, global = true, default_value_t = Output::Text)]
    output: Output,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program and print the final store.
    Run {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, value_enum, default_value_t = Backend::Intensional)]
        backend: Backend,
    },
    /// Print the first steps of the intensional machine.
    Trace {
        #[command(flatten)]
        program: ProgramArgs,
    },
    /// Compare the collapsed intensional result with the extensional one.
    Collapse {
        #[command(flatten)]
        program: ProgramArgs,
    },
    /// Run law suites and report failures.
    Laws(LawArgs),
}

#[derive(Args)]
struct ProgramArgs {
    path: PathBuf,
    /// Step budget for the intensional backend.
    #[arg(long, default_value_t = 1000)]
    fuel: u64,
    /// Initial value of a variable, as NAME=VALUE. Others start at zero.
    #[arg(long = "set", value_name = "NAME=VALUE", value_parser = parse_binding)]
    set: Vec<(String, u64)>,
}

#[derive(Args)]
struct LawArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Largest enumerated carrier; some laws go one size further.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=6))]
    max_size: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Omit timing so that repeated runs print identical JSON.
    #[arg(long)]
    deterministic: bool,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Backend {
    Intensional,
    Extensional,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    ElgotAlgebra,
    Restriction,
    Lifting,
    ElgotMonad,
    Kleene,
    Delay,
    Collapse,
    Sigma,
    Finset,
    Lang,
    All,
}

const ALL_SUITES: [Suite; 10] = [
    Suite::ElgotAlgebra,
    Suite::Restriction,
    Suite::Lifting,
    Suite::ElgotMonad,
    Suite::Kleene,
    Suite::Delay,
    Suite::Collapse,
    Suite::Sigma,
    Suite::Finset,
    Suite::Lang,
];

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Program(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Program(_) => ExitCode::from(1),
        }
    }
}

impl From<elgot_iter::Error> for CliError {
    fn from(e: elgot_iter::Error) -> Self {
        CliError::Program(e.to_string())
    }
}

fn parse_binding(s: &str) -> Result<(String, u64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value = value.trim().parse().map_err(|e| format!("bad value `{value}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

/// What a command prints and how it exits.
struct Response {
    text: String,
    json: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { program, backend } => run(program, *backend),
        Command::Trace { program } => trace(program),
        Command::Collapse { program } => collapse(program),
        Command::Laws(args) => laws(args),
    };
    match result {
        Ok(r) => {
            let out = match cli.output {
                Output::Text => r.text,
                Output::Json => r.json,
            };
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = writeln!(stdout, "{out}");
            if r.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(args: &ProgramArgs) -> Result<(Program, Store), CliError> {
    let src = read(&args.path)?;
    let p = lang::parse(&src).map_err(|e| CliError::Program(format!("{}:{e}", args.path.display())))?;
    let bindings: Vec<(&str, u64)> = args.set.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    let s0 = Store::with_values(&p, &bindings).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((p, s0))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

#[derive(Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Converged,
    Diverges,
    Unknown,
}

#[derive(Serialize)]
struct RunJson {
    backend: Backend,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    store: Option<Store>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<u64>,
}

fn run(args: &ProgramArgs, backend: Backend) -> Result<Response, CliError> {
    let (p, s0) = load(args)?;
    let (text, json) = match backend {
        Backend::Extensional => match lang::eval_extensional(&p, &s0)? {
            Partial::Value(s) => (s.to_string(), RunJson { backend, status: Status::Converged, store: Some(s), steps: None }),
            Partial::Bottom => ("DIVERGES".to_string(), RunJson { backend, status: Status::Diverges, store: None, steps: None }),
        },
        Backend::Intensional => match delay::run_for(&lang::eval_intensional(&p, &s0)?, args.fuel).converged() {
            Some((s, n)) => (
                s.to_string(),
                RunJson { backend, status: Status::Converged, store: Some(s.clone()), steps: Some(n) },
            ),
            None => (
                format!("UNKNOWN after {} steps", args.fuel),
                RunJson { backend, status: Status::Unknown, store: None, steps: Some(args.fuel) },
            ),
        },
    };
    Ok(Response { text, json: to_json(&json), ok: true })
}

fn trace(args: &ProgramArgs) -> Result<Response, CliError> {
    let (p, s0) = load(args)?;
    let t: Trace = lang::trace(&p, &s0, args.fuel)?;
    let mut text = String::new();
    for e in &t.entries {
        text.push_str(&format!("{:>5}  {:<20} {}\n", e.step, e.location.to_string(), e.store));
    }
    text.push_str(&match &t.status {
        TraceStatus::Converged(s) => format!("converged after {} steps: {s}", t.entries.len()),
        TraceStatus::Diverged => "DIVERGES".to_string(),
        TraceStatus::FuelExhausted => format!("UNKNOWN after {} steps", t.entries.len()),
    });
    Ok(Response { text, json: to_json(&t), ok: true })
}

#[derive(Serialize)]
struct Side {
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    store: Option<Store>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<u64>,
}

impl Side {
    fn new(r: Partial<Store>, steps: Option<u64>) -> Side {
        match r {
            Partial::Value(s) => Side { status: Status::Converged, store: Some(s), steps },
            Partial::Bottom => Side { status: Status::Diverges, store: None, steps: None },
        }
    }

    fn render(&self) -> String {
        match (&self.store, self.steps) {
            (Some(s), Some(n)) => format!("{s} ({n} steps)"),
            (Some(s), None) => s.to_string(),
            (None, _) => "DIVERGES".to_string(),
        }
    }
}

#[derive(Serialize)]
struct CollapseJson {
    agree: bool,
    intensional: Side,
    extensional: Side,
}

fn collapse(args: &ProgramArgs) -> Result<Response, CliError> {
    let (p, s0) = load(args)?;
    let (int, steps) = collapse_finite_counted(&lang::machine(&p, &s0)?)?;
    let ext = lang::eval_extensional(&p, &s0)?;
    let agree = int == ext;
    let j = CollapseJson {
        agree,
        intensional: Side::new(int, Some(steps)),
        extensional: Side::new(ext, None),
    };
    let text = format!(
        "{}\nintensional: {}\nextensional: {}",
        if agree { "AGREE" } else { "DISAGREE" },
        j.intensional.render(),
        j.extensional.render()
    );
    Ok(Response { text, json: to_json(&j), ok: agree })
}

fn run_suite(suite: Suite, cfg: &SuiteConfig) -> LawReport {
    let n = cfg.max_size;
    match suite {
        Suite::ElgotAlgebra => {
            let sizes = LawSizes { max_states: n + 1, max_carrier: n };
            let mut r = LawReport::new("elgot-algebra");
            r.merge(check_elgot_laws(&PartialAlgebra::range(1), sizes, cfg.exec));
            r.merge(check_derived_algebras(LawSizes { max_states: n, max_carrier: n }, cfg.exec));
            r.merge(check_loop_splitting(n, cfg.exec));
            r.merge(check_search_correspondence(sizes, cfg.exec));
            r.finish()
        }
        Suite::Restriction => check_restriction_axioms(cfg),
        Suite::Lifting => check_equational_lifting(cfg),
        Suite::ElgotMonad => check_elgot_monad_axioms(cfg),
        Suite::Kleene => check_kleene_suite(cfg),
        Suite::Delay => check_delay_laws(&DelayLawConfig { seed: cfg.seed, exec: cfg.exec, ..Default::default() }),
        Suite::Collapse => check_collapse_coherence(cfg),
        Suite::Sigma => check_sigma_laws(cfg),
        Suite::Finset => check_finset_suite(cfg),
        Suite::Lang => check_lang_suite(cfg, LANG_CORPUS),
        Suite::All => unreachable!("expanded by the caller"),
    }
}

fn laws(args: &LawArgs) -> Result<Response, CliError> {
    let cfg = SuiteConfig {
        max_size: args.max_size as usize,
        seed: args.seed,
        exec: if args.sequential { Exec::Sequential } else { Exec::Parallel },
    };
    let suites = if args.suite == Suite::All { ALL_SUITES.to_vec() } else { vec![args.suite] };
    let reports: Vec<LawReport> = suites
        .into_iter()
        .map(|s| {
            let r = run_suite(s, &cfg);
            if args.deterministic {
                r.deterministic()
            } else {
                r
            }
        })
        .collect();
    let skipped: Vec<&String> = reports.iter().flat_map(|r| &r.skipped).collect();
    if !skipped.is_empty() {
        return Err(CliError::Usage(format!(
            "--max-size {} exceeds the work budget of {} (set {} to raise it); skipped: {}",
            args.max_size,
            finset::budget(),
            finset::BUDGET_ENV,
            skipped.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("; ")
        )));
    }
    let ok = reports.iter().all(LawReport::passed);
    let text = reports.iter().map(render_report).collect::<Vec<_>>().join("\n");
    let json = if args.suite == Suite::All { to_json(&reports) } else { to_json(&reports[0]) };
    Ok(Response { text, json, ok })
}

fn render_report(r: &LawReport) -> String {
    let failed = r.failures.len() as u64 + r.truncated;
    let mut s = format!(
        "{}: {} ({} instances, {failed} failures",
        r.suite,
        if r.passed() { "PASS" } else { "FAIL" },
        r.instances
    );
    if let Some(ms) = r.elapsed_ms {
        s.push_str(&format!(", {ms} ms"));
    }
    s.push(')');
    for f in &r.failures {
        s.push_str(&format!("\n  {} at {}\n    lhs: {}\n    rhs: {}", f.law, f.instance, f.lhs, f.rhs));
    }
    if r.truncated > 0 {
        s.push_str(&format!("\n  ... {} more", r.truncated));
    }
    s
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}
