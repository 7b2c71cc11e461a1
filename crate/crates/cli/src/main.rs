use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dlw_core::process::{Engine, DEFAULT_MAX_PREFIXES};
use dlw_core::theory::Reasoning;
use dlw_core::translate::{almost_translate, enumerate_translate, faithful_translate, transform_query};
use dlw_core::verify::{run_check, CheckKind, CorpusParams, CorpusRun};
use dlw_core::{
    DefaultTheory, EngineError, Formula, LogicError, ParseError, Process, Semantics, TheoryError,
    TranslateError, VerifyError,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dlw", version, about = "Propositional default logic workbench")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a theory.
    Check {
        theory: PathBuf,
    },
    /// List processes of a theory.
    Processes {
        #[command(flatten)]
        sem: SemArg,
        /// Which processes to list.
        #[arg(long, value_enum, default_value_t = Which::Closed)]
        which: Which,
        theory: PathBuf,
    },
    /// List the extensions of a theory.
    Extensions {
        #[command(flatten)]
        sem: SemArg,
        theory: PathBuf,
    },
    /// Answer a skeptical or credulous query.
    Entails {
        #[command(flatten)]
        sem: SemArg,
        #[arg(long, conflicts_with = "credulous")]
        skeptical: bool,
        #[arg(long)]
        credulous: bool,
        /// Query formula.
        #[arg(short, long)]
        query: String,
        theory: PathBuf,
    },
    /// Decide fail-safety and report a dead-end witness.
    Failsafe {
        #[command(flatten)]
        sem: SemArg,
        theory: PathBuf,
    },
    /// Can a process be extended to a successful and closed one?
    Complete {
        #[command(flatten)]
        sem: SemArg,
        /// Comma-separated default names, e.g. `d1,d2`.
        #[arg(long, default_value = "")]
        process: String,
        theory: PathBuf,
    },
    /// Translate into a normal default theory.
    Translate {
        #[command(flatten)]
        sem: SemArg,
        #[arg(long, value_enum, default_value_t = Mode::Faithful)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = ReasoningArg::Skeptical)]
        reasoning: ReasoningArg,
        /// Write the theory here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        theory: PathBuf,
    },
    /// Run the corpus checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SemArg {
    /// reiter, constrained, justified or normal.
    #[arg(long, default_value = "reiter", value_parser = parse_semantics)]
    semantics: Semantics,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = CheckArg::All)]
    check: CheckArg,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    max_defaults: usize,
    #[arg(long, default_value_t = 2)]
    max_atoms: usize,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value = "reiter", value_parser = parse_semantics)]
    semantics: Semantics,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Closed,
    Successful,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Faithful,
    Almost,
    Enumerate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReasoningArg {
    Skeptical,
    Credulous,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckArg {
    Oracle,
    Failsafe,
    Simulation,
    Faithful,
    Almost,
    Properties,
    All,
}

fn parse_semantics(s: &str) -> Result<Semantics, String> {
    Semantics::by_name(s).ok_or_else(|| {
        let names: Vec<&str> = Semantics::PRESETS.iter().map(|p| p.name()).collect();
        format!("unknown semantics `{s}` (expected one of {})", names.join(", "))
    })
}

/// Failures from the checks themselves, not from the tool.
#[derive(Debug)]
struct ChecksFailed(usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ChecksFailed>().is_some() {
            return 4;
        }
        let engine = cause
            .downcast_ref::<EngineError>()
            .or_else(|| match cause.downcast_ref::<TranslateError>() {
                Some(TranslateError::Engine(e)) => Some(e),
                _ => None,
            })
            .or_else(|| match cause.downcast_ref::<VerifyError>() {
                Some(VerifyError::Engine(e)) | Some(VerifyError::Translate(TranslateError::Engine(e))) => {
                    Some(e)
                }
                _ => None,
            });
        match engine {
            Some(EngineError::ResourceLimit(_)) => return 2,
            Some(_) => return 3,
            None => {}
        }
        if cause.downcast_ref::<TranslateError>().is_some()
            || cause.downcast_ref::<VerifyError>().is_some()
        {
            return 3;
        }
        if cause.downcast_ref::<TheoryError>().is_some()
            || cause.downcast_ref::<ParseError>().is_some()
            || cause.downcast_ref::<LogicError>().is_some()
        {
            return 1;
        }
    }
    1
}

fn max_prefixes() -> Result<usize> {
    match std::env::var("DLW_MAX_PREFIXES") {
        Ok(v) => v.trim().parse().with_context(|| format!("DLW_MAX_PREFIXES=`{v}` is not a count")),
        Err(_) => Ok(DEFAULT_MAX_PREFIXES),
    }
}

fn read_theory(path: &Path) -> Result<DefaultTheory> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading theory from stdin")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    DefaultTheory::parse(&text).with_context(|| format!("in {}", path.display()))
}

fn engine(t: &DefaultTheory, s: Semantics) -> Result<Engine<'_>> {
    Ok(Engine::new(t, s)?.with_max_prefixes(max_prefixes()?))
}

fn bracket(names: &[String]) -> String {
    format!("[{}]", names.join(", "))
}

struct Out {
    format: Format,
    stdout: io::StdoutLock<'static>,
}

impl Out {
    fn text(&mut self, line: impl AsRef<str>) -> Result<()> {
        writeln!(self.stdout, "{}", line.as_ref())?;
        Ok(())
    }

    fn json(&mut self, v: &Value) -> Result<()> {
        writeln!(self.stdout, "{v}")?;
        Ok(())
    }

    fn emit(&mut self, text: impl AsRef<str>, v: Value) -> Result<()> {
        match self.format {
            Format::Text => self.text(text),
            Format::Json => self.json(&v),
        }
    }
}

fn run(cli: Cli, out: &mut Out) -> Result<()> {
    match cli.command {
        Command::Check { theory } => {
            let t = read_theory(&theory)?;
            let normal = if t.is_normal() { "yes" } else { "no" };
            out.emit(
                format!("ok: {} defaults over {} atoms; normal: {normal}", t.len(), t.atoms().len()),
                json!({
                    "valid": true,
                    "defaults": t.len(),
                    "atoms": t.atoms().iter().map(|a| a.as_str()).collect::<Vec<_>>(),
                    "normal": t.is_normal(),
                    "theory": t.to_json(),
                }),
            )
        }
        Command::Processes { sem, which, theory } => {
            let t = read_theory(&theory)?;
            let e = engine(&t, sem.semantics)?;
            let ps = match which {
                Which::Closed => e.enumerate_processes()?,
                Which::Successful => e.successful_processes()?,
                Which::All => e.all_processes()?,
            };
            match out.format {
                Format::Text => {
                    if ps.is_empty() {
                        out.text("no processes")?;
                    }
                    for p in &ps {
                        out.text(bracket(&p.names(&t)))?;
                    }
                    Ok(())
                }
                Format::Json => out.json(&json!({
                    "semantics": sem.semantics.name(),
                    "processes": ps.iter().map(|p| p.names(&t)).collect::<Vec<_>>(),
                })),
            }
        }
        Command::Extensions { sem, theory } => {
            let t = read_theory(&theory)?;
            let exts = engine(&t, sem.semantics)?.extensions()?;
            match out.format {
                Format::Text => {
                    if exts.is_empty() {
                        out.text("no extensions")?;
                    }
                    for (i, x) in exts.iter().enumerate() {
                        out.text(format!("extension {}: {}", i + 1, x.axiom))?;
                        let more = match x.witnesses.len() - 1 {
                            0 => String::new(),
                            1 => " and 1 other process".to_string(),
                            n => format!(" and {n} other processes"),
                        };
                        out.text(format!("  from {}{more}", bracket(&x.witnesses[0].names(&t))))?;
                    }
                    Ok(())
                }
                Format::Json => out.json(&json!({
                    "semantics": sem.semantics.name(),
                    "count": exts.len(),
                    "extensions": exts.iter().map(|x| x.to_json(&t)).collect::<Vec<_>>(),
                })),
            }
        }
        Command::Entails { sem, skeptical: _, credulous, query, theory } => {
            let q: Formula = query.parse().map_err(LogicError::from).context("in the query")?;
            let t = read_theory(&theory)?;
            let e = engine(&t, sem.semantics)?;
            let exts = e.extensions()?.len();
            let (mode, verdict) = if credulous {
                (Reasoning::Credulous, e.credulous_entails(&q)?)
            } else {
                (Reasoning::Skeptical, e.skeptical_entails(&q)?)
            };
            if exts == 0 && mode == Reasoning::Skeptical {
                eprintln!("warning: the theory has no extensions, so every query holds skeptically");
            }
            out.emit(
                verdict.to_string(),
                json!({
                    "query": q.to_string(),
                    "mode": mode,
                    "semantics": sem.semantics.name(),
                    "extensions": exts,
                    "entailed": verdict,
                }),
            )
        }
        Command::Failsafe { sem, theory } => {
            let t = read_theory(&theory)?;
            let fs = engine(&t, sem.semantics)?.fail_safety()?;
            let witness = fs.witness.as_ref().map(|w| w.names(&t));
            let text = match &witness {
                None => "fail-safe".to_string(),
                Some(w) => format!("not fail-safe; witness {}", bracket(w)),
            };
            out.emit(
                text,
                json!({
                    "semantics": sem.semantics.name(),
                    "fail_safe": fs.fail_safe,
                    "witness": witness,
                }),
            )
        }
        Command::Complete { sem, process, theory } => {
            let t = read_theory(&theory)?;
            let names: Vec<&str> =
                process.split(',').map(str::trim).filter(|n| !n.is_empty()).collect();
            let p = Process::from_names(&t, &names).map_err(|e| anyhow!(e))?;
            let v = engine(&t, sem.semantics)?.completable(&p)?;
            out.emit(
                v.to_string(),
                json!({
                    "semantics": sem.semantics.name(),
                    "process": p.names(&t),
                    "completable": v,
                }),
            )
        }
        Command::Translate { sem, mode, reasoning, output, theory } => {
            let t = read_theory(&theory)?;
            let s = sem.semantics;
            let mode_name = mode.to_possible_value().expect("no skipped variants");
            let mut info = json!({ "mode": mode_name.get_name(), "semantics": s.name() });
            let text = match mode {
                Mode::Faithful => {
                    let art = faithful_translate(&t, s)?;
                    info["m"] = json!(art.m());
                    info["u"] = json!(art.u());
                    info["fallback"] = json!(art.fallback.to_string());
                    art.serialize()
                }
                Mode::Almost => {
                    let r = match reasoning {
                        ReasoningArg::Skeptical => Reasoning::Skeptical,
                        ReasoningArg::Credulous => Reasoning::Credulous,
                    };
                    let (art, flag) = almost_translate(&t, s, r)?;
                    let q = Formula::Atom(dlw_core::Atom::new("q").expect("valid atom"));
                    info["m"] = json!(art.m());
                    info["u"] = json!(art.u());
                    info["reasoning"] = json!(r);
                    info["flag"] = json!(flag.as_str());
                    info["query_rewrite"] = json!(transform_query(&q, r, &flag).to_string());
                    art.serialize()
                }
                Mode::Enumerate => enumerate_translate(&t, s)?.serialize(),
            };
            let out_theory = DefaultTheory::parse(&text).expect("translations reparse");
            info["defaults"] = json!(out_theory.len());
            let summary = info_lines(&info);
            match (&output, out.format) {
                (Some(path), Format::Text) => {
                    std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
                    out.text(format!("wrote {}", path.display()))?;
                    for l in summary {
                        out.text(l)?;
                    }
                    Ok(())
                }
                (Some(path), Format::Json) => {
                    std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
                    info["output"] = json!(path.display().to_string());
                    out.json(&info)
                }
                (None, Format::Text) => {
                    for l in summary {
                        eprintln!("{l}");
                    }
                    write!(out.stdout, "{text}")?;
                    Ok(())
                }
                (None, Format::Json) => {
                    info["theory"] = json!(text);
                    out.json(&info)
                }
            }
        }
        Command::Verify(args) => {
            let p = CorpusParams::new(args.count, args.seed)
                .max_defaults(args.max_defaults)
                .max_atoms(args.max_atoms)
                .formula_depth(args.depth);
            let kinds: Vec<CheckKind> = match args.check {
                CheckArg::Oracle => vec![CheckKind::Oracle],
                CheckArg::Failsafe => vec![CheckKind::Failsafe],
                CheckArg::Simulation => vec![CheckKind::Simulation],
                CheckArg::Faithful => vec![CheckKind::Faithful],
                CheckArg::Almost => vec![CheckKind::Almost],
                CheckArg::Properties => vec![CheckKind::Properties],
                CheckArg::All => CheckKind::ALL.to_vec(),
            };
            let mut failed = 0;
            for k in kinds {
                let run: CorpusRun = run_check(k, &p, args.semantics)?;
                let fails = run.failures().count();
                failed += fails;
                let name = format!("{k:?}").to_lowercase();
                match out.format {
                    Format::Text => {
                        out.text(format!(
                            "{name}: {} reports, {fails} failed, {} skipped by guard",
                            run.reports.len(),
                            run.skipped_by_guard
                        ))?;
                        for r in run.failures() {
                            out.text(format!("  FAIL {}", r.to_json_line()))?;
                        }
                    }
                    Format::Json => {
                        for r in &run.reports {
                            out.text(r.to_json_line())?;
                        }
                        out.json(&json!({
                            "check": name,
                            "reports": run.reports.len(),
                            "failed": fails,
                            "skipped_by_guard": run.skipped_by_guard,
                        }))?;
                    }
                }
            }
            if failed > 0 {
                bail!(ChecksFailed(failed));
            }
            Ok(())
        }
    }
}

fn info_lines(info: &Value) -> Vec<String> {
    let mut lines = vec![format!("defaults: {}", info["defaults"])];
    if let Some(flag) = info["flag"].as_str() {
        lines.push(format!("flag atom: {flag}"));
        if let Some(r) = info["query_rewrite"].as_str() {
            lines.push(format!("query rewrite: ask `{}` instead of `q`", r));
        }
    }
    if let Some(f) = info["fallback"].as_str() {
        lines.push(format!("fallback: {f}"));
    }
    lines
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    let format = cli.format;
    let mut out = Out { format, stdout: io::stdout().lock() };
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            if format == Format::Json && code != 4 {
                let _ = out.json(&json!({ "error": format!("{e:#}"), "exit": code }));
            }
            if code != 4 {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}
