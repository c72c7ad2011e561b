use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use consfree::gen::{input_family, INPUT_FAMILIES};
use consfree::mcv::{decode_mcv, encode_mcv, eval_circuit, mcv_cf_program, StraightLineProgram};
use consfree::report::{engine_accepts, run_engine, RunRecord, CSV_COLUMNS};
use consfree::tm::{compile_tm, run_tm, TuringMachine};
use consfree::{
    call_shape_report, parse_input, parse_ncf_program, pretty_print, reach_bound, BitString,
    Budget, Engine, Program, RunOptions,
};

#[derive(Parser)]
#[command(
    name = "cflab",
    version,
    about = "Run, analyze and measure cons-free programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    #[value(alias = "csv-record")]
    Csv,
    #[value(alias = "json-record")]
    Json,
}

#[derive(clap::Args)]
struct EngineArgs {
    /// tree, stack, stack-tco, memo, ncf-search, ncf-saturate or confirm
    #[arg(long, default_value = "tree", value_parser = parse_engine)]
    engine: Engine,
    /// Step budget for engines that count steps
    #[arg(long, default_value_t = consfree::eval::DEFAULT_MAX_STEPS)]
    budget: u64,
    /// Use tail-call optimization (turns `stack` into `stack-tco`)
    #[arg(long)]
    tco: bool,
    /// Check every value and binding against the suffix property
    #[arg(long)]
    assert_suffix_lemma: bool,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

impl EngineArgs {
    fn engine(&self) -> Engine {
        match self.engine {
            Engine::Stack if self.tco => Engine::StackTco,
            e => e,
        }
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            budget: Budget::new(self.budget),
            check_suffixes: self.assert_suffix_lemma,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program on one input
    Run {
        program: PathBuf,
        /// Bits as `1011` or `[1,0,1,1]`, or a file containing them
        input: String,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Classify call sites and report whether the program is tail recursive
    Analyze {
        program: PathBuf,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Run over a range of input lengths, one record per length
    Sweep {
        program: PathBuf,
        /// Inclusive range `MIN..MAX`
        range: String,
        /// Input family: zeros, ones, alt or random
        #[arg(long, default_value = "ones")]
        family: String,
        /// Seed for the random family
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Encode a circuit file as a bit string
    McvEncode { circuit: PathBuf },
    /// Decode a bit string (literal or file) into circuit text
    McvDecode { bits: String },
    /// Evaluate a circuit directly and through the bundled cons-free decider
    McvEval {
        circuit: PathBuf,
        #[arg(long, default_value = "memo", value_parser = parse_engine)]
        engine: Engine,
        #[arg(long, default_value_t = consfree::eval::DEFAULT_MAX_STEPS)]
        budget: u64,
    },
    /// Run a Turing machine on an input
    TmRun {
        machine: PathBuf,
        input: String,
        #[arg(long, default_value_t = consfree::eval::DEFAULT_MAX_STEPS)]
        budget: u64,
    },
    /// Compile a Turing machine into a cons-free program
    TmCompile { machine: PathBuf },
    /// Tabulate the number of reachable configurations by input length
    Bound {
        program: PathBuf,
        #[arg(long, default_value_t = 0)]
        n_min: usize,
        #[arg(long, default_value_t = 16)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    Engine::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = Engine::ALL.iter().map(|e| e.name()).collect();
        format!(
            "unknown engine `{s}` (expected one of: {})",
            names.join(", ")
        )
    })
}

/// Usage and input errors exit with 1, runs without a value with 2.
enum Failure {
    Usage(String),
    NoValue,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Usage(e.to_string())
    }
}

type Res = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    let text = read(path)?;
    parse_ncf_program(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn program_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load_input(arg: &str) -> Result<BitString, Failure> {
    match parse_input(arg) {
        Ok(x) => Ok(x),
        Err(e) if Path::new(arg).is_file() => {
            let text = read(Path::new(arg))?;
            parse_input(text.trim()).map_err(|_| Failure::Usage(format!("{arg}: {e}")))
        }
        Err(e) => Err(Failure::Usage(format!("bad input `{arg}`: {e}"))),
    }
}

fn check_engine(engine: Engine, p: &Program) -> Res {
    if engine_accepts(engine, p) {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "engine `{engine}` cannot run a program that uses `choose`; use ncf-search or ncf-saturate"
        )))
    }
}

fn json_line<T: Serialize>(out: &mut impl Write, v: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)
}

fn human<T: Serialize>(out: &mut impl Write, v: &T) -> io::Result<()> {
    let value = serde_json::to_value(v).map_err(io::Error::other)?;
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            match v {
                serde_json::Value::Null => {}
                serde_json::Value::String(s) => writeln!(out, "{k}: {s}")?,
                other => writeln!(out, "{k}: {other}")?,
            }
        }
    }
    Ok(())
}

fn emit_records(records: &[RunRecord], format: Format) -> Res {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Human => {
            for (i, r) in records.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                human(&mut out, r)?;
                if let Some(e) = &r.error {
                    writeln!(out, "error: {e}")?;
                }
            }
        }
        Format::Json => {
            for r in records {
                json_line(&mut out, r)?;
            }
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut out);
            w.write_record(CSV_COLUMNS)?;
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn parse_range(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("bad range `{s}`, expected MIN..MAX"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let lo: usize = a.trim().parse().map_err(|_| bad())?;
    let hi: usize = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[derive(Serialize)]
struct BoundRow {
    n: usize,
    reach_bound: u64,
}

#[derive(Serialize)]
struct McvReport {
    direct: bool,
    engine: Engine,
    program_result: String,
    bits: usize,
}

#[derive(Serialize)]
struct TmReport {
    accept: bool,
    steps: u64,
}

fn dispatch(cli: Cli) -> Res {
    let stdout = io::stdout();
    match cli.command {
        Command::Run {
            program,
            input,
            engine,
        } => {
            let p = load_program(&program)?;
            let x = load_input(&input)?;
            check_engine(engine.engine(), &p)?;
            let rec = run_engine(
                &p,
                &program_name(&program),
                &x,
                engine.engine(),
                engine.options(),
            );
            if rec.status == "error" {
                return Err(Failure::Usage(rec.error.unwrap_or_default()));
            }
            emit_records(std::slice::from_ref(&rec), engine.format)?;
            if !rec.is_ok() {
                return Err(Failure::NoValue);
            }
        }
        Command::Analyze { program, format } => {
            let p = load_program(&program)?;
            let report = call_shape_report(&p);
            let mut out = stdout.lock();
            match format {
                Format::Json => json_line(&mut out, &report)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(["definition", "path", "callee", "shape", "in_if_test"])?;
                    for s in &report.sites {
                        let shape = serde_json::to_value(s.shape)?;
                        w.write_record([
                            s.definition.as_str(),
                            s.path.as_str(),
                            s.callee.as_str(),
                            shape.as_str().unwrap_or_default(),
                            if s.in_if_test { "true" } else { "false" },
                        ])?;
                    }
                    w.flush()?;
                }
                Format::Human => {
                    writeln!(out, "is_cftr: {}", report.is_cftr)?;
                    writeln!(out, "all_calls_linear: {}", report.all_calls_linear)?;
                    for d in &report.definitions {
                        writeln!(out, "alpha {}: {}", d.definition, d.alpha)?;
                    }
                    for s in &report.sites {
                        let shape = serde_json::to_value(s.shape)?;
                        let test = if s.in_if_test { " (in if test)" } else { "" };
                        writeln!(
                            out,
                            "call {} -> {} at {}: {}{test}",
                            s.definition,
                            s.callee,
                            if s.path.is_empty() { "body" } else { &s.path },
                            shape.as_str().unwrap_or_default()
                        )?;
                    }
                }
            }
        }
        Command::Sweep {
            program,
            range,
            family,
            seed,
            engine,
        } => {
            let p = load_program(&program)?;
            let (lo, hi) = parse_range(&range)?;
            check_engine(engine.engine(), &p)?;
            if !INPUT_FAMILIES.contains(&family.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown family `{family}` (expected one of: {})",
                    INPUT_FAMILIES.join(", ")
                )));
            }
            let name = program_name(&program);
            let (e, opts) = (engine.engine(), engine.options());
            let records: Vec<RunRecord> = (lo..=hi)
                .into_par_iter()
                .map(|n| {
                    let x = input_family(&family, n, seed).expect("known family");
                    run_engine(&p, &name, &x, e, opts)
                })
                .collect();
            emit_records(&records, engine.format)?;
        }
        Command::McvEncode { circuit } => {
            let c = StraightLineProgram::parse(&read(&circuit)?)?;
            writeln!(stdout.lock(), "{}", encode_mcv(&c).bits)?;
        }
        Command::McvDecode { bits } => {
            let x = load_input(&bits)?;
            write!(stdout.lock(), "{}", decode_mcv(&x)?)?;
        }
        Command::McvEval {
            circuit,
            engine,
            budget,
        } => {
            let c = StraightLineProgram::parse(&read(&circuit)?)?;
            let p = mcv_cf_program();
            check_engine(engine, &p)?;
            let x = encode_mcv(&c).bits;
            let opts = RunOptions {
                budget: Budget::new(budget),
                ..RunOptions::default()
            };
            let rec = run_engine(&p, "mcv.cf", &x, engine, opts);
            let report = McvReport {
                direct: eval_circuit(&c),
                engine,
                program_result: rec.result.clone().unwrap_or_else(|| rec.status.clone()),
                bits: x.len(),
            };
            human(&mut stdout.lock(), &report)?;
            if !rec.is_ok() {
                return Err(Failure::NoValue);
            }
        }
        Command::TmRun {
            machine,
            input,
            budget,
        } => {
            let m = TuringMachine::parse(&read(&machine)?)?;
            let x = load_input(&input)?;
            match run_tm(&m, &x, Budget::new(budget)) {
                Ok((accept, steps)) => human(&mut stdout.lock(), &TmReport { accept, steps })?,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Err(Failure::NoValue);
                }
            }
        }
        Command::TmCompile { machine } => {
            let m = TuringMachine::parse(&read(&machine)?)?;
            write!(stdout.lock(), "{}", pretty_print(&compile_tm(&m)?))?;
        }
        Command::Bound {
            program,
            n_min,
            n_max,
            format,
        } => {
            let p = load_program(&program)?;
            let rows: Vec<BoundRow> = (n_min..=n_max)
                .map(|n| BoundRow {
                    n,
                    reach_bound: reach_bound(&p, n),
                })
                .collect();
            let mut out = stdout.lock();
            match format {
                Format::Human => {
                    for r in &rows {
                        writeln!(out, "{:>4} {}", r.n, r.reach_bound)?;
                    }
                }
                Format::Json => rows.iter().try_for_each(|r| json_line(&mut out, r))?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(&mut out);
                    rows.iter().try_for_each(|r| w.serialize(r))?;
                    w.flush()?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::NoValue) => ExitCode::from(2),
    }
}
