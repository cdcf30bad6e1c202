//! The `pmm` command line. Exit codes: 0 success, 1 zero likelihood or a failed
//! check under `--strict-exit`, 2 usage or I/O, 3 guard violation.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::canonical;
use crate::conditions::{check_discrete_corollary, check_glm_corollary, check_hmm_corollary};
use crate::dp::{viterbi_path, Decoded, TieRule};
use crate::error::{Error, Result};
use crate::experiments::{run_experiment, ExperimentRecipe};
use crate::io::{read_observations_csv, write_path_csv, write_trajectory_csv, ObservationParser};
use crate::model::{load_model, ModelSpec};
use crate::nodes::{falsify_barrier, find_prop21_split, verify_barrier_prop21_for, FalsifyTarget, Prop21Outcome};
use crate::online::{open_stream, DecoderConfig};
use crate::scorer::{symbols_1based, Scorer};
use crate::simulate::{simulate, Seed};
use crate::weight::Weight;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pmm", version, about = "Pairwise Markov models: simulate, decode, check, experiment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Tie {
    Lex,
    Colex,
}

impl From<Tie> for TieRule {
    fn from(t: Tie) -> Self {
        match t {
            Tie::Lex => TieRule::Lexicographic,
            Tie::Colex => TieRule::CoLexicographic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Hmm,
    Discrete,
    Glm,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a trajectory as `t,x,y` CSV.
    Simulate {
        /// Model JSON file, or `builtin:NAME` for a shipped model.
        #[arg(long)]
        model: String,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Viterbi decoding to `t,v` CSV; diagnostics as JSON on standard error.
    Decode {
        #[arg(long)]
        model: String,
        /// Observation CSV; `-` or absent reads standard input.
        #[arg(long)]
        obs: Option<String>,
        #[arg(long, value_enum, default_value_t = Tie::Lex)]
        tie: Tie,
        /// Exact rational arithmetic (discrete models).
        #[arg(long)]
        exact: bool,
        /// Stream rows and emit committed pieces as nodes are found.
        #[arg(long)]
        online: bool,
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Minimum gap between commits (defaults to the order).
        #[arg(long)]
        sep: Option<usize>,
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Condition reports as JSON.
    Check {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
        /// Word length searched by the discrete checks.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Exit 1 unless every requested check passes.
        #[arg(long)]
        strict_exit: bool,
    },
    /// Certify a block as a barrier, optionally falsification-tested.
    Barrier {
        #[arg(long)]
        model: String,
        /// Comma-separated 1-based symbols.
        #[arg(long, value_delimiter = ',')]
        block: Vec<usize>,
        /// 1-based split; searched when absent.
        #[arg(long)]
        split: Option<usize>,
        #[arg(long, default_value_t = 1)]
        target: usize,
        /// Number of random embeddings to try.
        #[arg(long, default_value_t = 0)]
        falsify: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a named recipe and write its CSV.
    Experiment {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Guard { .. } => EXIT_GUARD,
        Error::ZeroLikelihood { .. } | Error::BufferFull { .. } => EXIT_DIAGNOSTIC,
        _ => EXIT_USAGE,
    }
}

fn resolve_model(spec: &str) -> Result<ModelSpec> {
    match spec.strip_prefix("builtin:") {
        Some(name) => {
            let file = format!("{name}.json");
            let (_, src) = canonical::ALL
                .iter()
                .find(|(f, _)| *f == file)
                .ok_or_else(|| Error::InvalidArgument(format!("no shipped model named '{name}'")))?;
            load_model(src)
        }
        None => load_model(&std::fs::read_to_string(spec).map_err(|e| at(spec, e))?),
    }
}

fn at(path: impl AsRef<std::path::Path>, e: io::Error) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.as_ref().display())))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| at(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn input(path: &Option<String>) -> Result<Box<dyn Read>> {
    Ok(match path.as_deref() {
        None | Some("-") => Box::new(io::stdin().lock()),
        Some(p) => Box::new(File::open(p).map_err(|e| at(p, e))?),
    })
}

fn offline_diagnostics<W: Weight>(d: &Decoded<W>) -> Value {
    json!({
        "log_likelihood": if d.is_zero() { Value::from("-inf") } else { Value::from(d.log_likelihood()) },
        "final_ties": d.final_ties,
        "diagnostic": d.diagnostic,
    })
}

fn decode_offline<S: Scorer + ?Sized>(
    model: &S,
    obs: &[crate::scorer::Observation],
    tie: &TieRule,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let d = viterbi_path(model, obs, tie)?;
    write_path_csv(&d.path, 0, true, &mut *out)?;
    out.flush()?;
    writeln!(err, "{}", offline_diagnostics(&d))?;
    Ok(if d.is_zero() { EXIT_DIAGNOSTIC } else { EXIT_OK })
}

fn decode_online(
    model: &ModelSpec,
    cfg: DecoderConfig,
    source: Box<dyn Read>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let mut lines = BufReader::new(source).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Schema("observation CSV is empty".into()))??;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let parser = ObservationParser::from_header(&cols, model.observation_space())?;
    let mut st = open_stream(model, cfg);
    writeln!(out, "t,v")?;
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<&str> = line.split(',').collect();
        let o = parser.parse(&row, i + 2)?;
        match st.push(o) {
            Ok(Some(piece)) => {
                write_path_csv(&piece.states, piece.start, false, &mut *out)?;
                out.flush()?;
            }
            Ok(None) => {}
            Err(e @ Error::ZeroLikelihood { .. }) => {
                writeln!(err, "{}", json!({ "error": e.to_string(), "diagnostics": st.diagnostics() }))?;
                return Ok(EXIT_DIAGNOSTIC);
            }
            Err(e) => return Err(e),
        }
    }
    let tail = st.flush()?;
    write_path_csv(&tail.states, tail.start, false, &mut *out)?;
    out.flush()?;
    writeln!(
        err,
        "{}",
        json!({ "provisional_from": tail.start + 1, "provisional": tail.states.len(), "diagnostics": tail.diagnostics })
    )?;
    Ok(EXIT_OK)
}

fn check(model: &ModelSpec, which: Which, depth: usize) -> Result<(Value, bool)> {
    let mut report = serde_json::Map::new();
    let mut pass = true;
    let wanted = |w: Which| which == w || which == Which::All;
    let mut record = |name: &str, r: Result<(Value, bool)>, required: bool| -> Result<()> {
        match r {
            Ok((v, ok)) => {
                pass &= ok;
                report.insert(name.into(), v);
            }
            Err(Error::Unsupported(msg)) if !required => {
                report.insert(name.into(), json!({ "unsupported": msg }));
            }
            Err(e) => return Err(e),
        }
        Ok(())
    };
    let required = which != Which::All;
    if wanted(Which::Hmm) {
        let r = check_hmm_corollary(model).and_then(|r| Ok((serde_json::to_value(&r)?, r.overall)));
        record("hmm", r, required)?;
    }
    if wanted(Which::Discrete) {
        let r = if model.is_discrete() {
            check_discrete_corollary(model, depth).and_then(|r| Ok((serde_json::to_value(&r)?, r.overall)))
        } else {
            Err(Error::Unsupported("discrete checks need a discrete model".into()))
        };
        record("discrete", r, required)?;
    }
    if wanted(Which::Glm) {
        let r = check_glm_corollary(model).and_then(|r| Ok((serde_json::to_value(&r)?, r.overall)));
        record("glm", r, required)?;
    }
    let applicable = report.values().any(|v| v.get("unsupported").is_none());
    Ok((Value::Object(report), pass && applicable))
}

fn barrier(
    model: &ModelSpec,
    block: &[usize],
    split: Option<usize>,
    target: usize,
    trials: u64,
    seed: u64,
    out: &mut dyn Write,
) -> Result<i32> {
    if target == 0 || target > model.num_states() {
        return Err(Error::InvalidArgument(format!("target state {target} out of range")));
    }
    let obs = symbols_1based(block);
    let target = target - 1;
    let outcome = match split {
        Some(l) => verify_barrier_prop21_for(model, &obs, l, target)?,
        None => match find_prop21_split(model, &obs, target)? {
            Some(c) => Prop21Outcome::Certified(c),
            None => verify_barrier_prop21_for(model, &obs, 2, target)?,
        },
    };
    let falsified = match (&outcome, trials) {
        (Prop21Outcome::Certified(c), n) if n > 0 => {
            let t = FalsifyTarget {
                state: Some(target),
                strong: c.strict,
                max_flank: 20,
            };
            Some(falsify_barrier(model, &obs, c.order, t, n, Seed(seed))?)
        }
        _ => None,
    };
    let certified = outcome.certificate().is_some();
    let survived = falsified.as_ref().is_none_or(|f| f.is_none_found());
    writeln!(out, "{}", serde_json::to_string_pretty(&json!({ "prop21": outcome, "falsify": falsified }))?)?;
    Ok(if certified && survived { EXIT_OK } else { EXIT_DIAGNOSTIC })
}

fn execute(cli: Cli, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Simulate { model, steps, seed, out } => {
            let m = resolve_model(&model)?;
            let traj = simulate(&m, steps, Seed(seed))?;
            write_trajectory_csv(&traj, m.observation_space(), output(&out)?)?;
            Ok(EXIT_OK)
        }
        Command::Decode {
            model,
            obs,
            tie,
            exact,
            online,
            order,
            sep,
            strong,
            out,
        } => {
            let m = resolve_model(&model)?;
            let mut w = output(&out)?;
            if online {
                let mut cfg = DecoderConfig::new(order);
                cfg.separation = sep;
                cfg.require_strong = strong;
                cfg.tie = tie.into();
                return decode_online(&m, cfg, input(&obs)?, &mut *w, err);
            }
            let data = read_observations_csv(input(&obs)?, m.observation_space())?;
            if exact {
                decode_offline(&m.exact()?, &data, &tie.into(), &mut *w, err)
            } else {
                decode_offline(&m, &data, &tie.into(), &mut *w, err)
            }
        }
        Command::Check {
            model,
            which,
            depth,
            strict_exit,
        } => {
            let m = resolve_model(&model)?;
            let (report, pass) = check(&m, which, depth)?;
            let mut w = output(&None)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&report)?)?;
            w.flush()?;
            Ok(if strict_exit && !pass { EXIT_DIAGNOSTIC } else { EXIT_OK })
        }
        Command::Barrier {
            model,
            block,
            split,
            target,
            falsify,
            seed,
        } => {
            let m = resolve_model(&model)?;
            let mut w = output(&None)?;
            let code = barrier(&m, &block, split, target, falsify, seed, &mut *w)?;
            w.flush()?;
            Ok(code)
        }
        Command::Experiment { name, seed, steps, out } => {
            let mut recipe = ExperimentRecipe::new(&name, seed)?;
            if let Some(n) = steps {
                recipe = recipe.with_steps(n);
            }
            run_experiment(&recipe)?.write_csv(output(&out)?)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mut err = io::stderr().lock();
    match execute(cli, &mut err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
