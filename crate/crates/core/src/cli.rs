//! Command-line front door. `dispatch` parses arguments, runs one verb and
//! writes a plain-text report; the binary only forwards `std::env::args`.
//!
//! Exit statuses: 0 success, 1 semantic failure (invalid machine, mismatch,
//! synthesis refused), 2 malformed input.

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{builtin, influence_report, Analyzer, Bounds, MachineOracle, Transduction};
use crate::deptree::{TreeContext, TreeValuationDisplay};
use crate::factored::{factor_eval, Cuts, Mask};
use crate::fixtures::{fixture_names, load_fixture};
use crate::machine::{
    parse_machine, parse_machine_unchecked, transduce, validate, write_machine, Ssrt,
    TransduceOutcome,
};
use crate::synth::{synth_ifl_tracker, synth_transducer, verify_against_oracle};
use crate::words::DataWord;

#[derive(Parser, Debug)]
#[command(
    name = "ssrt",
    about = "Streaming string register transducers over data words"
)]
struct Cli {
    #[command(flatten)]
    bounds: BoundsArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct BoundsArgs {
    /// Longest witness suffix tried by the analyses.
    #[arg(long, global = true, default_value_t = 4)]
    max_word_len: usize,
    /// Values beyond those already present in a word.
    #[arg(long, global = true, default_value_t = 3)]
    fresh_values: usize,
    /// Longest extension `u'` in vulnerability witnesses.
    #[arg(long, global = true, default_value_t = 2)]
    max_ext_len: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a machine file and print its violations.
    Validate { machine: String },
    /// Run a machine on a word and print the origin output.
    Run { machine: String, word: String },
    /// Print the factored output of a machine or oracle.
    Factor {
        source: String,
        word: String,
        /// `n` for two parts, `n,m` for three.
        cuts: String,
        /// Underlined parts, e.g. `L`, `R`, `LR`, `-`.
        mask: String,
        #[arg(allow_negative_numbers = true, default_value_t = 0)]
        z: i64,
    },
    /// Memorable, vulnerable and influencing values with witnesses.
    Analyze { oracle: String, word: String },
    /// Synthesize a machine from an oracle.
    Synth {
        oracle: String,
        /// Only the influencing-value tracker, without variables.
        #[arg(long)]
        tracker: bool,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Compare a machine with an oracle on every bounded word.
    Verify { machine: String, oracle: String },
    /// Dependency-tree operations.
    Tree {
        #[command(subcommand)]
        op: TreeOp,
    },
    /// List the registered fixtures.
    Fixtures,
}

#[derive(Subcommand, Debug)]
enum TreeOp {
    /// Print the extend, shorten and trim states for every prefix of a word.
    Demo { oracle: String, word: String },
}

/// A failed command: exit status plus message.
struct Failure(i32, String);

fn malformed(msg: impl std::fmt::Display) -> Failure {
    Failure(2, format!("error: {msg}"))
}

fn semantic(msg: impl std::fmt::Display) -> Failure {
    Failure(1, format!("error: {msg}"))
}

/// Runs one command line (`args[0]` is the program name) and returns the
/// exit status. Reports and errors go to `out`.
pub fn dispatch<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(out, "{msg}");
            code
        }
    }
}

fn bounds(b: BoundsArgs) -> Result<Bounds, Failure> {
    Bounds::new(b.max_word_len, b.fresh_values, b.max_ext_len).map_err(malformed)
}

fn word(text: &str) -> Result<DataWord, Failure> {
    DataWord::parse_user(text).map_err(malformed)
}

/// A machine file path, or the name of a machine fixture.
fn load_machine(arg: &str) -> Result<Ssrt, Failure> {
    if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| malformed(format!("{arg}: {e}")))?;
        return parse_machine(&text).map_err(|e| malformed(format!("{arg}: {e}")));
    }
    load_fixture(arg)
        .ok()
        .and_then(|f| f.machine)
        .ok_or_else(|| {
            malformed(format!(
                "`{arg}` is neither a machine file nor a machine fixture"
            ))
        })
}

/// A builtin oracle name, a fixture name, or a machine file.
fn load_oracle(arg: &str) -> Result<Box<dyn Transduction>, Failure> {
    if let Ok(b) = builtin(arg) {
        return Ok(Box::new(b));
    }
    if let Ok(f) = load_fixture(arg) {
        if let Some(o) = f.oracle {
            return Ok(Box::new(o));
        }
        if let Some(m) = f.machine {
            return Ok(Box::new(MachineOracle::new(arg, m)));
        }
    }
    let m = load_machine(arg)?;
    Ok(Box::new(MachineOracle::new(arg, m)))
}

fn cuts(text: &str) -> Result<Cuts, Failure> {
    let nums: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| malformed(format!("bad cuts `{text}`")))?;
    match nums[..] {
        [a] => Ok(Cuts::two(a)),
        [a, b] if a <= b => Ok(Cuts::three(a, b)),
        _ => Err(malformed(format!("bad cuts `{text}`"))),
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let b = bounds(cli.bounds)?;
    let mut emit = |s: &str| out.write_all(s.as_bytes()).map_err(semantic);
    match cli.command {
        Command::Validate { machine } => {
            let text = std::fs::read_to_string(&machine)
                .or_else(|_| {
                    load_fixture(&machine)
                        .ok()
                        .and_then(|f| f.source)
                        .map(str::to_string)
                        .ok_or(())
                })
                .map_err(|_| malformed(format!("cannot read `{machine}`")))?;
            let m = parse_machine_unchecked(&text)
                .map_err(|e| malformed(format!("{machine}: {e}")))?
                .machine;
            let r = validate(&m);
            emit(&r.render(&m))?;
            Ok(if r.is_valid() { 0 } else { 1 })
        }
        Command::Run { machine, word: w } => {
            let m = load_machine(&machine)?;
            let w = word(&w)?;
            let line = match transduce(&m, &w).map_err(semantic)? {
                TransduceOutcome::Output(o) => o.to_string(),
                TransduceOutcome::Stuck { at } => format!("STUCK at {at}"),
                TransduceOutcome::NoOutput { state } => format!("UNDEFINED in {}", m.states[state]),
            };
            emit(&format!("{line}\n"))?;
            Ok(0)
        }
        Command::Factor {
            source,
            word: w,
            cuts: c,
            mask,
            z,
        } => {
            let f = load_oracle(&source)?;
            let w = word(&w)?;
            let c = cuts(&c)?;
            let mask = Mask::parse(&mask).ok_or_else(|| malformed(format!("bad mask `{mask}`")))?;
            if c.first > w.len() || c.second.is_some_and(|s| s > w.len()) {
                return Err(malformed(format!("cuts exceed word length {}", w.len())));
            }
            if c.second.is_none() && mask.middle {
                return Err(malformed("a middle part needs two cuts"));
            }
            match factor_eval(f.as_ref(), &w, c, mask, z) {
                Some(fo) => {
                    emit(&format!("{fo}\n"))?;
                    Ok(0)
                }
                None => {
                    emit("UNDEFINED\n")?;
                    Ok(1)
                }
            }
        }
        Command::Analyze { oracle, word: w } => {
            let f = load_oracle(&oracle)?;
            let w = word(&w)?;
            let an = Analyzer::new(f.as_ref(), b);
            emit(&influence_report(&an, &w))?;
            emit(&format!("EQUALIZED [{}]\n", an.equalize(&w).apply_word(&w)))?;
            Ok(0)
        }
        Command::Synth {
            oracle,
            tracker,
            output,
        } => {
            let f = load_oracle(&oracle)?;
            let s = if tracker {
                synth_ifl_tracker(f.as_ref(), b)
            } else {
                synth_transducer(f.as_ref(), b)
            }
            .map_err(semantic)?;
            let text = write_machine(&s.machine);
            match output {
                Some(p) => {
                    std::fs::write(&p, text).map_err(|e| semantic(format!("{p}: {e}")))?;
                    emit(&format!("SYNTH {} -> {p}\n", s.report))?;
                }
                None => emit(&text)?,
            }
            Ok(0)
        }
        Command::Verify { machine, oracle } => {
            let m = load_machine(&machine)?;
            let f = load_oracle(&oracle)?;
            let r = verify_against_oracle(&m, f.as_ref(), b);
            emit(&r.render())?;
            Ok(if r.agrees() { 0 } else { 1 })
        }
        Command::Tree {
            op: TreeOp::Demo { oracle, word: w },
        } => {
            let f = load_oracle(&oracle)?;
            let w = word(&w)?;
            let ctx = TreeContext::new(f.as_ref(), b).map_err(semantic)?;
            let steps = ctx.pipeline(&w).map_err(semantic)?;
            emit(&format!(
                "CONTEXT B={} I={} suffix_classes={}\n",
                ctx.block_bound(),
                ctx.influence_bound(),
                ctx.suffixes().len()
            ))?;
            let mut ok = true;
            for (i, st) in steps.iter().enumerate() {
                emit(&format!("STEP {} READ [{}]\n", i + 1, st.read))?;
                emit(&format!("EXTENDED\n{}", st.extended.dump()))?;
                emit(&format!("SHORTENED\n{}", st.shortened.dump()))?;
                emit(&format!("TRIMMED\n{}", st.trimmed.dump()))?;
                emit(&format!(
                    "VALUATION\n{}",
                    TreeValuationDisplay(st.trimmed_val.clone())
                ))?;
                match ctx
                    .is_complete(&st.trimmed, &st.trimmed_val, &st.read)
                    .map_err(semantic)?
                {
                    None => emit("COMPLETE yes\n")?,
                    Some(fail) => {
                        ok = false;
                        emit(&format!("COMPLETE no {fail}\n"))?;
                    }
                }
                let r = st.trimmed.is_reduced(ctx.suffixes().len());
                if r.is_reduced() {
                    emit("REDUCED yes\n")?;
                } else {
                    ok = false;
                    emit(&format!("REDUCED no {}\n", r.violations.join("; ")))?;
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Fixtures => {
            for name in fixture_names() {
                let f = load_fixture(name).expect("registered");
                emit(&format!("{name} {} {}\n", f.kind, f.note))?;
            }
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = dispatch(
            std::iter::once("ssrt").chain(args.iter().copied()),
            &mut buf,
        );
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn run_fixture() {
        let (code, out) = call(&["run", "identity_or_reverse", "a:d1 a:d2 b:d3 c:d4"]);
        assert_eq!(code, 0);
        assert_eq!(out, "c:d4@4 b:d3@3 a:d2@2 a:d1@1\n");
    }

    #[test]
    fn cuts_parse() {
        assert!(cuts("2").is_ok());
        assert!(cuts("1,3").is_ok());
        assert!(cuts("3,1").is_err());
        assert!(cuts("x").is_err());
    }

    #[test]
    fn unknown_verb_is_malformed() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }
}
