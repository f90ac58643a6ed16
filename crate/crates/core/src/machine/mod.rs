//! Streaming string register transducers: description, validation,
//! interpretation and the text file format.

mod format;
mod guard;
mod interp;
mod validate;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::words::{DataValue, Letter};

pub use format::{
    parse_machine, parse_machine_unchecked, write_machine, ParseError, ParsedMachine,
};
pub use guard::Guard;
pub use interp::{
    fire, guard_eval, initial_configuration, output_of, run, step, transduce, Configuration,
    RunOutcome, StepOutcome, TransduceOutcome, Valuation,
};
pub use validate::{validate, ValidationReport, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("register {0} read while undefined")]
    UndefinedRegisterRead(String),
    #[error("output of the initial state mentions curr on the empty word")]
    CurrOnEmptyWord,
    #[error("transitions {0} and {1} are both enabled")]
    Nondeterministic(usize, usize),
    #[error("variable {0} used twice in one update")]
    NotCopyless(String),
}

/// Source of a data value written into an output position.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum ValueSource {
    Reg(usize),
    Curr,
}

/// An element of an update right-hand side or of an output template.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Elem {
    Var(usize),
    Out(Letter, ValueSource),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub source: usize,
    pub letter: Letter,
    pub guard: Guard,
    pub target: usize,
    pub store: Vec<usize>,
    /// Explicit updates; unlisted variables keep their contents.
    pub update: BTreeMap<usize, Vec<Elem>>,
}

/// A deterministic copyless SSRT. States, registers and variables are
/// referred to by index into the name tables.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Ssrt {
    pub input_alphabet: Vec<Letter>,
    pub output_alphabet: Vec<Letter>,
    pub states: Vec<String>,
    pub initial: usize,
    pub registers: Vec<String>,
    pub variables: Vec<String>,
    pub output: BTreeMap<usize, Vec<Elem>>,
    pub transitions: Vec<Transition>,
    /// Free-form `key: value` lines written as a comment header.
    pub metadata: Vec<(String, String)>,
}

impl Ssrt {
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn register_index(&self, name: &str) -> Option<usize> {
        self.registers.iter().position(|s| s == name)
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|s| s == name)
    }

    /// Transitions leaving `q` on `letter`, as indices into `transitions`.
    pub fn outgoing(&self, q: usize, letter: Letter) -> impl Iterator<Item = usize> + '_ {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.source == q && t.letter == letter)
            .map(|(i, _)| i)
    }

    /// Largest number of output symbols written by one transition; bounds
    /// how many output positions share an origin.
    pub fn max_symbols_per_transition(&self) -> usize {
        let per_t = self
            .transitions
            .iter()
            .map(|t| {
                t.update
                    .values()
                    .flatten()
                    .filter(|e| matches!(e, Elem::Out(..)))
                    .count()
            })
            .max()
            .unwrap_or(0);
        let per_o = self
            .output
            .values()
            .map(|o| o.iter().filter(|e| matches!(e, Elem::Out(..))).count())
            .max()
            .unwrap_or(0);
        per_t + per_o
    }

    pub(crate) fn register_name(&self, r: usize) -> String {
        self.registers
            .get(r)
            .cloned()
            .unwrap_or_else(|| format!("#{r}"))
    }

    pub(crate) fn variable_name(&self, x: usize) -> String {
        self.variables
            .get(x)
            .cloned()
            .unwrap_or_else(|| format!("#{x}"))
    }

    /// Values currently stored in registers, for diagnostics.
    pub fn stored_values(&self, c: &Configuration) -> Vec<DataValue> {
        c.valuation.regs.iter().flatten().copied().collect()
    }
}
