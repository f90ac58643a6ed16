use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::machine::{self, Ssrt};
use crate::words::{alphabet, DataWord, Letter, OriginTriple, OriginWord, Symbol};

use super::AnalysisError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Provenance {
    Builtin(String),
    Machine,
    External,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Builtin(n) => write!(f, "builtin:{n}"),
            Provenance::Machine => f.write_str("machine"),
            Provenance::External => f.write_str("external"),
        }
    }
}

/// A transduction given as a black box. Must be pure.
pub trait Transduction {
    fn name(&self) -> String;
    fn provenance(&self) -> Provenance;
    /// Input letters used when enumerating words.
    fn alphabet(&self) -> &[Letter];
    /// `None` where the transduction is undefined.
    fn apply(&self, w: &DataWord) -> Option<OriginWord>;
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BuiltinKind {
    Identity,
    Reverse,
    IdentityOrReverse,
    DoubleGate,
    ThirdOrFourth,
}

impl BuiltinKind {
    pub const ALL: [BuiltinKind; 5] = [
        BuiltinKind::Identity,
        BuiltinKind::Reverse,
        BuiltinKind::IdentityOrReverse,
        BuiltinKind::DoubleGate,
        BuiltinKind::ThirdOrFourth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinKind::Identity => "identity",
            BuiltinKind::Reverse => "reverse",
            BuiltinKind::IdentityOrReverse => "identity_or_reverse",
            BuiltinKind::DoubleGate => "double_gate",
            BuiltinKind::ThirdOrFourth => "third_or_fourth",
        }
    }
}

/// One of the named example transductions.
#[derive(Clone, Debug)]
pub struct Builtin {
    kind: BuiltinKind,
    alphabet: Vec<Letter>,
}

/// Looks up a builtin by name, over the alphabet `{a, b}`.
pub fn builtin(name: &str) -> Result<Builtin, AnalysisError> {
    BuiltinKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .map(|kind| Builtin::with_alphabet(kind, alphabet("a b")))
        .ok_or_else(|| AnalysisError::UnknownOracle(name.to_string()))
}

impl Builtin {
    pub fn with_alphabet(kind: BuiltinKind, alphabet: Vec<Letter>) -> Self {
        Builtin { kind, alphabet }
    }

    pub fn kind(&self) -> BuiltinKind {
        self.kind
    }
}

fn identity(w: &DataWord) -> Vec<OriginTriple> {
    w.symbols()
        .iter()
        .enumerate()
        .map(|(i, s)| OriginTriple::new(s.letter, s.value, i + 1))
        .collect()
}

fn reverse(w: &DataWord) -> Vec<OriginTriple> {
    let mut v = identity(w);
    v.reverse();
    v
}

/// Reverses when the `i`-th and last values differ; identity otherwise,
/// including inputs shorter than `i`.
fn gate(w: &DataWord, i: usize) -> Vec<OriginTriple> {
    if w.len() >= i && Some(w.at(i).value) != w.last_value() {
        reverse(w)
    } else {
        identity(w)
    }
}

impl Transduction for Builtin {
    fn name(&self) -> String {
        self.kind.name().to_string()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Builtin(self.kind.name().to_string())
    }

    fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    fn apply(&self, w: &DataWord) -> Option<OriginWord> {
        let out = match self.kind {
            BuiltinKind::Identity => identity(w),
            BuiltinKind::Reverse => reverse(w),
            BuiltinKind::IdentityOrReverse => gate(w, 1),
            BuiltinKind::DoubleGate => {
                let mut v = gate(w, 1);
                v.extend(gate(w, 2));
                v
            }
            BuiltinKind::ThirdOrFourth => {
                if w.len() < 5 {
                    Vec::new()
                } else {
                    // The emitted triple carries the position of the value it
                    // copies, so that `(d3,3)` and `(d4,4)` differ.
                    let p = if w.at(1).value == w.at(5).value { 3 } else { 4 };
                    let s = w.at(p);
                    vec![OriginTriple::new(s.letter, s.value, p)]
                }
            }
        };
        Some(OriginWord(out))
    }
}

/// A transduction computed by running a machine.
#[derive(Clone, Debug)]
pub struct MachineOracle {
    name: String,
    machine: Arc<Ssrt>,
    index: HashMap<(usize, Letter), Vec<usize>>,
}

impl MachineOracle {
    pub fn new(name: impl Into<String>, machine: Ssrt) -> Self {
        let mut index: HashMap<(usize, Letter), Vec<usize>> = HashMap::new();
        for (i, t) in machine.transitions.iter().enumerate() {
            index.entry((t.source, t.letter)).or_default().push(i);
        }
        MachineOracle {
            name: name.into(),
            machine: Arc::new(machine),
            index,
        }
    }

    pub fn machine(&self) -> &Ssrt {
        &self.machine
    }

    fn enabled(&self, c: &machine::Configuration, s: Symbol) -> Option<usize> {
        self.index
            .get(&(c.state, s.letter))?
            .iter()
            .copied()
            .find(|&t| {
                machine::guard_eval(&self.machine.transitions[t].guard, &c.valuation, s.value)
            })
    }
}

impl Transduction for MachineOracle {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Machine
    }

    fn alphabet(&self) -> &[Letter] {
        &self.machine.input_alphabet
    }

    fn apply(&self, w: &DataWord) -> Option<OriginWord> {
        let m = &*self.machine;
        let mut c = machine::initial_configuration(m);
        for &s in w.symbols() {
            let t = self.enabled(&c, s)?;
            c = machine::fire(m, t, c, s).ok()?;
        }
        machine::output_of(m, &c, w.last_value()).ok().flatten()
    }
}

/// A transduction given by a closure; used for external or deliberately
/// broken oracles.
pub struct FnOracle<F> {
    name: String,
    alphabet: Vec<Letter>,
    f: F,
}

impl<F: Fn(&DataWord) -> Option<OriginWord>> FnOracle<F> {
    pub fn new(name: impl Into<String>, alphabet: Vec<Letter>, f: F) -> Self {
        FnOracle {
            name: name.into(),
            alphabet,
            f,
        }
    }
}

impl<F: Fn(&DataWord) -> Option<OriginWord>> Transduction for FnOracle<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn provenance(&self) -> Provenance {
        Provenance::External
    }

    fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    fn apply(&self, w: &DataWord) -> Option<OriginWord> {
        (self.f)(w)
    }
}
