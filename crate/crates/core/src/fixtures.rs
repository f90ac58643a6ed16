//! Machines and oracles for the worked examples, shared by tests and CLI.

use thiserror::Error;

use crate::analysis::{Builtin, BuiltinKind};
use crate::machine::{parse_machine, Ssrt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    Unknown(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FixtureKind {
    Machine,
    Oracle,
    Pair,
}

impl std::fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FixtureKind::Machine => "machine",
            FixtureKind::Oracle => "oracle",
            FixtureKind::Pair => "pair",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub kind: FixtureKind,
    pub machine: Option<Ssrt>,
    pub oracle: Option<Builtin>,
    pub source: Option<&'static str>,
    pub note: &'static str,
}

struct Entry {
    name: &'static str,
    source: Option<&'static str>,
    oracle: Option<BuiltinKind>,
    note: &'static str,
}

const ENTRIES: &[Entry] = &[
    Entry {
        name: "identity_or_reverse",
        source: Some(include_str!("../fixtures/identity_or_reverse.ssrt")),
        oracle: Some(BuiltinKind::IdentityOrReverse),
        note: "identity when the first and last values agree, reverse otherwise; two variables and one register",
    },
    Entry {
        name: "name_reversal",
        source: Some(include_str!("../fixtures/name_reversal.ssrt")),
        oracle: None,
        note: "drops the title and emits surname before given name",
    },
    Entry {
        name: "double_gate",
        source: Some(include_str!("../fixtures/double_gate.ssrt")),
        oracle: Some(BuiltinKind::DoubleGate),
        note: "concatenation of two gates; gate i reverses when the i-th and last values differ",
    },
    Entry {
        name: "third_or_fourth",
        source: Some(include_str!("../fixtures/third_or_fourth.ssrt")),
        oracle: Some(BuiltinKind::ThirdOrFourth),
        note: "empty below length five; otherwise the third or fourth value depending on the first and fifth",
    },
    Entry {
        name: "identity",
        source: Some(include_str!("../fixtures/identity.ssrt")),
        oracle: Some(BuiltinKind::Identity),
        note: "copies its input",
    },
    Entry {
        name: "reverse",
        source: Some(include_str!("../fixtures/reverse.ssrt")),
        oracle: Some(BuiltinKind::Reverse),
        note: "reverses its input",
    },
];

pub fn fixture_names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

pub fn load_fixture(name: &str) -> Result<Fixture, FixtureError> {
    let e = ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| FixtureError::Unknown(name.to_string()))?;
    let machine = e
        .source
        .map(|s| parse_machine(s).unwrap_or_else(|err| panic!("fixture {name}: {err}")));
    let oracle = e.oracle.map(|k| {
        let alphabet = machine
            .as_ref()
            .map(|m| m.input_alphabet.clone())
            .unwrap_or_else(|| crate::words::alphabet("a b"));
        Builtin::with_alphabet(k, alphabet)
    });
    let kind = match (&machine, &oracle) {
        (Some(_), Some(_)) => FixtureKind::Pair,
        (Some(_), None) => FixtureKind::Machine,
        _ => FixtureKind::Oracle,
    };
    Ok(Fixture {
        name: e.name,
        kind,
        machine,
        oracle,
        source: e.source,
        note: e.note,
    })
}

/// All fixtures carrying a machine.
pub fn machine_fixtures() -> Vec<Fixture> {
    ENTRIES
        .iter()
        .filter(|e| e.source.is_some())
        .map(|e| load_fixture(e.name).expect("registered"))
        .collect()
}
