//! Oracles and bounded realizations of the machine-independent notions:
//! memorable, vulnerable and influencing values, `≡_f`, the equalizing
//! scheme, `≡_f^E`, `≡_S` and the forward property checks.
//!
//! Every quantifier over data words is bounded by [`Bounds`] and ranges over
//! words up to isomorphism. Positive influence verdicts and most
//! distinctions come with replayable witnesses; equivalences are `bounded`.

mod enumerate;
mod equiv;
mod influence;
mod oracle;
mod properties;
mod sequiv;

use thiserror::Error;

pub use enumerate::{canonical_words, canonical_words_with, witness_values, Enumerator};
pub use equiv::{Counterexample, EquivWitness, Label, PrefixClasses, SuffixPartition, Verdict};
pub use influence::{
    Analyzer, Influence, InfluenceKind, MemorableWitness, TypedInfluence, VulnerableWitness,
};
pub use oracle::{
    builtin, Builtin, BuiltinKind, FnOracle, MachineOracle, Provenance, Transduction,
};
pub use properties::{
    check_forward_properties, check_theorem_properties, peeking_position, PropertyViolation,
    TheoremReport,
};
pub use sequiv::{machine_equiv, machine_equiv_with, SProfile};

use crate::machine::MachineError;
use crate::words::{DataWord, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("unknown oracle `{0}`")]
    UnknownOracle(String),
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("run of the machine is stuck on {0}")]
    NotComparable(DataWord),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Limits on the words quantified over by the bounded analyses.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Bounds {
    /// Longest suffix `v` tried as a witness.
    pub max_word_len: usize,
    /// Values beyond those already present: suffixes use up to
    /// `fresh_values - 1` new values, the last one is kept as a spare
    /// replacement.
    pub fresh_values: usize,
    /// Longest `u'` in vulnerability witnesses and `u` in the third
    /// condition of `≡_f`.
    pub max_ext_len: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_word_len: 4,
            fresh_values: 3,
            max_ext_len: 2,
        }
    }
}

impl Bounds {
    pub fn new(
        max_word_len: usize,
        fresh_values: usize,
        max_ext_len: usize,
    ) -> Result<Self, AnalysisError> {
        if max_word_len == 0 || max_ext_len == 0 {
            return Err(AnalysisError::InvalidBounds(
                "word and extension lengths must be at least 1".into(),
            ));
        }
        if fresh_values < 2 {
            return Err(AnalysisError::InvalidBounds(
                "fresh_values must be at least 2".into(),
            ));
        }
        Ok(Bounds {
            max_word_len,
            fresh_values,
            max_ext_len,
        })
    }
}

impl std::fmt::Display for Bounds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "max_word_len={} fresh_values={} max_ext_len={}",
            self.max_word_len, self.fresh_values, self.max_ext_len
        )
    }
}

pub fn memorable_values(f: &dyn Transduction, u: &DataWord, b: Bounds) -> Vec<MemorableWitness> {
    Analyzer::new(f, b).memorable_values(u)
}

pub fn vulnerable_values(f: &dyn Transduction, u: &DataWord, b: Bounds) -> Vec<VulnerableWitness> {
    Analyzer::new(f, b).vulnerable_values(u)
}

pub fn aifl(f: &dyn Transduction, u: &DataWord, b: Bounds) -> Vec<TypedInfluence> {
    Analyzer::new(f, b).aifl(u)
}

pub fn f_equiv(f: &dyn Transduction, u1: &DataWord, u2: &DataWord, b: Bounds) -> EquivWitness {
    Analyzer::new(f, b).f_equiv(u1, u2)
}

pub fn equalize(f: &dyn Transduction, u: &DataWord, b: Bounds) -> Permutation {
    Analyzer::new(f, b).equalize(u)
}

pub fn suffix_equiv(
    f: &dyn Transduction,
    v1: &DataWord,
    v2: &DataWord,
    prefixes: &[DataWord],
    b: Bounds,
) -> EquivWitness {
    Analyzer::new(f, b).suffix_equiv(v1, v2, prefixes)
}

/// Text report of the influence analysis of `u`, one record per line.
pub fn influence_report(an: &Analyzer, u: &DataWord) -> String {
    let inf = an.influence(u);
    let mut s = String::new();
    for m in &inf.memorable {
        s.push_str(&format!(
            "MEMORABLE {} WITNESS v=[{}] d'={} proven\n",
            m.value, m.v, m.replacement
        ));
    }
    for m in &inf.vulnerable {
        s.push_str(&format!(
            "VULNERABLE {} WITNESS u'=[{}] v=[{}] d'={} proven\n",
            m.value, m.ext, m.v, m.replacement
        ));
    }
    let a: Vec<String> = an.aifl(u).iter().map(|t| t.to_string()).collect();
    s.push_str(&format!("AIFL [{}] bounded {}\n", a.join(" "), an.bounds()));
    s
}
