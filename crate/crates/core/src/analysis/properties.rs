//! Forward-direction checks: permutation invariance, no data peeking,
//! linear blow-up, and an estimate of the index of `≡_f`.

use std::collections::HashMap;
use std::fmt;

use crate::words::{DataValue, DataWord, OriginWord, Permutation};

use super::enumerate::{canonical_words, witness_values};
use super::{Analyzer, Bounds, PrefixClasses, Transduction};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PropertyViolation {
    NotPermutationInvariant {
        word: DataWord,
        permutation: Permutation,
    },
    DataPeeking {
        word: DataWord,
        output: OriginWord,
        position: usize,
    },
    Undefined(DataWord),
}

impl fmt::Display for PropertyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyViolation::NotPermutationInvariant { word, permutation } => {
                write!(f, "f(pi(w)) != pi(f(w)) for w=[{word}] pi={permutation}")
            }
            PropertyViolation::DataPeeking {
                word,
                output,
                position,
            } => write!(
                f,
                "output position {position} of [{output}] on w=[{word}] carries a value not yet read"
            ),
            PropertyViolation::Undefined(w) => write!(f, "f undefined on [{w}]"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub words_checked: usize,
    pub perm_invariant: Option<PropertyViolation>,
    pub no_data_peeking: Option<PropertyViolation>,
    /// Largest number of output positions sharing one origin.
    pub blowup_constant: usize,
    /// Number of `≡_f` classes among the partitioned words, if computed.
    pub equiv_index_estimate: Option<usize>,
}

impl TheoremReport {
    pub fn passes(&self) -> bool {
        self.perm_invariant.is_none() && self.no_data_peeking.is_none()
    }

    pub fn render(&self) -> String {
        let verdict = |v: &Option<PropertyViolation>| match v {
            None => "PASS".to_string(),
            Some(x) => format!("FAIL {x}"),
        };
        let mut s = format!(
            "WORDS {}\nPERM_INVARIANT {}\nNO_DATA_PEEKING {}\nBLOWUP {}\n",
            self.words_checked,
            verdict(&self.perm_invariant),
            verdict(&self.no_data_peeking),
            self.blowup_constant
        );
        if let Some(n) = self.equiv_index_estimate {
            s.push_str(&format!("EQUIV_CLASSES {n} bounded\n"));
        }
        s
    }
}

/// Output triples whose value does not occur at or before their origin.
pub fn peeking_position(w: &DataWord, out: &OriginWord) -> Option<usize> {
    out.triples().iter().position(|t| {
        t.origin == 0
            || t.origin > w.len()
            || !w.symbols()[..t.origin].iter().any(|s| s.value == t.value)
    })
}

fn max_per_origin(out: &OriginWord) -> usize {
    let mut count: HashMap<usize, usize> = HashMap::new();
    for t in out.triples() {
        *count.entry(t.origin).or_default() += 1;
    }
    count.values().copied().max().unwrap_or(0)
}

/// Permutations tried per word: a rename of every value into an unused
/// band, and a transposition of the first two values.
fn sample_permutations(w: &DataWord) -> Vec<Permutation> {
    let vals = w.values();
    let targets = witness_values(&vals, vals.len());
    let mut out = vec![Permutation::complete(vals.iter().copied().zip(targets)).unwrap()];
    if vals.len() >= 2 {
        out.push(Permutation::swap(vals[0], vals[1]));
    }
    out.push(Permutation::swap(
        vals.first().copied().unwrap_or(DataValue(0)),
        DataValue::witness(99),
    ));
    out
}

/// Permutation invariance, data peeking and blow-up over all words up to
/// `b.max_word_len`.
pub fn check_forward_properties(f: &dyn Transduction, b: Bounds) -> TheoremReport {
    let words = canonical_words(f.alphabet(), b.max_word_len);
    let mut perm = None;
    let mut peek = None;
    let mut blowup = 0;
    for w in &words {
        let Some(out) = f.apply(w) else {
            continue;
        };
        blowup = blowup.max(max_per_origin(&out));
        if peek.is_none() {
            if let Some(p) = peeking_position(w, &out) {
                peek = Some(PropertyViolation::DataPeeking {
                    word: w.clone(),
                    output: out.clone(),
                    position: p + 1,
                });
            }
        }
        if perm.is_none() {
            for p in sample_permutations(w) {
                let lhs = f.apply(&p.apply_word(w));
                if lhs != Some(p.apply_origin_word(&out)) {
                    perm = Some(PropertyViolation::NotPermutationInvariant {
                        word: w.clone(),
                        permutation: p,
                    });
                    break;
                }
            }
        }
    }
    TheoremReport {
        words_checked: words.len(),
        perm_invariant: perm,
        no_data_peeking: peek,
        blowup_constant: blowup,
        equiv_index_estimate: None,
    }
}

/// [`check_forward_properties`] plus the number of `≡_f` classes among all
/// words of length `≤ b.max_ext_len`.
pub fn check_theorem_properties(f: &dyn Transduction, b: Bounds) -> TheoremReport {
    let mut r = check_forward_properties(f, b);
    let an = Analyzer::new(f, b);
    let mut classes = PrefixClasses::new();
    for w in canonical_words(f.alphabet(), b.max_ext_len) {
        classes.classify(&an, &w);
    }
    r.equiv_index_estimate = Some(classes.len());
    r
}
