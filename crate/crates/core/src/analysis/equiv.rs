//! Bounded checks of the prefix equivalence `≡_f` and of the suffix
//! equivalence `≡_f^E`, and the class registries built on top of them.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;

use crate::factored::{right_abstract, FactoredOutput, Mask};
use crate::words::{DataValue, DataWord, Permutation};

use super::enumerate::witness_values;
use super::influence::{Analyzer, TypedInfluence};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Equivalent,
    Distinguished,
}

/// Soundness label: equivalences hold only up to the bounds; most
/// distinctions are backed by a concrete counterexample.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Label {
    Bounded,
    Proven,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Bounded => "bounded",
            Label::Proven => "proven",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample {
    /// Which condition failed (1, 2 or 3 for `≡_f`; 0 for `≡_f^E`).
    pub condition: u8,
    pub words: Vec<(String, DataWord)>,
    pub outputs: (String, String),
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(cond={}", self.condition)?;
        for (k, w) in &self.words {
            write!(f, ";{k}=[{w}]")?;
        }
        write!(f, ";out1=[{}];out2=[{}])", self.outputs.0, self.outputs.1)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquivWitness {
    pub verdict: Verdict,
    pub label: Label,
    pub permutation: Option<Permutation>,
    pub counterexample: Option<Counterexample>,
}

impl EquivWitness {
    pub fn is_equivalent(&self) -> bool {
        self.verdict == Verdict::Equivalent
    }

    fn equivalent(p: Option<Permutation>) -> Self {
        EquivWitness {
            verdict: Verdict::Equivalent,
            label: Label::Bounded,
            permutation: p,
            counterexample: None,
        }
    }

    fn distinguished(label: Label, cex: Counterexample) -> Self {
        EquivWitness {
            verdict: Verdict::Distinguished,
            label,
            permutation: None,
            counterexample: Some(cex),
        }
    }

    /// `EQUIV u1 u2 PI=<map>` or `DISTINGUISHED u1 u2 CEX=<tuple>`.
    pub fn render(&self, u1: &DataWord, u2: &DataWord) -> String {
        match self.verdict {
            Verdict::Equivalent => format!(
                "EQUIV [{u1}] [{u2}] PI={} {}",
                self.permutation.clone().unwrap_or_default(),
                self.label
            ),
            Verdict::Distinguished => format!(
                "DISTINGUISHED [{u1}] [{u2}] CEX={} {}",
                self.counterexample
                    .as_ref()
                    .expect("distinguished verdicts carry a counterexample"),
                self.label
            ),
        }
    }
}

fn show(fo: &Option<FactoredOutput>) -> String {
    match fo {
        Some(x) => x.to_string(),
        None => "UNDEFINED".to_string(),
    }
}

fn show_ifl(a: &[TypedInfluence]) -> String {
    let v: Vec<String> = a.iter().map(|t| t.to_string()).collect();
    v.join(",")
}

fn merged_values(a: &DataWord, b: &DataWord) -> Vec<DataValue> {
    let mut vals = a.values();
    for d in b.values() {
        if !vals.contains(&d) {
            vals.push(d);
        }
    }
    vals
}

impl Analyzer<'_> {
    /// Bounded check of `u1 ≡_f u2`. The permutation `π` is forced on the
    /// influencing values by the freshness condition; the remaining values
    /// of `u2` are sent to unused values.
    pub fn f_equiv(&self, u1: &DataWord, u2: &DataWord) -> EquivWitness {
        let b = self.bounds();
        let a1 = self.aifl(u1);
        let a2 = self.aifl(u2);
        let cond2 = |a2: &[TypedInfluence]| Counterexample {
            condition: 2,
            words: vec![("u1".into(), u1.clone()), ("u2".into(), u2.clone())],
            outputs: (show_ifl(&a1), show_ifl(a2)),
        };
        if a1.len() != a2.len() || a1.iter().zip(&a2).any(|(x, y)| x.kind != y.kind) {
            return EquivWitness::distinguished(Label::Bounded, cond2(&a2));
        }
        let mut pairs: Vec<(DataValue, DataValue)> = a2
            .iter()
            .zip(&a1)
            .map(|(x, y)| (x.value, y.value))
            .collect();
        let both = merged_values(u1, u2);
        let rest: Vec<DataValue> = u2
            .values()
            .into_iter()
            .filter(|d| !a2.iter().any(|t| t.value == *d))
            .collect();
        for (d, t) in rest.iter().zip(witness_values(&both, rest.len())) {
            pairs.push((*d, t));
        }
        let pi = Permutation::complete(pairs).expect("forced map is injective");
        let p2 = pi.apply_word(u2);
        let pa2 = self.aifl(&p2);
        if pa2 != a1 {
            return EquivWitness::distinguished(Label::Bounded, cond2(&pa2));
        }

        // Condition 1: λv. f_z(π(u2)̲ | v) = f(u1̲ | v).
        let z = u1.len() as i64 - u2.len() as i64;
        let vals = merged_values(u1, &p2);
        let fresh = witness_values(&vals, b.fresh_values - 1);
        let (n1, n2) = (u1.len(), p2.len());
        let mut buf = DataWord::empty();
        let mut w2 = DataWord::empty();
        let found = self.en.for_each_extension(
            self.oracle().alphabet(),
            b.max_word_len,
            &vals,
            &fresh,
            &mut buf,
            |v| {
                let x1 = self.fo(&u1.concat(v), n1, Mask::LEFT, 0);
                w2.0.clear();
                w2.0.extend_from_slice(&p2.0);
                w2.0.extend_from_slice(&v.0);
                let x2 = self.fo(&w2, n2, Mask::LEFT, z);
                if x1 != x2 {
                    ControlFlow::Break(Counterexample {
                        condition: 1,
                        words: vec![
                            ("u1".into(), u1.clone()),
                            ("pi(u2)".into(), p2.clone()),
                            ("v".into(), v.clone()),
                        ],
                        outputs: (show(&x1), show(&x2)),
                    })
                } else {
                    ControlFlow::Continue(())
                }
            },
        );
        if let ControlFlow::Break(cex) = found {
            return EquivWitness::distinguished(Label::Proven, cex);
        }

        // Condition 3: the partitions of suffixes induced by f(u1·u | v̲)
        // and f(π(u2)·u | v̲) coincide, for every bounded u.
        let ext_fresh = witness_values(&vals, b.max_ext_len);
        let mut ubuf = DataWord::empty();
        let found = self.en.for_each_extension(
            self.oracle().alphabet(),
            b.max_ext_len,
            &vals,
            &ext_fresh,
            &mut ubuf,
            |u| {
                let x1 = u1.concat(u);
                let x2 = p2.concat(u);
                match self.partition_mismatch(&x1, &x2) {
                    Some((v1, v2, o)) => ControlFlow::Break(Counterexample {
                        condition: 3,
                        words: vec![
                            ("u1".into(), u1.clone()),
                            ("pi(u2)".into(), p2.clone()),
                            ("u".into(), u.clone()),
                            ("v1".into(), v1),
                            ("v2".into(), v2),
                        ],
                        outputs: o,
                    }),
                    None => ControlFlow::Continue(()),
                }
            },
        );
        if let ControlFlow::Break(cex) = found {
            return EquivWitness::distinguished(Label::Proven, cex);
        }
        EquivWitness::equivalent(Some(pi))
    }

    /// Looks for `v1, v2` with `f(x1|v̲1) = f(x1|v̲2)` but
    /// `f(x2|v̲1) ≠ f(x2|v̲2)` or the converse.
    fn partition_mismatch(
        &self,
        x1: &DataWord,
        x2: &DataWord,
    ) -> Option<(DataWord, DataWord, (String, String))> {
        let b = self.bounds();
        let vals = merged_values(x1, x2);
        let fresh = witness_values(&vals, b.fresh_values - 1);
        let mut first1: HashMap<Option<FactoredOutput>, DataWord> = HashMap::new();
        let mut first2: HashMap<Option<FactoredOutput>, DataWord> = HashMap::new();
        let mut buf = DataWord::empty();
        let r = self.en.for_each_extension(
            self.oracle().alphabet(),
            b.max_word_len,
            &vals,
            &fresh,
            &mut buf,
            |v| {
                let o1 = right_abstract(self.oracle(), x1, v);
                let o2 = right_abstract(self.oracle(), x2, v);
                let r1 = first1.get(&o1).cloned();
                let r2 = first2.get(&o2).cloned();
                match (r1, r2) {
                    (None, None) => {
                        first1.insert(o1, v.clone());
                        first2.insert(o2, v.clone());
                        ControlFlow::Continue(())
                    }
                    (Some(a), Some(b)) if a == b => ControlFlow::Continue(()),
                    (Some(a), _) => {
                        let o2a = right_abstract(self.oracle(), x2, &a);
                        ControlFlow::Break((a, v.clone(), (show(&o2a), show(&o2))))
                    }
                    (None, Some(b)) => {
                        let o1b = right_abstract(self.oracle(), x1, &b);
                        ControlFlow::Break((b, v.clone(), (show(&o1b), show(&o1))))
                    }
                }
            },
        );
        match r {
            ControlFlow::Break(x) => Some(x),
            ControlFlow::Continue(()) => None,
        }
    }

    /// `f(E(u)(u) | v̲)` for each prefix.
    pub fn suffix_signature(
        &self,
        eq_prefixes: &[DataWord],
        v: &DataWord,
    ) -> Vec<Option<FactoredOutput>> {
        eq_prefixes
            .iter()
            .map(|uq| right_abstract(self.oracle(), uq, v))
            .collect()
    }

    /// Bounded check of `v1 ≡_f^E v2` over the given prefixes.
    pub fn suffix_equiv(
        &self,
        v1: &DataWord,
        v2: &DataWord,
        prefixes: &[DataWord],
    ) -> EquivWitness {
        for u in prefixes {
            let uq = self.equalize(u).apply_word(u);
            let o1 = right_abstract(self.oracle(), &uq, v1);
            let o2 = right_abstract(self.oracle(), &uq, v2);
            if o1 != o2 {
                return EquivWitness::distinguished(
                    Label::Proven,
                    Counterexample {
                        condition: 0,
                        words: vec![
                            ("u".into(), u.clone()),
                            ("E(u)(u)".into(), uq),
                            ("v1".into(), v1.clone()),
                            ("v2".into(), v2.clone()),
                        ],
                        outputs: (show(&o1), show(&o2)),
                    },
                );
            }
        }
        EquivWitness::equivalent(None)
    }
}

/// Classes of `≡_f` discovered so far, each with its first member as the
/// representative. Class 0 is `[ε]`.
#[derive(Clone, Debug)]
pub struct PrefixClasses {
    reps: Vec<DataWord>,
    memo: HashMap<DataWord, usize>,
}

impl Default for PrefixClasses {
    fn default() -> Self {
        Self::new()
    }
}

impl PrefixClasses {
    pub fn new() -> Self {
        let mut memo = HashMap::new();
        memo.insert(DataWord::empty(), 0);
        PrefixClasses {
            reps: vec![DataWord::empty()],
            memo,
        }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, c: usize) -> &DataWord {
        &self.reps[c]
    }

    pub fn reps(&self) -> &[DataWord] {
        &self.reps
    }

    /// Class of `w`; opens a new class if no representative is equivalent.
    pub fn classify(&mut self, an: &Analyzer, w: &DataWord) -> usize {
        let key = crate::words::canonical_form(w);
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        let c = (0..self.reps.len())
            .find(|&c| {
                self.reps[c].is_empty() == w.is_empty()
                    && an.f_equiv(&self.reps[c], w).is_equivalent()
            })
            .unwrap_or_else(|| {
                self.reps.push(w.clone());
                self.reps.len() - 1
            });
        self.memo.insert(key, c);
        c
    }
}

/// A bounded partition of suffixes by `≡_f^E`. Class 0 is `[ε]`.
#[derive(Clone, Debug)]
pub struct SuffixPartition {
    prefixes: Vec<DataWord>,
    equalized: Vec<DataWord>,
    reps: Vec<DataWord>,
    index: HashMap<Vec<Option<FactoredOutput>>, usize>,
    suffix_len: usize,
    deltas: usize,
}

impl SuffixPartition {
    /// Partitions suffixes of length `≤ max_suffix_len` over
    /// `δ_1 … δ_deltas` and fresh values. Class ids follow enumeration
    /// order, so shorter representatives come first.
    pub fn build(
        an: &Analyzer,
        prefixes: Vec<DataWord>,
        deltas: usize,
        max_suffix_len: usize,
    ) -> Self {
        let equalized: Vec<DataWord> = prefixes
            .iter()
            .map(|u| an.equalize(u).apply_word(u))
            .collect();
        let known: Vec<DataValue> = (1..=deltas).map(DataValue::delta).collect();
        let fresh = witness_values(&[], an.bounds().fresh_values - 1);
        let mut reps = Vec::new();
        let mut index = HashMap::new();
        let mut buf = DataWord::empty();
        let _ = an.en.for_each_extension::<()>(
            an.oracle().alphabet(),
            max_suffix_len,
            &known,
            &fresh,
            &mut buf,
            |v| {
                let sig = an.suffix_signature(&equalized, v);
                index.entry(sig).or_insert_with(|| {
                    reps.push(v.clone());
                    reps.len() - 1
                });
                ControlFlow::Continue(())
            },
        );
        SuffixPartition {
            prefixes,
            equalized,
            reps,
            index,
            suffix_len: max_suffix_len,
            deltas,
        }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, s: usize) -> &DataWord {
        &self.reps[s]
    }

    pub fn reps(&self) -> &[DataWord] {
        &self.reps
    }

    pub fn prefixes(&self) -> &[DataWord] {
        &self.prefixes
    }

    pub fn equalized_prefixes(&self) -> &[DataWord] {
        &self.equalized
    }

    pub fn suffix_len(&self) -> usize {
        self.suffix_len
    }

    pub fn deltas(&self) -> usize {
        self.deltas
    }

    /// Class of `v`, or `None` if its signature matches no class.
    pub fn classify(&self, an: &Analyzer, v: &DataWord) -> Option<usize> {
        self.index
            .get(&an.suffix_signature(&self.equalized, v))
            .copied()
    }
}
