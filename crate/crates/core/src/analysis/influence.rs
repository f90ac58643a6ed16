//! Memorable, vulnerable and influencing values, and the equalizing scheme.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::rc::Rc;

use crate::factored::{factor_eval, Cuts, FactoredOutput, Mask};
use crate::words::{canonical_renaming, DataValue, DataWord, Permutation, Symbol};

use super::enumerate::{witness_values, Enumerator};
use super::{Bounds, Transduction};

/// `d` is memorable: `f(u[d/d']̲ | v) ≠ f(u̲ | v)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MemorableWitness {
    pub value: DataValue,
    pub v: DataWord,
    pub replacement: DataValue,
}

/// `d` is vulnerable: `f(u·u' | v[d/d']̲) ≠ f(u·u' | v̲)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VulnerableWitness {
    pub value: DataValue,
    pub ext: DataWord,
    pub v: DataWord,
    pub replacement: DataValue,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Influence {
    pub memorable: Vec<MemorableWitness>,
    pub vulnerable: Vec<VulnerableWitness>,
}

impl Influence {
    fn rename(&self, p: &Permutation) -> Influence {
        Influence {
            memorable: self
                .memorable
                .iter()
                .map(|m| MemorableWitness {
                    value: p.apply(m.value),
                    v: p.apply_word(&m.v),
                    replacement: p.apply(m.replacement),
                })
                .collect(),
            vulnerable: self
                .vulnerable
                .iter()
                .map(|m| VulnerableWitness {
                    value: p.apply(m.value),
                    ext: p.apply_word(&m.ext),
                    v: p.apply_word(&m.v),
                    replacement: p.apply(m.replacement),
                })
                .collect(),
        }
    }

    pub fn is_memorable(&self, d: DataValue) -> bool {
        self.memorable.iter().any(|m| m.value == d)
    }

    pub fn is_vulnerable(&self, d: DataValue) -> bool {
        self.vulnerable.iter().any(|m| m.value == d)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum InfluenceKind {
    Vm,
    M,
    V,
}

impl fmt::Display for InfluenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfluenceKind::Vm => "vm",
            InfluenceKind::M => "m",
            InfluenceKind::V => "v",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TypedInfluence {
    pub value: DataValue,
    pub kind: InfluenceKind,
}

impl fmt::Display for TypedInfluence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.value, self.kind)
    }
}

/// Bounded analyses of one transduction, memoized up to isomorphism.
pub struct Analyzer<'a> {
    f: &'a dyn Transduction,
    b: Bounds,
    pub(crate) en: Enumerator,
    influence: RefCell<HashMap<DataWord, Rc<Influence>>>,
}

impl<'a> Analyzer<'a> {
    pub fn new(f: &'a dyn Transduction, b: Bounds) -> Self {
        Analyzer {
            f,
            b,
            en: Enumerator::new(),
            influence: RefCell::new(HashMap::new()),
        }
    }

    pub fn oracle(&self) -> &'a dyn Transduction {
        self.f
    }

    pub fn bounds(&self) -> Bounds {
        self.b
    }

    pub(crate) fn fo(
        &self,
        w: &DataWord,
        cut: usize,
        mask: Mask,
        z: i64,
    ) -> Option<FactoredOutput> {
        factor_eval(self.f, w, Cuts::two(cut), mask, z)
    }

    /// Memorable and vulnerable values of `u` with witnesses.
    pub fn influence(&self, u: &DataWord) -> Influence {
        let (c, back) = canonical_renaming(u);
        let cached = self.influence.borrow().get(&c).cloned();
        let inf = match cached {
            Some(i) => i,
            None => {
                let i = Rc::new(Influence {
                    memorable: self.compute_memorable(&c),
                    vulnerable: self.compute_vulnerable(&c),
                });
                self.influence.borrow_mut().insert(c, i.clone());
                i
            }
        };
        inf.rename(&back)
    }

    pub fn memorable_values(&self, u: &DataWord) -> Vec<MemorableWitness> {
        self.influence(u).memorable
    }

    pub fn vulnerable_values(&self, u: &DataWord) -> Vec<VulnerableWitness> {
        self.influence(u).vulnerable
    }

    /// Influencing values of `u`, freshest first.
    pub fn aifl(&self, u: &DataWord) -> Vec<TypedInfluence> {
        let inf = self.influence(u);
        let mut out: Vec<TypedInfluence> = u
            .values()
            .into_iter()
            .filter_map(|d| {
                let kind = match (inf.is_vulnerable(d), inf.is_memorable(d)) {
                    (true, true) => InfluenceKind::Vm,
                    (false, true) => InfluenceKind::M,
                    (true, false) => InfluenceKind::V,
                    (false, false) => return None,
                };
                Some(TypedInfluence { value: d, kind })
            })
            .collect();
        out.sort_by_key(|t| std::cmp::Reverse(u.last_occurrence(t.value)));
        out
    }

    /// `E(u)`: the `i`-th influencing value goes to `δ_i`, the others to the
    /// fresh band `F1, F2, …` in order of first occurrence.
    pub fn equalize(&self, u: &DataWord) -> Permutation {
        let ifl = self.aifl(u);
        let mut pairs: Vec<(DataValue, DataValue)> = ifl
            .iter()
            .enumerate()
            .map(|(i, t)| (t.value, DataValue::delta(i + 1)))
            .collect();
        let mut j = 1;
        for d in u.values() {
            if !ifl.iter().any(|t| t.value == d) {
                pairs.push((d, DataValue::fresh(j)));
                j += 1;
            }
        }
        Permutation::complete(pairs).expect("equalizing map is injective")
    }

    fn compute_memorable(&self, c: &DataWord) -> Vec<MemorableWitness> {
        let known = c.values();
        let n = c.len();
        let pool = witness_values(&known, self.b.fresh_values);
        let vfresh = &pool[..pool.len() - 1];
        let mut undecided = known.clone();
        let mut found = Vec::new();
        let mut buf = c.clone();
        let mut alt = DataWord::empty();
        let _ = self.en.for_each_extension::<()>(
            self.f.alphabet(),
            self.b.max_word_len,
            &known,
            vfresh,
            &mut buf,
            |w| {
                let base = self.fo(w, n, Mask::LEFT, 0);
                undecided.retain(|&d| {
                    for &d2 in &pool {
                        alt.0.clear();
                        alt.0.extend(w.0.iter().enumerate().map(|(i, s)| {
                            if i < n && s.value == d {
                                Symbol::new(s.letter, d2)
                            } else {
                                *s
                            }
                        }));
                        if self.fo(&alt, n, Mask::LEFT, 0) != base {
                            found.push(MemorableWitness {
                                value: d,
                                v: w.suffix_from(n),
                                replacement: d2,
                            });
                            return false;
                        }
                    }
                    true
                });
                if undecided.is_empty() {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        );
        found.sort_by_key(|m| known.iter().position(|&d| d == m.value));
        found
    }

    fn compute_vulnerable(&self, c: &DataWord) -> Vec<VulnerableWitness> {
        let known = c.values();
        let n = c.len();
        let mut undecided = known.clone();
        let mut found = Vec::new();
        let ext_fresh = witness_values(&known, self.b.max_ext_len);
        let mut ubuf = c.clone();
        let mut alt = DataWord::empty();
        let _ = self.en.for_each_extension::<()>(
            self.f.alphabet(),
            self.b.max_ext_len,
            &known,
            &ext_fresh,
            &mut ubuf,
            |x| {
                let cands: Vec<DataValue> = undecided
                    .iter()
                    .copied()
                    .filter(|&d| !x.0[n..].iter().any(|s| s.value == d))
                    .collect();
                if cands.is_empty() {
                    return ControlFlow::Continue(());
                }
                let xn = x.len();
                let xvals = x.values();
                let avail = witness_values(&xvals, self.b.fresh_values);
                let (vfresh, spare) = (&avail[..avail.len() - 1], avail[avail.len() - 1]);
                let mut vbuf = x.clone();
                let mut open = cands.clone();
                let _ = self.en.for_each_extension::<()>(
                    self.f.alphabet(),
                    self.b.max_word_len,
                    &xvals,
                    vfresh,
                    &mut vbuf,
                    |w| {
                        let mut base: Option<Option<FactoredOutput>> = None;
                        open.retain(|&d| {
                            if !w.0[xn..].iter().any(|s| s.value == d) {
                                return true;
                            }
                            let base = base.get_or_insert_with(|| self.fo(w, xn, Mask::RIGHT, 0));
                            alt.0.clear();
                            alt.0.extend(w.0.iter().enumerate().map(|(i, s)| {
                                if i >= xn && s.value == d {
                                    Symbol::new(s.letter, spare)
                                } else {
                                    *s
                                }
                            }));
                            if self.fo(&alt, xn, Mask::RIGHT, 0) != *base {
                                found.push(VulnerableWitness {
                                    value: d,
                                    ext: x.suffix_from(n),
                                    v: w.suffix_from(xn),
                                    replacement: spare,
                                });
                                return false;
                            }
                            true
                        });
                        if open.is_empty() {
                            ControlFlow::Break(())
                        } else {
                            ControlFlow::Continue(())
                        }
                    },
                );
                undecided.retain(|d| open.contains(d) || !cands.contains(d));
                if undecided.is_empty() {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        );
        found.sort_by_key(|m| known.iter().position(|&d| d == m.value));
        found
    }

    /// Replays a memorable witness through the oracle.
    pub fn replay_memorable(&self, u: &DataWord, w: &MemorableWitness) -> bool {
        let n = u.len();
        w.replacement != w.value
            && !u.contains_value(w.replacement)
            && u.contains_value(w.value)
            && self.fo(
                &crate::words::substitute(u, w.value, w.replacement).concat(&w.v),
                n,
                Mask::LEFT,
                0,
            ) != self.fo(&u.concat(&w.v), n, Mask::LEFT, 0)
    }

    /// Replays a vulnerable witness through the oracle.
    pub fn replay_vulnerable(&self, u: &DataWord, w: &VulnerableWitness) -> bool {
        let x = u.concat(&w.ext);
        let whole = x.concat(&w.v);
        u.contains_value(w.value)
            && !w.ext.contains_value(w.value)
            && !whole.contains_value(w.replacement)
            && self.fo(
                &x.concat(&crate::words::substitute(&w.v, w.value, w.replacement)),
                x.len(),
                Mask::RIGHT,
                0,
            ) != self.fo(&whole, x.len(), Mask::RIGHT, 0)
    }
}
