//! Enumeration of data words up to isomorphism.
//!
//! Order: by length, then letter sequence (alphabet order), then value
//! pattern. A value pattern picks, per position, either one of the `known`
//! values or a fresh value; fresh values are introduced in order and at
//! most `fresh.len()` of them are used.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ops::ControlFlow;
use std::rc::Rc;

use crate::words::{DataValue, DataWord, Letter, Symbol};

type Cache<K, T> = RefCell<HashMap<K, Rc<Vec<Vec<T>>>>>;

/// Caches letter sequences and value patterns across enumerations.
#[derive(Default)]
pub struct Enumerator {
    patterns: Cache<(usize, usize, usize), u8>,
    letters: Cache<(Vec<Letter>, usize), Letter>,
}

impl Enumerator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index sequences of length `n`: entries `< known` name known values,
    /// entries `known + j` the `j`-th fresh value, first occurrences of
    /// fresh values in increasing order.
    pub fn patterns(&self, n: usize, known: usize, fresh: usize) -> Rc<Vec<Vec<u8>>> {
        let key = (n, known, fresh);
        if let Some(p) = self.patterns.borrow().get(&key) {
            return p.clone();
        }
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        fn rec(
            n: usize,
            known: usize,
            fresh: usize,
            used: usize,
            cur: &mut Vec<u8>,
            out: &mut Vec<Vec<u8>>,
        ) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            let limit = known + used.min(fresh);
            for x in 0..limit {
                cur.push(x as u8);
                rec(n, known, fresh, used, cur, out);
                cur.pop();
            }
            if used < fresh {
                cur.push((known + used) as u8);
                rec(n, known, fresh, used + 1, cur, out);
                cur.pop();
            }
        }
        rec(n, known, fresh, 0, &mut cur, &mut out);
        let p = Rc::new(out);
        self.patterns.borrow_mut().insert(key, p.clone());
        p
    }

    pub fn letter_sequences(&self, alphabet: &[Letter], n: usize) -> Rc<Vec<Vec<Letter>>> {
        let key = (alphabet.to_vec(), n);
        if let Some(p) = self.letters.borrow().get(&key) {
            return p.clone();
        }
        let mut out: Vec<Vec<Letter>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * alphabet.len());
            for s in &out {
                for &l in alphabet {
                    let mut t = s.clone();
                    t.push(l);
                    next.push(t);
                }
            }
            out = next;
        }
        let p = Rc::new(out);
        self.letters.borrow_mut().insert(key, p.clone());
        p
    }

    /// Calls `cb` on every word of length `≤ max_len` in enumeration order,
    /// writing each word after `base` into `buf` (whose first `base` symbols
    /// are left untouched). Stops early when `cb` breaks.
    pub fn for_each_extension<B>(
        &self,
        alphabet: &[Letter],
        max_len: usize,
        known: &[DataValue],
        fresh: &[DataValue],
        buf: &mut DataWord,
        mut cb: impl FnMut(&mut DataWord) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let base = buf.len();
        let values: Vec<DataValue> = known.iter().chain(fresh).copied().collect();
        for n in 0..=max_len {
            let pats = self.patterns(n, known.len(), fresh.len());
            let lets = self.letter_sequences(alphabet, n);
            for ls in lets.iter() {
                for p in pats.iter() {
                    buf.0.truncate(base);
                    buf.0.extend(
                        ls.iter()
                            .zip(p)
                            .map(|(&l, &i)| Symbol::new(l, values[i as usize])),
                    );
                    cb(buf)?;
                }
            }
        }
        buf.0.truncate(base);
        ControlFlow::Continue(())
    }

    /// All words of length `≤ max_len` up to isomorphism, using at most
    /// `max_distinct` distinct values `d0, d1, …`.
    pub fn canonical_words(
        &self,
        alphabet: &[Letter],
        max_len: usize,
        max_distinct: usize,
    ) -> Vec<DataWord> {
        let fresh: Vec<DataValue> = (0..max_distinct as u64).map(DataValue).collect();
        let mut out = Vec::new();
        let mut buf = DataWord::empty();
        let _ = self.for_each_extension::<()>(alphabet, max_len, &[], &fresh, &mut buf, |w| {
            out.push(w.clone());
            ControlFlow::Continue(())
        });
        out
    }
}

/// All words of length `≤ max_len` up to isomorphism over `alphabet`.
pub fn canonical_words(alphabet: &[Letter], max_len: usize) -> Vec<DataWord> {
    Enumerator::new().canonical_words(alphabet, max_len, max_len)
}

/// Like [`canonical_words`] with at most `max_distinct` distinct values.
pub fn canonical_words_with(
    alphabet: &[Letter],
    max_len: usize,
    max_distinct: usize,
) -> Vec<DataWord> {
    Enumerator::new().canonical_words(alphabet, max_len, max_distinct)
}

/// Witness-band values not occurring in `avoid`, in increasing order.
pub fn witness_values(avoid: &[DataValue], n: usize) -> Vec<DataValue> {
    (0..)
        .map(DataValue::witness)
        .filter(|v| !avoid.contains(v))
        .take(n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{alphabet, canonical_form, isomorphic};

    fn bell(n: usize) -> usize {
        [1, 1, 2, 5, 15, 52, 203][n]
    }

    #[test]
    fn counts_match_bell_numbers() {
        let ab = alphabet("a b");
        let ws = canonical_words(&ab, 4);
        let expected: usize = (0..=4).map(|n| 2usize.pow(n as u32) * bell(n)).sum();
        assert_eq!(ws.len(), expected);
        for (i, w) in ws.iter().enumerate() {
            assert_eq!(&canonical_form(w), w);
            for v in &ws[..i] {
                assert!(!isomorphic(v, w));
            }
        }
    }

    #[test]
    fn known_values_come_first() {
        let e = Enumerator::new();
        let p = e.patterns(2, 1, 1);
        assert_eq!(*p, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }
}
