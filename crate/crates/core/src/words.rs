//! Data words, origin words and permutations of data values.
//!
//! Data values are opaque integers compared only for equality. A few high
//! integer bands are reserved for values the analysis invents: the `δ_i`
//! of an equalizing scheme, canonical fresh values, and witness values used
//! during bounded enumeration.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use thiserror::Error;

/// Start of the band holding `δ_1, δ_2, …` (`δ_i = DELTA_BASE + i`).
pub const DELTA_BASE: u64 = 1 << 40;
/// Start of the band of canonical fresh values. `FRESH_BASE` itself is `δ_0`.
pub const FRESH_BASE: u64 = 1 << 41;
/// Start of the band of witness values drawn during enumeration.
pub const WITNESS_BASE: u64 = 1 << 42;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("malformed token `{0}`: expected letter:value")]
    MalformedToken(String),
    #[error("malformed data value `{0}`")]
    MalformedValue(String),
    #[error("malformed origin in `{0}`")]
    MalformedOrigin(String),
    #[error("invalid letter name `{0}`")]
    InvalidLetter(String),
    #[error("value {0} lies in a reserved band")]
    ReservedValue(DataValue),
    #[error("mapping is not injective: {0} has two preimages")]
    NotInjective(DataValue),
    #[error("mapping is not a bijection on its support")]
    NotBijective,
}

/// An element of the infinite data domain.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataValue(pub u64);

impl DataValue {
    /// `δ_i` for `i ≥ 1`; `delta(0)` is `δ_0`, the first fresh value.
    pub fn delta(i: usize) -> DataValue {
        if i == 0 {
            DataValue(FRESH_BASE)
        } else {
            DataValue(DELTA_BASE + i as u64)
        }
    }

    pub fn fresh(j: usize) -> DataValue {
        DataValue(FRESH_BASE + j as u64)
    }

    pub fn witness(j: usize) -> DataValue {
        DataValue(WITNESS_BASE + j as u64)
    }

    pub fn is_reserved(self) -> bool {
        self.0 >= DELTA_BASE
    }

    /// Index `i` if this is `δ_i` with `i ≥ 1`.
    pub fn delta_index(self) -> Option<usize> {
        (self.0 > DELTA_BASE && self.0 < FRESH_BASE).then(|| (self.0 - DELTA_BASE) as usize)
    }
}

impl fmt::Display for DataValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0;
        if v >= WITNESS_BASE {
            write!(f, "W{}", v - WITNESS_BASE)
        } else if v >= FRESH_BASE {
            write!(f, "F{}", v - FRESH_BASE)
        } else if v >= DELTA_BASE {
            write!(f, "D{}", v - DELTA_BASE)
        } else {
            write!(f, "d{v}")
        }
    }
}

impl fmt::Debug for DataValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for DataValue {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WordError::MalformedValue(s.to_string());
        let (base, digits) = match s.as_bytes().first() {
            Some(b'd') => (0, &s[1..]),
            Some(b'D') => (DELTA_BASE, &s[1..]),
            Some(b'F') => (FRESH_BASE, &s[1..]),
            Some(b'W') => (WITNESS_BASE, &s[1..]),
            Some(c) if c.is_ascii_digit() => (0, s),
            _ => return Err(bad()),
        };
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: u64 = digits.parse().map_err(|_| bad())?;
        let limit = if base == 0 { DELTA_BASE } else { base };
        if n >= limit {
            return Err(bad());
        }
        Ok(DataValue(base + n))
    }
}

struct Interner {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        RwLock::new(Interner {
            names: Vec::new(),
            ids: HashMap::new(),
        })
    })
}

/// A letter of an input or output alphabet, interned by name.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(u32);

impl Letter {
    /// Interns `name`. Names must be non-empty and free of whitespace and of
    /// the characters `: @ { } [ ] ; , #`.
    pub fn new(name: &str) -> Result<Letter, WordError> {
        if !valid_name(name) {
            return Err(WordError::InvalidLetter(name.to_string()));
        }
        Ok(Letter::intern(name))
    }

    /// Like [`Letter::new`] but panics on an invalid name.
    pub fn named(name: &str) -> Letter {
        Letter::new(name).unwrap_or_else(|e| panic!("{e}"))
    }

    fn intern(name: &str) -> Letter {
        if let Some(&id) = interner().read().unwrap().ids.get(name) {
            return Letter(id);
        }
        let mut g = interner().write().unwrap();
        if let Some(&id) = g.ids.get(name) {
            return Letter(id);
        }
        let id = g.names.len() as u32;
        g.names.push(name.to_string());
        g.ids.insert(name.to_string(), id);
        Letter(id)
    }

    pub fn name(self) -> String {
        interner().read().unwrap().names[self.0 as usize].clone()
    }
}

/// Whether `name` is usable as a letter, state, register or variable name.
pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != "EPS"
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !":@{}[];,#|&!()=".contains(c))
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self.0 == other.0 {
            return std::cmp::Ordering::Equal;
        }
        let g = interner().read().unwrap();
        g.names[self.0 as usize].cmp(&g.names[other.0 as usize])
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Parses a whitespace-separated list of letter names.
pub fn alphabet(names: &str) -> Vec<Letter> {
    names.split_whitespace().map(Letter::named).collect()
}

/// One input symbol `(σ, d)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol {
    pub letter: Letter,
    pub value: DataValue,
}

impl Symbol {
    pub fn new(letter: Letter, value: DataValue) -> Self {
        Symbol { letter, value }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.letter, self.value)
    }
}

/// A finite data word. Positions are 1-based in every report.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DataWord(pub Vec<Symbol>);

impl DataWord {
    pub fn empty() -> Self {
        DataWord(Vec::new())
    }

    /// Word with a single letter and the given values.
    pub fn from_values(letter: Letter, values: &[u64]) -> Self {
        DataWord(
            values
                .iter()
                .map(|&v| Symbol::new(letter, DataValue(v)))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// Symbol at 1-based position `i`.
    pub fn at(&self, i: usize) -> Symbol {
        self.0[i - 1]
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn concat(&self, other: &DataWord) -> DataWord {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        DataWord(v)
    }

    pub fn appended(&self, s: Symbol) -> DataWord {
        let mut w = self.clone();
        w.push(s);
        w
    }

    pub fn prefix(&self, n: usize) -> DataWord {
        DataWord(self.0[..n].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> DataWord {
        DataWord(self.0[n..].to_vec())
    }

    pub fn last_value(&self) -> Option<DataValue> {
        self.0.last().map(|s| s.value)
    }

    pub fn contains_value(&self, d: DataValue) -> bool {
        self.0.iter().any(|s| s.value == d)
    }

    /// Distinct values in order of first occurrence.
    pub fn values(&self) -> Vec<DataValue> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for s in &self.0 {
            if seen.insert(s.value) {
                out.push(s.value);
            }
        }
        out
    }

    /// 1-based position of the last occurrence of `d`.
    pub fn last_occurrence(&self, d: DataValue) -> Option<usize> {
        self.0.iter().rposition(|s| s.value == d).map(|p| p + 1)
    }

    pub fn parse(text: &str) -> Result<DataWord, WordError> {
        let text = text.trim();
        if text == "EPS" || text.is_empty() {
            return Ok(DataWord::empty());
        }
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            let (l, v) = tok
                .split_once(':')
                .ok_or_else(|| WordError::MalformedToken(tok.to_string()))?;
            out.push(Symbol::new(Letter::new(l)?, v.parse()?));
        }
        Ok(DataWord(out))
    }

    /// Like [`DataWord::parse`] but rejects values in the reserved bands.
    pub fn parse_user(text: &str) -> Result<DataWord, WordError> {
        let w = DataWord::parse(text)?;
        match w.0.iter().find(|s| s.value.is_reserved()) {
            Some(s) => Err(WordError::ReservedValue(s.value)),
            None => Ok(w),
        }
    }
}

impl fmt::Display for DataWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("EPS");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DataWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// One output position `(γ, d, o)` with a 1-based origin.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OriginTriple {
    pub letter: Letter,
    pub value: DataValue,
    pub origin: usize,
}

impl OriginTriple {
    pub fn new(letter: Letter, value: DataValue, origin: usize) -> Self {
        OriginTriple {
            letter,
            value,
            origin,
        }
    }
}

impl fmt::Display for OriginTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}@{}", self.letter, self.value, self.origin)
    }
}

/// A data word with origin information.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct OriginWord(pub Vec<OriginTriple>);

impl OriginWord {
    pub fn empty() -> Self {
        OriginWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn triples(&self) -> &[OriginTriple] {
        &self.0
    }

    pub fn concat(&self, other: &OriginWord) -> OriginWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        OriginWord(v)
    }

    pub fn extend(&mut self, other: &OriginWord) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn parse(text: &str) -> Result<OriginWord, WordError> {
        let text = text.trim();
        if text == "EPS" || text.is_empty() {
            return Ok(OriginWord::empty());
        }
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            out.push(parse_triple(tok)?);
        }
        Ok(OriginWord(out))
    }
}

pub(crate) fn parse_triple(tok: &str) -> Result<OriginTriple, WordError> {
    let (sym, o) = tok
        .rsplit_once('@')
        .ok_or_else(|| WordError::MalformedOrigin(tok.to_string()))?;
    let (l, v) = sym
        .split_once(':')
        .ok_or_else(|| WordError::MalformedToken(tok.to_string()))?;
    let origin: usize = o
        .parse()
        .ok()
        .filter(|&n: &usize| n >= 1 && n.to_string() == o)
        .ok_or_else(|| WordError::MalformedOrigin(tok.to_string()))?;
    Ok(OriginTriple::new(Letter::new(l)?, v.parse()?, origin))
}

impl fmt::Display for OriginWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("EPS");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for OriginWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// A bijection on data values that is the identity outside a finite support.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Permutation {
    map: BTreeMap<DataValue, DataValue>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    pub fn swap(a: DataValue, b: DataValue) -> Self {
        Permutation::from_pairs([(a, b), (b, a)]).expect("a swap is a bijection")
    }

    /// Builds a permutation from explicit pairs, which must already form a
    /// bijection of their support.
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (DataValue, DataValue)>,
    ) -> Result<Self, WordError> {
        let mut map = BTreeMap::new();
        let mut image = BTreeSet::new();
        for (a, b) in pairs {
            if let Some(&old) = map.get(&a) {
                if old != b {
                    return Err(WordError::NotBijective);
                }
                continue;
            }
            if !image.insert(b) {
                return Err(WordError::NotInjective(b));
            }
            map.insert(a, b);
        }
        let domain: BTreeSet<_> = map.keys().copied().collect();
        if domain != image {
            return Err(WordError::NotBijective);
        }
        map.retain(|a, b| a != b);
        Ok(Permutation { map })
    }

    /// Completes an injective partial map to a finite-support bijection.
    /// Targets that are not sources are sent, in increasing order, to the
    /// sources that are not targets.
    pub fn complete(
        pairs: impl IntoIterator<Item = (DataValue, DataValue)>,
    ) -> Result<Self, WordError> {
        let mut map = BTreeMap::new();
        let mut image = BTreeSet::new();
        for (a, b) in pairs {
            if let Some(&old) = map.get(&a) {
                if old != b {
                    return Err(WordError::NotBijective);
                }
                continue;
            }
            if !image.insert(b) {
                return Err(WordError::NotInjective(b));
            }
            map.insert(a, b);
        }
        let sources: BTreeSet<_> = map.keys().copied().collect();
        let open_targets: Vec<_> = image.difference(&sources).copied().collect();
        let open_sources: Vec<_> = sources.difference(&image).copied().collect();
        for (t, s) in open_targets.into_iter().zip(open_sources) {
            map.insert(t, s);
        }
        map.retain(|a, b| a != b);
        Ok(Permutation { map })
    }

    pub fn apply(&self, d: DataValue) -> DataValue {
        self.map.get(&d).copied().unwrap_or(d)
    }

    pub fn apply_symbol(&self, s: Symbol) -> Symbol {
        Symbol::new(s.letter, self.apply(s.value))
    }

    pub fn apply_word(&self, w: &DataWord) -> DataWord {
        DataWord(w.0.iter().map(|&s| self.apply_symbol(s)).collect())
    }

    pub fn apply_origin_word(&self, w: &OriginWord) -> OriginWord {
        OriginWord(
            w.0.iter()
                .map(|t| OriginTriple::new(t.letter, self.apply(t.value), t.origin))
                .collect(),
        )
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            map: self.map.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let mut keys: BTreeSet<DataValue> = self.map.keys().copied().collect();
        keys.extend(other.map.keys().copied());
        let mut map = BTreeMap::new();
        for k in keys {
            let v = self.apply(other.apply(k));
            if v != k {
                map.insert(k, v);
            }
        }
        Permutation { map }
    }

    pub fn support(&self) -> impl Iterator<Item = DataValue> + '_ {
        self.map.keys().copied()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}->{b}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn apply_permutation(p: &Permutation, w: &DataWord) -> DataWord {
    p.apply_word(w)
}

/// Same length, same letters, same equality pattern of values.
pub fn isomorphic(w1: &DataWord, w2: &DataWord) -> bool {
    if w1.len() != w2.len() {
        return false;
    }
    let mut fwd = HashMap::new();
    let mut bwd = HashMap::new();
    for (a, b) in w1.0.iter().zip(&w2.0) {
        if a.letter != b.letter {
            return false;
        }
        if *fwd.entry(a.value).or_insert(b.value) != b.value
            || *bwd.entry(b.value).or_insert(a.value) != a.value
        {
            return false;
        }
    }
    true
}

/// `w[d/d']`.
pub fn substitute(w: &DataWord, d: DataValue, d2: DataValue) -> DataWord {
    DataWord(
        w.0.iter()
            .map(|&s| {
                if s.value == d {
                    Symbol::new(s.letter, d2)
                } else {
                    s
                }
            })
            .collect(),
    )
}

pub fn is_safe_replacement(w: &DataWord, d: DataValue, d2: DataValue) -> bool {
    d == d2 || !w.contains_value(d) || !w.contains_value(d2)
}

/// Renames values to `0, 1, 2, …` in order of first occurrence.
pub fn canonical_form(w: &DataWord) -> DataWord {
    canonical_renaming(w).0
}

/// The canonical form of `w` together with the permutation mapping the
/// canonical word back to `w`.
pub fn canonical_renaming(w: &DataWord) -> (DataWord, Permutation) {
    let mut ren: HashMap<DataValue, DataValue> = HashMap::new();
    let mut back = Vec::new();
    let out =
        w.0.iter()
            .map(|s| {
                let next = DataValue(ren.len() as u64);
                let v = *ren.entry(s.value).or_insert_with(|| {
                    back.push((next, s.value));
                    next
                });
                Symbol::new(s.letter, v)
            })
            .collect();
    let p = Permutation::complete(back).expect("first-occurrence renaming is injective");
    (DataWord(out), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> DataWord {
        DataWord::parse(s).unwrap()
    }

    #[test]
    fn swap_example() {
        let p = Permutation::swap(DataValue(1), DataValue(4));
        assert_eq!(
            p.apply_word(&w("a:d1 a:d2 a:d3 a:d1")),
            w("a:d4 a:d2 a:d3 a:d4")
        );
    }

    #[test]
    fn isomorphism_examples() {
        assert!(!isomorphic(&w("a:d1 b:d1"), &w("a:d2 b:d3")));
        assert!(isomorphic(&w("a:d1 b:d2"), &w("a:d5 b:d9")));
        assert!(!isomorphic(&w("a:d1 b:d2"), &w("a:d1 a:d2")));
    }

    #[test]
    fn safe_replacement_examples() {
        let v = DataValue;
        assert_eq!(substitute(&w("a:d3 b:d2"), v(2), v(1)), w("a:d3 b:d1"));
        assert!(is_safe_replacement(&w("a:d3 b:d2"), v(2), v(1)));
        assert!(!is_safe_replacement(&w("a:d1 b:d2"), v(2), v(1)));
        assert!(is_safe_replacement(&w("a:d1 b:d2"), v(2), v(2)));
    }

    #[test]
    fn canonical_example() {
        assert_eq!(canonical_form(&w("a:d7 b:d7 c:d2")), w("a:d0 b:d0 c:d1"));
        let (c, back) = canonical_renaming(&w("a:d7 b:d7 c:d2"));
        assert_eq!(back.apply_word(&c), w("a:d7 b:d7 c:d2"));
    }

    #[test]
    fn reserved_values_render_and_parse() {
        for v in [
            DataValue::delta(0),
            DataValue::delta(3),
            DataValue::fresh(2),
            DataValue::witness(5),
            DataValue(17),
        ] {
            assert_eq!(v.to_string().parse::<DataValue>().unwrap(), v);
        }
        assert_eq!(DataValue::delta(2).to_string(), "D2");
        assert_eq!(DataValue::delta(0).to_string(), "F0");
        assert!(DataWord::parse_user("a:D1").is_err());
    }

    #[test]
    fn completion_is_bijective() {
        let v = DataValue;
        let p = Permutation::complete([(v(1), v(5)), (v(2), v(1))]).unwrap();
        assert_eq!(p.apply(v(1)), v(5));
        assert_eq!(p.apply(v(2)), v(1));
        assert_eq!(p.apply(v(5)), v(2));
        assert!(p.compose(&p.inverse()).is_identity());
    }

    #[test]
    fn text_roundtrip() {
        for s in ["EPS", "a:d1 b:d22 a:D3", "x:W0"] {
            assert_eq!(w(s).to_string(), s);
        }
        let o = OriginWord::parse("c:d4@4 b:d3@3").unwrap();
        assert_eq!(o.to_string(), "c:d4@4 b:d3@3");
        assert!(OriginWord::parse("c:d4@0").is_err());
    }
}
