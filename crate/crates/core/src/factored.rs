//! Factored outputs: origin words in which the contribution of underlined
//! input parts is collapsed into `Left`/`Middle`/`Right` markers.

use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::analysis::Transduction;
use crate::words::{
    parse_triple, DataValue, DataWord, Letter, OriginTriple, OriginWord, WordError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("invalid cuts {first}/{second:?} for an input of length {len}")]
    InvalidCuts {
        first: usize,
        second: Option<usize>,
        len: usize,
    },
    #[error("origin {origin} lies outside the input of length {len}")]
    OriginOutOfRange { origin: usize, len: usize },
    #[error("a two-part factoring has no middle part")]
    InvalidKind,
    #[error("no block with index {index} ({available} available)")]
    NoSuchBlock { index: usize, available: usize },
    #[error("transduction undefined on {0}")]
    Undefined(DataWord),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Region {
    Left,
    Middle,
    Right,
}

impl Region {
    fn marker(self) -> &'static str {
        match self {
            Region::Left => "*L",
            Region::Middle => "*M",
            Region::Right => "*R",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum FactoredItem {
    /// A triple whose origin may be shifted by an offset and hence be ≤ 0.
    Concrete {
        letter: Letter,
        value: DataValue,
        origin: i64,
    },
    Abstract(Region),
}

impl fmt::Display for FactoredItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactoredItem::Concrete {
                letter,
                value,
                origin,
            } => write!(f, "{letter}:{value}@{origin}"),
            FactoredItem::Abstract(r) => f.write_str(r.marker()),
        }
    }
}

/// Where the input was cut: `u|v` (`second == None`) or `u|v|w`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Cuts {
    pub first: usize,
    pub second: Option<usize>,
}

impl Cuts {
    pub fn two(first: usize) -> Self {
        Cuts {
            first,
            second: None,
        }
    }

    pub fn three(first: usize, second: usize) -> Self {
        Cuts {
            first,
            second: Some(second),
        }
    }

    /// Part containing 1-based input position `o`.
    pub fn region_of(&self, o: usize) -> Region {
        if o <= self.first {
            Region::Left
        } else {
            match self.second {
                Some(s) if o <= s => Region::Middle,
                _ => Region::Right,
            }
        }
    }
}

/// Which parts are underlined (abstracted).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mask {
    pub left: bool,
    pub middle: bool,
    pub right: bool,
}

impl Mask {
    pub const LEFT: Mask = Mask {
        left: true,
        middle: false,
        right: false,
    };
    pub const RIGHT: Mask = Mask {
        left: false,
        middle: false,
        right: true,
    };
    pub const LEFT_RIGHT: Mask = Mask {
        left: true,
        middle: false,
        right: true,
    };
    pub const ALL: Mask = Mask {
        left: true,
        middle: true,
        right: true,
    };

    /// Parses flags such as `L`, `LR`, `LMR`; `-` means nothing underlined.
    pub fn parse(s: &str) -> Option<Mask> {
        let mut m = Mask::default();
        if s == "-" {
            return Some(m);
        }
        for c in s.chars() {
            match c {
                'L' | 'l' => m.left = true,
                'M' | 'm' => m.middle = true,
                'R' | 'r' => m.right = true,
                _ => return None,
            }
        }
        Some(m)
    }

    fn covers(&self, r: Region) -> bool {
        match r {
            Region::Left => self.left,
            Region::Middle => self.middle,
            Region::Right => self.right,
        }
    }
}

/// A normalized factored output. Equality and hashing look at the items
/// only; the recorded cuts, mask, offset and per-item parts are provenance.
#[derive(Clone)]
pub struct FactoredOutput {
    items: Vec<FactoredItem>,
    parts: Vec<Region>,
    cuts: Cuts,
    mask: Mask,
    offset: i64,
}

impl PartialEq for FactoredOutput {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl Eq for FactoredOutput {}

impl Hash for FactoredOutput {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.items.hash(state)
    }
}

impl fmt::Debug for FactoredOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl fmt::Display for FactoredOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_items(f, &self.items)
    }
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[FactoredItem]) -> fmt::Result {
    if items.is_empty() {
        return f.write_str("EPS");
    }
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

/// Parses the token form of a factored item sequence.
pub fn parse_items(text: &str) -> Result<Vec<FactoredItem>, FactorError> {
    let text = text.trim();
    if text == "EPS" || text.is_empty() {
        return Ok(Vec::new());
    }
    text.split_whitespace()
        .map(|tok| {
            Ok(match tok {
                "*L" => FactoredItem::Abstract(Region::Left),
                "*M" => FactoredItem::Abstract(Region::Middle),
                "*R" => FactoredItem::Abstract(Region::Right),
                _ => {
                    // Offsets can make origins non-positive.
                    let (sym, o) = tok
                        .rsplit_once('@')
                        .ok_or_else(|| WordError::MalformedOrigin(tok.to_string()))?;
                    let origin: i64 = o
                        .parse()
                        .map_err(|_| WordError::MalformedOrigin(tok.to_string()))?;
                    let t = parse_triple(&format!("{sym}@1"))?;
                    FactoredItem::Concrete {
                        letter: t.letter,
                        value: t.value,
                        origin,
                    }
                }
            })
        })
        .collect()
}

pub fn render_items(items: &[FactoredItem]) -> String {
    struct R<'a>(&'a [FactoredItem]);
    impl fmt::Display for R<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write_items(f, self.0)
        }
    }
    R(items).to_string()
}

fn check_cuts(cuts: Cuts, len: usize) -> Result<(), FactorError> {
    let ok = cuts.first <= len
        && match cuts.second {
            Some(s) => cuts.first <= s && s <= len,
            None => true,
        };
    if ok {
        Ok(())
    } else {
        Err(FactorError::InvalidCuts {
            first: cuts.first,
            second: cuts.second,
            len,
        })
    }
}

/// Factors `out`, produced on an input of length `input_len`.
pub fn factor(
    out: &OriginWord,
    input_len: usize,
    cuts: Cuts,
    mask: Mask,
    z: i64,
) -> Result<FactoredOutput, FactorError> {
    check_cuts(cuts, input_len)?;
    if cuts.second.is_none() && mask.middle {
        return Err(FactorError::InvalidKind);
    }
    let mut items = Vec::with_capacity(out.len());
    let mut parts = Vec::with_capacity(out.len());
    for t in out.triples() {
        if t.origin == 0 || t.origin > input_len {
            return Err(FactorError::OriginOutOfRange {
                origin: t.origin,
                len: input_len,
            });
        }
        let part = cuts.region_of(t.origin);
        if mask.covers(part) {
            if items.last() == Some(&FactoredItem::Abstract(part)) {
                continue;
            }
            items.push(FactoredItem::Abstract(part));
        } else {
            items.push(FactoredItem::Concrete {
                letter: t.letter,
                value: t.value,
                origin: t.origin as i64 + z,
            });
        }
        parts.push(part);
    }
    Ok(FactoredOutput {
        items,
        parts,
        cuts,
        mask,
        offset: z,
    })
}

/// Evaluates `f` on `w` and factors the result. `None` when `f` is
/// undefined on `w` or produces origins outside `w`.
pub fn factor_eval(
    f: &dyn Transduction,
    w: &DataWord,
    cuts: Cuts,
    mask: Mask,
    z: i64,
) -> Option<FactoredOutput> {
    let out = f.apply(w)?;
    factor(&out, w.len(), cuts, mask, z).ok()
}

/// `f(u̲ | v)`.
pub fn left_abstract(f: &dyn Transduction, u: &DataWord, v: &DataWord) -> Option<FactoredOutput> {
    factor_eval(f, &u.concat(v), Cuts::two(u.len()), Mask::LEFT, 0)
}

/// `f(u | v̲)`.
pub fn right_abstract(f: &dyn Transduction, u: &DataWord, v: &DataWord) -> Option<FactoredOutput> {
    factor_eval(f, &u.concat(v), Cuts::two(u.len()), Mask::RIGHT, 0)
}

/// Three-part factoring of `f(u·m·w)` with the given mask.
pub fn three_part(
    f: &dyn Transduction,
    u: &DataWord,
    m: &DataWord,
    w: &DataWord,
    mask: Mask,
) -> Option<FactoredOutput> {
    let word = u.concat(m).concat(w);
    factor_eval(f, &word, Cuts::three(u.len(), u.len() + m.len()), mask, 0)
}

impl FactoredOutput {
    /// Rebuilds provenance for parsed items, reading parts off the origins
    /// (after undoing the offset) and the markers.
    pub fn from_items(
        items: Vec<FactoredItem>,
        cuts: Cuts,
        mask: Mask,
        offset: i64,
    ) -> Result<FactoredOutput, FactorError> {
        let parts = items
            .iter()
            .map(|it| match *it {
                FactoredItem::Abstract(r) => Ok(r),
                FactoredItem::Concrete { origin, .. } => {
                    let o = origin - offset;
                    if o < 1 {
                        Err(FactorError::OriginOutOfRange { origin: 0, len: 0 })
                    } else {
                        Ok(cuts.region_of(o as usize))
                    }
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(FactoredOutput {
            items,
            parts,
            cuts,
            mask,
            offset,
        })
    }

    pub fn items(&self) -> &[FactoredItem] {
        &self.items
    }

    pub fn parts(&self) -> &[Region] {
        &self.parts
    }

    pub fn cuts(&self) -> Cuts {
        self.cuts
    }

    pub fn mask(&self) -> Mask {
        self.mask
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn is_normalized(&self) -> bool {
        self.items.windows(2).all(|w| {
            !matches!((w[0], w[1]), (FactoredItem::Abstract(a), FactoredItem::Abstract(b)) if a == b)
        })
    }

    pub fn blocks(&self, kind: BlockKind) -> Result<Vec<Block>, FactorError> {
        blocks(self, kind)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BlockKind {
    Left,
    Middle,
    NonRight,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Block {
    pub kind: BlockKind,
    pub items: Vec<FactoredItem>,
}

impl Block {
    /// The block as an origin word; `None` if it holds markers or
    /// non-positive origins.
    pub fn to_origin_word(&self) -> Option<OriginWord> {
        self.items
            .iter()
            .map(|it| match *it {
                FactoredItem::Concrete {
                    letter,
                    value,
                    origin,
                } if origin >= 1 => Some(OriginTriple::new(letter, value, origin as usize)),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(OriginWord)
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_items(f, &self.items)
    }
}

fn in_block(kind: BlockKind, part: Region) -> bool {
    match kind {
        BlockKind::Left => part == Region::Left,
        BlockKind::Middle => part == Region::Middle,
        BlockKind::NonRight => part != Region::Right,
    }
}

/// Maximal runs of items of the requested provenance, left to right.
pub fn blocks(fo: &FactoredOutput, kind: BlockKind) -> Result<Vec<Block>, FactorError> {
    if kind == BlockKind::Middle && fo.cuts.second.is_none() {
        return Err(FactorError::InvalidKind);
    }
    let mut out = Vec::new();
    let mut cur: Option<Vec<FactoredItem>> = None;
    for (it, &part) in fo.items.iter().zip(&fo.parts) {
        if in_block(kind, part) {
            cur.get_or_insert_with(Vec::new).push(*it);
        } else if let Some(items) = cur.take() {
            out.push(Block { kind, items });
        }
    }
    if let Some(items) = cur {
        out.push(Block { kind, items });
    }
    Ok(out)
}

/// Left and middle blocks inside one non-right block, by global index.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockRef {
    Left(usize),
    Middle(usize),
}

/// For each non-right block, the sequence of left/middle blocks it contains
/// (1-based global indices).
pub fn nonright_structure(fo: &FactoredOutput) -> Vec<Vec<BlockRef>> {
    let mut out: Vec<Vec<BlockRef>> = Vec::new();
    let mut open = false;
    let (mut nl, mut nm) = (0, 0);
    let mut prev: Option<Region> = None;
    for &part in &fo.parts {
        if part == Region::Right {
            open = false;
            prev = Some(part);
            continue;
        }
        if !open {
            out.push(Vec::new());
            open = true;
        }
        if prev != Some(part) {
            let r = if part == Region::Left {
                nl += 1;
                BlockRef::Left(nl)
            } else {
                nm += 1;
                BlockRef::Middle(nm)
            };
            out.last_mut().unwrap().push(r);
        }
        prev = Some(part);
    }
    out
}

/// Concretizes the `i`-th non-right block of `f(u̲ | mid̲ | w̲)`: each left
/// block becomes the matching left block of `f(u | mid·w̲)`, each middle
/// block the matching middle block of `f(u̲ | mid | w̲)`.
pub fn concretize_nonright(
    f: &dyn Transduction,
    u: &DataWord,
    mid: &DataWord,
    w: &DataWord,
    i: usize,
) -> Result<Block, FactorError> {
    let whole = u.concat(mid).concat(w);
    let undefined = || FactorError::Undefined(whole.clone());
    let abs = three_part(f, u, mid, w, Mask::ALL).ok_or_else(undefined)?;
    let structure = nonright_structure(&abs);
    if i == 0 || i > structure.len() {
        return Err(FactorError::NoSuchBlock {
            index: i,
            available: structure.len(),
        });
    }
    let left = right_abstract(f, u, &mid.concat(w))
        .ok_or_else(undefined)?
        .blocks(BlockKind::Left)?;
    let middle = three_part(f, u, mid, w, Mask::LEFT_RIGHT)
        .ok_or_else(undefined)?
        .blocks(BlockKind::Middle)?;
    let mut items = Vec::new();
    for r in &structure[i - 1] {
        let (src, j) = match *r {
            BlockRef::Left(j) => (&left, j),
            BlockRef::Middle(j) => (&middle, j),
        };
        let b = src.get(j - 1).ok_or(FactorError::NoSuchBlock {
            index: j,
            available: src.len(),
        })?;
        items.extend_from_slice(&b.items);
    }
    Ok(Block {
        kind: BlockKind::NonRight,
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_adjacent_markers() {
        let out = OriginWord::parse("a:d1@1 a:d2@2 b:d3@3").unwrap();
        let fo = factor(&out, 3, Cuts::two(2), Mask::LEFT, 0).unwrap();
        assert_eq!(fo.to_string(), "*L b:d3@3");
        assert!(fo.is_normalized());
    }

    #[test]
    fn offset_moves_concrete_only() {
        let out = OriginWord::parse("a:d1@1 b:d3@3").unwrap();
        let fo = factor(&out, 3, Cuts::two(1), Mask::LEFT, -2).unwrap();
        assert_eq!(fo.to_string(), "*L b:d3@1");
    }

    #[test]
    fn invalid_cuts_rejected() {
        let out = OriginWord::empty();
        assert!(matches!(
            factor(&out, 2, Cuts::two(3), Mask::LEFT, 0),
            Err(FactorError::InvalidCuts { .. })
        ));
        assert!(matches!(
            factor(&out, 3, Cuts::three(2, 1), Mask::LEFT, 0),
            Err(FactorError::InvalidCuts { .. })
        ));
    }

    #[test]
    fn middle_blocks_need_three_parts() {
        let fo = factor(&OriginWord::empty(), 1, Cuts::two(1), Mask::LEFT, 0).unwrap();
        assert_eq!(fo.blocks(BlockKind::Middle), Err(FactorError::InvalidKind));
    }

    #[test]
    fn items_roundtrip() {
        for s in ["EPS", "*L b:d3@-1 *R", "c:d4@4 *M"] {
            assert_eq!(render_items(&parse_items(s).unwrap()), s);
        }
    }
}
