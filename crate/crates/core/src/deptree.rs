//! Dependency trees: nodes are sequences of suffix classes, block
//! descriptions assemble pending left blocks from variables and parent
//! references. Extension, shortening and trimming keep a tree complete for
//! the word read so far.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::analysis::{
    canonical_words, Analyzer, Bounds, PrefixClasses, SuffixPartition, Transduction,
};
use crate::factored::{
    nonright_structure, right_abstract, three_part, BlockKind, BlockRef, FactorError, FactoredItem,
    Mask,
};
use crate::words::{DataValue, DataWord, OriginWord, Permutation, Symbol};

/// Path from the root: one suffix class id per edge.
pub type NodeKey = Vec<usize>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarRef {
    pub node: NodeKey,
    pub index: usize,
}

impl VarRef {
    pub fn new(node: NodeKey, index: usize) -> Self {
        VarRef { node, index }
    }

    /// Name used for the variable in synthesized machines.
    pub fn machine_name(&self) -> String {
        format!("x{}_{}", key_path(&self.node, ""), self.index)
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}#{}>", key_path(&self.node, "ε"), self.index)
    }
}

fn key_path(k: &[usize], root: &str) -> String {
    if k.is_empty() {
        return root.to_string();
    }
    k.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BlockSymbol {
    Parent(usize),
    Var(VarRef),
}

impl fmt::Display for BlockSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockSymbol::Parent(j) => write!(f, "P#{j}"),
            BlockSymbol::Var(v) => v.fmt(f),
        }
    }
}

pub fn render_block(mu: &[BlockSymbol]) -> String {
    if mu.is_empty() {
        return "ε".to_string();
    }
    mu.iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Node {
    /// Prefix class id.
    pub pref: usize,
    /// Block descriptions `bl(θ,1..B)`.
    pub bl: Vec<Vec<BlockSymbol>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("node {0:?} is not in the tree")]
    NoSuchNode(NodeKey),
    #[error("parent of node {0:?} is missing")]
    Orphan(NodeKey),
    #[error("no leaf ends in suffix class {0}")]
    MissingLeaf(usize),
    #[error("several leaves end in suffix class {0}")]
    AmbiguousLeaf(usize),
    #[error("no internal node has exactly one child")]
    NoShortening,
    #[error("shortening would merge two nodes at {0:?}")]
    KeyCollision(NodeKey),
    #[error("{what} index {found} exceeds the bound {bound}")]
    BoundExceeded {
        what: &'static str,
        found: usize,
        bound: usize,
    },
    #[error("suffix [{0}] matches no bounded suffix class")]
    UnclassifiedSuffix(DataWord),
    #[error("value {value} is not influencing in [{word}]")]
    NotInfluencing { value: DataValue, word: DataWord },
    #[error("transduction undefined on [{0}]")]
    Undefined(DataWord),
    #[error("tree and valuation are not complete for [{0}]")]
    NotComplete(DataWord),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DependencyTree {
    block_bound: usize,
    nodes: BTreeMap<NodeKey, Node>,
}

pub type TreeValuation = BTreeMap<VarRef, OriginWord>;

/// `val(μ)`: concatenated contents, unset variables read as empty.
pub fn evaluate(val: &TreeValuation, vars: &[VarRef]) -> OriginWord {
    let mut out = OriginWord::empty();
    for v in vars {
        if let Some(w) = val.get(v) {
            out.extend(w);
        }
    }
    out
}

impl DependencyTree {
    /// `T_⊥`: only the root, labelled `[ε]`, with empty descriptions.
    pub fn bottom(block_bound: usize) -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(
            Vec::new(),
            Node {
                pref: 0,
                bl: vec![Vec::new(); block_bound],
            },
        );
        DependencyTree { block_bound, nodes }
    }

    pub fn block_bound(&self) -> usize {
        self.block_bound
    }

    pub fn is_bottom(&self) -> bool {
        *self == DependencyTree::bottom(self.block_bound)
    }

    /// Adds or replaces a node; its parent must already exist. Missing
    /// descriptions are padded with `ε`.
    pub fn set_node(
        &mut self,
        key: NodeKey,
        pref: usize,
        mut bl: Vec<Vec<BlockSymbol>>,
    ) -> Result<(), TreeError> {
        if !key.is_empty() && !self.nodes.contains_key(&key[..key.len() - 1]) {
            return Err(TreeError::Orphan(key));
        }
        if bl.len() > self.block_bound {
            return Err(TreeError::BoundExceeded {
                what: "block description",
                found: bl.len(),
                bound: self.block_bound,
            });
        }
        bl.resize(self.block_bound, Vec::new());
        self.nodes.insert(key, Node { pref, bl });
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeMap<NodeKey, Node> {
        &self.nodes
    }

    pub fn node(&self, key: &[usize]) -> Option<&Node> {
        self.nodes.get(key)
    }

    pub fn contains(&self, key: &[usize]) -> bool {
        self.nodes.contains_key(key)
    }

    pub fn children(&self, key: &[usize]) -> Vec<NodeKey> {
        self.nodes
            .keys()
            .filter(|k| k.len() == key.len() + 1 && k.starts_with(key))
            .cloned()
            .collect()
    }

    pub fn is_leaf(&self, key: &[usize]) -> bool {
        self.nodes.contains_key(key)
            && !self
                .nodes
                .keys()
                .any(|k| k.len() > key.len() && k.starts_with(key))
    }

    pub fn leaves(&self) -> Vec<NodeKey> {
        self.nodes
            .keys()
            .filter(|k| self.is_leaf(k))
            .cloned()
            .collect()
    }

    /// The unique leaf whose last class is `class`.
    pub fn leaf_ending_in(&self, class: usize) -> Result<NodeKey, TreeError> {
        let mut found = self
            .leaves()
            .into_iter()
            .filter(|k| k.last() == Some(&class));
        let first = found.next().ok_or(TreeError::MissingLeaf(class))?;
        if found.next().is_some() {
            return Err(TreeError::AmbiguousLeaf(class));
        }
        Ok(first)
    }

    /// Every variable mentioned by some block description.
    pub fn var_refs(&self) -> BTreeSet<VarRef> {
        self.nodes
            .values()
            .flat_map(|n| n.bl.iter().flatten())
            .filter_map(|s| match s {
                BlockSymbol::Var(v) => Some(v.clone()),
                BlockSymbol::Parent(_) => None,
            })
            .collect()
    }

    /// `ur(θ, μ)`: parent references replaced recursively by the parent's
    /// unrolled descriptions, and by nothing at the root.
    pub fn unroll(&self, key: &[usize], mu: &[BlockSymbol]) -> Result<Vec<VarRef>, TreeError> {
        if !self.nodes.contains_key(key) {
            return Err(TreeError::NoSuchNode(key.to_vec()));
        }
        let mut out = Vec::new();
        for s in mu {
            match s {
                BlockSymbol::Var(v) => out.push(v.clone()),
                BlockSymbol::Parent(j) => {
                    if key.is_empty() {
                        continue;
                    }
                    let parent = &key[..key.len() - 1];
                    let pnode = self
                        .nodes
                        .get(parent)
                        .ok_or_else(|| TreeError::Orphan(key.to_vec()))?;
                    let pmu = pnode.bl.get(j - 1).ok_or(TreeError::BoundExceeded {
                        what: "parent reference",
                        found: *j,
                        bound: self.block_bound,
                    })?;
                    out.extend(self.unroll(parent, pmu)?);
                }
            }
        }
        Ok(out)
    }

    /// `ur(θ, bl(θ,i))` for every `i`.
    pub fn unrolled_blocks(&self, key: &[usize]) -> Result<Vec<Vec<VarRef>>, TreeError> {
        let node = self
            .nodes
            .get(key)
            .ok_or_else(|| TreeError::NoSuchNode(key.to_vec()))?;
        node.bl.iter().map(|mu| self.unroll(key, mu)).collect()
    }

    /// One line per node in key order, indented two spaces per level.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (k, n) in &self.nodes {
            s.push_str(&"  ".repeat(k.len()));
            s.push_str(&format!("{}: pref={}", key_path(k, "ε"), n.pref));
            for (i, mu) in n.bl.iter().enumerate() {
                s.push_str(&format!(" bl[{}]={}", i + 1, render_block(mu)));
            }
            s.push('\n');
        }
        s
    }

    fn unary_internal(&self) -> Option<NodeKey> {
        self.unary_internals().into_iter().next()
    }

    fn unary_internals(&self) -> Vec<NodeKey> {
        self.nodes
            .keys()
            .filter(|k| !k.is_empty() && self.children(k).len() == 1)
            .cloned()
            .collect()
    }

    /// One shortening step: bypasses the first internal node (in key order)
    /// with a single child.
    pub fn shorten(&self) -> Result<DependencyTree, TreeError> {
        let theta = self.unary_internal().ok_or(TreeError::NoShortening)?;
        self.bypass(&theta)
    }

    /// Shortening step at a chosen internal node with a single child.
    pub fn shorten_at(&self, theta: &[usize]) -> Result<DependencyTree, TreeError> {
        if theta.is_empty() || !self.contains(theta) || self.children(theta).len() != 1 {
            return Err(TreeError::NoShortening);
        }
        self.bypass(theta)
    }

    fn bypass(&self, theta: &[usize]) -> Result<DependencyTree, TreeError> {
        let up = &theta[..theta.len() - 1];
        let removed = &self.nodes[theta];
        let mut nodes = BTreeMap::new();
        for (k, n) in &self.nodes {
            if k.as_slice() == theta {
                continue;
            }
            if k.len() > theta.len() && k.starts_with(theta) {
                let mut nk = up.to_vec();
                nk.extend_from_slice(&k[theta.len()..]);
                let mut node = n.clone();
                if k.len() == theta.len() + 1 {
                    node.bl =
                        n.bl.iter()
                            .map(|mu| substitute_parents(mu, &removed.bl))
                            .collect();
                }
                if nodes.insert(nk.clone(), node).is_some() {
                    return Err(TreeError::KeyCollision(nk));
                }
            } else if nodes.insert(k.clone(), n.clone()).is_some() {
                return Err(TreeError::KeyCollision(k.clone()));
            }
        }
        Ok(DependencyTree {
            block_bound: self.block_bound,
            nodes,
        })
    }

    /// Shortens until no internal node with a single child can be
    /// bypassed. A bypass that would give the re-keyed child the key of an
    /// existing node is skipped.
    pub fn shorten_fully(&self) -> Result<DependencyTree, TreeError> {
        let mut t = self.clone();
        'outer: loop {
            for theta in t.unary_internals() {
                match t.bypass(&theta) {
                    Ok(next) => {
                        t = next;
                        continue 'outer;
                    }
                    Err(TreeError::KeyCollision(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            return Ok(t);
        }
    }

    /// Replaces every maximal parent-free infix of each node by a fresh
    /// variable of that node. Returns the trimmed tree and the plan.
    pub fn trim_structure(&self) -> (DependencyTree, TrimPlan) {
        let mut plan = TrimPlan::default();
        let mut nodes = BTreeMap::new();
        for (k, n) in &self.nodes {
            let mut next = 1;
            let mut bl = Vec::with_capacity(n.bl.len());
            for mu in &n.bl {
                let mut out = Vec::new();
                let mut run: Vec<VarRef> = Vec::new();
                let mut flush = |run: &mut Vec<VarRef>, out: &mut Vec<BlockSymbol>| {
                    if !run.is_empty() {
                        let target = VarRef::new(k.clone(), next);
                        next += 1;
                        plan.assignments.push((target.clone(), std::mem::take(run)));
                        out.push(BlockSymbol::Var(target));
                    }
                };
                for s in mu {
                    match s {
                        BlockSymbol::Var(v) => run.push(v.clone()),
                        BlockSymbol::Parent(_) => {
                            flush(&mut run, &mut out);
                            out.push(s.clone());
                        }
                    }
                }
                flush(&mut run, &mut out);
                bl.push(out);
            }
            nodes.insert(k.clone(), Node { pref: n.pref, bl });
        }
        (
            DependencyTree {
                block_bound: self.block_bound,
                nodes,
            },
            plan,
        )
    }

    /// Trimming of the tree together with the trimmed valuation. Variables
    /// the trimmed tree no longer mentions are dropped.
    pub fn trim(&self, val: &TreeValuation) -> (DependencyTree, TreeValuation) {
        let (t, plan) = self.trim_structure();
        let live = t.var_refs();
        let mut val = plan.apply(val);
        val.retain(|k, _| live.contains(k));
        (t, val)
    }

    /// Checks the reducedness conditions; `classes` is the number of
    /// suffix classes.
    pub fn is_reduced(&self, classes: usize) -> ReducedReport {
        let b = self.block_bound;
        let mut violations = Vec::new();
        for k in self.nodes.keys() {
            if k.len() > classes + 1 {
                violations.push(format!(
                    "node {} has depth {} > {}",
                    key_path(k, "ε"),
                    k.len(),
                    classes + 1
                ));
            }
        }
        let leaves = self.leaves();
        let prefs: BTreeSet<usize> = leaves.iter().map(|k| self.nodes[k].pref).collect();
        if prefs.len() > 1 {
            violations.push(format!("leaves carry several prefix classes {prefs:?}"));
        }
        if !self.is_bottom() {
            for c in 0..classes {
                let n = leaves.iter().filter(|k| k.last() == Some(&c)).count();
                if n != 1 {
                    violations.push(format!("{n} leaves end in suffix class {c}"));
                }
            }
        }
        for (k, n) in &self.nodes {
            let mut seen = BTreeSet::new();
            for (i, mu) in n.bl.iter().enumerate() {
                if mu.len() > 2 * b + 1 {
                    violations.push(format!(
                        "bl({},{}) has length {} > {}",
                        key_path(k, "ε"),
                        i + 1,
                        mu.len(),
                        2 * b + 1
                    ));
                }
                for s in mu {
                    match s {
                        BlockSymbol::Var(v) if &v.node != k => violations.push(format!(
                            "bl({},{}) uses foreign variable {v}",
                            key_path(k, "ε"),
                            i + 1
                        )),
                        BlockSymbol::Var(v) if v.index > b * b + b => violations
                            .push(format!("variable {v} exceeds index bound {}", b * b + b)),
                        BlockSymbol::Parent(j) if *j > b => {
                            violations.push(format!("parent reference P#{j} exceeds {b}"))
                        }
                        _ => {}
                    }
                    if !seen.insert(s.clone()) {
                        violations
                            .push(format!("{s} occurs twice below node {}", key_path(k, "ε")));
                    }
                }
            }
        }
        ReducedReport {
            trivial: self.is_bottom(),
            violations,
        }
    }
}

fn substitute_parents(mu: &[BlockSymbol], parent_bl: &[Vec<BlockSymbol>]) -> Vec<BlockSymbol> {
    let mut out = Vec::new();
    for s in mu {
        match s {
            BlockSymbol::Parent(j) => out.extend(parent_bl.get(j - 1).cloned().unwrap_or_default()),
            other => out.push(other.clone()),
        }
    }
    out
}

/// Parallel assignment produced by trimming: each target receives the
/// concatenation of its source variables, every source not also a target
/// is cleared.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TrimPlan {
    pub assignments: Vec<(VarRef, Vec<VarRef>)>,
}

impl TrimPlan {
    pub fn consumed(&self) -> BTreeSet<VarRef> {
        self.assignments
            .iter()
            .flat_map(|(_, z)| z.iter().cloned())
            .collect()
    }

    pub fn apply(&self, val: &TreeValuation) -> TreeValuation {
        let fresh: Vec<(VarRef, OriginWord)> = self
            .assignments
            .iter()
            .map(|(t, z)| (t.clone(), evaluate(val, z)))
            .collect();
        let mut out = val.clone();
        for v in self.consumed() {
            out.remove(&v);
        }
        for (t, w) in fresh {
            if w.is_empty() {
                out.remove(&t);
            } else {
                out.insert(t, w);
            }
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReducedReport {
    /// The tree is `T_⊥`.
    pub trivial: bool,
    pub violations: Vec<String>,
}

impl ReducedReport {
    pub fn is_reduced(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CompletenessFailure {
    pub leaf: NodeKey,
    /// 1-based block index; 0 when the prefix label is wrong.
    pub index: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for CompletenessFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "leaf {} block {}: expected [{}] found [{}]",
            key_path(&self.leaf, "ε"),
            self.index,
            self.expected,
            self.found
        )
    }
}

/// Middle blocks produced by an extension, for the new variables of each
/// new leaf, computed on the equalized representative.
#[derive(Clone, Debug)]
pub struct StructuralExtension {
    pub tree: DependencyTree,
    pub eta: DataValue,
    /// `π`, tracking influencing values on `u'_q·(σ,η)`.
    pub tracking: Permutation,
    pub new_middle: Vec<(VarRef, Vec<FactoredItem>)>,
    pub new_leaves: Vec<(NodeKey, usize)>,
}

/// The bounded class universes a dependency tree lives in.
pub struct TreeContext<'a> {
    an: Analyzer<'a>,
    prefixes: RefCell<PrefixClasses>,
    suffixes: SuffixPartition,
    block_bound: usize,
    influence_bound: usize,
}

impl<'a> TreeContext<'a> {
    /// Builds the suffix partition over the prefixes of length
    /// `≤ b.max_ext_len` and samples the block bound `B`.
    pub fn new(f: &'a dyn Transduction, b: Bounds) -> Result<Self, TreeError> {
        let an = Analyzer::new(f, b);
        let universe = canonical_words(f.alphabet(), b.max_ext_len);
        let influence_bound = universe.iter().map(|u| an.aifl(u).len()).max().unwrap_or(0);
        // One extra step of δ-values so suffixes can mention the value
        // just read once it turns influencing.
        let suffixes = SuffixPartition::build(&an, universe, influence_bound + 1, b.max_word_len);
        let block_bound = sample_block_bound(&an, &suffixes, influence_bound)?;
        Ok(TreeContext {
            an,
            prefixes: RefCell::new(PrefixClasses::new()),
            suffixes,
            block_bound,
            influence_bound,
        })
    }

    pub fn analyzer(&self) -> &Analyzer<'a> {
        &self.an
    }

    pub fn suffixes(&self) -> &SuffixPartition {
        &self.suffixes
    }

    pub fn block_bound(&self) -> usize {
        self.block_bound
    }

    pub fn influence_bound(&self) -> usize {
        self.influence_bound
    }

    pub fn bottom(&self) -> DependencyTree {
        DependencyTree::bottom(self.block_bound)
    }

    pub fn prefix_class(&self, u: &DataWord) -> usize {
        self.prefixes.borrow_mut().classify(&self.an, u)
    }

    pub fn prefix_rep(&self, c: usize) -> DataWord {
        self.prefixes.borrow().rep(c).clone()
    }

    pub fn prefix_class_count(&self) -> usize {
        self.prefixes.borrow().len()
    }

    /// `E(u)(u)`.
    pub fn equalized(&self, u: &DataWord) -> DataWord {
        self.an.equalize(u).apply_word(u)
    }

    fn suffix_class(&self, v: &DataWord) -> Result<usize, TreeError> {
        self.suffixes
            .classify(&self.an, v)
            .ok_or_else(|| TreeError::UnclassifiedSuffix(v.clone()))
    }

    /// The `(σ,η)` extension of `t`, whose leaves are labelled with prefix
    /// class `pref`. `η` must be `δ_0` or `δ_i` for an influencing
    /// position `i` of the class representative.
    pub fn extend_structure(
        &self,
        t: &DependencyTree,
        pref: usize,
        sym: Symbol,
    ) -> Result<StructuralExtension, TreeError> {
        let f = self.an.oracle();
        let b = self.block_bound;
        let rep = self.prefix_rep(pref);
        let uq = self.equalized(&rep);
        let ext = uq.appended(sym);
        let ifl = self.an.aifl(&ext);
        let tracking = Permutation::complete(
            ifl.iter()
                .enumerate()
                .map(|(j, t)| (DataValue::delta(j + 1), t.value)),
        )
        .expect("influencing values are distinct");
        let new_pref = self.prefix_class(&ext);
        let head = DataWord(vec![sym]);
        let mut tree = t.clone();
        let mut new_leaves = Vec::new();
        let mut new_middle = Vec::new();
        for s in 0..self.suffixes.len() {
            let pv = tracking.apply_word(self.suffixes.rep(s));
            let mut key = if t.is_bottom() {
                Vec::new()
            } else {
                t.leaf_ending_in(self.suffix_class(&head.concat(&pv))?)?
            };
            key.push(s);
            let whole = || uq.concat(&head).concat(&pv);
            let abs = three_part(f, &uq, &head, &pv, Mask::ALL)
                .ok_or_else(|| TreeError::Undefined(whole()))?;
            let structure = nonright_structure(&abs);
            if structure.len() > b {
                return Err(TreeError::BoundExceeded {
                    what: "non-right block",
                    found: structure.len(),
                    bound: b,
                });
            }
            let mut bl = Vec::with_capacity(b);
            for refs in &structure {
                let mut mu = Vec::new();
                for r in refs {
                    match *r {
                        BlockRef::Left(j) if j > b => {
                            return Err(TreeError::BoundExceeded {
                                what: "left block",
                                found: j,
                                bound: b,
                            })
                        }
                        BlockRef::Left(j) => mu.push(BlockSymbol::Parent(j)),
                        BlockRef::Middle(k) => {
                            mu.push(BlockSymbol::Var(VarRef::new(key.clone(), k)))
                        }
                    }
                }
                bl.push(mu);
            }
            let middle = three_part(f, &uq, &head, &pv, Mask::LEFT_RIGHT)
                .ok_or_else(|| TreeError::Undefined(whole()))?
                .blocks(BlockKind::Middle)?;
            for (k, m) in middle.into_iter().enumerate() {
                new_middle.push((VarRef::new(key.clone(), k + 1), m.items));
            }
            tree.set_node(key.clone(), new_pref, bl)?;
            new_leaves.push((key, s));
        }
        // Drop every node that is not on a path to a new leaf.
        tree.nodes
            .retain(|k, _| k.is_empty() || new_leaves.iter().any(|(l, _)| l.starts_with(k)));
        Ok(StructuralExtension {
            tree,
            eta: sym.value,
            tracking,
            new_middle,
            new_leaves,
        })
    }

    /// `η` for reading `d` after `u`: `δ_i` if `d` is the `i`-th
    /// influencing value of `u`, else `δ_0`.
    pub fn eta_for(&self, u: &DataWord, d: DataValue) -> DataValue {
        match self.an.aifl(u).iter().position(|t| t.value == d) {
            Some(i) => DataValue::delta(i + 1),
            None => DataValue::delta(0),
        }
    }

    /// The `(σ,d)` extension of `(t, val)`, complete for `u`.
    pub fn extend(
        &self,
        t: &DependencyTree,
        val: &TreeValuation,
        u: &DataWord,
        sym: Symbol,
    ) -> Result<(DependencyTree, TreeValuation), TreeError> {
        if self.is_complete(t, val, u)?.is_some() {
            return Err(TreeError::NotComplete(u.clone()));
        }
        self.extend_unchecked(t, val, u, sym)
    }

    /// [`extend`](Self::extend) without the completeness precondition.
    pub fn extend_unchecked(
        &self,
        t: &DependencyTree,
        val: &TreeValuation,
        u: &DataWord,
        sym: Symbol,
    ) -> Result<(DependencyTree, TreeValuation), TreeError> {
        let f = self.an.oracle();
        let pref = self.prefix_class(u);
        let eta = self.eta_for(u, sym.value);
        let se = self.extend_structure(t, pref, Symbol::new(sym.letter, eta))?;
        let ud = u.appended(sym);
        let back = self.an.equalize(&ud).inverse();
        let head = DataWord(vec![sym]);
        let mut val2 = val.clone();
        for (key, s) in &se.new_leaves {
            let v = back.apply_word(self.suffixes.rep(*s));
            let whole = || u.concat(&head).concat(&v);
            let middle = three_part(f, u, &head, &v, Mask::LEFT_RIGHT)
                .ok_or_else(|| TreeError::Undefined(whole()))?
                .blocks(BlockKind::Middle)?;
            for (k, m) in middle.iter().enumerate() {
                let w = m.to_origin_word().expect("middle blocks are concrete");
                val2.insert(VarRef::new(key.clone(), k + 1), w);
            }
        }
        Ok((se.tree, val2))
    }

    /// `None` if `(t, val)` is complete for `u`, else the first failure.
    pub fn is_complete(
        &self,
        t: &DependencyTree,
        val: &TreeValuation,
        u: &DataWord,
    ) -> Result<Option<CompletenessFailure>, TreeError> {
        if u.is_empty() {
            return Ok(if t.is_bottom() {
                None
            } else {
                Some(CompletenessFailure {
                    leaf: Vec::new(),
                    index: 0,
                    expected: "T_bot".into(),
                    found: "other tree".into(),
                })
            });
        }
        let f = self.an.oracle();
        let pref = self.prefix_class(u);
        let back = self.an.equalize(u).inverse();
        for s in 0..self.suffixes.len() {
            let leaf = match t.leaf_ending_in(s) {
                Ok(l) => l,
                Err(e @ (TreeError::MissingLeaf(_) | TreeError::AmbiguousLeaf(_))) => {
                    return Ok(Some(CompletenessFailure {
                        leaf: Vec::new(),
                        index: 0,
                        expected: format!("one leaf ending in class {s}"),
                        found: e.to_string(),
                    }))
                }
                Err(e) => return Err(e),
            };
            let node = &t.nodes[&leaf];
            if node.pref != pref {
                return Ok(Some(CompletenessFailure {
                    leaf,
                    index: 0,
                    expected: format!("pref={pref}"),
                    found: format!("pref={}", node.pref),
                }));
            }
            let v = back.apply_word(self.suffixes.rep(s));
            let fo = right_abstract(f, u, &v).ok_or_else(|| TreeError::Undefined(u.concat(&v)))?;
            let left = fo.blocks(BlockKind::Left)?;
            let unrolled = t.unrolled_blocks(&leaf)?;
            for i in 0..left.len().max(unrolled.len()) {
                let expected = left
                    .get(i)
                    .map(|b| b.to_origin_word().expect("left blocks are concrete"))
                    .unwrap_or_default();
                let found = unrolled
                    .get(i)
                    .map(|vs| evaluate(val, vs))
                    .unwrap_or_default();
                if expected != found {
                    return Ok(Some(CompletenessFailure {
                        leaf,
                        index: i + 1,
                        expected: expected.to_string(),
                        found: found.to_string(),
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Runs extend, shorten and trim along `w`, recording each stage.
    pub fn pipeline(&self, w: &DataWord) -> Result<Vec<PipelineStep>, TreeError> {
        let mut t = self.bottom();
        let mut val = TreeValuation::new();
        let mut steps = Vec::new();
        for i in 0..w.len() {
            let u = w.prefix(i);
            let sym = w.at(i + 1);
            let (t1, val1) = self.extend_unchecked(&t, &val, &u, sym)?;
            let t2 = t1.shorten_fully()?;
            let (t3, val3) = t2.trim(&val1);
            steps.push(PipelineStep {
                read: u.appended(sym),
                extended: t1,
                extended_val: val1,
                shortened: t2,
                trimmed: t3.clone(),
                trimmed_val: val3.clone(),
            });
            t = t3;
            val = val3;
        }
        Ok(steps)
    }
}

/// Renders a valuation one variable per line.
pub struct TreeValuationDisplay(pub TreeValuation);

impl fmt::Display for TreeValuationDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.0 {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PipelineStep {
    pub read: DataWord,
    pub extended: DependencyTree,
    pub extended_val: TreeValuation,
    pub shortened: DependencyTree,
    pub trimmed: DependencyTree,
    pub trimmed_val: TreeValuation,
}

fn sample_block_bound(
    an: &Analyzer,
    suffixes: &SuffixPartition,
    deltas: usize,
) -> Result<usize, TreeError> {
    let f = an.oracle();
    let mut b = 1;
    let mids: Vec<DataValue> = (0..=deltas).map(DataValue::delta).collect();
    for uq in suffixes.equalized_prefixes() {
        for v in suffixes.reps() {
            if let Some(fo) = right_abstract(f, uq, v) {
                b = b.max(fo.blocks(BlockKind::Left)?.len());
            }
            for &l in f.alphabet() {
                for &d in &mids {
                    let head = DataWord(vec![Symbol::new(l, d)]);
                    if let Some(fo) = three_part(f, uq, &head, v, Mask::ALL) {
                        b = b.max(nonright_structure(&fo).len());
                    }
                    if let Some(fo) = three_part(f, uq, &head, v, Mask::LEFT_RIGHT) {
                        b = b.max(fo.blocks(BlockKind::Middle)?.len());
                    }
                }
            }
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(node: &[usize], k: usize) -> BlockSymbol {
        BlockSymbol::Var(VarRef::new(node.to_vec(), k))
    }

    /// Root, θ← = [0], θ = [0,1], θ1 = [0,1,2].
    fn three_level_tree() -> DependencyTree {
        let mut t = DependencyTree::bottom(2);
        t.set_node(vec![0], 0, vec![vec![var(&[0], 1)], vec![var(&[0], 2)]])
            .unwrap();
        t.set_node(
            vec![0, 1],
            0,
            vec![
                vec![BlockSymbol::Parent(1), var(&[0, 1], 1)],
                vec![BlockSymbol::Parent(2), var(&[0, 1], 2)],
            ],
        )
        .unwrap();
        t.set_node(
            vec![0, 1, 2],
            0,
            vec![vec![
                BlockSymbol::Parent(1),
                var(&[0, 1, 2], 1),
                BlockSymbol::Parent(2),
            ]],
        )
        .unwrap();
        t
    }

    #[test]
    fn unroll_splices_parent_blocks() {
        let t = three_level_tree();
        let got = t
            .unroll(&[0, 1, 2], &t.node(&[0, 1, 2]).unwrap().bl[0])
            .unwrap();
        let want: Vec<VarRef> = [
            (&[0][..], 1),
            (&[0, 1][..], 1),
            (&[0, 1, 2][..], 1),
            (&[0][..], 2),
            (&[0, 1][..], 2),
        ]
        .iter()
        .map(|(n, k)| VarRef::new(n.to_vec(), *k))
        .collect();
        assert_eq!(got, want);
        assert!(t.unroll(&[], &[BlockSymbol::Parent(1)]).unwrap().is_empty());
    }

    #[test]
    fn shortening_splices_into_the_grandchild() {
        let t = three_level_tree();
        let s = t.shorten_at(&[0, 1]).unwrap();
        assert_eq!(
            render_block(&s.node(&[0, 2]).unwrap().bl[0]),
            "P#1 <0.1#1> <0.1.2#1> P#2 <0.1#2>"
        );
        assert!(t.shorten_at(&[0, 1, 2]).is_err());
        let full = t.shorten_fully().unwrap();
        assert_eq!(full.nodes().len(), 2);
    }

    #[test]
    fn trimming_matches_text_example() {
        let s = three_level_tree().shorten_at(&[0, 1]).unwrap();
        let mut val = TreeValuation::new();
        for (n, k, w) in [
            (&[0, 1][..], 1, "a:d1@1"),
            (&[0, 1, 2][..], 1, "b:d2@2"),
            (&[0, 1][..], 2, "c:d3@3"),
        ] {
            val.insert(VarRef::new(n.to_vec(), k), OriginWord::parse(w).unwrap());
        }
        let (t, v) = s.trim(&val);
        assert_eq!(
            render_block(&t.node(&[0, 2]).unwrap().bl[0]),
            "P#1 <0.2#1> P#2 <0.2#2>"
        );
        assert_eq!(v[&VarRef::new(vec![0, 2], 1)].to_string(), "a:d1@1 b:d2@2");
        assert_eq!(v[&VarRef::new(vec![0, 2], 2)].to_string(), "c:d3@3");
        assert!(!v.contains_key(&VarRef::new(vec![0, 1], 1)));
        let (again, v2) = t.trim(&v);
        assert_eq!(again, t);
        assert_eq!(v2, v);
    }

    #[test]
    fn long_descriptions_are_not_reduced() {
        let mut t = DependencyTree::bottom(1);
        let mu: Vec<BlockSymbol> = (1..=4).map(|k| var(&[0], k)).collect();
        t.set_node(vec![0], 0, vec![mu]).unwrap();
        let r = t.is_reduced(1);
        assert!(!r.is_reduced());
        assert!(DependencyTree::bottom(1).is_reduced(3).trivial);
    }
}
