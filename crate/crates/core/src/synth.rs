//! Bounded synthesis: the reachable fragment of the influencing-value
//! tracker and of the full transducer built from dependency trees, plus
//! exhaustive comparison of a machine against an oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::analysis::{canonical_words, check_forward_properties, Bounds, Transduction};
use crate::deptree::{DependencyTree, TreeContext, TreeError, TreeValuation, VarRef};
use crate::factored::FactoredItem;
use crate::machine::{self, Configuration, Elem, Guard, Ssrt, Transition, ValueSource};
use crate::words::{DataValue, DataWord, Letter, OriginWord, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("oracle fails the forward property checks: {0}")]
    Properties(String),
    #[error("value {value} in a middle block after [{word}] maps to no register")]
    Unmappable { value: DataValue, word: DataWord },
    #[error("influencing value {value} of [{word}] is neither tracked nor just read")]
    Untracked { value: DataValue, word: DataWord },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Control state of a synthesized machine.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SynthState {
    pub prefix_class: usize,
    /// `ptr(i)`: register holding the `i`-th influencing value.
    pub ptr: Vec<usize>,
    /// Absent for the tracker.
    pub tree: Option<DependencyTree>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SynthReport {
    pub bounds: Bounds,
    pub states: usize,
    pub transitions: usize,
    pub registers: usize,
    pub block_bound: usize,
    pub prefix_classes: usize,
    pub suffix_classes: usize,
    /// Every reachable state has all its transitions.
    pub closed: bool,
    /// States at the depth limit with transitions left out.
    pub frontier: usize,
}

impl fmt::Display for SynthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "states={} transitions={} registers={} B={} prefix_classes={} suffix_classes={} {}",
            self.states,
            self.transitions,
            self.registers,
            self.block_bound,
            self.prefix_classes,
            self.suffix_classes,
            if self.closed {
                "closed".to_string()
            } else {
                format!("partial frontier={}", self.frontier)
            }
        )
    }
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    pub machine: Ssrt,
    /// Indexed like `machine.states`.
    pub states: Vec<SynthState>,
    /// Indexed like `machine.variables`.
    pub variables: Vec<VarRef>,
    pub report: SynthReport,
}

impl Synthesis {
    /// The tree valuation held by a configuration of the machine.
    pub fn tree_valuation(&self, c: &Configuration) -> TreeValuation {
        self.variables
            .iter()
            .zip(&c.valuation.vars)
            .filter(|(_, w)| !w.is_empty())
            .map(|(v, w)| (v.clone(), w.clone()))
            .collect()
    }
}

/// The influencing-value tracker (no variables).
pub fn synth_ifl_tracker(f: &dyn Transduction, b: Bounds) -> Result<Synthesis, SynthError> {
    synthesize(f, b, false)
}

/// The full transducer: tracker states extended with reduced dependency
/// trees and variable updates.
pub fn synth_transducer(f: &dyn Transduction, b: Bounds) -> Result<Synthesis, SynthError> {
    synthesize(f, b, true)
}

struct Edge {
    source: usize,
    letter: Letter,
    guard: Guard,
    target: usize,
    store: Vec<usize>,
    update: BTreeMap<VarRef, Vec<Tok>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Var(VarRef),
    Out(Letter, ValueSource),
}

fn guard_for(ptr: &[usize], i: usize) -> Guard {
    Guard::and(
        ptr.iter()
            .enumerate()
            .map(|(j, &r)| {
                if j + 1 == i {
                    Guard::Eq(r)
                } else {
                    Guard::Neq(r)
                }
            })
            .collect(),
    )
}

fn synthesize(f: &dyn Transduction, b: Bounds, with_trees: bool) -> Result<Synthesis, SynthError> {
    let props = check_forward_properties(f, b);
    if !props.passes() {
        return Err(SynthError::Properties(props.render()));
    }
    let ctx = TreeContext::new(f, b)?;
    let an = ctx.analyzer();
    let alphabet = f.alphabet().to_vec();

    let initial = SynthState {
        prefix_class: 0,
        ptr: Vec::new(),
        tree: with_trees.then(|| ctx.bottom()),
    };
    let mut index: HashMap<SynthState, usize> = HashMap::new();
    let mut states = vec![initial.clone()];
    let mut depth = vec![0usize];
    index.insert(initial, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut edges = Vec::new();
    let mut frontier = BTreeSet::new();

    while let Some(q) = queue.pop_front() {
        let st = states[q].clone();
        let rep = ctx.prefix_rep(st.prefix_class);
        let uq = ctx.equalized(&rep);
        let m = st.ptr.len();
        for &letter in &alphabet {
            for i in 0..=m {
                let eta = DataValue::delta(i);
                let sym = Symbol::new(letter, eta);
                let ext = uq.appended(sym);
                let ifl = an.aifl(&ext);
                let target_class = ctx.prefix_class(&ext);
                let kept: BTreeSet<usize> = ifl
                    .iter()
                    .filter_map(|t| t.value.delta_index().filter(|&k| (1..=m).contains(&k)))
                    .map(|k| st.ptr[k - 1])
                    .collect();
                let reuse = (0..).find(|r| !kept.contains(r)).unwrap();
                let mut ptr2 = Vec::with_capacity(ifl.len());
                for t in &ifl {
                    match delta_slot(t.value) {
                        Some(k) if (1..=m).contains(&k) => ptr2.push(st.ptr[k - 1]),
                        Some(0) => ptr2.push(reuse),
                        _ => {
                            return Err(SynthError::Untracked {
                                value: t.value,
                                word: ext,
                            })
                        }
                    }
                }
                let store = if i == 0 && ifl.iter().any(|t| t.value == eta) {
                    vec![reuse]
                } else {
                    Vec::new()
                };
                let mut update = BTreeMap::new();
                let tree = match &st.tree {
                    None => None,
                    Some(t) => {
                        let se = ctx.extend_structure(t, st.prefix_class, sym)?;
                        let t2 = se.tree.shorten_fully()?;
                        let (t3, plan) = t2.trim_structure();
                        let mut ud1: HashMap<VarRef, Vec<Tok>> = HashMap::new();
                        for (v, items) in &se.new_middle {
                            ud1.insert(v.clone(), middle_tokens(items, &st.ptr, &ext)?);
                        }
                        let rhs = |x: &VarRef| {
                            ud1.get(x)
                                .cloned()
                                .unwrap_or_else(|| vec![Tok::Var(x.clone())])
                        };
                        let targets: BTreeSet<VarRef> =
                            plan.assignments.iter().map(|(t, _)| t.clone()).collect();
                        for (target, z) in &plan.assignments {
                            update.insert(target.clone(), z.iter().flat_map(rhs).collect());
                        }
                        // Everything else the old tree held is dropped.
                        for x in t.var_refs().into_iter().chain(plan.consumed()) {
                            if !targets.contains(&x) {
                                update.insert(x, Vec::new());
                            }
                        }
                        Some(t3)
                    }
                };
                let target = SynthState {
                    prefix_class: target_class,
                    ptr: ptr2,
                    tree,
                };
                let ti = match index.get(&target) {
                    Some(&ti) => ti,
                    None if depth[q] < b.max_word_len => {
                        states.push(target.clone());
                        depth.push(depth[q] + 1);
                        index.insert(target, states.len() - 1);
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    }
                    None => {
                        frontier.insert(q);
                        continue;
                    }
                };
                edges.push(Edge {
                    source: q,
                    letter,
                    guard: guard_for(&st.ptr, i),
                    target: ti,
                    store,
                    update,
                });
            }
        }
    }

    let registers = states
        .iter()
        .flat_map(|s| s.ptr.iter().map(|r| r + 1))
        .max()
        .unwrap_or(0);
    let mut vars: BTreeSet<VarRef> = BTreeSet::new();
    for s in &states {
        if let Some(t) = &s.tree {
            vars.extend(t.var_refs());
        }
    }
    for e in &edges {
        vars.extend(e.update.keys().cloned());
    }
    let variables: Vec<VarRef> = vars.into_iter().collect();
    let var_index: HashMap<&VarRef, usize> =
        variables.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let lower = |toks: &[Tok]| -> Vec<Elem> {
        toks.iter()
            .map(|t| match t {
                Tok::Var(v) => Elem::Var(var_index[v]),
                Tok::Out(l, s) => Elem::Out(*l, *s),
            })
            .collect()
    };

    let mut output = BTreeMap::new();
    for (q, s) in states.iter().enumerate() {
        let tpl = match &s.tree {
            Some(t) if !t.is_bottom() => {
                let leaf = t.leaf_ending_in(0)?;
                t.unrolled_blocks(&leaf)?
                    .into_iter()
                    .flatten()
                    .map(|v| Elem::Var(var_index[&v]))
                    .collect()
            }
            _ => Vec::new(),
        };
        output.insert(q, tpl);
    }
    let mut out_letters: BTreeSet<Letter> = alphabet.iter().copied().collect();
    let transitions: Vec<Transition> = edges
        .iter()
        .map(|e| {
            let update: BTreeMap<usize, Vec<Elem>> = e
                .update
                .iter()
                .map(|(x, rhs)| (var_index[x], lower(rhs)))
                .collect();
            for rhs in update.values() {
                for el in rhs {
                    if let Elem::Out(l, _) = el {
                        out_letters.insert(*l);
                    }
                }
            }
            Transition {
                source: e.source,
                letter: e.letter,
                guard: e.guard.clone(),
                target: e.target,
                store: e.store.clone(),
                update,
            }
        })
        .collect();

    let report = SynthReport {
        bounds: b,
        states: states.len(),
        transitions: transitions.len(),
        registers,
        block_bound: ctx.block_bound(),
        prefix_classes: ctx.prefix_class_count(),
        suffix_classes: ctx.suffixes().len(),
        closed: frontier.is_empty(),
        frontier: frontier.len(),
    };
    let kind = if with_trees { "transducer" } else { "tracker" };
    let metadata = vec![
        ("name".to_string(), format!("{}_{kind}", f.name())),
        (
            "synthesized".to_string(),
            format!("{kind} from {}", f.provenance()),
        ),
        ("bounds".to_string(), b.to_string()),
        ("I".to_string(), registers.to_string()),
        ("B".to_string(), ctx.block_bound().to_string()),
        (
            "prefix_classes".to_string(),
            report.prefix_classes.to_string(),
        ),
        (
            "suffix_classes".to_string(),
            report.suffix_classes.to_string(),
        ),
        ("closed".to_string(), report.closed.to_string()),
    ];
    let machine = Ssrt {
        input_alphabet: alphabet,
        output_alphabet: out_letters.into_iter().collect(),
        states: (0..states.len()).map(|q| format!("s{q}")).collect(),
        initial: 0,
        registers: (1..=registers).map(|r| format!("r{r}")).collect(),
        variables: variables.iter().map(|v| v.machine_name()).collect(),
        output,
        transitions,
        metadata,
    };
    Ok(Synthesis {
        machine,
        states,
        variables,
        report,
    })
}

/// `i` for `δ_i`, including `δ_0`.
fn delta_slot(d: DataValue) -> Option<usize> {
    if d == DataValue::delta(0) {
        Some(0)
    } else {
        d.delta_index()
    }
}

/// Middle-block items as update tokens: `δ_j` reads register `ptr(j)`,
/// `δ_0` the current value.
fn middle_tokens(
    items: &[FactoredItem],
    ptr: &[usize],
    word: &DataWord,
) -> Result<Vec<Tok>, SynthError> {
    items
        .iter()
        .map(|it| match *it {
            FactoredItem::Concrete { letter, value, .. } => match delta_slot(value) {
                Some(0) => Ok(Tok::Out(letter, ValueSource::Curr)),
                Some(j) if j <= ptr.len() => Ok(Tok::Out(letter, ValueSource::Reg(ptr[j - 1]))),
                _ => Err(SynthError::Unmappable {
                    value,
                    word: word.clone(),
                }),
            },
            FactoredItem::Abstract(_) => unreachable!("middle blocks hold concrete items"),
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mismatch {
    pub word: DataWord,
    pub expected: Option<OriginWord>,
    pub found: Option<OriginWord>,
    /// One line per step of the machine run.
    pub trace: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifyReport {
    pub words_checked: usize,
    pub mismatch: Option<Mismatch>,
}

impl VerifyReport {
    pub fn agrees(&self) -> bool {
        self.mismatch.is_none()
    }

    pub fn render(&self) -> String {
        let show = |o: &Option<OriginWord>| match o {
            Some(w) => w.to_string(),
            None => "UNDEFINED".to_string(),
        };
        match &self.mismatch {
            None => format!("AGREE {} words\n", self.words_checked),
            Some(m) => {
                let mut s = format!(
                    "MISMATCH w=[{}] expected=[{}] found=[{}] after {} words\n",
                    m.word,
                    show(&m.expected),
                    show(&m.found),
                    self.words_checked
                );
                for line in &m.trace {
                    s.push_str("  ");
                    s.push_str(line);
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn machine_output(m: &Ssrt, w: &DataWord) -> Option<OriginWord> {
    machine::transduce(m, w).ok().and_then(|o| o.output())
}

fn trace(m: &Ssrt, w: &DataWord) -> Vec<String> {
    let mut c = machine::initial_configuration(m);
    let mut lines = vec![format!("start {}", m.states[c.state])];
    for (i, &s) in w.symbols().iter().enumerate() {
        match machine::step(m, c, s) {
            Ok(machine::StepOutcome::Next(n)) => {
                let regs: Vec<String> = n
                    .valuation
                    .regs
                    .iter()
                    .map(|r| r.map(|d| d.to_string()).unwrap_or_else(|| "_".into()))
                    .collect();
                lines.push(format!(
                    "{} {s} -> {} regs=[{}]",
                    i + 1,
                    m.states[n.state],
                    regs.join(" ")
                ));
                c = n;
            }
            Ok(machine::StepOutcome::Stuck(st)) => {
                lines.push(format!("{} {s} STUCK in {}", i + 1, m.states[st.state]));
                return lines;
            }
            Err(e) => {
                lines.push(format!("{} {s} ERROR {e}", i + 1));
                return lines;
            }
        }
    }
    lines
}

/// Compares `m` with `f` on every word of length `≤ b.max_word_len` up to
/// isomorphism, over `f`'s alphabet.
pub fn verify_against_oracle(m: &Ssrt, f: &dyn Transduction, b: Bounds) -> VerifyReport {
    let words = canonical_words(f.alphabet(), b.max_word_len);
    for (n, w) in words.iter().enumerate() {
        let expected = f.apply(w);
        let found = machine_output(m, w);
        if expected != found {
            return VerifyReport {
                words_checked: n + 1,
                mismatch: Some(Mismatch {
                    word: w.clone(),
                    expected,
                    found,
                    trace: trace(m, w),
                }),
            };
        }
    }
    VerifyReport {
        words_checked: words.len(),
        mismatch: None,
    }
}
