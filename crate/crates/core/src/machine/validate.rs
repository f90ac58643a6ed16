use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Elem, Guard, Ssrt, ValueSource};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    /// Variable used more than once across the updates of a transition
    /// (unlisted variables count as `x := x`).
    Copyless {
        transition: usize,
        variable: usize,
    },
    /// Variable occurring more than once in an output template.
    OutputOccurrence {
        state: usize,
        variable: usize,
    },
    Undeclared {
        context: String,
        what: String,
    },
    /// Two transitions with equal source and letter can be enabled together;
    /// `witness` lists the registers whose `Eq` atom is true.
    Nondeterministic {
        first: usize,
        second: usize,
        witness: Vec<usize>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn render(&self, m: &Ssrt) -> String {
        if self.is_valid() {
            return "VALID\n".to_string();
        }
        let mut s = String::new();
        for v in &self.violations {
            s.push_str(&render_violation(m, v));
            s.push('\n');
        }
        s
    }
}

pub(crate) fn render_violation(m: &Ssrt, v: &Violation) -> String {
    let t_desc = |i: usize| {
        let t = &m.transitions[i];
        format!(
            "transition {} ({} {} -> {})",
            i + 1,
            m.states.get(t.source).map_or("?", String::as_str),
            t.letter,
            m.states.get(t.target).map_or("?", String::as_str)
        )
    };
    match v {
        Violation::Copyless {
            transition,
            variable,
        } => format!(
            "COPYLESS {}: variable {} occurs more than once",
            t_desc(*transition),
            m.variable_name(*variable)
        ),
        Violation::OutputOccurrence { state, variable } => format!(
            "OUTPUT state {}: variable {} occurs more than once",
            m.states[*state],
            m.variable_name(*variable)
        ),
        Violation::Undeclared { context, what } => format!("UNDECLARED {context}: {what}"),
        Violation::Nondeterministic {
            first,
            second,
            witness,
        } => {
            let regs: Vec<String> = witness.iter().map(|&r| m.register_name(r)).collect();
            format!(
                "NONDETERMINISTIC {} and {}: both enabled when equal to {{{}}}",
                t_desc(*first),
                t_desc(*second),
                regs.join(",")
            )
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

fn check_elems(m: &Ssrt, elems: &[Elem], context: &str, out: &mut Vec<Violation>) {
    for e in elems {
        match *e {
            Elem::Var(x) if x >= m.variables.len() => out.push(Violation::Undeclared {
                context: context.to_string(),
                what: format!("variable #{x}"),
            }),
            Elem::Out(g, src) => {
                if !m.output_alphabet.contains(&g) {
                    out.push(Violation::Undeclared {
                        context: context.to_string(),
                        what: format!("output letter {g}"),
                    });
                }
                if let ValueSource::Reg(r) = src {
                    if r >= m.registers.len() {
                        out.push(Violation::Undeclared {
                            context: context.to_string(),
                            what: format!("register #{r}"),
                        });
                    }
                }
            }
            _ => {}
        }
    }
}

/// Variables used more than once by a transition's parallel update.
pub(crate) fn copyless_violations(m: &Ssrt, update: &BTreeMap<usize, Vec<Elem>>) -> Vec<usize> {
    // Unlisted variables keep themselves.
    let mut count: Vec<usize> = (0..m.variables.len())
        .map(|x| usize::from(!update.contains_key(&x)))
        .collect();
    for rhs in update.values() {
        for e in rhs {
            if let Elem::Var(y) = *e {
                if y < count.len() {
                    count[y] += 1;
                }
            }
        }
    }
    (0..count.len()).filter(|&x| count[x] > 1).collect()
}

pub(crate) fn output_violations(tpl: &[Elem]) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut dup = BTreeSet::new();
    for e in tpl {
        if let Elem::Var(x) = *e {
            if !seen.insert(x) {
                dup.insert(x);
            }
        }
    }
    dup.into_iter().collect()
}

/// An assignment of `Eq` atoms satisfying both guards, if any.
pub(crate) fn co_satisfiable(g1: &Guard, g2: &Guard) -> Option<Vec<usize>> {
    let mut regs = BTreeSet::new();
    g1.registers(&mut regs);
    g2.registers(&mut regs);
    let regs: Vec<usize> = regs.into_iter().collect();
    assert!(
        regs.len() < 24,
        "too many registers for truth-table enumeration"
    );
    for bits in 0u32..(1 << regs.len()) {
        let eq = |r: usize| {
            let k = regs.iter().position(|&x| x == r).unwrap();
            bits >> k & 1 == 1
        };
        if g1.eval_atoms(&eq) && g2.eval_atoms(&eq) {
            return Some(
                regs.iter()
                    .enumerate()
                    .filter(|(k, _)| bits >> k & 1 == 1)
                    .map(|(_, &r)| r)
                    .collect(),
            );
        }
    }
    None
}

pub fn validate(m: &Ssrt) -> ValidationReport {
    let mut v = Vec::new();
    let nq = m.states.len();
    if m.initial >= nq {
        v.push(Violation::Undeclared {
            context: "initial state".into(),
            what: format!("state #{}", m.initial),
        });
    }
    for (&q, tpl) in &m.output {
        let ctx = format!("output of state #{q}");
        if q >= nq {
            v.push(Violation::Undeclared {
                context: ctx.clone(),
                what: format!("state #{q}"),
            });
        }
        check_elems(m, tpl, &ctx, &mut v);
        for x in output_violations(tpl) {
            v.push(Violation::OutputOccurrence {
                state: q,
                variable: x,
            });
        }
    }
    for (i, t) in m.transitions.iter().enumerate() {
        let ctx = format!("transition {}", i + 1);
        if t.source >= nq || t.target >= nq {
            v.push(Violation::Undeclared {
                context: ctx.clone(),
                what: "state".into(),
            });
        }
        if !m.input_alphabet.contains(&t.letter) {
            v.push(Violation::Undeclared {
                context: ctx.clone(),
                what: format!("input letter {}", t.letter),
            });
        }
        let mut regs = BTreeSet::new();
        t.guard.registers(&mut regs);
        regs.extend(t.store.iter().copied());
        for r in regs.into_iter().filter(|&r| r >= m.registers.len()) {
            v.push(Violation::Undeclared {
                context: ctx.clone(),
                what: format!("register #{r}"),
            });
        }
        for (&x, rhs) in &t.update {
            if x >= m.variables.len() {
                v.push(Violation::Undeclared {
                    context: ctx.clone(),
                    what: format!("variable #{x}"),
                });
            }
            check_elems(m, rhs, &ctx, &mut v);
        }
        for x in copyless_violations(m, &t.update) {
            v.push(Violation::Copyless {
                transition: i,
                variable: x,
            });
        }
    }
    let mut groups: BTreeMap<(usize, String), Vec<usize>> = BTreeMap::new();
    for (i, t) in m.transitions.iter().enumerate() {
        groups
            .entry((t.source, t.letter.name()))
            .or_default()
            .push(i);
    }
    for ts in groups.values() {
        for (a, &i) in ts.iter().enumerate() {
            for &j in &ts[a + 1..] {
                if let Some(w) = co_satisfiable(&m.transitions[i].guard, &m.transitions[j].guard) {
                    v.push(Violation::Nondeterministic {
                        first: i,
                        second: j,
                        witness: w,
                    });
                }
            }
        }
    }
    ValidationReport { violations: v }
}
