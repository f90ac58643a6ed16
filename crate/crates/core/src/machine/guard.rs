use std::collections::BTreeSet;
use std::fmt;

/// Boolean combination of `Eq(r)` / `Neq(r)` atoms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Guard {
    True,
    False,
    Eq(usize),
    Neq(usize),
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn and(gs: Vec<Guard>) -> Guard {
        match gs.len() {
            0 => Guard::True,
            1 => gs.into_iter().next().unwrap(),
            _ => Guard::And(gs),
        }
    }

    pub fn or(gs: Vec<Guard>) -> Guard {
        match gs.len() {
            0 => Guard::False,
            1 => gs.into_iter().next().unwrap(),
            _ => Guard::Or(gs),
        }
    }

    /// Evaluates under an assignment of truth values to the `Eq` atoms.
    pub fn eval_atoms(&self, eq: &dyn Fn(usize) -> bool) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Eq(r) => eq(*r),
            Guard::Neq(r) => !eq(*r),
            Guard::Not(g) => !g.eval_atoms(eq),
            Guard::And(gs) => gs.iter().all(|g| g.eval_atoms(eq)),
            Guard::Or(gs) => gs.iter().any(|g| g.eval_atoms(eq)),
        }
    }

    pub fn registers(&self, out: &mut BTreeSet<usize>) {
        match self {
            Guard::True | Guard::False => {}
            Guard::Eq(r) | Guard::Neq(r) => {
                out.insert(*r);
            }
            Guard::Not(g) => g.registers(out),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| g.registers(out)),
        }
    }

    /// Renders with register names supplied by `name`.
    pub fn render(&self, name: &dyn Fn(usize) -> String) -> String {
        struct R<'a>(&'a Guard, &'a dyn Fn(usize) -> String, u8);
        impl fmt::Display for R<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                // prec: 0 = or-level, 1 = and-level, 2 = atom-level
                let (g, name, prec) = (self.0, self.1, self.2);
                match g {
                    Guard::True => f.write_str("true"),
                    Guard::False => f.write_str("false"),
                    Guard::Eq(r) => write!(f, "{}=", name(*r)),
                    Guard::Neq(r) => write!(f, "{}!=", name(*r)),
                    Guard::Not(inner) => write!(f, "!{}", R(inner, name, 2)),
                    Guard::And(gs) | Guard::Or(gs) => {
                        let (sep, own) = if matches!(g, Guard::And(_)) {
                            (" & ", 1)
                        } else {
                            (" | ", 0)
                        };
                        if prec > own {
                            f.write_str("(")?;
                        }
                        for (i, x) in gs.iter().enumerate() {
                            if i > 0 {
                                f.write_str(sep)?;
                            }
                            write!(f, "{}", R(x, name, own + 1))?;
                        }
                        if prec > own {
                            f.write_str(")")?;
                        }
                        Ok(())
                    }
                }
            }
        }
        R(self, name, 0).to_string()
    }
}
