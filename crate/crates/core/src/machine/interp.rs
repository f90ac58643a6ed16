use crate::words::{DataValue, DataWord, OriginTriple, OriginWord, Symbol};

use super::{Elem, Guard, MachineError, Ssrt, ValueSource};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Valuation {
    pub regs: Vec<Option<DataValue>>,
    pub vars: Vec<OriginWord>,
}

impl Valuation {
    pub fn initial(m: &Ssrt) -> Self {
        Valuation {
            regs: vec![None; m.registers.len()],
            vars: vec![OriginWord::empty(); m.variables.len()],
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Configuration {
    pub state: usize,
    pub valuation: Valuation,
    pub count: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepOutcome {
    Next(Configuration),
    /// No transition is enabled; the configuration is handed back.
    Stuck(Configuration),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RunOutcome {
    Reached(Configuration),
    /// No transition was enabled when reading the symbol at 1-based
    /// position `at`.
    Stuck {
        at: usize,
        config: Configuration,
    },
}

impl RunOutcome {
    pub fn configuration(&self) -> Option<&Configuration> {
        match self {
            RunOutcome::Reached(c) => Some(c),
            RunOutcome::Stuck { .. } => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TransduceOutcome {
    Output(OriginWord),
    Stuck {
        at: usize,
    },
    /// The run ended in a state without output.
    NoOutput {
        state: usize,
    },
}

impl TransduceOutcome {
    pub fn output(self) -> Option<OriginWord> {
        match self {
            TransduceOutcome::Output(o) => Some(o),
            _ => None,
        }
    }
}

pub fn initial_configuration(m: &Ssrt) -> Configuration {
    Configuration {
        state: m.initial,
        valuation: Valuation::initial(m),
        count: 0,
    }
}

pub fn guard_eval(g: &Guard, v: &Valuation, d: DataValue) -> bool {
    g.eval_atoms(&|r| v.regs.get(r).copied().flatten() == Some(d))
}

fn read(
    m: &Ssrt,
    regs: &[Option<DataValue>],
    src: ValueSource,
    curr: DataValue,
) -> Result<DataValue, MachineError> {
    match src {
        ValueSource::Curr => Ok(curr),
        ValueSource::Reg(r) => regs
            .get(r)
            .copied()
            .flatten()
            .ok_or_else(|| MachineError::UndefinedRegisterRead(m.register_name(r))),
    }
}

/// One step. Consumes the configuration so that variable contents can be
/// moved rather than copied.
pub fn step(m: &Ssrt, c: Configuration, sym: Symbol) -> Result<StepOutcome, MachineError> {
    let mut enabled = m
        .outgoing(c.state, sym.letter)
        .filter(|&i| guard_eval(&m.transitions[i].guard, &c.valuation, sym.value));
    let Some(ti) = enabled.next() else {
        return Ok(StepOutcome::Stuck(c));
    };
    if let Some(other) = enabled.next() {
        return Err(MachineError::Nondeterministic(ti, other));
    }
    fire(m, ti, c, sym).map(StepOutcome::Next)
}

/// Takes transition `ti` (assumed enabled) on `sym`.
pub fn fire(
    m: &Ssrt,
    ti: usize,
    c: Configuration,
    sym: Symbol,
) -> Result<Configuration, MachineError> {
    let t = &m.transitions[ti];
    let pos = c.count + 1;
    let Configuration { valuation, .. } = c;
    let Valuation { regs, vars } = valuation;
    let mut old: Vec<Option<OriginWord>> = vars.into_iter().map(Some).collect();
    let mut new: Vec<Option<OriginWord>> = vec![None; old.len()];
    for (&x, rhs) in &t.update {
        let mut w = Vec::new();
        for e in rhs {
            match *e {
                Elem::Var(y) => {
                    let content = old
                        .get_mut(y)
                        .and_then(Option::take)
                        .ok_or_else(|| MachineError::NotCopyless(m.variable_name(y)))?;
                    w.extend(content.0);
                }
                Elem::Out(g, src) => {
                    let d = read(m, &regs, src, sym.value)?;
                    w.push(OriginTriple::new(g, d, pos));
                }
            }
        }
        new[x] = Some(OriginWord(w));
    }
    for (x, slot) in new.iter_mut().enumerate() {
        if slot.is_none() {
            *slot = Some(
                old[x]
                    .take()
                    .ok_or_else(|| MachineError::NotCopyless(m.variable_name(x)))?,
            );
        }
    }
    let mut regs = regs;
    for &r in &t.store {
        regs[r] = Some(sym.value);
    }
    Ok(Configuration {
        state: t.target,
        valuation: Valuation {
            regs,
            vars: new.into_iter().map(Option::unwrap).collect(),
        },
        count: pos,
    })
}

pub fn run(m: &Ssrt, w: &DataWord) -> Result<RunOutcome, MachineError> {
    let mut c = initial_configuration(m);
    for (i, &s) in w.symbols().iter().enumerate() {
        match step(m, c, s)? {
            StepOutcome::Next(n) => c = n,
            StepOutcome::Stuck(config) => return Ok(RunOutcome::Stuck { at: i + 1, config }),
        }
    }
    Ok(RunOutcome::Reached(c))
}

/// Output of a configuration reached on a word whose last value is `last`.
pub fn output_of(
    m: &Ssrt,
    c: &Configuration,
    last: Option<DataValue>,
) -> Result<Option<OriginWord>, MachineError> {
    let Some(tpl) = m.output.get(&c.state) else {
        return Ok(None);
    };
    let mut out = Vec::new();
    for e in tpl {
        match *e {
            Elem::Var(x) => out.extend_from_slice(&c.valuation.vars[x].0),
            Elem::Out(g, src) => {
                let d = match (src, last) {
                    (ValueSource::Curr, None) => return Err(MachineError::CurrOnEmptyWord),
                    (ValueSource::Curr, Some(d)) => d,
                    (ValueSource::Reg(_), _) => read(m, &c.valuation.regs, src, DataValue(0))?,
                };
                out.push(OriginTriple::new(g, d, c.count));
            }
        }
    }
    Ok(Some(OriginWord(out)))
}

pub fn transduce(m: &Ssrt, w: &DataWord) -> Result<TransduceOutcome, MachineError> {
    match run(m, w)? {
        RunOutcome::Stuck { at, .. } => Ok(TransduceOutcome::Stuck { at }),
        RunOutcome::Reached(c) => Ok(match output_of(m, &c, w.last_value())? {
            Some(o) => TransduceOutcome::Output(o),
            None => TransduceOutcome::NoOutput { state: c.state },
        }),
    }
}
