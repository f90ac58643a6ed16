//! Text format for machines.
//!
//! ```text
//! # name: example
//! [alphabets]
//! input = a b
//! output = a b
//!
//! [states]
//! q0 initial
//! q1
//!
//! [registers]
//! r1
//!
//! [vars]
//! x
//!
//! [output]
//! q1 = {x} a:{r1}
//!
//! [transitions]
//! q0 a [true] -> q1 store r1 do x := {x} a:{curr}
//! q1 a [r1= | !r1!=] -> q1 do x := a:{curr} {x}
//! ```
//!
//! Leading `# key: value` comment lines are kept as metadata.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::words::{valid_name, Letter};

use super::validate::{co_satisfiable, copyless_violations, output_violations};
use super::{Elem, Guard, Ssrt, Transition, ValueSource};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// A parsed machine together with the source line of each transition and
/// output declaration.
#[derive(Clone, Debug)]
pub struct ParsedMachine {
    pub machine: Ssrt,
    pub transition_lines: Vec<usize>,
    pub output_lines: BTreeMap<usize, usize>,
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Section {
    None,
    Alphabets,
    States,
    Registers,
    Vars,
    Output,
    Transitions,
}

/// Parses a machine and rejects any violation of copylessness, output
/// occurrence or determinism, naming the offending line.
pub fn parse_machine(text: &str) -> Result<Ssrt, ParseError> {
    let p = parse_machine_unchecked(text)?;
    let m = &p.machine;
    for (&q, tpl) in &m.output {
        if let Some(&x) = output_violations(tpl).first() {
            return err(
                p.output_lines[&q],
                format!(
                    "variable {} occurs more than once in the output",
                    m.variables[x]
                ),
            );
        }
    }
    for (i, t) in m.transitions.iter().enumerate() {
        if let Some(&x) = copyless_violations(m, &t.update).first() {
            return err(
                p.transition_lines[i],
                format!(
                    "update is not copyless: variable {} used more than once",
                    m.variables[x]
                ),
            );
        }
        for j in 0..i {
            let s = &m.transitions[j];
            if s.source == t.source
                && s.letter == t.letter
                && co_satisfiable(&s.guard, &t.guard).is_some()
            {
                return err(
                    p.transition_lines[i],
                    format!(
                        "guard overlaps the transition on line {}",
                        p.transition_lines[j]
                    ),
                );
            }
        }
    }
    Ok(p.machine)
}

/// Parses without the semantic occurrence and determinism checks.
pub fn parse_machine_unchecked(text: &str) -> Result<ParsedMachine, ParseError> {
    let mut m = Ssrt::default();
    let mut section = Section::None;
    let mut initial: Option<usize> = None;
    let mut seen_alpha = (false, false);
    let mut pending_outputs: Vec<(usize, String)> = Vec::new();
    let mut pending_trans: Vec<(usize, String)> = Vec::new();
    let mut in_header = true;

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            if in_header {
                if let Some((k, v)) = comment.split_once(':') {
                    m.metadata
                        .push((k.trim().to_string(), v.trim().to_string()));
                }
            }
            continue;
        }
        let line = match raw.find('#') {
            Some(p) => raw[..p].trim(),
            None => trimmed,
        };
        if line.is_empty() {
            continue;
        }
        in_header = false;
        if line.starts_with('[') && line.ends_with(']') && !line.contains(' ') {
            section = match &line[1..line.len() - 1] {
                "alphabets" => Section::Alphabets,
                "states" => Section::States,
                "registers" => Section::Registers,
                "vars" => Section::Vars,
                "output" => Section::Output,
                "transitions" => Section::Transitions,
                other => return err(ln, format!("unknown section [{other}]")),
            };
            continue;
        }
        match section {
            Section::None => return err(ln, "content before the first section"),
            Section::Alphabets => {
                let (k, v) = match line.split_once('=') {
                    Some(kv) => kv,
                    None => return err(ln, "expected `input = ...` or `output = ...`"),
                };
                let letters = v
                    .split_whitespace()
                    .map(|n| Letter::new(n).or_else(|_| err(ln, format!("invalid letter `{n}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                match k.trim() {
                    "input" => {
                        m.input_alphabet = letters;
                        seen_alpha.0 = true;
                    }
                    "output" => {
                        m.output_alphabet = letters;
                        seen_alpha.1 = true;
                    }
                    other => return err(ln, format!("unknown alphabet `{other}`")),
                }
            }
            Section::States => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                let (name, is_init) = match toks.as_slice() {
                    [n] => (*n, false),
                    [n, "initial"] => (*n, true),
                    _ => return err(ln, "expected `<state>` or `<state> initial`"),
                };
                check_name(ln, name, "state")?;
                if m.state_index(name).is_some() {
                    return err(ln, format!("duplicate state `{name}`"));
                }
                m.states.push(name.to_string());
                if is_init {
                    if initial.is_some() {
                        return err(ln, "second initial state");
                    }
                    initial = Some(m.states.len() - 1);
                }
            }
            Section::Registers | Section::Vars => {
                for n in line.split_whitespace() {
                    let (table, what) = if section == Section::Registers {
                        (&mut m.registers, "register")
                    } else {
                        (&mut m.variables, "variable")
                    };
                    check_name(ln, n, what)?;
                    if n == "curr" {
                        return err(ln, "`curr` is reserved");
                    }
                    if table.iter().any(|x| x == n) {
                        return err(ln, format!("duplicate {what} `{n}`"));
                    }
                    table.push(n.to_string());
                }
            }
            Section::Output => pending_outputs.push((ln, line.to_string())),
            Section::Transitions => pending_trans.push((ln, line.to_string())),
        }
    }
    if !seen_alpha.0 || !seen_alpha.1 {
        return err(
            text.lines().count().max(1),
            "missing input or output alphabet",
        );
    }
    m.initial = match initial {
        Some(q) => q,
        None => return err(text.lines().count().max(1), "no initial state"),
    };

    let mut output_lines = BTreeMap::new();
    for (ln, line) in pending_outputs {
        let (q, tpl) = match line.split_once('=') {
            Some(x) => x,
            None => return err(ln, "expected `<state> = <template>`"),
        };
        let q = q.trim();
        let qi = match m.state_index(q) {
            Some(i) => i,
            None => return err(ln, format!("undeclared state `{q}`")),
        };
        if output_lines.contains_key(&qi) {
            return err(ln, format!("second output for state `{q}`"));
        }
        let elems = parse_template(&m, ln, tpl)?;
        m.output.insert(qi, elems);
        output_lines.insert(qi, ln);
    }

    let mut transition_lines = Vec::new();
    for (ln, line) in pending_trans {
        let t = parse_transition(&m, ln, &line)?;
        m.transitions.push(t);
        transition_lines.push(ln);
    }
    Ok(ParsedMachine {
        machine: m,
        transition_lines,
        output_lines,
    })
}

fn check_name(ln: usize, n: &str, what: &str) -> Result<(), ParseError> {
    if valid_name(n) && !matches!(n, "do" | "store" | "initial" | "true" | "false") {
        Ok(())
    } else {
        err(ln, format!("invalid {what} name `{n}`"))
    }
}

fn parse_template(m: &Ssrt, ln: usize, tpl: &str) -> Result<Vec<Elem>, ParseError> {
    let mut out = Vec::new();
    for tok in tpl.split_whitespace() {
        if tok == "EPS" {
            continue;
        }
        if let Some(x) = tok.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            match m.variable_index(x) {
                Some(i) => out.push(Elem::Var(i)),
                None => return err(ln, format!("undeclared variable `{x}`")),
            }
            continue;
        }
        let (g, src) = match tok.split_once(':') {
            Some((g, s)) => (g, s),
            None => return err(ln, format!("malformed token `{tok}`")),
        };
        let letter = match Letter::new(g) {
            Ok(l) if m.output_alphabet.contains(&l) => l,
            _ => return err(ln, format!("undeclared output letter `{g}`")),
        };
        let src = match src.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            Some("curr") => ValueSource::Curr,
            Some(r) => match m.register_index(r) {
                Some(i) => ValueSource::Reg(i),
                None => return err(ln, format!("undeclared register `{r}`")),
            },
            None => return err(ln, format!("malformed token `{tok}`")),
        };
        out.push(Elem::Out(letter, src));
    }
    Ok(out)
}

fn parse_transition(m: &Ssrt, ln: usize, line: &str) -> Result<Transition, ParseError> {
    let open = match line.find('[') {
        Some(p) => p,
        None => return err(ln, "expected `<src> <letter> [<guard>] -> <dst> ...`"),
    };
    let close = match line[open..].find(']') {
        Some(p) => open + p,
        None => return err(ln, "unterminated guard"),
    };
    let head: Vec<&str> = line[..open].split_whitespace().collect();
    let [src, letter] = head.as_slice() else {
        return err(ln, "expected `<src> <letter>` before the guard");
    };
    let source = match m.state_index(src) {
        Some(q) => q,
        None => return err(ln, format!("undeclared state `{src}`")),
    };
    let letter = match Letter::new(letter) {
        Ok(l) if m.input_alphabet.contains(&l) => l,
        _ => return err(ln, format!("undeclared input letter `{letter}`")),
    };
    let guard = GuardParser::new(m, ln, &line[open + 1..close])?.parse_all()?;

    let rest = line[close + 1..].trim();
    let rest = match rest.strip_prefix("->") {
        Some(r) => r.trim(),
        None => return err(ln, "expected `->` after the guard"),
    };
    let (head, updates) = match rest.split_once(" do ") {
        Some((h, u)) => (h, Some(u)),
        None => match rest.strip_suffix(" do") {
            Some(h) => (h, Some("")),
            None => (rest, None),
        },
    };
    let mut toks = head.split_whitespace();
    let tgt = match toks.next() {
        Some(t) => t,
        None => return err(ln, "missing target state"),
    };
    let target = match m.state_index(tgt) {
        Some(q) => q,
        None => return err(ln, format!("undeclared state `{tgt}`")),
    };
    let mut store = Vec::new();
    match toks.next() {
        None => {}
        Some("store") => {
            for r in toks {
                match m.register_index(r) {
                    Some(i) if !store.contains(&i) => store.push(i),
                    Some(_) => return err(ln, format!("register `{r}` stored twice")),
                    None => return err(ln, format!("undeclared register `{r}`")),
                }
            }
        }
        Some(other) => return err(ln, format!("unexpected `{other}` after the target")),
    }
    store.sort_unstable();
    let mut update = BTreeMap::new();
    if let Some(u) = updates {
        for part in u.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (x, tpl) = match part.split_once(":=") {
                Some(kv) => kv,
                None => return err(ln, format!("malformed update `{part}`")),
            };
            let x = x.trim();
            let xi = match m.variable_index(x) {
                Some(i) => i,
                None => return err(ln, format!("undeclared variable `{x}`")),
            };
            if update.contains_key(&xi) {
                return err(ln, format!("variable `{x}` updated twice"));
            }
            update.insert(xi, parse_template(m, ln, tpl)?);
        }
    }
    Ok(Transition {
        source,
        letter,
        guard,
        target,
        store,
        update,
    })
}

struct GuardParser<'a> {
    m: &'a Ssrt,
    ln: usize,
    toks: Vec<String>,
    pos: usize,
}

impl<'a> GuardParser<'a> {
    fn new(m: &'a Ssrt, ln: usize, s: &str) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        let cs: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < cs.len() {
            let c = cs[i];
            if c.is_whitespace() {
                i += 1;
            } else if "()&|".contains(c) {
                toks.push(c.to_string());
                i += 1;
            } else if c == '!' && cs.get(i + 1) != Some(&'=') {
                toks.push("!".into());
                i += 1;
            } else {
                let start = i;
                while i < cs.len() && !cs[i].is_whitespace() && !"()&|!=".contains(cs[i]) {
                    i += 1;
                }
                let name: String = cs[start..i].iter().collect();
                if name.is_empty() {
                    return err(ln, format!("unexpected `{c}` in guard"));
                }
                if cs.get(i) == Some(&'=') {
                    toks.push(format!("{name}="));
                    i += 1;
                } else if cs.get(i) == Some(&'!') && cs.get(i + 1) == Some(&'=') {
                    toks.push(format!("{name}!="));
                    i += 2;
                } else {
                    toks.push(name);
                }
            }
        }
        Ok(GuardParser {
            m,
            ln,
            toks,
            pos: 0,
        })
    }

    fn parse_all(mut self) -> Result<Guard, ParseError> {
        if self.toks.is_empty() {
            return err(self.ln, "empty guard");
        }
        let g = self.or()?;
        if self.pos != self.toks.len() {
            return err(
                self.ln,
                format!("unexpected `{}` in guard", self.toks[self.pos]),
            );
        }
        Ok(g)
    }

    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(String::as_str)
    }

    fn or(&mut self) -> Result<Guard, ParseError> {
        let mut gs = vec![self.and()?];
        while self.peek() == Some("|") {
            self.pos += 1;
            gs.push(self.and()?);
        }
        Ok(Guard::or(gs))
    }

    fn and(&mut self) -> Result<Guard, ParseError> {
        let mut gs = vec![self.unary()?];
        while self.peek() == Some("&") {
            self.pos += 1;
            gs.push(self.unary()?);
        }
        Ok(Guard::and(gs))
    }

    fn unary(&mut self) -> Result<Guard, ParseError> {
        let tok = match self.peek() {
            Some(t) => t.to_string(),
            None => return err(self.ln, "guard ends unexpectedly"),
        };
        self.pos += 1;
        match tok.as_str() {
            "!" => Ok(Guard::Not(Box::new(self.unary()?))),
            "(" => {
                let g = self.or()?;
                if self.peek() != Some(")") {
                    return err(self.ln, "missing `)` in guard");
                }
                self.pos += 1;
                Ok(g)
            }
            "true" => Ok(Guard::True),
            "false" => Ok(Guard::False),
            t => {
                let (name, eq) = if let Some(n) = t.strip_suffix("!=") {
                    (n, false)
                } else if let Some(n) = t.strip_suffix('=') {
                    (n, true)
                } else {
                    return err(self.ln, format!("unexpected `{t}` in guard"));
                };
                match self.m.register_index(name) {
                    Some(r) if eq => Ok(Guard::Eq(r)),
                    Some(r) => Ok(Guard::Neq(r)),
                    None => err(self.ln, format!("undeclared register `{name}`")),
                }
            }
        }
    }
}

fn render_template(m: &Ssrt, elems: &[Elem]) -> String {
    let toks: Vec<String> = elems
        .iter()
        .map(|e| match *e {
            Elem::Var(x) => format!("{{{}}}", m.variables[x]),
            Elem::Out(g, ValueSource::Curr) => format!("{g}:{{curr}}"),
            Elem::Out(g, ValueSource::Reg(r)) => format!("{g}:{{{}}}", m.registers[r]),
        })
        .collect();
    if toks.is_empty() {
        "EPS".to_string()
    } else {
        toks.join(" ")
    }
}

fn join_letters(ls: &[Letter]) -> String {
    ls.iter().map(|l| l.name()).collect::<Vec<_>>().join(" ")
}

pub fn write_machine(m: &Ssrt) -> String {
    let mut s = String::new();
    for (k, v) in &m.metadata {
        let _ = writeln!(s, "# {k}: {v}");
    }
    if !m.metadata.is_empty() {
        s.push('\n');
    }
    let _ = writeln!(s, "[alphabets]");
    let _ = writeln!(s, "input = {}", join_letters(&m.input_alphabet));
    let _ = writeln!(s, "output = {}", join_letters(&m.output_alphabet));
    let _ = writeln!(s, "\n[states]");
    for (i, q) in m.states.iter().enumerate() {
        if i == m.initial {
            let _ = writeln!(s, "{q} initial");
        } else {
            let _ = writeln!(s, "{q}");
        }
    }
    if !m.registers.is_empty() {
        let _ = writeln!(s, "\n[registers]");
        let _ = writeln!(s, "{}", m.registers.join(" "));
    }
    if !m.variables.is_empty() {
        let _ = writeln!(s, "\n[vars]");
        for x in &m.variables {
            let _ = writeln!(s, "{x}");
        }
    }
    let _ = writeln!(s, "\n[output]");
    for (&q, tpl) in &m.output {
        let _ = writeln!(s, "{} = {}", m.states[q], render_template(m, tpl));
    }
    let _ = writeln!(s, "\n[transitions]");
    for t in &m.transitions {
        let _ = write!(
            s,
            "{} {} [{}] -> {}",
            m.states[t.source],
            t.letter,
            t.guard.render(&|r| m.registers[r].clone()),
            m.states[t.target]
        );
        if !t.store.is_empty() {
            let regs: Vec<&str> = t.store.iter().map(|&r| m.registers[r].as_str()).collect();
            let _ = write!(s, " store {}", regs.join(" "));
        }
        if !t.update.is_empty() {
            let ups: Vec<String> = t
                .update
                .iter()
                .map(|(&x, rhs)| format!("{} := {}", m.variables[x], render_template(m, rhs)))
                .collect();
            let _ = write!(s, " do {}", ups.join(" ; "));
        }
        s.push('\n');
    }
    s
}
