use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::eval::{Budget, EvalError};
use crate::value::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Symbol {
    Zero,
    One,
    Blank,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Blank];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Blank => "B",
        }
    }

    fn parse(s: &str) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|a| a.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub const ALL: [Move; 3] = [Move::Left, Move::Stay, Move::Right];

    pub fn name(self) -> &'static str {
        match self {
            Move::Left => "-1",
            Move::Stay => "0",
            Move::Right => "+1",
        }
    }

    fn parse(s: &str) -> Option<Move> {
        match s {
            "-1" | "L" => Some(Move::Left),
            "0" | "S" => Some(Move::Stay),
            "+1" | "1" | "R" => Some(Move::Right),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Action {
    pub next: usize,
    pub write: Symbol,
    pub mv: Move,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TmError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid machine: {reason}")]
    Invalid { reason: String },
    #[error("cannot compile: {reason}")]
    Compile { reason: String },
}

fn invalid(reason: impl Into<String>) -> TmError {
    TmError::Invalid {
        reason: reason.into(),
    }
}

/// One-tape machine over `{0, 1, B}`. Accepting and rejecting states halt;
/// every other state has a transition for each symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TuringMachine {
    states: Vec<String>,
    start: usize,
    accept: BTreeSet<usize>,
    reject: BTreeSet<usize>,
    delta: BTreeMap<(usize, Symbol), Action>,
    /// Promised to halt within `n^time_exponent + time_constant` steps.
    pub time_exponent: u32,
    pub time_constant: u64,
}

impl TuringMachine {
    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accept.contains(&q)
    }

    pub fn is_halting(&self, q: usize) -> bool {
        self.accept.contains(&q) || self.reject.contains(&q)
    }

    pub fn accepting(&self) -> impl Iterator<Item = usize> + '_ {
        self.accept.iter().copied()
    }

    pub fn action(&self, q: usize, a: Symbol) -> Option<Action> {
        self.delta.get(&(q, a)).copied()
    }

    /// Transitions `(state, scanned, action)` in a fixed order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, Symbol, Action)> + '_ {
        self.delta.iter().map(|(&(q, a), &act)| (q, a, act))
    }

    /// Parses the line format:
    ///
    /// ```text
    /// start q0
    /// accept acc
    /// reject rej
    /// time_exponent 1
    /// time_constant 2
    /// q0,B -> s0,B,+1
    /// ```
    ///
    /// `accept` and `reject` may list several states. Moves are `-1`, `0`,
    /// `+1` (or `L`, `S`, `R`). `--` starts a comment.
    pub fn parse(text: &str) -> Result<TuringMachine, TmError> {
        let mut names: Vec<String> = Vec::new();
        let id = |s: &str, names: &mut Vec<String>| match names.iter().position(|n| n == s) {
            Some(i) => i,
            None => {
                names.push(s.to_string());
                names.len() - 1
            }
        };
        let (mut start, mut k, mut c) = (None, None, 0u64);
        let (mut accept, mut reject) = (BTreeSet::new(), BTreeSet::new());
        let mut delta = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split("--").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| TmError::Syntax {
                line: ln + 1,
                message: m,
            };
            if let Some((lhs, rhs)) = line.split_once("->") {
                let l: Vec<&str> = lhs.split(',').map(str::trim).collect();
                let r: Vec<&str> = rhs.split(',').map(str::trim).collect();
                let ([q, a], [q2, b, d]) = (&l[..], &r[..]) else {
                    return Err(err("expected `q,a -> q',a',d`".into()));
                };
                let sym =
                    |s: &str| Symbol::parse(s).ok_or_else(|| err(format!("unknown symbol `{s}`")));
                let key = (id(q, &mut names), sym(a)?);
                let act = Action {
                    next: id(q2, &mut names),
                    write: sym(b)?,
                    mv: Move::parse(d).ok_or_else(|| err(format!("unknown move `{d}`")))?,
                };
                if delta.insert(key, act).is_some() {
                    return Err(err(format!("duplicate transition for `{q},{a}`")));
                }
                continue;
            }
            let mut words = line
                .split(|ch: char| ch.is_whitespace() || ch == ',')
                .filter(|w| !w.is_empty());
            let key = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            let number = |rest: &[&str]| match rest {
                [v] => v
                    .parse::<u64>()
                    .map_err(|_| err(format!("bad number `{v}`"))),
                _ => Err(err(format!("`{key}` takes one number"))),
            };
            match key {
                "start" => match rest[..] {
                    [q] => start = Some(id(q, &mut names)),
                    _ => return Err(err("`start` takes one state".into())),
                },
                "accept" => rest.iter().for_each(|q| {
                    accept.insert(id(q, &mut names));
                }),
                "reject" => rest.iter().for_each(|q| {
                    reject.insert(id(q, &mut names));
                }),
                "time_exponent" => k = Some(number(&rest)? as u32),
                "time_constant" => c = number(&rest)?,
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let m = TuringMachine {
            states: names,
            start: start.ok_or_else(|| invalid("missing `start`"))?,
            accept,
            reject,
            delta,
            time_exponent: k.ok_or_else(|| invalid("missing `time_exponent`"))?,
            time_constant: c,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), TmError> {
        if let Some(q) = self.accept.intersection(&self.reject).next() {
            return Err(invalid(format!(
                "`{}` both accepts and rejects",
                self.states[*q]
            )));
        }
        for q in 0..self.states.len() {
            for a in Symbol::ALL {
                let has = self.delta.contains_key(&(q, a));
                if self.is_halting(q) && has {
                    return Err(invalid(format!(
                        "halting state `{}` has a transition",
                        self.states[q]
                    )));
                }
                if !self.is_halting(q) && !has {
                    return Err(invalid(format!(
                        "no transition for `{},{}`",
                        self.states[q],
                        a.name()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn contains_11() -> TuringMachine {
        TuringMachine::parse(CONTAINS_11).expect("bundled machine")
    }

    pub fn first_equals_last() -> TuringMachine {
        TuringMachine::parse(FIRST_EQ_LAST).expect("bundled machine")
    }
}

pub const CONTAINS_11: &str = include_str!("../../corpus/contains11.tm");
pub const FIRST_EQ_LAST: &str = include_str!("../../corpus/first_eq_last.tm");

impl fmt::Display for TuringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |set: &BTreeSet<usize>| {
            set.iter()
                .map(|&q| self.states[q].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "start {}", self.states[self.start])?;
        writeln!(f, "accept {}", list(&self.accept))?;
        writeln!(f, "reject {}", list(&self.reject))?;
        writeln!(f, "time_exponent {}", self.time_exponent)?;
        writeln!(f, "time_constant {}", self.time_constant)?;
        for (q, a, act) in self.transitions() {
            writeln!(
                f,
                "{},{} -> {},{},{}",
                self.states[q],
                a.name(),
                self.states[act.next],
                act.write.name(),
                act.mv.name()
            )?;
        }
        Ok(())
    }
}

/// `(q, i, τ)`: state, head position and the written part of the tape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalState {
    pub q: usize,
    pub i: usize,
    pub tape: Vec<Symbol>,
}

impl TotalState {
    /// Head on the blank at position 0, input in positions `1..=n`.
    pub fn initial(m: &TuringMachine, x: &BitString) -> TotalState {
        let mut tape = vec![Symbol::Blank];
        tape.extend(
            x.bits()
                .iter()
                .map(|&b| if b { Symbol::One } else { Symbol::Zero }),
        );
        TotalState {
            q: m.start,
            i: 0,
            tape,
        }
    }

    pub fn scanned(&self) -> Symbol {
        self.tape.get(self.i).copied().unwrap_or(Symbol::Blank)
    }

    fn step(&mut self, act: Action) {
        if self.i >= self.tape.len() {
            self.tape.resize(self.i + 1, Symbol::Blank);
        }
        self.tape[self.i] = act.write;
        self.q = act.next;
        self.i = match act.mv {
            Move::Left => self.i.saturating_sub(1),
            Move::Stay => self.i,
            Move::Right => self.i + 1,
        };
    }
}

/// Runs `m` on `x` until it halts. Returns acceptance and the number of steps.
pub fn run_tm(m: &TuringMachine, x: &BitString, budget: Budget) -> Result<(bool, u64), EvalError> {
    let mut s = TotalState::initial(m, x);
    let mut steps = 0u64;
    while !m.is_halting(s.q) {
        if steps == budget.max_steps {
            return Err(EvalError::Timeout {
                max_steps: budget.max_steps,
            });
        }
        let act = m.action(s.q, s.scanned()).expect("validated machine");
        s.step(act);
        steps += 1;
    }
    Ok((m.is_accepting(s.q), steps))
}
