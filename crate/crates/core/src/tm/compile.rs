//! Compilation of a time-bounded machine into a cons-free program.
//!
//! Time and tape positions are counters. A counter is a tuple of `k` input
//! suffixes, read as base-`(n+1)` digits (digit value = suffix length), topped
//! by `r` boolean digits that absorb the machine's additive time constant.
//! The program evaluates, by recursion on time:
//!
//! * `st_q t`      the machine is in state `q` at time `t`
//! * `pos t i`     the head is on cell `i` at time `t`
//! * `sym_a t i`   cell `i` holds `a` at time `t`
//! * `scan_a t`    the head reads `a` at time `t`
//! * `wr_a t`, `mv_d t`  what the step from `t` writes and how it moves
//!
//! Halting states loop in place, so the entry simply asks whether an
//! accepting state holds at the largest counter value.

use crate::syntax::{Definition, Dialect, Expr, Program};

use super::machine::{Move, Symbol, TmError, TuringMachine};

/// Layout of a counter: `k` suffix digits (least significant first), then
/// `r` boolean digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterShape {
    pub k: usize,
    pub r: usize,
}

impl CounterShape {
    /// Enough boolean digits that `(n+1)^k * 2^r - 1 >= n^k + c` for every `n`.
    pub fn for_machine(m: &TuringMachine) -> CounterShape {
        let c = m.time_constant;
        let r = (u64::BITS - c.leading_zeros()) as usize; // ⌈log₂(c+1)⌉
        CounterShape {
            k: m.time_exponent as usize,
            r,
        }
    }

    pub fn width(self) -> usize {
        self.k + self.r
    }

    /// Largest representable value on inputs of length `n`.
    pub fn max_value(self, n: usize) -> u128 {
        (n as u128 + 1).pow(self.k as u32) * (1u128 << self.r) - 1
    }

    /// Integer denoted by digit values (suffix lengths, then booleans).
    pub fn value_of(self, n: usize, suffix_lengths: &[usize], bools: &[bool]) -> u128 {
        let base = n as u128 + 1;
        let low = suffix_lengths
            .iter()
            .rev()
            .fold(0u128, |acc, &d| acc * base + d as u128);
        let high = bools
            .iter()
            .rev()
            .fold(0u128, |acc, &b| acc * 2 + b as u128);
        high * base.pow(self.k as u32) + low
    }
}

fn is_suffix_digit(shape: CounterShape, j: usize) -> bool {
    j < shape.k
}

fn x() -> Expr {
    Expr::var("x")
}

fn all(es: impl IntoIterator<Item = Expr>) -> Expr {
    let mut es: Vec<Expr> = es.into_iter().collect();
    match es.pop() {
        None => Expr::True,
        Some(last) => es.into_iter().rev().fold(last, |acc, e| Expr::and(e, acc)),
    }
}

fn any(es: impl IntoIterator<Item = Expr>) -> Expr {
    let mut es: Vec<Expr> = es.into_iter().collect();
    match es.pop() {
        None => Expr::False,
        Some(last) => es.into_iter().rev().fold(last, |acc, e| Expr::or(e, acc)),
    }
}

/// Code generation for counter arithmetic over digit expressions.
struct Counters {
    shape: CounterShape,
}

impl Counters {
    fn vars(&self, prefix: &str) -> Vec<Expr> {
        (0..self.shape.width())
            .map(|j| Expr::var(format!("{prefix}{j}")))
            .collect()
    }

    fn params(&self, prefix: &str) -> Vec<String> {
        (0..self.shape.width())
            .map(|j| format!("{prefix}{j}"))
            .collect()
    }

    fn digit_zero(&self, j: usize, d: &Expr) -> Expr {
        if is_suffix_digit(self.shape, j) {
            Expr::null(d.clone())
        } else {
            Expr::not(d.clone())
        }
    }

    fn digit_max(&self, j: usize, d: &Expr) -> Expr {
        if is_suffix_digit(self.shape, j) {
            Expr::call("eqlen", vec![x(), d.clone()])
        } else {
            d.clone()
        }
    }

    fn is_zero(&self, c: &[Expr]) -> Expr {
        all(c.iter().enumerate().map(|(j, d)| self.digit_zero(j, d)))
    }

    fn is_max(&self, c: &[Expr]) -> Expr {
        all(c.iter().enumerate().map(|(j, d)| self.digit_max(j, d)))
    }

    fn max(&self) -> Vec<Expr> {
        (0..self.shape.width())
            .map(|j| {
                if is_suffix_digit(self.shape, j) {
                    x()
                } else {
                    Expr::True
                }
            })
            .collect()
    }

    /// `c - 1`, wrapping from zero to the maximum.
    fn dec(&self, c: &[Expr]) -> Vec<Expr> {
        (0..c.len())
            .map(|j| {
                let d = &c[j];
                let stepped = if is_suffix_digit(self.shape, j) {
                    Expr::ite(Expr::null(d.clone()), x(), Expr::tail(d.clone()))
                } else {
                    Expr::not(d.clone())
                };
                let borrow = all((0..j).map(|l| self.digit_zero(l, &c[l])));
                if j == 0 {
                    stepped
                } else {
                    Expr::ite(borrow, stepped, d.clone())
                }
            })
            .collect()
    }

    /// `c + 1`, wrapping from the maximum to zero.
    fn inc(&self, c: &[Expr]) -> Vec<Expr> {
        (0..c.len())
            .map(|j| {
                let d = &c[j];
                let stepped = if is_suffix_digit(self.shape, j) {
                    Expr::ite(
                        Expr::call("eqlen", vec![x(), d.clone()]),
                        Expr::Nil,
                        Expr::call("succ_from", vec![x(), d.clone()]),
                    )
                } else {
                    Expr::not(d.clone())
                };
                let carry = all((0..j).map(|l| self.digit_max(l, &c[l])));
                if j == 0 {
                    stepped
                } else {
                    Expr::ite(carry, stepped, d.clone())
                }
            })
            .collect()
    }
}

/// Helper definitions shared by every compiled program.
fn helpers() -> Vec<Definition> {
    let (a, b) = (Expr::var("a"), Expr::var("b"));
    let (u, d) = (Expr::var("u"), Expr::var("d"));
    vec![
        // Suffixes of one input are equal iff their lengths are.
        Definition::new(
            "eqlen",
            &["a", "b"],
            Expr::ite(
                Expr::null(a.clone()),
                Expr::null(b.clone()),
                Expr::ite(
                    Expr::null(b.clone()),
                    Expr::False,
                    Expr::call("eqlen", vec![Expr::tail(a), Expr::tail(b)]),
                ),
            ),
        ),
        // The suffix of u one longer than d.
        Definition::new(
            "succ_from",
            &["u", "d"],
            Expr::ite(
                Expr::call("eqlen", vec![Expr::tail(u.clone()), d.clone()]),
                u.clone(),
                Expr::call("succ_from", vec![Expr::tail(u), d]),
            ),
        ),
        // Drops |d| elements from u.
        Definition::new(
            "drop_n",
            &["d", "u"],
            Expr::ite(
                Expr::null(Expr::var("d")),
                Expr::var("u"),
                Expr::call(
                    "drop_n",
                    vec![Expr::tail(Expr::var("d")), Expr::tail(Expr::var("u"))],
                ),
            ),
        ),
    ]
}

fn sym_tag(a: Symbol) -> &'static str {
    match a {
        Symbol::Zero => "0",
        Symbol::One => "1",
        Symbol::Blank => "B",
    }
}

fn move_tag(d: Move) -> &'static str {
    match d {
        Move::Left => "L",
        Move::Stay => "S",
        Move::Right => "R",
    }
}

struct Compiler<'m> {
    m: &'m TuringMachine,
    cnt: Counters,
    state_names: Vec<String>,
}

impl Compiler<'_> {
    fn call(&self, name: &str, counters: &[&[Expr]]) -> Expr {
        let mut args = vec![x()];
        for c in counters {
            args.extend(c.iter().cloned());
        }
        Expr::call(name, args)
    }

    fn def(&self, name: &str, counters: &[&str], body: Expr) -> Definition {
        let mut params = vec!["x".to_string()];
        for c in counters {
            params.extend(self.cnt.params(c));
        }
        let refs: Vec<&str> = params.iter().map(String::as_str).collect();
        Definition::new(name, &refs, body)
    }

    /// The step from `t` is taken by `(q, a)` when both hold at `t`.
    fn fires(&self, q: usize, a: Symbol, t: &[Expr]) -> Expr {
        Expr::and(
            self.call(&self.state_names[q], &[t]),
            self.call(&format!("scan_{}", sym_tag(a)), &[t]),
        )
    }

    fn halted_in(&self, t: &[Expr]) -> impl Iterator<Item = Expr> + '_ {
        let t = t.to_vec();
        (0..self.m.states().len())
            .filter(|&q| self.m.is_halting(q))
            .map(move |q| self.call(&self.state_names[q], &[&t]))
    }

    fn state_def(&self, q: usize, t: &[Expr], tp: &[Expr]) -> Definition {
        let mut steps: Vec<Expr> = self
            .m
            .transitions()
            .filter(|(_, _, act)| act.next == q)
            .map(|(p, a, _)| self.fires(p, a, tp))
            .collect();
        if self.m.is_halting(q) {
            steps.push(self.call(&self.state_names[q], &[tp]));
        }
        let initial = if q == self.m.start() {
            Expr::True
        } else {
            Expr::False
        };
        self.def(
            &self.state_names[q],
            &["t"],
            Expr::ite(self.cnt.is_zero(t), initial, any(steps)),
        )
    }

    fn write_def(&self, b: Symbol, t: &[Expr]) -> Definition {
        let mut cases: Vec<Expr> = self
            .m
            .transitions()
            .filter(|(_, _, act)| act.write == b)
            .map(|(p, a, _)| self.fires(p, a, t))
            .collect();
        // A halted machine rewrites what it reads.
        let halted = any(self.halted_in(t));
        cases.push(Expr::and(
            halted,
            self.call(&format!("scan_{}", sym_tag(b)), &[t]),
        ));
        self.def(&format!("wr_{}", sym_tag(b)), &["t"], any(cases))
    }

    fn move_def(&self, d: Move, t: &[Expr]) -> Definition {
        let mut cases: Vec<Expr> = self
            .m
            .transitions()
            .filter(|(_, _, act)| act.mv == d)
            .map(|(p, a, _)| self.fires(p, a, t))
            .collect();
        if d == Move::Stay {
            cases.extend(self.halted_in(t));
        }
        self.def(&format!("mv_{}", move_tag(d)), &["t"], any(cases))
    }

    fn pos_def(&self, t: &[Expr], tp: &[Expr], i: &[Expr]) -> Definition {
        let c = &self.cnt;
        let mv = |d| self.call(&format!("mv_{}", move_tag(d)), &[tp]);
        let pos = |j: &[Expr]| self.call("pos", &[tp, j]);
        let step = any([
            Expr::and(mv(Move::Stay), pos(i)),
            Expr::and(
                Expr::not(c.is_zero(i)),
                Expr::and(mv(Move::Right), pos(&c.dec(i))),
            ),
            Expr::and(
                Expr::not(c.is_max(i)),
                Expr::and(mv(Move::Left), pos(&c.inc(i))),
            ),
            // A left move at cell 0 stays put.
            Expr::and(c.is_zero(i), Expr::and(mv(Move::Left), pos(i))),
        ]);
        self.def(
            "pos",
            &["t", "i"],
            Expr::ite(c.is_zero(t), c.is_zero(i), step),
        )
    }

    fn initial_symbol(&self, a: Symbol, i: &[Expr]) -> Expr {
        let c = &self.cnt;
        // Cell i holds input bit i (1-based) when 1 <= i <= n, i.e. when
        // only the lowest digit is nonzero and it is nonzero.
        let on_input = all(std::iter::once(Expr::not(Expr::null(i[0].clone())))
            .chain((1..i.len()).map(|j| c.digit_zero(j, &i[j]))));
        let bit = Expr::head(Expr::call("drop_n", vec![Expr::tail(i[0].clone()), x()]));
        match a {
            Symbol::One => Expr::and(on_input, bit),
            Symbol::Zero => Expr::and(on_input, Expr::not(bit)),
            Symbol::Blank => Expr::not(on_input),
        }
    }

    fn sym_def(&self, a: Symbol, t: &[Expr], tp: &[Expr], i: &[Expr]) -> Definition {
        let name = format!("sym_{}", sym_tag(a));
        let body = Expr::ite(
            self.cnt.is_zero(t),
            self.initial_symbol(a, i),
            Expr::ite(
                self.call("pos", &[tp, i]),
                self.call(&format!("wr_{}", sym_tag(a)), &[tp]),
                self.call(&name, &[tp, i]),
            ),
        );
        self.def(&name, &["t", "i"], body)
    }

    /// `scan_a t` searches head positions downward from `t`; the head is
    /// never further right than the elapsed time.
    fn scan_defs(&self, a: Symbol, t: &[Expr], i: &[Expr]) -> [Definition; 2] {
        let tag = sym_tag(a);
        let from = format!("scan_from_{tag}");
        let here = Expr::and(
            self.call("pos", &[t, i]),
            self.call(&format!("sym_{tag}"), &[t, i]),
        );
        let lower = Expr::and(
            Expr::not(self.cnt.is_zero(i)),
            self.call(&from, &[t, &self.cnt.dec(i)]),
        );
        [
            self.def(&format!("scan_{tag}"), &["t"], self.call(&from, &[t, t])),
            self.def(&from, &["t", "i"], Expr::or(here, lower)),
        ]
    }
}

fn state_function_names(m: &TuringMachine) -> Vec<String> {
    let plain = m
        .states()
        .iter()
        .all(|s| !s.is_empty() && s.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_'));
    m.states()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if plain {
                format!("st_{s}")
            } else {
                format!("st_{i}")
            }
        })
        .collect()
}

/// Compiles `m` into a deterministic cons-free program accepting exactly
/// the inputs `m` accepts within its time promise.
pub fn compile_tm(m: &TuringMachine) -> Result<Program, TmError> {
    if m.time_exponent < 1 {
        return Err(TmError::Compile {
            reason: "time exponent must be at least 1".into(),
        });
    }
    let shape = CounterShape::for_machine(m);
    let comp = Compiler {
        m,
        cnt: Counters { shape },
        state_names: state_function_names(m),
    };
    let t = comp.cnt.vars("t");
    let i = comp.cnt.vars("i");
    let tp = comp.cnt.dec(&t);
    let tmax = comp.cnt.max();

    let entry = any(m
        .accepting()
        .map(|q| comp.call(&comp.state_names[q], &[&tmax])));
    let mut defs = vec![Definition::new("main", &["x"], entry)];
    for q in 0..m.states().len() {
        defs.push(comp.state_def(q, &t, &tp));
    }
    defs.push(comp.pos_def(&t, &tp, &i));
    for a in Symbol::ALL {
        defs.push(comp.sym_def(a, &t, &tp, &i));
        defs.extend(comp.scan_defs(a, &t, &i));
        defs.push(comp.write_def(a, &t));
    }
    for d in Move::ALL {
        defs.push(comp.move_def(d, &t));
    }
    defs.extend(helpers());
    Program::new(defs, Dialect::Deterministic).map_err(|e| TmError::Compile {
        reason: e.to_string(),
    })
}

/// Test harness for the counter code: `down x t` walks from `t` to zero by
/// decrements and `up x t` from `t` to the maximum by increments.
pub fn counter_walk_program(shape: CounterShape) -> Program {
    let cnt = Counters { shape };
    let t = cnt.vars("t");
    let params: Vec<String> = std::iter::once("x".to_string())
        .chain(cnt.params("t"))
        .collect();
    let refs: Vec<&str> = params.iter().map(String::as_str).collect();
    let with_x = |c: Vec<Expr>| std::iter::once(x()).chain(c).collect::<Vec<_>>();
    let zero: Vec<Expr> = (0..shape.width())
        .map(|j| {
            if is_suffix_digit(shape, j) {
                Expr::Nil
            } else {
                Expr::False
            }
        })
        .collect();
    let defs = vec![
        Definition::new(
            "main",
            &["x"],
            Expr::and(
                Expr::call("down", with_x(cnt.max())),
                Expr::call("up", with_x(zero)),
            ),
        ),
        Definition::new(
            "down",
            &refs,
            Expr::ite(
                cnt.is_zero(&t),
                Expr::True,
                Expr::call("down", with_x(cnt.dec(&t))),
            ),
        ),
        Definition::new(
            "up",
            &refs,
            Expr::ite(
                cnt.is_max(&t),
                Expr::True,
                Expr::call("up", with_x(cnt.inc(&t))),
            ),
        ),
    ];
    let defs = defs.into_iter().chain(helpers()).collect();
    Program::new(defs, Dialect::Deterministic).expect("valid counter program")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_memo, eval_stack_with_history, Budget};
    use crate::tm::run_tm;
    use crate::value::{BitString, Value};
    use std::collections::HashSet;

    #[test]
    fn shape_covers_time_promise() {
        let m = TuringMachine::contains_11();
        let s = CounterShape::for_machine(&m);
        assert_eq!(s, CounterShape { k: 1, r: 2 });
        for n in 0..20 {
            assert!(s.max_value(n) >= (n as u128).pow(1) + 2);
        }
    }

    #[test]
    fn counters_are_injective_and_step_by_one() {
        for shape in [
            CounterShape { k: 1, r: 0 },
            CounterShape { k: 2, r: 0 },
            CounterShape { k: 1, r: 2 },
        ] {
            let p = counter_walk_program(shape);
            for n in 0..4 {
                let x = BitString::new(vec![true; n]);
                let (stats, hist) =
                    eval_stack_with_history(&p, &x, Budget::default(), true).unwrap();
                assert_eq!(stats.result, Value::TRUE);
                for walk in ["down", "up"] {
                    let vals: Vec<u128> = hist
                        .iter()
                        .filter(|c| c.function == walk)
                        .map(|c| {
                            let lens: Vec<usize> = c.args[1..=shape.k]
                                .iter()
                                .map(|v| match v {
                                    Value::Suffix(o) => n - *o as usize,
                                    _ => panic!("digit is not a suffix"),
                                })
                                .collect();
                            let bools: Vec<bool> = c.args[1 + shape.k..]
                                .iter()
                                .map(|v| v.as_bool().unwrap())
                                .collect();
                            shape.value_of(n, &lens, &bools)
                        })
                        .collect();
                    let max = shape.max_value(n);
                    assert_eq!(vals.len() as u128, max + 1, "{walk} {shape:?} n={n}");
                    let distinct: HashSet<u128> = vals.iter().copied().collect();
                    assert_eq!(distinct.len(), vals.len());
                    let expect: Vec<u128> = if walk == "down" {
                        (0..=max).rev().collect()
                    } else {
                        (0..=max).collect()
                    };
                    assert_eq!(vals, expect);
                }
            }
        }
    }

    #[test]
    fn compiled_contains_11_agrees_on_short_inputs() {
        let m = TuringMachine::contains_11();
        let p = compile_tm(&m).unwrap();
        for n in 0..=4 {
            for x in BitString::all_of_length(n) {
                let want = run_tm(&m, &x, Budget::default()).unwrap().0;
                assert_eq!(eval_memo(&p, &x).unwrap().result, Value::Bool(want), "{x}");
            }
        }
    }

    #[test]
    fn immediately_accepting_machine() {
        let m = TuringMachine::parse("start a\naccept a\ntime_exponent 1").unwrap();
        let p = compile_tm(&m).unwrap();
        for x in ["", "0", "101"] {
            let x = crate::parse::parse_input(x).unwrap();
            assert_eq!(eval_memo(&p, &x).unwrap().result, Value::TRUE);
        }
    }

    #[test]
    fn exponent_zero_is_rejected() {
        let m = TuringMachine::parse("start a\naccept a\ntime_exponent 0").unwrap();
        assert!(matches!(compile_tm(&m), Err(TmError::Compile { .. })));
    }
}
