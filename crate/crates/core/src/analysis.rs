//! Static classification of call shapes.
//!
//! `alpha` maps an expression to `X` (no calls), `T` (only tail calls) or
//! `N` (some call in a non-tail position). A program is tail recursive when
//! every body classifies as `X` or `T`.

use std::fmt;

use serde::Serialize;

use crate::syntax::{Expr, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AlphaClass {
    X,
    T,
    N,
}

impl fmt::Display for AlphaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlphaClass::X => "X",
            AlphaClass::T => "T",
            AlphaClass::N => "N",
        };
        f.write_str(s)
    }
}

pub fn alpha(e: &Expr) -> AlphaClass {
    use AlphaClass::*;
    match e {
        Expr::True | Expr::False | Expr::Nil | Expr::Var(_) => X,
        Expr::Base(_, a) => match alpha(a) {
            X => X,
            T | N => N,
        },
        Expr::Call(_, args) => {
            if args.iter().all(|a| alpha(a) == X) {
                T
            } else {
                N
            }
        }
        Expr::If(c, t, f) => {
            if alpha(c) == X {
                alpha(t).max(alpha(f))
            } else {
                N
            }
        }
        // Treated like a conditional whose test contains no calls.
        Expr::Choose(l, r) => alpha(l).max(alpha(r)),
    }
}

pub fn is_cftr(p: &Program) -> bool {
    p.definitions()
        .iter()
        .all(|d| alpha(&d.body) <= AlphaClass::T)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CallShape {
    /// Nothing remains to be done in the caller after the call returns.
    Tail,
    /// Not in tail position, but not inside another call's argument either.
    LinearNontail,
    /// Inside an argument of a call to a defined function.
    Nested,
}

impl fmt::Display for CallShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CallShape::Tail => "tail",
            CallShape::LinearNontail => "linear-nontail",
            CallShape::Nested => "nested",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CallSite {
    pub definition: String,
    /// Dot-separated route from the body root, e.g. `else.not.arg0`.
    pub path: String,
    pub callee: String,
    pub shape: CallShape,
    /// Whether the site sits (possibly deeply) inside an `if` test.
    pub in_if_test: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefinitionClass {
    pub definition: String,
    pub alpha: AlphaClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CallShapeReport {
    pub definitions: Vec<DefinitionClass>,
    pub sites: Vec<CallSite>,
    pub is_cftr: bool,
    pub all_calls_linear: bool,
}

impl CallShapeReport {
    pub fn count(&self, shape: CallShape) -> usize {
        self.sites.iter().filter(|s| s.shape == shape).count()
    }
}

pub fn call_shape_report(p: &Program) -> CallShapeReport {
    let mut sites = Vec::new();
    for def in p.definitions() {
        let mut walker = SiteWalker {
            definition: &def.name,
            path: Vec::new(),
            sites: &mut sites,
        };
        walker.walk(&def.body, Ctx::default());
    }
    let definitions = p
        .definitions()
        .iter()
        .map(|d| DefinitionClass {
            definition: d.name.clone(),
            alpha: alpha(&d.body),
        })
        .collect();
    let all_calls_linear = sites.iter().all(|s| s.shape != CallShape::Nested);
    CallShapeReport {
        definitions,
        sites,
        is_cftr: is_cftr(p),
        all_calls_linear,
    }
}

#[derive(Clone, Copy)]
struct Ctx {
    tail: bool,
    in_arg: bool,
    in_test: bool,
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx {
            tail: true,
            in_arg: false,
            in_test: false,
        }
    }
}

struct SiteWalker<'a> {
    definition: &'a str,
    path: Vec<String>,
    sites: &'a mut Vec<CallSite>,
}

impl SiteWalker<'_> {
    fn descend(&mut self, seg: impl Into<String>, e: &Expr, ctx: Ctx) {
        self.path.push(seg.into());
        self.walk(e, ctx);
        self.path.pop();
    }

    fn walk(&mut self, e: &Expr, ctx: Ctx) {
        match e {
            Expr::True | Expr::False | Expr::Nil | Expr::Var(_) => {}
            Expr::Base(op, a) => self.descend(op.keyword(), a, Ctx { tail: false, ..ctx }),
            Expr::If(c, t, f) => {
                self.descend(
                    "test",
                    c,
                    Ctx {
                        tail: false,
                        in_test: true,
                        ..ctx
                    },
                );
                self.descend("then", t, ctx);
                self.descend("else", f, ctx);
            }
            Expr::Choose(l, r) => {
                self.descend("left", l, ctx);
                self.descend("right", r, ctx);
            }
            Expr::Call(callee, args) => {
                let shape = if ctx.in_arg {
                    CallShape::Nested
                } else if ctx.tail {
                    CallShape::Tail
                } else {
                    CallShape::LinearNontail
                };
                self.sites.push(CallSite {
                    definition: self.definition.to_string(),
                    path: self.path.join("."),
                    callee: callee.clone(),
                    shape,
                    in_if_test: ctx.in_test,
                });
                for (i, a) in args.iter().enumerate() {
                    self.descend(
                        format!("arg{i}"),
                        a,
                        Ctx {
                            tail: false,
                            in_arg: true,
                            ..ctx
                        },
                    );
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_program;
    use AlphaClass::*;

    const PARITY: &str = "entry x = even x\neven z = if (null z) then True else not(even(tail z))";
    const PARITY2: &str = "entry' x = f x True\nf x y = if (null x) then y else f (tail x) (not y)";

    #[test]
    fn alpha_on_parity_subterms() {
        let z = || Expr::var("z");
        assert_eq!(alpha(&Expr::null(z())), X);
        assert_eq!(alpha(&Expr::tail(z())), X);
        assert_eq!(alpha(&Expr::call("even", vec![Expr::var("x")])), T);
        assert_eq!(alpha(&Expr::call("even", vec![Expr::tail(z())])), T);
        assert_eq!(
            alpha(&Expr::not(Expr::call("even", vec![Expr::tail(z())]))),
            N
        );
    }

    #[test]
    fn alpha_order() {
        assert!(X < T && T < N);
        assert_eq!(X.max(N), N);
    }

    #[test]
    fn cftr_membership() {
        assert!(!is_cftr(&parse_program(PARITY).unwrap()));
        assert!(is_cftr(&parse_program(PARITY2).unwrap()));
        assert!(is_cftr(&parse_program("main x = True").unwrap()));
    }

    #[test]
    fn parity_report() {
        let r = call_shape_report(&parse_program(PARITY).unwrap());
        assert_eq!(r.sites.len(), 2);
        assert_eq!(
            (r.sites[0].definition.as_str(), r.sites[0].shape),
            ("entry", CallShape::Tail)
        );
        assert_eq!(r.sites[1].shape, CallShape::LinearNontail);
        assert_eq!(r.sites[1].path, "else.not");
        assert!(r.all_calls_linear);
        assert!(!r.is_cftr);
        assert_eq!(r.definitions[1].alpha, N);
    }

    #[test]
    fn nested_call() {
        let r = call_shape_report(&parse_program("main x = f (f x)\nf y = y").unwrap());
        assert_eq!(r.sites[0].shape, CallShape::Tail);
        assert_eq!(r.sites[1].shape, CallShape::Nested);
        assert_eq!(r.sites[1].path, "arg0");
        assert!(!r.all_calls_linear);
    }

    #[test]
    fn call_in_test_is_not_tail() {
        let r = call_shape_report(
            &parse_program("main x = if f x then f x else False\nf y = True").unwrap(),
        );
        assert_eq!(r.sites[0].shape, CallShape::LinearNontail);
        assert!(r.sites[0].in_if_test);
        assert_eq!(r.sites[1].shape, CallShape::Tail);
    }
}
