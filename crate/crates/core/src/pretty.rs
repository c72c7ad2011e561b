use std::fmt::Write;

use crate::syntax::{Expr, Program};

/// Renders a program in concrete syntax, one definition per line.
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    for def in p.definitions() {
        out.push_str(&def.name);
        for param in &def.params {
            out.push(' ');
            out.push_str(param);
        }
        out.push_str(" = ");
        write_expr(&mut out, &def.body);
        out.push('\n');
    }
    out
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::If(c, t, f) => {
            out.push_str("if ");
            write_expr(out, c);
            out.push_str(" then ");
            write_expr(out, t);
            out.push_str(" else ");
            write_expr(out, f);
        }
        _ => write_app(out, e),
    }
}

fn write_app(out: &mut String, e: &Expr) {
    match e {
        Expr::Base(op, a) => {
            let _ = write!(out, "{op} ");
            write_atom(out, a);
        }
        Expr::Choose(l, r) => {
            out.push_str("choose ");
            write_atom(out, l);
            out.push(' ');
            write_atom(out, r);
        }
        Expr::Call(f, args) if !args.is_empty() => {
            out.push_str(f);
            for a in args {
                out.push(' ');
                write_atom(out, a);
            }
        }
        _ => write_atom(out, e),
    }
}

fn write_atom(out: &mut String, e: &Expr) {
    match e {
        Expr::True => out.push_str("True"),
        Expr::False => out.push_str("False"),
        Expr::Nil => out.push_str("[]"),
        Expr::Var(v) => out.push_str(v),
        Expr::Call(f, args) if args.is_empty() => out.push_str(f),
        _ => {
            out.push('(');
            write_expr(out, e);
            out.push(')');
        }
    }
}
