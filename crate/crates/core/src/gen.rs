//! Seeded generators for random programs and input families.
//!
//! Programs are generated against simple types (booleans and lists) so that
//! most runs produce a value; stuck runs (`head []`) and divergent recursion
//! still occur and are part of what the differential tests exercise.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Definition, Dialect, Expr, Program};
use crate::value::BitString;

/// The generator used everywhere a seed is accepted.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ty {
    Bool,
    List,
}

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    /// Number of definitions, entry included (at least 1).
    pub max_defs: usize,
    pub max_arity: usize,
    pub max_depth: usize,
    pub allow_choose: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_defs: 3,
            max_arity: 2,
            max_depth: 4,
            allow_choose: false,
        }
    }
}

struct Sig {
    name: String,
    params: Vec<(String, Ty)>,
    ret: Ty,
}

struct Gen<'r, R: Rng + ?Sized> {
    rng: &'r mut R,
    sigs: Vec<Sig>,
    cfg: GenConfig,
}

impl<R: Rng + ?Sized> Gen<'_, R> {
    fn pick_ty(&mut self) -> Ty {
        if self.rng.gen() {
            Ty::Bool
        } else {
            Ty::List
        }
    }

    fn param_of(&mut self, f: usize, ty: Ty) -> Option<Expr> {
        let names: Vec<&String> = self.sigs[f]
            .params
            .iter()
            .filter(|(_, t)| *t == ty)
            .map(|(n, _)| n)
            .collect();
        names.choose(self.rng).map(|n| Expr::var(n.as_str()))
    }

    fn leaf(&mut self, f: usize, ty: Ty) -> Expr {
        if self.rng.gen_bool(0.7) {
            if let Some(v) = self.param_of(f, ty) {
                return v;
            }
        }
        match ty {
            Ty::Bool => {
                if self.rng.gen() {
                    Expr::True
                } else {
                    Expr::False
                }
            }
            Ty::List => Expr::Nil,
        }
    }

    fn call(&mut self, f: usize, ty: Ty, depth: usize) -> Option<Expr> {
        let targets: Vec<usize> = (1..self.sigs.len())
            .filter(|&g| self.sigs[g].ret == ty)
            .collect();
        let &g = targets.choose(self.rng)?;
        let tys: Vec<Ty> = self.sigs[g].params.iter().map(|(_, t)| *t).collect();
        let args = tys
            .into_iter()
            .map(|t| self.expr(f, t, depth - 1))
            .collect();
        Some(Expr::call(self.sigs[g].name.as_str(), args))
    }

    fn expr(&mut self, f: usize, ty: Ty, depth: usize) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.leaf(f, ty);
        }
        let d = depth - 1;
        let choice = self.rng.gen_range(0..10);
        if choice < 3 {
            if let Some(c) = self.call(f, ty, depth) {
                return c;
            }
        }
        if choice == 3 && self.cfg.allow_choose {
            return Expr::choose(self.expr(f, ty, d), self.expr(f, ty, d));
        }
        if choice < 6 {
            return Expr::ite(
                self.expr(f, Ty::Bool, d),
                self.expr(f, ty, d),
                self.expr(f, ty, d),
            );
        }
        match ty {
            Ty::Bool => match self.rng.gen_range(0..3) {
                0 => Expr::not(self.expr(f, Ty::Bool, d)),
                1 => Expr::null(self.expr(f, Ty::List, d)),
                _ => Expr::head(self.expr(f, Ty::List, d)),
            },
            Ty::List => Expr::tail(self.expr(f, Ty::List, d)),
        }
    }
}

/// A random valid program whose entry takes the input list and returns a
/// boolean. With `allow_choose` the program is in the nondeterministic dialect.
pub fn random_program<R: Rng + ?Sized>(rng: &mut R, cfg: GenConfig) -> Program {
    let defs = rng.gen_range(1..=cfg.max_defs.max(1));
    let mut g = Gen {
        rng,
        sigs: Vec::new(),
        cfg,
    };
    g.sigs.push(Sig {
        name: "main".into(),
        params: vec![("x".into(), Ty::List)],
        ret: Ty::Bool,
    });
    for i in 1..defs {
        let arity = g.rng.gen_range(1..=cfg.max_arity.max(1));
        let params = (0..arity)
            .map(|j| (((b'a' + j as u8) as char).to_string(), g.pick_ty()))
            .collect();
        let ret = g.pick_ty();
        g.sigs.push(Sig {
            name: format!("f{i}"),
            params,
            ret,
        });
    }
    let bodies: Vec<Expr> = (0..defs)
        .map(|f| {
            let ret = g.sigs[f].ret;
            g.expr(f, ret, cfg.max_depth)
        })
        .collect();
    let definitions = g
        .sigs
        .iter()
        .zip(bodies)
        .map(|(s, body)| {
            let params: Vec<&str> = s.params.iter().map(|(n, _)| n.as_str()).collect();
            Definition::new(s.name.as_str(), &params, body)
        })
        .collect();
    let dialect = if cfg.allow_choose {
        Dialect::Nondeterministic
    } else {
        Dialect::Deterministic
    };
    Program::new(definitions, dialect).expect("generated program is valid")
}

pub fn random_input<R: Rng + ?Sized>(rng: &mut R, n: usize) -> BitString {
    BitString::new((0..n).map(|_| rng.gen()).collect())
}

/// Names accepted by [`input_family`].
pub const INPUT_FAMILIES: [&str; 4] = ["zeros", "ones", "alt", "random"];

/// Input of length `n` from a named family; `random` draws from `seed`
/// (mixed with `n`, so each length gets its own string).
pub fn input_family(name: &str, n: usize, seed: u64) -> Option<BitString> {
    let bits = match name {
        "zeros" => vec![false; n],
        "ones" => vec![true; n],
        "alt" => (0..n).map(|i| i % 2 == 0).collect(),
        "random" => {
            return Some(random_input(
                &mut rng(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)),
                n,
            ))
        }
        _ => return None,
    };
    Some(BitString::new(bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pretty::pretty_print;

    #[test]
    fn same_seed_same_program() {
        let a = random_program(&mut rng(3), GenConfig::default());
        let b = random_program(&mut rng(3), GenConfig::default());
        assert_eq!(pretty_print(&a), pretty_print(&b));
    }

    #[test]
    fn choose_only_when_allowed() {
        let mut r = rng(1);
        for _ in 0..200 {
            assert!(random_program(&mut r, GenConfig::default()).is_deterministic());
        }
        let cfg = GenConfig {
            allow_choose: true,
            ..GenConfig::default()
        };
        assert!((0..200).any(|_| !random_program(&mut r, cfg).is_deterministic()));
    }

    #[test]
    fn families() {
        assert_eq!(input_family("alt", 5, 0).unwrap().to_string(), "10101");
        assert_eq!(input_family("random", 9, 4), input_family("random", 9, 4));
        assert!(input_family("nope", 1, 0).is_none());
    }
}
