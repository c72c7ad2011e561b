//! Least-fixed-point computation of derivable `(configuration, value)` triples.
//!
//! Bodies are evaluated relationally: each expression denotes the set of
//! values it can produce given the triples derived so far, and `choose`
//! contributes both branches. A configuration is re-evaluated only when one
//! of the configurations it called gained a new value, so each pass extends
//! from newly derived triples only. Termination follows from the triple
//! space being finite.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::eval::{deep, Engine};
use crate::ir::{apply_base, Kind, Lowered, Node};
use crate::syntax::Program;
use crate::value::{BitString, Config, Value};

/// A subset of the `n + 3` possible values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ValueSet {
    words: Vec<u64>,
}

impl ValueSet {
    fn empty(universe: usize) -> ValueSet {
        ValueSet {
            words: vec![0; universe.div_ceil(64)],
        }
    }

    fn insert(&mut self, v: Value) {
        let i = v.index();
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, v: Value) -> bool {
        let i = v.index();
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    fn union_with(&mut self, other: &ValueSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = Value> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64)
                .filter(move |b| w & (1 << b) != 0)
                .map(move |b| Value::from_index(wi * 64 + b))
        })
    }
}

/// Set of derived triples, keyed by configuration.
pub struct TripleStore {
    names: Vec<String>,
    universe: usize,
    ids: HashMap<(usize, Box<[Value]>), usize>,
    configs: Vec<(usize, Box<[Value]>)>,
    values: Vec<ValueSet>,
    dependents: Vec<Vec<usize>>,
}

impl TripleStore {
    fn intern(
        &mut self,
        func: usize,
        args: Vec<Value>,
        queue: &mut VecDeque<usize>,
        queued: &mut Vec<bool>,
    ) -> usize {
        let key = (func, args.into_boxed_slice());
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.configs.len();
        self.ids.insert(key.clone(), id);
        self.configs.push(key);
        self.values.push(ValueSet::empty(self.universe));
        self.dependents.push(Vec::new());
        queue.push_back(id);
        queued.push(true);
        id
    }

    pub fn config_count(&self) -> usize {
        self.configs.len()
    }

    pub fn triple_count(&self) -> usize {
        self.values.iter().map(ValueSet::len).sum()
    }

    /// All derived triples in a deterministic order.
    pub fn triples(&self) -> Vec<(Config, Value)> {
        let mut out: Vec<(Config, Value)> = self
            .configs
            .iter()
            .zip(&self.values)
            .flat_map(|((f, args), vs)| {
                let cfg = Config {
                    function: self.names[*f].clone(),
                    args: args.to_vec(),
                };
                vs.iter().map(move |v| (cfg.clone(), v))
            })
            .collect();
        out.sort();
        out
    }

    /// Values derivable for `function` applied to `args`.
    pub fn lookup(&self, function: &str, args: &[Value]) -> Vec<Value> {
        let Some(f) = self.names.iter().position(|g| g == function) else {
            return Vec::new();
        };
        match self.ids.get(&(f, args.into())) {
            Some(&id) => self.values[id].iter().collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaturationStats {
    pub engine: Engine,
    pub accepted: bool,
    pub configs: u64,
    pub triples: u64,
    /// Number of body evaluations performed.
    pub evaluations: u64,
}

struct Saturator<'s> {
    prog: &'s Lowered,
    store: &'s mut TripleStore,
    input: &'s BitString,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

impl<'s> Saturator<'s> {
    fn eval(&mut self, node: &'s Node, env: &[Value], caller: usize) -> ValueSet {
        deep(|| self.eval_inner(node, env, caller))
    }

    fn eval_inner(&mut self, node: &'s Node, env: &[Value], caller: usize) -> ValueSet {
        let mut out = ValueSet::empty(self.store.universe);
        match &node.kind {
            Kind::True => out.insert(Value::TRUE),
            Kind::False => out.insert(Value::FALSE),
            Kind::Nil => out.insert(Value::Suffix(self.input.len() as u32)),
            Kind::Var(i) => out.insert(env[*i]),
            Kind::Base(op, a) => {
                for v in self.eval(a, env, caller).iter() {
                    if let Ok(r) = apply_base(*op, v, self.input) {
                        out.insert(r);
                    }
                }
            }
            Kind::If(c, t, f) => {
                let tests = self.eval(c, env, caller);
                if tests.contains(Value::TRUE) {
                    out.union_with(&self.eval(t, env, caller));
                }
                if tests.contains(Value::FALSE) {
                    out.union_with(&self.eval(f, env, caller));
                }
            }
            Kind::Choose(l, r) => {
                out = self.eval(l, env, caller);
                out.union_with(&self.eval(r, env, caller));
            }
            Kind::Call(target, args) => {
                let sets: Vec<Vec<Value>> = args
                    .iter()
                    .map(|a| self.eval(a, env, caller).iter().collect())
                    .collect();
                if sets.iter().any(Vec::is_empty) {
                    return out;
                }
                let mut idx = vec![0usize; sets.len()];
                loop {
                    let tuple: Vec<Value> = idx.iter().zip(&sets).map(|(&i, s)| s[i]).collect();
                    let callee =
                        self.store
                            .intern(*target, tuple, &mut self.queue, &mut self.queued);
                    if !self.store.dependents[callee].contains(&caller) {
                        self.store.dependents[callee].push(caller);
                    }
                    out.union_with(&self.store.values[callee]);
                    // odometer over the argument tuples
                    let mut pos = sets.len();
                    loop {
                        if pos == 0 {
                            return out;
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] < sets[pos].len() {
                            break;
                        }
                        idx[pos] = 0;
                    }
                }
            }
        }
        out
    }
}

/// Saturates the triple store for `p` on `x`.
pub fn saturate(p: &Program, x: &BitString) -> (TripleStore, SaturationStats) {
    let prog = Lowered::new(p);
    let mut store = TripleStore {
        names: prog.funcs.iter().map(|f| f.name.clone()).collect(),
        universe: x.value_space(),
        ids: HashMap::new(),
        configs: Vec::new(),
        values: Vec::new(),
        dependents: Vec::new(),
    };
    let mut sat = Saturator {
        prog: &prog,
        store: &mut store,
        input: x,
        queue: VecDeque::new(),
        queued: Vec::new(),
    };
    let entry = sat
        .store
        .intern(0, vec![Value::Suffix(0)], &mut sat.queue, &mut sat.queued);
    let mut evaluations = 0u64;
    while let Some(id) = sat.queue.pop_front() {
        sat.queued[id] = false;
        evaluations += 1;
        let (func, args) = sat.store.configs[id].clone();
        let derived = sat.eval(&sat.prog.funcs[func].body, &args, id);
        let old = &sat.store.values[id];
        let mut merged = old.clone();
        merged.union_with(&derived);
        if merged != *old {
            sat.store.values[id] = merged;
            for &d in &sat.store.dependents[id] {
                if !sat.queued[d] {
                    sat.queued[d] = true;
                    sat.queue.push_back(d);
                }
            }
        }
    }
    let accepted = sat.store.values[entry].contains(Value::TRUE);
    let stats = SaturationStats {
        engine: Engine::NcfSaturate,
        accepted,
        configs: store.config_count() as u64,
        triples: store.triple_count() as u64,
        evaluations,
    };
    (store, stats)
}

/// Decides acceptance by saturation: true iff the entry configuration derives `True`.
pub fn ncf_decide_saturate(p: &Program, x: &BitString) -> bool {
    saturate(p, x).1.accepted
}

impl ValueSet {
    #[cfg(test)]
    fn from_values(universe: usize, vs: &[Value]) -> ValueSet {
        let mut s = ValueSet::empty(universe);
        vs.iter().for_each(|&v| s.insert(v));
        s
    }
}
