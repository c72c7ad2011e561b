//! Programs, circuits and machines shipped with the crate.

use crate::mcv::StraightLineProgram;
use crate::parse::parse_program_with;
use crate::syntax::{Dialect, Program};
use crate::tm::TuringMachine;

/// A bundled program file.
#[derive(Clone, Copy, Debug)]
pub struct CorpusProgram {
    pub name: &'static str,
    pub source: &'static str,
    pub dialect: Dialect,
}

impl CorpusProgram {
    pub fn program(&self) -> Program {
        parse_program_with(self.source, self.dialect).expect("bundled program parses")
    }
}

macro_rules! bundled {
    ($name:literal, $dialect:expr) => {
        CorpusProgram {
            name: $name,
            source: include_str!(concat!("../corpus/", $name)),
            dialect: $dialect,
        }
    };
}

pub const PROGRAMS: [CorpusProgram; 10] = [
    bundled!("parity.cf", Dialect::Deterministic),
    bundled!("parity2.cf", Dialect::Deterministic),
    bundled!("q.cf", Dialect::Deterministic),
    bundled!("mcv.cf", Dialect::Deterministic),
    bundled!("last_bit.cf", Dialect::Deterministic),
    bundled!("has11.cf", Dialect::Deterministic),
    bundled!("nested_scan.cf", Dialect::Deterministic),
    bundled!("guess_one.ncf", Dialect::Nondeterministic),
    bundled!("guess_pair.ncf", Dialect::Nondeterministic),
    bundled!("stuck_branch.ncf", Dialect::Nondeterministic),
];

pub const SAMPLE_CIRCUIT: &str = include_str!("../corpus/sample.circ");

pub fn get(name: &str) -> Option<CorpusProgram> {
    PROGRAMS
        .iter()
        .copied()
        .find(|c| c.name == name || c.name.split('.').next() == Some(name))
}

/// Programs without `choose`.
pub fn deterministic() -> impl Iterator<Item = CorpusProgram> {
    PROGRAMS
        .into_iter()
        .filter(|c| c.dialect == Dialect::Deterministic)
}

/// Programs that use `choose`.
pub fn nondeterministic() -> impl Iterator<Item = CorpusProgram> {
    PROGRAMS
        .into_iter()
        .filter(|c| c.dialect == Dialect::Nondeterministic)
}

/// Even length, non-tail recursive.
pub fn parity() -> Program {
    bundled!("parity.cf", Dialect::Deterministic).program()
}

/// Even length, accumulator version.
pub fn parity_prime() -> Program {
    bundled!("parity2.cf", Dialect::Deterministic).program()
}

/// The doubly recursive constant-True program.
pub fn q() -> Program {
    bundled!("q.cf", Dialect::Deterministic).program()
}

pub fn sample_circuit() -> StraightLineProgram {
    StraightLineProgram::parse(SAMPLE_CIRCUIT).expect("bundled circuit parses")
}

pub fn machines() -> [(&'static str, TuringMachine); 2] {
    [
        ("contains11.tm", TuringMachine::contains_11()),
        ("first_eq_last.tm", TuringMachine::first_equals_last()),
    ]
}
