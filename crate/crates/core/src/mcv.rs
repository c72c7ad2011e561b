//! Monotone circuit value: straight-line AND/OR programs, their bit-string
//! encoding, and a cons-free program that decides encoded instances.
//!
//! Variables `x0` and `x1` are the constants False and True. Instructions are
//! stored in reverse execution order, so the first one assigns the output.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::parse::parse_program;
use crate::syntax::Program;
use crate::value::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GateOp {
    And,
    Or,
}

impl GateOp {
    pub fn keyword(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Or => "OR",
        }
    }

    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            GateOp::And => a && b,
            GateOp::Or => a || b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Instruction {
    pub lhs: usize,
    pub op: GateOp,
    pub arg1: usize,
    pub arg2: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum McvError {
    #[error("malformed circuit: {reason}")]
    MalformedCircuit { reason: String },
    #[error("malformed encoding at bit {position}: {reason}")]
    MalformedEncoding { position: usize, reason: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn malformed(reason: impl Into<String>) -> McvError {
    McvError::MalformedCircuit {
        reason: reason.into(),
    }
}

/// A straight-line program over variables `0..num_vars`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StraightLineProgram {
    instructions: Vec<Instruction>,
    num_vars: usize,
}

impl StraightLineProgram {
    /// Builds a circuit from instructions in stored (reverse) order. The
    /// assigned variables must be exactly `x2 .. x(k+1)` for `k` instructions.
    pub fn new(instructions: Vec<Instruction>) -> Result<StraightLineProgram, McvError> {
        let num_vars = instructions.len() + 2;
        if instructions.is_empty() {
            return Err(malformed("no instructions"));
        }
        let mut defined: HashSet<usize> = HashSet::new();
        // Walk in execution order: arguments must already be defined.
        for ins in instructions.iter().rev() {
            if ins.lhs < 2 || ins.lhs >= num_vars {
                return Err(malformed(format!("x{} cannot be assigned", ins.lhs)));
            }
            for a in [ins.arg1, ins.arg2] {
                if a >= 2 && !defined.contains(&a) {
                    return Err(malformed(format!("x{a} is used before it is assigned")));
                }
            }
            if !defined.insert(ins.lhs) {
                return Err(malformed(format!("x{} is assigned twice", ins.lhs)));
            }
        }
        Ok(StraightLineProgram {
            instructions,
            num_vars,
        })
    }

    /// Instructions in stored order (output first).
    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn output(&self) -> usize {
        self.instructions[0].lhs
    }

    /// `⌈log₂ num_vars⌉`.
    pub fn block_len(&self) -> usize {
        block_len_for(self.num_vars)
    }

    /// The example circuit with output `x5`, which evaluates to True.
    pub fn sample() -> StraightLineProgram {
        let i = |lhs, op, arg1, arg2| Instruction {
            lhs,
            op,
            arg1,
            arg2,
        };
        StraightLineProgram::new(vec![
            i(5, GateOp::Or, 4, 3),
            i(4, GateOp::Or, 3, 2),
            i(3, GateOp::And, 2, 0),
            i(2, GateOp::Or, 1, 0),
        ])
        .expect("valid sample")
    }

    /// `x2 := x1 OR x0`, then `x(i+1) := xi AND xi` up to `x(depth+1)`.
    /// Every variable is used twice by its successor.
    pub fn deep_reuse(depth: usize) -> StraightLineProgram {
        let mut ins = vec![Instruction {
            lhs: 2,
            op: GateOp::Or,
            arg1: 1,
            arg2: 0,
        }];
        for v in 3..depth + 2 {
            ins.push(Instruction {
                lhs: v,
                op: GateOp::And,
                arg1: v - 1,
                arg2: v - 1,
            });
        }
        ins.reverse();
        StraightLineProgram::new(ins).expect("valid family")
    }

    /// Random circuit with `num_vars >= 3` variables: `xj` combines two
    /// uniformly drawn earlier variables with a uniform gate.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, num_vars: usize) -> StraightLineProgram {
        assert!(num_vars >= 3);
        let mut ins: Vec<Instruction> = (2..num_vars)
            .map(|j| Instruction {
                lhs: j,
                op: if rng.gen() { GateOp::And } else { GateOp::Or },
                arg1: rng.gen_range(0..j),
                arg2: rng.gen_range(0..j),
            })
            .collect();
        ins.reverse();
        StraightLineProgram::new(ins).expect("generated circuit is valid")
    }

    /// Parses one instruction per line, `x5 := x4 OR x3`, in stored order.
    /// Blank lines and `--` comments are ignored.
    pub fn parse(text: &str) -> Result<StraightLineProgram, McvError> {
        let mut ins = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split("--").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| McvError::Syntax {
                line: ln + 1,
                message: m.to_string(),
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [lhs, ":=", a1, op, a2] = toks[..] else {
                return Err(err("expected `xI := xJ OP xK`"));
            };
            let var = |t: &str| {
                t.strip_prefix('x')
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| err(&format!("bad variable `{t}`")))
            };
            let op = match op {
                "AND" => GateOp::And,
                "OR" => GateOp::Or,
                other => return Err(err(&format!("unknown gate `{other}`"))),
            };
            ins.push(Instruction {
                lhs: var(lhs)?,
                op,
                arg1: var(a1)?,
                arg2: var(a2)?,
            });
        }
        StraightLineProgram::new(ins)
    }
}

impl fmt::Display for StraightLineProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.instructions {
            writeln!(
                f,
                "x{} := x{} {} x{}",
                i.lhs,
                i.arg1,
                i.op.keyword(),
                i.arg2
            )?;
        }
        Ok(())
    }
}

fn block_len_for(num_vars: usize) -> usize {
    (usize::BITS - (num_vars - 1).leading_zeros()) as usize
}

/// Evaluates in execution order, storing each assigned value.
pub fn eval_circuit(c: &StraightLineProgram) -> bool {
    let mut vals = vec![false; c.num_vars];
    vals[1] = true;
    for i in c.instructions.iter().rev() {
        vals[i.lhs] = i.op.apply(vals[i.arg1], vals[i.arg2]);
    }
    vals[c.output()]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McvEncoding {
    pub bits: BitString,
    pub block_len: usize,
}

/// Unary header `1^b 0`, then per instruction: lhs, op bit (OR 0, AND 1),
/// arg1, arg2, each index as `b` bits most significant first.
pub fn encode_mcv(c: &StraightLineProgram) -> McvEncoding {
    let b = c.block_len();
    let mut bits = vec![true; b];
    bits.push(false);
    let push = |v: usize, bits: &mut Vec<bool>| bits.extend((0..b).rev().map(|k| v >> k & 1 == 1));
    for i in &c.instructions {
        push(i.lhs, &mut bits);
        bits.push(i.op == GateOp::And);
        push(i.arg1, &mut bits);
        push(i.arg2, &mut bits);
    }
    McvEncoding {
        bits: BitString::new(bits),
        block_len: b,
    }
}

/// Inverse of [`encode_mcv`]. The input ends after the last instruction.
pub fn decode_mcv(x: &BitString) -> Result<StraightLineProgram, McvError> {
    let bits = x.bits();
    let enc = |position: usize, reason: &str| McvError::MalformedEncoding {
        position,
        reason: reason.to_string(),
    };
    let b = bits.iter().take_while(|&&bit| bit).count();
    if b == bits.len() {
        return Err(enc(b, "unterminated header"));
    }
    if b == 0 {
        return Err(enc(0, "empty block length"));
    }
    let body = &bits[b + 1..];
    let width = 3 * b + 1;
    if body.is_empty() || !body.len().is_multiple_of(width) {
        return Err(enc(
            b + 1 + body.len() / width * width,
            "body is not a whole number of instructions",
        ));
    }
    let count = body.len() / width;
    if block_len_for(count + 2) != b {
        return Err(enc(
            0,
            &format!("block length {b} is not canonical for {count} instructions"),
        ));
    }
    let read = |at: usize| {
        body[at..at + b]
            .iter()
            .fold(0usize, |acc, &bit| acc << 1 | bit as usize)
    };
    let ins = (0..count)
        .map(|k| {
            let at = k * width;
            Instruction {
                lhs: read(at),
                op: if body[at + b] {
                    GateOp::And
                } else {
                    GateOp::Or
                },
                arg1: read(at + b + 1),
                arg2: read(at + 2 * b + 1),
            }
        })
        .collect();
    StraightLineProgram::new(ins).map_err(|e| match e {
        McvError::MalformedCircuit { reason } => McvError::MalformedEncoding {
            position: b + 1,
            reason,
        },
        other => other,
    })
}

pub const MCV_SOURCE: &str = include_str!("../corpus/mcv.cf");

/// The bundled cons-free decider for encoded circuits.
pub fn mcv_cf_program() -> Program {
    parse_program(MCV_SOURCE).expect("bundled program parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SAMPLE_BITS: [u8; 44] = [
        1, 1, 1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1,
        0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0,
    ];

    #[test]
    fn sample_encodes_bit_exact() {
        let c = StraightLineProgram::sample();
        assert!(eval_circuit(&c));
        let e = encode_mcv(&c);
        assert_eq!(e.block_len, 3);
        assert_eq!(e.bits, BitString::from_u8s(&SAMPLE_BITS));
        assert_eq!(decode_mcv(&e.bits).unwrap(), c);
    }

    #[test]
    fn single_instruction_circuits() {
        let or = StraightLineProgram::parse("x2 := x1 OR x0").unwrap();
        let and = StraightLineProgram::parse("x2 := x1 AND x0").unwrap();
        assert!(eval_circuit(&or));
        assert!(!eval_circuit(&and));
        assert_eq!(encode_mcv(&or).bits.len(), 10);
    }

    #[test]
    fn text_round_trip() {
        let c = StraightLineProgram::sample();
        assert_eq!(StraightLineProgram::parse(&c.to_string()).unwrap(), c);
        assert_eq!(c.to_string().lines().next(), Some("x5 := x4 OR x3"));
    }

    #[test]
    fn invalid_circuits() {
        assert!(StraightLineProgram::parse("x3 := x2 OR x0\nx2 := x3 OR x0").is_err());
        assert!(StraightLineProgram::parse("x2 := x1 OR x0\nx2 := x1 OR x0").is_err());
        assert!(StraightLineProgram::parse("x1 := x1 OR x0").is_err());
        assert!(matches!(
            StraightLineProgram::parse("x2 = x1 OR x0"),
            Err(McvError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn malformed_encodings() {
        assert!(matches!(
            decode_mcv(&BitString::from_u8s(&[1, 1])),
            Err(McvError::MalformedEncoding { .. })
        ));
        let mut bits = SAMPLE_BITS.to_vec();
        bits.pop();
        assert!(matches!(
            decode_mcv(&BitString::from_u8s(&bits)),
            Err(McvError::MalformedEncoding { .. })
        ));
    }

    #[test]
    fn random_circuits_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(3..=8);
            let c = StraightLineProgram::random(&mut rng, n);
            let e = encode_mcv(&c);
            assert_eq!(
                e.bits.len(),
                (e.block_len + 1) + c.instructions().len() * (3 * e.block_len + 1)
            );
            assert_eq!(decode_mcv(&e.bits).unwrap(), c);
        }
    }

    #[test]
    fn bundled_program_is_valid() {
        let p = mcv_cf_program();
        assert!(p.is_deterministic());
        assert!(!crate::is_cftr(&p));
    }

    #[test]
    fn bundled_program_decides_sample() {
        use crate::eval::{eval_memo, eval_tree, Budget};
        use crate::value::Value;
        let p = mcv_cf_program();
        let x = BitString::from_u8s(&SAMPLE_BITS);
        assert_eq!(
            eval_tree(&p, &x, Budget::default()).unwrap().1.result,
            Value::TRUE
        );
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(3..=8);
            let c = StraightLineProgram::random(&mut rng, n);
            let got = eval_memo(&p, &encode_mcv(&c).bits).unwrap().result;
            assert_eq!(got, Value::Bool(eval_circuit(&c)), "{c}");
        }
    }
}
