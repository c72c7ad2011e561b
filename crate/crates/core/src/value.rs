//! Run-time values.
//!
//! A value is either a boolean or a suffix of the run's input. Suffixes are
//! stored as an offset into the single shared input, so every value fits in
//! `O(log n)` bits and no list is ever copied.

use std::fmt;

use serde::Serialize;

/// An input bit string. Bits double as booleans: `1` is `True`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

/// Serialized in the compact form, e.g. `"1011"`.
impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> BitString {
        BitString { bits }
    }

    pub fn from_u8s(bits: &[u8]) -> BitString {
        BitString::new(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// All strings of length `n`, in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = BitString> {
        (0..1u64 << n)
            .map(move |m| BitString::new((0..n).map(|i| (m >> (n - 1 - i)) & 1 == 1).collect()))
    }

    /// Number of distinct values a run on this input can produce.
    pub fn value_space(&self) -> usize {
        self.len() + 3
    }

    /// The `[1,0,1]` rendering.
    pub fn to_list_string(&self) -> String {
        let items: Vec<&str> = self
            .bits
            .iter()
            .map(|&b| if b { "1" } else { "0" })
            .collect();
        format!("[{}]", items.join(","))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString::new(bits)
    }
}

/// An element of `{False, True} ∪ suffixes(x)`.
///
/// `Suffix(k)` is the suffix starting at 0-based position `k`; `Suffix(n)` is `[]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Value {
    Bool(bool),
    Suffix(u32),
}

impl Value {
    pub const TRUE: Value = Value::Bool(true);
    pub const FALSE: Value = Value::Bool(false);

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            Value::Suffix(_) => None,
        }
    }

    /// True iff the value belongs to the range of variation of `input`.
    pub fn in_range(self, input: &BitString) -> bool {
        match self {
            Value::Bool(_) => true,
            Value::Suffix(k) => (k as usize) <= input.len(),
        }
    }

    /// Dense index in `0..input.len() + 3`, used for bitsets and digit arithmetic.
    pub fn index(self) -> usize {
        match self {
            Value::Bool(false) => 0,
            Value::Bool(true) => 1,
            Value::Suffix(k) => 2 + k as usize,
        }
    }

    pub fn from_index(i: usize) -> Value {
        match i {
            0 => Value::FALSE,
            1 => Value::TRUE,
            _ => Value::Suffix((i - 2) as u32),
        }
    }

    /// Human-readable form: `True`, `False`, or the suffix as a list.
    pub fn render(self, input: &BitString) -> String {
        match self {
            Value::Bool(true) => "True".to_string(),
            Value::Bool(false) => "False".to_string(),
            Value::Suffix(k) => {
                let start = (k as usize).min(input.len());
                BitString::new(input.bits()[start..].to_vec()).to_list_string()
            }
        }
    }
}

/// A function name together with the argument values it was entered with.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Config {
    pub function: String,
    pub args: Vec<Value>,
}

impl Config {
    pub fn render(&self, input: &BitString) -> String {
        let args: Vec<String> = self.args.iter().map(|v| v.render(input)).collect();
        if args.is_empty() {
            self.function.clone()
        } else {
            format!("{}({})", self.function, args.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trips() {
        for i in 0..10 {
            assert_eq!(Value::from_index(i).index(), i);
        }
    }

    #[test]
    fn render_suffixes() {
        let x = BitString::from_u8s(&[1, 0, 1]);
        assert_eq!(Value::Suffix(0).render(&x), "[1,0,1]");
        assert_eq!(Value::Suffix(2).render(&x), "[1]");
        assert_eq!(Value::Suffix(3).render(&x), "[]");
        assert_eq!(Value::TRUE.render(&x), "True");
        assert!(Value::Suffix(3).in_range(&x));
        assert!(!Value::Suffix(4).in_range(&x));
    }

    #[test]
    fn enumerates_strings() {
        let all: Vec<String> = BitString::all_of_length(2).map(|b| b.to_string()).collect();
        assert_eq!(all, ["00", "01", "10", "11"]);
        assert_eq!(BitString::all_of_length(0).count(), 1);
    }
}
