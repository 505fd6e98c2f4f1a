//! Canonical outcome values.
//!
//! Every type that can sit inside a [`Dist`](crate::Dist) implements
//! [`Outcome`]: a total order (used for canonical iteration and printing)
//! plus a canonical text form. The text forms of the typed outcomes and of
//! the dynamic [`Value`] coincide, so anything printed can be parsed back.

use std::fmt;

use crate::msets::Multiset;
use crate::partitions::Partition;

pub trait Outcome: Ord + Clone + fmt::Debug {
    fn write_canonical(&self, out: &mut String);

    fn canonical(&self) -> String {
        let mut s = String::new();
        self.write_canonical(&mut s);
        s
    }
}

impl Outcome for String {
    fn write_canonical(&self, out: &mut String) {
        out.push_str(self);
    }
}

macro_rules! int_outcome {
    ($($t:ty),*) => {$(
        impl Outcome for $t {
            fn write_canonical(&self, out: &mut String) {
                out.push_str(&self.to_string());
            }
        }
    )*};
}
int_outcome!(u32, u64, usize);

impl<A: Outcome, B: Outcome> Outcome for (A, B) {
    fn write_canonical(&self, out: &mut String) {
        out.push('(');
        self.0.write_canonical(out);
        out.push(',');
        self.1.write_canonical(out);
        out.push(')');
    }
}

impl<T: Outcome> Outcome for Vec<T> {
    fn write_canonical(&self, out: &mut String) {
        out.push('(');
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            x.write_canonical(out);
        }
        out.push(')');
    }
}

/// Untyped outcome produced by the text parser.
///
/// Integer literals are [`Value::Nat`]; a brace literal whose keys are all
/// positive integers is a [`Value::Part`], otherwise a [`Value::Mset`] over
/// labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Nat(u64),
    Label(String),
    Tuple(Vec<Value>),
    Mset(Multiset<String>),
    Part(Partition),
}

impl Value {
    pub fn label(s: impl Into<String>) -> Self {
        Value::Label(s.into())
    }

    pub fn as_label(&self) -> Option<&str> {
        match self {
            Value::Label(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Value::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Value]> {
        match self {
            Value::Tuple(items) => Some(items),
            _ => None,
        }
    }
}

impl Outcome for Value {
    fn write_canonical(&self, out: &mut String) {
        match self {
            Value::Nat(n) => n.write_canonical(out),
            Value::Label(s) => s.write_canonical(out),
            Value::Tuple(items) => items.write_canonical(out),
            Value::Mset(m) => m.write_canonical(out),
            Value::Part(p) => p.write_canonical(out),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Label(s)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::Nat(n)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Nat(n as u64)
    }
}

impl From<Multiset<String>> for Value {
    fn from(m: Multiset<String>) -> Self {
        Value::Mset(m)
    }
}

impl From<Partition> for Value {
    fn from(p: Partition) -> Self {
        Value::Part(p)
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(items: Vec<T>) -> Self {
        Value::Tuple(items.into_iter().map(Into::into).collect())
    }
}

impl<A: Into<Value>, B: Into<Value>> From<(A, B)> for Value {
    fn from((a, b): (A, B)) -> Self {
        Value::Tuple(vec![a.into(), b.into()])
    }
}
