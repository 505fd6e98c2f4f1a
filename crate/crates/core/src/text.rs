//! Ket and outcome literals, and the JSON exchange format.
//!
//! ```text
//! ket     := term ('+' term)*
//! term    := rational '|' outcome '>'
//! outcome := label | nat | '(' outcome (',' outcome)* ')' | '{' entries? '}'
//! entries := key ':' nat (',' key ':' nat)*
//! ```
//!
//! Labels start with a letter or underscore. Whitespace is ignored between
//! tokens.

use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{parse_rational, Prob};
use crate::channel::Channel;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::msets::Multiset;
use crate::outcome::{Outcome, Value};
use crate::partitions::Partition;

pub fn check_label(s: &str) -> Result<()> {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return Err(Error::parse(0, format!("invalid label {s:?}"))),
    }
    if let Some(c) = chars.find(|c| !(c.is_ascii_alphanumeric() || *c == '_')) {
        return Err(Error::parse(0, format!("invalid character {c:?} in label {s:?}")));
    }
    Ok(())
}

/// A parsed ket expression before normalisation is checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KetExpr {
    pub terms: Vec<(Prob, Value)>,
}

impl KetExpr {
    /// Validates the expression as a distribution.
    pub fn into_dist(self) -> Result<Dist<Value>> {
        Dist::new(self.terms.into_iter().map(|(w, x)| (x, w)))
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

enum Key {
    Nat(usize),
    Label(String),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.pos, msg))
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(d) => self.err(format!("expected {c:?}, found {d:?}")),
            None => self.err(format!("expected {c:?}, found end of input")),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest.find(|c: char| !f(c)).unwrap_or(rest.len());
        self.pos += len;
        &self.src[start..start + len]
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected {c:?}")),
        }
    }

    fn nat(&mut self) -> Result<u64> {
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return self.err("expected a number");
        }
        digits.parse().or_else(|_| self.err("number too large"))
    }

    fn rational(&mut self) -> Result<Prob> {
        let start = self.pos;
        let num = self.take_while(|c| c.is_ascii_digit());
        if num.is_empty() {
            return self.err("expected a rational coefficient");
        }
        let num: BigInt = num.parse().expect("digits");
        if self.eat('/') {
            let den = self.take_while(|c| c.is_ascii_digit());
            if den.is_empty() {
                return self.err("expected a denominator");
            }
            let den: BigInt = den.parse().expect("digits");
            if den.is_zero() {
                return Err(Error::parse(start, "zero denominator"));
            }
            return Ok(Prob::new(num, den));
        }
        Ok(Prob::from_integer(num))
    }

    fn label(&mut self) -> Result<String> {
        let start = self.pos;
        let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        check_label(word).map_err(|_| Error::parse(start, format!("invalid label {word:?}")))?;
        Ok(word.to_string())
    }

    fn key(&mut self) -> Result<Key> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let n = self.nat()?;
                if n == 0 {
                    return Err(Error::parse(start, "partition parts must be positive"));
                }
                Ok(Key::Nat(n as usize))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => Ok(Key::Label(self.label()?)),
            Some(c) => self.err(format!("expected a multiset key, found {c:?}")),
            None => self.err("expected a multiset key, found end of input"),
        }
    }

    fn braces(&mut self) -> Result<Value> {
        let open = self.pos;
        self.expect('{')?;
        let mut entries = Vec::new();
        if !self.eat('}') {
            loop {
                self.skip_ws();
                let key_pos = self.pos;
                let key = self.key()?;
                self.expect(':')?;
                self.skip_ws();
                let count_pos = self.pos;
                let count = self.nat()?;
                if count == 0 {
                    return Err(Error::parse(count_pos, "multiplicities must be positive"));
                }
                entries.push((key_pos, key, count as usize));
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for (pos, key, _) in &entries {
            let text = match key {
                Key::Nat(n) => n.to_string(),
                Key::Label(s) => s.clone(),
            };
            if !seen.insert(text.clone()) {
                return Err(Error::parse(*pos, format!("repeated key {text}")));
            }
        }
        let all_nat = entries.iter().all(|(_, k, _)| matches!(k, Key::Nat(_)));
        let all_label = entries.iter().all(|(_, k, _)| matches!(k, Key::Label(_)));
        if all_label {
            return Ok(Value::Mset(Multiset::from_counts(entries.into_iter().map(|(_, k, n)| {
                match k {
                    Key::Label(s) => (s, n),
                    Key::Nat(_) => unreachable!(),
                }
            }))));
        }
        if all_nat {
            let counts = entries.into_iter().map(|(_, k, n)| match k {
                Key::Nat(i) => (i, n),
                Key::Label(_) => unreachable!(),
            });
            return Ok(Value::Part(Partition::new(counts)?));
        }
        Err(Error::parse(open, "multiset keys mix numbers and labels"))
    }

    fn outcome(&mut self) -> Result<Value> {
        match self.peek() {
            Some('(') => {
                self.expect('(')?;
                let mut items = vec![self.outcome()?];
                while self.eat(',') {
                    items.push(self.outcome()?);
                }
                self.expect(')')?;
                Ok(Value::Tuple(items))
            }
            Some('{') => self.braces(),
            Some(c) if c.is_ascii_digit() => Ok(Value::Nat(self.nat()?)),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => Ok(Value::Label(self.label()?)),
            Some(c) => self.err(format!("expected an outcome, found {c:?}")),
            None => self.err("expected an outcome, found end of input"),
        }
    }

    fn ket(&mut self) -> Result<KetExpr> {
        let mut terms = Vec::new();
        loop {
            let w = self.rational()?;
            if w.is_zero() {
                return self.err("coefficients must be positive");
            }
            self.expect('|')?;
            let x = self.outcome()?;
            self.expect('>')?;
            terms.push((w, x));
            if !self.eat('+') {
                break;
            }
        }
        Ok(KetExpr { terms })
    }
}

/// Parses a single outcome literal such as `(a,b)`, `{a:2,b:1}` or `{1:3}`.
pub fn parse_outcome(text: &str) -> Result<Value> {
    let mut p = Parser::new(text);
    let v = p.outcome()?;
    p.finish()?;
    Ok(v)
}

pub fn parse_ket(text: &str) -> Result<KetExpr> {
    let mut p = Parser::new(text);
    let k = p.ket()?;
    p.finish()?;
    Ok(k)
}

/// Parses and validates a distribution literal.
pub fn parse_dist(text: &str) -> Result<Dist<Value>> {
    parse_ket(text)?.into_dist()
}

/// Reads a distribution over labels.
pub fn labels_dist(d: &Dist<Value>) -> Result<Dist<String>> {
    d.try_map(|v| {
        v.as_label()
            .map(str::to_string)
            .ok_or_else(|| Error::parse(0, format!("expected a label, found {v}")))
    })
}

/// Reads a distribution over pairs.
pub fn pairs_dist(d: &Dist<Value>) -> Result<Dist<(Value, Value)>> {
    d.try_map(|v| match v.as_tuple() {
        Some([a, b]) => Ok((a.clone(), b.clone())),
        _ => Err(Error::NotATuple(v.canonical(), 2)),
    })
}

pub fn format_dist<T: Outcome>(d: &Dist<T>) -> String {
    d.canonical()
}

pub fn format_channel<A: Outcome, B: Outcome>(c: &Channel<A, B>) -> String {
    c.to_string()
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct JsonEntry {
    outcome: String,
    prob: String,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum JsonDoc {
    Dist { entries: Vec<JsonEntry> },
    Channel { rows: Vec<JsonRow> },
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct JsonRow {
    input: String,
    dist: Vec<JsonEntry>,
}

fn entries<T: Outcome>(d: &Dist<T>) -> Vec<JsonEntry> {
    d.iter()
        .map(|(x, w)| JsonEntry {
            outcome: x.canonical(),
            prob: w.to_string(),
        })
        .collect()
}

fn from_entries(entries: Vec<JsonEntry>) -> Result<Dist<Value>> {
    let terms = entries
        .into_iter()
        .map(|e| Ok((parse_outcome(&e.outcome)?, parse_rational(&e.prob)?)))
        .collect::<Result<Vec<_>>>()?;
    Dist::new(terms)
}

fn to_json(doc: &JsonDoc) -> String {
    serde_json::to_string(doc).expect("plain data serialises")
}

fn json_err(e: serde_json::Error) -> Error {
    Error::parse(e.column(), format!("invalid JSON: {e}"))
}

pub fn dist_to_json<T: Outcome>(d: &Dist<T>) -> String {
    to_json(&JsonDoc::Dist { entries: entries(d) })
}

pub fn channel_to_json<A: Outcome, B: Outcome>(c: &Channel<A, B>) -> String {
    to_json(&JsonDoc::Channel {
        rows: c
            .rows()
            .map(|(a, d)| JsonRow {
                input: a.canonical(),
                dist: entries(d),
            })
            .collect(),
    })
}

pub fn dist_from_json(text: &str) -> Result<Dist<Value>> {
    match serde_json::from_str(text).map_err(json_err)? {
        JsonDoc::Dist { entries } => from_entries(entries),
        JsonDoc::Channel { .. } => Err(Error::parse(0, "expected kind \"dist\"")),
    }
}

pub fn channel_from_json(text: &str) -> Result<Channel<Value, Value>> {
    match serde_json::from_str(text).map_err(json_err)? {
        JsonDoc::Channel { rows } => {
            let rows = rows
                .into_iter()
                .map(|r| Ok((parse_outcome(&r.input)?, from_entries(r.dist)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Channel::new(rows))
        }
        JsonDoc::Dist { .. } => Err(Error::parse(0, "expected kind \"channel\"")),
    }
}
