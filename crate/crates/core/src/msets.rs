//! Multisets over finite carriers, their combinatorial invariants,
//! accumulation, and the exhaustive enumerators used by the verifiers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigUint, One};

use crate::arith::factorial;
use crate::error::{Error, Result};
use crate::outcome::Outcome;

/// A finite multiset, stored as element → positive multiplicity.
///
/// Multisets are ordered by their sorted element listing, compared
/// lexicographically: `{a:2} < {a:1,b:1} < {b:2}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Multiset<T: Ord = String> {
    counts: BTreeMap<T, usize>,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset {
            counts: BTreeMap::new(),
        }
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a multiset from (element, count) pairs. Repeated elements
    /// are summed and zero counts dropped.
    pub fn from_counts<I: IntoIterator<Item = (T, usize)>>(pairs: I) -> Self {
        let mut m = Self::new();
        for (x, n) in pairs {
            m.insert(x, n);
        }
        m
    }

    pub fn singleton(x: T, n: usize) -> Self {
        Self::from_counts([(x, n)])
    }

    pub fn insert(&mut self, x: T, n: usize) {
        if n > 0 {
            *self.counts.entry(x).or_insert(0) += n;
        }
    }

    /// Removes one occurrence of `x`; returns false if `x` was absent.
    pub fn remove_one(&mut self, x: &T) -> bool {
        match self.counts.get_mut(x) {
            Some(n) if *n > 1 => {
                *n -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(x);
                true
            }
            None => false,
        }
    }

    pub fn count(&self, x: &T) -> usize {
        self.counts.get(x).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Number of elements counted with multiplicity, `‖φ‖`.
    pub fn size(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = &T> + '_ {
        self.counts.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, usize)> + '_ {
        self.counts.iter().map(|(x, &n)| (x, n))
    }

    /// Elements in ascending order, each repeated by its multiplicity.
    pub fn elements(&self) -> impl Iterator<Item = &T> + '_ {
        self.counts
            .iter()
            .flat_map(|(x, &n)| std::iter::repeat_n(x, n))
    }

    /// Product of the factorials of the multiplicities, `φ!`.
    pub fn facto(&self) -> BigUint {
        self.counts
            .values()
            .fold(BigUint::one(), |acc, &n| acc * factorial(n))
    }

    /// Multinomial coefficient `‖φ‖! / φ!`.
    pub fn coefm(&self) -> BigUint {
        factorial(self.size()) / self.facto()
    }

    /// Functorial image: counts are summed over the fibres of `f`.
    pub fn map<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> Multiset<U> {
        Multiset::from_counts(self.iter().map(|(x, n)| (f(x), n)))
    }
}

impl<T: Ord> PartialOrd for Multiset<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Ord> Ord for Multiset<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        fn expand<T: Ord>(m: &Multiset<T>) -> impl Iterator<Item = &T> + '_ {
            m.counts
                .iter()
                .flat_map(|(x, &n)| std::iter::repeat_n(x, n))
        }
        expand(self).cmp(expand(other))
    }
}

impl<T: Outcome> Outcome for Multiset<T> {
    fn write_canonical(&self, out: &mut String) {
        out.push('{');
        for (i, (x, n)) in self.counts.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            x.write_canonical(out);
            out.push(':');
            out.push_str(&n.to_string());
        }
        out.push('}');
    }
}

impl<T: Outcome> fmt::Display for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// `n! / (φ! · (n − ‖φ‖)!)`: the number of multisets over an `n`-element
/// set whose multiplicity count is `φ` (when `φ` is a partition).
pub fn mset_binom<T: Ord + Clone>(n: usize, phi: &Multiset<T>) -> Result<BigUint> {
    let size = phi.size();
    if n < size {
        return Err(Error::BinomRange { n, size });
    }
    Ok(factorial(n) / (phi.facto() * factorial(n - size)))
}

/// Accumulates a sequence into the multiset of its entries.
pub fn acc<T: Ord + Clone>(seq: &[T]) -> Multiset<T> {
    Multiset::from_counts(seq.iter().map(|x| (x.clone(), 1)))
}

/// A finite set of distinct labels in ascending order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Carrier<T = String> {
    labels: Vec<T>,
}

impl<T: Outcome> Carrier<T> {
    pub fn new<I: IntoIterator<Item = T>>(labels: I) -> Result<Self> {
        let mut labels: Vec<T> = labels.into_iter().collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLabel(w[0].canonical()));
        }
        Ok(Carrier { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.labels.iter()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.labels
    }

    pub fn contains(&self, x: &T) -> bool {
        self.labels.binary_search(x).is_ok()
    }
}

impl Carrier<String> {
    /// Parses a comma separated label list such as `a,b,c`.
    pub fn parse(text: &str) -> Result<Self> {
        let labels: Vec<String> = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        for l in &labels {
            crate::text::check_label(l)?;
        }
        Carrier::new(labels)
    }

    /// The carrier `{a, b, c, ...}` of the first `n` letters.
    pub fn letters(n: usize) -> Self {
        assert!(n <= 26, "at most 26 letter labels");
        Carrier {
            labels: (b'a'..b'a' + n as u8).map(|c| (c as char).to_string()).collect(),
        }
    }
}

impl<'a, T> IntoIterator for &'a Carrier<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;
    fn into_iter(self) -> Self::IntoIter {
        self.labels.iter()
    }
}

/// All multisets of size `k` over `carrier`, ascending.
pub fn enum_msets<T: Outcome>(carrier: &Carrier<T>, k: usize) -> Vec<Multiset<T>> {
    fn go<T: Outcome>(
        labels: &[T],
        remaining: usize,
        current: &mut Vec<(T, usize)>,
        out: &mut Vec<Multiset<T>>,
    ) {
        match labels.split_first() {
            None => {
                if remaining == 0 {
                    out.push(Multiset::from_counts(current.iter().cloned()));
                }
            }
            Some((x, rest)) => {
                for n in (0..=remaining).rev() {
                    current.push((x.clone(), n));
                    go(rest, remaining - n, current, out);
                    current.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(carrier.as_slice(), k, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// All sequences whose accumulation is `phi`, in lexicographic order.
pub fn enum_acc_fiber<T: Ord + Clone>(phi: &Multiset<T>) -> Vec<Vec<T>> {
    fn go<T: Ord + Clone>(
        remaining: &mut BTreeMap<T, usize>,
        prefix: &mut Vec<T>,
        len: usize,
        out: &mut Vec<Vec<T>>,
    ) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        let keys: Vec<T> = remaining
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(x, _)| x.clone())
            .collect();
        for x in keys {
            *remaining.get_mut(&x).expect("key present") -= 1;
            prefix.push(x.clone());
            go(remaining, prefix, len, out);
            prefix.pop();
            *remaining.get_mut(&x).expect("key present") += 1;
        }
    }
    let mut remaining = phi.counts.clone();
    let mut out = Vec::new();
    go(&mut remaining, &mut Vec::new(), phi.size(), &mut out);
    out
}

/// All sequences of length `k` over `carrier`, in lexicographic order.
pub fn enum_tuples<T: Outcome>(carrier: &Carrier<T>, k: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                carrier.iter().map(move |x| {
                    let mut next = prefix.clone();
                    next.push(x.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// A bijection of a carrier onto itself.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bijection<T: Ord> {
    map: BTreeMap<T, T>,
}

impl<T: Outcome> Bijection<T> {
    pub fn apply<'a>(&'a self, x: &'a T) -> &'a T {
        self.map.get(x).unwrap_or(x)
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(x, y)| x == y)
    }

    /// Images of the carrier elements, in carrier order.
    pub fn images(&self) -> Vec<T> {
        self.map.values().cloned().collect()
    }
}

/// All `|X|!` bijections of `carrier`, ordered lexicographically by their
/// image sequence (the identity first).
pub fn enum_perms<T: Outcome>(carrier: &Carrier<T>) -> Vec<Bijection<T>> {
    use itertools::Itertools;
    let n = carrier.len();
    carrier
        .iter()
        .cloned()
        .permutations(n)
        .map(|images| Bijection {
            map: carrier.iter().cloned().zip(images).collect(),
        })
        .collect()
}
