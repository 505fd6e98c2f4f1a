//! Finite-support distributions with exact rational weights, fuzzy
//! predicates, validity and conditioning.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::arith::{int, Prob};
use crate::error::{Error, Result};
use crate::outcome::{Outcome, Value};

/// A probability distribution with finite support.
///
/// Weights are strictly positive and sum to exactly one. Outcomes are kept
/// in ascending canonical order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Dist<T: Ord> {
    weights: BTreeMap<T, Prob>,
}

impl<T: Outcome> Dist<T> {
    /// Builds a distribution from a formal sum. Repeated outcomes are added
    /// and zero weights dropped; the total must be exactly one.
    pub fn new<I: IntoIterator<Item = (T, Prob)>>(terms: I) -> Result<Self> {
        let weights = collect_weights(terms)?;
        if weights.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let total: Prob = weights.values().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(total.to_string()));
        }
        Ok(Dist { weights })
    }

    /// Divides nonnegative weights by their (positive) total.
    pub fn normalize<I: IntoIterator<Item = (T, Prob)>>(terms: I) -> Result<Self> {
        let weights = collect_weights(terms)?;
        let total: Prob = weights.values().sum();
        if total.is_zero() {
            return Err(Error::EmptyDistribution);
        }
        Ok(Dist {
            weights: weights.into_iter().map(|(x, w)| (x, w / &total)).collect(),
        })
    }

    /// Wraps weights that are already positive and normalised.
    pub(crate) fn from_normalized(weights: BTreeMap<T, Prob>) -> Self {
        debug_assert!(weights.values().all(|w| w.is_positive()));
        debug_assert!(weights.values().sum::<Prob>().is_one());
        Dist { weights }
    }

    /// Accumulates weighted terms whose total is known to be one.
    pub(crate) fn from_terms<I: IntoIterator<Item = (T, Prob)>>(terms: I) -> Self {
        let mut weights: BTreeMap<T, Prob> = BTreeMap::new();
        for (x, w) in terms {
            if !w.is_zero() {
                *weights.entry(x).or_insert_with(Prob::zero) += w;
            }
        }
        weights.retain(|_, w| !w.is_zero());
        Self::from_normalized(weights)
    }

    pub fn dirac(x: T) -> Self {
        Dist {
            weights: BTreeMap::from([(x, Prob::one())]),
        }
    }

    pub fn uniform<I: IntoIterator<Item = T>>(items: I) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for x in items {
            if seen.contains_key(&x) {
                return Err(Error::DuplicateOutcome(x.canonical()));
            }
            seen.insert(x, ());
        }
        if seen.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let w = Prob::one() / int(seen.len());
        Ok(Dist {
            weights: seen.into_keys().map(|x| (x, w.clone())).collect(),
        })
    }

    pub fn prob(&self, x: &T) -> Prob {
        self.weights.get(x).cloned().unwrap_or_else(Prob::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &T> + '_ {
        self.weights.keys()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.weights.contains_key(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Prob)> + '_ {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_dirac(&self) -> bool {
        self.weights.len() == 1
    }

    /// Pushes the distribution forward along a function.
    pub fn map<U: Outcome>(&self, f: impl Fn(&T) -> U) -> Dist<U> {
        Dist::from_terms(self.weights.iter().map(|(x, w)| (f(x), w.clone())))
    }

    /// Product distribution `ω ⊗ ρ`.
    pub fn tensor<U: Outcome>(&self, other: &Dist<U>) -> Dist<(T, U)> {
        let mut weights = BTreeMap::new();
        for (x, wx) in &self.weights {
            for (y, wy) in &other.weights {
                weights.insert((x.clone(), y.clone()), wx * wy);
            }
        }
        Dist::from_normalized(weights)
    }

    /// Expected value `ω ⊨ p`.
    pub fn validity(&self, p: &Predicate<T>) -> Result<Prob> {
        let mut total = Prob::zero();
        for (x, w) in &self.weights {
            let v = p
                .value(x)
                .ok_or_else(|| Error::MissingCarrier(x.canonical()))?;
            total += w * v;
        }
        Ok(total)
    }

    /// Bayesian update `ω|_p`.
    pub fn update(&self, p: &Predicate<T>) -> Result<Dist<T>> {
        let validity = self.validity(p)?;
        if validity.is_zero() {
            return Err(Error::ZeroValidity);
        }
        let weights = self
            .weights
            .iter()
            .map(|(x, w)| (x.clone(), w * p.value(x).expect("checked") / &validity))
            .filter(|(_, w)| !w.is_zero())
            .collect();
        Ok(Dist::from_normalized(weights))
    }

    /// The smallest outcome (in canonical order) where the two
    /// distributions disagree, with both weights.
    pub fn first_difference(&self, other: &Dist<T>) -> Option<(T, Prob, Prob)> {
        let mut keys: Vec<&T> = self.weights.keys().chain(other.weights.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().find_map(|x| {
            let (a, b) = (self.prob(x), other.prob(x));
            (a != b).then(|| (x.clone(), a, b))
        })
    }

    /// Converts the outcomes to another representation, failing on the
    /// first outcome that does not convert.
    pub fn try_map<U: Outcome>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Dist<U>> {
        let terms = self
            .weights
            .iter()
            .map(|(x, w)| Ok((f(x)?, w.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dist::from_terms(terms))
    }
}

fn collect_weights<T: Outcome, I: IntoIterator<Item = (T, Prob)>>(
    terms: I,
) -> Result<BTreeMap<T, Prob>> {
    let mut weights: BTreeMap<T, Prob> = BTreeMap::new();
    for (x, w) in terms {
        if w.is_negative() {
            return Err(Error::NegativeWeight {
                outcome: x.canonical(),
                weight: w.to_string(),
            });
        }
        *weights.entry(x).or_insert_with(Prob::zero) += w;
    }
    weights.retain(|_, w| !w.is_zero());
    Ok(weights)
}

impl<A: Outcome, B: Outcome> Dist<(A, B)> {
    pub fn first(&self) -> Dist<A> {
        self.map(|(a, _)| a.clone())
    }

    pub fn second(&self) -> Dist<B> {
        self.map(|(_, b)| b.clone())
    }
}

/// Outcomes that can be projected onto a component.
pub trait Components: Outcome {
    type Component: Outcome;
    fn component(&self, i: usize) -> Option<Self::Component>;
}

impl<T: Outcome> Components for Vec<T> {
    type Component = T;
    fn component(&self, i: usize) -> Option<T> {
        self.get(i).cloned()
    }
}

impl Components for Value {
    type Component = Value;
    fn component(&self, i: usize) -> Option<Value> {
        self.as_tuple().and_then(|items| items.get(i).cloned())
    }
}

/// Marginal on component `i` (zero-based) of a joint distribution.
pub fn marginal<T: Components>(joint: &Dist<T>, i: usize) -> Result<Dist<T::Component>> {
    joint.try_map(|x| x.component(i).ok_or_else(|| Error::NotATuple(x.canonical(), i)))
}

impl<T: Outcome> Outcome for Dist<T> {
    fn write_canonical(&self, out: &mut String) {
        for (i, (x, w)) in self.weights.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            out.push_str(&w.to_string());
            out.push('|');
            x.write_canonical(out);
            out.push('>');
        }
    }
}

impl<T: Outcome> fmt::Display for Dist<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// A fuzzy predicate: a value in `[0,1]` for every element of an explicit
/// finite carrier.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Predicate<T: Ord> {
    values: BTreeMap<T, Prob>,
}

impl<T: Outcome> Predicate<T> {
    pub fn new<I: IntoIterator<Item = (T, Prob)>>(values: I) -> Result<Self> {
        let values: BTreeMap<T, Prob> = values.into_iter().collect();
        for (x, v) in &values {
            if v.is_negative() || *v > Prob::one() {
                return Err(Error::PredicateRange {
                    outcome: x.canonical(),
                    value: v.to_string(),
                });
            }
        }
        Ok(Predicate { values })
    }

    pub(crate) fn from_values_unchecked(values: BTreeMap<T, Prob>) -> Self {
        Predicate { values }
    }

    pub fn from_fn<'a, I>(carrier: I, f: impl Fn(&T) -> Prob) -> Result<Self>
    where
        I: IntoIterator<Item = &'a T>,
        T: 'a,
    {
        Self::new(carrier.into_iter().map(|x| (x.clone(), f(x))))
    }

    pub fn constant<'a, I>(carrier: I, value: Prob) -> Result<Self>
    where
        I: IntoIterator<Item = &'a T>,
        T: 'a,
    {
        Self::from_fn(carrier, |_| value.clone())
    }

    pub fn truth<'a, I>(carrier: I) -> Self
    where
        I: IntoIterator<Item = &'a T>,
        T: 'a,
    {
        Predicate {
            values: carrier.into_iter().map(|x| (x.clone(), Prob::one())).collect(),
        }
    }

    /// Point predicate `1_y`.
    pub fn point<'a, I>(carrier: I, y: &T) -> Self
    where
        I: IntoIterator<Item = &'a T>,
        T: 'a,
    {
        Predicate {
            values: carrier
                .into_iter()
                .map(|x| {
                    let v = if x == y { Prob::one() } else { Prob::zero() };
                    (x.clone(), v)
                })
                .collect(),
        }
    }

    pub fn value(&self, x: &T) -> Option<&Prob> {
        self.values.get(x)
    }

    pub fn carrier(&self) -> impl Iterator<Item = &T> + '_ {
        self.values.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Prob)> + '_ {
        self.values.iter()
    }

    /// Pointwise product `p & q`; both carriers must agree.
    pub fn and(&self, other: &Predicate<T>) -> Result<Predicate<T>> {
        let mut values = BTreeMap::new();
        for (x, v) in &self.values {
            let w = other
                .value(x)
                .ok_or_else(|| Error::MissingCarrier(x.canonical()))?;
            values.insert(x.clone(), v * w);
        }
        if let Some(x) = other.values.keys().find(|x| !self.values.contains_key(*x)) {
            return Err(Error::MissingCarrier(x.canonical()));
        }
        Ok(Predicate { values })
    }

    /// A pseudo-random predicate whose values are rationals `i/d` with
    /// `d ≤ max_den`.
    pub fn random<'a, I, R>(carrier: I, max_den: u32, rng: &mut R) -> Self
    where
        I: IntoIterator<Item = &'a T>,
        T: 'a,
        R: rand::Rng + ?Sized,
    {
        Predicate {
            values: carrier
                .into_iter()
                .map(|x| {
                    let den = rng.random_range(1..=max_den.max(1));
                    let num = rng.random_range(0..=den);
                    (x.clone(), Prob::new(num.into(), den.into()))
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn d(terms: &[(&str, Prob)]) -> Dist<String> {
        Dist::new(terms.iter().map(|(x, w)| (x.to_string(), w.clone()))).unwrap()
    }

    fn ab() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    #[test]
    fn construction_checks_normalisation() {
        assert!(matches!(
            Dist::new([("a".to_string(), ratio(1, 3))]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            Dist::new([("a".to_string(), ratio(-1, 2)), ("b".to_string(), ratio(3, 2))]),
            Err(Error::NegativeWeight { .. })
        ));
        let with_zero = Dist::new([
            ("a".to_string(), ratio(1, 1)),
            ("b".to_string(), ratio(0, 1)),
        ])
        .unwrap();
        assert_eq!(with_zero, Dist::dirac("a".to_string()));
        assert_eq!(with_zero.len(), 1);
    }

    #[test]
    fn dirac_examples() {
        assert_eq!(Dist::dirac("a".to_string()).to_string(), "1|a>");
        let m = crate::msets::Multiset::singleton("a".to_string(), 2);
        assert_eq!(Dist::dirac(m).to_string(), "1|{a:2}>");
        assert_eq!(Dist::dirac(ab()).to_string(), "1|(a,b)>");
    }

    #[test]
    fn map_examples() {
        let omega = d(&[("a", ratio(1, 8)), ("b", ratio(1, 2)), ("c", ratio(3, 8))]);
        assert_eq!(omega.map(|x| x.clone()), omega);
        assert_eq!(omega.map(|_| 0u64), Dist::dirac(0u64));
    }

    #[test]
    fn tensor_and_marginals() {
        let a = Dist::dirac("a".to_string());
        let b = Dist::dirac("b".to_string());
        assert_eq!(a.tensor(&b), Dist::dirac(("a".to_string(), "b".to_string())));
        let half = Dist::uniform(ab()).unwrap();
        let sq = half.tensor(&half);
        assert_eq!(sq.len(), 4);
        assert!(sq.iter().all(|(_, w)| *w == ratio(1, 4)));
        let omega = d(&[("a", ratio(1, 3)), ("b", ratio(2, 3))]);
        let j = omega.tensor(&half);
        assert_eq!(j.first(), omega);
        assert_eq!(j.second(), half);
    }

    #[test]
    fn marginal_on_sequences() {
        let joint = Dist::dirac(ab());
        assert_eq!(marginal(&joint, 0).unwrap(), Dist::dirac("a".to_string()));
        assert_eq!(marginal(&joint, 1).unwrap(), Dist::dirac("b".to_string()));
        assert!(matches!(marginal(&joint, 2), Err(Error::NotATuple(_, 2))));
        let untyped = Dist::dirac(Value::label("a"));
        assert!(marginal(&untyped, 0).is_err());
    }

    #[test]
    fn validity_examples() {
        let omega = Dist::uniform(ab()).unwrap();
        let x = ab();
        assert_eq!(omega.validity(&Predicate::truth(&x)).unwrap(), Prob::one());
        assert_eq!(
            omega.validity(&Predicate::point(&x, &"a".to_string())).unwrap(),
            ratio(1, 2)
        );
        let falsity = Predicate::constant(&x, Prob::zero()).unwrap();
        assert_eq!(omega.validity(&falsity).unwrap(), Prob::zero());
        let partial = Predicate::truth(&x[..1]);
        assert!(matches!(omega.validity(&partial), Err(Error::MissingCarrier(_))));
    }

    #[test]
    fn update_examples() {
        let omega = Dist::uniform(ab()).unwrap();
        let x = ab();
        assert_eq!(omega.update(&Predicate::truth(&x)).unwrap(), omega);
        assert_eq!(
            omega.update(&Predicate::point(&x, &"a".to_string())).unwrap(),
            Dist::dirac("a".to_string())
        );
        let falsity = Predicate::constant(&x, Prob::zero()).unwrap();
        assert_eq!(omega.update(&falsity), Err(Error::ZeroValidity));
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(Dist::uniform(["a".to_string()]).unwrap(), Dist::dirac("a".to_string()));
        let pairs = Dist::uniform([ab(), vec!["b".into(), "a".into()]]).unwrap();
        assert!(pairs.iter().all(|(_, w)| *w == ratio(1, 2)));
        assert_eq!(Dist::<String>::uniform([]), Err(Error::EmptyDistribution));
        assert!(matches!(
            Dist::uniform(["a".to_string(), "a".to_string()]),
            Err(Error::DuplicateOutcome(_))
        ));
    }

    #[test]
    fn predicates_are_range_checked() {
        assert!(matches!(
            Predicate::new([("a".to_string(), ratio(3, 2))]),
            Err(Error::PredicateRange { .. })
        ));
        let x = ab();
        let p = Predicate::from_fn(&x, |s| if s == "a" { ratio(1, 2) } else { ratio(1, 3) }).unwrap();
        let q = Predicate::constant(&x, ratio(1, 2)).unwrap();
        let pq = p.and(&q).unwrap();
        assert_eq!(pq.value(&"b".to_string()), Some(&ratio(1, 6)));
        assert!(p.and(&Predicate::truth(&x[..1])).is_err());
    }

    #[test]
    fn first_difference_is_minimal() {
        let p = d(&[("a", ratio(1, 2)), ("b", ratio(1, 2))]);
        let q = d(&[("a", ratio(1, 2)), ("c", ratio(1, 2))]);
        let (x, wp, wq) = p.first_difference(&q).unwrap();
        assert_eq!(x, "b");
        assert_eq!((wp, wq), (ratio(1, 2), Prob::zero()));
        assert!(p.first_difference(&p).is_none());
    }
}
