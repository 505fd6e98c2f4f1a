//! Truncated Poisson products and sufficiency of their sum.
//!
//! Poisson weights are kept unnormalised, `λ^k / k!`, so that everything
//! stays rational. The common factor `e^{-Kλ}` cancels in every identity
//! checked here.

use std::collections::BTreeMap;

use num::{One, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{factorial, from_big, int, pow, Prob};
use crate::channel::Channel;
use crate::dist::{Dist, Predicate};
use crate::error::{Error, Result};
use crate::report::{dist_diff, Report};

pub fn pois_weight(lambda: &Prob, k: usize) -> Prob {
    pow(lambda, k) / from_big(&factorial(k))
}

pub fn som(v: &[usize]) -> usize {
    v.iter().sum()
}

/// All `arity`-tuples of nonnegative integers with sum `n`, ascending.
pub fn compositions(n: usize, arity: usize) -> Vec<Vec<usize>> {
    if arity == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, arity - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All `arity`-tuples with sum at most `bound`, ascending.
pub fn tuples_up_to(bound: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..=bound).flat_map(|n| compositions(n, arity)).collect();
    out.sort();
    out
}

fn require_arity(arity: usize) -> Result<()> {
    if arity == 0 {
        return Err(Error::OutOfRange("K must be at least 1".into()));
    }
    Ok(())
}

/// Splits `n` over `arity` slots uniformly: weight `n! / (K^n Π kᵢ!)`.
pub fn som_dagger(n: usize, arity: usize) -> Result<Dist<Vec<usize>>> {
    require_arity(arity)?;
    let scale = from_big(&factorial(n)) / pow(&int(arity), n);
    Dist::new(compositions(n, arity).into_iter().map(|v| {
        let den = v.iter().fold(Prob::one(), |acc, &k| acc * from_big(&factorial(k)));
        (v, &scale / den)
    }))
}

pub fn som_dagger_channel(bound: usize, arity: usize) -> Result<Channel<usize, Vec<usize>>> {
    Channel::try_from_fn(&(0..=bound).collect::<Vec<_>>(), |&n| som_dagger(n, arity))
}

/// The deterministic channel `som` on tuples with sum at most `bound`.
pub fn som_channel(bound: usize, arity: usize) -> Channel<Vec<usize>, usize> {
    Channel::lift(&tuples_up_to(bound, arity), |v| som(v))
}

/// Unnormalised weights of the `K`-fold Poisson product, truncated to
/// tuples with sum at most `bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    pub lambda: Prob,
    pub bound: usize,
    pub arity: usize,
}

impl WeightVector {
    pub fn new(lambda: Prob, bound: usize, arity: usize) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::NonPositiveParameter(lambda.to_string()));
        }
        require_arity(arity)?;
        Ok(WeightVector { lambda, bound, arity })
    }

    pub fn weight(&self, v: &[usize]) -> Prob {
        v.iter().fold(Prob::one(), |acc, &k| acc * pois_weight(&self.lambda, k))
    }

    pub fn weights(&self) -> BTreeMap<Vec<usize>, Prob> {
        tuples_up_to(self.bound, self.arity)
            .into_iter()
            .map(|v| {
                let w = self.weight(&v);
                (v, w)
            })
            .collect()
    }

    /// The truncated product renormalised to a distribution.
    pub fn truncated_dist(&self) -> Dist<Vec<usize>> {
        Dist::normalize(self.weights()).expect("weights are positive")
    }
}

/// The default sweep `λ ∈ {1/2, 1, 3/2}`.
pub fn default_lambdas() -> Vec<Prob> {
    vec![int(1) / int(2), int(1), int(3) / int(2)]
}

/// Checks that `som` is sufficient for the `K`-fold Poisson product on the
/// region `som ≤ bound`: the pushforward identity, the parameter-free
/// conditional, and predicate adjointness for `pairs` seeded predicate
/// pairs.
pub fn verify_sum_sufficiency(
    arity: usize,
    lambdas: &[Prob],
    bound: usize,
    pairs: usize,
    seed: u64,
) -> Result<Report> {
    require_arity(arity)?;
    if bound == 0 {
        return Err(Error::OutOfRange("truncation bound must be at least 1".into()));
    }
    let mut report = Report::new(format!("som sufficient for Poisson product, K={arity}"));
    report.note(format!(
        "weights truncated to tuples with sum <= {bound}; the factor e^(-K lambda) is dropped on both sides"
    ));
    report.note("predicates are finitely supported: zero outside the truncated region");
    let tuples = tuples_up_to(bound, arity);
    let sums: Vec<usize> = (0..=bound).collect();
    let dagger = som_dagger_channel(bound, arity)?;
    report.check_channels(
        "som ∘ som† = id",
        "",
        &som_channel(bound, arity).after(&dagger)?,
        &Channel::identity(&sums),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let predicates: Vec<(Predicate<Vec<usize>>, Predicate<usize>)> = (0..pairs)
        .map(|_| (Predicate::random(&tuples, 16, &mut rng), Predicate::random(&sums, 16, &mut rng)))
        .collect();
    let pulled: Vec<Predicate<usize>> = predicates
        .iter()
        .map(|(p, _)| dagger.pull(p))
        .collect::<Result<_>>()?;

    let mut first_conditionals: Option<Vec<Dist<Vec<usize>>>> = None;
    for lambda in lambdas {
        let wv = WeightVector::new(lambda.clone(), bound, arity)?;
        let weights = wv.weights();
        let scope = format!("lambda={lambda}");
        let mut conditionals = Vec::new();
        for n in 0..=bound {
            let fibre: Vec<(Vec<usize>, Prob)> = weights
                .iter()
                .filter(|(v, _)| som(v) == n)
                .map(|(v, w)| (v.clone(), w.clone()))
                .collect();
            let total: Prob = fibre.iter().map(|(_, w)| w).sum();
            let expected = pois_weight(&(int(arity) * lambda), n);
            let outcome = if total == expected {
                Ok(())
            } else {
                Err(format!("{total} vs {expected}"))
            };
            report.record("Σ_{som⁻¹(n)} Π λ^k/k! = (Kλ)^n/n!", format!("{scope}, n={n}"), outcome);
            let conditional = Dist::normalize(fibre)?;
            report.check_dists(
                "conditional on som = n equals som†(n)",
                format!("{scope}, n={n}"),
                &conditional,
                dagger.get(&n)?,
            );
            conditionals.push(conditional);
        }
        match &first_conditionals {
            None => first_conditionals = Some(conditionals),
            Some(first) => {
                let outcome = first
                    .iter()
                    .zip(&conditionals)
                    .try_for_each(|(a, b)| dist_diff(a, b));
                report.record("conditional independent of λ", scope.clone(), outcome);
            }
        }
        for (i, ((p, q), dp)) in predicates.iter().zip(&pulled).enumerate() {
            let lhs: Prob = weights
                .iter()
                .map(|(v, w)| w * p.value(v).expect("p covers tuples") * q.value(&som(v)).expect("q covers sums"))
                .sum();
            let rhs: Prob = sums
                .iter()
                .map(|n| {
                    pois_weight(&(int(arity) * lambda), *n)
                        * dp.value(n).expect("pulled predicate covers sums")
                        * q.value(n).expect("q covers sums")
                })
                .sum();
            let outcome = if lhs == rhs { Ok(()) } else { Err(format!("{lhs} vs {rhs}")) };
            report.record("Σ w · p · (som⪪q) = Σ W · (som†⪪p) · q", format!("{scope}, pair {i}"), outcome);
        }
    }
    if lambdas.is_empty() || pairs == 0 {
        report.note("no parameters or predicate pairs were sampled");
    }
    Ok(report)
}
