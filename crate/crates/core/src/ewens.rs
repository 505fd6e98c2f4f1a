//! Ewens and Stirling distributions, draw-add dynamics, and sufficiency
//! of the partition size.

use std::fmt;

use num::{BigUint, One, Signed, Zero};

use crate::arith::{factorial, from_big, int, pow, rising, Prob};
use crate::channel::Channel;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::partitions::{enum_partitions, Partition};
use crate::report::Report;

/// The reproduction parameter `t > 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EwensParam(Prob);

impl EwensParam {
    pub fn new(t: Prob) -> Result<Self> {
        if !t.is_positive() {
            return Err(Error::NonPositiveParameter(t.to_string()));
        }
        Ok(EwensParam(t))
    }

    pub fn value(&self) -> &Prob {
        &self.0
    }

    /// The default sweep `{1/2, 1, 2, 7/3}`.
    pub fn default_grid() -> Vec<EwensParam> {
        [(1, 2), (1, 1), (2, 1), (7, 3)]
            .into_iter()
            .map(|(p, q)| EwensParam(int(p) / int(q)))
            .collect()
    }
}

impl fmt::Display for EwensParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={}", self.0)
    }
}

/// Row `n` of the unsigned Stirling numbers of the first kind,
/// `[n,0] ..= [n,n]`.
pub fn stirling_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for m in 0..n {
        let mut next = vec![BigUint::zero(); m + 2];
        for (k, s) in row.iter().enumerate() {
            next[k] += s * BigUint::from(m);
            next[k + 1] += s;
        }
        row = next;
    }
    row
}

/// `[n,k]`, zero outside `0 ≤ k ≤ n`.
pub fn stirling1(n: usize, k: i64) -> BigUint {
    usize::try_from(k)
        .ok()
        .and_then(|k| stirling_row(n).get(k).cloned())
        .unwrap_or_default()
}

fn require_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::OutOfRange("K must be at least 1".into()));
    }
    Ok(())
}

/// `1 / (σ! · maal(σ))`.
fn inverse_weight(sigma: &Partition) -> Prob {
    Prob::one() / from_big(&(sigma.facto() * sigma.maal()))
}

/// The Ewens distribution on `MP(K)`.
pub fn ewens_dist(k: usize, t: &EwensParam) -> Result<Dist<Partition>> {
    require_k(k)?;
    let t = t.value();
    let scale = from_big(&factorial(k)) / rising(t, k);
    let terms = enum_partitions(k)?.into_iter().map(|sigma| {
        let w = &scale * pow(t, sigma.psize()) * inverse_weight(&sigma);
        (sigma, w)
    });
    Dist::new(terms)
}

/// The Stirling distribution of partition sizes, on `{1..K}`.
pub fn stirling_dist(k: usize, t: &EwensParam) -> Result<Dist<usize>> {
    require_k(k)?;
    let t = t.value();
    let norm = rising(t, k);
    let row = stirling_row(k);
    Dist::new((1..=k).map(|j| (j, from_big(&row[j]) * pow(t, j) / &norm)))
}

/// The parameter-free reverse channel for `psize` at size `n`: weights
/// proportional to `1 / (σ! · maal(σ))` on the partitions of `K` with `n`
/// parts.
pub fn size_dagger(k: usize, n: usize) -> Result<Dist<Partition>> {
    if n == 0 || n > k {
        return Err(Error::OutOfRange(format!("size {n} outside 1..={k}")));
    }
    let terms = enum_partitions(k)?
        .into_iter()
        .filter(|sigma| sigma.psize() == n)
        .map(|sigma| {
            let w = inverse_weight(&sigma);
            (sigma, w)
        });
    Dist::normalize(terms)
}

pub fn size_dagger_channel(k: usize) -> Result<Channel<usize, Partition>> {
    require_k(k)?;
    Channel::try_from_fn(&(1..=k).collect::<Vec<_>>(), |&n| size_dagger(k, n))
}

/// The deterministic channel `psize : MP(K) → {1..K}`.
pub fn psize_channel(k: usize) -> Result<Channel<Partition, usize>> {
    Ok(Channel::lift(&enum_partitions(k)?, Partition::psize))
}

/// Partition draw-add `MP(K) ⇝ MP(K+1)`: a new part 1 with probability
/// `t/(K+t)`, otherwise a part `k` grows with probability `σ(k)·k/(K+t)`.
pub fn pda(k: usize, t: &EwensParam) -> Result<Channel<Partition, Partition>> {
    require_k(k)?;
    let t = t.value();
    let denom = int(k) + t;
    Ok(Channel::from_fn(&enum_partitions(k)?, |sigma| {
        let mut terms = vec![(sigma.with_part(1), t / &denom)];
        for (part, mult) in sigma.iter() {
            let grown = sigma.grow(part).expect("part is present");
            terms.push((grown, int(mult * part) / &denom));
        }
        Dist::from_terms(terms)
    }))
}

/// Size draw-add `{1..K} ⇝ {1..K+1}`.
pub fn sda(k: usize, t: &EwensParam) -> Result<Channel<usize, usize>> {
    require_k(k)?;
    let t = t.value();
    let denom = int(k) + t;
    Ok(Channel::from_fn(&(1..=k).collect::<Vec<_>>(), |&j| {
        Dist::from_terms([(j + 1, t / &denom), (j, int(k) / &denom)])
    }))
}

/// `Σ_k [K,k] t^k = t (t+1) ... (t+K-1)`.
pub fn check_stirling_convex(max_k: usize, ts: &[EwensParam]) -> Report {
    let mut report = Report::new("Stirling normalisation");
    for k in 1..=max_k {
        let row = stirling_row(k);
        for t in ts {
            let lhs: Prob = (0..=k).map(|j| from_big(&row[j]) * pow(t.value(), j)).sum();
            let rhs = rising(t.value(), k);
            let outcome = if lhs == rhs { Ok(()) } else { Err(format!("{lhs} vs {rhs}")) };
            report.record("Σ [K,k] t^k = t^(K rising)", format!("K={k}, {t}"), outcome);
        }
    }
    report
}

/// Checks that `psize` is sufficient for the Ewens distributions at each
/// `t`: the Stirling pushforward, the ket equation with `size_dagger`, the
/// draw-add commuting rectangle, the inductive constructions, and that the
/// conditional of Ewens given the size does not depend on `t`.
pub fn verify_size_sufficiency(k: usize, ts: &[EwensParam]) -> Result<Report> {
    require_k(k)?;
    let mut report = Report::new(format!("psize sufficient for Ewens, K={k}"));
    let partitions = enum_partitions(k)?;
    let sizes: Vec<usize> = (1..=k).collect();
    let psize = psize_channel(k)?;
    let reverse = size_dagger_channel(k)?;
    let lhs_c = Channel::identity(&partitions).tuple(&psize)?;
    let rhs_c = reverse.tuple(&Channel::identity(&sizes))?;
    let psize_next = psize_channel(k + 1)?;
    for t in ts {
        let scope = t.to_string();
        let e = ewens_dist(k, t)?;
        let s = stirling_dist(k, t)?;
        report.check_dists("D(psize)(ewens) = stirling", scope.clone(), &e.map(Partition::psize), &s);
        report.check_dists(
            "<id, psize> >> ewens = <size†, id> >> stirling",
            scope.clone(),
            &lhs_c.push(&e)?,
            &rhs_c.push(&s)?,
        );
        report.check_channels(
            "psize ∘ pda = sda ∘ psize",
            scope.clone(),
            &psize_next.after(&pda(k, t)?)?,
            &sda(k, t)?.after(&psize)?,
        );
        report.check_dists(
            "ewens[K+1] = pda >> ewens[K]",
            scope.clone(),
            &ewens_dist(k + 1, t)?,
            &pda(k, t)?.push(&e)?,
        );
        report.check_dists(
            "stirling[K+1] = sda >> stirling[K]",
            scope.clone(),
            &stirling_dist(k + 1, t)?,
            &sda(k, t)?.push(&s)?,
        );
        report.check_channels(
            "psize†_ewens = size†",
            scope,
            &psize.dagger(&e)?,
            &reverse,
        );
    }
    report.absorb("", check_stirling_convex(k.max(8), ts));
    Ok(report)
}
