//! Multiset partitions, multiplicity count, the stack and element
//! permutation channels, and the swapped and partition multinomials.

use std::fmt;

use num::{BigUint, One};

use crate::arith::{factorial, from_big, int, Prob};
use crate::channel::Channel;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::msets::{enum_msets, enum_perms, mset_binom, Carrier, Multiset};
use crate::outcome::Outcome;
use crate::report::Report;
use crate::seqmult::multinomial;

/// A multiset over the positive integers. `{1:2,2:1}` is the partition
/// `1 + 1 + 2` of 4.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Partition(Multiset<usize>);

impl Partition {
    /// Builds a partition from (part, multiplicity) pairs; parts must be
    /// positive.
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(counts: I) -> Result<Self> {
        let m = Multiset::from_counts(counts);
        if m.count(&0) > 0 {
            return Err(Error::OutOfRange("partition parts must be positive".into()));
        }
        Ok(Partition(m))
    }

    /// The partition of `k` into `k` ones, `{1:k}`.
    pub fn ones(k: usize) -> Self {
        Partition(Multiset::singleton(1, k))
    }

    /// The one-part partition `{k:1}`.
    pub fn single(k: usize) -> Self {
        Partition(Multiset::singleton(k, 1))
    }

    pub fn as_multiset(&self) -> &Multiset<usize> {
        &self.0
    }

    /// Multiplicity `σ(i)` of the part `i`.
    pub fn count(&self, i: usize) -> usize {
        self.0.count(&i)
    }

    /// (part, multiplicity) pairs in ascending part order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&i, n)| (i, n))
    }

    /// The sum `Σ σ(i)·i`.
    pub fn psum(&self) -> usize {
        self.iter().map(|(i, n)| i * n).sum()
    }

    /// The number of parts `‖σ‖`.
    pub fn psize(&self) -> usize {
        self.0.size()
    }

    /// The product of all parts, `Π i^σ(i)`.
    pub fn maal(&self) -> BigUint {
        self.iter()
            .fold(BigUint::one(), |acc, (i, n)| acc * BigUint::from(i).pow(n as u32))
    }

    /// `σ! = Π σ(i)!`.
    pub fn facto(&self) -> BigUint {
        self.0.facto()
    }

    /// Adds one part `i`.
    pub fn with_part(&self, i: usize) -> Self {
        let mut m = self.0.clone();
        m.insert(i, 1);
        Partition(m)
    }

    /// Replaces one part `k` by `k + 1`; `None` when `k` is not a part.
    pub fn grow(&self, k: usize) -> Option<Self> {
        let mut m = self.0.clone();
        if !m.remove_one(&k) {
            return None;
        }
        m.insert(k + 1, 1);
        Some(Partition(m))
    }
}

impl Outcome for Partition {
    fn write_canonical(&self, out: &mut String) {
        self.0.write_canonical(out);
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// `MP(k)`: all partitions with sum `k`, ascending.
pub fn enum_partitions(k: usize) -> Result<Vec<Partition>> {
    if k == 0 {
        return Err(Error::OutOfRange("partitions need k >= 1".into()));
    }
    fn go(remaining: usize, max_part: usize, parts: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(Multiset::from_counts(parts.iter().map(|&i| (i, 1)))));
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            parts.push(part);
            go(remaining - part, part, parts, out);
            parts.pop();
        }
    }
    let mut out = Vec::new();
    go(k, k, &mut Vec::new(), &mut out);
    out.sort();
    Ok(out)
}

/// Multiplicity count: `mc(φ)(i)` is the number of elements occurring
/// exactly `i` times in `φ`.
pub fn mc<T: Ord + Clone>(phi: &Multiset<T>) -> Result<Partition> {
    if phi.is_empty() {
        return Err(Error::EmptyMultiset);
    }
    Ok(Partition(Multiset::from_counts(phi.iter().map(|(_, n)| (n, 1)))))
}

/// All multisets over `carrier` with multiplicity count `sigma`, ascending.
pub fn mc_fiber<T: Outcome>(sigma: &Partition, carrier: &Carrier<T>) -> Vec<Multiset<T>> {
    fn go<T: Outcome>(
        labels: &[T],
        parts: &mut Multiset<usize>,
        current: &mut Vec<(T, usize)>,
        out: &mut Vec<Multiset<T>>,
    ) {
        if parts.is_empty() {
            out.push(Multiset::from_counts(current.iter().cloned()));
            return;
        }
        let Some((x, rest)) = labels.split_first() else {
            return;
        };
        if rest.len() >= parts.size() {
            go(rest, parts, current, out);
        }
        let choices: Vec<usize> = parts.support().copied().collect();
        for n in choices {
            parts.remove_one(&n);
            current.push((x.clone(), n));
            go(rest, parts, current, out);
            current.pop();
            parts.insert(n, 1);
        }
    }
    let mut parts = sigma.0.clone();
    let mut out = Vec::new();
    go(carrier.as_slice(), &mut parts, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Stack: the uniform distribution on the multisets over `carrier` whose
/// multiplicity count is `sigma`.
pub fn stk<T: Outcome>(sigma: &Partition, carrier: &Carrier<T>) -> Result<Dist<Multiset<T>>> {
    let fiber = mc_fiber(sigma, carrier);
    if fiber.is_empty() {
        return Err(Error::CarrierTooSmall {
            carrier: carrier.len(),
            needed: sigma.psize().max(1),
        });
    }
    Dist::uniform(fiber)
}

fn require_room<T: Outcome>(carrier: &Carrier<T>, k: usize) -> Result<()> {
    if carrier.len() < k {
        return Err(Error::CarrierTooSmall {
            carrier: carrier.len(),
            needed: k,
        });
    }
    Ok(())
}

/// `stk : MP(k) ⇝ M[k](X)`, requiring `|X| ≥ k`.
pub fn stk_channel<T: Outcome>(carrier: &Carrier<T>, k: usize) -> Result<Channel<Partition, Multiset<T>>> {
    require_room(carrier, k)?;
    Channel::try_from_fn(&enum_partitions(k)?, |sigma| stk(sigma, carrier))
}

/// The deterministic channel `mc : M[k](X) → MP(k)`.
pub fn mc_channel<T: Outcome>(carrier: &Carrier<T>, k: usize) -> Result<Channel<Multiset<T>, Partition>> {
    Channel::try_from_fn(&enum_msets(carrier, k), |phi| mc(phi).map(Dist::dirac))
}

/// Element permutation of a single multiset, `stk(mc(φ))`. Only a nonempty
/// fiber is required, so `|X|` may be smaller than `‖φ‖`.
pub fn ep<T: Outcome>(phi: &Multiset<T>, carrier: &Carrier<T>) -> Result<Dist<Multiset<T>>> {
    if let Some(x) = phi.support().find(|x| !carrier.contains(x)) {
        return Err(Error::DomainMismatch(x.canonical()));
    }
    stk(&mc(phi)?, carrier)
}

/// Element permutation as the average `Σ_π (1/n!) |M(π)(φ)⟩` over all
/// bijections of the carrier.
pub fn ep_by_permutations<T: Outcome>(phi: &Multiset<T>, carrier: &Carrier<T>) -> Result<Dist<Multiset<T>>> {
    if phi.is_empty() {
        return Err(Error::EmptyMultiset);
    }
    if let Some(x) = phi.support().find(|x| !carrier.contains(x)) {
        return Err(Error::DomainMismatch(x.canonical()));
    }
    let perms = enum_perms(carrier);
    let w = Prob::one() / int(perms.len());
    Ok(Dist::from_terms(
        perms.iter().map(|pi| (phi.map(|x| pi.apply(x).clone()), w.clone())),
    ))
}

/// `ep = stk ∘· mc` on `M[k](X)`, requiring `|X| ≥ k`.
pub fn ep_channel<T: Outcome>(carrier: &Carrier<T>, k: usize) -> Result<Channel<Multiset<T>, Multiset<T>>> {
    stk_channel(carrier, k)?.after(&mc_channel(carrier, k)?)
}

fn support_carrier<T: Outcome>(omega: &Dist<T>) -> Carrier<T> {
    Carrier::new(omega.support().cloned()).expect("support is duplicate free")
}

/// Swapped multinomial: the multinomial averaged over all relabellings of
/// the support of `omega`.
pub fn smn<T: Outcome>(omega: &Dist<T>, k: usize) -> Result<Dist<Multiset<T>>> {
    let carrier = support_carrier(omega);
    require_room(&carrier, k)?;
    let perms = enum_perms(&carrier);
    let w = Prob::one() / int(perms.len());
    let mut terms = Vec::new();
    for pi in &perms {
        let swapped = omega.map(|x| pi.apply(x).clone());
        for (phi, v) in multinomial(&swapped, k)?.iter() {
            terms.push((phi.clone(), v * &w));
        }
    }
    Ok(Dist::from_terms(terms))
}

/// `ep ≫ multinomial(ω, k)`.
pub fn smn_via_ep<T: Outcome>(omega: &Dist<T>, k: usize) -> Result<Dist<Multiset<T>>> {
    let carrier = support_carrier(omega);
    ep_channel(&carrier, k)?.push(&multinomial(omega, k)?)
}

/// `⟨⟨σ⟩⟩ = K! / Π (i!)^σ(i)` with `K` the sum of `σ`.
pub fn partcoefm(sigma: &Partition) -> BigUint {
    let den = sigma
        .iter()
        .fold(BigUint::one(), |acc, (i, n)| acc * factorial(i).pow(n as u32));
    factorial(sigma.psum()) / den
}

/// Partition multinomial `D(mc)(multinomial(ω, k))`.
pub fn pamn<T: Outcome>(omega: &Dist<T>, k: usize) -> Result<Dist<Partition>> {
    require_room(&support_carrier(omega), k)?;
    multinomial(omega, k)?.try_map(mc)
}

/// The partition multinomial from its closed form
/// `⟨⟨σ⟩⟩ · Σ_{mc(φ)=σ} Π ω(x)^φ(x)`.
pub fn pamn_concrete<T: Outcome>(omega: &Dist<T>, k: usize) -> Result<Dist<Partition>> {
    let carrier = support_carrier(omega);
    require_room(&carrier, k)?;
    let mut terms = Vec::new();
    for sigma in enum_partitions(k)? {
        let inner: Prob = mc_fiber(&sigma, &carrier)
            .iter()
            .map(|phi| {
                phi.iter()
                    .fold(Prob::one(), |acc, (x, n)| acc * crate::arith::pow(&omega.prob(x), n))
            })
            .sum();
        terms.push((sigma.clone(), from_big(&partcoefm(&sigma)) * inner));
    }
    Dist::new(terms)
}

/// Checks that `mc` is sufficient for the swapped multinomial on each
/// state: `ep ≫ smn = smn`, the ket equation with `stk` as reverse
/// channel, and agreement of the alternative routes for `smn` and `pamn`.
pub fn verify_mc_sufficiency<T: Outcome>(omegas: &[Dist<T>], k: usize) -> Result<Report> {
    let mut report = Report::new(format!("mc sufficient for swapped multinomial, K={k}"));
    for omega in omegas {
        let scope = omega.canonical();
        let carrier = support_carrier(omega);
        let msets = enum_msets(&carrier, k);
        let partitions = enum_partitions(k)?;
        let s = smn(omega, k)?;
        let ep = ep_channel(&carrier, k)?;
        report.check_dists("ep >> smn = smn", scope.clone(), &ep.push(&s)?, &s);
        report.check_dists("smn = ep >> mn", scope.clone(), &s, &smn_via_ep(omega, k)?);

        let p = pamn(omega, k)?;
        report.check_dists("pamn = concrete form", scope.clone(), &p, &pamn_concrete(omega, k)?);
        report.check_dists("pamn = D(mc)(smn)", scope.clone(), &p, &s.try_map(mc)?);

        let lhs = Channel::identity(&msets)
            .tuple(&mc_channel(&carrier, k)?)?
            .push(&s)?;
        let rhs = stk_channel(&carrier, k)?
            .tuple(&Channel::identity(&partitions))?
            .push(&p)?;
        report.check_dists("<id, mc> >> smn = <stk, id> >> pamn", scope, &lhs, &rhs);
    }
    Ok(report)
}

/// Fiber sizes of `mc` against `mset_binom`, for every partition of every
/// `k ≤ |X|`.
pub fn check_fiber_counts<T: Outcome>(carrier: &Carrier<T>) -> Result<Report> {
    let mut report = Report::new("multiplicity count fibers");
    let n = carrier.len();
    for k in 1..=n {
        let msets = enum_msets(carrier, k);
        for sigma in enum_partitions(k)? {
            let brute = msets.iter().filter(|phi| mc(phi).ok().as_ref() == Some(&sigma)).count();
            let formula = mset_binom(n, sigma.as_multiset())?;
            let constructive = mc_fiber(&sigma, carrier).len();
            let outcome = if BigUint::from(brute) == formula && brute == constructive {
                Ok(())
            } else {
                Err(format!("{brute} multisets, {constructive} constructed, binom {formula}"))
            };
            report.record("|mc⁻¹(σ)| = binom(n, σ)", sigma.canonical(), outcome);
        }
    }
    Ok(report)
}

/// `φ! = Π (i!)^mc(φ)(i)` and `⟨φ⟩ = ⟨⟨mc(φ)⟩⟩` on all multisets of size
/// `k` over `carrier`.
pub fn check_coefficient_identities<T: Outcome>(carrier: &Carrier<T>, k: usize) -> Result<Report> {
    let mut report = Report::new("multiplicity count coefficients");
    for phi in enum_msets(carrier, k) {
        let sigma = mc(&phi)?;
        let product = sigma
            .iter()
            .fold(BigUint::one(), |acc, (i, n)| acc * factorial(i).pow(n as u32));
        let outcome = if phi.facto() == product {
            Ok(())
        } else {
            Err(format!("{} vs {}", phi.facto(), product))
        };
        report.record("φ! = Π (i!)^mc(φ)(i)", phi.canonical(), outcome);
        let outcome = if phi.coefm() == partcoefm(&sigma) {
            Ok(())
        } else {
            Err(format!("{} vs {}", phi.coefm(), partcoefm(&sigma)))
        };
        report.record("<φ> = <<mc(φ)>>", phi.canonical(), outcome);
    }
    Ok(report)
}
