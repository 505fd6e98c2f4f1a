//! Sequences and multisets of draws: iid, multinomial, arrangement and
//! tuple permutation.

use itertools::Itertools;
use num::One;

use crate::arith::{from_big, int, pow, Prob};
use crate::channel::Channel;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::msets::{acc, enum_acc_fiber, enum_msets, enum_tuples, Carrier, Multiset};
use crate::outcome::Outcome;
use crate::report::Report;

/// The set `X^K` of sequences of length `K` over a carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqCarrier<T = String> {
    pub base: Carrier<T>,
    pub length: usize,
}

impl<T: Outcome> SeqCarrier<T> {
    pub fn new(base: Carrier<T>, length: usize) -> Self {
        SeqCarrier { base, length }
    }

    /// All `|X|^K` sequences in lexicographic order.
    pub fn tuples(&self) -> Vec<Vec<T>> {
        enum_tuples(&self.base, self.length)
    }
}

fn require_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::OutOfRange("K must be at least 1".into()));
    }
    Ok(())
}

fn support_carrier<T: Outcome>(omega: &Dist<T>) -> Carrier<T> {
    Carrier::new(omega.support().cloned()).expect("support is duplicate free")
}

/// `iid[K](ω)`: `K` independent draws, as sequences.
pub fn iid<T: Outcome>(omega: &Dist<T>, k: usize) -> Result<Dist<Vec<T>>> {
    require_k(k)?;
    let mut terms: Vec<(Vec<T>, Prob)> = vec![(Vec::new(), Prob::one())];
    for _ in 0..k {
        terms = terms
            .into_iter()
            .flat_map(|(prefix, w)| {
                omega.iter().map(move |(x, v)| {
                    let mut seq = prefix.clone();
                    seq.push(x.clone());
                    (seq, &w * v)
                })
            })
            .collect();
    }
    Ok(Dist::from_terms(terms))
}

/// `mn[K](ω)`, with weight `⟨φ⟩ · Π ω(x)^φ(x)` on each multiset of size `K`.
pub fn multinomial<T: Outcome>(omega: &Dist<T>, k: usize) -> Result<Dist<Multiset<T>>> {
    require_k(k)?;
    let terms = enum_msets(&support_carrier(omega), k).into_iter().map(|phi| {
        let w = phi
            .iter()
            .fold(from_big(&phi.coefm()), |acc, (x, n)| acc * pow(&omega.prob(x), n));
        (phi, w)
    });
    Ok(Dist::from_terms(terms))
}

/// Arrangement: the uniform distribution on the orderings of `phi`.
pub fn arr<T: Outcome>(phi: &Multiset<T>) -> Result<Dist<Vec<T>>> {
    if phi.is_empty() {
        return Err(Error::EmptyMultiset);
    }
    Dist::uniform(enum_acc_fiber(phi))
}

/// The deterministic channel `acc : X^K → M[K](X)`.
pub fn acc_channel<T: Outcome>(carrier: &Carrier<T>, k: usize) -> Channel<Vec<T>, Multiset<T>> {
    Channel::lift(&enum_tuples(carrier, k), |seq| acc(seq))
}

/// `arr : M[K](X) ⇝ X^K`.
pub fn arr_channel<T: Outcome>(carrier: &Carrier<T>, k: usize) -> Result<Channel<Multiset<T>, Vec<T>>> {
    require_k(k)?;
    Channel::try_from_fn(&enum_msets(carrier, k), arr)
}

/// Tuple permutation: each sequence goes to the uniform mixture of its
/// `K!` position permutations.
pub fn tp<T: Outcome>(carrier: &Carrier<T>, k: usize) -> Result<Channel<Vec<T>, Vec<T>>> {
    require_k(k)?;
    let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
    let w = Prob::one() / int(perms.len());
    Ok(Channel::from_fn(&enum_tuples(carrier, k), |seq| {
        Dist::from_terms(
            perms
                .iter()
                .map(|pi| (pi.iter().map(|&i| seq[i].clone()).collect(), w.clone())),
        )
    }))
}

/// Every full-support distribution on `carrier` whose weights share a
/// denominator at most `max_den`, each listed once.
pub fn full_support_grid<T: Outcome>(carrier: &Carrier<T>, max_den: usize) -> Vec<Dist<T>> {
    fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 1 {
            return vec![vec![total]];
        }
        (1..=total.saturating_sub(parts - 1))
            .flat_map(|first| {
                compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }
    let n = carrier.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out: Vec<Dist<T>> = (n..=max_den)
        .flat_map(|den| compositions(den, n).into_iter().map(move |c| (den, c)))
        .map(|(den, c)| {
            Dist::new(
                carrier
                    .iter()
                    .zip(c)
                    .map(|(x, num)| (x.clone(), int(num) / int(den))),
            )
            .expect("weights sum to one")
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Checks that `acc` is sufficient for `iid` on each state: `tp ≫ iid =
/// iid`, the ket equation with `arr` as reverse channel, and both marginal
/// equations `arr ≫ mn = iid` and `acc ≫ iid = mn`.
pub fn verify_acc_sufficiency<T: Outcome>(
    carrier: &Carrier<T>,
    omegas: &[Dist<T>],
    k: usize,
) -> Result<Report> {
    require_k(k)?;
    let mut report = Report::new(format!("acc sufficient for iid, K={k}"));
    let tuples = enum_tuples(carrier, k);
    let msets = enum_msets(carrier, k);
    let acc_c = acc_channel(carrier, k);
    let arr_c = arr_channel(carrier, k)?;
    let tp_c = tp(carrier, k)?;
    let lhs_c = Channel::identity(&tuples).tuple(&acc_c)?;
    let rhs_c = arr_c.tuple(&Channel::identity(&msets))?;
    report.check_channels(
        "acc ∘ arr = id",
        "",
        &acc_c.after(&arr_c)?,
        &Channel::identity(&msets),
    );
    for omega in omegas {
        let scope = omega.canonical();
        let i = iid(omega, k)?;
        let m = multinomial(omega, k)?;
        report.check_dists("tp >> iid = iid", scope.clone(), &tp_c.push(&i)?, &i);
        report.check_dists(
            "<id, acc> >> iid = <arr, id> >> mn",
            scope.clone(),
            &lhs_c.push(&i)?,
            &rhs_c.push(&m)?,
        );
        report.check_dists("arr >> mn = iid", scope.clone(), &arr_c.push(&m)?, &i);
        report.check_dists("acc >> iid = mn", scope, &acc_c.push(&i)?, &m);
    }
    Ok(report)
}
