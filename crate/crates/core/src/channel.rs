//! Channels `A ⇝ B` as finite kernels: Kleisli composition, tensor and
//! tuple, predicate transformation, Bayesian inversion (dagger) and the
//! split-idempotent and disintegration checks built on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Zero;

use crate::arith::Prob;
use crate::dist::{Dist, Predicate};
use crate::error::{Error, Result};
use crate::outcome::Outcome;
use crate::report::Report;

/// A kernel assigning a distribution over `B` to every element of a finite
/// domain, together with a codomain carrier containing every support.
#[derive(Clone, Debug)]
pub struct Channel<A: Ord, B: Ord> {
    kernel: BTreeMap<A, Dist<B>>,
    codomain: BTreeSet<B>,
}

/// Channels are equal when their kernels agree row by row; declared
/// codomains are not compared.
impl<A: Ord, B: Ord> PartialEq for Channel<A, B> {
    fn eq(&self, other: &Self) -> bool {
        self.kernel == other.kernel
    }
}

impl<A: Ord, B: Ord> Eq for Channel<A, B> {}

impl<A: Outcome, B: Outcome> Channel<A, B> {
    /// Builds a channel from its rows; the codomain is the union of the
    /// row supports.
    pub fn new<I: IntoIterator<Item = (A, Dist<B>)>>(rows: I) -> Self {
        let kernel: BTreeMap<A, Dist<B>> = rows.into_iter().collect();
        let codomain = kernel
            .values()
            .flat_map(|d| d.support().cloned())
            .collect();
        Channel { kernel, codomain }
    }

    pub fn from_fn<'a, I>(domain: I, f: impl Fn(&A) -> Dist<B>) -> Self
    where
        I: IntoIterator<Item = &'a A>,
        A: 'a,
    {
        Self::new(domain.into_iter().map(|a| (a.clone(), f(a))))
    }

    pub fn try_from_fn<'a, I>(domain: I, f: impl Fn(&A) -> Result<Dist<B>>) -> Result<Self>
    where
        I: IntoIterator<Item = &'a A>,
        A: 'a,
    {
        let rows = domain
            .into_iter()
            .map(|a| Ok((a.clone(), f(a)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(rows))
    }

    /// The deterministic channel `x ↦ 1|f(x)⟩`.
    pub fn lift<'a, I>(domain: I, f: impl Fn(&A) -> B) -> Self
    where
        I: IntoIterator<Item = &'a A>,
        A: 'a,
    {
        Self::from_fn(domain, |a| Dist::dirac(f(a)))
    }

    /// Declares a larger codomain carrier.
    pub fn with_codomain<I: IntoIterator<Item = B>>(mut self, codomain: I) -> Result<Self> {
        let codomain: BTreeSet<B> = codomain.into_iter().collect();
        if let Some(y) = self.codomain.iter().find(|y| !codomain.contains(*y)) {
            return Err(Error::CodomainTooSmall(y.canonical()));
        }
        self.codomain = codomain;
        Ok(self)
    }

    pub fn domain(&self) -> impl Iterator<Item = &A> + '_ {
        self.kernel.keys()
    }

    pub fn domain_len(&self) -> usize {
        self.kernel.len()
    }

    pub fn codomain(&self) -> &BTreeSet<B> {
        &self.codomain
    }

    pub fn rows(&self) -> impl Iterator<Item = (&A, &Dist<B>)> + '_ {
        self.kernel.iter()
    }

    pub fn get(&self, a: &A) -> Result<&Dist<B>> {
        self.kernel
            .get(a)
            .ok_or_else(|| Error::DomainMismatch(a.canonical()))
    }

    pub fn is_deterministic(&self) -> bool {
        self.kernel.values().all(Dist::is_dirac)
    }

    /// For a deterministic channel, the unique output at `a`.
    pub fn image_of(&self, a: &A) -> Result<&B> {
        let d = self.get(a)?;
        if !d.is_dirac() {
            return Err(Error::NotDeterministic(a.canonical()));
        }
        Ok(d.support().next().expect("dirac has one outcome"))
    }

    /// State transformation `c ≫ ω`.
    pub fn push(&self, omega: &Dist<A>) -> Result<Dist<B>> {
        let mut terms = Vec::new();
        for (x, w) in omega.iter() {
            for (y, v) in self.get(x)?.iter() {
                terms.push((y.clone(), w * v));
            }
        }
        Ok(Dist::from_terms(terms))
    }

    /// Kleisli composition `self ∘· first`.
    pub fn after<Z: Outcome>(&self, first: &Channel<Z, A>) -> Result<Channel<Z, B>> {
        if let Some(y) = first.codomain.iter().find(|y| !self.kernel.contains_key(*y)) {
            return Err(Error::DomainMismatch(y.canonical()));
        }
        let rows = first
            .kernel
            .iter()
            .map(|(z, d)| Ok((z.clone(), self.push(d)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Channel::new(rows);
        out.codomain.extend(self.codomain.iter().cloned());
        Ok(out)
    }

    /// Parallel product `self ⊗ other`.
    pub fn tensor<C: Outcome, D: Outcome>(&self, other: &Channel<C, D>) -> Channel<(A, C), (B, D)> {
        let mut rows = Vec::new();
        for (a, da) in &self.kernel {
            for (c, dc) in &other.kernel {
                rows.push(((a.clone(), c.clone()), da.tensor(dc)));
            }
        }
        Channel::new(rows)
    }

    /// Tuple channel `⟨self, other⟩ = (self ⊗ other) ∘ Δ`.
    pub fn tuple<C: Outcome>(&self, other: &Channel<A, C>) -> Result<Channel<A, (B, C)>> {
        if !self.kernel.keys().eq(other.kernel.keys()) {
            let a = self
                .kernel
                .keys()
                .find(|a| !other.kernel.contains_key(*a))
                .or_else(|| other.kernel.keys().find(|a| !self.kernel.contains_key(*a)))
                .expect("key sets differ");
            return Err(Error::DomainsDiffer(a.canonical()));
        }
        Ok(Channel::new(self.kernel.iter().map(|(a, d)| {
            (a.clone(), d.tensor(&other.kernel[a]))
        })))
    }

    /// Predicate transformation `c ⪪ q`.
    pub fn pull(&self, q: &Predicate<B>) -> Result<Predicate<A>> {
        let mut values = BTreeMap::new();
        for (a, d) in &self.kernel {
            let mut v = Prob::zero();
            for (y, w) in d.iter() {
                v += w * q.value(y).ok_or_else(|| Error::MissingCarrier(y.canonical()))?;
            }
            values.insert(a.clone(), v);
        }
        Ok(Predicate::from_values_unchecked(values))
    }

    /// Bayesian inversion `c†_ω : B ⇝ A`. The pushforward `c ≫ ω` must
    /// give positive mass to every element of the codomain carrier.
    pub fn dagger(&self, prior: &Dist<A>) -> Result<Channel<B, A>> {
        let pushed = self.push(prior)?;
        if let Some(y) = self.codomain.iter().find(|y| !pushed.contains(*y)) {
            return Err(Error::NotFullSupport(y.canonical()));
        }
        let mut columns: BTreeMap<&B, Vec<(A, Prob)>> = BTreeMap::new();
        for (x, w) in prior.iter() {
            for (y, v) in self.kernel[x].iter() {
                columns
                    .entry(y)
                    .or_default()
                    .push((x.clone(), w * v / pushed.prob(y)));
            }
        }
        let rows = columns
            .into_iter()
            .map(|(y, terms)| (y.clone(), Dist::from_terms(terms)))
            .collect::<Vec<_>>();
        let support: Vec<A> = prior.support().cloned().collect();
        Channel::new(rows).with_codomain(support)
    }

    /// Restriction to the given domain elements.
    pub fn restrict<'a, I>(&self, domain: I) -> Result<Channel<A, B>>
    where
        I: IntoIterator<Item = &'a A>,
        A: 'a,
    {
        let rows = domain
            .into_iter()
            .map(|a| Ok((a.clone(), self.get(a)?.clone())))
            .collect::<Result<Vec<_>>>()?;
        Channel::new(rows).with_codomain(self.codomain.iter().cloned())
    }
}

impl<A: Outcome> Channel<A, A> {
    pub fn identity<'a, I>(domain: I) -> Self
    where
        I: IntoIterator<Item = &'a A>,
        A: 'a,
    {
        Self::lift(domain, A::clone)
    }
}

impl<A: Outcome, B: Outcome> fmt::Display for Channel<A, B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, d) in &self.kernel {
            writeln!(f, "{} -> {}", a.canonical(), d.canonical())?;
        }
        Ok(())
    }
}

/// Kleisli composition `d ∘· c`.
pub fn compose<X: Outcome, Y: Outcome, Z: Outcome>(
    d: &Channel<Y, Z>,
    c: &Channel<X, Y>,
) -> Result<Channel<X, Z>> {
    d.after(c)
}

/// Disintegrates a channel `c : A ⇝ X × Y` into `d : A × Y ⇝ X` by
/// conditioning each `c(a)` on its second component. Pairs `(a, y)` where
/// `y` has zero mass under `c(a)` are left out of the domain.
pub fn disintegrate<P: Outcome, X: Outcome, Y: Outcome>(
    c: &Channel<P, (X, Y)>,
) -> Channel<(P, Y), X> {
    let mut rows = Vec::new();
    for (a, joint) in c.rows() {
        let marginal = joint.second();
        let mut columns: BTreeMap<&Y, Vec<(X, Prob)>> = BTreeMap::new();
        for ((x, y), w) in joint.iter() {
            columns
                .entry(y)
                .or_default()
                .push((x.clone(), w / marginal.prob(y)));
        }
        for (y, terms) in columns {
            rows.push(((a.clone(), y.clone()), Dist::from_terms(terms)));
        }
    }
    Channel::new(rows)
}

/// Disintegrates a joint state `ω ∈ D(X × Y)` into `Y ⇝ X`.
pub fn disintegrate_state<X: Outcome, Y: Outcome>(joint: &Dist<(X, Y)>) -> Channel<Y, X> {
    let single = Channel::new([(0u64, joint.clone())]);
    Channel::new(
        disintegrate(&single)
            .rows()
            .map(|((_, y), d)| (y.clone(), d.clone())),
    )
}

/// Checks that `d` disintegrates `c`: for every `a`, copying the
/// `Y`-marginal of `c(a)` and reconstructing `X` through `d(a, -)` gives
/// back `c(a)`.
pub fn check_disintegration<P: Outcome, X: Outcome, Y: Outcome>(
    c: &Channel<P, (X, Y)>,
    d: &Channel<(P, Y), X>,
) -> Report {
    let mut report = Report::new("disintegration");
    for (a, joint) in c.rows() {
        let rebuilt: Result<Dist<(X, Y)>> = (|| {
            let mut terms = Vec::new();
            for (y, wy) in joint.second().iter() {
                for (x, wx) in d.get(&(a.clone(), y.clone()))?.iter() {
                    terms.push(((x.clone(), y.clone()), wy * wx));
                }
            }
            Ok(Dist::from_terms(terms))
        })();
        match rebuilt {
            Ok(r) => {
                report.check_dists("c(a) = <d(a,-), id> >> c(a)_Y", a.canonical(), joint, &r);
            }
            Err(e) => report.fail("c(a) = <d(a,-), id> >> c(a)_Y", a.canonical(), e.to_string()),
        }
    }
    report
}

/// Checks that a deterministic channel `f` is a dagger epi for `prior`:
/// `f† ≫ f(ω) = ω`, `f ∘· f† = id` and `(f† ∘· f)† = f† ∘· f`.
pub fn check_det_dagger_epi<A: Outcome, B: Outcome>(
    f: &Channel<A, B>,
    prior: &Dist<A>,
) -> Result<Report> {
    if let Some(a) = f.domain().find(|a| !f.get(a).map(Dist::is_dirac).unwrap_or(false)) {
        return Err(Error::NotDeterministic(a.canonical()));
    }
    let scope = prior.canonical();
    let mut report = Report::new("deterministic dagger epi");
    let pushed = f.push(prior)?;
    let fd = f.dagger(prior)?;
    report.check_dists("f† >> D(f)(ω) = ω", scope.clone(), &fd.push(&pushed)?, prior);
    let retract = f.after(&fd)?;
    let id = Channel::identity(fd.domain());
    report.check_channels("f ∘ f† = id", scope.clone(), &retract, &id);
    let e = fd.after(f)?;
    let e_dagger = e.dagger(prior)?;
    let e_on_support = e.restrict(prior.support())?;
    report.check_channels("(f† ∘ f)† = f† ∘ f", scope, &e_dagger, &e_on_support);
    Ok(report)
}

/// Checks `retraction ∘· section = id` and returns the idempotent
/// `section ∘· retraction`.
pub fn check_split_idempotent<A: Outcome, B: Outcome>(
    section: &Channel<B, A>,
    retraction: &Channel<A, B>,
) -> Result<(Report, Channel<A, A>)> {
    let mut report = Report::new("split idempotent");
    let rs = retraction.after(section)?;
    let id = Channel::identity(section.domain());
    report.check_channels("r ∘ s = id", "", &rs, &id);
    let e = section.after(retraction)?;
    let ee = e.after(&e)?;
    report.check_channels("e ∘ e = e", "", &ee, &e);
    Ok((report, e))
}

/// A parameterised family of states `c : P ⇝ X`, sampled at finitely many
/// parameters.
#[derive(Clone, Debug)]
pub struct StateFamily<P, X: Ord> {
    name: String,
    members: Vec<(P, Dist<X>)>,
}

impl<P: Clone + fmt::Display, X: Outcome> StateFamily<P, X> {
    pub fn new(
        name: impl Into<String>,
        params: impl IntoIterator<Item = P>,
        eval: impl Fn(&P) -> Result<Dist<X>>,
    ) -> Result<Self> {
        let members = params
            .into_iter()
            .map(|p| {
                let d = eval(&p)?;
                Ok((p, d))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StateFamily {
            name: name.into(),
            members,
        })
    }

    pub fn from_members(name: impl Into<String>, members: Vec<(P, Dist<X>)>) -> Self {
        StateFamily {
            name: name.into(),
            members,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = (&P, &Dist<X>)> + '_ {
        self.members.iter().map(|(p, d)| (p, d))
    }

    /// Every outcome reached by some member.
    pub fn carrier(&self) -> BTreeSet<X> {
        self.members
            .iter()
            .flat_map(|(_, d)| d.support().cloned())
            .collect()
    }

    pub fn param_labels(&self) -> Vec<String> {
        self.members.iter().map(|(p, _)| p.to_string()).collect()
    }
}
