//! Generic sufficiency checks for a parameterised family, a statistic and a
//! candidate reverse channel, plus the four bundled cases.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::Prob;
use crate::channel::{check_split_idempotent, Channel, StateFamily};
use crate::dist::{Dist, Predicate};
use crate::error::{Error, Result};
use crate::ewens::{
    ewens_dist, psize_channel, size_dagger_channel, verify_size_sufficiency, EwensParam,
};
use crate::msets::{acc, Carrier, Multiset};
use crate::outcome::Outcome;
use crate::partitions::{
    check_coefficient_identities, check_fiber_counts, mc, mc_channel, smn, stk_channel,
    verify_mc_sufficiency, Partition,
};
use crate::poisson::{
    default_lambdas, som, som_channel, som_dagger_channel, verify_sum_sufficiency, WeightVector,
};
use crate::report::Report;
use crate::seqmult::{
    acc_channel, arr_channel, full_support_grid, iid, verify_acc_sufficiency,
};

/// A family `c : A ⇝ X`, a statistic `s : X → Y` and a candidate reverse
/// channel `d : Y ⇝ X`.
pub struct SufficiencyCase<'a, P, X: Ord, Y: Ord> {
    pub name: String,
    pub family: StateFamily<P, X>,
    pub statistic: Box<dyn Fn(&X) -> Y + 'a>,
    pub reverse: Channel<Y, X>,
}

impl<'a, P: Clone + fmt::Display, X: Outcome, Y: Outcome> SufficiencyCase<'a, P, X, Y> {
    pub fn new(
        name: impl Into<String>,
        family: StateFamily<P, X>,
        statistic: impl Fn(&X) -> Y + 'a,
        reverse: Channel<Y, X>,
    ) -> Self {
        SufficiencyCase {
            name: name.into(),
            family,
            statistic: Box::new(statistic),
            reverse,
        }
    }

    fn x_carrier(&self) -> Vec<X> {
        let mut xs = self.family.carrier();
        xs.extend(self.reverse.codomain().iter().cloned());
        xs.into_iter().collect()
    }

    fn statistic_channel(&self, xs: &[X]) -> Channel<X, Y> {
        Channel::lift(xs, |x| (self.statistic)(x))
    }
}

/// The ket form: `⟨id, s⟩ ≫ c(a) = ⟨d, id⟩ ≫ D(s)(c(a))` for every sampled
/// parameter.
pub fn check_ket<P, X, Y>(case: &SufficiencyCase<'_, P, X, Y>) -> Report
where
    P: Clone + fmt::Display,
    X: Outcome,
    Y: Outcome,
{
    let mut report = Report::new(format!("{}: ket equation", case.name));
    let xs = case.x_carrier();
    let lhs_c = Channel::identity(&xs)
        .tuple(&case.statistic_channel(&xs))
        .expect("same domain");
    let ys: Vec<Y> = case.reverse.domain().cloned().collect();
    let rhs_c = case
        .reverse
        .tuple(&Channel::identity(&ys))
        .expect("same domain");
    for (a, omega) in case.family.members() {
        let lhs = lhs_c.push(omega).expect("family within carrier");
        let pushed = omega.map(|x| (case.statistic)(x));
        match rhs_c.push(&pushed) {
            Ok(rhs) => {
                report.check_dists("<id, s> >> c(a) = <d, id> >> D(s)(c(a))", a.to_string(), &lhs, &rhs);
            }
            Err(e) => report.fail("<id, s> >> c(a) = <d, id> >> D(s)(c(a))", a.to_string(), e.to_string()),
        }
    }
    report
}

/// Nonzero entries of a predicate.
fn nonzero<T: Outcome>(p: &Predicate<T>) -> Vec<(T, Prob)> {
    p.iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(x, v)| (x.clone(), v.clone()))
        .collect()
}

/// `ω ⊨ f & g`, summing only over the nonzero entries of `f`.
fn sparse_validity<T: Outcome>(omega: &Dist<T>, f: &[(T, Prob)], g: &Predicate<T>) -> Option<Prob> {
    let mut total = Prob::zero();
    for (x, v) in f {
        if omega.contains(x) {
            total += omega.prob(x) * v * g.value(x)?;
        }
    }
    Some(total)
}

/// The adjointness form `c(a) ⊨ p & (s ⪪ q) = D(s)(c(a)) ⊨ (d ⪪ p) & q`,
/// over all pairs of point predicates and `random_pairs` seeded random
/// predicate pairs with denominators at most 16.
pub fn check_pred<P, X, Y>(case: &SufficiencyCase<'_, P, X, Y>, seed: u64, random_pairs: usize) -> Report
where
    P: Clone + fmt::Display,
    X: Outcome,
    Y: Outcome,
{
    let mut report = Report::new(format!("{}: predicate adjointness", case.name));
    let xs = case.x_carrier();
    let stat = case.statistic_channel(&xs);
    let ys: Vec<Y> = stat
        .codomain()
        .iter()
        .chain(case.reverse.domain())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(&str, Predicate<X>, Predicate<Y>)> = Vec::new();
    for x in &xs {
        for y in &ys {
            pairs.push(("point predicates", Predicate::point(&xs, x), Predicate::point(&ys, y)));
        }
    }
    for _ in 0..random_pairs {
        let p = Predicate::random(&xs, 16, &mut rng);
        let q = Predicate::random(&ys, 16, &mut rng);
        pairs.push(("random predicates", p, q));
    }

    struct Prepared<'a, X: Ord, Y: Ord> {
        kind: &'a str,
        p: Vec<(X, Prob)>,
        q: Vec<(Y, Prob)>,
        s_pull_q: Predicate<X>,
        d_pull_p: Option<Predicate<Y>>,
    }
    let prepared: Vec<Prepared<X, Y>> = pairs
        .iter()
        .map(|(kind, p, q)| Prepared {
            kind,
            p: nonzero(p),
            q: nonzero(q),
            s_pull_q: stat.pull(q).expect("q covers the image of s"),
            d_pull_p: case.reverse.pull(p).ok(),
        })
        .collect();

    for (a, omega) in case.family.members() {
        let pushed = omega.map(|x| (case.statistic)(x));
        for kind in ["point predicates", "random predicates"] {
            let mut outcome: Result<(), String> = Ok(());
            let mut any = false;
            for (i, pp) in prepared.iter().enumerate().filter(|(_, pp)| pp.kind == kind) {
                any = true;
                let lhs = sparse_validity(omega, &pp.p, &pp.s_pull_q).expect("s ⪪ q covers X");
                let rhs = pp
                    .d_pull_p
                    .as_ref()
                    .and_then(|dp| sparse_validity(&pushed, &pp.q, dp));
                match rhs {
                    Some(rhs) if rhs == lhs => {}
                    Some(rhs) => {
                        outcome = Err(format!("pair {i}: {lhs} vs {rhs}"));
                        break;
                    }
                    None => {
                        outcome = Err(format!("pair {i}: reverse channel undefined on a reached value"));
                        break;
                    }
                }
            }
            if any {
                report.record(format!("c(a) ⊨ p & s⪪q = D(s)(c(a)) ⊨ d⪪p & q ({kind})"), a.to_string(), outcome);
            }
        }
    }
    report.note(format!("predicate seed {seed}, {random_pairs} random pairs"));
    report
}

/// Conditions each `c(a)` on every reached value `y` of the statistic and
/// checks that the result does not depend on `a`. On success the common
/// conditional is returned as a channel `Y ⇝ X`.
pub fn check_conditional_independence<P, X, Y>(
    family: &StateFamily<P, X>,
    statistic: impl Fn(&X) -> Y,
) -> Result<(Report, Option<Channel<Y, X>>)>
where
    P: Clone + fmt::Display,
    X: Outcome,
    Y: Outcome,
{
    let mut report = Report::new(format!("{}: conditional independence", family.name()));
    let xs: Vec<X> = family.carrier().into_iter().collect();
    let stat = Channel::lift(&xs, &statistic);
    let points: Vec<(Y, Predicate<X>)> = stat
        .codomain()
        .iter()
        .map(|y| {
            let q = Predicate::point(stat.codomain(), y);
            (y.clone(), stat.pull(&q).expect("point covers codomain"))
        })
        .collect();
    type Reference<X, Y> = (String, BTreeSet<Y>, Vec<(Y, Dist<X>)>);
    let mut first: Option<Reference<X, Y>> = None;
    for (a, omega) in family.members() {
        let reached: BTreeSet<Y> = omega.map(&statistic).support().cloned().collect();
        let mut rows = Vec::new();
        for (y, pulled) in points.iter().filter(|(y, _)| reached.contains(y)) {
            rows.push((y.clone(), omega.update(pulled)?));
        }
        match &first {
            None => first = Some((a.to_string(), reached, rows)),
            Some((a0, reached0, rows0)) => {
                if *reached0 != reached {
                    return Err(Error::SupportMismatch(format!("{a0} and {a}")));
                }
                let outcome = rows0.iter().zip(&rows).try_for_each(|((y, d0), (_, d))| {
                    crate::report::dist_diff(d0, d).map_err(|e| format!("y={}: {e}", y.canonical()))
                });
                report.record(format!("D(a,y) = D({a0},y)"), a.to_string(), outcome);
            }
        }
    }
    let extracted = first.map(|(_, _, rows)| Channel::new(rows));
    Ok(if report.passed() {
        (report, extracted)
    } else {
        (report, None)
    })
}

/// Verifies the split-idempotent premises `r ∘· s = id` and
/// `(s ∘· r) ≫ c(a) = c(a)`, then confirms sufficiency of `r` with reverse
/// channel `s` through [`check_ket`].
pub fn check_via_split_idempotent<P, X, Y>(
    family: &StateFamily<P, X>,
    section: &Channel<Y, X>,
    retraction: &Channel<X, Y>,
) -> Result<Report>
where
    P: Clone + fmt::Display,
    X: Outcome,
    Y: Outcome,
{
    if let Some(x) = retraction.domain().find(|x| !retraction.get(x).map(Dist::is_dirac).unwrap_or(false)) {
        return Err(Error::NotDeterministic(x.canonical()));
    }
    if let Some(x) = family.carrier().into_iter().find(|x| retraction.get(x).is_err()) {
        return Err(Error::DomainMismatch(x.canonical()));
    }
    let mut report = Report::new(format!("{}: split idempotent", family.name()));
    let (premises, e) = check_split_idempotent(section, retraction)?;
    report.absorb("", premises);
    for (a, omega) in family.members() {
        match e.push(omega) {
            Ok(pushed) => {
                report.check_dists("(s ∘ r) >> c(a) = c(a)", a.to_string(), &pushed, omega);
            }
            Err(err) => report.fail("(s ∘ r) >> c(a) = c(a)", a.to_string(), err.to_string()),
        }
    }
    let r = retraction.clone();
    let case = SufficiencyCase::new(
        family.name(),
        family.clone(),
        move |x: &X| r.image_of(x).expect("checked deterministic and total").clone(),
        section.clone(),
    );
    report.absorb("conclusion", check_ket(&case));
    Ok(report)
}

/// Runs every generic check on a case and compares the extracted
/// conditional with the candidate reverse channel.
pub fn check_case<P, X, Y>(
    case: &SufficiencyCase<'_, P, X, Y>,
    retraction: &Channel<X, Y>,
    seed: u64,
    random_pairs: usize,
) -> Result<Report>
where
    P: Clone + fmt::Display,
    X: Outcome,
    Y: Outcome,
{
    let mut report = Report::new(case.name.clone());
    let ket = check_ket(case);
    let pred = check_pred(case, seed, random_pairs);
    let agree = ket.passed() == pred.passed();
    report.absorb("", ket);
    report.absorb("", pred);
    report.record(
        "ket and predicate forms agree",
        "",
        if agree { Ok(()) } else { Err("verdicts differ".into()) },
    );
    let (ci, extracted) = check_conditional_independence(&case.family, &case.statistic)?;
    report.absorb("", ci);
    if let Some(d) = extracted {
        let reverse = case.reverse.restrict(d.domain())?;
        report.check_channels("extracted conditional = reverse channel", "", &d, &reverse);
        let feedback = SufficiencyCase::new(
            format!("{} (extracted)", case.name),
            case.family.clone(),
            |x: &X| (case.statistic)(x),
            d,
        );
        report.absorb("extracted", check_ket(&feedback));
    }
    let split = check_via_split_idempotent(&case.family, &case.reverse, retraction)?;
    report.absorb("", split);
    Ok(report)
}

/// The four bundled sufficiency cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BundledCase {
    AccIid,
    McSwapmn,
    SizeEwens,
    SumPoisson,
}

impl BundledCase {
    pub const ALL: [BundledCase; 4] = [
        BundledCase::AccIid,
        BundledCase::McSwapmn,
        BundledCase::SizeEwens,
        BundledCase::SumPoisson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BundledCase::AccIid => "acc-iid",
            BundledCase::McSwapmn => "mc-swapmn",
            BundledCase::SizeEwens => "size-ewens",
            BundledCase::SumPoisson => "sum-poisson",
        }
    }
}

impl fmt::Display for BundledCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BundledCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BundledCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = BundledCase::ALL.iter().map(|c| c.name()).collect();
                Error::Usage(format!("unknown case {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Settings for a bundled run. Unset fields take the case defaults.
#[derive(Clone, Debug, Default)]
pub struct CaseConfig {
    pub k: Option<usize>,
    pub carrier: Option<Carrier>,
    pub params: Option<Vec<Prob>>,
    pub trunc: Option<usize>,
    pub max_den: Option<usize>,
    pub seed: u64,
    pub random_pairs: Option<usize>,
}

fn degree_note(report: &mut Report, sampled: usize, degree: usize, what: &str) {
    let verdict = if sampled > degree { "meets" } else { "does not meet" };
    report.note(format!(
        "checked on {sampled} sampled parameters only; weights are rational functions of degree <= {degree} in {what}, \
         so agreement at {} points determines them; this grid {verdict} that bound (a methodological remark, not part of the sufficiency claim)",
        degree + 1
    ));
}

/// Runs a bundled case: its dedicated verifier followed by the generic
/// checks.
pub fn run_bundled(case: BundledCase, config: &CaseConfig) -> Result<Report> {
    let pairs = config.random_pairs.unwrap_or(20);
    let seed = config.seed;
    let no_params = |name: &str| -> Result<()> {
        if config.params.is_some() {
            return Err(Error::Usage(format!(
                "{name} sweeps the full-support grid and takes no --params"
            )));
        }
        Ok(())
    };
    let default_carrier = || Carrier::letters(3);
    match case {
        BundledCase::AccIid => {
            no_params(case.name())?;
            let k = config.k.unwrap_or(3);
            let carrier = config.carrier.clone().unwrap_or_else(default_carrier);
            let grid = full_support_grid(&carrier, config.max_den.unwrap_or(8));
            let mut report = Report::new(format!("acc-iid, |X|={}, K={k}", carrier.len()));
            report.absorb("", verify_acc_sufficiency(&carrier, &grid, k)?);
            let family = StateFamily::new("acc-iid", grid.clone(), |w| iid(w, k))?;
            let sc = SufficiencyCase::new("acc-iid", family, |x: &Vec<String>| acc(x), arr_channel(&carrier, k)?);
            report.absorb("", check_case(&sc, &acc_channel(&carrier, k), seed, pairs)?);
            degree_note(&mut report, grid.len(), k, "the weights of omega");
            Ok(report)
        }
        BundledCase::McSwapmn => {
            no_params(case.name())?;
            let k = config.k.unwrap_or(3);
            let carrier = config.carrier.clone().unwrap_or_else(default_carrier);
            let grid = full_support_grid(&carrier, config.max_den.unwrap_or(8));
            let mut report = Report::new(format!("mc-swapmn, |X|={}, K={k}", carrier.len()));
            report.absorb("", verify_mc_sufficiency(&grid, k)?);
            report.absorb("", check_fiber_counts(&carrier)?);
            report.absorb("", check_coefficient_identities(&carrier, k)?);
            let family = StateFamily::new("mc-swapmn", grid.clone(), |w| smn(w, k))?;
            let sc = SufficiencyCase::new(
                "mc-swapmn",
                family,
                |phi: &Multiset| mc(phi).expect("multisets of size K >= 1"),
                stk_channel(&carrier, k)?,
            );
            report.absorb("", check_case(&sc, &mc_channel(&carrier, k)?, seed, pairs)?);
            degree_note(&mut report, grid.len(), k, "the weights of omega");
            Ok(report)
        }
        BundledCase::SizeEwens => {
            let k = config.k.unwrap_or(4);
            let ts = match &config.params {
                Some(ps) => ps.iter().cloned().map(EwensParam::new).collect::<Result<Vec<_>>>()?,
                None => EwensParam::default_grid(),
            };
            let mut report = Report::new(format!("size-ewens, K={k}"));
            report.absorb("", verify_size_sufficiency(k, &ts)?);
            let family = StateFamily::new("size-ewens", ts.clone(), |t| ewens_dist(k, t))?;
            let sc = SufficiencyCase::new("size-ewens", family, Partition::psize, size_dagger_channel(k)?);
            report.absorb("", check_case(&sc, &psize_channel(k)?, seed, pairs)?);
            degree_note(&mut report, ts.len(), k, "t");
            Ok(report)
        }
        BundledCase::SumPoisson => {
            let k = config.k.unwrap_or(2);
            let bound = config.trunc.unwrap_or(8);
            let lambdas = config.params.clone().unwrap_or_else(default_lambdas);
            let mut report = Report::new(format!("sum-poisson, K={k}, N={bound}"));
            report.absorb("", verify_sum_sufficiency(k, &lambdas, bound, pairs, seed)?);
            let members = lambdas
                .iter()
                .map(|l| {
                    let wv = WeightVector::new(l.clone(), bound, k)?;
                    Ok((format!("lambda={l}"), wv.truncated_dist()))
                })
                .collect::<Result<Vec<_>>>()?;
            let family = StateFamily::from_members("sum-poisson", members);
            let sc = SufficiencyCase::new("sum-poisson", family, |v: &Vec<usize>| som(v), som_dagger_channel(bound, k)?);
            report.absorb("", check_case(&sc, &som_channel(bound, k), seed, pairs)?);
            degree_note(&mut report, lambdas.len(), bound, "lambda on the truncated region");
            Ok(report)
        }
    }
}
