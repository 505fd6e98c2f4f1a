//! Command line front end.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arith::{parse_rational, parse_rational_list};
use crate::channel::{disintegrate_state, Channel};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::ewens::{ewens_dist, size_dagger, stirling_dist, EwensParam};
use crate::msets::{enum_msets, enum_perms, enum_tuples, Carrier, Multiset};
use crate::outcome::{Outcome, Value};
use crate::partitions::{enum_partitions, ep, mc, pamn, smn, stk};
use crate::poisson::som_dagger;
use crate::seqmult::{arr, iid, multinomial};
use crate::suffcheck::{run_bundled, BundledCase, CaseConfig};
use crate::text::{channel_to_json, dist_to_json, labels_dist, pairs_dist, parse_dist, parse_outcome};

#[derive(Parser, Debug)]
#[command(
    name = "suffstat",
    version,
    about = "Exact discrete distributions, channels and sufficient statistics"
)]
pub struct Cli {
    /// Emit JSON instead of ket text
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a named distribution
    Eval(EvalArgs),
    /// Run a bundled sufficiency case; exits 1 on a counterexample
    Verify(VerifyArgs),
    /// List partitions, multisets, tuples or permutations
    Enumerate(EnumerateArgs),
    /// Bayesian inversion of a built-in function against a state
    Dagger(DaggerArgs),
    /// Conditional of the first component given the second
    Disintegrate(DisintegrateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum EvalFn {
    Iid,
    Multinomial,
    Smn,
    Pamn,
    Arr,
    Stk,
    Ep,
    Ewens,
    Stirling,
    SizeDagger,
    SomDagger,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    pub function: EvalFn,
    /// State over labels, e.g. "1/8|a> + 1/2|b> + 3/8|c>"
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Ewens parameter as p/q
    #[arg(long)]
    pub t: Option<String>,
    /// Multiset literal, e.g. {a:2,b:1}
    #[arg(long)]
    pub phi: Option<String>,
    /// Partition literal, e.g. {1:3,2:1}
    #[arg(long)]
    pub sigma: Option<String>,
    /// Comma separated labels
    #[arg(long)]
    pub carrier: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// acc-iid, mc-swapmn, size-ewens or sum-poisson
    pub case: String,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub carrier: Option<String>,
    /// Comma separated parameter values (t or lambda)
    #[arg(long, visible_aliases = ["lambda", "t"])]
    pub params: Option<String>,
    /// Truncation bound for sum-poisson
    #[arg(long)]
    pub trunc: Option<usize>,
    /// Largest denominator of the state grid
    #[arg(long)]
    pub max_den: Option<usize>,
    /// Number of random predicate pairs
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long, env = "SUFFSTAT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Enumerable {
    Partitions,
    Multisets,
    Tuples,
    Permutations,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    pub what: Enumerable,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub carrier: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Builtin {
    Identity,
    Acc,
    Mc,
    Size,
    Som,
    First,
    Second,
}

#[derive(Args, Debug)]
pub struct DaggerArgs {
    #[arg(long)]
    pub f: Builtin,
    #[arg(long)]
    pub omega: String,
}

#[derive(Args, Debug)]
pub struct DisintegrateArgs {
    /// State over pairs, e.g. "1/2|(a,0)> + 1/2|(b,1)>"
    #[arg(long)]
    pub joint: String,
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Usage(format!("--{flag} is required")))
}

fn carrier_or_default(text: &Option<String>) -> Result<Carrier> {
    match text {
        Some(t) => Carrier::parse(t),
        None => Ok(Carrier::letters(3)),
    }
}

fn parse_mset(text: &str) -> Result<Multiset> {
    match parse_outcome(text)? {
        Value::Mset(m) => Ok(m),
        v => Err(Error::Usage(format!("expected a multiset over labels, found {v}"))),
    }
}

fn apply_builtin(f: Builtin, x: &Value) -> Result<Value> {
    let bad = |what: &str| Error::Usage(format!("{what} is undefined at {x}"));
    match f {
        Builtin::Identity => Ok(x.clone()),
        Builtin::Acc => {
            let items = x.as_tuple().ok_or_else(|| bad("acc"))?;
            let labels = items
                .iter()
                .map(|v| v.as_label().map(str::to_string))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("acc"))?;
            Ok(Value::Mset(crate::msets::acc(&labels)))
        }
        Builtin::Mc => match x {
            Value::Mset(m) => Ok(Value::Part(mc(m)?)),
            _ => Err(bad("mc")),
        },
        Builtin::Size => match x {
            Value::Part(p) => Ok(Value::Nat(p.psize() as u64)),
            _ => Err(bad("size")),
        },
        Builtin::Som => {
            let items = x.as_tuple().ok_or_else(|| bad("som"))?;
            items
                .iter()
                .map(Value::as_nat)
                .sum::<Option<u64>>()
                .map(Value::Nat)
                .ok_or_else(|| bad("som"))
        }
        Builtin::First | Builtin::Second => {
            let i = usize::from(matches!(f, Builtin::Second));
            match x.as_tuple() {
                Some(items) if items.len() == 2 => Ok(items[i].clone()),
                _ => Err(Error::NotATuple(x.canonical(), i)),
            }
        }
    }
}

struct Out<'a> {
    json: bool,
    w: &'a mut dyn Write,
}

impl Out<'_> {
    fn dist<T: Outcome>(&mut self, d: &Dist<T>) -> Result<()> {
        if self.json {
            writeln!(self.w, "{}", dist_to_json(d))?;
        } else {
            writeln!(self.w, "{}", d.canonical())?;
        }
        Ok(())
    }

    fn channel<A: Outcome, B: Outcome>(&mut self, c: &Channel<A, B>) -> Result<()> {
        if self.json {
            writeln!(self.w, "{}", channel_to_json(c))?;
        } else {
            write!(self.w, "{c}")?;
        }
        Ok(())
    }

    fn list<T: Outcome>(&mut self, items: &[T]) -> Result<()> {
        if self.json {
            let text: Vec<String> = items.iter().map(Outcome::canonical).collect();
            writeln!(self.w, "{}", serde_json::to_string(&text).expect("strings serialise"))?;
        } else {
            for x in items {
                writeln!(self.w, "{}", x.canonical())?;
            }
        }
        Ok(())
    }
}

fn eval(args: &EvalArgs, out: &mut Out) -> Result<()> {
    let omega = || -> Result<Dist<String>> { labels_dist(&parse_dist(&required(&args.omega, "omega")?)?) };
    let k = || required(&args.k, "k");
    let t = || -> Result<EwensParam> { EwensParam::new(parse_rational(&required(&args.t, "t")?)?) };
    match args.function {
        EvalFn::Iid => out.dist(&iid(&omega()?, k()?)?),
        EvalFn::Multinomial => out.dist(&multinomial(&omega()?, k()?)?),
        EvalFn::Smn => out.dist(&smn(&omega()?, k()?)?),
        EvalFn::Pamn => out.dist(&pamn(&omega()?, k()?)?),
        EvalFn::Arr => out.dist(&arr(&parse_mset(&required(&args.phi, "phi")?)?)?),
        EvalFn::Stk => {
            let sigma = match parse_outcome(&required(&args.sigma, "sigma")?)? {
                Value::Part(p) => p,
                v => return Err(Error::Usage(format!("expected a partition, found {v}"))),
            };
            out.dist(&stk(&sigma, &carrier_or_default(&args.carrier)?)?)
        }
        EvalFn::Ep => {
            let phi = parse_mset(&required(&args.phi, "phi")?)?;
            out.dist(&ep(&phi, &carrier_or_default(&args.carrier)?)?)
        }
        EvalFn::Ewens => out.dist(&ewens_dist(k()?, &t()?)?),
        EvalFn::Stirling => out.dist(&stirling_dist(k()?, &t()?)?),
        EvalFn::SizeDagger => out.dist(&size_dagger(k()?, required(&args.n, "n")?)?),
        EvalFn::SomDagger => out.dist(&som_dagger(required(&args.n, "n")?, k()?)?),
    }
}

fn verify(args: &VerifyArgs, out: &mut Out) -> Result<i32> {
    let case: BundledCase = args.case.parse()?;
    let config = CaseConfig {
        k: args.k,
        carrier: args.carrier.as_deref().map(Carrier::parse).transpose()?,
        params: args.params.as_deref().map(parse_rational_list).transpose()?,
        trunc: args.trunc,
        max_den: args.max_den,
        seed: args.seed,
        random_pairs: args.pairs,
    };
    let report = run_bundled(case, &config)?;
    if out.json {
        writeln!(out.w, "{}", serde_json::to_string(&report).expect("report serialises"))?;
    } else {
        write!(out.w, "{report}")?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn enumerate(args: &EnumerateArgs, out: &mut Out) -> Result<()> {
    let carrier = carrier_or_default(&args.carrier)?;
    match args.what {
        Enumerable::Partitions => out.list(&enum_partitions(required(&args.k, "k")?)?),
        Enumerable::Multisets => out.list(&enum_msets(&carrier, required(&args.k, "k")?)),
        Enumerable::Tuples => out.list(&enum_tuples(&carrier, required(&args.k, "k")?)),
        Enumerable::Permutations => {
            let images: Vec<Vec<String>> = enum_perms(&carrier).iter().map(|p| p.images()).collect();
            out.list(&images)
        }
    }
}

fn dagger(args: &DaggerArgs, out: &mut Out) -> Result<()> {
    let omega = parse_dist(&args.omega)?;
    let f = Channel::try_from_fn(omega.support(), |x| apply_builtin(args.f, x).map(Dist::dirac))?;
    out.channel(&f.dagger(&omega)?)
}

fn disintegrate(args: &DisintegrateArgs, out: &mut Out) -> Result<()> {
    let joint = pairs_dist(&parse_dist(&args.joint)?)?;
    out.channel(&disintegrate_state(&joint))
}

/// Executes a parsed command and returns the process exit status.
pub fn run(cli: &Cli, w: &mut dyn Write) -> Result<i32> {
    let mut out = Out { json: cli.json, w };
    match &cli.command {
        Command::Eval(a) => eval(a, &mut out).map(|_| 0),
        Command::Verify(a) => verify(a, &mut out),
        Command::Enumerate(a) => enumerate(a, &mut out).map(|_| 0),
        Command::Dagger(a) => dagger(a, &mut out).map(|_| 0),
        Command::Disintegrate(a) => disintegrate(a, &mut out).map(|_| 0),
    }
}
