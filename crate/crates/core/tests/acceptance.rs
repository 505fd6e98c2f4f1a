//! End-to-end acceptance run. Every criterion is an exact rational
//! comparison; each prints one PASS or FAIL line and the process exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};

use num::{BigUint, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use suffstat::arith::{int, pow, ratio, Prob};
use suffstat::channel::{check_det_dagger_epi, check_disintegration, disintegrate, Channel};
use suffstat::ewens::EwensParam;
use suffstat::msets::{acc, enum_acc_fiber, enum_msets, enum_tuples, Carrier, Multiset};
use suffstat::partitions::{
    check_coefficient_identities, check_fiber_counts, enum_partitions, ep, ep_by_permutations, pamn, smn, Partition,
};
use suffstat::poisson::default_lambdas;
use suffstat::report::Report;
use suffstat::seqmult::{full_support_grid, multinomial};
use suffstat::suffcheck::{run_bundled, BundledCase, CaseConfig};
use suffstat::{Dist, Predicate};

type Verdict = Result<(), String>;
type Criterion = (&'static str, fn() -> Verdict);

fn s(x: &str) -> String {
    x.to_string()
}

fn ms(pairs: &[(&str, usize)]) -> Multiset {
    Multiset::from_counts(pairs.iter().map(|&(x, n)| (s(x), n)))
}

fn omega() -> Dist<String> {
    Dist::new([(s("a"), ratio(1, 8)), (s("b"), ratio(1, 2)), (s("c"), ratio(3, 8))]).unwrap()
}

/// Compares a distribution with a full table of expected weights.
fn expect_table<T: suffstat::Outcome>(what: &str, got: &Dist<T>, table: Vec<(T, Prob)>) -> Verdict {
    let expected: BTreeMap<T, Prob> = table.into_iter().collect();
    let total: Prob = expected.values().sum();
    if total != int(1) {
        return Err(format!("{what}: expected table sums to {total}"));
    }
    if got.len() != expected.len() {
        return Err(format!("{what}: {} outcomes, expected {}", got.len(), expected.len()));
    }
    for (x, p) in &expected {
        if &got.prob(x) != p {
            return Err(format!("{what}: {} has {}, expected {p}", x.canonical(), got.prob(x)));
        }
    }
    Ok(())
}

/// A report must pass and must contain every named check at least once.
fn expect_report(report: &Report, required: &[&str]) -> Verdict {
    if let Some(c) = report.failures().next() {
        return Err(format!(
            "{}: {} [{}] {}",
            report.title,
            c.name,
            c.scope,
            c.counterexample.clone().unwrap_or_default()
        ));
    }
    for name in required {
        let present = report.checks.iter().any(|c| c.name == *name || c.name.ends_with(&format!(": {name}")));
        if !present {
            return Err(format!("{}: no check named {name:?}", report.title));
        }
    }
    Ok(())
}

fn multinomial_example() -> Verdict {
    let got = multinomial(&omega(), 3).map_err(|e| e.to_string())?;
    expect_table(
        "multinomial",
        &got,
        vec![
            (ms(&[("a", 3)]), ratio(1, 512)),
            (ms(&[("a", 2), ("b", 1)]), ratio(3, 128)),
            (ms(&[("a", 1), ("b", 2)]), ratio(3, 32)),
            (ms(&[("b", 3)]), ratio(1, 8)),
            (ms(&[("a", 2), ("c", 1)]), ratio(9, 512)),
            (ms(&[("a", 1), ("b", 1), ("c", 1)]), ratio(9, 64)),
            (ms(&[("b", 2), ("c", 1)]), ratio(9, 32)),
            (ms(&[("a", 1), ("c", 2)]), ratio(27, 512)),
            (ms(&[("b", 1), ("c", 2)]), ratio(27, 128)),
            (ms(&[("c", 3)]), ratio(27, 512)),
        ],
    )
}

fn swapped_multinomial_example() -> Verdict {
    let got = smn(&omega(), 3).map_err(|e| e.to_string())?;
    let thirds = ratio(23, 384);
    let mixed = ratio(29, 256);
    expect_table(
        "smn",
        &got,
        vec![
            (ms(&[("a", 3)]), thirds.clone()),
            (ms(&[("a", 2), ("b", 1)]), mixed.clone()),
            (ms(&[("a", 1), ("b", 2)]), mixed.clone()),
            (ms(&[("b", 3)]), thirds.clone()),
            (ms(&[("a", 2), ("c", 1)]), mixed.clone()),
            (ms(&[("a", 1), ("b", 1), ("c", 1)]), ratio(9, 64)),
            (ms(&[("b", 2), ("c", 1)]), mixed.clone()),
            (ms(&[("a", 1), ("c", 2)]), mixed.clone()),
            (ms(&[("b", 1), ("c", 2)]), mixed),
            (ms(&[("c", 3)]), thirds),
        ],
    )
}

fn partition_multinomial_example() -> Verdict {
    let got = pamn(&omega(), 3).map_err(|e| e.to_string())?;
    let part = |pairs: &[(usize, usize)]| Partition::new(pairs.iter().copied()).unwrap();
    expect_table(
        "pamn",
        &got,
        vec![
            (part(&[(1, 3)]), ratio(9, 64)),
            (part(&[(1, 1), (2, 1)]), ratio(87, 128)),
            (part(&[(3, 1)]), ratio(23, 128)),
        ],
    )
}

fn ep_example() -> Verdict {
    let carrier = Carrier::letters(4);
    let phi = ms(&[("a", 2), ("b", 1), ("c", 1), ("d", 1)]);
    let quarter = ratio(1, 4);
    let table = vec![
        (ms(&[("a", 2), ("b", 1), ("c", 1), ("d", 1)]), quarter.clone()),
        (ms(&[("a", 1), ("b", 2), ("c", 1), ("d", 1)]), quarter.clone()),
        (ms(&[("a", 1), ("b", 1), ("c", 2), ("d", 1)]), quarter.clone()),
        (ms(&[("a", 1), ("b", 1), ("c", 1), ("d", 2)]), quarter),
    ];
    let direct = ep(&phi, &carrier).map_err(|e| e.to_string())?;
    expect_table("ep via the multiplicity count fiber", &direct, table.clone())?;
    let averaged = ep_by_permutations(&phi, &carrier).map_err(|e| e.to_string())?;
    expect_table("ep via permutations", &averaged, table)
}

fn bundled(case: BundledCase, config: CaseConfig, required: &[&str]) -> Verdict {
    let report = run_bundled(case, &config).map_err(|e| format!("{case}: {e}"))?;
    expect_report(&report, required)
}

fn acc_iid_sweep() -> Verdict {
    for n in [2, 3] {
        for k in 1..=4 {
            let config = CaseConfig {
                k: Some(k),
                carrier: Some(Carrier::letters(n)),
                max_den: Some(8),
                ..Default::default()
            };
            bundled(
                BundledCase::AccIid,
                config,
                &[
                    "acc ∘ arr = id",
                    "tp >> iid = iid",
                    "arr >> mn = iid",
                    "acc >> iid = mn",
                    "r ∘ s = id",
                    "extracted conditional = reverse channel",
                ],
            )
            .map_err(|e| format!("|X|={n}, K={k}: {e}"))?;
        }
    }
    Ok(())
}

fn mc_swapmn_sweep() -> Verdict {
    for (n, k) in [(3, 2), (3, 3), (4, 3), (4, 4)] {
        let carrier = Carrier::letters(n);
        let config = CaseConfig {
            k: Some(k),
            carrier: Some(carrier.clone()),
            ..Default::default()
        };
        bundled(
            BundledCase::McSwapmn,
            config,
            &[
                "|mc⁻¹(σ)| = binom(n, σ)",
                "φ! = Π (i!)^mc(φ)(i)",
                "<φ> = <<mc(φ)>>",
                "extracted conditional = reverse channel",
                "r ∘ s = id",
            ],
        )
        .map_err(|e| format!("|X|={n}, K={k}: {e}"))?;
        let fibers = check_fiber_counts(&carrier).map_err(|e| e.to_string())?;
        expect_report(&fibers, &["|mc⁻¹(σ)| = binom(n, σ)"])?;
        for size in 1..=k {
            let identities = check_coefficient_identities(&carrier, size).map_err(|e| e.to_string())?;
            expect_report(&identities, &["φ! = Π (i!)^mc(φ)(i)", "<φ> = <<mc(φ)>>"])
                .map_err(|e| format!("|X|={n}, size {size}: {e}"))?;
        }
    }
    Ok(())
}

fn size_ewens_sweep() -> Verdict {
    let grid: Vec<Prob> = EwensParam::default_grid().iter().map(|t| t.value().clone()).collect();
    let expected = vec![ratio(1, 2), int(1), int(2), ratio(7, 3)];
    if grid != expected {
        return Err(format!("default t grid is {grid:?}"));
    }
    for k in 1..=6 {
        let config = CaseConfig {
            k: Some(k),
            params: Some(grid.clone()),
            ..Default::default()
        };
        bundled(
            BundledCase::SizeEwens,
            config,
            &[
                "D(psize)(ewens) = stirling",
                "psize ∘ pda = sda ∘ psize",
                "ewens[K+1] = pda >> ewens[K]",
                "stirling[K+1] = sda >> stirling[K]",
                "psize†_ewens = size†",
                "Σ [K,k] t^k = t^(K rising)",
                "extracted conditional = reverse channel",
            ],
        )
        .map_err(|e| format!("K={k}: {e}"))?;
    }
    Ok(())
}

fn sum_poisson_sweep() -> Verdict {
    let lambdas = default_lambdas();
    if lambdas != vec![ratio(1, 2), int(1), ratio(3, 2)] {
        return Err(format!("default lambda grid is {lambdas:?}"));
    }
    for k in 1..=3 {
        let config = CaseConfig {
            k: Some(k),
            params: Some(lambdas.clone()),
            trunc: Some(8),
            random_pairs: Some(20),
            ..Default::default()
        };
        let report = run_bundled(BundledCase::SumPoisson, &config).map_err(|e| e.to_string())?;
        expect_report(
            &report,
            &[
                "som ∘ som† = id",
                "Σ_{som⁻¹(n)} Π λ^k/k! = (Kλ)^n/n!",
                "conditional on som = n equals som†(n)",
                "conditional independent of λ",
                "Σ w · p · (som⪪q) = Σ W · (som†⪪p) · q",
            ],
        )
        .map_err(|e| format!("K={k}: {e}"))?;
        let pushforward = report.checks.iter().filter(|c| c.name == "Σ_{som⁻¹(n)} Π λ^k/k! = (Kλ)^n/n!").count();
        let adjoint = report
            .checks
            .iter()
            .filter(|c| c.name == "Σ w · p · (som⪪q) = Σ W · (som†⪪p) · q")
            .count();
        if pushforward != 9 * lambdas.len() || adjoint != 20 * lambdas.len() {
            return Err(format!("K={k}: {pushforward} pushforward and {adjoint} adjointness checks"));
        }
    }
    Ok(())
}

fn partition_numbers() -> Verdict {
    let expected = [1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
    for (k, &want) in (1..=10).zip(&expected) {
        let parts = enum_partitions(k).map_err(|e| e.to_string())?;
        if parts.len() != want {
            return Err(format!("K={k}: {} partitions, expected {want}", parts.len()));
        }
        if parts.iter().any(|p| p.psum() != k) {
            return Err(format!("K={k}: a partition has the wrong sum"));
        }
    }
    Ok(())
}

fn acc_fibers() -> Verdict {
    for n in 1..=4 {
        let carrier = Carrier::letters(n);
        for k in 1..=5 {
            let mut counts: BTreeMap<Multiset, usize> = BTreeMap::new();
            for seq in enum_tuples(&carrier, k) {
                *counts.entry(acc(&seq)).or_default() += 1;
            }
            let msets = enum_msets(&carrier, k);
            if msets.len() != counts.len() {
                return Err(format!("|X|={n}, K={k}: {} multisets, {} images", msets.len(), counts.len()));
            }
            let mut total = BigUint::zero();
            for phi in &msets {
                let fiber = enum_acc_fiber(phi);
                let coefm = phi.coefm();
                if BigUint::from(fiber.len()) != coefm || counts.get(phi) != Some(&fiber.len()) {
                    return Err(format!("fiber of {phi}: {} sequences, coefficient {coefm}", fiber.len()));
                }
                if fiber.iter().any(|seq| acc(seq) != *phi) {
                    return Err(format!("fiber of {phi} contains a foreign sequence"));
                }
                total += coefm;
            }
            if total != BigUint::from(n).pow(k as u32) {
                return Err(format!("|X|={n}, K={k}: coefficients sum to {total}"));
            }
        }
    }
    Ok(())
}

fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|f| {
                (0..m).map(move |y| {
                    let mut g = f.clone();
                    g.push(y);
                    g
                })
            })
            .collect()
    })
}

fn det_dagger_epi() -> Verdict {
    let mut checks = 0usize;
    for n in 1..=3 {
        let domain = Carrier::new(0..n).unwrap();
        let grid = full_support_grid(&domain, 8);
        for m in 1..=3 {
            for f in all_functions(n, m) {
                let lifted = Channel::lift(domain.iter(), |&x| f[x]);
                for prior in &grid {
                    let report = check_det_dagger_epi(&lifted, prior).map_err(|e| format!("{f:?}: {e}"))?;
                    expect_report(&report, &["f† >> D(f)(ω) = ω", "f ∘ f† = id", "(f† ∘ f)† = f† ∘ f"])
                        .map_err(|e| format!("f={f:?}: {e}"))?;
                    checks += report.checks.len();
                }
            }
        }
    }
    if checks == 0 {
        return Err("no functions were checked".into());
    }
    Ok(())
}

fn random_dist(rng: &mut ChaCha8Rng, support: &[usize]) -> Dist<usize> {
    loop {
        let weights: Vec<(usize, Prob)> = support.iter().map(|&x| (x, int(rng.random_range(0..=6)))).collect();
        if let Ok(d) = Dist::normalize(weights) {
            return d;
        }
    }
}

fn random_channel(rng: &mut ChaCha8Rng, domain: &[usize], codomain: &[usize]) -> Channel<usize, usize> {
    Channel::new(domain.iter().map(|&a| (a, random_dist(rng, codomain))))
}

fn validity_duality() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..200 {
        let xs: Vec<usize> = (0..rng.random_range(1..=4)).collect();
        let ys: Vec<usize> = (0..rng.random_range(1..=4)).collect();
        let c = random_channel(&mut rng, &xs, &ys);
        let w = random_dist(&mut rng, &xs);
        let q = Predicate::random(&ys, 12, &mut rng);
        let pushed = c.push(&w).map_err(|e| e.to_string())?;
        let lhs = pushed.validity(&q).map_err(|e| e.to_string())?;
        let pulled = c.pull(&q).map_err(|e| e.to_string())?;
        let rhs = w.validity(&pulled).map_err(|e| e.to_string())?;
        // Brute force Σ_x ω(x) Σ_y c(x)(y) q(y).
        let brute: Prob = xs
            .iter()
            .map(|x| w.prob(x) * ys.iter().map(|y| c.get(x).unwrap().prob(y) * q.value(y).unwrap()).sum::<Prob>())
            .sum();
        if lhs != rhs || lhs != brute {
            return Err(format!("round {round}: {lhs} vs {rhs} vs {brute}"));
        }
    }
    Ok(())
}

fn update_increases_validity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut updated = 0;
    for round in 0..200 {
        let xs: Vec<usize> = (0..rng.random_range(1..=5)).collect();
        let w = random_dist(&mut rng, &xs);
        let p = Predicate::random(&xs, 12, &mut rng);
        let before = w.validity(&p).map_err(|e| e.to_string())?;
        if before.is_zero() {
            if w.update(&p).is_ok() {
                return Err(format!("round {round}: update on zero validity succeeded"));
            }
            continue;
        }
        let posterior = w.update(&p).map_err(|e| e.to_string())?;
        let after = posterior.validity(&p).map_err(|e| e.to_string())?;
        if after < before {
            return Err(format!("round {round}: {after} < {before}"));
        }
        // Σ ω p² / Σ ω p, the closed form of the updated validity.
        let squares: Prob = xs.iter().map(|x| w.prob(x) * pow(p.value(x).unwrap(), 2)).sum();
        if after != squares / &before {
            return Err(format!("round {round}: updated validity {after} off the closed form"));
        }
        updated += 1;
    }
    if updated == 0 {
        return Err("every sampled predicate had zero validity".into());
    }
    Ok(())
}

fn disintegration() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for round in 0..10 {
        let params: Vec<usize> = (0..rng.random_range(1..=3)).collect();
        let xs: Vec<usize> = (0..rng.random_range(1..=3)).collect();
        let ys: Vec<usize> = (0..rng.random_range(1..=3)).collect();
        let pairs: Vec<usize> = (0..xs.len() * ys.len()).collect();
        let flat = random_channel(&mut rng, &params, &pairs);
        let joint = Channel::new(flat.rows().map(|(a, d)| {
            let d = d.map(|&i| (xs[i / ys.len()], ys[i % ys.len()]));
            (*a, d)
        }));
        let d = disintegrate(&joint);
        let report = check_disintegration(&joint, &d);
        expect_report(&report, &["c(a) = <d(a,-), id> >> c(a)_Y"]).map_err(|e| format!("round {round}: {e}"))?;
        if report.checks.len() != params.len() {
            return Err(format!("round {round}: {} of {} rows checked", report.checks.len(), params.len()));
        }
    }
    Ok(())
}

fn property_suites() -> Verdict {
    acc_fibers().map_err(|e| format!("acc fibers: {e}"))?;
    det_dagger_epi().map_err(|e| format!("deterministic dagger epi: {e}"))?;
    validity_duality().map_err(|e| format!("validity duality: {e}"))?;
    update_increases_validity().map_err(|e| format!("update: {e}"))?;
    disintegration().map_err(|e| format!("disintegration: {e}"))
}

fn run_cli(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_suffstat"))
        .args(args)
        .env_remove("SUFFSTAT_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), stdout))
}

fn cli_golden() -> Verdict {
    let state = "1/8|a>+1/2|b>+3/8|c>";
    let goldens: [(&[&str], &str); 3] = [
        (
            &["eval", "pamn", "--omega", state, "--k", "3"],
            "9/64|{1:3}> + 87/128|{1:1,2:1}> + 23/128|{3:1}>\n",
        ),
        (
            &["eval", "multinomial", "--omega", state, "--k", "3"],
            "1/512|{a:3}> + 3/128|{a:2,b:1}> + 9/512|{a:2,c:1}> + 3/32|{a:1,b:2}> + 9/64|{a:1,b:1,c:1}> + \
             27/512|{a:1,c:2}> + 1/8|{b:3}> + 9/32|{b:2,c:1}> + 27/128|{b:1,c:2}> + 27/512|{c:3}>\n",
        ),
        (
            &["enumerate", "partitions", "--k", "4"],
            "{1:4}\n{1:2,2:1}\n{1:1,3:1}\n{2:2}\n{4:1}\n",
        ),
    ];
    for (args, expected) in goldens {
        let (code, stdout) = run_cli(args)?;
        if code != 0 || stdout != expected {
            return Err(format!("{}: exit {code}, output {stdout:?}", args.join(" ")));
        }
    }
    let verifies: [&[&str]; 5] = [
        &["verify", "acc-iid", "--k", "3", "--carrier", "a,b,c"],
        &["verify", "mc-swapmn"],
        &["verify", "size-ewens"],
        &["verify", "sum-poisson"],
        &["--json", "verify", "size-ewens", "--k", "3"],
    ];
    for args in verifies {
        let (code, stdout) = run_cli(args)?;
        if code != 0 {
            return Err(format!("{}: exit {code}\n{stdout}", args.join(" ")));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("multinomial worked example", multinomial_example),
        ("swapped multinomial worked example", swapped_multinomial_example),
        ("partition multinomial worked example", partition_multinomial_example),
        ("draw-permute example over four letters", ep_example),
        ("acc sufficient for iid", acc_iid_sweep),
        ("mc sufficient for the swapped multinomial", mc_swapmn_sweep),
        ("psize sufficient for Ewens", size_ewens_sweep),
        ("som sufficient for the Poisson product", sum_poisson_sweep),
        ("partition numbers", partition_numbers),
        ("property suites", property_suites),
        ("CLI golden output", cli_golden),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|m| m.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(()) => println!("PASS criterion {}: {title}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {}: {title}: {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
