use proptest::prelude::*;

use suffstat::arith::{int, ratio, Prob};
use suffstat::channel::{check_split_idempotent, Channel};
use suffstat::ewens::{ewens_dist, stirling_dist, EwensParam};
use suffstat::msets::{acc, Carrier, Multiset};
use suffstat::partitions::{enum_partitions, mc, smn, smn_via_ep};
use suffstat::seqmult::{acc_channel, arr_channel, iid, multinomial};
use suffstat::text::{channel_from_json, channel_to_json, dist_from_json, dist_to_json, format_dist, parse_dist};
use suffstat::{Dist, Predicate, Value};

const LETTERS: [&str; 4] = ["a", "b", "c", "d"];

fn dist_from_weights(weights: &[u8]) -> Dist<String> {
    Dist::normalize(
        weights
            .iter()
            .zip(LETTERS)
            .map(|(&w, x)| (x.to_string(), int(w as usize))),
    )
    .unwrap()
}

/// Distributions on a prefix of `LETTERS`, with at least one positive weight.
fn state() -> impl Strategy<Value = Dist<String>> {
    prop::collection::vec(0u8..6, 1..=4)
        .prop_filter("some weight is positive", |w| w.iter().any(|&x| x > 0))
        .prop_map(|w| dist_from_weights(&w))
}

fn full_state(n: usize) -> impl Strategy<Value = Dist<String>> {
    prop::collection::vec(1u8..6, n).prop_map(|w| dist_from_weights(&w))
}

fn predicate_on(carrier: Vec<usize>) -> impl Strategy<Value = Predicate<usize>> {
    prop::collection::vec((0i64..=6, 1i64..=6), carrier.len()).prop_map(move |vals| {
        Predicate::new(
            carrier
                .iter()
                .zip(vals)
                .map(|(&x, (n, d))| (x, ratio(n.min(d), d))),
        )
        .unwrap()
    })
}

fn channel_between(n: usize, m: usize) -> impl Strategy<Value = Channel<usize, usize>> {
    prop::collection::vec(
        prop::collection::vec(0u8..4, m).prop_filter("nonzero row", |r| r.iter().any(|&x| x > 0)),
        n,
    )
    .prop_map(|rows| {
        Channel::new(rows.into_iter().enumerate().map(|(a, row)| {
            let d = Dist::normalize(row.into_iter().enumerate().map(|(b, w)| (b, int(w as usize)))).unwrap();
            (a, d)
        }))
    })
}

fn index_dist(n: usize) -> impl Strategy<Value = Dist<usize>> {
    prop::collection::vec(0u8..5, n)
        .prop_filter("nonzero", |w| w.iter().any(|&x| x > 0))
        .prop_map(|w| Dist::normalize(w.into_iter().enumerate().map(|(i, x)| (i, int(x as usize)))).unwrap())
}

fn multiset() -> impl Strategy<Value = Multiset> {
    prop::collection::vec((0usize..4, 1usize..4), 0..4)
        .prop_map(|pairs| Multiset::from_counts(pairs.into_iter().map(|(i, n)| (LETTERS[i].to_string(), n))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructed_dists_sum_to_one(w in state(), v in state()) {
        let total: Prob = w.iter().map(|(_, p)| p).sum();
        prop_assert_eq!(total, int(1));
        let tensor: Prob = w.tensor(&v).iter().map(|(_, p)| p).sum();
        prop_assert_eq!(tensor, int(1));
        let mapped: Prob = w.map(|x| usize::from(x == "a")).iter().map(|(_, p)| p).sum();
        prop_assert_eq!(mapped, int(1));
    }

    #[test]
    fn equality_is_pointwise(w in state(), v in state()) {
        let carrier: Vec<String> = LETTERS.iter().map(|x| x.to_string()).collect();
        let agree = carrier.iter().all(|x| {
            let p = Predicate::point(&carrier, x);
            w.validity(&p).unwrap() == v.validity(&p).unwrap()
        });
        prop_assert_eq!(agree, w == v);
    }

    #[test]
    fn multiset_map_is_a_functor(phi in multiset()) {
        prop_assert_eq!(phi.map(|x| x.clone()), phi.clone());
        let f = |x: &String| x.len() + usize::from(x == "b");
        let g = |n: &usize| n * 3;
        prop_assert_eq!(phi.map(f).map(g), phi.map(|x| g(&f(x))));
        prop_assert_eq!(phi.map(f).size(), phi.size());
    }

    #[test]
    fn acc_ignores_order(seq in prop::collection::vec(0usize..4, 0..7).prop_shuffle(), shift in 0usize..7) {
        let mut rotated = seq.clone();
        if !rotated.is_empty() {
            let by = shift % rotated.len();
            rotated.rotate_left(by);
        }
        let mut sorted = seq.clone();
        sorted.sort();
        prop_assert_eq!(acc(&seq), acc(&rotated));
        prop_assert_eq!(acc(&seq), acc(&sorted));
        prop_assert_eq!(acc(&seq).size(), seq.len());
    }

    #[test]
    fn kleisli_composition_is_associative(
        f in channel_between(3, 2),
        g in channel_between(2, 3),
        h in channel_between(3, 2),
    ) {
        let left = h.after(&g).unwrap().after(&f).unwrap();
        let right = h.after(&g.after(&f).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let id3 = Channel::identity(&[0usize, 1, 2]);
        let id2 = Channel::identity(&[0usize, 1]);
        prop_assert_eq!(f.after(&id3).unwrap(), f.clone());
        prop_assert_eq!(id2.after(&f).unwrap(), f);
    }

    #[test]
    fn push_pull_duality(
        c in channel_between(3, 4),
        w in index_dist(3),
        q in predicate_on(vec![0, 1, 2, 3]),
    ) {
        let lhs = c.push(&w).unwrap().validity(&q).unwrap();
        let rhs = w.validity(&c.pull(&q).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn update_makes_evidence_more_true(w in index_dist(4), p in predicate_on(vec![0, 1, 2, 3])) {
        let before = w.validity(&p).unwrap();
        match w.update(&p) {
            Ok(post) => prop_assert!(post.validity(&p).unwrap() >= before),
            Err(_) => prop_assert_eq!(before, int(0)),
        }
    }

    #[test]
    fn accumulated_iid_is_multinomial(w in state(), k in 1usize..=4) {
        let pushed = iid(&w, k).unwrap().map(|seq| acc(seq));
        prop_assert_eq!(pushed, multinomial(&w, k).unwrap());
    }

    #[test]
    fn multiplicity_counts_of_smn(w in full_state(3), k in 1usize..=3) {
        let direct = smn(&w, k).unwrap();
        prop_assert_eq!(&direct, &smn_via_ep(&w, k).unwrap());
        for (phi, p) in direct.iter() {
            let twin = phi.map(|x| match x.as_str() { "a" => "b".to_string(), "b" => "a".to_string(), o => o.to_string() });
            prop_assert_eq!(&direct.prob(&twin), p);
            prop_assert_eq!(mc(phi).unwrap().psum(), k);
        }
    }

    #[test]
    fn ket_text_round_trips(w in state()) {
        let text = format_dist(&w);
        let parsed = parse_dist(&text).unwrap();
        prop_assert_eq!(&parsed, &w.map(|x| Value::label(x.clone())));
        prop_assert_eq!(format_dist(&parsed), text);
    }

    #[test]
    fn multiset_kets_round_trip(w in full_state(2), k in 1usize..=3) {
        let m = multinomial(&w, k).unwrap();
        let text = format_dist(&m);
        let parsed = parse_dist(&text).unwrap();
        prop_assert_eq!(parsed, m.map(|phi| Value::from(phi.clone())));
    }

    #[test]
    fn json_round_trips(w in state(), c in channel_between(2, 3)) {
        let d = dist_from_json(&dist_to_json(&w)).unwrap();
        prop_assert_eq!(d, w.map(|x| Value::label(x.clone())));
        let back = channel_from_json(&channel_to_json(&c)).unwrap();
        prop_assert_eq!(channel_to_json(&back), channel_to_json(&c));
    }

    #[test]
    fn ewens_and_stirling_are_normalised(num in 1i64..12, den in 1i64..6, k in 1usize..=6) {
        let t = EwensParam::new(ratio(num, den)).unwrap();
        let e = ewens_dist(k, &t).unwrap();
        let total: Prob = e.iter().map(|(_, p)| p).sum();
        prop_assert_eq!(total, int(1));
        prop_assert_eq!(e.len(), enum_partitions(k).unwrap().len());
        let s = stirling_dist(k, &t).unwrap();
        prop_assert_eq!(s.iter().map(|(_, p)| p).sum::<Prob>(), int(1));
    }
}

#[test]
fn arrangement_split_idempotent_is_idempotent() {
    for n in 1..=3 {
        let carrier = Carrier::letters(n);
        for k in 1..=3 {
            let (report, e) = check_split_idempotent(&arr_channel(&carrier, k).unwrap(), &acc_channel(&carrier, k)).unwrap();
            assert!(report.passed(), "{report}");
            assert_eq!(e.after(&e).unwrap(), e);
        }
    }
}

#[test]
fn partitions_are_sorted_and_distinct() {
    for k in 1..=8 {
        let parts = enum_partitions(k).unwrap();
        assert!(parts.windows(2).all(|w| w[0] < w[1]));
        assert!(parts.iter().all(|p| p.psum() == k));
    }
}
