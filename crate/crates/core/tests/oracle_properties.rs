use ghz_swap::dense::{embed, invert_permutation, measure_ghz, permute, tensor, DenseState};
use ghz_swap::label::{
    classify_sghz, enumerate_basis, make_label, BitString, GhzLabel, HalfRelation, Sign,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn sign_strategy() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn label_strategy(max_m: usize) -> impl Strategy<Value = GhzLabel> {
    (2..=max_m, any::<u64>(), sign_strategy())
        .prop_map(|(m, raw, s)| GhzLabel::new(m, raw % (1u64 << (m - 1)), s).unwrap())
}

/// Random normalized state on 2..=max_n qubits.
fn dense_strategy(max_n: usize) -> impl Strategy<Value = DenseState> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map(
            "zero vector",
            move |raw| {
                let norm: f64 = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
                (norm > 1e-6).then(|| {
                    let amps = raw
                        .iter()
                        .map(|&(a, b)| Complex64::new(a / norm, b / norm))
                        .collect();
                    DenseState::new(n, amps).unwrap()
                })
            },
        )
    })
}

/// Random permutation of 1..=n.
fn perm_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=n).collect::<Vec<_>>()).prop_shuffle()
}

/// Independent SGHZ check on the rendered bitstring.
fn sghz_by_strings(label: GhzLabel) -> Option<HalfRelation> {
    let s = label.bits().to_string();
    if !s.len().is_multiple_of(2) {
        return None;
    }
    let (a, b) = s.split_at(s.len() / 2);
    let negated: String = b
        .chars()
        .map(|c| if c == '0' { '1' } else { '0' })
        .collect();
    if a == b {
        Some(HalfRelation::Equal)
    } else if a == negated {
        Some(HalfRelation::Negated)
    } else {
        None
    }
}

#[test]
fn basis_is_orthonormal_up_to_six_qubits() {
    for m in 2..=6 {
        let vecs: Vec<DenseState> = enumerate_basis(m)
            .unwrap()
            .into_iter()
            .map(|l| embed(l).unwrap())
            .collect();
        assert_eq!(vecs.len(), 1 << m);
        for (i, a) in vecs.iter().enumerate() {
            for (j, b) in vecs.iter().enumerate() {
                let ip = a.inner(b).unwrap();
                if i == j {
                    assert!((1.0 - ip.norm()).abs() < 1e-12);
                } else {
                    assert!(ip.norm() < 1e-12, "m={m}: <{i}|{j}> = {ip}");
                }
            }
        }
    }
}

#[test]
fn classification_matches_string_check() {
    for m in (2..=8).step_by(2) {
        for label in enumerate_basis(m).unwrap() {
            assert_eq!(
                classify_sghz(label).map(|s| s.half_relation()),
                sghz_by_strings(label),
                "{label}"
            );
        }
    }
    for label in enumerate_basis(5).unwrap() {
        assert!(classify_sghz(label).is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonicalization_is_idempotent(label in label_strategy(20)) {
        prop_assert_eq!(make_label(label.bits(), label.sign()).unwrap(), label);
    }

    #[test]
    fn negated_branch_gives_same_label(label in label_strategy(20)) {
        let flipped = make_label(label.bits().negate(), label.sign()).unwrap();
        prop_assert_eq!(flipped, label);
    }

    #[test]
    fn text_encoding_round_trips(label in label_strategy(40)) {
        prop_assert_eq!(label.to_string().parse::<GhzLabel>().unwrap(), label);
        let bitform = format!("GHZ({},{})", label.bits(), label.sign());
        prop_assert_eq!(bitform.parse::<GhzLabel>().unwrap(), label);
    }

    #[test]
    fn bitstring_split_concat(value in any::<u64>(), len in 2usize..40, at in 1usize..39) {
        prop_assume!(at < len);
        let b = BitString::new(value & ((1u64 << len) - 1), len).unwrap();
        let (h, t) = b.split_at(at);
        prop_assert_eq!(h.concat(t).unwrap(), b);
        prop_assert_eq!(b.negate().negate(), b);
    }

    #[test]
    fn permutation_round_trip_is_exact(
        (state, perm) in dense_strategy(8).prop_flat_map(|s| {
            let n = s.num_qubits();
            (Just(s), perm_strategy(n))
        })
    ) {
        let there = permute(&state, &perm).unwrap();
        let back = permute(&there, &invert_permutation(&perm)).unwrap();
        prop_assert_eq!(back, state);
    }

    #[test]
    fn probabilities_sum_to_one(
        (state, subset) in dense_strategy(10).prop_flat_map(|s| {
            let n = s.num_qubits();
            (Just(s), perm_strategy(n), 2..n.max(3))
        }).prop_filter_map("subset too large", |(s, perm, k)| {
            (k < s.num_qubits()).then(|| (s, perm[..k].to_vec()))
        })
    ) {
        let outcomes = measure_ghz(&state, &subset).unwrap();
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "total {}", total);
        for o in &outcomes {
            prop_assert!((o.post_state.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn ghz_products_conserve_probability(
        labels in prop::collection::vec(label_strategy(4), 2..4),
        shuffle in any::<u64>(),
    ) {
        let dense: Vec<_> = labels.iter().map(|&l| embed(l).unwrap()).collect();
        let product = tensor(&dense).unwrap();
        let n = product.num_qubits();
        prop_assume!(n <= 12);
        let k = 2 + (shuffle as usize) % (n - 2);
        let subset: Vec<usize> = (1..=n).rev().take(k).collect();
        let outcomes = measure_ghz(&product, &subset).unwrap();
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!((product.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lifted_post_states_are_orthogonal(
        (state, subset) in dense_strategy(7).prop_flat_map(|s| {
            let n = s.num_qubits();
            (Just(s), perm_strategy(n))
        }).prop_filter_map("need 3+ qubits", |(s, perm)| {
            (s.num_qubits() >= 3).then(|| (s, perm[..2].to_vec()))
        })
    ) {
        let outcomes = measure_ghz(&state, &subset).unwrap();
        let lifted: Vec<DenseState> = outcomes
            .iter()
            .map(|o| tensor(&[embed(o.outcome).unwrap(), o.post_state.clone()]).unwrap())
            .collect();
        for i in 0..lifted.len() {
            for j in i + 1..lifted.len() {
                prop_assert!(lifted[i].inner(&lifted[j]).unwrap().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn all_but_one_measurement_keeps_two_branches(label in label_strategy(8)) {
        prop_assume!(label.num_qubits() >= 3);
        let m = label.num_qubits();
        let state = embed(label).unwrap();
        let subset: Vec<usize> = (1..m).collect();
        let outcomes = measure_ghz(&state, &subset).unwrap();
        // measured bits follow B(d) restricted to the first m-1 particles
        let (head, _) = label.bits().split_at(m - 1);
        prop_assert_eq!(outcomes.len(), 2);
        for o in &outcomes {
            prop_assert_eq!(o.outcome.index(), head.value());
            prop_assert!((o.probability - 0.5).abs() < 1e-12);
        }
        let signs: Vec<Sign> = outcomes.iter().map(|o| o.outcome.sign()).collect();
        prop_assert_eq!(signs, vec![Sign::Plus, Sign::Minus]);
    }
}
