use crnosc::classify::{classify_trimolecular, expand_to_trimolecular, match_family, Periodic};
use crnosc::hopf::{octomolecular_network, theorem_verdict_planar};
use crnosc::network::{parse_system, standard_names, Complex, MassActionSystem, Rate, ReactionNetwork};
use crnosc::Q;
use crnosc::stoich::{dynamically_nontrivial, fourier_motzkin_nontrivial, kernel_cross, rank};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn complex(max: i64, n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0..=max, n).prop_filter("molecularity", move |v| v.iter().sum::<i64>() <= max)
}

prop_compose! {
    fn network(n: usize)(rx in prop::collection::vec((complex(2, n), complex(3, n)), 3)
        .prop_filter("distinct ends", |rx| rx.iter().all(|(s, t)| s != t)))
        -> ReactionNetwork {
        let cx: Vec<(Complex, Complex)> =
            rx.into_iter().map(|(s, t)| (Complex::new(s).unwrap(), Complex::new(t).unwrap())).collect();
        ReactionNetwork::from_complexes(standard_names(n), &cx).unwrap()
    }
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    Q::new(BigInt::from(rng.gen_range(1..200i64)), BigInt::from(rng.gen_range(1..50i64)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn elimination_matches_cross_product(net in network(3)) {
        let fm = fourier_motzkin_nontrivial(&net);
        prop_assert!(fm.verify(&net));
        let fast = dynamically_nontrivial(&net);
        prop_assert!(fast.verify(&net));
        prop_assert_eq!(fm.nontrivial, fast.nontrivial);
        if rank(&net) == 2 {
            let u = kernel_cross(&net).unwrap();
            let positive = u.iter().all(|&v| v > 0) || u.iter().all(|&v| v < 0);
            prop_assert_eq!(positive, fm.nontrivial);
        }
    }

    #[test]
    fn planar_verdict_symmetric_under_swap(net in network(2)) {
        let v = theorem_verdict_planar(&net).unwrap();
        prop_assert!(v.is_consistent());
        let w = theorem_verdict_planar(&net.permute_species(&[1, 0])).unwrap();
        prop_assert_eq!(v.verdict, w.verdict);
    }

    #[test]
    fn classification_invariant_under_relabelling(net in network(3), sp in Just([2usize, 0, 1]), rx in Just([1usize, 2, 0])) {
        let a = classify_trimolecular(&net).unwrap();
        let relabelled = net.permute_species(&sp).permute_reactions(&rx);
        let b = classify_trimolecular(&relabelled).unwrap();
        prop_assert_eq!(a.admits_periodic, b.admits_periodic);
        prop_assert_eq!(net.canonical_key(), relabelled.canonical_key());
        prop_assert_eq!(match_family(&net).map(|t| t.family), match_family(&relabelled).map(|t| t.family));
    }

    #[test]
    fn exact_and_float_rhs_agree(net in network(3), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rates: Vec<Rate> = (0..3).map(|_| Rate::Exact(random_q(&mut rng))).collect();
        let sys = MassActionSystem::new(net, rates).unwrap();
        let xq: Vec<Q> = (0..3).map(|_| random_q(&mut rng)).collect();
        let xf: Vec<f64> = xq.iter().map(crnosc::network::q_to_f64).collect();
        let exact = sys.rhs_exact(&xq).unwrap();
        let float = sys.rhs(&xf).unwrap();
        for (e, f) in exact.iter().zip(&float) {
            let e = crnosc::network::q_to_f64(e);
            prop_assert!((e - f).abs() <= 1e-9 * e.abs().max(1.0));
        }
    }
}

fn expansion_preserves_rhs(sys: &MassActionSystem, seed: u64) {
    let big = expand_to_trimolecular(sys).unwrap();
    assert!(big.network().is_trimolecular());
    let n = sys.network().n_species();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let x: Vec<Q> = (0..n).map(|_| random_q(&mut rng)).collect();
        assert_eq!(sys.rhs_exact(&x).unwrap(), big.rhs_exact(&x).unwrap());
    }
}

#[test]
fn tetra_expansion_is_exact() {
    let sys = parse_system("2X -> 3X + Y @ 3/2; X + Y -> Y @ 2; Y -> 0 @ 5/7").unwrap();
    expansion_preserves_rhs(&sys, 1);
    let big = expand_to_trimolecular(&sys).unwrap();
    assert_eq!(big.network().n_reactions(), 4);
}

#[test]
fn octomolecular_expansion_multipliers() {
    let net = octomolecular_network();
    let k1: Q = Q::new(BigInt::from(7), BigInt::from(3));
    let rates = vec![Rate::Exact(k1.clone()), Rate::Exact(Q::from_integer(2.into())), Rate::Exact(Q::from_integer(5.into()))];
    let sys = MassActionSystem::new(net, rates).unwrap();
    expansion_preserves_rhs(&sys, 2);
    let big = expand_to_trimolecular(&sys).unwrap();
    let mut from_2x: Vec<(String, Q)> = (0..big.network().n_reactions())
        .filter(|&j| big.network().source(j).coeffs() == [2, 0, 0])
        .map(|j| (big.network().render_complex(&big.network().target(j)), big.rates()[j].to_exact().unwrap() / &k1))
        .collect();
    from_2x.sort();
    let mult = |v: i64| Q::from_integer(v.into());
    assert_eq!(
        from_2x,
        vec![("2X + Y".to_string(), mult(3)), ("2X + Z".to_string(), mult(1)), ("3X".to_string(), mult(2))]
    );
}

#[test]
fn lotka_family_verdicts() {
    for (s, expect) in [
        ("X -> 2X; X + Y -> 2Y; Y -> 0", Periodic::ForSomeKappa),
        ("X -> 3X; X + Y -> 3Y; Y -> 0", Periodic::ForSomeKappa),
        ("X -> 2X; X + Y -> 0; Y -> 2Y", Periodic::Never),
        ("2X -> 3X; X + Y -> 2Y; Y -> 0", Periodic::Never),
    ] {
        let net = crnosc::network::parse_network(s).unwrap();
        assert_eq!(classify_trimolecular(&net).unwrap().admits_periodic, expect, "{s}");
    }
}
