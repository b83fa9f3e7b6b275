use std::collections::BTreeSet;

use crnosc::classify::{
    classify_slow, classify_trimolecular, enumerate_trimolecular, Family, Periodic, TrimolecularSpace,
};
use crnosc::network::{parse_network, standard_names, Complex, ReactionNetwork};

const PERIODIC: [&str; 16] = [
    "Y -> 0; X -> 2X; X + Y -> 2Y",
    "Y -> 0; X -> 2X; X + Y -> 3Y",
    "Y -> 0; X -> 3X; X + Y -> 2Y",
    "Y -> 0; X -> 3X; X + Y -> 3Y",
    "Z -> 0; Y + Z -> 2Z; X + Y -> X + 2Y",
    "Z -> 0; Y + Z -> 3Z; X + Y -> X + 2Y",
    "Z -> 2Z; Y + Z -> 2Y; X + Y -> X",
    "Z -> 2Z; Y + Z -> 3Y; X + Y -> X",
    "Z -> 3Z; Y + Z -> 2Y; X + Y -> X",
    "Z -> 3Z; Y + Z -> 3Y; X + Y -> X",
    "2Z -> 3Z; Y + Z -> X + 2Y; X + Y -> 0",
    "Y + Z -> Z; X + Z -> 2X + Z; X + Y -> 2Y",
    "Y + Z -> Z; X + Z -> 2X + Z; X + Y -> 3Y",
    "Y + Z -> 2Z; X + Z -> 2X; X + Y -> 2Y",
    "Z + W -> W; Y + Z -> 2Z; X + Y -> X + 2Y",
    "Z + W -> W; Y + Z -> 3Z; X + Y -> X + 2Y",
];

fn keys(nets: &[ReactionNetwork]) -> BTreeSet<Vec<i64>> {
    nets.iter().map(|n| n.canonical_key()).collect()
}

#[test]
fn sixteen_networks_up_to_four_species() {
    let report = enumerate_trimolecular(4).unwrap();
    let expected: Vec<ReactionNetwork> = PERIODIC.iter().map(|s| parse_network(s).unwrap()).collect();
    assert_eq!(report.periodic.len(), 16);
    assert_eq!(keys(&report.periodic), keys(&expected));
    let per: Vec<usize> = report.per_species.iter().map(|p| p.2).collect();
    assert_eq!(per, vec![0, 4, 10, 2]);

    let mut lotka = [0usize; 3];
    let mut others = vec![];
    for net in &report.periodic {
        let v = classify_trimolecular(net).unwrap();
        assert_eq!(v.admits_periodic, Periodic::ForSomeKappa);
        let trivial = net.trivial_species().len();
        match v.matched_family.unwrap().family {
            Family::GeneralisedLotka { c, d } => {
                assert!(c <= 2 && d <= 2);
                lotka[trivial] += 1;
            }
            f => others.push((f, trivial)),
        }
    }
    assert_eq!(lotka, [4, 8, 2]);
    others.sort_by_key(|o| o.0.name());
    assert_eq!(others, vec![(Family::Ivanova, 0), (Family::LiftedLva { d: 1 }, 0)]);
}

fn reactions(n: usize) -> Vec<(Vec<i64>, Vec<i64>)> {
    let complexes = |m: i64| -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|c: Vec<i64>| {
                    let used: i64 = c.iter().sum();
                    (0..=m - used).map(move |k| {
                        let mut d = c.clone();
                        d.push(k);
                        d
                    })
                })
                .collect();
        }
        out
    };
    let mut out = vec![];
    for s in complexes(2) {
        for t in complexes(3) {
            if s != t {
                out.push((s.clone(), t));
            }
        }
    }
    out
}

#[test]
fn two_species_brute_force_agrees() {
    let rx = reactions(2);
    assert_eq!(rx.len(), TrimolecularSpace::new(2).unwrap().n_reactions());
    let mut found = BTreeSet::new();
    let mut triples = 0u64;
    for a in 0..rx.len() {
        for b in a + 1..rx.len() {
            for c in b + 1..rx.len() {
                triples += 1;
                let cx: Vec<(Complex, Complex)> = [a, b, c]
                    .iter()
                    .map(|&j| (Complex::new(rx[j].0.clone()).unwrap(), Complex::new(rx[j].1.clone()).unwrap()))
                    .collect();
                let net = ReactionNetwork::from_complexes(standard_names(2), &cx).unwrap();
                if !net.trivial_species().is_empty() {
                    continue;
                }
                if classify_trimolecular(&net).unwrap().admits_periodic == Periodic::ForSomeKappa {
                    found.insert(net.canonical_key());
                }
            }
        }
    }
    let scan = TrimolecularSpace::new(2).unwrap().scan_all();
    assert_eq!(scan.counts.triples, triples);
    assert_eq!(found, scan.hits.keys().cloned().collect::<BTreeSet<_>>());
}

#[test]
fn slow_classifier_agrees_on_survivors() {
    for n in 2..=3 {
        let space = TrimolecularSpace::new(n).unwrap();
        let mut disagreements = vec![];
        for first in 0..space.n_reactions() {
            let part = space.scan_first(first, true);
            for idx in part.survivors {
                let net = space.network(idx);
                let fast = classify_trimolecular(&net).unwrap().admits_periodic == Periodic::ForSomeKappa;
                let slow = classify_slow(&net);
                if fast != slow.possibly_periodic {
                    disagreements.push((net.render(), slow.reason));
                }
            }
        }
        assert!(disagreements.is_empty(), "{n}: {disagreements:?}");
    }
}
