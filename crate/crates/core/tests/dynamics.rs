use crnosc::classify::match_family;
use crnosc::dynamics::*;
use crnosc::equilibria::{planar_equilibrium, EquilibriumRecord, StoichiometricClass};
use crnosc::network::{parse_network, MassActionSystem, ReactionNetwork};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sys(net: &ReactionNetwork, k: &[f64]) -> MassActionSystem {
    MassActionSystem::from_f64(net.clone(), k).unwrap()
}

fn decade(scale: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| scale * 10f64.powf(i as f64 / (n - 1) as f64)).collect()
}

fn lotka() -> ReactionNetwork {
    parse_network("X -> 2X; X + Y -> 2Y; Y -> 0").unwrap()
}

fn ivanova() -> ReactionNetwork {
    parse_network("X + Z -> 2X; X + Y -> 2Y; Y + Z -> 2Z").unwrap()
}

fn lifted() -> ReactionNetwork {
    parse_network("2X -> 3X; X + Y -> 2Y + Z; Y + Z -> 0").unwrap()
}

#[test]
fn lotka_centers_and_integrals() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let net = lotka();
    for _ in 0..10 {
        let k: Vec<f64> = (0..3).map(|_| rng.gen_range(0.3..3.0)).collect();
        let s = sys(&net, &k);
        let eq = planar_equilibrium(&s).unwrap().unwrap();
        let rm = return_map(&s, &eq, &decade(0.05 * eq.x_bar[0], 5), ReturnMapOptions::default()).unwrap();
        assert_eq!(classify_orbit_structure(&rm, 1e-6).unwrap(), OrbitStructure::Center, "{k:?}");
        let v = ConservedQuantity::for_family(&match_family(&net).unwrap(), &s).unwrap();
        let x0 = [1.5 * eq.x_bar[0], eq.x_bar[1]];
        let tr = integrate(&MassActionField::new(&s), &x0, 100.0, IntegratorOptions::default()).unwrap();
        assert!(v.drift(&tr) < 1e-6, "{}", v.drift(&tr));
        let lv = ConservedQuantity::lotka_volterra(&s).unwrap();
        assert!(lv.drift(&tr) < 1e-6);
    }
}

#[test]
fn ivanova_centers_and_integrals() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let net = ivanova();
    for _ in 0..10 {
        let k: Vec<f64> = (0..3).map(|_| rng.gen_range(0.3..3.0)).collect();
        let s = sys(&net, &k);
        // equilibria: κ1 z = κ2 y and κ2 x = κ3 z, scaled onto x + y + z = 3;
        // species are ordered X, Z, Y by first appearance
        let raw = [k[2] / k[1], 1.0, k[0] / k[1]];
        let t = 3.0 / raw.iter().sum::<f64>();
        let xb: Vec<f64> = raw.iter().map(|v| v * t).collect();
        assert!(s.rhs(&xb).unwrap().iter().all(|v| v.abs() < 1e-12));
        let eq = EquilibriumRecord::from_state(&s, &xb);
        let m = xb.iter().cloned().fold(f64::INFINITY, f64::min);
        let rm = return_map(&s, &eq, &decade(0.04 * m, 5), ReturnMapOptions::default()).unwrap();
        assert_eq!(classify_orbit_structure(&rm, 1e-6).unwrap(), OrbitStructure::Center, "{k:?}");
        let v = ConservedQuantity::for_family(&match_family(&net).unwrap(), &s).unwrap();
        let shift = 0.3 * m;
        let x0 = [xb[0] + shift, xb[1] - shift, xb[2]];
        let tr = integrate(&MassActionField::new(&s), &x0, 100.0, IntegratorOptions::default()).unwrap();
        assert!(v.drift(&tr) < 1e-6);
        assert!(ConservedQuantity::linear(vec![1.0, 1.0, 1.0]).drift(&tr) < 1e-8 * 3.0);
    }
}

fn lifted_on_unit_class(k: [f64; 3]) -> (MassActionSystem, EquilibriumRecord) {
    let net = lifted();
    let s = sys(&net, &k);
    let pp = predator_prey_transform(&s, 1.0).unwrap();
    let [v, w] = pp.equilibrium.unwrap();
    let eq = EquilibriumRecord::from_state(&s, &pp.to_state(v, w));
    assert!(eq.relative_residual(&s) < 1e-12);
    (s, eq)
}

#[test]
fn lifted_lva_trichotomy() {
    for (k, expect) in [
        ([1.0, 2.0, 3.0], OrbitStructure::Spiral(SpiralDirection::In)),
        ([1.0, 2.0, 2.0], OrbitStructure::Center),
        ([1.0, 3.0, 2.0], OrbitStructure::Spiral(SpiralDirection::Out)),
    ] {
        let (s, eq) = lifted_on_unit_class(k);
        let rm = return_map(&s, &eq, &decade(0.05 * eq.x_bar[0], 6), ReturnMapOptions::default()).unwrap();
        let got = classify_orbit_structure(&rm, 1e-5).unwrap();
        assert_eq!(got, expect, "{k:?}");
        if expect == OrbitStructure::Center {
            assert!(rm.max_relative_drift() < 1e-5);
        }
    }
}

#[test]
fn lifted_lyapunov_function_decreases() {
    let (s, eq) = lifted_on_unit_class([1.0, 2.0, 3.0]);
    let v = ConservedQuantity::for_family(&match_family(s.network()).unwrap(), &s).unwrap();
    let x0: Vec<f64> = {
        let mut x = eq.x_bar.clone();
        x[0] *= 1.5;
        x
    };
    let tr = integrate(&MassActionField::new(&s), &x0, 50.0, IntegratorOptions::default()).unwrap();
    let vals: Vec<f64> = tr.states.iter().map(|x| v.eval(x)).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    assert!(vals.last().unwrap() < &(vals[0] - 1e-3));
    // z − y is conserved
    assert!(ConservedQuantity::linear(vec![0.0, -1.0, 1.0]).drift(&tr) < 1e-8);
}

#[test]
fn predator_prey_coordinates_follow_the_flow() {
    let (s, eq) = lifted_on_unit_class([1.0, 2.0, 2.5]);
    let pp = predator_prey_transform(&s, 1.0).unwrap();
    let mut x0 = eq.x_bar.clone();
    x0[0] *= 1.2;
    let [v0, w0] = pp.to_vw(&x0);
    let taus: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
    let aug = integrate_grid(&pp.augmented(), &[v0, w0, 0.0], &taus, IntegratorOptions::default()).unwrap();
    let times: Vec<f64> = aug.states.iter().map(|s| s[2]).collect();
    let orig = integrate_grid(&MassActionField::new(&s), &x0, &times, IntegratorOptions::default()).unwrap();
    for (a, b) in aug.states.iter().zip(&orig.states) {
        let back = pp.to_state(a[0], a[1]);
        for (p, q) in back.iter().zip(b) {
            assert!((p - q).abs() < 1e-6 * q.abs().max(1.0), "{back:?} vs {b:?}");
        }
    }
}

#[test]
fn saddle_network_conserves_and_does_not_return() {
    let s = sys(&parse_network("2X -> 3X; X + Y -> Z + W; Z + W -> Y").unwrap(), &[2.0, 3.0, 5.0]);
    let x = 1.5;
    let zw: f64 = 3.0 * x / 5.0;
    let st = [x, 1.0, zw.sqrt(), zw.sqrt()];
    let tr = integrate(&MassActionField::new(&s), &[1.6, 1.0, st[2], st[3]], 5.0, IntegratorOptions::default()).unwrap();
    // Γᵀw = 0 for w = (0, 1, 1, 0) and (0, 1, 0, 1)
    assert!(ConservedQuantity::linear(vec![0.0, 1.0, 1.0, 0.0]).drift(&tr) < 1e-8);
    assert!(ConservedQuantity::linear(vec![0.0, 0.0, 1.0, -1.0]).drift(&tr) < 1e-8);
}

#[test]
fn focal_value_sign_matches_return_map() {
    // tetra d = 0 at its Hopf point: a negative focal value pulls small orbits in
    // by an amount cubic in the radius
    let s = sys(&parse_network("2X -> 3X + Y; X + Y -> Y; Y -> 0").unwrap(), &[1.0, 1.0, 1.0]);
    let eq = planar_equilibrium(&s).unwrap().unwrap();
    let radii = [0.01, 0.02, 0.03, 0.04, 0.05];
    let rm = return_map(&s, &eq, &radii, ReturnMapOptions { returns: 1, ..Default::default() }).unwrap();
    let d: Vec<f64> = rm.samples.iter().map(|x| x.radii_out[0] - x.r_in).collect();
    assert!(d.iter().all(|v| *v < 0.0));
    let ratio = d[1] / d[0];
    assert!((ratio - 8.0).abs() < 1.0, "{ratio}");
    assert_eq!(classify_orbit_structure(&rm, 1e-9).unwrap(), OrbitStructure::Spiral(SpiralDirection::In));
}

#[test]
fn tetra_cycle_grows_past_the_hopf_point() {
    let net = parse_network("2X -> 3X + Y; X + Y -> Y; Y -> 0").unwrap();
    let path = crnosc::hopf::KappaPath::parse("k1=t", 3).unwrap();
    let scan = hopf_amplitude_scan(&net, &path, 1.0, &[1.02, 1.04, 1.08], IntegratorOptions::default()).unwrap();
    assert!(scan.rows.iter().all(|r| r.radius.is_some() && r.slope.unwrap() < 1.0));
    assert!(scan.relative_residual < 0.1);
    let stable_side = hopf_amplitude_scan(&net, &path, 1.0, &[0.98, 0.96, 0.92], IntegratorOptions::default());
    assert!(stable_side.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn lotka_flow_is_reversible(k in prop::collection::vec(0.3f64..3.0, 3), f in prop::collection::vec(0.5f64..1.5, 2)) {
        let s = sys(&lotka(), &k);
        // starts within a factor 1.5 of the equilibrium (κ3/κ2, κ1/κ2)
        let x = [f[0] * k[2] / k[1], f[1] * k[0] / k[1]];
        let f = MassActionField::new(&s);
        let fw = integrate(&f, &x, 10.0, IntegratorOptions::default()).unwrap();
        let bw = integrate(&Reversed(&f), fw.last(), 10.0, IntegratorOptions::default()).unwrap();
        for (a, b) in bw.last().iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-6 * b.max(1.0));
        }
        prop_assert!(fw.states.iter().flatten().all(|v| *v >= 0.0));
    }

    #[test]
    fn class_restricted_flow_stays_on_class(k in prop::collection::vec(0.3f64..3.0, 3), c in 0.5f64..4.0) {
        let s = sys(&ivanova(), &k);
        let class = StoichiometricClass::from_laws(s.network(), &[vec![1, 1, 1]], &[c]).unwrap();
        let field = ClassRestricted::new(&s, &class).unwrap();
        let x0 = [c / 2.0, c / 4.0, c / 4.0];
        let s0 = field.coords().to_coords(&x0);
        let tr = integrate(&field, &s0, 20.0, IntegratorOptions::default()).unwrap();
        for st in &tr.states {
            let x = field.coords().to_state(st);
            prop_assert!((x.iter().sum::<f64>() - c).abs() < 1e-12 * c.max(1.0));
            prop_assert!(x.iter().all(|v| *v >= 0.0));
        }
    }
}
