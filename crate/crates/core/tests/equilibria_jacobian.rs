use crnosc::equilibria::{equilibria_on_class, EquilibriumRecord, SolverOptions, StoichiometricClass};
use crnosc::hopf::octomolecular_bt_check;
use crnosc::jacobian::{is_saddle, jacobian_at, reduced_det_formula, reduced_jacobian};
use crnosc::network::{parse_network, MassActionSystem};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn finite_difference(sys: &MassActionSystem, x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut out = vec![vec![0.0; n]; n];
    for k in 0..n {
        let h = 1e-6 * x[k].max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let (fp, fm) = (sys.rhs(&xp).unwrap(), sys.rhs(&xm).unwrap());
        for i in 0..n {
            out[i][k] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobian_matches_finite_differences(
        k in prop::collection::vec(0.1f64..5.0, 3),
        x in prop::collection::vec(0.2f64..3.0, 4),
    ) {
        let net = parse_network("2X -> 3X; X + Y -> Z + W; Z + W -> Y").unwrap();
        let sys = MassActionSystem::from_f64(net, &k).unwrap();
        let j = jacobian_at(&sys, &x);
        let fd = finite_difference(&sys, &x);
        for i in 0..4 {
            for c in 0..4 {
                prop_assert!((j[i][c] - fd[i][c]).abs() < 1e-6 * (1.0 + j[i][c].abs()));
            }
        }
    }

    #[test]
    fn reduced_trace_and_det_are_eigen_invariants(k in prop::collection::vec(0.1f64..5.0, 3), y in 0.2f64..4.0) {
        // equilibria: κ1 x = κ2 y and κ2 x y = κ3 z w with z = w
        let net = parse_network("2X -> 3X; X + Y -> Z + W; Z + W -> Y").unwrap();
        let sys = MassActionSystem::from_f64(net, &k).unwrap();
        let x = k[1] * y / k[0];
        let z = (k[1] * x * y / k[2]).sqrt();
        let eq = EquilibriumRecord::from_state(&sys, &[x, y, z, z]);
        let rj = reduced_jacobian(&sys, &eq).unwrap();
        let r = rj.matrix.len();
        let m = DMatrix::from_fn(r, r, |i, c| rj.matrix[i][c]);
        let ev = m.complex_eigenvalues();
        let prod = ev.iter().fold(nalgebra::Complex::new(1.0, 0.0), |a, b| a * b);
        let sum: f64 = ev.iter().map(|e| e.re).sum();
        prop_assert!((prod.re - rj.det).abs() < 1e-9 * rj.det.abs().max(1.0));
        prop_assert!((sum - rj.trace).abs() < 1e-9 * rj.trace.abs().max(1.0));
    }
}

#[test]
fn four_species_saddle_certificates() {
    let net = parse_network("2X -> 3X; X + Y -> Z + W; Z + W -> Y").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for _ in 0..100 {
        let k: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..20.0)).collect();
        let sys = MassActionSystem::from_f64(net.clone(), &k).unwrap();
        // each equilibrium selects its own class; z/w ratio varies the class
        let y: f64 = rng.gen_range(0.1..10.0);
        let ratio: f64 = rng.gen_range(0.1..10.0);
        let x = k[1] * y / k[0];
        let zw = k[1] * x * y / k[2];
        let st = [x, y, (zw * ratio).sqrt(), (zw / ratio).sqrt()];
        assert!(sys.rhs(&st).unwrap().iter().all(|v| v.abs() < 1e-9 * zw.max(1.0) * k[1]));
        let eq = EquilibriumRecord::from_state(&sys, &st);
        let rj = reduced_jacobian(&sys, &eq).unwrap();
        assert!(rj.det < 0.0 && is_saddle(&rj));
        let f = reduced_det_formula(&sys, &eq).unwrap();
        assert!((f - rj.det).abs() < 1e-9 * rj.det.abs());
    }
}

#[test]
fn reversed_targets_saddle() {
    let net = parse_network("2X -> 3X; X + Y -> 0; Y -> 2Y").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..100 {
        let k: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..20.0)).collect();
        let sys = MassActionSystem::from_f64(net.clone(), &k).unwrap();
        let eq = crnosc::equilibria::planar_equilibrium(&sys).unwrap().unwrap();
        assert!(eq.relative_residual(&sys) < 1e-10);
        let rj = reduced_jacobian(&sys, &eq).unwrap();
        assert!(rj.det < 0.0 && is_saddle(&rj));
    }
}

#[test]
fn fold_equilibrium_counts() {
    let sys = MassActionSystem::unit(parse_network("X + Y -> 2Z; 2Z -> 2X; Z -> Y").unwrap());
    let opts = SolverOptions::default();
    let on = |c: f64| {
        let class = StoichiometricClass::from_laws(sys.network(), &[vec![1, 1, 1]], &[c]).unwrap();
        equilibria_on_class(&sys, &class, &opts).unwrap()
    };
    assert_eq!(on(1.0).len(), 0);
    let threshold = on(0.5 + 2f64.sqrt());
    assert_eq!(threshold.len(), 1);
    assert!(threshold[0].degenerate);
    // z = 1/2 and x = y = 1/√2 on the threshold class; a double root is only
    // located to about the square root of the residual tolerance
    let s = 0.5f64.sqrt();
    let x = &threshold[0].x_bar;
    assert!((x[0] - s).abs() < 1e-6 && (x[1] - s).abs() < 1e-6 && (x[2] - 0.5).abs() < 1e-8, "{x:?}");
    let two = on(3.0);
    assert_eq!(two.len(), 2);
    assert!(two.iter().all(|e| !e.degenerate && (e.x_bar[0] * e.x_bar[1] - 0.5).abs() < 1e-10));
}

#[test]
fn bogdanov_takens_point() {
    for (k2, c) in [(1.0, -1.0), (2.0, -3.0)] {
        let r = octomolecular_bt_check(k2, c, 1.0).unwrap();
        assert!(r.trace < 1e-9 && r.det < 1e-9, "{r:?}");
        let off = octomolecular_bt_check(k2, c, 1.05).unwrap();
        assert!(off.trace + off.det > 1e-3);
    }
}

#[test]
fn three_species_family_regimes() {
    let net = parse_network("X + Y -> 0; X + Z -> 2X; Y + Z -> 2Y + 2Z").unwrap();
    let opts = SolverOptions::default();
    let on = |k: [f64; 3], d: f64| {
        // rates in reaction order X+Z, X+Y, Y+Z
        let sys = MassActionSystem::from_f64(net.clone(), &[k[1], k[0], k[2]]).unwrap();
        let class = StoichiometricClass::from_laws(&net, &[vec![1, -1, 1]], &[d]).unwrap();
        let eqs = equilibria_on_class(&sys, &class, &opts).unwrap();
        (sys, eqs)
    };
    let (sys, eqs) = on([3.0, 1.0, 1.0], -1.0);
    assert_eq!(eqs.len(), 1);
    assert!(reduced_jacobian(&sys, &eqs[0]).unwrap().det > 0.0);
    assert!(on([3.0, 1.0, 1.0], 1.0).1.is_empty());
    let (sys, eqs) = on([1.0, 1.0, 1.0], 1.0);
    assert_eq!(eqs.len(), 1);
    assert!(is_saddle(&reduced_jacobian(&sys, &eqs[0]).unwrap()));
    assert!(on([1.0, 1.0, 1.0], -1.0).1.is_empty());
}
