//! Jacobians, the reduced Jacobian on the stoichiometric subspace and the
//! closed-form determinant and trace expressions.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::dense::{self, Mat};
use crate::equilibria::EquilibriumRecord;
use crate::error::{Error, Result};
use crate::linalg;
use crate::network::{powi, q_to_f64, qi, MassActionSystem, ReactionNetwork};
use crate::stoich;
use crate::Q;

/// Jacobian of the mass-action right-hand side at `x ≥ 0`.
pub fn jacobian_at(sys: &MassActionSystem, x: &[f64]) -> Mat {
    jacobian_with(sys.network(), &sys.kappa(), x)
}

pub fn jacobian_with(net: &ReactionNetwork, kappa: &[f64], x: &[f64]) -> Mat {
    let n = net.n_species();
    let mut jac = dense::zeros(n, n);
    for (j, &k) in kappa.iter().enumerate() {
        for l in 0..n {
            let e = net.source_entry(l, j);
            if e == 0 {
                continue;
            }
            // d/dx_l of κ x^a
            let mut d = k * e as f64 * powi(x[l], e - 1);
            for (i, &xi) in x.iter().enumerate() {
                if i != l {
                    d *= powi(xi, net.source_entry(i, j));
                }
            }
            for (i, row) in jac.iter_mut().enumerate() {
                let c = net.stoich_entry(i, j);
                if c != 0 {
                    row[l] += c as f64 * d;
                }
            }
        }
    }
    jac
}

/// Exact Jacobian at a rational point.
pub fn jacobian_exact(sys: &MassActionSystem, x: &[Q]) -> Result<Vec<Vec<Q>>> {
    let net = sys.network();
    let n = net.n_species();
    let mut jac = vec![vec![Q::zero(); n]; n];
    for j in 0..net.n_reactions() {
        let k = sys.rates()[j].to_exact().ok_or(Error::InexactRates)?;
        for l in 0..n {
            let e = net.source_entry(l, j);
            if e == 0 {
                continue;
            }
            let mut d = &k * qi(e) * num_traits::pow::pow(x[l].clone(), (e - 1) as usize);
            for (i, xi) in x.iter().enumerate() {
                if i != l {
                    d *= num_traits::pow::pow(xi.clone(), net.source_entry(i, j) as usize);
                }
            }
            for (i, row) in jac.iter_mut().enumerate() {
                let c = net.stoich_entry(i, j);
                if c != 0 {
                    row[l] += qi(c) * &d;
                }
            }
        }
    }
    Ok(jac)
}

/// `Γ̃` with `Γ = Γ̃ Γ_P` for the given privileged rows `P`.
pub fn gamma_tilde(net: &ReactionNetwork, rows: &[usize]) -> Option<Vec<Vec<Q>>> {
    let g = linalg::to_q(net.stoich_matrix());
    let m = net.n_reactions();
    let gp: Vec<Vec<Q>> = rows.iter().map(|&r| g[r].clone()).collect();
    if linalg::rank_q(&gp) != rows.len() {
        return None;
    }
    let gpt = linalg::transpose(&gp, m);
    g.iter().map(|row| linalg::solve(&gpt, row, rows.len())).collect()
}

/// Reduced Jacobian at an equilibrium of a rank-two network.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedJacobian {
    pub privileged: Vec<usize>,
    pub gamma_tilde: Vec<Vec<Q>>,
    pub matrix: Mat,
    pub det: f64,
    pub trace: f64,
    /// Exact determinant and trace when the equilibrium and rates are rational.
    pub exact: Option<(Q, Q)>,
}

impl ReducedJacobian {
    pub fn det_sign(&self) -> i32 {
        match &self.exact {
            Some((d, _)) => {
                if d.is_positive() {
                    1
                } else if d.is_negative() {
                    -1
                } else {
                    0
                }
            }
            None => {
                if self.det > 0.0 {
                    1
                } else if self.det < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }
}

pub fn reduced_jacobian(sys: &MassActionSystem, eq: &EquilibriumRecord) -> Result<ReducedJacobian> {
    let rows = stoich::row_basis(sys.network());
    reduced_jacobian_with_basis(sys, eq, &rows)
}

/// Reduced Jacobian `Γ_P Δ_v Γ_l^T Δ_{1/x̄} Γ̃` with `v = κ∘x̄^{Γ_l^T} = μu`.
pub fn reduced_jacobian_with_basis(
    sys: &MassActionSystem,
    eq: &EquilibriumRecord,
    rows: &[usize],
) -> Result<ReducedJacobian> {
    let net = sys.network();
    if rows.len() != 2 || stoich::rank(net) != 2 {
        return Err(Error::Precondition("reduced Jacobian needs a rank-two network".into()));
    }
    let gt = gamma_tilde(net, rows).ok_or_else(|| Error::Precondition("rows are not a basis".into()))?;
    let x = &eq.x_bar;
    let n = net.n_species();
    let m = net.n_reactions();
    let mut v = vec![0.0; m];
    sys.reaction_rates(x, &mut v);
    let gtf: Vec<Vec<f64>> = gt.iter().map(|r| r.iter().map(q_to_f64).collect()).collect();
    let mut matrix = dense::zeros(2, 2);
    for (p, &row) in rows.iter().enumerate() {
        for k in 0..2 {
            let mut acc = 0.0;
            for j in 0..m {
                let c = net.stoich_entry(row, j);
                if c == 0 {
                    continue;
                }
                let mut inner = 0.0;
                for i in 0..n {
                    let a = net.source_entry(i, j);
                    if a != 0 {
                        inner += a as f64 / x[i] * gtf[i][k];
                    }
                }
                acc += c as f64 * v[j] * inner;
            }
            matrix[p][k] = acc;
        }
    }
    let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    let trace = matrix[0][0] + matrix[1][1];
    let exact = match (&eq.exact, sys.is_exact()) {
        (Some(xq), true) => {
            let jac = jacobian_exact(sys, xq)?;
            let mut mq = vec![vec![Q::zero(); 2]; 2];
            for (p, &row) in rows.iter().enumerate() {
                for k in 0..2 {
                    mq[p][k] = (0..n).fold(Q::zero(), |acc, i| acc + &jac[row][i] * &gt[i][k]);
                }
            }
            let d = &mq[0][0] * &mq[1][1] - &mq[0][1] * &mq[1][0];
            let t = &mq[0][0] + &mq[1][1];
            Some((d, t))
        }
        _ => None,
    };
    Ok(ReducedJacobian { privileged: rows.to_vec(), gamma_tilde: gt, matrix, det, trace, exact })
}

/// Kernel vector `u = c × d` and scaling `μ` with `κ∘x̄^{Γ_l^T} = μu`.
pub fn mu_and_u(sys: &MassActionSystem, x: &[f64]) -> Result<(f64, [i64; 3])> {
    let u = stoich::kernel_cross(sys.network())
        .ok_or_else(|| Error::Precondition("needs three reactions and rank two".into()))?;
    let mut v = [0.0; 3];
    sys.reaction_rates(x, &mut v);
    // least squares fit of v = μ u
    let num: f64 = (0..3).map(|j| v[j] * u[j] as f64).sum();
    let den: f64 = (0..3).map(|j| (u[j] * u[j]) as f64).sum();
    Ok((num / den, u))
}

/// Closed-form Cauchy–Binet expression for `det J_red`.
pub fn reduced_det_formula(sys: &MassActionSystem, eq: &EquilibriumRecord) -> Result<f64> {
    let net = sys.network();
    if stoich::rank(net) != 2 || net.n_reactions() != 3 {
        return Err(Error::Precondition("needs three reactions and rank two".into()));
    }
    let rows = stoich::row_basis(net);
    let gt = gamma_tilde(net, &rows).expect("rank two");
    let (mu, u) = mu_and_u(sys, &eq.x_bar)?;
    let prod_u = (u[0] * u[1] * u[2]).unsigned_abs() as f64;
    let a = net.source_matrix();
    let x = &eq.x_bar;
    let n = net.n_species();
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let minor = &gt[i][0] * &gt[j][1] - &gt[i][1] * &gt[j][0];
            if minor.is_zero() {
                continue;
            }
            let s = stoich::ones_cross(&a[i], &a[j]);
            sum += q_to_f64(&minor) * s as f64 / (x[i] * x[j]);
        }
    }
    Ok(mu * mu.abs() * prod_u * sum)
}

/// Integer coefficients `(A, B)` with `tr J = μ (A/x̄ + B/ȳ)` for planar networks.
pub fn trace_coefficients(net: &ReactionNetwork) -> Result<(i64, i64)> {
    if net.n_species() != 2 || net.n_reactions() != 3 || stoich::rank(net) != 2 {
        return Err(Error::Precondition("planar trace needs a (2,3,2) network".into()));
    }
    let u = stoich::kernel_cross(net).expect("rank two");
    let a = net.source_matrix();
    let g = net.stoich_matrix();
    let big_a = (0..3).map(|j| a[0][j] * g[0][j] * u[j]).sum();
    let big_b = (0..3).map(|j| a[1][j] * g[1][j] * u[j]).sum();
    Ok((big_a, big_b))
}

/// `tr J = μ(1/x̄ Σ a_i c_i u_i + 1/ȳ Σ b_i d_i u_i)`.
pub fn planar_trace(sys: &MassActionSystem, eq: &EquilibriumRecord) -> Result<f64> {
    let (a, b) = trace_coefficients(sys.network())?;
    let (mu, _) = mu_and_u(sys, &eq.x_bar)?;
    Ok(mu * (a as f64 / eq.x_bar[0] + b as f64 / eq.x_bar[1]))
}

pub fn is_saddle(rj: &ReducedJacobian) -> bool {
    rj.det_sign() < 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{planar_equilibrium, EquilibriumRecord};
    use crate::network::{parse_network, parse_system};

    #[test]
    fn lotka_jacobian() {
        let sys = MassActionSystem::unit(parse_network("X -> 2X; X + Y -> 2Y; Y -> 0").unwrap());
        assert_eq!(jacobian_at(&sys, &[1.0, 1.0]), vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn ivanova_columns_sum_to_zero() {
        let sys = parse_system("X + Z -> 2X @ 2; X + Y -> 2Y @ 3; Y + Z -> 2Z @ 5").unwrap();
        let j = jacobian_at(&sys, &[0.3, 1.7, 2.2]);
        for col in 0..3 {
            let s: f64 = (0..3).map(|i| j[i][col]).sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_tilde_reconstructs_gamma() {
        let net = parse_network("2X -> 3X; X + Y -> Z + W; Z + W -> Y").unwrap();
        let rows = stoich::row_basis(&net);
        assert_eq!(rows, vec![0, 1]);
        let gt = gamma_tilde(&net, &rows).unwrap();
        assert_eq!(gt[0], vec![qi(1), qi(0)]);
        assert_eq!(gt[1], vec![qi(0), qi(1)]);
        let g = linalg::to_q(net.stoich_matrix());
        for i in 0..4 {
            for j in 0..3 {
                let v = &gt[i][0] * &g[0][j] + &gt[i][1] * &g[1][j];
                assert_eq!(v, g[i][j]);
            }
        }
    }

    #[test]
    fn planar_reduced_equals_full() {
        let sys = parse_system("X -> 2X @ 2; X + Y -> 2Y @ 3; Y -> 0 @ 5").unwrap();
        let eq = planar_equilibrium(&sys).unwrap().unwrap();
        let rj = reduced_jacobian(&sys, &eq).unwrap();
        let full = jacobian_at(&sys, &eq.x_bar);
        for i in 0..2 {
            for k in 0..2 {
                assert!((rj.matrix[i][k] - full[i][k]).abs() < 1e-12);
            }
        }
        assert!(!is_saddle(&rj));
    }

    #[test]
    fn four_species_saddle() {
        let sys = parse_system("2X -> 3X @ 2; X + Y -> Z + W @ 3; Z + W -> Y @ 5").unwrap();
        // κ1 x² = κ2 x y gives x = κ2 y / κ1, and κ2 x y = κ3 z w
        let y = 1.0;
        let x = 3.0 * y / 2.0;
        let zw: f64 = 3.0 * x * y / 5.0;
        let st = [x, y, zw.sqrt(), zw.sqrt()];
        let eq = EquilibriumRecord::from_state(&sys, &st);
        assert!(sys.rhs(&st).unwrap().iter().all(|v| v.abs() < 1e-12));
        let rj = reduced_jacobian(&sys, &eq).unwrap();
        assert!(is_saddle(&rj));
        let f = reduced_det_formula(&sys, &eq).unwrap();
        assert!((f - rj.det).abs() < 1e-9 * rj.det.abs());
        let (mu, _) = mu_and_u(&sys, &st).unwrap();
        let closed = mu * mu.abs() * (2.0 / (st[0] * st[1]) + 1.0 / (st[0] * st[2]) + 1.0 / (st[0] * st[3]));
        assert!((closed - rj.det).abs() < 1e-9 * rj.det.abs());
    }

    #[test]
    fn tetra_trace_vanishes_on_diagonal() {
        let sys = parse_system("2X -> 3X + Y @ 7/4; X + Y -> Y @ 7/4; Y -> 0 @ 1").unwrap();
        let eq = planar_equilibrium(&sys).unwrap().unwrap();
        assert!(planar_trace(&sys, &eq).unwrap().abs() < 1e-12);
        let rj = reduced_jacobian(&sys, &eq).unwrap();
        assert!(rj.exact.as_ref().unwrap().1.is_zero());
    }

    #[test]
    fn lva_trace_and_det_positive() {
        let sys = parse_system("2X -> 3X @ 2; X + Y -> 2Y @ 1; Y -> 0 @ 3").unwrap();
        let eq = planar_equilibrium(&sys).unwrap().unwrap();
        assert!(planar_trace(&sys, &eq).unwrap() > 0.0);
        assert!(reduced_det_formula(&sys, &eq).unwrap() > 0.0);
    }

    #[test]
    fn reversed_targets_saddle() {
        let sys = parse_system("2X -> 3X @ 2; X + Y -> 0 @ 3; Y -> 2Y @ 5").unwrap();
        let st = [5.0 / 3.0, 10.0 / 9.0];
        assert!(sys.rhs(&st).unwrap().iter().all(|v| v.abs() < 1e-12));
        let eq = EquilibriumRecord::from_state(&sys, &st);
        assert!(is_saddle(&reduced_jacobian(&sys, &eq).unwrap()));
    }
}
