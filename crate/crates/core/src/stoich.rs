//! Exact structural predicates on the stoichiometric and source matrices.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::linalg::{self, PositiveKernel};
use crate::network::{qi, MassActionSystem, ReactionNetwork};
use crate::Q;

/// Exact rank of the stoichiometric matrix.
pub fn rank(net: &ReactionNetwork) -> usize {
    linalg::rank_int(net.stoich_matrix())
}

/// Certificate for (non)existence of a positive kernel vector of Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct NontrivialityCertificate {
    pub nontrivial: bool,
    /// `v > 0` with `Γ v = 0`.
    pub positive_kernel_vector: Option<Vec<Q>>,
    /// `w` with `Γ^T w ≥ 0` and `Γ^T w ≠ 0`.
    pub stiemke_dual: Option<Vec<Q>>,
}

impl NontrivialityCertificate {
    /// Checks the certificate in exact arithmetic.
    pub fn verify(&self, net: &ReactionNetwork) -> bool {
        let g = linalg::to_q(net.stoich_matrix());
        let m = net.n_reactions();
        match (&self.positive_kernel_vector, &self.stiemke_dual, self.nontrivial) {
            (Some(v), None, true) => {
                v.len() == m && v.iter().all(|x| x.is_positive()) && linalg::mat_vec(&g, v).iter().all(|x| x.is_zero())
            }
            (None, Some(w), false) => {
                if w.len() != net.n_species() {
                    return false;
                }
                let gt = linalg::transpose(&g, m);
                let img = linalg::mat_vec(&gt, w);
                img.iter().all(|x| !x.is_negative()) && img.iter().any(|x| x.is_positive())
            }
            _ => false,
        }
    }
}

/// First two linearly independent rows of Γ.
pub fn row_basis(net: &ReactionNetwork) -> Vec<usize> {
    linalg::independent_rows(net.stoich_matrix())
}

/// Kernel vector `u = c × d` of a rank-two, three-reaction network, from the
/// first two independent rows `c`, `d` of Γ.
pub fn kernel_cross(net: &ReactionNetwork) -> Option<[i64; 3]> {
    if net.n_reactions() != 3 {
        return None;
    }
    let rows = row_basis(net);
    if rows.len() != 2 {
        return None;
    }
    let g = net.stoich_matrix();
    Some(linalg::cross3_i(&g[rows[0]], &g[rows[1]]))
}

/// Decides dynamical nontriviality with an exact certificate.
pub fn dynamically_nontrivial(net: &ReactionNetwork) -> NontrivialityCertificate {
    let m = net.n_reactions();
    if m == 3 && rank(net) == 2 {
        let u = kernel_cross(net).expect("rank two");
        let sign = if u.iter().all(|&x| x > 0) {
            1
        } else if u.iter().all(|&x| x < 0) {
            -1
        } else {
            0
        };
        if sign != 0 {
            let v: Vec<Q> = u.iter().map(|&x| qi(sign * x)).collect();
            return NontrivialityCertificate {
                nontrivial: true,
                positive_kernel_vector: Some(linalg::primitive(&v)),
                stiemke_dual: None,
            };
        }
    }
    fourier_motzkin_nontrivial(net)
}

/// Nontriviality decided by Fourier–Motzkin elimination alone.
pub fn fourier_motzkin_nontrivial(net: &ReactionNetwork) -> NontrivialityCertificate {
    let m = net.n_reactions();
    let n = net.n_species();
    match linalg::positive_kernel_fm(net.stoich_matrix(), m) {
        PositiveKernel::Feasible(v) => NontrivialityCertificate {
            nontrivial: true,
            positive_kernel_vector: Some(linalg::primitive(&v)),
            stiemke_dual: None,
        },
        PositiveKernel::Infeasible(lambda) => {
            // λ lies in im Γ^T; recover w with Γ^T w = λ
            let gt = linalg::transpose(&linalg::to_q(net.stoich_matrix()), m);
            let w = linalg::solve(&gt, &lambda, n).unwrap_or_else(|| vec![Q::zero(); n]);
            NontrivialityCertificate {
                nontrivial: false,
                positive_kernel_vector: None,
                stiemke_dual: Some(linalg::primitive(&w)),
            }
        }
    }
}

/// Orientation of a planar source triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
    Degenerate,
}

/// Affine geometry of the three source complexes.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceGeometry {
    pub collinear: bool,
    /// Only for two-species networks.
    pub orientation: Option<Orientation>,
    /// `((i, j), 1·(a_i × a_j))` over species pairs `i < j`.
    pub pair_scalars: Vec<((usize, usize), i64)>,
}

/// `1·(p × q)` for 3-vectors, i.e. `det[1; p; q]`.
pub fn ones_cross(p: &[i64], q: &[i64]) -> i64 {
    linalg::cross3_i(p, q).iter().sum()
}

pub fn source_geometry(net: &ReactionNetwork) -> Option<SourceGeometry> {
    if net.n_reactions() != 3 {
        return None;
    }
    let a = net.source_matrix();
    let n = net.n_species();
    let mut pair_scalars = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pair_scalars.push(((i, j), ones_cross(&a[i], &a[j])));
        }
    }
    // affine dependence: rank of the edge vectors
    let edges: Vec<Vec<i64>> = (0..n).map(|i| vec![a[i][1] - a[i][0], a[i][2] - a[i][0]]).collect();
    let collinear = linalg::rank_int(&edges) < 2;
    let orientation = (n == 2).then(|| {
        let d = edges[0][0] * edges[1][1] - edges[0][1] * edges[1][0];
        match d.signum() {
            1 => Orientation::Positive,
            -1 => Orientation::Negative,
            _ => Orientation::Degenerate,
        }
    });
    Some(SourceGeometry { collinear, orientation, pair_scalars })
}

/// Reactions `2X_j → (2+c_j)X_j + Σ c_i X_i` with `c_j > 0`, `c_i ≥ 0`.
pub fn positive_divergence_reactions(net: &ReactionNetwork) -> Vec<usize> {
    let n = net.n_species();
    (0..net.n_reactions())
        .filter(|&r| {
            let src = net.source(r);
            let s = src.coeffs();
            let Some(j) = (0..n).find(|&i| s[i] == 2) else {
                return false;
            };
            if src.molecularity() != 2 {
                return false;
            }
            net.stoich_entry(j, r) > 0 && (0..n).all(|i| i == j || net.stoich_entry(i, r) >= 0)
        })
        .collect()
}

/// Sign class of the divergence after rescaling by `(x_1⋯x_n)^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceClass {
    NegativeEverywhere,
    IdenticallyZero,
    Indefinite,
}

pub fn dulac_divergence_class(net: &ReactionNetwork) -> DivergenceClass {
    let mut pos = false;
    let mut neg = false;
    for r in 0..net.n_reactions() {
        for i in 0..net.n_species() {
            let s = net.stoich_entry(i, r) * (net.source_entry(i, r) - 1);
            pos |= s > 0;
            neg |= s < 0;
        }
    }
    if pos || !positive_divergence_reactions(net).is_empty() {
        DivergenceClass::Indefinite
    } else if neg {
        DivergenceClass::NegativeEverywhere
    } else {
        DivergenceClass::IdenticallyZero
    }
}

/// `ẋ_j = x_j (r_j + Σ_{k≠j} b_jk x_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LotkaVolterraForm {
    pub r: Vec<Q>,
    /// Off-diagonal interaction matrix; the diagonal is zero.
    pub b: Vec<Vec<Q>>,
    /// Side conditions (label, holds).
    pub conditions: Vec<(String, bool)>,
}

impl LotkaVolterraForm {
    pub fn all_conditions_hold(&self) -> bool {
        self.conditions.iter().all(|(_, h)| *h)
    }
}

/// Detects a Lotka–Volterra form without diagonal terms.
pub fn lotka_volterra_form(sys: &MassActionSystem) -> Option<LotkaVolterraForm> {
    let net = sys.network();
    let n = net.n_species();
    let mut r = vec![Q::zero(); n];
    let mut b = vec![vec![Q::zero(); n]; n];
    for j in 0..net.n_reactions() {
        let kappa = sys.rates()[j].to_exact()?;
        let src = net.source(j);
        let a = src.coeffs();
        for i in 0..n {
            let c = net.stoich_entry(i, j);
            if c == 0 {
                continue;
            }
            if a[i] != 1 {
                return None;
            }
            let term = &kappa * qi(c);
            match src.molecularity() {
                1 => r[i] += term,
                2 => {
                    let k = (0..n).find(|&k| k != i && a[k] == 1)?;
                    b[i][k] += term;
                }
                _ => return None,
            }
        }
    }
    let sgn = |q: &Q| -> i32 {
        if q.is_positive() {
            1
        } else if q.is_negative() {
            -1
        } else {
            0
        }
    };
    let mut conditions = Vec::new();
    if n == 2 {
        conditions.push((String::from("r1*r2 < 0"), sgn(&r[0]) * sgn(&r[1]) < 0));
        conditions.push((String::from("r1*b12 < 0"), sgn(&r[0]) * sgn(&b[0][1]) < 0));
        conditions.push((String::from("r2*b21 < 0"), sgn(&r[1]) * sgn(&b[1][0]) < 0));
    } else if n == 3 {
        let cyc = &b[0][1] * &b[1][2] * &b[2][0] + &b[0][2] * &b[1][0] * &b[2][1];
        conditions.push((format!("b12*b23*b31 + b13*b21*b32 = 0"), cyc.is_zero()));
    }
    Some(LotkaVolterraForm { r, b, conditions })
}
