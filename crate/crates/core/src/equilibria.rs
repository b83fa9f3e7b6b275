//! Positive equilibria: closed-form planar solve, class-restricted root
//! finding and equilibrium rays of the named families.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{Signed, Zero};

use crate::classify::{Family, FamilyTag};
use crate::dense::{self, Mat};
use crate::error::{Error, Result};
use crate::jacobian::{self, gamma_tilde};
use crate::linalg;
use crate::network::{q_to_f64, qi, MassActionSystem, ReactionNetwork};
use crate::stoich;
use crate::Q;

/// Positive equilibrium with the scaling `κ∘x̄^{Γ_l^T} = μu`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumRecord {
    pub x_bar: Vec<f64>,
    pub mu: f64,
    /// Kernel vector of Γ (`c × d` for three-reaction rank-two networks).
    pub u: Vec<f64>,
    pub class_constant: Option<Vec<f64>>,
    /// Exact coordinates when the equilibrium was verified to be rational.
    pub exact: Option<Vec<Q>>,
    /// Restricted Jacobian singular at the root.
    pub degenerate: bool,
}

impl EquilibriumRecord {
    pub fn from_state(sys: &MassActionSystem, x: &[f64]) -> Self {
        let (mu, u) = match jacobian::mu_and_u(sys, x) {
            Ok((mu, u)) => (mu, u.iter().map(|&v| v as f64).collect()),
            Err(_) => {
                let mut v = vec![0.0; sys.network().n_reactions()];
                sys.reaction_rates(x, &mut v);
                (1.0, v)
            }
        };
        Self { x_bar: x.to_vec(), mu, u, class_constant: None, exact: None, degenerate: false }
    }

    pub fn from_exact(sys: &MassActionSystem, x: &[Q]) -> Self {
        let xf: Vec<f64> = x.iter().map(q_to_f64).collect();
        let mut rec = Self::from_state(sys, &xf);
        rec.exact = Some(x.to_vec());
        rec
    }

    /// Largest residual relative to the largest reaction term.
    pub fn relative_residual(&self, sys: &MassActionSystem) -> f64 {
        residual_scaled(sys, &self.x_bar)
    }
}

fn residual_scaled(sys: &MassActionSystem, x: &[f64]) -> f64 {
    let f = sys.rhs(x).unwrap_or_default();
    dense::norm_inf(&f) / rate_scale(sys, x)
}

/// Magnitude of the largest term entering the right-hand side.
pub fn rate_scale(sys: &MassActionSystem, x: &[f64]) -> f64 {
    let net = sys.network();
    let mut v = vec![0.0; net.n_reactions()];
    sys.reaction_rates(x, &mut v);
    let mut s: f64 = 0.0;
    for (j, vj) in v.iter().enumerate() {
        let cmax = (0..net.n_species()).map(|i| net.stoich_entry(i, j).abs()).max().unwrap_or(0);
        s = s.max(vj.abs() * cmax as f64);
    }
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Best rational approximation with denominator at most `max_den`.
pub fn rationalize(v: f64, max_den: i64) -> Option<Q> {
    if !v.is_finite() {
        return None;
    }
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - v).abs() <= 1e-13 * v.abs().max(1.0) {
            return Some(Q::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = x - a;
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

/// Tries to certify a rational equilibrium near `x`.
fn exact_equilibrium(sys: &MassActionSystem, x: &[f64]) -> Option<Vec<Q>> {
    if !sys.is_exact() {
        return None;
    }
    let xq: Option<Vec<Q>> = x.iter().map(|&v| rationalize(v, 1_000_000)).collect();
    let xq = xq?;
    if xq.iter().any(|v| !v.is_positive()) {
        return None;
    }
    sys.rhs_exact(&xq).ok()?.iter().all(|v| v.is_zero()).then_some(xq)
}

/// Unique positive equilibrium of a planar three-reaction system.
pub fn planar_equilibrium(sys: &MassActionSystem) -> Result<Option<EquilibriumRecord>> {
    let net = sys.network();
    if net.n_species() != 2 || net.n_reactions() != 3 || stoich::rank(net) != 2 {
        return Err(Error::Precondition("planar equilibrium needs a (2,3,2) network".into()));
    }
    let geom = stoich::source_geometry(net).expect("three reactions");
    if geom.collinear {
        return Err(Error::SourcesCollinear);
    }
    if !stoich::dynamically_nontrivial(net).nontrivial {
        return Err(Error::NoPositiveEquilibrium);
    }
    let u = stoich::kernel_cross(net).expect("rank two");
    let sign = if u.iter().all(|&v| v > 0) {
        1.0
    } else if u.iter().all(|&v| v < 0) {
        -1.0
    } else {
        return Ok(None);
    };
    let kappa = sys.kappa();
    // a_i log x + b_i log y - log μ' = log(|u_i| / κ_i)
    let a: Mat = (0..3)
        .map(|j| vec![net.source_entry(0, j) as f64, net.source_entry(1, j) as f64, -1.0])
        .collect();
    let rhs: Vec<f64> = (0..3).map(|j| ((u[j].abs() as f64) / kappa[j]).ln()).collect();
    let sol = dense::solve(&a, &rhs).ok_or(Error::SourcesCollinear)?;
    let x = vec![sol[0].exp(), sol[1].exp()];
    let mut rec = EquilibriumRecord {
        x_bar: x.clone(),
        mu: sign * sol[2].exp(),
        u: u.iter().map(|&v| v as f64).collect(),
        class_constant: None,
        exact: None,
        degenerate: false,
    };
    if let Some(xq) = exact_equilibrium(sys, &x) {
        rec.x_bar = xq.iter().map(q_to_f64).collect();
        rec.exact = Some(xq);
    }
    Ok(Some(rec))
}

/// A stoichiometric class `{x : W x = values}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoichiometricClass {
    /// Rows spanning the left kernel of Γ.
    pub conservation: Vec<Vec<Q>>,
    pub values: Vec<f64>,
}

impl StoichiometricClass {
    /// Class through `x0`, with conservation laws in reduced echelon form.
    pub fn through_point(net: &ReactionNetwork, x0: &[f64]) -> Self {
        let w = linalg::left_kernel(net.stoich_matrix(), net.n_reactions());
        let values = w.iter().map(|row| row.iter().zip(x0).map(|(a, b)| q_to_f64(a) * b).sum()).collect();
        Self { conservation: w, values }
    }

    /// Class with the given values of the echelon-form conservation laws.
    pub fn from_values(net: &ReactionNetwork, values: &[f64]) -> Result<Self> {
        let w = linalg::left_kernel(net.stoich_matrix(), net.n_reactions());
        if w.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: w.len(), got: values.len() });
        }
        Ok(Self { conservation: w, values: values.to_vec() })
    }

    /// Class given by explicit conservation laws, e.g. `x + y + z = C`.
    pub fn from_laws(net: &ReactionNetwork, laws: &[Vec<i64>], values: &[f64]) -> Result<Self> {
        let g = linalg::to_q(net.stoich_matrix());
        let n = net.n_species();
        let r = stoich::rank(net);
        let w = linalg::to_q(laws);
        if laws.len() != values.len() || laws.len() != n - r || laws.iter().any(|l| l.len() != n) {
            return Err(Error::DimensionMismatch { expected: n - r, got: laws.len() });
        }
        for row in &w {
            let gt = linalg::transpose(&g, net.n_reactions());
            if !linalg::mat_vec(&gt, row).iter().all(|v| v.is_zero()) {
                return Err(Error::Precondition("law is not conserved".into()));
            }
        }
        if linalg::rank_q(&w) != n - r {
            return Err(Error::Precondition("laws are dependent".into()));
        }
        Ok(Self { conservation: w, values: values.to_vec() })
    }

    pub fn values_at(&self, x: &[f64]) -> Vec<f64> {
        self.conservation.iter().map(|row| row.iter().zip(x).map(|(a, b)| q_to_f64(a) * b).sum()).collect()
    }

    /// Explicit coordinates `x = offset + Γ̃ s` with `s` the privileged species.
    pub fn coordinates(&self, net: &ReactionNetwork) -> Result<ClassCoordinates> {
        let privileged = stoich::row_basis(net);
        let r = privileged.len();
        let n = net.n_species();
        if self.conservation.len() != n - r {
            return Err(Error::DimensionMismatch { expected: n - r, got: self.conservation.len() });
        }
        let gt = gamma_tilde(net, &privileged).ok_or_else(|| Error::Precondition("no row basis".into()))?;
        let others: Vec<usize> = (0..n).filter(|i| !privileged.contains(i)).collect();
        let wq: Mat = self.conservation.iter().map(|row| others.iter().map(|&i| q_to_f64(&row[i])).collect()).collect();
        let zq = if others.is_empty() {
            Vec::new()
        } else {
            dense::solve(&wq, &self.values).ok_or_else(|| Error::Numerical("singular conservation block".into()))?
        };
        let mut offset = vec![0.0; n];
        for (k, &i) in others.iter().enumerate() {
            offset[i] = zq[k];
        }
        Ok(ClassCoordinates {
            privileged,
            basis: gt.iter().map(|row| row.iter().map(q_to_f64).collect()).collect(),
            offset,
        })
    }
}

/// Affine parametrisation of a class by the privileged species.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassCoordinates {
    pub privileged: Vec<usize>,
    /// `n × r` basis of the stoichiometric subspace (`Γ̃`).
    pub basis: Mat,
    pub offset: Vec<f64>,
}

impl ClassCoordinates {
    pub fn to_state(&self, s: &[f64]) -> Vec<f64> {
        let mut x = self.offset.clone();
        self.to_state_into(s, &mut x);
        x
    }

    pub fn to_state_into(&self, s: &[f64], x: &mut [f64]) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = self.offset[i] + self.basis[i].iter().zip(s).map(|(b, v)| b * v).sum::<f64>();
        }
    }

    pub fn to_coords(&self, x: &[f64]) -> Vec<f64> {
        self.privileged.iter().map(|&i| x[i]).collect()
    }

    pub fn rank(&self) -> usize {
        self.privileged.len()
    }
}

/// Options for the multi-start Newton search.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub starts_per_axis: usize,
    pub lower: f64,
    pub upper: f64,
    /// Residual tolerance relative to the largest reaction term.
    pub tol: f64,
    pub max_iter: usize,
    pub dedup_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { starts_per_axis: 32, lower: 1e-3, upper: 1e3, tol: 1e-12, max_iter: 100, dedup_tol: 1e-9 }
    }
}

struct Root {
    x: Vec<f64>,
    residual: f64,
    degenerate: bool,
}

fn restricted(sys: &MassActionSystem, coords: &ClassCoordinates, s: &[f64]) -> Option<(Vec<f64>, Vec<f64>, Mat)> {
    let x = coords.to_state(s);
    if x.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let f = sys.rhs(&x).ok()?;
    let fp: Vec<f64> = coords.privileged.iter().map(|&i| f[i]).collect();
    let jac = jacobian::jacobian_at(sys, &x);
    let r = coords.rank();
    let mut df = dense::zeros(r, r);
    for (p, &row) in coords.privileged.iter().enumerate() {
        for k in 0..r {
            df[p][k] = (0..x.len()).map(|i| jac[row][i] * coords.basis[i][k]).sum();
        }
    }
    Some((x, fp, df))
}

fn relative_det(df: &Mat) -> f64 {
    let scale: f64 = df.iter().map(|row| dense::norm2(row)).product();
    if scale == 0.0 {
        0.0
    } else {
        dense::det(df).abs() / scale
    }
}

fn newton(sys: &MassActionSystem, coords: &ClassCoordinates, start: Vec<f64>, opts: &SolverOptions) -> Option<Root> {
    let mut s = start;
    let (mut x, mut f, mut df) = restricted(sys, coords, &s)?;
    let mut scale = rate_scale(sys, &x);
    let mut res = dense::norm_inf(&f) / scale;
    for _ in 0..opts.max_iter {
        if res <= opts.tol {
            break;
        }
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let step = dense::solve(&df, &neg)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-12 {
            let trial: Vec<f64> = s.iter().zip(&step).map(|(a, b)| a + lambda * b).collect();
            if let Some((xt, ft, dft)) = restricted(sys, coords, &trial) {
                let st = rate_scale(sys, &xt);
                let rt = dense::norm_inf(&ft) / st;
                if rt < res * (1.0 - 1e-4 * lambda) || (lambda < 1e-3 && rt <= res) {
                    s = trial;
                    x = xt;
                    f = ft;
                    df = dft;
                    scale = st;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res > opts.tol {
        return None;
    }
    // polish: a couple of full steps while they help
    for _ in 0..3 {
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let Some(step) = dense::solve(&df, &neg) else { break };
        let trial: Vec<f64> = s.iter().zip(&step).map(|(a, b)| a + b).collect();
        match restricted(sys, coords, &trial) {
            Some((xt, ft, dft)) => {
                let rt = dense::norm_inf(&ft) / rate_scale(sys, &xt);
                if rt < res {
                    s = trial;
                    x = xt;
                    f = ft;
                    df = dft;
                    res = rt;
                } else {
                    break;
                }
            }
            None => break,
        }
    }
    let _ = scale;
    Some(Root { x, residual: res, degenerate: relative_det(&df) < 1e-6 })
}

/// Deterministic log-uniform grid of starting points.
fn start_grid(r: usize, opts: &SolverOptions) -> Vec<Vec<f64>> {
    let k = opts.starts_per_axis.max(1);
    let (lo, hi) = (opts.lower.ln(), opts.upper.ln());
    let axis: Vec<f64> = (0..k)
        .map(|i| if k == 1 { (lo + hi) / 2.0 } else { lo + (hi - lo) * i as f64 / (k - 1) as f64 })
        .map(|v| v.exp())
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        let mut next = Vec::with_capacity(out.len() * k);
        for p in &out {
            for &a in &axis {
                let mut q = p.clone();
                q.push(a);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn merge_roots(mut roots: Vec<Root>, opts: &SolverOptions) -> Vec<Root> {
    roots.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(core::cmp::Ordering::Equal));
    let mut out: Vec<Root> = Vec::new();
    for r in roots {
        let close = out.iter_mut().find(|o| {
            let d = o.x.iter().zip(&r.x).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            let size = 1.0 + dense::norm_inf(&o.x);
            let tol = if o.degenerate || r.degenerate { 1e-5 } else { opts.dedup_tol };
            d <= tol * size
        });
        match close {
            Some(o) => {
                o.degenerate |= r.degenerate;
                if r.residual < o.residual {
                    o.x = r.x;
                    o.residual = r.residual;
                }
            }
            None => out.push(r),
        }
    }
    out
}

/// All positive equilibria on a class found by multi-start damped Newton.
pub fn equilibria_on_class(
    sys: &MassActionSystem,
    class: &StoichiometricClass,
    opts: &SolverOptions,
) -> Result<Vec<EquilibriumRecord>> {
    let net = sys.network();
    let coords = class.coordinates(net)?;
    let r = coords.rank();
    if r == 0 {
        return Err(Error::Precondition("rank zero network".into()));
    }
    let roots: Vec<Root> =
        start_grid(r, opts).into_iter().filter_map(|s| newton(sys, &coords, s, opts)).collect();
    let merged = merge_roots(roots, opts);
    let mut out: Vec<EquilibriumRecord> = merged
        .into_iter()
        .map(|root| {
            let mut rec = EquilibriumRecord::from_state(sys, &root.x);
            rec.class_constant = Some(class.values.clone());
            rec.degenerate = root.degenerate;
            if let Some(xq) = exact_equilibrium(sys, &root.x) {
                rec.x_bar = xq.iter().map(q_to_f64).collect();
                rec.exact = Some(xq);
            }
            rec
        })
        .collect();
    out.sort_by(|a, b| a.x_bar.partial_cmp(&b.x_bar).unwrap_or(core::cmp::Ordering::Equal));
    Ok(out)
}

/// Log-linear description of the positive equilibria of a three-reaction,
/// rank-two network: `(log x, log μ') = particular + Σ t_k directions_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLinearEquilibria {
    pub particular: Vec<f64>,
    pub directions: Vec<Vec<Q>>,
    pub sign: i64,
}

pub fn log_linear_equilibria(sys: &MassActionSystem) -> Result<LogLinearEquilibria> {
    let net = sys.network();
    let n = net.n_species();
    let u = stoich::kernel_cross(net).ok_or_else(|| Error::Precondition("needs (n,3,2)".into()))?;
    let sign = if u.iter().all(|&v| v > 0) {
        1
    } else if u.iter().all(|&v| v < 0) {
        -1
    } else {
        return Err(Error::NoPositiveEquilibrium);
    };
    let kappa = sys.kappa();
    let rows: Vec<Vec<i64>> = (0..3)
        .map(|j| {
            let mut r: Vec<i64> = (0..n).map(|i| net.source_entry(i, j)).collect();
            r.push(-1);
            r
        })
        .collect();
    let aq = linalg::to_q(&rows);
    let mut ech = aq.clone();
    let pivots = linalg::rref(&mut ech);
    if pivots.len() != 3 {
        return Err(Error::SourcesCollinear);
    }
    let directions: Vec<Vec<Q>> = linalg::nullspace(&aq, n + 1).iter().map(|v| linalg::primitive(v)).collect();
    let sub: Mat = (0..3).map(|j| pivots.iter().map(|&p| rows[j][p] as f64).collect()).collect();
    let rhs: Vec<f64> = (0..3).map(|j| ((u[j].abs() as f64) / kappa[j]).ln()).collect();
    let ps = dense::solve(&sub, &rhs).ok_or(Error::SourcesCollinear)?;
    let mut particular = vec![0.0; n + 1];
    for (k, &p) in pivots.iter().enumerate() {
        particular[p] = ps[k];
    }
    Ok(LogLinearEquilibria { particular, directions, sign })
}

impl LogLinearEquilibria {
    /// State on a one-dimensional curve at parameter `t`.
    pub fn state(&self, t: f64) -> Vec<f64> {
        let n = self.particular.len() - 1;
        (0..n).map(|i| (self.particular[i] + t * q_to_f64(&self.directions[0][i])).exp()).collect()
    }
}

/// Equilibria of an `(3,3,2)` network on a class, by scanning the
/// one-dimensional equilibrium curve. Tangencies are reported as degenerate.
pub fn equilibria_on_curve(sys: &MassActionSystem, class: &StoichiometricClass) -> Result<Vec<EquilibriumRecord>> {
    let ll = log_linear_equilibria(sys)?;
    if ll.directions.len() != 1 || class.conservation.len() != 1 {
        return Err(Error::Precondition("needs a one-dimensional equilibrium curve and one conservation law".into()));
    }
    let w: Vec<f64> = class.conservation[0].iter().map(q_to_f64).collect();
    let target = class.values[0];
    let dir: Vec<f64> = ll.directions[0].iter().map(q_to_f64).collect();
    let n = w.len();
    let g = |t: f64| -> f64 { ll.state(t).iter().zip(&w).map(|(x, wi)| x * wi).sum::<f64>() - target };
    let dg = |t: f64| -> f64 {
        ll.state(t).iter().zip(&w).zip(&dir).map(|((x, wi), di)| x * wi * di).sum::<f64>()
    };
    let size = |t: f64| -> f64 { ll.state(t).iter().zip(&w).map(|(x, wi)| (x * wi).abs()).sum::<f64>() + target.abs() };
    let qmax = dir[..n].iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1.0);
    let span = 40.0 / qmax;
    let steps = 8000;
    let ts: Vec<f64> = (0..=steps).map(|i| -span + 2.0 * span * i as f64 / steps as f64).collect();
    let mut params: Vec<(f64, bool)> = Vec::new();
    let bisect = |f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64| -> f64 {
        let fa0 = f(a);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid == a || mid == b {
                break;
            }
            if (f(mid) > 0.0) == (fa0 > 0.0) {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };
    for win in ts.windows(2) {
        let (a, b) = (win[0], win[1]);
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            params.push((a, false));
        } else if (ga > 0.0) != (gb > 0.0) && gb != 0.0 {
            params.push((bisect(&g, a, b), false));
        }
        // stationary point of g: possible tangency
        let (da, db) = (dg(a), dg(b));
        if (da > 0.0) != (db > 0.0) {
            let t = bisect(&dg, a, b);
            if g(t).abs() <= 1e-9 * size(t) {
                params.push((t, true));
            }
        }
    }
    // a tangency swallows nearby simple crossings produced by rounding
    params.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut merged: Vec<(f64, bool)> = Vec::new();
    for p in params {
        if let Some(last) = merged.last_mut() {
            if (p.0 - last.0).abs() < 1e-4 * (1.0 + p.0.abs()) && (p.1 || last.1) {
                if p.1 {
                    *last = p;
                }
                continue;
            }
        }
        merged.push(p);
    }
    Ok(merged
        .into_iter()
        .map(|(t, degenerate)| {
            let mut rec = EquilibriumRecord::from_state(sys, &ll.state(t));
            rec.class_constant = Some(class.values.clone());
            rec.degenerate = degenerate;
            rec
        })
        .collect())
}

/// Ray of positive equilibria `{t · direction : t > 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumRay {
    pub direction: Vec<Q>,
}

impl EquilibriumRay {
    pub fn point(&self, t: &Q) -> Vec<Q> {
        self.direction.iter().map(|d| d * t).collect()
    }
}

/// Equilibrium ray of a Lifted LVA or three-species family network.
pub fn equilibrium_ray(tag: &FamilyTag, sys: &MassActionSystem) -> Result<EquilibriumRay> {
    let k = |t: usize| -> Result<Q> {
        sys.rates()[tag.reaction_order[t]].to_exact().ok_or(Error::InexactRates)
    };
    let dir_template: Vec<Q> = match tag.family {
        Family::LiftedLva { d } => {
            let (k1, k2, k3) = (k(0)?, k(1)?, k(2)?);
            vec![qi(1), &k1 / &k2, &k2 * qi(d) / &k3]
        }
        Family::ThreeSpecies { c, d } => {
            let (k1, k2, k3) = (k(0)?, k(1)?, k(2)?);
            vec![qi(c * d) * &k3, qi(c) * &k1, k2]
        }
        _ => return Err(Error::FamilyMismatch(alloc::format!("{:?}", tag.family))),
    };
    let n = sys.network().n_species();
    if tag.species_perm.len() != n {
        return Err(Error::FamilyMismatch("species count".into()));
    }
    let mut direction = vec![Q::zero(); n];
    for (t, &i) in tag.species_perm.iter().enumerate() {
        direction[i] = dir_template[t].clone();
    }
    Ok(EquilibriumRay { direction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::match_family;
    use crate::network::{parse_network, parse_system, qr};

    #[test]
    fn lotka_planar() {
        let sys = MassActionSystem::unit(parse_network("X -> 2X; X + Y -> 2Y; Y -> 0").unwrap());
        let eq = planar_equilibrium(&sys).unwrap().unwrap();
        assert_eq!(eq.exact, Some(vec![qi(1), qi(1)]));
        assert!((eq.mu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tetra_planar() {
        let sys = parse_system("2X -> 3X + Y @ 1; X + Y -> Y @ 2; Y -> 0 @ 3").unwrap();
        let eq = planar_equilibrium(&sys).unwrap().unwrap();
        assert_eq!(eq.exact, Some(vec![qr(3, 2), qr(3, 4)]));
    }

    #[test]
    fn collinear_planar() {
        let sys = MassActionSystem::unit(parse_network("0 -> X + Y; X -> 0; 2X -> 2X + Y").unwrap());
        assert!(matches!(planar_equilibrium(&sys), Err(Error::SourcesCollinear) | Err(Error::Precondition(_))));
        let sys = MassActionSystem::unit(parse_network("0 -> X; X -> Y; 2X -> 0").unwrap());
        assert_eq!(planar_equilibrium(&sys), Err(Error::SourcesCollinear));
    }

    #[test]
    fn sign_law() {
        let sys = parse_system("2X -> 3X @ 2; X + Y -> 0 @ 3; Y -> 2Y @ 5").unwrap();
        let eq = planar_equilibrium(&sys).unwrap().unwrap();
        assert!(eq.mu < 0.0 && eq.u.iter().all(|&v| v < 0.0));
    }

    fn fold() -> MassActionSystem {
        MassActionSystem::unit(parse_network("X + Y -> 2Z; 2Z -> 2X; Z -> Y").unwrap())
    }

    #[test]
    fn fold_counts() {
        let sys = fold();
        let opts = SolverOptions::default();
        let count = |c: f64| {
            let class = StoichiometricClass::from_laws(sys.network(), &[vec![1, 1, 1]], &[c]).unwrap();
            equilibria_on_class(&sys, &class, &opts).unwrap()
        };
        assert!(count(1.0).is_empty());
        let two = count(3.0);
        assert_eq!(two.len(), 2);
        for e in &two {
            assert!((e.x_bar[0] * e.x_bar[1] - 0.5).abs() < 1e-10);
            assert!((e.x_bar[2] - 0.5).abs() < 1e-10);
            assert!(!e.degenerate);
        }
        let one = count(0.5 + 2f64.sqrt());
        assert_eq!(one.len(), 1);
        assert!(one[0].degenerate);
    }

    #[test]
    fn class_membership() {
        let sys = fold();
        let class = StoichiometricClass::through_point(sys.network(), &[1.0, 1.5, 0.5]);
        for e in equilibria_on_class(&sys, &class, &SolverOptions::default()).unwrap() {
            let v = class.values_at(&e.x_bar);
            assert!((v[0] - class.values[0]).abs() < 1e-12);
            assert!(e.relative_residual(&sys) < 1e-10);
        }
    }

    #[test]
    fn rays() {
        let lifted = parse_system("2X -> 3X @ 1; X + Y -> 2Y + Z @ 2; Y + Z -> 0 @ 3").unwrap();
        let tag = match_family(lifted.network()).unwrap();
        let ray = equilibrium_ray(&tag, &lifted).unwrap();
        assert_eq!(ray.direction, vec![qi(1), qr(1, 2), qr(2, 3)]);
        let p = ray.point(&qr(7, 3));
        assert!(lifted.rhs_exact(&p).unwrap().iter().all(|v| v.is_zero()));

        let fam = MassActionSystem::unit(parse_network("Z + X -> 2X; X + Y -> 0; Y + Z -> 2Y + 2Z").unwrap());
        let tag = match_family(fam.network()).unwrap();
        let ray = equilibrium_ray(&tag, &fam).unwrap();
        assert_eq!(ray.direction, vec![qi(1), qi(1), qi(1)]);
    }

    #[test]
    fn rationalize_values() {
        assert_eq!(rationalize(0.75, 1000), Some(qr(3, 4)));
        assert_eq!(rationalize(1.0 / 3.0, 1000), Some(qr(1, 3)));
        assert_eq!(rationalize(2f64.sqrt(), 1000), None);
    }
}
