//! Verdicts for planar three-reaction quadratic networks, Hopf points along
//! one-parameter rate paths, the first focal value, and the Bogdanov–Takens
//! residual of the octomolecular lifted network.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Signed, Zero};

use crate::dense;
use crate::equilibria::{self, EquilibriumRecord, StoichiometricClass};
use crate::error::{Error, Result};
use crate::jacobian;
use crate::network::{q_to_f64, qi, standard_names, Complex, MassActionSystem, ReactionNetwork};
use crate::poly::Poly2;
use crate::stoich;
use crate::Q;

/// Source triples of the ten cases, cases 7 to 10 in positive orientation.
pub const CASE_SOURCES: [[[i64; 2]; 3]; 10] = [
    [[1, 0], [0, 1], [0, 0]],
    [[1, 0], [1, 1], [0, 0]],
    [[2, 0], [0, 1], [0, 0]],
    [[2, 0], [0, 1], [1, 0]],
    [[2, 0], [0, 2], [0, 0]],
    [[2, 0], [0, 2], [1, 0]],
    [[1, 0], [1, 1], [0, 1]],
    [[2, 0], [1, 1], [1, 0]],
    [[2, 0], [1, 1], [0, 1]],
    [[2, 0], [1, 1], [0, 0]],
];

/// Which of the ten source configurations a planar network realises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceCase {
    pub case_id: u8,
    /// Species X and Y exchanged to reach the listed configuration.
    pub swapped: bool,
    /// Listed source `i` is network reaction `order[i]`.
    pub order: [usize; 3],
}

const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn planar_precondition(net: &ReactionNetwork) -> Result<()> {
    if net.n_species() != 2 || net.n_reactions() != 3 || !net.is_quadratic() {
        return Err(Error::Precondition("needs two species, three reactions and bimolecular sources".into()));
    }
    Ok(())
}

/// Matches the sources against the ten configurations; `None` when collinear.
pub fn source_case(net: &ReactionNetwork) -> Result<Option<SourceCase>> {
    planar_precondition(net)?;
    let a = net.source_matrix();
    for swapped in [false, true] {
        let (ix, iy) = if swapped { (1, 0) } else { (0, 1) };
        for (k, case) in CASE_SOURCES.iter().enumerate() {
            for order in ORDERS {
                if (0..3).all(|i| a[ix][order[i]] == case[i][0] && a[iy][order[i]] == case[i][1]) {
                    return Ok(Some(SourceCase { case_id: k as u8 + 1, swapped, order }));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarVerdictKind {
    NoPeriodicOrbit,
    CenterForAllKappa,
    VerticalHopf,
    SupercriticalHopf,
    NoAndronovHopf,
    Undetermined,
}

impl PlanarVerdictKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlanarVerdictKind::NoPeriodicOrbit => "NoPeriodicOrbit",
            PlanarVerdictKind::CenterForAllKappa => "CenterForAllKappa",
            PlanarVerdictKind::VerticalHopf => "VerticalHopf",
            PlanarVerdictKind::SupercriticalHopf => "SupercriticalHopf",
            PlanarVerdictKind::NoAndronovHopf => "NoAndronovHopf",
            PlanarVerdictKind::Undetermined => "Undetermined",
        }
    }
}

/// One evaluated inequality; a verdict is positive when every condition of
/// some branch holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub branch: u8,
    pub text: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarVerdict {
    pub case: Option<SourceCase>,
    pub verdict: PlanarVerdictKind,
    /// Changes of X and Y in the listed source order.
    pub c: [i64; 3],
    pub d: [i64; 3],
    pub witness: Vec<Condition>,
    pub critical_relation: Option<String>,
    pub reason: Option<&'static str>,
}

impl PlanarVerdict {
    fn positive_kind(case_id: u8) -> (PlanarVerdictKind, PlanarVerdictKind) {
        match case_id {
            7 => (PlanarVerdictKind::CenterForAllKappa, PlanarVerdictKind::NoPeriodicOrbit),
            8 => (PlanarVerdictKind::VerticalHopf, PlanarVerdictKind::NoPeriodicOrbit),
            9 | 10 => (PlanarVerdictKind::SupercriticalHopf, PlanarVerdictKind::NoAndronovHopf),
            _ => (PlanarVerdictKind::NoPeriodicOrbit, PlanarVerdictKind::NoPeriodicOrbit),
        }
    }

    /// Recomputes the verdict from the recorded witness.
    pub fn verdict_from_witness(&self) -> PlanarVerdictKind {
        if self.reason.is_some() {
            return PlanarVerdictKind::NoPeriodicOrbit;
        }
        let Some(case) = self.case else {
            return PlanarVerdictKind::NoPeriodicOrbit;
        };
        let (yes, no) = Self::positive_kind(case.case_id);
        let mut branches: Vec<u8> = self.witness.iter().map(|c| c.branch).collect();
        branches.dedup();
        let any = branches
            .iter()
            .any(|&b| self.witness.iter().filter(|c| c.branch == b).all(|c| c.holds));
        if any {
            yes
        } else {
            no
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.verdict_from_witness() == self.verdict
    }
}

fn ratio(p: i64, q: i64) -> Option<Q> {
    (q != 0).then(|| Q::new(p.into(), q.into()))
}

/// `lhs < rhs` with undefined ratios counting as violated.
fn less(lhs: Option<Q>, rhs: Option<Q>) -> bool {
    matches!((lhs, rhs), (Some(a), Some(b)) if a < b)
}

fn half_sum(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    Some((a? + b?) / qi(2))
}

fn case_conditions(case_id: u8, c: [i64; 3], d: [i64; 3]) -> Vec<Condition> {
    let [c1, c2, c3] = c;
    let [d1, d2, d3] = d;
    let mut w = Vec::new();
    let mut push = |branch: u8, text: &str, holds: bool| w.push(Condition { branch, text: text.to_string(), holds });
    match case_id {
        7 => {
            push(0, "c3 = 0", c3 == 0);
            push(0, "d1 = 0", d1 == 0);
            push(0, "sgn c1 = -sgn c2", c1.signum() == -c2.signum());
            push(0, "-sgn c2 = -sgn d3", c2.signum() == d3.signum());
            push(0, "-sgn d3 = sgn d2", -d3.signum() == d2.signum());
            push(0, "sgn c1 != 0", c1 != 0);
        }
        8 => {
            push(0, "c1 > 0", c1 > 0);
            push(0, "c2 = -1", c2 == -1);
            push(0, "c3 > 0", c3 > 0);
            push(0, "d1 > 0", d1 > 0);
            push(0, "d2 = -1", d2 == -1);
            push(0, "d3 >= 0", d3 >= 0);
            push(0, "d3/c3 < 1", less(ratio(d3, c3), Some(Q::one())));
            push(0, "1 < d1/c1", less(Some(Q::one()), ratio(d1, c1)));
        }
        9 => {
            push(0, "c1 > 0", c1 > 0);
            push(0, "c2 = -1", c2 == -1);
            push(0, "c3 > 0", c3 > 0);
            push(0, "d1 > 0", d1 > 0);
            push(0, "d2 >= -1", d2 >= -1);
            push(0, "d3 >= -1", d3 >= -1);
            push(0, "(d3/c3 + d1/c1)/2 < d2/c2", less(half_sum(ratio(d3, c3), ratio(d1, c1)), ratio(d2, c2)));
            push(0, "d2/c2 < d1/c1", less(ratio(d2, c2), ratio(d1, c1)));
            push(1, "c1 > 0", c1 > 0);
            push(1, "c2 = -1", c2 == -1);
            push(1, "c3 = 0", c3 == 0);
            push(1, "d1 > 0", d1 > 0);
            push(1, "d2 >= -1", d2 >= -1);
            push(1, "d3 = -1", d3 == -1);
            push(1, "d2/c2 < d1/c1", less(ratio(d2, c2), ratio(d1, c1)));
        }
        10 => {
            push(0, "c1 > 0", c1 > 0);
            push(0, "c2 = -1", c2 == -1);
            push(0, "c3 > 0", c3 > 0);
            push(0, "d1 > 0", d1 > 0);
            push(0, "d2 = -1", d2 == -1);
            push(0, "d3 >= 0", d3 >= 0);
            push(0, "(d3/c3 + d1/c1)/2 < d2/c2", less(half_sum(ratio(d3, c3), ratio(d1, c1)), ratio(d2, c2)));
            push(0, "d2/c2 < d1/c1", less(ratio(d2, c2), ratio(d1, c1)));
        }
        _ => {}
    }
    w
}

/// Verdict of the ten-case theorem for a planar three-reaction quadratic network.
pub fn theorem_verdict_planar(net: &ReactionNetwork) -> Result<PlanarVerdict> {
    planar_precondition(net)?;
    let case = source_case(net)?;
    let (c, d) = match case {
        Some(sc) => {
            let (ix, iy) = if sc.swapped { (1, 0) } else { (0, 1) };
            let g = net.stoich_matrix();
            (sc.order.map(|j| g[ix][j]), sc.order.map(|j| g[iy][j]))
        }
        None => ([0; 3], [0; 3]),
    };
    let mut v = PlanarVerdict {
        case,
        verdict: PlanarVerdictKind::NoPeriodicOrbit,
        c,
        d,
        witness: Vec::new(),
        critical_relation: None,
        reason: None,
    };
    if stoich::rank(net) != 2 {
        v.reason = Some("rank_not_two");
        return Ok(v);
    }
    if !stoich::dynamically_nontrivial(net).nontrivial {
        v.reason = Some("dynamically_trivial");
        return Ok(v);
    }
    let Some(sc) = case else {
        v.reason = Some("sources_collinear");
        return Ok(v);
    };
    v.witness = case_conditions(sc.case_id, c, d);
    v.verdict = v.verdict_from_witness();
    v.critical_relation = match v.verdict {
        PlanarVerdictKind::VerticalHopf => Some(format!(
            "{}·κ{} + ({})·κ{} = 0",
            c[0],
            sc.order[0] + 1,
            d[1],
            sc.order[1] + 1
        )),
        PlanarVerdictKind::SupercriticalHopf => Some("tr J = 0 at the positive equilibrium".into()),
        _ => None,
    };
    Ok(v)
}

/// Exhaustive scan of planar networks with the sources of one case (in the
/// listed order) and targets up to a molecularity bound.
#[derive(Debug, Clone)]
pub struct Census {
    pub case_id: u8,
    pub max_target_molecularity: i64,
    pub scanned: usize,
    pub positives: Vec<(ReactionNetwork, PlanarVerdict)>,
}

pub fn planar_census(case_id: u8, max_target_molecularity: i64) -> Result<Census> {
    if !(1..=10).contains(&case_id) || max_target_molecularity < 0 {
        return Err(Error::Precondition("case id in 1..=10 and a nonnegative bound".into()));
    }
    let sources = CASE_SOURCES[case_id as usize - 1];
    let mut targets = Vec::new();
    for a in 0..=max_target_molecularity {
        for b in 0..=max_target_molecularity - a {
            targets.push([a, b]);
        }
    }
    let mut out = Census { case_id, max_target_molecularity, scanned: 0, positives: Vec::new() };
    let names = standard_names(2);
    for t1 in &targets {
        for t2 in &targets {
            for t3 in &targets {
                let t = [t1, t2, t3];
                if (0..3).any(|i| *t[i] == sources[i]) {
                    continue;
                }
                let rx: Vec<(Complex, Complex)> = (0..3)
                    .map(|i| (Complex::new(sources[i].to_vec()).unwrap(), Complex::new(t[i].to_vec()).unwrap()))
                    .collect();
                let net = ReactionNetwork::from_complexes(names.clone(), &rx)?;
                out.scanned += 1;
                let v = theorem_verdict_planar(&net)?;
                if matches!(
                    v.verdict,
                    PlanarVerdictKind::SupercriticalHopf
                        | PlanarVerdictKind::VerticalHopf
                        | PlanarVerdictKind::CenterForAllKappa
                ) {
                    out.positives.push((net, v));
                }
            }
        }
    }
    Ok(out)
}

/// `κ_i(t) = scale_i · t^{power_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaPath {
    pub scale: Vec<f64>,
    pub power: Vec<i32>,
}

impl KappaPath {
    pub fn new(scale: Vec<f64>, power: Vec<i32>) -> Result<Self> {
        if scale.len() != power.len() || scale.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::Precondition("path scales must be positive".into()));
        }
        Ok(Self { scale, power })
    }

    /// Parses `k1=t,k2=1,k3=2*t^2`; unnamed rates default to 1.
    pub fn parse(spec: &str, m: usize) -> Result<Self> {
        let mut scale = vec![1.0; m];
        let mut power = vec![0; m];
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let bad = || Error::Precondition(format!("bad path entry '{}'", item));
            let (lhs, rhs) = item.split_once('=').ok_or_else(bad)?;
            let idx: usize = lhs.trim().trim_start_matches(['k', 'K']).parse().map_err(|_| bad())?;
            if idx == 0 || idx > m {
                return Err(bad());
            }
            let rhs = rhs.trim();
            let (coef, var) = match rhs.split_once('*') {
                Some((a, b)) => (a.trim(), Some(b.trim())),
                None if rhs.starts_with('t') => ("1", Some(rhs)),
                None => (rhs, None),
            };
            let s = crate::network::parse_rational(coef).map(|q| q_to_f64(&q)).ok_or_else(bad)?;
            let p = match var {
                None => 0,
                Some("t") => 1,
                Some(v) => v.strip_prefix("t^").and_then(|e| e.parse().ok()).ok_or_else(bad)?,
            };
            scale[idx - 1] = s;
            power[idx - 1] = p;
        }
        Self::new(scale, power)
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        self.scale.iter().zip(&self.power).map(|(s, &p)| s * t.powi(p)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopfKind {
    Supercritical,
    Subcritical,
    Degenerate,
    Vertical,
}

impl HopfKind {
    pub fn name(&self) -> &'static str {
        match self {
            HopfKind::Supercritical => "supercritical",
            HopfKind::Subcritical => "subcritical",
            HopfKind::Degenerate => "degenerate",
            HopfKind::Vertical => "vertical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocalValue {
    /// First focal value in relative coordinates with time scaled to `ω = 1`.
    pub l1: f64,
    pub omega: f64,
    /// The vector field divided by one species is affine.
    pub vertical: bool,
    /// Columns map normal-form coordinates to relative deviations `(x−x̄)/x̄`.
    pub frame: [[f64; 2]; 2],
}

impl FocalValue {
    pub fn kind(&self) -> HopfKind {
        if self.vertical {
            HopfKind::Vertical
        } else if self.l1 < -1e-10 {
            HopfKind::Supercritical
        } else if self.l1 > 1e-10 {
            HopfKind::Subcritical
        } else {
            HopfKind::Degenerate
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopfPoint {
    pub kappa_star: Vec<f64>,
    pub parameter: Option<f64>,
    pub equilibrium: EquilibriumRecord,
    /// Trace from the closed-form planar expression.
    pub trace_residual: f64,
    pub det_value: f64,
    pub l1: f64,
    pub classification: HopfKind,
}

/// True when some species divides every monomial and the quotient is affine.
pub fn affine_after_division(net: &ReactionNetwork) -> bool {
    (0..net.n_species()).any(|s| {
        (0..net.n_reactions()).all(|j| net.source_entry(s, j) >= 1 && net.source(j).molecularity() <= 2)
    })
}

/// Relative-coordinate expansion `ξ̇_i = Σ_j Γ_ij κ_j x̄^{a_j} Π(1+ξ)^{a_j} / x̄_i`.
fn relative_expansion(sys: &MassActionSystem, x: &[f64], deg: usize) -> [Poly2; 2] {
    let net = sys.network();
    let kappa = sys.kappa();
    let mut out = [Poly2::zero(deg), Poly2::zero(deg)];
    for j in 0..net.n_reactions() {
        let a = net.source_entry(0, j);
        let b = net.source_entry(1, j);
        let w = kappa[j] * crate::network::powi(x[0], a) * crate::network::powi(x[1], b);
        let mono = Poly2::affine(deg, 1.0, 1.0, 0.0)
            .powi(a as u32)
            .mul(&Poly2::affine(deg, 1.0, 0.0, 1.0).powi(b as u32));
        for (i, o) in out.iter_mut().enumerate() {
            let g = net.stoich_entry(i, j);
            if g != 0 {
                o.add_scaled(&mono, g as f64 * w / x[i]);
            }
        }
    }
    out
}

/// First focal value at a planar equilibrium with zero trace and positive
/// determinant.
pub fn first_lyapunov_coefficient(sys: &MassActionSystem, eq: &EquilibriumRecord) -> Result<FocalValue> {
    let net = sys.network();
    if net.n_species() != 2 {
        return Err(Error::Precondition("focal value needs a planar system".into()));
    }
    let x = &eq.x_bar;
    let [p1, p2] = relative_expansion(sys, x, 3);
    let (p, q, r, s) = (p1.coeff(1, 0), p1.coeff(0, 1), p2.coeff(1, 0), p2.coeff(0, 1));
    let scale = p.abs() + q.abs() + r.abs() + s.abs();
    let det = p * s - q * r;
    if !(det > 0.0) || (p + s).abs() > 1e-6 * scale {
        return Err(Error::Precondition("needs zero trace and positive determinant".into()));
    }
    let omega = det.sqrt();
    let vertical = affine_after_division(net);
    let (p, q) = (0.5 * (p - s) / omega, q / omega);
    let n1 = p1.without_low_order(2).scale(1.0 / omega);
    let n2 = p2.without_low_order(2).scale(1.0 / omega);
    // (ξ, η) = T (u, v) with T = [[0, q], [1, −p]]
    let xi = Poly2::affine(3, 0.0, 0.0, q);
    let eta = Poly2::affine(3, 0.0, 1.0, -p);
    let m1 = n1.compose(&xi, &eta);
    let m2 = n2.compose(&xi, &eta);
    let f = m1.scale(p / q).add(&m2);
    let g = m1.scale(1.0 / q);
    let d = |h: &Poly2, i, j| h.derivative_at_origin(i, j);
    let (fxx, fxy, fyy) = (d(&f, 2, 0), d(&f, 1, 1), d(&f, 0, 2));
    let (gxx, gxy, gyy) = (d(&g, 2, 0), d(&g, 1, 1), d(&g, 0, 2));
    let cubic = d(&f, 3, 0) + d(&f, 1, 2) + d(&g, 2, 1) + d(&g, 0, 3);
    let quad = fxy * (fxx + fyy) - gxy * (gxx + gyy) - fxx * gxx + fyy * gyy;
    let l1 = if vertical { 0.0 } else { (cubic + quad) / 16.0 };
    Ok(FocalValue { l1, omega, vertical, frame: [[0.0, q], [1.0, -p]] })
}

fn planar_state(sys: &MassActionSystem) -> Result<(EquilibriumRecord, f64, f64, f64)> {
    let eq = equilibria::planar_equilibrium(sys)?.ok_or(Error::NoPositiveEquilibrium)?;
    let j = jacobian::jacobian_at(sys, &eq.x_bar);
    let scale = j.iter().flatten().fold(0.0f64, |a, b| a + b.abs());
    Ok((eq, j[0][0] + j[1][1], dense::det(&j), scale))
}

/// Locates `tr J = 0` along a rate path by bracketing and bisection.
pub fn find_hopf_point(net: &ReactionNetwork, path: &KappaPath, t_lo: f64, t_hi: f64) -> Result<Option<HopfPoint>> {
    if net.n_species() != 2 || net.n_reactions() != 3 || stoich::rank(net) != 2 {
        return Err(Error::Precondition("needs a planar three-reaction rank-two network".into()));
    }
    if !stoich::dynamically_nontrivial(net).nontrivial {
        return Err(Error::Precondition("network is dynamically trivial".into()));
    }
    if path.scale.len() != 3 || !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(Error::Precondition("needs three path entries and 0 < t_lo < t_hi".into()));
    }
    let probe = |t: f64| -> Option<(f64, f64, f64)> {
        let sys = MassActionSystem::from_f64(net.clone(), &path.at(t)).ok()?;
        let (_, tr, det, scale) = planar_state(&sys).ok()?;
        Some((tr / scale, det, scale))
    };
    let steps = 400;
    let (la, lb) = (t_lo.ln(), t_hi.ln());
    let ts: Vec<f64> = (0..=steps).map(|i| (la + (lb - la) * i as f64 / steps as f64).exp()).collect();
    let mut prev: Option<(f64, (f64, f64, f64))> = None;
    for &t in &ts {
        let cur = probe(t);
        if let Some((tr, det, _)) = cur {
            if tr == 0.0 && det > 0.0 {
                let sys = MassActionSystem::from_f64(net.clone(), &path.at(t))?;
                return hopf_point_at(&sys, Some(t)).map(Some);
            }
        }
        if let (Some((t0, s0)), Some(s1)) = (prev, cur) {
            if s0.1 > 0.0 && s1.1 > 0.0 && (s0.0 > 0.0) != (s1.0 > 0.0) {
                let (mut a, mut b) = (t0.ln(), t.ln());
                let neg_at_a = s0.0 < 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if mid == a || mid == b {
                        break;
                    }
                    match probe(mid.exp()) {
                        Some((tr, _, _)) if tr == 0.0 => {
                            a = mid;
                            b = mid;
                            break;
                        }
                        Some((tr, _, _)) if (tr < 0.0) == neg_at_a => a = mid,
                        Some(_) => b = mid,
                        None => break,
                    }
                }
                let t_star = (0.5 * (a + b)).exp();
                let sys = MassActionSystem::from_f64(net.clone(), &path.at(t_star))?;
                return hopf_point_at(&sys, Some(t_star)).map(Some);
            }
        }
        prev = cur.map(|s| (t, s));
    }
    Ok(None)
}

/// Assembles a Hopf point for a system already at (numerically) zero trace.
pub fn hopf_point_at(sys: &MassActionSystem, parameter: Option<f64>) -> Result<HopfPoint> {
    let (eq, _, det, _) = planar_state(sys)?;
    if !(det > 0.0) {
        return Err(Error::Precondition("determinant is not positive at the candidate".into()));
    }
    let trace = jacobian::planar_trace(sys, &eq)?;
    let fv = first_lyapunov_coefficient(sys, &eq)?;
    Ok(HopfPoint {
        kappa_star: sys.kappa(),
        parameter,
        equilibrium: eq,
        trace_residual: trace,
        det_value: det,
        l1: fv.l1,
        classification: fv.kind(),
    })
}

/// Exact rate constants putting the equilibrium at `(1, −B/A)` with zero
/// trace, when `A·B < 0` and the kernel of `Γ` is positive.
pub fn hopf_kappa(net: &ReactionNetwork) -> Result<Option<(Vec<Q>, Vec<Q>)>> {
    let (a, b) = jacobian::trace_coefficients(net)?;
    let u = stoich::kernel_cross(net).expect("rank two");
    let sign = if u.iter().all(|&v| v > 0) {
        1
    } else if u.iter().all(|&v| v < 0) {
        -1
    } else {
        return Ok(None);
    };
    // tr J = μ(A/x̄ + B/ȳ) vanishes at ȳ = −B x̄/A
    if a == 0 || b == 0 || (a > 0) == (b > 0) {
        return Ok(None);
    }
    let y = Q::new((-b).into(), a.into());
    let x = vec![Q::one(), y.clone()];
    let kappa = (0..3)
        .map(|j| {
            let e = net.source_entry(1, j);
            let mut den = Q::one();
            for _ in 0..e {
                den *= &y;
            }
            qi(u[j] * sign) / den
        })
        .collect();
    Ok(Some((kappa, x)))
}

/// The Hopf point of a planar network whose closed-form trace can vanish.
pub fn exact_hopf_point(net: &ReactionNetwork) -> Result<Option<HopfPoint>> {
    let Some((kappa, x)) = hopf_kappa(net)? else {
        return Ok(None);
    };
    let rates = kappa.into_iter().map(crate::network::Rate::Exact).collect();
    let sys = MassActionSystem::new(net.clone(), rates)?;
    let j = jacobian::jacobian_exact(&sys, &x)?;
    let tr = &j[0][0] + &j[1][1];
    let det = &j[0][0] * &j[1][1] - &j[0][1] * &j[1][0];
    if !tr.is_zero() || !det.is_positive() {
        return Ok(None);
    }
    let eq = EquilibriumRecord::from_exact(&sys, &x);
    let fv = first_lyapunov_coefficient(&sys, &eq)?;
    Ok(Some(HopfPoint {
        kappa_star: sys.kappa(),
        parameter: None,
        trace_residual: jacobian::planar_trace(&sys, &eq)?,
        det_value: q_to_f64(&det),
        equilibrium: eq,
        l1: fv.l1,
        classification: fv.kind(),
    }))
}

/// `2X → 4X+3Y+Z, X+Y → 0, Z → X`, with classes `x − y + z = C`.
pub fn octomolecular_network() -> ReactionNetwork {
    ReactionNetwork::from_columns(
        &["X", "Y", "Z"],
        &[(&[2, 0, 0], &[4, 3, 1]), (&[1, 1, 0], &[0, 0, 0]), (&[0, 0, 1], &[1, 0, 0])],
    )
    .expect("valid network")
}

/// Rates `(κ1, κ2, κ3)` of the Bogdanov–Takens point of the octomolecular network.
pub fn octomolecular_bt_kappa(kappa2: f64, c: f64) -> [f64; 3] {
    let s6 = 6.0f64.sqrt();
    [kappa2 * (3.0 + s6) / 3.0, kappa2, kappa2 * (-2.0 * c) / (3.0 + s6)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct BtResidual {
    pub trace: f64,
    pub det: f64,
    pub equilibrium: EquilibriumRecord,
    /// Positive equilibria found on the class.
    pub count: usize,
}

/// `|tr J_red|` and `|det J_red|` at the class equilibrium closest to a
/// double-zero eigenvalue.
pub fn bogdanov_takens_residual(sys: &MassActionSystem, class: &StoichiometricClass) -> Result<BtResidual> {
    let eqs = equilibria::equilibria_on_curve(sys, class)?;
    let mut best: Option<BtResidual> = None;
    for eq in &eqs {
        let rj = jacobian::reduced_jacobian(sys, eq)?;
        let cand = BtResidual { trace: rj.trace.abs(), det: rj.det.abs(), equilibrium: eq.clone(), count: eqs.len() };
        if best.as_ref().map_or(true, |b| cand.trace + cand.det < b.trace + b.det) {
            best = Some(cand);
        }
    }
    best.ok_or(Error::NoPositiveEquilibrium)
}

/// Residual check at the closed-form point, with `κ1` optionally scaled.
pub fn octomolecular_bt_check(kappa2: f64, c: f64, kappa1_factor: f64) -> Result<BtResidual> {
    if !(kappa2 > 0.0) || !(c < 0.0) {
        return Err(Error::Precondition("needs κ2 > 0 and C < 0".into()));
    }
    let mut k = octomolecular_bt_kappa(kappa2, c);
    k[0] *= kappa1_factor;
    let net = octomolecular_network();
    let sys = MassActionSystem::from_f64(net.clone(), &k)?;
    let class = StoichiometricClass::from_laws(&net, &[vec![1, -1, 1]], &[c])?;
    bogdanov_takens_residual(&sys, &class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{parse_network, qr};

    fn net(s: &str) -> ReactionNetwork {
        parse_network(s).unwrap()
    }

    #[test]
    fn source_cases() {
        assert_eq!(source_case(&net("2X -> 3X; X + Y -> 2Y; Y -> 0")).unwrap().unwrap().case_id, 9);
        assert_eq!(source_case(&net("X -> 2X; X + Y -> 2Y; Y -> 0")).unwrap().unwrap().case_id, 7);
        assert_eq!(source_case(&net("0 -> X; X -> 2X + Y; 2X -> Y")).unwrap(), None);
        let sc = source_case(&net("Y -> 0; 2Y -> 3Y; X + Y -> 2X")).unwrap().unwrap();
        assert_eq!((sc.case_id, sc.swapped, sc.order), (8, false, [1, 2, 0]));
    }

    #[test]
    fn lotka_and_tetra_verdicts() {
        let v = theorem_verdict_planar(&net("X -> 2X; X + Y -> 2Y; Y -> 0")).unwrap();
        assert_eq!(v.verdict, PlanarVerdictKind::CenterForAllKappa);
        for d in 0..4 {
            let t = crate::classify::Family::Tetra { d }.template();
            let v = theorem_verdict_planar(&t).unwrap();
            assert_eq!(v.verdict, PlanarVerdictKind::SupercriticalHopf, "d = {}", d);
            assert!(v.is_consistent());
        }
        let open = theorem_verdict_planar(&net("2X -> 3X + 2Y; X + Y -> 0; Y -> X + Y")).unwrap();
        assert_eq!(open.case.unwrap().case_id, 9);
        assert_eq!(open.verdict, PlanarVerdictKind::NoAndronovHopf);
    }

    #[test]
    fn vertical_case() {
        let t = crate::classify::Family::PentaCase8 { c: 2, d: 1 }.template();
        let v = theorem_verdict_planar(&t).unwrap();
        assert_eq!(v.verdict, PlanarVerdictKind::VerticalHopf);
        assert_eq!(v.critical_relation.as_deref(), Some("1·κ1 + (-1)·κ2 = 0"));
        let hp = find_hopf_point(&t, &KappaPath::parse("k1=t", 3).unwrap(), 0.1, 10.0).unwrap().unwrap();
        assert!((hp.parameter.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(hp.classification, HopfKind::Vertical);
    }

    #[test]
    fn tetra_hopf_point() {
        let t = crate::classify::Family::Tetra { d: 0 }.template();
        let hp = find_hopf_point(&t, &KappaPath::parse("k1=t,k2=1,k3=1", 3).unwrap(), 0.1, 10.0).unwrap().unwrap();
        assert!((hp.parameter.unwrap() - 1.0).abs() < 1e-10);
        assert!(hp.det_value > 0.0 && hp.trace_residual.abs() < 1e-10);
        assert_eq!(hp.classification, HopfKind::Supercritical);
        let ex = exact_hopf_point(&t).unwrap().unwrap();
        assert!(ex.trace_residual.abs() < 1e-14);
        assert!((ex.l1 - hp.l1).abs() < 1e-6 * hp.l1.abs());
    }

    #[test]
    fn selkov_and_lva_paths() {
        let s = net("0 -> X; X + 2Y -> 3Y; Y -> 0");
        let (k1, k3) = (2.0, 1.5);
        let path = KappaPath::new(vec![k1, 1.0, k3], vec![0, 1, 0]).unwrap();
        let hp = find_hopf_point(&s, &path, 1e-2, 1e2).unwrap().unwrap();
        let expect = k3 * k3 * k3 / (k1 * k1);
        assert!((hp.parameter.unwrap() - expect).abs() < 1e-9 * expect);
        let lva = net("2X -> 3X; X + Y -> 2Y; Y -> 0");
        for spec in ["k1=t", "k2=t", "k3=t"] {
            let p = KappaPath::parse(spec, 3).unwrap();
            assert!(find_hopf_point(&lva, &p, 1e-3, 1e3).unwrap().is_none());
        }
    }

    #[test]
    fn path_parsing() {
        let p = KappaPath::parse("k1=t, k3=2*t^2", 3).unwrap();
        assert_eq!(p.at(3.0), vec![3.0, 1.0, 18.0]);
        assert!(KappaPath::parse("k4=t", 3).is_err());
        assert!(KappaPath::parse("k1=-1", 3).is_err());
    }

    #[test]
    fn hopf_kappa_is_exact() {
        let t = crate::classify::Family::Tetra { d: 1 }.template();
        let (k, x) = hopf_kappa(&t).unwrap().unwrap();
        let sys = MassActionSystem::new(t, k.into_iter().map(crate::network::Rate::Exact).collect()).unwrap();
        assert!(sys.rhs_exact(&x).unwrap().iter().all(|v| v.is_zero()));
        assert!(x[1] > qr(0, 1));
    }

    #[test]
    fn bt_residuals() {
        for (k2, c) in [(1.0, -1.0), (2.0, -3.0)] {
            let r = octomolecular_bt_check(k2, c, 1.0).unwrap();
            assert!(r.trace < 1e-9 && r.det < 1e-9, "{:?}", r);
        }
        let r = octomolecular_bt_check(1.0, -1.0, 1.01).unwrap();
        assert!(r.trace.max(r.det) > 1e-3, "{:?}", r);
        assert!(octomolecular_bt_check(1.0, 1.0, 1.0).is_err());
    }
}
