//! Dormand–Prince integration, Poincaré return maps, orbit classification,
//! first integrals and the Lifted-LVA predator–prey coordinates.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;


use crate::classify::{Family, FamilyTag};
use crate::equilibria::{self, ClassCoordinates, EquilibriumRecord, StoichiometricClass};
use crate::error::{Error, Result};
use crate::hopf::KappaPath;
use crate::jacobian;
use crate::network::{rhs_with, MassActionSystem, ReactionNetwork};

pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]);
    /// States the integrator may step to.
    fn is_admissible(&self, x: &[f64]) -> bool {
        x.iter().all(|v| *v >= 0.0)
    }
}

/// Mass-action vector field on the full state space.
#[derive(Debug, Clone)]
pub struct MassActionField {
    net: ReactionNetwork,
    kappa: Vec<f64>,
}

impl MassActionField {
    pub fn new(sys: &MassActionSystem) -> Self {
        Self { net: sys.network().clone(), kappa: sys.kappa() }
    }
}

impl VectorField for MassActionField {
    fn dim(&self) -> usize {
        self.net.n_species()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        rhs_with(&self.net, &self.kappa, x, out);
    }
}

/// Mass-action dynamics in class coordinates `x = offset + Γ̃ s`.
#[derive(Debug, Clone)]
pub struct ClassRestricted {
    field: MassActionField,
    coords: ClassCoordinates,
}

impl ClassRestricted {
    pub fn new(sys: &MassActionSystem, class: &StoichiometricClass) -> Result<Self> {
        Ok(Self { field: MassActionField::new(sys), coords: class.coordinates(sys.network())? })
    }

    pub fn through_point(sys: &MassActionSystem, x: &[f64]) -> Result<Self> {
        Self::new(sys, &StoichiometricClass::through_point(sys.network(), x))
    }

    pub fn coords(&self) -> &ClassCoordinates {
        &self.coords
    }
}

impl VectorField for ClassRestricted {
    fn dim(&self) -> usize {
        self.coords.rank()
    }

    fn eval(&self, s: &[f64], out: &mut [f64]) {
        let x = self.coords.to_state(s);
        let mut dx = vec![0.0; x.len()];
        self.field.eval(&x, &mut dx);
        for (o, &p) in out.iter_mut().zip(&self.coords.privileged) {
            *o = dx[p];
        }
    }

    fn is_admissible(&self, s: &[f64]) -> bool {
        self.coords.to_state(s).iter().all(|v| *v >= 0.0)
    }
}

/// `ẋ_i = x_i (r_i + Σ_j b_ij x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LotkaVolterra {
    pub r: Vec<f64>,
    pub b: Vec<Vec<f64>>,
}

impl VectorField for LotkaVolterra {
    fn dim(&self) -> usize {
        self.r.len()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.r.len() {
            let s: f64 = self.b[i].iter().zip(x).map(|(b, x)| b * x).sum();
            out[i] = x[i] * (self.r[i] + s);
        }
    }
}

/// Time-reversed field.
pub struct Reversed<'a, F: VectorField>(pub &'a F);

impl<F: VectorField> VectorField for Reversed<'_, F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        self.0.eval(x, out);
        out.iter_mut().for_each(|v| *v = -*v);
    }

    fn is_admissible(&self, x: &[f64]) -> bool {
        self.0.is_admissible(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    pub blowup: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, h0: None, h_max: f64::INFINITY, max_steps: 5_000_000, blowup: 1e12 }
    }
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub steps: usize,
    pub rejected: usize,
    pub tol: f64,
    /// State norm exceeded the blow-up bound; the trajectory is truncated.
    pub blew_up: bool,
    /// Step budget exhausted or step size underflow.
    pub truncated: bool,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step with its stages, for dense output.
#[derive(Debug, Clone)]
struct Step {
    t0: f64,
    h: f64,
    y0: Vec<f64>,
    y1: Vec<f64>,
    k: [Vec<f64>; 7],
}

impl Step {
    fn dense(&self, theta: f64) -> Vec<f64> {
        let t1 = 1.0 - theta;
        (0..self.y0.len())
            .map(|i| {
                let r2 = self.y1[i] - self.y0[i];
                let r3 = self.h * self.k[0][i] - r2;
                let r4 = r2 - self.h * self.k[6][i] - r3;
                let r5 = self.h * (0..7).map(|s| D[s] * self.k[s][i]).sum::<f64>();
                self.y0[i] + theta * (r2 + t1 * (r3 + theta * (r4 + t1 * r5)))
            })
            .collect()
    }
}

/// Dormand–Prince stages; returns the fifth-order solution and the error estimate.
fn stages<F: VectorField>(f: &F, y: &[f64], k1: &[f64], h: f64, k: &mut [Vec<f64>; 7]) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    k[0].copy_from_slice(k1);
    let mut tmp = vec![0.0; n];
    for s in 1..7 {
        for i in 0..n {
            tmp[i] = y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
        }
        f.eval(&tmp, &mut k[s]);
    }
    let y1 = tmp;
    let err: Vec<f64> = (0..n).map(|i| h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>()).collect();
    (y1, err)
}

struct Stepper<'a, F: VectorField> {
    f: &'a F,
    t: f64,
    y: Vec<f64>,
    k1: Vec<f64>,
    h: f64,
    opts: IntegratorOptions,
    steps: usize,
    rejected: usize,
}

enum StepOutcome {
    Accepted(Step),
    BlowUp,
    Stalled,
}

impl<'a, F: VectorField> Stepper<'a, F> {
    fn new(f: &'a F, x0: &[f64], opts: IntegratorOptions) -> Self {
        let mut k1 = vec![0.0; x0.len()];
        f.eval(x0, &mut k1);
        let scale = x0.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-3);
        let speed = k1.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-12);
        let h = opts.h0.unwrap_or((1e-3 * scale / speed).min(1e-2)).min(opts.h_max);
        Self { f, t: 0.0, y: x0.to_vec(), k1, h, opts, steps: 0, rejected: 0 }
    }

    fn step(&mut self, t_limit: f64) -> StepOutcome {
        let n = self.y.len();
        loop {
            if self.steps + self.rejected >= self.opts.max_steps {
                return StepOutcome::Stalled;
            }
            let h = self.h.min(t_limit - self.t).min(self.opts.h_max);
            if !(h > 1e-14 * self.t.abs().max(1.0)) {
                return StepOutcome::Stalled;
            }
            let mut k: [Vec<f64>; 7] = core::array::from_fn(|_| vec![0.0; n]);
            let (y1, e) = stages(self.f, &self.y, &self.k1, h, &mut k);
            let err = (e
                .iter()
                .zip(self.y.iter().zip(&y1))
                .map(|(ei, (a, b))| {
                    let sc = self.opts.atol + self.opts.rtol * a.abs().max(b.abs());
                    (ei / sc) * (ei / sc)
                })
                .sum::<f64>()
                / n as f64)
                .sqrt();
            let finite = y1.iter().all(|v| v.is_finite()) && err.is_finite();
            if !finite || err > 1.0 || !self.f.is_admissible(&y1) {
                self.rejected += 1;
                self.h = if finite && err > 1.0 { h * (0.9 * err.powf(-0.2)).max(0.2) } else { 0.5 * h };
                continue;
            }
            let step = Step { t0: self.t, h, y0: self.y.clone(), y1: y1.clone(), k: k.clone() };
            self.steps += 1;
            self.t += h;
            self.y = y1;
            self.k1 = k[6].clone();
            let fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
            self.h = h * fac;
            if self.y.iter().map(|v| v * v).sum::<f64>().sqrt() > self.opts.blowup {
                return StepOutcome::BlowUp;
            }
            return StepOutcome::Accepted(step);
        }
    }
}

fn check_start<F: VectorField>(f: &F, x0: &[f64]) -> Result<()> {
    if x0.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x0.len() });
    }
    if !f.is_admissible(x0) || x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("initial state must be admissible".into()));
    }
    Ok(())
}

/// Adaptive order 5(4) integration over `[0, t_end]`, recording every step.
pub fn integrate<F: VectorField>(f: &F, x0: &[f64], t_end: f64, opts: IntegratorOptions) -> Result<Trajectory> {
    check_start(f, x0)?;
    if !(t_end > 0.0) {
        return Err(Error::Precondition("integration time must be positive".into()));
    }
    let mut st = Stepper::new(f, x0, opts);
    let mut tr = Trajectory { times: vec![0.0], states: vec![x0.to_vec()], tol: opts.rtol, ..Trajectory::default() };
    while st.t < t_end {
        match st.step(t_end) {
            StepOutcome::Accepted(_) => {
                tr.times.push(st.t);
                tr.states.push(st.y.clone());
            }
            StepOutcome::BlowUp => {
                tr.times.push(st.t);
                tr.states.push(st.y.clone());
                tr.blew_up = true;
                break;
            }
            StepOutcome::Stalled => {
                tr.truncated = true;
                break;
            }
        }
    }
    tr.steps = st.steps;
    tr.rejected = st.rejected;
    Ok(tr)
}

/// Integration sampled at the given increasing, nonnegative times.
pub fn integrate_grid<F: VectorField>(f: &F, x0: &[f64], grid: &[f64], opts: IntegratorOptions) -> Result<Trajectory> {
    check_start(f, x0)?;
    if grid.iter().any(|t| !(*t >= 0.0)) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("grid must be nonnegative and increasing".into()));
    }
    let mut tr = Trajectory { tol: opts.rtol, ..Trajectory::default() };
    let mut st = Stepper::new(f, x0, opts);
    let mut idx = 0;
    while idx < grid.len() && grid[idx] == 0.0 {
        tr.times.push(0.0);
        tr.states.push(x0.to_vec());
        idx += 1;
    }
    let t_end = grid.last().copied().unwrap_or(0.0);
    while idx < grid.len() {
        match st.step(t_end) {
            StepOutcome::Accepted(step) => {
                while idx < grid.len() && grid[idx] <= st.t {
                    let theta = ((grid[idx] - step.t0) / step.h).clamp(0.0, 1.0);
                    tr.times.push(grid[idx]);
                    tr.states.push(if grid[idx] == st.t { st.y.clone() } else { step.dense(theta) });
                    idx += 1;
                }
            }
            StepOutcome::BlowUp => {
                tr.blew_up = true;
                break;
            }
            StepOutcome::Stalled => {
                tr.truncated = true;
                break;
            }
        }
    }
    tr.steps = st.steps;
    tr.rejected = st.rejected;
    Ok(tr)
}

/// Returns of one starting radius on the section.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSample {
    pub r_in: f64,
    /// Radii of successive same-direction crossings.
    pub radii_out: Vec<f64>,
    pub times: Vec<f64>,
    /// Section-normal speed at each crossing.
    pub normal_speed: Vec<f64>,
    /// Fewer returns than requested within the time budget.
    pub non_returning: bool,
}

/// Half-line section `center + r·direction`, `r > 0`, in class coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMapSample {
    pub center: Vec<f64>,
    pub direction: Vec<f64>,
    pub samples: Vec<RadiusSample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnMapOptions {
    pub returns: usize,
    /// Time budget per return; derived from the linear frequency when unset.
    pub t_return: Option<f64>,
    pub integrator: IntegratorOptions,
}

impl Default for ReturnMapOptions {
    fn default() -> Self {
        Self { returns: 3, t_return: None, integrator: IntegratorOptions::default() }
    }
}

const MIN_NORMAL_SPEED: f64 = 1e-8;

/// Successive returns to the section `{c + r e1}` of a planar field.
fn section_returns<F: VectorField>(
    f: &F,
    center: &[f64],
    r_in: f64,
    returns: usize,
    t_return: f64,
    opts: IntegratorOptions,
) -> RadiusSample {
    let mut out = RadiusSample { r_in, radii_out: vec![], times: vec![], normal_speed: vec![], non_returning: false };
    let mut x0 = center.to_vec();
    x0[0] += r_in;
    let mut v = vec![0.0; f.dim()];
    f.eval(&x0, &mut v);
    let orient = v[1].signum();
    if v[1].abs() < MIN_NORMAL_SPEED || !f.is_admissible(&x0) {
        out.non_returning = true;
        return out;
    }
    let g = |y: &[f64]| orient * (y[1] - center[1]);
    let mut st = Stepper::new(f, &x0, opts);
    let t_end = t_return * returns as f64;
    while out.radii_out.len() < returns {
        let step = match st.step(t_end) {
            StepOutcome::Accepted(s) => s,
            _ => break,
        };
        let (g0, g1) = (g(&step.y0), g(&step.y1));
        if !(g0 < 0.0 && g1 >= 0.0) {
            continue;
        }
        // bisection on the dense output, then secant on exact sub-steps
        let (mut a, mut b) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if g(&step.dense(m)) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let sub = |tau: f64| -> Vec<f64> {
            if tau <= 0.0 {
                return step.y0.clone();
            }
            let mut k: [Vec<f64>; 7] = core::array::from_fn(|_| vec![0.0; step.y0.len()]);
            stages(f, &step.y0, &step.k[0], tau, &mut k).0
        };
        let mut t0 = 0.5 * (a + b) * step.h;
        let mut t1 = t0 * (1.0 + 1e-7) + 1e-14;
        let (mut f0, mut f1) = (g(&sub(t0)), g(&sub(t1)));
        for _ in 0..6 {
            if f1 == f0 {
                break;
            }
            let t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
            if !(t2 > 0.0 && t2 <= step.h * 1.5) {
                break;
            }
            t0 = t1;
            f0 = f1;
            t1 = t2;
            f1 = g(&sub(t1));
        }
        let y = sub(t1);
        let r = y[0] - center[0];
        if r <= 0.0 {
            continue;
        }
        f.eval(&y, &mut v);
        if v[1].abs() < MIN_NORMAL_SPEED {
            break;
        }
        out.radii_out.push(r);
        out.times.push(step.t0 + t1);
        out.normal_speed.push(v[1]);
    }
    out.non_returning = out.radii_out.len() < returns;
    out
}

fn linear_period(rj: &jacobian::ReducedJacobian) -> Option<f64> {
    let disc = rj.det - 0.25 * rj.trace * rj.trace;
    (disc > 0.0).then(|| 2.0 * core::f64::consts::PI / disc.sqrt())
}

/// Return map of a planar or class-restricted rank-two system around a
/// positive equilibrium.
pub fn return_map(
    sys: &MassActionSystem,
    eq: &EquilibriumRecord,
    radii: &[f64],
    opts: ReturnMapOptions,
) -> Result<ReturnMapSample> {
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Precondition("radii must be positive".into()));
    }
    if eq.x_bar.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Precondition("equilibrium must be positive".into()));
    }
    let field = ClassRestricted::through_point(sys, &eq.x_bar)?;
    if field.dim() != 2 {
        return Err(Error::Precondition("return maps need rank two".into()));
    }
    let center = field.coords().to_coords(&eq.x_bar);
    let rj = jacobian::reduced_jacobian(sys, eq)?;
    let t_return = opts.t_return.unwrap_or_else(|| linear_period(&rj).map_or(1e3, |p| 50.0 * p));
    let samples = radii
        .iter()
        .map(|&r| section_returns(&field, &center, r, opts.returns.max(1), t_return, opts.integrator))
        .collect();
    Ok(ReturnMapSample { center, direction: vec![1.0, 0.0], samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpiralDirection {
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrbitStructure {
    Center,
    StableCycle { radius: f64 },
    UnstableCycle { radius: f64 },
    Spiral(SpiralDirection),
    NonReturning,
    Indeterminate { relative_changes: Vec<f64> },
}

impl OrbitStructure {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitStructure::Center => "Center",
            OrbitStructure::StableCycle { .. } => "StableCycle",
            OrbitStructure::UnstableCycle { .. } => "UnstableCycle",
            OrbitStructure::Spiral(SpiralDirection::In) => "Spiral(in)",
            OrbitStructure::Spiral(SpiralDirection::Out) => "Spiral(out)",
            OrbitStructure::NonReturning => "NonReturning",
            OrbitStructure::Indeterminate { .. } => "Indeterminate",
        }
    }
}

impl ReturnMapSample {
    /// Largest relative change over all consecutive returns.
    pub fn max_relative_drift(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|s| {
                let mut prev = s.r_in;
                s.radii_out.iter().map(move |&r| {
                    let d = ((r - prev) / prev).abs();
                    prev = r;
                    d
                })
            })
            .fold(0.0, f64::max)
    }
}

/// Center, limit cycle or spiral from return-map samples.
pub fn classify_orbit_structure(sample: &ReturnMapSample, tol: f64) -> Result<OrbitStructure> {
    if sample.samples.len() < 5 {
        return Err(Error::Precondition("needs at least five radii".into()));
    }
    let mut s: Vec<&RadiusSample> = sample.samples.iter().collect();
    s.sort_by(|a, b| a.r_in.partial_cmp(&b.r_in).unwrap_or(core::cmp::Ordering::Equal));
    let returning: Vec<&&RadiusSample> = s.iter().filter(|x| !x.radii_out.is_empty()).collect();
    if returning.is_empty() {
        return Ok(OrbitStructure::NonReturning);
    }
    let first: Vec<f64> = returning.iter().map(|x| (x.radii_out[0] - x.r_in) / x.r_in).collect();
    let partial = returning.len() < s.len();
    let full_returns = s.iter().all(|x| x.radii_out.len() >= 3 && !x.non_returning);
    if full_returns && sample.max_relative_drift() < tol {
        return Ok(OrbitStructure::Center);
    }
    if !partial {
        for w in 0..first.len() - 1 {
            let (a, b) = (first[w], first[w + 1]);
            if (a > 0.0) != (b > 0.0) && a != 0.0 && b != 0.0 {
                let (ra, rb) = (returning[w].r_in, returning[w + 1].r_in);
                let radius = ra + (rb - ra) * a / (a - b);
                return Ok(if a > 0.0 {
                    OrbitStructure::StableCycle { radius }
                } else {
                    OrbitStructure::UnstableCycle { radius }
                });
            }
        }
    }
    if first.iter().all(|&d| d < 0.0) && !partial {
        return Ok(OrbitStructure::Spiral(SpiralDirection::In));
    }
    if first.iter().all(|&d| d > 0.0) {
        return Ok(OrbitStructure::Spiral(SpiralDirection::Out));
    }
    Ok(OrbitStructure::Indeterminate { relative_changes: first })
}

/// Closed-form first integrals and Lyapunov functions.
#[derive(Debug, Clone, PartialEq)]
pub enum Integral {
    /// `dκ2 x + κ2 y − κ3 log x − cκ1 log y`.
    GeneralisedLotka { c: f64, d: f64, k: [f64; 3] },
    /// `κ3 log x + κ1 log y + κ2 log z`.
    Ivanova { k: [f64; 3] },
    /// `dκ3 log x − κ1 log y + κ2 log z`.
    ThreeSpecies { d: f64, k: [f64; 3] },
    /// `κ2(v − v̄ log v) + κ3 C (w − w̄ log w)` with `v = y/x`, `w = 1/x`, `C = z − y`.
    LiftedLva { d: f64, k: [f64; 3] },
    /// `r1 log y − r2 log x + b12 y − b21 x` for `ẋ = x(r1 + b12 y)`, `ẏ = y(r2 + b21 x)`.
    LotkaVolterra2 { r: [f64; 2], b12: f64, b21: f64 },
    /// `w · x`.
    Linear { w: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservedQuantity {
    pub integral: Integral,
    /// Network index of each template species.
    pub species: Vec<usize>,
}

impl ConservedQuantity {
    pub fn for_family(tag: &FamilyTag, sys: &MassActionSystem) -> Result<Self> {
        if !tag.verify(sys.network()) {
            return Err(Error::FamilyMismatch(format!("{} does not match the network", tag.family.name())));
        }
        let kv = tag.template_rates(sys);
        let k = [kv[0], kv[1], kv[2]];
        let integral = match tag.family {
            Family::GeneralisedLotka { c, d } => Integral::GeneralisedLotka { c: c as f64, d: d as f64, k },
            Family::Ivanova => Integral::Ivanova { k },
            Family::ThreeSpecies { d, .. } => Integral::ThreeSpecies { d: d as f64, k },
            Family::LiftedLva { d } => Integral::LiftedLva { d: d as f64, k },
            f => return Err(Error::FamilyMismatch(format!("{} has no closed-form integral", f.name()))),
        };
        Ok(Self { integral, species: tag.species_perm.clone() })
    }

    /// Integral of a two-species Lotka–Volterra system without diagonal terms.
    pub fn lotka_volterra(sys: &MassActionSystem) -> Result<Self> {
        let lv = crate::stoich::lotka_volterra_form(sys)
            .filter(|lv| lv.r.len() == 2)
            .ok_or_else(|| Error::FamilyMismatch("not a planar Lotka–Volterra system".into()))?;
        let f = crate::network::q_to_f64;
        if !num_traits::Zero::is_zero(&lv.b[0][0]) || !num_traits::Zero::is_zero(&lv.b[1][1]) {
            return Err(Error::FamilyMismatch("diagonal interaction terms present".into()));
        }
        Ok(Self {
            integral: Integral::LotkaVolterra2 { r: [f(&lv.r[0]), f(&lv.r[1])], b12: f(&lv.b[0][1]), b21: f(&lv.b[1][0]) },
            species: vec![0, 1],
        })
    }

    pub fn linear(w: Vec<f64>) -> Self {
        let species = (0..w.len()).collect();
        Self { integral: Integral::Linear { w }, species }
    }

    pub fn eval(&self, state: &[f64]) -> f64 {
        let s = |i: usize| state[self.species[i]];
        match &self.integral {
            Integral::GeneralisedLotka { c, d, k } => {
                let (x, y) = (s(0), s(1));
                d * k[1] * x + k[1] * y - k[2] * x.ln() - c * k[0] * y.ln()
            }
            Integral::Ivanova { k } => k[2] * s(0).ln() + k[0] * s(1).ln() + k[1] * s(2).ln(),
            Integral::ThreeSpecies { d, k } => d * k[2] * s(0).ln() - k[0] * s(1).ln() + k[1] * s(2).ln(),
            Integral::LiftedLva { d, k } => {
                let (x, y, z) = (s(0), s(1), s(2));
                let cc = z - y;
                let (v, w) = (y / x, 1.0 / x);
                let vb = k[0] / k[1];
                let wb = (d * k[1] * k[1] - k[0] * k[2]) / (k[1] * k[2] * cc);
                k[1] * (v - vb * v.ln()) + k[2] * cc * (w - wb * w.ln())
            }
            Integral::LotkaVolterra2 { r, b12, b21 } => {
                let (x, y) = (s(0), s(1));
                r[0] * y.ln() - r[1] * x.ln() + b12 * y - b21 * x
            }
            Integral::Linear { w } => w.iter().zip(state).map(|(a, b)| a * b).sum(),
        }
    }

    /// `max_t |V(x(t)) − V(x(0))|`.
    pub fn drift(&self, traj: &Trajectory) -> f64 {
        let Some(x0) = traj.states.first() else { return 0.0 };
        let v0 = self.eval(x0);
        traj.states.iter().map(|x| (self.eval(x) - v0).abs()).fold(0.0, f64::max)
    }
}

/// Lifted LVA in `v = y/x`, `w = 1/x` with time `dτ = x dt`, on the class `z − y = C`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredatorPrey {
    pub tag: FamilyTag,
    pub class_c: f64,
    pub lv: LotkaVolterra,
    pub equilibrium: Option<[f64; 2]>,
}

pub fn predator_prey_transform(sys: &MassActionSystem, class_c: f64) -> Result<PredatorPrey> {
    let tag = crate::classify::match_family(sys.network())
        .filter(|t| matches!(t.family, Family::LiftedLva { .. }))
        .ok_or_else(|| Error::FamilyMismatch("network is not in the lifted LVA family".into()))?;
    let Family::LiftedLva { d } = tag.family else { unreachable!() };
    let d = d as f64;
    let k = tag.template_rates(sys);
    let lv = LotkaVolterra {
        r: vec![d * k[1] - k[0], -k[0]],
        b: vec![vec![k[1] - k[2], -k[2] * class_c], vec![k[1], 0.0]],
    };
    let equilibrium = (class_c > 0.0 && d * k[1] * k[1] > k[0] * k[2])
        .then(|| [k[0] / k[1], (d * k[1] * k[1] - k[0] * k[2]) / (k[1] * k[2] * class_c)]);
    Ok(PredatorPrey { tag, class_c, lv, equilibrium })
}

impl PredatorPrey {
    pub fn to_vw(&self, state: &[f64]) -> [f64; 2] {
        let p = &self.tag.species_perm;
        [state[p[1]] / state[p[0]], 1.0 / state[p[0]]]
    }

    /// Network state for `(v, w)`.
    pub fn to_state(&self, v: f64, w: f64) -> Vec<f64> {
        let p = &self.tag.species_perm;
        let (x, y) = (1.0 / w, v / w);
        let mut out = vec![0.0; 3];
        out[p[0]] = x;
        out[p[1]] = y;
        out[p[2]] = y + self.class_c;
        out
    }

    /// The transformed field augmented with original time, `dt/dτ = w`.
    pub fn augmented(&self) -> AugmentedPredatorPrey<'_> {
        AugmentedPredatorPrey(self)
    }
}

pub struct AugmentedPredatorPrey<'a>(&'a PredatorPrey);

impl VectorField for AugmentedPredatorPrey<'_> {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, s: &[f64], out: &mut [f64]) {
        self.0.lv.eval(&s[..2], &mut out[..2]);
        out[2] = s[1];
    }
}

/// One row of an amplitude scan.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeRow {
    pub parameter: f64,
    /// Distance from the Hopf parameter, signed towards the scanned side.
    pub offset: f64,
    /// Radius of an attracting fixed point of the return map.
    pub radius: Option<f64>,
    /// Return-map slope at the fixed point.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeScan {
    pub t_star: f64,
    pub rows: Vec<AmplitudeRow>,
    /// Least-squares `radius² ≈ alpha·offset + beta` over rows with a cycle.
    pub alpha: f64,
    pub beta: f64,
    pub relative_residual: f64,
}

fn return_once(field: &ClassRestricted, center: &[f64], r: f64, t_return: f64, opts: IntegratorOptions) -> Option<f64> {
    let s = section_returns(field, center, r, 1, t_return, opts);
    s.radii_out.first().copied()
}

/// Attracting fixed point of the first-return map, searched on a geometric
/// radius grid and refined by bisection.
pub fn stable_cycle_radius(
    sys: &MassActionSystem,
    eq: &EquilibriumRecord,
    r_min: f64,
    r_max: f64,
    opts: IntegratorOptions,
) -> Result<Option<(f64, f64)>> {
    let field = ClassRestricted::through_point(sys, &eq.x_bar)?;
    if field.dim() != 2 {
        return Err(Error::Precondition("needs rank two".into()));
    }
    let center = field.coords().to_coords(&eq.x_bar);
    let rj = jacobian::reduced_jacobian(sys, eq)?;
    let t_return = linear_period(&rj).map_or(1e3, |p| 20.0 * p);
    let delta = |r: f64| return_once(&field, &center, r, t_return, opts).map(|o| o - r);
    let n = 24;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let r = r_min * (r_max / r_min).powf(i as f64 / n as f64);
        let Some(dr) = delta(r) else {
            prev = None;
            continue;
        };
        if let Some((r0, d0)) = prev {
            if d0 > 0.0 && dr < 0.0 {
                let (mut a, mut b) = (r0, r);
                for _ in 0..50 {
                    let m = 0.5 * (a + b);
                    match delta(m) {
                        Some(v) if v > 0.0 => a = m,
                        Some(_) => b = m,
                        None => break,
                    }
                }
                let rs = 0.5 * (a + b);
                let h = 1e-3 * rs;
                let slope = match (delta(rs + h), delta(rs - h)) {
                    (Some(p), Some(m)) => 1.0 + (p - m) / (2.0 * h),
                    _ => f64::NAN,
                };
                return Ok(Some((rs, slope)));
            }
        }
        prev = Some((r, dr));
    }
    Ok(None)
}

/// Limit-cycle radius against the path parameter past a Hopf point.
pub fn hopf_amplitude_scan(
    net: &ReactionNetwork,
    path: &KappaPath,
    t_star: f64,
    points: &[f64],
    opts: IntegratorOptions,
) -> Result<AmplitudeScan> {
    let mut rows = Vec::new();
    for &t in points {
        let sys = MassActionSystem::from_f64(net.clone(), &path.at(t))?;
        let eq = equilibria::planar_equilibrium(&sys)?.ok_or(Error::NoPositiveEquilibrium)?;
        let scale = eq.x_bar[0];
        let found = stable_cycle_radius(&sys, &eq, 1e-3 * scale, 0.9 * scale, opts)?;
        let offset = (t - t_star).abs();
        rows.push(AmplitudeRow {
            parameter: t,
            offset,
            radius: found.map(|f| f.0),
            slope: found.map(|f| f.1),
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.radius.map(|rad| (r.offset, rad * rad))).collect();
    if pts.len() < 2 {
        return Err(Error::Numerical("no limit cycle found on the scanned side".into()));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let alpha = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let beta = my - alpha * mx;
    let res: f64 = pts.iter().map(|p| (p.1 - alpha * p.0 - beta).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = pts.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt();
    Ok(AmplitudeScan { t_star, rows, alpha, beta, relative_residual: res / norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;

    fn sys(s: &str, k: &[f64]) -> MassActionSystem {
        MassActionSystem::from_f64(parse_network(s).unwrap(), k).unwrap()
    }

    #[test]
    fn exponential_decay() {
        let s = sys("X -> 0", &[1.0]);
        let tr = integrate(&MassActionField::new(&s), &[1.0], 5.0, IntegratorOptions::default()).unwrap();
        assert!((tr.last()[0] - (-5.0f64).exp()).abs() < 1e-10);
        let g = integrate_grid(&MassActionField::new(&s), &[1.0], &[0.0, 0.5, 1.7], IntegratorOptions::default())
            .unwrap();
        assert_eq!(g.times, vec![0.0, 0.5, 1.7]);
        assert!((g.states[2][0] - (-1.7f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn lotka_center() {
        let s = sys("X -> 2X; X + Y -> 2Y; Y -> 0", &[1.0, 1.0, 1.0]);
        let eq = equilibria::planar_equilibrium(&s).unwrap().unwrap();
        let radii = [0.1, 0.3, 0.5, 0.7, 1.0];
        let rm = return_map(&s, &eq, &radii, ReturnMapOptions::default()).unwrap();
        assert!(rm.max_relative_drift() < 1e-6, "{}", rm.max_relative_drift());
        assert_eq!(classify_orbit_structure(&rm, 1e-6).unwrap(), OrbitStructure::Center);
        let tag = crate::classify::match_family(s.network()).unwrap();
        let v = ConservedQuantity::for_family(&tag, &s).unwrap();
        let tr = integrate(&MassActionField::new(&s), &[2.0, 1.0], 100.0, IntegratorOptions::default()).unwrap();
        assert!(v.drift(&tr) < 1e-6);
    }

    #[test]
    fn lva_spirals_out() {
        let s = sys("2X -> 3X; X + Y -> 2Y; Y -> 0", &[1.0, 1.0, 1.0]);
        let eq = equilibria::planar_equilibrium(&s).unwrap().unwrap();
        let rm = return_map(&s, &eq, &[0.01, 0.02, 0.03, 0.04, 0.05], ReturnMapOptions::default()).unwrap();
        assert_eq!(classify_orbit_structure(&rm, 1e-5).unwrap(), OrbitStructure::Spiral(SpiralDirection::Out));
    }

    #[test]
    fn time_reversal() {
        let s = sys("X -> 2X; X + Y -> 2Y; Y -> 0", &[1.0, 1.0, 1.0]);
        let f = MassActionField::new(&s);
        let fw = integrate(&f, &[2.0, 1.0], 10.0, IntegratorOptions::default()).unwrap();
        let bw = integrate(&Reversed(&f), fw.last(), 10.0, IntegratorOptions::default()).unwrap();
        assert!((bw.last()[0] - 2.0).abs() < 1e-6 && (bw.last()[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn blow_up_is_flagged() {
        let s = sys("2X -> 3X", &[1.0]);
        let tr = integrate(&MassActionField::new(&s), &[1.0], 2.0, IntegratorOptions::default()).unwrap();
        assert!(tr.blew_up || tr.truncated);
        assert!(integrate(&MassActionField::new(&s), &[-1.0], 2.0, IntegratorOptions::default()).is_err());
    }

    #[test]
    fn predator_prey_coefficients() {
        let s = sys("2X -> 3X; X + Y -> 2Y + Z; Y + Z -> 0", &[1.0, 2.0, 2.0]);
        let pp = predator_prey_transform(&s, 1.0).unwrap();
        assert_eq!(pp.lv.r, vec![1.0, -1.0]);
        assert_eq!(pp.lv.b, vec![vec![0.0, -2.0], vec![2.0, 0.0]]);
        assert_eq!(pp.equilibrium, Some([0.5, 0.5]));
        let s = sys("2X -> 3X; X + Y -> 2Y + Z; Y + Z -> 0", &[3.0, 1.0, 1.0]);
        assert_eq!(predator_prey_transform(&s, 1.0).unwrap().equilibrium, None);
        let lotka = sys("X -> 2X; X + Y -> 2Y; Y -> 0", &[1.0, 1.0, 1.0]);
        assert!(predator_prey_transform(&lotka, 1.0).is_err());
    }
}
