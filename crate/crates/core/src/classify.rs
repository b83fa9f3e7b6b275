//! Family templates, the trimolecular periodic-orbit classification, the
//! exhaustive enumerator and the trimolecular expansion.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;


use crate::equilibria::{self, EquilibriumRecord};
use crate::error::{Error, Result};
use crate::jacobian;
use crate::network::{for_each_permutation, standard_names, Complex, MassActionSystem, Rate, ReactionNetwork};
use crate::stoich::{self, DivergenceClass};

/// Parametric network families with their integer parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// `X → (1+c)X, X+Y → (1+d)Y, Y → 0`.
    GeneralisedLotka { c: i64, d: i64 },
    /// `X+Z → 2X, X+Y → 2Y, Y+Z → 2Z`.
    Ivanova,
    /// `Z+X → (1+c)X, X+Y → 0, Y+Z → (1+cd)Y + (1+d)Z`.
    ThreeSpecies { c: i64, d: i64 },
    /// `2X → 3X, X+Y → (1+d)Y, Y → 0`.
    GeneralisedLva { d: i64 },
    /// `2X → 3X, X+Y → (1+d)Y + dZ, Y+Z → 0`.
    LiftedLva { d: i64 },
    /// `2X → 3X+Y, X+Y → (1+d)Y, Y → 0`.
    Tetra { d: i64 },
    /// `2X → 4X+3Y, X+Y → 0, 0 → cX+dY`.
    Hepta { c: i64, d: i64 },
    /// `2X → 3X+2Y, X+Y → 0, X → (1+c)X+dY`.
    PentaCase8 { c: i64, d: i64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::GeneralisedLotka { .. } => "GeneralisedLotka",
            Family::Ivanova => "Ivanova",
            Family::ThreeSpecies { .. } => "ThreeSpeciesFamily",
            Family::GeneralisedLva { .. } => "GeneralisedLVA",
            Family::LiftedLva { .. } => "LiftedLVA",
            Family::Tetra { .. } => "TetraFamily",
            Family::Hepta { .. } => "HeptaFamily",
            Family::PentaCase8 { .. } => "PentaCase8",
        }
    }

    pub fn params(&self) -> Vec<i64> {
        match *self {
            Family::GeneralisedLotka { c, d }
            | Family::ThreeSpecies { c, d }
            | Family::Hepta { c, d }
            | Family::PentaCase8 { c, d } => vec![c, d],
            Family::GeneralisedLva { d } | Family::LiftedLva { d } | Family::Tetra { d } => vec![d],
            Family::Ivanova => vec![],
        }
    }

    fn species_count(kind: usize) -> usize {
        match kind {
            1 | 2 | 4 => 3,
            _ => 2,
        }
    }

    /// Template network for this family (species X, Y[, Z]).
    pub fn template(&self) -> ReactionNetwork {
        let (n, rx): (usize, Vec<([i64; 3], [i64; 3])>) = match *self {
            Family::GeneralisedLotka { c, d } => {
                (2, vec![([1, 0, 0], [1 + c, 0, 0]), ([1, 1, 0], [0, 1 + d, 0]), ([0, 1, 0], [0, 0, 0])])
            }
            Family::Ivanova => {
                (3, vec![([1, 0, 1], [2, 0, 0]), ([1, 1, 0], [0, 2, 0]), ([0, 1, 1], [0, 0, 2])])
            }
            Family::ThreeSpecies { c, d } => (
                3,
                vec![([1, 0, 1], [1 + c, 0, 0]), ([1, 1, 0], [0, 0, 0]), ([0, 1, 1], [0, 1 + c * d, 1 + d])],
            ),
            Family::GeneralisedLva { d } => {
                (2, vec![([2, 0, 0], [3, 0, 0]), ([1, 1, 0], [0, 1 + d, 0]), ([0, 1, 0], [0, 0, 0])])
            }
            Family::LiftedLva { d } => {
                (3, vec![([2, 0, 0], [3, 0, 0]), ([1, 1, 0], [0, 1 + d, d]), ([0, 1, 1], [0, 0, 0])])
            }
            Family::Tetra { d } => {
                (2, vec![([2, 0, 0], [3, 1, 0]), ([1, 1, 0], [0, 1 + d, 0]), ([0, 1, 0], [0, 0, 0])])
            }
            Family::Hepta { c, d } => {
                (2, vec![([2, 0, 0], [4, 3, 0]), ([1, 1, 0], [0, 0, 0]), ([0, 0, 0], [c, d, 0])])
            }
            Family::PentaCase8 { c, d } => {
                (2, vec![([2, 0, 0], [3, 2, 0]), ([1, 1, 0], [0, 0, 0]), ([1, 0, 0], [1 + c, d, 0])])
            }
        };
        let cx: Vec<(Complex, Complex)> = rx
            .iter()
            .map(|(s, t)| (Complex::new(s[..n].to_vec()).unwrap(), Complex::new(t[..n].to_vec()).unwrap()))
            .collect();
        ReactionNetwork::from_complexes(standard_names(n), &cx).expect("valid template")
    }

    /// Reads family parameters off a candidate already in template order.
    fn extract(kind: usize, net: &ReactionNetwork) -> Option<Family> {
        let g = |i: usize, j: usize| net.stoich_entry(i, j);
        let f = match kind {
            0 => Family::GeneralisedLotka { c: g(0, 0), d: g(1, 1) },
            1 => Family::Ivanova,
            2 => Family::ThreeSpecies { c: g(0, 0), d: g(2, 2) },
            3 => Family::GeneralisedLva { d: g(1, 1) },
            4 => Family::LiftedLva { d: g(1, 1) },
            5 => Family::Tetra { d: g(1, 1) },
            6 => Family::Hepta { c: g(0, 2), d: g(1, 2) },
            7 => Family::PentaCase8 { c: g(0, 2), d: g(1, 2) },
            _ => return None,
        };
        let ok = match f {
            Family::GeneralisedLotka { c, d } | Family::ThreeSpecies { c, d } => c >= 1 && d >= 1,
            Family::GeneralisedLva { d } | Family::LiftedLva { d } => d >= 1,
            Family::Tetra { d } => d >= 0,
            Family::Hepta { c, d } => c >= 1 && d >= 0,
            Family::PentaCase8 { c, d } => c >= 1 && d >= 0,
            Family::Ivanova => true,
        };
        ok.then_some(f)
    }
}

const FAMILY_KINDS: usize = 8;

/// A family match: template species `t` is network species `species_perm[t]`,
/// template reaction `t` is network reaction `reaction_order[t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyTag {
    pub family: Family,
    pub species_perm: Vec<usize>,
    pub reaction_order: Vec<usize>,
}

impl FamilyTag {
    /// Checks that the relabelled network reproduces the template exactly.
    pub fn verify(&self, net: &ReactionNetwork) -> bool {
        if self.species_perm.len() != net.n_species() || self.reaction_order.len() != net.n_reactions() {
            return false;
        }
        let p = net.permute_species(&self.species_perm).permute_reactions(&self.reaction_order);
        let t = self.family.template();
        p.source_matrix() == t.source_matrix() && p.stoich_matrix() == t.stoich_matrix()
    }

    /// Rate constants in template reaction order.
    pub fn template_rates(&self, sys: &MassActionSystem) -> Vec<f64> {
        let k = sys.kappa();
        self.reaction_order.iter().map(|&j| k[j]).collect()
    }
}

const REACTION_ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// First family (in the fixed priority order) matching `net` up to
/// relabelling of species and reactions.
pub fn match_family(net: &ReactionNetwork) -> Option<FamilyTag> {
    if net.n_reactions() != 3 {
        return None;
    }
    let n = net.n_species();
    for kind in 0..FAMILY_KINDS {
        if Family::species_count(kind) != n {
            continue;
        }
        let mut found: Option<FamilyTag> = None;
        for_each_permutation(n, |perm| {
            if found.is_some() {
                return;
            }
            let ps = net.permute_species(perm);
            for order in REACTION_ORDERS {
                let p = ps.permute_reactions(&order);
                if let Some(f) = Family::extract(kind, &p) {
                    let t = f.template();
                    if p.source_matrix() == t.source_matrix() && p.stoich_matrix() == t.stoich_matrix() {
                        found = Some(FamilyTag { family: f, species_perm: perm.to_vec(), reaction_order: order.to_vec() });
                        return;
                    }
                }
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Whether a periodic orbit exists for some rate constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Periodic {
    ForSomeKappa,
    Never,
}

/// Why a network cannot oscillate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NeverReason {
    RankNotTwo,
    DynamicallyTrivial,
    SourcesCollinear,
    DivergenceNegative,
    GeneralisedLva,
    SaddleOnly,
    NoFamilyMatch,
}

impl NeverReason {
    pub fn code(&self) -> &'static str {
        match self {
            NeverReason::RankNotTwo => "rank_not_two",
            NeverReason::DynamicallyTrivial => "dynamically_trivial",
            NeverReason::SourcesCollinear => "sources_collinear",
            NeverReason::DivergenceNegative => "divergence_negative",
            NeverReason::GeneralisedLva => "generalised_lva",
            NeverReason::SaddleOnly => "saddle_only",
            NeverReason::NoFamilyMatch => "no_family_match",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicVerdict {
    pub admits_periodic: Periodic,
    pub kappa_condition: Option<String>,
    pub matched_family: Option<FamilyTag>,
    pub reduced_network: ReactionNetwork,
    pub reason: Option<NeverReason>,
}

/// Every positive equilibrium is a saddle, read off the signs of the terms of
/// the closed-form reduced determinant.
pub fn saddle_for_all_kappa(net: &ReactionNetwork) -> bool {
    let Some(u) = stoich::kernel_cross(net) else {
        return false;
    };
    let sign = if u.iter().all(|&v| v > 0) {
        1
    } else if u.iter().all(|&v| v < 0) {
        -1
    } else {
        return false;
    };
    let rows = stoich::row_basis(net);
    let Some(gt) = jacobian::gamma_tilde(net, &rows) else {
        return false;
    };
    let a = net.source_matrix();
    let mut any = false;
    for i in 0..net.n_species() {
        for j in i + 1..net.n_species() {
            let minor = &gt[i][0] * &gt[j][1] - &gt[i][1] * &gt[j][0];
            let s = stoich::ones_cross(&a[i], &a[j]);
            let t = crate::network::q_to_f64(&minor) * s as f64 * sign as f64;
            if t > 0.0 {
                return false;
            }
            any |= t < 0.0;
        }
    }
    any
}

fn never(reduced: ReactionNetwork, reason: NeverReason, family: Option<FamilyTag>) -> PeriodicVerdict {
    PeriodicVerdict {
        admits_periodic: Periodic::Never,
        kappa_condition: None,
        matched_family: family,
        reduced_network: reduced,
        reason: Some(reason),
    }
}

/// Classification of three-reaction, quadratic, trimolecular networks.
pub fn classify_trimolecular(net: &ReactionNetwork) -> Result<PeriodicVerdict> {
    if net.n_reactions() != 3 || !net.is_quadratic() || !net.is_trimolecular() {
        return Err(Error::Precondition("needs a three-reaction quadratic trimolecular network".into()));
    }
    let reduced = net.drop_trivial_species();
    if reduced.n_reactions() != 3 || stoich::rank(&reduced) != 2 {
        return Ok(never(reduced, NeverReason::RankNotTwo, None));
    }
    if !stoich::dynamically_nontrivial(&reduced).nontrivial {
        return Ok(never(reduced, NeverReason::DynamicallyTrivial, None));
    }
    let tag = match_family(&reduced);
    if let Some(t) = &tag {
        let cond = match t.family {
            Family::GeneralisedLotka { c, d } if c <= 2 && d <= 2 => Some("all κ"),
            Family::Ivanova => Some("all κ"),
            Family::LiftedLva { d: 1 } => Some("κ2=κ3>κ1"),
            _ => None,
        };
        if let Some(cond) = cond {
            return Ok(PeriodicVerdict {
                admits_periodic: Periodic::ForSomeKappa,
                kappa_condition: Some(cond.to_string()),
                matched_family: tag.clone(),
                reduced_network: reduced,
                reason: None,
            });
        }
    }
    let geom = stoich::source_geometry(&reduced).expect("three reactions");
    let reason = if geom.collinear {
        NeverReason::SourcesCollinear
    } else if stoich::dulac_divergence_class(&reduced) == DivergenceClass::NegativeEverywhere {
        NeverReason::DivergenceNegative
    } else if matches!(tag.as_ref().map(|t| t.family), Some(Family::GeneralisedLva { .. })) {
        NeverReason::GeneralisedLva
    } else if saddle_for_all_kappa(&reduced) {
        NeverReason::SaddleOnly
    } else {
        NeverReason::NoFamilyMatch
    };
    Ok(never(reduced, reason, tag))
}

/// Outcome of the independent structural/numeric classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlowVerdict {
    pub possibly_periodic: bool,
    pub reason: &'static str,
}

const PROBE_RATES: [f64; 3] = [0.2, 1.0, 5.0];
const PROBE_SHIFTS: [f64; 3] = [-1.5, 0.0, 1.5];

/// Classifies without family templates: rank and nontriviality, collinear
/// sources, the Dulac divergence sign, saddle structure by species count, and
/// finally a probe of the reduced Jacobian at sampled positive equilibria.
/// A periodic orbit needs an equilibrium with positive reduced determinant
/// whose trace either vanishes or changes sign across rate constants.
pub fn classify_slow(net: &ReactionNetwork) -> SlowVerdict {
    let no = |reason| SlowVerdict { possibly_periodic: false, reason };
    let red = net.drop_trivial_species();
    if red.n_reactions() != 3 || linalg_rank(&red) != 2 {
        return no("rank");
    }
    if !stoich::fourier_motzkin_nontrivial(&red).nontrivial {
        return no("dynamically trivial");
    }
    if stoich::source_geometry(&red).map_or(true, |g| g.collinear) {
        return no("collinear sources");
    }
    let div = stoich::dulac_divergence_class(&red);
    if div == DivergenceClass::NegativeEverywhere {
        return no("negative divergence");
    }
    let has_autocatalysis = !stoich::positive_divergence_reactions(&red).is_empty();
    let n = red.n_species();
    if has_autocatalysis && n >= 5 {
        return no("five or more species with 2X -> 3X");
    }
    if saddle_for_all_kappa(&red) {
        return no("saddle");
    }
    // sampled equilibria on the log-linear equilibrium manifold
    let mut signs = [false; 2];
    let mut zero = false;
    let mut nonsaddle = false;
    let shifts_per_dir = if n > 2 { PROBE_SHIFTS.len() } else { 1 };
    for &k1 in &PROBE_RATES {
        for &k2 in &PROBE_RATES {
            for &k3 in &PROBE_RATES {
                let Ok(sys) = MassActionSystem::from_f64(red.clone(), &[k1, k2, k3]) else { continue };
                let Ok(ll) = equilibria::log_linear_equilibria(&sys) else {
                    return no("no positive equilibrium");
                };
                let dims = ll.directions.len();
                let total = shifts_per_dir.pow(dims as u32);
                for idx in 0..total {
                    let mut logs = ll.particular.clone();
                    let mut rest = idx;
                    for dir in &ll.directions {
                        let t = if n > 2 { PROBE_SHIFTS[rest % shifts_per_dir] } else { 0.0 };
                        rest /= shifts_per_dir;
                        for (l, d) in logs.iter_mut().zip(dir) {
                            *l += t * crate::network::q_to_f64(d);
                        }
                    }
                    let x: Vec<f64> = logs[..n].iter().map(|v| v.exp()).collect();
                    let eq = EquilibriumRecord::from_state(&sys, &x);
                    let Ok(rj) = jacobian::reduced_jacobian(&sys, &eq) else { continue };
                    let scale = rj.matrix.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs()));
                    if rj.det <= 1e-12 * scale * scale {
                        continue;
                    }
                    nonsaddle = true;
                    if rj.trace.abs() <= 1e-10 * scale {
                        zero = true;
                    } else {
                        signs[(rj.trace > 0.0) as usize] = true;
                    }
                }
            }
        }
    }
    if !nonsaddle {
        return no("saddle at sampled equilibria");
    }
    if zero || (signs[0] && signs[1]) {
        SlowVerdict { possibly_periodic: true, reason: "trace vanishes or changes sign" }
    } else {
        no("trace of one sign")
    }
}

fn linalg_rank(net: &ReactionNetwork) -> usize {
    stoich::rank(net)
}

/// Splits reactions whose target has molecularity four or more into unit
/// steps `y → y ± X_j` with rates `κ|c_j|`; the vector field is unchanged.
pub fn expand_to_trimolecular(sys: &MassActionSystem) -> Result<MassActionSystem> {
    let net = sys.network();
    if !net.is_quadratic() {
        return Err(Error::Precondition("expansion needs quadratic sources".into()));
    }
    let n = net.n_species();
    let mut reactions: Vec<(Complex, Complex)> = Vec::new();
    let mut rates: Vec<Rate> = Vec::new();
    for j in 0..net.n_reactions() {
        let src = net.source(j);
        if net.target(j).molecularity() <= 3 {
            reactions.push((src, net.target(j)));
            rates.push(sys.rates()[j].clone());
            continue;
        }
        for i in 0..n {
            let c = net.stoich_entry(i, j);
            if c == 0 {
                continue;
            }
            let mut t = src.coeffs().to_vec();
            t[i] += c.signum();
            reactions.push((src.clone(), Complex::new(t)?));
            rates.push(sys.rates()[j].scaled(c.abs()));
        }
    }
    MassActionSystem::new(ReactionNetwork::from_complexes(net.species().to_vec(), &reactions)?, rates)
}

// ---------------------------------------------------------------------------
// Enumeration

const MAXN: usize = 5;

#[derive(Debug, Clone, Copy)]
struct FastReaction {
    src: [i8; MAXN],
    tgt: [i8; MAXN],
    delta: [i8; MAXN],
    mask: u8,
    pos: u8,
    neg: u8,
}

/// All reactions with quadratic source and trimolecular target on `n` species.
#[derive(Debug, Clone)]
pub struct TrimolecularSpace {
    n: usize,
    reactions: Vec<FastReaction>,
}

/// Per-species-count counters of the enumeration pipeline.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanCounts {
    /// Unordered triples of distinct reactions.
    pub triples: u64,
    /// Triples in which every species appears.
    pub all_species: u64,
    pub rank_two: u64,
    pub nontrivial: u64,
    /// Labelled networks with a periodic orbit for some κ.
    pub periodic_labelled: u64,
}

impl ScanCounts {
    pub fn add(&mut self, o: &ScanCounts) {
        self.triples += o.triples;
        self.all_species += o.all_species;
        self.rank_two += o.rank_two;
        self.nontrivial += o.nontrivial;
        self.periodic_labelled += o.periodic_labelled;
    }
}

/// Result of scanning the triples whose smallest reaction index is fixed.
#[derive(Debug, Clone, Default)]
pub struct PartialScan {
    pub counts: ScanCounts,
    /// Canonical key and one representative of each periodic network.
    pub hits: BTreeMap<Vec<i64>, ReactionNetwork>,
    /// Nontrivial rank-two networks, when collection is requested.
    pub survivors: Vec<[usize; 3]>,
}

fn complexes(n: usize, max_mol: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for c in &out {
            let used: i64 = c.iter().sum();
            for k in 0..=(max_mol - used) {
                let mut d = c.clone();
                d.push(k);
                next.push(d);
            }
        }
        out = next;
    }
    out.sort_by_key(|c| (c.iter().sum::<i64>(), core::cmp::Reverse(c.clone())));
    out
}

impl TrimolecularSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAXN {
            return Err(Error::Precondition(format!("species count must be in 1..={}", MAXN)));
        }
        let mut reactions = Vec::new();
        for s in complexes(n, 2) {
            for t in complexes(n, 3) {
                if s == t {
                    continue;
                }
                let mut r = FastReaction { src: [0; MAXN], tgt: [0; MAXN], delta: [0; MAXN], mask: 0, pos: 0, neg: 0 };
                for i in 0..n {
                    r.src[i] = s[i] as i8;
                    r.tgt[i] = t[i] as i8;
                    r.delta[i] = (t[i] - s[i]) as i8;
                    if s[i] > 0 || t[i] > 0 {
                        r.mask |= 1 << i;
                    }
                    if t[i] > s[i] {
                        r.pos |= 1 << i;
                    }
                    if t[i] < s[i] {
                        r.neg |= 1 << i;
                    }
                }
                reactions.push(r);
            }
        }
        Ok(Self { n, reactions })
    }

    pub fn n_species(&self) -> usize {
        self.n
    }

    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    /// Network of the given reaction triple.
    pub fn network(&self, idx: [usize; 3]) -> ReactionNetwork {
        let n = self.n;
        let cx: Vec<(Complex, Complex)> = idx
            .iter()
            .map(|&k| {
                let r = &self.reactions[k];
                (
                    Complex::new(r.src[..n].iter().map(|&v| v as i64).collect()).unwrap(),
                    Complex::new(r.tgt[..n].iter().map(|&v| v as i64).collect()).unwrap(),
                )
            })
            .collect();
        ReactionNetwork::from_complexes(standard_names(n), &cx).expect("valid reactions")
    }

    /// Rank two with a strictly positive kernel, in small-integer arithmetic.
    #[inline]
    fn rank_two_nontrivial(&self, a: &FastReaction, b: &FastReaction, c: &FastReaction) -> (bool, bool) {
        let n = self.n;
        let row = |i: usize| [a.delta[i] as i64, b.delta[i] as i64, c.delta[i] as i64];
        let mut u = [0i64; 3];
        let mut found = false;
        'outer: for p in 0..n {
            for q in p + 1..n {
                let (rp, rq) = (row(p), row(q));
                let cr = [rp[1] * rq[2] - rp[2] * rq[1], rp[2] * rq[0] - rp[0] * rq[2], rp[0] * rq[1] - rp[1] * rq[0]];
                if cr != [0, 0, 0] {
                    u = cr;
                    found = true;
                    break 'outer;
                }
            }
        }
        if !found {
            return (false, false);
        }
        for i in 0..n {
            let r = row(i);
            if r[0] * u[0] + r[1] * u[1] + r[2] * u[2] != 0 {
                return (false, false);
            }
        }
        let pos = u.iter().all(|&v| v > 0) || u.iter().all(|&v| v < 0);
        (true, pos)
    }

    /// Scans all triples `(first, j, k)` with `first < j < k`.
    pub fn scan_first(&self, first: usize, collect_survivors: bool) -> PartialScan {
        let full: u8 = ((1u16 << self.n) - 1) as u8;
        let m = self.reactions.len();
        let mut out = PartialScan::default();
        let mut memo: BTreeMap<Vec<i64>, bool> = BTreeMap::new();
        let a = &self.reactions[first];
        for j in first + 1..m {
            let b = &self.reactions[j];
            let mab = a.mask | b.mask;
            let pab = a.pos | b.pos;
            let nab = a.neg | b.neg;
            for k in j + 1..m {
                out.counts.triples += 1;
                let c = &self.reactions[k];
                if mab | c.mask != full {
                    continue;
                }
                out.counts.all_species += 1;
                // a nonzero row of Γ must have both signs
                let nontrivial_signs = (pab | c.pos) == (nab | c.neg);
                let (r2, pos) = self.rank_two_nontrivial(a, b, c);
                if !r2 {
                    continue;
                }
                out.counts.rank_two += 1;
                if !(pos && nontrivial_signs) {
                    continue;
                }
                out.counts.nontrivial += 1;
                if collect_survivors {
                    out.survivors.push([first, j, k]);
                }
                let net = self.network([first, j, k]);
                let reduced_key = net.drop_trivial_species().canonical_key();
                let periodic = *memo.entry(reduced_key).or_insert_with(|| {
                    classify_trimolecular(&net).map(|v| v.admits_periodic == Periodic::ForSomeKappa).unwrap_or(false)
                });
                if periodic {
                    out.counts.periodic_labelled += 1;
                    let key = net.canonical_key();
                    out.hits.entry(key).or_insert_with(|| net.canonical_form());
                }
            }
        }
        out
    }

    /// Serial scan of the whole space.
    pub fn scan_all(&self) -> PartialScan {
        let mut total = PartialScan::default();
        for i in 0..self.n_reactions() {
            total.merge(self.scan_first(i, false));
        }
        total
    }
}

impl PartialScan {
    pub fn merge(&mut self, other: PartialScan) {
        self.counts.add(&other.counts);
        for (k, v) in other.hits {
            self.hits.entry(k).or_insert(v);
        }
        self.survivors.extend(other.survivors);
    }
}

/// Enumeration summary over species counts `1..=n_max`.
#[derive(Debug, Clone, Default)]
pub struct EnumerationReport {
    pub per_species: Vec<(usize, ScanCounts, usize)>,
    /// Canonical forms of all networks with a periodic orbit, deduplicated.
    pub periodic: Vec<ReactionNetwork>,
}

/// Serial enumeration of three-reaction quadratic trimolecular networks.
pub fn enumerate_trimolecular(n_max: usize) -> Result<EnumerationReport> {
    if !(2..=MAXN).contains(&n_max) {
        return Err(Error::Precondition(format!("n_max must be in 2..={}", MAXN)));
    }
    let mut report = EnumerationReport::default();
    let mut all: BTreeMap<Vec<i64>, ReactionNetwork> = BTreeMap::new();
    for n in 1..=n_max {
        let space = TrimolecularSpace::new(n)?;
        let scan = space.scan_all();
        report.per_species.push((n, scan.counts.clone(), scan.hits.len()));
        all.extend(scan.hits);
    }
    report.periodic = all.into_values().collect();
    Ok(report)
}

impl EnumerationReport {
    pub fn assemble(per_species: Vec<(usize, PartialScan)>) -> Self {
        let mut report = EnumerationReport::default();
        let mut all: BTreeMap<Vec<i64>, ReactionNetwork> = BTreeMap::new();
        for (n, scan) in per_species {
            report.per_species.push((n, scan.counts.clone(), scan.hits.len()));
            all.extend(scan.hits);
        }
        report.periodic = all.into_values().collect();
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{parse_network, parse_system, qi, qr};

    fn net(s: &str) -> ReactionNetwork {
        parse_network(s).unwrap()
    }

    #[test]
    fn matches_named_networks() {
        let lotka = net("X -> 2X; X + Y -> 2Y; Y -> 0");
        assert_eq!(match_family(&lotka).unwrap().family, Family::GeneralisedLotka { c: 1, d: 1 });
        let lifted = net("2X -> 3X; X + Y -> 2Y + Z; Y + Z -> 0");
        assert_eq!(match_family(&lifted).unwrap().family, Family::LiftedLva { d: 1 });
        let iv = net("Y + X -> 2Y; Y + Z -> 2Z; Z + X -> 2X");
        let tag = match_family(&iv).unwrap();
        assert_eq!(tag.family, Family::Ivanova);
        assert!(tag.verify(&iv));
    }

    #[test]
    fn match_is_sound_under_relabelling() {
        let base = net("Y + Z -> 2Y + 2Z; X + Y -> 0; Z + X -> 2X");
        for_each_permutation(3, |p| {
            let n = base.permute_species(p).permute_reactions(&[2, 0, 1]);
            let tag = match_family(&n).unwrap();
            assert_eq!(tag.family, Family::ThreeSpecies { c: 1, d: 1 });
            assert!(tag.verify(&n));
        });
    }

    #[test]
    fn templates_round_trip() {
        let fams = [
            Family::GeneralisedLotka { c: 2, d: 1 },
            Family::Ivanova,
            Family::ThreeSpecies { c: 2, d: 3 },
            Family::GeneralisedLva { d: 2 },
            Family::LiftedLva { d: 2 },
            Family::Tetra { d: 0 },
            Family::Hepta { c: 3, d: 1 },
            Family::PentaCase8 { c: 2, d: 1 },
        ];
        for f in fams {
            let t = f.template();
            assert_eq!(match_family(&t).unwrap().family, f);
        }
    }

    #[test]
    fn trimolecular_verdicts() {
        let v = classify_trimolecular(&net("X -> 2X; X + Y -> 2Y; Y -> 0")).unwrap();
        assert_eq!(v.admits_periodic, Periodic::ForSomeKappa);
        assert_eq!(v.kappa_condition.as_deref(), Some("all κ"));
        let v = classify_trimolecular(&net("2X -> 3X; X + Y -> 2Y + Z; Y + Z -> 0")).unwrap();
        assert_eq!(v.kappa_condition.as_deref(), Some("κ2=κ3>κ1"));
        let v = classify_trimolecular(&net("2X -> 3X; X + Y -> 2Y; Y -> 0")).unwrap();
        assert_eq!(v.admits_periodic, Periodic::Never);
        assert_eq!(v.reason, Some(NeverReason::GeneralisedLva));
        let v = classify_trimolecular(&net("2X -> 3X; X + Y -> Z + W; Z + W -> Y")).unwrap();
        assert_eq!(v.reason, Some(NeverReason::SaddleOnly));
        assert!(classify_trimolecular(&net("2X -> 3X + Y; X + Y -> Y; Y -> 0")).is_err());
    }

    #[test]
    fn trivial_species_are_removed() {
        let v = classify_trimolecular(&net("X + Z -> 2X + Z; X + Y -> 2Y; Y -> 0")).unwrap();
        assert_eq!(v.admits_periodic, Periodic::ForSomeKappa);
        assert_eq!(v.reduced_network.n_species(), 2);
    }

    #[test]
    fn slow_path_agrees_on_fixtures() {
        for (s, expect) in [
            ("X -> 2X; X + Y -> 2Y; Y -> 0", true),
            ("X + Z -> 2X; X + Y -> 2Y; Y + Z -> 2Z", true),
            ("2X -> 3X; X + Y -> 2Y + Z; Y + Z -> 0", true),
            ("2X -> 3X; X + Y -> 2Y; Y -> 0", false),
            ("2X -> 3X; X + Y -> Z + W; Z + W -> Y", false),
            ("X + Y -> 2Y; Y -> 0; 0 -> X", false),
        ] {
            assert_eq!(classify_slow(&net(s)).possibly_periodic, expect, "{}", s);
        }
    }

    #[test]
    fn expansion_of_tetra() {
        let sys = parse_system("2X -> 3X + Y @ 2; X + Y -> Y @ 3; Y -> 0 @ 5").unwrap();
        let e = expand_to_trimolecular(&sys).unwrap();
        assert_eq!(e.network().render(), "2X -> 3X; 2X -> 2X + Y; X + Y -> Y; Y -> 0");
        assert_eq!(e.rates().iter().map(|r| r.to_f64()).collect::<Vec<_>>(), vec![2.0, 2.0, 3.0, 5.0]);
        let x = [qr(1, 3), qr(7, 2)];
        assert_eq!(e.rhs_exact(&x).unwrap(), sys.rhs_exact(&x).unwrap());
    }

    #[test]
    fn expansion_of_octomolecular() {
        let sys = parse_system("2X -> 4X + 3Y + Z @ 1/2; X + Y -> 0; Z -> X").unwrap();
        let e = expand_to_trimolecular(&sys).unwrap();
        assert_eq!(e.network().n_reactions(), 5);
        assert_eq!(e.network().render(), "2X -> 3X; 2X -> 2X + Y; 2X -> 2X + Z; X + Y -> 0; Z -> X");
        let r: Vec<Rate> = e.rates().to_vec();
        assert_eq!(r[0], Rate::Exact(qi(1)));
        assert_eq!(r[1], Rate::Exact(qr(3, 2)));
        assert_eq!(r[2], Rate::Exact(qr(1, 2)));
        let lotka = MassActionSystem::unit(net("X -> 2X; X + Y -> 2Y; Y -> 0"));
        assert_eq!(expand_to_trimolecular(&lotka).unwrap(), lotka);
    }

    #[test]
    fn two_species_enumeration() {
        let r = enumerate_trimolecular(2).unwrap();
        assert_eq!(r.periodic.len(), 4);
        for p in &r.periodic {
            assert!(matches!(match_family(p).unwrap().family, Family::GeneralisedLotka { .. }));
        }
    }

    #[test]
    fn space_size() {
        assert_eq!(TrimolecularSpace::new(5).unwrap().n_reactions(), 1155);
        assert_eq!(TrimolecularSpace::new(2).unwrap().n_reactions(), 6 * 10 - 6);
    }
}
