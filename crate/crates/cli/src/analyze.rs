//! Structural, equilibrium, Jacobian and verdict pipeline behind `classify`.

use crnosc::classify::{classify_trimolecular, match_family, Periodic};
use crnosc::dynamics::{classify_orbit_structure, return_map, IntegratorOptions, OrbitStructure, ReturnMapOptions};
use crnosc::equilibria::{
    equilibria_on_class, log_linear_equilibria, planar_equilibrium, EquilibriumRecord, SolverOptions,
    StoichiometricClass,
};
use crnosc::hopf::theorem_verdict_planar;
use crnosc::jacobian::{is_saddle, reduced_jacobian};
use crnosc::stoich::{dulac_divergence_class, dynamically_nontrivial, rank, source_geometry};
use crnosc::{MassActionSystem, Q};

use crate::report::*;

/// Smallest return-map radius as a fraction of the smallest equilibrium
/// coordinate; the radii span one decade from there.
const RADIUS_FRACTION: f64 = 0.05;
const RADII: usize = 6;
const CLASSIFICATION_TOL: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Point fixing the stoichiometric class.
    pub x0: Option<Vec<f64>>,
    pub starts: usize,
    pub return_map: bool,
    pub tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { x0: None, starts: SolverOptions::default().starts_per_axis, return_map: false, tol: 1e-10 }
    }
}

fn qs(v: &[Q]) -> Vec<String> {
    v.iter().map(|q| q.to_string()).collect()
}

fn note(block: &str, message: impl Into<String>) -> Note {
    Note { block: block.into(), message: message.into() }
}

pub fn structural(sys: &MassActionSystem) -> Structural {
    let net = sys.network();
    let names = net.species();
    let cert = dynamically_nontrivial(net);
    let (ms, mt) = net.molecularity_profile();
    Structural {
        n_species: net.n_species(),
        n_reactions: net.n_reactions(),
        rank: rank(net),
        nontriviality: Nontriviality {
            nontrivial: cert.nontrivial,
            positive_kernel_vector: cert.positive_kernel_vector.as_deref().map(qs),
            stiemke_dual: cert.stiemke_dual.as_deref().map(qs),
        },
        molecularity: Molecularity {
            source: ms,
            target: mt,
            quadratic: net.is_quadratic(),
            trimolecular: net.is_trimolecular(),
        },
        trivial_species: net.trivial_species().into_iter().map(|i| names[i].clone()).collect(),
        source_geometry: source_geometry(net).map(|g| SourceGeometry {
            collinear: g.collinear,
            orientation: g.orientation.map(|o| format!("{o:?}")),
            pair_scalars: g
                .pair_scalars
                .iter()
                .map(|&((i, j), value)| PairScalar { species: [names[i].clone(), names[j].clone()], value })
                .collect(),
        }),
        divergence_class: format!("{:?}", dulac_divergence_class(net)),
    }
}

/// Finds one positive equilibrium; returns the method name and the class count.
fn find_equilibrium(
    sys: &MassActionSystem,
    opts: &ClassifyOptions,
    r: usize,
) -> Result<Option<(EquilibriumRecord, &'static str, Option<usize>)>, crnosc::Error> {
    let net = sys.network();
    if let Some(x0) = &opts.x0 {
        if x0.len() != net.n_species() {
            return Err(crnosc::Error::DimensionMismatch { expected: net.n_species(), got: x0.len() });
        }
        let class = StoichiometricClass::through_point(net, x0);
        let solver = SolverOptions { starts_per_axis: opts.starts, ..SolverOptions::default() };
        let eqs = equilibria_on_class(sys, &class, &solver)?;
        let n = eqs.len();
        return Ok(eqs.into_iter().next().map(|e| (e, "class_newton", Some(n))));
    }
    if net.n_species() == 2 && net.n_reactions() == 3 && r == 2 {
        return Ok(planar_equilibrium(sys)?.map(|e| (e, "planar_closed_form", None)));
    }
    if net.n_reactions() == 3 && r == 2 {
        let ll = match log_linear_equilibria(sys) {
            Ok(ll) => ll,
            Err(crnosc::Error::NoPositiveEquilibrium) => return Ok(None),
            Err(e) => return Err(e),
        };
        let n = net.n_species();
        let x: Vec<f64> = ll.particular[..n].iter().map(|v| v.exp()).collect();
        return Ok(Some((EquilibriumRecord::from_state(sys, &x), "log_linear_particular", None)));
    }
    Ok(None)
}

fn verdict(sys: &MassActionSystem, errors: &mut Vec<Note>) -> Option<VerdictBlock> {
    let net = sys.network();
    let planar = if net.n_species() == 2 && net.n_reactions() == 3 {
        match theorem_verdict_planar(net) {
            Ok(v) => Some(PlanarBlock {
                verdict: v.verdict.name().into(),
                case_id: v.case.map(|c| c.case_id),
                swapped: v.case.is_some_and(|c| c.swapped),
                c: v.c,
                d: v.d,
                witness: v
                    .witness
                    .iter()
                    .map(|w| WitnessRow { branch: w.branch, condition: w.text.clone(), holds: w.holds })
                    .collect(),
                critical_relation: v.critical_relation.clone(),
                reason: v.reason.map(str::to_string),
            }),
            Err(e) => {
                errors.push(note("verdict.planar", e.to_string()));
                None
            }
        }
    } else {
        None
    };
    let trimolecular = if net.n_reactions() == 3 && net.is_quadratic() && net.is_trimolecular() {
        match classify_trimolecular(net) {
            Ok(v) => Some(TrimolecularBlock {
                admits_periodic: match v.admits_periodic {
                    Periodic::ForSomeKappa => "ForSomeKappa".into(),
                    Periodic::Never => "Never".into(),
                },
                kappa_condition: v.kappa_condition.clone(),
                reason: v.reason.map(|r| r.code().to_string()),
                reduced_network: v.reduced_network.render(),
            }),
            Err(e) => {
                errors.push(note("verdict.trimolecular", e.to_string()));
                None
            }
        }
    } else {
        None
    };
    let headline = match (&planar, &trimolecular) {
        (Some(p), _) => p.verdict.clone(),
        (None, Some(t)) => t.admits_periodic.clone(),
        (None, None) => return None,
    };
    let family = match_family(net).map(|t| FamilyBlock {
        name: t.family.name().into(),
        params: t.family.params(),
        species_perm: t.species_perm.clone(),
        reaction_order: t.reaction_order.clone(),
    });
    Some(VerdictBlock { headline, planar, trimolecular, family })
}

pub fn classify(sys: &MassActionSystem, opts: &ClassifyOptions) -> AnalysisReport {
    let net = sys.network();
    let mut skipped = vec![];
    let mut errors = vec![];
    let structural = structural(sys);
    let r = structural.rank;

    let found = match find_equilibrium(sys, opts, r) {
        Ok(Some(f)) => Some(f),
        Ok(None) => {
            skipped.push(note("equilibrium", "no positive equilibrium located"));
            None
        }
        Err(e) => {
            errors.push(note("equilibrium", e.to_string()));
            None
        }
    };
    let solver_tol = SolverOptions::default().tol;
    let equilibrium = found.as_ref().map(|(eq, method, count)| EquilibriumBlock {
        method: (*method).into(),
        x_bar: round_all(&eq.x_bar),
        exact: eq.exact.as_deref().map(qs),
        mu: round(eq.mu),
        u: round_all(&eq.u),
        class_values: eq.class_constant.as_deref().map(round_all),
        count: *count,
        degenerate: eq.degenerate,
        relative_residual: round(eq.relative_residual(sys)),
        tol: solver_tol,
    });

    let rj = match &found {
        Some((eq, _, _)) if r >= 1 => match reduced_jacobian(sys, eq) {
            Ok(rj) => Some(rj),
            Err(e) => {
                errors.push(note("jacobian", e.to_string()));
                None
            }
        },
        Some(_) => {
            skipped.push(note("jacobian", "rank zero network"));
            None
        }
        None => {
            skipped.push(note("jacobian", "needs a positive equilibrium"));
            None
        }
    };
    let jacobian = rj.as_ref().map(|rj| JacobianBlock {
        privileged_rows: rj.privileged.iter().map(|&i| net.species()[i].clone()).collect(),
        matrix: rj.matrix.iter().map(|row| round_all(row)).collect(),
        det: round(rj.det),
        trace: round(rj.trace),
        exact_det: rj.exact.as_ref().map(|e| e.0.to_string()),
        exact_trace: rj.exact.as_ref().map(|e| e.1.to_string()),
        saddle: is_saddle(rj),
        tol: solver_tol,
    });

    let verdict = verdict(sys, &mut errors);
    if verdict.is_none() && !errors.iter().any(|n| n.block.starts_with("verdict")) {
        errors.push(note("verdict", "network is neither planar with three reactions nor three-reaction quadratic trimolecular"));
    }

    let dynamics = if opts.return_map {
        match (&found, &rj) {
            (Some((eq, _, _)), Some(rj)) if r == 2 && rj.det > 0.0 => dynamics_block(sys, eq, opts.tol, &mut errors),
            _ => {
                skipped.push(note("dynamics", "needs rank two and an equilibrium with positive reduced determinant"));
                None
            }
        }
    } else {
        None
    };

    AnalysisReport {
        network: net.render(),
        canonical: net.canonical_form().render(),
        species: net.species().to_vec(),
        rates: sys.rates().iter().map(|r| r.to_string()).collect(),
        structural,
        equilibrium,
        jacobian,
        verdict,
        dynamics,
        skipped,
        errors,
    }
}

fn dynamics_block(
    sys: &MassActionSystem,
    eq: &EquilibriumRecord,
    tol: f64,
    errors: &mut Vec<Note>,
) -> Option<DynamicsBlock> {
    let m = eq.x_bar.iter().cloned().fold(f64::INFINITY, f64::min);
    let radii: Vec<f64> =
        (0..RADII).map(|i| RADIUS_FRACTION * m * 10f64.powf(i as f64 / (RADII - 1) as f64)).collect();
    let opts = ReturnMapOptions { integrator: IntegratorOptions::with_tol(tol), ..ReturnMapOptions::default() };
    let returns = opts.returns;
    let sample = match return_map(sys, eq, &radii, opts) {
        Ok(s) => s,
        Err(e) => {
            errors.push(note("dynamics", e.to_string()));
            return None;
        }
    };
    let structure = match classify_orbit_structure(&sample, CLASSIFICATION_TOL) {
        Ok(s) => s,
        Err(e) => {
            errors.push(note("dynamics", e.to_string()));
            return None;
        }
    };
    let cycle_radius = match structure {
        OrbitStructure::StableCycle { radius } | OrbitStructure::UnstableCycle { radius } => Some(round(radius)),
        _ => None,
    };
    let drift = sample.max_relative_drift();
    Some(DynamicsBlock {
        orbit_structure: structure.name().into(),
        cycle_radius,
        radii: round_all(&radii),
        returns,
        max_relative_drift: if drift.is_finite() { round(drift) } else { -1.0 },
        classification_tol: CLASSIFICATION_TOL,
        integrator_tol: tol,
        scope: format!("sampled radii {:.3e} to {:.3e} only", radii[0], radii[RADII - 1]),
    })
}
