//! Serializable analysis report.

use serde::Serialize;

/// Floats are rounded to 12 significant digits so reports are byte-stable.
pub fn round(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

pub fn round_all(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| round(x)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub network: String,
    pub canonical: String,
    pub species: Vec<String>,
    pub rates: Vec<String>,
    pub structural: Structural,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<EquilibriumBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jacobian: Option<JacobianBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsBlock>,
    /// Blocks left out and why.
    pub skipped: Vec<Note>,
    /// Steps that failed on valid input.
    pub errors: Vec<Note>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Note {
    pub block: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Structural {
    pub n_species: usize,
    pub n_reactions: usize,
    pub rank: usize,
    pub nontriviality: Nontriviality,
    pub molecularity: Molecularity,
    pub trivial_species: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_geometry: Option<SourceGeometry>,
    pub divergence_class: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Nontriviality {
    pub nontrivial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive_kernel_vector: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stiemke_dual: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Molecularity {
    pub source: i64,
    pub target: i64,
    pub quadratic: bool,
    pub trimolecular: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SourceGeometry {
    pub collinear: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<String>,
    pub pair_scalars: Vec<PairScalar>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairScalar {
    pub species: [String; 2],
    pub value: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumBlock {
    pub method: String,
    pub x_bar: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<String>>,
    pub mu: f64,
    pub u: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_values: Option<Vec<f64>>,
    /// Equilibria found on the class, when a class was searched.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    pub degenerate: bool,
    pub relative_residual: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JacobianBlock {
    pub privileged_rows: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    pub det: f64,
    pub trace: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_det: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_trace: Option<String>,
    pub saddle: bool,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictBlock {
    /// Planar verdict when available, otherwise the periodic-orbit verdict.
    pub headline: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planar: Option<PlanarBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trimolecular: Option<TrimolecularBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyBlock>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanarBlock {
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_id: Option<u8>,
    pub swapped: bool,
    pub c: [i64; 3],
    pub d: [i64; 3],
    pub witness: Vec<WitnessRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_relation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessRow {
    pub branch: u8,
    pub condition: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrimolecularBlock {
    pub admits_periodic: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_condition: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub reduced_network: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyBlock {
    pub name: String,
    pub params: Vec<i64>,
    pub species_perm: Vec<usize>,
    pub reaction_order: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicsBlock {
    pub orbit_structure: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_radius: Option<f64>,
    pub radii: Vec<f64>,
    pub returns: usize,
    pub max_relative_drift: f64,
    pub classification_tol: f64,
    pub integrator_tol: f64,
    /// Orbit claims cover the sampled radii only.
    pub scope: String,
}
