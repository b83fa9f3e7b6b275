//! Parallel enumeration of three-reaction quadratic trimolecular networks.

use crnosc::classify::{match_family, EnumerationReport, PartialScan, TrimolecularSpace};
use crnosc::ReactionNetwork;
use rayon::prelude::*;
use serde::Serialize;

use crate::CliError;

/// Same result as the serial core routine; work is split by the smallest
/// reaction index of each triple and merged in index order.
pub fn enumerate_parallel(n_max: usize) -> Result<EnumerationReport, CliError> {
    if n_max < 2 {
        return Err(CliError::Input("--n-max must be at least 2".into()));
    }
    let mut per = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        per.push((n, scan_species_count(n)?));
    }
    Ok(EnumerationReport::assemble(per))
}

pub fn scan_species_count(n: usize) -> Result<PartialScan, CliError> {
    let space = TrimolecularSpace::new(n)?;
    let parts: Vec<PartialScan> = (0..space.n_reactions()).into_par_iter().map(|f| space.scan_first(f, false)).collect();
    let mut scan = PartialScan::default();
    for p in parts {
        scan.merge(p);
    }
    Ok(scan)
}

#[derive(Debug, Serialize)]
pub struct EnumerationOutput {
    pub n_max: usize,
    pub per_species: Vec<SpeciesRow>,
    pub networks: Vec<NetworkRow>,
}

#[derive(Debug, Serialize)]
pub struct SpeciesRow {
    pub n: usize,
    pub triples: u64,
    pub all_species: u64,
    pub rank_two: u64,
    pub nontrivial: u64,
    pub periodic_labelled: u64,
    pub periodic_unique: usize,
}

#[derive(Debug, Serialize)]
pub struct NetworkRow {
    pub canonical: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub params: Vec<i64>,
    pub trivial_species: usize,
}

fn row(net: &ReactionNetwork) -> NetworkRow {
    let tag = match_family(net);
    NetworkRow {
        canonical: net.render(),
        family: tag.as_ref().map(|t| t.family.name().to_string()),
        params: tag.map(|t| t.family.params()).unwrap_or_default(),
        trivial_species: net.trivial_species().len(),
    }
}

pub fn to_output(n_max: usize, report: &EnumerationReport) -> EnumerationOutput {
    EnumerationOutput {
        n_max,
        per_species: report
            .per_species
            .iter()
            .map(|(n, c, u)| SpeciesRow {
                n: *n,
                triples: c.triples,
                all_species: c.all_species,
                rank_two: c.rank_two,
                nontrivial: c.nontrivial,
                periodic_labelled: c.periodic_labelled,
                periodic_unique: *u,
            })
            .collect(),
        networks: report.periodic.iter().map(row).collect(),
    }
}
