//! Subcommands and their exit codes.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use crnosc::classify::{expand_to_trimolecular, match_family};
use crnosc::dynamics::{
    classify_orbit_structure, hopf_amplitude_scan, integrate, return_map, IntegratorOptions, MassActionField,
    ReturnMapOptions,
};
use crnosc::equilibria::{equilibria_on_class, planar_equilibrium, SolverOptions, StoichiometricClass};
use crnosc::hopf::{find_hopf_point, planar_census, KappaPath};
use serde_json::json;

use crate::analyze::{classify, ClassifyOptions};
use crate::enumerate::{enumerate_parallel, to_output};
use crate::io::{apply_kappa, emit, load_net_flag, load_system, parse_list, parse_range, trajectory_csv};
use crate::report::{round, round_all};
use crate::verify::{self, Suite};
use crate::CliError;

#[derive(Parser)]
#[command(name = "crnosc", version, about = "Oscillation analysis for small mass-action reaction networks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Structural, equilibrium, Jacobian and verdict report as JSON.
    Classify {
        file: Option<PathBuf>,
        /// Network text or file, instead of FILE.
        #[arg(long)]
        net: Option<String>,
        /// Comma-separated rate constants overriding the file.
        #[arg(long)]
        kappa: Option<String>,
        /// Point on the stoichiometric class to search.
        #[arg(long)]
        x0: Option<String>,
        /// Newton starts per class coordinate.
        #[arg(long, default_value_t = 32)]
        starts: usize,
        /// Also sample the return map around the equilibrium.
        #[arg(long)]
        return_map: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the reproduction suite.
    Verify {
        /// Skip the five-species enumeration sweep.
        #[arg(long)]
        quick: bool,
        /// Criterion ids or names, comma separated.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = Suite::default().seed)]
        seed: u64,
        /// JSON summary file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate three-reaction quadratic trimolecular networks with a periodic orbit.
    Enumerate {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the mass-action ODE and write a CSV trajectory.
    Simulate {
        #[arg(long)]
        net: String,
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long)]
        x0: String,
        #[arg(long = "T", default_value_t = 100.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate a Hopf point along a rate path and report its focal value.
    HopfScan {
        #[arg(long)]
        net: String,
        /// e.g. `k1=t,k3=2*t^2`; unnamed rates are 1.
        #[arg(long)]
        path: String,
        #[arg(long)]
        t_range: String,
        /// Path parameters at which to measure the limit-cycle radius.
        #[arg(long)]
        amplitude: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a network with trimolecular targets.
    Expand {
        #[arg(long)]
        net: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the first-return map around the equilibrium as CSV.
    ReturnMap {
        #[arg(long)]
        net: String,
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long)]
        x0: Option<String>,
        /// Comma-separated section radii.
        #[arg(long)]
        radii: String,
        #[arg(long, default_value_t = 3)]
        returns: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Planar census for one source configuration.
    Census {
        #[arg(long)]
        case: u8,
        #[arg(long)]
        max_mol: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn pretty(v: &impl serde::Serialize) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

pub fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Classify { file, net, kappa, x0, starts, return_map, tol, out } => {
            let sys = match (&file, &net) {
                (None, Some(n)) => load_net_flag(n)?,
                _ => load_system(file.as_deref(), net.as_deref())?,
            };
            let sys = apply_kappa(sys, kappa.as_deref())?;
            let opts = ClassifyOptions { x0: x0.as_deref().map(parse_list).transpose()?, starts, return_map, tol };
            let report = classify(&sys, &opts);
            emit(out.as_deref(), &pretty(&report)?)?;
            if !report.errors.is_empty() {
                for e in &report.errors {
                    eprintln!("{}: {}", e.block, e.message);
                }
                return Ok(2);
            }
            Ok(0)
        }
        Command::Verify { quick, only, seed, out } => {
            let suite = Suite { quick, seed };
            let mut results = vec![];
            for c in verify::select(only.as_deref())? {
                let r = verify::run(&c, &suite);
                println!("{}", r.line());
                for n in &r.notes {
                    println!("NOTE {}: {n}", r.id);
                }
                results.push(r);
            }
            if let Some(p) = out {
                emit(Some(&p), &pretty(&results)?)?;
            }
            Ok(if results.iter().all(|r| r.passed) { 0 } else { 1 })
        }
        Command::Enumerate { n_max, out } => {
            let report = enumerate_parallel(n_max)?;
            emit(out.as_deref(), &pretty(&to_output(n_max, &report))?)?;
            Ok(0)
        }
        Command::Simulate { net, kappa, x0, t_end, tol, out } => {
            let sys = apply_kappa(load_net_flag(&net)?, kappa.as_deref())?;
            let x0 = parse_list(&x0)?;
            if x0.len() != sys.network().n_species() || x0.iter().any(|v| !(*v >= 0.0)) {
                return Err(CliError::Input(format!(
                    "--x0 needs {} nonnegative values",
                    sys.network().n_species()
                )));
            }
            if !(t_end > 0.0) {
                return Err(CliError::Input("--T must be positive".into()));
            }
            let traj = integrate(&MassActionField::new(&sys), &x0, t_end, IntegratorOptions::with_tol(tol))?;
            emit(out.as_deref(), &trajectory_csv(sys.network().species(), &traj)?)?;
            if traj.blew_up || traj.truncated {
                eprintln!("trajectory stopped at t = {}", traj.times.last().copied().unwrap_or(0.0));
                return Ok(2);
            }
            Ok(0)
        }
        Command::HopfScan { net, path, t_range, amplitude, out } => {
            let n = load_net_flag(&net)?.network().clone();
            let kp = KappaPath::parse(&path, n.n_reactions())?;
            let (lo, hi) = parse_range(&t_range)?;
            let value = match find_hopf_point(&n, &kp, lo, hi)? {
                None => json!({ "path": path, "t_range": [lo, hi], "found": false }),
                Some(hp) => {
                    let mut v = json!({
                        "path": path,
                        "t_range": [lo, hi],
                        "found": true,
                        "parameter": hp.parameter.map(round),
                        "kappa_star": round_all(&hp.kappa_star),
                        "equilibrium": round_all(&hp.equilibrium.x_bar),
                        "trace_residual": round(hp.trace_residual),
                        "det": round(hp.det_value),
                        "l1": round(hp.l1),
                        "classification": hp.classification.name(),
                    });
                    if let (Some(points), Some(t_star)) = (amplitude, hp.parameter) {
                        let points = parse_list(&points)?;
                        let scan = hopf_amplitude_scan(&n, &kp, t_star, &points, IntegratorOptions::default())?;
                        v["amplitude"] = json!({
                            "rows": scan.rows.iter().map(|r| json!({
                                "parameter": r.parameter,
                                "offset": round(r.offset),
                                "radius": r.radius.map(round),
                                "slope": r.slope.map(round),
                            })).collect::<Vec<_>>(),
                            "alpha": round(scan.alpha),
                            "beta": round(scan.beta),
                            "relative_residual": round(scan.relative_residual),
                        });
                    }
                    v
                }
            };
            emit(out.as_deref(), &pretty(&value)?)?;
            Ok(0)
        }
        Command::Expand { net, out } => {
            let big = expand_to_trimolecular(&load_net_flag(&net)?)?;
            emit(out.as_deref(), &(big.render().replace("; ", "\n") + "\n"))?;
            Ok(0)
        }
        Command::ReturnMap { net, kappa, x0, radii, returns, tol, out } => {
            let sys = apply_kappa(load_net_flag(&net)?, kappa.as_deref())?;
            let eq = match x0 {
                Some(x) => {
                    let x = parse_list(&x)?;
                    let class = StoichiometricClass::through_point(sys.network(), &x);
                    equilibria_on_class(&sys, &class, &SolverOptions::default())?.into_iter().next()
                }
                None => planar_equilibrium(&sys)?,
            }
            .ok_or_else(|| CliError::Precondition("no positive equilibrium".into()))?;
            let radii = parse_list(&radii)?;
            let opts = ReturnMapOptions { returns, integrator: IntegratorOptions::with_tol(tol), ..Default::default() };
            let sample = return_map(&sys, &eq, &radii, opts)?;
            let mut w = csv::Writer::from_writer(vec![]);
            let mut header = vec!["r_in".to_string()];
            header.extend((1..=returns).map(|k| format!("r_{k}")));
            header.extend((1..=returns).map(|k| format!("t_{k}")));
            w.write_record(&header).map_err(CliError::from)?;
            for s in &sample.samples {
                let cell = |v: Option<&f64>| v.map_or(String::new(), |x| x.to_string());
                let mut row = vec![s.r_in.to_string()];
                row.extend((0..returns).map(|k| cell(s.radii_out.get(k))));
                row.extend((0..returns).map(|k| cell(s.times.get(k))));
                w.write_record(&row).map_err(CliError::from)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
            emit(out.as_deref(), &String::from_utf8(bytes).expect("utf-8"))?;
            match classify_orbit_structure(&sample, 1e-5) {
                Ok(s) => eprintln!("orbit structure: {}", s.name()),
                Err(e) => eprintln!("orbit structure: {e}"),
            }
            Ok(0)
        }
        Command::Census { case, max_mol, out } => {
            let c = planar_census(case, max_mol)?;
            let positives: Vec<_> = c
                .positives
                .iter()
                .map(|(n, v)| {
                    json!({
                        "network": n.render(),
                        "verdict": v.verdict.name(),
                        "family": match_family(n).map(|t| json!({ "name": t.family.name(), "params": t.family.params() })),
                    })
                })
                .collect();
            let value = json!({ "case": case, "max_target_molecularity": max_mol, "scanned": c.scanned, "positives": positives });
            emit(out.as_deref(), &pretty(&value)?)?;
            Ok(0)
        }
    }
}
