use std::fs;
use std::io::Write;
use std::path::Path;

use crnosc::dynamics::Trajectory;
use crnosc::{parse_system, MassActionSystem};

use crate::CliError;

/// Network source: a file in the network grammar, or inline text.
pub fn load_system(file: Option<&Path>, inline: Option<&str>) -> Result<MassActionSystem, CliError> {
    let text = match (file, inline) {
        (Some(p), None) => fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        (None, Some(t)) => t.to_string(),
        (Some(_), Some(_)) => return Err(CliError::Input("give either a network file or --net, not both".into())),
        (None, None) => return Err(CliError::Input("no network given".into())),
    };
    let sys = parse_system(&text)?;
    if sys.network().n_reactions() == 0 {
        return Err(CliError::Input("network has no reactions".into()));
    }
    Ok(sys)
}

/// `--net` accepts a path when one exists, otherwise grammar text.
pub fn load_net_flag(net: &str) -> Result<MassActionSystem, CliError> {
    let p = Path::new(net);
    if p.is_file() {
        load_system(Some(p), None)
    } else {
        load_system(None, Some(net))
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| CliError::Input(format!("not a number: '{t}'"))))
        .collect()
}

/// `a:b` with `a < b`.
pub fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Input(format!("expected a range 'lo:hi', got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Overrides the rates read from the network file.
pub fn apply_kappa(sys: MassActionSystem, kappa: Option<&str>) -> Result<MassActionSystem, CliError> {
    match kappa {
        None => Ok(sys),
        Some(k) => {
            let k = parse_list(k)?;
            Ok(sys.with_kappa(&k)?)
        }
    }
}

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                so.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

pub fn trajectory_csv(species: &[String], traj: &Trajectory) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(vec![]);
    let mut header = vec!["t".to_string()];
    header.extend(species.iter().cloned());
    w.write_record(&header)?;
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![t.to_string()];
        row.extend(x.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("0.5:2").unwrap(), (0.5, 2.0));
        assert!(parse_range("2:0.5").is_err());
        assert!(parse_range("1").is_err());
        assert_eq!(parse_list("1, 2.5,3").unwrap(), vec![1.0, 2.5, 3.0]);
        assert!(parse_list("1,x").is_err());
    }

    #[test]
    fn kappa_override_checks_length() {
        let sys = load_system(None, Some("X -> 2X; X + Y -> 2Y; Y -> 0")).unwrap();
        assert_eq!(apply_kappa(sys.clone(), Some("1,2,3")).unwrap().kappa(), vec![1.0, 2.0, 3.0]);
        assert_eq!(apply_kappa(sys, Some("1,2")).unwrap_err().exit_code(), 1);
    }
}
