use std::io::Read;
use std::path::Path;

use locext_core::qstates::{
    grid_to_state, rho_3x3, rho_3x3_terms, rho_4x5, rho_family, tiles_complement, BipartiteState, FamilySpec, GridGraph,
    NamedTerm,
};
use serde::de::DeserializeOwned;

use crate::args::Global;
use crate::error::CliError;

/// A state plus whatever is known about it by name.
pub struct Resolved {
    pub state: BipartiteState,
    pub known: Known,
}

pub enum Known {
    /// Range decomposition and the witness name used for lower bounds.
    Terms { terms: Vec<NamedTerm>, witness: &'static str, default_k: usize, exclude: Vec<String> },
    /// One of the first two pipeline stages or the final state, with the pipeline.
    Rho4x5 { stage: usize, data: Box<locext_core::qstates::Rho4x5> },
    Nothing,
}

pub fn read_text(path: &Path, field: &str) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::input(field, format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::input(field, format!("{}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path, field: &str) -> Result<T, CliError> {
    let text = read_text(path, field)?;
    serde_json::from_str(&text).map_err(|e| CliError::input(field, format!("{}: {e}", path.display())))
}

fn family(k: usize, field: &str) -> Result<Resolved, CliError> {
    let spec = FamilySpec::new(k);
    let state = rho_family(&spec).map_err(|e| CliError::input(field, e))?;
    let terms = locext_core::qstates::family_terms(&spec)?;
    let exclude = (1..=2 * k - 2).map(|i| format!("delta_{i}")).collect();
    Ok(Resolved { state, known: Known::Terms { terms, witness: "alpha", default_k: k, exclude } })
}

fn named(name: &str) -> Result<Option<Resolved>, CliError> {
    let stage = |i: usize| -> Result<Resolved, CliError> {
        let data = rho_4x5()?;
        Ok(Resolved { state: data.stages[i].clone(), known: Known::Rho4x5 { stage: i, data: Box::new(data) } })
    };
    Ok(Some(match name {
        "rho3x3" => Resolved {
            state: rho_3x3(),
            known: Known::Terms { terms: rho_3x3_terms(), witness: "psi00", default_k: 2, exclude: vec![] },
        },
        "rho4x3" => stage(0)?,
        "rho4x4" => stage(1)?,
        "rho4x5" => stage(2)?,
        "tiles" => Resolved { state: tiles_complement(), known: Known::Nothing },
        _ => match name.strip_prefix("family:") {
            Some(k) => {
                let k: usize = k.parse().map_err(|_| CliError::input("--state", format!("bad family parameter {k:?}")))?;
                family(k, "--state")?
            }
            None => return Ok(None),
        },
    }))
}

/// `--graph`, then `--family`, then `--state`, then stdin.
pub fn resolve_state(g: &Global) -> Result<Resolved, CliError> {
    if let Some(path) = &g.graph {
        let graph: GridGraph = read_json(path, "--graph")?;
        graph.validate().map_err(|e| CliError::input("--graph", e))?;
        let state = grid_to_state(&graph, path.display().to_string()).map_err(|e| CliError::input("--graph", e))?;
        return Ok(Resolved { state, known: Known::Nothing });
    }
    if let Some(k) = g.family {
        return family(k, "--family");
    }
    let spec = g.state.as_deref().unwrap_or("-");
    if let Some(r) = named(spec)? {
        return Ok(r);
    }
    let state: BipartiteState = read_json(Path::new(spec), "--state")?;
    Ok(Resolved { state, known: Known::Nothing })
}

/// `MxN`
pub fn parse_dims(s: &str, field: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| CliError::input(field, format!("expected MxN, got {s:?}")))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|_| CliError::input(field, format!("bad dimension {t:?}")));
    Ok((p(a)?, p(b)?))
}

/// `P,Q`
pub fn parse_pair(s: &str, field: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = s.split_once(',').ok_or_else(|| CliError::input(field, format!("expected P,Q, got {s:?}")))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|_| CliError::input(field, format!("bad rank {t:?}")));
    Ok((p(a)?, p(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_pairs() {
        assert_eq!(parse_dims("3x4", "f").unwrap(), (3, 4));
        assert_eq!(parse_pair("5, 6", "f").unwrap(), (5, 6));
        let err = parse_dims("34", "--dims").unwrap_err().to_string();
        assert!(err.starts_with("--dims:"), "{err}");
    }

    #[test]
    fn names_resolve() {
        let g = Global { state: Some("family:2".into()), ..Default::default() };
        let r = resolve_state(&g).unwrap();
        assert_eq!((r.state.dim_a, r.state.dim_b), (3, 3));
        let g = Global { state: Some("family:x".into()), ..Default::default() };
        let err = resolve_state(&g).err().expect("bad family parameter");
        assert!(err.to_string().starts_with("--state"));
    }
}
