use std::fmt::Write as _;

use super::{Coefficient, IsingInstance};
use crate::{kv, Error, Result};

/// Reads the instance text format:
///
/// ```text
/// n = 3
/// label = triangle
/// [linear]
/// 0 = 2
/// [pairs]
/// 0 1 = -1
/// ```
pub fn parse_instance(text: &str) -> Result<IsingInstance> {
    let entries = kv::parse(text)?;
    let mut n = None;
    let mut label = String::new();
    for e in entries.iter().filter(|e| e.section.is_none()) {
        match e.key.as_str() {
            "n" => {
                let v = e
                    .value
                    .parse::<usize>()
                    .map_err(|_| Error::parse(e.line, format!("`n` must be a positive integer, got `{}`", e.value)))?;
                n = Some(v);
            }
            "label" => label = e.value.clone(),
            other => return Err(Error::parse(e.line, format!("unknown key `{other}`"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(0, "missing `n = <qubits>`"))?;
    let mut inst = IsingInstance::new(n).map_err(|err| Error::parse(0, err.to_string()))?.with_label(label);

    for e in entries.iter().filter(|e| e.section.is_some()) {
        let coeff: Coefficient = e.value.parse().map_err(|msg| Error::parse(e.line, msg))?;
        let indices = e
            .key
            .split_whitespace()
            .map(|tok| tok.parse::<usize>().map_err(|_| Error::parse(e.line, format!("bad qubit index `{tok}`"))))
            .collect::<Result<Vec<_>>>()?;
        let outcome = match (e.section.as_deref(), indices.as_slice()) {
            (Some("linear"), [i]) => inst.set_linear(*i, coeff),
            (Some("pairs"), [i, j]) => inst.set_pair(*i, *j, coeff),
            (Some("linear"), _) => return Err(Error::parse(e.line, "linear terms take one index")),
            (Some("pairs"), _) => return Err(Error::parse(e.line, "pair terms take two indices")),
            (Some(other), _) => return Err(Error::parse(e.line, format!("unknown section `[{other}]`"))),
            (None, _) => unreachable!(),
        };
        outcome.map_err(|err| Error::parse(e.line, err.to_string()))?;
    }
    Ok(inst)
}

pub fn write_instance(inst: &IsingInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n = {}", inst.n_qubits());
    if !inst.label().is_empty() {
        let _ = writeln!(out, "label = {}", inst.label());
    }
    let _ = writeln!(out, "[linear]");
    for (i, c) in inst.linear_terms() {
        let _ = writeln!(out, "{i} = {c}");
    }
    let _ = writeln!(out, "[pairs]");
    for (p, c) in inst.pair_terms() {
        let _ = writeln!(out, "{} {} = {c}", p.lo(), p.hi());
    }
    out
}

/// Whitespace-separated `i j` lines as a max-cut instance. `n` defaults to
/// one past the largest index seen.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<IsingInstance> {
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums = line
            .split_whitespace()
            .map(|tok| tok.parse::<usize>().map_err(|_| Error::parse(idx + 1, format!("bad node `{tok}`"))))
            .collect::<Result<Vec<_>>>()?;
        match nums.as_slice() {
            [i, j] => edges.push((*i, *j)),
            _ => return Err(Error::parse(idx + 1, "expected `i j`")),
        }
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0));
    IsingInstance::maxcut(n, &edges)
}
