//! Canonical cycle lists and the `( i1 i2 ... )` text format.

use crate::instance::{AgentId, ParseError};

/// Rotates a cycle so its smallest agent comes first.
pub fn rotate_to_min(c: &[AgentId]) -> Vec<AgentId> {
    let k = c.iter().enumerate().min_by_key(|(_, a)| **a).map(|(k, _)| k).unwrap_or(0);
    c[k..].iter().chain(&c[..k]).copied().collect()
}

/// Canonical form: each cycle rotated to its minimum, then the list sorted.
pub fn canonicalize(cycles: Vec<Vec<AgentId>>) -> Vec<Vec<AgentId>> {
    let mut out: Vec<Vec<AgentId>> = cycles.iter().map(|c| rotate_to_min(c)).collect();
    out.sort();
    out
}

pub fn format_cycle(c: &[AgentId]) -> String {
    let body: Vec<String> = c.iter().map(|a| a.to_string()).collect();
    format!("( {} )", body.join(" "))
}

/// One cycle per line.
pub fn format_cycles(cycles: &[Vec<AgentId>]) -> String {
    cycles.iter().map(|c| format_cycle(c) + "\n").collect()
}

/// Reads cycles written by [`format_cycles`]. Blank and `#` lines are skipped.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<AgentId>>, ParseError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let inner = l
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| ParseError::Malformed { line, msg: "expected `( i1 i2 ... )`".into() })?;
        let mut cycle = Vec::new();
        for t in inner.split_whitespace() {
            let v: u32 = t
                .parse()
                .map_err(|_| ParseError::Malformed { line, msg: format!("`{t}` is not a number") })?;
            cycle.push(AgentId::from_label(v).ok_or_else(|| ParseError::Malformed {
                line,
                msg: "agent ids are 1-based".into(),
            })?);
        }
        if cycle.is_empty() {
            return Err(ParseError::Malformed { line, msg: "empty cycle".into() });
        }
        out.push(cycle);
    }
    Ok(out)
}

/// Splits a successor array into cycles (in canonical form).
pub(crate) fn cycles_of_permutation(succ: &[u32]) -> Vec<Vec<AgentId>> {
    let mut seen = vec![false; succ.len()];
    let mut out = Vec::new();
    for s in 0..succ.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(AgentId::from_index(x));
            x = succ[x] as usize;
        }
        out.push(c);
    }
    canonicalize(out)
}
