//! Parser for the --init cosine-series grammar:
//!   "1.0 + 0.1 cos(2theta) - 0.05 cos(5θ)"
//! Terms are constants or `a cos(k theta)` (also `a*cos(kθ)`, `cos(theta)`).

use anyhow::{bail, Result};
use isolab_core::fiber::{CosineSeries, CosineTerm};

pub fn parse_cosine_series(input: &str) -> Result<CosineSeries> {
    let cleaned: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        bail!("empty init expression");
    }
    let mut mean = 0.0;
    let mut terms: Vec<CosineTerm> = Vec::new();
    for (sign, term) in split_terms(&cleaned)? {
        if term.is_empty() {
            bail!("dangling sign in init expression {input:?}");
        }
        match parse_term(&term)? {
            Term::Constant(c) => mean += sign * c,
            Term::Cosine { mode, amplitude } => terms.push(CosineTerm {
                mode,
                amplitude: sign * amplitude,
                phase: 0.0,
            }),
        }
    }
    Ok(CosineSeries { mean, terms })
}

enum Term {
    Constant(f64),
    Cosine { mode: u32, amplitude: f64 },
}

fn split_terms(s: &str) -> Result<Vec<(f64, String)>> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut sign = 1.0;
    let mut prev: Option<char> = None;
    for c in s.chars() {
        let is_sign = (c == '+' || c == '-')
            && prev.is_some_and(|p| p != 'e' && p != 'E' && p != '(' && p != '+' && p != '-');
        if is_sign {
            out.push((sign, std::mem::take(&mut current)));
            sign = if c == '-' { -1.0 } else { 1.0 };
        } else if current.is_empty() && out.is_empty() && prev.is_none() && (c == '+' || c == '-') {
            sign = if c == '-' { -1.0 } else { 1.0 };
        } else {
            current.push(c);
        }
        prev = Some(c);
    }
    out.push((sign, current));
    Ok(out)
}

fn parse_term(term: &str) -> Result<Term> {
    if let Some(idx) = term.find("cos(") {
        let coeff = term[..idx].trim_end_matches('*');
        let amplitude = if coeff.is_empty() {
            1.0
        } else {
            parse_number(coeff)?
        };
        let inner = term[idx + 4..]
            .strip_suffix(')')
            .ok_or_else(|| anyhow::anyhow!("unclosed cos( in {term:?}"))?;
        let mode = parse_mode(inner)?;
        Ok(Term::Cosine { mode, amplitude })
    } else {
        Ok(Term::Constant(parse_number(term)?))
    }
}

fn parse_number(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| anyhow::anyhow!("cannot parse number {s:?}"))
}

/// The cos argument: `theta`, `θ`, `2theta`, `2*theta`, `2θ`, or a bare
/// integer meaning k with the angle implied.
fn parse_mode(inner: &str) -> Result<u32> {
    let stripped = inner
        .strip_suffix("theta")
        .or_else(|| inner.strip_suffix("θ"))
        .or_else(|| inner.strip_suffix('t'))
        .unwrap_or(inner)
        .trim_end_matches('*');
    if stripped.is_empty() {
        return Ok(1);
    }
    stripped.parse::<u32>().map_err(|_| {
        anyhow::anyhow!(
            "cannot parse mode number {inner:?} (expected forms: theta, 2theta, 3*theta)"
        )
    })
}
