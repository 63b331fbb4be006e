//! Modulus configuration files.
//!
//! Two formats map an extension degree to a modulus. JSON:
//!
//! ```text
//! {"2": [2, 2, 1], "3": "x^3 + 2x + 1"}
//! ```
//!
//! or plain text, one `r: polynomial` per line with `#` comments:
//!
//! ```text
//! # r: coefficients, constant term first
//! 2: 2,2,1
//! 3: x^3 + 2x + 1
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf3r::{FieldContext, Poly3};

pub type ModulusTable = BTreeMap<u32, Poly3>;

pub fn parse_moduli(text: &str) -> Result<ModulusTable> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

pub fn load_moduli(path: &Path) -> Result<ModulusTable> {
    let text = std::fs::read_to_string(path)?;
    parse_moduli(&text)
}

fn parse_degree(s: &str) -> Result<u32> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad extension degree {s:?}")))
}

fn parse_json(text: &str) -> Result<ModulusTable> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("modulus config: {e}")))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("modulus config must be a JSON object".into()))?;
    let mut out = ModulusTable::new();
    for (k, v) in obj {
        let r = parse_degree(k)?;
        let poly = match v {
            Value::String(s) => s.parse()?,
            Value::Array(items) => {
                let coeffs = items
                    .iter()
                    .map(|c| c.as_i64().ok_or_else(|| Error::Parse(format!("bad coefficient {c} for r={r}"))))
                    .collect::<Result<Vec<_>>>()?;
                Poly3::from_coeffs(&coeffs)
            }
            other => return Err(Error::Parse(format!("bad modulus for r={r}: {other}"))),
        };
        out.insert(r, poly);
    }
    Ok(out)
}

fn parse_text(text: &str) -> Result<ModulusTable> {
    let mut out = ModulusTable::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (r, poly) = line
            .split_once([':', '='])
            .ok_or_else(|| Error::Parse(format!("line {}: expected `r: polynomial`", no + 1)))?;
        out.insert(parse_degree(r)?, poly.parse()?);
    }
    Ok(out)
}

/// Picks the modulus for `r`: an explicit `--poly` wins over the config
/// file, which wins over the shipped default.
pub fn build_field(r: u32, poly: Option<&str>, config: Option<&ModulusTable>) -> Result<FieldContext> {
    let modulus = match (poly, config) {
        (Some(p), _) => Some(p.parse::<Poly3>()?),
        (None, Some(table)) => table.get(&r).cloned(),
        (None, None) => None,
    };
    FieldContext::new(r, modulus)
}
