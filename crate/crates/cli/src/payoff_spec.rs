//! Payoff ingestion.
//!
//! Three spellings are accepted everywhere a payoff is expected:
//!
//! * inline mini-syntax `family:key=val,...` (lists use `|`, nodes `x:y`),
//! * `@path` pointing at a JSON file,
//! * a raw JSON document.
//!
//! The JSON schema is canonical: either `{"family": ..., "params": {...}}`
//! naming a catalog entry, or `{"segments": [{lo, hi, kind, coeffs}, ...],
//! "point_values": [[s, v], ...]}` building the payoff piece by piece.
//! Segment kinds: `poly` (coefficients in ascending powers) and `exp`
//! (`coeffs: [a, b]` for `a·e^{b·x}`).

use std::fs;

use serde_json::Value;
use strikespan_core::{builtin_catalog, FamilyParams, Payoff, Segment};

use crate::{parse_f64, parse_kv_list, CliError};

pub fn parse_payoff(spec: &str) -> Result<Payoff, CliError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("payoff file `{path}`: {e}")))?;
        return payoff_from_json(&text);
    }
    if spec.starts_with('{') {
        return payoff_from_json(spec);
    }
    payoff_from_inline(spec)
}

fn payoff_from_inline(spec: &str) -> Result<Payoff, CliError> {
    let (family, rest) = match spec.split_once(':') {
        Some((f, r)) => (f, Some(r)),
        None => (spec, None),
    };
    let mut params = FamilyParams::new();
    if let Some(rest) = rest {
        for (k, v) in parse_kv_list(rest)? {
            match k.as_str() {
                "nodes" => params = params.with_nodes(parse_node_list(&v)?),
                "coeffs" => params = params.with_coeffs(parse_pipe_list(&v)?),
                _ => params = params.with_scalar(k.as_str(), parse_f64(&k, &v)?),
            }
        }
    }
    Ok(builtin_catalog(family, &params)?)
}

fn parse_node_list(v: &str) -> Result<Vec<(f64, f64)>, CliError> {
    v.split('|')
        .map(|pair| {
            let (x, y) = pair.split_once(':').ok_or_else(|| {
                CliError::data(format!("node `{pair}`: expected x:y"))
            })?;
            Ok((parse_f64("node x", x)?, parse_f64("node y", y)?))
        })
        .collect()
}

fn parse_pipe_list(v: &str) -> Result<Vec<f64>, CliError> {
    v.split('|').map(|c| parse_f64("coefficient", c)).collect()
}

fn payoff_from_json(text: &str) -> Result<Payoff, CliError> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::data("payoff spec must be a JSON object"))?;
    match (obj.get("family"), obj.get("segments")) {
        (Some(fam), None) => {
            let family = fam
                .as_str()
                .ok_or_else(|| CliError::data("`family` must be a string"))?;
            let params = family_params(obj.get("params"))?;
            Ok(builtin_catalog(family, &params)?)
        }
        (None, Some(segs)) => custom_payoff(segs, obj.get("point_values")),
        _ => Err(CliError::data(
            "payoff spec needs exactly one of `family` or `segments`",
        )),
    }
}

fn family_params(params: Option<&Value>) -> Result<FamilyParams, CliError> {
    let mut out = FamilyParams::new();
    let Some(params) = params else {
        return Ok(out);
    };
    let obj = params
        .as_object()
        .ok_or_else(|| CliError::data("`params` must be a JSON object"))?;
    for (k, v) in obj {
        match k.as_str() {
            "nodes" => {
                let pairs = v
                    .as_array()
                    .ok_or_else(|| CliError::data("`nodes` must be an array of [x, y]"))?;
                let mut nodes = Vec::with_capacity(pairs.len());
                for pair in pairs {
                    let xy = pair
                        .as_array()
                        .filter(|a| a.len() == 2)
                        .ok_or_else(|| CliError::data("`nodes` entries must be [x, y]"))?;
                    nodes.push((json_f64("node x", &xy[0])?, json_f64("node y", &xy[1])?));
                }
                out = out.with_nodes(nodes);
            }
            "coeffs" => out = out.with_coeffs(json_f64_array("coeffs", v)?),
            _ => out = out.with_scalar(k.as_str(), json_f64(k, v)?),
        }
    }
    Ok(out)
}

fn json_f64(name: &str, v: &Value) -> Result<f64, CliError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::data(format!("`{name}` must be a finite number")))
}

fn json_f64_array(name: &str, v: &Value) -> Result<Vec<f64>, CliError> {
    v.as_array()
        .ok_or_else(|| CliError::data(format!("`{name}` must be an array")))?
        .iter()
        .map(|x| json_f64(name, x))
        .collect()
}

/// Upper bound of a segment: a number or the string `"inf"`.
fn json_hi(v: &Value) -> Result<f64, CliError> {
    if let Some(s) = v.as_str() {
        if s == "inf" {
            return Ok(f64::INFINITY);
        }
        return Err(CliError::data(format!(
            "segment `hi` must be a number or \"inf\", got `{s}`"
        )));
    }
    json_f64("hi", v)
}

fn custom_payoff(segs: &Value, point_values: Option<&Value>) -> Result<Payoff, CliError> {
    let segs = segs
        .as_array()
        .ok_or_else(|| CliError::data("`segments` must be an array"))?;
    let mut built = Vec::with_capacity(segs.len());
    for (i, seg) in segs.iter().enumerate() {
        let obj = seg
            .as_object()
            .ok_or_else(|| CliError::data(format!("segment {i} must be an object")))?;
        let lo = json_f64(
            "lo",
            obj.get("lo")
                .ok_or_else(|| CliError::data(format!("segment {i}: missing `lo`")))?,
        )?;
        let hi = json_hi(
            obj.get("hi")
                .ok_or_else(|| CliError::data(format!("segment {i}: missing `hi`")))?,
        )?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::data(format!("segment {i}: missing `kind`")))?;
        let coeffs = json_f64_array(
            "coeffs",
            obj.get("coeffs")
                .ok_or_else(|| CliError::data(format!("segment {i}: missing `coeffs`")))?,
        )?;
        built.push(build_segment(i, lo, hi, kind, &coeffs)?);
    }

    let mut pts = Vec::new();
    if let Some(pv) = point_values {
        let arr = pv
            .as_array()
            .ok_or_else(|| CliError::data("`point_values` must be an array of [s, v]"))?;
        for pair in arr {
            let sv = pair
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| CliError::data("`point_values` entries must be [s, v]"))?;
            pts.push((json_f64("s", &sv[0])?, json_f64("v", &sv[1])?));
        }
    }
    Ok(Payoff::new(
        built,
        &pts,
        format!("custom ({} segments)", segs.len()),
    )?)
}

fn build_segment(
    i: usize,
    lo: f64,
    hi: f64,
    kind: &str,
    coeffs: &[f64],
) -> Result<Segment, CliError> {
    match kind {
        "poly" => {
            if coeffs.is_empty() {
                return Err(CliError::data(format!(
                    "segment {i}: `poly` needs at least one coefficient"
                )));
            }
            let c0 = coeffs.to_vec();
            let c1 = differentiate(&c0);
            let c2 = differentiate(&c1);
            Ok(
                Segment::new(lo, hi, move |x| horner(&c0, x), move |x| horner(&c1, x))
                    .with_second(move |x| horner(&c2, x)),
            )
        }
        "exp" => {
            if coeffs.len() != 2 {
                return Err(CliError::data(format!(
                    "segment {i}: `exp` needs coeffs [a, b] for a*e^(b*x)"
                )));
            }
            let (a, b) = (coeffs[0], coeffs[1]);
            Ok(Segment::new(
                lo,
                hi,
                move |x| a * (b * x).exp(),
                move |x| a * b * (b * x).exp(),
            )
            .with_second(move |x| a * b * b * (b * x).exp()))
        }
        other => Err(CliError::data(format!(
            "segment {i}: unknown kind `{other}` (expected poly or exp)"
        ))),
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coefficients of the derivative, ascending powers.
fn differentiate(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}
