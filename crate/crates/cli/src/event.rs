//! Barrier event ingestion.
//!
//! Accepted spellings:
//!
//! * inline `maxlt:B=130`: statistic prefix `max`, `min`, `avg`, or
//!   `term`, comparison `lt`, `le`, `gt`, or `ge`, barrier level `B`,
//! * `@path` pointing at a JSON descriptor,
//! * a raw JSON descriptor: `{"stat": "running_max"|"running_min"|
//!   "average"|"terminal", "set": {"kind": "interval", "lo": number|"-inf",
//!   "hi": number|"inf", "lo_closed": bool, "hi_closed": bool}}`.

use std::fs;

use serde_json::Value;
use strikespan_core::{BarrierEvent, Interval, StatKind};

use crate::{parse_f64, parse_kv_list, CliError};

pub fn parse_event(spec: &str) -> Result<BarrierEvent, CliError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("event file `{path}`: {e}")))?;
        return event_from_json(&text);
    }
    if spec.starts_with('{') {
        return event_from_json(spec);
    }
    event_from_inline(spec)
}

fn event_from_inline(spec: &str) -> Result<BarrierEvent, CliError> {
    let (head, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::data(format!("event `{spec}`: expected e.g. maxlt:B=130")))?;
    let (stat_txt, cmp) = head.split_at(head.len().saturating_sub(2));
    let stat = match stat_txt {
        "max" => StatKind::RunningMax,
        "min" => StatKind::RunningMin,
        "avg" => StatKind::Average,
        "term" => StatKind::Terminal,
        other => {
            return Err(CliError::data(format!(
                "event `{spec}`: unknown statistic `{other}` (expected max, min, avg, or term)"
            )))
        }
    };
    let mut level = None;
    for (k, v) in parse_kv_list(rest)? {
        match k.as_str() {
            "B" => level = Some(parse_f64("B", &v)?),
            other => {
                return Err(CliError::data(format!(
                    "event `{spec}`: unknown key `{other}`"
                )))
            }
        }
    }
    let b = level.ok_or_else(|| CliError::data(format!("event `{spec}`: missing `B=`")))?;
    let set = match cmp {
        "lt" => Interval::below(b, false),
        "le" => Interval::below(b, true),
        "gt" => Interval::above(b, false),
        "ge" => Interval::above(b, true),
        other => {
            return Err(CliError::data(format!(
                "event `{spec}`: unknown comparison `{other}` (expected lt, le, gt, or ge)"
            )))
        }
    }?;
    Ok(BarrierEvent::new(stat, set))
}

fn json_endpoint(name: &str, v: &Value) -> Result<f64, CliError> {
    if let Some(s) = v.as_str() {
        return match s {
            "-inf" => Ok(f64::NEG_INFINITY),
            "inf" => Ok(f64::INFINITY),
            other => Err(CliError::data(format!(
                "event `{name}` must be a number, \"-inf\", or \"inf\", got `{other}`"
            ))),
        };
    }
    v.as_f64()
        .filter(|x| !x.is_nan())
        .ok_or_else(|| CliError::data(format!("event `{name}` must be a number")))
}

fn event_from_json(text: &str) -> Result<BarrierEvent, CliError> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::data("event descriptor must be a JSON object"))?;
    let stat = match obj.get("stat").and_then(Value::as_str) {
        Some("running_max") => StatKind::RunningMax,
        Some("running_min") => StatKind::RunningMin,
        Some("average") => StatKind::Average,
        Some("terminal") => StatKind::Terminal,
        Some(other) => {
            return Err(CliError::data(format!(
                "event `stat`: unknown value `{other}`"
            )))
        }
        None => return Err(CliError::data("event descriptor: missing `stat`")),
    };
    let set = obj
        .get("set")
        .and_then(Value::as_object)
        .ok_or_else(|| CliError::data("event descriptor: missing `set` object"))?;
    match set.get("kind").and_then(Value::as_str) {
        Some("interval") => {}
        _ => {
            return Err(CliError::data(
                "event `set.kind` must be the string \"interval\"",
            ))
        }
    }
    let lo = json_endpoint(
        "set.lo",
        set.get("lo")
            .ok_or_else(|| CliError::data("event descriptor: missing `set.lo`"))?,
    )?;
    let hi = json_endpoint(
        "set.hi",
        set.get("hi")
            .ok_or_else(|| CliError::data("event descriptor: missing `set.hi`"))?,
    )?;
    let lo_closed = set
        .get("lo_closed")
        .and_then(Value::as_bool)
        .ok_or_else(|| CliError::data("event descriptor: missing boolean `set.lo_closed`"))?;
    let hi_closed = set
        .get("hi_closed")
        .and_then(Value::as_bool)
        .ok_or_else(|| CliError::data("event descriptor: missing boolean `set.hi_closed`"))?;
    let interval = Interval::new(lo, hi, lo_closed, hi_closed)?;
    Ok(BarrierEvent::new(stat, interval))
}

/// Echo text for the config block.
pub fn event_echo(e: &BarrierEvent) -> Value {
    let stat = match e.stat {
        StatKind::RunningMax => "running_max",
        StatKind::RunningMin => "running_min",
        StatKind::Average => "average",
        StatKind::Terminal => "terminal",
    };
    let endpoint = |x: f64| -> Value {
        if x == f64::NEG_INFINITY {
            Value::from("-inf")
        } else if x == f64::INFINITY {
            Value::from("inf")
        } else {
            crate::output::num(x)
        }
    };
    serde_json::json!({
        "stat": stat,
        "set": {
            "kind": "interval",
            "lo": endpoint(e.set.lo),
            "hi": endpoint(e.set.hi),
            "lo_closed": e.set.lo_closed,
            "hi_closed": e.set.hi_closed,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_prefixes() {
        let e = parse_event("maxlt:B=130").unwrap();
        assert_eq!(e.stat, StatKind::RunningMax);
        assert!(e.set.contains(129.9) && !e.set.contains(130.0));

        let e = parse_event("minge:B=80").unwrap();
        assert_eq!(e.stat, StatKind::RunningMin);
        assert!(e.set.contains(80.0) && !e.set.contains(79.9));

        let e = parse_event("avgle:B=100").unwrap();
        assert_eq!(e.stat, StatKind::Average);
        assert!(e.set.contains(100.0) && !e.set.contains(100.1));

        let e = parse_event("termgt:B=140").unwrap();
        assert_eq!(e.stat, StatKind::Terminal);
        assert!(!e.set.contains(140.0) && e.set.contains(140.1));
    }

    #[test]
    fn json_descriptor() {
        let e = parse_event(
            r#"{"stat": "running_min", "set": {"kind": "interval", "lo": 80, "hi": "inf",
                "lo_closed": true, "hi_closed": false}}"#,
        )
        .unwrap();
        assert_eq!(e.stat, StatKind::RunningMin);
        assert!(e.set.contains(80.0));
        assert!(e.set.contains(1e12));
    }

    #[test]
    fn echo_round_trips() {
        let e = parse_event("maxlt:B=130").unwrap();
        let echoed = event_echo(&e);
        let back = parse_event(&echoed.to_string()).unwrap();
        assert_eq!(back.stat, e.stat);
        assert_eq!(back.set, e.set);
    }

    #[test]
    fn bad_events_are_data_errors() {
        for bad in [
            "130",
            "maxat:B=130",
            "zzlt:B=130",
            "maxlt:C=130",
            "maxlt:B=abc",
            r#"{"stat": "running_max"}"#,
            r#"{"stat": "sideways", "set": {"kind": "interval", "lo": 0, "hi": 1,
                "lo_closed": true, "hi_closed": true}}"#,
        ] {
            let e = parse_event(bad).unwrap_err();
            assert_eq!(e.exit_code(), crate::EXIT_DATA, "{bad}");
        }
    }
}
