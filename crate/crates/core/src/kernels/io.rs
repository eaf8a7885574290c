//! JSON scheme files.
//!
//! ```json
//! {"d": 3, "k_max": 10, "rule": "jzero", "j": 1,
//!  "exclude": [[4, [[1, 2, 4]]]],
//!  "weights": "geometric:0.5"}
//! ```
//!
//! `weights` is `"unit"`, `"geometric:<ratio>"`, or an explicit map from
//! comma-joined index (`"-1,2,4"`) to weight. A `custom` rule takes its
//! active set from `indices`, or from the keys of the explicit weight map.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::scheme::{CoefficientScheme, Parity, Rule, Weights};
use crate::error::{Error, Result};
use crate::harmonics::MultiIndex;
use crate::SCHEMA;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    d: usize,
    k_max: usize,
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    j: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parity: Option<Parity>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    exclude: Vec<(usize, Vec<Vec<i64>>)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    indices: Option<Vec<Vec<i64>>>,
    #[serde(default = "unit_weights")]
    weights: Value,
}

fn unit_weights() -> Value {
    Value::String("unit".into())
}

fn field_err<T>(field: &str, message: impl Into<String>) -> Result<T> {
    Err(Error::Field { field: field.into(), message: message.into() })
}

fn parse_index(field: &str, v: Vec<i64>) -> Result<MultiIndex> {
    MultiIndex::new(v).or_else(|e| field_err(field, e.to_string()))
}

fn parse_key(key: &str) -> Result<MultiIndex> {
    let entries = key
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .or_else(|_| field_err("weights", format!("key `{key}` is not a comma-separated index")))?;
    parse_index("weights", entries)
}

fn format_key(a: &MultiIndex) -> String {
    a.entries().iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_weights(v: &Value) -> Result<Weights> {
    match v {
        Value::String(s) if s == "unit" => Ok(Weights::Unit),
        Value::String(s) => match s.strip_prefix("geometric:") {
            Some(r) => r
                .trim()
                .parse::<f64>()
                .map(Weights::Geometric)
                .or_else(|_| field_err("weights", format!("bad geometric ratio `{r}`"))),
            None => field_err("weights", format!("expected \"unit\", \"geometric:<ratio>\" or a map, got \"{s}\"")),
        },
        Value::Object(map) => {
            let mut out = BTreeMap::new();
            for (key, w) in map {
                let Some(w) = w.as_f64() else {
                    return field_err("weights", format!("weight for `{key}` is not a number"));
                };
                out.insert(parse_key(key)?, w);
            }
            Ok(Weights::Explicit(out))
        }
        _ => field_err("weights", "expected a string or an object"),
    }
}

/// Parses a scheme from JSON text.
pub fn scheme_from_json(text: &str) -> Result<CoefficientScheme> {
    let file: SchemeFile = serde_json::from_str(text)?;
    if let Some(s) = &file.schema {
        if s != SCHEMA {
            return field_err("schema", format!("expected \"{SCHEMA}\", got \"{s}\""));
        }
    }
    let weights = parse_weights(&file.weights)?;
    let rule = match file.rule.as_str() {
        "full" => Rule::Full,
        "even" => Rule::EvenOnly,
        "odd" => Rule::OddOnly,
        "jzero" => match file.j {
            Some(j) => Rule::JZero(j),
            None => return field_err("j", "rule \"jzero\" requires j"),
        },
        "custom" => {
            let set: BTreeSet<MultiIndex> = match (&file.indices, &weights) {
                (Some(list), _) => {
                    list.iter().cloned().map(|v| parse_index("indices", v)).collect::<Result<_>>()?
                }
                (None, Weights::Explicit(map)) => map.keys().cloned().collect(),
                (None, _) => return field_err("indices", "rule \"custom\" needs indices or an explicit weight map"),
            };
            Rule::Custom(set)
        }
        other => return field_err("rule", format!("unknown rule \"{other}\"")),
    };
    let mut scheme = CoefficientScheme::new(file.d, file.k_max, rule)
        .or_else(|e| field_err("rule", e.to_string()))?
        .with_parity(file.parity.unwrap_or_default());
    for (k, list) in file.exclude {
        let indices = list.into_iter().map(|v| parse_index("exclude", v)).collect::<Result<Vec<_>>>()?;
        scheme = scheme.exclude(k, indices).or_else(|e| field_err("exclude", e.to_string()))?;
    }
    scheme.with_weights(weights).or_else(|e| field_err("weights", e.to_string()))
}

/// Serializes a scheme to the JSON file format.
pub fn scheme_to_json(s: &CoefficientScheme) -> String {
    let (rule, j, indices) = match s.rule() {
        Rule::Full => ("full", None, None),
        Rule::JZero(j) => ("jzero", Some(*j), None),
        Rule::EvenOnly => ("even", None, None),
        Rule::OddOnly => ("odd", None, None),
        Rule::Custom(set) => ("custom", None, Some(set.iter().map(|a| a.entries().to_vec()).collect())),
    };
    let weights = match s.weights() {
        Weights::Unit => unit_weights(),
        Weights::Geometric(r) => Value::String(format!("geometric:{r}")),
        Weights::Explicit(map) => {
            Value::Object(map.iter().map(|(a, w)| (format_key(a), Value::from(*w))).collect())
        }
    };
    let file = SchemeFile {
        schema: Some(SCHEMA.into()),
        d: s.d(),
        k_max: s.k_max(),
        rule: rule.into(),
        j,
        parity: (s.parity() != Parity::All).then_some(s.parity()),
        exclude: s
            .exclusions()
            .iter()
            .map(|(k, set)| (*k, set.iter().map(|a| a.entries().to_vec()).collect()))
            .collect(),
        indices,
        weights,
    };
    serde_json::to_string_pretty(&file).expect("scheme serializes")
}
