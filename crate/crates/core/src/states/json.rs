use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{CVec, Scalar};

use super::{LabeledState, PartySpec, StateError, StateSet};

/// Serialized form of a [`StateSet`]. Each amplitude is `[re_num, re_den, im_num, im_den]`;
/// integers that do not fit in 64 bits are written as decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateSetJson {
    pub dims: Vec<usize>,
    pub labels: Vec<String>,
    pub states: Vec<StateJson>,
    #[serde(default = "default_provenance")]
    pub provenance: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateJson {
    pub label: String,
    pub amps: Vec<[Value; 4]>,
}

fn default_provenance() -> String {
    "user".into()
}

fn int_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => Value::from(x),
        None => Value::String(n.to_string()),
    }
}

fn int_from_json(v: &Value) -> Result<BigInt, StateError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| StateError::Json(format!("{n} is not an integer"))),
        Value::String(s) => s.trim().parse().map_err(|_| StateError::Json(format!("{s:?} is not an integer"))),
        other => Err(StateError::Json(format!("expected integer, found {other}"))),
    }
}

pub fn amps_to_json(amps: &[Scalar]) -> Vec<[Value; 4]> {
    amps.iter()
        .map(|s| {
            let [a, b, c, d] = s.to_parts();
            [int_to_json(&a), int_to_json(&b), int_to_json(&c), int_to_json(&d)]
        })
        .collect()
}

pub fn amps_from_json(amps: &[[Value; 4]]) -> Result<Vec<Scalar>, StateError> {
    amps.iter()
        .map(|q| {
            let parts = [int_from_json(&q[0])?, int_from_json(&q[1])?, int_from_json(&q[2])?, int_from_json(&q[3])?];
            Scalar::from_parts(parts).ok_or_else(|| StateError::Json("zero denominator".into()))
        })
        .collect()
}

impl StateSet {
    pub fn to_json_value(&self) -> StateSetJson {
        StateSetJson {
            dims: self.spec.dims().to_vec(),
            labels: self.spec.labels().to_vec(),
            states: self
                .states
                .iter()
                .map(|s| StateJson { label: s.label.clone(), amps: amps_to_json(s.vector.entries()) })
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializable")
    }

    pub fn from_json_value(j: &StateSetJson) -> Result<StateSet, StateError> {
        let labels = if j.labels.is_empty() {
            PartySpec::with_default_labels(j.dims.clone())?.labels().to_vec()
        } else {
            j.labels.clone()
        };
        let spec = PartySpec::new(j.dims.clone(), labels)?;
        let states = j
            .states
            .iter()
            .map(|s| Ok(LabeledState { label: s.label.clone(), vector: CVec::new(amps_from_json(&s.amps)?)? }))
            .collect::<Result<Vec<_>, StateError>>()?;
        StateSet::new(spec, states, j.provenance.clone())
    }

    pub fn from_json(src: &str) -> Result<StateSet, StateError> {
        let j: StateSetJson = serde_json::from_str(src).map_err(|e| StateError::Json(e.to_string()))?;
        Self::from_json_value(&j)
    }
}
