use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::CMat;
use crate::ket::{parse_pvm_spec, ElementSpec};
use crate::measure::{LocalPvm, Pvm};
use crate::states::{amps_from_json, amps_to_json, PartySpec};

use super::{Claim, LeafRule, ProtocolError, ProtocolTree};

/// One PVM element in a script: a ket span such as `"0-1"` / `"00,02,11"`, `"*"` for the
/// remainder, or an explicit matrix of `[re_num, re_den, im_num, im_den]` entries.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ElementJson {
    Ket(String),
    Matrix(Vec<Vec<[Value; 4]>>),
}

/// Script node. Internal nodes carry `group`, `pvm` and `children` (keyed by outcome
/// index); leaves carry `claim` (`identified:<label>`, `single-state`,
/// `two-orthogonal-states`, `lemma1-2xn`, `three-product`, or `explicit-subtree` with
/// `subtree`).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Default)]
pub struct ProtocolJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pvm: Option<Vec<ElementJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<BTreeMap<String, ProtocolJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtree: Option<Box<ProtocolJson>>,
}

fn json_err(msg: impl Into<String>) -> ProtocolError {
    ProtocolError::Json(msg.into())
}

fn elaborate_pvm(elements: &[ElementJson], dims: &[usize]) -> Result<Pvm, ProtocolError> {
    if elements.iter().all(|e| matches!(e, ElementJson::Ket(_))) {
        let src: Vec<&str> = elements
            .iter()
            .map(|e| match e {
                ElementJson::Ket(s) => s.as_str(),
                ElementJson::Matrix(_) => unreachable!(),
            })
            .collect();
        return Ok(Pvm::parse(&src.join(";"), dims)?);
    }
    let dim: usize = dims.iter().product();
    let mut mats: Vec<Option<CMat>> = Vec::new();
    let mut rest = None;
    for (k, e) in elements.iter().enumerate() {
        match e {
            ElementJson::Matrix(grid) => {
                let rows = grid.iter().map(|r| amps_from_json(r)).collect::<Result<Vec<_>, _>>().map_err(|e| json_err(e.to_string()))?;
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(json_err(format!("element {k} is not {dim}x{dim}")));
                }
                mats.push(Some(CMat::from_rows(rows).map_err(|e| json_err(e.to_string()))?));
            }
            ElementJson::Ket(src) => {
                let spec = parse_pvm_spec(src, dims).map_err(|e| json_err(e.to_string()))?;
                match spec.as_slice() {
                    [ElementSpec::Span(vs)] => mats.push(Some(CMat::projector_onto(vs).map_err(|e| json_err(e.to_string()))?)),
                    [ElementSpec::Rest] if rest.is_none() => {
                        rest = Some(k);
                        mats.push(None);
                    }
                    _ => return Err(json_err(format!("element {k} ({src:?}) is not a single span"))),
                }
            }
        }
    }
    if let Some(k) = rest {
        let mut r = CMat::identity(dim);
        for m in mats.iter().flatten() {
            r = r.sub(m).map_err(|e| json_err(e.to_string()))?;
        }
        mats[k] = Some(r);
    }
    Ok(Pvm::new(mats.into_iter().map(|m| m.expect("filled")).collect())?)
}

fn parse_claim(j: &ProtocolJson, spec: &PartySpec) -> Result<Claim, ProtocolError> {
    let claim = j.claim.as_deref().unwrap_or_default().trim();
    if let Some(label) = claim.strip_prefix("identified:") {
        return Ok(Claim::Identified(label.trim().to_string()));
    }
    let rule = match claim {
        "single-state" => LeafRule::SingleState,
        "two-orthogonal-states" => LeafRule::TwoOrthogonalStates,
        "lemma1-2xn" => LeafRule::Lemma1TwoByN,
        "three-product" => LeafRule::ThreeProduct,
        "explicit-subtree" => {
            let sub = j.subtree.as_ref().ok_or_else(|| json_err("explicit-subtree leaf without subtree"))?;
            LeafRule::ExplicitSubtree(Box::new(ProtocolTree::from_json_value(sub, spec)?))
        }
        other => return Err(json_err(format!("unknown claim {other:?}"))),
    };
    Ok(Claim::DistinguishableBy(rule))
}

impl ProtocolTree {
    pub fn from_json_value(j: &ProtocolJson, spec: &PartySpec) -> Result<Self, ProtocolError> {
        if j.claim.is_some() {
            if j.group.is_some() || j.pvm.is_some() || j.children.is_some() {
                return Err(json_err("node has both a claim and a measurement"));
            }
            return Ok(ProtocolTree::Leaf(parse_claim(j, spec)?));
        }
        let group_src = j.group.as_deref().ok_or_else(|| json_err("node without group or claim"))?;
        let group = spec.parse_group(group_src).map_err(|e| json_err(e.to_string()))?;
        let dims: Vec<usize> = group.iter().map(|&p| spec.dims()[p]).collect();
        let elements = j.pvm.as_deref().ok_or_else(|| json_err("node without pvm"))?;
        let lp = LocalPvm::new(spec, group, elaborate_pvm(elements, &dims)?)?;
        let mut children = BTreeMap::new();
        for (k, c) in j.children.iter().flatten() {
            let outcome: usize = k.trim().parse().map_err(|_| json_err(format!("outcome key {k:?} is not an index")))?;
            children.insert(outcome, ProtocolTree::from_json_value(c, spec)?);
        }
        Ok(ProtocolTree::Measure { lp, children })
    }

    pub fn from_json(src: &str, spec: &PartySpec) -> Result<Self, ProtocolError> {
        let j: ProtocolJson = serde_json::from_str(src).map_err(|e| json_err(e.to_string()))?;
        Self::from_json_value(&j, spec)
    }

    /// Script form with explicit matrices.
    pub fn to_json_value(&self, spec: &PartySpec) -> ProtocolJson {
        match self {
            ProtocolTree::Measure { lp, children } => ProtocolJson {
                group: Some(spec.group_label(&lp.group)),
                pvm: Some(
                    lp.pvm
                        .elements()
                        .iter()
                        .map(|e| ElementJson::Matrix((0..e.dim()).map(|i| amps_to_json(e.mat().row(i))).collect()))
                        .collect(),
                ),
                children: Some(children.iter().map(|(k, c)| (k.to_string(), c.to_json_value(spec))).collect()),
                ..Default::default()
            },
            ProtocolTree::Leaf(Claim::Identified(label)) => {
                ProtocolJson { claim: Some(format!("identified:{label}")), ..Default::default() }
            }
            ProtocolTree::Leaf(Claim::DistinguishableBy(rule)) => ProtocolJson {
                claim: Some(rule.name().to_string()),
                subtree: match rule {
                    LeafRule::ExplicitSubtree(t) => Some(Box::new(t.to_json_value(spec))),
                    _ => None,
                },
                ..Default::default()
            },
        }
    }

    pub fn to_json(&self, spec: &PartySpec) -> String {
        serde_json::to_string_pretty(&self.to_json_value(spec)).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{execute_and_verify, lemma1_protocol};
    use crate::states::StateSet;

    #[test]
    fn ket_script_parses() {
        let s = StateSet::from_kets(&[2, 2], &["00", "11"], "user").unwrap();
        let src = r#"{"group":"A","pvm":["0","1"],"children":{"0":{"claim":"identified:1"},"1":{"claim":"identified:2"}}}"#;
        let t = ProtocolTree::from_json(src, s.spec()).unwrap();
        assert!(execute_and_verify(&s, &t).unwrap().is_distinguishable());
    }

    #[test]
    fn round_trip_constructed_tree() {
        let s = StateSet::from_kets(&[2, 3], &["0(0+1)", "0(0-1)", "(0+1)2", "(0-1)2"], "user").unwrap();
        let t = lemma1_protocol(&s).unwrap();
        let back = ProtocolTree::from_json(&t.to_json(s.spec()), s.spec()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_mixed_node() {
        let spec = PartySpec::with_default_labels(vec![2]).unwrap();
        let src = r#"{"group":"A","pvm":["0","1"],"claim":"single-state"}"#;
        assert!(ProtocolTree::from_json(src, &spec).is_err());
    }
}
