//! Bundled replay data: protocol scripts, first-round measurements and the residual
//! sets used by the theorem replays.

use serde::Deserialize;
use thiserror::Error;

use crate::measure::{LocalPvm, MeasureError, Pvm};
use crate::protocol::{ProtocolError, ProtocolJson, ProtocolTree};
use crate::states::{build_named_set, NamedSet, Partition, PartySpec, StateError, StateSet};

const S1_PROTOCOL: &str = include_str!("../fixtures/s1_protocol.json");
const S1_ACTIVATION: &str = include_str!("../fixtures/s1_activation_b.json");
const S2_PROTOCOL: &str = include_str!("../fixtures/s2_protocol.json");
const S2_RESIDUAL: &str = include_str!("../fixtures/s2_residual.json");
const S2_ACTIVATION: &str = include_str!("../fixtures/s2_activation_bc.json");
const UNION: &str = include_str!("../fixtures/union.json");

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("state: {0}")]
    State(#[from] StateError),
    #[error("measurement: {0}")]
    Measure(#[from] MeasureError),
    #[error("protocol: {0}")]
    Protocol(#[from] ProtocolError),
}

/// Names of the bundled fixtures, as accepted by [`protocol_fixture`] and
/// [`activation_fixture`].
pub const PROTOCOL_FIXTURES: [&str; 2] = ["s1-protocol", "s2-protocol"];
pub const ACTIVATION_FIXTURES: [&str; 2] = ["s1-activation-b", "s2-activation-bc"];

#[derive(Clone, Debug, Deserialize)]
pub struct PvmSpecJson {
    pub group: String,
    pub pvm: Vec<String>,
}

impl PvmSpecJson {
    pub fn elaborate(&self, spec: &PartySpec) -> Result<LocalPvm, FixtureError> {
        let group = spec.parse_group(&self.group)?;
        let dims: Vec<usize> = group.iter().map(|&p| spec.dims()[p]).collect();
        let pvm = Pvm::parse(&self.pvm.join(";"), &dims)?;
        Ok(LocalPvm::new(spec, group, pvm)?)
    }
}

#[derive(Clone, Debug, Deserialize)]
struct ProtocolFixtureJson {
    set: String,
    partition: String,
    protocol: ProtocolJson,
}

pub struct ProtocolFixture {
    pub set: StateSet,
    pub partition: Partition,
    pub tree: ProtocolTree,
}

#[derive(Clone, Debug, Deserialize)]
struct ActivationFixtureJson {
    set: String,
    partition: String,
    first: PvmSpecJson,
    view: String,
    support_bases: Vec<Vec<String>>,
}

pub struct ActivationFixture {
    pub set: StateSet,
    pub partition: Partition,
    pub first: LocalPvm,
    /// Two-block view in which the outcome branches are compared with the domino set.
    pub view: Partition,
    /// Per outcome, the support basis of the second block (ket strings over its parties).
    pub support_bases: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ResidualCase {
    pub name: String,
    pub pvm: Vec<String>,
    pub outcome: usize,
    pub alice_rank1_none: bool,
    pub kets: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ResidualFixture {
    pub set: String,
    pub charlie_directions: Vec<String>,
    pub cases: Vec<ResidualCase>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct JointJson {
    pub subset: String,
    pub partition: String,
    pub first: PvmSpecJson,
}

#[derive(Clone, Debug, Deserialize)]
pub struct UnionFixture {
    pub set: String,
    pub alice: PvmSpecJson,
    pub joint: Vec<JointJson>,
}

fn named(name: &str) -> Result<StateSet, FixtureError> {
    Ok(build_named_set(name.parse::<NamedSet>()?, None)?)
}

pub fn protocol_fixture(name: &str) -> Option<Result<ProtocolFixture, FixtureError>> {
    let src = match name {
        "s1-protocol" => S1_PROTOCOL,
        "s2-protocol" => S2_PROTOCOL,
        _ => return None,
    };
    Some((|| {
        let j: ProtocolFixtureJson = serde_json::from_str(src)?;
        let set = named(&j.set)?;
        let partition = Partition::parse(&j.partition, set.spec())?;
        let tree = ProtocolTree::from_json_value(&j.protocol, set.spec())?;
        Ok(ProtocolFixture { set, partition, tree })
    })())
}

pub fn activation_fixture(name: &str) -> Option<Result<ActivationFixture, FixtureError>> {
    let src = match name {
        "s1-activation-b" => S1_ACTIVATION,
        "s2-activation-bc" => S2_ACTIVATION,
        _ => return None,
    };
    Some((|| {
        let j: ActivationFixtureJson = serde_json::from_str(src)?;
        let set = named(&j.set)?;
        let partition = Partition::parse(&j.partition, set.spec())?;
        let first = j.first.elaborate(set.spec())?;
        let view = Partition::parse(&j.view, set.spec())?;
        Ok(ActivationFixture { set, partition, first, view, support_bases: j.support_bases })
    })())
}

pub fn residual_fixture() -> Result<ResidualFixture, FixtureError> {
    Ok(serde_json::from_str(S2_RESIDUAL)?)
}

pub fn union_fixture() -> Result<UnionFixture, FixtureError> {
    Ok(serde_json::from_str(UNION)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_load() {
        for name in PROTOCOL_FIXTURES {
            protocol_fixture(name).unwrap().unwrap();
        }
        for name in ACTIVATION_FIXTURES {
            activation_fixture(name).unwrap().unwrap();
        }
        assert_eq!(residual_fixture().unwrap().cases.len(), 3);
        assert_eq!(union_fixture().unwrap().joint.len(), 3);
        assert!(protocol_fixture("nope").is_none());
    }
}
