//! LPCC protocol trees: representation, execution with verification, constructive
//! procedures and a bounded search.

mod construct;
mod script;
mod search;

pub use construct::{lemma1_protocol, three_product_protocol};
pub use script::{ElementJson, ProtocolJson};
pub use search::{lpcc_search, SearchConfig, DEFAULT_DEPTH};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::Scalar;
use crate::measure::{apply, preserves_orthogonality, LocalPvm, MeasureError, OpCheck};
use crate::opsolve::Irreducibility;
use crate::states::{Orthogonality, StateSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("input states {i} and {j} are not orthogonal")]
    NotOrthogonal { i: String, j: String },
    #[error("malformed tree at {path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error("measurement at {path} breaks orthogonality of {i} and {j} in outcome {outcome} (overlap {value})")]
    NotOrthogonalityPreserving { path: String, outcome: usize, i: String, j: String, value: Scalar },
    #[error("leaf at {path} claims {rule}: {reason}")]
    RuleViolated { path: String, rule: String, reason: String },
    #[error("not in the required product form: {0}")]
    NotProductForm(String),
    #[error("structure extraction failed: {0}")]
    Structure(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("measurement: {0}")]
    Measure(#[from] MeasureError),
    #[error("json: {0}")]
    Json(String),
}

/// Rule a leaf invokes to claim the remaining states can be told apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafRule {
    SingleState,
    TwoOrthogonalStates,
    Lemma1TwoByN,
    ThreeProduct,
    ExplicitSubtree(Box<ProtocolTree>),
}

impl LeafRule {
    pub fn name(&self) -> &'static str {
        match self {
            LeafRule::SingleState => "single-state",
            LeafRule::TwoOrthogonalStates => "two-orthogonal-states",
            LeafRule::Lemma1TwoByN => "lemma1-2xn",
            LeafRule::ThreeProduct => "three-product",
            LeafRule::ExplicitSubtree(_) => "explicit-subtree",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    Identified(String),
    DistinguishableBy(LeafRule),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProtocolTree {
    Measure { lp: LocalPvm, children: BTreeMap<usize, ProtocolTree> },
    Leaf(Claim),
}

impl ProtocolTree {
    pub fn identified(label: &str) -> Self {
        ProtocolTree::Leaf(Claim::Identified(label.to_string()))
    }

    pub fn rule(rule: LeafRule) -> Self {
        ProtocolTree::Leaf(Claim::DistinguishableBy(rule))
    }

    /// Number of measurement rounds along the longest branch (leaf subtrees included).
    pub fn depth(&self) -> usize {
        match self {
            ProtocolTree::Leaf(Claim::DistinguishableBy(LeafRule::ExplicitSubtree(t))) => t.depth(),
            ProtocolTree::Leaf(_) => 0,
            ProtocolTree::Measure { children, .. } => 1 + children.values().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            ProtocolTree::Leaf(_) => 1,
            ProtocolTree::Measure { children, .. } => children.values().map(|c| c.leaves()).sum(),
        }
    }
}

/// State set reaching a leaf, with the path that led there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchTrace {
    pub path: String,
    pub labels: Vec<String>,
    pub claim: String,
}

#[derive(Clone, Debug)]
pub enum Status {
    Distinguishable(ProtocolTree),
    Indistinguishable(Irreducibility),
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: Status,
    pub trace: Vec<BranchTrace>,
}

impl Verdict {
    pub fn is_distinguishable(&self) -> bool {
        matches!(self.status, Status::Distinguishable(_))
    }

    pub fn is_indistinguishable(&self) -> bool {
        matches!(self.status, Status::Indistinguishable(_))
    }

    pub fn tree(&self) -> Option<&ProtocolTree> {
        match &self.status {
            Status::Distinguishable(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            Status::Distinguishable(t) => writeln!(f, "distinguishable (depth {}, {} leaves)", t.depth(), t.leaves())?,
            Status::Indistinguishable(_) => writeln!(f, "indistinguishable (PVM-irreducible)")?,
            Status::Unknown(why) => writeln!(f, "unknown: {why}")?,
        }
        for b in &self.trace {
            let path = if b.path.is_empty() { "root" } else { &b.path };
            writeln!(f, "  {path}: {{{}}} by {}", b.labels.join(", "), b.claim)?;
        }
        Ok(())
    }
}

/// Runs `t` on `s`, checking orthogonality preservation at every node and the claim
/// at every leaf.
pub fn execute_and_verify(s: &StateSet, t: &ProtocolTree) -> Result<Verdict, ProtocolError> {
    if let Orthogonality::Witness { i, j, .. } = s.check_mutual_orthogonality() {
        return Err(ProtocolError::NotOrthogonal { i: s.states()[i].label.clone(), j: s.states()[j].label.clone() });
    }
    let mut trace = Vec::new();
    walk(s, t, "", &mut trace)?;
    Ok(Verdict { status: Status::Distinguishable(t.clone()), trace })
}

fn step(path: &str, s: &StateSet, lp: &LocalPvm, outcome: usize) -> String {
    let label = s.spec().group_label(&lp.group);
    if path.is_empty() {
        format!("{label}:{outcome}")
    } else {
        format!("{path}/{label}:{outcome}")
    }
}

fn walk(s: &StateSet, t: &ProtocolTree, path: &str, trace: &mut Vec<BranchTrace>) -> Result<(), ProtocolError> {
    match t {
        ProtocolTree::Measure { lp, children } => {
            let malformed = |reason: String| ProtocolError::Malformed { path: path.to_string(), reason };
            if lp.group.iter().any(|&p| p >= s.spec().parties()) || s.spec().group_dim(&lp.group) != lp.pvm.dim() {
                return Err(malformed(format!("PVM on {:?} does not fit the party spec", lp.group)));
            }
            if let OpCheck::Witness { outcome, i, j, value } = preserves_orthogonality(s, lp)? {
                return Err(ProtocolError::NotOrthogonalityPreserving {
                    path: path.to_string(),
                    outcome,
                    i: s.states()[i].label.clone(),
                    j: s.states()[j].label.clone(),
                    value,
                });
            }
            if let Some(k) = children.keys().find(|&&k| k >= lp.pvm.len()) {
                return Err(malformed(format!("child for outcome {k} of a {}-outcome PVM", lp.pvm.len())));
            }
            for b in apply(s, lp)? {
                let child = children.get(&b.outcome);
                match (b.set.is_empty(), child) {
                    (true, None) => {}
                    (true, Some(_)) => return Err(malformed(format!("child for annihilating outcome {}", b.outcome))),
                    (false, None) => return Err(malformed(format!("no child for outcome {}", b.outcome))),
                    (false, Some(c)) => walk(&b.set, c, &step(path, s, lp, b.outcome), trace)?,
                }
            }
            Ok(())
        }
        ProtocolTree::Leaf(claim) => check_leaf(s, claim, path, trace),
    }
}

fn check_leaf(s: &StateSet, claim: &Claim, path: &str, trace: &mut Vec<BranchTrace>) -> Result<(), ProtocolError> {
    let violated = |rule: &str, reason: String| ProtocolError::RuleViolated { path: path.to_string(), rule: rule.to_string(), reason };
    let name = match claim {
        Claim::Identified(label) => {
            if s.len() != 1 || s.states()[0].label != *label {
                return Err(violated("identified", format!("expected only {label}, found {{{}}}", s.labels().join(", "))));
            }
            format!("identified {label}")
        }
        Claim::DistinguishableBy(rule) => {
            let name = rule.name();
            match rule {
                LeafRule::SingleState => {
                    if s.len() != 1 {
                        return Err(violated(name, format!("{} states remain", s.len())));
                    }
                }
                LeafRule::TwoOrthogonalStates => {
                    if s.len() != 2 || !s.is_orthogonal() {
                        return Err(violated(name, format!("{} states remain", s.len())));
                    }
                }
                LeafRule::Lemma1TwoByN => {
                    let t = lemma1_protocol(s).map_err(|e| violated(name, e.to_string()))?;
                    walk(s, &t, path, &mut Vec::new()).map_err(|e| violated(name, e.to_string()))?;
                }
                LeafRule::ThreeProduct => {
                    let t = three_product_protocol(s).map_err(|e| violated(name, e.to_string()))?;
                    walk(s, &t, path, &mut Vec::new()).map_err(|e| violated(name, e.to_string()))?;
                }
                LeafRule::ExplicitSubtree(t) => return walk(s, t, path, trace),
            }
            name.to_string()
        }
    };
    trace.push(BranchTrace { path: path.to_string(), labels: s.labels(), claim: name });
    Ok(())
}

/// State sets reaching each leaf (explicit subtrees expanded), with their paths.
pub fn leaf_sets(s: &StateSet, t: &ProtocolTree) -> Result<Vec<(String, StateSet, Claim)>, ProtocolError> {
    fn go(s: &StateSet, t: &ProtocolTree, path: &str, out: &mut Vec<(String, StateSet, Claim)>) -> Result<(), ProtocolError> {
        match t {
            ProtocolTree::Leaf(Claim::DistinguishableBy(LeafRule::ExplicitSubtree(sub))) => go(s, sub, path, out),
            ProtocolTree::Leaf(c) => {
                out.push((path.to_string(), s.clone(), c.clone()));
                Ok(())
            }
            ProtocolTree::Measure { lp, children } => {
                for b in apply(s, lp)? {
                    if let Some(c) = children.get(&b.outcome) {
                        go(&b.set, c, &step(path, s, lp, b.outcome), out)?;
                    }
                }
                Ok(())
            }
        }
    }
    let mut out = Vec::new();
    go(s, t, "", &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LocalPvm;

    #[test]
    fn bare_leaf_on_single_state() {
        let s = StateSet::from_kets(&[2, 2], &["01"], "user").unwrap();
        let v = execute_and_verify(&s, &ProtocolTree::rule(LeafRule::SingleState)).unwrap();
        assert!(v.is_distinguishable());
        assert_eq!(v.trace.len(), 1);
    }

    #[test]
    fn missing_child_is_malformed() {
        let s = StateSet::from_kets(&[2, 2], &["00", "11"], "user").unwrap();
        let lp = LocalPvm::parse(s.spec(), "A", "0;1").unwrap();
        let t = ProtocolTree::Measure { lp, children: BTreeMap::from([(0, ProtocolTree::identified("1"))]) };
        assert!(matches!(execute_and_verify(&s, &t), Err(ProtocolError::Malformed { .. })));
    }

    #[test]
    fn wrong_identification_reports_path() {
        let s = StateSet::from_kets(&[2, 2], &["00", "11"], "user").unwrap();
        let lp = LocalPvm::parse(s.spec(), "A", "0;1").unwrap();
        let t = ProtocolTree::Measure {
            lp,
            children: BTreeMap::from([(0, ProtocolTree::identified("2")), (1, ProtocolTree::identified("2"))]),
        };
        match execute_and_verify(&s, &t) {
            Err(ProtocolError::RuleViolated { path, .. }) => assert_eq!(path, "A:0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_preserving_node_rejected() {
        let s = StateSet::from_kets(&[2, 2], &["00", "(0+1)1"], "user").unwrap();
        let lp = LocalPvm::parse(s.spec(), "A", "0;1").unwrap();
        let t = ProtocolTree::Measure {
            lp,
            children: BTreeMap::from([
                (0, ProtocolTree::rule(LeafRule::TwoOrthogonalStates)),
                (1, ProtocolTree::identified("2")),
            ]),
        };
        // A's basis measurement keeps both states orthogonal here, so this passes
        assert!(execute_and_verify(&s, &t).is_ok());
        let lp = LocalPvm::parse(s.spec(), "B", "0+1;0-1").unwrap();
        let t = ProtocolTree::Measure {
            lp,
            children: BTreeMap::from([
                (0, ProtocolTree::rule(LeafRule::TwoOrthogonalStates)),
                (1, ProtocolTree::rule(LeafRule::TwoOrthogonalStates)),
            ]),
        };
        assert!(matches!(execute_and_verify(&s, &t), Err(ProtocolError::NotOrthogonalityPreserving { .. })));
    }
}
