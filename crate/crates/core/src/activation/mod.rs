//! Hidden-nonlocality activation: verification of first-round measurements, domino
//! matching, no-go checks and classification along the locality line.

mod classify;
mod domino;

pub use classify::{classify, is_m_activable, ClassifyConfig, Evidence, LocalityClass, MActivable, MStatus, Class};
pub use domino::{domino_match, DominoWitness};

use thiserror::Error;

use crate::measure::{apply, is_effectively_trivial, preserves_orthogonality, LocalPvm, MeasureError, OpCheck, Pvm, Projector};
use crate::opsolve::{certify_group, GroupSystem, is_pvm_irreducible, rank1_op_directions, BlockCertificate, Irreducibility, SolverConfig};
use crate::protocol::lemma1_protocol;
use crate::states::{factorizes_across, is_locally_redundant, local_factors, Partition, Redundancy, StateSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActivationError {
    #[error("set is not orthogonal")]
    NotOrthogonal,
    #[error("first-round measurement breaks orthogonality of states {i} and {j} in outcome {outcome}")]
    NotOrthogonalityPreserving { outcome: usize, i: String, j: String },
    #[error("first-round measurement is trivial on the set")]
    TrivialMeasurement,
    #[error("measuring group {group} is not inside a block of {partition}")]
    GroupNotInBlock { group: String, partition: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("m = {m} is outside 2..={n}")]
    InvalidM { m: usize, n: usize },
    #[error("measurement: {0}")]
    Measure(#[from] MeasureError),
}

/// Outcome branch of a first-round measurement.
#[derive(Clone, Debug)]
pub struct BranchReport {
    pub outcome: usize,
    pub set: StateSet,
    pub annihilated: Vec<String>,
    pub irreducibility: Irreducibility,
    /// Corroborating domino structure in the two-block view, when found.
    pub domino: Option<DominoWitness>,
}

#[derive(Clone, Debug)]
pub struct ActivationReport {
    pub first: LocalPvm,
    pub partition: Partition,
    /// Non-empty outcome branches.
    pub branches: Vec<BranchReport>,
    pub redundancy: Redundancy,
    /// Every branch is certified PVM-irreducible and the set is irredundant.
    pub activated: bool,
    /// Outcomes whose post-set was not certified irreducible.
    pub uncertified: Vec<usize>,
}

/// Applies `first` and certifies every non-empty outcome as PVM-irreducible within `p`.
/// Whether `s` itself is distinguishable in `p` is not re-checked here.
pub fn verify_activation(
    s: &StateSet,
    first: &LocalPvm,
    p: &Partition,
    config: &SolverConfig,
) -> Result<ActivationReport, ActivationError> {
    if !s.is_orthogonal() {
        return Err(ActivationError::NotOrthogonal);
    }
    if p.parties() != s.spec().parties() {
        return Err(ActivationError::Precondition(format!("partition has {} parties, set has {}", p.parties(), s.spec().parties())));
    }
    if !p.blocks().iter().any(|b| first.group.iter().all(|g| b.contains(g))) {
        return Err(ActivationError::GroupNotInBlock {
            group: s.spec().group_label(&first.group),
            partition: p.label(s.spec()),
        });
    }
    if let OpCheck::Witness { outcome, i, j, .. } = preserves_orthogonality(s, first)? {
        return Err(ActivationError::NotOrthogonalityPreserving {
            outcome,
            i: s.states()[i].label.clone(),
            j: s.states()[j].label.clone(),
        });
    }
    if first.pvm.is_trivial() || is_effectively_trivial(s, first) {
        return Err(ActivationError::TrivialMeasurement);
    }
    let redundancy = is_locally_redundant(s);
    let mut branches = Vec::new();
    let mut uncertified = Vec::new();
    for b in apply(s, first)? {
        if b.set.is_empty() {
            continue;
        }
        let irreducibility = is_pvm_irreducible(&b.set, p, config);
        let domino = if p.len() == 2 { b.set.merge_parties(p).ok().and_then(|m| domino_match(&m)) } else { None };
        if !irreducibility.is_irreducible() {
            uncertified.push(b.outcome);
        }
        branches.push(BranchReport { outcome: b.outcome, set: b.set, annihilated: b.annihilated, irreducibility, domino });
    }
    let activated = uncertified.is_empty() && !redundancy.is_redundant() && !branches.is_empty();
    Ok(ActivationReport { first: first.clone(), partition: p.clone(), branches, redundancy, activated, uncertified })
}

/// One checked measurement of a dimension-2 party.
#[derive(Clone, Debug)]
pub struct NoGoCheck {
    pub party: usize,
    pub pvm: Pvm,
    /// Every outcome is fully product with the measuring party's factor fixed, and
    /// the constructive two-party protocol applies to it.
    pub reduces: bool,
}

#[derive(Clone, Debug)]
pub struct NoGoReport {
    pub checks: Vec<NoGoCheck>,
    /// Certification for the remaining party's measurements.
    pub first_party: BlockCertificate,
    pub holds: bool,
}

/// For a three-party set whose states factor as `A|BC` and in which B and C each
/// occupy a two-dimensional local support: any rank-1 projector of B or C leaves
/// product states in which the measuring party is constant, so each outcome is an
/// effectively `n⊗2` product set. Checked on every orthogonality-preserving direction
/// the solver reports for B and C (plus one support vector); the first party is
/// certified separately.
pub fn check_dim2_nogo(s: &StateSet, config: &SolverConfig) -> Result<NoGoReport, ActivationError> {
    let dims = s.spec().dims();
    if dims.len() != 3 {
        return Err(ActivationError::Precondition(format!("expected three parties, found {dims:?}")));
    }
    if let Some(st) = s.states().iter().find(|st| !factorizes_across(&st.vector, s.spec(), &[0])) {
        return Err(ActivationError::Precondition(format!("state {} is entangled across A|BC", st.label)));
    }
    if !s.is_orthogonal() {
        return Err(ActivationError::NotOrthogonal);
    }
    let mut checks = Vec::new();
    for party in [1, 2] {
        let support = GroupSystem::new(s, &[party]).basis.columns();
        if support.len() != 2 {
            return Err(ActivationError::Precondition(format!(
                "party {} occupies a {}-dimensional local support, expected 2",
                s.spec().labels()[party],
                support.len()
            )));
        }
        let report = rank1_op_directions(s, &[party], config);
        let mut dirs = report.usable_directions();
        let first = support[0].canonical();
        if !dirs.contains(&first) {
            dirs.push(first);
        }
        for theta in dirs {
            let pvm = Pvm::binary(Projector::rank_one(&theta))?;
            let lp = LocalPvm::new(s.spec(), vec![party], pvm.clone())?;
            if !preserves_orthogonality(s, &lp)?.is_ok() {
                continue;
            }
            let reduces = apply(s, &lp)?.iter().all(|b| {
                let factors: Option<Vec<_>> = b.set.vectors().iter().map(|v| local_factors(v, s.spec())).collect();
                let constant = factors.is_some_and(|f| f.windows(2).all(|w| w[0][party].is_parallel(&w[1][party])));
                constant && (b.set.is_empty() || lemma1_protocol(&b.set).is_ok())
            });
            checks.push(NoGoCheck { party, pvm, reduces });
        }
    }
    let first_party = certify_group(s, &[0], config);
    let holds = checks.iter().all(|c| c.reduces);
    Ok(NoGoReport { checks, first_party, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nogo_on_product_set() {
        let s = StateSet::from_kets(&[4, 2, 2], &["000", "1(0+1)1", "2(0-1)0", "3(0+1)(0-1)", "0(0+1)1"], "user").unwrap();
        assert!(s.is_orthogonal());
        let r = check_dim2_nogo(&s, &SolverConfig::exact()).unwrap();
        assert!(r.holds && !r.checks.is_empty());
    }

    #[test]
    fn nogo_precondition() {
        let s = StateSet::from_kets(&[3, 2, 2], &["0(00+11)", "1(00-11)"], "user").unwrap();
        assert!(check_dim2_nogo(&s, &SolverConfig::exact()).is_ok());
        let s = StateSet::from_kets(&[2, 2, 2], &["000+110", "001"], "user").unwrap();
        assert!(matches!(check_dim2_nogo(&s, &SolverConfig::exact()), Err(ActivationError::Precondition(_))));
        let s = StateSet::from_kets(&[2, 3, 2], &["000", "111", "021"], "user").unwrap();
        assert!(matches!(check_dim2_nogo(&s, &SolverConfig::exact()), Err(ActivationError::Precondition(_))));
    }
}
