use std::fmt;

use crate::measure::LocalPvm;
use crate::opsolve::{enumerate_op_pvms, is_pvm_irreducible, SolverConfig};
use crate::protocol::{lemma1_protocol, lpcc_search, SearchConfig, Status, DEFAULT_DEPTH};
use crate::states::{Partition, StateSet};

use super::{verify_activation, ActivationError, ActivationReport};

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    pub depth: usize,
    pub solver: SolverConfig,
    /// Party pairs allowed a joint first-round measurement.
    pub joint_pairs: Vec<(usize, usize)>,
    /// Extra first-round candidates (used for groups too large to enumerate).
    pub candidates: Vec<LocalPvm>,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig { depth: DEFAULT_DEPTH, solver: SolverConfig::default(), joint_pairs: vec![], candidates: vec![] }
    }
}

impl ClassifyConfig {
    fn search(&self) -> SearchConfig {
        SearchConfig { depth: self.depth, solver: self.solver.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    StrongLocalEvidence,
    TypeI,
    TypeII,
    IndistinguishableAlready,
    Unknown,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::StrongLocalEvidence => "strong-local-evidence",
            Class::TypeI => "TYPE-I",
            Class::TypeII => "TYPE-II",
            Class::IndistinguishableAlready => "indistinguishable-already",
            Class::Unknown => "unknown",
        })
    }
}

/// How far a strong-local verdict reaches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// Covered by a structural result (two states, two-party product sets).
    Structural(String),
    /// Every candidate family the searches use was exhausted exactly.
    Exhaustive,
    /// Some group could only be partially enumerated or some branch stayed undecided.
    Partial,
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::Structural(why) => write!(f, "exact ({why})"),
            Evidence::Exhaustive => f.write_str("exhaustive"),
            Evidence::Partial => f.write_str("partial"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocalityClass {
    pub class: Class,
    pub evidence: Option<Evidence>,
    pub witness: Option<ActivationReport>,
    pub trace: Vec<String>,
}

/// Whether the first round `lp` provably fails to activate: some outcome stays
/// distinguishable within `p`.
fn refuted(report: &ActivationReport, p: &Partition, search: &SearchConfig) -> bool {
    report.redundancy.is_redundant()
        || report.branches.iter().any(|b| !b.irreducibility.is_irreducible() && lpcc_search(&b.set, p, search).is_distinguishable())
}

/// Candidate first rounds for `group`, with whether the list is exhaustive.
fn candidates_for(s: &StateSet, group: &[usize], config: &ClassifyConfig) -> (Vec<LocalPvm>, bool) {
    let gd = s.spec().group_dim(group);
    let mut out: Vec<LocalPvm> = config.candidates.iter().filter(|c| c.group == group).cloned().collect();
    let mut exhaustive = false;
    if gd <= config.solver.max_group_dim {
        let e = enumerate_op_pvms(s, group, gd, &config.solver);
        // below dimension 4 every PVM is built from rank-1 elements and complements
        exhaustive = e.complete && gd <= 3;
        for lp in e.pvms {
            if !out.contains(&lp) {
                out.push(lp);
            }
        }
    }
    (out, exhaustive)
}

pub fn classify(s: &StateSet, config: &ClassifyConfig) -> LocalityClass {
    let mut trace = Vec::new();
    let done = |class, evidence, witness, trace| LocalityClass { class, evidence, witness, trace };
    if !s.is_orthogonal() {
        trace.push("set is not orthogonal".to_string());
        return done(Class::Unknown, None, None, trace);
    }
    let n = s.spec().parties();
    let finest = Partition::finest(n);
    if s.len() == 2 {
        return done(Class::StrongLocalEvidence, Some(Evidence::Structural("two orthogonal states".into())), None, trace);
    }
    if lemma1_protocol(s).is_ok() {
        return done(Class::StrongLocalEvidence, Some(Evidence::Structural("orthogonal product set in 2⊗n".into())), None, trace);
    }
    let search = config.search();
    let local = lpcc_search(s, &finest, &search);
    match &local.status {
        Status::Indistinguishable(_) => {
            trace.push("PVM-irreducible in the finest partition".into());
            return done(Class::IndistinguishableAlready, None, None, trace);
        }
        Status::Unknown(why) => trace.push(format!("local distinguishability undecided: {why}")),
        Status::Distinguishable(t) => trace.push(format!("distinguishable by a depth-{} protocol", t.depth())),
    }
    let mut exhaustive = true;
    for j in 0..n {
        let (cands, complete) = candidates_for(s, &[j], config);
        exhaustive &= complete;
        trace.push(format!("party {}: {} candidate first rounds{}", s.spec().labels()[j], cands.len(), if complete { "" } else { " (partial)" }));
        for lp in cands {
            let Ok(r) = verify_activation(s, &lp, &finest, &config.solver) else { continue };
            if r.activated {
                return done(Class::TypeI, None, Some(r), trace);
            }
            exhaustive = exhaustive && refuted(&r, &finest, &search);
        }
    }
    for &(a, b) in &config.joint_pairs {
        let mut group = vec![a, b];
        group.sort_unstable();
        group.dedup();
        if group.len() != 2 || b >= n || a >= n {
            trace.push(format!("skipped invalid pair ({a}, {b})"));
            continue;
        }
        let mut blocks: Vec<Vec<usize>> = (0..n).filter(|p| !group.contains(p)).map(|p| vec![p]).collect();
        blocks.push(group.clone());
        let p = Partition::new(blocks, n).expect("valid blocks");
        let (cands, complete) = candidates_for(s, &group, config);
        exhaustive &= complete;
        trace.push(format!("joint {}: {} candidate first rounds{}", s.spec().group_label(&group), cands.len(), if complete { "" } else { " (partial)" }));
        for lp in cands {
            let Ok(r) = verify_activation(s, &lp, &p, &config.solver) else { continue };
            if r.activated {
                return done(Class::TypeII, None, Some(r), trace);
            }
        }
    }
    if !local.is_distinguishable() {
        return done(Class::Unknown, None, None, trace);
    }
    let evidence = if exhaustive { Evidence::Exhaustive } else { Evidence::Partial };
    done(Class::StrongLocalEvidence, Some(evidence), None, trace)
}

#[derive(Clone, Debug)]
pub enum MStatus {
    Activable {
        partition: Partition,
        report: Box<ActivationReport>,
        /// For the strong variant: an `(m−1)`-partition in which every post-set is
        /// certified irreducible.
        coarser: Option<Partition>,
    },
    NotActivable,
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct MActivable {
    pub m: usize,
    pub strong: bool,
    pub status: MStatus,
    pub trace: Vec<String>,
}

impl MActivable {
    pub fn is_activable(&self) -> bool {
        matches!(self.status, MStatus::Activable { .. })
    }

    pub fn is_not_activable(&self) -> bool {
        matches!(self.status, MStatus::NotActivable)
    }
}

/// Searches every `m`-partition for a first round (by a block, or a party inside one)
/// after which all post-sets are certified irreducible in that partition. Negative
/// answers are given only when every candidate family was exhaustive and every
/// candidate left a branch that is demonstrably distinguishable.
pub fn is_m_activable(s: &StateSet, m: usize, strong: bool, config: &ClassifyConfig) -> Result<MActivable, ActivationError> {
    let n = s.spec().parties();
    if m < 2 || m > n {
        return Err(ActivationError::InvalidM { m, n });
    }
    if !s.is_orthogonal() {
        return Err(ActivationError::NotOrthogonal);
    }
    let search = config.search();
    let mut trace = Vec::new();
    let mut undecided: Vec<String> = Vec::new();
    for p in Partition::all_with_blocks(n, m) {
        let label = p.label(s.spec());
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for b in p.blocks() {
            groups.extend(b.iter().map(|&j| vec![j]));
            if b.len() > 1 {
                groups.push(b.clone());
            }
        }
        let mut tried = 0;
        for g in groups {
            let (cands, complete) = candidates_for(s, &g, config);
            if !complete {
                undecided.push(format!("{label}: group {} not exhaustively enumerated", s.spec().group_label(&g)));
            }
            for lp in cands {
                let Ok(r) = verify_activation(s, &lp, &p, &config.solver) else { continue };
                tried += 1;
                if r.activated {
                    let coarser = if strong {
                        let found = Partition::all_with_blocks(n, m - 1).into_iter().find(|q| {
                            r.branches.iter().all(|b| is_pvm_irreducible(&b.set, q, &config.solver).is_irreducible())
                        });
                        match found {
                            Some(q) => Some(q),
                            None => {
                                undecided.push(format!("{label}: activation found but no ({})-partition certified", m - 1));
                                continue;
                            }
                        }
                    } else {
                        None
                    };
                    trace.push(format!("{label}: activated by {} after {tried} candidates", s.spec().group_label(&lp.group)));
                    let status = MStatus::Activable { partition: p, report: Box::new(r), coarser };
                    return Ok(MActivable { m, strong, status, trace });
                }
                if !refuted(&r, &p, &search) {
                    undecided.push(format!("{label}: candidate on {} neither activates nor provably fails", s.spec().group_label(&lp.group)));
                }
            }
        }
        trace.push(format!("{label}: {tried} candidates, none activates"));
    }
    let status = if undecided.is_empty() { MStatus::NotActivable } else { MStatus::Unknown(undecided.join("; ")) };
    trace.extend(undecided);
    Ok(MActivable { m, strong, status, trace })
}
