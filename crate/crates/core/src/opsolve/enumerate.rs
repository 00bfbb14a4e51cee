use std::fmt;

use crate::algebra::CMat;
use crate::measure::{is_effectively_trivial, preserves_orthogonality, LocalPvm, Projector, Pvm};
use crate::states::{Partition, StateSet};

use super::rank1::{solve_system, Exactness, SolutionReport};
use super::space::operator_space_of;
use super::{constraint_matrices, GroupSystem, SolverConfig};

/// Orthogonality-preserving, effectively nontrivial PVMs found for one group.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub group: Vec<usize>,
    pub pvms: Vec<LocalPvm>,
    /// Every rank-1 direction was resolved exactly and no continuous family occurred, so
    /// the list holds every PVM assembled from those directions, their complements and
    /// computational-basis blocks.
    pub complete: bool,
    /// The group was too large to enumerate; only supplied candidates can be verified.
    pub verification_only: bool,
    pub rank1: Option<SolutionReport>,
}

/// Assembles candidate PVMs from the exact rank-1 directions (single directions with
/// their complement, and mutually orthogonal sets with the remainder) and from
/// partitions of the group's computational basis into orthogonality-preserving blocks.
/// Every returned PVM is re-verified and effectively nontrivial on the set.
pub fn enumerate_op_pvms(s: &StateSet, group: &[usize], max_outcomes: usize, config: &SolverConfig) -> Enumeration {
    let sys = GroupSystem::new(s, group);
    enumerate_with(s, &sys, max_outcomes.max(2), config)
}

fn enumerate_with(s: &StateSet, sys: &GroupSystem, max_outcomes: usize, config: &SolverConfig) -> Enumeration {
    let d = sys.group_dim;
    if d > config.max_group_dim {
        return Enumeration { group: sys.group.clone(), pvms: vec![], complete: false, verification_only: true, rank1: None };
    }
    let report = solve_system(sys, config);
    let pool = report.usable_directions();
    let mut candidates: Vec<Pvm> = Vec::new();
    for theta in &pool {
        if let Ok(p) = Pvm::binary(Projector::rank_one(theta)) {
            candidates.push(p);
        }
    }
    // mutually orthogonal direction sets
    let n = pool.len();
    let orth: Vec<Vec<bool>> =
        (0..n).map(|i| (0..n).map(|j| i != j && pool[i].inner(&pool[j]).expect("dim").is_zero()).collect()).collect();
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let limit = max_outcomes.min(d);
    fn grow(cur: &mut Vec<usize>, start: usize, orth: &[Vec<bool>], limit: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() >= 2 {
            out.push(cur.clone());
        }
        if cur.len() == limit || out.len() > 5000 {
            return;
        }
        for j in start..orth.len() {
            if cur.iter().all(|&i| orth[i][j]) {
                cur.push(j);
                grow(cur, j + 1, orth, limit, out);
                cur.pop();
            }
        }
    }
    grow(&mut Vec::new(), 0, &orth, limit, &mut cliques);
    for c in cliques {
        let mut mats: Vec<CMat> = c.iter().map(|&i| Projector::rank_one(&pool[i]).mat().clone()).collect();
        let mut rest = CMat::identity(d);
        for m in &mats {
            rest = rest.sub(m).expect("dim");
        }
        if !rest.is_zero() {
            if mats.len() + 1 > max_outcomes {
                continue;
            }
            mats.push(rest);
        }
        if let Ok(p) = Pvm::new(mats) {
            candidates.push(p);
        }
    }
    candidates.extend(diagonal_partitions(s, &sys.group, d, max_outcomes));
    let mut pvms: Vec<LocalPvm> = Vec::new();
    let mut keys: Vec<Pvm> = Vec::new();
    for p in candidates {
        let key = p.canonical();
        if keys.contains(&key) {
            continue;
        }
        keys.push(key.clone());
        let lp = LocalPvm { group: sys.group.clone(), pvm: key };
        if lp.pvm.is_trivial() || is_effectively_trivial(s, &lp) {
            continue;
        }
        if preserves_orthogonality(s, &lp).map(|c| c.is_ok()).unwrap_or(false) {
            pvms.push(lp);
        }
    }
    pvms.sort_by(|a, b| pvm_order(&a.pvm, &b.pvm));
    let complete = report.complete
        && report.families.is_empty()
        && report.solutions.iter().all(|x| x.exactness == Exactness::Exact);
    Enumeration { group: sys.group.clone(), pvms, complete, verification_only: false, rank1: Some(report) }
}

pub(crate) fn pvm_order(a: &Pvm, b: &Pvm) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.elements().iter().zip(b.elements()) {
            let c = x.mat().to_vec().canonical_cmp(&y.mat().to_vec());
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// Partitions of the computational basis of the group into at most `max_outcomes`
/// blocks, each of which preserves orthogonality on its own.
fn diagonal_partitions(s: &StateSet, group: &[usize], d: usize, max_outcomes: usize) -> Vec<Pvm> {
    let cms = constraint_matrices(s, group);
    let full = (1usize << d) - 1;
    let op_mask = |mask: usize| {
        cms.iter().all(|c| {
            let mut acc = crate::algebra::Scalar::zero();
            for a in (0..d).filter(|a| mask & (1 << a) != 0) {
                acc += c.mat.get(a, a);
            }
            acc.is_zero()
        })
    };
    let ok: Vec<bool> = (0..=full).map(|m| m != 0 && op_mask(m)).collect();
    let mut out = Vec::new();
    fn rec(remaining: usize, blocks: &mut Vec<usize>, ok: &[bool], max: usize, out: &mut Vec<Vec<usize>>) {
        if out.len() > 5000 {
            return;
        }
        if remaining == 0 {
            if blocks.len() >= 2 {
                out.push(blocks.clone());
            }
            return;
        }
        if blocks.len() == max {
            return;
        }
        let low = remaining & remaining.wrapping_neg();
        // subsets of `remaining` containing its lowest element
        let rest = remaining & !low;
        let mut sub = rest;
        loop {
            let block = sub | low;
            if ok[block] {
                blocks.push(block);
                rec(remaining & !block, blocks, ok, max, out);
                blocks.pop();
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut parts = Vec::new();
    rec(full, &mut Vec::new(), &ok, max_outcomes, &mut parts);
    for blocks in parts {
        let mats = blocks
            .iter()
            .map(|&b| {
                let mut m = CMat::zeros(d, d);
                for a in (0..d).filter(|a| b & (1 << a) != 0) {
                    m.set(a, a, crate::algebra::Scalar::one());
                }
                m
            })
            .collect();
        if let Ok(p) = Pvm::new(mats) {
            out.push(p);
        }
    }
    out
}

/// How the absence of nontrivial orthogonality-preserving PVMs was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertMethod {
    /// The set occupies a single direction of the group space.
    SupportDimOne,
    /// The only orthogonality-preserving Hermitian operators are multiples of the identity.
    OperatorSpace,
    /// Group dimension ≤ 3 (every nontrivial PVM has a rank-1 element) and the exact
    /// case split found no rank-1 direction.
    ExactCaseSplit,
}

impl fmt::Display for CertMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertMethod::SupportDimOne => "support-dim-1",
            CertMethod::OperatorSpace => "operator-space",
            CertMethod::ExactCaseSplit => "exact-case-split",
        })
    }
}

#[derive(Clone, Debug)]
pub enum BlockCertificate {
    NoNontrivialPvm { group: Vec<usize>, method: CertMethod },
    Witness { group: Vec<usize>, pvm: LocalPvm },
    Undetermined { group: Vec<usize>, reason: String },
}

impl BlockCertificate {
    pub fn group(&self) -> &[usize] {
        match self {
            BlockCertificate::NoNontrivialPvm { group, .. }
            | BlockCertificate::Witness { group, .. }
            | BlockCertificate::Undetermined { group, .. } => group,
        }
    }

    pub fn is_certified_none(&self) -> bool {
        matches!(self, BlockCertificate::NoNontrivialPvm { .. })
    }
}

/// Decides whether a group has an effectively nontrivial orthogonality-preserving PVM.
pub fn certify_group(s: &StateSet, group: &[usize], config: &SolverConfig) -> BlockCertificate {
    let sys = GroupSystem::new(s, group);
    let g = group.to_vec();
    if sys.support_dim() <= 1 {
        return BlockCertificate::NoNontrivialPvm { group: g, method: CertMethod::SupportDimOne };
    }
    if sys.support_dim() <= 12 && operator_space_of(&sys).is_trivial() {
        return BlockCertificate::NoNontrivialPvm { group: g, method: CertMethod::OperatorSpace };
    }
    if sys.group_dim > config.max_group_dim {
        return BlockCertificate::Undetermined {
            group: g,
            reason: format!("group dimension {} above the enumeration bound", sys.group_dim),
        };
    }
    let e = enumerate_with(s, &sys, sys.group_dim, config);
    if let Some(p) = e.pvms.first() {
        return BlockCertificate::Witness { group: g, pvm: p.clone() };
    }
    let report = e.rank1.as_ref().expect("enumerated");
    if sys.group_dim <= 3 && report.none_found.is_some() {
        return BlockCertificate::NoNontrivialPvm { group: g, method: CertMethod::ExactCaseSplit };
    }
    let reason = if !report.complete {
        "rank-1 case split left open cells".to_string()
    } else if report.solutions.iter().any(|x| x.exactness != Exactness::Exact) {
        "directions exist but are not Gaussian-rational".to_string()
    } else {
        "higher-rank measurements not covered by the enumeration".to_string()
    };
    BlockCertificate::Undetermined { group: g, reason }
}

/// Irreducibility at the PVM level: no block of the partition can start with an
/// informative orthogonality-preserving projective measurement.
#[derive(Clone, Debug)]
pub enum Irreducibility {
    Irreducible { certificates: Vec<BlockCertificate> },
    Reducible { witness: LocalPvm, certificates: Vec<BlockCertificate> },
    Unknown { certificates: Vec<BlockCertificate> },
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Irreducibility::Irreducible { .. })
    }

    pub fn witness(&self) -> Option<&LocalPvm> {
        match self {
            Irreducibility::Reducible { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn certificates(&self) -> &[BlockCertificate] {
        match self {
            Irreducibility::Irreducible { certificates }
            | Irreducibility::Reducible { certificates, .. }
            | Irreducibility::Unknown { certificates } => certificates,
        }
    }
}

pub fn is_pvm_irreducible(s: &StateSet, p: &Partition, config: &SolverConfig) -> Irreducibility {
    let mut certificates = Vec::new();
    let mut witness = None;
    for b in p.blocks() {
        let c = certify_group(s, b, config);
        if witness.is_none() {
            if let BlockCertificate::Witness { pvm, .. } = &c {
                witness = Some(pvm.clone());
            }
        }
        certificates.push(c);
    }
    if let Some(w) = witness {
        return Irreducibility::Reducible { witness: w, certificates };
    }
    if s.len() >= 2 && certificates.iter().all(BlockCertificate::is_certified_none) {
        Irreducibility::Irreducible { certificates }
    } else {
        Irreducibility::Unknown { certificates }
    }
}
