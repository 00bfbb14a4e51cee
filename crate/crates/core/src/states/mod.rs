//! Party specifications, partitions and labeled sets of (unnormalized) pure states.

mod json;
mod layout;
mod named;
mod separability;

pub use json::{amps_from_json, amps_to_json, StateSetJson};
pub use layout::GroupLayout;
pub use named::{build_named_set, union_embedding_levels, NamedSet};
pub use separability::{
    factorizes_across, is_locally_redundant, is_product_across, local_factors, separability_degree, stays_orthogonal_after_discarding,
    trace_overlap, Redundancy,
};

use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, CVec, Scalar};
use crate::ket::KetError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("invalid party dimensions: {0}")]
    InvalidDims(String),
    #[error("state {label:?} has dimension {found}, expected {expected}")]
    WrongDimension { label: String, expected: usize, found: usize },
    #[error("state {0:?} is the zero vector")]
    ZeroState(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state {0:?} has support outside the requested levels")]
    OutsideSupport(String),
    #[error("ket: {0}")]
    Ket(#[from] KetError),
    #[error("algebra: {0}")]
    Algebra(#[from] AlgebraError),
    #[error("json: {0}")]
    Json(String),
}

/// Local dimensions and party names of an `n`-party system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartySpec {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl PartySpec {
    pub fn new(dims: Vec<usize>, labels: Vec<String>) -> Result<Self, StateError> {
        if dims.is_empty() {
            return Err(StateError::InvalidDims("at least one party required".into()));
        }
        if dims.contains(&0) {
            return Err(StateError::InvalidDims(format!("{dims:?} contains a zero dimension")));
        }
        if labels.len() != dims.len() {
            return Err(StateError::InvalidDims(format!("{} labels for {} parties", labels.len(), dims.len())));
        }
        let mut seen = labels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != labels.len() || labels.iter().any(|l| l.is_empty() || l.contains('|') || l.contains(',')) {
            return Err(StateError::InvalidDims(format!("bad party labels {labels:?}")));
        }
        Ok(PartySpec { dims, labels })
    }

    /// Parties named `A`, `B`, `C`, … (then `P27`, `P28`, … past `Z`).
    pub fn with_default_labels(dims: Vec<usize>) -> Result<Self, StateError> {
        let labels = (0..dims.len()).map(default_label).collect();
        Self::new(dims, labels)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn group_dim(&self, group: &[usize]) -> usize {
        group.iter().map(|&p| self.dims[p]).product()
    }

    pub fn group_label(&self, group: &[usize]) -> String {
        group.iter().map(|&p| self.labels[p].as_str()).collect()
    }

    pub fn party_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Parses a group such as `B`, `BC` or `B,C`.
    pub fn parse_group(&self, src: &str) -> Result<Vec<usize>, StateError> {
        let src = src.trim();
        let names: Vec<String> = if src.contains(',') {
            src.split(',').map(|s| s.trim().to_string()).collect()
        } else if self.labels.iter().all(|l| l.chars().count() == 1) {
            src.chars().map(|c| c.to_string()).collect()
        } else {
            vec![src.to_string()]
        };
        let mut group = Vec::new();
        for n in names {
            let p = self
                .party_index(&n)
                .ok_or_else(|| StateError::InvalidPartition(format!("unknown party {n:?}")))?;
            if group.contains(&p) {
                return Err(StateError::InvalidPartition(format!("party {n:?} repeated")));
            }
            group.push(p);
        }
        if group.is_empty() {
            return Err(StateError::InvalidPartition("empty group".into()));
        }
        group.sort_unstable();
        Ok(group)
    }
}

fn default_label(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        format!("P{}", i + 1)
    }
}

/// Disjoint, exhaustive grouping of parties. Canonical form: each block sorted, blocks
/// ordered by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut blocks: Vec<Vec<usize>>, parties: usize) -> Result<Self, StateError> {
        let mut seen = vec![false; parties];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(StateError::InvalidPartition("empty block".into()));
            }
            b.sort_unstable();
            for &p in b.iter() {
                if p >= parties || seen[p] {
                    return Err(StateError::InvalidPartition(format!("party {p} missing or repeated")));
                }
                seen[p] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(StateError::InvalidPartition("blocks do not cover every party".into()));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition { blocks })
    }

    /// Every party on its own.
    pub fn finest(parties: usize) -> Self {
        Partition { blocks: (0..parties).map(|p| vec![p]).collect() }
    }

    pub fn coarsest(parties: usize) -> Self {
        Partition { blocks: vec![(0..parties).collect()] }
    }

    /// Parses `A|BC` or `A|B,C`-style strings against the spec's party labels.
    pub fn parse(src: &str, spec: &PartySpec) -> Result<Self, StateError> {
        let blocks = src
            .split('|')
            .map(|b| spec.parse_group(b))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(blocks, spec.parties())
    }

    /// All set partitions of `parties` into exactly `m` blocks, canonical and sorted.
    pub fn all_with_blocks(parties: usize, m: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut assign = vec![0usize; parties];
        fn rec(p: usize, used: usize, m: usize, assign: &mut Vec<usize>, out: &mut Vec<Partition>) {
            let n = assign.len();
            if p == n {
                if used == m {
                    let mut blocks = vec![Vec::new(); m];
                    for (party, &b) in assign.iter().enumerate() {
                        blocks[b].push(party);
                    }
                    out.push(Partition::new(blocks, n).expect("valid by construction"));
                }
                return;
            }
            if used + (n - p) < m {
                return;
            }
            for b in 0..used.min(m) {
                assign[p] = b;
                rec(p + 1, used, m, assign, out);
            }
            if used < m {
                assign[p] = used;
                rec(p + 1, used + 1, m, assign, out);
            }
        }
        if m >= 1 && m <= parties {
            rec(0, 0, m, &mut assign, &mut out);
        }
        out.sort();
        out
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_finest(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn contains_block(&self, group: &[usize]) -> bool {
        self.blocks.iter().any(|b| b == group)
    }

    pub fn parties(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn label(&self, spec: &PartySpec) -> String {
        let multi = spec.labels().iter().any(|l| l.chars().count() > 1);
        self.blocks
            .iter()
            .map(|b| {
                let names: Vec<&str> = b.iter().map(|&p| spec.labels()[p].as_str()).collect();
                names.join(if multi { "," } else { "" })
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// One member of a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledState {
    pub label: String,
    pub vector: CVec,
}

/// Witness of non-orthogonality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Orthogonality {
    Ok,
    Witness { i: usize, j: usize, value: Scalar },
}

impl Orthogonality {
    pub fn is_ok(&self) -> bool {
        matches!(self, Orthogonality::Ok)
    }
}

/// A labeled list of nonzero state vectors on a common party spec.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSet {
    spec: PartySpec,
    states: Vec<LabeledState>,
    provenance: String,
}

impl StateSet {
    pub fn new(spec: PartySpec, states: Vec<LabeledState>, provenance: impl Into<String>) -> Result<Self, StateError> {
        let total = spec.total_dim();
        for s in &states {
            if s.vector.dim() != total {
                return Err(StateError::WrongDimension { label: s.label.clone(), expected: total, found: s.vector.dim() });
            }
            if s.vector.is_zero() {
                return Err(StateError::ZeroState(s.label.clone()));
            }
        }
        Ok(StateSet { spec, states, provenance: provenance.into() })
    }

    /// Builds a set from ket strings, labeled by position (`1`, `2`, …) unless given.
    pub fn from_kets(dims: &[usize], kets: &[&str], provenance: &str) -> Result<Self, StateError> {
        let spec = PartySpec::with_default_labels(dims.to_vec())?;
        let states = kets
            .iter()
            .enumerate()
            .map(|(i, k)| {
                Ok(LabeledState { label: format!("{}", i + 1), vector: crate::ket::parse_ket(k, dims)? })
            })
            .collect::<Result<Vec<_>, StateError>>()?;
        Self::new(spec, states, provenance)
    }

    pub fn spec(&self) -> &PartySpec {
        &self.spec
    }

    pub fn states(&self) -> &[LabeledState] {
        &self.states
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| s.label.clone()).collect()
    }

    pub fn vectors(&self) -> Vec<&CVec> {
        self.states.iter().map(|s| &s.vector).collect()
    }

    pub fn find(&self, label: &str) -> Option<&LabeledState> {
        self.states.iter().find(|s| s.label == label)
    }

    /// The sub-set selected by position, in the given order.
    pub fn subset(&self, indices: &[usize]) -> StateSet {
        StateSet {
            spec: self.spec.clone(),
            states: indices.iter().map(|&i| self.states[i].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn subset_by_labels(&self, labels: &[&str]) -> Option<StateSet> {
        let idx = labels
            .iter()
            .map(|l| self.states.iter().position(|s| s.label == *l))
            .collect::<Option<Vec<_>>>()?;
        Some(self.subset(&idx))
    }

    pub fn relabeled(&self, labels: Vec<String>) -> StateSet {
        let mut out = self.clone();
        for (s, l) in out.states.iter_mut().zip(labels) {
            s.label = l;
        }
        out
    }

    pub fn check_mutual_orthogonality(&self) -> Orthogonality {
        for i in 0..self.states.len() {
            for j in i + 1..self.states.len() {
                let v = self.states[i].vector.inner(&self.states[j].vector).expect("common dimension");
                if !v.is_zero() {
                    return Orthogonality::Witness { i, j, value: v };
                }
            }
        }
        Orthogonality::Ok
    }

    pub fn is_orthogonal(&self) -> bool {
        self.check_mutual_orthogonality().is_ok()
    }

    /// Re-indexes the vectors so that each block of `p` becomes a single party.
    pub fn merge_parties(&self, p: &Partition) -> Result<StateSet, StateError> {
        if p.parties() != self.spec.parties() {
            return Err(StateError::InvalidPartition(format!(
                "partition covers {} parties, set has {}",
                p.parties(),
                self.spec.parties()
            )));
        }
        let order: Vec<usize> = p.blocks().iter().flatten().copied().collect();
        let permuted = self.permute_parties(&order)?;
        let dims = p.blocks().iter().map(|b| self.spec.group_dim(b)).collect();
        let multi = self.spec.labels().iter().any(|l| l.chars().count() > 1);
        let labels = p
            .blocks()
            .iter()
            .map(|b| {
                let names: Vec<&str> = b.iter().map(|&q| self.spec.labels()[q].as_str()).collect();
                names.join(if multi { "+" } else { "" })
            })
            .collect();
        let spec = PartySpec::new(dims, labels)?;
        Ok(StateSet { spec, states: permuted.states, provenance: self.provenance.clone() })
    }

    /// Reorders the tensor factors: new party `k` is old party `order[k]`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<StateSet, StateError> {
        let n = self.spec.parties();
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(StateError::InvalidPartition(format!("{order:?} is not a permutation of the parties")));
        }
        let old_dims = self.spec.dims();
        let new_dims: Vec<usize> = order.iter().map(|&q| old_dims[q]).collect();
        let new_labels: Vec<String> = order.iter().map(|&q| self.spec.labels()[q].clone()).collect();
        let spec = PartySpec::new(new_dims.clone(), new_labels)?;
        let total = spec.total_dim();
        let mut states = Vec::with_capacity(self.states.len());
        for s in &self.states {
            let mut out = CVec::zeros(total);
            for (f, amp) in s.vector.nonzeros() {
                let digits = digits_of(f, old_dims);
                let mut g = 0;
                for (k, &q) in order.iter().enumerate() {
                    g = g * new_dims[k] + digits[q];
                }
                out.set(g, amp.clone());
            }
            states.push(LabeledState { label: s.label.clone(), vector: out });
        }
        Ok(StateSet { spec, states, provenance: self.provenance.clone() })
    }

    /// Restricts each party to the listed levels (mapped to `0, 1, …` in order).
    pub fn restrict_levels(&self, levels: &[Vec<usize>]) -> Result<StateSet, StateError> {
        let dims = self.spec.dims();
        if levels.len() != dims.len() {
            return Err(StateError::InvalidDims("one level list per party required".into()));
        }
        let new_dims: Vec<usize> = levels.iter().map(Vec::len).collect();
        let spec = PartySpec::new(new_dims.clone(), self.spec.labels().to_vec())?;
        let mut states = Vec::new();
        for s in &self.states {
            let mut out = CVec::zeros(spec.total_dim());
            for (f, amp) in s.vector.nonzeros() {
                let digits = digits_of(f, dims);
                let mut g = 0;
                for (p, &d) in digits.iter().enumerate() {
                    let local = levels[p]
                        .iter()
                        .position(|&l| l == d)
                        .ok_or_else(|| StateError::OutsideSupport(s.label.clone()))?;
                    g = g * new_dims[p] + local;
                }
                out.set(g, amp.clone());
            }
            states.push(LabeledState { label: s.label.clone(), vector: out });
        }
        StateSet::new(spec, states, self.provenance.clone())
    }

    /// Embeds each party's levels into a larger local space: level `k` of party `p`
    /// becomes level `levels[p][k]` of a party of dimension `dims[p]`.
    pub fn embed_levels(&self, dims: &[usize], levels: &[Vec<usize>]) -> Result<StateSet, StateError> {
        let old = self.spec.dims();
        if dims.len() != old.len() || levels.len() != old.len() {
            return Err(StateError::InvalidDims("one level list per party required".into()));
        }
        for (p, l) in levels.iter().enumerate() {
            if l.len() != old[p] || l.iter().any(|&x| x >= dims[p]) {
                return Err(StateError::InvalidDims(format!("bad level map for party {p}")));
            }
        }
        let spec = PartySpec::new(dims.to_vec(), self.spec.labels().to_vec())?;
        let mut states = Vec::new();
        for s in &self.states {
            let mut out = CVec::zeros(spec.total_dim());
            for (f, amp) in s.vector.nonzeros() {
                let digits = digits_of(f, old);
                let mut g = 0;
                for (p, &d) in digits.iter().enumerate() {
                    g = g * dims[p] + levels[p][d];
                }
                out.set(g, amp.clone());
            }
            states.push(LabeledState { label: s.label.clone(), vector: out });
        }
        StateSet::new(spec, states, self.provenance.clone())
    }

    /// Concatenates sets on the same spec.
    pub fn union(parts: &[StateSet], provenance: &str) -> Result<StateSet, StateError> {
        let first = parts.first().ok_or_else(|| StateError::InvalidParameter("empty union".into()))?;
        let mut states = Vec::new();
        for p in parts {
            if p.spec.dims() != first.spec.dims() {
                return Err(StateError::InvalidDims("union of sets with different dimensions".into()));
            }
            states.extend(p.states.iter().cloned());
        }
        StateSet::new(first.spec.clone(), states, provenance)
    }

    /// Equal up to a bijection of states and nonzero per-state scalars (labels ignored).
    pub fn equivalent_up_to_scalars(&self, other: &StateSet) -> bool {
        if self.spec.dims() != other.spec.dims() || self.len() != other.len() {
            return false;
        }
        let mut a: Vec<CVec> = self.states.iter().map(|s| s.vector.canonical()).collect();
        let mut b: Vec<CVec> = other.states.iter().map(|s| s.vector.canonical()).collect();
        a.sort_by(|x, y| x.canonical_cmp(y));
        b.sort_by(|x, y| x.canonical_cmp(y));
        a == b
    }

    /// Support levels used by each party across all states.
    pub fn local_supports(&self) -> Vec<Vec<usize>> {
        let dims = self.spec.dims();
        let mut used = vec![vec![false; 0]; dims.len()];
        for (p, u) in used.iter_mut().enumerate() {
            *u = vec![false; dims[p]];
        }
        for s in &self.states {
            for (f, _) in s.vector.nonzeros() {
                for (p, d) in digits_of(f, dims).into_iter().enumerate() {
                    used[p][d] = true;
                }
            }
        }
        used.into_iter()
            .map(|u| u.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect())
            .collect()
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.spec.dims().iter().map(|d| d.to_string()).collect();
        writeln!(f, "{} states in {} ({})", self.len(), dims.join("x"), self.provenance)?;
        for s in &self.states {
            writeln!(f, "  {}: {}", s.label, crate::diagram::ket_string(&s.vector, self.spec.dims()))?;
        }
        Ok(())
    }
}

/// Mixed-radix digits of a flat index, leftmost party slowest.
pub fn digits_of(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut d = vec![0; dims.len()];
    for p in (0..dims.len()).rev() {
        d[p] = flat % dims[p];
        flat /= dims[p];
    }
    d
}

pub fn flat_of(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec3() -> PartySpec {
        PartySpec::with_default_labels(vec![3, 2, 3]).unwrap()
    }

    #[test]
    fn partition_parsing_is_canonical() {
        let s = spec3();
        let p = Partition::parse("BC|A", &s).unwrap();
        assert_eq!(p.blocks(), &[vec![0], vec![1, 2]]);
        assert_eq!(p.label(&s), "A|BC");
        assert!(Partition::parse("A|B", &s).is_err());
        assert!(Partition::parse("A|AB|C", &s).is_err());
    }

    #[test]
    fn partition_enumeration_counts() {
        assert_eq!(Partition::all_with_blocks(3, 2).len(), 3);
        assert_eq!(Partition::all_with_blocks(4, 2).len(), 7);
        assert_eq!(Partition::all_with_blocks(4, 3).len(), 6);
        assert_eq!(Partition::all_with_blocks(3, 3), vec![Partition::finest(3)]);
    }

    #[test]
    fn orthogonality_witness() {
        let s = StateSet::from_kets(&[2], &["0", "0+1"], "user").unwrap();
        assert_eq!(s.check_mutual_orthogonality(), Orthogonality::Witness { i: 0, j: 1, value: Scalar::one() });
    }

    #[test]
    fn zero_state_rejected() {
        assert!(matches!(StateSet::from_kets(&[2], &["0-0"], "user"), Err(StateError::ZeroState(_))));
    }

    #[test]
    fn merge_trivial_partition_is_identity() {
        let s = StateSet::from_kets(&[3, 2, 3], &["0(00+01+10-11)", "1(01-11)"], "user").unwrap();
        let m = s.merge_parties(&Partition::finest(3)).unwrap();
        assert_eq!(m, s);
        let ac = s.merge_parties(&Partition::parse("AC|B", s.spec()).unwrap()).unwrap();
        assert_eq!(ac.spec().dims(), &[9, 2]);
        assert_eq!(ac.spec().labels()[0], "AC");
    }

    #[test]
    fn restrict_and_embed_round_trip() {
        let s = StateSet::from_kets(&[2, 2], &["0(0+1)", "1(0-1)"], "user").unwrap();
        let big = s.embed_levels(&[4, 3], &[vec![1, 3], vec![2, 0]]).unwrap();
        assert_eq!(big.restrict_levels(&[vec![1, 3], vec![2, 0]]).unwrap(), s);
        assert_eq!(big.local_supports(), vec![vec![1, 3], vec![0, 2]]);
    }
}
