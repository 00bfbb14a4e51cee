//! Projection-valued measures on party groups: construction, application to sets,
//! orthogonality preservation and triviality.
//!
//! A PVM is *trivial* when every element is `0` or `𝕀`. Under the POVM-level reading
//! any PVM with two or more nonzero outcomes is nontrivial; both agree for projectors.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{AlgebraError, CMat, CVec, Scalar};
use crate::ket::{parse_pvm_spec, ElementSpec, KetError};
use crate::states::{amps_from_json, amps_to_json, GroupLayout, PartySpec, StateError, StateSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("element {0} is not a Hermitian idempotent")]
    NotProjector(usize),
    #[error("elements do not sum to the identity")]
    Incomplete,
    #[error("elements {0} and {1} are not mutually orthogonal")]
    Overlap(usize, usize),
    #[error("PVM has no elements")]
    Empty,
    #[error("PVM dimension {pvm} does not match group dimension {group}")]
    GroupDimension { pvm: usize, group: usize },
    #[error("at most one element may be the remainder '*'")]
    MultipleRest,
    #[error("ket: {0}")]
    Ket(#[from] KetError),
    #[error("algebra: {0}")]
    Algebra(#[from] AlgebraError),
    #[error("state set: {0}")]
    State(#[from] StateError),
    #[error("json: {0}")]
    Json(String),
}

/// An orthogonal projector (Hermitian and idempotent, checked exactly).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Projector {
    mat: CMat,
}

impl Projector {
    pub fn new(mat: CMat) -> Option<Self> {
        (mat.is_hermitian() && mat.is_idempotent()).then_some(Projector { mat })
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`
    pub fn rank_one(v: &CVec) -> Self {
        let n = Scalar::real(v.norm_sqr());
        let inv = n.inv().expect("nonzero vector");
        Projector { mat: v.outer(v).scale(&inv) }
    }

    /// Projector onto the span of `vectors`.
    pub fn onto(vectors: &[CVec]) -> Result<Self, AlgebraError> {
        Ok(Projector { mat: CMat::projector_onto(vectors)? })
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn rank(&self) -> usize {
        // trace of a projector is its rank
        let t = self.mat.trace();
        num_traits::ToPrimitive::to_usize(&t.re().to_integer()).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.mat.is_identity()
    }

    /// Orthonormal-up-to-scale basis of the range.
    pub fn range(&self) -> Vec<CVec> {
        self.mat.column_space()
    }
}

/// Projection-valued measure: mutually orthogonal projectors summing to the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pvm {
    elements: Vec<Projector>,
    dim: usize,
}

impl Pvm {
    pub fn new(mats: Vec<CMat>) -> Result<Self, MeasureError> {
        let dim = mats.first().ok_or(MeasureError::Empty)?.rows();
        let mut elements = Vec::with_capacity(mats.len());
        for (k, m) in mats.into_iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(MeasureError::NotProjector(k));
            }
            elements.push(Projector::new(m).ok_or(MeasureError::NotProjector(k))?);
        }
        let mut sum = CMat::zeros(dim, dim);
        for e in &elements {
            sum = sum.add(e.mat())?;
        }
        if !sum.is_identity() {
            return Err(MeasureError::Incomplete);
        }
        // Hermitian idempotents summing to 𝕀 are automatically mutually orthogonal;
        // checked anyway on small groups where it is cheap
        if dim <= 16 {
            for i in 0..elements.len() {
                for j in i + 1..elements.len() {
                    if !elements[i].mat().mul(elements[j].mat())?.is_zero() {
                        return Err(MeasureError::Overlap(i, j));
                    }
                }
            }
        }
        Ok(Pvm { elements, dim })
    }

    pub fn from_projectors(elements: Vec<Projector>) -> Result<Self, MeasureError> {
        Self::new(elements.into_iter().map(|p| p.mat).collect())
    }

    pub fn identity(dim: usize) -> Self {
        Pvm { elements: vec![Projector { mat: CMat::identity(dim) }], dim }
    }

    /// Computational-basis measurement.
    pub fn computational(dim: usize) -> Self {
        let elements = (0..dim).map(|i| Projector::rank_one(&CVec::basis(dim, i))).collect();
        Pvm { elements, dim }
    }

    /// Parses the `"0,1;2"` ket notation against the group's local dimensions.
    pub fn parse(src: &str, dims: &[usize]) -> Result<Self, MeasureError> {
        let spec = parse_pvm_spec(src, dims)?;
        let dim: usize = dims.iter().product();
        let mut mats: Vec<Option<CMat>> = Vec::new();
        let mut rest = None;
        for (k, e) in spec.iter().enumerate() {
            match e {
                ElementSpec::Span(vs) => mats.push(Some(CMat::projector_onto(vs)?)),
                ElementSpec::Rest => {
                    if rest.replace(k).is_some() {
                        return Err(MeasureError::MultipleRest);
                    }
                    mats.push(None);
                }
            }
        }
        if let Some(k) = rest {
            let mut r = CMat::identity(dim);
            for m in mats.iter().flatten() {
                r = r.sub(m)?;
            }
            mats[k] = Some(r);
        }
        Self::new(mats.into_iter().map(|m| m.expect("filled")).collect())
    }

    /// `{P, 𝕀 − P}`
    pub fn binary(p: Projector) -> Result<Self, MeasureError> {
        let rest = CMat::identity(p.dim()).sub(p.mat())?;
        Self::new(vec![p.mat, rest])
    }

    pub fn elements(&self) -> &[Projector] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Every element is `0` or `𝕀`.
    pub fn is_trivial(&self) -> bool {
        self.elements.iter().all(|e| e.is_zero() || e.is_identity())
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.elements.iter().map(Projector::rank).collect()
    }

    /// Canonical form: zero elements removed, elements ordered canonically.
    pub fn canonical(&self) -> Pvm {
        let mut elements: Vec<Projector> = self.elements.iter().filter(|e| !e.is_zero()).cloned().collect();
        elements.sort_by(|a, b| a.mat().to_vec().canonical_cmp(&b.mat().to_vec()));
        Pvm { elements, dim: self.dim }
    }
}

/// A PVM performed by one group of parties (which measure jointly when the group has
/// more than one member).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalPvm {
    pub group: Vec<usize>,
    pub pvm: Pvm,
}

impl LocalPvm {
    pub fn new(spec: &PartySpec, group: Vec<usize>, pvm: Pvm) -> Result<Self, MeasureError> {
        if group.is_empty() || group.iter().any(|&p| p >= spec.parties()) {
            return Err(StateError::InvalidPartition(format!("bad group {group:?}")).into());
        }
        let gd = spec.group_dim(&group);
        if gd != pvm.dim() {
            return Err(MeasureError::GroupDimension { pvm: pvm.dim(), group: gd });
        }
        let mut g = group;
        g.sort_unstable();
        Ok(LocalPvm { group: g, pvm })
    }

    /// `group` given by party labels (`"B"`, `"BC"`), PVM in ket notation.
    pub fn parse(spec: &PartySpec, group: &str, pvm: &str) -> Result<Self, MeasureError> {
        let g = spec.parse_group(group)?;
        let dims: Vec<usize> = g.iter().map(|&p| spec.dims()[p]).collect();
        Self::new(spec, g, Pvm::parse(pvm, &dims)?)
    }

    pub fn layout(&self, spec: &PartySpec) -> GroupLayout {
        GroupLayout::new(spec, &self.group)
    }

    /// Each element as a global operator `P ⊗ 𝕀` (dense; meant for small systems).
    pub fn embed(&self, spec: &PartySpec) -> Vec<CMat> {
        let layout = self.layout(spec);
        self.pvm.elements().iter().map(|e| layout.embed(e.mat())).collect()
    }
}

/// One outcome of applying a PVM to a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub outcome: usize,
    /// Surviving (unnormalized) post-measurement states, labels preserved.
    pub set: StateSet,
    /// Labels of states annihilated by this element.
    pub annihilated: Vec<String>,
}

/// Applies `lp` to every state; one branch per PVM element, in element order.
pub fn apply(s: &StateSet, lp: &LocalPvm) -> Result<Vec<Branch>, MeasureError> {
    check_compatible(s.spec(), lp)?;
    let layout = lp.layout(s.spec());
    let mut out = Vec::with_capacity(lp.pvm.len());
    for (k, e) in lp.pvm.elements().iter().enumerate() {
        let mut kept = Vec::new();
        let mut annihilated = Vec::new();
        for st in s.states() {
            let image = layout.apply(e.mat(), &st.vector);
            if image.is_zero() {
                annihilated.push(st.label.clone());
            } else {
                kept.push(crate::states::LabeledState { label: st.label.clone(), vector: image });
            }
        }
        let set = StateSet::new(s.spec().clone(), kept, s.provenance().to_string())?;
        out.push(Branch { outcome: k, set, annihilated });
    }
    Ok(out)
}

fn check_compatible(spec: &PartySpec, lp: &LocalPvm) -> Result<(), MeasureError> {
    if lp.group.iter().any(|&p| p >= spec.parties()) {
        return Err(StateError::InvalidPartition(format!("group {:?} outside spec", lp.group)).into());
    }
    let gd = spec.group_dim(&lp.group);
    if gd != lp.pvm.dim() {
        return Err(MeasureError::GroupDimension { pvm: lp.pvm.dim(), group: gd });
    }
    Ok(())
}

/// Result of [`preserves_orthogonality`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpCheck {
    Ok,
    Witness { outcome: usize, i: usize, j: usize, value: Scalar },
}

impl OpCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, OpCheck::Ok)
    }
}

/// Checks `⟨ψᵢ|P⊗𝕀|ψⱼ⟩ = 0` for every element and pair; for projectors this is exactly
/// orthogonality of the post-measurement states.
pub fn preserves_orthogonality(s: &StateSet, lp: &LocalPvm) -> Result<OpCheck, MeasureError> {
    check_compatible(s.spec(), lp)?;
    let layout = lp.layout(s.spec());
    let vecs = s.vectors();
    for (k, e) in lp.pvm.elements().iter().enumerate() {
        if e.is_zero() || e.is_identity() {
            continue;
        }
        let images: Vec<CVec> = vecs.iter().map(|v| layout.apply(e.mat(), v)).collect();
        for i in 0..vecs.len() {
            for j in i + 1..vecs.len() {
                let value = vecs[i].inner(&images[j])?;
                if !value.is_zero() {
                    return Ok(OpCheck::Witness { outcome: k, i, j, value });
                }
            }
        }
    }
    Ok(OpCheck::Ok)
}

/// Basis of the span of the group-side supports of all states (the space the set
/// actually occupies on the group).
pub fn group_support(s: &StateSet, group: &[usize]) -> Vec<CVec> {
    let layout = GroupLayout::new(s.spec(), group);
    let gd = layout.group_dim();
    let mut echelon: Vec<(usize, CVec)> = Vec::new();
    let mut basis = Vec::new();
    for v in s.vectors() {
        let m = layout.matrix(v);
        for r in 0..m.cols() {
            if basis.len() == gd {
                return basis;
            }
            let col = m.column(r);
            if col.is_zero() {
                continue;
            }
            let mut w = col.clone();
            for (p, e) in &echelon {
                let c = w.get(*p).clone();
                if !c.is_zero() {
                    w = w.sub(&e.scale(&c)).expect("dim");
                }
            }
            let lead = w.nonzeros().next().map(|(p, x)| (p, x.clone()));
            if let Some((p, lead)) = lead {
                let e = w.scale(&lead.inv().expect("nonzero"));
                echelon.push((p, e));
                basis.push(col);
            }
        }
    }
    basis
}

/// True when every element acts on the occupied group subspace as a multiple of the
/// identity, so no outcome carries information about which state was present.
pub fn is_effectively_trivial(s: &StateSet, lp: &LocalPvm) -> bool {
    let w = group_support(s, &lp.group);
    if w.is_empty() {
        return true;
    }
    let b = CMat::from_columns(&w).expect("non-empty");
    let bd = b.adjoint();
    let gram = bd.mul(&b).expect("shape");
    let g_inv = gram.inverse().expect("independent columns");
    lp.pvm.elements().iter().all(|e| {
        let compressed = g_inv.mul(&bd.mul(e.mat()).and_then(|x| x.mul(&b)).expect("shape")).expect("shape");
        compressed.is_scalar_multiple_of_identity()
    })
}

/// Serialized PVM: each element a row-major grid of `[re_num, re_den, im_num, im_den]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PvmJson {
    pub dim: usize,
    pub elements: Vec<Vec<Vec<[Value; 4]>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LocalPvmJson {
    pub group: Vec<String>,
    pub pvm: PvmJson,
}

impl Pvm {
    pub fn to_json_value(&self) -> PvmJson {
        PvmJson {
            dim: self.dim,
            elements: self
                .elements
                .iter()
                .map(|e| (0..self.dim).map(|i| amps_to_json(e.mat().row(i))).collect())
                .collect(),
        }
    }

    pub fn from_json_value(j: &PvmJson) -> Result<Self, MeasureError> {
        let mut mats = Vec::new();
        for grid in &j.elements {
            let rows = grid.iter().map(|r| amps_from_json(r)).collect::<Result<Vec<_>, _>>()?;
            if rows.len() != j.dim || rows.iter().any(|r| r.len() != j.dim) {
                return Err(MeasureError::Json(format!("element is not {0}x{0}", j.dim)));
            }
            mats.push(CMat::from_rows(rows)?);
        }
        Self::new(mats)
    }
}

impl LocalPvm {
    pub fn to_json_value(&self, spec: &PartySpec) -> LocalPvmJson {
        LocalPvmJson {
            group: self.group.iter().map(|&p| spec.labels()[p].clone()).collect(),
            pvm: self.pvm.to_json_value(),
        }
    }

    pub fn from_json_value(j: &LocalPvmJson, spec: &PartySpec) -> Result<Self, MeasureError> {
        let group = spec.parse_group(&j.group.join(","))?;
        Self::new(spec, group, Pvm::from_json_value(&j.pvm)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_named_set, NamedSet};

    #[test]
    fn parse_and_validate() {
        let p = Pvm::parse("0,1;2", &[3]).unwrap();
        assert_eq!(p.ranks(), vec![2, 1]);
        assert!(Pvm::parse("0;0+1", &[2]).is_err());
        assert!(matches!(Pvm::parse("0", &[2]), Err(MeasureError::Incomplete)));
        let q = Pvm::parse("0+1;*", &[2]).unwrap();
        assert_eq!(q.elements()[1], Projector::rank_one(&CVec::from_ints(&[1, -1])));
    }

    #[test]
    fn triviality() {
        assert!(Pvm::identity(3).is_trivial());
        assert!(!Pvm::computational(2).is_trivial());
        assert!(!Pvm::parse("0,1;2", &[3]).unwrap().is_trivial());
    }

    #[test]
    fn embed_ranks() {
        let s1 = build_named_set(NamedSet::S1, None).unwrap();
        let lp = LocalPvm::parse(s1.spec(), "B", "0;1").unwrap();
        let ops = lp.embed(s1.spec());
        assert_eq!(ops[0].rows(), 18);
        assert_eq!(ops[0].rank(), 9);
    }

    #[test]
    fn apply_drops_annihilated() {
        let s1 = build_named_set(NamedSet::S1, None).unwrap();
        let lp = LocalPvm::parse(s1.spec(), "C", "0,1;2").unwrap();
        let branches = apply(&s1, &lp).unwrap();
        assert_eq!(branches[1].set.len(), 4);
        assert_eq!(branches[1].annihilated.len(), 5);
    }

    #[test]
    fn json_round_trip() {
        let s2 = build_named_set(NamedSet::S2, None).unwrap();
        let lp = LocalPvm::parse(s2.spec(), "BC", "00,02,11;01,10,12").unwrap();
        let j = serde_json::to_string(&lp.to_json_value(s2.spec())).unwrap();
        let back: LocalPvmJson = serde_json::from_str(&j).unwrap();
        assert_eq!(LocalPvm::from_json_value(&back, s2.spec()).unwrap(), lp);
    }

    #[test]
    fn effective_triviality_ignores_unused_levels() {
        let s = StateSet::from_kets(&[3, 2], &["00", "11"], "user").unwrap();
        let lp = LocalPvm::parse(s.spec(), "A", "2;*").unwrap();
        assert!(!lp.pvm.is_trivial());
        assert!(is_effectively_trivial(&s, &lp));
        let lp = LocalPvm::parse(s.spec(), "A", "0;*").unwrap();
        assert!(!is_effectively_trivial(&s, &lp));
    }
}
