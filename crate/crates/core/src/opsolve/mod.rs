//! Orthogonality-preserving measurements available to a party group.
//!
//! For states `ψᵢ` and a group `g`, the constraint matrix of the pair `(i, j)` is
//! `C[a][b] = ⟨ψᵢ|(|a⟩⟨b| ⊗ 𝕀)|ψⱼ⟩`; an operator `X` on the group preserves the pair's
//! orthogonality iff `Σ X[a][b]·C[a][b] = 0`. Only the compression of `X` onto the
//! occupied group subspace `W` (spanned by the group-side supports) matters, so all
//! solving is done in coordinates of a basis `B` of `W`, where the pair's form becomes
//! `D = Bᵀ·C·B̄` and a rank-1 direction `θ = B·x` must satisfy `Σ x_k·conj(x_l)·D[k][l] = 0`.

mod enumerate;
mod numeric;
mod quadratic;
mod rank1;
mod space;

pub use enumerate::{
    certify_group, enumerate_op_pvms, is_pvm_irreducible, BlockCertificate, CertMethod, Enumeration,
    Irreducibility,
};
pub use rank1::{rank1_op_directions, Direction, Exactness, Family, FamilyKind, NoneFound, SolutionReport};
pub use space::{op_operator_space, OperatorSpace};

use crate::algebra::{CMat, CVec};
use crate::measure::group_support;
use crate::states::{GroupLayout, StateSet};

/// `C_ij` for one unordered pair on one group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintMatrix {
    pub group: Vec<usize>,
    pub pair: (usize, usize),
    pub mat: CMat,
}

/// One matrix per unordered pair `i < j`, exact.
pub fn constraint_matrices(s: &StateSet, group: &[usize]) -> Vec<ConstraintMatrix> {
    let layout = GroupLayout::new(s.spec(), group);
    let vecs = s.vectors();
    let mut out = Vec::new();
    for i in 0..vecs.len() {
        for j in i + 1..vecs.len() {
            out.push(ConstraintMatrix { group: group.to_vec(), pair: (i, j), mat: layout.cross_matrix(vecs[i], vecs[j]) });
        }
    }
    out
}

/// Tuning for the solvers. Exact paths never depend on these except `max_group_dim`.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Forbid the seeded numeric fallback.
    pub exact_only: bool,
    pub seed: u64,
    pub starts: usize,
    pub tolerance: f64,
    /// Largest group dimension for which PVMs are enumerated rather than only verified.
    pub max_group_dim: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { exact_only: false, seed: 0x5eed, starts: 24, tolerance: 1e-9, max_group_dim: 9 }
    }
}

impl SolverConfig {
    pub fn exact() -> Self {
        SolverConfig { exact_only: true, ..Self::default() }
    }
}

/// Forms of all pairs restricted to the occupied subspace of a group.
#[derive(Clone, Debug)]
pub(crate) struct GroupSystem {
    pub group: Vec<usize>,
    pub group_dim: usize,
    /// Columns span `W`.
    pub basis: CMat,
    /// Nonzero restricted forms, deduplicated up to scalar multiples.
    pub forms: Vec<CMat>,
}

impl GroupSystem {
    pub fn new(s: &StateSet, group: &[usize]) -> Self {
        let group_dim = s.spec().group_dim(group);
        let w = group_support(s, group);
        let basis = if w.is_empty() { CMat::identity(group_dim) } else { CMat::from_columns(&w).expect("non-empty") };
        let bt = basis.transpose();
        let bc = basis.conj();
        let mut forms: Vec<CMat> = Vec::new();
        let mut seen: Vec<CVec> = Vec::new();
        for c in constraint_matrices(s, group) {
            if c.mat.is_zero() {
                continue;
            }
            let d = bt.mul(&c.mat).and_then(|x| x.mul(&bc)).expect("shapes");
            if d.is_zero() {
                continue;
            }
            let key = d.to_vec().canonical();
            if !seen.contains(&key) {
                seen.push(key);
                forms.push(d);
            }
        }
        GroupSystem { group: group.to_vec(), group_dim, basis, forms }
    }

    pub fn support_dim(&self) -> usize {
        self.basis.cols()
    }

    /// Maps coordinates in `W` back to the group space.
    pub fn lift(&self, x: &CVec) -> CVec {
        self.basis.mul_vec(x).expect("shape")
    }
}
