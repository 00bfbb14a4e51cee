use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{CVec, Scalar};

use super::{GroupLayout, PartySpec, Partition, StateSet};

/// True when `v` is a product across `group | rest` (reshape rank 1).
pub fn factorizes_across(v: &CVec, spec: &PartySpec, group: &[usize]) -> bool {
    if group.is_empty() || group.len() == spec.parties() {
        return true;
    }
    GroupLayout::new(spec, group).matrix(v).rank() == 1
}

/// True when `v` is a product of one factor per block of `p`.
pub fn is_product_across(v: &CVec, spec: &PartySpec, p: &Partition) -> bool {
    p.blocks().iter().all(|b| factorizes_across(v, spec, b))
}

/// Largest `m` such that `v` factorizes over some `m`-partition, with the finest such
/// partition. Invariant under nonzero rescaling.
pub fn separability_degree(v: &CVec, spec: &PartySpec) -> (usize, Partition) {
    let n = spec.parties();
    for m in (1..=n).rev() {
        for p in Partition::all_with_blocks(n, m) {
            if is_product_across(v, spec, &p) {
                return (m, p);
            }
        }
    }
    (1, Partition::coarsest(n))
}

/// Per-party factors of a fully product state, scaled so that their tensor product
/// is exactly `v`; `None` when `v` is not fully product.
pub fn local_factors(v: &CVec, spec: &PartySpec) -> Option<Vec<CVec>> {
    let n = spec.parties();
    let mut factors = Vec::with_capacity(n);
    for p in 0..n {
        let m = GroupLayout::new(spec, &[p]).matrix(v);
        let col = (0..m.cols()).map(|j| m.column(j)).find(|c| !c.is_zero())?;
        factors.push(col);
    }
    let prod = CVec::tensor_all(&factors)?;
    let (k, lead) = v.nonzeros().next()?;
    let pk = prod.get(k);
    if pk.is_zero() {
        return None;
    }
    let c = lead / pk;
    let scaled = prod.scale(&c);
    if scaled != *v {
        return None;
    }
    factors[0] = factors[0].scale(&c);
    Some(factors)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Redundancy {
    /// Orthogonality survives discarding these parties.
    Redundant { discarded: Vec<usize> },
    Irredundant,
}

impl Redundancy {
    pub fn is_redundant(&self) -> bool {
        matches!(self, Redundancy::Redundant { .. })
    }
}

/// Whether some nonempty proper subset of parties can be discarded while every pair of
/// reduced states stays trace-orthogonal.
///
/// With `Ψᵢ` the state reshaped as kept × discarded, `Tr(ρᵢρⱼ) = ‖Ψᵢ†Ψⱼ‖²`, so the test
/// is that every cross matrix over the discarded parties vanishes.
pub fn is_locally_redundant(s: &StateSet) -> Redundancy {
    let n = s.spec().parties();
    if n < 2 {
        return Redundancy::Irredundant;
    }
    let mut subsets: Vec<Vec<usize>> = (1..(1usize << n) - 1)
        .map(|mask| (0..n).filter(|p| mask & (1 << p) != 0).collect())
        .collect();
    subsets.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    for discard in subsets {
        if stays_orthogonal_after_discarding(s, &discard) {
            return Redundancy::Redundant { discarded: discard };
        }
    }
    Redundancy::Irredundant
}

/// Every pair of reduced states is trace-orthogonal once `discard` is traced out.
pub fn stays_orthogonal_after_discarding(s: &StateSet, discard: &[usize]) -> bool {
    let vecs = s.vectors();
    let layout = GroupLayout::new(s.spec(), discard);
    (0..vecs.len()).all(|i| (i + 1..vecs.len()).all(|j| layout.cross_matrix(vecs[i], vecs[j]).is_zero()))
}

/// `Tr(ρ_u ρ_v)` of the reduced operators after tracing out `discard`, computed from the
/// explicit reduced density matrices.
pub fn trace_overlap(u: &CVec, v: &CVec, spec: &PartySpec, discard: &[usize]) -> BigRational {
    let kept: Vec<usize> = (0..spec.parties()).filter(|p| !discard.contains(p)).collect();
    let layout = GroupLayout::new(spec, &kept);
    let reduced = |w: &CVec| {
        let m = layout.matrix(w);
        m.mul(&m.adjoint()).expect("square")
    };
    let (ru, rv) = (reduced(u), reduced(v));
    let t: Scalar = ru.mul(&rv).expect("square").trace();
    debug_assert!(t.im().is_zero());
    t.re().clone()
}
