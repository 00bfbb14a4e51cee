use crate::algebra::{CMat, Scalar};
use crate::states::StateSet;

use super::GroupSystem;

/// Real vector space of Hermitian operators on the occupied group subspace whose
/// compression preserves every pairwise orthogonality.
///
/// The compression of the identity always belongs to it; when that is all
/// (`dim == 1`), every orthogonality-preserving measurement on the group (projective or
/// not) acts on the set as a multiple of the identity in each outcome.
#[derive(Clone, Debug)]
pub struct OperatorSpace {
    pub group: Vec<usize>,
    pub support_dim: usize,
    pub dim: usize,
    /// Hermitian basis `F` in support coordinates: the operator is `B·F·B†`.
    pub basis: Vec<CMat>,
}

impl OperatorSpace {
    pub fn is_trivial(&self) -> bool {
        self.dim <= 1
    }
}

pub fn op_operator_space(s: &StateSet, group: &[usize]) -> OperatorSpace {
    let sys = GroupSystem::new(s, group);
    operator_space_of(&sys)
}

pub(crate) fn operator_space_of(sys: &GroupSystem) -> OperatorSpace {
    let w = sys.support_dim();
    let n = w * w;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for d in &sys.forms {
        let mut re = vec![Scalar::zero(); n];
        let mut im = vec![Scalar::zero(); n];
        for k in 0..w {
            for l in 0..w {
                let coef_pairs: Vec<(usize, Scalar)> = if k == l {
                    vec![(k * w + k, d.get(k, k).clone())]
                } else {
                    let (a, b) = (k.min(l), k.max(l));
                    // F[a][b] = z_ab + i z_ba, F[b][a] = z_ab − i z_ba
                    let sign = if k < l { Scalar::i() } else { -Scalar::i() };
                    vec![(a * w + b, d.get(k, l).clone()), (b * w + a, &sign * d.get(k, l))]
                };
                for (idx, c) in coef_pairs {
                    re[idx] += &Scalar::real(c.re().clone());
                    im[idx] += &Scalar::real(c.im().clone());
                }
            }
        }
        if re.iter().any(|x| !x.is_zero()) {
            rows.push(re);
        }
        if im.iter().any(|x| !x.is_zero()) {
            rows.push(im);
        }
    }
    let null = if rows.is_empty() {
        (0..n).map(|i| crate::algebra::CVec::basis(n, i)).collect()
    } else {
        CMat::from_rows(rows).expect("rectangular").nullspace()
    };
    let basis = null
        .iter()
        .map(|z| {
            let mut f = CMat::zeros(w, w);
            for k in 0..w {
                f.set(k, k, z.get(k * w + k).clone());
                for l in k + 1..w {
                    let re = z.get(k * w + l);
                    let im = z.get(l * w + k);
                    let up = re + &(&Scalar::i() * im);
                    f.set(k, l, up.clone());
                    f.set(l, k, up.conj());
                }
            }
            f
        })
        .collect::<Vec<_>>();
    OperatorSpace { group: sys.group.clone(), support_dim: w, dim: basis.len(), basis }
}
