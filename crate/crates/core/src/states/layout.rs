use crate::algebra::{CMat, CVec, Scalar};

use super::{digits_of, PartySpec};

/// Index bookkeeping for viewing a state as a `d_group × d_rest` matrix.
///
/// Group parties keep their relative order, as do the remaining parties, so the
/// group index of `|i₁…iₙ⟩` is the flattened digits of the group members.
#[derive(Clone, Debug)]
pub struct GroupLayout {
    group: Vec<usize>,
    rest: Vec<usize>,
    group_dim: usize,
    rest_dim: usize,
    to_pair: Vec<(usize, usize)>,
    to_flat: Vec<usize>,
}

impl GroupLayout {
    pub fn new(spec: &PartySpec, group: &[usize]) -> Self {
        let dims = spec.dims();
        let rest: Vec<usize> = (0..dims.len()).filter(|p| !group.contains(p)).collect();
        let group_dim = spec.group_dim(group);
        let rest_dim = spec.group_dim(&rest);
        let total = spec.total_dim();
        let mut to_pair = Vec::with_capacity(total);
        let mut to_flat = vec![0; total];
        for f in 0..total {
            let d = digits_of(f, dims);
            let a = group.iter().fold(0, |acc, &p| acc * dims[p] + d[p]);
            let r = rest.iter().fold(0, |acc, &p| acc * dims[p] + d[p]);
            to_pair.push((a, r));
            to_flat[a * rest_dim + r] = f;
        }
        GroupLayout { group: group.to_vec(), rest, group_dim, rest_dim, to_pair, to_flat }
    }

    pub fn group(&self) -> &[usize] {
        &self.group
    }

    pub fn rest(&self) -> &[usize] {
        &self.rest
    }

    pub fn group_dim(&self) -> usize {
        self.group_dim
    }

    pub fn rest_dim(&self) -> usize {
        self.rest_dim
    }

    pub fn pair(&self, flat: usize) -> (usize, usize) {
        self.to_pair[flat]
    }

    pub fn flat(&self, a: usize, r: usize) -> usize {
        self.to_flat[a * self.rest_dim + r]
    }

    /// Nonzero entries `(a, r, amplitude)` of the reshaped state.
    pub fn sparse_view(&self, v: &CVec) -> Vec<(usize, usize, Scalar)> {
        v.nonzeros().map(|(f, x)| {
            let (a, r) = self.to_pair[f];
            (a, r, x.clone())
        }).collect()
    }

    /// The state as a dense `d_group × d_rest` matrix.
    pub fn matrix(&self, v: &CVec) -> CMat {
        let mut m = CMat::zeros(self.group_dim, self.rest_dim);
        for (f, x) in v.nonzeros() {
            let (a, r) = self.to_pair[f];
            m.set(a, r, x.clone());
        }
        m
    }

    /// `(op ⊗ 𝕀_rest)|v⟩` without forming the global operator.
    pub fn apply(&self, op: &CMat, v: &CVec) -> CVec {
        let mut out = vec![Scalar::zero(); v.dim()];
        for (f, x) in v.nonzeros() {
            let (b, r) = self.to_pair[f];
            for a in 0..self.group_dim {
                let p = op.get(a, b);
                if !p.is_zero() {
                    out[self.flat(a, r)] += &(p * x);
                }
            }
        }
        CVec::new(out).expect("non-empty")
    }

    /// `C[a][b] = ⟨u|(|a⟩⟨b| ⊗ 𝕀)|v⟩ = Σ_r conj(u[a,r])·v[b,r]`.
    pub fn cross_matrix(&self, u: &CVec, v: &CVec) -> CMat {
        let mut by_rest: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.rest_dim];
        for (f, x) in v.nonzeros() {
            let (b, r) = self.to_pair[f];
            by_rest[r].push((b, x.clone()));
        }
        let mut c = CMat::zeros(self.group_dim, self.group_dim);
        for (f, x) in u.nonzeros() {
            let (a, r) = self.to_pair[f];
            let xc = x.conj();
            for (b, y) in &by_rest[r] {
                let cur = c.get(a, *b) + &(&xc * y);
                c.set(a, *b, cur);
            }
        }
        c
    }

    /// Embeds a group operator as `op ⊗ 𝕀_rest` on the full space (dense).
    pub fn embed(&self, op: &CMat) -> CMat {
        let total = self.to_pair.len();
        let mut m = CMat::zeros(total, total);
        for f in 0..total {
            let (b, r) = self.to_pair[f];
            for a in 0..self.group_dim {
                let p = op.get(a, b);
                if !p.is_zero() {
                    m.set(self.flat(a, r), f, p.clone());
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ket::parse_ket;

    #[test]
    fn cross_matrix_matches_definition() {
        let spec = PartySpec::with_default_labels(vec![3, 2, 3]).unwrap();
        let u = parse_ket("0(00+01+10-11)", spec.dims()).unwrap();
        let v = parse_ket("(0+1)(02-12)", spec.dims()).unwrap();
        let layout = GroupLayout::new(&spec, &[2]);
        let c = layout.cross_matrix(&u, &v);
        for a in 0..3 {
            for b in 0..3 {
                let mut e = CMat::zeros(3, 3);
                e.set(a, b, Scalar::one());
                let direct = u.inner(&layout.apply(&e, &v)).unwrap();
                assert_eq!(&direct, c.get(a, b));
            }
        }
    }

    #[test]
    fn embed_matches_apply() {
        let spec = PartySpec::with_default_labels(vec![2, 3]).unwrap();
        let layout = GroupLayout::new(&spec, &[1]);
        let op = CMat::from_int_rows(&[&[1, 0, 1], &[0, 0, 0], &[1, 0, 1]]).unwrap();
        let v = parse_ket("0(0+2)+1(1-2)", spec.dims()).unwrap();
        assert_eq!(layout.embed(&op).mul_vec(&v).unwrap(), layout.apply(&op, &v));
    }
}
