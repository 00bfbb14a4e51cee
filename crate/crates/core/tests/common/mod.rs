//! Random generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use lpcc::algebra::{CMat, CVec, Scalar};
use lpcc::measure::{apply, LocalPvm, Pvm, Projector};
use lpcc::protocol::{leaf_sets, lemma1_protocol, Claim, LeafRule, ProtocolTree};
use lpcc::states::{LabeledState, Partition, PartySpec, StateSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(r: &mut impl Rng, bound: i64) -> Scalar {
    Scalar::from_gaussian(r.gen_range(-bound..=bound), r.gen_range(-bound..=bound))
}

pub fn nonzero_gauss(r: &mut impl Rng, bound: i64) -> Scalar {
    loop {
        let s = gauss(r, bound);
        if !s.is_zero() {
            return s;
        }
    }
}

fn real(x: num_rational::BigRational) -> Scalar {
    Scalar::real(x)
}

/// Replaces orthogonal `u, v` by `u + t·v` and `−t̄‖v‖²·u + ‖u‖²·v`, still orthogonal.
fn rotate(u: &CVec, v: &CVec, t: &Scalar) -> (CVec, CVec) {
    let a = u.add(&v.scale(t)).unwrap();
    let b = u.scale(&-&(&t.conj() * &real(v.norm_sqr()))).add(&v.scale(&real(u.norm_sqr()))).unwrap();
    (a, b)
}

/// Random orthogonal family spanning the same space as `basis` (which must be orthogonal).
pub fn mix(r: &mut impl Rng, basis: &[CVec], rounds: usize) -> Vec<CVec> {
    let mut out = basis.to_vec();
    for _ in 0..rounds {
        out.shuffle(r);
        let mut k = 0;
        while k + 1 < out.len() {
            if r.gen_bool(0.7) {
                let t = nonzero_gauss(r, 2);
                let (a, b) = rotate(&out[k], &out[k + 1], &t);
                out[k] = a;
                out[k + 1] = b;
            }
            k += 2;
        }
    }
    out
}

pub fn computational(n: usize) -> Vec<CVec> {
    (0..n).map(|k| CVec::basis(n, k)).collect()
}

pub fn orthogonal_basis(r: &mut impl Rng, n: usize) -> Vec<CVec> {
    mix(r, &computational(n), 1)
}

/// Direction `(1, t)` or a computational vector, with its orthogonal complement.
pub fn qubit_pair(r: &mut impl Rng) -> (CVec, CVec) {
    if r.gen_bool(0.2) {
        return (CVec::basis(2, 0), CVec::basis(2, 1));
    }
    let t = nonzero_gauss(r, 3);
    let a = CVec::new(vec![Scalar::one(), t.clone()]).unwrap();
    let b = CVec::new(vec![-&t.conj(), Scalar::one()]).unwrap();
    (a, b)
}

pub fn set_of(dims: &[usize], vectors: Vec<CVec>) -> StateSet {
    let spec = PartySpec::with_default_labels(dims.to_vec()).unwrap();
    let states = vectors
        .into_iter()
        .enumerate()
        .map(|(i, vector)| LabeledState { label: format!("s{i}"), vector })
        .collect();
    StateSet::new(spec, states, "random").unwrap()
}

/// Orthogonal product set in `2⊗n` built from classes `{α, α⊥}` of the qubit directions,
/// each class owning an orthogonal subspace of the second party.
pub fn structured_two_by_n(r: &mut impl Rng, n: usize) -> StateSet {
    loop {
        let basis = orthogonal_basis(r, n);
        let classes = r.gen_range(1..=n.min(3));
        let mut cuts: Vec<usize> = (1..n).collect();
        cuts.shuffle(r);
        let mut cuts: Vec<usize> = cuts.into_iter().take(classes - 1).collect();
        cuts.sort_unstable();
        cuts.insert(0, 0);
        cuts.push(n);
        let mut vectors = Vec::new();
        for w in cuts.windows(2) {
            let chunk = &basis[w[0]..w[1]];
            let (alpha, perp) = qubit_pair(r);
            for v in mix(r, chunk, 1) {
                if r.gen_bool(0.8) {
                    vectors.push(alpha.tensor(&v));
                }
            }
            for v in mix(r, chunk, 1) {
                if r.gen_bool(0.6) {
                    vectors.push(perp.tensor(&v));
                }
            }
        }
        if vectors.len() >= 3 {
            vectors.shuffle(r);
            return set_of(&[2, n], vectors);
        }
    }
}

/// Two orthogonal states on random dimensions.
pub fn random_two_states(r: &mut impl Rng) -> StateSet {
    let parties = r.gen_range(2..=3);
    let dims: Vec<usize> = (0..parties).map(|_| r.gen_range(2..=3)).collect();
    let total: usize = dims.iter().product();
    loop {
        let psi = CVec::new((0..total).map(|_| gauss(r, 2)).collect()).unwrap();
        let chi = CVec::new((0..total).map(|_| gauss(r, 2)).collect()).unwrap();
        if psi.is_zero() {
            continue;
        }
        let c = psi.inner(&chi).unwrap();
        let phi = chi.scale(&real(psi.norm_sqr())).sub(&psi.scale(&c)).unwrap();
        if !phi.is_zero() {
            return set_of(&dims, vec![psi, phi]);
        }
    }
}

/// Orthogonal set in `3⊗2⊗2` whose states factor as `A|BC`, with entangled BC parts
/// and two-dimensional local supports on B and C.
pub fn biseparable_3x2x2(r: &mut impl Rng) -> StateSet {
    loop {
        let a = orthogonal_basis(r, 3);
        let mut vectors = Vec::new();
        for alpha in &a {
            if !r.gen_bool(0.8) {
                continue;
            }
            let bc = mix(r, &computational(4), 2);
            for v in &bc {
                if r.gen_bool(0.6) {
                    vectors.push(alpha.tensor(v));
                }
            }
        }
        if vectors.len() < 3 {
            continue;
        }
        let s = set_of(&[3, 2, 2], vectors);
        let supports = s.local_supports();
        if supports[1].len() == 2 && supports[2].len() == 2 {
            return s;
        }
    }
}

/// A set on `group_dim ⊗ rest_dim` (group party placed first or second) for which the
/// rank-1 projector onto the returned direction preserves orthogonality by construction.
/// The direction always lies in the span the states occupy on the group.
pub fn planted(r: &mut impl Rng) -> (StateSet, usize, CVec) {
    loop {
        let (vectors, g, rest, theta) = planted_vectors(r);
        // slices (𝕀 ⊗ ⟨o|)ψ span the occupied group subspace
        let mut cols: Vec<CVec> = Vec::new();
        for v in &vectors {
            for o in 0..rest {
                let slice = CVec::new((0..g).map(|a| v.get(a * rest + o).clone()).collect()).unwrap();
                if !slice.is_zero() {
                    cols.push(slice);
                }
            }
        }
        let rank = CMat::from_columns(&cols).unwrap().rank();
        cols.push(theta.clone());
        if CMat::from_columns(&cols).unwrap().rank() != rank {
            continue;
        }
        let s = set_of(&[g, rest], vectors);
        return if r.gen_bool(0.5) { (s.permute_parties(&[1, 0]).unwrap(), 1, theta) } else { (s, 0, theta) };
    }
}

fn planted_vectors(r: &mut impl Rng) -> (Vec<CVec>, usize, usize, CVec) {
    let g = r.gen_range(2..=3);
    let rest = r.gen_range(2..=4);
    // orthogonal frame of the group space containing the planted direction
    let frame = mix(r, &computational(g), 2);
    let k = r.gen_range(2..=rest);
    let families: Vec<Vec<CVec>> = frame.iter().map(|_| orthogonal_basis(r, rest)).collect();
    let mut vectors = Vec::new();
    for i in 0..k {
        let mut v = CVec::zeros(g * rest);
        for (f, dir) in frame.iter().enumerate() {
            // the first state touches every frame direction so θ stays in the support
            if i == 0 || r.gen_bool(0.75) {
                v = v.add(&dir.tensor(&families[f][i].scale(&nonzero_gauss(r, 2)))).unwrap();
            }
        }
        if v.is_zero() {
            v = frame[0].tensor(&families[0][i]);
        }
        vectors.push(v);
    }
    (vectors, g, rest, frame[0].clone())
}

/// `⟨ψᵢ|(|θ⟩⟨θ| ⊗ 𝕀)|ψⱼ⟩ = 0` for all pairs, evaluated from amplitudes directly.
pub fn planted_oracle(s: &StateSet, party: usize, theta: &CVec) -> bool {
    let dims = s.spec().dims();
    let (d, other) = (dims[party], dims[1 - party]);
    // ⟨θ|ψ⟩ as a vector on the other party
    let contract = |v: &CVec| -> Vec<Scalar> {
        (0..other)
            .map(|o| {
                (0..d)
                    .map(|a| {
                        let idx = if party == 0 { a * other + o } else { o * d + a };
                        &theta.get(a).conj() * v.get(idx)
                    })
                    .sum()
            })
            .collect()
    };
    let c: Vec<Vec<Scalar>> = s.vectors().iter().map(|v| contract(v)).collect();
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let ip: Scalar = c[i].iter().zip(&c[j]).map(|(x, y)| &x.conj() * y).sum();
            if !ip.is_zero() {
                return false;
            }
        }
    }
    true
}

/// Random PVM on a group of dimension `d`: a random orthogonal basis cut into blocks.
pub fn random_pvm(r: &mut impl Rng, d: usize) -> Pvm {
    let basis = orthogonal_basis(r, d);
    let blocks = r.gen_range(1..=d);
    let mut mats = vec![Vec::new(); blocks];
    for (k, v) in basis.into_iter().enumerate() {
        let b = if k < blocks { k } else { r.gen_range(0..blocks) };
        mats[b].push(v);
    }
    Pvm::from_projectors(mats.iter().map(|vs| Projector::onto(vs).unwrap()).collect()).unwrap()
}

/// Random set of random (not necessarily orthogonal) vectors on random dimensions.
pub fn random_set(r: &mut impl Rng) -> StateSet {
    let parties = r.gen_range(2..=3);
    let dims: Vec<usize> = (0..parties).map(|_| r.gen_range(2..=3)).collect();
    let total: usize = dims.iter().product();
    let n = r.gen_range(1..=4);
    let vectors = (0..n)
        .map(|_| loop {
            let v = CVec::new((0..total).map(|_| if r.gen_bool(0.5) { gauss(r, 2) } else { Scalar::zero() }).collect()).unwrap();
            if !v.is_zero() {
                break v;
            }
        })
        .collect();
    set_of(&dims, vectors)
}

pub fn random_partition(r: &mut impl Rng, n: usize) -> Partition {
    let all = Partition::all_with_blocks(n, r.gen_range(1..=n));
    all[r.gen_range(0..all.len())].clone()
}

/// Σₖ‖Pₖψ‖² = ‖ψ‖² for every state, exactly.
pub fn norm_conserved(r: &mut impl Rng) -> bool {
    let s = random_set(r);
    let n = s.spec().parties();
    let mut group: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
    if group.is_empty() {
        group.push(r.gen_range(0..n));
    }
    let lp = LocalPvm::new(s.spec(), group.clone(), random_pvm(r, s.spec().group_dim(&group))).unwrap();
    let branches = apply(&s, &lp).unwrap();
    s.states().iter().all(|st| {
        let total = branches
            .iter()
            .filter_map(|b| b.set.states().iter().find(|x| x.label == st.label))
            .map(|x| x.vector.norm_sqr())
            .fold(num_rational::BigRational::from_integer(0.into()), |a, b| a + b);
        total == st.vector.norm_sqr()
    })
}

/// Merging parties into blocks preserves every inner product.
pub fn merge_invariant(r: &mut impl Rng) -> bool {
    let s = random_set(r);
    let p = random_partition(r, s.spec().parties());
    let m = s.merge_parties(&p).unwrap();
    let (a, b) = (s.vectors(), m.vectors());
    (0..a.len()).all(|i| (0..a.len()).all(|j| a[i].inner(a[j]).unwrap() == b[i].inner(b[j]).unwrap()))
}

/// Leaves of a verified protocol cover every label, and identified leaves hold
/// exactly their own state.
pub fn labels_partitioned(s: &StateSet, t: &ProtocolTree) -> bool {
    let Ok(leaves) = leaf_sets(s, t) else { return false };
    let mut seen: Vec<String> = Vec::new();
    for (_, set, claim) in &leaves {
        let labels = set.labels();
        if labels.iter().any(|l| !s.labels().contains(l)) {
            return false;
        }
        if let Claim::Identified(l) = claim {
            if labels.len() > 1 || labels.first().is_some_and(|x| x != l) {
                return false;
            }
        }
        seen.extend(labels);
    }
    s.labels().iter().all(|l| seen.contains(l))
}

/// Independent execution of a tree: every node is a PVM applied to its set, every
/// branch stays orthogonal, every identified leaf holds one state and rule leaves meet
/// their preconditions.
pub fn walk_identifies(s: &StateSet, t: &ProtocolTree) -> bool {
    match t {
        ProtocolTree::Leaf(Claim::Identified(l)) => s.len() <= 1 && s.labels().iter().all(|x| x == l),
        ProtocolTree::Leaf(Claim::DistinguishableBy(rule)) => match rule {
            LeafRule::SingleState => s.len() <= 1,
            // two orthogonal pure states are always locally distinguishable
            LeafRule::TwoOrthogonalStates => {
                let v = s.vectors();
                v.len() <= 2 && (v.len() < 2 || v[0].inner(v[1]).unwrap().is_zero())
            }
            LeafRule::ExplicitSubtree(t) => walk_identifies(s, t),
            LeafRule::ThreeProduct => s.len() <= 3 && s.vectors().iter().all(|v| is_full_product(v, s.spec().dims())),
            // the constructed tree is walked like any other
            LeafRule::Lemma1TwoByN => lemma1_protocol(s).is_ok_and(|t| walk_identifies(s, &t)),
        },
        ProtocolTree::Measure { lp, children } => {
            let Ok(bs) = apply(s, lp) else { return false };
            bs.iter().all(|b| {
                let v = b.set.vectors();
                let orth = (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i].inner(v[j]).unwrap().is_zero()));
                orth && (b.set.is_empty() || children.get(&b.outcome).is_some_and(|c| walk_identifies(&b.set, c)))
            })
        }
    }
}

/// Rank 1 across every single-party cut.
pub fn is_full_product(v: &CVec, dims: &[usize]) -> bool {
    let total: usize = dims.iter().product();
    (0..dims.len()).all(|p| {
        let inner: usize = dims[p + 1..].iter().product();
        let rest = total / dims[p];
        let rows = (0..dims[p])
            .map(|a| {
                (0..rest)
                    .map(|o| {
                        let (hi, lo) = (o / inner, o % inner);
                        v.get((hi * dims[p] + a) * inner + lo).clone()
                    })
                    .collect()
            })
            .collect();
        CMat::from_rows(rows).unwrap().rank() <= 1
    })
}

pub fn matrix_is_projector(m: &CMat) -> bool {
    m.is_hermitian() && m.is_idempotent()
}
