use crate::algebra::{CVec, Scalar};
use crate::states::{build_named_set, local_factors, NamedSet, StateSet};

/// Relabeling that maps a bipartite set onto the domino set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominoWitness {
    /// `bases[p][k]` is the support vector of party `p` that plays the abstract `|k⟩`.
    pub bases: [Vec<CVec>; 2],
    /// The match uses the domino set with its two parties exchanged.
    pub transposed: bool,
    /// `permutation[i]` is the domino state matched by state `i`.
    pub permutation: Vec<usize>,
}

impl DominoWitness {
    /// Whether party `p`'s support basis equals `basis` as a set of directions.
    pub fn basis_matches(&self, p: usize, basis: &[CVec]) -> bool {
        basis.len() == self.bases[p].len() && basis.iter().all(|b| self.bases[p].iter().any(|u| u.is_parallel(b)))
    }
}

fn domino_targets() -> [Vec<CVec>; 2] {
    let d = build_named_set(NamedSet::Domino, None).expect("built-in set");
    let direct: Vec<CVec> = d.vectors().iter().map(|v| v.canonical()).collect();
    let swapped = d.permute_parties(&[1, 0]).expect("two parties");
    let transposed = swapped.vectors().iter().map(|v| v.canonical()).collect();
    [direct, transposed]
}

/// Coordinates of `f` in the orthogonal family `basis`, if `f` lies in its span.
fn coordinates(f: &CVec, basis: &[CVec]) -> Option<CVec> {
    let mut coords = Vec::with_capacity(basis.len());
    let mut rebuilt = CVec::zeros(f.dim());
    for u in basis {
        let c = &u.inner(f).ok()? / &Scalar::real(u.norm_sqr());
        rebuilt = rebuilt.add(&u.scale(&c)).ok()?;
        coords.push(c);
    }
    (rebuilt == *f).then(|| CVec::new(coords).expect("three coordinates"))
}

/// Ordered mutually orthogonal triples drawn from the distinct factor directions.
fn candidate_bases(factors: &[&CVec]) -> Vec<Vec<CVec>> {
    let mut dirs: Vec<CVec> = Vec::new();
    for f in factors {
        let c = f.canonical();
        if !dirs.contains(&c) {
            dirs.push(c);
        }
    }
    let orth = |a: &CVec, b: &CVec| a.inner(b).map(|x| x.is_zero()).unwrap_or(false);
    let mut out = Vec::new();
    for i in 0..dirs.len() {
        for j in 0..dirs.len() {
            if i == j || !orth(&dirs[i], &dirs[j]) {
                continue;
            }
            for k in 0..dirs.len() {
                if k == i || k == j || !orth(&dirs[i], &dirs[k]) || !orth(&dirs[j], &dirs[k]) {
                    continue;
                }
                out.push(vec![dirs[i].clone(), dirs[j].clone(), dirs[k].clone()]);
            }
        }
    }
    out
}

/// Looks for per-party support bases (drawn from the states' own factor directions)
/// under which the set becomes the domino set, up to state order and nonzero scalars.
pub fn domino_match(s: &StateSet) -> Option<DominoWitness> {
    if s.spec().parties() != 2 || s.len() != 9 {
        return None;
    }
    let factors: Vec<Vec<CVec>> = s.vectors().iter().map(|v| local_factors(v, s.spec())).collect::<Option<_>>()?;
    let targets = domino_targets();
    // per party: candidate basis with the coordinates of every state's factor
    let mut options: [Vec<(Vec<CVec>, Vec<CVec>)>; 2] = [Vec::new(), Vec::new()];
    for (p, opts) in options.iter_mut().enumerate() {
        let fs: Vec<&CVec> = factors.iter().map(|f| &f[p]).collect();
        for basis in candidate_bases(&fs) {
            let coords: Option<Vec<CVec>> = fs.iter().map(|f| coordinates(f, &basis)).collect();
            if let Some(c) = coords {
                opts.push((basis, c));
            }
        }
    }
    for (ba, ca) in &options[0] {
        for (bb, cb) in &options[1] {
            let mapped: Vec<CVec> =
                ca.iter().zip(cb).map(|(x, y)| x.tensor(y).canonical()).collect();
            for (t, target) in targets.iter().enumerate() {
                let mut permutation = Vec::with_capacity(9);
                for m in &mapped {
                    match target.iter().position(|x| x == m) {
                        Some(k) if !permutation.contains(&k) => permutation.push(k),
                        _ => break,
                    }
                }
                if permutation.len() == 9 {
                    return Some(DominoWitness { bases: [ba.clone(), bb.clone()], transposed: t == 1, permutation });
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domino_matches_itself() {
        let d = build_named_set(NamedSet::Domino, None).unwrap();
        let w = domino_match(&d).unwrap();
        let e: Vec<CVec> = (0..3).map(|k| CVec::basis(3, k)).collect();
        assert!(w.basis_matches(0, &e) && w.basis_matches(1, &e));
    }

    #[test]
    fn scaled_and_shuffled_still_match() {
        let d = build_named_set(NamedSet::Domino, None).unwrap();
        let mut idx: Vec<usize> = (0..9).rev().collect();
        idx.swap(0, 4);
        let shuffled = d.subset(&idx);
        let scaled = StateSet::new(
            shuffled.spec().clone(),
            shuffled
                .states()
                .iter()
                .enumerate()
                .map(|(k, st)| crate::states::LabeledState {
                    label: st.label.clone(),
                    vector: st.vector.scale(&Scalar::from_int(k as i64 + 2)),
                })
                .collect(),
            "user",
        )
        .unwrap();
        assert!(domino_match(&scaled).is_some());
    }

    #[test]
    fn computational_basis_does_not_match() {
        let kets: Vec<String> = (0..9).map(|k| format!("{}{}", k / 3, k % 3)).collect();
        let refs: Vec<&str> = kets.iter().map(String::as_str).collect();
        let s = StateSet::from_kets(&[3, 3], &refs, "user").unwrap();
        assert!(domino_match(&s).is_none());
    }
}
