use std::collections::BTreeMap;

use crate::algebra::{CMat, CVec};
use crate::measure::{LocalPvm, Projector, Pvm};
use crate::states::{local_factors, StateSet};

use super::{LeafRule, ProtocolError, ProtocolTree};

fn factors_of(s: &StateSet) -> Result<Vec<Vec<CVec>>, ProtocolError> {
    s.states()
        .iter()
        .map(|st| {
            local_factors(&st.vector, s.spec())
                .ok_or_else(|| ProtocolError::NotProductForm(format!("state {} is entangled", st.label)))
        })
        .collect()
}

fn span_dim(vs: &[&CVec]) -> usize {
    let cols: Vec<CVec> = vs.iter().map(|v| (*v).clone()).collect();
    CMat::from_columns(&cols).map(|m| m.rank()).unwrap_or(0)
}

/// `mats` followed by the complement of their sum when it is nonzero.
fn complete(mats: Vec<CMat>, dim: usize) -> Result<Pvm, ProtocolError> {
    let mut rest = CMat::identity(dim);
    for m in &mats {
        rest = rest.sub(m).map_err(|e| ProtocolError::Internal(e.to_string()))?;
    }
    let mut all = mats;
    if !rest.is_zero() {
        all.push(rest);
    }
    Ok(Pvm::new(all)?)
}

fn node(s: &StateSet, party: usize, pvm: Pvm, children: BTreeMap<usize, ProtocolTree>) -> Result<ProtocolTree, ProtocolError> {
    let lp = LocalPvm::new(s.spec(), vec![party], pvm)?;
    Ok(ProtocolTree::Measure { lp, children })
}

/// Rank-1 identification of states whose factors on `party` are mutually orthogonal.
fn identify(s: &StateSet, idx: &[usize], factors: &[Vec<CVec>], party: usize) -> Result<ProtocolTree, ProtocolError> {
    if idx.len() == 1 {
        return Ok(ProtocolTree::identified(&s.states()[idx[0]].label));
    }
    let dim = s.spec().dims()[party];
    let mats = idx.iter().map(|&i| Projector::rank_one(&factors[i][party]).mat().clone()).collect();
    let pvm = complete(mats, dim)?;
    let children = idx.iter().enumerate().map(|(k, &i)| (k, ProtocolTree::identified(&s.states()[i].label))).collect();
    node(s, party, pvm, children)
}

/// Constructive protocol for orthogonal product states that are effectively `2⊗n`:
/// at most two parties have non-constant factors, and one of them ("Alice") has factors
/// spanning at most two dimensions. Alice-side factors are grouped into classes
/// `{α, α⊥}`; "Bob" first projects onto the span of each class's factors, Alice then
/// separates `α` from `α⊥`, and Bob finishes with rank-1 projectors.
pub fn lemma1_protocol(s: &StateSet) -> Result<ProtocolTree, ProtocolError> {
    if !s.is_orthogonal() {
        return Err(ProtocolError::Structure("set is not orthogonal".into()));
    }
    if s.len() <= 1 {
        return Ok(match s.states().first() {
            Some(st) => ProtocolTree::identified(&st.label),
            None => ProtocolTree::rule(LeafRule::SingleState),
        });
    }
    let factors = factors_of(s)?;
    let n = s.spec().parties();
    let spans: Vec<usize> = (0..n).map(|p| span_dim(&factors.iter().map(|f| &f[p]).collect::<Vec<_>>())).collect();
    let active: Vec<usize> = (0..n).filter(|&p| spans[p] >= 2).collect();
    let all: Vec<usize> = (0..s.len()).collect();
    match active.as_slice() {
        [] => Err(ProtocolError::Internal("distinct orthogonal states with constant factors".into())),
        [p] => identify(s, &all, &factors, *p),
        [p, q] => {
            let (x, y) = if spans[*p] <= 2 {
                (*p, *q)
            } else if spans[*q] <= 2 {
                (*q, *p)
            } else {
                return Err(ProtocolError::NotProductForm(format!(
                    "no active party with a two-dimensional factor span (spans {}, {})",
                    spans[*p], spans[*q]
                )));
            };
            lemma1_tree(s, &factors, x, y)
        }
        more => Err(ProtocolError::NotProductForm(format!("{} parties have non-constant factors", more.len()))),
    }
}

fn lemma1_tree(s: &StateSet, factors: &[Vec<CVec>], x: usize, y: usize) -> Result<ProtocolTree, ProtocolError> {
    // classes of Alice directions: representative plus (parallel, orthogonal) members
    let mut classes: Vec<(CVec, Vec<usize>, Vec<usize>)> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        let a = &f[x];
        let mut placed = false;
        for (rep, par, orth) in classes.iter_mut() {
            if a.is_parallel(rep) {
                par.push(i);
                placed = true;
            } else if rep.inner(a).expect("dim").is_zero() {
                orth.push(i);
                placed = true;
            }
            if placed {
                break;
            }
        }
        if !placed {
            classes.push((a.clone(), vec![i], vec![]));
        }
    }
    // Bob-side blocks must be mutually orthogonal across classes
    for (c1, (_, p1, o1)) in classes.iter().enumerate() {
        for (_, p2, o2) in classes.iter().skip(c1 + 1) {
            for &i in p1.iter().chain(o1) {
                for &j in p2.iter().chain(o2) {
                    if !factors[i][y].inner(&factors[j][y]).expect("dim").is_zero() {
                        return Err(ProtocolError::Structure(format!(
                            "states {} and {} lie in different Alice classes but overlap on Bob's side",
                            s.states()[i].label,
                            s.states()[j].label
                        )));
                    }
                }
            }
        }
    }
    let class_tree = |rep: &CVec, par: &[usize], orth: &[usize]| -> Result<ProtocolTree, ProtocolError> {
        if orth.is_empty() {
            return identify(s, par, factors, y);
        }
        let p = Projector::rank_one(rep).mat().clone();
        let pvm = complete(vec![p], s.spec().dims()[x])?;
        let children = BTreeMap::from([(0, identify(s, par, factors, y)?), (1, identify(s, orth, factors, y)?)]);
        node(s, x, pvm, children)
    };
    if classes.len() == 1 {
        let (rep, par, orth) = &classes[0];
        return class_tree(rep, par, orth);
    }
    let mut mats = Vec::new();
    let mut children = BTreeMap::new();
    for (k, (rep, par, orth)) in classes.iter().enumerate() {
        let block: Vec<CVec> = par.iter().chain(orth).map(|&i| factors[i][y].clone()).collect();
        mats.push(CMat::projector_onto(&block).map_err(|e| ProtocolError::Internal(e.to_string()))?);
        children.insert(k, class_tree(rep, par, orth)?);
    }
    let pvm = complete(mats, s.spec().dims()[y])?;
    node(s, y, pvm, children)
}

/// Protocol for three mutually orthogonal fully product states: some party holds
/// orthogonal factors for two of them; projecting onto one of those factors leaves at
/// most two orthogonal states in each outcome.
pub fn three_product_protocol(s: &StateSet) -> Result<ProtocolTree, ProtocolError> {
    if s.len() != 3 {
        return Err(ProtocolError::Structure(format!("expected three states, found {}", s.len())));
    }
    if !s.is_orthogonal() {
        return Err(ProtocolError::Structure("set is not orthogonal".into()));
    }
    let factors = factors_of(s)?;
    let n = s.spec().parties();
    for j in 0..n {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            if !factors[a][j].inner(&factors[b][j]).expect("dim").is_zero() {
                continue;
            }
            let p = Projector::rank_one(&factors[a][j]);
            let pvm = Pvm::binary(p)?;
            let lp = LocalPvm::new(s.spec(), vec![j], pvm)?;
            let mut children = BTreeMap::new();
            for br in crate::measure::apply(s, &lp)? {
                let leaf = match br.set.len() {
                    0 => continue,
                    1 => ProtocolTree::identified(&br.set.states()[0].label),
                    2 => ProtocolTree::rule(LeafRule::TwoOrthogonalStates),
                    _ => {
                        return Err(ProtocolError::Internal(format!(
                            "outcome {} kept all three states (states {} and {} separated on party {j})",
                            br.outcome, a, b
                        )))
                    }
                };
                children.insert(br.outcome, leaf);
            }
            return Ok(ProtocolTree::Measure { lp, children });
        }
    }
    Err(ProtocolError::Internal("no party separates any pair of orthogonal product states".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::execute_and_verify;

    #[test]
    fn two_state_diagonal() {
        let s = StateSet::from_kets(&[2, 2], &["00", "11"], "user").unwrap();
        let t = lemma1_protocol(&s).unwrap();
        assert!(execute_and_verify(&s, &t).unwrap().is_distinguishable());
    }

    #[test]
    fn lemma1_with_constant_party() {
        let s = StateSet::from_kets(&[3, 2, 3], &["2(0+1)2", "2(0-1)2", "(0+1)(0-1)2", "(0-1)(0-1)2"], "user").unwrap();
        let t = lemma1_protocol(&s).unwrap();
        let v = execute_and_verify(&s, &t).unwrap();
        assert_eq!(v.trace.len(), 4);
    }

    #[test]
    fn lemma1_rejects_entangled() {
        let s = StateSet::from_kets(&[2, 2], &["00+11", "00-11"], "user").unwrap();
        assert!(matches!(lemma1_protocol(&s), Err(ProtocolError::NotProductForm(_))));
    }

    #[test]
    fn three_product_small() {
        let s = StateSet::from_kets(&[2, 2], &["00", "11", "1(0+1)"], "user");
        // |11⟩ and |1⟩|0+1⟩ overlap, so use an orthogonal triple instead
        assert!(s.unwrap().check_mutual_orthogonality() != crate::states::Orthogonality::Ok);
        let s = StateSet::from_kets(&[2, 2], &["00", "10", "(0+1)1"], "user").unwrap();
        let t = three_product_protocol(&s).unwrap();
        assert!(execute_and_verify(&s, &t).unwrap().is_distinguishable());
    }
}
