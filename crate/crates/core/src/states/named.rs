use std::fmt;
use std::str::FromStr;

use crate::algebra::CVec;
use crate::ket::parse_ket;

use super::{LabeledState, PartySpec, StateError, StateSet};

/// The built-in state families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedSet {
    S1,
    S2,
    S2Prime,
    S2DoublePrime,
    S1m,
    S2m,
    Domino,
    UnionS,
}

impl NamedSet {
    pub const ALL: [NamedSet; 8] = [
        NamedSet::S1,
        NamedSet::S2,
        NamedSet::S2Prime,
        NamedSet::S2DoublePrime,
        NamedSet::S1m,
        NamedSet::S2m,
        NamedSet::Domino,
        NamedSet::UnionS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedSet::S1 => "S1",
            NamedSet::S2 => "S2",
            NamedSet::S2Prime => "S2prime",
            NamedSet::S2DoublePrime => "S2doubleprime",
            NamedSet::S1m => "S1m",
            NamedSet::S2m => "S2m",
            NamedSet::Domino => "Domino",
            NamedSet::UnionS => "UnionS",
        }
    }

    pub fn takes_m(self) -> bool {
        matches!(self, NamedSet::S1m | NamedSet::S2m)
    }
}

impl fmt::Display for NamedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedSet {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| !matches!(c, '_' | '-' | ' ')).collect::<String>().to_lowercase();
        Ok(match key.as_str() {
            "s1" => NamedSet::S1,
            "s2" => NamedSet::S2,
            "s2prime" | "s2'" | "s2p" => NamedSet::S2Prime,
            "s2doubleprime" | "s2''" | "s2pp" => NamedSet::S2DoublePrime,
            "s1m" => NamedSet::S1m,
            "s2m" => NamedSet::S2m,
            "domino" | "bennett" => NamedSet::Domino,
            "unions" | "union" => NamedSet::UnionS,
            _ => return Err(StateError::InvalidParameter(format!("unknown set name {s:?}"))),
        })
    }
}

const S1_KETS: [&str; 9] = [
    "0(00+01+10-11)",
    "0(00-01-10-11)",
    "1(01-11)",
    "2(01+02+11-12)",
    "2(01-02-11-12)",
    "(0+1)(02-12)",
    "(0-1)(02-12)",
    "(1+2)(00-10)",
    "(1-2)(00-10)",
];

const S2_KETS: [&str; 9] = [
    "0(00+01+02-12)",
    "0(00-01-02-12)",
    "1(02-12)",
    "2(10+11+12-02)",
    "2(10-11-12-02)",
    "(0+1)(10-11)",
    "(0-1)(10-11)",
    "(1+2)(00-01)",
    "(1-2)(00-01)",
];

/// Written as `|B⟩|C A⟩` with the global 8-level indices.
const S2_PRIME_KETS: [&str; 9] = [
    "2(33+34+35-45)",
    "2(33-34-35-45)",
    "3(35-45)",
    "4(43+44+45-35)",
    "4(43-44-45-35)",
    "(2+3)(43-44)",
    "(2-3)(43-44)",
    "(3+4)(33-34)",
    "(3-4)(33-34)",
];

/// Written as `|C⟩|A B⟩` with the global 8-level indices.
const S2_DOUBLE_PRIME_KETS: [&str; 9] = [
    "5(65+66+67-77)",
    "5(65-66-67-77)",
    "6(67-77)",
    "7(75+76+77-67)",
    "7(75-76-77-67)",
    "(5+6)(75-76)",
    "(5-6)(75-76)",
    "(6+7)(65-66)",
    "(6-7)(65-66)",
];

const DOMINO_KETS: [&str; 9] = ["0(0+1)", "0(0-1)", "(0+1)2", "(0-1)2", "(1+2)0", "(1-2)0", "2(1+2)", "2(1-2)", "11"];

const S2_PRIME_LEVELS: [&[usize]; 3] = [&[3, 4, 5], &[2, 3, 4], &[3, 4]];
const S2_DOUBLE_PRIME_LEVELS: [&[usize]; 3] = [&[6, 7], &[5, 6, 7], &[5, 6, 7]];

fn from_kets(dims: &[usize], prefix: &str, kets: &[&str], provenance: &str) -> Result<StateSet, StateError> {
    let spec = PartySpec::with_default_labels(dims.to_vec())?;
    let states = kets
        .iter()
        .enumerate()
        .map(|(i, k)| Ok(LabeledState { label: format!("{prefix}{}", i + 1), vector: parse_ket(k, dims)? }))
        .collect::<Result<Vec<_>, StateError>>()?;
    StateSet::new(spec, states, provenance)
}

fn s2_prime_global() -> Result<StateSet, StateError> {
    // parsed in party order (B, C, A), then reordered to (A, B, C)
    let raw = from_kets(&[8, 8, 8], "psi", &S2_PRIME_KETS, "S2prime")?;
    let s = raw.permute_parties(&[2, 0, 1])?;
    relabel_abc(s)
}

fn s2_double_prime_global() -> Result<StateSet, StateError> {
    let raw = from_kets(&[8, 8, 8], "eta", &S2_DOUBLE_PRIME_KETS, "S2doubleprime")?;
    let s = raw.permute_parties(&[1, 2, 0])?;
    relabel_abc(s)
}

fn relabel_abc(s: StateSet) -> Result<StateSet, StateError> {
    let spec = PartySpec::with_default_labels(s.spec().dims().to_vec())?;
    StateSet::new(spec, s.states().to_vec(), s.provenance().to_string())
}

fn levels(src: [&[usize]; 3]) -> Vec<Vec<usize>> {
    src.iter().map(|l| l.to_vec()).collect()
}

fn basis(d: usize, i: usize) -> CVec {
    CVec::basis(d, i)
}

fn product(a: CVec, b: CVec, c: CVec) -> CVec {
    a.tensor(&b).tensor(&c)
}

fn plus(u: &CVec, v: &CVec) -> CVec {
    u.add(v).expect("same dimension")
}

fn minus(u: &CVec, v: &CVec) -> CVec {
    u.sub(v).expect("same dimension")
}

/// The `3⊗2⊗3`-generalizing family in `(2m+1)⊗2⊗(2m+1)`.
fn s1m(m: usize) -> Result<StateSet, StateError> {
    let d = 2 * m + 1;
    let a = |i| basis(d, i);
    let c = |i| basis(d, i);
    let p = CVec::from_ints(&[1, 1]);
    let q = CVec::from_ints(&[1, -1]);
    let mut out = vec![product(a(m), q.clone(), c(m))];
    for i in 0..m {
        for k in 0..(m - i) {
            let c0 = i + 2 * k;
            out.push(plus(&product(a(i), p.clone(), c(c0)), &product(a(i), q.clone(), c(c0 + 1))));
            out.push(minus(&product(a(i), q.clone(), c(c0)), &product(a(i), p.clone(), c(c0 + 1))));
            out.push(plus(&product(a(2 * m - i), p.clone(), c(c0 + 1)), &product(a(2 * m - i), q.clone(), c(c0 + 2))));
            out.push(minus(&product(a(2 * m - i), q.clone(), c(c0 + 1)), &product(a(2 * m - i), p.clone(), c(c0 + 2))));
            for sign in [1i64, -1] {
                let s = crate::algebra::Scalar::from_int(sign);
                out.push(product(plus(&a(c0 + 1), &a(c0 + 2).scale(&s)), q.clone(), c(i)));
                out.push(product(plus(&a(c0), &a(c0 + 1).scale(&s)), q.clone(), c(2 * m - i)));
            }
        }
    }
    labeled(vec![d, 2, d], "xi", out, format!("S1m(m={m})"))
}

/// The family generalizing `S2` in `(2m+1)⊗2⊗(2m+1)`; `[x]` in the index bounds is floor.
fn s2m(m: usize) -> Result<StateSet, StateError> {
    let d = 2 * m + 1;
    let a = |i| basis(d, i);
    let c = |i| basis(d, i);
    let b = |i| basis(2, i);
    let mut out = vec![product(a(m), CVec::from_ints(&[1, -1]), c(2 * m))];
    let block4 = |c0: usize| {
        let pl = minus(&plus(&plus(&c(c0), &c(c0 + 1)), &c(c0 + 2)), &c(c0 + 3));
        let mi = minus(&minus(&minus(&c(c0), &c(c0 + 1)), &c(c0 + 2)), &c(c0 + 3));
        (pl, mi)
    };
    for i in 0..m {
        // u = |1⟩ when m+i is even, |0⟩ otherwise; ū is the other level
        let (u, ub) = if (m + i).is_multiple_of(2) { (b(1), b(0)) } else { (b(0), b(1)) };
        let top = plus(&plus(&c(2 * m - 2), &c(2 * m - 1)), &c(2 * m));
        let bot = minus(&minus(&c(2 * m - 2), &c(2 * m - 1)), &c(2 * m));
        out.push(minus(&product(a(i), u.clone(), top.clone()), &product(a(i), ub.clone(), c(2 * m))));
        out.push(minus(&product(a(i), u.clone(), bot.clone()), &product(a(i), ub.clone(), c(2 * m))));
        out.push(minus(&product(a(2 * m - i), ub.clone(), top), &product(a(2 * m - i), u.clone(), c(2 * m))));
        out.push(minus(&product(a(2 * m - i), ub.clone(), bot), &product(a(2 * m - i), u.clone(), c(2 * m))));
        for k in 0..(2 * m - 2 * i) {
            let bk = if k % 2 == 0 { b(1) } else { b(0) };
            for sign in [1i64, -1] {
                let s = crate::algebra::Scalar::from_int(sign);
                out.push(product(plus(&a(i + k), &a(i + k + 1).scale(&s)), bk.clone(), minus(&c(2 * i), &c(2 * i + 1))));
            }
        }
        if m >= 2 {
            for k1 in 0..(m - i) / 2 {
                let (pl, mi) = block4(2 * i + 4 * k1);
                out.push(product(a(i), b(0), pl.clone()));
                out.push(product(a(i), b(0), mi.clone()));
                out.push(product(a(2 * m - i), b(1), pl));
                out.push(product(a(2 * m - i), b(1), mi));
            }
        }
        if m >= 3 {
            for k2 in 0..(m - i - 1) / 2 {
                let (pl, mi) = block4(2 * i + 4 * k2 + 2);
                out.push(product(a(i), b(1), pl.clone()));
                out.push(product(a(i), b(1), mi.clone()));
                out.push(product(a(2 * m - i), b(0), pl));
                out.push(product(a(2 * m - i), b(0), mi));
            }
        }
    }
    labeled(vec![d, 2, d], "zeta", out, format!("S2m(m={m})"))
}

fn labeled(dims: Vec<usize>, prefix: &str, vectors: Vec<CVec>, provenance: String) -> Result<StateSet, StateError> {
    let spec = PartySpec::with_default_labels(dims)?;
    let states = vectors
        .into_iter()
        .enumerate()
        .map(|(i, v)| LabeledState { label: format!("{prefix}{}", i + 1), vector: v })
        .collect();
    StateSet::new(spec, states, provenance)
}

/// Builds one of the built-in sets. `m` is required (and must be ≥ 1) for the families.
pub fn build_named_set(name: NamedSet, m: Option<usize>) -> Result<StateSet, StateError> {
    if name.takes_m() {
        match m {
            Some(m) if m >= 1 => {}
            Some(_) => return Err(StateError::InvalidParameter("m must be at least 1".into())),
            None => return Err(StateError::InvalidParameter(format!("{name} requires m"))),
        }
    } else if m.is_some() {
        return Err(StateError::InvalidParameter(format!("{name} takes no m")));
    }
    match name {
        NamedSet::S1 => from_kets(&[3, 2, 3], "phi", &S1_KETS, "S1"),
        NamedSet::S2 => from_kets(&[3, 2, 3], "phi", &S2_KETS, "S2"),
        NamedSet::S2Prime => {
            Ok(s2_prime_global()?.restrict_levels(&levels(S2_PRIME_LEVELS))?.with_provenance("S2prime"))
        }
        NamedSet::S2DoublePrime => Ok(s2_double_prime_global()?
            .restrict_levels(&levels(S2_DOUBLE_PRIME_LEVELS))?
            .with_provenance("S2doubleprime")),
        NamedSet::S1m => s1m(m.expect("checked")),
        NamedSet::S2m => s2m(m.expect("checked")),
        NamedSet::Domino => from_kets(&[3, 3], "d", &DOMINO_KETS, "Domino"),
        NamedSet::UnionS => {
            let s2 = from_kets(&[3, 2, 3], "phi", &S2_KETS, "S2")?
                .embed_levels(&[8, 8, 8], &[vec![0, 1, 2], vec![0, 1], vec![0, 1, 2]])?;
            StateSet::union(&[s2, s2_prime_global()?, s2_double_prime_global()?], "UnionS")
        }
    }
}

/// Per-party level ranges of the three constituents inside the `8⊗8⊗8` union.
pub fn union_embedding_levels() -> [Vec<Vec<usize>>; 3] {
    [vec![vec![0, 1, 2], vec![0, 1], vec![0, 1, 2]], levels(S2_PRIME_LEVELS), levels(S2_DOUBLE_PRIME_LEVELS)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_dims() {
        let s1 = build_named_set(NamedSet::S1, None).unwrap();
        assert_eq!((s1.len(), s1.spec().dims().to_vec()), (9, vec![3, 2, 3]));
        let sp = build_named_set(NamedSet::S2Prime, None).unwrap();
        assert_eq!(sp.spec().dims(), &[3, 3, 2]);
        let spp = build_named_set(NamedSet::S2DoublePrime, None).unwrap();
        assert_eq!(spp.spec().dims(), &[2, 3, 3]);
        let u = build_named_set(NamedSet::UnionS, None).unwrap();
        assert_eq!((u.len(), u.spec().total_dim()), (27, 512));
    }

    #[test]
    fn families_reduce_at_m_one() {
        let s1 = build_named_set(NamedSet::S1, None).unwrap();
        assert!(build_named_set(NamedSet::S1m, Some(1)).unwrap().equivalent_up_to_scalars(&s1));
        let s2 = build_named_set(NamedSet::S2, None).unwrap();
        assert!(build_named_set(NamedSet::S2m, Some(1)).unwrap().equivalent_up_to_scalars(&s2));
    }

    #[test]
    fn m_validation() {
        assert!(build_named_set(NamedSet::S1m, None).is_err());
        assert!(build_named_set(NamedSet::S2m, Some(0)).is_err());
        assert!(build_named_set(NamedSet::S1, Some(2)).is_err());
    }

    #[test]
    fn name_parsing() {
        assert_eq!("S2''".parse::<NamedSet>().unwrap(), NamedSet::S2DoublePrime);
        assert_eq!("domino".parse::<NamedSet>().unwrap(), NamedSet::Domino);
        assert!("S9".parse::<NamedSet>().is_err());
    }
}
