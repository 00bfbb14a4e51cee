//! Replays of the bundled results: each theorem is a list of exact checks.

use std::fmt;

use serde::Serialize;

use crate::activation::{check_dim2_nogo, is_m_activable, verify_activation, ActivationReport, ClassifyConfig, MStatus};
use crate::algebra::CVec;
use crate::diagram::ket_string;
use crate::fixtures::{activation_fixture, protocol_fixture, residual_fixture, union_fixture, FixtureError};
use crate::ket::parse_ket;
use crate::measure::{apply, preserves_orthogonality, LocalPvm};
use crate::opsolve::{rank1_op_directions, SolverConfig};
use crate::protocol::{execute_and_verify, leaf_sets, lemma1_protocol, lpcc_search, Claim, LeafRule, SearchConfig};
use crate::states::{build_named_set, is_locally_redundant, union_embedding_levels, NamedSet, Partition, StateSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Unknown,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub title: String,
    pub checks: Vec<Check>,
}

impl TheoremReport {
    fn new(title: &str) -> Self {
        TheoremReport { title: title.to_string(), checks: Vec::new() }
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        self.checks.push(Check { name: name.to_string(), status, detail: detail.into() });
    }

    fn push(&mut self, name: &str, status: CheckStatus, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), status, detail: detail.into() });
    }

    fn error(&mut self, name: &str, e: impl fmt::Display) {
        self.push(name, CheckStatus::Fail, format!("error: {e}"));
    }

    /// Fail if any check failed, otherwise unknown if any was undecided.
    pub fn status(&self) -> CheckStatus {
        if self.checks.iter().any(|c| c.status == CheckStatus::Fail) {
            CheckStatus::Fail
        } else if self.checks.iter().any(|c| c.status == CheckStatus::Unknown) {
            CheckStatus::Unknown
        } else {
            CheckStatus::Pass
        }
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.title, self.status())?;
        for c in &self.checks {
            writeln!(f, "  [{}] {}: {}", c.status, c.name, c.detail)?;
        }
        Ok(())
    }
}

pub const THEOREMS: [u32; 5] = [1, 2, 3, 4, 5];

pub fn theorem(n: u32, config: &SolverConfig) -> Option<TheoremReport> {
    Some(match n {
        1 => theorem1(config),
        2 => theorem2(config),
        3 => theorem3(config),
        4 => theorem4(config),
        5 => theorem5(config),
        _ => return None,
    })
}

pub fn lemma(n: u32, _config: &SolverConfig) -> Option<TheoremReport> {
    (n == 1).then(lemma1)
}

fn lemma1() -> TheoremReport {
    let mut r = TheoremReport::new("Lemma 1");
    for name in ["s1-protocol", "s2-protocol"] {
        let fx = match protocol_fixture(name).expect("bundled") {
            Ok(fx) => fx,
            Err(e) => {
                r.error(name, e);
                continue;
            }
        };
        let leaves = match leaf_sets(&fx.set, &fx.tree) {
            Ok(l) => l,
            Err(e) => {
                r.error(name, e);
                continue;
            }
        };
        for (path, set, claim) in leaves {
            if claim != Claim::DistinguishableBy(LeafRule::Lemma1TwoByN) {
                continue;
            }
            let what = format!("{name} leaf {path}");
            match lemma1_protocol(&set).map(|t| (execute_and_verify(&set, &t), t)) {
                Ok((Ok(_), t)) => r.check(&what, true, format!("{} states, {}-round tree verified", set.len(), t.depth())),
                Ok((Err(e), _)) => r.error(&what, e),
                Err(e) => r.error(&what, e),
            }
        }
    }
    r
}

fn residual_sets() -> Result<(StateSet, Vec<(crate::fixtures::ResidualCase, StateSet)>), FixtureError> {
    let fx = residual_fixture()?;
    let s = build_named_set(fx.set.parse::<NamedSet>()?, None)?;
    let mut out = Vec::new();
    for case in fx.cases {
        let lp = crate::fixtures::PvmSpecJson { group: "C".into(), pvm: case.pvm.clone() }.elaborate(s.spec())?;
        let branch = apply(&s, &lp)?.swap_remove(case.outcome);
        out.push((case, branch.set));
    }
    Ok((s, out))
}

fn theorem1(config: &SolverConfig) -> TheoremReport {
    let mut r = TheoremReport::new("Theorem 1");
    let sets = match residual_sets() {
        Ok((_, sets)) => sets,
        Err(e) => {
            r.error("residual sets", e);
            return r;
        }
    };
    for (case, set) in sets.iter().take(2) {
        match check_dim2_nogo(set, config) {
            Ok(rep) => {
                let detail = format!(
                    "{} dimension-2 measurements checked, each outcome is a product set with one constant party; first party: {}",
                    rep.checks.len(),
                    if rep.first_party.is_certified_none() { "no nontrivial measurement" } else { "may measure" }
                );
                r.check(&format!("{} post-set", case.name), rep.holds, detail);
            }
            Err(e) => r.error(&case.name, e),
        }
    }
    let product = StateSet::from_kets(&[4, 2, 2], &["000", "1(0+1)1", "2(0-1)0", "3(0+1)(0-1)", "0(0+1)1"], "example");
    match product.map_err(|e| e.to_string()).and_then(|s| check_dim2_nogo(&s, config).map_err(|e| e.to_string())) {
        Ok(rep) => r.check("fully product 4⊗2⊗2 example", rep.holds, format!("{} measurements checked", rep.checks.len())),
        Err(e) => r.error("fully product 4⊗2⊗2 example", e),
    }
    r
}

fn kets_of(basis: &[String], dims: &[usize]) -> Option<Vec<CVec>> {
    basis.iter().map(|k| parse_ket(k, dims).ok()).collect()
}

fn activation_checks(r: &mut TheoremReport, name: &str, config: &SolverConfig) -> Option<ActivationReport> {
    let fx = match activation_fixture(name).expect("bundled") {
        Ok(fx) => fx,
        Err(e) => {
            r.error(name, e);
            return None;
        }
    };
    let rep = match verify_activation(&fx.set, &fx.first, &fx.partition, config) {
        Ok(rep) => rep,
        Err(e) => {
            r.error("activation", e);
            return None;
        }
    };
    let group = fx.set.spec().group_label(&fx.first.group);
    r.check(
        "activation",
        rep.activated,
        format!(
            "{group} measures {} outcomes; {} branches certified PVM-irreducible in {}; set {}",
            fx.first.pvm.len(),
            rep.branches.len() - rep.uncertified.len(),
            fx.partition.label(fx.set.spec()),
            if rep.redundancy.is_redundant() { "redundant" } else { "irredundant" }
        ),
    );
    let second = &fx.view.blocks()[1];
    let dims: Vec<usize> = second.iter().map(|&p| fx.set.spec().dims()[p]).collect();
    for (b, expected) in rep.branches.iter().zip(&fx.support_bases) {
        let what = format!("outcome {} domino match", b.outcome);
        let view = b.set.merge_parties(&fx.view).ok();
        let witness = view.as_ref().and_then(crate::activation::domino_match);
        match (witness, kets_of(expected, &dims)) {
            (Some(w), Some(basis)) => {
                let found: Vec<String> = w.bases[1].iter().map(|v| ket_string(v, &dims)).collect();
                let irreducible = view
                    .as_ref()
                    .map(|v| crate::opsolve::is_pvm_irreducible(v, &Partition::finest(2), config).is_irreducible())
                    .unwrap_or(false);
                r.check(&what, w.basis_matches(1, &basis) && irreducible, format!("support basis {{{}}}", found.join(", ")));
            }
            (None, _) => r.check(&what, false, "no relabeling onto the domino set"),
            (_, None) => r.error(&what, "bad basis in fixture"),
        }
    }
    Some(rep)
}

fn protocol_check(r: &mut TheoremReport, name: &str) {
    match protocol_fixture(name).expect("bundled") {
        Ok(fx) => match execute_and_verify(&fx.set, &fx.tree) {
            Ok(v) => r.check(&format!("{name} protocol"), true, format!("distinguishable, {} leaves verified", v.trace.len())),
            Err(e) => r.error(&format!("{name} protocol"), e),
        },
        Err(e) => r.error(name, e),
    }
}

fn theorem2(config: &SolverConfig) -> TheoremReport {
    let mut r = TheoremReport::new("Theorem 2");
    protocol_check(&mut r, "s1-protocol");
    activation_checks(&mut r, "s1-activation-b", config);
    r
}

fn theorem3(config: &SolverConfig) -> TheoremReport {
    let mut r = TheoremReport::new("Theorem 3");
    protocol_check(&mut r, "s2-protocol");
    let (s2, cases) = match residual_sets() {
        Ok(x) => x,
        Err(e) => {
            r.error("residual sets", e);
            return r;
        }
    };
    for (party, label) in [(0, "Alice"), (1, "Bob")] {
        let rep = rank1_op_directions(&s2, &[party], config);
        r.check(
            &format!("{label} rank-1 directions"),
            rep.none_found.is_some(),
            match &rep.none_found {
                Some(n) => format!("none found ({})", n.method),
                None => format!("{} directions, {} families", rep.solutions.len(), rep.families.len()),
            },
        );
    }
    let rep = rank1_op_directions(&s2, &[2], config);
    let expected: Vec<CVec> = match residual_fixture() {
        Ok(fx) => fx.charlie_directions.iter().filter_map(|k| parse_ket(k, &[3]).ok()).collect(),
        Err(_) => vec![],
    };
    let found = rep.exact_directions();
    let same = rep.complete
        && rep.families.is_empty()
        && found.len() == expected.len()
        && expected.iter().all(|e| found.iter().any(|f| f.is_parallel(e)));
    let shown: Vec<String> = found.iter().map(|v| ket_string(v, &[3])).collect();
    r.check("Charlie rank-1 directions", same, format!("{{{}}}", shown.join(", ")));
    let search = SearchConfig { depth: 4, solver: config.clone() };
    for (case, set) in &cases {
        let expected = StateSet::from_kets(s2.spec().dims(), &case.kets.iter().map(String::as_str).collect::<Vec<_>>(), "fixture");
        let matches = expected.map(|e| e.equivalent_up_to_scalars(set)).unwrap_or(false);
        r.check(&format!("{} post-set", case.name), matches, format!("{} states", set.len()));
        let v = lpcc_search(set, &Partition::finest(3), &search);
        r.check(&format!("{} distinguishable", case.name), v.is_distinguishable(), v.to_string().lines().next().unwrap_or("").to_string());
        if case.alice_rank1_none {
            let a = rank1_op_directions(set, &[0], config);
            r.check(&format!("{} Alice rank-1 directions", case.name), a.none_found.is_some(), "none found".to_string());
        }
    }
    let cfg = ClassifyConfig { solver: config.clone(), ..Default::default() };
    match is_m_activable(&s2, 3, false, &cfg) {
        Ok(m) => {
            let status = match &m.status {
                MStatus::NotActivable => CheckStatus::Pass,
                MStatus::Activable { .. } => CheckStatus::Fail,
                MStatus::Unknown(_) => CheckStatus::Unknown,
            };
            r.push("no single-party activation", status, m.trace.join("; "));
        }
        Err(e) => r.error("no single-party activation", e),
    }
    r
}

fn theorem4(config: &SolverConfig) -> TheoremReport {
    let mut r = TheoremReport::new("Theorem 4");
    activation_checks(&mut r, "s2-activation-bc", config);
    r
}

fn theorem5(config: &SolverConfig) -> TheoremReport {
    let mut r = TheoremReport::new("Theorem 5");
    let fx = match union_fixture() {
        Ok(fx) => fx,
        Err(e) => {
            r.error("fixture", e);
            return r;
        }
    };
    let union = match fx.set.parse::<NamedSet>().map_err(|e| e.to_string()).and_then(|n| build_named_set(n, None).map_err(|e| e.to_string())) {
        Ok(u) => u,
        Err(e) => {
            r.error("union set", e);
            return r;
        }
    };
    r.check("orthogonal", union.is_orthogonal(), format!("{} states in {:?}", union.len(), union.spec().dims()));
    r.check("irredundant", !is_locally_redundant(&union).is_redundant(), "no subsystem can be discarded");
    let parts = [NamedSet::S2, NamedSet::S2Prime, NamedSet::S2DoublePrime];
    let levels = union_embedding_levels();
    let embedded: Vec<StateSet> = parts
        .iter()
        .zip(&levels)
        .filter_map(|(n, lv)| build_named_set(*n, None).ok()?.embed_levels(union.spec().dims(), lv).ok())
        .collect();
    if embedded.len() != 3 {
        r.error("subsets", "failed to embed the three subsets");
        return r;
    }
    let alice = match fx.alice.elaborate(union.spec()) {
        Ok(a) => a,
        Err(e) => {
            r.error("Alice's measurement", e);
            return r;
        }
    };
    let op = preserves_orthogonality(&union, &alice).map(|c| c.is_ok()).unwrap_or(false);
    let separated = apply(&union, &alice)
        .map(|bs| {
            bs.len() == 3
                && bs.iter().zip(&embedded).all(|(b, e)| b.set.labels() == e.labels() && b.set.vectors() == e.vectors())
        })
        .unwrap_or(false);
    r.check("Alice separates the subsets", op && separated, "each outcome keeps exactly one embedded subset, unchanged");
    let search = SearchConfig { depth: 3, solver: config.clone() };
    let cfg = ClassifyConfig { solver: config.clone(), ..Default::default() };
    // the embedded subsets inherit every local certificate from the standalone sets
    for ((n, e), lv) in parts.iter().zip(&embedded).zip(&levels) {
        let standalone = build_named_set(*n, None).expect("built-in");
        let same = e.restrict_levels(lv).is_ok_and(|x| x.vectors() == standalone.vectors());
        r.check(&format!("{n} embedding"), same, "local level maps restrict back to the standalone set");
        let v = lpcc_search(&standalone, &Partition::finest(3), &search);
        r.check(&format!("{n} distinguishable"), v.is_distinguishable(), v.to_string().lines().next().unwrap_or("").to_string());
        match is_m_activable(&standalone, 3, false, &cfg) {
            Ok(m) => {
                let status = match m.status {
                    MStatus::NotActivable => CheckStatus::Pass,
                    MStatus::Activable { .. } => CheckStatus::Fail,
                    MStatus::Unknown(_) => CheckStatus::Unknown,
                };
                r.push(&format!("{n} no single-party activation"), status, "exhausted in A|B|C on the standalone set");
            }
            Err(e) => r.error(&format!("{n} no single-party activation"), e),
        }
    }
    for j in &fx.joint {
        let idx = parts.iter().position(|n| j.subset.parse::<NamedSet>().ok() == Some(*n));
        let Some(idx) = idx else {
            r.error(&j.subset, "unknown subset");
            continue;
        };
        let set = &embedded[idx];
        let what = format!("{} joint activation", j.subset);
        let lp: Result<(LocalPvm, Partition), String> = (|| {
            let lp = j.first.elaborate(set.spec()).map_err(|e| e.to_string())?;
            let p = Partition::parse(&j.partition, set.spec()).map_err(|e| e.to_string())?;
            Ok((lp, p))
        })();
        match lp.and_then(|(lp, p)| verify_activation(set, &lp, &p, config).map_err(|e| e.to_string()).map(|rep| (lp, p, rep))) {
            Ok((lp, p, rep)) => r.check(
                &what,
                rep.activated,
                format!("{} measures, {} branches irreducible in {}", set.spec().group_label(&lp.group), rep.branches.len(), p.label(set.spec())),
            ),
            Err(e) => r.error(&what, e),
        }
    }
    r
}
