mod common;

use lpcc::activation::verify_activation;
use lpcc::fixtures::{activation_fixture, protocol_fixture};
use lpcc::opsolve::SolverConfig;
use lpcc::protocol::{execute_and_verify, lpcc_search, ProtocolTree, SearchConfig};
use lpcc::states::{build_named_set, NamedSet, Partition};

fn search(depth: usize) -> SearchConfig {
    SearchConfig { depth, solver: SolverConfig::exact() }
}

#[test]
fn fixture_trees_verify_and_walk() {
    for name in ["s1-protocol", "s2-protocol"] {
        let fx = protocol_fixture(name).unwrap().unwrap();
        assert!(execute_and_verify(&fx.set, &fx.tree).unwrap().is_distinguishable(), "{name}");
        assert!(common::labels_partitioned(&fx.set, &fx.tree), "{name}");
    }
}

#[test]
fn searched_trees_walk_independently() {
    let mut r = common::rng(7);
    for n in 2..=4 {
        let s = common::structured_two_by_n(&mut r, n);
        let v = lpcc_search(&s, &Partition::finest(2), &search(4));
        let t = v.tree().expect("product 2⊗n sets are distinguishable");
        assert!(common::walk_identifies(&s, t));
    }
}

#[test]
fn domino_is_indistinguishable() {
    let s = build_named_set(NamedSet::Domino, None).unwrap();
    let v = lpcc_search(&s, &Partition::finest(2), &search(3));
    assert!(v.is_indistinguishable());
}

#[test]
fn corrupted_tree_is_rejected() {
    let fx = protocol_fixture("s1-protocol").unwrap().unwrap();
    let ProtocolTree::Measure { lp, .. } = &fx.tree else { panic!("fixture starts with a measurement") };
    let truncated = ProtocolTree::Measure { lp: lp.clone(), children: Default::default() };
    assert!(!execute_and_verify(&fx.set, &truncated).map(|v| v.is_distinguishable()).unwrap_or(false));
}

#[test]
fn activation_fixtures_verify() {
    for name in ["s1-activation-b", "s2-activation-bc"] {
        let fx = activation_fixture(name).unwrap().unwrap();
        let r = verify_activation(&fx.set, &fx.first, &fx.partition, &SolverConfig::exact()).unwrap();
        assert!(r.activated, "{name}");
        assert_eq!(r.branches.len(), fx.support_bases.len(), "{name}");
    }
}
