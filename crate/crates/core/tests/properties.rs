mod common;

use lpcc::algebra::CMat;
use lpcc::opsolve::{rank1_op_directions, SolverConfig};
use lpcc::protocol::{lemma1_protocol, ProtocolTree};
use lpcc::states::StateSet;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn measurement_conserves_norm(seed in any::<u64>()) {
        prop_assert!(common::norm_conserved(&mut common::rng(seed)));
    }

    #[test]
    fn merging_keeps_inner_products(seed in any::<u64>()) {
        prop_assert!(common::merge_invariant(&mut common::rng(seed)));
    }

    #[test]
    fn random_pvms_resolve_identity(seed in any::<u64>(), d in 2usize..=4) {
        let pvm = common::random_pvm(&mut common::rng(seed), d);
        let mut sum = CMat::zeros(d, d);
        for (i, p) in pvm.elements().iter().enumerate() {
            prop_assert!(common::matrix_is_projector(p.mat()));
            for q in &pvm.elements()[i + 1..] {
                prop_assert!(p.mat().mul(q.mat()).unwrap().is_zero());
            }
            sum = sum.add(p.mat()).unwrap();
        }
        prop_assert!(sum.is_identity());
    }

    #[test]
    fn planted_direction_is_reported(seed in any::<u64>()) {
        let (s, party, theta) = common::planted(&mut common::rng(seed));
        prop_assert!(common::planted_oracle(&s, party, &theta));
        let rep = rank1_op_directions(&s, &[party], &SolverConfig::exact());
        prop_assert!(rep.none_found.is_none());
        prop_assert!(rep.contains(&theta));
    }

    #[test]
    fn lemma1_trees_identify_every_state(seed in any::<u64>(), n in 2usize..=5) {
        let s = common::structured_two_by_n(&mut common::rng(seed), n);
        let t = lemma1_protocol(&s).unwrap();
        prop_assert!(common::labels_partitioned(&s, &t));
        prop_assert!(common::walk_identifies(&s, &t));
        let back = ProtocolTree::from_json_value(&t.to_json_value(s.spec()), s.spec()).unwrap();
        prop_assert!(common::walk_identifies(&s, &back));
    }

    #[test]
    fn set_json_round_trips(seed in any::<u64>()) {
        let s = common::random_set(&mut common::rng(seed));
        let back = StateSet::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back.labels(), s.labels());
        prop_assert_eq!(back.vectors(), s.vectors());
        prop_assert_eq!(back.spec().dims(), s.spec().dims());
    }
}
