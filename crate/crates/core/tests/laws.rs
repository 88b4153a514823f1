use proptest::prelude::*;
use tropical::algebra::{
    check_dual_rationality, check_insertion, check_laws, check_neutrals, check_rationality, Swapped,
};
use tropical::{Cost, ExtInt, MinMax, MinPlus, PathMinPlus, Traced, TropicalAlgebra};

fn cost() -> impl Strategy<Value = Cost> {
    prop_oneof![1 => Just(Cost::Infinite), 9 => (0u64..1000).prop_map(Cost::Finite)]
}

fn ext() -> impl Strategy<Value = ExtInt> {
    prop_oneof![
        1 => Just(ExtInt::NegInf),
        1 => Just(ExtInt::PosInf),
        8 => (-100i64..100).prop_map(ExtInt::Finite),
    ]
}

fn traced() -> impl Strategy<Value = Traced> {
    prop_oneof![
        1 => Just(Traced::Infinite),
        9 => (0u64..20, prop::collection::vec(0u32..4, 0..4)).prop_map(|(c, t)| Traced::new(c, t)),
    ]
}

proptest! {
    #[test]
    fn min_plus_laws(a in cost(), b in cost(), c in cost(), d in cost()) {
        let report = check_laws(&MinPlus, &[(a, b, c)])
            .merge(check_rationality(&MinPlus, &[(a, b, c)]))
            .merge(check_insertion(&MinPlus, &[(a, b, c, d)]))
            .merge(check_neutrals(&MinPlus, &[a]));
        prop_assert!(report.holds(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn min_max_is_bi_tropical(a in ext(), b in ext(), c in ext(), d in ext()) {
        let report = check_laws(&MinMax, &[(a, b, c)])
            .merge(check_rationality(&MinMax, &[(a, b, c)]))
            .merge(check_dual_rationality(&MinMax, &[(a, b, c)]))
            .merge(check_insertion(&MinMax, &[(a, b, c, d)]))
            .merge(check_neutrals(&MinMax, &[a]));
        prop_assert!(report.holds(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn path_min_plus_laws(a in traced(), b in traced(), c in traced()) {
        let samples = [(a.clone(), b.clone(), c.clone())];
        let report = check_laws(&PathMinPlus, &samples).merge(check_rationality(&PathMinPlus, &samples));
        prop_assert!(report.holds(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn swapped_min_max_laws(a in ext(), b in ext(), c in ext()) {
        let alg = Swapped(MinMax);
        let report = check_laws(&alg, &[(a, b, c)]).merge(check_rationality(&alg, &[(a, b, c)]));
        prop_assert!(report.holds());
    }

    #[test]
    fn value_text_round_trips(a in cost(), b in ext(), c in traced()) {
        prop_assert_eq!(a.to_string().parse::<Cost>().unwrap(), a);
        prop_assert_eq!(b.to_string().parse::<ExtInt>().unwrap(), b);
        prop_assert_eq!(c.to_string().parse::<Traced>().unwrap(), c);
    }
}

#[test]
fn min_plus_is_not_dual_rational() {
    // 1 ⊗ (2 ⊕ 1 ⊕ 5) = 2, not 1.
    let report = check_dual_rationality(
        &MinPlus,
        &[(Cost::Finite(1), Cost::Finite(2), Cost::Finite(5))],
    );
    assert!(!report.holds());
    assert!(!MinPlus.is_bi_tropical());
    assert!(MinMax.is_bi_tropical());
}
