mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use enriched_sites::base_change::analyze;
use enriched_sites::coverage::*;
use enriched_sites::quantale::{make_exponential, make_truncated_additive, Elem, Quantale};
use enriched_sites::sheaf::*;
use enriched_sites::sieve::*;
use enriched_sites::Limits;

fn base(n: u32, d: u32) -> Arc<Quantale> {
    Arc::new(make_truncated_additive(n, d).unwrap())
}

fn space() -> impl Strategy<Value = (u32, u32, Vec<Vec<u32>>)> {
    (1u32..=3, 1u32..=2, 1usize..=3)
        .prop_flat_map(|(n, d, k)| (Just(n), Just(d), prop::collection::vec(prop::collection::vec(0u32..16, k), k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_lawvere_spaces_are_categories((n, d, raw) in space()) {
        let c = common::lawvere_closure(base(n, d), &raw);
        prop_assert!(c.is_valid());
        prop_assert!(c.underlying_preorder().is_preorder());
    }

    #[test]
    fn pullbacks_on_random_spaces((n, d, raw) in space(), pick in any::<prop::sample::Index>()) {
        let c = common::lawvere_closure(base(n, d), &raw);
        let q = c.base().clone();
        for x in 0..c.len() {
            let all = enumerate_sieves(&c, x, &Limits::default()).unwrap();
            let s = pick.get(&all);
            for y in 0..c.len() {
                for g in q.down_set(c.hom(y, x)) {
                    let p = pullback_sieve(&c, s, GeneralizedElement { g, source: y }).unwrap();
                    prop_assert!(is_sieve(&c, &p));
                    prop_assert_eq!(&p, &common::oracle_pullback(&c, s, g, y));
                }
            }
        }
    }

    #[test]
    fn closures_and_sheafification_on_random_spaces(
        (n, d, raw) in space(),
        seeds in prop::collection::vec(any::<prop::sample::Index>(), 0..3),
        pick in any::<prop::sample::Index>(),
    ) {
        let c = common::lawvere_closure(base(n, d), &raw);
        let lim = Limits::default();
        let mut j = indiscrete(&c);
        for (k, seed) in seeds.iter().enumerate() {
            let x = k % c.len();
            let all = enumerate_sieves(&c, x, &lim).unwrap();
            j.families[x].insert(seed.get(&all).clone());
        }
        let cov = coverage_join_closure(&c, std::slice::from_ref(&j)).unwrap();
        prop_assert!(check_coverage(&c, &cov, &lim).is_coverage());
        prop_assert!(refinement_leq(&j, &cov).unwrap());
        let t = topology_closure(&c, &j, &lim).unwrap();
        prop_assert!(check_coverage(&c, &t, &lim).is_topology());
        prop_assert_eq!(&topology_closure(&c, &t, &lim).unwrap(), &t);
        prop_assert!(refinement_leq(&cov, &t).unwrap());

        let ps = enumerate_presheaves(&c, &lim).unwrap();
        let p = pick.get(&ps);
        let s = sheafify(&c, p, &t);
        prop_assert!(is_sheaf(&c, &s, &t));
        prop_assert!(p.leq(&c, &s));
        prop_assert_eq!(&sheafify(&c, &s, &t), &s);
        prop_assert_eq!(&s, &common::oracle_sheafify(&c, p, &t));
    }

    #[test]
    fn monotone_maps_between_chains(
        (n1, n2) in (1u32..=3, 1u32..=3),
        steps in prop::collection::vec(0usize..3, 5),
        exp in any::<bool>(),
    ) {
        let v = base(n1, 1);
        let u = if exp { Arc::new(make_exponential(n2, 1).unwrap()) } else { base(n2, 1) };
        // a non-decreasing index sequence is a monotone map between these chains
        let mut idx = 0usize;
        let map: Vec<Elem> = (0..v.len())
            .map(|i| {
                if i > 0 { idx = (idx + steps[i % steps.len()]).min(u.len() - 1); }
                Elem(idx as u32)
            })
            .collect();
        let g = analyze("random", v.clone(), u.clone(), map).unwrap();
        let fl = g.flags();
        if fl.right_adjoint {
            prop_assert!(g.triangle_identities());
            prop_assert!(fl.preserves_meets);
            prop_assert!(g.left_adjoint_preserves_joins());
        }
        if fl.conservative && fl.right_adjoint {
            let all: BTreeSet<Elem> = v.elements().map(|a| g.apply(a)).collect();
            prop_assert_eq!(all.len(), v.len());
        }
        if fl.full {
            prop_assert!(fl.conservative);
        }
    }

    #[test]
    fn sieve_base_change_is_monotone(
        (n, d, raw) in space(),
    ) {
        let c = common::lawvere_closure(base(n, d), &raw);
        let g = enriched_sites::base_change::exp_neg(n, d).unwrap();
        let image = enriched_sites::category::base_change_category(&g, &c).unwrap();
        for x in 0..c.len() {
            let all = enumerate_sieves(&c, x, &Limits::default()).unwrap();
            for a in &all {
                let ga = base_change_sieve(&g, &c, a).unwrap();
                prop_assert!(is_sieve(&image, &ga));
                for b in &all {
                    if sieve_leq(&c, a, b).unwrap() {
                        prop_assert!(sieve_leq(&image, &ga, &base_change_sieve(&g, &c, b).unwrap()).unwrap());
                    }
                }
            }
        }
    }
}
