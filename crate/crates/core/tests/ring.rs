use std::collections::BTreeSet;

use enriched_sites::coverage::{check_coverage, enumerate_topologies};
use enriched_sites::ring::{
    self, as_coverage, check_gabriel, find_ring_isomorphism, from_mult_set, gabriel_closure, hom_from_ideal,
    is_module_map, localize, mult_closed_subsets, ring_of_fractions_oracle, torsion, zmod, FiniteModule, FiniteRing,
    Ideal, IdealFamily,
};
use enriched_sites::Limits;

fn closed(r: &FiniteRing, s: &BTreeSet<u32>) -> bool {
    s.contains(&r.zero())
        && s.iter().all(|&a| s.iter().all(|&b| s.contains(&r.sub(a, b))) && r.elements().all(|x| s.contains(&r.mul(a, x))))
}

/// Every subset of the carrier that is a right ideal.
fn oracle_ideals(r: &FiniteRing) -> BTreeSet<Vec<u32>> {
    let n = r.len();
    (0u64..1 << n)
        .map(|m| (0..n as u32).filter(|&k| m >> k & 1 == 1).collect::<BTreeSet<u32>>())
        .filter(|s| closed(r, s))
        .map(|s| s.into_iter().collect())
        .collect()
}

/// Every function `I -> M` that is additive and right linear.
fn oracle_homs(r: &FiniteRing, i: &Ideal, m: &FiniteModule) -> Vec<Vec<u32>> {
    let k = i.len() as u32;
    let total = (m.len() as u64).pow(k);
    let mut out: Vec<Vec<u32>> = (0..total)
        .map(|mut code| {
            (0..k)
                .map(|_| {
                    let v = (code % m.len() as u64) as u32;
                    code /= m.len() as u64;
                    v
                })
                .collect::<Vec<u32>>()
        })
        .filter(|f| is_module_map(r, i, m, f))
        .collect();
    out.sort();
    out
}

fn small_rings() -> Vec<FiniteRing> {
    let mut v: Vec<FiniteRing> = (2..=12).map(|n| zmod(n).unwrap()).collect();
    v.push(ring::product(&zmod(2).unwrap(), &zmod(2).unwrap()).unwrap());
    v.push(ring::product(&zmod(2).unwrap(), &zmod(4).unwrap()).unwrap());
    v.push(ring::upper_triangular_f2());
    v
}

fn all_families(r: &FiniteRing) -> Vec<IdealFamily> {
    let ideals = r.right_ideals();
    (0u64..1 << ideals.len())
        .map(|m| ideals.iter().enumerate().filter(|(k, _)| m >> k & 1 == 1).map(|(_, i)| i.clone()).collect())
        .collect()
}

#[test]
fn ideal_enumeration_matches_subset_search() {
    for r in small_rings() {
        let got: BTreeSet<Vec<u32>> = r.right_ideals().iter().map(|i| i.elements().to_vec()).collect();
        assert_eq!(got, oracle_ideals(&r), "{}", r.name());
        let list = r.right_ideals();
        for (a, i) in list.iter().enumerate() {
            for j in &list[..a] {
                assert!(!i.is_subset(j) || i == j, "order puts a superset first in {}", r.name());
            }
        }
    }
}

#[test]
fn pinned_ideal_lists() {
    let show = |r: &FiniteRing| r.right_ideals().iter().map(|i| r.show_ideal(i)).collect::<Vec<_>>();
    assert_eq!(show(&zmod(4).unwrap()), ["(0)", "(2)", "(1)"]);
    assert_eq!(show(&zmod(6).unwrap()), ["(0)", "(3)", "(2)", "(1)"]);
    assert_eq!(show(&zmod(5).unwrap()), ["(0)", "(1)"]);
    assert_eq!(show(&zmod(12).unwrap()), ["(0)", "(6)", "(4)", "(3)", "(2)", "(1)"]);
    assert_eq!(ring::upper_triangular_f2().right_ideals().len(), 7);
}

#[test]
fn colon_is_the_one_object_pullback() {
    use enriched_sites::coverage::Site;
    for r in small_rings() {
        for i in r.right_ideals() {
            assert_eq!(r.colon(i, r.one()), *i);
            for a in r.elements() {
                let c = r.colon(i, a);
                assert_eq!(r.pull_back(i, 0, a), c);
                assert!(r.sieve_problem(&c).is_none());
                if r.is_two_sided(i) {
                    assert!(i.is_subset(&c));
                }
                let brute: Vec<u32> = r.elements().filter(|&x| i.contains(r.mul(a, x))).collect();
                assert_eq!(c.elements(), brute.as_slice());
                assert_eq!(r.colon(&r.unit_ideal(), a), r.unit_ideal());
            }
        }
    }
}

#[test]
fn gabriel_iff_grothendieck_topology() {
    let lim = Limits::default();
    for n in [4, 6, 8, 12] {
        let r = zmod(n).unwrap();
        let mut gabriel = 0;
        for f in all_families(&r) {
            let g = check_gabriel(&r, &f).holds();
            let t = check_coverage(&r, &as_coverage(&f), &lim).is_topology();
            assert_eq!(g, t, "Z/{n} {:?}", f.iter().map(|i| r.show_ideal(i)).collect::<Vec<_>>());
            gabriel += g as usize;
        }
        assert_eq!(gabriel, enumerate_topologies(&r, &lim).unwrap().len());
    }
}

#[test]
fn gabriel_counts() {
    let lim = Limits::default();
    let count = |r: &FiniteRing| all_families(r).iter().filter(|f| check_gabriel(r, f).holds()).count();
    // one topology per set of maximal ideals for finite commutative rings
    assert_eq!(count(&zmod(4).unwrap()), 2);
    assert_eq!(count(&zmod(6).unwrap()), 4);
    assert_eq!(count(&zmod(8).unwrap()), 2);
    assert_eq!(count(&zmod(12).unwrap()), 4);
    assert_eq!(count(&zmod(30).unwrap()), 8);
    assert_eq!(enumerate_topologies(&ring::upper_triangular_f2(), &lim).unwrap().len(), count(&ring::upper_triangular_f2()));
}

#[test]
fn closure_is_least() {
    let lim = Limits::default();
    for r in small_rings() {
        let tops: Vec<IdealFamily> = all_families(&r).into_iter().filter(|f| check_gabriel(&r, f).holds()).collect();
        for seed in r.right_ideals() {
            let c = gabriel_closure(&r, std::slice::from_ref(seed), &lim).unwrap();
            assert!(check_gabriel(&r, &c).holds());
            assert!(c.contains(seed));
            for t in tops.iter().filter(|t| t.contains(seed)) {
                assert!(c.is_subset(t), "{}", r.name());
            }
        }
        assert_eq!(gabriel_closure(&r, &[], &lim).unwrap(), IdealFamily::from([r.unit_ideal()]));
    }
}

#[test]
fn z4_closure_of_two() {
    let z4 = zmod(4).unwrap();
    let lim = Limits::default();
    let t = gabriel_closure(&z4, &[z4.right_ideal_generated(&[2])], &lim).unwrap();
    let shown: Vec<String> = t.iter().map(|i| z4.show_ideal(i)).collect();
    assert_eq!(shown, ["(0)", "(2)", "(1)"]);
    assert_eq!(torsion(&z4, &t).unwrap(), z4.unit_ideal());
    let loc = localize(&z4, &t, &lim).unwrap();
    assert_eq!(loc.len(), 1);
    assert_eq!(loc.i_min, z4.zero_ideal());
}

#[test]
fn hom_search_matches_brute_force() {
    let lim = Limits::default();
    for r in small_rings().into_iter().filter(|r| r.len() <= 8) {
        for q in r.right_ideals() {
            let m = FiniteModule::quotient(&r, q).unwrap();
            for i in r.right_ideals() {
                if (m.len() as f64).powi(i.len() as i32) > 2e5 {
                    continue;
                }
                assert_eq!(hom_from_ideal(&r, i, &m, &lim).unwrap(), oracle_homs(&r, i, &m), "{}", r.name());
            }
        }
    }
}

#[test]
fn z6_pipeline() {
    let z6 = zmod(6).unwrap();
    let lim = Limits::default();
    let s: BTreeSet<u32> = [1, 3].into();
    let t = from_mult_set(&z6, &s).unwrap();
    let shown: Vec<String> = t.iter().map(|i| z6.show_ideal(i)).collect();
    assert_eq!(shown, ["(3)", "(1)"]);
    assert_eq!(z6.show_ideal(&torsion(&z6, &t).unwrap()), "(2)");
    let loc = localize(&z6, &t, &lim).unwrap();
    let z2 = zmod(2).unwrap();
    assert!(find_ring_isomorphism(loc.ring.as_ref().unwrap(), &z2).is_some());
    assert!(find_ring_isomorphism(&ring_of_fractions_oracle(&z6, &s).unwrap(), &z2).is_some());
    assert!(loc.module_act.is_some());
}

#[test]
fn improper_topology_localizes_to_the_ring() {
    let lim = Limits::default();
    for r in small_rings().into_iter().filter(|r| r.is_commutative()) {
        let t = IdealFamily::from([r.unit_ideal()]);
        let loc = localize(&r, &t, &lim).unwrap();
        assert!(find_ring_isomorphism(loc.ring.as_ref().unwrap(), &r).is_some(), "{}", r.name());
    }
}

#[test]
fn torsion_is_kernel_of_canonical_map() {
    let lim = Limits::default();
    for r in small_rings() {
        for t in all_families(&r).into_iter().filter(|f| check_gabriel(&r, f).holds()) {
            let tors = torsion(&r, &t).unwrap();
            let loc = localize(&r, &t, &lim).unwrap();
            assert_eq!(loc.kernel(&r), tors.elements(), "{}", r.name());
            assert!(r.is_two_sided(&tors));
        }
    }
}

/// `H_S` localization against `A[S^-1]`, split by whether `S` avoids zero
/// divisors. The classical comparison is only claimed in the first case.
#[test]
fn localization_against_fractions() {
    let lim = Limits::default();
    let (mut clean, mut dirty, mut dirty_agree) = (0, 0, 0);
    for r in small_rings().into_iter().filter(|r| r.is_commutative()) {
        for s in mult_closed_subsets(&r).unwrap() {
            let t = from_mult_set(&r, &s).unwrap();
            let loc = localize(&r, &t, &lim).unwrap();
            let frac = ring_of_fractions_oracle(&r, &s).unwrap();
            let agree = loc.ring.as_ref().is_some_and(|l| find_ring_isomorphism(l, &frac).is_some());
            if s.iter().all(|&x| !r.is_zero_divisor(x)) {
                assert!(agree, "{} S = {:?}", r.name(), s);
                clean += 1;
            } else {
                dirty += 1;
                dirty_agree += agree as usize;
            }
        }
    }
    assert!(clean > 0 && dirty > 0);
    assert_eq!(dirty_agree, dirty, "zero-divisor cases that disagree: {}", dirty - dirty_agree);
}

#[test]
fn modules_from_tables() {
    let z6 = zmod(6).unwrap();
    let labels = vec!["0".to_string(), "1".to_string()];
    let add = vec![vec![0, 1], vec![1, 0]];
    let act: Vec<Vec<u32>> = (0..2).map(|m| (0..6).map(|r| (m * r) % 2).collect()).collect();
    let m = FiniteModule::from_tables(&z6, labels.clone(), &add, &act).unwrap();
    assert_eq!(m, FiniteModule::quotient(&z6, &z6.right_ideal_generated(&[2])).unwrap());
    // Z/2 is not a Z/3-module
    let z3 = zmod(3).unwrap();
    let act3: Vec<Vec<u32>> = (0..2).map(|m| (0..3).map(|r| (m * r) % 2).collect()).collect();
    assert!(FiniteModule::from_tables(&z3, labels, &add, &act3).is_err());
}

#[test]
fn caps_and_refusals() {
    let z6 = zmod(6).unwrap();
    assert!(z6.enumerate_right_ideals(&Limits { ring_size: 4, ..Limits::default() }).is_err());
    assert!(from_mult_set(&z6, &[3].into()).is_err());
    assert!(from_mult_set(&z6, &[1, 2].into()).is_err());
    let reg = FiniteModule::regular(&z6);
    let tight = Limits { hom_candidates: 3, ..Limits::default() };
    assert!(hom_from_ideal(&z6, &z6.unit_ideal(), &reg, &tight).is_err());
    assert!(zmod(1).is_err());
}
