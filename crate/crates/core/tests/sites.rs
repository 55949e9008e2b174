mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use enriched_sites::base_change::{self, BaseChange};
use enriched_sites::category::{base_change_category, EnrichedCategory};
use enriched_sites::coverage::*;
use enriched_sites::instances;
use enriched_sites::quantale::{make_exponential, Elem};
use enriched_sites::sheaf::*;
use enriched_sites::sieve::*;
use enriched_sites::Limits;

fn shipped() -> Vec<EnrichedCategory> {
    vec![instances::one_object_q2(), instances::p2(), instances::chain3(), instances::lawvere3()]
}

fn lim() -> Limits {
    Limits::default()
}

fn q2_into_e31() -> BaseChange {
    base_change::inclusion_two_element(Arc::new(make_exponential(3, 1).unwrap())).unwrap()
}

#[test]
fn enumeration_matches_brute_force() {
    for c in shipped() {
        for x in 0..c.len() {
            let got: BTreeSet<Sieve> = enumerate_sieves(&c, x, &lim()).unwrap().into_iter().collect();
            assert_eq!(got, common::oracle_sieves(&c, x), "sieves on {}", c.label(x));
        }
        assert_eq!(enumerate_presheaves(&c, &lim()).unwrap(), common::oracle_presheaves(&c));
    }
}

#[test]
fn sieve_counts() {
    let counts: Vec<Vec<usize>> = shipped()
        .iter()
        .map(|c| (0..c.len()).map(|x| enumerate_sieves(c, x, &lim()).unwrap().len()).collect())
        .collect();
    assert_eq!(counts, vec![vec![2], vec![11, 11], vec![2, 3, 4], vec![18, 32, 24]]);
}

#[test]
fn pullback_is_the_greatest_cone() {
    for c in shipped() {
        let q = c.base();
        for x in 0..c.len() {
            for s in enumerate_sieves(&c, x, &lim()).unwrap() {
                for y in 0..c.len() {
                    for g in q.elements().filter(|&g| q.leq(g, c.hom(y, x))) {
                        let f = GeneralizedElement { g, source: y };
                        let p = pullback_sieve(&c, &s, f).unwrap();
                        assert!(is_sieve(&c, &p));
                        assert_eq!(p, common::oracle_pullback(&c, &s, g, y));
                    }
                }
            }
        }
    }
}

#[test]
fn maximal_is_pullback_stable_and_unit_is_identity() {
    for c in shipped() {
        let q = c.base();
        for x in 0..c.len() {
            let m = maximal_sieve(&c, x).unwrap();
            for y in 0..c.len() {
                for g in q.down_set(c.hom(y, x)) {
                    let p = pullback_sieve(&c, &m, GeneralizedElement { g, source: y }).unwrap();
                    assert_eq!(p, maximal_sieve(&c, y).unwrap());
                }
            }
            for s in enumerate_sieves(&c, x, &lim()).unwrap() {
                let f = GeneralizedElement { g: q.unit(), source: x };
                assert_eq!(pullback_sieve(&c, &s, f).unwrap(), s);
            }
        }
    }
}

#[test]
fn sieves_form_a_lattice_with_maximal_top() {
    for c in shipped() {
        for x in 0..c.len() {
            let all = enumerate_sieves(&c, x, &lim()).unwrap();
            let m = maximal_sieve(&c, x).unwrap();
            for a in &all {
                assert!(sieve_leq(&c, a, &m).unwrap());
                for b in &all {
                    let meet = sieve_meet(&c, a, b).unwrap();
                    assert!(is_sieve(&c, &meet));
                    assert!(sieve_leq(&c, &meet, a).unwrap() && sieve_leq(&c, &meet, b).unwrap());
                    let join = sieve_join(&c, a, b).unwrap();
                    assert!(is_sieve(&c, &join));
                }
            }
        }
    }
}

#[test]
fn literal_metric_formula_is_recorded_not_repaired() {
    let c = instances::p2();
    let m = maximal_sieve(&c, 0).unwrap();
    let two = c.base().elem("2").unwrap();
    let cmp = compare_pullbacks(&c, &m, GeneralizedElement { g: two, source: 1 }).unwrap();
    assert_eq!(cmp.literal.show(&c), "on y {x: 0, y: 1}");
    assert_eq!(cmp.literal_violations.first(), Some(&SieveViolation::Bound { z: 0 }));
    assert!(is_sieve(&c, &cmp.generic));
    assert_eq!(cmp.generic.show(&c), "on y {x: 1, y: 0}");
}

#[test]
fn literal_formula_agrees_at_the_unit() {
    let c = instances::lawvere3();
    let q = c.base();
    for x in 0..c.len() {
        for y in 0..c.len() {
            if c.hom(y, x) != q.unit() {
                continue;
            }
            let m = maximal_sieve(&c, x).unwrap();
            let lit = pullback_lawvere(&c, &m, q.unit(), y).unwrap();
            assert_eq!(lit, pullback_sieve(&c, &m, GeneralizedElement { g: q.unit(), source: y }).unwrap());
        }
    }
    let g = base_change::exp_neg(3, 1).unwrap();
    let e = base_change_category(&g, &instances::p2()).unwrap();
    let m = maximal_sieve(&e, 0).unwrap();
    let unit = e.base().unit();
    let lit = pullback_proxet(&e, &m, unit, 0).unwrap();
    assert_eq!(lit, pullback_sieve(&e, &m, GeneralizedElement { g: unit, source: 0 }).unwrap());
}

#[test]
fn underlying_preorder_survives_right_adjoint_base_change() {
    let maps = [
        (instances::chain3(), q2_into_e31()),
        (instances::antichain2(), q2_into_e31()),
        (instances::p2(), base_change::exp_neg(3, 1).unwrap()),
        (instances::lawvere3(), base_change::exp_neg(3, 1).unwrap()),
        (instances::p2(), base_change::collapse(3, 1).unwrap()),
        (instances::lawvere3(), base_change::collapse(3, 1).unwrap()),
        (instances::chain3(), base_change::identity(instances::q2())),
    ];
    for (c, g) in maps {
        assert!(g.flags().right_adjoint);
        let image = base_change_category(&g, &c).unwrap();
        assert!(image.is_valid());
        assert_eq!(image.underlying_preorder(), c.underlying_preorder(), "{}", g.name());
    }
}

#[test]
fn chain_through_inclusion_is_a_proximity_set() {
    let g = q2_into_e31();
    let image = base_change_category(&g, &instances::chain3()).unwrap();
    let labels: BTreeSet<&str> = image.hom_matrix().iter().flatten().map(|&e| image.base().label(e)).collect();
    assert_eq!(labels, BTreeSet::from(["0", "1"]));
    let p = base_change_category(&base_change::exp_neg(3, 1).unwrap(), &instances::p2()).unwrap();
    assert_eq!(p.base().label(p.hom(0, 1)), "e^-1");
}

#[test]
fn presheaf_base_change_examples() {
    let c = instances::p2();
    let g = base_change::exp_neg(3, 1).unwrap();
    let p = Presheaf::from_labels(&c, &["1", "0"]).unwrap();
    let gp = base_change::presheaf_base_change(&g, &c, &p).unwrap();
    let image = base_change_category(&g, &c).unwrap();
    assert_eq!(gp.show(&image), "{x: e^-1, y: 1}");
    let id = base_change::identity(c.base().clone());
    assert_eq!(base_change::presheaf_base_change(&id, &c, &p).unwrap(), p);
    let unit = Presheaf::constant(&c, c.base().unit());
    assert_eq!(base_change::presheaf_base_change(&g, &c, &unit).unwrap(), Presheaf::constant(&image, image.base().unit()));
}

fn assert_injective_on_sieves(g: &BaseChange, c: &EnrichedCategory) {
    for x in 0..c.len() {
        let all = enumerate_sieves(c, x, &lim()).unwrap();
        let images: BTreeSet<Sieve> = all.iter().map(|s| base_change_sieve(g, c, s).unwrap()).collect();
        assert_eq!(images.len(), all.len(), "collision on {}", c.label(x));
        for a in &all {
            for b in &all {
                if sieve_leq(c, a, b).unwrap() {
                    let image = base_change_category(g, c).unwrap();
                    let (ga, gb) = (base_change_sieve(g, c, a).unwrap(), base_change_sieve(g, c, b).unwrap());
                    assert!(sieve_leq(&image, &ga, &gb).unwrap());
                }
            }
        }
    }
}

#[test]
fn base_change_of_sieves_is_injective_and_monotone() {
    assert_injective_on_sieves(&q2_into_e31(), &instances::chain3());
    assert_injective_on_sieves(&q2_into_e31(), &instances::antichain2());
    assert_injective_on_sieves(&base_change::exp_neg(3, 1).unwrap(), &instances::p2());
    assert_injective_on_sieves(&base_change::exp_neg(3, 1).unwrap(), &instances::lawvere3());
    let g3 = base_change::inclusion_two_element(instances::godel3()).unwrap();
    assert_injective_on_sieves(&g3, &instances::chain3());
}

#[test]
fn collapse_is_refused_and_collides() {
    let g = base_change::collapse(3, 1).unwrap();
    let c = instances::p2();
    let err = base_change_coverage(&g, &c, &indiscrete(&c), &lim()).unwrap_err();
    assert!(matches!(err, enriched_sites::Error::Hypothesis(_)));
    let all = enumerate_sieves(&c, 0, &lim()).unwrap();
    let images: BTreeSet<Sieve> = all.iter().map(|s| base_change_sieve(&g, &c, s).unwrap()).collect();
    assert!(images.len() < all.len());
}

#[test]
fn sieve_base_change_example() {
    let c = instances::chain3();
    let g = q2_into_e31();
    let s = Sieve::from_labels(&c, "top", &["1", "0", "0"]).unwrap();
    let image = base_change_category(&g, &c).unwrap();
    let gs = base_change_sieve(&g, &c, &s).unwrap();
    assert_eq!(gs.show(&image), "on top {bottom: 1, mid: 0, top: 0}");
    assert!(is_sieve(&image, &gs));
}

#[test]
fn coverage_counts_match_brute_force() {
    for c in [instances::one_object_q2(), instances::chain3(), instances::antichain2()] {
        let n = enumerate_coverages(&c, &lim()).unwrap().len();
        assert_eq!(n, common::oracle_coverage_count(&c));
    }
    assert_eq!(enumerate_coverages(&instances::one_object_q2(), &lim()).unwrap().len(), 2);
    assert_eq!(enumerate_coverages(&instances::chain3(), &lim()).unwrap().len(), 24);
    assert_eq!(enumerate_topologies(&instances::chain3(), &lim()).unwrap().len(), 8);
    assert_eq!(enumerate_topologies(&instances::antichain2(), &lim()).unwrap().len(), 4);
}

#[test]
fn coverage_lattice_laws() {
    for c in [instances::one_object_q2(), instances::chain3()] {
        let all = enumerate_coverages(&c, &lim()).unwrap();
        let top = discrete(&c, &lim()).unwrap();
        let bottom = indiscrete(&c);
        assert!(all.contains(&top) && all.contains(&bottom));
        let join = |a: &Coverage<Sieve>, b: &Coverage<Sieve>| coverage_join_closure(&c, &[a.clone(), b.clone()]).unwrap();
        let meet = |a: &Coverage<Sieve>, b: &Coverage<Sieve>| coverage_meet(&[a.clone(), b.clone()]).unwrap();
        for a in &all {
            assert!(refinement_leq(&bottom, a).unwrap() && refinement_leq(a, &top).unwrap());
            assert_eq!(meet(a, &top), *a);
            assert_eq!(meet(a, &bottom), bottom);
            assert_eq!(join(a, a), *a);
            assert_eq!(meet(a, a), *a);
            let t = topology_closure(&c, a, &lim()).unwrap();
            assert!(refinement_leq(a, &t).unwrap());
            assert_eq!(topology_closure(&c, &t, &lim()).unwrap(), t);
            assert!(check_coverage(&c, &t, &lim()).is_topology());
            for b in &all {
                let (m, j) = (meet(a, b), join(a, b));
                assert!(all.contains(&m) && all.contains(&j));
                assert_eq!(m, meet(b, a));
                assert_eq!(j, join(b, a));
                assert_eq!(meet(a, &j), *a);
                assert_eq!(join(a, &m), *a);
                assert_eq!(refinement_leq(a, b).unwrap(), meet(a, b) == *a);
                // the join is the least upper bound among all coverages
                let uppers: Vec<&Coverage<Sieve>> = all
                    .iter()
                    .filter(|k| refinement_leq(a, k).unwrap() && refinement_leq(b, k).unwrap())
                    .collect();
                assert!(uppers.iter().all(|k| refinement_leq(&j, k).unwrap()));
                if refinement_leq(a, b).unwrap() {
                    let tb = topology_closure(&c, b, &lim()).unwrap();
                    assert!(refinement_leq(&topology_closure(&c, a, &lim()).unwrap(), &tb).unwrap());
                }
                for d in &all {
                    assert_eq!(meet(&meet(a, b), d), meet(a, &meet(b, d)));
                    assert_eq!(join(&join(a, b), d), join(a, &join(b, d)));
                }
            }
        }
    }
}

#[test]
fn topology_closure_is_least_among_topologies() {
    for c in [instances::chain3(), instances::antichain2(), instances::one_object_q2()] {
        let tops = enumerate_topologies(&c, &lim()).unwrap();
        for j in enumerate_coverages(&c, &lim()).unwrap() {
            let t = topology_closure(&c, &j, &lim()).unwrap();
            assert!(tops.contains(&t));
            for k in tops.iter().filter(|k| refinement_leq(&j, k).unwrap()) {
                assert!(refinement_leq(&t, k).unwrap());
            }
        }
    }
}

#[test]
fn p2_t2_saturation_of_a_zero_sieve() {
    let c = instances::p2();
    let mut j = indiscrete(&c);
    j.families[0].insert(zero_sieve(&c, 0).unwrap());
    let closed = coverage_join_closure(&c, &[j]).unwrap();
    assert!(closed.contains(0, &zero_sieve(&c, 0).unwrap()));
    assert!(check_coverage(&c, &closed, &lim()).is_coverage());
    assert_eq!(closed.family(0).len(), 5);
    assert_eq!(closed.family(1).len(), 4);
}

fn masks(all: &[Coverage<Sieve>]) -> Vec<u64> {
    let universe: Vec<(usize, &Sieve)> = {
        let set: BTreeSet<(usize, &Sieve)> =
            all.iter().flat_map(|j| j.families.iter().enumerate().flat_map(|(x, f)| f.iter().map(move |s| (x, s)))).collect();
        set.into_iter().collect()
    };
    assert!(universe.len() <= 64);
    all.iter()
        .map(|j| {
            universe
                .iter()
                .enumerate()
                .filter(|(_, (x, s))| j.contains(*x, s))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect()
}

/// Injectivity, monotonicity and meet preservation of `J -> G̃J` over every
/// enumerated coverage. Meets are compared through bitmasks over the sieves
/// that occur, with the meet of each pair looked up among the enumerated
/// coverages.
fn assert_coverage_injective(g: &BaseChange, c: &EnrichedCategory) -> usize {
    let all = enumerate_coverages(c, &lim()).unwrap();
    let images: Vec<Coverage<Sieve>> =
        all.iter().map(|j| base_change_coverage(g, c, j, &lim()).unwrap().coverage).collect();
    let distinct: BTreeSet<&Coverage<Sieve>> = images.iter().collect();
    assert_eq!(distinct.len(), all.len(), "collision under {}", g.name());
    let (dom, img) = (masks(&all), masks(&images));
    let index: std::collections::HashMap<u64, usize> = dom.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    for a in 0..all.len() {
        for b in 0..all.len() {
            let m = index[&(dom[a] & dom[b])];
            assert_eq!(img[m], img[a] & img[b]);
            if dom[a] & dom[b] == dom[a] {
                assert_eq!(img[a] & img[b], img[a]);
            }
        }
    }
    for (a, b) in [(0, all.len() - 1), (all.len() / 2, all.len() / 3)] {
        let m = coverage_meet(&[all[a].clone(), all[b].clone()]).unwrap();
        assert_eq!(coverage_image(g, c, &m).unwrap(), coverage_meet(&[images[a].clone(), images[b].clone()]).unwrap());
    }
    all.len()
}

#[test]
fn base_change_of_coverages_is_injective_and_preserves_meets() {
    assert_eq!(assert_coverage_injective(&q2_into_e31(), &instances::chain3()), 24);
    assert_eq!(assert_coverage_injective(&base_change::exp_neg(3, 1).unwrap(), &instances::p2()), 1021);
    let g3 = base_change::inclusion_two_element(instances::godel3()).unwrap();
    assert_coverage_injective(&g3, &instances::chain3());
}

#[test]
fn coverage_images_are_coverages_when_the_left_adjoint_is_strong() {
    let g3 = base_change::inclusion_two_element(instances::godel3()).unwrap();
    assert!(g3.flags().left_adjoint_strong_monoidal && g3.flags().cotensor_compatible);
    let c = instances::chain3();
    for j in enumerate_coverages(&c, &lim()).unwrap() {
        let img = base_change_coverage(&g3, &c, &j, &lim()).unwrap();
        assert!(img.report.is_coverage());
    }
    let iso = base_change::exp_neg(3, 1).unwrap();
    let p2 = instances::p2();
    for j in enumerate_coverages(&p2, &lim()).unwrap() {
        assert!(base_change_coverage(&iso, &p2, &j, &lim()).unwrap().report.is_coverage());
    }
}

#[test]
fn nilpotents_break_t2_of_images_in_the_exponential_model() {
    let g = q2_into_e31();
    let c = instances::chain3();
    let mut broken = 0;
    for j in enumerate_coverages(&c, &lim()).unwrap() {
        let img = base_change_coverage(&g, &c, &j, &lim()).unwrap();
        assert!(img.report.t1_holds());
        if j != indiscrete(&c) {
            assert!(!img.report.t2_holds());
            broken += 1;
        }
    }
    assert_eq!(broken, 23);
}

#[test]
fn sheafification_matches_the_least_sheaf_above() {
    for c in [instances::one_object_q2(), instances::chain3(), instances::antichain2(), instances::p2()] {
        for j0 in enumerate_coverages(&c, &lim()).unwrap_or_else(|_| vec![indiscrete(&c)]) {
            let j = topology_closure(&c, &j0, &lim()).unwrap();
            for p in enumerate_presheaves(&c, &lim()).unwrap() {
                let s = sheafify(&c, &p, &j);
                assert!(is_sheaf(&c, &s, &j));
                assert_eq!(is_sheaf(&c, &p, &j), common::oracle_is_sheaf(&c, &p, &j));
                assert_eq!(s, common::oracle_sheafify(&c, &p, &j));
                assert_eq!(sheafify(&c, &s, &j), s);
                if is_sheaf(&c, &p, &j) {
                    assert_eq!(s, p);
                }
            }
        }
    }
}

#[test]
fn sheafification_is_monotone() {
    for c in [instances::chain3(), instances::p2()] {
        let ps = enumerate_presheaves(&c, &lim()).unwrap();
        for j in enumerate_topologies(&c, &lim()).unwrap_or_else(|_| vec![indiscrete(&c)]) {
            for p in &ps {
                for q in ps.iter().filter(|q| p.leq(&c, q)) {
                    assert!(sheafify(&c, p, &j).leq(&c, &sheafify(&c, q, &j)));
                }
            }
        }
    }
}

#[test]
fn members_of_a_topology_are_dense() {
    for c in [instances::chain3(), instances::antichain2(), instances::p2()] {
        let tops = enumerate_topologies(&c, &lim()).unwrap_or_else(|_| vec![indiscrete(&c), discrete(&c, &lim()).unwrap()]);
        for j in tops {
            for x in 0..c.len() {
                for r in j.family(x) {
                    assert!(is_dense(&c, r, &j).unwrap());
                }
            }
        }
    }
}

#[test]
fn sheafification_commutes_with_full_base_change() {
    let cases: Vec<(BaseChange, EnrichedCategory)> = vec![
        (q2_into_e31(), instances::chain3()),
        (q2_into_e31(), instances::antichain2()),
        (base_change::exp_neg(3, 1).unwrap(), instances::p2()),
        (base_change::inclusion_two_element(instances::godel3()).unwrap(), instances::chain3()),
        (base_change::identity(instances::t3()), instances::p2()),
    ];
    for (g, c) in cases {
        assert!(g.flags().full && g.meets_transfer_hypotheses());
        let ps = enumerate_presheaves(&c, &lim()).unwrap();
        for j in enumerate_coverages(&c, &lim()).unwrap() {
            for p in &ps {
                let r = check_sheafification_commutes(&g, &c, p, &j).unwrap();
                assert!(r.equal, "{} on {}", g.name(), p.show(&c));
            }
            let image = base_change_category(&g, &c).unwrap();
            let gj = coverage_image(&g, &c, &j).unwrap();
            for p in ps.iter().filter(|p| is_sheaf(&c, p, &j)) {
                let gp = base_change::presheaf_base_change(&g, &c, p).unwrap();
                assert!(is_sheaf(&image, &gp, &gj));
            }
        }
    }
}

#[test]
fn commute_check_refuses_without_hypotheses() {
    let g = base_change::collapse(3, 1).unwrap();
    let c = instances::p2();
    let p = Presheaf::constant(&c, c.base().unit());
    assert!(check_sheafification_commutes(&g, &c, &p, &indiscrete(&c)).is_err());
}

#[test]
fn empty_category_degenerates() {
    let c = EnrichedCategory::new(instances::q2(), vec![], vec![]).unwrap();
    assert!(enumerate_all_sieves(&c, &lim()).unwrap().is_empty());
    assert_eq!(enumerate_presheaves(&c, &lim()).unwrap(), vec![Presheaf::new(vec![])]);
    let j = indiscrete(&c);
    assert!(check_coverage(&c, &j, &lim()).is_topology());
    let _ = Elem(0);
}
