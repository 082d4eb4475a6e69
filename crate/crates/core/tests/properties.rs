//! Randomised laws. Each case draws a seed and builds its inputs from the
//! shared generators so failures shrink to a single reproducible seed.

mod common;

use std::collections::BTreeSet;

use alexdb_core::algebra::{check_map, image_space, open_reduction, product, select_subspace, SpaceMap};
use alexdb_core::demo;
use alexdb_core::lod::{direct_path, interpolate, monotone_path_query, Decision};
use alexdb_core::spacetime::{attach_change, prism, time_complex, time_slice, AttachmentSpec, PointRow};
use alexdb_core::storage::{load, save, validate, versions_with_path, PathOptions, ValidateOptions};
use alexdb_core::topology::is_homeomorphic;
use alexdb_core::versioning::{
    apply_changeset, merge, reconstruct_version, version_star, ChangeSet, T0Rule, VersionSpace,
};
use alexdb_core::{BoundedByPair, ElementId, Space};
use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn star_is_least_open_neighbourhood(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 12);
        let opens = s.enumerate_open_sets().unwrap();
        for x in s.ids() {
            let mut meet = s.id_set();
            for o in opens.iter().filter(|o| o.contains(x)) {
                meet = meet.intersection(o).cloned().collect();
            }
            prop_assert_eq!(s.star([x]).unwrap(), meet);
        }
    }

    #[test]
    fn closure_and_star_are_hull_operators(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 10);
        let a = random_subset(&mut r, &s);
        let mut b = a.clone();
        b.extend(random_subset(&mut r, &s));
        for forward in [true, false] {
            let op = |set: &BTreeSet<ElementId>| if forward { s.closure(set) } else { s.star(set) }.unwrap();
            let fa = op(&a);
            prop_assert!(a.is_subset(&fa));
            prop_assert_eq!(op(&fa), fa.clone());
            prop_assert!(fa.is_subset(&op(&b)));
        }
    }

    #[test]
    fn preorder_closure_and_star_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 10);
        let pre = s.preorder();
        for a in s.ids() {
            for b in s.ids() {
                let in_pre = pre.contains(a, b);
                prop_assert_eq!(in_pre, s.closure([a]).unwrap().contains(b));
                prop_assert_eq!(in_pre, s.star([b]).unwrap().contains(a));
            }
        }
    }

    #[test]
    fn dimension_is_longest_chain(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 12);
        prop_assume!(!s.is_empty());
        prop_assert_eq!(s.krull_dimension().unwrap(), oracle_dimension(&s));
    }

    #[test]
    fn t0_iff_points_are_distinguished(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let mut pairs = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && r.gen_bool(0.25) {
                    pairs.insert(BoundedByPair { ida: name(i), idb: name(j) });
                }
            }
        }
        let s = Space::builder()
            .elements((0..n).map(name))
            .pairs(pairs.iter().map(|p| (p.ida.clone(), p.idb.clone())))
            .t0_check(false)
            .build()
            .unwrap();
        let opens = brute_open_sets(&s);
        let distinguished = s.ids().all(|a| {
            s.ids().all(|b| a == b || opens.iter().any(|o| o.contains(a) != o.contains(b)))
        });
        prop_assert_eq!(s.is_t0(), distinguished);
    }

    #[test]
    fn subspace_topology(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 10);
        let keep = random_subset(&mut r, &s);
        let sub = select_subspace(&s, &keep).unwrap();
        let got: BTreeSet<BTreeSet<ElementId>> = brute_open_sets(&sub).into_iter().collect();
        prop_assert_eq!(got, relative_opens(&brute_open_sets(&s), &keep));
    }

    #[test]
    fn open_reduction_is_unique_and_minimal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 12);
        let ids: Vec<ElementId> = s.ids().cloned().collect();
        let reduced = open_reduction(s.relation()).unwrap();
        let closed: BTreeSet<BoundedByPair> = closure_pairs(&ids, s.relation())
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(ida, idb)| BoundedByPair { ida, idb })
            .collect();
        // any relation with the same closure reduces to the same pairs
        prop_assert_eq!(&open_reduction(&closed).unwrap(), &reduced);
        prop_assert_eq!(closure_pairs(&ids, &reduced), closure_pairs(&ids, s.relation()));
    }

    #[test]
    fn product_stars_and_dimension(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_space(&mut r, 4);
        let b = random_space(&mut r, 4);
        prop_assume!(!a.is_empty() && !b.is_empty());
        let p = product(&a, &b);
        for x in a.ids() {
            for y in b.ids() {
                let expect: BTreeSet<ElementId> = a.star([x]).unwrap().iter()
                    .flat_map(|u| b.star([y]).unwrap().into_iter().map(move |v| alexdb_core::algebra::product_key(u, &v, "⊗")))
                    .collect();
                prop_assert_eq!(p.star([&alexdb_core::algebra::product_key(x, y, "⊗")]).unwrap(), expect);
            }
        }
        prop_assert_eq!(p.krull_dimension().unwrap(), a.krull_dimension().unwrap() + b.krull_dimension().unwrap());
    }

    #[test]
    fn image_carries_the_final_topology(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 8);
        let Some(g) = random_collapse(&mut r, &s) else { return Ok(()) };
        let img = image_space(&g).unwrap();
        let source_opens: BTreeSet<BTreeSet<ElementId>> = brute_open_sets(&s).into_iter().collect();
        let ids: Vec<ElementId> = img.ids().cloned().collect();
        let expect: BTreeSet<BTreeSet<ElementId>> = (0u32..1 << ids.len())
            .map(|m| ids.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, x)| x.clone()).collect::<BTreeSet<_>>())
            .filter(|v| source_opens.contains(&g.preimage(v)))
            .collect();
        let got: BTreeSet<BTreeSet<ElementId>> = brute_open_sets(&img).into_iter().collect();
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn continuity_forms_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_space(&mut r, 8);
        let b = random_space(&mut r, 8);
        prop_assume!(!b.is_empty());
        let f = random_map(&mut r, &a, &b);
        prop_assert_eq!(check_map(&f).unwrap().is_continuous(), oracle_continuous(&f));
    }

    #[test]
    fn continuous_images_of_connected_sets_are_connected(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_space(&mut r, 8);
        let b = random_space(&mut r, 6);
        prop_assume!(!b.is_empty());
        let f = random_map(&mut r, &a, &b);
        prop_assume!(check_map(&f).unwrap().is_continuous());
        for _ in 0..5 {
            let c = random_subset(&mut r, &a);
            if a.is_connected(&c).unwrap() {
                prop_assert!(b.is_connected(&f.image_of(&c)).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn prism_is_a_product_with_time(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 6);
        let (t0, t1) = (ElementId::from("t0"), ElementId::from("t1"));
        let p = prism(&s, "t0", "t1").unwrap();
        let time = time_complex(&t0, &t1, &alexdb_core::spacetime::span_id(&t0, &t1)).unwrap();
        prop_assert!(is_homeomorphic(&p, &product(&s, &time)));
    }

    #[test]
    fn interior_slice_of_a_prism_is_the_snapshot(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 6);
        let p = prism(&s, "t0", "t1").unwrap();
        let points: Vec<PointRow> = p
            .ids()
            .filter(|x| !p.relation().iter().any(|q| &q.ida == *x))
            .map(|x| PointRow::new(x.clone(), 0.0, 0.0, 0.0, if x.id.ends_with("⊗t0") { 0.0 } else { 1.0 }))
            .collect();
        let t = r.gen_range(0.01..0.99);
        let slice = time_slice(&p, &points, t).unwrap();
        prop_assert_eq!(slice.len(), s.len());
        prop_assert!(is_homeomorphic(&slice, &s));
    }

    #[test]
    fn attaching_along_continuous_maps_stays_t0(seed in any::<u64>()) {
        let mut r = rng(seed);
        let past = random_space(&mut r, 5);
        prop_assume!(!past.is_empty());
        let future = random_space(&mut r, 5);
        prop_assume!(!future.is_empty());
        // overlay: a random subspace of the past, mapped into the future
        let keep = random_subset(&mut r, &past);
        let overlay = select_subspace(&past, &keep).unwrap();
        let to_past = SpaceMap::partial(overlay.clone(), past.clone(), keep.iter().map(|x| (x.clone(), x.clone()))).unwrap();
        let to_future = random_map(&mut r, &overlay, &future);
        prop_assume!(check_map(&to_future).unwrap().is_continuous());
        let out = attach_change(&past, &future, &AttachmentSpec::new(to_past, to_future), "t").unwrap();
        prop_assert!(out.is_t0());
    }

    #[test]
    fn removal_is_a_subspace(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 9);
        let ids: Vec<ElementId> = s.ids().cloned().collect();
        let Some(x) = ids.choose(&mut r) else { return Ok(()) };
        let removed = apply_changeset(&s, &ChangeSet::new("v").remove_element(x.clone())).unwrap();
        let rest: BTreeSet<ElementId> = s.id_set().into_iter().filter(|y| y != x).collect();
        let sub = select_subspace(&s, &rest).unwrap();
        prop_assert_eq!(removed.preorder(), sub.preorder());
    }

    #[test]
    fn version_stars_are_open(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_space(&mut r, 10);
        let tokens: Vec<&str> = s.ids().map(|x| x.id.as_str()).collect();
        let vs = VersionSpace::new(&tokens, s.relation().iter().map(|p| (p.ida.id.as_str(), p.idb.id.as_str()))).unwrap();
        for v in &tokens {
            let star: BTreeSet<ElementId> = version_star(&vs, v).unwrap().into_iter().map(ElementId::from).collect();
            prop_assert!(vs.space().is_open(&star).unwrap());
        }
    }

    #[test]
    fn reconstruction_uses_rows_of_the_star(seed in any::<u64>()) {
        let mut r = rng(seed);
        let store = random_store(&mut r);
        let vs = store.version_space().unwrap();
        for v in vs.versions() {
            let star = version_star(&vs, v).unwrap();
            let space = reconstruct_version(&store, v).unwrap();
            for x in space.ids() {
                prop_assert!(star.contains(&store.x[x].version));
            }
            for p in space.relation() {
                prop_assert!(star.contains(&store.r[p]));
            }
            // everything created in the star and not deleted there is live
            for (x, row) in &store.x {
                let deleted = store.del_x.iter().any(|(y, w)| y == x && star.contains(w));
                prop_assert_eq!(space.contains(x), star.contains(&row.version) && !deleted);
            }
        }
    }

    #[test]
    fn merge_is_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_space(&mut r, 6);
        let b = random_space(&mut r, 6);
        let (ab, rab) = merge(&a, &b, &[&T0Rule]);
        let (ba, rba) = merge(&b, &a, &[&T0Rule]);
        prop_assert_eq!(ab.id_set(), ba.id_set());
        prop_assert_eq!(ab.relation(), ba.relation());
        let clash = |rep: &alexdb_core::versioning::ConflictReport| -> BTreeSet<(ElementId, String)> {
            rep.inherent.iter().map(|c| (c.element.clone(), c.attribute.clone())).collect()
        };
        prop_assert_eq!(clash(&rab), clash(&rba));
        prop_assert_eq!(rab.consistency.len(), rba.consistency.len());
        let (aa, raa) = merge(&a, &a, &[&T0Rule]);
        prop_assert!(raa.is_empty());
        prop_assert_eq!(aa, a);
    }

    #[test]
    fn merge_ignores_history(seed in any::<u64>()) {
        // same head reached through two different change paths
        let mut r = rng(seed);
        let s = random_space(&mut r, 6);
        let other = random_space(&mut r, 6);
        let detour = apply_changeset(&s, &ChangeSet::new("v1").add_element(alexdb_core::Element::new("tmp"))).unwrap();
        let detour = apply_changeset(&detour, &ChangeSet::new("v2").remove_element("tmp")).unwrap();
        prop_assert_eq!(&detour, &s);
        prop_assert_eq!(merge(&s, &other, &[&T0Rule]), merge(&detour, &other, &[&T0Rule]));
    }

    #[test]
    fn algorithm_steps_are_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fine = random_space(&mut r, 12);
        prop_assume!(!fine.is_empty());
        let Some(g) = random_collapse(&mut r, &fine) else { return Ok(()) };
        prop_assume!(check_map(&g).unwrap().is_monotonic() == Some(true));
        let ids: Vec<ElementId> = fine.ids().cloned().collect();
        for _ in 0..8 {
            let mut region = random_subset(&mut r, &fine);
            let (a, b) = (ids.choose(&mut r).unwrap().clone(), ids.choose(&mut r).unwrap().clone());
            region.extend([a.clone(), b.clone()]);
            let direct = direct_path(&fine, &region, &a, &b).unwrap();
            prop_assert_eq!(direct, oracle_path(&fine, &region, &a, &b));
            let out = monotone_path_query(&g, &region, &a, &b).unwrap();
            prop_assert_eq!(out.answer, direct);
            match out.decided_by {
                Decision::CoarseNo => prop_assert!(!direct),
                Decision::PreimageContained => prop_assert!(direct),
                Decision::DirectQuery => {}
            }
        }
    }

    #[test]
    fn interpolation_is_continuous(seed in any::<u64>()) {
        let mut r = rng(seed);
        let chain = demo::fig6_chain(true);
        let points: Vec<PointRow> = chain.spaces().iter()
            .flat_map(|s| s.ids().cloned().collect::<Vec<_>>())
            .map(|x| PointRow::new(x, r.gen_range(-9.0..9.0), r.gen_range(-9.0..9.0), 0.0, 0.0))
            .collect();
        let fine: Vec<ElementId> = chain.spaces()[0].ids().cloned().collect();
        let x = fine.choose(&mut r).unwrap();
        let at = |s: f64| interpolate(&chain, &points, x, s).unwrap();
        let start = points.iter().find(|p| &p.pid == x).unwrap();
        prop_assert_eq!(at(0.0).coords[..2].to_vec(), vec![start.x, start.y]);
        let gx = chain.gens()[0].apply(x).unwrap();
        let end = points.iter().find(|p| &p.pid == gx).unwrap();
        prop_assert_eq!(at(1.0).coords[..2].to_vec(), vec![end.x, end.y]);
        let h = 1e-6;
        let s = r.gen_range(0.0..1.0 - h);
        let (p, q) = (at(s).coords, at(s + h).coords);
        let step: f64 = p.iter().zip(q).map(|(u, v)| (u - v).abs()).sum();
        prop_assert!(step < 1e-3);
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn store_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let store = random_store(&mut r);
        let dir = tempfile::tempdir().unwrap();
        save(&store, dir.path()).unwrap();
        prop_assert_eq!(load(dir.path()).unwrap(), store);
    }

    #[test]
    fn validate_is_pure(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut store = random_store(&mut r);
        if r.gen_bool(0.5) {
            store.r.insert(BoundedByPair::new("ghost", "x0"), "v0".into());
        }
        let before = store.clone();
        let opts = ValidateOptions { surjective: true, monotonic: true, ..ValidateOptions::default() };
        let first = validate(&store, &opts);
        prop_assert_eq!(&validate(&store, &opts), &first);
        prop_assert_eq!(store, before);
    }

    #[test]
    fn versions_with_path_matches_per_version_search(seed in any::<u64>()) {
        let mut r = rng(seed);
        let store = random_store(&mut r);
        let ids: Vec<ElementId> = store.x.keys().cloned().collect();
        prop_assume!(!ids.is_empty());
        let (a, b) = (ids.choose(&mut r).unwrap().clone(), ids.choose(&mut r).unwrap().clone());
        let mut region: BTreeSet<ElementId> = ids.iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
        region.extend([a.clone(), b.clone()]);
        let got = versions_with_path(&store, &a, &b, &region, &PathOptions::default()).unwrap();
        let mut expect = BTreeSet::new();
        for v in store.version_space().unwrap().versions() {
            let space = reconstruct_version(&store, v).unwrap();
            if !space.contains(&a) || !space.contains(&b) {
                continue;
            }
            let live: BTreeSet<ElementId> = region.iter().filter(|x| space.contains(x)).cloned().collect();
            if oracle_path(&space, &live, &a, &b) {
                expect.insert(v.to_string());
            }
        }
        prop_assert_eq!(got, expect);
    }
}
