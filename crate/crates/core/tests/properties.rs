use std::cmp::Ordering;

use proptest::prelude::*;

use eip_core::daisy::{daisy_of_cardinality, daisy_perimeter, phi, psi, DaisyMatrix};
use eip_core::defects::{defect_contains_face, fill_defect, find_defects, DefectReference};
use eip_core::lattice::{
    bond_count, edge_perimeter, min_translate_symdiff, min_translate_symdiff_boxes, section, sections, Config, Cuboid,
};
use eip_core::oracle::eip_bruteforce;
use eip_core::order::{compare, initial_segment, OrderKey};
use eip_core::rearrange::{decreasing_rearrangement, sections_are_minimizers};

fn config(d: usize, max_n: usize, side: i32) -> impl Strategy<Value = Config> {
    prop::collection::vec(prop::collection::vec(1..=side, d), 1..=max_n)
        .prop_map(move |pts| Config::new(d, &pts).unwrap())
}

fn any_config() -> impl Strategy<Value = Config> {
    (2usize..=4).prop_flat_map(|d| config(d, 40, 6))
}

fn key(d: usize) -> impl Strategy<Value = OrderKey> {
    prop::collection::vec(1u64..=6, d).prop_map(|v| OrderKey::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn perimeter_and_bonds_add_up(c in any_config()) {
        let d = c.dim() as u128;
        prop_assert_eq!(edge_perimeter(&c) + 2 * bond_count(&c) as u128, 2 * d * c.len() as u128);
    }

    #[test]
    fn order_is_a_strict_total_order(x in key(3), y in key(3), z in key(3)) {
        let xy = compare(&x, &y).unwrap();
        prop_assert_eq!(compare(&y, &x).unwrap(), xy.reverse());
        prop_assert_eq!(xy == Ordering::Equal, x == y);
        if xy == Ordering::Less && compare(&y, &z).unwrap() == Ordering::Less {
            prop_assert_eq!(compare(&x, &z).unwrap(), Ordering::Less);
        }
    }

    #[test]
    fn phi_and_psi_are_inverse(d in 1usize..=6, n in 1u128..=3000) {
        let m = daisy_of_cardinality(n, d).unwrap().to_matrix();
        prop_assert_eq!(psi(&phi(&m).unwrap()), m.clone());
        let text = m.to_string();
        prop_assert_eq!(text.parse::<DaisyMatrix>().unwrap(), m);
    }

    #[test]
    fn psi_then_phi_is_identity(x in (1usize..=6).prop_flat_map(key)) {
        prop_assert_eq!(phi(&psi(&x)).unwrap(), x);
    }

    #[test]
    fn daisy_sections_are_daisies(d in 2usize..=4, n in 1u128..=300) {
        let c = daisy_of_cardinality(n, d).unwrap().materialize().unwrap();
        for axis in 0..d {
            let levels = sections(&c, axis).unwrap();
            let sizes: Vec<usize> = levels.values().map(Config::len).collect();
            if axis == d - 1 {
                prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
            }
            for s in levels.values() {
                let own = daisy_of_cardinality(s.len() as u128, d - 1).unwrap().materialize().unwrap();
                prop_assert_eq!(s, &own);
            }
        }
    }

    #[test]
    fn daisies_are_nested(d in 1usize..=4, n in 1u128..=400) {
        let a = daisy_of_cardinality(n, d).unwrap().materialize().unwrap();
        let b = daisy_of_cardinality(n + 1, d).unwrap().materialize().unwrap();
        prop_assert!(a.is_subset(&b));
        prop_assert_eq!(daisy_perimeter(&daisy_of_cardinality(n, d).unwrap()), edge_perimeter(&a));
    }

    #[test]
    fn rearrangement_keeps_levels_and_never_adds_perimeter(c in any_config(), pick in 0usize..4) {
        let axis = pick % c.dim();
        let r = decreasing_rearrangement(&c, axis).unwrap();
        prop_assert_eq!(r.len(), c.len());
        prop_assert!(edge_perimeter(&r) <= edge_perimeter(&c));
        let mut before: Vec<usize> = sections(&c, axis).unwrap().values().map(Config::len).collect();
        let after: Vec<usize> = sections(&r, axis).unwrap().values().map(Config::len).collect();
        before.sort_by(|a, b| b.cmp(a));
        prop_assert_eq!(before, after);
        prop_assert_eq!(decreasing_rearrangement(&r, axis).unwrap(), r);
    }

    #[test]
    fn symdiff_is_symmetric_and_translation_blind(
        a in config(2, 12, 5),
        b in config(2, 12, 5),
        shift in prop::collection::vec(-4i64..=4, 2),
    ) {
        let ab = min_translate_symdiff(&a, &b).unwrap();
        prop_assert_eq!(min_translate_symdiff(&b, &a).unwrap().count, ab.count);
        prop_assert_eq!(min_translate_symdiff(&a.translate(&shift).unwrap(), &b).unwrap().count, ab.count);
        prop_assert_eq!(ab.count == 0, a.len() == b.len() && a.normalized().unwrap() == b.normalized().unwrap());
    }

    #[test]
    fn box_symdiff_matches_points(
        e1 in prop::collection::vec(1u64..=5, 3),
        e2 in prop::collection::vec(1u64..=5, 3),
        o in prop::collection::vec(-3i32..=3, 3),
    ) {
        let a = Cuboid::new(o, e1).unwrap();
        let b = Cuboid::at_origin(e2).unwrap();
        let fast = min_translate_symdiff_boxes(&[a.clone()], &[b.clone()]).unwrap();
        let slow = min_translate_symdiff(&a.to_config().unwrap(), &b.to_config().unwrap()).unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn lower_layers_fit_in_every_layer_defect(d in 2usize..=4, n in 1u128..=2000) {
        let spec = daisy_of_cardinality(n, d).unwrap();
        let c = spec.materialize().unwrap();
        for m in spec.lowest_dim().max(2)..=d {
            let defects = find_defects(&spec, &DefectReference::Layer(m)).unwrap();
            // A single-cell defect may be too small for the face; some defect is not.
            if !defects.is_empty() {
                let faces = defects.iter().filter(|df| defect_contains_face(&spec, df).unwrap().is_some()).count();
                prop_assert!(faces > 0);
            }
            for defect in defects {
                prop_assert!(!defect.cells.is_empty());
                // The layers of dimension <= m - 2, if any.
                let boxes = spec.layer_boxes();
                let start = d + 2 - m;
                if start < boxes.len() {
                    let mut flat = Vec::new();
                    for b in &boxes[start..] {
                        flat.extend(b.to_config().unwrap().iter().flatten());
                    }
                    let donor = Config::from_flat(d, flat).unwrap();
                    prop_assert!(fill_defect(&c, &defect, &donor).is_ok());
                }
            }
        }
    }

    #[test]
    fn initial_segments_are_nested(d in 1usize..=4, n in 1u128..=200) {
        let a = initial_segment(n, d).unwrap();
        let b = initial_segment(n + 1, d).unwrap();
        prop_assert!(a.is_subset(&b));
    }
}

#[test]
fn defect_cells_touch_their_host() {
    for d in 2..=4 {
        for n in 1..=400u128 {
            let spec = daisy_of_cardinality(n, d).unwrap();
            let c = spec.materialize().unwrap();
            for m in spec.lowest_dim().max(2)..=d {
                for defect in find_defects(&spec, &DefectReference::Layer(m)).unwrap() {
                    for y in defect.cells.iter() {
                        assert!(!c.contains(y));
                        let mut q = y.to_vec();
                        q[defect.host_axis] -= 1;
                        assert!(c.contains(&q), "d={d} n={n} m={m}");
                    }
                }
            }
        }
    }
}

#[test]
fn oracle_minimizers_are_closed_under_lattice_symmetries() {
    for (d, n_max) in [(2, 9), (3, 6)] {
        for n in 1..=n_max {
            let r = eip_bruteforce(n, d).unwrap();
            for c in &r.minimizers {
                assert!(sections_are_minimizers(c).unwrap());
                for axis in 0..d {
                    let image = c.reflect(axis).unwrap().normalized().unwrap();
                    assert!(r.minimizers.binary_search(&image).is_ok());
                }
                let mut perm: Vec<usize> = (0..d).collect();
                perm.swap(0, d - 1);
                let image = c.permute_axes(&perm).unwrap().normalized().unwrap();
                assert!(r.minimizers.binary_search(&image).is_ok());
            }
        }
    }
}

#[test]
fn oracle_values_move_in_small_steps() {
    for (d, n_max) in [(2, 12), (3, 7)] {
        let values: Vec<u128> = (1..=n_max).map(|n| eip_bruteforce(n, d).unwrap().eip).collect();
        for w in values.windows(2) {
            assert!(w[0].abs_diff(w[1]) <= 2 * d as u128);
        }
    }
}

#[test]
fn sections_of_a_section() {
    let cube = Cuboid::cube(3, 3).unwrap().to_config().unwrap();
    let s = section(&cube, 1, 2).unwrap();
    assert_eq!(s, Cuboid::cube(3, 2).unwrap().to_config().unwrap());
}
