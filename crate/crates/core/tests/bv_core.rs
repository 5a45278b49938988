use cantorspeed::bv::{prepare_diagram, validate_diagram};
use cantorspeed::{
    Atom, ClopenSet, CylinderFunction, Direction, Error, OrderedBratteliDiagram, PathEdge, PointPrefix, Successor,
    Tail, TailRule,
};
use num_rational::BigRational;
use proptest::prelude::*;

fn d2() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::odometer(2)
}

fn m2112() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::stationary(vec![vec![2, 1], vec![1, 2]]).unwrap()
}

fn m11() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::stationary(vec![vec![1, 1], vec![1, 1]]).unwrap()
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn digits(bits: &[usize]) -> Vec<PathEdge> {
    bits.iter().map(|&b| PathEdge { target: 0, position: b }).collect()
}

#[test]
fn validation_examples() {
    assert!(validate_diagram(&d2()).passed());
    assert!(validate_diagram(&m2112()).passed());
    let id = OrderedBratteliDiagram::stationary(vec![vec![1, 0], vec![0, 1]]).unwrap();
    assert!(matches!(validate_diagram(&id).into_result(), Err(Error::NotPrimitive(_))));
    let dead = OrderedBratteliDiagram::new(
        vec![vec![vec![1], vec![1]], vec![vec![1, 1], vec![0, 0]], vec![vec![1, 1], vec![1, 1]]],
        None,
        TailRule::Finite,
    );
    assert!(matches!(dead, Err(Error::MalformedDiagram(_))));
}

#[test]
fn improper_order_is_rejected_and_proper_one_is_telescoped() {
    // vertex 0 receives (0,1), vertex 1 receives (1,0): maximal edges swap vertices
    let d = OrderedBratteliDiagram::from_sources(
        vec![vec![vec![0], vec![0]], vec![vec![0, 1], vec![1, 0]]],
        TailRule::Stationary,
    )
    .unwrap();
    assert!(matches!(validate_diagram(&d).into_result(), Err(Error::NotProperlyOrdered(_))));
    // maximal sources 0 -> 1 -> 2 -> 2 reach a single fixed vertex
    let d = OrderedBratteliDiagram::from_sources(
        vec![vec![vec![0], vec![0], vec![0]], vec![vec![0, 2, 1], vec![0, 1, 2], vec![0, 1, 2]]],
        TailRule::Stationary,
    )
    .unwrap();
    let r = validate_diagram(&d);
    assert!(r.passed());
    assert_eq!(r.telescope_by, Some(3));
    let t = prepare_diagram(&d).unwrap();
    assert!(t.max_source(1).is_some() && t.min_source(1).is_some());
}

#[test]
fn successor_examples() {
    let d = d2();
    assert_eq!(d.atom_successor(Atom::new(2, 0, 1)).unwrap(), Successor::Atom(Atom::new(2, 0, 2)));
    assert_eq!(d.atom_successor(Atom::new(2, 0, 3)).unwrap(), Successor::Atom(Atom::new(2, 0, 0)));
    let m = m2112();
    match m.atom_successor(Atom::new(1, 0, 0)).unwrap() {
        Successor::Split(parts) => {
            assert_eq!(parts.len(), 3);
            let targets: std::collections::BTreeSet<usize> = parts.iter().map(|p| p.1.vertex).collect();
            assert_eq!(targets.into_iter().collect::<Vec<_>>(), vec![0, 1]);
            assert!(parts.iter().all(|p| p.1.index == 0 && p.0.level == 2));
        }
        other => panic!("expected split, got {other:?}"),
    }
}

#[test]
fn refine_examples() {
    let d = d2();
    let first0 = d.canonical(&ClopenSet::from_atom(d.atom_of_path(&digits(&[0])).unwrap()));
    let r = d.refine_clopen(&first0, 2).unwrap();
    let idx: Vec<u64> = r.iter().map(|a| a.index).collect();
    assert_eq!(idx, vec![0, 2]);
    assert_eq!(d.refine_clopen(&ClopenSet::whole(), 3).unwrap().len(), 8);
    let m = m2112();
    assert_eq!(m.refine_clopen(&ClopenSet::from_atom(Atom::new(1, 0, 0)), 2).unwrap().len(), 3);
    assert!(matches!(d.refine_clopen(&r, 1), Err(Error::LevelBelowCurrent { .. })));
}

#[test]
fn diameter_examples() {
    let d = d2();
    assert_eq!(d.path_metric_diam(&ClopenSet::from_atom(Atom::new(2, 0, 1))).unwrap(), frac(1, 4));
    assert_eq!(d.path_metric_diam(&ClopenSet::whole()).unwrap(), frac(1, 1));
    let a = d.atom_of_path(&digits(&[0, 0])).unwrap();
    let b = d.atom_of_path(&digits(&[0, 1])).unwrap();
    let s = ClopenSet::from_atoms(2, [a, b]).unwrap();
    assert_eq!(d.path_metric_diam(&s).unwrap(), frac(1, 2));
    let c = d.atom_of_path(&digits(&[1, 0])).unwrap();
    assert_eq!(d.path_metric_diam(&ClopenSet::from_atoms(2, [a, c]).unwrap()).unwrap(), frac(1, 1));
    assert_eq!(d.path_metric_diam(&ClopenSet::empty(2)), Err(Error::EmptySet));
}

#[test]
fn evaluation_examples() {
    let d = d2();
    let one = ClopenSet::from_atom(d.atom_of_path(&digits(&[1])).unwrap());
    let f = CylinderFunction::indicator(&d, &one);
    assert_eq!(d.evaluate_function(&f, &PointPrefix::all_min()).unwrap(), 0);
    assert_eq!(d.evaluate_function(&f, &PointPrefix::all_max()).unwrap(), 1);
    let g = CylinderFunction::new(&d, 1, vec![vec![3, -2]]).unwrap();
    let x = PointPrefix { path: digits(&[1]), tail: Tail::Unspecified };
    assert_eq!(d.evaluate_function(&g, &x).unwrap(), -2);
    let short = PointPrefix { path: vec![], tail: Tail::Unspecified };
    assert_eq!(d.evaluate_function(&g, &short), Err(Error::UnderspecifiedPoint));
}

#[test]
fn max_point_maps_to_min_point() {
    for d in [d2(), m2112(), m11()] {
        let y = d.point_successor(&PointPrefix::all_max()).unwrap();
        for m in 0..5 {
            assert_eq!(d.point_atom(&y, m).unwrap(), d.point_atom(&PointPrefix::all_min(), m).unwrap());
        }
        let back = d.point_predecessor(&PointPrefix::all_min()).unwrap();
        assert_eq!(back, PointPrefix::all_max());
    }
}

/// On the dyadic odometer atom `i` of level `n` is the residue `i mod 2^n`
/// read with the first digit least significant, and the map is `+1`.
#[test]
fn odometer_matches_addition() {
    let d = d2();
    for n in 1..=6u32 {
        let modulus = 1u64 << n;
        for i in 0..modulus {
            let bits: Vec<usize> = (0..n).map(|k| ((i >> k) & 1) as usize).collect();
            let a = d.atom_of_path(&digits(&bits)).unwrap();
            assert_eq!(a.index, i);
            let img = d.image(&ClopenSet::from_atom(a)).unwrap();
            let img = d.refine_clopen(&img, n as usize).unwrap();
            let expect = Atom::new(n as usize, 0, (i + 1) % modulus);
            if i + 1 < modulus {
                assert_eq!(img.members().iter().copied().collect::<Vec<_>>(), vec![expect]);
            } else {
                assert!(img.members().contains(&expect));
            }
        }
    }
}

fn all_diagrams() -> Vec<OrderedBratteliDiagram> {
    vec![d2(), m2112(), m11(), OrderedBratteliDiagram::odometer(3)]
}

/// Level-n atoms are permuted by the map once tops are resolved one level deeper.
#[test]
fn vershik_bijective_at_depth() {
    for d in all_diagrams() {
        for n in 0..4 {
            let mut seen = std::collections::BTreeSet::new();
            let mut total = 0;
            for a in d.atoms(n) {
                let img = d.refine_clopen(&d.atom_step(a, Direction::Forward).unwrap(), n + 1).unwrap();
                let pre = d.refine_clopen(&ClopenSet::from_atom(a), n + 1).unwrap();
                assert_eq!(img.len(), pre.len());
                total += img.len();
                seen.extend(img.members().iter().copied());
            }
            assert_eq!(seen.len(), total);
            assert_eq!(total as u64, d.atom_count(n + 1));
        }
    }
}

/// The atom-level map agrees with the edge-level successor on explicit paths.
#[test]
fn atom_images_agree_with_path_successor() {
    for d in all_diagrams() {
        for n in 1..4 {
            for a in d.atoms(n + 2) {
                let x = PointPrefix { path: d.atom_path(a), tail: Tail::Unspecified };
                let Ok(y) = d.point_successor(&x) else { continue };
                let img = d.image(&ClopenSet::from_atom(d.ancestor(a, n))).unwrap();
                let ya = d.point_atom(&y, img.level()).unwrap();
                assert!(img.members().contains(&ya), "{a} -> {ya} not in image");
                let back = d.point_predecessor(&y).unwrap();
                assert_eq!(back.path, x.path);
            }
        }
    }
}

#[test]
fn preimage_inverts_image() {
    for d in all_diagrams() {
        for a in d.atoms(3) {
            let s = ClopenSet::from_atom(a);
            let back = d.preimage(&d.image(&s).unwrap()).unwrap();
            assert!(d.set_eq(&back, &s));
        }
    }
}

#[test]
fn first_hit_on_odometer() {
    let d = d2();
    let target = ClopenSet::from_atom(Atom::new(2, 0, 1));
    let hits = d.first_hit_partition(Atom::new(2, 0, 2), &target, Direction::Forward).unwrap();
    assert_eq!(hits, vec![(Atom::new(2, 0, 2), 3)]);
    let whole = d.first_hit_partition(Atom::ROOT, &target, Direction::Forward).unwrap();
    let mass: BigRational = whole.iter().map(|(a, _)| frac(1, 1 << a.level)).sum();
    assert_eq!(mass, frac(1, 1));
    for (a, k) in whole {
        let img = d.power_image(&ClopenSet::from_atom(a), k as i64).unwrap();
        assert!(d.is_subset(&img, &target));
    }
}

fn arb_diagram() -> impl Strategy<Value = OrderedBratteliDiagram> {
    prop_oneof![Just(d2()), Just(m2112()), Just(m11())]
}

proptest! {
    #[test]
    fn refine_then_canonical_round_trips(d in arb_diagram(), mask in 0u32..64, extra in 0usize..3) {
        let atoms: Vec<Atom> = d.atoms(2).collect();
        let chosen = atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| *a);
        let s = ClopenSet::from_atoms(2, chosen).unwrap();
        let r = d.refine_clopen(&s, 2 + extra).unwrap();
        prop_assert!(d.set_eq(&d.canonical(&r), &s));
        prop_assert_eq!(d.canonical(&r), d.canonical(&s));
        let c = d.complement(&s);
        prop_assert!(d.is_disjoint(&c, &s));
        prop_assert!(d.set_eq(&d.union(&c, &s), &ClopenSet::whole()));
    }

    #[test]
    fn diameter_matches_single_atom_containment(d in arb_diagram(), mask in 1u32..64) {
        let atoms: Vec<Atom> = d.atoms(2).collect();
        prop_assume!(mask % (1 << atoms.len()) != 0);
        let chosen = atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| *a);
        let s = d.refine_clopen(&ClopenSet::from_atoms(2, chosen).unwrap(), 3).unwrap();
        let diam = d.path_metric_diam(&s).unwrap();
        for m in 0..=3usize {
            let bound = frac(1, 1 << m);
            prop_assert_eq!(diam <= bound, d.within_one_atom(&s, m));
        }
    }
}
