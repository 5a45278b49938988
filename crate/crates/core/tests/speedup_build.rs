use cantorspeed::dimension::{class_of, Mode};
use cantorspeed::speedup::*;
use cantorspeed::{Atom, ClopenSet, CylinderFunction, Error, OrderedBratteliDiagram, PointPrefix};

fn d2() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::odometer(2)
}

fn m11() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::stationary(vec![vec![1, 1], vec![1, 1]]).unwrap()
}

fn d2_to_m11() -> CylinderEpimorphism {
    CylinderEpimorphism::new(d2(), m11(), vec![vec![1], vec![1]], 1, Mode::Exact).unwrap()
}

fn set(level: usize, idx: &[u64]) -> ClopenSet {
    ClopenSet::from_atoms(level, idx.iter().map(|&i| Atom::new(level, 0, i))).unwrap()
}

fn class(d: &OrderedBratteliDiagram, s: &ClopenSet) -> cantorspeed::GroupClass {
    class_of(d, &CylinderFunction::indicator(d, s))
}

#[test]
fn epimorphism_validation() {
    assert!(CylinderEpimorphism::identity(&d2()).unwrap().is_identity());
    let e = d2_to_m11();
    // the unit of D2 at level 1 has sum 2, and goes to the heights (2,2) of level 2
    let u = e.map_class(&cantorspeed::dimension::order_unit(&d2(), 1));
    assert_eq!(u.level, 2);
    assert_eq!(u.sums, vec![2.into(), 2.into()]);
    let bad_unit = CylinderEpimorphism::new(d2(), d2(), vec![vec![2]], 0, Mode::Exact);
    assert!(matches!(bad_unit, Err(Error::InvalidEpimorphism(_))));
    let bad_shape = CylinderEpimorphism::new(d2(), m11(), vec![vec![1], vec![0]], 1, Mode::Exact);
    assert!(matches!(bad_shape, Err(Error::InvalidEpimorphism(_))));
}

#[test]
fn mirror_identity_without_pins() {
    let e = CylinderEpimorphism::identity(&d2()).unwrap();
    let parts = [set(1, &[0]), set(1, &[1])];
    let out = mirror_partition(&e, MirrorDirection::XtoY, &parts, &ClopenSet::whole(), &[]).unwrap();
    let d = d2();
    assert!(d.set_eq(&out[0], &parts[0]) && d.set_eq(&out[1], &parts[1]));
}

#[test]
fn mirror_identity_with_pin_swaps_a_pair() {
    let d = d2();
    let e = CylinderEpimorphism::identity(&d).unwrap();
    let parts = [set(1, &[0]), set(1, &[1])];
    let pins = [(PointPrefix::all_max(), 0)];
    let out = mirror_partition(&e, MirrorDirection::XtoY, &parts, &ClopenSet::whole(), &pins).unwrap();
    assert!(d.point_in(&PointPrefix::all_max(), &out[0]).unwrap());
    for (a, b) in parts.iter().zip(&out) {
        assert_eq!(class(&d, a).push_to(&d, 4), class(&d, b).push_to(&d, 4));
    }
    // the all-max point 11… is exchanged with its successor's neighbourhood 00…
    assert!(d.set_eq(&out[0], &set(2, &[2, 3])));
    assert!(d.set_eq(&out[1], &set(2, &[0, 1])));
}

#[test]
fn mirror_split_of_a_cylinder() {
    let d = d2();
    let e = CylinderEpimorphism::identity(&d).unwrap();
    let parts = [set(2, &[0]), set(2, &[2])];
    let out = mirror_partition(&e, MirrorDirection::YtoX, &parts, &set(1, &[0]), &[]).unwrap();
    for s in &out {
        assert_eq!(class(&d, s).push_to(&d, 2).sums, vec![1.into()]);
    }
}

#[test]
fn mirror_across_a_proper_epimorphism() {
    let e = d2_to_m11();
    let (dy, dx) = (d2(), m11());
    let parts = [set(2, &[0, 1]), set(2, &[2, 3])];
    let out = mirror_partition(&e, MirrorDirection::YtoX, &parts, &ClopenSet::whole(), &[]).unwrap();
    assert_eq!(out.len(), 2);
    assert!(dx.is_disjoint(&out[0], &out[1]));
    for (b, a) in parts.iter().zip(&out) {
        assert!(e.sets_match(b, a));
    }
    let back = mirror_partition(&e, MirrorDirection::XtoY, &out, &ClopenSet::whole(), &[]).unwrap();
    for (a, b) in out.iter().zip(&back) {
        assert!(e.sets_match(b, a));
        assert!(!dy.canonical(b).is_empty());
    }
}

#[test]
fn build_identity_d2_three_stages() {
    let d = d2();
    let e = CylinderEpimorphism::identity(&d).unwrap();
    let r = build_speedup(&e, 3).unwrap();
    assert_eq!(r.stages.len(), 3);
    for s in &r.stages {
        assert!(s.invariants.all(), "stage {}: {:?}", s.index, s.invariants);
    }
    // the mirror of an identity is the identity
    for c in r.conjugacy.cells() {
        assert!(d.set_eq(&c.x, &c.y));
    }
    // off the designated chain the speedup is the map itself
    assert!(r.map.entries.iter().all(|e| e.jump == 1));
    assert_eq!(r.map.designated_point, Some((PointPrefix::all_max(), 1)));
    let report = verify_build(&e, &r);
    assert!(report.passed(), "{report}");
    assert!(report.conjugacy_cells > 0);
}

#[test]
fn build_d2_onto_m11_two_stages() {
    let e = d2_to_m11();
    let r = build_speedup(&e, 2).unwrap();
    for s in &r.stages {
        assert!(s.invariants.all(), "stage {}: {:?}", s.index, s.invariants);
    }
    let report = verify_build(&e, &r);
    assert!(report.passed(), "{report}");
}

#[test]
fn build_rejects_zero_depth() {
    let e = CylinderEpimorphism::identity(&d2()).unwrap();
    assert!(build_speedup(&e, 0).is_err());
}

fn cell(x: ClopenSet, y: ClopenSet) -> ConjugacyCell {
    ConjugacyCell { column: 0, level: 0, x, y }
}

fn atoms(d: &OrderedBratteliDiagram, n: usize) -> Vec<ClopenSet> {
    d.atoms(n).map(ClopenSet::from_atom).collect()
}

#[test]
fn profile_identity_is_a_bijection() {
    let d = d2();
    let f: Vec<_> = atoms(&d, 2).into_iter().map(|a| cell(a.clone(), a)).collect();
    let r = ergodic_profile_compare(&d, &d, &f).unwrap();
    assert_eq!((r.source_measures, r.target_measures), (1, 1));
    assert_eq!(r.columns[0].as_ref().unwrap().len(), 1);
    assert!(r.columns[0].as_ref().unwrap()[0].to_string() == "1");
    assert_eq!(r.bijection, Some(true));
    assert!(r.passed());
}

#[test]
fn profile_natural_bijection_d2_m11() {
    let (a, b) = (d2(), m11());
    // both systems weigh every level-3 atom 1/8
    let f: Vec<_> = atoms(&a, 3).into_iter().zip(atoms(&b, 3)).map(|(x, y)| cell(x, y)).collect();
    assert_eq!(f.len(), 8);
    let r = ergodic_profile_compare(&a, &b, &f).unwrap();
    assert_eq!(r.bijection, Some(true), "{r}");
}

#[test]
fn profile_of_a_built_conjugacy() {
    let e = d2_to_m11();
    let built = build_speedup(&e, 2).unwrap();
    let r = ergodic_profile_compare(&e.target, &e.source, built.conjugacy.cells()).unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn profile_refutes_unequal_pairing() {
    let (a, b) = (d2(), m11());
    let x = atoms(&a, 2);
    // a partition with measures 1/2, 1/4, 1/8, 1/8 against four atoms of measure 1/4
    let mut y = vec![ClopenSet::from_atom(Atom::new(1, 0, 0)), ClopenSet::from_atom(Atom::new(2, 1, 1))];
    y.extend(b.descendants(Atom::new(2, 0, 1), 3).into_iter().map(ClopenSet::from_atom));
    assert_eq!(y.len(), 4);
    let f: Vec<_> = x.into_iter().zip(y).map(|(x, y)| cell(x, y)).collect();
    let r = ergodic_profile_compare(&a, &b, &f).unwrap();
    assert_eq!(r.unmatched, vec![0]);
    assert_eq!(r.bijection, Some(false));
    assert!(!r.passed());
}
