use cantorspeed::dimension::{ergodic_measures, Mode};
use cantorspeed::format::*;
use cantorspeed::speedup::*;
use cantorspeed::{Atom, ClopenSet, Error, OrderedBratteliDiagram};

#[test]
fn system_forms() {
    let d = parse_system("odometer = 2").unwrap();
    assert_eq!(d.vertex_count(3), 1);
    let m = parse_system("stationary = [[2, 1], [1, 2]]").unwrap();
    assert_eq!(m.vertex_count(2), 2);
    let e = parse_system("incidence = [[[2]], [[2]]]\ntail = \"stationary\"").unwrap();
    assert_eq!(e.vertex_count(5), 1);
}

#[test]
fn non_square_matrix_is_a_parse_error() {
    let err = parse_system("stationary = [[2, 1], [1]]").unwrap_err();
    match err {
        Error::Parse(m) => assert!(m.contains("stationary"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn syntax_errors_carry_a_line() {
    let err = parse_system("name = \"x\"\nstationary = [[2, 1],\n  oops]").unwrap_err();
    let Error::Parse(m) = err else { panic!() };
    assert!(m.contains("line 3"), "{m}");
}

#[test]
fn unknown_fields_are_named() {
    let Error::Parse(m) = parse_system("odometr = 2").unwrap_err() else { panic!() };
    assert!(m.contains("odometr"), "{m}");
}

#[test]
fn sets_by_atom_and_path_agree() {
    let d = OrderedBratteliDiagram::odometer(2);
    let a = parse_set(&d, "atoms = [\"L2:0:1\"]").unwrap();
    let p = parse_set(&d, "paths = [[[0, 1], [0, 0]]]").unwrap();
    assert!(d.set_eq(&a, &p));
    let again = parse_set(&d, &write_set(&a)).unwrap();
    assert!(d.set_eq(&a, &again));
    assert!(parse_set(&d, "atoms = [\"L2:0:9\"]").is_err());
}

#[test]
fn functions_by_columns_and_entries_agree() {
    let d = OrderedBratteliDiagram::odometer(2);
    let cols = parse_function(&d, "level = 2\nvalues = [[0, 1, -1, 0]]").unwrap();
    let sparse =
        parse_function(&d, "[[entry]]\natom = \"L2:0:1\"\nvalue = 1\n[[entry]]\natom = \"L2:0:2\"\nvalue = -1\n").unwrap();
    assert_eq!(cols.values(), sparse.values());
    let again = parse_function(&d, &write_function(&cols)).unwrap();
    assert_eq!(again.values(), cols.values());
}

#[test]
fn strong_jump_table_round_trips() {
    let d = OrderedBratteliDiagram::odometer(2);
    let a = ClopenSet::from_atom(Atom::new(3, 0, 0));
    let c = ClopenSet::from_atom(Atom::new(3, 0, 5));
    let map = strong_speedup(&d, &a, &c).unwrap();
    let text = write_jump_table(&map);
    let back = parse_jump_table(&d, &text).unwrap();
    assert_eq!(back.entries, map.entries);
    assert_eq!(write_jump_table(&back), text);
    let r = verify_speedup(&d, &back, &ergodic_measures(&d).unwrap(), Some(&c), &[]);
    assert!(r.passed(), "{r}");
}

#[test]
fn tampered_jump_table_fails_verification() {
    let d = OrderedBratteliDiagram::odometer(2);
    let a = ClopenSet::from_atom(Atom::new(3, 0, 0));
    let c = ClopenSet::from_atom(Atom::new(3, 0, 5));
    let text = write_jump_table(&strong_speedup(&d, &a, &c).unwrap()).replace("L3:0:5", "L3:0:6");
    let back = parse_jump_table(&d, &text).unwrap();
    let r = verify_speedup(&d, &back, &ergodic_measures(&d).unwrap(), Some(&c), &[]);
    assert!(!r.passed());
}

#[test]
fn built_conjugacy_round_trips_and_reverifies() {
    let d2 = OrderedBratteliDiagram::odometer(2);
    let m11 = OrderedBratteliDiagram::stationary(vec![vec![1, 1], vec![1, 1]]).unwrap();
    let e = CylinderEpimorphism::new(d2.clone(), m11.clone(), vec![vec![1], vec![1]], 1, Mode::Exact).unwrap();
    let built = build_speedup(&e, 2).unwrap();
    let text = write_conjugacy(&built.conjugacy);
    let conj = parse_conjugacy(&m11, &d2, &text).unwrap();
    assert_eq!(write_conjugacy(&conj), text);
    let map = parse_jump_table(&m11, &write_jump_table(&built.map)).unwrap();
    let reloaded = BuildResult { map, conjugacy: conj, stages: built.stages.clone() };
    let r = verify_build(&e, &reloaded);
    assert!(r.passed(), "{r}");
}
