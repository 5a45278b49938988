use cantorspeed::dimension::ergodic_measures;
use cantorspeed::speedup::*;
use cantorspeed::{Atom, ClopenSet, OrderedBratteliDiagram};
use num_rational::BigRational;

fn d2() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::odometer(2)
}

fn m2112() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::stationary(vec![vec![2, 1], vec![1, 2]]).unwrap()
}

fn set(level: usize, idx: &[u64]) -> ClopenSet {
    ClopenSet::from_atoms(level, idx.iter().map(|&i| Atom::new(level, 0, i))).unwrap()
}

/// Odometer oracle: the level-`n` atom of index `i` is the residue class of
/// `i` mod `2^n` and the map is `+1`; the jump from `x` into the class `g`
/// is the least `t > 0` with `x + t ≡ g`.
fn odometer_jump(n: u32, x: u64, g: u64) -> u64 {
    let m = 1u64 << n;
    (1..=m).find(|t| (x + t) % m == g).unwrap()
}

#[test]
fn strong_speedup_forward_neighbour() {
    let d = d2();
    let map = strong_speedup(&d, &set(2, &[1]), &set(2, &[2])).unwrap();
    assert_eq!(map.len(), 1);
    assert_eq!(map.entries[0].jump, 1);
    assert_eq!(odometer_jump(2, 1, 2), 1);
}

#[test]
fn strong_speedup_wraps_around() {
    let d = d2();
    let map = strong_speedup(&d, &set(2, &[2]), &set(2, &[1])).unwrap();
    assert!(map.entries.iter().all(|e| e.jump == 3));
    assert_eq!(odometer_jump(2, 2, 1), 3);
    assert!(d.set_eq(&map.image_cover(&d), &set(2, &[1])));
}

#[test]
fn strong_speedup_pairs_in_order() {
    let d = d2();
    let map = strong_speedup(&d, &set(2, &[1, 2]), &set(2, &[0, 3])).unwrap();
    let mut jumps: Vec<(u64, u64)> = map.entries.iter().map(|e| (e.domain.index, e.jump)).collect();
    jumps.sort();
    assert_eq!(jumps, vec![(1, odometer_jump(2, 1, 0)), (2, odometer_jump(2, 2, 3))]);
    assert_eq!(jumps, vec![(1, 3), (2, 1)]);
    let mus = ergodic_measures(&d).unwrap();
    assert!(verify_speedup(&d, &map, &mus, Some(&set(2, &[0, 3])), &[]).passed());
}

#[test]
fn strong_speedup_rejects_unequal_classes() {
    let d = d2();
    let err = strong_speedup(&d, &set(1, &[0]), &set(2, &[3])).unwrap_err();
    assert!(matches!(err, cantorspeed::Error::NotCoboundary));
}

#[test]
fn strong_speedup_brute_force_level_three() {
    let d = d2();
    let mus = ergodic_measures(&d).unwrap();
    for i in 0..8u64 {
        for g in 0..8u64 {
            if i == g {
                continue;
            }
            let map = strong_speedup(&d, &set(3, &[i]), &set(3, &[g])).unwrap();
            for e in &map.entries {
                // every residue lifted to 2^6 obeys the oracle
                for x in 0..64u64 {
                    if d.atom_in(Atom::new(6, 0, x), &ClopenSet::from_atom(e.domain)) {
                        assert_eq!(e.jump, odometer_jump(3, x % 8, g));
                    }
                }
            }
            let r = verify_speedup(&d, &map, &mus, Some(&set(3, &[g])), &[]);
            assert!(r.passed(), "{i}->{g}: {r}");
        }
    }
}

#[test]
fn partial_speedup_examples() {
    let d = d2();
    let mus = ergodic_measures(&d).unwrap();
    let map = partial_speedup(&d, &mus, &set(2, &[3]), &set(2, &[0, 2])).unwrap();
    assert!(map.entries.iter().all(|e| e.jump == 1));
    assert!(d.set_eq(&map.image_cover(&d), &set(2, &[0])));
    let map = partial_speedup(&d, &mus, &set(2, &[0]), &set(2, &[1, 2, 3])).unwrap();
    assert!(map.entries.iter().all(|e| e.jump == 1));
    assert!(d.set_eq(&map.image_cover(&d), &set(2, &[1])));
    assert!(verify_speedup(&d, &map, &mus, None, &[]).passed());
}

#[test]
fn partial_speedup_on_m2112() {
    let d = m2112();
    let mus = ergodic_measures(&d).unwrap();
    let b = ClopenSet::from_atom(Atom::new(1, 0, 0));
    let a_atom = d.atoms(2).find(|&x| d.ancestor(x, 1) == Atom::new(1, 1, 0)).unwrap();
    let a = ClopenSet::from_atom(a_atom);
    assert_eq!(mus[0].set_measure(&a).to_rational(), Some(BigRational::new(1.into(), 6.into())));
    let map = partial_speedup(&d, &mus, &a, &b).unwrap();
    assert!(d.is_subset(&map.image_cover(&d), &b));
    assert!(d.set_eq(&map.domain_cover, &a));
    assert!(verify_speedup(&d, &map, &mus, None, &[]).passed());
}

#[test]
fn partial_speedup_needs_a_gap() {
    let d = d2();
    let mus = ergodic_measures(&d).unwrap();
    let err = partial_speedup(&d, &mus, &set(1, &[0]), &set(1, &[1])).unwrap_err();
    assert!(matches!(err, cantorspeed::Error::MeasureGapMissing(_)));
}

#[test]
fn infinitesimal_speedup_on_m2112() {
    let d = m2112();
    let mus = ergodic_measures(&d).unwrap();
    let a = ClopenSet::from_atom(Atom::new(1, 0, 0));
    let b = ClopenSet::from_atom(Atom::new(1, 1, 0));
    assert!(strong_speedup(&d, &a, &b).is_err());
    let r = infinitesimal_speedup(&d, &mus, &a, &b, None, 4).unwrap();
    assert_eq!(r.remainder_a.len(), 1);
    let rem = *r.remainder_a.iter().next().unwrap();
    assert_eq!(rem.level, 5);
    let m = mus[0].set_measure(&r.remainder_a).to_rational().unwrap();
    assert!(m <= BigRational::new(1.into(), 81.into()));
    assert_eq!(mus[0].set_measure(&r.remainder_b), mus[0].set_measure(&r.remainder_a));
    assert!(d.point_in(&r.x0, &r.remainder_a).unwrap());
    assert!(d.point_in(&r.y0, &r.remainder_b).unwrap());
    assert!(d.set_eq(&r.map.domain_cover, &d.difference(&a, &r.remainder_a)));
    assert!(d.set_eq(&r.map.image_cover(&d), &d.difference(&b, &r.remainder_b)));
    let rep = verify_speedup(&d, &r.map, &mus, Some(&d.difference(&b, &r.remainder_b)), &[]);
    assert!(rep.passed(), "{rep}");
}

#[test]
fn infinitesimal_speedup_with_coboundary_difference() {
    let d = d2();
    let mus = ergodic_measures(&d).unwrap();
    let (a, b) = (set(2, &[1]), set(2, &[2]));
    let r = infinitesimal_speedup(&d, &mus, &a, &b, None, 3).unwrap();
    let rep = verify_speedup(&d, &r.map, &mus, Some(&d.difference(&b, &r.remainder_b)), &[]);
    assert!(rep.passed(), "{rep}");
    let strong = strong_speedup(&d, &a, &b).unwrap();
    for e in &r.map.entries {
        assert!(d.atom_in(e.domain, &strong.domain_cover));
    }
}

#[test]
fn infinitesimal_speedup_needs_equal_measure() {
    let d = d2();
    let mus = ergodic_measures(&d).unwrap();
    let err = infinitesimal_speedup(&d, &mus, &set(1, &[0]), &set(2, &[3]), None, 2).unwrap_err();
    assert!(matches!(err, cantorspeed::Error::NotInfinitesimal(_)));
}

#[test]
fn corrupted_entry_is_localised() {
    let d = d2();
    let mus = ergodic_measures(&d).unwrap();
    let mut map = strong_speedup(&d, &set(3, &[1, 2]), &set(3, &[5, 6])).unwrap();
    let victim = map.entries[0].domain;
    map.entries[0].image = ClopenSet::from_atom(Atom::new(2, 0, 1));
    let r = verify_speedup(&d, &map, &mus, None, &[]);
    assert_eq!(r.measure_failures, vec![victim]);
    assert!(!r.passed());
}
