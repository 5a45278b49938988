use cantorspeed::dimension::ergodic_measures;
use cantorspeed::speedup::*;
use cantorspeed::{Atom, ClopenSet, Direction, OrderedBratteliDiagram};
use proptest::prelude::*;

fn d2() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::odometer(2)
}

fn subset_of(n: usize, mask: u32) -> ClopenSet {
    ClopenSet::from_atoms(n, (0..1u64 << n).filter(|i| mask >> i & 1 == 1).map(|i| Atom::new(n, 0, i))).unwrap()
}

/// First return time to `a` on each atom of `a`, by direct stepping.
fn first_return(d: &OrderedBratteliDiagram, a: &ClopenSet) -> Vec<(Atom, u64)> {
    a.iter().flat_map(|&x| d.first_hit_partition(x, a, Direction::Forward).unwrap()).collect()
}

fn jump_on(d: &OrderedBratteliDiagram, parts: &[(Atom, u64)], x: Atom) -> u64 {
    parts.iter().find(|p| d.atom_in(x, &ClopenSet::from_atom(p.0))).map(|p| p.1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Disjoint sets of equal size in D2 at level 3 always give a verified
    /// speedup with positive jumps whose images cover the target.
    #[test]
    fn strong_speedups_verify(bits in 1u32..255, shift in 1u32..8) {
        let n = 3;
        let a_mask = bits;
        let c_mask = a_mask.rotate_left(shift) & 0xff | (a_mask.rotate_left(shift) >> 8);
        let c_mask = c_mask & 0xff;
        prop_assume!(a_mask & c_mask == 0 && a_mask.count_ones() == c_mask.count_ones());
        let d = d2();
        let (a, c) = (subset_of(n, a_mask), subset_of(n, c_mask));
        let map = strong_speedup(&d, &a, &c).unwrap();
        prop_assert!(map.entries.iter().all(|e| e.jump >= 1));
        let mus = ergodic_measures(&d).unwrap();
        let r = verify_speedup(&d, &map, &mus, Some(&c), &[]);
        prop_assert!(r.passed(), "{}", r);
    }

    /// Going from A to C and back lands in A again after a whole number of
    /// returns, and the round trip permutes the atoms of A.
    #[test]
    fn strong_round_trip_is_an_induced_power(bits in 1u32..255, shift in 1u32..8) {
        let n = 3;
        let c_mask = (bits.rotate_left(shift) | bits >> (8 - shift)) & 0xff;
        prop_assume!(bits & c_mask == 0 && bits.count_ones() == c_mask.count_ones());
        let d = d2();
        let (a, c) = (subset_of(n, bits), subset_of(n, c_mask));
        let there = strong_speedup(&d, &a, &c).unwrap();
        let back = strong_speedup(&d, &c, &a).unwrap();
        let ret = first_return(&d, &a);
        let deep = 8;
        let mut landed = std::collections::BTreeSet::new();
        for x in d.atoms(deep).filter(|&x| d.atom_in(x, &a)) {
            let p1 = there.jump_at(&d, x).unwrap();
            let y = *d.power_image(&ClopenSet::from_atom(x), p1 as i64).unwrap().iter().next().unwrap();
            let total = p1 + back.jump_at(&d, y).unwrap();
            // walk the first-return map until the round trip time is used up
            let mut t = 0;
            let mut z = x;
            while t < total {
                let r = jump_on(&d, &ret, z);
                z = *d.power_image(&ClopenSet::from_atom(z), r as i64).unwrap().iter().next().unwrap();
                t += r;
            }
            prop_assert_eq!(t, total);
            prop_assert!(landed.insert(z.index % (1 << deep)), "round trip is not injective");
        }
    }
}

#[test]
fn build_extends_earlier_stages() {
    let e = CylinderEpimorphism::identity(&d2()).unwrap();
    let short = build_speedup(&e, 2).unwrap();
    let long = build_speedup(&e, 3).unwrap();
    for entry in &short.map.entries {
        assert!(long.map.entries.contains(entry), "entry on {} was changed", entry.domain);
    }
    let d = d2();
    let old_top = short.stages.last().unwrap().p.top(&d);
    for entry in long.map.entries.iter().filter(|e| !short.map.entries.contains(e)) {
        assert!(d.atom_in(entry.domain, &old_top));
    }
}

#[test]
fn build_stage_cells_nest() {
    let e = CylinderEpimorphism::identity(&d2()).unwrap();
    let r = build_speedup(&e, 3).unwrap();
    assert!(r.conjugacy.respects_nesting(&e.target, &e.source));
}
