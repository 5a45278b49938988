//! Fixed inputs shared by the benchmarks.

use cantorspeed::dimension::Mode;
use cantorspeed::speedup::CylinderEpimorphism;
use cantorspeed::{Atom, ClopenSet, OrderedBratteliDiagram};

pub fn d2() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::odometer(2)
}

pub fn m2112() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::stationary(vec![vec![2, 1], vec![1, 2]]).expect("primitive matrix")
}

pub fn m11() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::stationary(vec![vec![1, 1], vec![1, 1]]).expect("primitive matrix")
}

pub fn d2_onto_m11() -> CylinderEpimorphism {
    CylinderEpimorphism::new(d2(), m11(), vec![vec![1], vec![1]], 1, Mode::Exact).expect("valid epimorphism")
}

pub fn atom_set(level: usize, vertex: usize, index: u64) -> ClopenSet {
    ClopenSet::from_atom(Atom::new(level, vertex, index))
}
