//! Degree fixtures shared by the benchmarks.

use trop_refine::lattice::{validate_degree, DegreeSpec, LatticeVector};

fn v(x: i64, y: i64) -> LatticeVector {
    LatticeVector::new(x, y)
}

pub fn tri2() -> DegreeSpec {
    validate_degree(&[v(-2, 0), v(0, -2), v(2, 2)], true).unwrap()
}

pub fn quartic() -> DegreeSpec {
    validate_degree(&[v(-2, 0), v(-2, 0), v(0, -2), v(0, -2), v(2, 2), v(2, 2)], true).unwrap()
}

/// Plane blown up at one point: (−2,0), (0,−2), m·(2,2), (m−1)·(−2,−2).
pub fn blown_up(m: usize) -> DegreeSpec {
    let mut vs = vec![v(-2, 0), v(0, -2)];
    vs.extend(std::iter::repeat(v(2, 2)).take(m));
    vs.extend(std::iter::repeat(v(-2, -2)).take(m - 1));
    validate_degree(&vs, true).unwrap()
}
