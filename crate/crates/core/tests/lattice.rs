use proptest::prelude::*;
use trop_refine::lattice::*;
use trop_refine::{Error, LatticePolygon, LatticeVector};

fn v(x: i64, y: i64) -> LatticeVector {
    LatticeVector::new(x, y)
}

fn tri(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> LatticePolygon {
    LatticePolygon::convex_hull(&[v(a.0, a.1), v(b.0, b.1), v(c.0, c.1)]).unwrap()
}

#[test]
fn wedge_values() {
    assert_eq!(wedge(v(1, 0), v(0, 1)), 1);
    assert_eq!(wedge(v(2, 2), v(2, 2)), 0);
    assert_eq!(wedge(v(2, 2), v(2, -2)), -8);
}

#[test]
fn lengths_and_parities() {
    assert_eq!(lattice_length(v(2, 0)), Ok(2));
    assert_eq!(lattice_length(v(2, 2)), Ok(2));
    assert_eq!(lattice_length(v(0, 0)), Err(Error::InvalidVector));
    assert_eq!(primitive_and_parity(v(2, 2)), Ok((v(1, 1), (1, 1))));
    assert_eq!(primitive_and_parity(v(0, -2)), Ok((v(0, -1), (0, 1))));
    assert_eq!(primitive_and_parity(v(-6, 4)), Ok((v(-3, 2), (1, 0))));
    assert_eq!(primitive_and_parity(v(0, 0)), Err(Error::InvalidVector));
}

#[test]
fn newton_polygons() {
    let p = newton_polygon(&[v(-2, 0), v(0, -2), v(2, 2)]).unwrap();
    assert_eq!(p, tri((0, 0), (2, 0), (0, 2)));
    let q = newton_polygon(&[v(-2, 0), v(-2, 0), v(0, -2), v(0, -2), v(2, 2), v(2, 2)]).unwrap();
    assert_eq!(q, tri((0, 0), (4, 0), (0, 4)));
    assert_eq!(newton_polygon(&[v(1, 0), v(-1, 0)]), Err(Error::Degenerate));
    assert_eq!(newton_polygon(&[v(1, 0), v(0, 1)]), Err(Error::NotBalanced));
}

#[test]
fn metrics() {
    assert_eq!(polygon_metrics(&tri((0, 0), (4, 0), (0, 4))), (16, 12, 3));
    assert_eq!(polygon_metrics(&tri((0, 0), (2, 0), (0, 2))), (4, 6, 0));
    assert_eq!(polygon_metrics(&tri((0, 0), (6, 0), (0, 6))), (36, 18, 10));
    assert_eq!(interior_points_with_parity(&tri((0, 0), (4, 0), (0, 4)), (0, 0)), 0);
    assert_eq!(interior_points_with_parity(&tri((0, 0), (6, 0), (0, 6)), (0, 0)), 1);
    assert_eq!(interior_points_with_parity(&tri((0, 0), (2, 0), (1, 2)), (1, 1)), 1);
}

#[test]
fn degrees() {
    let q = validate_degree(&[v(-2, 0), v(-2, 0), v(0, -2), v(0, -2), v(2, 2), v(2, 2)], true).unwrap();
    assert_eq!((q.doubled_area(), q.lattice_perimeter(), q.half_interior_count()), (16, 12, Some(0)));
    let t = validate_degree(&[v(-2, 0), v(0, -2), v(2, 2)], true).unwrap();
    assert_eq!((t.doubled_area(), t.lattice_perimeter(), t.half_interior_count()), (4, 6, Some(0)));
    assert_eq!(validate_degree(&[v(-1, 0), v(0, -1), v(1, 1)], true).err(), Some(Error::NotEven));
    assert!(validate_degree(&[v(-1, 0), v(0, -1), v(1, 1)], false).is_ok());
}

#[test]
fn admissibility() {
    let q = validate_degree(&[v(-2, 0), v(-2, 0), v(0, -2), v(0, -2), v(2, 2), v(2, 2)], true).unwrap();
    assert!(q.is_admissible((1, 0)) && q.is_admissible((0, 1)) && q.is_admissible((1, 1)));
    let rect = validate_degree(&[v(2, 0), v(-2, 0), v(0, 2), v(0, -2)], true).unwrap();
    assert!(!rect.is_admissible((1, 0)) && !rect.is_admissible((0, 1)));
    assert!(rect.is_admissible((1, 1)));
}

fn arb_polygon() -> impl Strategy<Value = LatticePolygon> {
    prop::collection::vec((-8i64..=8, -8i64..=8), 3..9)
        .prop_filter_map("degenerate hull", |ps| LatticePolygon::convex_hull(&ps.iter().map(|&(x, y)| v(x, y)).collect::<Vec<_>>()).ok())
}

proptest! {
    #[test]
    fn wedge_antisymmetric(a in (-50i64..50, -50i64..50), b in (-50i64..50, -50i64..50)) {
        let (a, b) = (v(a.0, a.1), v(b.0, b.1));
        prop_assert_eq!(wedge(a, b), -wedge(b, a));
        prop_assert_eq!(wedge(a, a), 0);
    }

    #[test]
    fn parity_classes_partition_interior(p in arb_polygon()) {
        let total: i64 = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&c| interior_points_with_parity(&p, c)).sum();
        prop_assert_eq!(total, p.interior_count());
        prop_assert_eq!(p.doubled_area(), 2 * p.interior_count() + p.boundary_count() - 2);
    }

    #[test]
    fn newton_polygon_recovers_edges(p in arb_polygon()) {
        // edges rotated clockwise form a balanced degree whose polygon is p up to translation
        let vecs: Vec<LatticeVector> = p.edges().iter().map(|e| e.rot_cw()).collect();
        let q = newton_polygon(&vecs).unwrap();
        prop_assert_eq!(q, p.translate(-p.lex_min_vertex()));
    }
}
