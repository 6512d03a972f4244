use std::sync::OnceLock;

use trop_refine::driver::*;
use trop_refine::menelaus::{build_initial_data, cycle_procedure, CycleOutcome, InitialOptions};
use trop_refine::orientkit::{analyze, refined_multiplicity_closed, refined_multiplicity_sum};
use trop_refine::*;

fn v(x: i64, y: i64) -> LatticeVector {
    LatticeVector::new(x, y)
}

fn quartic() -> DegreeSpec {
    validate_degree(&[v(-2, 0), v(-2, 0), v(0, -2), v(0, -2), v(2, 2), v(2, 2)], true).unwrap()
}

fn blown_up(m: usize) -> DegreeSpec {
    let mut vs = vec![v(-2, 0), v(0, -2)];
    vs.extend(std::iter::repeat(v(2, 2)).take(m));
    vs.extend(std::iter::repeat(v(-2, -2)).take(m - 1));
    validate_degree(&vs, true).unwrap()
}

fn m3_report() -> &'static G1Report {
    static R: OnceLock<G1Report> = OnceLock::new();
    R.get_or_init(|| g1_detailed(&blown_up(3), (0, 1), 2, &InitialOptions::default()).unwrap())
}

#[test]
fn graft_sets_of_the_blown_up_plane() {
    let d = blown_up(2);
    let hs = enumerate_h(&d);
    assert!(hs.contains(&GraftSet { subsets: vec![] }));
    // element 2 is (2,2), element 4 is (−2,−2)
    assert!(hs.contains(&GraftSet { subsets: vec![1 << 2] }));
    assert!(hs.contains(&GraftSet { subsets: vec![1 << 4] }));
    // {(2,2),(−2,−2)} sums to zero
    assert!(!hs.iter().any(|h| h.subsets.contains(&((1 << 2) | (1 << 4)))));
    for h in &hs {
        let mut seen = 0u64;
        for &s in &h.subsets {
            assert_eq!(seen & s, 0);
            seen |= s;
        }
        assert_ne!(seen, (1 << d.len()) - 1);
        assert!(h.sums(&d).iter().all(|c| !c.is_zero()));
    }
}

#[test]
fn assembling_cycle_data() {
    let d = blown_up(2);
    let data = build_initial_data(&d, (0, 1), 1).unwrap();
    let b = data.b_candidates[0];
    let plain = assemble_o(&GraftSet { subsets: vec![] }, &[0, 1, 2, 3, 4], b, &data);
    if let Ok(cd) = plain {
        assert!(cd.signs.iter().all(|&s| s == 1));
        assert_eq!(cd.vectors, d.vectors());
    }
    let single = GraftSet { subsets: vec![1 << 2] };
    if let Ok(cd) = assemble_o(&single, &[0, 1, 2, 3], b, &data) {
        assert_eq!(cd.signs[0], -1);
        assert_eq!(cd.lines[0], data.lines[2]);
    }
    assert!(matches!(assemble_o(&single, &[0, 0, 1, 2], b, &data), Err(Error::InvalidCurve(_))));
}

#[test]
fn invariant_values() {
    let expected = LaurentPoly::parse("q^8 - 2*q^4 + 2 - 2*q^-4 + q^-8").unwrap();
    for seed in [1, 4, 9] {
        assert_eq!(g1(&quartic(), (0, 1), seed).unwrap(), expected);
        assert_eq!(g1(&blown_up(2), (0, 1), seed).unwrap(), LaurentPoly::sinh_factor(2) * LaurentPoly::cosh_factor(4));
    }
    let m3 = &m3_report().value;
    assert_eq!(m3, &LaurentPoly::parse("2*q^10 - 6*q^6 + 4*q^2 - 4*q^-2 + 6*q^-6 - 2*q^-10").unwrap());
    assert!(m3.exponents_congruent(blown_up(3).doubled_area()));
}

#[test]
fn contributions_replay() {
    let r = m3_report();
    for c in &r.contributions {
        let cd = trop_refine::menelaus::run_data(&r.data, &r.items, &c.run);
        match cycle_procedure(&cd).unwrap() {
            CycleOutcome::Cyclic { curve, .. } => assert_eq!(curve.canonical_key(), c.curve.canonical_key()),
            other => panic!("{other:?}"),
        }
        assert_eq!(c.value, &c.mu_t * &c.g0_factor);
    }
}

#[test]
fn grafting_is_multiplicative() {
    let r = m3_report();
    let grafted = grafted_curves(r).unwrap();
    let total: LaurentPoly = grafted.iter().map(|g| g.product.clone()).sum();
    assert_eq!(total, r.value);
    for g in &grafted {
        let a = analyze(&g.curve, (0, 1), None).unwrap();
        assert_eq!(refined_multiplicity_closed(&a), g.product);
        assert_eq!(refined_multiplicity_sum(&g.curve, &a).unwrap(), g.product);
    }
}

#[test]
fn empty_graft_is_identity() {
    let r = g1_detailed(&quartic(), (0, 1), 1, &InitialOptions::default()).unwrap();
    let grafted = grafted_curves(&r).unwrap();
    assert_eq!(grafted.len(), 1);
    let c = &r.contributions[0];
    assert!(c.graft.subsets.is_empty());
    assert_eq!(grafted[0].curve.canonical_key(), c.curve.canonical_key());
}
