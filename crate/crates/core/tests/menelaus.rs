use num_traits::Zero;
use trop_refine::driver::{assemble_o, run_cycles, G0Cache, GraftSet};
use trop_refine::menelaus::*;
use trop_refine::tropcurve::{check_balancing, curve_parity, genus_and_simplicity, qi, CurveParity};
use trop_refine::*;

fn v(x: i64, y: i64) -> LatticeVector {
    LatticeVector::new(x, y)
}

fn quartic() -> DegreeSpec {
    validate_degree(&[v(-2, 0), v(-2, 0), v(0, -2), v(0, -2), v(2, 2), v(2, 2)], true).unwrap()
}

fn opts(k: usize) -> InitialOptions {
    InitialOptions { k_component: Some(k), allow_non_admissible: false }
}

/// The component of the quartic's initial data lying in the fourth quadrant
/// around the direction (1,−2), where the worked example places K.
fn fourth_quadrant(seed: u64) -> InitialData {
    let count = build_initial_data(&quartic(), (0, 1), seed).unwrap().k.count;
    (0..count)
        .filter_map(|k| build_initial_data_with(&quartic(), (0, 1), seed, &opts(k)).ok())
        .find(|d| d.k.in_cone(v(1, -2)))
        .unwrap()
}

#[test]
fn menelaus_sums() {
    let origin: Vec<OrientedLine> = [v(-2, 0), v(0, -2), v(2, 2)].iter().map(|&a| OrientedLine::new(a, qi(0))).collect();
    assert!(lambda_and_menelaus(&origin).1.is_zero());
    let vals = [2, 2, -4, 0, 0, 0];
    let dirs = quartic().vectors().to_vec();
    let ls: Vec<OrientedLine> = dirs.iter().zip(vals).map(|(&a, x)| OrientedLine::new(a, qi(x))).collect();
    assert!(lambda_and_menelaus(&ls).1.is_zero());
    let bad: Vec<OrientedLine> = [v(-2, 0), v(0, -2), v(2, 2)].iter().map(|&a| OrientedLine::new(a, qi(1))).collect();
    assert_eq!(lambda_and_menelaus(&bad).1, qi(3));
}

#[test]
fn completing_lines() {
    let ls = vec![OrientedLine::new(v(2, 2), qi(1)), OrientedLine::new(v(2, 2), qi(3)), OrientedLine::new(v(-4, -4), qi(-4))];
    assert_eq!(completing_line(&[0], &ls).unwrap(), ls[0]);
    assert_eq!(completing_line(&[0, 1], &ls).unwrap(), OrientedLine::new(v(4, 4), qi(4)));
    assert_eq!(completing_line(&[0, 1, 2], &ls), Err(Error::ZeroSum));
    let origin = vec![OrientedLine::new(v(-2, 0), qi(0)), OrientedLine::new(v(0, -2), qi(0))];
    assert!(completing_line(&[0, 1], &origin).unwrap().contains(&Point::origin()));
}

#[test]
fn worked_direction_is_a_candidate() {
    let d = fourth_quadrant(1);
    assert!(d.b_candidates.contains(&v(-2, -1)), "{:?}", d.b_candidates);
}

#[test]
fn admissibility_gate() {
    assert!(build_initial_data(&quartic(), (1, 0), 1).is_ok());
    let rect = validate_degree(&[v(2, 0), v(2, 0), v(-2, 0), v(-2, 0), v(0, 2), v(0, -2)], true).unwrap();
    assert_eq!(build_initial_data(&rect, (1, 0), 1).err(), Some(Error::NotAdmissible));
    let odd = validate_degree(&[v(-1, 0), v(0, -1), v(1, 1)], false).unwrap();
    assert_eq!(build_initial_data(&odd, (0, 1), 1).err(), Some(Error::NotEven));
}

#[test]
fn initial_data_invariants() {
    for seed in 1..=4 {
        let d = build_initial_data(&quartic(), (0, 1), seed).unwrap();
        assert!(lambda_and_menelaus(&d.lines).1.is_zero());
        assert!(d.lines.iter().all(|l| l.within(&d.rho0)));
        for &b in &d.b_candidates {
            assert_eq!(b.parity(), (0, 1));
            assert!(wedge(d.k.u1, b) < 0 && wedge(d.k.u2, b) <= 0);
        }
        // x0 lies strictly inside K
        assert!(d.x0.wedge_vec(d.k.u1) < qi(0));
        assert!(d.x0.wedge_vec(d.k.u2) > qi(0));
        let again = build_initial_data(&quartic(), (0, 1), seed).unwrap();
        assert_eq!(format!("{d:?}"), format!("{again:?}"));
    }
}

#[test]
fn worked_quartic_cycle() {
    let data = fourth_quadrant(1);
    let report = run_cycles(data.clone(), &G0Cache::new(1)).unwrap();
    assert_eq!(report.contributions.len(), 1);
    let c = &report.contributions[0];
    assert!(c.graft.subsets.is_empty());
    assert!(data.b_candidates.contains(&c.run.b));
    assert_eq!(c.value, LaurentPoly::parse("q^8 - 2*q^4 + 2 - 2*q^-4 + q^-8").unwrap());
    // replay through assemble_o with the ordering the walk found
    let ordering: Vec<usize> = c.order.iter().map(|&(m, _)| m.trailing_zeros() as usize).collect();
    let cd = assemble_o(&GraftSet { subsets: vec![] }, &ordering, c.run.b, &data).unwrap();
    match cycle_procedure(&cd).unwrap() {
        CycleOutcome::Cyclic { curve, .. } => {
            assert!(check_balancing(&curve).is_ok());
            assert_eq!(genus_and_simplicity(&curve), (1, true));
            assert_eq!(curve_parity(&curve), CurveParity::Parity((0, 1)));
            assert_eq!(curve.canonical_key(), c.curve.canonical_key());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn first_step_sign_violation() {
    // ε₁ (b ∧ a₁) < 0 on the first step
    let cd = CycleData {
        vectors: vec![v(-2, 0), v(0, -2), v(2, 2)],
        lines: vec![OrientedLine::new(v(-2, 0), qi(2)), OrientedLine::new(v(0, -2), qi(2)), OrientedLine::new(v(2, 2), qi(-4))],
        signs: vec![-1, 1, 1],
        x0: Point::new(qi(-5), qi(-1)),
        b: v(0, 1),
    };
    match cycle_procedure(&cd).unwrap() {
        CycleOutcome::Stopped { step, .. } => assert!(step <= 1),
        other => panic!("{other:?}"),
    }
}
