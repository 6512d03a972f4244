//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trop_refine::driver::{self, grafted_curves, G1Report};
use trop_refine::menelaus::{
    build_initial_data, build_initial_data_with, cycle_procedure, hat_degree, lambda_and_menelaus, run_data,
    CycleOutcome, InitialOptions,
};
use trop_refine::oracle::{self, OracleG1};
use trop_refine::orientkit::{analyze, enumerate_kits, quantum_index, refined_multiplicity_closed, refined_multiplicity_sum, welschinger_sign};
use trop_refine::tropcurve::qi;
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

const PARITY: Parity = (0, 1);

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The closed triple sum for the blown-up plane, summed term by term.
fn triple_sum(m: i64) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for sp in 2..=m {
        for sm in 0..=sp - 2 {
            for k in 1..=sp - sm - 1 {
                let c = binom(m, sp) * binom(m - 1, sm) * if (m - sp + sm) % 2 == 0 { 1 } else { -1 };
                let e = 4 * sp - 4 * sm - 2 * k - 2;
                let term = (LaurentPoly::monomial(1, 4 * k) - LaurentPoly::monomial(1, -4 * k))
                    * (LaurentPoly::monomial(1, 2 * e) + LaurentPoly::monomial(1, -2 * e));
                out = out + term.scale(c);
            }
        }
    }
    out
}

struct Case {
    name: &'static str,
    degree: DegreeSpec,
    driver: G1Report,
    driver_time: Duration,
    grafted: Vec<ParamTropicalCurve>,
    oracle: OracleG1,
    oracle_time: Duration,
}

fn run_case(name: &'static str, degree: DegreeSpec) -> Case {
    let t = Instant::now();
    let driver = driver::g1_detailed(&degree, PARITY, 1, &InitialOptions::default()).expect("driver");
    let driver_time = t.elapsed();
    let grafted = grafted_curves(&driver).expect("grafting").into_iter().map(|g| g.curve).collect();
    let t = Instant::now();
    let oracle = oracle::g1_oracle_detailed(&degree, PARITY, 1, false).expect("oracle");
    let oracle_time = t.elapsed();
    Case { name, degree, driver, driver_time, grafted, oracle, oracle_time }
}

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, n: usize, title: &str, ok: bool, detail: String) {
        if !ok {
            self.failures += 1;
        }
        println!("[{}] criterion {n}: {title} :: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

// ---------------------------------------------------------------------------
// brute-force lattice helpers

type P = (i64, i64);

fn cross(o: P, a: P, b: P) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn shoelace2(vs: &[P]) -> i64 {
    (0..vs.len())
        .map(|i| {
            let (a, b) = (vs[i], vs[(i + 1) % vs.len()]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum::<i64>()
        .abs()
}

fn gcd_len(a: P, b: P) -> i64 {
    (b.0 - a.0).gcd(&(b.1 - a.1))
}

/// Strictly interior lattice points of a convex counterclockwise polygon.
fn interior_scan(vs: &[P]) -> Vec<P> {
    let (x0, x1) = (vs.iter().map(|p| p.0).min().unwrap(), vs.iter().map(|p| p.0).max().unwrap());
    let (y0, y1) = (vs.iter().map(|p| p.1).min().unwrap(), vs.iter().map(|p| p.1).max().unwrap());
    let mut out = Vec::new();
    for x in x0..=x1 {
        for y in y0..=y1 {
            if (0..vs.len()).all(|i| cross(vs[i], vs[(i + 1) % vs.len()], (x, y)) > 0) {
                out.push((x, y));
            }
        }
    }
    out
}

fn boundary_scan(vs: &[P]) -> i64 {
    let (x0, x1) = (vs.iter().map(|p| p.0).min().unwrap(), vs.iter().map(|p| p.0).max().unwrap());
    let (y0, y1) = (vs.iter().map(|p| p.1).min().unwrap(), vs.iter().map(|p| p.1).max().unwrap());
    let mut count = 0;
    for x in x0..=x1 {
        for y in y0..=y1 {
            let on = (0..vs.len()).any(|i| {
                let (a, b) = (vs[i], vs[(i + 1) % vs.len()]);
                cross(a, b, (x, y)) == 0 && x >= a.0.min(b.0) && x <= a.0.max(b.0) && y >= a.1.min(b.1) && y <= a.1.max(b.1)
            });
            count += on as i64;
        }
    }
    count
}

fn random_convex(rng: &mut ChaCha8Rng, box_size: i64) -> Option<LatticePolygon> {
    let k = rng.gen_range(3..9);
    let pts: Vec<LatticeVector> = (0..k).map(|_| v(rng.gen_range(-box_size..=box_size), rng.gen_range(-box_size..=box_size))).collect();
    LatticePolygon::convex_hull(&pts).ok()
}

fn pts(p: &LatticePolygon) -> Vec<P> {
    p.vertices().iter().map(|q| (q.x, q.y)).collect()
}

fn parity_of(p: P) -> Parity {
    (p.0.rem_euclid(2) as u8, p.1.rem_euclid(2) as u8)
}

/// Pick's formula on convex polygons, the boundary parity lemma on convex and
/// star-shaped (non-convex) polygons, the half-polygon interior formula on
/// even degrees, and the odd-triangle identity. Returns (checks, violations).
fn pick_suite() -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5049_434b);
    let mut bad = Vec::new();
    let mut checks = 0;

    // convex polygons: Pick and boundary parity
    let mut n = 0;
    while n < 1200 {
        let Some(p) = random_convex(&mut rng, 9) else { continue };
        n += 1;
        let vs = pts(&p);
        let i = interior_scan(&vs).len() as i64;
        let b = boundary_scan(&vs);
        let d = shoelace2(&vs);
        checks += 1;
        if p.doubled_area() != d || p.interior_count() != i || p.boundary_count() != b || d != 2 * i + b - 2 || (d - b) % 2 != 0 {
            bad.push(format!("convex {vs:?}: 2A={d} I={i} B={b}"));
        }
    }

    // star-shaped polygons: 2A ≡ boundary points mod 2
    let mut n = 0;
    while n < 1200 {
        let k = rng.gen_range(4..10);
        let mut vs: Vec<P> = (0..k).map(|_| (rng.gen_range(-12..=12), rng.gen_range(-12..=12))).collect();
        vs.sort_by(|a, b| (a.1 as f64).atan2(a.0 as f64).partial_cmp(&(b.1 as f64).atan2(b.0 as f64)).unwrap());
        vs.dedup();
        let angles: Vec<f64> = vs.iter().map(|a| (a.1 as f64).atan2(a.0 as f64)).collect();
        if vs.len() < 3 || vs.contains(&(0, 0)) || angles.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        // the origin must see every edge turning the same way
        if (0..vs.len()).any(|i| cross((0, 0), vs[i], vs[(i + 1) % vs.len()]) <= 0) {
            continue;
        }
        n += 1;
        checks += 1;
        let b: i64 = (0..vs.len()).map(|i| gcd_len(vs[i], vs[(i + 1) % vs.len()])).sum();
        if (shoelace2(&vs) - b) % 2 != 0 {
            bad.push(format!("star {vs:?}"));
        }
    }

    // even degrees: I(½Δ) = 𝒜/4 − 𝒫/4 + 1, against a scan of the half polygon
    let mut n = 0;
    while n < 1000 {
        let Some(half) = random_convex(&mut rng, 6) else { continue };
        n += 1;
        checks += 1;
        let vecs: Vec<LatticeVector> = half.edges().iter().map(|e| e.rot_cw() * 2).collect();
        let degree = match validate_degree(&vecs, true) {
            Ok(d) => d,
            Err(e) => {
                bad.push(format!("degree {vecs:?}: {e}"));
                continue;
            }
        };
        let scan = interior_scan(&pts(&half)).len() as i64;
        // 𝒜 is the Euclidean area, i.e. half the doubled area
        let lhs = 4 * scan;
        let rhs = degree.doubled_area() / 2 - degree.lattice_perimeter() + 4;
        if lhs != rhs || degree.half_interior_count() != Some(scan) {
            bad.push(format!("half {:?}: scan {scan}, 4I {lhs} vs {rhs}", pts(&half)));
        }
    }

    // odd triangles: H ≡ 𝔈 + (𝒫 + Ã)/2 + 1 mod 2
    let mut n = 0;
    while n < 1500 {
        let p: Parity = [(0, 1), (1, 0), (1, 1)][rng.gen_range(0..3)];
        let a = (2 * rng.gen_range(-5i64..=5) + p.0 as i64, 2 * rng.gen_range(-5i64..=5) + p.1 as i64);
        let b = (a.0 + 2 * rng.gen_range(-5i64..=5), a.1 + 2 * rng.gen_range(-5i64..=5));
        // third vertex even, so both sides from it have primitive parity p
        let c = (2 * rng.gen_range(-5i64..=5), 2 * rng.gen_range(-5i64..=5));
        let mut tri = vec![a, b, c];
        let orient = cross(a, b, c);
        if orient == 0 || gcd_len(a, c) % 2 == 0 || gcd_len(b, c) % 2 == 0 {
            continue;
        }
        if orient < 0 {
            tri.swap(0, 1);
        }
        n += 1;
        checks += 1;
        let inside = interior_scan(&tri);
        let h = inside.iter().filter(|&&q| parity_of(q) == p).count() as i64;
        let e = inside.iter().filter(|&&q| parity_of(q) == (0, 0)).count() as i64;
        let perim: i64 = (0..3).map(|i| gcd_len(tri[i], tri[(i + 1) % 3])).sum();
        let len = gcd_len(a, b);
        let prim = ((b.0 - a.0) / len, (b.1 - a.1) / len);
        let d = shoelace2(&tri);
        let corrected2 = if parity_of(prim) == p { d } else { d + len };
        let lib = LatticePolygon::convex_hull(&tri.iter().map(|q| v(q.0, q.1)).collect::<Vec<_>>()).unwrap();
        let lib_h = trop_refine::lattice::interior_points_with_parity(&lib, p);
        if (2 * perim + corrected2) % 4 != 0 || (h - e - (2 * perim + corrected2) / 4 - 1).rem_euclid(2) != 0 || lib_h != h {
            bad.push(format!("odd triangle {tri:?} parity {p:?}: H={h} E={e} P={perim} 2Ã={corrected2}"));
        }
    }
    (checks, bad)
}

// ---------------------------------------------------------------------------

fn check_kits(curves: &[ParamTropicalCurve], degree: &DegreeSpec, sign_bad: &mut usize, mult_bad: &mut usize, cong_bad: &mut usize, kits: &mut usize) {
    for c in curves {
        let a = analyze(c, PARITY, None).expect("analysis");
        for k in enumerate_kits(&a) {
            *kits += 1;
            let (formula, count) = welschinger_sign(c, &a, &k).expect("sign");
            if formula != count {
                *sign_bad += 1;
            }
            let kappa2 = quantum_index(&a, &k);
            if (degree.doubled_area() - kappa2).rem_euclid(8) != 0 {
                *cong_bad += 1;
            }
        }
        match refined_multiplicity_sum(c, &a) {
            Ok(s) if s == refined_multiplicity_closed(&a) => {}
            _ => *mult_bad += 1,
        }
    }
}

/// x₀ = x_r + t·b with t > 0.
fn on_closing_ray(x0: &Point, xr: &Point, b: LatticeVector) -> bool {
    let (dx, dy) = x0.minus(xr);
    let cross = &dx * qi(b.y) - &dy * qi(b.x);
    let dot = &dx * qi(b.x) + &dy * qi(b.y);
    cross.is_zero() && dot.is_positive()
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    let start = Instant::now();
    let cases = vec![run_case("quartic", quartic()), run_case("m=2", blown_up(2)), run_case("m=3", blown_up(3))];

    // 1
    let q = &cases[0];
    let expected = LaurentPoly::parse("q^8 - 2*q^4 + 2 - 2*q^-4 + q^-8").unwrap();
    let also = (LaurentPoly::sinh_factor(2)).pow(2) * LaurentPoly::cosh_factor(4);
    r.line(
        1,
        "quartic",
        q.driver.value == expected && also == expected && q.driver_time < Duration::from_secs(10),
        format!("driver {} in {:.2?}", q.driver.value, q.driver_time),
    );

    // 2
    let mut ok = true;
    let mut detail = Vec::new();
    for (c, m) in cases[1..].iter().zip([2, 3]) {
        let want = triple_sum(m);
        ok &= c.driver.value == want && c.driver_time < Duration::from_secs(60);
        detail.push(format!("m={m}: driver {} / sum {} in {:.2?}", c.driver.value, want, c.driver_time));
    }
    r.line(2, "blown-up plane", ok, detail.join("; "));

    // 3
    let mut ok = true;
    let mut detail = Vec::new();
    let mut total = Duration::ZERO;
    for c in &cases {
        total += c.oracle_time;
        ok &= c.oracle.value == c.driver.value;
        detail.push(format!("{}: oracle {} ({} curves, {:.2?})", c.name, c.oracle.value, c.oracle.curves.len(), c.oracle_time));
    }
    ok &= total < Duration::from_secs(300);
    r.line(3, "oracle agreement", ok, detail.join("; "));

    // 4
    let mut ok = true;
    let mut detail = Vec::new();
    for c in &cases {
        let mut g1s = Vec::new();
        let mut g0s = Vec::new();
        for seed in [1, 2, 3, 5, 8] {
            g1s.push(driver::g1(&c.degree, PARITY, seed).expect("g1"));
            g0s.push(oracle::g0(&c.degree, seed).expect("g0"));
        }
        let count = build_initial_data(&c.degree, PARITY, 1).expect("initial data").k.count;
        let mut components = 0;
        for k in [0, count / 2] {
            let opts = InitialOptions { k_component: Some(k), allow_non_admissible: false };
            g1s.push(driver::g1_with(&c.degree, PARITY, 11, &opts).expect("g1 with K"));
            components += 1;
        }
        let same = g1s.iter().all(|x| *x == g1s[0]) && g0s.iter().all(|x| *x == g0s[0]);
        ok &= same;
        detail.push(format!("{}: G0 {} / G1 {} over 5 seeds, {components} K", c.name, g0s[0], g1s[0]));
    }
    r.line(4, "constraint-choice invariance", ok, detail.join("; "));

    // 5, 6, 7 (kits)
    let (mut sign_bad, mut mult_bad, mut cong_bad, mut kits, mut curves) = (0, 0, 0, 0, 0);
    for c in &cases {
        check_kits(&c.oracle.curves, &c.degree, &mut sign_bad, &mut mult_bad, &mut cong_bad, &mut kits);
        check_kits(&c.grafted, &c.degree, &mut sign_bad, &mut mult_bad, &mut cong_bad, &mut kits);
        curves += c.oracle.curves.len() + c.grafted.len();
    }
    r.line(5, "sign identity", sign_bad == 0 && kits > 0, format!("{kits} kits on {curves} curves, {sign_bad} violations"));
    r.line(6, "multiplicity identity", mult_bad == 0 && curves > 0, format!("{curves} curves, {mult_bad} violations"));

    // 7 (values)
    let mut value_bad = 0;
    let mut values = 0;
    for c in &cases {
        let a = c.degree.doubled_area();
        for val in [&c.driver.value, &c.oracle.value] {
            values += 1;
            value_bad += !val.exponents_congruent(a) as usize;
        }
        for seed in [1, 2, 3, 5, 8] {
            values += 1;
            value_bad += !oracle::g0(&c.degree, seed).unwrap().exponents_congruent(a) as usize;
        }
    }
    r.line(
        7,
        "congruences",
        value_bad == 0 && cong_bad == 0,
        format!("{values} invariants with {value_bad} bad exponents; {kits} kits with {cong_bad} violations of 4 | 𝒜 − κ"),
    );

    // 8
    let t = Instant::now();
    let (checks, bad) = pick_suite();
    let elapsed = t.elapsed();
    r.line(
        8,
        "Pick suite",
        bad.is_empty() && checks >= 1000 && elapsed < Duration::from_secs(60),
        format!("{checks} polygons in {elapsed:.2?}, {} violations{}", bad.len(), bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()),
    );

    // 9
    let mut families = 0;
    let mut sum_bad = 0;
    let mut successes = 0;
    let mut ray_bad = 0;
    for c in &cases {
        for seed in [1, 2, 3, 5, 8] {
            let data = match build_initial_data(&c.degree, PARITY, seed) {
                Ok(d) => d,
                Err(_) => continue,
            };
            families += 1;
            sum_bad += !lambda_and_menelaus(&data.lines).1.is_zero() as usize;
            for f in &data.family {
                if let Some((_, ls)) = hat_degree(&data.degree, f.mask, &data.lines) {
                    families += 1;
                    sum_bad += !lambda_and_menelaus(&ls).1.is_zero() as usize;
                }
            }
        }
        families += 1;
        sum_bad += !lambda_and_menelaus(&c.oracle.lines).1.is_zero() as usize;
        let rep = &c.driver;
        for contribution in &rep.contributions {
            successes += 1;
            let cd = run_data(&rep.data, &rep.items, &contribution.run);
            match cycle_procedure(&cd) {
                Ok(CycleOutcome::Cyclic { points, .. }) => {
                    if !on_closing_ray(&cd.x0, points.last().unwrap(), cd.b) || points != contribution.run.points {
                        ray_bad += 1;
                    }
                }
                _ => ray_bad += 1,
            }
        }
    }
    for k in 0..12 {
        let opts = InitialOptions { k_component: Some(k), allow_non_admissible: false };
        if let Ok(d) = build_initial_data_with(&quartic(), PARITY, 4, &opts) {
            families += 1;
            sum_bad += !lambda_and_menelaus(&d.lines).1.is_zero() as usize;
        }
    }
    r.line(
        9,
        "Menelaus exactness",
        sum_bad == 0 && ray_bad == 0 && successes > 0,
        format!("{families} constraint families with {sum_bad} nonzero sums; {successes} cyclic runs with {ray_bad} closing-ray failures"),
    );

    println!("acceptance: {} of 9 criteria passed in {:.2?}", 9 - r.failures, start.elapsed());
    if r.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
