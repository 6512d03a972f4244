//! Constraint lines, the initial data of the cycle algorithm, and the cycle
//! procedure itself.
//!
//! A line `L_a` is stored by its direction `a` and the value of
//! `λ_a(x) = a.y·x₁ − a.x·x₂` along it.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{angle_cmp, lattice_length, primitive_and_parity, validate_degree, wedge, DegreeSpec, LatticeVector, Parity};
use crate::oracle::{dual_difference_vectors, enumerate_rational_curves};
use crate::tropcurve::{
    genus_and_simplicity, qi, BoundedEdge, EdgeRef, End, MarkedPoint, ParamTropicalCurve, Point, Q,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientedLine {
    pub direction: LatticeVector,
    pub value: Q,
}

impl OrientedLine {
    pub fn new(direction: LatticeVector, value: Q) -> Self {
        OrientedLine { direction, value }
    }

    pub fn through(direction: LatticeVector, p: &Point) -> Self {
        OrientedLine { direction, value: lambda(direction, p) }
    }

    pub fn contains(&self, p: &Point) -> bool {
        lambda(self.direction, p) == self.value
    }

    /// Same line with the opposite orientation.
    pub fn reversed(&self) -> Self {
        OrientedLine { direction: -self.direction, value: -self.value.clone() }
    }

    /// Distance to the parallel line through the origin is below ρ:
    /// value² < ρ²·|a|².
    pub fn within(&self, rho: &Q) -> bool {
        &self.value * &self.value < rho * rho * qi(self.direction.norm2())
    }

    /// (primitive direction up to sign, value along it): equal keys mean
    /// equal point sets.
    fn point_set_key(&self) -> (LatticeVector, Q) {
        let (p, _) = primitive_and_parity(self.direction).expect("nonzero direction");
        let k = lattice_length(self.direction).expect("nonzero direction");
        let (p, s) = if p > -p { (p, 1) } else { (-p, -1) };
        (p, &self.value / qi(k * s))
    }
}

/// λ_a(x) = x ∧ a.
pub fn lambda(a: LatticeVector, x: &Point) -> Q {
    x.wedge_vec(a)
}

pub fn lambda_and_menelaus(lines: &[OrientedLine]) -> (Vec<Q>, Q) {
    let vals: Vec<Q> = lines.iter().map(|l| l.value.clone()).collect();
    let sum = vals.iter().fold(Q::zero(), |a, b| a + b);
    (vals, sum)
}

/// The line directed by c(Δ') that closes {L_a}_{a∈Δ'} under Menelaus.
pub fn completing_line(subset: &[usize], lines: &[OrientedLine]) -> Result<OrientedLine> {
    let c: LatticeVector = subset.iter().map(|&i| lines[i].direction).sum();
    if c.is_zero() {
        return Err(Error::ZeroSum);
    }
    let v = subset.iter().fold(Q::zero(), |acc, &i| acc + &lines[i].value);
    Ok(OrientedLine::new(c, v))
}

fn mask_members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Intersection point of two non-parallel lines.
fn meet(l1: &OrientedLine, l2: &OrientedLine) -> Option<Point> {
    let (a, b) = (l1.direction, l2.direction);
    let det = wedge(a, b);
    if det == 0 {
        return None;
    }
    // a.y x − a.x y = v1 ; b.y x − b.x y = v2
    let d = qi(det);
    let x = (&l1.value * qi(-b.x) + &l2.value * qi(a.x)) / &d;
    let y = (qi(a.y) * &l2.value - qi(b.y) * &l1.value) / &d;
    Some(Point::new(x, y))
}

// ---------------------------------------------------------------------------
// K

/// Sector between consecutive origin-line directions `u1`, `u2`
/// (counterclockwise, `u1 ∧ u2 > 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sector {
    pub index: usize,
    pub count: usize,
    pub u1: LatticeVector,
    pub u2: LatticeVector,
}

impl Sector {
    /// Open recession cone test.
    pub fn in_cone(&self, v: LatticeVector) -> bool {
        wedge(self.u1, v) > 0 && wedge(v, self.u2) > 0
    }

    /// Half-plane description: each normal n with n·x > 0 on the sector.
    pub fn half_planes(&self) -> Vec<LatticeVector> {
        vec![self.u1.rot_ccw(), self.u2.rot_cw()]
    }

    pub fn recession(&self) -> LatticeVector {
        self.u1 + self.u2
    }
}

/// All sectors cut out by the lines through the origin with the given
/// directions, in angular order.
pub fn sectors(directions: &[LatticeVector]) -> Vec<Sector> {
    let mut rays: Vec<LatticeVector> = directions
        .iter()
        .flat_map(|&d| {
            let p = primitive_and_parity(d).expect("nonzero").0;
            [p, -p]
        })
        .collect();
    rays.sort_by(|a, b| angle_cmp(*a, *b));
    rays.dedup();
    let count = rays.len();
    (0..count)
        .map(|i| Sector { index: i, count, u1: rays[i], u2: rays[(i + 1) % count] })
        .collect()
}

/// 𝔙: rotated differences of lattice points of P_Δ of parity (α,β), whose
/// parallel lines meet K boundedly and that point clockwise of every
/// recession direction of K.
pub fn v_set(degree: &DegreeSpec, parity: Parity, k: &Sector) -> Vec<LatticeVector> {
    let mut out: Vec<LatticeVector> = dual_difference_vectors(degree)
        .into_iter()
        .filter(|b| b.parity() == parity)
        .filter(|&b| {
            let positive_multiple = |u: LatticeVector| wedge(u, b) == 0 && u.dot(b) > 0;
            wedge(k.u1, b) < 0 && wedge(k.u2, b) <= 0 && !positive_multiple(k.u2)
        })
        .collect();
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// initial data

#[derive(Clone, Debug, Default)]
pub struct InitialOptions {
    pub k_component: Option<usize>,
    pub allow_non_admissible: bool,
}

/// One completing line L_{c(Δ')} with its subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyLine {
    pub mask: u64,
    pub line: OrientedLine,
}

#[derive(Clone, Debug)]
pub struct InitialData {
    pub degree: DegreeSpec,
    pub parity: Parity,
    pub rho0: Q,
    pub lines: Vec<OrientedLine>,
    /// L_{c(Δ')} for every nonempty proper Δ' with c(Δ') ≠ 0.
    pub family: Vec<FamilyLine>,
    /// Rational curves of degree {−c(Δ')} ∪ Δ' through the constraint, for
    /// |Δ'| ≥ 2.
    pub fragments: BTreeMap<u64, Vec<ParamTropicalCurve>>,
    pub k: Sector,
    pub b_candidates: Vec<LatticeVector>,
    pub x0: Point,
    pub seed: u64,
}

impl InitialData {
    pub fn n(&self) -> usize {
        self.lines.len()
    }

    pub fn completing(&self, mask: u64) -> Option<&OrientedLine> {
        self.family.iter().find(|f| f.mask == mask).map(|f| &f.line)
    }
}

const MAX_DRAWS: usize = 32;

/// Distinct point sets among the completing lines (a completing line and
/// the lines of its subset are concurrent by construction, so points are
/// not required to be distinct). Returns the pairwise intersection points.
fn general_position(n: usize, family: &[FamilyLine]) -> Option<Vec<Point>> {
    // one representative per complementary pair: subsets avoiding the last index
    let last = 1u64 << (n - 1);
    let reps: Vec<&OrientedLine> = family.iter().filter(|f| f.mask & last == 0).map(|f| &f.line).collect();
    let mut keys = HashSet::new();
    for l in &reps {
        if !keys.insert(l.point_set_key()) {
            return None;
        }
    }
    let mut points = HashSet::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            if let Some(p) = meet(reps[i], reps[j]) {
                points.insert(p);
            }
        }
    }
    Some(points.into_iter().collect())
}

fn family_lines(degree: &DegreeSpec, lines: &[OrientedLine]) -> Vec<FamilyLine> {
    let n = degree.len();
    let full = (1u64 << n) - 1;
    (1..full)
        .filter_map(|mask| completing_line(&mask_members(mask, n), lines).ok().map(|line| FamilyLine { mask, line }))
        .collect()
}

/// Degree {−c(Δ')} ∪ Δ' with its lines, or None when no simple rational
/// curve can exist (all vectors parallel).
pub fn hat_degree(degree: &DegreeSpec, mask: u64, lines: &[OrientedLine]) -> Option<(Vec<LatticeVector>, Vec<OrientedLine>)> {
    let members = mask_members(mask, degree.len());
    let line = completing_line(&members, lines).ok()?;
    let mut vecs = vec![-line.direction];
    let mut ls = vec![line.reversed()];
    for &i in &members {
        vecs.push(degree.vectors()[i]);
        ls.push(lines[i].clone());
    }
    validate_degree(&vecs, false).ok()?;
    Some((vecs, ls))
}

fn scale_curve(c: &ParamTropicalCurve, s: &Q) -> ParamTropicalCurve {
    let mut out = c.clone();
    for p in &mut out.vertices {
        *p = p.scale(s);
    }
    out
}

fn random_small(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.gen_range(-1000i64..=1000).into(), rng.gen_range(101i64..=997).into())
}

/// Lines, family and fragments satisfying genericity, (r1) and (r2).
fn draw_lines(
    degree: &DegreeSpec,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<OrientedLine>, Vec<FamilyLine>, BTreeMap<u64, Vec<ParamTropicalCurve>>, Q)> {
    let n = degree.len();
    let mut last_err = Error::GeneralPositionFailure("no generic perturbation found".into());
    'draw: for _ in 0..MAX_DRAWS {
        let mut deltas: Vec<Q> = (0..n - 1).map(|_| random_small(rng)).collect();
        let s = deltas.iter().fold(Q::zero(), |a, b| a + b);
        deltas.push(-s);
        let lines: Vec<OrientedLine> =
            degree.vectors().iter().zip(&deltas).map(|(&a, d)| OrientedLine::new(a, d.clone())).collect();
        let family = family_lines(degree, &lines);
        let Some(points) = general_position(n, &family) else { continue };
        let mut radius2 = points.iter().map(|p| p.norm2()).max().unwrap_or_else(Q::zero);
        let mut fragments = BTreeMap::new();
        for f in &family {
            if f.mask.count_ones() < 2 {
                continue;
            }
            let Some((vecs, ls)) = hat_degree(degree, f.mask, &lines) else {
                fragments.insert(f.mask, Vec::new());
                continue;
            };
            match enumerate_rational_curves(&vecs, &ls) {
                Ok(curves) => {
                    for c in &curves {
                        for p in &c.vertices {
                            let r = p.norm2();
                            if r > radius2 {
                                radius2 = r;
                            }
                        }
                    }
                    fragments.insert(f.mask, curves);
                }
                Err(e @ Error::GeneralPositionFailure(_)) => {
                    last_err = e;
                    continue 'draw;
                }
                Err(e) => return Err(e),
            }
        }
        // everything is linear in the deltas: shrink by powers of two
        let mut scale = Q::one();
        let half = Q::new(1.into(), 2.into());
        while &radius2 * &scale * &scale >= Q::one() {
            scale *= &half;
        }
        let lines: Vec<OrientedLine> =
            lines.into_iter().map(|l| OrientedLine::new(l.direction, l.value * &scale)).collect();
        let family: Vec<FamilyLine> = family
            .into_iter()
            .map(|f| FamilyLine { mask: f.mask, line: OrientedLine::new(f.line.direction, f.line.value * &scale) })
            .collect();
        let fragments = fragments
            .into_iter()
            .map(|(m, cs)| (m, cs.iter().map(|c| scale_curve(c, &scale)).collect()))
            .collect();
        let max_delta = deltas.iter().map(|d| d.abs()).max().unwrap_or_else(Q::zero);
        let rho0 = if max_delta.is_zero() { scale.clone() } else { max_delta * &scale };
        return Ok((lines, family, fragments, rho0));
    }
    Err(last_err)
}

/// Distance from the line through `p` with direction `d` to the origin
/// exceeds 1.
fn line_avoids_disc(p: &Point, d: LatticeVector) -> bool {
    let w = p.wedge_vec(d);
    &w * &w > qi(d.norm2())
}

fn in_k(k: &Sector, directions: &[LatticeVector], x: &Point) -> bool {
    let inside = x.wedge_vec(k.u1).is_negative() && x.wedge_vec(k.u2).is_positive();
    inside && x.norm2() > Q::one() && directions.iter().all(|&d| line_avoids_disc(x, d))
}

pub fn build_initial_data(degree: &DegreeSpec, parity: Parity, seed: u64) -> Result<InitialData> {
    build_initial_data_with(degree, parity, seed, &InitialOptions::default())
}

pub fn build_initial_data_with(
    degree: &DegreeSpec,
    parity: Parity,
    seed: u64,
    opts: &InitialOptions,
) -> Result<InitialData> {
    if !degree.is_even() {
        return Err(Error::NotEven);
    }
    if parity == (0, 0) || parity.0 > 1 || parity.1 > 1 {
        return Err(Error::NotAdmissible);
    }
    if !opts.allow_non_admissible && !degree.is_admissible(parity) {
        return Err(Error::NotAdmissible);
    }
    if degree.len() > 20 {
        return Err(Error::InvalidPolygon("degree too large for subset enumeration".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lines, family, fragments, rho0) = draw_lines(degree, &mut rng)?;
    let directions: Vec<LatticeVector> = family.iter().map(|f| f.line.direction).collect();
    let all = sectors(&directions);
    let ki = match opts.k_component {
        Some(i) if i < all.len() => i,
        Some(_) => return Err(Error::InvalidPolygon(format!("K component out of range (0..{})", all.len()))),
        None => rng.gen_range(0..all.len()),
    };
    let k = all[ki].clone();
    let b_candidates = v_set(degree, parity, &k);
    if b_candidates.is_empty() {
        return Err(Error::EmptyVSet);
    }
    // direction strictly inside the sector, slightly perturbed
    let w = loop {
        let e = Q::new(1.into(), 8.into());
        let px = random_small(&mut rng) / qi(1000) * &e;
        let py = random_small(&mut rng) / qi(1000) * &e;
        let w = Point::new(qi(k.u1.x + k.u2.x) + px, qi(k.u1.y + k.u2.y) + py);
        if w.wedge_vec(k.u1).is_negative() && w.wedge_vec(k.u2).is_positive() {
            break w;
        }
    };
    let mut data = InitialData {
        degree: degree.clone(),
        parity,
        rho0,
        lines,
        family,
        fragments,
        k,
        b_candidates,
        x0: w.clone(),
        seed,
    };
    let items = cycle_items(&data);
    let mut t = Q::one();
    for _ in 0..64 {
        let x0 = w.scale(&t);
        t *= qi(2);
        if !in_k(&data.k, &directions, &x0) {
            continue;
        }
        if !data.b_candidates.iter().all(|&b| line_avoids_disc(&x0, b)) {
            continue;
        }
        data.x0 = x0;
        match walk_all(&data, &items) {
            Ok(r) if !r.disc_violation => return Ok(data),
            Ok(_) | Err(Error::GeneralPositionFailure(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GeneralPositionFailure("could not certify x0".into()))
}

// ---------------------------------------------------------------------------
// cycle procedure

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleData {
    pub vectors: Vec<LatticeVector>,
    pub lines: Vec<OrientedLine>,
    pub signs: Vec<i8>,
    pub x0: Point,
    pub b: LatticeVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    RayMiss,
    SignViolation,
    /// x₀ not between the crossings of its b-line with L_{a₁} and L_{a_r}.
    Precondition,
    NotSimple,
}

#[derive(Clone, Debug)]
pub enum CycleOutcome {
    Cyclic { points: Vec<Point>, curve: ParamTropicalCurve },
    /// `points` holds the cycle vertices produced before stopping.
    Stopped { step: usize, reason: StopReason, points: Vec<Point> },
}

impl CycleOutcome {
    pub fn is_cyclic(&self) -> bool {
        matches!(self, CycleOutcome::Cyclic { .. })
    }
}

/// Parameter s with L_a ∩ (x + ℝ·b) = x + s·b, if not parallel.
fn ray_param(x: &Point, b: LatticeVector, line: &OrientedLine) -> Option<Q> {
    let w = wedge(b, line.direction);
    if w == 0 {
        return None;
    }
    Some((&line.value - lambda(line.direction, x)) / qi(w))
}

/// Curve with cycle vertices `points`, ends `vectors` and the closing edge
/// through `x0`.
pub fn assemble_cycle_curve(
    points: &[Point],
    vectors: &[LatticeVector],
    labels: &[Option<usize>],
    b: LatticeVector,
    x0: &Point,
) -> Result<ParamTropicalCurve> {
    let r = points.len();
    let mut edges = Vec::with_capacity(r);
    let mut bk = b;
    for k in 0..r {
        let next = if k + 1 < r {
            bk -= vectors[k];
            bk
        } else {
            b
        };
        let w = lattice_length(next)?;
        edges.push(BoundedEdge {
            from: k,
            to: (k + 1) % r,
            weight: w,
            direction: LatticeVector::new(next.x / w, next.y / w),
        });
    }
    let ends = (0..r).map(|k| End { vertex: k, vector: vectors[k], label: labels[k] }).collect();
    Ok(ParamTropicalCurve {
        vertices: points.to_vec(),
        edges,
        ends,
        marked: Some(MarkedPoint { edge: EdgeRef::Bounded(r - 1), position: x0.clone() }),
    })
}

/// x₀ ∈ R(x_r, b), strictly past x_r.
fn on_closing_ray(xr: &Point, b: LatticeVector, x0: &Point) -> bool {
    let (dx, dy) = x0.minus(xr);
    let d = Point::new(dx, dy);
    d.wedge_vec(b).is_zero() && d.dot_vec(b).is_positive()
}

pub fn cycle_procedure(data: &CycleData) -> Result<CycleOutcome> {
    let r = data.vectors.len();
    if r == 0 || data.lines.len() != r || data.signs.len() != r {
        return Err(Error::InvalidCurve("cycle data of inconsistent length".into()));
    }
    if data.vectors.iter().copied().sum::<LatticeVector>() != LatticeVector::ZERO {
        return Err(Error::NotBalanced);
    }
    let mut bk = data.b;
    for &a in &data.vectors {
        if wedge(bk, a) == 0 {
            return Err(Error::DegenerateWedge);
        }
        bk -= a;
    }
    if data.lines.iter().any(|l| l.contains(&data.x0)) {
        return Err(Error::GeneralPositionFailure("x0 on a constraint line".into()));
    }
    // segment condition on the b-line through x0
    let s1 = ray_param(&data.x0, data.b, &data.lines[0]).ok_or(Error::DegenerateWedge)?;
    let sr = ray_param(&data.x0, data.b, &data.lines[r - 1]).ok_or(Error::DegenerateWedge)?;
    if !((sr.is_negative() && s1.is_positive()) || (s1.is_negative() && sr.is_positive())) {
        return Ok(CycleOutcome::Stopped { step: 0, reason: StopReason::Precondition, points: Vec::new() });
    }
    let mut x = data.x0.clone();
    let mut b = data.b;
    let mut points = Vec::with_capacity(r);
    for k in 0..r {
        let a = data.vectors[k];
        let w = wedge(b, a);
        let s = ray_param(&x, b, &data.lines[k]).ok_or(Error::DegenerateWedge)?;
        if !s.is_positive() {
            return Ok(CycleOutcome::Stopped { step: k + 1, reason: StopReason::RayMiss, points });
        }
        if (data.signs[k] as i64) * w < 0 {
            return Ok(CycleOutcome::Stopped { step: k + 1, reason: StopReason::SignViolation, points });
        }
        x = x.offset(b, &s);
        points.push(x.clone());
        b -= a;
    }
    if !on_closing_ray(&x, data.b, &data.x0) {
        return Err(Error::InternalInconsistency("x0 not on the closing ray".into()));
    }
    let labels: Vec<Option<usize>> = (0..r).map(Some).collect();
    let curve = assemble_cycle_curve(&points, &data.vectors, &labels, data.b, &data.x0)?;
    if genus_and_simplicity(&curve) != (1, true) {
        return Ok(CycleOutcome::Stopped { step: r, reason: StopReason::NotSimple, points });
    }
    Ok(CycleOutcome::Cyclic { points, curve })
}

// ---------------------------------------------------------------------------
// walking all cycle data at once

/// A cycle item: a plain degree element (sign +1) or a grafted subset
/// standing for c(Δ') (sign −1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub mask: u64,
    pub vector: LatticeVector,
    pub line: OrientedLine,
    pub sign: i8,
}

/// Plain singletons first (by index), then grafted subsets by mask.
pub fn cycle_items(data: &InitialData) -> Vec<Item> {
    let mut out: Vec<Item> = data
        .lines
        .iter()
        .enumerate()
        .map(|(i, l)| Item { mask: 1 << i, vector: l.direction, line: l.clone(), sign: 1 })
        .collect();
    for f in &data.family {
        out.push(Item { mask: f.mask, vector: f.line.direction, line: f.line.clone(), sign: -1 });
    }
    out
}

/// A successful walk: items in cycle order and the cycle vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRun {
    pub b: LatticeVector,
    pub items: Vec<usize>,
    pub points: Vec<Point>,
}

#[derive(Clone, Debug, Default)]
pub struct WalkReport {
    pub runs: Vec<CycleRun>,
    /// Some generated cycle line met the closed unit disc.
    pub disc_violation: bool,
    pub degenerate: usize,
    pub visited: usize,
    /// Completed walks rejected because x₀ was not on the closing ray.
    pub precondition_rejects: usize,
}

struct Walker<'a> {
    items: &'a [Item],
    keys: Vec<(LatticeVector, Q)>,
    full: u64,
    x0: &'a Point,
    b: LatticeVector,
    report: WalkReport,
    seq: Vec<usize>,
    points: Vec<Point>,
}

impl Walker<'_> {
    /// `on` is the item whose line carries `x` (None at x₀).
    fn step(&mut self, x: &Point, bk: LatticeVector, used: u64, has_plain: bool, on: Option<usize>) -> Result<()> {
        self.report.visited += 1;
        if used == self.full {
            if on_closing_ray(x, self.b, self.x0) {
                self.report.runs.push(CycleRun { b: self.b, items: self.seq.clone(), points: self.points.clone() });
            } else {
                self.report.precondition_rejects += 1;
            }
            return Ok(());
        }
        for (i, it) in self.items.iter().enumerate() {
            if it.mask & used != 0 {
                continue;
            }
            let next_used = used | it.mask;
            let plain = it.sign > 0;
            if next_used == self.full && !(has_plain || plain) {
                continue;
            }
            // Δ' and its complement share a line; such a step would not move
            if on.is_some_and(|j| self.keys[j] == self.keys[i]) {
                self.report.degenerate += 1;
                continue;
            }
            let w = wedge(bk, it.vector);
            if w == 0 {
                self.report.degenerate += 1;
                continue;
            }
            if (it.sign as i64) * w < 0 {
                continue;
            }
            let s = (&it.line.value - lambda(it.vector, x)) / qi(w);
            if s.is_zero() {
                return Err(Error::GeneralPositionFailure("cycle vertex on a constraint line".into()));
            }
            if s.is_negative() {
                continue;
            }
            let nx = x.offset(bk, &s);
            let nb = bk - it.vector;
            if !line_avoids_disc(&nx, nb) {
                self.report.disc_violation = true;
                return Ok(());
            }
            self.seq.push(i);
            self.points.push(nx.clone());
            self.step(&nx, nb, next_used, has_plain || plain, Some(i))?;
            self.seq.pop();
            self.points.pop();
            if self.report.disc_violation {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Every cycle procedure for one b, over all grafting sets and orderings.
pub fn walk_cycles(items: &[Item], n: usize, x0: &Point, b: LatticeVector) -> Result<WalkReport> {
    let mut w = Walker {
        items,
        keys: items.iter().map(|it| it.line.point_set_key()).collect(),
        full: (1u64 << n) - 1,
        x0,
        b,
        report: WalkReport::default(),
        seq: Vec::new(),
        points: Vec::new(),
    };
    w.step(x0, b, 0, false, None)?;
    Ok(w.report)
}

/// All b ∈ 𝔙 in parallel, merged in b order.
pub fn walk_all(data: &InitialData, items: &[Item]) -> Result<WalkReport> {
    let reports: Vec<WalkReport> = data
        .b_candidates
        .par_iter()
        .map(|&b| walk_cycles(items, data.n(), &data.x0, b))
        .collect::<Result<_>>()?;
    let mut out = WalkReport::default();
    for r in reports {
        out.runs.extend(r.runs);
        out.disc_violation |= r.disc_violation;
        out.degenerate += r.degenerate;
        out.visited += r.visited;
        out.precondition_rejects += r.precondition_rejects;
    }
    Ok(out)
}

/// Cycle data of a run, for replaying it through [`cycle_procedure`].
pub fn run_data(data: &InitialData, items: &[Item], run: &CycleRun) -> CycleData {
    CycleData {
        vectors: run.items.iter().map(|&i| items[i].vector).collect(),
        lines: run.items.iter().map(|&i| items[i].line.clone()).collect(),
        signs: run.items.iter().map(|&i| items[i].sign).collect(),
        x0: data.x0.clone(),
        b: run.b,
    }
}

/// Item lookup by mask, used when reporting grafting sets.
pub fn items_by_mask(items: &[Item]) -> HashMap<(u64, i8), usize> {
    items.iter().enumerate().map(|(i, it)| ((it.mask, it.sign), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tropcurve::qr;

    fn v(x: i64, y: i64) -> LatticeVector {
        LatticeVector::new(x, y)
    }

    fn quartic() -> DegreeSpec {
        validate_degree(&[v(-2, 0), v(-2, 0), v(0, -2), v(0, -2), v(2, 2), v(2, 2)], true).unwrap()
    }

    #[test]
    fn menelaus_sums() {
        let origin: Vec<OrientedLine> = [v(-2, 0), v(0, -2), v(2, 2)].iter().map(|&a| OrientedLine::through(a, &Point::origin())).collect();
        assert!(lambda_and_menelaus(&origin).1.is_zero());
        let vals = [2, 2, -4, 0, 0, 0];
        let q = quartic();
        let ls: Vec<OrientedLine> = q.vectors().iter().zip(vals).map(|(&a, x)| OrientedLine::new(a, qi(x))).collect();
        assert!(lambda_and_menelaus(&ls).1.is_zero());
        let bad: Vec<OrientedLine> = [v(-2, 0), v(0, -2), v(2, 2)].iter().map(|&a| OrientedLine::new(a, qi(1))).collect();
        assert_eq!(lambda_and_menelaus(&bad).1, qi(3));
    }

    #[test]
    fn lambda_matches_line_points() {
        let l = OrientedLine::new(v(2, 2), qi(3));
        // (x, y) with 2x − 2y = 3
        let p = Point::new(qr(3, 2), qi(0));
        assert!(l.contains(&p));
        assert!(l.contains(&p.offset(v(2, 2), &qr(7, 5))));
    }

    #[test]
    fn completing_line_examples() {
        let ls = vec![OrientedLine::new(v(2, 2), qi(1)), OrientedLine::new(v(2, 2), qi(3)), OrientedLine::new(v(-4, -4), qi(-4))];
        let c = completing_line(&[0, 1], &ls).unwrap();
        assert_eq!(c, OrientedLine::new(v(4, 4), qi(4)));
        assert_eq!(completing_line(&[0], &ls).unwrap(), ls[0]);
        assert_eq!(completing_line(&[0, 1, 2], &ls), Err(Error::ZeroSum));
    }

    #[test]
    fn meet_is_on_both_lines() {
        let l1 = OrientedLine::new(v(2, 0), qr(1, 3));
        let l2 = OrientedLine::new(v(2, 4), qr(-5, 7));
        let p = meet(&l1, &l2).unwrap();
        assert!(l1.contains(&p) && l2.contains(&p));
    }

    /// Independent replay of a cycle walk: intersect rays with lines by
    /// solving the 2×2 system for (s, u) in x + s·b = p + u·a.
    fn replay(x0: &Point, b: LatticeVector, vecs: &[LatticeVector], lines: &[OrientedLine]) -> Vec<Point> {
        let mut x = x0.clone();
        let mut bk = b;
        let mut out = Vec::new();
        for (a, l) in vecs.iter().zip(lines) {
            // a point on l: solve with x-coordinate or y-coordinate fixed
            let p = if a.y != 0 {
                Point::new(&l.value / qi(a.y), qi(0))
            } else {
                Point::new(qi(0), -&l.value / qi(a.x))
            };
            assert!(l.contains(&p));
            let det = qi(wedge(bk, *a));
            let (dx, dy) = p.minus(&x);
            let s = (&dx * qi(a.y) - &dy * qi(a.x)) / &det;
            x = x.offset(bk, &s);
            out.push(x.clone());
            bk -= *a;
        }
        out
    }

    fn tripod_data(signs: Vec<i8>) -> CycleData {
        let vecs = [v(-2, 0), v(0, -2), v(2, 2)];
        let lines: Vec<OrientedLine> = vecs.iter().zip([2, 2, -4]).map(|(&a, x)| OrientedLine::new(a, qi(x))).collect();
        // the b-line x = −5 crosses L_{a1} above x0 and L_{a3} below it
        CycleData { vectors: vecs.to_vec(), lines, signs, x0: Point::ints(-5, -1), b: v(0, 1) }
    }

    #[test]
    fn three_vector_trajectory() {
        let data = tripod_data(vec![1, -1, 1]);
        let want = replay(&data.x0, data.b, &data.vectors, &data.lines);
        assert_eq!(want[..2], [Point::ints(-5, 1), Point::ints(-1, 3)]);
        match cycle_procedure(&data).unwrap() {
            CycleOutcome::Stopped { step: 3, reason: StopReason::RayMiss, points } => assert_eq!(points, want[..2]),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn first_sign_violation_stops() {
        match cycle_procedure(&tripod_data(vec![-1, 1, 1])).unwrap() {
            CycleOutcome::Stopped { step: 1, reason: StopReason::SignViolation, .. } => {}
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn degenerate_wedge_is_reported() {
        let vecs = [v(0, -2), v(0, 2)];
        let lines = vec![OrientedLine::new(vecs[0], qi(1)), OrientedLine::new(vecs[1], qi(-1))];
        let data = CycleData { vectors: vecs.to_vec(), lines, signs: vec![1, 1], x0: Point::ints(5, 5), b: v(0, 1) };
        assert_eq!(cycle_procedure(&data).unwrap_err(), Error::DegenerateWedge);
    }

    #[test]
    fn initial_data_invariants() {
        let d = quartic();
        let data = build_initial_data(&d, (0, 1), 1).unwrap();
        assert!(lambda_and_menelaus(&data.lines).1.is_zero());
        assert!(data.lines.iter().all(|l| l.within(&data.rho0)));
        for b in &data.b_candidates {
            assert_eq!(b.parity(), (0, 1));
        }
        let again = build_initial_data(&d, (0, 1), 1).unwrap();
        assert_eq!(again.x0, data.x0);
        assert_eq!(again.lines, data.lines);
    }

    #[test]
    fn admissibility_gate() {
        let d = quartic();
        assert!(build_initial_data(&d, (1, 0), 3).is_ok());
        let rect = validate_degree(&[v(2, 0), v(-2, 0), v(0, 2), v(0, -2)], true).unwrap();
        assert_eq!(build_initial_data(&rect, (1, 0), 3).unwrap_err(), Error::NotAdmissible);
    }
}
