//! Parameterized plane tropical curves with exact rational vertex positions.
//!
//! Besides the data model this module decides simplicity exactly, builds the
//! dual subdivision, splits an elliptic curve into its cycle and even trees,
//! and classifies vertices (even, odd mobile, odd non-mobile).

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    angle_cmp, interior_points_with_parity, lattice_length, newton_polygon, primitive_and_parity, wedge,
    LatticePolygon, LatticeVector, Parity,
};

pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Q,
    pub y: Q,
}

impl Point {
    pub fn new(x: Q, y: Q) -> Self {
        Point { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Self {
        Point::new(qi(x), qi(y))
    }

    pub fn origin() -> Self {
        Point::ints(0, 0)
    }

    /// self + t·v
    pub fn offset(&self, v: LatticeVector, t: &Q) -> Point {
        Point::new(&self.x + t * qi(v.x), &self.y + t * qi(v.y))
    }

    pub fn minus(&self, o: &Point) -> (Q, Q) {
        (&self.x - &o.x, &self.y - &o.y)
    }

    pub fn norm2(&self) -> Q {
        &self.x * &self.x + &self.y * &self.y
    }

    pub fn scale(&self, t: &Q) -> Point {
        Point::new(&self.x * t, &self.y * t)
    }

    /// self ∧ v
    pub fn wedge_vec(&self, v: LatticeVector) -> Q {
        &self.x * qi(v.y) - &self.y * qi(v.x)
    }

    pub fn dot_vec(&self, v: LatticeVector) -> Q {
        &self.x * qi(v.x) + &self.y * qi(v.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

fn cross(a: &(Q, Q), b: &(Q, Q)) -> Q {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn dotq(a: &(Q, Q), b: &(Q, Q)) -> Q {
    &a.0 * &b.0 + &a.1 * &b.1
}

fn vq(v: LatticeVector) -> (Q, Q) {
    (qi(v.x), qi(v.y))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundedEdge {
    pub from: usize,
    pub to: usize,
    pub weight: i64,
    /// Primitive direction pointing from `from` to `to`.
    pub direction: LatticeVector,
}

impl BoundedEdge {
    pub fn weighted(&self) -> LatticeVector {
        self.direction * self.weight
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct End {
    pub vertex: usize,
    pub vector: LatticeVector,
    /// Index of the degree element this end realizes, when known.
    pub label: Option<usize>,
}

impl End {
    pub fn weight(&self) -> i64 {
        lattice_length(self.vector).unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeRef {
    Bounded(usize),
    End(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedPoint {
    pub edge: EdgeRef,
    pub position: Point,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ParamTropicalCurve {
    pub vertices: Vec<Point>,
    pub edges: Vec<BoundedEdge>,
    pub ends: Vec<End>,
    pub marked: Option<MarkedPoint>,
}

impl ParamTropicalCurve {
    /// Outward weighted vectors at a vertex.
    pub fn outward(&self, v: usize) -> Vec<(EdgeRef, LatticeVector)> {
        let mut out = Vec::with_capacity(3);
        for (i, e) in self.edges.iter().enumerate() {
            if e.from == v {
                out.push((EdgeRef::Bounded(i), e.weighted()));
            }
            if e.to == v {
                out.push((EdgeRef::Bounded(i), -e.weighted()));
            }
        }
        for (i, e) in self.ends.iter().enumerate() {
            if e.vertex == v {
                out.push((EdgeRef::End(i), e.vector));
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.outward(v).len()
    }

    pub fn weight(&self, e: EdgeRef) -> i64 {
        match e {
            EdgeRef::Bounded(i) => self.edges[i].weight,
            EdgeRef::End(i) => self.ends[i].weight(),
        }
    }

    pub fn primitive(&self, e: EdgeRef) -> LatticeVector {
        match e {
            EdgeRef::Bounded(i) => self.edges[i].direction,
            EdgeRef::End(i) => primitive_and_parity(self.ends[i].vector).map(|p| p.0).unwrap_or_default(),
        }
    }

    /// End vectors, ordered by label when all ends are labeled.
    pub fn degree(&self) -> Vec<LatticeVector> {
        let mut ends: Vec<&End> = self.ends.iter().collect();
        if ends.iter().all(|e| e.label.is_some()) {
            ends.sort_by_key(|e| e.label);
        }
        ends.iter().map(|e| e.vector).collect()
    }

    fn piece(&self, e: EdgeRef) -> Piece {
        match e {
            EdgeRef::Bounded(i) => {
                let ed = &self.edges[i];
                let a = self.vertices[ed.from].clone();
                let d = self.vertices[ed.to].minus(&a);
                Piece { edge: e, start: a, dir: d, bounded: true, verts: [Some(ed.from), Some(ed.to)] }
            }
            EdgeRef::End(i) => {
                let en = &self.ends[i];
                Piece {
                    edge: e,
                    start: self.vertices[en.vertex].clone(),
                    dir: vq(en.vector),
                    bounded: false,
                    verts: [Some(en.vertex), None],
                }
            }
        }
    }

    fn pieces(&self) -> Vec<Piece> {
        (0..self.edges.len())
            .map(EdgeRef::Bounded)
            .chain((0..self.ends.len()).map(EdgeRef::End))
            .map(|e| self.piece(e))
            .collect()
    }

    /// Geometric identity of the image, independent of labels and indexing.
    pub fn canonical_key(&self) -> CurveKey {
        let mut vertices = self.vertices.clone();
        vertices.sort();
        let mut edges: Vec<(Point, Point, i64)> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (self.vertices[e.from].clone(), self.vertices[e.to].clone());
                if a <= b {
                    (a, b, e.weight)
                } else {
                    (b, a, e.weight)
                }
            })
            .collect();
        edges.sort();
        let mut ends: Vec<(Point, LatticeVector)> =
            self.ends.iter().map(|e| (self.vertices[e.vertex].clone(), e.vector)).collect();
        ends.sort();
        CurveKey { vertices, edges, ends }
    }

    pub fn position_of(&self, e: EdgeRef, t: &Q) -> Point {
        let p = self.piece(e);
        Point::new(&p.start.x + t * &p.dir.0, &p.start.y + t * &p.dir.1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveKey {
    pub vertices: Vec<Point>,
    pub edges: Vec<(Point, Point, i64)>,
    pub ends: Vec<(Point, LatticeVector)>,
}

#[derive(Clone, Debug)]
struct Piece {
    edge: EdgeRef,
    start: Point,
    dir: (Q, Q),
    bounded: bool,
    verts: [Option<usize>; 2],
}

impl Piece {
    fn at(&self, s: &Q) -> Point {
        Point::new(&self.start.x + s * &self.dir.0, &self.start.y + s * &self.dir.1)
    }

    fn in_range(&self, s: &Q) -> bool {
        !s.is_negative() && (!self.bounded || *s <= Q::one())
    }

    fn at_endpoint(&self, s: &Q) -> bool {
        s.is_zero() || (self.bounded && s.is_one())
    }

    fn shares_vertex(&self, o: &Piece) -> Option<usize> {
        self.verts.iter().flatten().find(|v| o.verts.contains(&Some(**v))).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancingViolation {
    pub vertex: Option<usize>,
    pub reason: String,
}

pub fn check_balancing(t: &ParamTropicalCurve) -> std::result::Result<(), BalancingViolation> {
    if t.vertices.is_empty() {
        return Err(BalancingViolation { vertex: None, reason: "curve has no vertex".into() });
    }
    for v in 0..t.vertices.len() {
        let s: LatticeVector = t.outward(v).into_iter().map(|(_, u)| u).sum();
        if s != LatticeVector::ZERO {
            return Err(BalancingViolation { vertex: Some(v), reason: format!("outward sum {s}") });
        }
    }
    Ok(())
}

/// Structural and geometric consistency: indices in range, primitive
/// directions, edges realized by positive multiples of their direction.
pub fn check_geometry(t: &ParamTropicalCurve) -> Result<()> {
    let n = t.vertices.len();
    for (i, e) in t.edges.iter().enumerate() {
        if e.from >= n || e.to >= n || e.from == e.to {
            return Err(Error::InvalidCurve(format!("edge {i} has bad endpoints")));
        }
        if e.weight <= 0 || lattice_length(e.direction).ok() != Some(1) {
            return Err(Error::InvalidCurve(format!("edge {i} has bad weight or direction")));
        }
        let d = t.vertices[e.to].minus(&t.vertices[e.from]);
        let u = vq(e.direction);
        if !cross(&d, &u).is_zero() || !dotq(&d, &u).is_positive() {
            return Err(Error::InvalidCurve(format!("edge {i} is not a positive multiple of its direction")));
        }
    }
    for (i, e) in t.ends.iter().enumerate() {
        if e.vertex >= n || e.vector.is_zero() {
            return Err(Error::InvalidCurve(format!("end {i} is malformed")));
        }
    }
    if let Some(m) = &t.marked {
        let ok = match m.edge {
            EdgeRef::Bounded(i) if i < t.edges.len() => true,
            EdgeRef::End(i) if i < t.ends.len() => true,
            _ => false,
        };
        if !ok || !on_piece_open(&t.piece(m.edge), &m.position) {
            return Err(Error::InvalidCurve("marked point is not on its edge".into()));
        }
    }
    Ok(())
}

fn on_piece_open(p: &Piece, x: &Point) -> bool {
    let d = x.minus(&p.start);
    if !cross(&d, &p.dir).is_zero() {
        return false;
    }
    let s = dotq(&d, &p.dir) / dotq(&p.dir, &p.dir);
    s.is_positive() && (!p.bounded || s < Q::one())
}

fn components(t: &ParamTropicalCurve) -> usize {
    let n = t.vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in &t.edges {
        let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
        parent[a] = b;
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// A transversal double point of the image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub first: EdgeRef,
    pub second: EdgeRef,
    pub point: Point,
}

/// All double points of the image, or `NotSimple` if some vertex lies on
/// another edge, two edges overlap, or three branches meet.
pub fn image_crossings(t: &ParamTropicalCurve) -> Result<Vec<Crossing>> {
    let pieces = t.pieces();
    let mut out: Vec<Crossing> = Vec::new();
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            let (a, b) = (&pieces[i], &pieces[j]);
            let shared = a.shares_vertex(b);
            let den = cross(&a.dir, &b.dir);
            let qp = b.start.minus(&a.start);
            if den.is_zero() {
                if !cross(&qp, &a.dir).is_zero() {
                    continue;
                }
                // collinear: compare parameter intervals along a
                let aa = dotq(&a.dir, &a.dir);
                let t0 = dotq(&qp, &a.dir) / &aa;
                let slope = dotq(&b.dir, &a.dir) / &aa;
                let (lo_a, hi_a) = (Q::zero(), if a.bounded { Some(Q::one()) } else { None });
                let (lo_b, hi_b) = if b.bounded {
                    let t1 = &t0 + &slope;
                    if t0 <= t1 {
                        (Some(t0.clone()), Some(t1))
                    } else {
                        (Some(t1), Some(t0.clone()))
                    }
                } else if slope.is_positive() {
                    (Some(t0.clone()), None)
                } else {
                    (None, Some(t0.clone()))
                };
                let lo = match lo_b {
                    Some(l) if l > lo_a => l,
                    _ => lo_a,
                };
                let hi = match (hi_a, hi_b) {
                    (Some(x), Some(y)) => Some(if x < y { x } else { y }),
                    (Some(x), None) | (None, Some(x)) => Some(x),
                    (None, None) => None,
                };
                let overlap = match &hi {
                    Some(h) => *h >= lo,
                    None => true,
                };
                if !overlap {
                    continue;
                }
                let single = matches!(&hi, Some(h) if *h == lo);
                if single && shared.is_some() && a.at(&lo) == t.vertices[shared.unwrap()] {
                    continue;
                }
                return Err(Error::NotSimple);
            }
            let s = cross(&qp, &b.dir) / &den;
            let u = cross(&qp, &a.dir) / &den;
            if !a.in_range(&s) || !b.in_range(&u) {
                continue;
            }
            let x = a.at(&s);
            if let Some(v) = shared {
                if x == t.vertices[v] {
                    continue;
                }
            }
            if a.at_endpoint(&s) || b.at_endpoint(&u) {
                return Err(Error::NotSimple);
            }
            out.push(Crossing { first: a.edge, second: b.edge, point: x });
        }
    }
    out.sort_by(|p, q| p.point.cmp(&q.point));
    for w in out.windows(2) {
        if w[0].point == w[1].point {
            return Err(Error::NotSimple);
        }
    }
    Ok(out)
}

/// (first Betti number, simple?) for a balanced curve.
pub fn genus_and_simplicity(t: &ParamTropicalCurve) -> (i64, bool) {
    let genus = t.edges.len() as i64 - t.vertices.len() as i64 + components(t) as i64;
    let trivalent = (0..t.vertices.len()).all(|v| t.valence(v) == 3);
    let simple = trivalent
        && check_geometry(t).is_ok()
        && (0..t.vertices.len()).all(|v| {
            let o = t.outward(v);
            o.len() == 3 && wedge(o[0].1, o[1].1) != 0
        })
        && image_crossings(t).is_ok();
    (genus, simple)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveParity {
    Parity(Parity),
    NoOddEdges,
    Mixed,
}

pub fn curve_parity(t: &ParamTropicalCurve) -> CurveParity {
    let mut found: Option<Parity> = None;
    let all = (0..t.edges.len()).map(EdgeRef::Bounded).chain((0..t.ends.len()).map(EdgeRef::End));
    for e in all {
        if t.weight(e) % 2 == 0 {
            continue;
        }
        let p = t.primitive(e).parity();
        match found {
            None => found = Some(p),
            Some(q) if q != p => return CurveParity::Mixed,
            _ => {}
        }
    }
    match found {
        Some(p) => CurveParity::Parity(p),
        None => CurveParity::NoOddEdges,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellKind {
    /// Dual to a trivalent vertex.
    Triangle { vertex: usize },
    /// Dual to a double point of the image.
    Parallelogram { first: EdgeRef, second: EdgeRef, point: Point },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub polygon: LatticePolygon,
    pub kind: CellKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSubdivision {
    pub newton_polygon: LatticePolygon,
    /// Triangles in vertex order, then parallelograms in image-point order.
    pub cells: Vec<Cell>,
}

impl DualSubdivision {
    pub fn triangle_of(&self, v: usize) -> Option<&LatticePolygon> {
        self.cells.iter().find(|c| c.kind == CellKind::Triangle { vertex: v }).map(|c| &c.polygon)
    }

    pub fn parallelograms(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| matches!(c.kind, CellKind::Parallelogram { .. }))
    }

    /// Cells cover P_Δ exactly: total area matches, every cell lies in P_Δ
    /// and no two cells share interior points.
    pub fn check_tiling(&self) -> bool {
        let total: i64 = self.cells.iter().map(|c| c.polygon.doubled_area()).sum();
        if total != self.newton_polygon.doubled_area() {
            return false;
        }
        let inside = self.cells.iter().all(|c| {
            c.polygon.vertices().iter().all(|&p| self.newton_polygon.locate(p) != crate::lattice::Location::Outside)
        });
        if !inside {
            return false;
        }
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                if !interiors_disjoint(&self.cells[i].polygon, &self.cells[j].polygon) {
                    return false;
                }
            }
        }
        true
    }
}

/// Separating-axis test for convex polygons.
pub fn interiors_disjoint(a: &LatticePolygon, b: &LatticePolygon) -> bool {
    let axes = a.edges().into_iter().chain(b.edges()).map(|e| e.rot_cw());
    for n in axes {
        let pa: Vec<i64> = a.vertices().iter().map(|p| p.dot(n)).collect();
        let pb: Vec<i64> = b.vertices().iter().map(|p| p.dot(n)).collect();
        let (amin, amax) = (*pa.iter().min().unwrap(), *pa.iter().max().unwrap());
        let (bmin, bmax) = (*pb.iter().min().unwrap(), *pb.iter().max().unwrap());
        if amax <= bmin || bmax <= amin {
            return true;
        }
    }
    false
}

const RAY_CANDIDATES: [(i64, i64); 8] =
    [(7919, 104729), (-104723, 7907), (1009, -99991), (-31337, -27183), (3, 1000003), (999983, 17), (-65537, 257), (12289, -40961)];

/// Monomial of the region entered from `p` along `r`, or None when the ray
/// is not generic for this curve.
fn region_monomial(
    t: &ParamTropicalCurve,
    pieces: &[Piece],
    newton: &LatticePolygon,
    p: &Point,
    r: LatticeVector,
) -> Option<LatticeVector> {
    let mut far: Option<(i64, LatticeVector, bool)> = None;
    for &m in newton.vertices() {
        let s = m.dot(r);
        far = match far {
            None => Some((s, m, true)),
            Some((best, _, _)) if s > best => Some((s, m, true)),
            Some((best, bm, _)) if s == best => Some((best, bm, false)),
            other => other,
        };
    }
    let (_, mut m, unique) = far?;
    if !unique {
        return None;
    }
    let rq = vq(r);
    let mut hits: Vec<Q> = Vec::new();
    for pc in pieces {
        let den = cross(&rq, &pc.dir);
        let qp = pc.start.minus(p);
        if den.is_zero() {
            if cross(&qp, &rq).is_zero() {
                return None;
            }
            continue;
        }
        let s = cross(&qp, &pc.dir) / &den;
        let u = cross(&qp, &rq) / &den;
        if !pc.in_range(&u) {
            continue;
        }
        if !s.is_positive() {
            continue;
        }
        if pc.at_endpoint(&u) {
            return None;
        }
        hits.push(s);
        let w = t.weight(pc.edge);
        let prim = t.primitive(pc.edge);
        let mut n = prim.rot_ccw();
        if n.dot(r) < 0 {
            n = -n;
        }
        m -= n * w;
    }
    hits.sort();
    if hits.windows(2).any(|h| h[0] == h[1]) {
        return None;
    }
    Some(m)
}

fn dual_cell(m0: LatticeVector, r: LatticeVector, mut vectors: Vec<LatticeVector>) -> Result<LatticePolygon> {
    let rel = |u: LatticeVector| LatticeVector::new(u.dot(r), wedge(r, u));
    vectors.sort_by(|a, b| angle_cmp(rel(*a), rel(*b)));
    let mut verts = Vec::with_capacity(vectors.len());
    let mut cur = m0;
    for u in vectors {
        verts.push(cur);
        cur += u.rot_ccw();
    }
    LatticePolygon::from_ccw(verts)
}

pub fn dual_subdivision(t: &ParamTropicalCurve) -> Result<DualSubdivision> {
    let (_, simple) = genus_and_simplicity(t);
    if !simple {
        return Err(Error::NotSimple);
    }
    let newton = newton_polygon(&t.degree())?;
    let crossings = image_crossings(t)?;
    let pieces = t.pieces();
    let mut cells = Vec::new();
    let locate = |p: &Point| -> Result<(LatticeVector, LatticeVector)> {
        for &(a, b) in RAY_CANDIDATES.iter() {
            let r = LatticeVector::new(a, b);
            if let Some(m) = region_monomial(t, &pieces, &newton, p, r) {
                return Ok((m, r));
            }
        }
        Err(Error::GeneralPositionFailure("no generic ray for dual subdivision".into()))
    };
    for v in 0..t.vertices.len() {
        let (m, r) = locate(&t.vertices[v])?;
        let vecs = t.outward(v).into_iter().map(|(_, u)| u).collect();
        cells.push(Cell { polygon: dual_cell(m, r, vecs)?, kind: CellKind::Triangle { vertex: v } });
    }
    for c in crossings {
        let (m, r) = locate(&c.point)?;
        let (ua, ub) = (t.primitive(c.first) * t.weight(c.first), t.primitive(c.second) * t.weight(c.second));
        let poly = dual_cell(m, r, vec![ua, -ua, ub, -ub])?;
        cells.push(Cell { polygon: poly, kind: CellKind::Parallelogram { first: c.first, second: c.second, point: c.point } });
    }
    let sub = DualSubdivision { newton_polygon: newton, cells };
    if !sub.check_tiling() {
        return Err(Error::InternalInconsistency("dual cells do not tile the Newton polygon".into()));
    }
    Ok(sub)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tree {
    /// Vertices of Γ_v other than the cycle vertex itself.
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub ends: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    /// Cycle vertices in traversal order.
    pub cycle_vertices: Vec<usize>,
    /// `cycle_edges[i]` joins `cycle_vertices[i]` and `cycle_vertices[i+1]`.
    pub cycle_edges: Vec<usize>,
    pub trees: Vec<Tree>,
    /// For each vertex, the index (into `cycle_vertices`) of its tree.
    pub root_of: Vec<usize>,
}

impl CycleDecomposition {
    pub fn cycle_index(&self, v: usize) -> Option<usize> {
        self.cycle_vertices.iter().position(|&c| c == v)
    }

    /// Outward vectors at cycle vertex i: (towards previous, towards next, tree edge).
    pub fn cycle_vertex_vectors(&self, t: &ParamTropicalCurve, i: usize) -> (LatticeVector, LatticeVector, LatticeVector) {
        let v = self.cycle_vertices[i];
        let k = self.cycle_vertices.len();
        let prev_e = self.cycle_edges[(i + k - 1) % k];
        let next_e = self.cycle_edges[i];
        let (mut prev, mut next, mut tree) = (LatticeVector::ZERO, LatticeVector::ZERO, LatticeVector::ZERO);
        for (e, u) in t.outward(v) {
            match e {
                EdgeRef::Bounded(j) if j == prev_e => prev = u,
                EdgeRef::Bounded(j) if j == next_e => next = u,
                _ => tree = u,
            }
        }
        (prev, next, tree)
    }
}

pub fn decompose_cycle_and_trees(t: &ParamTropicalCurve) -> Result<CycleDecomposition> {
    let (genus, _) = genus_and_simplicity(t);
    if genus != 1 || components(t) != 1 {
        return Err(Error::NotElliptic);
    }
    let n = t.vertices.len();
    let mut deg = vec![0usize; n];
    for e in &t.edges {
        deg[e.from] += 1;
        deg[e.to] += 1;
    }
    let mut alive = vec![true; n];
    let mut edge_alive = vec![true; t.edges.len()];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for (i, e) in t.edges.iter().enumerate() {
            if edge_alive[i] && (e.from == v || e.to == v) {
                edge_alive[i] = false;
                let w = if e.from == v { e.to } else { e.from };
                deg[w] -= 1;
                if deg[w] == 1 {
                    stack.push(w);
                }
            }
        }
    }
    let start = (0..n).find(|&v| alive[v]).ok_or(Error::NotElliptic)?;
    let mut cycle_vertices = vec![start];
    let mut cycle_edges = Vec::new();
    let mut cur = start;
    let mut used = vec![false; t.edges.len()];
    loop {
        let (i, e) = t
            .edges
            .iter()
            .enumerate()
            .find(|(i, e)| edge_alive[*i] && !used[*i] && (e.from == cur || e.to == cur))
            .ok_or(Error::NotElliptic)?;
        used[i] = true;
        cycle_edges.push(i);
        let next = if e.from == cur { e.to } else { e.from };
        if next == start {
            break;
        }
        cycle_vertices.push(next);
        cur = next;
    }
    let k = cycle_vertices.len();
    let mut root_of = vec![usize::MAX; n];
    let mut trees = vec![Tree::default(); k];
    for (ci, &c) in cycle_vertices.iter().enumerate() {
        root_of[c] = ci;
        let mut stack = vec![c];
        while let Some(v) = stack.pop() {
            for (i, e) in t.edges.iter().enumerate() {
                if edge_alive[i] || (e.from != v && e.to != v) {
                    continue;
                }
                let w = if e.from == v { e.to } else { e.from };
                if root_of[w] == usize::MAX {
                    root_of[w] = ci;
                    trees[ci].vertices.push(w);
                    trees[ci].edges.push(i);
                    stack.push(w);
                }
            }
        }
    }
    for (i, e) in t.ends.iter().enumerate() {
        trees[root_of[e.vertex]].ends.push(i);
    }
    for tr in &mut trees {
        tr.vertices.sort();
        tr.edges.sort();
    }
    // off-cycle edges even, cycle edges uniformly odd with one parity or uniformly even
    let off_even = (0..t.edges.len()).filter(|i| !edge_alive[*i]).all(|i| t.edges[i].weight % 2 == 0)
        && t.ends.iter().all(|e| e.weight() % 2 == 0);
    let odd: Vec<&BoundedEdge> = cycle_edges.iter().map(|&i| &t.edges[i]).filter(|e| e.weight % 2 == 1).collect();
    let uniform = odd.is_empty()
        || (odd.len() == k && odd.iter().all(|e| e.direction.parity() == odd[0].direction.parity()));
    if !off_even || !uniform {
        return Err(Error::NoParity);
    }
    Ok(CycleDecomposition { cycle_vertices, cycle_edges, trees, root_of })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Even,
    OddMobile,
    OddNonMobile,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexClass {
    pub vertex: usize,
    pub kind: VertexKind,
    pub theta: Parity,
    /// 2𝒜 of the dual triangle.
    pub doubled_area: i64,
    /// Interior points of the dual triangle of parity θ.
    pub harnack: i64,
    /// Interior points of parity (θ₁+β, θ₂+α).
    pub twisted_harnack: i64,
}

/// Dual triangle of a vertex placed with one corner at the origin.
pub fn vertex_triangle(t: &ParamTropicalCurve, v: usize) -> Result<LatticePolygon> {
    let vecs: Vec<LatticeVector> = t.outward(v).into_iter().map(|(_, u)| u).collect();
    let r = RAY_CANDIDATES
        .iter()
        .map(|&(a, b)| LatticeVector::new(a, b))
        .find(|&r| vecs.iter().all(|&u| wedge(r, u) != 0))
        .ok_or_else(|| Error::GeneralPositionFailure("no generic ray".into()))?;
    dual_cell(LatticeVector::ZERO, r, vecs)
}

/// Which ends count as having primitive parity (α,β) when deciding
/// mobility. `None` means: read it off the end vector.
pub type EndParityOverride<'a> = Option<&'a [bool]>;

pub fn classify_vertices(
    t: &ParamTropicalCurve,
    dec: &CycleDecomposition,
    parity: Parity,
    end_override: EndParityOverride<'_>,
) -> Result<Vec<VertexClass>> {
    let (alpha, beta) = parity;
    let end_ok = |i: usize| match end_override {
        Some(o) => o[i],
        None => primitive_and_parity(t.ends[i].vector).map(|p| p.1 == parity).unwrap_or(false),
    };
    let mut out = Vec::with_capacity(t.vertices.len());
    for v in 0..t.vertices.len() {
        let tri = vertex_triangle(t, v)?;
        let outs = t.outward(v);
        let odd: Vec<LatticeVector> = outs.iter().filter(|(e, _)| t.weight(*e) % 2 == 1).map(|(_, u)| *u).collect();
        let (kind, theta) = if odd.is_empty() {
            (VertexKind::Even, tri.vertices()[0].parity())
        } else if odd.len() == 2 {
            if let Some(p) = odd.iter().map(|u| primitive_and_parity(*u).unwrap().1).find(|p| *p != parity) {
                return Err(Error::InvalidCurve(format!("odd edge of parity {p:?} at vertex {v}")));
            }
            let ci = dec.cycle_index(v).ok_or(Error::NoParity)?;
            let mobile = dec.trees[ci].ends.iter().all(|&i| end_ok(i));
            // the even side is the one not parallel to an odd edge vector
            let vs = tri.vertices();
            let mut theta = None;
            for k in 0..3 {
                let side = vs[(k + 1) % 3] - vs[k];
                if lattice_length(side)? % 2 == 0 {
                    theta = Some(vs[k].parity());
                }
            }
            let theta = theta.ok_or_else(|| Error::InvalidCurve("odd triangle without even side".into()))?;
            (if mobile { VertexKind::OddMobile } else { VertexKind::OddNonMobile }, theta)
        } else {
            return Err(Error::NoParity);
        };
        let twisted = (((theta.0 + beta) % 2), ((theta.1 + alpha) % 2));
        out.push(VertexClass {
            vertex: v,
            kind,
            theta,
            doubled_area: tri.doubled_area(),
            harnack: interior_points_with_parity(&tri, theta),
            twisted_harnack: interior_points_with_parity(&tri, twisted),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellClass {
    Triangle(VertexClass),
    /// `odd` when all four sides are odd.
    Parallelogram { odd: bool, doubled_area: i64 },
}

pub fn classify_cells(
    t: &ParamTropicalCurve,
    sub: &DualSubdivision,
    classes: &[VertexClass],
) -> Vec<CellClass> {
    sub.cells
        .iter()
        .map(|c| match &c.kind {
            CellKind::Triangle { vertex } => CellClass::Triangle(classes[*vertex].clone()),
            CellKind::Parallelogram { first, second, .. } => CellClass::Parallelogram {
                odd: t.weight(*first) % 2 == 1 && t.weight(*second) % 2 == 1,
                doubled_area: c.polygon.doubled_area(),
            },
        })
        .collect()
}

/// Number of double points between two odd edges: π(T).
pub fn odd_crossings(t: &ParamTropicalCurve) -> Result<i64> {
    Ok(image_crossings(t)?
        .iter()
        .filter(|c| t.weight(c.first) % 2 == 1 && t.weight(c.second) % 2 == 1)
        .count() as i64)
}

/// Convenience builder used by tests and fixtures.
#[derive(Default)]
pub struct CurveBuilder {
    curve: ParamTropicalCurve,
}

impl CurveBuilder {
    pub fn new() -> Self {
        CurveBuilder::default()
    }

    pub fn vertex(&mut self, p: Point) -> usize {
        self.curve.vertices.push(p);
        self.curve.vertices.len() - 1
    }

    /// Bounded edge between existing vertices; weight and direction are read
    /// off the positions (the weight must be supplied).
    pub fn edge(&mut self, from: usize, to: usize, weight: i64) -> Result<usize> {
        let (dx, dy) = self.curve.vertices[to].minus(&self.curve.vertices[from]);
        let dir = primitive_of_rational(&dx, &dy).ok_or(Error::InvalidCurve("degenerate edge".into()))?;
        self.curve.edges.push(BoundedEdge { from, to, weight, direction: dir });
        Ok(self.curve.edges.len() - 1)
    }

    pub fn end(&mut self, vertex: usize, vector: LatticeVector, label: Option<usize>) -> usize {
        self.curve.ends.push(End { vertex, vector, label });
        self.curve.ends.len() - 1
    }

    pub fn build(self) -> ParamTropicalCurve {
        self.curve
    }
}

/// Primitive integer vector positively proportional to (dx, dy), if rational.
pub fn primitive_of_rational(dx: &Q, dy: &Q) -> Option<LatticeVector> {
    if dx.is_zero() && dy.is_zero() {
        return None;
    }
    use num_integer::Integer;
    let l = dx.denom().lcm(dy.denom());
    let a = dx.numer() * (&l / dx.denom());
    let b = dy.numer() * (&l / dy.denom());
    let g = a.gcd(&b);
    let x: i64 = (a / &g).try_into().ok()?;
    let y: i64 = (b / &g).try_into().ok()?;
    Some(LatticeVector::new(x, y))
}
