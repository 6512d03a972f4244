//! Lattice vectors, convex lattice polygons and toric degrees.
//!
//! Everything here is integral. Areas are stored doubled so that lattice
//! triangles have integer area.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_integer::Integer;

use crate::error::{Error, Result};

/// Residues mod 2 of a pair of integers.
pub type Parity = (u8, u8);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    pub x: i64,
    pub y: i64,
}

impl LatticeVector {
    pub const ZERO: LatticeVector = LatticeVector { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        LatticeVector { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// Counter-clockwise rotation by π/2.
    pub fn rot_ccw(self) -> Self {
        LatticeVector::new(-self.y, self.x)
    }

    /// Clockwise rotation by π/2.
    pub fn rot_cw(self) -> Self {
        LatticeVector::new(self.y, -self.x)
    }

    pub fn dot(self, other: Self) -> i64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm2(self) -> i64 {
        self.dot(self)
    }

    /// Coordinates of the vector itself reduced mod 2.
    pub fn parity(self) -> Parity {
        (self.x.rem_euclid(2) as u8, self.y.rem_euclid(2) as u8)
    }

    pub fn is_even(self) -> bool {
        self.parity() == (0, 0)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Add for LatticeVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        LatticeVector::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for LatticeVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        LatticeVector::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for LatticeVector {
    type Output = Self;
    fn neg(self) -> Self {
        LatticeVector::new(-self.x, -self.y)
    }
}

impl Mul<i64> for LatticeVector {
    type Output = Self;
    fn mul(self, k: i64) -> Self {
        LatticeVector::new(self.x * k, self.y * k)
    }
}

impl AddAssign for LatticeVector {
    fn add_assign(&mut self, o: Self) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl SubAssign for LatticeVector {
    fn sub_assign(&mut self, o: Self) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl std::iter::Sum for LatticeVector {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(LatticeVector::ZERO, |a, b| a + b)
    }
}

pub fn wedge(a: LatticeVector, b: LatticeVector) -> i64 {
    a.x * b.y - a.y * b.x
}

pub fn lattice_length(a: LatticeVector) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::InvalidVector);
    }
    Ok(a.x.abs().gcd(&a.y.abs()))
}

pub fn primitive_and_parity(a: LatticeVector) -> Result<(LatticeVector, Parity)> {
    let g = lattice_length(a)?;
    let p = LatticeVector::new(a.x / g, a.y / g);
    Ok((p, p.parity()))
}

/// Total order of nonzero vectors by polar angle in [0, 2π).
pub fn angle_cmp(a: LatticeVector, b: LatticeVector) -> Ordering {
    fn half(v: LatticeVector) -> u8 {
        if v.y > 0 || (v.y == 0 && v.x > 0) {
            0
        } else {
            1
        }
    }
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&wedge(a, b)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

/// Strictly convex lattice polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePolygon {
    vertices: Vec<LatticeVector>,
    doubled_area: i64,
    lattice_perimeter: i64,
    interior_count: i64,
}

impl LatticePolygon {
    /// Vertices are rotated so that the lexicographically minimal one comes first.
    pub fn from_ccw(mut vertices: Vec<LatticeVector>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon("fewer than three vertices".into()));
        }
        for i in 0..n {
            let e1 = vertices[(i + 1) % n] - vertices[i];
            let e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            if wedge(e1, e2) <= 0 {
                return Err(Error::InvalidPolygon(format!(
                    "not strictly convex counter-clockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        // a star-shaped winding check: total turning must be one revolution
        let mut turns = 0;
        for i in 0..n {
            let e = vertices[(i + 1) % n] - vertices[i];
            let f = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            if angle_cmp(e, f) == Ordering::Greater {
                turns += 1;
            }
        }
        if turns != 1 {
            return Err(Error::InvalidPolygon("polygon winds more than once".into()));
        }
        let first = (0..n).min_by_key(|&i| vertices[i]).unwrap();
        vertices.rotate_left(first);
        let mut doubled_area = 0;
        let mut lattice_perimeter = 0;
        for i in 0..n {
            let (p, q) = (vertices[i], vertices[(i + 1) % n]);
            doubled_area += wedge(p, q);
            lattice_perimeter += lattice_length(q - p)?;
        }
        let mut poly = LatticePolygon {
            vertices,
            doubled_area,
            lattice_perimeter,
            interior_count: 0,
        };
        poly.interior_count = poly.scan().filter(|&(_, l)| l == Location::Interior).count() as i64;
        Ok(poly)
    }

    /// Convex hull of a point set (Andrew's monotone chain), collinear points dropped.
    pub fn convex_hull(points: &[LatticeVector]) -> Result<Self> {
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::InvalidPolygon("fewer than three distinct points".into()));
        }
        let mut lower: Vec<LatticeVector> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2
                && wedge(lower[lower.len() - 1] - lower[lower.len() - 2], p - lower[lower.len() - 1]) <= 0
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<LatticeVector> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && wedge(upper[upper.len() - 1] - upper[upper.len() - 2], p - upper[upper.len() - 1]) <= 0
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        LatticePolygon::from_ccw(lower)
    }

    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn doubled_area(&self) -> i64 {
        self.doubled_area
    }

    pub fn lattice_perimeter(&self) -> i64 {
        self.lattice_perimeter
    }

    pub fn interior_count(&self) -> i64 {
        self.interior_count
    }

    /// Lattice points on the boundary, counted by scanning.
    pub fn boundary_count(&self) -> i64 {
        self.scan().filter(|&(_, l)| l == Location::Boundary).count() as i64
    }

    pub fn edges(&self) -> Vec<LatticeVector> {
        let n = self.vertices.len();
        (0..n).map(|i| self.vertices[(i + 1) % n] - self.vertices[i]).collect()
    }

    pub fn translate(&self, v: LatticeVector) -> Self {
        LatticePolygon {
            vertices: self.vertices.iter().map(|&p| p + v).collect(),
            ..self.clone()
        }
    }

    pub fn locate(&self, p: LatticeVector) -> Location {
        let n = self.vertices.len();
        let mut on_edge = false;
        for i in 0..n {
            let s = wedge(self.vertices[(i + 1) % n] - self.vertices[i], p - self.vertices[i]);
            if s < 0 {
                return Location::Outside;
            }
            if s == 0 {
                on_edge = true;
            }
        }
        if on_edge {
            Location::Boundary
        } else {
            Location::Interior
        }
    }

    fn scan(&self) -> impl Iterator<Item = (LatticeVector, Location)> + '_ {
        let xmin = self.vertices.iter().map(|v| v.x).min().unwrap();
        let xmax = self.vertices.iter().map(|v| v.x).max().unwrap();
        let ymin = self.vertices.iter().map(|v| v.y).min().unwrap();
        let ymax = self.vertices.iter().map(|v| v.y).max().unwrap();
        (xmin..=xmax)
            .flat_map(move |x| (ymin..=ymax).map(move |y| LatticeVector::new(x, y)))
            .map(move |p| (p, self.locate(p)))
            .filter(|&(_, l)| l != Location::Outside)
    }

    /// All lattice points of the closed polygon, in lexicographic order.
    pub fn lattice_points(&self) -> Vec<LatticeVector> {
        self.scan().map(|(p, _)| p).collect()
    }

    pub fn interior_points(&self) -> Vec<LatticeVector> {
        self.scan().filter(|&(_, l)| l == Location::Interior).map(|(p, _)| p).collect()
    }

    pub fn lex_min_vertex(&self) -> LatticeVector {
        *self.vertices.iter().min().unwrap()
    }
}

pub fn polygon_metrics(p: &LatticePolygon) -> (i64, i64, i64) {
    (p.doubled_area(), p.lattice_perimeter(), p.interior_count())
}

pub fn interior_points_with_parity(p: &LatticePolygon, parity: Parity) -> i64 {
    p.interior_points().into_iter().filter(|q| q.parity() == parity).count() as i64
}

/// Newton polygon whose edge vectors are the degree vectors rotated by π/2,
/// translated so that its lexicographically minimal vertex is the origin.
pub fn newton_polygon(vectors: &[LatticeVector]) -> Result<LatticePolygon> {
    if vectors.iter().any(|v| v.is_zero()) {
        return Err(Error::InvalidVector);
    }
    if vectors.iter().copied().sum::<LatticeVector>() != LatticeVector::ZERO {
        return Err(Error::NotBalanced);
    }
    let mut merged: Vec<(LatticeVector, LatticeVector)> = Vec::new();
    for &v in vectors {
        let (p, _) = primitive_and_parity(v)?;
        match merged.iter_mut().find(|(q, _)| *q == p) {
            Some((_, s)) => *s += v,
            None => merged.push((p, v)),
        }
    }
    if merged.len() < 2 || merged.iter().all(|(p, _)| wedge(*p, merged[0].0) == 0) {
        return Err(Error::Degenerate);
    }
    merged.sort_by(|a, b| angle_cmp(a.0, b.0));
    let mut vertices = Vec::with_capacity(merged.len());
    let mut cur = LatticeVector::ZERO;
    for (_, s) in &merged {
        vertices.push(cur);
        cur += s.rot_ccw();
    }
    let m = *vertices.iter().min().unwrap();
    let vertices = vertices.into_iter().map(|v| v - m).collect();
    LatticePolygon::from_ccw(vertices)
}

/// A validated toric degree. Element order is kept: each element is an
/// individual end with its own constraint line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSpec {
    vectors: Vec<LatticeVector>,
    newton_polygon: LatticePolygon,
    is_even: bool,
    half_interior_count: Option<i64>,
}

impl DegreeSpec {
    pub fn vectors(&self) -> &[LatticeVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn newton_polygon(&self) -> &LatticePolygon {
        &self.newton_polygon
    }

    pub fn is_even(&self) -> bool {
        self.is_even
    }

    /// Twice the Euclidean area 𝒜(Δ).
    pub fn doubled_area(&self) -> i64 {
        self.newton_polygon.doubled_area()
    }

    pub fn lattice_perimeter(&self) -> i64 {
        self.newton_polygon.lattice_perimeter()
    }

    /// ℐ(½Δ); only defined for even degrees.
    pub fn half_interior_count(&self) -> Option<i64> {
        self.half_interior_count
    }

    /// Primitive outer normals of the sides of P_Δ.
    pub fn side_normals(&self) -> Vec<LatticeVector> {
        let mut out: Vec<LatticeVector> = Vec::new();
        for &v in &self.vectors {
            let (p, _) = primitive_and_parity(v).expect("nonzero");
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out.sort_by(|a, b| angle_cmp(*a, *b));
        out
    }

    /// At most one side of P_Δ has a primitive outer normal of the given parity.
    pub fn is_admissible(&self, parity: Parity) -> bool {
        self.side_normals().iter().filter(|n| n.parity() == parity).count() <= 1
    }

    /// Canonical multiset key (sorted vectors).
    pub fn multiset_key(&self) -> Vec<LatticeVector> {
        let mut v = self.vectors.clone();
        v.sort();
        v
    }
}

pub fn validate_degree(vectors: &[LatticeVector], require_even: bool) -> Result<DegreeSpec> {
    if vectors.is_empty() {
        return Err(Error::Degenerate);
    }
    let newton_polygon = newton_polygon(vectors)?;
    let is_even = vectors.iter().all(|v| v.is_even());
    if require_even && !is_even {
        return Err(Error::NotEven);
    }
    let half_interior_count = if is_even {
        let half = LatticePolygon::from_ccw(
            newton_polygon.vertices().iter().map(|v| LatticeVector::new(v.x / 2, v.y / 2)).collect(),
        )?;
        let i = half.interior_count();
        // 4·ℐ(½Δ) = 𝒜 − 𝒫 + 4 with 𝒜 the Euclidean area
        if 8 * i != newton_polygon.doubled_area() - 2 * newton_polygon.lattice_perimeter() + 8 {
            return Err(Error::InternalInconsistency("half-polygon interior count identity".into()));
        }
        Some(i)
    } else {
        None
    };
    Ok(DegreeSpec { vectors: vectors.to_vec(), newton_polygon, is_even, half_interior_count })
}
