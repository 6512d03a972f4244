//! Brute-force enumeration of simple rational and elliptic tropical curves
//! through line constraints, by exhausting combinatorial types.
//!
//! Each type gives a linear system in (base point, edge lengths[, marked
//! parameter]). A floating-point pass discards hopeless systems; every
//! survivor is re-solved exactly and only the exact solution is used.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{lattice_length, primitive_and_parity, validate_degree, wedge, DegreeSpec, LatticeVector, Parity};
use crate::laurent::LaurentPoly;
use crate::menelaus::OrientedLine;
use crate::orientkit::{analyze, rational_multiplicity, refined_multiplicity_closed};
use crate::tropcurve::{
    curve_parity, genus_and_simplicity, BoundedEdge, CurveKey, CurveParity, EdgeRef, End, MarkedPoint,
    ParamTropicalCurve, Point, Q,
};

/// Abstract trivalent graph: internal vertices `0..vertices`, bounded edges
/// with their weighted direction, ends carrying degree labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CombinatorialType {
    pub vertices: usize,
    /// (from, to, weighted direction from → to)
    pub edges: Vec<(usize, usize, LatticeVector)>,
    /// (vertex, degree label)
    pub ends: Vec<(usize, usize)>,
    /// Edge left out of the spanning tree (genus 1 only).
    pub closing: Option<usize>,
}

/// Labeled unrooted trivalent trees: leaves are nodes `0..n`, internal
/// nodes follow. Yields (2n−5)!! trees.
pub fn trivalent_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    assert!(n >= 3);
    let mut out = vec![vec![(0, n), (1, n), (2, n)]];
    for k in 3..n {
        let mut next = Vec::with_capacity(out.len() * (2 * k - 3));
        for t in &out {
            for i in 0..t.len() {
                let (u, v) = t[i];
                let w = n + k - 2;
                let mut nt = t.clone();
                nt[i] = (u, w);
                nt.push((w, v));
                nt.push((w, k));
                next.push(nt);
            }
        }
        out = next;
    }
    out
}

/// Outward vector flowing through each tree edge: the sum of leaf vectors
/// on the far side. `leaf_vec[i]` is the vector of leaf `i`.
fn tree_flows(edges: &[(usize, usize)], leaf_vec: &[LatticeVector], nodes: usize) -> Vec<(usize, usize, LatticeVector)> {
    let mut adj = vec![Vec::new(); nodes];
    for (i, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    // flow from u to v along edge = sum of leaves on v's side
    fn side(adj: &[Vec<(usize, usize)>], leaf_vec: &[LatticeVector], from: usize, at: usize) -> LatticeVector {
        if at < leaf_vec.len() {
            return leaf_vec[at];
        }
        adj[at].iter().filter(|(w, _)| *w != from).map(|&(w, _)| side(adj, leaf_vec, at, w)).sum()
    }
    edges.iter().map(|&(u, v)| (u, v, side(&adj, leaf_vec, u, v))).collect()
}

/// Genus-0 types of a degree: internal-internal edges become bounded edges.
pub fn rational_types(degree: &[LatticeVector]) -> Vec<CombinatorialType> {
    let n = degree.len();
    if n < 3 {
        return Vec::new();
    }
    let nodes = 2 * n - 2;
    let mut out = Vec::new();
    'tree: for t in trivalent_trees(n) {
        let flows = tree_flows(&t, degree, nodes);
        let mut edges = Vec::new();
        let mut ends = Vec::new();
        for (u, v, f) in flows {
            if u < n || v < n {
                let (leaf, inner) = if u < n { (u, v) } else { (v, u) };
                ends.push((inner - n, leaf));
            } else {
                if f.is_zero() {
                    continue 'tree;
                }
                edges.push((u - n, v - n, f));
            }
        }
        let ty = CombinatorialType { vertices: n - 2, edges, ends, closing: None };
        if ty.has_flat_vertex(degree) {
            continue;
        }
        out.push(ty);
    }
    out
}

impl CombinatorialType {
    fn outward(&self, v: usize, degree: &[LatticeVector]) -> Vec<LatticeVector> {
        let mut out = Vec::with_capacity(3);
        for &(a, b, f) in &self.edges {
            if a == v {
                out.push(f);
            }
            if b == v {
                out.push(-f);
            }
        }
        for &(a, l) in &self.ends {
            if a == v {
                out.push(degree[l]);
            }
        }
        out
    }

    /// Some vertex has two parallel edges (degenerate dual triangle).
    fn has_flat_vertex(&self, degree: &[LatticeVector]) -> bool {
        (0..self.vertices).any(|v| {
            let o = self.outward(v, degree);
            o.iter().any(|u| u.is_zero()) || wedge(o[0], o[1]) == 0
        })
    }
}

/// Set partitions of `0..n` into `m` cyclically arranged blocks, up to
/// rotation and reflection of the cycle.
fn cyclic_arrangements(n: usize, m: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];
    fn rec(i: usize, n: usize, m: usize, assign: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            let mut blocks = vec![Vec::new(); m];
            for (l, &b) in assign.iter().enumerate() {
                blocks[b].push(l);
            }
            if blocks.iter().any(|b| b.is_empty()) {
                return;
            }
            if m >= 3 && blocks[1][0] > blocks[m - 1][0] {
                return;
            }
            out.push(blocks);
            return;
        }
        let range = if i == 0 { 0..1 } else { 0..m };
        for b in range {
            assign[i] = b;
            rec(i + 1, n, m, assign, out);
        }
    }
    rec(0, n, m, &mut assign, &mut out);
    out
}

/// Rooted binary trees on a label set, as (edge list over local nodes,
/// local node adjacent to the root). Local leaves are `0..k` mapping to
/// `labels`, the root marker is node `k`.
fn rooted_trees(k: usize) -> Vec<Vec<(usize, usize)>> {
    if k == 1 {
        return vec![Vec::new()];
    }
    trivalent_trees(k + 1)
}

/// Genus-1 skeletons: the cycle plus rooted trees, with cycle edge 0 from
/// cycle vertex 0 to cycle vertex 1 left symbolic.
#[derive(Clone, Debug)]
pub struct EllipticSkeleton {
    pub vertices: usize,
    /// Cycle vertices in order.
    pub cycle: Vec<usize>,
    /// Tree bounded edges with flows.
    pub tree_edges: Vec<(usize, usize, LatticeVector)>,
    pub ends: Vec<(usize, usize)>,
    /// Sum of end vectors hanging off each cycle vertex.
    pub block_sums: Vec<LatticeVector>,
}

pub fn elliptic_skeletons(degree: &[LatticeVector]) -> Vec<EllipticSkeleton> {
    let n = degree.len();
    let mut out = Vec::new();
    for m in 3..=n {
        for blocks in cyclic_arrangements(n, m) {
            let mut partial: Vec<EllipticSkeleton> = vec![EllipticSkeleton {
                vertices: m,
                cycle: (0..m).collect(),
                tree_edges: Vec::new(),
                ends: Vec::new(),
                block_sums: blocks.iter().map(|b| b.iter().map(|&l| degree[l]).sum()).collect(),
            }];
            for (ci, block) in blocks.iter().enumerate() {
                let k = block.len();
                let mut next = Vec::new();
                for sk in &partial {
                    if k == 1 {
                        let mut s = sk.clone();
                        s.ends.push((ci, block[0]));
                        next.push(s);
                        continue;
                    }
                    let local: Vec<LatticeVector> = block
                        .iter()
                        .map(|&l| degree[l])
                        .chain(std::iter::once(-sk.block_sums[ci]))
                        .collect();
                    'tree: for t in rooted_trees(k) {
                        let nodes = 2 * (k + 1) - 2;
                        let flows = tree_flows(&t, &local, nodes);
                        let mut s = sk.clone();
                        let base = s.vertices;
                        let map = |x: usize| if x == k { ci } else { base + x - (k + 1) };
                        s.vertices += k - 1;
                        for (u, v, f) in flows {
                            let (u_leaf, v_leaf) = (u < k, v < k);
                            if u_leaf || v_leaf {
                                let (leaf, inner) = if u_leaf { (u, v) } else { (v, u) };
                                s.ends.push((map(inner), block[leaf]));
                            } else if u == k || v == k {
                                // edge from the root marker into the tree
                                let (inner, f_out) = if u == k { (v, -f) } else { (u, f) };
                                // f_out flows from inner toward root marker; edge from cycle vertex to inner
                                if f_out.is_zero() {
                                    continue 'tree;
                                }
                                s.tree_edges.push((ci, map(inner), -f_out));
                            } else {
                                if f.is_zero() {
                                    continue 'tree;
                                }
                                s.tree_edges.push((map(u), map(v), f));
                            }
                        }
                        next.push(s);
                    }
                }
                partial = next;
            }
            out.extend(partial);
        }
    }
    out
}

/// Realize a skeleton with a chosen first cycle edge vector.
pub fn skeleton_type(sk: &EllipticSkeleton, d0: LatticeVector) -> Option<CombinatorialType> {
    let m = sk.cycle.len();
    let mut edges = Vec::with_capacity(sk.tree_edges.len() + m);
    let mut d = d0;
    for i in 0..m {
        if i > 0 {
            d -= sk.block_sums[i];
        }
        if d.is_zero() {
            return None;
        }
        edges.push((sk.cycle[i], sk.cycle[(i + 1) % m], d));
    }
    // closure: last cycle edge must also balance at vertex 0
    if d - sk.block_sums[0] != d0 {
        return None;
    }
    let closing = Some(m - 1);
    edges.extend(sk.tree_edges.iter().copied());
    Some(CombinatorialType { vertices: sk.vertices, edges, ends: sk.ends.clone(), closing })
}

// ---------------------------------------------------------------------------
// linear systems

/// Affine form over the unknowns plus a constant.
#[derive(Clone, Debug)]
struct Form {
    coef: Vec<Q>,
    constant: Q,
}

impl Form {
    fn zero(n: usize) -> Self {
        Form { coef: vec![Q::zero(); n], constant: Q::zero() }
    }
}

/// Position forms (x, y) of every vertex, base point = vertex 0.
fn position_forms(ty: &CombinatorialType, unknowns: usize) -> Vec<(Form, Form)> {
    let mut pos: Vec<Option<(Form, Form)>> = vec![None; ty.vertices];
    let mut x = Form::zero(unknowns);
    x.coef[0] = Q::one();
    let mut y = Form::zero(unknowns);
    y.coef[1] = Q::one();
    pos[0] = Some((x, y));
    let mut changed = true;
    while changed {
        changed = false;
        for (i, &(a, b, f)) in ty.edges.iter().enumerate() {
            if Some(i) == ty.closing {
                continue;
            }
            let (src, dst, sign) = match (&pos[a], &pos[b]) {
                (Some(_), None) => (a, b, 1),
                (None, Some(_)) => (b, a, -1),
                _ => continue,
            };
            let (mut px, mut py) = pos[src].clone().unwrap();
            px.coef[2 + i] += Q::from_integer((sign * f.x).into());
            py.coef[2 + i] += Q::from_integer((sign * f.y).into());
            pos[dst] = Some((px, py));
            changed = true;
        }
    }
    pos.into_iter().map(|p| p.expect("connected type")).collect()
}

#[derive(Clone, Debug)]
pub enum Marker {
    /// x₀ on a bounded edge.
    Edge(usize),
    /// x₀ on the end with this index in `ty.ends`.
    End(usize),
}

fn build_rows(
    ty: &CombinatorialType,
    degree: &[LatticeVector],
    lines: &[OrientedLine],
    marked: Option<(&Marker, &Point)>,
) -> (Vec<Form>, usize) {
    let unknowns = 2 + ty.edges.len() + usize::from(marked.is_some());
    let pos = position_forms(ty, unknowns);
    let mut rows = Vec::new();
    if let Some(c) = ty.closing {
        let (a, b, f) = ty.edges[c];
        for (k, fk) in [(0, f.x), (1, f.y)] {
            let pa = if k == 0 { &pos[a].0 } else { &pos[a].1 };
            let pb = if k == 0 { &pos[b].0 } else { &pos[b].1 };
            let mut r = Form::zero(unknowns);
            for j in 0..unknowns {
                r.coef[j] = &pa.coef[j] - &pb.coef[j];
            }
            r.coef[2 + c] += Q::from_integer(fk.into());
            rows.push(r);
        }
    }
    for &(v, l) in &ty.ends {
        let a = degree[l];
        let mut r = Form::zero(unknowns);
        for j in 0..unknowns {
            r.coef[j] = &pos[v].0.coef[j] * Q::from_integer(a.y.into()) - &pos[v].1.coef[j] * Q::from_integer(a.x.into());
        }
        r.constant = -lines[l].value.clone();
        rows.push(r);
    }
    if let Some((mk, x0)) = marked {
        let (v, dir) = match *mk {
            Marker::Edge(i) => (ty.edges[i].0, ty.edges[i].2),
            Marker::End(i) => (ty.ends[i].0, degree[ty.ends[i].1]),
        };
        let t = unknowns - 1;
        for (k, dk, target) in [(0, dir.x, &x0.x), (1, dir.y, &x0.y)] {
            let p = if k == 0 { &pos[v].0 } else { &pos[v].1 };
            let mut r = Form::zero(unknowns);
            r.coef.clone_from(&p.coef);
            r.coef[t] += Q::from_integer(dk.into());
            r.constant = -target.clone();
            rows.push(r);
        }
    }
    (rows, unknowns)
}

enum Exact {
    Unique(Vec<Q>),
    Inconsistent,
    Underdetermined,
}

/// Solve rows·x + constant = 0 exactly.
fn solve_exact(rows: &[Form], n: usize) -> Exact {
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| {
            let mut v = r.coef.clone();
            v.push(-r.constant.clone());
            v
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for j in col..=n {
            m[row][j] = &m[row][j] * &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=n {
                    let d = &f * &m[row][j];
                    m[i][j] -= d;
                }
            }
        }
        piv_cols.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) {
        return Exact::Inconsistent;
    }
    if piv_cols.len() < n {
        return Exact::Underdetermined;
    }
    Exact::Unique((0..n).map(|i| m[i][n].clone()).collect())
}

/// Floating-point screen. Returns false only when the system is clearly
/// inconsistent or a length is clearly negative.
fn plausible_f64(rows: &[Form], n: usize, positive: &[usize], marked_range: Option<(usize, Option<usize>)>) -> bool {
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut v: Vec<f64> = r.coef.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
            v.push(-r.constant.to_f64().unwrap_or(f64::NAN));
            v
        })
        .collect();
    let scale = m.iter().flatten().fold(1.0f64, |a, &b| a.max(b.abs()));
    let eps = 1e-9 * scale;
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let (p, best) = (row..m.len()).map(|i| (i, m[i][col].abs())).fold((usize::MAX, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        if p == usize::MAX || best <= eps {
            continue;
        }
        m.swap(row, p);
        let piv = m[row][col];
        for j in 0..=n {
            m[row][j] /= piv;
        }
        for i in 0..m.len() {
            if i != row {
                let f = m[i][col];
                if f != 0.0 {
                    for j in 0..=n {
                        m[i][j] -= f * m[row][j];
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| r[n].abs() > 1e-6 * scale.max(1.0)) {
        return false;
    }
    if pivots.len() < n {
        return true;
    }
    let mut x = vec![0.0; n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][n];
    }
    let tol = 1e-7 * x.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    if positive.iter().any(|&i| x[i] < -tol) {
        return false;
    }
    if let Some((t, upper)) = marked_range {
        if x[t] < -tol {
            return false;
        }
        if let Some(u) = upper {
            if x[t] > x[u] + tol {
                return false;
            }
        }
    }
    true
}

fn realize(
    ty: &CombinatorialType,
    degree: &[LatticeVector],
    sol: &[Q],
    marked: Option<(&Marker, &Point)>,
) -> Option<ParamTropicalCurve> {
    let unknowns = sol.len();
    let forms = position_forms(ty, unknowns);
    let eval = |f: &Form| -> Q {
        let mut acc = f.constant.clone();
        for (c, x) in f.coef.iter().zip(sol) {
            if !c.is_zero() {
                acc += c * x;
            }
        }
        acc
    };
    let vertices: Vec<Point> = forms.iter().map(|(x, y)| Point::new(eval(x), eval(y))).collect();
    let mut edges = Vec::with_capacity(ty.edges.len());
    for (i, &(a, b, f)) in ty.edges.iter().enumerate() {
        if !sol[2 + i].is_positive() {
            return None;
        }
        let w = lattice_length(f).ok()?;
        edges.push(BoundedEdge { from: a, to: b, weight: w, direction: LatticeVector::new(f.x / w, f.y / w) });
    }
    let ends = ty.ends.iter().map(|&(v, l)| End { vertex: v, vector: degree[l], label: Some(l) }).collect();
    let mut curve = ParamTropicalCurve { vertices, edges, ends, marked: None };
    if let Some((mk, x0)) = marked {
        let t = &sol[unknowns - 1];
        if !t.is_positive() {
            return None;
        }
        let edge = match *mk {
            Marker::Edge(i) => {
                if *t >= sol[2 + i] {
                    return None;
                }
                EdgeRef::Bounded(i)
            }
            Marker::End(i) => EdgeRef::End(i),
        };
        curve.marked = Some(MarkedPoint { edge, position: x0.clone() });
    }
    Some(curve)
}

/// Outcome of solving one type with one marker choice.
fn solve_type(
    ty: &CombinatorialType,
    degree: &[LatticeVector],
    lines: &[OrientedLine],
    marked: Option<(&Marker, &Point)>,
    exact_only: bool,
) -> Result<Option<ParamTropicalCurve>> {
    let (rows, unknowns) = build_rows(ty, degree, lines, marked);
    if !exact_only {
        let positive: Vec<usize> = (2..2 + ty.edges.len()).collect();
        let range = marked.map(|(mk, _)| {
            (
                unknowns - 1,
                match mk {
                    Marker::Edge(i) => Some(2 + *i),
                    Marker::End(_) => None,
                },
            )
        });
        if !plausible_f64(&rows, unknowns, &positive, range) {
            return Ok(None);
        }
    }
    match solve_exact(&rows, unknowns) {
        Exact::Inconsistent => Ok(None),
        Exact::Underdetermined => Err(Error::GeneralPositionFailure("underdetermined type".into())),
        Exact::Unique(sol) => {
            if sol[2..2 + ty.edges.len()].iter().any(|l| l.is_zero()) {
                return Err(Error::GeneralPositionFailure("edge of length zero".into()));
            }
            Ok(realize(ty, degree, &sol, marked))
        }
    }
}

fn dedupe_sorted(mut curves: Vec<ParamTropicalCurve>) -> Result<Vec<ParamTropicalCurve>> {
    curves.sort_by_cached_key(|c| c.canonical_key());
    for w in curves.windows(2) {
        if w[0].canonical_key() == w[1].canonical_key() {
            return Err(Error::DuplicateCurve("oracle produced the same curve twice".into()));
        }
    }
    Ok(curves)
}

/// All simple rational curves of the degree with ends on the given lines.
pub fn enumerate_rational_curves(degree: &[LatticeVector], lines: &[OrientedLine]) -> Result<Vec<ParamTropicalCurve>> {
    enumerate_rational_curves_with(degree, lines, false)
}

pub fn enumerate_rational_curves_with(
    degree: &[LatticeVector],
    lines: &[OrientedLine],
    exact_only: bool,
) -> Result<Vec<ParamTropicalCurve>> {
    if degree.len() < 3 {
        return Ok(Vec::new());
    }
    let types = rational_types(degree);
    let found: Vec<Option<ParamTropicalCurve>> =
        types.par_iter().map(|ty| solve_type(ty, degree, lines, None, exact_only)).collect::<Result<_>>()?;
    let mut curves = Vec::new();
    for c in found.into_iter().flatten() {
        let (g, simple) = genus_and_simplicity(&c);
        if g == 0 && simple {
            curves.push(c);
        } else if g == 0 {
            return Err(Error::GeneralPositionFailure("non-simple rational solution".into()));
        }
    }
    dedupe_sorted(curves)
}

/// Candidate weighted directions of bounded edges: differences of lattice
/// points of P_Δ rotated by π/2.
pub fn dual_difference_vectors(degree: &DegreeSpec) -> HashSet<LatticeVector> {
    let pts = degree.newton_polygon().lattice_points();
    let mut out = HashSet::new();
    for &p in &pts {
        for &q in &pts {
            if p != q {
                out.insert((p - q).rot_ccw());
            }
        }
    }
    out
}

/// All simple elliptic curves of the degree and parity through the
/// extended constraint (lines, x₀).
pub fn enumerate_elliptic_curves(
    degree: &DegreeSpec,
    parity: Parity,
    lines: &[OrientedLine],
    x0: &Point,
) -> Result<Vec<ParamTropicalCurve>> {
    enumerate_elliptic_curves_with(degree, parity, lines, x0, false)
}

pub fn enumerate_elliptic_curves_with(
    degree: &DegreeSpec,
    parity: Parity,
    lines: &[OrientedLine],
    x0: &Point,
    exact_only: bool,
) -> Result<Vec<ParamTropicalCurve>> {
    let vecs = degree.vectors();
    let diffs = dual_difference_vectors(degree);
    let mut d0s: Vec<LatticeVector> = diffs.iter().copied().filter(|d| d.parity() == parity).collect();
    d0s.sort();
    let skeletons = elliptic_skeletons(vecs);
    let jobs: Vec<(usize, LatticeVector)> =
        (0..skeletons.len()).flat_map(|s| d0s.iter().map(move |&d| (s, d))).collect();
    let found: Vec<Vec<ParamTropicalCurve>> = jobs
        .par_iter()
        .map(|&(s, d0)| -> Result<Vec<ParamTropicalCurve>> {
            let Some(ty) = skeleton_type(&skeletons[s], d0) else { return Ok(Vec::new()) };
            if ty.edges.iter().any(|e| !diffs.contains(&e.2)) || ty.has_flat_vertex(vecs) {
                return Ok(Vec::new());
            }
            let markers = (0..ty.edges.len()).map(Marker::Edge).chain((0..ty.ends.len()).map(Marker::End));
            let mut out = Vec::new();
            for mk in markers {
                if let Some(c) = solve_type(&ty, vecs, lines, Some((&mk, x0)), exact_only)? {
                    out.push(c);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut curves = Vec::new();
    for c in found.into_iter().flatten() {
        let (g, simple) = genus_and_simplicity(&c);
        if g != 1 {
            continue;
        }
        if !simple {
            return Err(Error::GeneralPositionFailure("non-simple elliptic solution".into()));
        }
        if curve_parity(&c) == CurveParity::Parity(parity) {
            curves.push(c);
        }
    }
    dedupe_sorted(curves)
}

/// Seeded generic Menelaus lines for a degree: random rationals with
/// bounded denominators, last value fixed by Σλ = 0.
pub fn random_lines(degree: &[LatticeVector], rng: &mut ChaCha8Rng) -> Vec<OrientedLine> {
    let n = degree.len();
    let mut vals: Vec<Q> = (0..n.saturating_sub(1))
        .map(|_| Q::new(rng.gen_range(-5000i64..=5000).into(), rng.gen_range(997i64..=1999).into()))
        .collect();
    let s: Q = vals.iter().cloned().fold(Q::zero(), |a, b| a + b);
    vals.push(-s);
    degree.iter().zip(vals).map(|(&a, v)| OrientedLine::new(a, v)).collect()
}

fn random_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(
        Q::new(rng.gen_range(-9000i64..=9000).into(), rng.gen_range(1009i64..=2003).into()),
        Q::new(rng.gen_range(-9000i64..=9000).into(), rng.gen_range(1009i64..=2003).into()),
    )
}

const ATTEMPTS: usize = 16;

/// 𝔊₀ via the oracle with seeded generic constraints.
pub fn g0(degree: &DegreeSpec, seed: u64) -> Result<LaurentPoly> {
    if !degree.is_even() {
        return Err(Error::NotEven);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6730_0000);
    let mut last = None;
    for _ in 0..ATTEMPTS {
        let lines = random_lines(degree.vectors(), &mut rng);
        match enumerate_rational_curves(degree.vectors(), &lines) {
            Ok(curves) => {
                let mut total = LaurentPoly::zero();
                for c in &curves {
                    total = total + rational_multiplicity(c)?;
                }
                return Ok(total);
            }
            Err(e @ Error::GeneralPositionFailure(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// Result of the oracle's 𝔊₁ computation, with the curves it summed.
#[derive(Clone, Debug)]
pub struct OracleG1 {
    pub value: LaurentPoly,
    pub curves: Vec<ParamTropicalCurve>,
    pub lines: Vec<OrientedLine>,
    pub x0: Point,
}

pub fn g1_oracle(degree: &DegreeSpec, parity: Parity, seed: u64, allow_non_admissible: bool) -> Result<LaurentPoly> {
    Ok(g1_oracle_detailed(degree, parity, seed, allow_non_admissible)?.value)
}

pub fn g1_oracle_detailed(degree: &DegreeSpec, parity: Parity, seed: u64, allow_non_admissible: bool) -> Result<OracleG1> {
    if !degree.is_even() {
        return Err(Error::NotEven);
    }
    if parity == (0, 0) || (!allow_non_admissible && !degree.is_admissible(parity)) {
        return Err(Error::NotAdmissible);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6731_0000);
    let mut last = None;
    for _ in 0..ATTEMPTS {
        let lines = random_lines(degree.vectors(), &mut rng);
        let x0 = random_point(&mut rng);
        match g1_with_constraints(degree, parity, &lines, &x0) {
            Ok((value, curves)) => return Ok(OracleG1 { value, curves, lines, x0 }),
            Err(e @ Error::GeneralPositionFailure(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// Σ of closed-form multiplicities over the elliptic curves through a given
/// extended constraint.
pub fn g1_with_constraints(
    degree: &DegreeSpec,
    parity: Parity,
    lines: &[OrientedLine],
    x0: &Point,
) -> Result<(LaurentPoly, Vec<ParamTropicalCurve>)> {
    let curves = enumerate_elliptic_curves(degree, parity, lines, x0)?;
    let mut total = LaurentPoly::zero();
    for c in &curves {
        let a = analyze(c, parity, None)?;
        total = total + refined_multiplicity_closed(&a);
    }
    Ok((total, curves))
}

/// Curve keys of a list, for set comparisons.
pub fn key_set(curves: &[ParamTropicalCurve]) -> BTreeMap<CurveKey, usize> {
    let mut m = BTreeMap::new();
    for c in curves {
        *m.entry(c.canonical_key()).or_insert(0) += 1;
    }
    m
}

/// Degree from raw vectors, for callers that have not validated yet.
pub fn even_degree(vectors: &[LatticeVector]) -> Result<DegreeSpec> {
    validate_degree(vectors, true)
}

/// Parity of a primitive vector, or None for the zero vector.
pub fn primitive_parity(v: LatticeVector) -> Option<Parity> {
    primitive_and_parity(v).ok().map(|p| p.1)
}
