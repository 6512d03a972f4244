//! Orientation kits of a simple elliptic curve of parity (α,β), their
//! quantum indices and Welschinger signs, and the refined multiplicity.

use crate::error::{Error, Result};
use crate::lattice::{validate_degree, wedge, Parity};
use crate::laurent::LaurentPoly;
use crate::tropcurve::{
    classify_vertices, decompose_cycle_and_trees, odd_crossings, CycleDecomposition, EdgeRef, EndParityOverride,
    ParamTropicalCurve, VertexClass, VertexKind,
};

/// Everything about a curve that kit computations need.
#[derive(Clone, Debug)]
pub struct CurveAnalysis {
    pub parity: Parity,
    pub decomposition: CycleDecomposition,
    pub classes: Vec<VertexClass>,
    /// Sign of each cycle vertex induced by the forward traversal of the
    /// cycle; 0 off the cycle.
    pub induced: Vec<i8>,
    pub odd_crossings: i64,
    pub degree_doubled_area: i64,
    pub half_interior_count: i64,
}

impl CurveAnalysis {
    pub fn count(&self, kind: VertexKind) -> usize {
        self.classes.iter().filter(|c| c.kind == kind).count()
    }

    fn free_vertices(&self) -> Vec<usize> {
        self.classes.iter().filter(|c| c.kind != VertexKind::OddNonMobile).map(|c| c.vertex).collect()
    }
}

pub fn analyze(t: &ParamTropicalCurve, parity: Parity, end_override: EndParityOverride<'_>) -> Result<CurveAnalysis> {
    let degree = validate_degree(&t.degree(), true)?;
    let decomposition = decompose_cycle_and_trees(t)?;
    let classes = classify_vertices(t, &decomposition, parity, end_override)?;
    if classes.iter().all(|c| c.kind == VertexKind::Even) {
        return Err(Error::NoParity);
    }
    let mut induced = vec![0i8; t.vertices.len()];
    for (i, &v) in decomposition.cycle_vertices.iter().enumerate() {
        let (prev, _, tree) = decomposition.cycle_vertex_vectors(t, i);
        induced[v] = if wedge(prev, tree) > 0 { 1 } else { -1 };
    }
    Ok(CurveAnalysis {
        parity,
        decomposition,
        classes,
        induced,
        odd_crossings: odd_crossings(t)?,
        degree_doubled_area: degree.doubled_area(),
        half_interior_count: degree.half_interior_count().unwrap_or(0),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientationKit {
    /// +1 for the forward traversal of the decomposition's cycle.
    pub cycle_orientation: i8,
    /// Sign of every vertex (equivalently the orientation of its triangle).
    pub signs: Vec<i8>,
}

impl OrientationKit {
    pub fn reversed(&self) -> OrientationKit {
        OrientationKit { cycle_orientation: -self.cycle_orientation, signs: self.signs.iter().map(|s| -s).collect() }
    }
}

pub fn enumerate_kits(a: &CurveAnalysis) -> Vec<OrientationKit> {
    let free = a.free_vertices();
    let mut out = Vec::with_capacity(2usize << free.len());
    for o in [1i8, -1] {
        for mask in 0u64..(1u64 << free.len()) {
            let mut signs: Vec<i8> = a.induced.iter().map(|s| s * o).collect();
            for (k, &v) in free.iter().enumerate() {
                signs[v] = if mask >> k & 1 == 1 { -1 } else { 1 };
            }
            out.push(OrientationKit { cycle_orientation: o, signs });
        }
    }
    out
}

/// Check that forced orientations are respected.
pub fn kit_is_valid(a: &CurveAnalysis, k: &OrientationKit) -> bool {
    a.classes.iter().all(|c| c.kind != VertexKind::OddNonMobile || k.signs[c.vertex] == k.cycle_orientation * a.induced[c.vertex])
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignTerms {
    pub half_interior: i64,
    pub area_defect: i64,
    pub odd_crossings: i64,
    pub zeta_even_com: i64,
    pub zeta_even_ncom: i64,
    pub zeta_odd_nmob: i64,
    pub zeta_odd_com: i64,
    pub zeta_odd_ncom: i64,
    pub tau_bound: i64,
    pub tau_ends: i64,
}

impl SignTerms {
    pub fn total(&self) -> i64 {
        self.half_interior
            + self.area_defect
            + self.odd_crossings
            + self.zeta_even_com
            + self.zeta_even_ncom
            + self.zeta_odd_nmob
            + self.zeta_odd_com
            + self.zeta_odd_ncom
            + self.tau_bound
            + self.tau_ends
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KitStatistics {
    pub kappa_doubled: i64,
    pub s_terms: SignTerms,
    pub negative_vertices: i64,
    pub a_t_doubled: i64,
    pub n_nonmobile_negative: i64,
}

fn content(w: i64) -> i64 {
    (w - 1).div_euclid(2)
}

pub fn quantum_index(a: &CurveAnalysis, k: &OrientationKit) -> i64 {
    a.classes.iter().map(|c| k.signs[c.vertex] as i64 * c.doubled_area).sum()
}

pub fn kit_statistics(t: &ParamTropicalCurve, a: &CurveAnalysis, k: &OrientationKit) -> Result<KitStatistics> {
    let kappa_doubled = quantum_index(a, k);
    let defect = a.degree_doubled_area - kappa_doubled;
    if defect.rem_euclid(8) != 0 {
        return Err(Error::InternalInconsistency(format!("𝒜(Δ) − κ = {defect}/2 is not divisible by 4")));
    }
    let dec = &a.decomposition;
    let mut s = SignTerms { half_interior: a.half_interior_count, area_defect: defect / 8, odd_crossings: a.odd_crossings, ..Default::default() };
    // noncompatible mobile vertices and the even vertices of their trees
    let mut noncompatible = vec![false; t.vertices.len()];
    for c in &a.classes {
        if c.kind == VertexKind::OddMobile && k.signs[c.vertex] != k.cycle_orientation * a.induced[c.vertex] {
            noncompatible[c.vertex] = true;
            let ci = dec.cycle_index(c.vertex).expect("odd vertices lie on the cycle");
            for &w in &dec.trees[ci].vertices {
                noncompatible[w] = true;
            }
        }
    }
    let mut a_t_doubled = 0;
    let mut n_nonmobile_negative = 0;
    for c in &a.classes {
        let ncom = noncompatible[c.vertex];
        match c.kind {
            VertexKind::Even if ncom => s.zeta_even_ncom += c.twisted_harnack,
            VertexKind::Even => s.zeta_even_com += c.harnack,
            VertexKind::OddNonMobile => {
                s.zeta_odd_nmob += c.harnack;
                a_t_doubled += k.signs[c.vertex] as i64 * c.doubled_area;
                if k.signs[c.vertex] < 0 {
                    n_nonmobile_negative += 1;
                }
            }
            VertexKind::OddMobile if ncom => s.zeta_odd_ncom += c.twisted_harnack,
            VertexKind::OddMobile => s.zeta_odd_com += c.harnack,
        }
    }
    for e in &t.edges {
        if k.signs[e.from] == k.signs[e.to] {
            s.tau_bound += content(e.weight);
        }
    }
    for e in &t.ends {
        if k.signs[e.vertex] < 0 {
            s.tau_ends += content(e.weight());
        }
    }
    let negative_vertices = k.signs.iter().filter(|&&x| x < 0).count() as i64;
    Ok(KitStatistics { kappa_doubled, s_terms: s, negative_vertices, a_t_doubled, n_nonmobile_negative })
}

fn parity_sign(n: i64) -> i8 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// (sign from the s(ℛ) formula, sign from the negative vertex count).
pub fn welschinger_sign(t: &ParamTropicalCurve, a: &CurveAnalysis, k: &OrientationKit) -> Result<(i8, i8)> {
    let st = kit_statistics(t, a, k)?;
    Ok((parity_sign(st.s_terms.total()), parity_sign(st.negative_vertices)))
}

/// Σ over kits of 𝔴(ℛ) q^κ(ℛ); fails if the two sign computations disagree.
pub fn refined_multiplicity_sum(t: &ParamTropicalCurve, a: &CurveAnalysis) -> Result<LaurentPoly> {
    let mut out = LaurentPoly::zero();
    for k in enumerate_kits(a) {
        let (formula, count) = welschinger_sign(t, a, &k)?;
        if formula != count {
            return Err(Error::InternalInconsistency(format!(
                "Welschinger sign mismatch: formula {formula}, vertex count {count}, kit {:?}",
                k
            )));
        }
        out = out + LaurentPoly::monomial(count as i64, quantum_index(a, &k));
    }
    Ok(out)
}

/// Kit sum using only the vertex-count sign (no sign formula check).
pub fn refined_multiplicity_vertex_sum(a: &CurveAnalysis) -> LaurentPoly {
    enumerate_kits(a)
        .into_iter()
        .map(|k| {
            let n = k.signs.iter().filter(|&&x| x < 0).count() as i64;
            LaurentPoly::monomial(parity_sign(n) as i64, quantum_index(a, &k))
        })
        .sum()
}

fn area_factor(doubled: i64) -> LaurentPoly {
    LaurentPoly::monomial(1, doubled) - LaurentPoly::monomial(1, -doubled)
}

pub fn refined_multiplicity_closed(a: &CurveAnalysis) -> LaurentPoly {
    let mut a_t = 0;
    let mut n_fwd = 0;
    let mut n_bwd = 0;
    for c in a.classes.iter().filter(|c| c.kind == VertexKind::OddNonMobile) {
        let s = a.induced[c.vertex] as i64;
        a_t += s * c.doubled_area;
        if s < 0 {
            n_fwd += 1;
        } else {
            n_bwd += 1;
        }
    }
    let first = LaurentPoly::monomial(parity_sign(n_fwd) as i64, a_t) + LaurentPoly::monomial(parity_sign(n_bwd) as i64, -a_t);
    a.classes
        .iter()
        .filter(|c| c.kind != VertexKind::OddNonMobile)
        .map(|c| area_factor(c.doubled_area))
        .fold(first, |acc, f| acc * f)
}

/// Π over the triangles of a rational curve of (q^𝒜 − q^−𝒜).
pub fn rational_multiplicity(t: &ParamTropicalCurve) -> Result<LaurentPoly> {
    let mut out = LaurentPoly::one();
    for v in 0..t.vertices.len() {
        let tri = crate::tropcurve::vertex_triangle(t, v)?;
        out = out * area_factor(tri.doubled_area());
    }
    Ok(out)
}

/// Weight of an edge reference, re-exported for callers that only hold an analysis.
pub fn edge_content(t: &ParamTropicalCurve, e: EdgeRef) -> i64 {
    content(t.weight(e))
}
