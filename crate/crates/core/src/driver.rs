//! 𝔊₁ by the cycle algorithm: every cyclic choice of grafting set, order
//! and b contributes Π 𝔊₀(Δ̂') · μ_{T(𝔒)}.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{lattice_length, primitive_and_parity, validate_degree, wedge, DegreeSpec, LatticeVector, Parity};
use crate::laurent::LaurentPoly;
use crate::menelaus::{
    assemble_cycle_curve, build_initial_data_with, completing_line, cycle_items, walk_all, CycleData, CycleRun,
    InitialData, InitialOptions, Item,
};
use crate::oracle;
use crate::orientkit::{analyze, rational_multiplicity, refined_multiplicity_closed};
use crate::tropcurve::{genus_and_simplicity, BoundedEdge, CurveKey, End, ParamTropicalCurve};

/// ℌ: pairwise disjoint nonempty proper subsets (as index masks).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraftSet {
    pub subsets: Vec<u64>,
}

impl GraftSet {
    pub fn union(&self) -> u64 {
        self.subsets.iter().fold(0, |a, b| a | b)
    }

    pub fn sums(&self, degree: &DegreeSpec) -> Vec<LatticeVector> {
        self.subsets.iter().map(|&m| mask_sum(degree, m)).collect()
    }

    /// Δ̂' = {−c(Δ')} ∪ Δ' for each member.
    pub fn hat_degrees(&self, degree: &DegreeSpec) -> Vec<Vec<LatticeVector>> {
        self.subsets.iter().map(|&m| hat_vectors(degree, m)).collect()
    }
}

fn mask_sum(degree: &DegreeSpec, mask: u64) -> LatticeVector {
    degree.vectors().iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).sum()
}

fn hat_vectors(degree: &DegreeSpec, mask: u64) -> Vec<LatticeVector> {
    let mut v = vec![-mask_sum(degree, mask)];
    v.extend(degree.vectors().iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a));
    v
}

/// All grafting sets, the empty one included, in a canonical order.
pub fn enumerate_h(degree: &DegreeSpec) -> Vec<GraftSet> {
    let n = degree.len();
    let full = (1u64 << n) - 1;
    let mut out = Vec::new();
    // subsets listed in increasing order of their lowest element avoid repeats
    fn rec(degree: &DegreeSpec, full: u64, used: u64, cur: &mut Vec<u64>, out: &mut Vec<GraftSet>) {
        out.push(GraftSet { subsets: cur.clone() });
        for s in 1..full {
            if s & used != 0 || (used | s) == full || mask_sum(degree, s).is_zero() {
                continue;
            }
            // the lowest element of s must exceed the lowest element of the previous subset
            if let Some(&prev) = cur.last() {
                if s.trailing_zeros() <= prev.trailing_zeros() {
                    continue;
                }
            }
            cur.push(s);
            rec(degree, full, used | s, cur, out);
            cur.pop();
        }
    }
    rec(degree, full, 0, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Cycle data for ℌ, an ordering of its r items and b. Items are
/// numbered as: grafted subsets in ℌ order, then the remaining elements by
/// index.
pub fn assemble_o(h: &GraftSet, ordering: &[usize], b: LatticeVector, data: &InitialData) -> Result<CycleData> {
    let n = data.n();
    let union = h.union();
    let mut items: Vec<(LatticeVector, crate::menelaus::OrientedLine, i8)> = Vec::new();
    for &m in &h.subsets {
        let members: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
        let l = completing_line(&members, &data.lines)?;
        items.push((l.direction, l, -1));
    }
    for i in (0..n).filter(|i| union >> i & 1 == 0) {
        items.push((data.lines[i].direction, data.lines[i].clone(), 1));
    }
    let r = items.len();
    let mut seen = vec![false; r];
    if ordering.len() != r || ordering.iter().any(|&i| i >= r || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidCurve("ordering is not a permutation of the items".into()));
    }
    let ordered: Vec<_> = ordering.iter().map(|&i| items[i].clone()).collect();
    let mut bk = b;
    for (a, _, _) in &ordered {
        if wedge(bk, *a) == 0 {
            return Err(Error::DegenerateWedge);
        }
        bk -= *a;
    }
    Ok(CycleData {
        vectors: ordered.iter().map(|o| o.0).collect(),
        lines: ordered.iter().map(|o| o.1.clone()).collect(),
        signs: ordered.iter().map(|o| o.2).collect(),
        x0: data.x0.clone(),
        b,
    })
}

/// One cyclic (ℌ, 𝔒).
#[derive(Clone, Debug)]
pub struct Contribution {
    pub run: CycleRun,
    pub graft: GraftSet,
    /// Masks of the items in cycle order (grafted ones flagged).
    pub order: Vec<(u64, bool)>,
    /// T(𝔒) with its end `k` standing for the k-th item.
    pub curve: ParamTropicalCurve,
    /// Mobility input for T(𝔒): whether all original ends behind each end
    /// have primitive parity (α,β).
    pub end_parity: Vec<bool>,
    pub mu_t: LaurentPoly,
    pub g0_factor: LaurentPoly,
    pub value: LaurentPoly,
}

#[derive(Clone, Debug)]
pub struct G1Report {
    pub data: InitialData,
    pub items: Vec<Item>,
    pub contributions: Vec<Contribution>,
    pub value: LaurentPoly,
    /// Completed walks whose T(𝔒) was not simple.
    pub non_simple: usize,
    pub degenerate: usize,
    pub visited: usize,
    /// Seed actually used after re-perturbations.
    pub effective_seed: u64,
}

/// 𝔊₀ memo keyed by the sorted hat degree.
#[derive(Default)]
pub struct G0Cache {
    map: Mutex<HashMap<Vec<LatticeVector>, LaurentPoly>>,
    seed: u64,
}

impl G0Cache {
    pub fn new(seed: u64) -> Self {
        G0Cache { map: Mutex::new(HashMap::new()), seed }
    }

    /// 𝔊₀ of {−c(Δ')} ∪ Δ'. A singleton Δ' stands for a bare end (1); a
    /// larger Δ' with all vectors parallel admits no simple curve (0).
    pub fn factor(&self, degree: &DegreeSpec, mask: u64) -> Result<LaurentPoly> {
        if mask.count_ones() == 1 {
            return Ok(LaurentPoly::one());
        }
        let mut key = hat_vectors(degree, mask);
        key.sort();
        if let Some(v) = self.map.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = match validate_degree(&key, true) {
            Ok(d) => oracle::g0(&d, self.seed)?,
            Err(Error::Degenerate) => LaurentPoly::zero(),
            Err(e) => return Err(e),
        };
        self.map.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }
}

const REPERTURB: usize = 8;

pub fn g1(degree: &DegreeSpec, parity: Parity, seed: u64) -> Result<LaurentPoly> {
    g1_with(degree, parity, seed, &InitialOptions::default())
}

pub fn g1_with(degree: &DegreeSpec, parity: Parity, seed: u64, opts: &InitialOptions) -> Result<LaurentPoly> {
    match g1_detailed(degree, parity, seed, opts) {
        Ok(r) => Ok(r.value),
        Err(Error::EmptyVSet) => Ok(LaurentPoly::zero()),
        Err(e) => Err(e),
    }
}

/// Full run: initial data, every contribution, and the sum. A general
/// position failure re-perturbs with a derived seed.
pub fn g1_detailed(degree: &DegreeSpec, parity: Parity, seed: u64, opts: &InitialOptions) -> Result<G1Report> {
    let cache = G0Cache::new(seed);
    let mut last = None;
    for attempt in 0..REPERTURB as u64 {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let data = match build_initial_data_with(degree, parity, s, opts) {
            Ok(d) => d,
            Err(e @ Error::GeneralPositionFailure(_)) => {
                last = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        match run_cycles(data, &cache) {
            Ok(mut r) => {
                r.effective_seed = s;
                return Ok(r);
            }
            Err(e @ Error::GeneralPositionFailure(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::GeneralPositionFailure("re-perturbation exhausted".into())))
}

/// Evaluate every cyclic datum of fixed initial data.
pub fn run_cycles(data: InitialData, cache: &G0Cache) -> Result<G1Report> {
    let items = cycle_items(&data);
    let walk = walk_all(&data, &items)?;
    if walk.disc_violation {
        return Err(Error::InternalInconsistency("cycle line meets the unit disc after certification".into()));
    }
    let degree = &data.degree;
    let mut contributions = Vec::new();
    let mut non_simple = 0;
    let mut keys: BTreeMap<CurveKey, usize> = BTreeMap::new();
    for run in walk.runs {
        let vectors: Vec<LatticeVector> = run.items.iter().map(|&i| items[i].vector).collect();
        let labels: Vec<Option<usize>> = run
            .items
            .iter()
            .map(|&i| if items[i].sign > 0 { Some(items[i].mask.trailing_zeros() as usize) } else { None })
            .collect();
        let curve = assemble_cycle_curve(&run.points, &vectors, &labels, run.b, &data.x0)?;
        if genus_and_simplicity(&curve) != (1, true) {
            non_simple += 1;
            continue;
        }
        let end_parity: Vec<bool> = run
            .items
            .iter()
            .map(|&i| {
                let m = items[i].mask;
                degree
                    .vectors()
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| m >> j & 1 == 1)
                    .all(|(_, &a)| primitive_and_parity(a).map(|p| p.1 == data.parity).unwrap_or(false))
            })
            .collect();
        let analysis = analyze(&curve, data.parity, Some(&end_parity))?;
        let mu_t = refined_multiplicity_closed(&analysis);
        let mut graft = GraftSet { subsets: Vec::new() };
        let mut g0_factor = LaurentPoly::one();
        for &i in &run.items {
            if items[i].sign < 0 {
                graft.subsets.push(items[i].mask);
                g0_factor = g0_factor * cache.factor(degree, items[i].mask)?;
            }
        }
        graft.subsets.sort();
        if let Some(prev) = keys.insert(curve.canonical_key(), contributions.len()) {
            return Err(Error::DuplicateCurve(format!("cycle data {prev} and {} give the same curve", contributions.len())));
        }
        let value = &g0_factor * &mu_t;
        contributions.push(Contribution {
            order: run.items.iter().map(|&i| (items[i].mask, items[i].sign < 0)).collect(),
            run,
            graft,
            curve,
            end_parity,
            mu_t,
            g0_factor,
            value,
        });
    }
    let value = contributions.iter().map(|c| c.value.clone()).sum();
    Ok(G1Report {
        data,
        items,
        contributions,
        value,
        non_simple,
        degenerate: walk.degenerate,
        visited: walk.visited,
        effective_seed: 0,
    })
}

/// Replace end `end` of `t` (directed by c) by a rational fragment of
/// degree {−c} ∪ Δ' whose end labeled 0 carries −c. Other fragment ends
/// get the labels in `member_labels` (fragment label l ↦ member_labels[l−1]).
pub fn graft(
    t: &ParamTropicalCurve,
    end: usize,
    fragment: &ParamTropicalCurve,
    member_labels: &[usize],
) -> Result<ParamTropicalCurve> {
    let c = t.ends[end].vector;
    let at = t.ends[end].vertex;
    let stem = fragment
        .ends
        .iter()
        .find(|e| e.label == Some(0))
        .ok_or_else(|| Error::FragmentMismatch("fragment has no stem end".into()))?;
    if stem.vector != -c {
        return Err(Error::FragmentMismatch(format!("stem {} is not −{}", stem.vector, c)));
    }
    let root = &fragment.vertices[stem.vertex];
    let (dx, dy) = t.vertices[at].minus(root);
    let d = crate::tropcurve::Point::new(dx, dy);
    if !(d.wedge_vec(c).is_zero() && d.dot_vec(-c) > crate::tropcurve::qi(0)) {
        return Err(Error::FragmentMismatch("cycle vertex is not on the stem".into()));
    }
    let mut out = t.clone();
    out.ends.remove(end);
    let base = out.vertices.len();
    out.vertices.extend(fragment.vertices.iter().cloned());
    for e in &fragment.edges {
        out.edges.push(BoundedEdge { from: e.from + base, to: e.to + base, weight: e.weight, direction: e.direction });
    }
    let w = lattice_length(c)?;
    out.edges.push(BoundedEdge {
        from: at,
        to: stem.vertex + base,
        weight: w,
        direction: LatticeVector::new(c.x / w, c.y / w),
    });
    for e in &fragment.ends {
        match e.label {
            Some(0) => {}
            Some(l) => out.ends.push(End { vertex: e.vertex + base, vector: e.vector, label: Some(member_labels[l - 1]) }),
            None => return Err(Error::FragmentMismatch("unlabeled fragment end".into())),
        }
    }
    Ok(out)
}

/// A degree-Δ curve obtained from a contribution, with the multiplicities
/// that must agree.
#[derive(Clone, Debug)]
pub struct GraftedCurve {
    pub contribution: usize,
    pub curve: ParamTropicalCurve,
    /// μ_{T(𝔒)} · Π fragment triangle factors.
    pub product: LaurentPoly,
}

/// Every curve of degree Δ through the extended constraint that the
/// contributions stand for.
pub fn grafted_curves(report: &G1Report) -> Result<Vec<GraftedCurve>> {
    let data = &report.data;
    let n = data.n();
    let mut out = Vec::new();
    for (ci, c) in report.contributions.iter().enumerate() {
        let mut partial = vec![(c.curve.clone(), c.mu_t.clone())];
        // process grafted ends from the back so end indices stay valid
        for (k, &(mask, grafted)) in c.order.iter().enumerate().rev() {
            if !grafted {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if members.len() == 1 {
                for (cur, _) in &mut partial {
                    cur.ends[k].label = Some(members[0]);
                }
                continue;
            }
            let frags = data.fragments.get(&mask).map(|v| v.as_slice()).unwrap_or(&[]);
            let mut next = Vec::with_capacity(partial.len() * frags.len());
            for (cur, mu) in &partial {
                for f in frags {
                    let g = graft(cur, k, f, &members)?;
                    next.push((g, mu * &rational_multiplicity(f)?));
                }
            }
            partial = next;
        }
        for (curve, product) in partial {
            out.push(GraftedCurve { contribution: ci, curve, product });
        }
    }
    let mut keys = BTreeMap::new();
    for (i, g) in out.iter().enumerate() {
        if genus_and_simplicity(&g.curve) != (1, true) {
            return Err(Error::GeneralPositionFailure("grafted curve is not simple".into()));
        }
        if let Some(j) = keys.insert(g.curve.canonical_key(), i) {
            return Err(Error::DuplicateCurve(format!("grafted curves {j} and {i} coincide")));
        }
    }
    Ok(out)
}
