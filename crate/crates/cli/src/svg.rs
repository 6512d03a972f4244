//! Static SVG for curves and dual subdivisions.
//!
//! Positions are exact rationals; the drawn coordinates are their decimal
//! roundings and every vertex carries its exact value in `data-exact`.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use trop_refine::lattice::{LatticePolygon, LatticeVector, Parity};
use trop_refine::tropcurve::{classify_vertices, decompose_cycle_and_trees, dual_subdivision, CellKind, VertexKind};
use trop_refine::{Error, ParamTropicalCurve, Point};

fn f(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".into()
    } else {
        s.to_string()
    }
}

fn exact(p: &Point) -> String {
    format!("{}/{},{}/{}", p.x.numer(), p.x.denom(), p.y.numer(), p.y.denom())
}

struct Frame {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl Frame {
    fn new() -> Self {
        Frame { min_x: f64::INFINITY, min_y: f64::INFINITY, max_x: f64::NEG_INFINITY, max_y: f64::NEG_INFINITY }
    }

    fn add(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    /// y is flipped so that the picture has the usual orientation.
    fn header(&self, out: &mut String, pad: f64) {
        let w = self.max_x - self.min_x + 2.0 * pad;
        let h = self.max_y - self.min_y + 2.0 * pad;
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}" height="{}">"#,
            num(self.min_x - pad),
            num(-self.max_y - pad),
            num(w),
            num(h),
            num((w * 40.0).clamp(200.0, 1200.0)),
            num((h * 40.0).clamp(200.0, 1200.0)),
        );
    }
}

const STYLE: &str = "<style>\
.ray{stroke:#555;stroke-dasharray:0.15 0.1}\
.edge{stroke:#000}\
.odd{stroke:#1f5fbf}\
.cycle{fill:none;stroke:#c0392b;stroke-linejoin:round}\
.vertex{fill:#000}\
.marked{fill:#e67e22}\
.cell{stroke:#000;stroke-width:0.04}\
.newton{fill:none;stroke:#000;stroke-width:0.08}\
.even{fill:#eeeeee}\
.mobile{fill:#f6c1b8}\
.fixed{fill:#b8cdf6}\
.parallelogram{fill:#ffffff}\
</style>\n";

fn weight_width(w: i64, unit: f64) -> String {
    num(unit * (1.0 + 0.5 * (w as f64 - 1.0)))
}

/// Curve picture: bounded edges, ends as rays of a common length, the cycle
/// (if any) as one closed polygon.
pub fn render_curve(t: &ParamTropicalCurve) -> String {
    let pts: Vec<(f64, f64)> = t.vertices.iter().map(|p| (f(&p.x), f(&p.y))).collect();
    let mut fr = Frame::new();
    for &(x, y) in &pts {
        fr.add(x, y);
    }
    let extent = (fr.max_x - fr.min_x).max(fr.max_y - fr.min_y).max(1.0);
    let ray_len = 0.35 * extent + 1.0;
    let ray_end = |v: usize, u: LatticeVector| {
        let n = ((u.x * u.x + u.y * u.y) as f64).sqrt();
        (pts[v].0 + ray_len * u.x as f64 / n, pts[v].1 + ray_len * u.y as f64 / n)
    };
    for e in &t.ends {
        let (x, y) = ray_end(e.vertex, e.vector);
        fr.add(x, y);
    }
    let unit = extent / 150.0 + 0.02;

    let cycle = decompose_cycle_and_trees(t).ok().filter(|d| !d.cycle_vertices.is_empty());
    let on_cycle: Vec<bool> = match &cycle {
        Some(d) => (0..t.edges.len()).map(|i| d.cycle_edges.contains(&i)).collect(),
        None => vec![false; t.edges.len()],
    };

    let mut out = String::new();
    fr.header(&mut out, 0.5);
    out.push_str(STYLE);
    if let Some(d) = &cycle {
        let poly: Vec<String> = d.cycle_vertices.iter().map(|&v| format!("{},{}", num(pts[v].0), num(-pts[v].1))).collect();
        let _ = writeln!(
            out,
            r#"<polygon class="cycle" stroke-width="{}" points="{}"/>"#,
            weight_width(2, unit * 1.5),
            poly.join(" ")
        );
    }
    for (i, e) in t.edges.iter().enumerate() {
        if on_cycle[i] {
            continue;
        }
        let parity = if e.weight % 2 == 0 { "even" } else { "odd" };
        let (a, b) = (pts[e.from], pts[e.to]);
        let _ = writeln!(
            out,
            r#"<line class="edge {parity}" data-weight="{}" stroke-width="{}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            e.weight,
            weight_width(e.weight, unit),
            num(a.0),
            num(-a.1),
            num(b.0),
            num(-b.1)
        );
    }
    for e in &t.ends {
        let w = e.weight();
        let parity = if w % 2 == 0 { "even" } else { "odd" };
        let a = pts[e.vertex];
        let b = ray_end(e.vertex, e.vector);
        let _ = writeln!(
            out,
            r#"<line class="ray {parity}" data-vector="{},{}" stroke-width="{}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            e.vector.x,
            e.vector.y,
            weight_width(w, unit),
            num(a.0),
            num(-a.1),
            num(b.0),
            num(-b.1)
        );
    }
    for (v, p) in t.vertices.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<circle class="vertex" data-exact="{}" cx="{}" cy="{}" r="{}"/>"#,
            exact(p),
            num(pts[v].0),
            num(-pts[v].1),
            num(unit * 2.5)
        );
    }
    if let Some(m) = &t.marked {
        let _ = writeln!(
            out,
            r#"<circle class="marked" data-exact="{}" cx="{}" cy="{}" r="{}"/>"#,
            exact(&m.position),
            num(f(&m.position.x)),
            num(-f(&m.position.y)),
            num(unit * 3.5)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn points_attr(p: &LatticePolygon) -> String {
    p.vertices().iter().map(|v| format!("{},{}", v.x, v.y)).collect::<Vec<_>>().join(" ")
}

/// Dual subdivision; `points` are lattice coordinates (the group flips y).
/// Triangles are tagged by kind when the curve has a parity and a cycle.
pub fn render_subdivision(t: &ParamTropicalCurve, parity: Option<Parity>) -> Result<String, Error> {
    let sub = dual_subdivision(t)?;
    let kinds = parity.and_then(|p| {
        let d = decompose_cycle_and_trees(t).ok()?;
        classify_vertices(t, &d, p, None).ok()
    });
    let mut fr = Frame::new();
    for v in sub.newton_polygon.vertices() {
        fr.add(v.x as f64, v.y as f64);
    }
    let mut out = String::new();
    fr.header(&mut out, 0.5);
    out.push_str(STYLE);
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    for c in &sub.cells {
        let class = match (&c.kind, &kinds) {
            (CellKind::Parallelogram { .. }, _) => "parallelogram".to_string(),
            (CellKind::Triangle { vertex }, Some(k)) => match k[*vertex].kind {
                VertexKind::Even => "triangle even".into(),
                VertexKind::OddMobile => "triangle mobile".into(),
                VertexKind::OddNonMobile => "triangle fixed".into(),
            },
            (CellKind::Triangle { .. }, None) => "triangle".into(),
        };
        let _ = writeln!(
            out,
            r#"<polygon class="cell {class}" data-doubled-area="{}" points="{}"/>"#,
            c.polygon.doubled_area(),
            points_attr(&c.polygon)
        );
    }
    let _ = writeln!(out, r#"<polygon class="newton" points="{}"/>"#, points_attr(&sub.newton_polygon));
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
