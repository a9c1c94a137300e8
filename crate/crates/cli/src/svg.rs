//! Static SVG plots of planar hypersurfaces, dual subdivisions and grid slices.

use std::fmt::Write;

use supertrop::geometry::Polyhedron;
use supertrop::hessian::GridFunction;
use supertrop::rational::{to_f64, Q};
use supertrop::tropical::{DualSubdivision, TropicalHypersurface};

const SIZE: f64 = 480.0;
const LEVELS: usize = 9;

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

struct Canvas {
    lo: [f64; 2],
    scale: f64,
    body: String,
}

impl Canvas {
    /// Square viewport around the points, padded by `pad` world units.
    fn around(points: &[[f64; 2]], pad: f64) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]) + 2.0 * pad;
        let centre = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        Self { lo: [centre[0] - span / 2.0, centre[1] - span / 2.0], scale: SIZE / span, body: String::new() }
    }

    fn px(&self, p: [f64; 2]) -> (String, String) {
        (num((p[0] - self.lo[0]) * self.scale), num(SIZE - (p[1] - self.lo[1]) * self.scale))
    }

    fn line(&mut self, a: [f64; 2], b: [f64; 2], class: &str) {
        let ((x1, y1), (x2, y2)) = (self.px(a), self.px(b));
        writeln!(self.body, r#"<line class="{class}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#).unwrap();
    }

    fn label(&mut self, at: [f64; 2], text: &str) {
        let (x, y) = self.px(at);
        writeln!(self.body, r#"<text x="{x}" y="{y}">{text}</text>"#).unwrap();
    }

    fn dot(&mut self, at: [f64; 2]) {
        let (x, y) = self.px(at);
        writeln!(self.body, r#"<circle cx="{x}" cy="{y}" r="3"/>"#).unwrap();
    }

    fn polygon(&mut self, pts: &[[f64; 2]]) {
        let coords: Vec<String> = pts.iter().map(|p| {
            let (x, y) = self.px(*p);
            format!("{x},{y}")
        }).collect();
        writeln!(self.body, r#"<polygon points="{}"/>"#, coords.join(" ")).unwrap();
    }

    fn finish(self, title: &str) -> String {
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
                "\n<title>{t}</title>\n",
                "<style>line{{stroke:black;stroke-width:1.5}} line.ray{{stroke-dasharray:6 3}} ",
                "polygon{{fill:#dde8f4;stroke:black}} path{{fill:none;stroke:#245;stroke-width:1}} ",
                "text{{font:12px sans-serif}}</style>\n{b}</svg>\n"
            ),
            s = SIZE,
            t = title,
            b = self.body
        )
    }
}

fn pt(x: &[Q]) -> [f64; 2] {
    [to_f64(&x[0]), to_f64(&x[1])]
}

enum Piece {
    Segment([f64; 2], [f64; 2]),
    Ray([f64; 2], [f64; 2]),
    Line([f64; 2], [f64; 2]),
}

/// Geometry of a one-dimensional cell in the plane.
fn piece(poly: &Polyhedron) -> Option<Piece> {
    let info = poly.analyze()?;
    let normal = poly.equality_normals(&info).into_iter().next()?;
    let dir = vec![-normal[1].clone(), normal[0].clone()];
    let d = pt(&dir);
    let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let unit = [d[0] / len, d[1] / len];
    let verts = poly.vertices();
    Some(match verts.as_slice() {
        [a, b, ..] => Piece::Segment(pt(a), pt(b)),
        [a] => {
            let ahead: Vec<Q> = a.iter().zip(&dir).map(|(x, y)| x + y).collect();
            let s = if poly.contains(&ahead) { 1.0 } else { -1.0 };
            Piece::Ray(pt(a), [s * unit[0], s * unit[1]])
        }
        [] => Piece::Line(pt(&info.relint), unit),
    })
}

pub fn hypersurface(h: &TropicalHypersurface) -> Result<String, String> {
    if h.poly.n() != 2 {
        return Err(format!("hypersurface plots need n = 2, got n = {}", h.poly.n()));
    }
    let pieces: Vec<(Piece, u64)> = h
        .complex
        .cells
        .iter()
        .filter(|c| c.dim == 1)
        .filter_map(|c| piece(&c.poly).map(|p| (p, c.weight)))
        .collect();
    let mut anchors = Vec::new();
    for (p, _) in &pieces {
        match p {
            Piece::Segment(a, b) => anchors.extend([*a, *b]),
            Piece::Ray(a, _) | Piece::Line(a, _) => anchors.push(*a),
        }
    }
    let span = anchors.iter().flat_map(|a| anchors.iter().map(move |b| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))).fold(0.0, f64::max);
    let pad = (span * 0.5).max(1.0);
    let mut canvas = Canvas::around(&anchors, pad);
    let reach = 4.0 * (span + pad);
    for (p, w) in &pieces {
        let at = |a: [f64; 2], d: [f64; 2], t: f64| [a[0] + t * d[0], a[1] + t * d[1]];
        let mid = match p {
            Piece::Segment(a, b) => {
                canvas.line(*a, *b, "edge");
                [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
            }
            Piece::Ray(a, d) => {
                canvas.line(*a, at(*a, *d, reach), "ray");
                at(*a, *d, 0.6 * pad)
            }
            Piece::Line(a, d) => {
                canvas.line(at(*a, *d, -reach), at(*a, *d, reach), "ray");
                *a
            }
        };
        canvas.label(mid, &w.to_string());
    }
    for a in &anchors {
        canvas.dot(*a);
    }
    Ok(canvas.finish("tropical hypersurface"))
}

/// Vertices of a planar polygon in counter-clockwise order.
fn ordered(points: &[Vec<Q>]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| pt(p)).collect();
    let c = pts.iter().fold([0.0, 0.0], |s, p| [s[0] + p[0], s[1] + p[1]]);
    let c = [c[0] / pts.len() as f64, c[1] / pts.len() as f64];
    pts.sort_by(|a, b| (a[1] - c[1]).atan2(a[0] - c[0]).total_cmp(&(b[1] - c[1]).atan2(b[0] - c[0])));
    pts
}

pub fn subdivision(s: &DualSubdivision) -> Result<String, String> {
    if s.base.n() != 2 {
        return Err(format!("subdivision plots need n = 2, got n = {}", s.base.n()));
    }
    let corners = ordered(s.base.vertices());
    let mut canvas = Canvas::around(&corners, 0.5);
    for cell in &s.cells {
        let pts = ordered(cell.polytope.vertices());
        match pts.len() {
            0 | 1 => {}
            2 => canvas.line(pts[0], pts[1], "edge"),
            _ => canvas.polygon(&pts),
        }
    }
    for cell in &s.cells {
        for p in cell.polytope.vertices() {
            canvas.dot(pt(p));
        }
    }
    Ok(canvas.finish("dual subdivision"))
}

/// Contours of a two-dimensional slice. For `n > 2`, `slice` fixes the node index
/// along every axis after the first two.
pub fn contours(u: &GridFunction, slice: &[usize]) -> Result<String, String> {
    let n = u.n();
    if n < 2 {
        return Err("contour plots need n ≥ 2".into());
    }
    if slice.len() != n - 2 {
        return Err(format!("a grid with n = {n} needs a slice fixing {} axis index(es)", n - 2));
    }
    let res = u.resolution();
    for (k, &i) in slice.iter().enumerate() {
        if i >= res[k + 2] {
            return Err(format!("slice index {i} outside axis {} of size {}", k + 3, res[k + 2]));
        }
    }
    let (lo, h) = (u.lo(), u.spacing());
    let value = |i: usize, j: usize| {
        let mut idx = vec![i, j];
        idx.extend_from_slice(slice);
        u.values()[u.index_of(&idx)]
    };
    let world = |i: f64, j: f64| [lo[0] + i * h[0], lo[1] + j * h[1]];
    let frame = [world(0.0, 0.0), world((res[0] - 1) as f64, (res[1] - 1) as f64)];
    let mut canvas = Canvas::around(&frame, 0.0);
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..res[0] {
        for j in 0..res[1] {
            vmin = vmin.min(value(i, j));
            vmax = vmax.max(value(i, j));
        }
    }
    if vmax > vmin {
        for l in 1..=LEVELS {
            let level = vmin + (vmax - vmin) * l as f64 / (LEVELS + 1) as f64;
            let mut path = String::new();
            for i in 0..res[0] - 1 {
                for j in 0..res[1] - 1 {
                    let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                    let mut cuts = Vec::new();
                    for e in 0..4 {
                        let (a, b) = (corners[e], corners[(e + 1) % 4]);
                        let (va, vb) = (value(a.0, a.1) - level, value(b.0, b.1) - level);
                        if (va < 0.0) != (vb < 0.0) {
                            let t = va / (va - vb);
                            let p = world(a.0 as f64 + t * (b.0 as f64 - a.0 as f64), a.1 as f64 + t * (b.1 as f64 - a.1 as f64));
                            cuts.push(canvas.px(p));
                        }
                    }
                    for pair in cuts.chunks(2).filter(|c| c.len() == 2) {
                        write!(path, "M{} {}L{} {}", pair[0].0, pair[0].1, pair[1].0, pair[1].1).unwrap();
                    }
                }
            }
            if !path.is_empty() {
                writeln!(canvas.body, r#"<path data-level="{}" d="{path}"/>"#, num(level)).unwrap();
            }
        }
    }
    Ok(canvas.finish("grid contours"))
}
