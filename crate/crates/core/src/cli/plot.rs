//! SVG drawing of a curve in the fundamental parallelogram.
//!
//! Edges are cut where they cross a wall and the pieces are translated back
//! into the parallelogram, so a wrapping edge re-enters on the opposite side.

use std::fmt::Write;

use num_traits::{ToPrimitive, Zero};

use crate::curve::TropicalCurve;
use crate::exactmath::{frac, Rational};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Pieces of edge `e` in lattice coordinates, each inside `[0,1]²`.
pub fn edge_pieces(curve: &TropicalCurve, e: usize) -> Vec<[[Rational; 2]; 2]> {
    let edge = &curve.edges[e];
    let start = curve.lattice.coords(&curve.vertices[edge.tail].pos);
    let start = [frac(&start[0]), frac(&start[1])];
    let disp = [0, 1].map(|k| &edge.length * Rational::from_integer(edge.m[k].into()));
    let d = curve.lattice.coords(&disp);
    let mut taus = vec![Rational::zero(), Rational::from_integer(1.into())];
    for k in 0..2 {
        if d[k].is_zero() {
            continue;
        }
        let end = &start[k] + &d[k];
        let (lo, hi) = if d[k] > Rational::zero() { (&start[k], &end) } else { (&end, &start[k]) };
        let mut n = lo.floor() + Rational::from_integer(1.into());
        while &n < hi {
            taus.push((&n - &start[k]) / &d[k]);
            n += Rational::from_integer(1.into());
        }
    }
    taus.sort();
    taus.dedup();
    let at = |t: &Rational| [0, 1].map(|k| &start[k] + t * &d[k]);
    taus.windows(2)
        .map(|w| {
            let mid = at(&((&w[0] + &w[1]) / Rational::from_integer(2.into())));
            let cell = [mid[0].floor(), mid[1].floor()];
            let (a, b) = (at(&w[0]), at(&w[1]));
            [[&a[0] - &cell[0], &a[1] - &cell[1]], [&b[0] - &cell[0], &b[1] - &cell[1]]]
        })
        .collect()
}

struct Frame {
    l: [[f64; 2]; 2],
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn new(curve: &TropicalCurve) -> Frame {
        let l = curve.lattice.lambda.map(|v| [v[0] as f64, v[1] as f64]);
        let corners = [[0.0, 0.0], l[0], l[1], [l[0][0] + l[1][0], l[0][1] + l[1][1]]];
        let min = [0, 1].map(|k| corners.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min));
        let max = [0, 1].map(|k| corners.iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max));
        let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
        Frame { l, min, scale: (SIZE - 2.0 * MARGIN) / span }
    }

    /// Screen point of lattice coordinates `(s, t)`.
    fn point(&self, s: f64, t: f64) -> (f64, f64) {
        let x = s * self.l[0][0] + t * self.l[1][0];
        let y = s * self.l[0][1] + t * self.l[1][1];
        (MARGIN + (x - self.min[0]) * self.scale, SIZE - MARGIN - (y - self.min[1]) * self.scale)
    }

    fn qpoint(&self, st: &[Rational; 2]) -> (f64, f64) {
        self.point(st[0].to_f64().unwrap_or(0.0), st[1].to_f64().unwrap_or(0.0))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(curve: &TropicalCurve) -> String {
    let f = Frame::new(curve);
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    )
    .unwrap();
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].map(|(s, t)| f.point(s, t));
    let pts: Vec<String> = corners.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
    writeln!(
        out,
        "  <polygon class=\"domain\" points=\"{}\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>",
        pts.join(" ")
    )
    .unwrap();
    for (e, edge) in curve.edges.iter().enumerate() {
        let w = crate::curve::primitive(edge.m).1;
        writeln!(out, "  <g class=\"edge\" id=\"edge-{}\">", escape(&edge.id)).unwrap();
        let pieces = edge_pieces(curve, e);
        for [a, b] in &pieces {
            let (x1, y1) = f.qpoint(a);
            let (x2, y2) = f.qpoint(b);
            writeln!(
                out,
                "    <polyline points=\"{x1:.3},{y1:.3} {x2:.3},{y2:.3}\" fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"{}\"/>",
                1.0 + w as f64
            )
            .unwrap();
        }
        let longest = pieces
            .iter()
            .max_by(|p, q| {
                let len = |r: &[[Rational; 2]; 2]| {
                    let (a, b) = (f.qpoint(&r[0]), f.qpoint(&r[1]));
                    (a.0 - b.0).hypot(a.1 - b.1)
                };
                len(p).total_cmp(&len(q))
            })
            .expect("an edge has at least one piece");
        let (a, b) = (f.qpoint(&longest[0]), f.qpoint(&longest[1]));
        writeln!(
            out,
            "    <text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" fill=\"#1f4e99\">{w}</text>",
            (a.0 + b.0) / 2.0 + 4.0,
            (a.1 + b.1) / 2.0 - 4.0
        )
        .unwrap();
        writeln!(out, "  </g>").unwrap();
    }
    for v in &curve.vertices {
        let st = curve.lattice.coords(&v.pos);
        let (x, y) = f.qpoint(&[frac(&st[0]), frac(&st[1])]);
        writeln!(out, "  <g class=\"vertex\">").unwrap();
        writeln!(out, "    <circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"4\" fill=\"#c0392b\"/>").unwrap();
        writeln!(
            out,
            "    <text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\">{}</text>",
            x + 6.0,
            y + 14.0,
            escape(&v.id)
        )
        .unwrap();
        writeln!(out, "  </g>").unwrap();
    }
    out.push_str("</svg>\n");
    out
}
