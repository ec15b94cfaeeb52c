use std::fmt::Write as _;

use locext_core::qstates::BipartiteState;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::args::PlotFormat;

#[derive(Clone, Debug, Serialize)]
pub struct Edge {
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub value: String,
    /// Real part negative: drawn dashed.
    pub negative: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Plot {
    pub dims: (usize, usize),
    pub diagonal: Vec<Vec<String>>,
    pub edges: Vec<Edge>,
    pub content: String,
}

/// Sites `|ij⟩` on an `m×n` grid; an edge for every nonzero off-diagonal entry.
pub fn plot(s: &BipartiteState, format: PlotFormat) -> Plot {
    let (m, n) = (s.dim_a, s.dim_b);
    let d = s.dim();
    let diagonal: Vec<Vec<String>> =
        (0..m).map(|i| (0..n).map(|j| s.matrix.get(i * n + j, i * n + j).to_string()).collect()).collect();
    let mut edges = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let z = s.matrix.get(a, b);
            if !z.is_zero() {
                edges.push(Edge { from: (a / n, a % n), to: (b / n, b % n), value: z.to_string(), negative: z.re.is_negative() });
            }
        }
    }
    let content = match format {
        PlotFormat::Text => text(m, n, &diagonal, &edges, &s.label),
        PlotFormat::Svg => svg(m, n, &diagonal, &edges),
    };
    Plot { dims: (m, n), diagonal, edges, content }
}

fn text(m: usize, n: usize, diagonal: &[Vec<String>], edges: &[Edge], label: &str) -> String {
    let width = diagonal.iter().flatten().map(String::len).max().unwrap_or(1).max(1);
    let mut out = format!("{label}: {m}x{n}, rows A, columns B, entries <ij|rho|ij>\n");
    let _ = write!(out, "   ");
    for j in 0..n {
        let _ = write!(out, " {j:>width$}");
    }
    out.push('\n');
    for (i, row) in diagonal.iter().enumerate() {
        let _ = write!(out, "{i:>2} ");
        for v in row {
            let v = if v == "0" { "." } else { v.as_str() };
            let _ = write!(out, " {v:>width$}");
        }
        out.push('\n');
    }
    for e in edges {
        let style = if e.negative { "- -" } else { "---" };
        let _ = writeln!(out, "|{}{}> {style} |{}{}>  {}", e.from.0, e.from.1, e.to.0, e.to.1, e.value);
    }
    out
}

fn svg(m: usize, n: usize, diagonal: &[Vec<String>], edges: &[Edge]) -> String {
    let step = 60;
    let pos = |(i, j): (usize, usize)| (40 + j * step, 40 + i * step);
    let (w, h) = (40 * 2 + (n - 1) * step, 40 * 2 + (m - 1) * step);
    let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-size=\"11\">\n");
    for e in edges {
        let ((x1, y1), (x2, y2)) = (pos(e.from), pos(e.to));
        let dash = if e.negative { " stroke-dasharray=\"5,4\"" } else { "" };
        let _ = writeln!(out, "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"black\"{dash}/>");
    }
    for (i, row) in diagonal.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let (x, y) = pos((i, j));
            let fill = if v == "0" { "white" } else { "lightgray" };
            let _ = writeln!(out, "  <circle cx=\"{x}\" cy=\"{y}\" r=\"12\" fill=\"{fill}\" stroke=\"black\"/>");
            if v != "0" {
                let _ = writeln!(out, "  <text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{v}</text>", y + 4);
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
