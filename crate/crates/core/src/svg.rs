//! SVG lattice diagrams: one line per qubit, one circle per stabilizer.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::bb::{Edge, Point, Site};
use crate::css::Coords;
use crate::error::{Error, Result};

const CELL: f64 = 28.0;
const MARGIN: f64 = 20.0;
const RADIUS: f64 = 5.0;

/// Renders `coords`. Elements of `ghost` that are absent from `coords` are
/// drawn in light gray, e.g. the full stretched lattice behind a deformed code.
///
/// Qubit lines carry class `q`, X checks `sx`, Z checks `sz`, and gray
/// elements `gq`, `gsx`, `gsz`.
pub fn render_svg(coords: &Coords, ghost: Option<&Coords>) -> Result<String> {
    if coords.qubits.is_empty() {
        return Err(Error::Render("code has no qubits".into()));
    }
    let qubits: BTreeSet<Site> = coords.qubits.iter().copied().collect();
    let xs: BTreeSet<Point> = coords.x_checks.iter().copied().collect();
    let zs: BTreeSet<Point> = coords.z_checks.iter().copied().collect();
    if qubits.len() != coords.qubits.len() || xs.len() != coords.x_checks.len() || zs.len() != coords.z_checks.len() {
        return Err(Error::Render("duplicate coordinates".into()));
    }
    let empty = Coords { qubits: vec![], x_checks: vec![], z_checks: vec![] };
    let ghost = ghost.unwrap_or(&empty);
    let gq: Vec<Site> = ghost.qubits.iter().filter(|s| !qubits.contains(s)).copied().collect();
    let gx: Vec<Point> = ghost.x_checks.iter().filter(|p| !xs.contains(p)).copied().collect();
    let gz: Vec<Point> = ghost.z_checks.iter().filter(|p| !zs.contains(p)).copied().collect();

    let mut points: Vec<(i32, i32)> = Vec::new();
    for s in coords.qubits.iter().chain(&gq) {
        let (x1, y1) = far_end(s);
        points.extend([(s.x, s.y), (x1, y1)]);
    }
    for p in coords.x_checks.iter().chain(&coords.z_checks).chain(&gx).chain(&gz) {
        points.push((p.x, p.y));
    }
    let x0 = points.iter().map(|p| p.0).min().unwrap();
    let x1 = points.iter().map(|p| p.0).max().unwrap();
    let y0 = points.iter().map(|p| p.1).min().unwrap();
    let y1 = points.iter().map(|p| p.1).max().unwrap();
    let px = |x: i32| MARGIN + (x - x0) as f64 * CELL;
    // lattice y grows upwards
    let py = |y: i32| MARGIN + (y1 - y) as f64 * CELL;
    let width = 2.0 * MARGIN + (x1 - x0) as f64 * CELL;
    let height = 2.0 * MARGIN + (y1 - y0) as f64 * CELL;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    out.push_str(
        "<style>.q{stroke:#333;stroke-width:2}.gq{stroke:#ddd;stroke-width:2}\
         .sx{fill:#d62728}.sz{fill:#1f77b4}.sxz{fill:#000}.gsx,.gsz{fill:#ddd}</style>\n",
    );
    let mut line = |s: &Site, class: &str| {
        let (ex, ey) = far_end(s);
        let _ = writeln!(
            out,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            px(s.x),
            py(s.y),
            px(ex),
            py(ey)
        );
    };
    for s in &gq {
        line(s, "gq");
    }
    for s in &coords.qubits {
        line(s, "q");
    }
    let mut circle = |p: &Point, class: &str, extra: &str| {
        let _ = writeln!(
            out,
            r#"<circle class="{class}{extra}" cx="{}" cy="{}" r="{RADIUS}"/>"#,
            px(p.x),
            py(p.y)
        );
    };
    for p in &gx {
        circle(p, "gsx", "");
    }
    for p in &gz {
        circle(p, "gsz", "");
    }
    // X and Z checks at the same vertex are both drawn, in black
    for p in &coords.x_checks {
        circle(p, "sx", if zs.contains(p) { " sxz" } else { "" });
    }
    for p in &coords.z_checks {
        circle(p, "sz", if xs.contains(p) { " sxz" } else { "" });
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn far_end(s: &Site) -> (i32, i32) {
    match s.edge {
        Edge::Horizontal => (s.x + 1, s.y),
        Edge::Vertical => (s.x, s.y + 1),
    }
}

/// Counts of (`q`, `sx`, `sz`, gray) glyphs in a rendered document.
pub fn glyph_counts(svg: &str) -> (usize, usize, usize, usize) {
    let count = |pat: &str| svg.matches(pat).count();
    (
        count(r#"class="q""#),
        count(r#"class="sx"#),
        count(r#"class="sz"#),
        count(r#"class="gq""#) + count(r#"class="gsx""#) + count(r#"class="gsz""#),
    )
}
