//! Planar bivariate-bicycle codes built from two template stabilizers.
//!
//! Qubits live on the edges of a square lattice: the horizontal edge `(x, y, h)`
//! joins vertices `(x, y)` and `(x + 1, y)`, the vertical edge `(x, y, v)`
//! joins `(x, y)` and `(x, y + 1)`. A stabilizer placed at vertex `p` acts on
//! the edges `p + offset` for every offset of its template.
//!
//! X stabilizers fill `region_x` and Z stabilizers fill `region_z`. By
//! convention the Z region is the wider one, so the left and right sides are
//! the rough boundaries and the top and bottom sides are smooth.
//!
//! Qubits are indexed row-major: sorted by `(y, x, edge)` with `h` before `v`.
//! Stabilizers are indexed row-major by `(y, x)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::css::{Coords, CssCode};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Orientation of a lattice edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Edge {
    #[serde(rename = "h")]
    Horizontal,
    #[serde(rename = "v")]
    Vertical,
}

impl Edge {
    pub fn flip(self) -> Edge {
        match self {
            Edge::Horizontal => Edge::Vertical,
            Edge::Vertical => Edge::Horizontal,
        }
    }
}

/// A lattice vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub fn new(x: i32, y: i32) -> Self {
        Point { x, y }
    }

    pub fn transpose(&self) -> Point {
        Point {
            x: self.y,
            y: self.x,
        }
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A qubit: a lattice edge anchored at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub x: i32,
    pub y: i32,
    pub edge: Edge,
}

impl Site {
    pub fn transpose(&self) -> Site {
        Site {
            x: self.y,
            y: self.x,
            edge: self.edge.flip(),
        }
    }

    pub fn translate(&self, dx: i32, dy: i32) -> Site {
        Site {
            x: self.x + dx,
            y: self.y + dy,
            edge: self.edge,
        }
    }
}

impl Ord for Site {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x, self.edge).cmp(&(other.y, other.x, other.edge))
    }
}

impl PartialOrd for Site {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Displacement from a stabilizer's vertex to one of the edges it acts on.
/// Serialized as `[dx, dy, "h" | "v"]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Offset(pub i32, pub i32, pub Edge);

impl Offset {
    fn apply(&self, p: Point) -> Site {
        Site {
            x: p.x + self.0,
            y: p.y + self.1,
            edge: self.2,
        }
    }

    fn transpose(&self) -> Offset {
        Offset(self.1, self.0, self.2.flip())
    }
}

/// The two template stabilizers of a code family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateSpec {
    pub tile_size: u32,
    pub x_offsets: Vec<Offset>,
    pub z_offsets: Vec<Offset>,
}

impl TemplateSpec {
    pub fn validate(&self) -> Result<()> {
        if self.tile_size == 0 {
            return Err(Error::Config("tile_size must be at least 1".into()));
        }
        if self.x_offsets.is_empty() || self.z_offsets.is_empty() {
            return Err(Error::Config("template offset sets must be non-empty".into()));
        }
        for (name, set) in [("x_offsets", &self.x_offsets), ("z_offsets", &self.z_offsets)] {
            let distinct: BTreeSet<_> = set.iter().collect();
            if distinct.len() != set.len() {
                return Err(Error::Config(format!("{name} contains a repeated offset")));
            }
        }
        Ok(())
    }

    pub fn dual(&self) -> TemplateSpec {
        TemplateSpec {
            tile_size: self.tile_size,
            x_offsets: self.z_offsets.iter().map(Offset::transpose).collect(),
            z_offsets: self.x_offsets.iter().map(Offset::transpose).collect(),
        }
    }

    pub fn x_support(&self, p: Point) -> impl Iterator<Item = Site> + '_ {
        self.x_offsets.iter().map(move |o| o.apply(p))
    }

    pub fn z_support(&self, p: Point) -> impl Iterator<Item = Site> + '_ {
        self.z_offsets.iter().map(move |o| o.apply(p))
    }
}

/// Axis-aligned rectangle of stabilizer placements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: i32,
    pub y: i32,
    pub width: u32,
    pub height: u32,
}

impl Rect {
    pub fn new(x: i32, y: i32, width: u32, height: u32) -> Self {
        Rect {
            x,
            y,
            width,
            height,
        }
    }

    pub fn x_end(&self) -> i32 {
        self.x + self.width as i32
    }

    pub fn y_end(&self) -> i32 {
        self.y + self.height as i32
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (self.y..self.y_end()).flat_map(move |y| (self.x..self.x_end()).map(move |x| Point::new(x, y)))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x && p.x < self.x_end() && p.y >= self.y && p.y < self.y_end()
    }

    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x < other.x_end() && other.x < self.x_end() && self.y < other.y_end() && other.y < self.y_end()
    }

    pub fn transpose(&self) -> Rect {
        Rect {
            x: self.y,
            y: self.x,
            width: self.height,
            height: self.width,
        }
    }

    pub fn translate(&self, dx: i32, dy: i32) -> Rect {
        Rect {
            x: self.x + dx,
            y: self.y + dy,
            ..*self
        }
    }
}

/// Optional per-code search parameters recorded alongside the geometry.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separations {
    pub xx: u32,
    pub zz: u32,
}

/// A planar BB code configuration, as read from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarBBSpec {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub template: TemplateSpec,
    pub region_x: Rect,
    pub region_z: Rect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separations: Option<Separations>,
}

fn default_schema_version() -> u32 {
    1
}

impl PlanarBBSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: PlanarBBSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.template.validate()?;
        for (name, r) in [("region_x", &self.region_x), ("region_z", &self.region_z)] {
            if r.width == 0 || r.height == 0 {
                return Err(Error::Config(format!("{name} is degenerate")));
            }
        }
        if !self.region_x.overlaps(&self.region_z) {
            return Err(Error::Config("region_x and region_z do not overlap".into()));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            template: self.template.clone(),
            region_x: self.region_x,
            region_z: self.region_z,
            x_sites: self.region_x.points().collect(),
            z_sites: self.region_z.points().collect(),
            stretch: None,
        }
    }
}

/// Which side of the block moves when stretching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Top,
    Bottom,
}

impl Side {
    fn transpose(self) -> Side {
        match self {
            Side::Left => Side::Top,
            Side::Right => Side::Bottom,
            Side::Top => Side::Left,
            Side::Bottom => Side::Right,
        }
    }
}

/// Record of a stretch applied to a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StretchRecord {
    pub side: Side,
    pub columns: u32,
    /// Region of the unstretched X placements.
    pub original_x: Rect,
}

/// Placement data for a lattice code: the template and every vertex that
/// carries a stabilizer before the cutting rule is applied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    pub template: TemplateSpec,
    pub region_x: Rect,
    pub region_z: Rect,
    pub x_sites: Vec<Point>,
    pub z_sites: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stretch: Option<StretchRecord>,
}

impl Geometry {
    pub fn dual(&self) -> Geometry {
        let mut x_sites: Vec<Point> = self.z_sites.iter().map(Point::transpose).collect();
        let mut z_sites: Vec<Point> = self.x_sites.iter().map(Point::transpose).collect();
        x_sites.sort();
        z_sites.sort();
        Geometry {
            template: self.template.dual(),
            region_x: self.region_z.transpose(),
            region_z: self.region_x.transpose(),
            x_sites,
            z_sites,
            stretch: self.stretch.map(|s| StretchRecord {
                side: s.side.transpose(),
                columns: s.columns,
                original_x: s.original_x.transpose(),
            }),
        }
    }
}

/// Elements discarded while realizing a lattice code.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub removed_qubits: Vec<Site>,
    pub removed_x: Vec<Point>,
    pub removed_z: Vec<Point>,
}

/// Places the template stabilizers at the geometry's sites, applies the
/// cutting rule and checks commutation.
pub fn realize(geometry: &Geometry) -> Result<(CssCode, Layout)> {
    let t = &geometry.template;
    let mut x_sites = geometry.x_sites.clone();
    let mut z_sites = geometry.z_sites.clone();
    x_sites.sort();
    x_sites.dedup();
    z_sites.sort();
    z_sites.dedup();

    let mut x_sup: Vec<BTreeSet<Site>> = x_sites.iter().map(|&p| t.x_support(p).collect()).collect();
    let mut z_sup: Vec<BTreeSet<Site>> = z_sites.iter().map(|&p| t.z_support(p).collect()).collect();
    let everything: BTreeSet<Site> = x_sup.iter().chain(&z_sup).flatten().copied().collect();

    // Cutting rule on supports until both types cover exactly the same qubits.
    let qubits = loop {
        let cx: BTreeSet<Site> = x_sup.iter().flatten().copied().collect();
        let cz: BTreeSet<Site> = z_sup.iter().flatten().copied().collect();
        if cx == cz {
            break cx;
        }
        let keep: BTreeSet<Site> = cx.intersection(&cz).copied().collect();
        for s in x_sup.iter_mut().chain(z_sup.iter_mut()) {
            s.retain(|q| keep.contains(q));
        }
    };
    if qubits.is_empty() {
        return Err(Error::EmptyCode);
    }

    let qubits: Vec<Site> = qubits.into_iter().collect();
    let index: BTreeMap<Site, usize> = qubits.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let n = qubits.len();

    let mut layout = Layout {
        removed_qubits: everything.into_iter().filter(|q| !index.contains_key(q)).collect(),
        ..Layout::default()
    };
    let rows = |sites: &[Point], sups: &[BTreeSet<Site>], removed: &mut Vec<Point>| {
        let mut kept = Vec::new();
        let mut supports = Vec::new();
        for (&p, s) in sites.iter().zip(sups) {
            if s.is_empty() {
                removed.push(p);
            } else {
                kept.push(p);
                supports.push(s.iter().map(|q| index[q]).collect::<Vec<_>>());
            }
        }
        (kept, BitMatrix::from_supports(n, &supports))
    };
    let (x_kept, h_x) = rows(&x_sites, &x_sup, &mut layout.removed_x);
    let (z_kept, h_z) = rows(&z_sites, &z_sup, &mut layout.removed_z);

    let code = CssCode {
        h_x,
        h_z,
        coords: Some(Coords {
            qubits,
            x_checks: x_kept,
            z_checks: z_kept,
        }),
        geometry: Some(geometry.clone()),
    };
    if let Some((i, j)) = code.first_violation() {
        let c = code.coords.as_ref().expect("coords set above");
        return Err(Error::NonCommuting {
            x_site: c.x_checks[i].to_string(),
            z_site: c.z_checks[j].to_string(),
        });
    }
    Ok((code, layout))
}

/// Builds the planar code described by `spec`.
pub fn build_planar_bb(spec: &PlanarBBSpec) -> Result<(CssCode, Layout)> {
    spec.validate()?;
    realize(&spec.geometry())
}

/// Configurations shipped with the crate, by short name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("54", include_str!("../codes/54.json")),
    ("180", include_str!("../codes/180.json")),
    ("162", include_str!("../codes/162.json")),
];

pub fn bundled_spec(name: &str) -> Option<PlanarBBSpec> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| PlanarBBSpec::from_json(json).expect("bundled configs are valid"))
}

/// Direction in which a stretch or a two-block connection extends the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StretchParams {
    pub side: Side,
    /// Number of lattice columns added.
    pub columns: u32,
}

fn geometry_of(code: &CssCode) -> Result<&Geometry> {
    code.geometry
        .as_ref()
        .ok_or_else(|| Error::Stretch("code carries no lattice geometry".into()))
}

/// Enlarges the block by moving one rough boundary outwards.
pub fn stretch(code: &CssCode, p: StretchParams) -> Result<CssCode> {
    let g = geometry_of(code)?;
    if p.columns == 0 {
        return Err(Error::Stretch("stretch length must be at least one column".into()));
    }
    if g.stretch.is_some() {
        return Err(Error::Stretch("block is already stretched".into()));
    }
    let t = p.columns;
    let (rx, rz) = match p.side {
        Side::Right => (
            Rect { width: g.region_x.width + t, ..g.region_x },
            Rect { width: g.region_z.width + t, ..g.region_z },
        ),
        Side::Left => (
            Rect { x: g.region_x.x - t as i32, width: g.region_x.width + t, ..g.region_x },
            Rect { x: g.region_z.x - t as i32, width: g.region_z.width + t, ..g.region_z },
        ),
        Side::Top | Side::Bottom => {
            return Err(Error::Stretch(format!(
                "{:?} is a smooth boundary; only the left and right rough boundaries can move",
                p.side
            )))
        }
    };
    let geometry = Geometry {
        template: g.template.clone(),
        region_x: rx,
        region_z: rz,
        x_sites: rx.points().collect(),
        z_sites: rz.points().collect(),
        stretch: Some(StretchRecord {
            side: p.side,
            columns: t,
            original_x: g.region_x,
        }),
    };
    Ok(realize(&geometry)?.0)
}

/// Turns the moved rough boundary of a stretched block into a smooth one:
/// removes the boundary Z stabilizers and `tile_size - 1` further columns of
/// Z stabilizers, then applies the cutting rule.
pub fn z_cut(code: &CssCode, tile_size: u32) -> Result<CssCode> {
    let g = code
        .geometry
        .as_ref()
        .ok_or_else(|| Error::Cut("code carries no lattice geometry".into()))?;
    let s = g
        .stretch
        .ok_or_else(|| Error::Cut("block has no moved boundary; stretch it first".into()))?;
    if tile_size != g.template.tile_size {
        return Err(Error::Cut(format!(
            "tile size {tile_size} does not match the template tile size {}",
            g.template.tile_size
        )));
    }
    let depth = tile_size as i32 - 1;
    let removed = |p: &Point| match s.side {
        Side::Right => p.x >= g.region_x.x_end() - depth,
        Side::Left => p.x < g.region_x.x + depth,
        _ => false,
    };
    let geometry = Geometry {
        z_sites: g.z_sites.iter().copied().filter(|p| !removed(p)).collect(),
        ..g.clone()
    };
    Ok(realize(&geometry)?.0)
}

/// Geometry of two copies of a block placed side by side, `separation`
/// columns of X placements apart, with the gap filled by template placements.
pub fn joint_geometry(g: &Geometry, separation: u32) -> Result<(Geometry, i32)> {
    if separation == 0 {
        return Err(Error::Config("block separation must be at least 1".into()));
    }
    if g.stretch.is_some() {
        return Err(Error::Config("cannot connect stretched blocks".into()));
    }
    let shift = g.region_x.width as i32 + separation as i32;
    let right_z = g.region_z.translate(shift, 0);
    if right_z.x < g.region_z.x_end() {
        return Err(Error::Config(format!(
            "separation {separation} is too small: the boundary Z stabilizers of the two blocks collide"
        )));
    }
    let region_x = Rect {
        width: g.region_x.width * 2 + separation,
        ..g.region_x
    };
    let region_z = Rect {
        width: (right_z.x_end() - g.region_z.x) as u32,
        ..g.region_z
    };
    Ok((
        Geometry {
            template: g.template.clone(),
            region_x,
            region_z,
            x_sites: region_x.points().collect(),
            z_sites: region_z.points().collect(),
            stretch: None,
        },
        shift,
    ))
}


#[cfg(test)]
mod tests {
    use super::fixtures::surface_spec;
    use super::*;

    #[test]
    fn surface_template_builds_a_surface_code() {
        for d in 2..5 {
            let (code, _) = build_planar_bb(&surface_spec(d)).unwrap();
            assert!(code.validate_css());
            assert_eq!(code.logical_count(), 1, "d = {d}");
            // cutting-rule closure
            assert!(code.h_x.zero_columns().is_empty());
            assert!(code.h_z.zero_columns().is_empty());
        }
    }

    #[test]
    fn translation_gives_the_same_matrices() {
        let spec = surface_spec(3);
        let mut shifted = spec.clone();
        shifted.region_x = spec.region_x.translate(5, -2);
        shifted.region_z = spec.region_z.translate(5, -2);
        let (a, _) = build_planar_bb(&spec).unwrap();
        let (b, _) = build_planar_bb(&shifted).unwrap();
        assert_eq!(a.h_x, b.h_x);
        assert_eq!(a.h_z, b.h_z);
    }

    #[test]
    fn non_commuting_templates_are_rejected() {
        let mut spec = surface_spec(3);
        spec.template.z_offsets.pop();
        match build_planar_bb(&spec) {
            Err(Error::NonCommuting { .. }) => {}
            other => panic!("expected commutation error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_inputs() {
        let mut spec = surface_spec(3);
        spec.region_x.width = 0;
        assert!(matches!(build_planar_bb(&spec), Err(Error::Config(_))));

        // single offsets on 1x1 regions never share a qubit between types
        let single = PlanarBBSpec {
            schema_version: 1,
            name: "single".into(),
            template: TemplateSpec {
                tile_size: 1,
                x_offsets: vec![Offset(0, 0, Edge::Horizontal)],
                z_offsets: vec![Offset(0, 0, Edge::Vertical)],
            },
            region_x: Rect::new(0, 0, 1, 1),
            region_z: Rect::new(0, 0, 1, 1),
            separations: None,
        };
        assert!(matches!(build_planar_bb(&single), Err(Error::EmptyCode)));
    }

    #[test]
    fn stretch_rejects_smooth_sides_and_zero_length() {
        let (code, _) = build_planar_bb(&surface_spec(3)).unwrap();
        let bad = stretch(&code, StretchParams { side: Side::Top, columns: 1 });
        assert!(matches!(bad, Err(Error::Stretch(_))));
        let zero = stretch(&code, StretchParams { side: Side::Right, columns: 0 });
        assert!(matches!(zero, Err(Error::Stretch(_))));
        assert!(matches!(z_cut(&code, 2), Err(Error::Cut(_))));
    }

    #[test]
    fn dual_geometry_is_an_involution() {
        let g = surface_spec(3).geometry();
        let mut back = g.dual().dual();
        back.x_sites.sort();
        back.z_sites.sort();
        let mut orig = g.clone();
        orig.x_sites.sort();
        orig.z_sites.sort();
        assert_eq!(back, orig);
    }

    #[test]
    fn config_json_round_trip() {
        let spec = surface_spec(3);
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"tile_size\":2"));
        assert_eq!(PlanarBBSpec::from_json(&json).unwrap(), spec);
        assert!(PlanarBBSpec::from_json("{\"name\": 3}").is_err());
    }
}
