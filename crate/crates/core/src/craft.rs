//! Deformed codes for logical measurements: stretching, Z cutting, the
//! measurement channel and X cutting, plus two-block connections.
//!
//! A [`DeformedCode`] keeps its columns in block order. For a single block
//! the base qubits come first, in the base code's own order, followed by the
//! ancilla. For two blocks the order is left base, ancilla, right base. The
//! rows of the base stabilizers are recorded so the block form
//!
//! ```text
//! h_x = ( H_X  0   )     h_z = ( H_Z  T   )
//!       ( S    H_G^T )         ( 0    H_M )
//! ```
//!
//! can be checked exactly.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bb::{self, Point, Side, Site, StretchParams};
use crate::css::{Coords, CssCode, LogicalBasis};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

pub const DEFORMED_SCHEMA_VERSION: u32 = 1;

/// Pauli type of a measured logical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Z,
}

impl Pauli {
    pub fn other(self) -> Pauli {
        match self {
            Pauli::X => Pauli::Z,
            Pauli::Z => Pauli::X,
        }
    }
}

/// How two blocks are placed next to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// An intermediate or final deformed code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformedCode {
    pub schema_version: u32,
    /// Type of the logicals this code measures, which fixes the roles of
    /// the block form above (rows and columns are swapped for `Z`).
    pub measured: Pauli,
    pub h_x: BitMatrix,
    pub h_z: BitMatrix,
    /// Qubit count of one base block.
    pub base_n: usize,
    pub blocks: usize,
    /// Deformed column of each base qubit, block after block.
    pub base_cols: Vec<usize>,
    pub ancilla_cols: Vec<usize>,
    /// Deformed row of each base X stabilizer, block after block.
    pub base_x_rows: Vec<usize>,
    pub base_z_rows: Vec<usize>,
    /// Selection over the new measured-type rows of the intermediate code,
    /// set once the code has been X cut.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_mask: Option<BitVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Coords>,
}

impl DeformedCode {
    pub fn n(&self) -> usize {
        self.h_x.cols()
    }

    pub fn ancilla_size(&self) -> usize {
        self.ancilla_cols.len()
    }

    pub fn validate_css(&self) -> bool {
        self.h_x.mul_transpose(&self.h_z).is_zero()
    }

    pub fn as_css(&self) -> CssCode {
        CssCode {
            h_x: self.h_x.clone(),
            h_z: self.h_z.clone(),
            coords: self.coords.clone(),
            geometry: None,
        }
    }

    /// Rows of `h_x` that do not come from a base stabilizer.
    pub fn new_x_rows(&self) -> Vec<usize> {
        complement(self.h_x.rows(), &self.base_x_rows)
    }

    pub fn new_z_rows(&self) -> Vec<usize> {
        complement(self.h_z.rows(), &self.base_z_rows)
    }

    /// Extends a vector on the base qubits by zeros on the ancilla.
    pub fn lift(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.base_cols.len() {
            return Err(Error::Dimension {
                expected: self.base_cols.len(),
                found: v.len(),
            });
        }
        Ok(v.scatter(self.n(), &self.base_cols))
    }

    pub fn lift_rows(&self, m: &BitMatrix) -> Result<BitMatrix> {
        let rows = m.iter_rows().map(|r| self.lift(r)).collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix::from_rows(self.n(), rows))
    }

    pub fn base_part(&self, v: &BitVector) -> BitVector {
        v.select(&self.base_cols)
    }

    pub fn ancilla_part(&self, v: &BitVector) -> BitVector {
        v.select(&self.ancilla_cols)
    }

    /// Same code with X and Z exchanged.
    pub fn dual(&self) -> DeformedCode {
        DeformedCode {
            schema_version: self.schema_version,
            measured: self.measured.other(),
            h_x: self.h_z.clone(),
            h_z: self.h_x.clone(),
            base_n: self.base_n,
            blocks: self.blocks,
            base_cols: self.base_cols.clone(),
            ancilla_cols: self.ancilla_cols.clone(),
            base_x_rows: self.base_z_rows.clone(),
            base_z_rows: self.base_x_rows.clone(),
            g_mask: self.g_mask.clone(),
            coords: self.coords.as_ref().map(Coords::dual),
        }
    }

    /// The code seen from the measured type: `self` for X measurements and
    /// the dual for Z measurements.
    pub fn frame(&self) -> DeformedCode {
        match self.measured {
            Pauli::X => self.clone(),
            Pauli::Z => self.dual(),
        }
    }

    /// Checks the zero blocks of the block form against `base`.
    pub fn check_block_form(&self, base: &CssCode) -> Result<()> {
        let f = self.frame();
        let (bx, bz) = match self.measured {
            Pauli::X => (&base.h_x, &base.h_z),
            Pauli::Z => (&base.h_z, &base.h_x),
        };
        if f.base_n != base.n() || f.base_cols.len() != f.blocks * f.base_n {
            return Err(Error::BlockForm("base column count does not match the base code".into()));
        }
        if f.base_x_rows.len() != f.blocks * bx.rows() || f.base_z_rows.len() != f.blocks * bz.rows() {
            return Err(Error::BlockForm("base row count does not match the base code".into()));
        }
        let n = f.base_n;
        for b in 0..f.blocks {
            let own = &f.base_cols[b * n..(b + 1) * n];
            for (i, want) in bx.iter_rows().enumerate() {
                let row = f.h_x.row(f.base_x_rows[b * bx.rows() + i]);
                if row.select(own) != *want || row.weight() != want.weight() {
                    return Err(Error::BlockForm(format!(
                        "base stabilizer {i} of block {b} is not (H, 0) in the measured type"
                    )));
                }
            }
            for (i, want) in bz.iter_rows().enumerate() {
                let row = f.h_z.row(f.base_z_rows[b * bz.rows() + i]);
                if row.select(own) != *want {
                    return Err(Error::BlockForm(format!(
                        "base stabilizer {i} of block {b} differs from the base code"
                    )));
                }
                if row.select(&f.base_cols).weight() != want.weight() {
                    return Err(Error::BlockForm(format!(
                        "base stabilizer {i} of block {b} reaches into the other block"
                    )));
                }
            }
        }
        for r in f.new_z_rows() {
            if f.h_z.row(r).select(&f.base_cols).weight() != 0 {
                return Err(Error::BlockForm(format!(
                    "new stabilizer {r} acts on base qubits"
                )));
            }
        }
        Ok(())
    }
}

fn complement(len: usize, taken: &[usize]) -> Vec<usize> {
    let set: BTreeSet<usize> = taken.iter().copied().collect();
    (0..len).filter(|i| !set.contains(i)).collect()
}

/// Builds a [`DeformedCode`] from a lattice code containing `shifts.len()`
/// translated copies of `base`, measured type X.
fn assemble(lattice: &CssCode, base: &CssCode, shifts: &[(i32, i32)]) -> Result<DeformedCode> {
    let lc = lattice
        .coords
        .as_ref()
        .ok_or_else(|| Error::BlockForm("lattice code has no coordinates".into()))?;
    let bc = base
        .coords
        .as_ref()
        .ok_or_else(|| Error::BlockForm("base code has no coordinates".into()))?;
    let col_of: BTreeMap<Site, usize> = lc.qubits.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let x_row_of: BTreeMap<Point, usize> = lc.x_checks.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let z_row_of: BTreeMap<Point, usize> = lc.z_checks.iter().enumerate().map(|(i, &p)| (p, i)).collect();

    let mut block_cols: Vec<Vec<usize>> = Vec::new();
    let mut block_x: Vec<Vec<usize>> = Vec::new();
    let mut block_z: Vec<Vec<usize>> = Vec::new();
    for &(dx, dy) in shifts {
        let cols = bc
            .qubits
            .iter()
            .map(|s| {
                let t = s.translate(dx, dy);
                col_of.get(&t).copied().ok_or_else(|| {
                    Error::BlockForm(format!("base qubit ({}, {}) is missing from the deformed code", t.x, t.y))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = |points: &[Point], of: &BTreeMap<Point, usize>| {
            points
                .iter()
                .map(|p| {
                    let t = Point::new(p.x + dx, p.y + dy);
                    of.get(&t)
                        .copied()
                        .ok_or_else(|| Error::BlockForm(format!("base stabilizer at {t} is missing")))
                })
                .collect::<Result<Vec<_>>>()
        };
        block_x.push(rows(&bc.x_checks, &x_row_of)?);
        block_z.push(rows(&bc.z_checks, &z_row_of)?);
        block_cols.push(cols);
    }
    let all_base: Vec<usize> = block_cols.concat();
    let ancilla: Vec<usize> = complement(lattice.n(), &all_base);
    let new_x = complement(lattice.h_x.rows(), &block_x.concat());
    let new_z = complement(lattice.h_z.rows(), &block_z.concat());

    // Column and row order: first block, ancilla / new rows, remaining blocks.
    let interleave = |blocks: &[Vec<usize>], middle: &[usize]| -> Vec<usize> {
        let mut order = blocks[0].clone();
        order.extend_from_slice(middle);
        for b in &blocks[1..] {
            order.extend_from_slice(b);
        }
        order
    };
    let col_order = interleave(&block_cols, &ancilla);
    let x_order = interleave(&block_x, &new_x);
    let z_order = interleave(&block_z, &new_z);

    let position = |order: &[usize], len: usize| {
        let mut pos = vec![0; len];
        for (i, &c) in order.iter().enumerate() {
            pos[c] = i;
        }
        pos
    };
    let col_pos = position(&col_order, lattice.n());
    let x_pos = position(&x_order, lattice.h_x.rows());
    let z_pos = position(&z_order, lattice.h_z.rows());

    let h_x = lattice.h_x.select_rows(&x_order).select_columns(&col_order);
    let h_z = lattice.h_z.select_rows(&z_order).select_columns(&col_order);
    let coords = Coords {
        qubits: col_order.iter().map(|&c| lc.qubits[c]).collect(),
        x_checks: x_order.iter().map(|&r| lc.x_checks[r]).collect(),
        z_checks: z_order.iter().map(|&r| lc.z_checks[r]).collect(),
    };
    let deformed = DeformedCode {
        schema_version: DEFORMED_SCHEMA_VERSION,
        measured: Pauli::X,
        h_x,
        h_z,
        base_n: base.n(),
        blocks: shifts.len(),
        base_cols: all_base.iter().map(|&c| col_pos[c]).collect(),
        ancilla_cols: ancilla.iter().map(|&c| col_pos[c]).collect(),
        base_x_rows: block_x.concat().iter().map(|&r| x_pos[r]).collect(),
        base_z_rows: block_z.concat().iter().map(|&r| z_pos[r]).collect(),
        g_mask: None,
        coords: Some(coords),
    };
    deformed.check_block_form(base)?;
    Ok(deformed)
}

/// Stretch followed by Z cutting: the intermediate code of a single-block
/// X measurement, in which every base X logical has a channel.
pub fn x_intermediate(base: &CssCode, p: StretchParams) -> Result<DeformedCode> {
    let g = base
        .geometry
        .as_ref()
        .ok_or_else(|| Error::Stretch("code carries no lattice geometry".into()))?;
    let stretched = bb::stretch(base, p)?;
    let cut = bb::z_cut(&stretched, g.template.tile_size)?;
    assemble(&cut, base, &[(0, 0)])
}

/// Intermediate code of a single-block measurement of type `measured`.
/// For Z measurements `p.side` is `Top` or `Bottom`; the X pipeline runs on
/// the dual code and the result is dualized back.
pub fn intermediate(base: &CssCode, measured: Pauli, p: StretchParams) -> Result<DeformedCode> {
    match measured {
        Pauli::X => x_intermediate(base, p),
        Pauli::Z => {
            let side = dual_side(p.side)?;
            Ok(x_intermediate(&base.dual(), StretchParams { side, ..p })?.dual())
        }
    }
}

/// The boundary of the dual code that a Z-pipeline side maps to.
fn dual_side(side: Side) -> Result<Side> {
    match side {
        Side::Top => Ok(Side::Left),
        Side::Bottom => Ok(Side::Right),
        s => Err(Error::Stretch(format!(
            "{s:?} is a smooth boundary for Z measurements; move top or bottom"
        ))),
    }
}

/// Smallest stretch, in columns, at which the intermediate code keeps the
/// block form, together with the resulting ancilla sizes for `count`
/// successive stretch lengths.
pub fn ancilla_progression(
    base: &CssCode,
    measured: Pauli,
    side: Side,
    count: usize,
) -> Result<Vec<(u32, usize)>> {
    let mut out = Vec::new();
    let mut columns = 1;
    while out.len() < count {
        if columns > 64 {
            return Err(Error::Stretch("no stretch length up to 64 columns gives a valid intermediate".into()));
        }
        match intermediate(base, measured, StretchParams { side, columns }) {
            Ok(d) => out.push((columns, d.ancilla_size())),
            Err(Error::BlockForm(_)) if out.is_empty() => {}
            Err(e) => return Err(e),
        }
        columns += 1;
    }
    Ok(out)
}

/// Stretch length whose intermediate has exactly `ancilla` ancilla qubits.
pub fn stretch_for_ancilla(base: &CssCode, measured: Pauli, side: Side, ancilla: usize) -> Result<u32> {
    for columns in 1..=64 {
        match intermediate(base, measured, StretchParams { side, columns }) {
            Ok(d) if d.ancilla_size() == ancilla => return Ok(columns),
            Ok(d) if d.ancilla_size() > ancilla => break,
            Ok(_) | Err(Error::BlockForm(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::Stretch(format!("no stretch length gives an ancilla of {ancilla} qubits")))
}

/// Two copies of `base` joined through a gap of `separation` columns (or
/// rows, for a vertical connection).
///
/// A horizontal connection yields the intermediate of an X-type joint
/// measurement. A vertical one is the dual construction and yields the
/// intermediate of a Z-type joint measurement.
pub fn joint_connect(base: &CssCode, orientation: Orientation, separation: u32) -> Result<DeformedCode> {
    match orientation {
        Orientation::Horizontal => {
            let g = base
                .geometry
                .as_ref()
                .ok_or_else(|| Error::Config("code carries no lattice geometry".into()))?;
            let (joint, shift) = bb::joint_geometry(g, separation)?;
            let (lattice, _) = bb::realize(&joint)?;
            assemble(&lattice, base, &[(0, 0), (shift, 0)])
        }
        Orientation::Vertical => Ok(joint_connect(&base.dual(), Orientation::Horizontal, separation)?.dual()),
    }
}

/// A row vector `g` over the measured-type stabilizers with `g * H = (target, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementChannel {
    pub g: BitVector,
    /// Part of `g` on the base stabilizers of the measured type.
    pub g_o: BitVector,
    /// Part of `g` on the new stabilizers of the measured type.
    pub g_n: BitVector,
    pub target: BitVector,
}

/// Channel of `target` (a logical on the base qubits of every block) in
/// the intermediate code, if one exists. Works in the measured frame.
pub fn measurement_channel(inter: &DeformedCode, target: &BitVector) -> Result<Option<MeasurementChannel>> {
    let f = inter.frame();
    let lifted = f.lift(target)?;
    let Some(g) = f.h_x.solve_left(&lifted)? else {
        return Ok(None);
    };
    Ok(Some(MeasurementChannel {
        g_o: g.select(&f.base_x_rows),
        g_n: g.select(&f.new_x_rows()),
        g,
        target: target.clone(),
    }))
}

/// Splits `basis_rows` into the target and the remaining logicals: the
/// first basis element in the target's expansion is replaced by the target.
/// Returns the replaced index and the `k - 1` unmeasured logicals.
pub fn unmeasured_logicals(basis_rows: &BitMatrix, target: &BitVector) -> Result<(usize, BitMatrix)> {
    let coeffs = basis_rows
        .solve_left(target)?
        .ok_or(Error::TargetOutsideSpan)?;
    let replaced = coeffs.first_one().ok_or(Error::TargetOutsideSpan)?;
    let rest: Vec<usize> = (0..basis_rows.rows()).filter(|&i| i != replaced).collect();
    Ok((replaced, basis_rows.select_rows(&rest)))
}

/// Output of X cutting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub deformed: DeformedCode,
    pub channel: MeasurementChannel,
    /// Ancilla size of the intermediate code before cutting.
    pub intermediate_ancilla: usize,
    /// Index of the basis logical replaced by the target.
    pub replaced: usize,
    /// The `k - 1` unmeasured logicals of the measured type, on base qubits.
    pub unmeasured: BitMatrix,
}

/// X cutting: keeps only the new stabilizers used by the target's channel,
/// prunes emptied qubits and stabilizers and verifies that no other
/// logical is measured. `basis_rows` are the measured-type logicals
/// (the X logicals of an X measurement), lifted to every block.
pub fn x_cut(inter: &DeformedCode, target: &BitVector, basis_rows: &BitMatrix) -> Result<Measurement> {
    let (replaced, unmeasured) = unmeasured_logicals(basis_rows, target)?;
    let channel = measurement_channel(inter, target)?.ok_or(Error::NoChannel)?;
    let f = inter.frame();

    let new_rows = f.new_x_rows();
    let mut keep_x: Vec<usize> = f.base_x_rows.clone();
    keep_x.extend(new_rows.iter().zip((0..channel.g_n.len()).map(|i| channel.g_n.get(i))).filter(|(_, b)| *b).map(|(&r, _)| r));
    keep_x.sort_unstable();
    let mut keep_z: Vec<usize> = (0..f.h_z.rows()).collect();
    let mut keep_cols: Vec<usize> = (0..f.n()).collect();

    // Zero columns of either matrix go with their partners; emptied rows go too.
    loop {
        let hx = f.h_x.select_rows(&keep_x).select_columns(&keep_cols);
        let hz = f.h_z.select_rows(&keep_z).select_columns(&keep_cols);
        let mut dead: BTreeSet<usize> = hx.zero_columns().into_iter().collect();
        dead.extend(hz.zero_columns());
        let x_empty: BTreeSet<usize> = (0..hx.rows()).filter(|&r| hx.row(r).is_zero()).collect();
        let z_empty: BTreeSet<usize> = (0..hz.rows()).filter(|&r| hz.row(r).is_zero()).collect();
        if dead.is_empty() && x_empty.is_empty() && z_empty.is_empty() {
            break;
        }
        keep_cols = keep_cols.iter().enumerate().filter(|(i, _)| !dead.contains(i)).map(|(_, &c)| c).collect();
        keep_x = keep_x.iter().enumerate().filter(|(i, _)| !x_empty.contains(i)).map(|(_, &r)| r).collect();
        keep_z = keep_z.iter().enumerate().filter(|(i, _)| !z_empty.contains(i)).map(|(_, &r)| r).collect();
    }

    let col_pos: BTreeMap<usize, usize> = keep_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let x_pos: BTreeMap<usize, usize> = keep_x.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let z_pos: BTreeMap<usize, usize> = keep_z.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let remap = |v: &[usize], pos: &BTreeMap<usize, usize>, what: &str| -> Result<Vec<usize>> {
        v.iter()
            .map(|i| {
                pos.get(i)
                    .copied()
                    .ok_or_else(|| Error::BlockForm(format!("X cutting removed a base {what}")))
            })
            .collect()
    };
    let cut = DeformedCode {
        schema_version: DEFORMED_SCHEMA_VERSION,
        measured: Pauli::X,
        h_x: f.h_x.select_rows(&keep_x).select_columns(&keep_cols),
        h_z: f.h_z.select_rows(&keep_z).select_columns(&keep_cols),
        base_n: f.base_n,
        blocks: f.blocks,
        base_cols: remap(&f.base_cols, &col_pos, "qubit")?,
        ancilla_cols: f.ancilla_cols.iter().filter_map(|c| col_pos.get(c).copied()).collect(),
        base_x_rows: remap(&f.base_x_rows, &x_pos, "stabilizer")?,
        base_z_rows: remap(&f.base_z_rows, &z_pos, "stabilizer")?,
        g_mask: Some(channel.g_n.clone()),
        coords: f.coords.as_ref().map(|c| Coords {
            qubits: keep_cols.iter().map(|&i| c.qubits[i]).collect(),
            x_checks: keep_x.iter().map(|&i| c.x_checks[i]).collect(),
            z_checks: keep_z.iter().map(|&i| c.z_checks[i]).collect(),
        }),
    };

    let lifted_target = cut.lift(target)?;
    if !cut.h_x.in_rowspace(&lifted_target)? {
        return Err(Error::NoChannel);
    }
    let lifted = cut.lift_rows(&unmeasured)?;
    if cut.h_x.vstack(&lifted).rank() != cut.h_x.rank() + unmeasured.rows() {
        return Err(Error::MeasuresNonTarget);
    }
    let deformed = match inter.measured {
        Pauli::X => cut,
        Pauli::Z => cut.dual(),
    };
    Ok(Measurement {
        deformed,
        channel,
        intermediate_ancilla: inter.ancilla_size(),
        replaced,
        unmeasured,
    })
}

/// Logicals of the measured type from `basis`, lifted block-diagonally to
/// `blocks` copies.
pub fn measured_rows(basis: &LogicalBasis, measured: Pauli, blocks: usize) -> BitMatrix {
    let b = basis.direct_sum(blocks);
    match measured {
        Pauli::X => b.j_x,
        Pauli::Z => b.j_z,
    }
}

/// Single-block pipeline: intermediate code, then X cutting for `target`.
pub fn measure_single(
    base: &CssCode,
    basis: &LogicalBasis,
    measured: Pauli,
    target: &BitVector,
    p: StretchParams,
) -> Result<Measurement> {
    let inter = intermediate(base, measured, p)?;
    x_cut(&inter, target, &measured_rows(basis, measured, 1))
}

/// Two-block pipeline: blocks joined side by side for X targets and
/// stacked for Z targets, then X cutting for `target` over both blocks.
pub fn measure_joint(base: &CssCode, basis: &LogicalBasis, measured: Pauli, target: &BitVector, separation: u32) -> Result<Measurement> {
    let orientation = match measured {
        Pauli::X => Orientation::Horizontal,
        Pauli::Z => Orientation::Vertical,
    };
    let inter = joint_connect(base, orientation, separation)?;
    x_cut(&inter, target, &measured_rows(basis, measured, 2))
}

/// Z measurement through duality: the X pipeline on the dual code with
/// the dual basis, dualized back. Equal to `measure_single` with `Pauli::Z`.
pub fn z_pipeline_by_duality(base: &CssCode, basis: &LogicalBasis, target: &BitVector, p: StretchParams) -> Result<Measurement> {
    let side = dual_side(p.side)?;
    let inter = x_intermediate(&base.dual(), StretchParams { side, ..p })?;
    let mut m = x_cut(&inter, target, &measured_rows(&basis.dual(), Pauli::X, 1))?;
    m.deformed = m.deformed.dual();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bb::fixtures::surface_spec;
    use crate::bb::build_planar_bb;

    fn surface(d: u32) -> (CssCode, LogicalBasis) {
        let (code, _) = build_planar_bb(&surface_spec(d)).unwrap();
        let basis = code.canonical_logicals().unwrap();
        (code, basis)
    }

    #[test]
    fn surface_progressions_grow_by_one_column_or_row() {
        let (code, _) = surface(3);
        for (pauli, side, first, step) in [
            (Pauli::X, Side::Left, 3, 7),
            (Pauli::X, Side::Right, 3, 7),
            (Pauli::Z, Side::Top, 2, 5),
            (Pauli::Z, Side::Bottom, 2, 5),
        ] {
            let p = ancilla_progression(&code, pauli, side, 3).unwrap();
            let sizes: Vec<usize> = p.iter().map(|x| x.1).collect();
            assert_eq!(sizes, vec![first, first + step, first + 2 * step], "{pauli:?} {side:?}");
        }
    }

    #[test]
    fn surface_measurements_keep_block_form() {
        let (code, basis) = surface(3);
        for (pauli, side) in [(Pauli::X, Side::Right), (Pauli::X, Side::Left), (Pauli::Z, Side::Top), (Pauli::Z, Side::Bottom)] {
            let target = measured_rows(&basis, pauli, 1).row(0).clone();
            for (columns, _) in ancilla_progression(&code, pauli, side, 3).unwrap() {
                let m = measure_single(&code, &basis, pauli, &target, StretchParams { side, columns }).unwrap();
                assert!(m.deformed.validate_css());
                assert_eq!(m.deformed.measured, pauli);
                m.deformed.check_block_form(&code).unwrap();
                let f = m.deformed.frame();
                assert!(f.h_x.in_rowspace(&f.lift(&target).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn z_pipeline_matches_duality() {
        let (code, basis) = surface(3);
        let target = basis.j_z.row(0).clone();
        for side in [Side::Top, Side::Bottom] {
            let columns = ancilla_progression(&code, Pauli::Z, side, 1).unwrap()[0].0;
            let p = StretchParams { side, columns };
            let a = measure_single(&code, &basis, Pauli::Z, &target, p).unwrap();
            let b = z_pipeline_by_duality(&code, &basis, &target, p).unwrap();
            assert_eq!(a.deformed, b.deformed);
            assert_eq!(a.deformed.dual().dual(), a.deformed);
        }
        let p = StretchParams { side: Side::Left, columns: 2 };
        assert!(z_pipeline_by_duality(&code, &basis, &target, p).is_err());
    }

    #[test]
    fn target_outside_span_is_rejected() {
        let (code, basis) = surface(3);
        let columns = ancilla_progression(&code, Pauli::X, Side::Right, 1).unwrap()[0].0;
        let zero = BitVector::zeros(code.n());
        let r = measure_single(&code, &basis, Pauli::X, &zero, StretchParams { side: Side::Right, columns });
        assert!(matches!(r, Err(Error::TargetOutsideSpan)));
    }
}
