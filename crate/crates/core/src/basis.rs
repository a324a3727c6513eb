//! Logical bases adapted to two-block measurements.
//!
//! Two copies of a block joined horizontally admit channels only for some
//! X-type products, and joined vertically only for some Z-type products.
//! The basis built here makes `X_0 (x) X_1` and `Z_2 (x) Z_3` measurable
//! and keeps the pairing `j_x * j_z^T = I`.

use serde::{Deserialize, Serialize};

use crate::craft::{joint_connect, DeformedCode, Orientation};
use crate::css::{reduce_weight, CssCode, LogicalBasis};
use crate::distance::{shortest_in_coset, SearchConfig};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, RowEchelon};

pub const BASIS_SCHEMA_VERSION: u32 = 1;

/// The horizontal (X-type) and vertical (Z-type) two-block intermediates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointIntermediates {
    pub hxx: DeformedCode,
    pub hzz: DeformedCode,
    pub s_xx: u32,
    pub s_zz: u32,
}

pub fn build_joint_intermediates(code: &CssCode, s_xx: u32, s_zz: u32) -> Result<JointIntermediates> {
    Ok(JointIntermediates {
        hxx: joint_connect(code, Orientation::Horizontal, s_xx)?,
        hzz: joint_connect(code, Orientation::Vertical, s_zz)?,
        s_xx,
        s_zz,
    })
}

/// Basis of the vectors in `rowspace(m)` that vanish on `cols`.
pub fn rowspace_vanishing_on(m: &BitMatrix, cols: &[usize]) -> BitMatrix {
    let mut order: Vec<usize> = cols.to_vec();
    let mut is_listed = vec![false; m.cols()];
    for &c in cols {
        is_listed[c] = true;
    }
    order.extend((0..m.cols()).filter(|&c| !is_listed[c]));
    let rref = m.select_columns(&order).rref();
    let mut out = BitMatrix::empty(m.cols());
    for (row, &p) in rref.reduced.iter_rows().zip(&rref.pivots) {
        if p >= cols.len() {
            out.push_row(row.scatter(m.cols(), &order));
        }
    }
    out
}

/// Pairs `(left, right)` of base-block vectors with `(left, 0, right)` in
/// the row space of the measured-type checks of a two-block intermediate.
fn joint_pairs(ji: &DeformedCode) -> (BitMatrix, BitMatrix) {
    let f = ji.frame();
    let rows = rowspace_vanishing_on(&f.h_x, &f.ancilla_cols);
    let n = f.base_n;
    let left = &f.base_cols[..n];
    let right = &f.base_cols[n..];
    let l = BitMatrix::from_rows(n, rows.iter_rows().map(|r| r.select(left)).collect());
    let r = BitMatrix::from_rows(n, rows.iter_rows().map(|r| r.select(right)).collect());
    (l, r)
}

/// Enumerates the span of `rows` in order of increasing weight of the
/// combination, then lexicographically, and returns the first combination
/// accepted by `accept`. Rows must number at most 24.
fn first_combination(rows: usize, mut accept: impl FnMut(&BitVector) -> bool) -> Option<BitVector> {
    assert!(rows <= 24, "combination search over {rows} generators");
    let mut masks: Vec<u32> = (1u32..(1u32 << rows)).collect();
    masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
    masks
        .into_iter()
        .map(|m| BitVector::from_bits((0..rows).map(|i| (m >> i) & 1 == 1)))
        .find(|c| accept(c))
}

/// Logical coordinates of the pairs, with the stabilizer-only directions
/// removed: returns generators `(c_left, c_right)` and the matching vectors.
fn logical_generators(
    left: &BitMatrix,
    right: &BitMatrix,
    coordinates: &BitMatrix,
) -> (Vec<(BitVector, BitVector)>, Vec<(BitVector, BitVector)>) {
    let k = coordinates.rows();
    let mut span = RowEchelon::new(2 * k);
    let mut coords = Vec::new();
    let mut vectors = Vec::new();
    for (a, b) in left.iter_rows().zip(right.iter_rows()) {
        let ca = coordinates.mul_vec(a);
        let cb = coordinates.mul_vec(b);
        if span.insert(&ca.concat(&cb)) {
            coords.push((ca, cb));
            vectors.push((a.clone(), b.clone()));
        }
    }
    (coords, vectors)
}

fn independent_pair(a: &BitVector, b: &BitVector) -> bool {
    !a.is_zero() && !b.is_zero() && a != b
}

/// A pair `(j1, j2)` of X logicals with `(j1, 0, j2)` in the row space of
/// the horizontal intermediate's X checks and `j1`, `j2` independent modulo
/// the stabilizers. Representatives are shortened by stabilizer moves.
pub fn find_joint_x_pair(ji: &JointIntermediates, code: &CssCode) -> Result<Option<(BitVector, BitVector)>> {
    let canonical = code.canonical_logicals()?;
    let (left, right) = joint_pairs(&ji.hxx);
    let (coords, vectors) = logical_generators(&left, &right, &canonical.j_z);
    if coords.len() > 24 {
        return Err(Error::BasisSearch("too many joint channel generators".into()));
    }
    let pick = first_combination(coords.len(), |c| {
        let (a, b) = combine_pairs(&coords, c);
        independent_pair(&a, &b)
    });
    Ok(pick.map(|c| {
        let (a, b) = combine_pairs(&vectors, &c);
        (reduce_weight(&a, &code.h_x), reduce_weight(&b, &code.h_x))
    }))
}

fn combine_pairs(pairs: &[(BitVector, BitVector)], c: &BitVector) -> (BitVector, BitVector) {
    let mut a = BitVector::zeros(pairs[0].0.len());
    let mut b = BitVector::zeros(pairs[0].1.len());
    for i in c.iter_ones() {
        a.xor_assign(&pairs[i].0);
        b.xor_assign(&pairs[i].1);
    }
    (a, b)
}

/// The Z-side choice of the basis search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingSolution {
    pub j_x1: BitVector,
    pub j_x2: BitVector,
    /// Rows `A_l = (A_L, 0, A_R)` restricted to the two blocks.
    pub a_left: BitMatrix,
    pub a_right: BitMatrix,
    /// Selector over the rows of `A`.
    pub q: BitVector,
    pub j_z3: BitVector,
    pub j_z4: BitVector,
}

/// Picks `q` with `q A_L` and `q A_R` orthogonal to both X logicals of the
/// pair and independent of each other modulo the Z stabilizers.
pub fn solve_pairing(ji: &JointIntermediates, pair: &(BitVector, BitVector), code: &CssCode) -> Result<PairingSolution> {
    let canonical = code.canonical_logicals()?;
    let (a_left, a_right) = joint_pairs(&ji.hzz);
    if a_left.rows() == 0 {
        return Err(Error::BasisSearch(
            "the vertical intermediate has no Z channel; try other separations".into(),
        ));
    }
    let (j1, j2) = pair;
    // Constraint matrix: one row per A_l with the four products.
    let constraints = BitMatrix::from_rows(
        4,
        a_left
            .iter_rows()
            .zip(a_right.iter_rows())
            .map(|(l, r)| BitVector::from_bits([l.dot(j1), l.dot(j2), r.dot(j1), r.dot(j2)]))
            .collect(),
    );
    let admissible = constraints.transpose().kernel_basis();
    let left_q = admissible.mul(&a_left);
    let right_q = admissible.mul(&a_right);
    let mut coords = Vec::new();
    let mut generators = Vec::new();
    let mut span = RowEchelon::new(2 * canonical.k());
    for (i, (l, r)) in left_q.iter_rows().zip(right_q.iter_rows()).enumerate() {
        let (cl, cr) = (canonical.j_x.mul_vec(l), canonical.j_x.mul_vec(r));
        if span.insert(&cl.concat(&cr)) {
            coords.push((cl, cr));
            generators.push(i);
        }
    }
    if coords.len() > 24 {
        return Err(Error::BasisSearch("too many joint channel generators".into()));
    }
    let pick = first_combination(coords.len(), |c| {
        let (a, b) = combine_pairs(&coords, c);
        independent_pair(&a, &b)
    })
    .ok_or_else(|| {
        Error::BasisSearch("no admissible q; try another X pair or other separations".into())
    })?;
    let mut q = BitVector::zeros(a_left.rows());
    for i in pick.iter_ones() {
        q.xor_assign(admissible.row(generators[i]));
    }
    let j_z3 = reduce_weight(&a_left.combine_rows(&q), &code.h_z);
    let j_z4 = reduce_weight(&a_right.combine_rows(&q), &code.h_z);
    Ok(PairingSolution {
        j_x1: j1.clone(),
        j_x2: j2.clone(),
        a_left,
        a_right,
        q,
        j_z3,
        j_z4,
    })
}

/// Completes `X_0 = j_x1`, `X_1 = j_x2`, `Z_2 = j_z3`, `Z_3 = j_z4` to a
/// basis with `j_x * j_z^T = I`, working in the logical coordinates of the
/// canonical basis.
pub fn complete_basis(code: &CssCode, sol: &PairingSolution) -> Result<LogicalBasis> {
    let canonical = code.canonical_logicals()?;
    let k = canonical.k();
    if k < 4 {
        return Err(Error::BasisSearch(format!("need at least 4 logical qubits, the code has {k}")));
    }
    let a0 = canonical.j_z.mul_vec(&sol.j_x1);
    let a1 = canonical.j_z.mul_vec(&sol.j_x2);
    let b2 = canonical.j_x.mul_vec(&sol.j_z3);
    let b3 = canonical.j_x.mul_vec(&sol.j_z4);
    let zs = BitMatrix::from_rows(k, vec![b2.clone(), b3.clone()]);
    let pick = |r: [bool; 2]| -> Result<BitVector> {
        zs.transpose()
            .solve_left(&BitVector::from_bits(r))?
            .ok_or_else(|| Error::BasisSearch("Z_2 and Z_3 are not independent".into()))
    };
    let a2 = pick([true, false])?;
    let a3 = pick([false, true])?;
    // Extend {a0, a1} to a basis of the annihilator of {b2, b3}.
    let annihilator = zs.kernel_basis();
    let mut span = RowEchelon::new(k);
    let mut rows = vec![a0.clone(), a1.clone(), a2, a3];
    for v in [&a0, &a1] {
        if !span.insert(v) {
            return Err(Error::BasisSearch("X_0 and X_1 are not independent".into()));
        }
    }
    for v in annihilator.iter_rows() {
        if span.insert(v) {
            rows.push(v.clone());
        }
    }
    let a = BitMatrix::from_rows(k, rows);
    let b = a
        .inverse()
        .ok_or_else(|| Error::BasisSearch("completed X coordinates are singular".into()))?
        .transpose();
    let mut j_x = BitMatrix::empty(code.n());
    let mut j_z = BitMatrix::empty(code.n());
    for i in 0..k {
        let x = match i {
            0 => sol.j_x1.clone(),
            1 => sol.j_x2.clone(),
            _ => reduce_weight(&canonical.j_x.combine_rows(a.row(i)), &code.h_x),
        };
        let z = match i {
            2 => sol.j_z3.clone(),
            3 => sol.j_z4.clone(),
            _ => reduce_weight(&canonical.j_z.combine_rows(b.row(i)), &code.h_z),
        };
        j_x.push_row(x);
        j_z.push_row(z);
    }
    let basis = LogicalBasis { j_x, j_z };
    basis.verify(code)?;
    Ok(basis)
}

/// Witnesses that the optimized basis supports both joint measurements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisReport {
    pub schema_version: u32,
    pub basis: LogicalBasis,
    pub s_xx: u32,
    pub s_zz: u32,
    pub solution: PairingSolution,
}

/// Full basis search for the given separations.
pub fn optimize_basis(code: &CssCode, s_xx: u32, s_zz: u32, search: &SearchConfig) -> Result<BasisReport> {
    if code.logical_count() < 4 {
        return Err(Error::BasisSearch(format!(
            "need at least 4 logical qubits, the code has {}",
            code.logical_count()
        )));
    }
    let ji = build_joint_intermediates(code, s_xx, s_zz)?;
    let pair = find_joint_x_pair(&ji, code)?.ok_or_else(|| {
        Error::BasisSearch(format!("no joint X channel at s_xx = {s_xx}; try other separations"))
    })?;
    let solution = solve_pairing(&ji, &pair, code)?;
    let basis = shorten(code, &complete_basis(code, &solution)?, search)?;
    Ok(BasisReport {
        schema_version: BASIS_SCHEMA_VERSION,
        basis,
        s_xx,
        s_zz,
        solution,
    })
}

/// Replaces every operator of the basis by a short representative of its
/// stabilizer coset. Classes, and therefore the pairing, are unchanged.
pub fn shorten(code: &CssCode, basis: &LogicalBasis, search: &SearchConfig) -> Result<LogicalBasis> {
    let each = |m: &BitMatrix, stabilizers: &BitMatrix| -> Result<BitMatrix> {
        let rows = m
            .iter_rows()
            .map(|r| shortest_in_coset(r, stabilizers, search))
            .collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix::from_rows(m.cols(), rows))
    };
    let out = LogicalBasis {
        j_x: each(&basis.j_x, &code.h_x)?,
        j_z: each(&basis.j_z, &code.h_z)?,
    };
    out.verify(code)?;
    Ok(out)
}

/// Rechecks the joint-measurability witnesses of a basis.
pub fn verify_witnesses(ji: &JointIntermediates, basis: &LogicalBasis) -> Result<bool> {
    let xx = ji.hxx.frame();
    let x_joint = basis.j_x.row(0).concat(basis.j_x.row(1));
    let ok_x = xx.h_x.in_rowspace(&xx.lift(&x_joint)?)?;
    let zz = ji.hzz.frame();
    let z_joint = basis.j_z.row(2).concat(basis.j_z.row(3));
    let ok_z = zz.h_x.in_rowspace(&zz.lift(&z_joint)?)?;
    Ok(ok_x && ok_z)
}
