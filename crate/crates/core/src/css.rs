//! CSS codes, logical bases and the cutting rule.

use serde::{Deserialize, Serialize};

use crate::bb::{Geometry, Point, Site};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, RowEchelon};

/// Lattice coordinates attached to the columns and rows of a code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coords {
    pub qubits: Vec<Site>,
    pub x_checks: Vec<Point>,
    pub z_checks: Vec<Point>,
}

impl Coords {
    pub fn transpose(&self) -> Coords {
        Coords {
            qubits: self.qubits.iter().map(Site::transpose).collect(),
            x_checks: self.x_checks.iter().map(Point::transpose).collect(),
            z_checks: self.z_checks.iter().map(Point::transpose).collect(),
        }
    }

    /// Same coordinates with the roles of X and Z checks exchanged and the
    /// lattice reflected through its diagonal.
    pub fn dual(&self) -> Coords {
        let t = self.transpose();
        Coords {
            qubits: t.qubits,
            x_checks: t.z_checks,
            z_checks: t.x_checks,
        }
    }
}

/// A CSS code given by its two check matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CssCode {
    pub h_x: BitMatrix,
    pub h_z: BitMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Coords>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
}

impl CssCode {
    pub fn new(h_x: BitMatrix, h_z: BitMatrix) -> Result<Self> {
        if h_x.cols() != h_z.cols() {
            return Err(Error::Dimension {
                expected: h_x.cols(),
                found: h_z.cols(),
            });
        }
        Ok(CssCode {
            h_x,
            h_z,
            coords: None,
            geometry: None,
        })
    }

    pub fn n(&self) -> usize {
        self.h_x.cols()
    }

    /// `true` iff every X check commutes with every Z check.
    pub fn validate_css(&self) -> bool {
        self.h_x.mul_transpose(&self.h_z).is_zero()
    }

    /// First anticommuting (X row, Z row) pair, if any.
    pub fn first_violation(&self) -> Option<(usize, usize)> {
        for (i, x) in self.h_x.iter_rows().enumerate() {
            for (j, z) in self.h_z.iter_rows().enumerate() {
                if x.dot(z) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn logical_count(&self) -> usize {
        self.n() - self.h_x.rank() - self.h_z.rank()
    }

    /// Exchanges the roles of X and Z. Column order is kept, so qubit `i`
    /// of the dual is qubit `i` of the original.
    pub fn dual(&self) -> CssCode {
        CssCode {
            h_x: self.h_z.clone(),
            h_z: self.h_x.clone(),
            coords: self.coords.as_ref().map(Coords::dual),
            geometry: self.geometry.as_ref().map(Geometry::dual),
        }
    }

    /// Removes qubits acted on by only one stabilizer type and stabilizers
    /// left without support, repeating until nothing changes.
    pub fn cutting_rule(&self) -> CssCode {
        let mut keep_cols: Vec<usize> = (0..self.n()).collect();
        let mut keep_x: Vec<usize> = (0..self.h_x.rows()).collect();
        let mut keep_z: Vec<usize> = (0..self.h_z.rows()).collect();
        loop {
            let hx = self.h_x.select_rows(&keep_x).select_columns(&keep_cols);
            let hz = self.h_z.select_rows(&keep_z).select_columns(&keep_cols);
            let mut dead = vec![false; keep_cols.len()];
            for c in hx.zero_columns().into_iter().chain(hz.zero_columns()) {
                dead[c] = true;
            }
            let x_alive: Vec<bool> = hx.iter_rows().map(|r| !r.is_zero()).collect();
            let z_alive: Vec<bool> = hz.iter_rows().map(|r| !r.is_zero()).collect();
            let changed =
                dead.iter().any(|&d| d) || x_alive.contains(&false) || z_alive.contains(&false);
            if !changed {
                break;
            }
            keep_cols = keep_cols
                .iter()
                .zip(&dead)
                .filter(|(_, &d)| !d)
                .map(|(&c, _)| c)
                .collect();
            keep_x = keep_x
                .iter()
                .zip(&x_alive)
                .filter(|(_, &a)| a)
                .map(|(&r, _)| r)
                .collect();
            keep_z = keep_z
                .iter()
                .zip(&z_alive)
                .filter(|(_, &a)| a)
                .map(|(&r, _)| r)
                .collect();
        }
        self.restrict(&keep_cols, &keep_x, &keep_z)
    }

    /// Sub-code on the given columns and rows, carrying coordinates along.
    pub fn restrict(&self, cols: &[usize], x_rows: &[usize], z_rows: &[usize]) -> CssCode {
        CssCode {
            h_x: self.h_x.select_rows(x_rows).select_columns(cols),
            h_z: self.h_z.select_rows(z_rows).select_columns(cols),
            coords: self.coords.as_ref().map(|c| Coords {
                qubits: cols.iter().map(|&i| c.qubits[i]).collect(),
                x_checks: x_rows.iter().map(|&i| c.x_checks[i]).collect(),
                z_checks: z_rows.iter().map(|&i| c.z_checks[i]).collect(),
            }),
            geometry: self.geometry.clone(),
        }
    }

    /// X logical representatives: `ker(h_z)` modulo `rowspace(h_x)`.
    pub fn x_logical_reps(&self) -> BitMatrix {
        complement_in_kernel(&self.h_z, &self.h_x)
    }

    pub fn z_logical_reps(&self) -> BitMatrix {
        complement_in_kernel(&self.h_x, &self.h_z)
    }

    /// A symplectic logical basis with `j_x * j_z^T = I`, each operator
    /// greedily shortened by stabilizer multiplication.
    pub fn canonical_logicals(&self) -> Result<LogicalBasis> {
        let lx = self.x_logical_reps();
        let lz = self.z_logical_reps();
        if lx.rows() == 0 {
            return Err(Error::NoLogicals);
        }
        let pairing = lx.mul_transpose(&lz);
        let inv = pairing
            .inverse()
            .ok_or_else(|| Error::InfeasiblePairing("logical pairing matrix is singular".into()))?;
        let lz = inv.transpose().mul(&lz);
        let j_x = reduce_weights(&lx, &self.h_x);
        let j_z = reduce_weights(&lz, &self.h_z);
        Ok(LogicalBasis { j_x, j_z })
    }
}

/// Rows spanning `ker(kernel_of)` modulo `rowspace(modulo)`.
fn complement_in_kernel(kernel_of: &BitMatrix, modulo: &BitMatrix) -> BitMatrix {
    let kernel = kernel_of.kernel_basis();
    let mut span = RowEchelon::from_matrix(modulo);
    let mut out = BitMatrix::empty(kernel_of.cols());
    for v in kernel.iter_rows() {
        if span.insert(v) {
            out.push_row(v.clone());
        }
    }
    out
}

/// Greedy descent: add any stabilizer row that lowers the weight, until none does.
pub fn reduce_weight(v: &BitVector, stabilizers: &BitMatrix) -> BitVector {
    let mut best = v.clone();
    let mut w = best.weight();
    loop {
        let mut improved = false;
        for s in stabilizers.iter_rows() {
            let cand = best.xor(s);
            let cw = cand.weight();
            if cw < w {
                best = cand;
                w = cw;
                improved = true;
            }
        }
        if !improved {
            return best;
        }
    }
}

fn reduce_weights(m: &BitMatrix, stabilizers: &BitMatrix) -> BitMatrix {
    BitMatrix::from_rows(
        m.cols(),
        m.iter_rows()
            .map(|r| reduce_weight(r, stabilizers))
            .collect(),
    )
}

/// Paired X and Z logical operators of a CSS code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalBasis {
    pub j_x: BitMatrix,
    pub j_z: BitMatrix,
}

impl LogicalBasis {
    pub fn k(&self) -> usize {
        self.j_x.rows()
    }

    pub fn pairing(&self) -> BitMatrix {
        self.j_x.mul_transpose(&self.j_z)
    }

    pub fn is_symplectic(&self) -> bool {
        self.pairing() == BitMatrix::identity(self.k())
    }

    /// Roles of X and Z exchanged, for the dual code.
    pub fn dual(&self) -> LogicalBasis {
        LogicalBasis {
            j_x: self.j_z.clone(),
            j_z: self.j_x.clone(),
        }
    }

    /// Basis of `blocks` disjoint copies of the code, block-diagonal.
    pub fn direct_sum(&self, blocks: usize) -> LogicalBasis {
        let n = self.j_x.cols();
        let lift = |m: &BitMatrix| {
            let mut out = BitMatrix::empty(n * blocks);
            for b in 0..blocks {
                let cols: Vec<usize> = (b * n..(b + 1) * n).collect();
                for r in m.iter_rows() {
                    out.push_row(r.scatter(n * blocks, &cols));
                }
            }
            out
        };
        LogicalBasis {
            j_x: lift(&self.j_x),
            j_z: lift(&self.j_z),
        }
    }

    /// Checks every invariant against `code`: correct kernels, independence
    /// from the stabilizers and the identity pairing.
    pub fn verify(&self, code: &CssCode) -> Result<()> {
        let k = code.logical_count();
        if self.j_x.rows() != k || self.j_z.rows() != k {
            return Err(Error::InvalidStorage(format!(
                "basis has {} X and {} Z operators but the code has k = {k}",
                self.j_x.rows(),
                self.j_z.rows()
            )));
        }
        if !code.h_z.mul_transpose(&self.j_x).is_zero() {
            return Err(Error::InvalidStorage("X logical outside ker(h_z)".into()));
        }
        if !code.h_x.mul_transpose(&self.j_z).is_zero() {
            return Err(Error::InvalidStorage("Z logical outside ker(h_x)".into()));
        }
        if code.h_x.vstack(&self.j_x).rank() != code.h_x.rank() + k
            || code.h_z.vstack(&self.j_z).rank() != code.h_z.rank() + k
        {
            return Err(Error::InvalidStorage(
                "logicals are not independent of the stabilizers".into(),
            ));
        }
        if !self.is_symplectic() {
            return Err(Error::InvalidStorage("pairing is not the identity".into()));
        }
        Ok(())
    }

    /// Writes `v` (an X-type operator in `ker(h_z)`) in the X basis: bit `a`
    /// is set iff `j_x[a]` appears, read off through the paired Z operators.
    pub fn x_coefficients(&self, v: &BitVector) -> BitVector {
        self.j_z.mul_vec(v)
    }

    pub fn z_coefficients(&self, v: &BitVector) -> BitVector {
        self.j_x.mul_vec(v)
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn validate_css_cases() {
        let code = steane();
        assert!(code.validate_css());
        let mut broken = code.clone();
        broken.h_x.row_mut(0).flip(1);
        assert!(!broken.validate_css());
        assert_eq!(broken.first_violation().map(|p| p.0), Some(0));
        let empty = CssCode::new(BitMatrix::empty(3), BitMatrix::empty(3)).unwrap();
        assert!(empty.validate_css());
    }

    #[test]
    fn logical_count_cases() {
        assert_eq!(steane().logical_count(), 1);
        assert_eq!(surface_d3().logical_count(), 1);
        let full = CssCode::new(BitMatrix::parse(&["10"]), BitMatrix::parse(&["01"])).unwrap();
        assert_eq!(full.logical_count(), 0);
        assert!(matches!(full.canonical_logicals(), Err(Error::NoLogicals)));
    }

    #[test]
    fn steane_logicals_have_weight_three() {
        // Oracle: enumerate ker(h_z) \ rowspace(h_x) and take the minimum weight.
        let code = steane();
        let span = RowEchelon::from_matrix(&code.h_x);
        let min = (1u32..128)
            .map(|m| BitVector::from_bits((0..7).map(|i| (m >> i) & 1 == 1)))
            .filter(|v| code.h_z.mul_vec(v).is_zero() && !span.contains(v))
            .map(|v| v.weight())
            .min()
            .unwrap();
        assert_eq!(min, 3);
        let basis = code.canonical_logicals().unwrap();
        assert_eq!(basis.k(), 1);
        assert!(basis.is_symplectic());
        assert_eq!(basis.j_x.row(0).weight(), 3);
        assert_eq!(basis.j_z.row(0).weight(), 3);
        basis.verify(&code).unwrap();
    }

    #[test]
    fn cutting_rule_removes_single_type_qubits() {
        // qubit 3 only appears in a Z check, which is left empty once it goes.
        let h_x = BitMatrix::parse(&["1100"]);
        let h_z = BitMatrix::parse(&["1100", "0001"]);
        let code = CssCode::new(h_x, h_z).unwrap();
        let cut = code.cutting_rule();
        assert_eq!(cut.n(), 2);
        assert_eq!(cut.h_x, BitMatrix::parse(&["11"]));
        assert_eq!(cut.h_z, BitMatrix::parse(&["11"]));
        assert_eq!(cut.cutting_rule(), cut);
        assert_eq!(steane().cutting_rule(), steane());
    }

    #[test]
    fn direct_sum_is_block_diagonal() {
        let basis = steane().canonical_logicals().unwrap();
        let sum = basis.direct_sum(2);
        assert_eq!(sum.k(), 2);
        assert!(sum.is_symplectic());
        assert_eq!(sum.j_x.row(1).support(), basis.j_x.row(0).support().iter().map(|i| i + 7).collect::<Vec<_>>());
    }
}
