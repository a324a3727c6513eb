//! End-to-end measurement runs: target parsing, stretch selection,
//! painting and the before/after distance report.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::optimize_basis;
use crate::bb::{build_planar_bb, PlanarBBSpec, Side, StretchParams};
use crate::craft::{
    ancilla_progression, intermediate, joint_connect, measure_joint, measure_single, measured_rows, stretch_for_ancilla, DeformedCode,
    Measurement, Orientation, Pauli,
};
use crate::css::{CssCode, LogicalBasis};
use crate::distance::SearchConfig;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::paint::{constrained_kernel_basis, measurement_distance, paint, PaintConfig, StorageTrace};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A logical Pauli to measure.
///
/// `X3` is one logical, `X0X2` a product inside one block and `X0,X1` a
/// product across two blocks (logical 0 of the first, 1 of the second).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub pauli: Pauli,
    /// Logical indices per block; one or two blocks.
    pub blocks: Vec<Vec<usize>>,
}

impl Target {
    pub fn is_joint(&self) -> bool {
        self.blocks.len() == 2
    }

    /// Target as a vector on the base qubits of every block.
    pub fn vector(&self, basis: &LogicalBasis) -> Result<BitVector> {
        let k = basis.k();
        let rows = measured_rows(basis, self.pauli, self.blocks.len());
        let mut v = BitVector::zeros(rows.cols());
        for (b, idx) in self.blocks.iter().enumerate() {
            for &i in idx {
                if i >= k {
                    return Err(Error::Config(format!("logical index {i} out of range, the code has {k}")));
                }
                v.xor_assign(rows.row(b * k + i));
            }
        }
        if v.is_zero() {
            return Err(Error::Config("target operator is trivial".into()));
        }
        Ok(v)
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Target> {
        let bad = |why: &str| Error::Config(format!("bad target `{s}`: {why}"));
        let mut pauli = None;
        let mut blocks = Vec::new();
        for part in s.split(',') {
            let mut idx = Vec::new();
            let mut chars = part.trim().chars().peekable();
            while let Some(c) = chars.next() {
                let p = match c {
                    'X' | 'x' => Pauli::X,
                    'Z' | 'z' => Pauli::Z,
                    _ => return Err(bad("expected X or Z")),
                };
                if pauli.is_some_and(|q| q != p) {
                    return Err(bad("mixed X and Z"));
                }
                pauli = Some(p);
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                idx.push(digits.parse().map_err(|_| bad("missing logical index"))?);
            }
            if idx.is_empty() {
                return Err(bad("empty block"));
            }
            blocks.push(idx);
        }
        if blocks.len() > 2 {
            return Err(bad("at most two blocks"));
        }
        Ok(Target { pauli: pauli.ok_or_else(|| bad("empty"))?, blocks })
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|idx| idx.iter().map(|i| format!("{:?}{i}", self.pauli)).collect())
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A code with the logical basis used for its measurements.
#[derive(Clone, Debug)]
pub struct Session {
    pub spec: PlanarBBSpec,
    pub code: CssCode,
    pub basis: LogicalBasis,
}

impl Session {
    /// Builds the code and picks its basis: the two-block basis when the
    /// spec names separations, the canonical one otherwise.
    pub fn new(spec: PlanarBBSpec, search: &SearchConfig) -> Result<Session> {
        let (code, _) = build_planar_bb(&spec)?;
        let basis = match &spec.separations {
            Some(s) => optimize_basis(&code, s.xx, s.zz, search)?.basis,
            None => code.canonical_logicals()?,
        };
        Ok(Session { spec, code, basis })
    }

    pub fn default_side(pauli: Pauli) -> Side {
        match pauli {
            Pauli::X => Side::Left,
            Pauli::Z => Side::Bottom,
        }
    }

    fn separations(&self, pauli: Pauli) -> Option<u32> {
        self.spec.separations.as_ref().map(|s| match pauli {
            Pauli::X => s.xx,
            Pauli::Z => s.zz,
        })
    }

    /// Gap between two blocks whose joint intermediate has `ancilla`
    /// ancilla qubits.
    pub fn separation_for_ancilla(&self, pauli: Pauli, ancilla: usize) -> Result<u32> {
        let orientation = match pauli {
            Pauli::X => Orientation::Horizontal,
            Pauli::Z => Orientation::Vertical,
        };
        for s in 1..=64 {
            match joint_connect(&self.code, orientation, s) {
                Ok(d) if d.ancilla_size() == ancilla => return Ok(s),
                Ok(d) if d.ancilla_size() > ancilla => break,
                Ok(_) | Err(Error::Config(_)) | Err(Error::BlockForm(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Err(Error::Stretch(format!("no separation gives a two-block ancilla of {ancilla} qubits")))
    }

    /// Stretch or separation for `target`. `ancilla` selects the stretch
    /// (or the separation for two-block targets) by intermediate ancilla
    /// size; `None` uses the separation of the spec, or the shortest valid
    /// stretch.
    pub fn shape(&self, target: &Target, ancilla: Option<usize>, side: Option<Side>) -> Result<Shape> {
        if target.is_joint() {
            let separation = match ancilla {
                Some(a) => self.separation_for_ancilla(target.pauli, a)?,
                None => self
                    .separations(target.pauli)
                    .ok_or_else(|| Error::Config("two-block target needs --ancilla or spec separations".into()))?,
            };
            return Ok(Shape::Joint { separation });
        }
        let side = side.unwrap_or(Session::default_side(target.pauli));
        let columns = match ancilla {
            Some(a) => stretch_for_ancilla(&self.code, target.pauli, side, a)?,
            None => ancilla_progression(&self.code, target.pauli, side, 1)?[0].0,
        };
        Ok(Shape::Single { side, columns })
    }

    /// Intermediate code, before X cutting.
    pub fn intermediate(&self, target: &Target, shape: Shape) -> Result<DeformedCode> {
        match shape {
            Shape::Single { side, columns } => intermediate(&self.code, target.pauli, StretchParams { side, columns }),
            Shape::Joint { separation } => {
                let orientation = match target.pauli {
                    Pauli::X => Orientation::Horizontal,
                    Pauli::Z => Orientation::Vertical,
                };
                joint_connect(&self.code, orientation, separation)
            }
        }
    }

    /// Deformed code measuring `target`.
    pub fn measure(&self, target: &Target, shape: Shape) -> Result<Measurement> {
        let v = target.vector(&self.basis)?;
        match shape {
            Shape::Single { side, columns } => {
                measure_single(&self.code, &self.basis, target.pauli, &v, StretchParams { side, columns })
            }
            Shape::Joint { separation } => measure_joint(&self.code, &self.basis, target.pauli, &v, separation),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Single { side: Side, columns: u32 },
    Joint { separation: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceValue {
    pub value: usize,
    pub exact: bool,
}

/// Before/after painting distances of one measurement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaintReport {
    pub schema_version: u32,
    pub target: String,
    pub ancilla: usize,
    pub n: usize,
    pub d_th: usize,
    pub before: DistanceValue,
    /// `None` when painting failed.
    pub after: Option<DistanceValue>,
    pub traces: Vec<StorageTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl PaintReport {
    pub fn updates(&self) -> usize {
        self.traces.iter().map(|t| t.updates).sum()
    }
}

/// Paints the storages of `m` to `d_th` and reports the dressed distance
/// before and after.
pub fn paint_measurement(m: &Measurement, target: &Target, d_th: usize, search: &SearchConfig) -> Result<PaintReport> {
    let init = constrained_kernel_basis(&m.deformed, &m.unmeasured)?;
    let before = measurement_distance(m, &init, search)?;
    let mut report = PaintReport {
        schema_version: REPORT_SCHEMA_VERSION,
        target: target.to_string(),
        ancilla: m.intermediate_ancilla,
        n: m.deformed.n(),
        d_th,
        before: DistanceValue { value: before.value, exact: before.exact },
        after: None,
        traces: Vec::new(),
        failure: None,
    };
    match paint(&m.deformed, &init, &PaintConfig { d_th, search: *search }) {
        Ok((set, traces)) => {
            let after = measurement_distance(m, &set, search)?;
            report.after = Some(DistanceValue { value: after.value, exact: after.exact });
            report.traces = traces;
        }
        Err(e @ Error::PaintFailure { .. }) => report.failure = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    Ok(report)
}
