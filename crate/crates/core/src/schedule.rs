//! Logical-level schedules built from joint and single measurements, and a
//! small stabilizer simulator that checks them.
//!
//! A CNOT uses one helper logical prepared in `|+>`; a state transfer
//! teleports one logical onto a fresh one. Outcome-dependent Pauli
//! corrections are tracked in software.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::craft::Pauli;
use crate::error::{Error, Result};

pub const SCHEDULE_SCHEMA_VERSION: u32 = 1;

/// A logical qubit: block number and logical index inside that block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LogicalId {
    pub block: usize,
    pub index: usize,
}

impl LogicalId {
    pub fn new(block: usize, index: usize) -> LogicalId {
        LogicalId { block, index }
    }
}

impl fmt::Display for LogicalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.block, self.index)
    }
}

impl FromStr for LogicalId {
    type Err = Error;

    /// Parses `block.index`.
    fn from_str(s: &str) -> Result<LogicalId> {
        let bad = || Error::Config(format!("logical id `{s}` is not of the form block.index"));
        let (b, i) = s.trim().split_once('.').ok_or_else(bad)?;
        Ok(LogicalId {
            block: b.parse().map_err(|_| bad())?,
            index: i.parse().map_err(|_| bad())?,
        })
    }
}

/// A deformed code available in a session, measuring the product of one
/// Pauli type over its operands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementCode {
    pub operands: Vec<LogicalId>,
    pub pauli: Pauli,
    /// Measurement rounds, normally the painted distance of the code.
    pub rounds: usize,
}

/// The deformed codes a planner may use.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub schema_version: u32,
    pub codes: Vec<MeasurementCode>,
}

impl Network {
    pub fn from_json(s: &str) -> Result<Network> {
        let net: Network = serde_json::from_str(s)?;
        if net.schema_version != SCHEDULE_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported network schema_version {}",
                net.schema_version
            )));
        }
        if let Some(c) = net.codes.iter().find(|c| c.rounds == 0 || c.operands.is_empty()) {
            return Err(Error::Config(format!(
                "measurement code on {:?} needs operands and at least one round",
                c.operands
            )));
        }
        Ok(net)
    }

    fn find(&self, operands: &[LogicalId], pauli: Pauli) -> Option<usize> {
        let want: BTreeSet<_> = operands.iter().collect();
        self.codes.iter().position(|c| {
            c.pauli == pauli && c.operands.len() == want.len() && c.operands.iter().collect::<BTreeSet<_>>() == want
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    /// Prepare an eigenstate of `basis` with eigenvalue +1.
    Init,
    JointMeasure,
    SingleMeasure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub operation: Operation,
    pub operands: Vec<LogicalId>,
    pub basis: Pauli,
    pub rounds: usize,
    /// Index into the network's codes for measurement steps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<usize>,
}

/// Apply `pauli` on `qubit` when the parity of the outcomes of `steps` is 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameRule {
    pub qubit: LogicalId,
    pub pauli: Pauli,
    pub steps: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanRequest {
    Cnot { control: LogicalId, target: LogicalId, ancilla: LogicalId },
    Transfer { source: LogicalId, target: LogicalId },
    Measure { qubit: LogicalId, pauli: Pauli },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub schema_version: u32,
    pub request: PlanRequest,
    pub steps: Vec<Step>,
    pub corrections: Vec<FrameRule>,
}

struct Planner<'a> {
    net: &'a Network,
    steps: Vec<Step>,
    gaps: Vec<String>,
}

impl Planner<'_> {
    fn init(&mut self, q: LogicalId, basis: Pauli) -> usize {
        self.steps.push(Step { operation: Operation::Init, operands: vec![q], basis, rounds: 1, code: None });
        self.steps.len() - 1
    }

    fn measure(&mut self, operands: Vec<LogicalId>, basis: Pauli) -> usize {
        let code = self.net.find(&operands, basis);
        if code.is_none() {
            let names: Vec<String> = operands.iter().map(|q| format!("{basis:?}{q}")).collect();
            self.gaps.push(names.join("*"));
        }
        let operation = if operands.len() == 1 { Operation::SingleMeasure } else { Operation::JointMeasure };
        let rounds = code.map_or(1, |c| self.net.codes[c].rounds);
        self.steps.push(Step { operation, operands, basis, rounds, code });
        self.steps.len() - 1
    }
}

/// Plans a schedule, failing with the list of missing measurement codes if
/// the network cannot support it.
pub fn plan(net: &Network, request: &PlanRequest) -> Result<Schedule> {
    let mut p = Planner { net, steps: Vec::new(), gaps: Vec::new() };
    let distinct = |qs: &[LogicalId]| qs.iter().collect::<BTreeSet<_>>().len() == qs.len();
    let corrections = match *request {
        PlanRequest::Cnot { control, target, ancilla } => {
            if !distinct(&[control, target, ancilla]) {
                return Err(Error::Schedule("control, target and ancilla must differ".into()));
            }
            p.init(ancilla, Pauli::X);
            let m1 = p.measure(vec![control, ancilla], Pauli::Z);
            let m2 = p.measure(vec![ancilla, target], Pauli::X);
            let m3 = p.measure(vec![ancilla], Pauli::Z);
            vec![
                FrameRule { qubit: control, pauli: Pauli::Z, steps: vec![m2] },
                FrameRule { qubit: target, pauli: Pauli::X, steps: vec![m1, m3] },
            ]
        }
        PlanRequest::Transfer { source, target } => {
            if source == target {
                return Err(Error::Schedule("source and target must differ".into()));
            }
            p.init(target, Pauli::X);
            let m1 = p.measure(vec![source, target], Pauli::Z);
            let m2 = p.measure(vec![source], Pauli::X);
            vec![
                FrameRule { qubit: target, pauli: Pauli::X, steps: vec![m1] },
                FrameRule { qubit: target, pauli: Pauli::Z, steps: vec![m2] },
            ]
        }
        PlanRequest::Measure { qubit, pauli } => {
            p.measure(vec![qubit], pauli);
            Vec::new()
        }
    };
    if !p.gaps.is_empty() {
        return Err(Error::Schedule(format!("no deformed code measures {}", p.gaps.join(", "))));
    }
    Ok(Schedule { schema_version: SCHEDULE_SCHEMA_VERSION, request: request.clone(), steps: p.steps, corrections })
}

/// Pauli operator `i^phase * prod X^x * prod Z^z` on at most 8 qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliOp {
    pub x: u8,
    pub z: u8,
    pub phase: u8,
}

impl PauliOp {
    pub const IDENTITY: PauliOp = PauliOp { x: 0, z: 0, phase: 0 };

    pub fn single(q: usize, p: Pauli) -> PauliOp {
        match p {
            Pauli::X => PauliOp { x: 1 << q, z: 0, phase: 0 },
            Pauli::Z => PauliOp { x: 0, z: 1 << q, phase: 0 },
        }
    }

    /// Hermitian Pauli from a letter per qubit, `I`, `X`, `Y` or `Z`.
    pub fn from_letters(s: &str) -> PauliOp {
        s.chars().enumerate().fold(PauliOp::IDENTITY, |acc, (q, c)| {
            let f = match c {
                'X' => PauliOp::single(q, Pauli::X),
                'Z' => PauliOp::single(q, Pauli::Z),
                'Y' => PauliOp { x: 1 << q, z: 1 << q, phase: 1 },
                _ => PauliOp::IDENTITY,
            };
            acc.mul(f)
        })
    }

    pub fn mul(self, o: PauliOp) -> PauliOp {
        let swap = (self.z & o.x).count_ones() as u8;
        PauliOp { x: self.x ^ o.x, z: self.z ^ o.z, phase: (self.phase + o.phase + 2 * swap) % 4 }
    }

    pub fn negate(self) -> PauliOp {
        PauliOp { phase: (self.phase + 2) % 4, ..self }
    }

    pub fn commutes(self, o: PauliOp) -> bool {
        ((self.x & o.z) ^ (self.z & o.x)).count_ones() % 2 == 0
    }

    fn support(self) -> u8 {
        self.x | self.z
    }

    /// Moves qubit `from[i]` to position `i`; other qubits must be idle.
    fn relabel(self, from: &[usize]) -> PauliOp {
        let mut out = PauliOp { phase: self.phase, ..PauliOp::IDENTITY };
        for (i, &q) in from.iter().enumerate() {
            out.x |= ((self.x >> q) & 1) << i;
            out.z |= ((self.z >> q) & 1) << i;
        }
        out
    }

    /// Moves position `i` to qubit `to[i]`.
    fn relabel_inverse(self, to: &[usize]) -> PauliOp {
        let mut out = PauliOp { phase: self.phase, ..PauliOp::IDENTITY };
        for (i, &q) in to.iter().enumerate() {
            out.x |= ((self.x >> i) & 1) << q;
            out.z |= ((self.z >> i) & 1) << q;
        }
        out
    }

    /// Image under the Clifford sending `X_q`, `Z_q` to `images[q]`.
    fn conjugate(self, images: &[(PauliOp, PauliOp)]) -> PauliOp {
        let mut out = PauliOp { phase: self.phase, ..PauliOp::IDENTITY };
        for (q, im) in images.iter().enumerate() {
            if self.x >> q & 1 == 1 {
                out = out.mul(im.0);
            }
        }
        for (q, im) in images.iter().enumerate() {
            if self.z >> q & 1 == 1 {
                out = out.mul(im.1);
            }
        }
        out
    }
}

/// Result of checking a schedule against its intended logical action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub qubits: usize,
    pub pauli_inputs: usize,
    pub outcome_branches: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<String>,
}

/// Heisenberg-picture check of a schedule: every Pauli on the inputs,
/// carried through the measurements and the frame corrections, must equal
/// its image under the intended gate, for every outcome branch.
pub fn verify(schedule: &Schedule) -> Result<OracleReport> {
    let mut qubits: Vec<LogicalId> = Vec::new();
    for s in &schedule.steps {
        for q in &s.operands {
            if !qubits.contains(q) {
                qubits.push(*q);
            }
        }
    }
    if qubits.len() > 8 {
        return Err(Error::Schedule("oracle supports at most 8 logical qubits".into()));
    }
    let at = |q: LogicalId| qubits.iter().position(|&r| r == q).unwrap();
    let x = |q| PauliOp::single(at(q), Pauli::X);
    let z = |q| PauliOp::single(at(q), Pauli::Z);
    // inputs, outputs, and images of the input X and Z on the outputs
    let (inputs, outputs, images): (Vec<LogicalId>, Vec<LogicalId>, Vec<(PauliOp, PauliOp)>) = match schedule.request {
        PlanRequest::Cnot { control, target, .. } => (
            vec![control, target],
            vec![control, target],
            vec![(x(control).mul(x(target)), z(control)), (x(target), z(control).mul(z(target)))],
        ),
        PlanRequest::Transfer { source, target } => (vec![source], vec![target], vec![(x(target), z(target))]),
        PlanRequest::Measure { .. } => {
            return Ok(OracleReport { qubits: qubits.len(), pauli_inputs: 0, outcome_branches: 0, passed: true, mismatch: None })
        }
    };
    let measurements: Vec<usize> = (0..schedule.steps.len()).filter(|&i| schedule.steps[i].operation != Operation::Init).collect();
    let in_pos: Vec<usize> = inputs.iter().map(|&q| at(q)).collect();
    let out_pos: Vec<usize> = outputs.iter().map(|&q| at(q)).collect();
    let out_mask: u8 = out_pos.iter().map(|&q| 1u8 << q).sum();
    let letters = ['I', 'X', 'Y', 'Z'];
    let pauli_inputs = 4usize.pow(inputs.len() as u32);
    let op_of = |s: &Step| s.operands.iter().fold(PauliOp::IDENTITY, |acc, &q| acc.mul(PauliOp::single(at(q), s.basis)));

    for branch in 0..1u32 << measurements.len() {
        let outcome = |step: usize| measurements.iter().position(|&m| m == step).is_some_and(|k| branch >> k & 1 == 1);
        for code in 0..pauli_inputs {
            let word: String = (0..inputs.len()).map(|i| letters[code / 4usize.pow(i as u32) % 4]).collect();
            let input = PauliOp::from_letters(&word).relabel_inverse(&in_pos);
            let mut logical = input;
            let mut stabs: Vec<PauliOp> = Vec::new();
            for (i, s) in schedule.steps.iter().enumerate() {
                let m = op_of(s);
                if s.operation == Operation::Init {
                    stabs.push(m);
                    continue;
                }
                let Some(k) = stabs.iter().position(|t| !t.commutes(m)) else {
                    return Err(Error::Schedule(format!("step {i} measures a deterministic or logical operator")));
                };
                let pivot = stabs[k];
                if !logical.commutes(m) {
                    logical = logical.mul(pivot);
                }
                for (j, t) in stabs.iter_mut().enumerate() {
                    if j != k && !t.commutes(m) {
                        *t = t.mul(pivot);
                    }
                }
                stabs[k] = if outcome(i) { m.negate() } else { m };
            }
            // strip the measured qubits using the stabilizer group
            let reduced = (0..1u32 << stabs.len())
                .map(|sub| {
                    (0..stabs.len()).filter(|j| sub >> j & 1 == 1).fold(logical, |acc, j| acc.mul(stabs[j]))
                })
                .find(|p| p.support() & !out_mask == 0)
                .ok_or_else(|| Error::Schedule(format!("input {word} does not reach the outputs")))?;
            let mut corrected = reduced;
            for r in &schedule.corrections {
                if r.steps.iter().filter(|&&s| outcome(s)).count() % 2 == 1 && !corrected.commutes(PauliOp::single(at(r.qubit), r.pauli)) {
                    corrected = corrected.negate();
                }
            }
            let got = corrected.relabel(&out_pos);
            let want = PauliOp::from_letters(&word).conjugate(&images).relabel(&out_pos);
            if got != want {
                return Ok(OracleReport {
                    qubits: qubits.len(),
                    pauli_inputs,
                    outcome_branches: 1 << measurements.len(),
                    passed: false,
                    mismatch: Some(format!("input {word}, outcomes {branch:b}: got {got:?}, want {want:?}")),
                });
            }
        }
    }
    Ok(OracleReport {
        qubits: qubits.len(),
        pauli_inputs,
        outcome_branches: 1 << measurements.len(),
        passed: true,
        mismatch: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(b: usize, i: usize) -> LogicalId {
        LogicalId::new(b, i)
    }

    fn net(codes: &[(&[LogicalId], Pauli)]) -> Network {
        Network {
            schema_version: SCHEDULE_SCHEMA_VERSION,
            codes: codes.iter().map(|(o, p)| MeasurementCode { operands: o.to_vec(), pauli: *p, rounds: 4 }).collect(),
        }
    }

    fn cnot_net() -> Network {
        net(&[(&[q(0, 0), q(1, 0)], Pauli::Z), (&[q(1, 0), q(2, 0)], Pauli::X), (&[q(1, 0)], Pauli::Z)])
    }

    #[test]
    fn cnot_passes_oracle() {
        let req = PlanRequest::Cnot { control: q(0, 0), target: q(2, 0), ancilla: q(1, 0) };
        let s = plan(&cnot_net(), &req).unwrap();
        assert_eq!(s.steps.len(), 4);
        assert!(s.steps.iter().all(|st| st.rounds >= 1));
        let r = verify(&s).unwrap();
        assert!(r.passed, "{:?}", r.mismatch);
        assert_eq!((r.pauli_inputs, r.outcome_branches), (16, 8));
    }

    #[test]
    fn transfer_passes_oracle() {
        let n = net(&[(&[q(0, 0), q(0, 1)], Pauli::Z), (&[q(0, 0)], Pauli::X)]);
        let s = plan(&n, &PlanRequest::Transfer { source: q(0, 0), target: q(0, 1) }).unwrap();
        assert_eq!(s.steps.len(), 3);
        let r = verify(&s).unwrap();
        assert!(r.passed, "{:?}", r.mismatch);
        assert_eq!(r.pauli_inputs, 4);
    }

    #[test]
    fn wrong_frame_rule_is_caught() {
        let req = PlanRequest::Cnot { control: q(0, 0), target: q(2, 0), ancilla: q(1, 0) };
        let mut s = plan(&cnot_net(), &req).unwrap();
        s.corrections[1].steps = vec![1];
        assert!(!verify(&s).unwrap().passed);
        s.corrections.clear();
        assert!(!verify(&s).unwrap().passed);
    }

    #[test]
    fn missing_codes_are_listed() {
        let n = net(&[(&[q(1, 0), q(2, 0)], Pauli::X)]);
        let req = PlanRequest::Cnot { control: q(0, 0), target: q(2, 0), ancilla: q(1, 0) };
        let msg = plan(&n, &req).unwrap_err().to_string();
        assert!(msg.contains("Z0.0*Z1.0") && msg.contains("Z1.0"), "{msg}");
    }

    #[test]
    fn measure_is_single_step_with_code_rounds() {
        let n = net(&[(&[q(0, 3)], Pauli::X)]);
        let s = plan(&n, &PlanRequest::Measure { qubit: q(0, 3), pauli: Pauli::X }).unwrap();
        assert_eq!(s.steps.len(), 1);
        assert_eq!((s.steps[0].operation, s.steps[0].rounds, s.steps[0].code), (Operation::SingleMeasure, 4, Some(0)));
    }

    #[test]
    fn plans_are_deterministic_and_round_trip() {
        let req = PlanRequest::Cnot { control: q(0, 0), target: q(2, 0), ancilla: q(1, 0) };
        let a = plan(&cnot_net(), &req).unwrap();
        assert_eq!(a, plan(&cnot_net(), &req).unwrap());
        let back: Schedule = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn pauli_products_follow_the_algebra() {
        let y = PauliOp::from_letters("Y");
        assert_eq!(y.mul(y), PauliOp::IDENTITY);
        let xz = PauliOp::from_letters("X").mul(PauliOp::from_letters("Z"));
        let zx = PauliOp::from_letters("Z").mul(PauliOp::from_letters("X"));
        assert_eq!(xz, zx.negate());
        assert!(PauliOp::from_letters("XX").commutes(PauliOp::from_letters("ZZ")));
        assert_eq!("3.7".parse::<LogicalId>().unwrap(), q(3, 7));
        assert!("3".parse::<LogicalId>().is_err());
    }
}
