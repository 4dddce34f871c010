// Copyright 2026 The Pauliforge Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Circuit intermediate representation.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use thiserror::Error;

use crate::clifford::Clifford1;
use crate::pauli::Pauli;

pub type QubitId = usize;
pub type Cbit = usize;

/// What a qubit is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Data,
    Ancilla,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qubit {
    pub id: QubitId,
    pub role: Role,
    pub pos: usize,
}

/// An affine GF(2) expression over classical bits: the XOR of `bits`,
/// complemented when `flip` is set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parity {
    bits: Vec<Cbit>,
    flip: bool,
}

impl Parity {
    pub fn zero() -> Parity {
        Parity::default()
    }

    pub fn one() -> Parity {
        Parity { bits: Vec::new(), flip: true }
    }

    pub fn bit(b: Cbit) -> Parity {
        Parity { bits: vec![b], flip: false }
    }

    /// XOR of the given bits; repeated bits cancel.
    pub fn of_bits<I: IntoIterator<Item = Cbit>>(bits: I) -> Parity {
        let mut p = Parity::zero();
        for b in bits {
            p.toggle(b);
        }
        p
    }

    pub fn bits(&self) -> &[Cbit] {
        &self.bits
    }

    pub fn flip(&self) -> bool {
        self.flip
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_empty() && !self.flip
    }

    pub fn contains(&self, b: Cbit) -> bool {
        self.bits.binary_search(&b).is_ok()
    }

    pub fn toggle(&mut self, b: Cbit) {
        match self.bits.binary_search(&b) {
            Ok(i) => {
                self.bits.remove(i);
            }
            Err(i) => self.bits.insert(i, b),
        }
    }

    pub fn negated(&self) -> Parity {
        Parity { bits: self.bits.clone(), flip: !self.flip }
    }

    pub fn xor(&self, other: &Parity) -> Parity {
        let mut bits = Vec::with_capacity(self.bits.len() + other.bits.len());
        let (mut i, mut j) = (0, 0);
        while i < self.bits.len() && j < other.bits.len() {
            match self.bits[i].cmp(&other.bits[j]) {
                std::cmp::Ordering::Less => {
                    bits.push(self.bits[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    bits.push(other.bits[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        bits.extend_from_slice(&self.bits[i..]);
        bits.extend_from_slice(&other.bits[j..]);
        Parity { bits, flip: self.flip ^ other.flip }
    }

    /// Replaces bit `b` by the expression `with`.
    pub fn substitute(&self, b: Cbit, with: &Parity) -> Parity {
        if !self.contains(b) {
            return self.clone();
        }
        let mut rest = self.clone();
        rest.toggle(b);
        rest.xor(with)
    }

    /// Evaluates with `value(bit)`.
    pub fn eval(&self, value: impl Fn(Cbit) -> bool) -> bool {
        self.bits.iter().fold(self.flip, |acc, &b| acc ^ value(b))
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return write!(f, "{}", self.flip as u8);
        }
        if self.flip {
            write!(f, "!")?;
        }
        let parts: Vec<String> = self.bits.iter().map(|b| format!("c{b}")).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// Instruction opcodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    /// Prepare |0>.
    PrepZ,
    /// Prepare |+>.
    PrepX,
    /// Prepare `Rz(angle)|+>`.
    PrepTheta,
    Clifford1Q,
    /// `Rz(angle) = diag(e^{-i angle/2}, e^{i angle/2})`.
    Rz,
    CNOT,
    MeasX,
    MeasZ,
    MeasXX,
    MeasZZ,
    /// Non-destructive X measurement.
    OvalX,
    /// Non-destructive Z measurement.
    OvalZ,
    CorrPauli,
    /// `exp(-i angle Z)` when the condition holds; `angle` is the corrective 2θ.
    CorrRz2Theta,
    /// `exp(i angle Z...Z)` over all operands. Intermediate node.
    ExpZString,
    /// Non-destructive `Z...Z` parity measurement. Intermediate node.
    MeasZString,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::PrepZ => "PrepZ",
            Op::PrepX => "PrepX",
            Op::PrepTheta => "PrepTheta",
            Op::Clifford1Q => "Clifford1Q",
            Op::Rz => "Rz",
            Op::CNOT => "CNOT",
            Op::MeasX => "MeasX",
            Op::MeasZ => "MeasZ",
            Op::MeasXX => "MeasXX",
            Op::MeasZZ => "MeasZZ",
            Op::OvalX => "OvalX",
            Op::OvalZ => "OvalZ",
            Op::CorrPauli => "CorrPauli",
            Op::CorrRz2Theta => "CorrRz2Theta",
            Op::ExpZString => "ExpZString",
            Op::MeasZString => "MeasZString",
        }
    }

    pub fn is_measurement(self) -> bool {
        matches!(
            self,
            Op::MeasX | Op::MeasZ | Op::MeasXX | Op::MeasZZ | Op::OvalX | Op::OvalZ | Op::MeasZString
        )
    }

    /// Measurements that consume their qubit.
    pub fn is_destructive(self) -> bool {
        matches!(self, Op::MeasX | Op::MeasZ)
    }

    pub fn is_prep(self) -> bool {
        matches!(self, Op::PrepZ | Op::PrepX | Op::PrepTheta)
    }

    pub fn is_correction(self) -> bool {
        matches!(self, Op::CorrPauli | Op::CorrRz2Theta)
    }

    pub fn is_two_body(self) -> bool {
        matches!(self, Op::MeasXX | Op::MeasZZ)
    }

    pub fn is_node(self) -> bool {
        matches!(self, Op::ExpZString | Op::MeasZString)
    }

    fn needs_angle(self) -> bool {
        matches!(self, Op::PrepTheta | Op::Rz | Op::CorrRz2Theta | Op::ExpZString)
    }

    /// Allowed operand count range.
    fn arity(self) -> (usize, usize) {
        match self {
            Op::CNOT | Op::MeasXX | Op::MeasZZ => (2, 2),
            Op::ExpZString => (1, usize::MAX),
            Op::MeasZString => (2, usize::MAX),
            _ => (1, 1),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One circuit instruction. Opcode-specific fields are `None` when unused.
#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub op: Op,
    pub qubits: Vec<QubitId>,
    pub cbit: Option<Cbit>,
    pub angle: Option<f64>,
    pub cond: Option<Parity>,
    pub clifford: Option<Clifford1>,
    pub pauli: Option<Pauli>,
}

impl Instruction {
    fn bare(op: Op, qubits: Vec<QubitId>) -> Instruction {
        Instruction { op, qubits, cbit: None, angle: None, cond: None, clifford: None, pauli: None }
    }

    fn measured(op: Op, qubits: Vec<QubitId>, b: Cbit) -> Instruction {
        Instruction { cbit: Some(b), ..Self::bare(op, qubits) }
    }

    pub fn prep_z(q: QubitId) -> Instruction {
        Self::bare(Op::PrepZ, vec![q])
    }

    pub fn prep_x(q: QubitId) -> Instruction {
        Self::bare(Op::PrepX, vec![q])
    }

    /// `Rz(phi)|+>`.
    pub fn prep_theta(q: QubitId, phi: f64) -> Instruction {
        Instruction { angle: Some(phi), ..Self::bare(Op::PrepTheta, vec![q]) }
    }

    pub fn clifford(q: QubitId, c: Clifford1) -> Instruction {
        Instruction { clifford: Some(c), ..Self::bare(Op::Clifford1Q, vec![q]) }
    }

    pub fn rz(q: QubitId, phi: f64) -> Instruction {
        Instruction { angle: Some(phi), ..Self::bare(Op::Rz, vec![q]) }
    }

    pub fn cnot(control: QubitId, target: QubitId) -> Instruction {
        Self::bare(Op::CNOT, vec![control, target])
    }

    pub fn meas_x(q: QubitId, b: Cbit) -> Instruction {
        Self::measured(Op::MeasX, vec![q], b)
    }

    pub fn meas_z(q: QubitId, b: Cbit) -> Instruction {
        Self::measured(Op::MeasZ, vec![q], b)
    }

    pub fn meas_xx(a: QubitId, c: QubitId, b: Cbit) -> Instruction {
        Self::measured(Op::MeasXX, vec![a, c], b)
    }

    pub fn meas_zz(a: QubitId, c: QubitId, b: Cbit) -> Instruction {
        Self::measured(Op::MeasZZ, vec![a, c], b)
    }

    pub fn oval_x(q: QubitId, b: Cbit) -> Instruction {
        Self::measured(Op::OvalX, vec![q], b)
    }

    pub fn oval_z(q: QubitId, b: Cbit) -> Instruction {
        Self::measured(Op::OvalZ, vec![q], b)
    }

    pub fn corr_pauli(q: QubitId, p: Pauli, cond: Parity) -> Instruction {
        Instruction { pauli: Some(p), cond: Some(cond), ..Self::bare(Op::CorrPauli, vec![q]) }
    }

    /// Applies `exp(-i angle Z)` on `q` when `cond` holds.
    pub fn corr_rz2theta(q: QubitId, angle: f64, cond: Parity) -> Instruction {
        Instruction { angle: Some(angle), cond: Some(cond), ..Self::bare(Op::CorrRz2Theta, vec![q]) }
    }

    pub fn exp_z_string(qubits: Vec<QubitId>, theta: f64) -> Instruction {
        Instruction { angle: Some(theta), ..Self::bare(Op::ExpZString, qubits) }
    }

    pub fn meas_z_string(qubits: Vec<QubitId>, b: Cbit) -> Instruction {
        Self::measured(Op::MeasZString, qubits, b)
    }

    pub fn touches(&self, q: QubitId) -> bool {
        self.qubits.contains(&q)
    }

    pub fn shares_qubit(&self, other: &Instruction) -> bool {
        self.qubits.iter().any(|q| other.touches(*q))
    }

    /// The Pauli operator a measurement projects onto, as `(qubit, letter)` pairs.
    pub fn measured_pauli(&self) -> Option<Vec<(QubitId, Pauli)>> {
        let letter = match self.op {
            Op::MeasX | Op::MeasXX | Op::OvalX => Pauli::X,
            Op::MeasZ | Op::MeasZZ | Op::OvalZ | Op::MeasZString => Pauli::Z,
            _ => return None,
        };
        Some(self.qubits.iter().map(|&q| (q, letter)).collect())
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.op)?;
        if let Some(p) = self.pauli {
            write!(f, " {p}")?;
        }
        if let Some(c) = self.clifford {
            write!(f, " {c}")?;
        }
        for q in &self.qubits {
            write!(f, " q{q}")?;
        }
        if let Some(a) = self.angle {
            write!(f, " ({a})")?;
        }
        if let Some(b) = self.cbit {
            write!(f, " -> c{b}")?;
        }
        if let Some(c) = &self.cond {
            write!(f, " if {c}")?;
        }
        Ok(())
    }
}

/// Structural problems with a circuit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("instruction {index}: unknown qubit {qubit}")]
    UnknownQubit { index: usize, qubit: QubitId },
    #[error("instruction {index}: {op} takes {min}..={max} qubits, got {got}")]
    Arity { index: usize, op: Op, min: usize, max: usize, got: usize },
    #[error("instruction {index}: repeated operand qubit")]
    RepeatedQubit { index: usize },
    #[error("instruction {index}: missing field {field}")]
    MissingField { index: usize, field: &'static str },
    #[error("instruction {index}: unexpected field {field}")]
    UnexpectedField { index: usize, field: &'static str },
    #[error("instruction {index}: classical bit {cbit} out of range")]
    CbitOutOfRange { index: usize, cbit: Cbit },
    #[error("instruction {index}: classical bit {cbit} assigned twice")]
    DuplicateCbit { index: usize, cbit: Cbit },
    #[error("instruction {index}: condition reads c{cbit} before it is assigned")]
    UndefinedCondition { index: usize, cbit: Cbit },
    #[error("instruction {index}: non-finite angle")]
    BadAngle { index: usize },
    #[error("qubit roster entry {index} has id {id}")]
    RosterId { index: usize, id: QubitId },
    #[error("json: {0}")]
    Json(String),
}

/// An ordered instruction sequence over a roster of qubits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub(crate) qubits: Vec<Qubit>,
    pub(crate) instructions: Vec<Instruction>,
    pub(crate) cbits: usize,
}

impl Circuit {
    pub fn new() -> Circuit {
        Circuit::default()
    }

    /// `n` data qubits at positions `0..n`.
    pub fn with_data(n: usize) -> Circuit {
        let mut c = Circuit::new();
        for i in 0..n {
            c.add_qubit(Role::Data, i);
        }
        c
    }

    pub fn add_qubit(&mut self, role: Role, pos: usize) -> QubitId {
        let id = self.qubits.len();
        self.qubits.push(Qubit { id, role, pos });
        id
    }

    /// Next unused position at the right end of the line.
    pub fn next_pos(&self) -> usize {
        self.qubits.iter().map(|q| q.pos + 1).max().unwrap_or(0)
    }

    pub fn alloc_cbit(&mut self) -> Cbit {
        self.cbits += 1;
        self.cbits - 1
    }

    pub fn push(&mut self, i: Instruction) {
        self.instructions.push(i);
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn qubit(&self, id: QubitId) -> &Qubit {
        &self.qubits[id]
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn cbits(&self) -> usize {
        self.cbits
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn data_qubits(&self) -> Vec<QubitId> {
        self.qubits.iter().filter(|q| q.role == Role::Data).map(|q| q.id).collect()
    }

    pub fn qubits_with_role(&self, role: Role) -> Vec<QubitId> {
        self.qubits.iter().filter(|q| q.role == role).map(|q| q.id).collect()
    }

    /// Start of the maximal suffix of `CorrPauli` instructions.
    pub fn trailing_block_start(&self) -> usize {
        let mut i = self.instructions.len();
        while i > 0 && self.instructions[i - 1].op == Op::CorrPauli {
            i -= 1;
        }
        i
    }

    /// Index of the next instruction at or after `from` touching `q`.
    pub fn next_on(&self, q: QubitId, from: usize) -> Option<usize> {
        (from..self.instructions.len()).find(|&i| self.instructions[i].touches(q))
    }

    /// Index of the last instruction before `before` touching `q`.
    pub fn prev_on(&self, q: QubitId, before: usize) -> Option<usize> {
        (0..before.min(self.instructions.len())).rev().find(|&i| self.instructions[i].touches(q))
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), CircuitError> {
        for (index, q) in self.qubits.iter().enumerate() {
            if q.id != index {
                return Err(CircuitError::RosterId { index, id: q.id });
            }
        }
        let mut assigned = vec![false; self.cbits];
        for (index, ins) in self.instructions.iter().enumerate() {
            let (min, max) = ins.op.arity();
            let got = ins.qubits.len();
            if got < min || got > max {
                return Err(CircuitError::Arity { index, op: ins.op, min, max, got });
            }
            let mut seen = BTreeSet::new();
            for &q in &ins.qubits {
                if q >= self.qubits.len() {
                    return Err(CircuitError::UnknownQubit { index, qubit: q });
                }
                if !seen.insert(q) {
                    return Err(CircuitError::RepeatedQubit { index });
                }
            }
            let field = |present: bool, wanted: bool, field: &'static str| match (present, wanted) {
                (false, true) => Err(CircuitError::MissingField { index, field }),
                (true, false) => Err(CircuitError::UnexpectedField { index, field }),
                _ => Ok(()),
            };
            field(ins.angle.is_some(), ins.op.needs_angle(), "angle")?;
            field(ins.cbit.is_some(), ins.op.is_measurement(), "cbit")?;
            field(ins.cond.is_some(), ins.op.is_correction(), "cond")?;
            field(ins.clifford.is_some(), ins.op == Op::Clifford1Q, "clifford")?;
            field(ins.pauli.is_some(), ins.op == Op::CorrPauli, "pauli")?;
            if matches!(ins.angle, Some(a) if !a.is_finite()) {
                return Err(CircuitError::BadAngle { index });
            }
            if let Some(c) = &ins.cond {
                if let Some(&cbit) = c.bits().iter().find(|&&b| b >= self.cbits || !assigned[b]) {
                    return Err(CircuitError::UndefinedCondition { index, cbit });
                }
            }
            if let Some(cbit) = ins.cbit {
                if cbit >= self.cbits {
                    return Err(CircuitError::CbitOutOfRange { index, cbit });
                }
                if assigned[cbit] {
                    return Err(CircuitError::DuplicateCbit { index, cbit });
                }
                assigned[cbit] = true;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitJson::from(self)).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> Result<Circuit, CircuitError> {
        let j: CircuitJson = serde_json::from_str(text).map_err(|e| CircuitError::Json(e.to_string()))?;
        let c = j.into_circuit()?;
        c.validate()?;
        Ok(c)
    }

    /// One instruction per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for q in &self.qubits {
            s.push_str(&format!("# q{} {:?} pos {}\n", q.id, q.role, q.pos));
        }
        for (i, ins) in self.instructions.iter().enumerate() {
            s.push_str(&format!("{i:4}  {ins}\n"));
        }
        s
    }
}

fn ser_angle<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => {
            let raw = RawValue::from_string(format!("{x:.16e}")).map_err(S::Error::custom)?;
            raw.serialize(s)
        }
        None => s.serialize_none(),
    }
}

fn de_clifford<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u8>, D::Error> {
    let v: Option<u8> = Option::deserialize(d)?;
    match v {
        Some(id) if id >= 24 => Err(D::Error::custom(format!("clifford id {id} out of range"))),
        other => Ok(other),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstructionJson {
    op: Op,
    qubits: Vec<QubitId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cbit: Option<Cbit>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "ser_angle")]
    angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cond: Option<Parity>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "de_clifford")]
    clifford: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pauli: Option<Pauli>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitJson {
    qubits: Vec<Qubit>,
    cbits: usize,
    instructions: Vec<InstructionJson>,
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        CircuitJson {
            qubits: c.qubits.clone(),
            cbits: c.cbits,
            instructions: c
                .instructions
                .iter()
                .map(|i| InstructionJson {
                    op: i.op,
                    qubits: i.qubits.clone(),
                    cbit: i.cbit,
                    angle: i.angle,
                    cond: i.cond.clone(),
                    clifford: i.clifford.map(|c| c.id()),
                    pauli: i.pauli,
                })
                .collect(),
        }
    }
}

impl CircuitJson {
    fn into_circuit(self) -> Result<Circuit, CircuitError> {
        let instructions = self
            .instructions
            .into_iter()
            .map(|i| {
                let mut cond = i.cond;
                if let Some(c) = &mut cond {
                    // Normalise: sorted, repeated bits cancel.
                    *c = Parity::of_bits(c.bits.iter().copied()).xor(&if c.flip { Parity::one() } else { Parity::zero() });
                }
                Instruction {
                    op: i.op,
                    qubits: i.qubits,
                    cbit: i.cbit,
                    angle: i.angle,
                    cond,
                    clifford: i.clifford.and_then(Clifford1::from_id),
                    pauli: i.pauli,
                }
            })
            .collect();
        Ok(Circuit { qubits: self.qubits, instructions, cbits: self.cbits })
    }
}
