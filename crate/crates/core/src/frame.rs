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

//! Pauli-frame bookkeeping and the frozen byproduct tables.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ir::{Cbit, Circuit, Instruction, Op, QubitId};
use crate::pauli::Pauli;

/// Operand role inside a CNOT replacement pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Control,
    Target,
}

/// Byproducts of a lattice-surgery CNOT pattern: entry `k` lists the Paulis
/// left behind when the pattern's `k`-th measurement returns bit 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LsTable {
    pub byproducts: [Vec<(Slot, Pauli)>; 3],
}

/// Byproduct tables used by the rewrite rules.
///
/// The values were found by exhaustive Pauli search over every outcome branch
/// and are checked against that search in the verifier's tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleTables {
    /// PrepZ(a), MeasXX(a,t), MeasZZ(c,a), MeasX(a).
    pub ls1: LsTable,
    /// PrepX(a), MeasZZ(c,a), MeasXX(a,t), MeasZ(a).
    pub ls2: LsTable,
    /// Flip left on q when MeasX;PrepX becomes OvalX.
    pub oval_x: Pauli,
    /// Flip left on q when MeasZ;PrepZ becomes OvalZ.
    pub oval_z: Pauli,
    /// Pauli applied to every string qubit when the θ ancilla reads out 1.
    pub rot_readout: Pauli,
    /// Whether a -1 parity between string and θ ancilla demands the 2θ rotation.
    pub rot_parity_2theta: bool,
}

impl RuleTables {
    pub fn frozen() -> RuleTables {
        use Slot::*;
        RuleTables {
            ls1: LsTable {
                byproducts: [vec![(Control, Pauli::Z)], vec![(Target, Pauli::X)], vec![(Control, Pauli::Z)]],
            },
            ls2: LsTable {
                byproducts: [vec![(Target, Pauli::X)], vec![(Control, Pauli::Z)], vec![(Target, Pauli::X)]],
            },
            oval_x: Pauli::Z,
            oval_z: Pauli::X,
            rot_readout: Pauli::Z,
            rot_parity_2theta: true,
        }
    }
}

impl Default for RuleTables {
    fn default() -> Self {
        RuleTables::frozen()
    }
}

/// What a single outcome bit toggles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Byproduct {
    pub paulis: Vec<(QubitId, Pauli)>,
    pub rot_2theta: bool,
}

/// Per-circuit table obtained by transposing the correction conditions:
/// for each classical bit, the corrections it toggles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorrectionTable {
    pub constant: Byproduct,
    pub by_bit: BTreeMap<Cbit, Byproduct>,
}

impl CorrectionTable {
    pub fn from_circuit(c: &Circuit) -> CorrectionTable {
        let mut t = CorrectionTable::default();
        for ins in c.instructions() {
            let Some(cond) = &ins.cond else { continue };
            let add = |b: &mut Byproduct| match ins.op {
                Op::CorrPauli => b.paulis.push((ins.qubits[0], ins.pauli.unwrap_or(Pauli::I))),
                _ => b.rot_2theta ^= true,
            };
            if cond.flip() {
                add(&mut t.constant);
            }
            for &bit in cond.bits() {
                add(t.by_bit.entry(bit).or_default());
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("{0} is not a measurement")]
    NotMeasurement(Op),
    #[error("qubit {0} outside the frame")]
    OutOfRange(QubitId),
}

/// Per-qubit X/Z byproduct bits plus the pending 2θ flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliFrame {
    x: Vec<bool>,
    z: Vec<bool>,
    pending_2theta: bool,
}

impl PauliFrame {
    pub fn new(qubits: usize) -> PauliFrame {
        PauliFrame { x: vec![false; qubits], z: vec![false; qubits], pending_2theta: false }
    }

    pub fn get(&self, q: QubitId) -> Pauli {
        Pauli::from_bits(self.x[q], self.z[q])
    }

    pub fn pending_2theta(&self) -> bool {
        self.pending_2theta
    }

    pub fn is_clear(&self) -> bool {
        !self.pending_2theta && self.x.iter().chain(&self.z).all(|b| !b)
    }

    pub fn toggle(&mut self, q: QubitId, p: Pauli) -> Result<(), FrameError> {
        if q >= self.x.len() {
            return Err(FrameError::OutOfRange(q));
        }
        self.x[q] ^= p.x_bit();
        self.z[q] ^= p.z_bit();
        Ok(())
    }

    pub fn apply(&mut self, b: &Byproduct) -> Result<(), FrameError> {
        for &(q, p) in &b.paulis {
            self.toggle(q, p)?;
        }
        self.pending_2theta ^= b.rot_2theta;
        Ok(())
    }

    /// Non-identity entries, by qubit.
    pub fn paulis(&self) -> Vec<(QubitId, Pauli)> {
        (0..self.x.len())
            .map(|q| (q, self.get(q)))
            .filter(|(_, p)| !p.is_identity())
            .collect()
    }
}

/// Records the byproduct `table` assigns to `instr` reporting `outcome`.
pub fn frame_update(
    f: &PauliFrame,
    instr: &Instruction,
    outcome: bool,
    table: &CorrectionTable,
) -> Result<PauliFrame, FrameError> {
    if !instr.op.is_measurement() {
        return Err(FrameError::NotMeasurement(instr.op));
    }
    let mut next = f.clone();
    if outcome {
        if let Some(b) = instr.cbit.and_then(|bit| table.by_bit.get(&bit)) {
            next.apply(b)?;
        }
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Instruction, Parity, Role};

    fn ls_like() -> (Circuit, Instruction) {
        let mut c = Circuit::with_data(2);
        let a = c.add_qubit(Role::Ancilla, 2);
        let b = c.alloc_cbit();
        let xx = Instruction::meas_xx(a, 1, b);
        c.push(Instruction::prep_z(a));
        c.push(xx.clone());
        c.push(Instruction::corr_pauli(0, Pauli::Z, Parity::bit(b)));
        (c, xx)
    }

    #[test]
    fn outcome_zero_is_identity() {
        let (c, xx) = ls_like();
        let t = CorrectionTable::from_circuit(&c);
        let f = PauliFrame::new(3);
        assert_eq!(frame_update(&f, &xx, false, &t).unwrap(), f);
    }

    #[test]
    fn outcome_one_toggles_designated_qubit() {
        let (c, xx) = ls_like();
        let t = CorrectionTable::from_circuit(&c);
        let f = frame_update(&PauliFrame::new(3), &xx, true, &t).unwrap();
        assert_eq!(f.paulis(), vec![(0, Pauli::Z)]);
        let back = frame_update(&f, &xx, true, &t).unwrap();
        assert!(back.is_clear());
    }

    #[test]
    fn parity_bit_sets_pending_rotation() {
        let mut c = Circuit::with_data(1);
        let t = c.add_qubit(Role::Theta, 1);
        let m = c.alloc_cbit();
        let zz = Instruction::meas_zz(0, t, m);
        c.push(Instruction::prep_theta(t, -0.6));
        c.push(zz.clone());
        c.push(Instruction::corr_rz2theta(t, 0.6, Parity::bit(m)));
        let table = CorrectionTable::from_circuit(&c);
        let f = frame_update(&PauliFrame::new(2), &zz, true, &table).unwrap();
        assert!(f.pending_2theta());
    }

    #[test]
    fn rejects_non_measurement() {
        let f = PauliFrame::new(2);
        let e = frame_update(&f, &Instruction::cnot(0, 1), true, &CorrectionTable::default());
        assert_eq!(e, Err(FrameError::NotMeasurement(Op::CNOT)));
    }
}
