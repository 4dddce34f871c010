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

//! Symbolic propagation of conditional Pauli byproducts.
//!
//! A byproduct is a Pauli whose X and Z components on each qubit are affine
//! parities of outcome bits. Pushing it forward through Clifford gates is a
//! linear map on those components; crossing a measurement it anticommutes
//! with relabels that measurement's outcome in every later condition. What
//! survives is merged into the circuit's trailing block of `CorrPauli`s.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use super::RewriteError;
use crate::angle::Angle;
use crate::ir::{Circuit, Cbit, Instruction, Op, Parity, QubitId};
use crate::pauli::Pauli;

/// Conditional Pauli: per qubit, the conditions of its X and Z components.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymFrame {
    comps: BTreeMap<QubitId, (Parity, Parity)>,
}

impl SymFrame {
    pub fn new() -> SymFrame {
        SymFrame::default()
    }

    /// Multiplies in `p` on `q` under `cond`.
    pub fn add(&mut self, q: QubitId, p: Pauli, cond: &Parity) {
        let e = self.comps.entry(q).or_default();
        if p.x_bit() {
            e.0 = e.0.xor(cond);
        }
        if p.z_bit() {
            e.1 = e.1.xor(cond);
        }
        self.tidy(q);
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    fn get(&self, q: QubitId) -> (Parity, Parity) {
        self.comps.get(&q).cloned().unwrap_or_default()
    }

    fn set(&mut self, q: QubitId, x: Parity, z: Parity) {
        self.comps.insert(q, (x, z));
        self.tidy(q);
    }

    fn tidy(&mut self, q: QubitId) {
        if let Some((x, z)) = self.comps.get(&q) {
            if x.is_zero() && z.is_zero() {
                self.comps.remove(&q);
            }
        }
    }

    fn erase(&mut self, q: QubitId) {
        self.comps.remove(&q);
    }

    fn substitute(&mut self, b: Cbit, with: &Parity) {
        for (x, z) in self.comps.values_mut() {
            *x = x.substitute(b, with);
            *z = z.substitute(b, with);
        }
    }
}

fn quarter_turns(angle: f64) -> Option<i64> {
    let a = Angle::new(angle);
    a.is_clifford().then(|| ((angle / FRAC_PI_2).round() as i64).rem_euclid(4))
}

/// Replaces bit `b` by `with` in the conditions of instructions `from..`.
pub(crate) fn substitute_after(c: &mut Circuit, from: usize, b: Cbit, with: &Parity) {
    for ins in c.instructions.iter_mut().skip(from) {
        if let Some(cond) = &mut ins.cond {
            if cond.contains(b) {
                *cond = cond.substitute(b, with);
            }
        }
    }
}

/// Pushes `frame`, sitting just before instruction `from`, to the end of
/// the circuit and folds it into the trailing correction block.
pub(crate) fn propagate(c: &mut Circuit, from: usize, mut frame: SymFrame) -> Result<(), RewriteError> {
    let end = c.trailing_block_start().max(from);
    let mut idx = from;
    while idx < end && !frame.is_empty() {
        let ins = c.instructions[idx].clone();
        step(c, idx, &ins, &mut frame)?;
        idx += 1;
    }
    merge_trailing(c, frame);
    Ok(())
}

fn step(c: &mut Circuit, idx: usize, ins: &Instruction, frame: &mut SymFrame) -> Result<(), RewriteError> {
    let non_clifford = || RewriteError::NonCliffordPropagation { index: idx, op: ins.op };
    match ins.op {
        Op::CorrPauli => {}
        Op::PrepZ | Op::PrepX | Op::PrepTheta => frame.erase(ins.qubits[0]),
        Op::Clifford1Q => {
            let q = ins.qubits[0];
            let g = ins.clifford.expect("validated");
            let (x, z) = frame.get(q);
            let (xx, xz) = g.map_bits(true, false);
            let (zx, zz) = g.map_bits(false, true);
            let pick = |on: bool, p: &Parity| if on { p.clone() } else { Parity::zero() };
            let nx = pick(xx, &x).xor(&pick(zx, &z));
            let nz = pick(xz, &x).xor(&pick(zz, &z));
            frame.set(q, nx, nz);
        }
        Op::Rz => {
            let q = ins.qubits[0];
            let (x, z) = frame.get(q);
            match quarter_turns(ins.angle.unwrap_or(0.0)) {
                Some(k) if k % 2 == 1 => frame.set(q, x.clone(), z.xor(&x)),
                Some(_) => {}
                None if x.is_zero() => {}
                None => return Err(non_clifford()),
            }
        }
        Op::CorrRz2Theta => {
            if !frame.get(ins.qubits[0]).0.is_zero() {
                return Err(non_clifford());
            }
        }
        Op::ExpZString => {
            if quarter_turns(ins.angle.unwrap_or(0.0)).is_none() {
                let f = ins.qubits.iter().fold(Parity::zero(), |acc, &q| acc.xor(&frame.get(q).0));
                if !f.is_zero() {
                    return Err(non_clifford());
                }
            }
        }
        Op::CNOT => {
            let (ct, tg) = (ins.qubits[0], ins.qubits[1]);
            let (xc, zc) = frame.get(ct);
            let (xt, zt) = frame.get(tg);
            frame.set(tg, xt.xor(&xc), zt.clone());
            frame.set(ct, xc, zc.xor(&zt));
        }
        _ if ins.op.is_measurement() => {
            let mut flip = Parity::zero();
            for (q, letter) in ins.measured_pauli().expect("measurement") {
                let (x, z) = frame.get(q);
                if letter.z_bit() {
                    flip = flip.xor(&x);
                }
                if letter.x_bit() {
                    flip = flip.xor(&z);
                }
            }
            if !flip.is_zero() {
                let b = ins.cbit.expect("validated");
                let with = Parity::bit(b).xor(&flip);
                substitute_after(c, idx + 1, b, &with);
                frame.substitute(b, &with);
            }
            if ins.op.is_destructive() {
                frame.erase(ins.qubits[0]);
            }
        }
        _ => unreachable!("all opcodes covered"),
    }
    Ok(())
}

/// Rebuilds the trailing block in canonical form with `extra` folded in:
/// by qubit id, X before Z, Y split into X and Z, trivial entries dropped.
pub(crate) fn merge_trailing(c: &mut Circuit, extra: SymFrame) {
    let start = c.trailing_block_start();
    let mut frame = extra;
    for ins in c.instructions.drain(start..) {
        frame.add(ins.qubits[0], ins.pauli.expect("CorrPauli"), ins.cond.as_ref().expect("CorrPauli"));
    }
    for (q, (x, z)) in frame.comps {
        if !x.is_zero() {
            c.instructions.push(Instruction::corr_pauli(q, Pauli::X, x));
        }
        if !z.is_zero() {
            c.instructions.push(Instruction::corr_pauli(q, Pauli::Z, z));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Clifford1;

    #[test]
    fn through_cnot_and_hadamard() {
        let mut c = Circuit::with_data(2);
        let b = c.alloc_cbit();
        c.push(Instruction::meas_zz(0, 1, b));
        c.push(Instruction::cnot(0, 1));
        c.push(Instruction::clifford(1, Clifford1::h()));
        let mut f = SymFrame::new();
        f.add(0, Pauli::X, &Parity::bit(b));
        propagate(&mut c, 1, f).unwrap();
        // X0 -> X0 X1 -> X0 Z1
        let tail: Vec<String> = c.instructions()[3..].iter().map(|i| i.to_string()).collect();
        assert_eq!(tail, vec!["CorrPauli X q0 if c0", "CorrPauli Z q1 if c0"]);
    }

    #[test]
    fn crossing_a_measurement_relabels_outcomes() {
        let mut c = Circuit::with_data(2);
        let (b0, b1) = (c.alloc_cbit(), c.alloc_cbit());
        c.push(Instruction::meas_z(1, b0));
        c.push(Instruction::meas_xx(0, 1, b1));
        c.instructions.remove(0);
        c.instructions.insert(0, Instruction::meas_zz(0, 1, b0));
        c.push(Instruction::corr_pauli(1, Pauli::Z, Parity::bit(b1)));
        let mut f = SymFrame::new();
        f.add(0, Pauli::Z, &Parity::bit(b0));
        propagate(&mut c, 1, f).unwrap();
        // Z0^{b0} flips the XX outcome: conditions on b1 become b0^b1.
        let tail: Vec<String> = c.instructions()[2..].iter().map(|i| i.to_string()).collect();
        assert_eq!(tail, vec!["CorrPauli Z q0 if c0", "CorrPauli Z q1 if c0^c1"]);
    }

    #[test]
    fn blocked_by_generic_rotation() {
        let mut c = Circuit::with_data(1);
        c.push(Instruction::rz(0, 0.3));
        let mut f = SymFrame::new();
        f.add(0, Pauli::X, &Parity::one());
        assert!(propagate(&mut c, 0, f).is_err());
        let mut c = Circuit::with_data(1);
        c.push(Instruction::rz(0, 0.3));
        let mut f = SymFrame::new();
        f.add(0, Pauli::Z, &Parity::one());
        assert!(propagate(&mut c, 0, f).is_ok());
    }
}
