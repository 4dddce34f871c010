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


//! Reference unitaries for measurement-free circuits, built by direct
//! matrix products. Used as an oracle independent of the branch walker.

use num_complex::Complex64 as C64;

use super::{DenseLimits, DenseOp, VerifyError};
use crate::clifford::Mat2;
use crate::ir::{Circuit, Op};

fn apply_1q(col: &mut [C64], bit: usize, m: &Mat2) {
    for i in 0..col.len() {
        if i >> bit & 1 == 0 {
            let j = i | 1 << bit;
            let (a, b) = (col[i], col[j]);
            col[i] = m[0][0] * a + m[0][1] * b;
            col[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

/// The unitary of a circuit made only of `Clifford1Q`, `Rz`, `CNOT` and
/// `ExpZString` on data qubits. Data qubit `k` in roster order is bit `k`.
pub fn gate_unitary(c: &Circuit) -> Result<DenseOp, VerifyError> {
    let data = c.data_qubits();
    let limit = DenseLimits::from_env().operator_qubits;
    if data.len() > limit {
        return Err(VerifyError::LimitExceeded { what: "operator qubits", needed: data.len(), limit });
    }
    let bit_of = |q: usize| data.iter().position(|&d| d == q);
    let dim = 1usize << data.len();
    let mut u = DenseOp::identity(dim, dim);
    for (index, ins) in c.instructions().iter().enumerate() {
        let bits: Vec<usize> = ins
            .qubits
            .iter()
            .map(|&q| bit_of(q).ok_or(VerifyError::Simulation { index, reason: format!("q{q} is not a data qubit") }))
            .collect::<Result<_, _>>()?;
        for mut col in u.column_iter_mut() {
            let v = col.as_mut_slice();
            match ins.op {
                Op::Clifford1Q => apply_1q(v, bits[0], &ins.clifford.expect("validated").matrix()),
                Op::Rz => {
                    let h = ins.angle.expect("validated") / 2.0;
                    let o = C64::new(0.0, 0.0);
                    apply_1q(v, bits[0], &[[C64::from_polar(1.0, -h), o], [o, C64::from_polar(1.0, h)]]);
                }
                Op::CNOT => {
                    for i in 0..dim {
                        if i >> bits[0] & 1 == 1 && i >> bits[1] & 1 == 0 {
                            v.swap(i, i | 1 << bits[1]);
                        }
                    }
                }
                Op::ExpZString => {
                    let t = ins.angle.expect("validated");
                    for (i, a) in v.iter_mut().enumerate() {
                        let odd = bits.iter().filter(|&&b| i >> b & 1 == 1).count() % 2 == 1;
                        *a *= C64::from_polar(1.0, if odd { -t } else { t });
                    }
                }
                op => return Err(VerifyError::Simulation { index, reason: format!("{op} is not a unitary gate") }),
            }
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::ir::Instruction;
    use crate::pauli::parse_pauli;
    use crate::verify::{operator_distance, target_exponential};

    #[test]
    fn exp_string_matches_target() {
        let mut c = Circuit::with_data(3);
        c.push(Instruction::exp_z_string(vec![0, 2], 0.7));
        let u = gate_unitary(&c).unwrap();
        let t = target_exponential(&parse_pauli("ZIZ").unwrap(), Angle::new(0.7)).unwrap();
        assert!(operator_distance(&u, &t) < 1e-12);
    }

    #[test]
    fn cnot_ladder_is_a_phase_gadget() {
        let mut c = Circuit::with_data(2);
        c.push(Instruction::cnot(0, 1));
        c.push(Instruction::rz(1, -0.6));
        c.push(Instruction::cnot(0, 1));
        let u = gate_unitary(&c).unwrap();
        let t = target_exponential(&parse_pauli("ZZ").unwrap(), Angle::new(0.3)).unwrap();
        assert!(operator_distance(&u, &t) < 1e-12);
    }

    #[test]
    fn rejects_measurements() {
        let mut c = Circuit::with_data(1);
        let b = c.alloc_cbit();
        c.push(Instruction::meas_z(0, b));
        assert!(gate_unitary(&c).is_err());
    }
}
