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

//! Depth and connectivity analysis.

use std::collections::BTreeSet;

use crate::ir::{Circuit, Op, QubitId, Role};

/// A two-qubit instruction acting on non-adjacent positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LnnViolation {
    pub index: usize,
    pub op: Op,
    pub qubits: (QubitId, QubitId),
    pub distance: usize,
}

/// Depth and resource summary of a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthReport {
    pub total_layers: usize,
    /// Layers holding at least one MeasXX or MeasZZ.
    pub two_body_layers: usize,
    /// Distinct interaction ancillae touched.
    pub max_ancillas: usize,
    /// Distinct θ ancillae touched.
    pub theta_ancillas: usize,
    pub lnn_violations: Vec<LnnViolation>,
}

/// ASAP layering where instructions conflict iff they share a qubit.
pub fn layers(c: &Circuit) -> Vec<usize> {
    let mut frontier = vec![0usize; c.qubits().len()];
    c.instructions()
        .iter()
        .map(|ins| {
            let layer = ins.qubits.iter().map(|&q| frontier[q]).max().unwrap_or(0);
            for &q in &ins.qubits {
                frontier[q] = layer + 1;
            }
            layer
        })
        .collect()
}

pub fn compute_depth(c: &Circuit) -> DepthReport {
    let layer_of = layers(c);
    let total_layers = layer_of.iter().map(|l| l + 1).max().unwrap_or(0);
    let two_body: BTreeSet<usize> = c
        .instructions()
        .iter()
        .zip(&layer_of)
        .filter(|(ins, _)| ins.op.is_two_body())
        .map(|(_, &l)| l)
        .collect();
    let touched = |role: Role| {
        c.instructions()
            .iter()
            .flat_map(|i| i.qubits.iter())
            .filter(|&&q| c.qubit(q).role == role)
            .collect::<BTreeSet<_>>()
            .len()
    };
    DepthReport {
        total_layers,
        two_body_layers: two_body.len(),
        max_ancillas: touched(Role::Ancilla),
        theta_ancillas: touched(Role::Theta),
        lnn_violations: check_lnn(c),
    }
}

/// Two-qubit instructions whose operands are not neighbours on the line.
pub fn check_lnn(c: &Circuit) -> Vec<LnnViolation> {
    c.instructions()
        .iter()
        .enumerate()
        .filter(|(_, ins)| ins.qubits.len() == 2)
        .filter_map(|(index, ins)| {
            let (a, b) = (ins.qubits[0], ins.qubits[1]);
            let distance = c.qubit(a).pos.abs_diff(c.qubit(b).pos);
            (distance != 1).then_some(LnnViolation { index, op: ins.op, qubits: (a, b), distance })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::Instruction;

    #[test]
    fn empty_and_parallel() {
        let c = Circuit::with_data(4);
        let r = compute_depth(&c);
        assert_eq!((r.total_layers, r.two_body_layers), (0, 0));
        let mut c = Circuit::with_data(4);
        let (b0, b1) = (c.alloc_cbit(), c.alloc_cbit());
        c.push(Instruction::meas_xx(0, 1, b0));
        c.push(Instruction::meas_xx(2, 3, b1));
        let r = compute_depth(&c);
        assert_eq!((r.total_layers, r.two_body_layers), (1, 1));
    }

    #[test]
    fn lnn() {
        let mut c = Circuit::with_data(5);
        c.push(Instruction::cnot(3, 4));
        assert!(check_lnn(&c).is_empty());
        let b = c.alloc_cbit();
        c.push(Instruction::meas_zz(0, 2, b));
        let v = check_lnn(&c);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].index, 1);
        assert_eq!(v[0].distance, 2);
    }
}
