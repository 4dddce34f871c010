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

//! The frozen byproduct tables against the exhaustive correction search.

use pauliforge::decompose::decompose_with;
use pauliforge::frame::{LsTable, Slot};
use pauliforge::verify::{check_equivalence, derive_corrections, gate_unitary, target_exponential, CorrectionDerivation};
use pauliforge::{parse_pauli, Angle, Circuit, Instruction, Pauli, PauliString, Role, RuleTables};

fn cnot() -> pauliforge::verify::DenseOp {
    let mut c = Circuit::with_data(2);
    c.push(Instruction::cnot(0, 1));
    gate_unitary(&c).unwrap()
}

/// Raw lattice-surgery pattern for CNOT(0 -> 1), without corrections.
fn ls_pattern(first_x: bool) -> Circuit {
    let mut c = Circuit::with_data(2);
    let a = c.add_qubit(Role::Ancilla, 2);
    let b: Vec<usize> = (0..3).map(|_| c.alloc_cbit()).collect();
    if first_x {
        c.push(Instruction::prep_z(a));
        c.push(Instruction::meas_xx(a, 1, b[0]));
        c.push(Instruction::meas_zz(0, a, b[1]));
        c.push(Instruction::meas_x(a, b[2]));
    } else {
        c.push(Instruction::prep_x(a));
        c.push(Instruction::meas_zz(0, a, b[0]));
        c.push(Instruction::meas_xx(a, 1, b[1]));
        c.push(Instruction::meas_z(a, b[2]));
    }
    c
}

fn as_table(d: &CorrectionDerivation) -> LsTable {
    let entry = |k: usize| -> Vec<(Slot, Pauli)> {
        let (p, rot) = d.by_bit.get(&k).cloned().unwrap_or((PauliString::new(vec![Pauli::I; 2]).unwrap(), false));
        assert!(!rot);
        [Slot::Control, Slot::Target]
            .into_iter()
            .zip(p.letters().iter().copied())
            .filter(|(_, l)| !l.is_identity())
            .collect()
    };
    LsTable { byproducts: [entry(0), entry(1), entry(2)] }
}

#[test]
fn lattice_surgery_tables_match_the_search() {
    let frozen = RuleTables::frozen();
    for (first_x, want) in [(true, &frozen.ls1), (false, &frozen.ls2)] {
        let d = derive_corrections(&ls_pattern(first_x), &cnot(), None).unwrap();
        assert_eq!(d.constant, (PauliString::new(vec![Pauli::I; 2]).unwrap(), false));
        assert_eq!(&as_table(&d), want);
    }
}

#[test]
fn rotation_gadget_matches_the_search() {
    let theta = 0.3;
    let mut c = Circuit::with_data(1);
    let t = c.add_qubit(Role::Theta, 1);
    let (m, s) = (c.alloc_cbit(), c.alloc_cbit());
    c.push(Instruction::prep_theta(t, -2.0 * theta));
    c.push(Instruction::meas_zz(0, t, m));
    c.push(Instruction::meas_x(t, s));
    let z = parse_pauli("Z").unwrap();
    let target = target_exponential(&z, Angle::new(theta)).unwrap();
    let fix = target_exponential(&z, Angle::new(2.0 * theta)).unwrap();
    let d = derive_corrections(&c, &target, Some(&fix)).unwrap();
    let frozen = RuleTables::frozen();
    // The parity bit alone demands the 2θ rotation; the readout bit alone a Pauli.
    assert_eq!(d.by_bit[&m], (PauliString::new(vec![Pauli::I]).unwrap(), frozen.rot_parity_2theta));
    assert_eq!(d.by_bit[&s], (PauliString::new(vec![frozen.rot_readout]).unwrap(), false));
}

#[test]
fn derived_tables_close_the_loop() {
    let frozen = RuleTables::frozen();
    let ls1 = as_table(&derive_corrections(&ls_pattern(true), &cnot(), None).unwrap());
    let ls2 = as_table(&derive_corrections(&ls_pattern(false), &cnot(), None).unwrap());
    let tables = RuleTables { ls1, ls2, ..frozen };
    for s in ["ZZZ", "XYZ", "ZZZZ"] {
        let p = parse_pauli(s).unwrap();
        let theta = Angle::new(0.3);
        let c = decompose_with(&p, theta, &tables).unwrap();
        assert!(check_equivalence(&c, &target_exponential(&p, theta).unwrap()).unwrap().equivalent, "{s}");
    }
}
