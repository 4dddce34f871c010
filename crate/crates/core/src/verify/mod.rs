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

//! Ground-truth checking: dense branch enumeration, correction search and a
//! stabilizer fast path for Clifford circuits.

mod dense;
mod derive;
mod reference;
mod tableau;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

use crate::angle::Angle;
use crate::clifford::pauli_matrix;
use crate::ir::{Circuit, CircuitError, QubitId};
use crate::pauli::PauliString;

pub use derive::{derive_corrections, BranchCorrection, CorrectionDerivation, DerivationFailure};
pub use reference::gate_unitary;
pub use tableau::{conjugation_action, tableau_run, Outcomes, SignedString, Tableau, TableauRun};

use dense::{check_limits, extract, phase_deviation, Leaf, Sim, Walker};

/// Dense operator on data qubits; data qubit `k` (by id order) is bit `k`
/// of the row and column index.
pub type DenseOp = DMatrix<C64>;

/// Branch deviation tolerance for equivalence.
pub const TOLERANCE: f64 = 1e-9;

/// Environment variable overriding both dense limits.
pub const LIMIT_ENV: &str = "PAULIFORGE_DENSE_LIMIT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DenseLimits {
    /// Peak live qubits (data plus ancillae) during simulation.
    pub state_qubits: usize,
    /// Data qubits for full operator extraction.
    pub operator_qubits: usize,
}

impl Default for DenseLimits {
    fn default() -> Self {
        DenseLimits { state_qubits: 12, operator_qubits: 10 }
    }
}

impl DenseLimits {
    /// Defaults, or both limits set from `PAULIFORGE_DENSE_LIMIT` when it holds a positive integer.
    pub fn from_env() -> DenseLimits {
        match std::env::var(LIMIT_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            Some(v) if v >= 1 => DenseLimits { state_qubits: v, operator_qubits: v },
            _ => DenseLimits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("unverifiable at desk scale: {what} {needed} exceeds limit {limit}")]
    LimitExceeded { what: &'static str, needed: usize, limit: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(CircuitError),
    #[error("instruction {index}: {reason}")]
    Simulation { index: usize, reason: String },
    #[error("instruction {index}: {op} is not Clifford")]
    NonClifford { index: usize, op: String },
    #[error("bad input: {0}")]
    BadInput(String),
}

/// A pure state over the data qubits, listed in id order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    pub amps: Vec<C64>,
    pub qubits: Vec<QubitId>,
}

impl DenseState {
    /// Computational basis state `index` over `qubits`.
    pub fn basis(qubits: Vec<QubitId>, index: usize) -> DenseState {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << qubits.len()];
        amps[index] = C64::new(1.0, 0.0);
        DenseState { amps, qubits }
    }
}

/// How the data qubits are fed into the circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    /// Maximally entangled with reference qubits, exposing the whole operator.
    Choi,
    State(DenseState),
}

/// One measurement-outcome branch.
#[derive(Clone, Debug)]
pub struct BranchReport {
    /// One character per classical bit: '0', '1', or '-' when unassigned.
    pub outcomes: String,
    pub probability: f64,
    /// `D x D` operator for Choi input, `D x 1` output state otherwise;
    /// normalised to a unitary (or unit vector) scale.
    pub operator: DenseOp,
    /// Corrections that fired, as text.
    pub corrections: String,
}

/// Result of an equivalence check.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub equivalent: bool,
    pub branches: usize,
    pub worst_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_branch: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Largest |p0 + p1 - 1| over all branching points.
    #[serde(skip)]
    pub max_probability_error: f64,
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| match b {
        0 => '0',
        1 => '1',
        _ => '-',
    }).collect()
}

/// Kronecker matrix of a Pauli string.
pub fn pauli_operator(p: &PauliString) -> Result<DenseOp, VerifyError> {
    let limits = DenseLimits::from_env();
    let n = p.len();
    if n > limits.operator_qubits {
        return Err(VerifyError::LimitExceeded { what: "operator qubits", needed: n, limit: limits.operator_qubits });
    }
    let dim = 1usize << n;
    let mats: Vec<_> = p.letters().iter().map(|&l| pauli_matrix(l)).collect();
    Ok(DenseOp::from_fn(dim, dim, |r, c| {
        mats.iter().enumerate().fold(C64::new(1.0, 0.0), |acc, (q, m)| acc * m[r >> q & 1][c >> q & 1])
    }))
}

/// `cos(θ) I + i sin(θ) M(p)`.
pub fn target_exponential(p: &PauliString, theta: Angle) -> Result<DenseOp, VerifyError> {
    let m = pauli_operator(p)?;
    let dim = m.nrows();
    let t = theta.value();
    Ok(DenseOp::identity(dim, dim) * C64::new(t.cos(), 0.0) + m * C64::new(0.0, t.sin()))
}

/// Enumerates every non-pruned outcome branch depth-first.
pub fn enumerate_branches(c: &Circuit, input: &Input, limits: &DenseLimits) -> Result<Vec<BranchReport>, VerifyError> {
    check_limits(c, input, limits)?;
    let data = c.data_qubits();
    let leaf = |l: &Leaf| -> Result<Vec<BranchReport>, VerifyError> {
        let (v, rows, cols) = extract(l.sim, &data).map_err(|reason| VerifyError::Simulation { index: c.len(), reason })?;
        let operator = DenseOp::from_row_slice(rows, cols, &v);
        let corrections = l
            .fired
            .iter()
            .map(|&k| c.instructions()[k as usize].to_string())
            .collect::<Vec<_>>()
            .join("; ");
        Ok(vec![BranchReport { outcomes: bit_string(l.bits), probability: l.prob, operator, corrections }])
    };
    let merge = |a: Result<Vec<BranchReport>, VerifyError>, b: Result<Vec<BranchReport>, VerifyError>| {
        let mut a = a?;
        a.extend(b?);
        Ok(a)
    };
    let walker = Walker { circuit: c, leaf, merge };
    walker.run(Sim::new(c, input)?)?.acc
}

struct Worst {
    deviation: f64,
    bits: String,
    note: Option<String>,
}

/// Branch-wise equivalence up to global phase.
pub fn check_equivalence(c: &Circuit, target: &DenseOp) -> Result<Verdict, VerifyError> {
    check_equivalence_with(c, target, &DenseLimits::from_env())
}

pub fn check_equivalence_with(c: &Circuit, target: &DenseOp, limits: &DenseLimits) -> Result<Verdict, VerifyError> {
    check_limits(c, &Input::Choi, limits)?;
    let data = c.data_qubits();
    let dim = 1usize << data.len();
    if target.nrows() != dim || target.ncols() != dim {
        return Err(VerifyError::BadInput(format!(
            "target is {}x{}, circuit has {} data qubits",
            target.nrows(),
            target.ncols(),
            data.len()
        )));
    }
    let t: Vec<C64> = (0..dim).flat_map(|r| (0..dim).map(move |col| (r, col))).map(|(r, col)| target[(r, col)]).collect();
    let leaf = |l: &Leaf| -> Worst {
        match extract(l.sim, &data) {
            Ok((u, _, _)) => Worst { deviation: phase_deviation(&u, &t), bits: bit_string(l.bits), note: None },
            Err(reason) => Worst { deviation: f64::INFINITY, bits: bit_string(l.bits), note: Some(reason) },
        }
    };
    let merge = |a: Worst, b: Worst| if b.deviation > a.deviation { b } else { a };
    let walker = Walker { circuit: c, leaf, merge };
    let w = walker.run(Sim::new(c, &Input::Choi)?)?;
    let equivalent = w.acc.deviation <= TOLERANCE;
    Ok(Verdict {
        equivalent,
        branches: w.leaves,
        worst_deviation: w.acc.deviation,
        failing_branch: (!equivalent).then_some(w.acc.bits),
        note: w.acc.note,
        max_probability_error: w.max_sum_error,
    })
}

/// Deviation between two operators up to global phase, fitted as in
/// [`check_equivalence`].
pub fn operator_distance(u: &DenseOp, t: &DenseOp) -> f64 {
    let flat = |m: &DenseOp| -> Vec<C64> {
        (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| (r, c))).map(|(r, c)| m[(r, c)]).collect()
    };
    phase_deviation(&flat(u), &flat(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Instruction, Role};
    use crate::pauli::parse_pauli;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Truncated power series of `exp(iθM)`.
    fn series_exp(m: &DenseOp, theta: f64) -> DenseOp {
        let dim = m.nrows();
        let a = m * c(0.0, theta);
        let mut term = DenseOp::identity(dim, dim);
        let mut sum = term.clone();
        for k in 1..40 {
            term = &term * &a / c(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn target_special_values() {
        let z = parse_pauli("Z").unwrap();
        let t = target_exponential(&z, Angle::parse("pi/2").unwrap()).unwrap();
        assert!((t[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((t[(1, 1)] - c(0.0, -1.0)).norm() < 1e-15);
        let p = parse_pauli("XYZ").unwrap();
        let t = target_exponential(&p, Angle::new(0.0)).unwrap();
        assert!((t - DenseOp::identity(8, 8)).norm() < 1e-15);
    }

    #[test]
    fn target_matches_series() {
        for word in ["ZZ", "XY", "YIZ"] {
            let p = parse_pauli(word).unwrap();
            let t = target_exponential(&p, Angle::new(0.77)).unwrap();
            let e = series_exp(&pauli_operator(&p).unwrap(), 0.77);
            assert!((t - e).norm() < 1e-12, "{word}");
        }
    }

    #[test]
    fn single_measurement_on_plus() {
        let mut circ = Circuit::new();
        let a = circ.add_qubit(Role::Ancilla, 0);
        let b = circ.alloc_cbit();
        circ.push(Instruction::prep_x(a));
        circ.push(Instruction::meas_x(a, b));
        let br = enumerate_branches(&circ, &Input::Choi, &DenseLimits::default()).unwrap();
        assert_eq!(br.len(), 1);
        assert_eq!(br[0].outcomes, "0");
        assert!((br[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_measurement_statistics() {
        for (input, want) in [(0b00, '0'), (0b11, '0'), (0b10, '1'), (0b01, '1')] {
            let mut circ = Circuit::with_data(2);
            let b = circ.alloc_cbit();
            circ.push(Instruction::meas_zz(0, 1, b));
            let s = DenseState::basis(vec![0, 1], input);
            let br = enumerate_branches(&circ, &Input::State(s), &DenseLimits::default()).unwrap();
            assert_eq!(br.len(), 1);
            assert_eq!(br[0].outcomes.chars().next(), Some(want));
        }
    }

    #[test]
    fn phase_blind_and_sign_sensitive() {
        let mut circ = Circuit::with_data(1);
        circ.push(Instruction::rz(0, -0.8));
        let p = parse_pauli("Z").unwrap();
        let t = target_exponential(&p, Angle::new(0.4)).unwrap();
        assert!(check_equivalence(&circ, &t).unwrap().equivalent);
        let shifted = &t * C64::from_polar(1.0, 1.3);
        assert!(check_equivalence(&circ, &shifted).unwrap().equivalent);
        let wrong = target_exponential(&p, Angle::new(-0.4)).unwrap();
        let v = check_equivalence(&circ, &wrong).unwrap();
        assert!(!v.equivalent);
        assert_eq!(v.failing_branch.as_deref(), Some(""));
    }

    #[test]
    fn consumed_data_qubit_fails() {
        let mut circ = Circuit::with_data(1);
        let a = circ.add_qubit(Role::Ancilla, 1);
        let b = circ.alloc_cbit();
        circ.push(Instruction::prep_x(a));
        circ.push(Instruction::cnot(a, 0));
        circ.push(Instruction::meas_z(0, b));
        let v = check_equivalence(&circ, &DenseOp::identity(2, 2)).unwrap();
        assert!(!v.equivalent);
        assert!(v.note.is_some());
    }

    #[test]
    fn limits_are_enforced() {
        let circ = Circuit::with_data(11);
        let t = DenseOp::identity(1 << 11, 1 << 11);
        assert!(matches!(check_equivalence_with(&circ, &t, &DenseLimits::default()), Err(VerifyError::LimitExceeded { .. })));
    }
}
