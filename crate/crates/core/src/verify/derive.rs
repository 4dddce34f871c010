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

//! Exhaustive correction search over the Pauli group.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{enumerate_branches, operator_distance, pauli_operator, DenseLimits, DenseOp, Input, VerifyError, TOLERANCE};
use crate::ir::{Cbit, Circuit};
use crate::pauli::{Pauli, PauliString};

/// Largest data-qubit count for the exhaustive search.
pub const SEARCH_QUBITS: usize = 4;

/// Correction found for one branch.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchCorrection {
    pub outcomes: String,
    pub pauli: PauliString,
    pub rotation: bool,
    pub deviation: f64,
}

/// Per-branch corrections and, when they factorise, the affine table
/// `correction = constant XOR (XOR over bits set of by_bit[bit])`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionDerivation {
    pub per_branch: Vec<BranchCorrection>,
    pub constant: (PauliString, bool),
    pub by_bit: BTreeMap<Cbit, (PauliString, bool)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DerivationFailure {
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("branch {branch}: no Pauli correction found (best deviation {best_deviation:.3e})")]
    NoCorrection { branch: String, best_deviation: f64 },
    #[error("corrections do not factor into per-outcome byproducts (correction bit {bit})")]
    NotAffine { bit: usize },
}

fn pauli_strings(n: usize) -> Vec<PauliString> {
    (0..1usize << (2 * n))
        .map(|k| {
            let letters = (0..n).map(|q| Pauli::ALL[(k >> (2 * q)) & 3]).collect();
            PauliString::new(letters).expect("n >= 1")
        })
        .collect()
}

/// Bits `[x_0..x_{n-1}, z_0..z_{n-1}, rotation]`.
fn encode(p: &PauliString, rot: bool) -> Vec<bool> {
    let mut v: Vec<bool> = p.letters().iter().map(|l| l.x_bit()).collect();
    v.extend(p.letters().iter().map(|l| l.z_bit()));
    v.push(rot);
    v
}

fn decode(v: &[bool], n: usize) -> (PauliString, bool) {
    let letters = (0..n).map(|q| Pauli::from_bits(v[q], v[n + q])).collect();
    (PauliString::new(letters).expect("n >= 1"), v[2 * n])
}

/// Solves `y = a_0 XOR sum_k x_k a_k` over GF(2) for each sample, returning
/// `[a_0, a_1, ..]` or `None` when inconsistent.
fn solve_affine(rows: &[(Vec<bool>, bool)]) -> Option<Vec<bool>> {
    let vars = rows.first().map_or(0, |r| r.0.len());
    let mut m: Vec<(Vec<bool>, bool)> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..vars {
        let Some(p) = (r..m.len()).find(|&i| m[i].0[col]) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i].0[col] {
                let (pivot_row, pivot_rhs) = (m[r].0.clone(), m[r].1);
                for (a, b) in m[i].0.iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
                m[i].1 ^= pivot_rhs;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|(_, rhs)| *rhs) {
        return None;
    }
    let mut sol = vec![false; vars];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = m[i].1;
    }
    Some(sol)
}

/// For each branch, finds `Q` (and optionally `R`) with `Q R^r U_b = e^{iφ} T`.
pub fn derive_corrections(
    c: &Circuit,
    target: &DenseOp,
    rotation: Option<&DenseOp>,
) -> Result<CorrectionDerivation, DerivationFailure> {
    let n = c.data_qubits().len();
    if n > SEARCH_QUBITS || n == 0 {
        return Err(VerifyError::LimitExceeded { what: "search qubits", needed: n, limit: SEARCH_QUBITS }.into());
    }
    let branches = enumerate_branches(c, &Input::Choi, &DenseLimits::default())?;
    let candidates: Vec<(PauliString, DenseOp)> =
        pauli_strings(n).into_iter().map(|p| { let m = pauli_operator(&p).expect("small"); (p, m) }).collect();
    let mut per_branch = Vec::new();
    for b in &branches {
        let mut best = (f64::INFINITY, None);
        'search: for rot in [false, true] {
            let base = match (rot, rotation) {
                (false, _) => b.operator.clone(),
                (true, Some(r)) => r * &b.operator,
                (true, None) => break,
            };
            for (p, m) in &candidates {
                let d = operator_distance(&(m * &base), target);
                if d < best.0 {
                    best = (d, Some((p.clone(), rot)));
                }
                if d <= TOLERANCE {
                    break 'search;
                }
            }
        }
        match best {
            (d, Some((pauli, rot))) if d <= TOLERANCE => per_branch.push(BranchCorrection {
                outcomes: b.outcomes.clone(),
                pauli,
                rotation: rot,
                deviation: d,
            }),
            (d, _) => {
                return Err(DerivationFailure::NoCorrection { branch: b.outcomes.clone(), best_deviation: d })
            }
        }
    }
    let cbits = c.cbits();
    let width = 2 * n + 1;
    let mut columns = vec![Vec::new(); width];
    for bc in &per_branch {
        let x: Vec<bool> = std::iter::once(true).chain(bc.outcomes.chars().map(|ch| ch == '1')).collect();
        for (k, y) in encode(&bc.pauli, bc.rotation).into_iter().enumerate() {
            columns[k].push((x.clone(), y));
        }
    }
    let mut solutions = Vec::with_capacity(width);
    for (bit, rows) in columns.iter().enumerate() {
        solutions.push(solve_affine(rows).ok_or(DerivationFailure::NotAffine { bit })?);
    }
    let coefficient = |var: usize| -> Vec<bool> { solutions.iter().map(|s| s[var]).collect() };
    let constant = decode(&coefficient(0), n);
    let mut by_bit = BTreeMap::new();
    for cb in 0..cbits {
        let v = coefficient(cb + 1);
        if v.iter().any(|&b| b) {
            by_bit.insert(cb, decode(&v, n));
        }
    }
    Ok(CorrectionDerivation { per_branch, constant, by_bit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_solver() {
        // y = 1 ^ x1
        let rows = vec![
            (vec![true, false, false], true),
            (vec![true, true, false], false),
            (vec![true, false, true], true),
            (vec![true, true, true], false),
        ];
        assert_eq!(solve_affine(&rows), Some(vec![true, true, false]));
        let bad = vec![(vec![true, false], true), (vec![true, false], false)];
        assert_eq!(solve_affine(&bad), None);
    }

    #[test]
    fn enumerates_all_paulis() {
        let ps = pauli_strings(2);
        assert_eq!(ps.len(), 16);
        assert_eq!(ps[0].to_string(), "II");
    }
}
