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

//! Randomised rule instances and oracles shared by the integration tests.

#![allow(dead_code)]

use pauliforge::ir::QubitId;
use pauliforge::rewrite::site_at;
use pauliforge::verify::{check_equivalence, enumerate_branches, gate_unitary, operator_distance, DenseLimits, DenseOp, Input};
use pauliforge::{apply_rule, find_sites, Circuit, Clifford1, Instruction, Op, Parity, Pauli, Role, RuleName, RuleTables};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Appends `count` random gates on `qs`: single-qubit Cliffords, CNOTs and,
/// unless `clifford_only`, Rz rotations.
pub fn random_gates(rng: &mut ChaCha8Rng, c: &mut Circuit, qs: &[QubitId], count: usize, clifford_only: bool) {
    for _ in 0..count {
        let q = qs[rng.random_range(0..qs.len())];
        match rng.random_range(0..3) {
            1 if !clifford_only => c.push(Instruction::rz(q, rng.random_range(-3.0..3.0))),
            2 if qs.len() >= 2 => {
                let pair: Vec<QubitId> = qs.choose_multiple(rng, 2).copied().collect();
                c.push(Instruction::cnot(pair[0], pair[1]));
            }
            _ => {
                let g = Clifford1::from_id(rng.random_range(0..24)).expect("in range");
                c.push(Instruction::clifford(q, g));
            }
        }
    }
}

/// A non-Clifford angle: T-like or generic.
pub fn rotation_angle(rng: &mut ChaCha8Rng) -> f64 {
    let eighth = std::f64::consts::FRAC_PI_8;
    match rng.random_range(0..4) {
        0 => eighth * [1.0, 3.0, 5.0, -1.0][rng.random_range(0..4)],
        _ => loop {
            let t: f64 = rng.random_range(-1.5..1.5);
            if ((t / eighth).round() * eighth - t).abs() > 1e-3 {
                break t;
            }
        },
    }
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Vec<QubitId> {
    let all: Vec<QubitId> = (0..n).collect();
    all.choose_multiple(rng, size).copied().collect()
}

/// How a rewritten circuit is judged.
pub enum Oracle {
    /// Branch-wise equivalence to a unitary.
    Unitary(DenseOp),
    /// Branch-for-branch agreement with the circuit before the rewrite.
    Branches(Circuit),
}

/// One matched rule application on a random circuit.
pub struct Instance {
    pub before: Circuit,
    pub site: pauliforge::RewriteSite,
    pub oracle: Oracle,
}

impl Instance {
    pub fn after(&self, tables: &RuleTables) -> Circuit {
        apply_rule(&self.before, &self.site, tables).unwrap_or_else(|e| panic!("{e}\n{}", self.before.to_text()))
    }

    /// Applies the rule and returns the worst deviation found by the oracle.
    pub fn check(&self, tables: &RuleTables) -> Result<f64, String> {
        let after = self.after(tables);
        match &self.oracle {
            Oracle::Unitary(t) => against(&after, t),
            Oracle::Branches(b) => same_branches(b, &after),
        }
    }
}

/// Worst branch deviation of `c` from `t`; an error if not equivalent.
pub fn against(c: &Circuit, t: &DenseOp) -> Result<f64, String> {
    let v = check_equivalence(c, t).map_err(|e| e.to_string())?;
    if v.equivalent {
        Ok(v.worst_deviation)
    } else {
        Err(format!("deviation {:.3e} on branch {:?}\n{}", v.worst_deviation, v.failing_branch, c.to_text()))
    }
}

/// Compares the outcome branches of two circuits over the same classical bits.
pub fn same_branches(a: &Circuit, b: &Circuit) -> Result<f64, String> {
    let limits = DenseLimits::default();
    let ea = enumerate_branches(a, &Input::Choi, &limits).map_err(|e| e.to_string())?;
    let eb = enumerate_branches(b, &Input::Choi, &limits).map_err(|e| e.to_string())?;
    if ea.len() != eb.len() {
        return Err(format!("{} branches before, {} after", ea.len(), eb.len()));
    }
    let mut worst = 0.0f64;
    for x in &ea {
        let y = eb.iter().find(|y| y.outcomes == x.outcomes).ok_or_else(|| format!("branch {} vanished", x.outcomes))?;
        if (x.probability - y.probability).abs() > TOL {
            return Err(format!("branch {}: probability {} vs {}", x.outcomes, x.probability, y.probability));
        }
        let d = operator_distance(&y.operator, &x.operator);
        if d > TOL {
            return Err(format!("branch {}: deviation {d:.3e}", x.outcomes));
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

fn unitary(c: &Circuit) -> DenseOp {
    gate_unitary(c).expect("gate-only circuit")
}

fn site(c: &Circuit, rule: RuleName, at: usize) -> pauliforge::RewriteSite {
    site_at(c, rule, at).unwrap_or_else(|e| panic!("{e}\n{}", c.to_text()))
}

fn step(c: &Circuit, rule: RuleName, at: usize) -> Circuit {
    apply_rule(c, &site(c, rule, at), &RuleTables::frozen()).unwrap_or_else(|e| panic!("{e}\n{}", c.to_text()))
}

/// `pre; exp(i θ Z_S); post` with Clifford-only `post` when `clifford_post`.
fn string_circuit(rng: &mut ChaCha8Rng, n: usize, support: &[QubitId], theta: f64, clifford_post: bool) -> (Circuit, usize) {
    let qs: Vec<QubitId> = (0..n).collect();
    let mut c = Circuit::with_data(n);
    let pre = rng.random_range(0..5);
    random_gates(rng, &mut c, &qs, pre, false);
    let node = c.len();
    c.push(Instruction::exp_z_string(support.to_vec(), theta));
    let post = rng.random_range(0..5);
    random_gates(rng, &mut c, &qs, post, clifford_post);
    (c, node)
}

/// A random matched instance of `rule` on at most six qubits.
pub fn instance(rule: RuleName, rng: &mut ChaCha8Rng) -> Instance {
    match rule {
        RuleName::ROT => {
            let n = rng.random_range(1..=4);
            let k = rng.random_range(1..=n);
            let support = random_subset(rng, n, k);
            let theta = rotation_angle(rng);
            let (before, node) = string_circuit(rng, n, &support, theta, true);
            let t = unitary(&before);
            Instance { site: site(&before, rule, node), before, oracle: Oracle::Unitary(t) }
        }
        RuleName::PG => {
            let n = rng.random_range(2..=5);
            let k = rng.random_range(2..=n);
            let support = random_subset(rng, n, k);
            let theta = rng.random_range(-3.0..3.0);
            let (before, node) = string_circuit(rng, n, &support, theta, false);
            let t = unitary(&before);
            Instance { site: site(&before, rule, node), before, oracle: Oracle::Unitary(t) }
        }
        RuleName::LS1 | RuleName::LS2 => {
            let n = rng.random_range(2..=4);
            let qs: Vec<QubitId> = (0..n).collect();
            let mut c = Circuit::with_data(n);
            if rng.random_bool(0.5) {
                c.add_qubit(Role::Ancilla, n);
            }
            let pre = rng.random_range(0..5);
            random_gates(rng, &mut c, &qs, pre, false);
            let at = c.len();
            let pair = random_subset(rng, n, 2);
            c.push(Instruction::cnot(pair[0], pair[1]));
            let post = rng.random_range(0..5);
            random_gates(rng, &mut c, &qs, post, true);
            let t = unitary(&c);
            Instance { site: site(&c, rule, at), before: c, oracle: Oracle::Unitary(t) }
        }
        RuleName::MR => {
            // Two lattice-surgery CNOTs sharing one ancilla leave a
            // measurement followed by a same-basis preparation.
            let n = rng.random_range(2..=4);
            let qs: Vec<QubitId> = (0..n).collect();
            let mut c = Circuit::with_data(n);
            c.add_qubit(Role::Ancilla, n);
            let pre = rng.random_range(0..4);
            random_gates(rng, &mut c, &qs, pre, false);
            let first = c.len();
            let p = random_subset(rng, n, 2);
            c.push(Instruction::cnot(p[0], p[1]));
            let mid = rng.random_range(0..4);
            random_gates(rng, &mut c, &qs, mid, true);
            let second = c.len();
            let p = random_subset(rng, n, 2);
            c.push(Instruction::cnot(p[0], p[1]));
            let post = rng.random_range(0..4);
            random_gates(rng, &mut c, &qs, post, true);
            let t = unitary(&c);
            let (v1, v2) = if rng.random_bool(0.5) { (RuleName::LS1, RuleName::LS2) } else { (RuleName::LS2, RuleName::LS1) };
            let c = step(&c, v1, first);
            let c = step(&c, v2, second + 3);
            let s = find_sites(&c, RuleName::MR).into_iter().next().unwrap_or_else(|| panic!("no MR site\n{}", c.to_text()));
            Instance { site: s, before: c, oracle: Oracle::Unitary(t) }
        }
        RuleName::FUSE => {
            // One pass of the decomposer's cycle on a weight-three string.
            let n = rng.random_range(3..=4);
            let support = random_subset(rng, n, 3);
            let theta = rotation_angle(rng);
            let (c, node) = string_circuit(rng, n, &support, theta, true);
            let t = unitary(&c);
            let c = step(&c, RuleName::ROT, node);
            let i = node + 1;
            assert_eq!(c.instructions()[i].op, Op::MeasZString);
            let c = step(&c, RuleName::PG, i);
            let c = step(&c, RuleName::LS1, i);
            let rhs = (i + 4..c.len()).find(|&j| c.instructions()[j].op == Op::CNOT).expect("closing CNOT");
            let c = step(&c, RuleName::LS2, rhs);
            let c = step(&c, RuleName::MR, i + 3);
            Instance { site: site(&c, rule, i + 2), before: c, oracle: Oracle::Unitary(t) }
        }
        RuleName::XXC | RuleName::ZZC => {
            let n = rng.random_range(2..=4);
            let qs: Vec<QubitId> = (0..n).collect();
            let mut c = Circuit::with_data(n);
            let pre = rng.random_range(0..5);
            random_gates(rng, &mut c, &qs, pre, false);
            let at = c.len();
            let pair = random_subset(rng, n, 2);
            let b = c.alloc_cbit();
            c.push(if rule == RuleName::XXC {
                Instruction::meas_xx(pair[0], pair[1], b)
            } else {
                Instruction::meas_zz(pair[0], pair[1], b)
            });
            let post = rng.random_range(0..5);
            random_gates(rng, &mut c, &qs, post, false);
            if rng.random_bool(0.5) {
                let p = [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)];
                c.push(Instruction::corr_pauli(qs[rng.random_range(0..n)], p, Parity::bit(b)));
            }
            Instance { site: site(&c, rule, at), before: c.clone(), oracle: Oracle::Branches(c) }
        }
        RuleName::REMX | RuleName::REMZ => {
            let n = rng.random_range(1..=4);
            let qs: Vec<QubitId> = (0..n).collect();
            let mut gates = Circuit::with_data(n);
            let count = rng.random_range(0..7);
            random_gates(rng, &mut gates, &qs, count, false);
            let t = unitary(&gates);
            let cut = rng.random_range(0..=gates.len());
            let mut c = Circuit::with_data(n);
            let a = c.add_qubit(Role::Ancilla, n);
            let b = c.alloc_cbit();
            for g in &gates.instructions()[..cut] {
                c.push(g.clone());
            }
            let at = c.len();
            let live = qs[rng.random_range(0..n)];
            if rule == RuleName::REMX {
                c.push(Instruction::prep_x(a));
                c.push(Instruction::cnot(live, a));
                c.push(Instruction::meas_x(a, b));
            } else {
                c.push(Instruction::prep_z(a));
                c.push(Instruction::cnot(a, live));
                c.push(Instruction::meas_z(a, b));
            }
            for g in &gates.instructions()[cut..] {
                c.push(g.clone());
            }
            let p = [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)];
            c.push(Instruction::corr_pauli(qs[rng.random_range(0..n)], p, Parity::bit(b)));
            Instance { site: site(&c, rule, at), before: c, oracle: Oracle::Unitary(t) }
        }
        RuleName::CnotComm => {
            let n = rng.random_range(3..=5);
            let qs: Vec<QubitId> = (0..n).collect();
            let mut c = Circuit::with_data(n);
            let pre = rng.random_range(0..4);
            random_gates(rng, &mut c, &qs, pre, false);
            let at = c.len();
            let v = random_subset(rng, n, 3);
            let (a, b, d) = (v[0], v[1], v[2]);
            let second = match rng.random_range(0..5) {
                0 => (a, b),
                1 => (a, d),
                2 => (d, b),
                3 => (b, d),
                _ => (d, a),
            };
            c.push(Instruction::cnot(a, b));
            c.push(Instruction::cnot(second.0, second.1));
            let post = rng.random_range(0..4);
            random_gates(rng, &mut c, &qs, post, false);
            let t = unitary(&c);
            Instance { site: site(&c, rule, at), before: c, oracle: Oracle::Unitary(t) }
        }
    }
}
