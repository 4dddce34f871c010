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

//! Stabilizer tableau with destabilizers, general Pauli-product
//! measurement, and conjugation-action readout through reference qubits.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::VerifyError;
use crate::clifford::{Clifford1, Gate};
use crate::ir::{Circuit, Op, QubitId};
use crate::pauli::{phase_exponent, Pauli, PauliString};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, v: bool) {
        let m = 1u64 << (i % 64);
        if v {
            self.0[i / 64] |= m;
        } else {
            self.0[i / 64] &= !m;
        }
    }

    fn xor(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a ^= b;
        }
    }

    fn dot(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    x: Bits,
    z: Bits,
    negative: bool,
}

impl Row {
    fn identity(n: usize) -> Row {
        Row { x: Bits::zeros(n), z: Bits::zeros(n), negative: false }
    }

    fn anticommutes(&self, o: &Row) -> bool {
        self.x.dot(&o.z) ^ self.z.dot(&o.x)
    }

    /// `self := other * self`, tracking the sign.
    fn left_mul(&mut self, other: &Row, n: usize) {
        let mut e = 2 * (self.negative as i32) + 2 * (other.negative as i32);
        for j in 0..n {
            e += phase_exponent(other.x.get(j), other.z.get(j), self.x.get(j), self.z.get(j));
        }
        // Odd exponents only arise for destabilizer rows, whose signs are unused.
        self.negative = e.rem_euclid(4) >= 2;
        self.x.xor(&other.x);
        self.z.xor(&other.z);
    }
}

/// A Pauli string with a sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedString {
    pub negative: bool,
    pub string: PauliString,
}

impl fmt::Display for SignedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { '-' } else { '+' }, self.string)
    }
}

/// Stabilizer tableau over `n` qubits: rows `0..n` destabilizers, `n..2n` stabilizers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    rows: Vec<Row>,
}

impl Tableau {
    /// The state |0...0>.
    pub fn new(n: usize) -> Tableau {
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut r = Row::identity(n);
            r.x.set(i, true);
            rows.push(r);
        }
        for i in 0..n {
            let mut r = Row::identity(n);
            r.z.set(i, true);
            rows.push(r);
        }
        Tableau { n, rows }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn h(&mut self, q: usize) {
        for r in &mut self.rows {
            let (x, z) = (r.x.get(q), r.z.get(q));
            r.negative ^= x & z;
            r.x.set(q, z);
            r.z.set(q, x);
        }
    }

    pub fn s(&mut self, q: usize) {
        for r in &mut self.rows {
            let (x, z) = (r.x.get(q), r.z.get(q));
            r.negative ^= x & z;
            r.z.set(q, z ^ x);
        }
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        for r in &mut self.rows {
            let (xc, zc, xt, zt) = (r.x.get(c), r.z.get(c), r.x.get(t), r.z.get(t));
            r.negative ^= xc & zt & !(xt ^ zc);
            r.x.set(t, xt ^ xc);
            r.z.set(c, zc ^ zt);
        }
    }

    pub fn pauli(&mut self, q: usize, p: Pauli) {
        for r in &mut self.rows {
            r.negative ^= (r.x.get(q) & p.z_bit()) ^ (r.z.get(q) & p.x_bit());
        }
    }

    pub fn clifford(&mut self, q: usize, c: Clifford1) {
        for g in c.word() {
            match g {
                Gate::H => self.h(q),
                Gate::S => self.s(q),
            }
        }
    }

    fn observable(&self, ps: &[(usize, Pauli)]) -> Row {
        let mut r = Row::identity(self.n);
        for &(q, p) in ps {
            r.x.set(q, p.x_bit());
            r.z.set(q, p.z_bit());
        }
        r
    }

    /// Measures a Hermitian Pauli product. `choose` picks the outcome of a
    /// random measurement. Returns `(outcome, was_random)`.
    pub fn measure(&mut self, ps: &[(usize, Pauli)], choose: impl FnOnce() -> bool) -> (bool, bool) {
        let obs = self.observable(ps);
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&i| self.rows[i].anticommutes(&obs)) {
            let pivot = self.rows[p].clone();
            for i in 0..2 * n {
                if i != p && self.rows[i].anticommutes(&obs) {
                    self.rows[i].left_mul(&pivot, n);
                }
            }
            let outcome = choose();
            self.rows[p - n] = pivot;
            self.rows[p] = Row { negative: outcome, ..obs };
            (outcome, true)
        } else {
            let mut acc = Row::identity(n);
            for i in 0..n {
                if self.rows[i].anticommutes(&obs) {
                    acc.left_mul(&self.rows[i + n].clone(), n);
                }
            }
            debug_assert!(acc.x == obs.x && acc.z == obs.z);
            (acc.negative, false)
        }
    }

    /// Resets `q` to |0>.
    pub fn reset(&mut self, q: usize) {
        let (m, _) = self.measure(&[(q, Pauli::Z)], || false);
        if m {
            self.pauli(q, Pauli::X);
        }
    }

    /// Stabilizer generators as signed strings over all qubits.
    pub fn stabilizers(&self) -> Vec<SignedString> {
        self.rows[self.n..].iter().map(|r| self.signed(r, 0..self.n)).collect()
    }

    fn signed(&self, r: &Row, qubits: impl Iterator<Item = usize>) -> SignedString {
        let letters: Vec<Pauli> = qubits.map(|q| Pauli::from_bits(r.x.get(q), r.z.get(q))).collect();
        SignedString {
            negative: r.negative,
            string: PauliString::new(if letters.is_empty() { vec![Pauli::I] } else { letters }).expect("nonempty"),
        }
    }

    /// Generators pairwise commute (stabilizers), pair up symplectically
    /// with destabilizers, and have full rank.
    pub fn is_valid(&self) -> bool {
        let n = self.n;
        for i in 0..2 * n {
            for j in 0..2 * n {
                let anti = self.rows[i].anticommutes(&self.rows[j]);
                let want = (i + n == j) || (j + n == i);
                if anti != want {
                    return false;
                }
            }
        }
        // Symplectic pairing implies independence of all 2n rows.
        true
    }
}

/// Outcome source for random measurements.
#[derive(Clone, Debug)]
pub enum Outcomes {
    /// Indexed by classical bit; missing entries read as 0.
    Fixed(Vec<bool>),
    Sampled(u64),
}

/// A finished tableau simulation.
#[derive(Clone, Debug)]
pub struct TableauRun {
    pub tableau: Tableau,
    /// Outcome per classical bit actually produced.
    pub outcomes: Vec<Option<bool>>,
    pub data: Vec<QubitId>,
    /// Tableau index of the first reference qubit; reference `k` pairs with `data[k]`.
    pub ref_base: usize,
}

fn quarter_turns(angle: f64, step: f64) -> Option<i64> {
    let k = (angle / step).round();
    ((angle - k * step).abs() < 1e-9).then_some(k as i64)
}

/// Runs a Clifford circuit with its data qubits maximally entangled with references.
pub fn tableau_run(c: &Circuit, outcomes: &Outcomes) -> Result<TableauRun, VerifyError> {
    c.validate().map_err(VerifyError::InvalidCircuit)?;
    let data = c.data_qubits();
    let ref_base = c.qubits().len();
    let mut t = Tableau::new(ref_base + data.len());
    for (k, &d) in data.iter().enumerate() {
        t.h(d);
        t.cnot(d, ref_base + k);
    }
    let mut rng = match outcomes {
        Outcomes::Sampled(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        Outcomes::Fixed(_) => None,
    };
    let mut got: Vec<Option<bool>> = vec![None; c.cbits()];
    for (index, ins) in c.instructions().iter().enumerate() {
        let non_clifford = || VerifyError::NonClifford { index, op: ins.to_string() };
        let fires = ins.cond.as_ref().is_none_or(|cond| cond.eval(|b| got[b] == Some(true)));
        let q = ins.qubits[0];
        let angle = ins.angle.unwrap_or(0.0);
        match ins.op {
            Op::PrepZ => t.reset(q),
            Op::PrepX => {
                t.reset(q);
                t.h(q);
            }
            Op::PrepTheta => {
                let k = quarter_turns(angle, FRAC_PI_2).ok_or_else(non_clifford)?;
                t.reset(q);
                t.h(q);
                for _ in 0..k.rem_euclid(4) {
                    t.s(q);
                }
            }
            Op::Rz => {
                let k = quarter_turns(angle, FRAC_PI_2).ok_or_else(non_clifford)?;
                for _ in 0..k.rem_euclid(4) {
                    t.s(q);
                }
            }
            Op::Clifford1Q => t.clifford(q, ins.clifford.expect("validated")),
            Op::CNOT => t.cnot(q, ins.qubits[1]),
            Op::CorrPauli => {
                if fires {
                    t.pauli(q, ins.pauli.expect("validated"));
                }
            }
            Op::CorrRz2Theta => {
                // exp(-i a Z) = Rz(2a)
                let k = quarter_turns(2.0 * angle, FRAC_PI_2).ok_or_else(non_clifford)?;
                if fires {
                    for _ in 0..k.rem_euclid(4) {
                        t.s(q);
                    }
                }
            }
            Op::ExpZString => {
                let k = quarter_turns(angle, FRAC_PI_2).ok_or_else(non_clifford)?;
                if k.rem_euclid(2) == 1 {
                    for &qq in &ins.qubits {
                        t.pauli(qq, Pauli::Z);
                    }
                }
            }
            _ if ins.op.is_measurement() => {
                let ps = ins.measured_pauli().expect("measurement");
                let cbit = ins.cbit.expect("validated");
                let choose = || match (&mut rng, outcomes) {
                    (Some(r), _) => r.random_bool(0.5),
                    (None, Outcomes::Fixed(v)) => v.get(cbit).copied().unwrap_or(false),
                    (None, _) => false,
                };
                let (m, _) = t.measure(&ps, choose);
                got[cbit] = Some(m);
            }
            _ => unreachable!("all opcodes covered"),
        }
    }
    Ok(TableauRun { tableau: t, outcomes: got, data, ref_base })
}

/// Incrementally reduced GF(2) basis with combination tracking.
struct Eliminator {
    /// (reduced vector, combination of original rows, pivot column)
    basis: Vec<(Bits, Bits, usize)>,
}

/// Images `(U X_k U†, U Z_k U†)` for each data qubit `k` of the branch the
/// run followed. Fails if leftover qubits stay entangled with the data.
pub fn conjugation_action(run: &TableauRun) -> Result<Vec<(SignedString, SignedString)>, VerifyError> {
    let t = &run.tableau;
    let n_all = t.n;
    let nd = run.data.len();
    let is_data: Vec<bool> = {
        let mut v = vec![false; n_all];
        for &d in &run.data {
            v[d] = true;
        }
        v
    };
    // Columns: x and z bits of every non-data qubit.
    let others: Vec<usize> = (0..n_all).filter(|&q| !is_data[q]).collect();
    let width = 2 * others.len();
    let stabs = &t.rows[n_all..];
    let project = |r: &Row| -> Bits {
        let mut b = Bits::zeros(width);
        for (k, &q) in others.iter().enumerate() {
            b.set(2 * k, r.x.get(q));
            b.set(2 * k + 1, r.z.get(q));
        }
        b
    };
    let mut elim = Eliminator { basis: Vec::new() };
    for (i, r) in stabs.iter().enumerate() {
        let mut v = project(r);
        let mut combo = Bits::zeros(stabs.len());
        combo.set(i, true);
        for (bv, bc, col) in &elim.basis {
            if v.get(*col) {
                v.xor(bv);
                combo.xor(bc);
            }
        }
        if let Some(col) = (0..width).find(|&c| v.get(c)) {
            for (bv, bc, _) in elim.basis.iter_mut() {
                if bv.get(col) {
                    bv.xor(&v);
                    bc.xor(&combo);
                }
            }
            elim.basis.push((v, combo, col));
        }
    }
    let solve = |target: &Bits| -> Option<Bits> {
        let mut v = target.clone();
        let mut combo = Bits::zeros(stabs.len());
        for (bv, bc, col) in &elim.basis {
            if v.get(*col) {
                v.xor(bv);
                combo.xor(bc);
            }
        }
        v.is_zero().then_some(combo)
    };
    let ref_col = |k: usize| others.iter().position(|&q| q == run.ref_base + k).expect("reference qubit");
    let mut out = Vec::with_capacity(nd);
    for k in 0..nd {
        let mut pair = Vec::with_capacity(2);
        for letter in [Pauli::X, Pauli::Z] {
            let mut target = Bits::zeros(width);
            let col = ref_col(k);
            target.set(2 * col, letter.x_bit());
            target.set(2 * col + 1, letter.z_bit());
            let combo = solve(&target).ok_or_else(|| VerifyError::Simulation {
                index: 0,
                reason: "leftover qubits entangled with data; no conjugation action".into(),
            })?;
            let mut acc = Row::identity(n_all);
            for (i, r) in stabs.iter().enumerate() {
                if combo.get(i) {
                    acc.left_mul(r, n_all);
                }
            }
            pair.push(t.signed(&acc, run.data.iter().copied()));
        }
        let z = pair.pop().expect("two images");
        let x = pair.pop().expect("two images");
        out.push((x, z));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Instruction, Role};

    #[test]
    fn prep_zero_register() {
        let mut c = Circuit::new();
        for i in 0..4 {
            let q = c.add_qubit(Role::Ancilla, i);
            c.push(Instruction::prep_z(q));
        }
        let run = tableau_run(&c, &Outcomes::Fixed(vec![])).unwrap();
        let s: Vec<String> = run.tableau.stabilizers().iter().map(|s| s.to_string()).collect();
        assert_eq!(s, vec!["+ZIII", "+IZII", "+IIZI", "+IIIZ"]);
        assert!(run.tableau.is_valid());
    }

    #[test]
    fn hadamard_and_cnot_action() {
        let mut c = Circuit::with_data(2);
        c.push(Instruction::clifford(0, Clifford1::h()));
        c.push(Instruction::cnot(0, 1));
        let run = tableau_run(&c, &Outcomes::Fixed(vec![])).unwrap();
        let a = conjugation_action(&run).unwrap();
        let show: Vec<(String, String)> = a.iter().map(|(x, z)| (x.to_string(), z.to_string())).collect();
        // X0 -> Z0 (H) then Z0 under CNOT stays Z0; Z0 -> X0 -> X0 X1.
        assert_eq!(show[0], ("+ZI".to_string(), "+XX".to_string()));
        assert_eq!(show[1], ("+IX".to_string(), "+ZZ".to_string()));
    }

    #[test]
    fn signs_from_pauli_gates() {
        let mut c = Circuit::with_data(1);
        c.push(Instruction::clifford(0, Clifford1::pauli(Pauli::Y)));
        let run = tableau_run(&c, &Outcomes::Fixed(vec![])).unwrap();
        let a = conjugation_action(&run).unwrap();
        assert_eq!(a[0].0.to_string(), "-X");
        assert_eq!(a[0].1.to_string(), "-Z");
    }

    #[test]
    fn rejects_generic_rotation() {
        let mut c = Circuit::with_data(1);
        c.push(Instruction::rz(0, 0.3));
        assert!(matches!(tableau_run(&c, &Outcomes::Sampled(1)), Err(VerifyError::NonClifford { .. })));
    }
}
