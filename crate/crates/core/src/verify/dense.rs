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

//! Dense state-vector simulation with depth-first enumeration of
//! measurement branches.

use num_complex::Complex64 as C64;

use super::{DenseLimits, Input, VerifyError};
use crate::ir::{Circuit, Instruction, Op, QubitId};
use crate::pauli::Pauli;

/// Branches whose conditional probability falls below this are pruned.
pub const PRUNE: f64 = 1e-14;
/// Branching depth below which siblings run through `rayon::join`.
const PAR_DEPTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Slot {
    Qubit(QubitId),
    Ref(usize),
}

/// Live simulation state: amplitudes over `slots`, slot `k` being bit `k`.
/// Amplitudes are left unnormalised after projections; `norm2` holds
/// their squared norm.
#[derive(Clone)]
pub(crate) struct Sim {
    pub amps: Vec<C64>,
    pub norm2: f64,
    pub slots: Vec<Slot>,
    slot_of: Vec<Option<usize>>,
    pending_x: usize,
    pending_z: usize,
}

/// A finished branch handed to the leaf callback.
pub(crate) struct Leaf<'a> {
    pub sim: &'a Sim,
    pub bits: &'a [u8],
    pub prob: f64,
    pub fired: &'a [u32],
}

/// Aggregate over a walk.
pub(crate) struct Walk<A> {
    pub acc: A,
    pub leaves: usize,
    pub max_sum_error: f64,
}

fn parity(v: usize) -> bool {
    v.count_ones() & 1 == 1
}

/// Phase `i^ny (-1)^{|j & z|}` of `P|j>`.
fn pauli_phase(j: usize, z: usize, ny: u32) -> C64 {
    let base = match ny % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    };
    if parity(j & z) {
        -base
    } else {
        base
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn scale(v: &mut [C64], s: f64) {
    for a in v {
        *a *= s;
    }
}

impl Sim {
    pub fn new(c: &Circuit, input: &Input) -> Result<Sim, VerifyError> {
        let data = c.data_qubits();
        let n = data.len();
        let mut slot_of = vec![None; c.qubits().len()];
        match input {
            Input::Choi => {
                let mut slots: Vec<Slot> = (0..n).map(Slot::Ref).collect();
                for (k, &q) in data.iter().enumerate() {
                    slots.push(Slot::Qubit(q));
                    slot_of[q] = Some(n + k);
                }
                let dim = 1usize << n;
                let mut amps = vec![C64::new(0.0, 0.0); dim * dim];
                let a = 1.0 / (dim as f64).sqrt();
                for j in 0..dim {
                    amps[j | (j << n)] = C64::new(a, 0.0);
                }
                Ok(Sim { amps, norm2: 1.0, slots, slot_of, pending_x: 0, pending_z: 0 })
            }
            Input::State(s) => {
                if s.qubits != data || s.amps.len() != 1 << n {
                    return Err(VerifyError::BadInput("input state must cover the data qubits in id order".into()));
                }
                let nrm = norm_sqr(&s.amps).sqrt();
                if (nrm - 1.0).abs() > 1e-12 {
                    return Err(VerifyError::BadInput("input state is not normalised".into()));
                }
                let slots = data.iter().map(|&q| Slot::Qubit(q)).collect();
                for (k, &q) in data.iter().enumerate() {
                    slot_of[q] = Some(k);
                }
                Ok(Sim { amps: s.amps.clone(), norm2: 1.0, slots, slot_of, pending_x: 0, pending_z: 0 })
            }
        }
    }

    fn slot(&self, q: QubitId, index: usize) -> Result<usize, VerifyError> {
        self.slot_of[q].ok_or(VerifyError::Simulation { index, reason: format!("qubit {q} is not live") })
    }

    fn push_slot(&mut self, q: QubitId, lo: C64, hi: C64) {
        let len = self.amps.len();
        let mut next = Vec::with_capacity(2 * len);
        next.extend(self.amps.iter().map(|a| a * lo));
        next.extend(self.amps.iter().map(|a| a * hi));
        self.amps = next;
        self.slot_of[q] = Some(self.slots.len());
        self.slots.push(Slot::Qubit(q));
    }

    fn drop_slot(&mut self, k: usize) {
        if let Slot::Qubit(q) = self.slots.remove(k) {
            self.slot_of[q] = None;
        }
        for s in self.slot_of.iter_mut().flatten() {
            if *s > k {
                *s -= 1;
            }
        }
    }

    fn apply_1q(&mut self, k: usize, m: [[C64; 2]; 2]) {
        let stride = 1 << k;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i in base..base + stride {
                let (a0, a1) = (self.amps[i], self.amps[i + stride]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += 2 * stride;
        }
    }

    fn apply_diag(&mut self, k: usize, d0: C64, d1: C64) {
        let bit = 1 << k;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & bit == 0 { d0 } else { d1 };
        }
    }

    fn apply_cnot(&mut self, c: usize, t: usize) {
        let (cb, tb) = (1 << c, 1 << t);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    fn apply_exp_z(&mut self, mask: usize, theta: f64) {
        let (even, odd) = (C64::from_polar(1.0, theta), C64::from_polar(1.0, -theta));
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if parity(i & mask) { odd } else { even };
        }
    }

    fn apply_pauli(&mut self, x: usize, z: usize) {
        if x == 0 {
            for (i, a) in self.amps.iter_mut().enumerate() {
                if parity(i & z) {
                    *a = -*a;
                }
            }
            return;
        }
        let low = x & x.wrapping_neg();
        for i in 0..self.amps.len() {
            if i & low == 0 {
                let j = i ^ x;
                let (ai, aj) = (self.amps[i], self.amps[j]);
                // P|i> = ph(i)|j>, P|j> = ph(j)|i>
                self.amps[j] = pauli_phase(i, z, 0) * ai;
                self.amps[i] = pauli_phase(j, z, 0) * aj;
            }
        }
    }

    pub fn flush(&mut self) {
        if self.pending_x | self.pending_z != 0 {
            let (x, z) = (self.pending_x, self.pending_z);
            self.apply_pauli(x, z);
            self.pending_x = 0;
            self.pending_z = 0;
        }
    }

    fn masks(&self, ps: &[(QubitId, Pauli)], index: usize) -> Result<(usize, usize, u32), VerifyError> {
        let (mut x, mut z, mut ny) = (0, 0, 0);
        for &(q, p) in ps {
            let k = self.slot(q, index)?;
            if p.x_bit() {
                x |= 1 << k;
            }
            if p.z_bit() {
                z |= 1 << k;
            }
            if p == Pauli::Y {
                ny += 1;
            }
        }
        Ok((x, z, ny))
    }

    /// Both post-measurement branches of a Pauli observable, unnormalised,
    /// with their squared norms.
    fn project(&self, x: usize, z: usize, ny: u32) -> [(Vec<C64>, f64); 2] {
        let zero = C64::new(0.0, 0.0);
        let mut c0 = self.amps.clone();
        let mut c1 = vec![zero; self.amps.len()];
        if x == 0 {
            for (i, (a, b)) in c0.iter_mut().zip(c1.iter_mut()).enumerate() {
                if parity(i & z) {
                    *b = *a;
                    *a = zero;
                }
            }
        } else {
            let base = pauli_phase(0, 0, ny) * 0.5;
            let (pos, neg) = (base, -base);
            for (i, (a, b)) in c0.iter_mut().zip(c1.iter_mut()).enumerate() {
                let j = i ^ x;
                let w = if parity(j & z) { neg } else { pos } * self.amps[j];
                let h = *a * 0.5;
                *a = h + w;
                *b = h - w;
            }
        }
        let (n0, n1) = (norm_sqr(&c0), norm_sqr(&c1));
        [(c0, n0), (c1, n1)]
    }

    /// Both branches of a destructive single-qubit measurement with slot
    /// `k` removed, with their squared norms.
    fn project_out(&self, k: usize, x_basis: bool) -> [(Vec<C64>, f64); 2] {
        let half = self.amps.len() / 2;
        let bit = 1 << k;
        let zero = C64::new(0.0, 0.0);
        let mut c0 = vec![zero; half];
        let mut c1 = vec![zero; half];
        if bit == 1 {
            for ((src, a), b) in self.amps.chunks_exact(2).zip(c0.iter_mut()).zip(c1.iter_mut()) {
                *a = src[0];
                *b = src[1];
            }
        } else {
            for ((src, o0), o1) in self.amps.chunks_exact(2 * bit).zip(c0.chunks_exact_mut(bit)).zip(c1.chunks_exact_mut(bit)) {
                let (lo, hi) = src.split_at(bit);
                o0.copy_from_slice(lo);
                o1.copy_from_slice(hi);
            }
        }
        if x_basis {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for (a, b) in c0.iter_mut().zip(c1.iter_mut()) {
                let (a0, a1) = (*a, *b);
                *a = (a0 + a1) * s;
                *b = (a0 - a1) * s;
            }
        }
        let (n0, n1) = (norm_sqr(&c0), norm_sqr(&c1));
        [(c0, n0), (c1, n1)]
    }
}

/// Instruction order for simulation. A topological order of the
/// dependency graph (shared qubits, and condition bits after their writer)
/// that runs destructive measurements as soon as they are ready and delays
/// preparations until nothing else is. Instructions on disjoint qubits
/// commute, so branch operators are unchanged while fewer qubits are live.
pub(crate) fn execution_order(c: &Circuit) -> Vec<usize> {
    let ins = c.instructions();
    let mut last_on = vec![usize::MAX; c.qubits().len()];
    let mut writer = vec![usize::MAX; c.cbits()];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); ins.len()];
    let mut pending = vec![0usize; ins.len()];
    for (j, i) in ins.iter().enumerate() {
        let mut preds: Vec<usize> = i.qubits.iter().map(|&q| last_on[q]).collect();
        if let Some(cond) = &i.cond {
            preds.extend(cond.bits().iter().map(|&b| writer[b]));
        }
        preds.retain(|&p| p != usize::MAX);
        preds.sort_unstable();
        preds.dedup();
        pending[j] = preds.len();
        for p in preds {
            succ[p].push(j);
        }
        for &q in &i.qubits {
            last_on[q] = j;
        }
        if let Some(b) = i.cbit {
            writer[b] = j;
        }
    }
    let rank = |j: usize| match ins[j].op {
        op if op.is_destructive() => 0u8,
        op if op.is_prep() => 2,
        _ => 1,
    };
    let mut ready: std::collections::BTreeSet<(u8, usize)> =
        (0..ins.len()).filter(|&j| pending[j] == 0).map(|j| (rank(j), j)).collect();
    let mut order = Vec::with_capacity(ins.len());
    while let Some((r, j)) = ready.iter().next().copied() {
        ready.remove(&(r, j));
        order.push(j);
        for &k in &succ[j] {
            pending[k] -= 1;
            if pending[k] == 0 {
                ready.insert((rank(k), k));
            }
        }
    }
    order
}

/// Checks the qubit-count limits before any simulation.
pub(crate) fn check_limits(c: &Circuit, input: &Input, limits: &DenseLimits) -> Result<(), VerifyError> {
    c.validate().map_err(VerifyError::InvalidCircuit)?;
    let data = c.data_qubits();
    if matches!(input, Input::Choi) && data.len() > limits.operator_qubits {
        return Err(VerifyError::LimitExceeded { what: "operator qubits", needed: data.len(), limit: limits.operator_qubits });
    }
    let mut live = vec![false; c.qubits().len()];
    for &q in &data {
        live[q] = true;
    }
    let mut count = data.len();
    let mut peak = count;
    for index in execution_order(c) {
        let ins = &c.instructions()[index];
        if ins.op.is_prep() {
            let q = ins.qubits[0];
            if live[q] {
                return Err(VerifyError::Simulation { index, reason: format!("preparation of live qubit {q}") });
            }
            live[q] = true;
            count += 1;
            peak = peak.max(count);
        } else if ins.op.is_destructive() {
            let q = ins.qubits[0];
            if live[q] {
                live[q] = false;
                count -= 1;
            }
        }
    }
    if peak > limits.state_qubits {
        return Err(VerifyError::LimitExceeded { what: "live qubits", needed: peak, limit: limits.state_qubits });
    }
    Ok(())
}

pub(crate) struct Walker<'a, A, L, M>
where
    L: Fn(&Leaf) -> A + Sync,
    M: Fn(A, A) -> A + Sync,
{
    pub circuit: &'a Circuit,
    pub leaf: L,
    pub merge: M,
}

enum Step {
    Continue,
    Branch { children: [(Vec<C64>, f64); 2], drop: Option<usize>, cbit: usize },
}

impl<'a, A, L, M> Walker<'a, A, L, M>
where
    A: Send,
    L: Fn(&Leaf) -> A + Sync,
    M: Fn(A, A) -> A + Sync,
{
    pub fn run(&self, sim: Sim) -> Result<Walk<A>, VerifyError> {
        let bits = vec![2u8; self.circuit.cbits()];
        let order = execution_order(self.circuit);
        self.walk(&order, sim, 0, bits, 1.0, Vec::new(), 0)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        order: &[usize],
        mut sim: Sim,
        mut idx: usize,
        mut bits: Vec<u8>,
        prob: f64,
        mut fired: Vec<u32>,
        depth: usize,
    ) -> Result<Walk<A>, VerifyError> {
        let ins = self.circuit.instructions();
        while idx < order.len() {
            let i = &ins[order[idx]];
            match self.step(&mut sim, i, order[idx], &bits, &mut fired)? {
                Step::Continue => {}
                Step::Branch { children, drop, cbit } => {
                    let [(c0, n0), (c1, n1)] = children;
                    let (p0, p1) = (n0 / sim.norm2, n1 / sim.norm2);
                    let sum_err = (p0 + p1 - 1.0).abs();
                    let live: Vec<(u8, Vec<C64>, f64, f64)> = [(0u8, c0, p0, n0), (1u8, c1, p1, n1)]
                        .into_iter()
                        .filter(|(_, _, p, _)| *p >= PRUNE)
                        .collect();
                    if live.len() == 1 {
                        let (b, v, p, nv) = live.into_iter().next().expect("one child");
                        sim.amps = v;
                        sim.norm2 = nv;
                        if let Some(k) = drop {
                            sim.drop_slot(k);
                        }
                        bits[cbit] = b;
                        let mut w = self.walk(order, sim, idx + 1, bits, prob * p, fired, depth)?;
                        w.max_sum_error = w.max_sum_error.max(sum_err);
                        return Ok(w);
                    }
                    let mut it = live.into_iter();
                    let (b0, v0, q0, m0) = it.next().expect("two children");
                    let (b1, v1, q1, m1) = it.next().expect("two children");
                    let child = |b: u8, v: Vec<C64>, p: f64, nv: f64, sim: Sim, bits: Vec<u8>, fired: Vec<u32>| {
                        let mut s = sim;
                        s.amps = v;
                        s.norm2 = nv;
                        if let Some(k) = drop {
                            s.drop_slot(k);
                        }
                        let mut bits = bits;
                        bits[cbit] = b;
                        self.walk(order, s, idx + 1, bits, prob * p, fired, depth + 1)
                    };
                    let shell = Sim { amps: Vec::new(), ..sim.clone() };
                    let (r0, r1) = if depth < PAR_DEPTH {
                        let (s0, bt0, f0) = (shell.clone(), bits.clone(), fired.clone());
                        rayon::join(move || child(b0, v0, q0, m0, s0, bt0, f0), move || child(b1, v1, q1, m1, shell, bits, fired))
                    } else {
                        (child(b0, v0, q0, m0, shell.clone(), bits.clone(), fired.clone()), child(b1, v1, q1, m1, shell, bits, fired))
                    };
                    let (r0, r1) = (r0?, r1?);
                    return Ok(Walk {
                        acc: (self.merge)(r0.acc, r1.acc),
                        leaves: r0.leaves + r1.leaves,
                        max_sum_error: r0.max_sum_error.max(r1.max_sum_error).max(sum_err),
                    });
                }
            }
            idx += 1;
        }
        sim.flush();
        let acc = (self.leaf)(&Leaf { sim: &sim, bits: &bits, prob, fired: &fired });
        Ok(Walk { acc, leaves: 1, max_sum_error: 0.0 })
    }

    fn step(
        &self,
        sim: &mut Sim,
        i: &Instruction,
        index: usize,
        bits: &[u8],
        fired: &mut Vec<u32>,
    ) -> Result<Step, VerifyError> {
        let cond = || {
            i.cond.as_ref().is_none_or(|c| c.eval(|b| bits[b] == 1))
        };
        if i.op == Op::CorrPauli {
            if cond() {
                fired.push(index as u32);
                if let Some(k) = sim.slot_of[i.qubits[0]] {
                    let p = i.pauli.unwrap_or(Pauli::I);
                    if p.x_bit() {
                        sim.pending_x ^= 1 << k;
                    }
                    if p.z_bit() {
                        sim.pending_z ^= 1 << k;
                    }
                }
            }
            return Ok(Step::Continue);
        }
        sim.flush();
        let q0 = i.qubits[0];
        let angle = i.angle.unwrap_or(0.0);
        match i.op {
            Op::PrepZ | Op::PrepX | Op::PrepTheta => {
                if sim.slot_of[q0].is_some() {
                    return Err(VerifyError::Simulation { index, reason: format!("preparation of live qubit {q0}") });
                }
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let (lo, hi) = match i.op {
                    Op::PrepZ => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
                    Op::PrepX => (C64::new(s, 0.0), C64::new(s, 0.0)),
                    _ => (C64::from_polar(s, -angle / 2.0), C64::from_polar(s, angle / 2.0)),
                };
                sim.push_slot(q0, lo, hi);
            }
            Op::Clifford1Q => {
                let k = sim.slot(q0, index)?;
                sim.apply_1q(k, i.clifford.expect("validated").matrix());
            }
            Op::Rz => {
                let k = sim.slot(q0, index)?;
                sim.apply_diag(k, C64::from_polar(1.0, -angle / 2.0), C64::from_polar(1.0, angle / 2.0));
            }
            Op::CorrRz2Theta => {
                if cond() {
                    fired.push(index as u32);
                    let k = sim.slot(q0, index)?;
                    sim.apply_diag(k, C64::from_polar(1.0, -angle), C64::from_polar(1.0, angle));
                }
            }
            Op::CNOT => {
                let (c, t) = (sim.slot(q0, index)?, sim.slot(i.qubits[1], index)?);
                sim.apply_cnot(c, t);
            }
            Op::ExpZString => {
                let mut mask = 0;
                for &q in &i.qubits {
                    mask |= 1 << sim.slot(q, index)?;
                }
                sim.apply_exp_z(mask, angle);
            }
            Op::MeasX | Op::MeasZ => {
                let k = sim.slot(q0, index)?;
                let children = sim.project_out(k, i.op == Op::MeasX);
                return Ok(Step::Branch { children, drop: Some(k), cbit: i.cbit.expect("validated") });
            }
            Op::MeasXX | Op::MeasZZ | Op::OvalX | Op::OvalZ | Op::MeasZString => {
                let ps = i.measured_pauli().expect("measurement");
                let (x, z, ny) = sim.masks(&ps, index)?;
                let children = sim.project(x, z, ny);
                return Ok(Step::Branch { children, drop: None, cbit: i.cbit.expect("validated") });
            }
            Op::CorrPauli => unreachable!("handled above"),
        }
        Ok(Step::Continue)
    }
}

/// The branch's data-qubit output: a `D x cols` matrix, row-major, where
/// `cols` is `D` for Choi input and 1 for state input. Leftover live
/// ancillae must factor out; otherwise an error string is returned.
pub(crate) fn extract(sim: &Sim, data: &[QubitId]) -> Result<(Vec<C64>, usize, usize), String> {
    let n_ref = sim.slots.iter().filter(|s| matches!(s, Slot::Ref(_))).count();
    let mut data_slot = Vec::with_capacity(data.len());
    for &q in data {
        match sim.slot_of[q] {
            Some(k) => data_slot.push(k),
            None => return Err(format!("data qubit {q} was consumed")),
        }
    }
    let mut ref_slot = vec![0; n_ref];
    let mut extra = Vec::new();
    for (k, s) in sim.slots.iter().enumerate() {
        match *s {
            Slot::Ref(r) => ref_slot[r] = k,
            Slot::Qubit(q) if !data.contains(&q) => extra.push(k),
            _ => {}
        }
    }
    let rows = 1usize << data.len();
    let cols = 1usize << n_ref;
    let offsets = |slots: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|v| slots.iter().enumerate().filter(|(b, _)| v >> b & 1 == 1).map(|(_, &k)| 1 << k).sum())
            .collect()
    };
    let row_off = offsets(&data_slot, rows);
    let col_off = offsets(&ref_slot, cols);
    let extra_off = offsets(&extra, 1 << extra.len());
    let gather = |e: usize, f: f64| -> Vec<C64> {
        let mut v = Vec::with_capacity(rows * cols);
        for &r in &row_off {
            for &c in &col_off {
                v.push(sim.amps[r + c + e] * f);
            }
        }
        v
    };
    let scale_to_unitary = (cols as f64).sqrt();
    if extra.is_empty() {
        return Ok((gather(0, scale_to_unitary / sim.norm2.sqrt()), rows, cols));
    }
    let blocks: Vec<Vec<C64>> = extra_off.iter().map(|&e| gather(e, 1.0 / sim.norm2.sqrt())).collect();
    let best = (0..blocks.len())
        .max_by(|&a, &b| norm_sqr(&blocks[a]).total_cmp(&norm_sqr(&blocks[b])))
        .expect("at least one block");
    let mut u = blocks[best].clone();
    let nu = norm_sqr(&u).sqrt();
    scale(&mut u, 1.0 / nu);
    let mut residual = 0.0;
    for b in &blocks {
        let overlap: C64 = u.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
        residual += b.iter().zip(&u).map(|(y, x)| (y - overlap * x).norm_sqr()).sum::<f64>();
    }
    if residual > 1e-18 {
        return Err(format!("leftover qubits remain entangled with the data (residual {residual:.3e})"));
    }
    scale(&mut u, scale_to_unitary);
    Ok((u, rows, cols))
}

/// `min_phi ||u - e^{i phi} t||_F` with phi fitted at the largest entry of `u`.
pub(crate) fn phase_deviation(u: &[C64], t: &[C64]) -> f64 {
    // Largest magnitude, ties within 1e-12 going to the lowest index.
    let mut best = 0;
    let mut bar = f64::NEG_INFINITY;
    for (k, a) in u.iter().enumerate() {
        if a.norm_sqr() > bar {
            best = k;
            let m = a.norm() + 1e-12;
            bar = m * m;
        }
    }
    let phase = if t[best].norm() > 1e-12 {
        let r = u[best] / t[best];
        r / r.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    u.iter().zip(t).map(|(a, b)| (a - phase * b).norm_sqr()).sum::<f64>().sqrt()
}
