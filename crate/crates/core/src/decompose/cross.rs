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


//! Agreement between the rewritten circuit and the closed-form schedule.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{build_schedule, decompose};
use crate::angle::Angle;
use crate::ir::{Cbit, Circuit, Op, Parity, QubitId};
use crate::pauli::PauliString;
use crate::verify::{check_equivalence, target_exponential, VerifyError};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CrossVerdict {
    /// Both circuits match the target in every branch.
    Equivalent { worst_deviation: f64 },
    NotEquivalent { circuit: &'static str, failing_branch: Option<String>, worst_deviation: f64 },
    /// Too large for dense simulation; only structure was compared.
    Unverifiable { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub structural_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<String>,
    pub verdict: CrossVerdict,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CrossCheckError {
    #[error("{0} is not in Z form")]
    NotZForm(String),
}

/// Compares `decompose(p, theta)` with `build_schedule`: structurally, by
/// per-qubit instruction timelines under a classical-bit renaming, then as
/// channels through the dense oracle when the size allows.
pub fn cross_check(p: &PauliString, theta: Angle) -> Result<CrossCheck, CrossCheckError> {
    if !p.is_z_form() {
        return Err(CrossCheckError::NotZForm(p.to_string()));
    }
    let dec = decompose(p, theta);
    let weight = p.weight();
    let structure = if weight == 0 {
        if dec.is_empty() { Ok(()) } else { Err("identity string produced instructions".to_string()) }
    } else {
        compare(&dec, &build_schedule(weight, theta).to_circuit())
    };
    let verdict = match weight {
        0 => oracle(p, theta, &dec, None),
        w => oracle(p, theta, &dec, Some(&embed(&build_schedule(w, theta).to_circuit(), &dec))),
    };
    Ok(CrossCheck { structural_ok: structure.is_ok(), mismatch: structure.err(), verdict })
}

/// Places the schedule's circuit on the decomposer's roster so that idle
/// data qubits take part in the comparison.
fn embed(sched: &Circuit, dec: &Circuit) -> Circuit {
    let map = qubit_map(sched, dec).expect("layouts agree");
    let mut c = Circuit::new();
    for q in dec.qubits() {
        c.add_qubit(q.role, q.pos);
    }
    for _ in 0..sched.cbits() {
        c.alloc_cbit();
    }
    for ins in sched.instructions() {
        let mut ins = ins.clone();
        ins.qubits = ins.qubits.iter().map(|q| map[q]).collect();
        c.push(ins);
    }
    c
}

fn oracle(p: &PauliString, theta: Angle, dec: &Circuit, sched: Option<&Circuit>) -> CrossVerdict {
    let target = match target_exponential(p, theta) {
        Ok(t) => t,
        Err(e) => return CrossVerdict::Unverifiable { reason: e.to_string() },
    };
    let mut worst: f64 = 0.0;
    for (name, c) in [("decompose", Some(dec)), ("schedule", sched)] {
        let Some(c) = c else { continue };
        match check_equivalence(c, &target) {
            Ok(v) if v.equivalent => worst = worst.max(v.worst_deviation),
            Ok(v) => {
                return CrossVerdict::NotEquivalent {
                    circuit: name,
                    failing_branch: v.failing_branch,
                    worst_deviation: v.worst_deviation,
                }
            }
            Err(e @ VerifyError::LimitExceeded { .. }) => return CrossVerdict::Unverifiable { reason: e.to_string() },
            Err(e) => {
                return CrossVerdict::NotEquivalent { circuit: name, failing_branch: Some(e.to_string()), worst_deviation: f64::INFINITY }
            }
        }
    }
    CrossVerdict::Equivalent { worst_deviation: worst }
}

/// Schedule qubit -> decomposer qubit, matched by line position and role.
fn qubit_map(sched: &Circuit, dec: &Circuit) -> Result<BTreeMap<QubitId, QubitId>, String> {
    let by_pos: BTreeMap<usize, (QubitId, _)> = dec.qubits().iter().map(|q| (q.pos, (q.id, q.role))).collect();
    sched
        .qubits()
        .iter()
        .map(|q| match by_pos.get(&q.pos) {
            Some(&(id, role)) if role == q.role => Ok((q.id, id)),
            _ => Err(format!("no {:?} qubit at position {} in the decomposition", q.role, q.pos)),
        })
        .collect()
}

struct BitMap {
    fwd: BTreeMap<Cbit, Cbit>,
    back: BTreeMap<Cbit, Cbit>,
}

impl BitMap {
    fn bind(&mut self, s: Cbit, d: Cbit) -> Result<(), String> {
        match (self.fwd.get(&s), self.back.get(&d)) {
            (None, None) => {
                self.fwd.insert(s, d);
                self.back.insert(d, s);
                Ok(())
            }
            (Some(&x), Some(&y)) if x == d && y == s => Ok(()),
            _ => Err(format!("schedule bit c{s} and decomposer bit c{d} are not paired consistently")),
        }
    }

    fn parity(&self, p: &Parity) -> Result<Parity, String> {
        let bits = p
            .bits()
            .iter()
            .map(|b| self.fwd.get(b).copied().ok_or_else(|| format!("condition reads unmatched bit c{b}")))
            .collect::<Result<Vec<_>, _>>()?;
        let base = if p.flip() { Parity::one() } else { Parity::zero() };
        Ok(Parity::of_bits(bits).xor(&base))
    }
}

fn compare(dec: &Circuit, sched: &Circuit) -> Result<(), String> {
    let qmap = qubit_map(sched, dec)?;
    let mapped: BTreeSet<QubitId> = qmap.values().copied().collect();
    let body = |c: &Circuit| c.trailing_block_start();
    let timeline = |c: &Circuit, q: QubitId| -> Vec<usize> { (0..body(c)).filter(|&i| c.instructions()[i].touches(q)).collect() };
    for q in dec.qubits() {
        if !mapped.contains(&q.id) && !timeline(dec, q.id).is_empty() {
            return Err(format!("q{} is used by the decomposition but not by the schedule", q.id));
        }
    }
    let mut bits = BitMap { fwd: BTreeMap::new(), back: BTreeMap::new() };
    let mut deferred = Vec::new();
    for (&sq, &dq) in &qmap {
        let (st, dt) = (timeline(sched, sq), timeline(dec, dq));
        if st.len() != dt.len() {
            return Err(format!("q{dq}: {} instructions in the schedule, {} in the decomposition", st.len(), dt.len()));
        }
        for (&si, &di) in st.iter().zip(&dt) {
            let (s, d) = (&sched.instructions()[si], &dec.instructions()[di]);
            let operands: Vec<QubitId> = s.qubits.iter().map(|q| qmap[q]).collect();
            let same_operands = if s.op.is_two_body() {
                operands.iter().collect::<BTreeSet<_>>() == d.qubits.iter().collect::<BTreeSet<_>>()
            } else {
                operands == d.qubits
            };
            let same_angle = match (s.angle, d.angle) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                (a, b) => a.is_none() && b.is_none(),
            };
            if s.op != d.op || !same_operands || !same_angle || s.clifford != d.clifford {
                return Err(format!("q{dq}: schedule has `{s}` where the decomposition has `{d}`"));
            }
            if let (Some(sb), Some(db)) = (s.cbit, d.cbit) {
                bits.bind(sb, db)?;
            }
            if s.cond.is_some() {
                deferred.push((si, di));
            }
        }
    }
    for (si, di) in deferred {
        let (s, d) = (&sched.instructions()[si], &dec.instructions()[di]);
        let sc = bits.parity(s.cond.as_ref().expect("correction"))?;
        if Some(&sc) != d.cond.as_ref() {
            return Err(format!("condition of `{d}` differs from the schedule's `{s}`"));
        }
    }
    let block = |c: &Circuit, map: &dyn Fn(&Parity) -> Result<Parity, String>, qm: &dyn Fn(QubitId) -> QubitId| {
        c.instructions()[body(c)..]
            .iter()
            .map(|i| Ok((qm(i.qubits[0]), i.pauli, map(i.cond.as_ref().expect("correction"))?)))
            .collect::<Result<Vec<_>, String>>()
    };
    let ours = block(sched, &|p| bits.parity(p), &|q| qmap[&q])?;
    let theirs = block(dec, &|p| Ok(p.clone()), &|q| q)?;
    let key = |v: &Vec<(QubitId, Option<crate::pauli::Pauli>, Parity)>| {
        let mut v: Vec<String> = v.iter().map(|(q, p, c)| format!("{q} {p:?} {c}")).collect();
        v.sort();
        v
    };
    if key(&ours) != key(&theirs) {
        return Err(format!("correction blocks differ: schedule {:?}, decomposition {:?}", key(&ours), key(&theirs)));
    }
    if dec.instructions()[..body(dec)].iter().any(|i| i.op == Op::CorrPauli) {
        return Err("decomposition has a Pauli correction before its final block".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::parse_pauli;

    #[test]
    fn small_cases_agree() {
        for (p, theta) in [("ZZ", Angle::parse("pi/4").unwrap()), ("ZZZZ", Angle::new(0.3)), ("ZIZ", Angle::new(-0.9))] {
            let r = cross_check(&parse_pauli(p).unwrap(), theta).unwrap();
            assert!(r.structural_ok, "{p}: {:?}", r.mismatch);
            assert!(matches!(r.verdict, CrossVerdict::Equivalent { .. }), "{p}: {:?}", r.verdict);
        }
    }

    #[test]
    fn clifford_angles_agree() {
        for n in 1..=4 {
            for t in ["pi/2", "pi"] {
                let r = cross_check(&PauliString::all_z(n), Angle::parse(t).unwrap()).unwrap();
                assert!(r.structural_ok, "n={n} {t}: {:?}", r.mismatch);
                assert!(matches!(r.verdict, CrossVerdict::Equivalent { .. }), "n={n}: {:?}", r.verdict);
            }
        }
    }

    #[test]
    fn large_strings_are_structural_only() {
        let r = cross_check(&PauliString::all_z(30), Angle::new(0.3)).unwrap();
        assert!(r.structural_ok, "{:?}", r.mismatch);
        assert!(matches!(r.verdict, CrossVerdict::Unverifiable { .. }));
    }

    #[test]
    fn rejects_non_z_form() {
        assert!(cross_check(&parse_pauli("XZ").unwrap(), Angle::new(0.3)).is_err());
    }
}
