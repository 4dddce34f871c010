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


//! The individual rewrite rules.
//!
//! Every rule has a matcher, `match_at`, that recognises the pattern at one
//! instruction index, and an `apply_*` function that re-runs the matcher on
//! the site it is given before rewriting. Byproducts a rule leaves behind are
//! pushed to the end of the circuit by [`propagate`].

use super::propagate::{merge_trailing, propagate, substitute_after, SymFrame};
use super::{RewriteError, RewriteSite, RuleName};
use crate::angle::Angle;
use crate::clifford::Clifford1;
use crate::frame::{LsTable, RuleTables, Slot};
use crate::ir::{Cbit, Circuit, Instruction, Op, Parity, QubitId, Role};
use crate::pauli::Pauli;

/// What a string node does with its Z...Z operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeKind {
    /// `exp(i theta Z...Z)`.
    Exp(f64),
    /// Non-destructive parity measurement into the given bit.
    Meas(Cbit),
}

/// The cheapest instruction sequence for a string node over `qubits`.
pub fn lower_node(qubits: &[QubitId], kind: NodeKind) -> Vec<Instruction> {
    match kind {
        NodeKind::Meas(b) => match qubits.len() {
            1 => vec![Instruction::oval_z(qubits[0], b)],
            2 => vec![Instruction::meas_zz(qubits[0], qubits[1], b)],
            _ => vec![Instruction::meas_z_string(qubits.to_vec(), b)],
        },
        NodeKind::Exp(theta) => {
            let angle = Angle::new(theta);
            match (qubits.len(), angle.quarter_turns()) {
                (n, Some(k)) if n <= 2 => {
                    if k % 2 == 1 {
                        qubits.iter().map(|&q| Instruction::clifford(q, Clifford1::pauli(Pauli::Z))).collect()
                    } else {
                        Vec::new()
                    }
                }
                (1, None) => vec![Instruction::rz(qubits[0], -2.0 * theta)],
                _ => vec![Instruction::exp_z_string(qubits.to_vec(), theta)],
            }
        }
    }
}

fn no_match(rule: RuleName, index: usize, reason: impl Into<String>) -> RewriteError {
    RewriteError::NoMatch { rule, index, reason: reason.into() }
}

/// All matches of `rule`, possibly overlapping, in instruction order.
pub(crate) fn matches(c: &Circuit, rule: RuleName) -> Vec<RewriteSite> {
    (0..c.len()).filter_map(|i| match_at(c, rule, i).ok()).collect()
}

/// Recognises `rule` anchored at instruction `i`.
pub(crate) fn match_at(c: &Circuit, rule: RuleName, i: usize) -> Result<RewriteSite, String> {
    let ins = c.instructions().get(i).ok_or("index out of range")?;
    match rule {
        RuleName::ROT => match_rot(ins, i),
        RuleName::PG => match_pg(ins, i),
        RuleName::LS1 | RuleName::LS2 => match ins.op {
            Op::CNOT => Ok(RewriteSite::new(rule, (i, i + 1), &[("control", ins.qubits[0]), ("target", ins.qubits[1])])),
            op => Err(format!("{op} is not a CNOT")),
        },
        RuleName::MR => match_mr(c, i),
        RuleName::FUSE => match_fuse(c, i),
        RuleName::XXC | RuleName::ZZC => {
            let want = if rule == RuleName::XXC { Op::MeasXX } else { Op::MeasZZ };
            if ins.op != want {
                return Err(format!("{} is not {want}", ins.op));
            }
            Ok(RewriteSite::new(rule, (i, i + 1), &[("first", ins.qubits[0]), ("second", ins.qubits[1])]))
        }
        RuleName::REMX | RuleName::REMZ => match_rem(c, rule, i),
        RuleName::CnotComm => match_comm(c, i),
    }
}

fn node_binding(qubits: &[QubitId]) -> Vec<(String, QubitId)> {
    qubits.iter().enumerate().map(|(k, &q)| (format!("q{k}"), q)).collect()
}

fn node_site(rule: RuleName, i: usize, qubits: &[QubitId]) -> RewriteSite {
    let names = node_binding(qubits);
    let refs: Vec<(&str, QubitId)> = names.iter().map(|(k, q)| (k.as_str(), *q)).collect();
    RewriteSite::new(rule, (i, i + 1), &refs)
}

fn match_rot(ins: &Instruction, i: usize) -> Result<RewriteSite, String> {
    if ins.op != Op::ExpZString {
        return Err(format!("{} is not an exponential node", ins.op));
    }
    if Angle::new(ins.angle.unwrap_or(0.0)).is_clifford() {
        return Err("clifford angle needs no rotation ancilla".into());
    }
    Ok(node_site(RuleName::ROT, i, &ins.qubits))
}

fn match_pg(ins: &Instruction, i: usize) -> Result<RewriteSite, String> {
    let k = ins.qubits.len();
    match ins.op {
        Op::ExpZString if k >= 2 => Ok(node_site(RuleName::PG, i, &ins.qubits)),
        Op::MeasZString if k >= 3 => Ok(node_site(RuleName::PG, i, &ins.qubits)),
        Op::ExpZString | Op::MeasZString => Err(format!("node over {k} qubits is too short")),
        op => Err(format!("{op} is not a string node")),
    }
}

fn match_mr(c: &Circuit, i: usize) -> Result<RewriteSite, String> {
    let ins = &c.instructions()[i];
    let reset = match ins.op {
        Op::MeasX => Op::PrepX,
        Op::MeasZ => Op::PrepZ,
        op => return Err(format!("{op} is not a single-qubit destructive measurement")),
    };
    let q = ins.qubits[0];
    let j = c.next_on(q, i + 1).ok_or("measurement is not followed by a reset")?;
    let next = c.instructions()[j].op;
    if next != reset {
        return Err(format!("{} is followed by {next}", ins.op));
    }
    Ok(RewriteSite::new(RuleName::MR, (i, j + 1), &[("qubit", q)]))
}

fn conjugate_oval(op: Op) -> Option<Op> {
    match op {
        Op::MeasZZ => Some(Op::OvalX),
        Op::MeasXX => Some(Op::OvalZ),
        _ => None,
    }
}

fn match_fuse(c: &Circuit, i1: usize) -> Result<RewriteSite, String> {
    let first = &c.instructions()[i1];
    let oval = conjugate_oval(first.op).ok_or_else(|| format!("{} is not a two-body parity measurement", first.op))?;
    let mut reason = String::new();
    for (x, b) in [(first.qubits[0], first.qubits[1]), (first.qubits[1], first.qubits[0])] {
        let Some(i2) = c.next_on(b, i1 + 1) else {
            reason = "no oval follows".into();
            continue;
        };
        if c.instructions()[i2].op != oval {
            reason = format!("{} follows instead of {oval}", c.instructions()[i2].op);
            continue;
        }
        let Some(i3) = c.next_on(b, i2 + 1) else {
            reason = "no closing measurement".into();
            continue;
        };
        let third = &c.instructions()[i3];
        if third.op != first.op || !third.touches(x) {
            reason = format!("{} on the oval qubit does not repeat the pair", third.op);
            continue;
        }
        if c.next_on(x, i1 + 1) != Some(i3) {
            reason = "outer qubit is used between the two measurements".into();
            continue;
        }
        return Ok(RewriteSite::new(RuleName::FUSE, (i1, i3 + 1), &[("outer", x), ("oval", b)]));
    }
    Err(reason)
}

fn match_rem(c: &Circuit, rule: RuleName, i: usize) -> Result<RewriteSite, String> {
    let (prep, meas) = if rule == RuleName::REMX { (Op::PrepX, Op::MeasX) } else { (Op::PrepZ, Op::MeasZ) };
    let ins = &c.instructions()[i];
    if ins.op != prep {
        return Err(format!("{} is not {prep}", ins.op));
    }
    let a = ins.qubits[0];
    let j = c.next_on(a, i + 1).ok_or("ancilla is never used")?;
    let cx = &c.instructions()[j];
    if cx.op != Op::CNOT {
        return Err(format!("{} follows the preparation", cx.op));
    }
    // REMX: the ancilla is the target; REMZ: the ancilla is the control.
    let (anc_slot, live) = if rule == RuleName::REMX { (1, cx.qubits[0]) } else { (0, cx.qubits[1]) };
    if cx.qubits[anc_slot] != a {
        return Err("CNOT orientation does not match".into());
    }
    let k = c.next_on(a, j + 1).ok_or("ancilla is never measured")?;
    if c.instructions()[k].op != meas {
        return Err(format!("{} ends the ancilla", c.instructions()[k].op));
    }
    Ok(RewriteSite::new(rule, (i, k + 1), &[("ancilla", a), ("live", live)]))
}

type Binding = Vec<(&'static str, QubitId)>;

/// The CNOT_COMM shapes, with the rewritten pair.
fn comm_rewrite(first: &Instruction, second: &Instruction) -> Result<(Binding, Vec<Instruction>), String> {
    let (a, b) = (first.qubits[0], first.qubits[1]);
    let (c2, t2) = (second.qubits[0], second.qubits[1]);
    if (a, b) == (c2, t2) {
        return Ok((vec![("control", a), ("target", b)], Vec::new()));
    }
    if (a, b) == (t2, c2) {
        return Err("mutually targeting CNOTs have no commutation form".into());
    }
    if a == c2 {
        return Ok((vec![("control", a), ("first_target", b), ("second_target", t2)], vec![second.clone(), first.clone()]));
    }
    if b == t2 {
        return Ok((vec![("first_control", a), ("second_control", c2), ("target", b)], vec![second.clone(), first.clone()]));
    }
    if b == c2 {
        let extra = Instruction::cnot(a, t2);
        return Ok((vec![("a", a), ("b", b), ("c", t2)], vec![second.clone(), first.clone(), extra]));
    }
    if a == t2 {
        let extra = Instruction::cnot(c2, b);
        return Ok((vec![("a", a), ("b", b), ("c", c2)], vec![second.clone(), extra, first.clone()]));
    }
    Err("CNOTs are disjoint".into())
}

fn match_comm(c: &Circuit, i: usize) -> Result<RewriteSite, String> {
    let (site, _) = comm_parts(c, i)?;
    Ok(site)
}

fn comm_parts(c: &Circuit, i: usize) -> Result<(RewriteSite, Vec<Instruction>), String> {
    let first = &c.instructions()[i];
    if first.op != Op::CNOT {
        return Err(format!("{} is not a CNOT", first.op));
    }
    let j = (i + 1..c.len())
        .find(|&j| c.instructions()[j].shares_qubit(first))
        .ok_or("no later instruction shares a qubit")?;
    let second = &c.instructions()[j];
    if second.op != Op::CNOT {
        return Err(format!("next instruction on these qubits is {}", second.op));
    }
    if (i + 1..j).any(|k| c.instructions()[k].shares_qubit(second)) {
        return Err("second CNOT is not adjacent to the first".into());
    }
    let (binding, replacement) = comm_rewrite(first, second)?;
    Ok((RewriteSite::new(RuleName::CnotComm, (i, j + 1), &binding), replacement))
}

/// Re-matches `site` on `c`, rejecting stale or foreign sites.
fn confirm(c: &Circuit, site: &RewriteSite, rule: RuleName) -> Result<(), RewriteError> {
    let i = site.span.0;
    let found = match_at(c, rule, i).map_err(|reason| no_match(rule, i, reason))?;
    if site.rule != rule || found.span != site.span || found.binding != site.binding {
        return Err(no_match(rule, i, "site does not describe this circuit"));
    }
    Ok(())
}

fn splice(c: &mut Circuit, at: usize, remove: usize, with: Vec<Instruction>) {
    c.instructions.splice(at..at + remove, with);
}

fn finish(c: Circuit) -> Result<Circuit, RewriteError> {
    c.validate()?;
    Ok(c)
}

/// Replaces the exponential node at the site by a parity measurement that
/// includes a `|theta>` ancilla, the conditional `2 theta` fix-up on that
/// ancilla, and its X readout.
pub fn apply_rot(c: &Circuit, site: &RewriteSite, tables: &RuleTables) -> Result<Circuit, RewriteError> {
    confirm(c, site, RuleName::ROT)?;
    let i = site.span.0;
    let node = c.instructions()[i].clone();
    let theta = node.angle.expect("validated");
    let mut out = c.clone();
    let t = unused_theta(&out).unwrap_or_else(|| {
        let pos = out.next_pos();
        out.add_qubit(Role::Theta, pos)
    });
    let m = out.alloc_cbit();
    let s = out.alloc_cbit();
    let mut string = node.qubits.clone();
    string.push(t);
    let parity = lower_node(&string, NodeKind::Meas(m)).remove(0);
    let trigger = if tables.rot_parity_2theta { Parity::bit(m) } else { Parity::bit(s) };
    let seq = vec![
        Instruction::prep_theta(t, -2.0 * theta),
        parity,
        Instruction::corr_rz2theta(t, 2.0 * theta, trigger),
        Instruction::meas_x(t, s),
    ];
    let n = seq.len();
    splice(&mut out, i, 1, seq);
    let mut frame = SymFrame::new();
    for &q in &node.qubits {
        frame.add(q, tables.rot_readout, &Parity::bit(s));
    }
    propagate(&mut out, i + n, frame)?;
    finish(out)
}

fn unused_theta(c: &Circuit) -> Option<QubitId> {
    c.qubits_with_role(Role::Theta).into_iter().find(|&q| c.next_on(q, 0).is_none())
}

/// Peels the first qubit off a string node with a pair of CNOTs.
pub fn apply_pg(c: &Circuit, site: &RewriteSite) -> Result<Circuit, RewriteError> {
    confirm(c, site, RuleName::PG)?;
    let i = site.span.0;
    let node = c.instructions()[i].clone();
    let kind = match node.op {
        Op::ExpZString => NodeKind::Exp(node.angle.expect("validated")),
        _ => NodeKind::Meas(node.cbit.expect("validated")),
    };
    let (q0, q1) = (node.qubits[0], node.qubits[1]);
    let mut seq = vec![Instruction::cnot(q0, q1)];
    seq.extend(lower_node(&node.qubits[1..], kind));
    seq.push(Instruction::cnot(q0, q1));
    let mut out = c.clone();
    splice(&mut out, i, 1, seq);
    finish(out)
}

/// An ancilla with no live state across instruction `i`.
fn free_at(c: &Circuit, q: QubitId, i: usize) -> bool {
    let before = c.prev_on(q, i).is_none_or(|k| c.instructions()[k].op.is_destructive());
    let after = c.next_on(q, i).is_none_or(|k| c.instructions()[k].op.is_prep());
    before && after
}

/// Picks an ancilla for a two-qubit gadget at `i` on `a` and `b`: a free
/// neighbour of both, else any free ancilla, else a new one.
fn choose_ancilla(c: &mut Circuit, i: usize, a: QubitId, b: QubitId) -> QubitId {
    let free: Vec<QubitId> = c.qubits_with_role(Role::Ancilla).into_iter().filter(|&q| free_at(c, q, i)).collect();
    let near = |q: QubitId, p: QubitId| c.qubit(q).pos.abs_diff(c.qubit(p).pos) == 1;
    if let Some(&q) = free.iter().find(|&&q| near(q, a) && near(q, b)) {
        return q;
    }
    if let Some(&q) = free.first() {
        return q;
    }
    let pos = c.next_pos();
    c.add_qubit(Role::Ancilla, pos)
}

/// Replaces a CNOT by an ancilla, one XX and one ZZ parity measurement.
pub fn apply_ls(c: &Circuit, site: &RewriteSite, variant: RuleName, tables: &RuleTables) -> Result<Circuit, RewriteError> {
    if !matches!(variant, RuleName::LS1 | RuleName::LS2) {
        return Err(no_match(variant, site.span.0, "not a lattice-surgery variant"));
    }
    confirm(c, site, variant)?;
    let i = site.span.0;
    let (ctl, tgt) = (c.instructions()[i].qubits[0], c.instructions()[i].qubits[1]);
    let mut out = c.clone();
    let a = choose_ancilla(&mut out, i, ctl, tgt);
    let bits = [out.alloc_cbit(), out.alloc_cbit(), out.alloc_cbit()];
    let (seq, table): (Vec<Instruction>, &LsTable) = if variant == RuleName::LS1 {
        let seq = vec![
            Instruction::prep_z(a),
            Instruction::meas_xx(a, tgt, bits[0]),
            Instruction::meas_zz(ctl, a, bits[1]),
            Instruction::meas_x(a, bits[2]),
        ];
        (seq, &tables.ls1)
    } else {
        let seq = vec![
            Instruction::prep_x(a),
            Instruction::meas_zz(ctl, a, bits[0]),
            Instruction::meas_xx(a, tgt, bits[1]),
            Instruction::meas_z(a, bits[2]),
        ];
        (seq, &tables.ls2)
    };
    splice(&mut out, i, 1, seq);
    let mut frame = SymFrame::new();
    for (k, entries) in table.byproducts.iter().enumerate() {
        for &(slot, p) in entries {
            let q = match slot {
                Slot::Control => ctl,
                Slot::Target => tgt,
            };
            frame.add(q, p, &Parity::bit(bits[k]));
        }
    }
    propagate(&mut out, i + 4, frame)?;
    finish(out)
}

fn oval_flip(op: Op, tables: &RuleTables) -> Pauli {
    match op {
        Op::MeasX | Op::OvalX => tables.oval_x,
        _ => tables.oval_z,
    }
}

/// Merges a destructive measurement and the reset that follows it on the
/// same qubit into one non-destructive measurement.
pub fn apply_mr(c: &Circuit, site: &RewriteSite, tables: &RuleTables) -> Result<Circuit, RewriteError> {
    confirm(c, site, RuleName::MR)?;
    let (i, end) = site.span;
    let meas = c.instructions()[i].clone();
    let (q, b) = (meas.qubits[0], meas.cbit.expect("validated"));
    let oval = if meas.op == Op::MeasX { Instruction::oval_x(q, b) } else { Instruction::oval_z(q, b) };
    let mut out = c.clone();
    out.instructions.remove(end - 1);
    out.instructions[i] = oval;
    let mut frame = SymFrame::new();
    frame.add(q, oval_flip(meas.op, tables), &Parity::bit(b));
    propagate(&mut out, i + 1, frame)?;
    finish(out)
}

/// Inverse of MR: splits the oval at `index` back into a measurement and
/// a reset. The reset is placed just before the next use of the qubit.
pub fn expand_oval(c: &Circuit, index: usize, tables: &RuleTables) -> Result<Circuit, RewriteError> {
    let ins = c.instructions().get(index).ok_or_else(|| no_match(RuleName::MR, index, "index out of range"))?.clone();
    let (q, b) = match (ins.op, ins.cbit) {
        (Op::OvalX | Op::OvalZ, Some(b)) => (ins.qubits[0], b),
        _ => return Err(no_match(RuleName::MR, index, format!("{} is not an oval", ins.op))),
    };
    let (meas, reset) = if ins.op == Op::OvalX {
        (Instruction::meas_x(q, b), Instruction::prep_x(q))
    } else {
        (Instruction::meas_z(q, b), Instruction::prep_z(q))
    };
    let at = c.next_on(q, index + 1).unwrap_or_else(|| c.trailing_block_start()).max(index + 1);
    let mut out = c.clone();
    out.instructions[index] = meas;
    out.instructions.insert(at, reset);
    let mut frame = SymFrame::new();
    frame.add(q, oval_flip(ins.op, tables), &Parity::bit(b));
    propagate(&mut out, at + 1, frame)?;
    finish(out)
}

/// Absorbs an oval sandwiched between two identical parity measurements of
/// the same pair into the first measurement.
pub fn apply_fuse(c: &Circuit, site: &RewriteSite) -> Result<Circuit, RewriteError> {
    confirm(c, site, RuleName::FUSE)?;
    let (i1, end) = site.span;
    let b = site.get("oval").expect("binding");
    let i3 = end - 1;
    let i2 = c.next_on(b, i1 + 1).expect("matched");
    let kept = c.instructions()[i1].cbit.expect("validated");
    let oval_bit = c.instructions()[i2].cbit.expect("validated");
    let dropped = c.instructions()[i3].cbit.expect("validated");
    let mut out = c.clone();
    out.instructions.remove(i3);
    out.instructions.remove(i2);
    substitute_after(&mut out, i1 + 1, oval_bit, &Parity::zero());
    substitute_after(&mut out, i1 + 1, dropped, &Parity::bit(kept));
    merge_trailing(&mut out, SymFrame::new());
    finish(out)
}

/// Expands a two-body parity measurement into an ancilla and two CNOTs.
pub fn expand_parity(c: &Circuit, site: &RewriteSite) -> Result<Circuit, RewriteError> {
    let rule = site.rule;
    if !matches!(rule, RuleName::XXC | RuleName::ZZC) {
        return Err(no_match(rule, site.span.0, "not a parity expansion"));
    }
    confirm(c, site, rule)?;
    let i = site.span.0;
    let ins = c.instructions()[i].clone();
    let (q1, q2, b) = (ins.qubits[0], ins.qubits[1], ins.cbit.expect("validated"));
    let mut out = c.clone();
    let a = choose_ancilla(&mut out, i, q1, q2);
    let seq = if rule == RuleName::ZZC {
        vec![Instruction::prep_z(a), Instruction::cnot(q1, a), Instruction::cnot(q2, a), Instruction::meas_z(a, b)]
    } else {
        vec![Instruction::prep_x(a), Instruction::cnot(a, q1), Instruction::cnot(a, q2), Instruction::meas_x(a, b)]
    };
    splice(&mut out, i, 1, seq);
    finish(out)
}

/// Deletes an ancilla that is prepared, coupled through a CNOT it cannot
/// affect, and measured in its preparation basis.
pub fn apply_rem(c: &Circuit, site: &RewriteSite, which: RuleName) -> Result<Circuit, RewriteError> {
    if !matches!(which, RuleName::REMX | RuleName::REMZ) {
        return Err(no_match(which, site.span.0, "not a removal rule"));
    }
    confirm(c, site, which)?;
    let (i, end) = site.span;
    let a = site.get("ancilla").expect("binding");
    let j = c.next_on(a, i + 1).expect("matched");
    let k = end - 1;
    let b = c.instructions()[k].cbit.expect("validated");
    let mut out = c.clone();
    for idx in [k, j, i] {
        out.instructions.remove(idx);
    }
    substitute_after(&mut out, i, b, &Parity::zero());
    merge_trailing(&mut out, SymFrame::new());
    finish(out)
}

/// Applies a CNOT commutation identity to the pair at the site.
pub fn commute_cnots(c: &Circuit, site: &RewriteSite) -> Result<Circuit, RewriteError> {
    confirm(c, site, RuleName::CnotComm)?;
    let (i, end) = site.span;
    let (_, replacement) = comm_parts(c, i).map_err(|reason| no_match(RuleName::CnotComm, i, reason))?;
    let mut out = c.clone();
    out.instructions.remove(end - 1);
    splice(&mut out, i, 1, replacement);
    finish(out)
}
