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


//! Direct construction of the constant-depth schedule for `exp(i theta Z^n)`.

use std::fmt::Write as _;

use serde_json::json;
use serde_json::value::RawValue;

use super::{ancilla_pos, chain_pos};
use crate::angle::Angle;
use crate::ir::{Cbit, Circuit, Instruction, Op, Parity, Qubit, QubitId, Role};
use crate::pauli::Pauli;
use crate::rewrite::{lower_node, NodeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RoundKind {
    Prep,
    Xx,
    Zz,
    Measure,
    Correction,
}

impl RoundKind {
    pub fn is_two_body(self) -> bool {
        matches!(self, RoundKind::Xx | RoundKind::Zz)
    }

    pub fn label(self) -> &'static str {
        match self {
            RoundKind::Prep => "prep",
            RoundKind::Xx => "xx",
            RoundKind::Zz => "zz",
            RoundKind::Measure => "measure",
            RoundKind::Correction => "correct",
        }
    }
}

/// Instructions with pairwise disjoint supports, executed together.
#[derive(Clone, Debug, PartialEq)]
pub struct Round {
    pub kind: RoundKind,
    pub instructions: Vec<Instruction>,
}

/// Round-by-round schedule on the interleaved line.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub rounds: Vec<Round>,
    /// Qubit roster: data `0..n`, then interaction ancillae, then θ.
    pub layout: Vec<Qubit>,
    pub ancilla_count: usize,
    pub theta_ancilla: bool,
    pub theta: Angle,
    pub cbits: usize,
}

/// Builds the schedule for `exp(i theta Z^n)` without rewriting.
///
/// With chain `c_0 .. c_{k-1}` (the `n` data qubits, plus the θ ancilla
/// for non-Clifford angles) and ancilla `a_i` between `c_i` and `c_{i+1}`:
/// XX(a_i, c_{i+1}) -> x_i; ZZ(c_i, a_i) -> z_i with the core ZZ(c_{k-2},
/// c_{k-1}) -> m; XX(a_i, c_{i+1}) -> y_i; MeasZ(a_i) -> w_i, MeasX(θ) -> s.
/// Corrections: X on c_{i+1} if w_i; Z on c_j if s ^ XOR_{i>=j}(x_i ^ y_i);
/// the 2θ fix-up on θ if m ^ XOR_i z_i.
///
/// # Panics
/// If `n == 0`.
pub fn build_schedule(n: usize, theta: Angle) -> Schedule {
    assert!(n >= 1, "schedule needs at least one qubit");
    let rotate = !theta.is_clifford();
    let k = n + rotate as usize;
    let anc = k.saturating_sub(2);
    let mut c = Circuit::new();
    for j in 0..n {
        c.add_qubit(Role::Data, chain_pos(j, k));
    }
    let a: Vec<QubitId> = (0..anc).map(|j| c.add_qubit(Role::Ancilla, ancilla_pos(j))).collect();
    let t = rotate.then(|| c.add_qubit(Role::Theta, chain_pos(k - 1, k)));
    let chain: Vec<QubitId> = (0..n).chain(t).collect();
    let mut next_bit = 0;
    let mut alloc = |count: usize| -> Vec<Cbit> {
        let v = (next_bit..next_bit + count).collect();
        next_bit += count;
        v
    };
    let x = alloc(anc);
    let z = alloc(anc);
    let m = if rotate { alloc(1)[0] } else { usize::MAX };
    let y = alloc(anc);
    let w = alloc(anc);
    let s = if rotate { alloc(1)[0] } else { usize::MAX };

    let mut prep: Vec<Instruction> = a.iter().map(|&q| Instruction::prep_z(q)).collect();
    let xx1: Vec<Instruction> = (0..anc).map(|i| Instruction::meas_xx(a[i], chain[i + 1], x[i])).collect();
    let mut zz: Vec<Instruction> = (0..anc).map(|i| Instruction::meas_zz(chain[i], a[i], z[i])).collect();
    let mut xx2: Vec<Instruction> = (0..anc).map(|i| Instruction::meas_xx(a[i], chain[i + 1], y[i])).collect();
    let mut measure: Vec<Instruction> = (0..anc).map(|i| Instruction::meas_z(a[i], w[i])).collect();
    if let Some(t) = t {
        prep.push(Instruction::prep_theta(t, -2.0 * theta.value()));
        zz.push(Instruction::meas_zz(chain[k - 2], t, m));
        let trigger = z.iter().fold(Parity::bit(m), |acc, &b| acc.xor(&Parity::bit(b)));
        xx2.push(Instruction::corr_rz2theta(t, theta.corrective(), trigger));
        measure.push(Instruction::meas_x(t, s));
    } else {
        let core = if k >= 2 { &chain[k - 2..] } else { &chain[..] };
        zz.extend(lower_node(core, NodeKind::Exp(theta.value())));
    }

    let mut correct = Vec::new();
    for j in 0..n {
        let xcond = if j >= 1 && j - 1 < anc { Parity::bit(w[j - 1]) } else { Parity::zero() };
        let mut zcond = if rotate { Parity::bit(s) } else { Parity::zero() };
        for i in j..anc {
            zcond = zcond.xor(&Parity::of_bits([x[i], y[i]]));
        }
        if !xcond.is_zero() {
            correct.push(Instruction::corr_pauli(j, Pauli::X, xcond));
        }
        if !zcond.is_zero() {
            correct.push(Instruction::corr_pauli(j, Pauli::Z, zcond));
        }
    }

    let rounds = vec![
        Round { kind: RoundKind::Prep, instructions: prep },
        Round { kind: RoundKind::Xx, instructions: xx1 },
        Round { kind: RoundKind::Zz, instructions: zz },
        Round { kind: RoundKind::Xx, instructions: xx2 },
        Round { kind: RoundKind::Measure, instructions: measure },
        Round { kind: RoundKind::Correction, instructions: correct },
    ];
    Schedule { rounds, layout: c.qubits().to_vec(), ancilla_count: anc, theta_ancilla: rotate, theta, cbits: next_bit }
}

fn cell(ins: &Instruction) -> &'static str {
    match ins.op {
        Op::PrepZ => "|0",
        Op::PrepX => "|+",
        Op::PrepTheta => "|t",
        Op::MeasXX => "XX",
        Op::MeasZZ => "ZZ",
        Op::MeasZ => "Mz",
        Op::MeasX => "Mx",
        Op::Clifford1Q => "Cl",
        Op::Rz => "Rz",
        Op::CorrRz2Theta => "R2",
        Op::CorrPauli => match ins.pauli {
            Some(Pauli::X) => "X?",
            Some(Pauli::Y) => "Y?",
            _ => "Z?",
        },
        _ => "??",
    }
}

fn role_tag(role: Role) -> &'static str {
    match role {
        Role::Data => "d",
        Role::Ancilla => "a",
        Role::Theta => "t",
    }
}

impl Schedule {
    /// Data qubits in the string.
    pub fn n(&self) -> usize {
        self.layout.iter().filter(|q| q.role == Role::Data).count()
    }

    pub fn two_body_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.kind.is_two_body()).count()
    }

    /// Number of line positions.
    pub fn width(&self) -> usize {
        self.layout.iter().map(|q| q.pos + 1).max().unwrap_or(0)
    }

    /// The rounds concatenated into a circuit.
    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new();
        for q in &self.layout {
            c.add_qubit(q.role, q.pos);
        }
        for _ in 0..self.cbits {
            c.alloc_cbit();
        }
        for r in &self.rounds {
            for ins in &r.instructions {
                c.push(ins.clone());
            }
        }
        c
    }

    /// Per round, the cell text at each position and whether a two-body
    /// instruction joins position `p` to `p + 1`.
    fn grid(&self) -> Vec<(RoundKind, Vec<String>, Vec<bool>)> {
        let width = self.width();
        self.rounds
            .iter()
            .map(|r| {
                let mut cells = vec![String::new(); width];
                let mut joins = vec![false; width];
                for ins in &r.instructions {
                    let positions: Vec<usize> = ins.qubits.iter().map(|&q| self.layout[q].pos).collect();
                    for &p in &positions {
                        if cells[p].is_empty() {
                            cells[p] = cell(ins).to_string();
                        } else {
                            // X and Z corrections on one qubit.
                            cells[p] = "Y?".to_string();
                        }
                    }
                    if let [p, q] = positions[..] {
                        joins[p.min(q)] = true;
                    }
                }
                (r.kind, cells, joins)
            })
            .collect()
    }

    /// One line per round, two characters per line position.
    pub fn to_text(&self) -> String {
        let width = self.width();
        let mut roles = vec![" "; width];
        for q in &self.layout {
            roles[q.pos] = role_tag(q.role);
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# n={} theta={} ancillae={} theta_ancilla={} two_body_rounds={}",
            self.n(),
            self.theta.value(),
            self.ancilla_count,
            self.theta_ancilla,
            self.two_body_rounds()
        );
        let _ = write!(out, "{:<8}", "role");
        for r in &roles {
            let _ = write!(out, " {r:<2}");
        }
        out.push('\n');
        for (kind, cells, joins) in self.grid() {
            let _ = write!(out, "{:<8}", kind.label());
            for p in 0..width {
                let text = if cells[p].is_empty() { " ." } else { cells[p].as_str() };
                let sep = if p > 0 && joins[p - 1] { '-' } else { ' ' };
                let _ = write!(out, "{sep}{text}");
            }
            out.push('\n');
        }
        out.push_str("# |0 |+ |t prepare, XX ZZ parity, Mz Mx measure, R2 2θ fix-up, Cl Clifford, X? Z? Y? corrections\n");
        out
    }

    /// Static SVG grid of rounds by line positions.
    pub fn to_svg(&self) -> String {
        const CELL: usize = 36;
        const LEFT: usize = 80;
        const TOP: usize = 40;
        let width = self.width();
        let grid = self.grid();
        let w = LEFT + CELL * width + 20;
        let h = TOP + CELL * grid.len() + 20;
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="monospace" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        for q in &self.layout {
            let cx = LEFT + CELL * q.pos + CELL / 2;
            let class = match q.role {
                Role::Data => "col data",
                Role::Ancilla => "col ancilla",
                Role::Theta => "col theta",
            };
            let _ = writeln!(
                s,
                r#"<text class="{class}" x="{cx}" y="{}" text-anchor="middle">{}{}</text>"#,
                TOP - 14,
                role_tag(q.role),
                q.id
            );
        }
        for (row, (kind, cells, joins)) in grid.iter().enumerate() {
            let cy = TOP + CELL * row + CELL / 2;
            let _ = writeln!(s, r#"<text x="8" y="{}">{}</text>"#, cy + 4, kind.label());
            for (p, &join) in joins.iter().enumerate().take(width) {
                if p + 1 < width && join {
                    let x1 = LEFT + CELL * p + CELL / 2;
                    let _ = writeln!(s, r#"<line x1="{x1}" y1="{cy}" x2="{}" y2="{cy}" stroke="black" stroke-width="2"/>"#, x1 + CELL);
                }
            }
            for (p, text) in cells.iter().enumerate() {
                if text.is_empty() {
                    continue;
                }
                let x = LEFT + CELL * p + 4;
                let fill = match text.as_str() {
                    "XX" => "#f4a261",
                    "ZZ" => "#2a9d8f",
                    _ => "#e9ecef",
                };
                let _ = writeln!(
                    s,
                    r#"<rect x="{x}" y="{}" width="{}" height="{}" rx="4" fill="{fill}" stroke="black"/>"#,
                    cy - CELL / 2 + 4,
                    CELL - 8,
                    CELL - 8
                );
                let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{text}</text>"#, x + (CELL - 8) / 2, cy + 4);
            }
        }
        s.push_str("</svg>\n");
        s
    }

    pub fn to_json(&self) -> String {
        let rounds: Vec<serde_json::Value> = self
            .rounds
            .iter()
            .map(|r| json!({"kind": r.kind.label(), "instructions": r.instructions.iter().map(|i| i.to_string()).collect::<Vec<_>>()}))
            .collect();
        let circuit: Box<RawValue> = RawValue::from_string(self.to_circuit().to_json()).expect("circuit JSON is valid");
        let v = json!({
            "n": self.n(),
            "theta": self.theta.value(),
            "ancilla_count": self.ancilla_count,
            "theta_ancilla": self.theta_ancilla,
            "two_body_rounds": self.two_body_rounds(),
            "width": self.width(),
            "rounds": rounds,
            "circuit": circuit,
        });
        serde_json::to_string_pretty(&v).expect("schedule serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check_lnn, compute_depth};
    use crate::pauli::PauliString;
    use crate::verify::{check_equivalence, target_exponential};

    #[test]
    fn rounds_are_disjoint() {
        for n in 1..=40 {
            for theta in [Angle::new(0.3), Angle::parse("pi/2").unwrap()] {
                let s = build_schedule(n, theta);
                assert_eq!(s.rounds.len(), 6);
                assert_eq!(s.two_body_rounds(), 3);
                for r in &s.rounds[..5] {
                    let mut seen = std::collections::BTreeSet::new();
                    for i in &r.instructions {
                        for &q in &i.qubits {
                            assert!(seen.insert(q), "n={n} {:?}", r.kind);
                        }
                    }
                }
                let c = s.to_circuit();
                c.validate().unwrap();
                assert!(check_lnn(&c).is_empty());
            }
        }
    }

    #[test]
    fn small_schedules_are_correct() {
        for n in 1..=3 {
            for theta in [Angle::new(0.3), Angle::parse("pi/4").unwrap(), Angle::parse("pi/2").unwrap()] {
                let c = build_schedule(n, theta).to_circuit();
                let t = target_exponential(&PauliString::all_z(n), theta).unwrap();
                let v = check_equivalence(&c, &t).unwrap();
                assert!(v.equivalent, "n={n} theta={theta:?} dev={}", v.worst_deviation);
            }
        }
    }

    #[test]
    fn counts_and_depth() {
        let s = build_schedule(2, Angle::new(0.3));
        assert_eq!((s.ancilla_count, s.theta_ancilla), (1, true));
        let s = build_schedule(100, Angle::new(0.3));
        assert!(s.ancilla_count <= 101);
        assert_eq!(compute_depth(&s.to_circuit()).two_body_layers, 3);
        assert_eq!(s.width(), super::super::chain_width(101));
    }

    #[test]
    fn renderings() {
        let s = build_schedule(4, Angle::new(0.3));
        let text = s.to_text();
        assert_eq!(text.lines().filter(|l| l.starts_with("xx") || l.starts_with("zz")).count(), 3);
        assert!(text.contains("XX-XX"));
        let svg = build_schedule(100, Angle::new(0.3)).to_svg();
        assert_eq!(svg.matches("class=\"col data\"").count(), 100);
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["two_body_rounds"], 3);
    }
}
