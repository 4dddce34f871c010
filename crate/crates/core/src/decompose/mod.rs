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


//! Decomposition of `exp(i theta P)` by repeated rewriting, and the
//! closed-form schedule the rewriting converges to.

mod cross;
mod schedule;

use serde::Serialize;
use serde_json::value::RawValue;

use crate::angle::Angle;
use crate::clifford::conjugate_to_z_form;
use crate::frame::RuleTables;
use crate::ir::{Circuit, Instruction, Op, Role};
use crate::pauli::PauliString;
use crate::rewrite::{apply_rule, lower_node, site_at, NodeKind, RewriteError, RewriteSite, RuleName};

pub use cross::{cross_check, CrossCheck, CrossVerdict};
pub use schedule::{build_schedule, Round, RoundKind, Schedule};

/// Position of string qubit `j` in a chain of `k`: string qubits sit on
/// even positions with an interaction ancilla between neighbours, except
/// the last two, which are adjacent.
pub fn chain_pos(j: usize, k: usize) -> usize {
    if j + 1 < k || k < 2 {
        2 * j
    } else {
        2 * k - 3
    }
}

/// Position of interaction ancilla `j`, between string qubits `j` and `j+1`.
pub fn ancilla_pos(j: usize) -> usize {
    2 * j + 1
}

/// Number of positions a chain of `k` string qubits occupies.
pub fn chain_width(k: usize) -> usize {
    if k == 0 {
        0
    } else {
        chain_pos(k - 1, k) + 1
    }
}

/// One rule application.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub rule: RuleName,
    pub site: RewriteSite,
    /// The circuit after the rule was applied.
    pub circuit: Circuit,
}

/// A derivation: the starting circuit and every rewrite that follows.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    /// Clifford layers around the Z-form string node, with the rotation
    /// ancilla already introduced for non-Clifford angles.
    pub initial: Circuit,
    pub steps: Vec<TraceStep>,
}

#[derive(Serialize)]
struct StepJson<'a> {
    rule: RuleName,
    site: &'a RewriteSite,
    circuit: Box<RawValue>,
}

impl Trace {
    pub fn rules(&self) -> Vec<RuleName> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    pub fn final_circuit(&self) -> &Circuit {
        self.steps.last().map_or(&self.initial, |s| &s.circuit)
    }

    /// JSON array of `{rule, site, circuit}` records.
    pub fn to_json(&self) -> String {
        let steps: Vec<StepJson> = self
            .steps
            .iter()
            .map(|s| StepJson {
                rule: s.rule,
                site: &s.site,
                circuit: RawValue::from_string(s.circuit.to_json()).expect("circuit JSON is valid"),
            })
            .collect();
        serde_json::to_string_pretty(&steps).expect("trace serializes")
    }
}

/// Builds the starting circuit: roster in chain layout, `C†`, the Z-form
/// node (through ROT when the angle is not Clifford), then `C`.
pub fn initial_circuit(p: &PauliString, theta: Angle, tables: &RuleTables) -> Result<Circuit, RewriteError> {
    let (layer, zp) = conjugate_to_z_form(p);
    let support = zp.support();
    let rotate = !theta.is_clifford() && !support.is_empty();
    let k = support.len() + rotate as usize;
    let width = chain_width(k);
    let mut c = Circuit::new();
    let mut idle = 0;
    for q in 0..p.len() {
        let pos = match support.iter().position(|&s| s == q) {
            Some(j) => chain_pos(j, k),
            None => {
                idle += 1;
                width + idle - 1
            }
        };
        c.add_qubit(Role::Data, pos);
    }
    for j in 0..k.saturating_sub(2) {
        c.add_qubit(Role::Ancilla, ancilla_pos(j));
    }
    if rotate {
        c.add_qubit(Role::Theta, chain_pos(k - 1, k));
    }
    for (q, g) in layer.gates().iter().enumerate() {
        if !g.is_identity() {
            c.push(Instruction::clifford(q, g.inverse()));
        }
    }
    let node = c.len();
    if rotate {
        c.push(Instruction::exp_z_string(support.clone(), theta.value()));
    } else if !support.is_empty() {
        for ins in lower_node(&support, NodeKind::Exp(theta.value())) {
            c.push(ins);
        }
    }
    for (q, g) in layer.gates().iter().enumerate() {
        if !g.is_identity() {
            c.push(Instruction::clifford(q, *g));
        }
    }
    if rotate {
        let site = site_at(&c, RuleName::ROT, node)?;
        c = apply_rule(&c, &site, tables)?;
    }
    Ok(c)
}

fn long_node(c: &Circuit) -> Option<usize> {
    c.instructions().iter().position(|i| i.op.is_node() && i.qubits.len() >= 3)
}

/// Runs PG, LS1, LS2, MR, FUSE until no string node spans three or more
/// qubits, reporting each application to `emit`.
fn rewrite_loop(
    mut c: Circuit,
    tables: &RuleTables,
    mut emit: impl FnMut(RuleName, RewriteSite, &Circuit),
) -> Result<Circuit, RewriteError> {
    let mut step = |c: &Circuit, rule: RuleName, at: usize| -> Result<Circuit, RewriteError> {
        let site = site_at(c, rule, at)?;
        let out = apply_rule(c, &site, tables)?;
        emit(rule, site, &out);
        Ok(out)
    };
    while let Some(i) = long_node(&c) {
        c = step(&c, RuleName::PG, i)?;
        // The peeled CNOT pair now sits at `i` and after the shorter node.
        c = step(&c, RuleName::LS1, i)?;
        let rhs = (i + 4..c.len())
            .find(|&j| c.instructions()[j].op == Op::CNOT)
            .expect("PG emits a closing CNOT");
        c = step(&c, RuleName::LS2, rhs)?;
        // LS1 left MeasX on its ancilla at i+3 and MeasZZ at i+2.
        c = step(&c, RuleName::MR, i + 3)?;
        c = step(&c, RuleName::FUSE, i + 2)?;
    }
    Ok(c)
}

/// Decomposes `exp(i theta p)` with the frozen rule tables.
pub fn decompose(p: &PauliString, theta: Angle) -> Circuit {
    decompose_with(p, theta, &RuleTables::frozen()).expect("frozen tables rewrite every string")
}

/// Decomposes with explicit rule tables.
pub fn decompose_with(p: &PauliString, theta: Angle, tables: &RuleTables) -> Result<Circuit, RewriteError> {
    rewrite_loop(initial_circuit(p, theta, tables)?, tables, |_, _, _| {})
}

/// The full derivation performed by [`decompose`].
pub fn rewrite_trace(p: &PauliString, theta: Angle) -> Trace {
    rewrite_trace_with(p, theta, &RuleTables::frozen()).expect("frozen tables rewrite every string")
}

pub fn rewrite_trace_with(p: &PauliString, theta: Angle, tables: &RuleTables) -> Result<Trace, RewriteError> {
    let initial = initial_circuit(p, theta, tables)?;
    let mut steps = Vec::new();
    rewrite_loop(initial.clone(), tables, |rule, site, c| steps.push(TraceStep { rule, site, circuit: c.clone() }))?;
    Ok(Trace { initial, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check_lnn, compute_depth};
    use crate::pauli::parse_pauli;
    use crate::rewrite::find_sites;
    use crate::verify::{check_equivalence, target_exponential};

    fn p(s: &str) -> PauliString {
        parse_pauli(s).unwrap()
    }

    #[test]
    fn layout_positions() {
        assert_eq!((0..5).map(|j| chain_pos(j, 5)).collect::<Vec<_>>(), vec![0, 2, 4, 6, 7]);
        assert_eq!((0..2).map(|j| chain_pos(j, 2)).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(chain_pos(0, 1), 0);
        assert_eq!(chain_width(5), 8);
    }

    #[test]
    fn single_z_uses_one_rotation_ancilla() {
        let c = decompose(&p("Z"), Angle::new(0.3));
        let ops: Vec<Op> = c.instructions().iter().map(|i| i.op).collect();
        assert_eq!(&ops[..4], &[Op::PrepTheta, Op::MeasZZ, Op::CorrRz2Theta, Op::MeasX]);
        assert!(check_equivalence(&c, &target_exponential(&p("Z"), Angle::new(0.3)).unwrap()).unwrap().equivalent);
    }

    #[test]
    fn quarter_turn_has_no_rotation_ancilla() {
        let c = decompose(&p("ZZ"), Angle::parse("pi/2").unwrap());
        assert!(c.qubits_with_role(Role::Theta).is_empty());
        assert!(rewrite_trace(&p("Z"), Angle::parse("pi/2").unwrap()).steps.is_empty());
    }

    #[test]
    fn four_z_trace_follows_the_rule_cycle() {
        let t = rewrite_trace(&p("ZZZZ"), Angle::new(0.3));
        use RuleName::*;
        let cycle = [PG, LS1, LS2, MR, FUSE];
        assert_eq!(t.rules(), cycle.iter().cycle().take(15).copied().collect::<Vec<_>>());
        assert_eq!(t.final_circuit(), &decompose(&p("ZZZZ"), Angle::new(0.3)));
        for s in &t.steps {
            if matches!(s.rule, LS1 | MR | FUSE) {
                let prev = t.steps.iter().position(|x| x == s).unwrap();
                let before = if prev == 0 { &t.initial } else { &t.steps[prev - 1].circuit };
                assert_eq!(find_sites(before, s.rule)[0], s.site, "{:?}", s.rule);
            }
        }
    }

    #[test]
    fn fixpoint_has_no_long_nodes_and_is_local() {
        for n in 1..=12 {
            for theta in [Angle::new(0.3), Angle::parse("pi/2").unwrap()] {
                let c = decompose(&PauliString::all_z(n), theta);
                assert!(c.instructions().iter().all(|i| !i.op.is_node()));
                assert!(c.instructions().iter().all(|i| i.op != Op::CNOT && !matches!(i.op, Op::OvalX | Op::OvalZ)));
                assert!(check_lnn(&c).is_empty());
                let r = compute_depth(&c);
                let expect = if theta.is_clifford() && n <= 2 { 0 } else if n == 1 { 1 } else { 3 };
                assert_eq!(r.two_body_layers, expect, "n={n}");
                assert!(r.max_ancillas < n.max(1));
            }
        }
    }

    #[test]
    fn idle_letters_sit_after_the_chain() {
        let c = decompose(&p("ZIZ"), Angle::new(0.7));
        assert_eq!(c.qubit(1).pos, 4);
        assert!(c.instructions().iter().all(|i| !i.touches(1)));
        assert!(check_equivalence(&c, &target_exponential(&p("ZIZ"), Angle::new(0.7)).unwrap()).unwrap().equivalent);
    }

    #[test]
    fn trace_json_lists_steps() {
        let t = rewrite_trace(&p("ZZZ"), Angle::new(0.3));
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), t.steps.len());
        assert_eq!(arr[0]["rule"], "PG");
        assert!(arr[0]["circuit"]["instructions"].is_array());
    }
}
