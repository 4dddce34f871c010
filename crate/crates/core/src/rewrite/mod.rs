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

//! Local, semantics-preserving rewrite rules and site discovery.

mod propagate;
mod rules;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::frame::RuleTables;
use crate::ir::{Circuit, CircuitError, Op, QubitId};

pub use propagate::SymFrame;
pub use rules::{
    apply_fuse, apply_ls, apply_mr, apply_pg, apply_rem, apply_rot, commute_cnots, expand_oval, expand_parity,
    lower_node, NodeKind,
};

/// The rule alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum RuleName {
    ROT,
    PG,
    LS1,
    LS2,
    MR,
    FUSE,
    XXC,
    ZZC,
    REMX,
    REMZ,
    #[serde(rename = "CNOT_COMM")]
    CnotComm,
}

impl RuleName {
    pub const ALL: [RuleName; 11] = [
        RuleName::ROT,
        RuleName::PG,
        RuleName::LS1,
        RuleName::LS2,
        RuleName::MR,
        RuleName::FUSE,
        RuleName::XXC,
        RuleName::ZZC,
        RuleName::REMX,
        RuleName::REMZ,
        RuleName::CnotComm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleName::ROT => "ROT",
            RuleName::PG => "PG",
            RuleName::LS1 => "LS1",
            RuleName::LS2 => "LS2",
            RuleName::MR => "MR",
            RuleName::FUSE => "FUSE",
            RuleName::XXC => "XXC",
            RuleName::ZZC => "ZZC",
            RuleName::REMX => "REMX",
            RuleName::REMZ => "REMZ",
            RuleName::CnotComm => "CNOT_COMM",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a rule applies: the instruction span `[start, end)` it reads and
/// the qubits it binds by role.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteSite {
    pub rule: RuleName,
    pub span: (usize, usize),
    pub binding: BTreeMap<String, QubitId>,
}

impl RewriteSite {
    pub fn new(rule: RuleName, span: (usize, usize), binding: &[(&str, QubitId)]) -> RewriteSite {
        RewriteSite { rule, span, binding: binding.iter().map(|(k, v)| (k.to_string(), *v)).collect() }
    }

    pub fn get(&self, role: &str) -> Option<QubitId> {
        self.binding.get(role).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RewriteError {
    #[error("{rule} does not match at instruction {index}: {reason}")]
    NoMatch { rule: RuleName, index: usize, reason: String },
    #[error("byproduct cannot pass non-Clifford {op} at instruction {index}")]
    NonCliffordPropagation { index: usize, op: Op },
    #[error("rewrite produced an invalid circuit: {0}")]
    Invalid(#[from] CircuitError),
}

/// All non-overlapping matches of `rule`, in instruction order.
pub fn find_sites(c: &Circuit, rule: RuleName) -> Vec<RewriteSite> {
    let mut all = rules::matches(c, rule);
    all.sort_by_key(|s| s.span);
    let mut out: Vec<RewriteSite> = Vec::new();
    for s in all {
        if out.last().is_none_or(|prev| s.span.0 >= prev.span.1) {
            out.push(s);
        }
    }
    out
}

/// The match of `rule` anchored at instruction `index`, if any.
pub fn site_at(c: &Circuit, rule: RuleName, index: usize) -> Result<RewriteSite, RewriteError> {
    rules::match_at(c, rule, index).map_err(|reason| RewriteError::NoMatch { rule, index, reason })
}

/// Applies the rule named by `site`.
pub fn apply_rule(c: &Circuit, site: &RewriteSite, tables: &RuleTables) -> Result<Circuit, RewriteError> {
    match site.rule {
        RuleName::ROT => apply_rot(c, site, tables),
        RuleName::PG => apply_pg(c, site),
        RuleName::LS1 | RuleName::LS2 => apply_ls(c, site, site.rule, tables),
        RuleName::MR => apply_mr(c, site, tables),
        RuleName::FUSE => apply_fuse(c, site),
        RuleName::XXC | RuleName::ZZC => expand_parity(c, site),
        RuleName::REMX | RuleName::REMZ => apply_rem(c, site, site.rule),
        RuleName::CnotComm => commute_cnots(c, site),
    }
}
