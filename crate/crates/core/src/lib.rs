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

//! Compiles Pauli exponentials `exp(iθP)` into constant-depth circuits of
//! two-body XX and ZZ parity measurements on a linear nearest-neighbour
//! layout, and certifies each result by exhaustive branch simulation.

pub mod analysis;
pub mod angle;
pub mod clifford;
pub mod decompose;
pub mod frame;
pub mod ir;
pub mod pauli;
pub mod rewrite;
pub mod verify;

pub use analysis::{check_lnn, compute_depth, DepthReport, LnnViolation};
pub use angle::{Angle, AngleKind};
pub use clifford::{conjugate_to_z_form, Clifford1, CliffordLayer};
pub use decompose::{build_schedule, cross_check, decompose, rewrite_trace, CrossCheck, CrossVerdict, Schedule, Trace};
pub use frame::{frame_update, CorrectionTable, PauliFrame, RuleTables};
pub use ir::{Circuit, Instruction, Op, Parity, Role};
pub use pauli::{parse_pauli, Pauli, PauliString};
pub use rewrite::{apply_rule, find_sites, RewriteError, RewriteSite, RuleName};
