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

//! `pauliforge`: decompose, verify, trace and schedule Pauli exponentials.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pauliforge::verify::{
    check_equivalence_with, conjugation_action, tableau_run, target_exponential, DenseLimits, Outcomes, VerifyError,
    LIMIT_ENV,
};
use pauliforge::{
    build_schedule, compute_depth, decompose, parse_pauli, rewrite_trace, Angle, AngleKind, Circuit, Pauli, PauliString,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "pauliforge", version, about = "Depth-3 decomposition of Pauli exponentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Text,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Build the lattice-surgery circuit for exp(iθP).
    Decompose {
        #[arg(long)]
        pauli: String,
        /// Radians, or pi, pi/2, pi/4, pi/8 (optionally signed).
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the built circuit against exp(iθP) in every outcome branch.
    Verify {
        #[arg(long)]
        pauli: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Build the circuit for -θ while keeping the +θ target.
        #[arg(long)]
        corrupt_theta: bool,
        /// Qubit limit for dense simulation; overrides the environment.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        dense_limit: Option<u32>,
        /// Stabilizer check over sampled branches; Clifford angles only.
        #[arg(long)]
        tableau: bool,
        #[arg(long, default_value_t = 8, requires = "tableau")]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit the rewrite derivation.
    Trace {
        #[arg(long)]
        pauli: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Verify the circuit after every step.
        #[arg(long)]
        check: bool,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the closed-form interaction schedule.
    Schedule {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, default_value = "pi/8", allow_hyphen_values = true)]
        theta: String,
        #[arg(long, value_enum, default_value = "text")]
        emit: Emit,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Internal(String),
    Input(String),
    Unverifiable(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Input(_) => 2,
            Failure::Unverifiable(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Internal(m) | Failure::Input(m) | Failure::Unverifiable(m) => m,
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Failure {
        match e {
            VerifyError::LimitExceeded { .. } => Failure::Unverifiable(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

/// Process outcome other than a failure: success, or a negative verdict.
enum Done {
    Ok,
    NotEquivalent,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Done::Ok) => ExitCode::SUCCESS,
        Ok(Done::NotEquivalent) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Result<Done, Failure> {
    match command {
        Command::Decompose { pauli, theta, emit, out } => cmd_decompose(&pauli, &theta, emit, out.as_deref()),
        Command::Verify { pauli, theta, corrupt_theta, dense_limit, tableau, samples, seed } => {
            if let Some(limit) = dense_limit {
                // Single-threaded at this point; the verifier reads the limit from here.
                std::env::set_var(LIMIT_ENV, limit.to_string());
            }
            let (p, theta) = (pauli_arg(&pauli)?, angle_arg(&theta)?);
            if tableau {
                cmd_verify_tableau(&p, theta, corrupt_theta, samples, seed)
            } else {
                cmd_verify_dense(&p, theta, corrupt_theta)
            }
        }
        Command::Trace { pauli, theta, check, emit, out } => cmd_trace(&pauli, &theta, check, emit, out.as_deref()),
        Command::Schedule { n, theta, emit, out } => {
            let s = build_schedule(n as usize, angle_arg(&theta)?);
            let body = match emit {
                Emit::Text => s.to_text(),
                Emit::Svg => s.to_svg(),
                Emit::Json => s.to_json(),
            };
            write_output(out.as_deref(), &body)?;
            Ok(Done::Ok)
        }
    }
}

fn pauli_arg(text: &str) -> Result<PauliString, Failure> {
    parse_pauli(text).map_err(|e| Failure::Input(format!("--pauli: {e}")))
}

fn angle_arg(text: &str) -> Result<Angle, Failure> {
    Angle::parse(text).map_err(|e| Failure::Input(format!("--theta: {e}")))
}

fn kind_name(kind: AngleKind) -> &'static str {
    match kind {
        AngleKind::Clifford => "clifford",
        AngleKind::TLike => "t-like",
        AngleKind::Generic => "generic",
    }
}

fn summary(p: &PauliString, theta: Angle, c: &Circuit) -> String {
    let d = compute_depth(c);
    let mut s = String::new();
    let _ = writeln!(s, "pauli {p}, theta {theta} ({})", kind_name(theta.kind()));
    let _ = writeln!(s, "qubits: {} data, {} ancilla", c.data_qubits().len(), d.max_ancillas);
    if d.theta_ancillas == 0 {
        let _ = writeln!(s, "theta ancilla: none");
    } else {
        let _ = writeln!(s, "theta ancilla: {}", d.theta_ancillas);
    }
    let _ = writeln!(s, "layers: {} total, {} two-body", d.total_layers, d.two_body_layers);
    if d.lnn_violations.is_empty() {
        let _ = writeln!(s, "lnn: ok");
    } else {
        let _ = writeln!(s, "lnn: {} violations", d.lnn_violations.len());
    }
    s
}

fn render(c: &Circuit, emit: Emit) -> Result<String, Failure> {
    match emit {
        Emit::Json => Ok(c.to_json()),
        Emit::Text => Ok(c.to_text()),
        Emit::Svg => Err(Failure::Input("--emit svg applies to schedule only".into())),
    }
}

fn cmd_decompose(pauli: &str, theta: &str, emit: Emit, out: Option<&Path>) -> Result<Done, Failure> {
    let (p, theta) = (pauli_arg(pauli)?, angle_arg(theta)?);
    let c = decompose(&p, theta);
    let body = render(&c, emit)?;
    let report = summary(&p, theta, &c);
    match out {
        Some(path) => {
            write_output(Some(path), &body)?;
            print!("{report}");
        }
        None => {
            write_output(None, &body)?;
            eprint!("{report}");
        }
    }
    Ok(Done::Ok)
}

/// Fails with exit 3 before any dense operator is allocated.
fn ensure_dense(n: usize, limits: &DenseLimits) -> Result<(), Failure> {
    if n > limits.operator_qubits {
        return Err(VerifyError::LimitExceeded { what: "operator qubits", needed: n, limit: limits.operator_qubits }.into());
    }
    Ok(())
}

fn cmd_verify_dense(p: &PauliString, theta: Angle, corrupt: bool) -> Result<Done, Failure> {
    let limits = DenseLimits::from_env();
    ensure_dense(p.len(), &limits)?;
    let built = if corrupt { theta.negated() } else { theta };
    let c = decompose(p, built);
    let target = target_exponential(p, theta)?;
    let v = check_equivalence_with(&c, &target, &limits)?;
    println!("{}", v.to_json());
    Ok(if v.equivalent { Done::Ok } else { Done::NotEquivalent })
}

/// Compares each sampled branch's action on single-qubit X and Z with that
/// of exp(iθP) for θ = kπ/2: anticommuting generators pick up (-1)^k.
fn cmd_verify_tableau(p: &PauliString, theta: Angle, corrupt: bool, samples: usize, seed: u64) -> Result<Done, Failure> {
    let Some(k) = theta.quarter_turns() else {
        return Err(Failure::Input("--tableau needs a Clifford angle (a multiple of pi/2)".into()));
    };
    let built = if corrupt { theta.negated() } else { theta };
    let c = decompose(p, built);
    let n = p.len();
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let mut failing = None;
    for sample in 0..samples {
        let run = tableau_run(&c, &Outcomes::Sampled(seeds.random()))?;
        let images = conjugation_action(&run)?;
        let bad = images.iter().enumerate().any(|(q, (xi, zi))| {
            [(Pauli::X, xi), (Pauli::Z, zi)].into_iter().any(|(g, img)| {
                let letters: Vec<Pauli> = (0..n).map(|j| if j == q { g } else { Pauli::I }).collect();
                let negative = k % 2 == 1 && g.anticommutes(p.letters()[q]);
                img.string.letters() != letters.as_slice() || img.negative != negative
            })
        });
        if bad {
            let bits: String = run.outcomes.iter().map(|o| o.map_or('-', |b| if b { '1' } else { '0' })).collect();
            failing = Some(json!({ "sample": sample, "outcomes": bits }));
            break;
        }
    }
    let equivalent = failing.is_none();
    let mut v = json!({ "equivalent": equivalent, "mode": "tableau", "samples": samples });
    if let Some(f) = failing {
        v["failing_branch"] = f;
    }
    println!("{v}");
    Ok(if equivalent { Done::Ok } else { Done::NotEquivalent })
}

fn cmd_trace(pauli: &str, theta: &str, check: bool, emit: Emit, out: Option<&Path>) -> Result<Done, Failure> {
    let (p, theta) = (pauli_arg(pauli)?, angle_arg(theta)?);
    let t = rewrite_trace(&p, theta);
    let body = match emit {
        Emit::Json => t.to_json(),
        Emit::Text => {
            let mut s = format!("initial\n{}", t.initial.to_text());
            for (k, step) in t.steps.iter().enumerate() {
                let (a, b) = step.site.span;
                let _ = write!(s, "\nstep {} {} at {a}..{b}\n{}", k + 1, step.rule, step.circuit.to_text());
            }
            s
        }
        Emit::Svg => return Err(Failure::Input("--emit svg applies to schedule only".into())),
    };
    let mut done = Done::Ok;
    if check {
        let limits = DenseLimits::from_env();
        ensure_dense(p.len(), &limits)?;
        let target = target_exponential(&p, theta)?;
        let circuits = std::iter::once(("initial".to_string(), &t.initial))
            .chain(t.steps.iter().enumerate().map(|(k, s)| (format!("step {} {}", k + 1, s.rule), &s.circuit)));
        for (label, c) in circuits {
            let v = check_equivalence_with(c, &target, &limits)?;
            eprintln!("{label}: equivalent {} (deviation {:.3e})", v.equivalent, v.worst_deviation);
            if !v.equivalent {
                done = Done::NotEquivalent;
            }
        }
    }
    write_output(out, &body)?;
    Ok(done)
}

/// Writes to stdout, or to `path` through a temporary file and a rename.
fn write_output(path: Option<&Path>, body: &str) -> Result<(), Failure> {
    let mut text = body.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let Some(path) = path else {
        print!("{text}");
        return Ok(());
    };
    let io = |e: std::io::Error| Failure::Internal(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
