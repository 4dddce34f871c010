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

//! Rotation angles and their classification.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, TAU};
use std::fmt;

use thiserror::Error;

const KIND_TOL: f64 = 1e-12;

/// Classification of an angle modulo 2π.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AngleKind {
    /// Integer multiple of π/2; the exponential is a Clifford.
    Clifford,
    /// Multiple of π/8 that is not Clifford.
    TLike,
    Generic,
}

/// The θ of `exp(iθP)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle {
    value: f64,
    kind: AngleKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse angle {0:?}")]
pub struct AngleParseError(pub String);

fn near_multiple(value: f64, step: f64) -> bool {
    let r = value.rem_euclid(TAU);
    let k = (r / step).round();
    (r - k * step).abs() <= KIND_TOL
}

impl Angle {
    pub fn new(value: f64) -> Angle {
        let kind = if near_multiple(value, FRAC_PI_2) {
            AngleKind::Clifford
        } else if near_multiple(value, FRAC_PI_8) {
            AngleKind::TLike
        } else {
            AngleKind::Generic
        };
        Angle { value, kind }
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn kind(self) -> AngleKind {
        self.kind
    }

    pub fn is_clifford(self) -> bool {
        self.kind == AngleKind::Clifford
    }

    /// The corrective angle 2θ.
    pub fn corrective(self) -> f64 {
        2.0 * self.value
    }

    pub fn negated(self) -> Angle {
        Angle { value: -self.value, kind: self.kind }
    }

    /// For Clifford angles, `θ / (π/2)` reduced mod 4.
    pub fn quarter_turns(self) -> Option<u8> {
        self.is_clifford()
            .then(|| ((self.value / FRAC_PI_2).round() as i64).rem_euclid(4) as u8)
    }

    /// Parses radians or one of the symbolic tokens `pi/2`, `pi/4`, `pi/8`
    /// (optionally signed), plus `pi` itself.
    pub fn parse(text: &str) -> Result<Angle, AngleParseError> {
        let t = text.trim().to_ascii_lowercase();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.as_str()),
        };
        let symbolic = match body {
            "pi" => Some((PI, AngleKind::Clifford)),
            "pi/2" => Some((FRAC_PI_2, AngleKind::Clifford)),
            "pi/4" => Some((FRAC_PI_4, AngleKind::TLike)),
            "pi/8" => Some((FRAC_PI_8, AngleKind::TLike)),
            _ => None,
        };
        if let Some((v, kind)) = symbolic {
            let value = if neg { -v } else { v };
            return Ok(Angle { value, kind });
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Angle::new(v)),
            _ => Err(AngleParseError(text.to_string())),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(Angle::new(FRAC_PI_2).kind(), AngleKind::Clifford);
        assert_eq!(Angle::new(0.0).kind(), AngleKind::Clifford);
        assert_eq!(Angle::new(-3.0 * FRAC_PI_2).kind(), AngleKind::Clifford);
        assert_eq!(Angle::new(FRAC_PI_4).kind(), AngleKind::TLike);
        assert_eq!(Angle::new(3.0 * FRAC_PI_8).kind(), AngleKind::TLike);
        assert_eq!(Angle::new(0.3).kind(), AngleKind::Generic);
        assert_eq!(Angle::new(FRAC_PI_2 + 1e-9).kind(), AngleKind::Generic);
        assert_eq!(Angle::new(TAU + FRAC_PI_2).kind(), AngleKind::Clifford);
    }

    #[test]
    fn symbolic_tokens() {
        assert_eq!(Angle::parse("pi/2").unwrap().kind(), AngleKind::Clifford);
        assert_eq!(Angle::parse("pi/8").unwrap().kind(), AngleKind::TLike);
        assert_eq!(Angle::parse("-pi/4").unwrap().value(), -FRAC_PI_4);
        assert!((Angle::parse("1.234").unwrap().value() - 1.234).abs() < 1e-15);
        assert!(Angle::parse("pie").is_err());
        assert!(Angle::parse("inf").is_err());
        assert_eq!(Angle::parse("pi/2").unwrap().quarter_turns(), Some(1));
        assert_eq!(Angle::parse("-pi/2").unwrap().quarter_turns(), Some(3));
    }
}
