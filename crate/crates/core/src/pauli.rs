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

//! Pauli letters and strings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Builds a letter from its symplectic bits.
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn is_identity(self) -> bool {
        self == Pauli::I
    }

    /// True when the two letters anticommute.
    pub fn anticommutes(self, other: Pauli) -> bool {
        (self.x_bit() & other.z_bit()) ^ (self.z_bit() & other.x_bit())
    }

    /// Product `self * other = i^k * r`, returning `(k mod 4, r)`.
    pub fn product(self, other: Pauli) -> (u8, Pauli) {
        let k = phase_exponent(self.x_bit(), self.z_bit(), other.x_bit(), other.z_bit());
        let r = Pauli::from_bits(self.x_bit() ^ other.x_bit(), self.z_bit() ^ other.z_bit());
        (k.rem_euclid(4) as u8, r)
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Exponent of `i` picked up when multiplying two Hermitian Pauli letters
/// given as symplectic bits.
pub(crate) fn phase_exponent(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Error raised while parsing a Pauli word.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliParseError {
    #[error("empty Pauli string")]
    Empty,
    #[error("invalid letter {letter:?} at position {position}")]
    InvalidLetter { position: usize, letter: char },
}

/// An n-letter word over {I, X, Y, Z}. Letter `k` acts on data qubit `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    /// Builds a string from letters; `None` when empty.
    pub fn new(letters: Vec<Pauli>) -> Option<PauliString> {
        if letters.is_empty() {
            None
        } else {
            Some(PauliString { letters })
        }
    }

    /// `Z` on every one of `n` qubits.
    pub fn all_z(n: usize) -> PauliString {
        PauliString::new(vec![Pauli::Z; n.max(1)]).expect("nonempty")
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Indices of non-identity letters.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_identity())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|p| !p.is_identity()).count()
    }

    /// True when every letter is I or Z.
    pub fn is_z_form(&self) -> bool {
        self.letters.iter().all(|p| matches!(p, Pauli::I | Pauli::Z))
    }
}

/// Parses a Pauli word, case-insensitively.
pub fn parse_pauli(text: &str) -> Result<PauliString, PauliParseError> {
    if text.is_empty() {
        return Err(PauliParseError::Empty);
    }
    let letters = text
        .chars()
        .enumerate()
        .map(|(i, c)| {
            Pauli::from_char(c).ok_or(PauliParseError::InvalidLetter {
                position: i + 1,
                letter: c,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PauliString { letters })
}

impl FromStr for PauliString {
    type Err = PauliParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pauli(s)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_words() {
        let p = parse_pauli("XIYZ").unwrap();
        assert_eq!(p.letters(), &[Pauli::X, Pauli::I, Pauli::Y, Pauli::Z]);
        assert_eq!(parse_pauli("zzzz").unwrap(), PauliString::all_z(4));
        assert_eq!(p.support(), vec![0, 2, 3]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse_pauli(""), Err(PauliParseError::Empty));
        assert_eq!(
            parse_pauli("ZQ"),
            Err(PauliParseError::InvalidLetter { position: 2, letter: 'Q' })
        );
    }

    #[test]
    fn letter_products() {
        assert_eq!(Pauli::X.product(Pauli::Y), (1, Pauli::Z));
        assert_eq!(Pauli::Y.product(Pauli::X), (3, Pauli::Z));
        assert_eq!(Pauli::Z.product(Pauli::X), (1, Pauli::Y));
        assert_eq!(Pauli::Y.product(Pauli::Y), (0, Pauli::I));
        assert!(Pauli::X.anticommutes(Pauli::Z));
        assert!(!Pauli::Y.anticommutes(Pauli::Y));
    }
}
