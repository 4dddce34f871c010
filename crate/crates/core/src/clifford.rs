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

//! The 24 single-qubit Cliffords and per-qubit Clifford layers.

use std::fmt;
use std::sync::LazyLock;

use num_complex::Complex64 as C64;

use crate::pauli::{Pauli, PauliString};

/// 2x2 complex matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];

/// A Pauli letter with a sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub negative: bool,
    pub pauli: Pauli,
}

impl SignedPauli {
    pub const fn plus(pauli: Pauli) -> Self {
        SignedPauli { negative: false, pauli }
    }

    pub const fn minus(pauli: Pauli) -> Self {
        SignedPauli { negative: true, pauli }
    }
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { '-' } else { '+' }, self.pauli)
    }
}

/// Elementary generator used to spell a Clifford.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H,
    S,
}

struct Entry {
    matrix: Mat2,
    word: Vec<Gate>,
    x_img: SignedPauli,
    z_img: SignedPauli,
}

fn letter_index(p: Pauli) -> usize {
    match p {
        Pauli::X => 0,
        Pauli::Y => 1,
        Pauli::Z => 2,
        Pauli::I => unreachable!("identity is not an axis image"),
    }
}

const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// Stable id from the images of X and Z.
fn id_of(x_img: SignedPauli, z_img: SignedPauli) -> u8 {
    let ix = 2 * letter_index(x_img.pauli) + x_img.negative as usize;
    let others: Vec<Pauli> = AXES.iter().copied().filter(|&p| p != x_img.pauli).collect();
    let which = others
        .iter()
        .position(|&p| p == z_img.pauli)
        .expect("Z image must differ from X image");
    (4 * ix + 2 * which + z_img.negative as usize) as u8
}

pub(crate) fn pauli_matrix(p: Pauli) -> Mat2 {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match p {
        Pauli::I => [[l, o], [o, l]],
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[l, o], [o, -l]],
    }
}

pub(crate) fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut r = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

pub(crate) fn adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn close(a: &Mat2, b: &Mat2) -> bool {
    (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < 1e-9))
}

fn image(u: &Mat2, p: Pauli) -> SignedPauli {
    let c = mat_mul(&mat_mul(u, &pauli_matrix(p)), &adjoint(u));
    for q in AXES {
        let m = pauli_matrix(q);
        if close(&c, &m) {
            return SignedPauli::plus(q);
        }
        let neg = m.map(|row| row.map(|v| -v));
        if close(&c, &neg) {
            return SignedPauli::minus(q);
        }
    }
    unreachable!("conjugate of a Pauli by a Clifford is a signed Pauli")
}

static TABLE: LazyLock<Vec<Entry>> = LazyLock::new(|| {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let o = C64::new(0.0, 0.0);
    let h: Mat2 = [[C64::new(s2, 0.0), C64::new(s2, 0.0)], [C64::new(s2, 0.0), C64::new(-s2, 0.0)]];
    let s: Mat2 = [[C64::new(1.0, 0.0), o], [o, C64::new(0.0, 1.0)]];
    let mut slots: Vec<Option<Entry>> = (0..24).map(|_| None).collect();
    let identity = pauli_matrix(Pauli::I);
    let mut queue = std::collections::VecDeque::new();
    queue.push_back((identity, Vec::new()));
    while let Some((m, word)) = queue.pop_front() {
        let x_img = image(&m, Pauli::X);
        let z_img = image(&m, Pauli::Z);
        let id = id_of(x_img, z_img) as usize;
        if slots[id].is_some() {
            continue;
        }
        for (g, gm) in [(Gate::H, &h), (Gate::S, &s)] {
            let mut w: Vec<Gate> = word.clone();
            w.push(g);
            queue.push_back((mat_mul(gm, &m), w));
        }
        slots[id] = Some(Entry { matrix: m, word, x_img, z_img });
    }
    slots.into_iter().map(|e| e.expect("group has 24 elements")).collect()
});

/// One of the 24 single-qubit Cliffords, identified by its action on X and Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clifford1(u8);

impl Clifford1 {
    pub fn from_id(id: u8) -> Option<Clifford1> {
        (id < 24).then_some(Clifford1(id))
    }

    /// The element with the given images of X and Z, if they anticommute.
    pub fn from_images(x_img: SignedPauli, z_img: SignedPauli) -> Option<Clifford1> {
        if x_img.pauli.is_identity() || z_img.pauli.is_identity() || x_img.pauli == z_img.pauli {
            return None;
        }
        Some(Clifford1(id_of(x_img, z_img)))
    }

    pub fn identity() -> Clifford1 {
        Self::named(Pauli::X, false, Pauli::Z, false)
    }

    pub fn h() -> Clifford1 {
        Self::named(Pauli::Z, false, Pauli::X, false)
    }

    pub fn s() -> Clifford1 {
        Self::named(Pauli::Y, false, Pauli::Z, false)
    }

    pub fn sdg() -> Clifford1 {
        Self::named(Pauli::Y, true, Pauli::Z, false)
    }

    /// The Pauli gate `p` viewed as a Clifford.
    pub fn pauli(p: Pauli) -> Clifford1 {
        match p {
            Pauli::I => Self::identity(),
            Pauli::X => Self::named(Pauli::X, false, Pauli::Z, true),
            Pauli::Y => Self::named(Pauli::X, true, Pauli::Z, true),
            Pauli::Z => Self::named(Pauli::X, true, Pauli::Z, false),
        }
    }

    /// The element mapping Z to +Y and fixing X.
    pub fn z_to_y() -> Clifford1 {
        Self::named(Pauli::X, false, Pauli::Y, false)
    }

    fn named(x: Pauli, xn: bool, z: Pauli, zn: bool) -> Clifford1 {
        Clifford1(id_of(SignedPauli { negative: xn, pauli: x }, SignedPauli { negative: zn, pauli: z }))
    }

    pub fn id(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Clifford1> {
        (0..24).map(Clifford1)
    }

    fn entry(self) -> &'static Entry {
        &TABLE[self.0 as usize]
    }

    pub fn matrix(self) -> Mat2 {
        self.entry().matrix
    }

    /// H/S word whose product (applied left to right) is this element.
    pub fn word(self) -> &'static [Gate] {
        &self.entry().word
    }

    pub fn is_identity(self) -> bool {
        self == Self::identity()
    }

    /// `C P C†`.
    pub fn conjugate(self, p: SignedPauli) -> SignedPauli {
        let e = self.entry();
        let img = match p.pauli {
            Pauli::I => SignedPauli::plus(Pauli::I),
            Pauli::X => e.x_img,
            Pauli::Z => e.z_img,
            Pauli::Y => {
                // Y = i X Z
                let (k, r) = e.x_img.pauli.product(e.z_img.pauli);
                let k = (k + 1) % 4;
                debug_assert!(k % 2 == 0);
                SignedPauli { negative: (k == 2) ^ e.x_img.negative ^ e.z_img.negative, pauli: r }
            }
        };
        SignedPauli { negative: img.negative ^ p.negative, pauli: img.pauli }
    }

    /// Symplectic action on `(x, z)` bits, ignoring signs.
    pub fn map_bits(self, x: bool, z: bool) -> (bool, bool) {
        let img = self.conjugate(SignedPauli::plus(Pauli::from_bits(x, z)));
        (img.pauli.x_bit(), img.pauli.z_bit())
    }

    /// `self` applied first, then `next`.
    pub fn then(self, next: Clifford1) -> Clifford1 {
        let x = next.conjugate(self.conjugate(SignedPauli::plus(Pauli::X)));
        let z = next.conjugate(self.conjugate(SignedPauli::plus(Pauli::Z)));
        Clifford1::from_images(x, z).expect("images of a Clifford anticommute")
    }

    pub fn inverse(self) -> Clifford1 {
        Clifford1::all()
            .find(|c| self.then(*c).is_identity())
            .expect("group element has an inverse")
    }
}

impl fmt::Display for Clifford1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.entry();
        write!(f, "C{}[X->{},Z->{}]", self.0, e.x_img, e.z_img)
    }
}

/// One single-qubit Clifford per data qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordLayer {
    gates: Vec<Clifford1>,
}

impl CliffordLayer {
    pub fn identity(n: usize) -> CliffordLayer {
        CliffordLayer { gates: vec![Clifford1::identity(); n] }
    }

    pub fn new(gates: Vec<Clifford1>) -> CliffordLayer {
        CliffordLayer { gates }
    }

    pub fn gates(&self) -> &[Clifford1] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn inverse(&self) -> CliffordLayer {
        CliffordLayer { gates: self.gates.iter().map(|g| g.inverse()).collect() }
    }

    /// `self` applied first, then `next`.
    pub fn then(&self, next: &CliffordLayer) -> CliffordLayer {
        assert_eq!(self.len(), next.len(), "layer widths differ");
        CliffordLayer {
            gates: self.gates.iter().zip(&next.gates).map(|(a, b)| a.then(*b)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.gates.iter().all(|g| g.is_identity())
    }
}

/// Returns `(C, Pz)` with `C Pz C† = P`, `Pz` carrying Z exactly on the support of `P`.
pub fn conjugate_to_z_form(p: &PauliString) -> (CliffordLayer, PauliString) {
    let mut gates = Vec::with_capacity(p.len());
    let mut letters = Vec::with_capacity(p.len());
    for &l in p.letters() {
        let (g, z) = match l {
            Pauli::I => (Clifford1::identity(), Pauli::I),
            Pauli::X => (Clifford1::h(), Pauli::Z),
            Pauli::Y => (Clifford1::z_to_y(), Pauli::Z),
            Pauli::Z => (Clifford1::identity(), Pauli::Z),
        };
        gates.push(g);
        letters.push(z);
    }
    (CliffordLayer::new(gates), PauliString::new(letters).expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_24_distinct_elements() {
        let mut seen = std::collections::HashSet::new();
        for c in Clifford1::all() {
            let x = c.conjugate(SignedPauli::plus(Pauli::X));
            let z = c.conjugate(SignedPauli::plus(Pauli::Z));
            assert!(seen.insert((x, z)));
            // The word reproduces the matrix up to phase.
            let mut m = pauli_matrix(Pauli::I);
            let s2 = std::f64::consts::FRAC_1_SQRT_2;
            for g in c.word() {
                let gm: Mat2 = match g {
                    Gate::H => [[C64::new(s2, 0.0), C64::new(s2, 0.0)], [C64::new(s2, 0.0), C64::new(-s2, 0.0)]],
                    Gate::S => [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(0.0, 1.0)]],
                };
                m = mat_mul(&gm, &m);
            }
            assert_eq!(image(&m, Pauli::X), x);
            assert_eq!(image(&m, Pauli::Z), z);
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn y_image_matches_matrix() {
        for c in Clifford1::all() {
            assert_eq!(c.conjugate(SignedPauli::plus(Pauli::Y)), image(&c.matrix(), Pauli::Y));
        }
    }

    #[test]
    fn group_laws() {
        for a in Clifford1::all() {
            assert!(a.then(a.inverse()).is_identity());
            assert!(a.inverse().then(a).is_identity());
            for b in Clifford1::all() {
                let m = mat_mul(&b.matrix(), &a.matrix());
                let ab = a.then(b);
                assert_eq!(image(&m, Pauli::X), ab.conjugate(SignedPauli::plus(Pauli::X)));
                assert_eq!(image(&m, Pauli::Z), ab.conjugate(SignedPauli::plus(Pauli::Z)));
            }
        }
    }

    #[test]
    fn named_elements() {
        let h = Clifford1::h();
        assert_eq!(h.conjugate(SignedPauli::plus(Pauli::Z)), SignedPauli::plus(Pauli::X));
        assert_eq!(Clifford1::s().conjugate(SignedPauli::plus(Pauli::X)), SignedPauli::plus(Pauli::Y));
        assert_eq!(Clifford1::z_to_y().conjugate(SignedPauli::plus(Pauli::Z)), SignedPauli::plus(Pauli::Y));
        assert_eq!(Clifford1::pauli(Pauli::Z).conjugate(SignedPauli::plus(Pauli::X)), SignedPauli::minus(Pauli::X));
    }

    #[test]
    fn z_form_of_simple_words() {
        let (l, pz) = conjugate_to_z_form(&"ZZ".parse().unwrap());
        assert!(l.is_identity());
        assert_eq!(pz.to_string(), "ZZ");
        let (l, pz) = conjugate_to_z_form(&"X".parse().unwrap());
        assert_eq!(l.gates(), &[Clifford1::h()]);
        assert_eq!(pz.to_string(), "Z");
        let (l, _) = conjugate_to_z_form(&"XIYZ".parse().unwrap());
        assert!(l.then(&l.inverse()).is_identity());
    }
}
