//! Dense geometric algebra of three-dimensional Euclidean space, Cl(3,0).
//!
//! A [`Multivector3`] carries all eight blade coefficients. The basis is
//! `1, e1, e2, e3, e23, e31, e12, e123` with `e_k e_k = +1` and
//! `e_j e_k = -e_k e_j` for `j != k`. The pseudoscalar `I = e1 e2 e3`
//! squares to `-1`, commutes with everything, and is the algebra's
//! imaginary unit: `e1 e2 = I e3`.
//!
//! Rotors use the convention `R(B, θ) = exp(-B θ / 2)`, applied as
//! `R x R~`. With `B = e12` and `θ > 0` this turns `e1` toward `e2`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|B|² - 1` accepted when building a rotor from a plane.
pub const UNIT_PLANE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Multivector3 {
    pub s: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub b23: f64,
    pub b31: f64,
    pub b12: f64,
    pub p: f64,
}

impl Multivector3 {
    pub const ZERO: Self = Self::from_array([0.0; 8]);
    pub const ONE: Self = Self::from_array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    pub const E1: Self = Self::from_array([0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    pub const E2: Self = Self::from_array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    pub const E3: Self = Self::from_array([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    pub const E23: Self = Self::from_array([0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    pub const E31: Self = Self::from_array([0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    pub const E12: Self = Self::from_array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    /// The pseudoscalar `e1 e2 e3`.
    pub const I: Self = Self::from_array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);

    /// Components in basis order `1, e1, e2, e3, e23, e31, e12, e123`.
    pub const fn from_array(c: [f64; 8]) -> Self {
        Self {
            s: c[0],
            v1: c[1],
            v2: c[2],
            v3: c[3],
            b23: c[4],
            b31: c[5],
            b12: c[6],
            p: c[7],
        }
    }

    pub const fn to_array(self) -> [f64; 8] {
        [
            self.s, self.v1, self.v2, self.v3, self.b23, self.b31, self.b12, self.p,
        ]
    }

    pub const fn scalar(s: f64) -> Self {
        Self::from_array([s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    pub const fn vector(x: f64, y: f64, z: f64) -> Self {
        Self::from_array([0.0, x, y, z, 0.0, 0.0, 0.0, 0.0])
    }

    pub const fn bivector(b23: f64, b31: f64, b12: f64) -> Self {
        Self::from_array([0.0, 0.0, 0.0, 0.0, b23, b31, b12, 0.0])
    }

    pub const fn pseudoscalar(p: f64) -> Self {
        Self::from_array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, p])
    }

    pub fn scale(self, k: f64) -> Self {
        Self::from_array(self.to_array().map(|c| c * k))
    }

    /// Grade-`g` part; every other grade is exactly zero.
    pub fn grade(self, g: usize) -> Result<Self> {
        let mask: [bool; 8] = match g {
            0 => [true, false, false, false, false, false, false, false],
            1 => [false, true, true, true, false, false, false, false],
            2 => [false, false, false, false, true, true, true, false],
            3 => [false, false, false, false, false, false, false, true],
            _ => {
                return Err(Error::domain(
                    "grade",
                    format!("grade index {g} outside 0..=3"),
                ))
            }
        };
        let c = self.to_array();
        let mut out = [0.0; 8];
        for k in 0..8 {
            if mask[k] {
                out[k] = c[k];
            }
        }
        Ok(Self::from_array(out))
    }

    /// Reversion: grades 0 and 1 unchanged, grades 2 and 3 negated.
    pub fn reverse(self) -> Self {
        Self {
            b23: -self.b23,
            b31: -self.b31,
            b12: -self.b12,
            p: -self.p,
            ..self
        }
    }

    /// Full geometric product.
    pub fn gp(self, b: Self) -> Self {
        let a = self;
        Self {
            s: a.s * b.s + a.v1 * b.v1 + a.v2 * b.v2 + a.v3 * b.v3
                - a.b23 * b.b23
                - a.b31 * b.b31
                - a.b12 * b.b12
                - a.p * b.p,
            v1: a.s * b.v1 + a.v1 * b.s - a.v2 * b.b12 + a.v3 * b.b31 - a.b23 * b.p - a.b31 * b.v3
                + a.b12 * b.v2
                - a.p * b.b23,
            v2: a.s * b.v2 + a.v1 * b.b12 + a.v2 * b.s - a.v3 * b.b23 + a.b23 * b.v3 - a.b31 * b.p
                - a.b12 * b.v1
                - a.p * b.b31,
            v3: a.s * b.v3 - a.v1 * b.b31 + a.v2 * b.b23 + a.v3 * b.s - a.b23 * b.v2 + a.b31 * b.v1
                - a.b12 * b.p
                - a.p * b.b12,
            b23: a.s * b.b23 + a.v1 * b.p + a.v2 * b.v3 - a.v3 * b.v2 + a.b23 * b.s
                - a.b31 * b.b12
                + a.b12 * b.b31
                + a.p * b.v1,
            b31: a.s * b.b31 - a.v1 * b.v3 + a.v2 * b.p + a.v3 * b.v1 + a.b23 * b.b12 + a.b31 * b.s
                - a.b12 * b.b23
                + a.p * b.v2,
            b12: a.s * b.b12 + a.v1 * b.v2 - a.v2 * b.v1 + a.v3 * b.p - a.b23 * b.b31
                + a.b31 * b.b23
                + a.b12 * b.s
                + a.p * b.v3,
            p: a.s * b.p + a.v1 * b.b23 + a.v2 * b.b31 + a.v3 * b.b12 + a.b23 * b.v1 + a.b31 * b.v2
                + a.b12 * b.v3
                + a.p * b.s,
        }
    }

    /// Symmetric (inner) product of two grade-1 values; scalar part of `a b`.
    pub fn dot(self, b: Self) -> f64 {
        self.v1 * b.v1 + self.v2 * b.v2 + self.v3 * b.v3
    }

    /// Euclidean norm over all eight coefficients.
    pub fn norm(self) -> f64 {
        self.to_array().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn is_grade(self, g: usize, tol: f64) -> bool {
        match self.grade(g) {
            Ok(part) => (self - part).max_abs() <= tol,
            Err(_) => false,
        }
    }
}

/// Geometric product as a free function.
pub fn gp(a: Multivector3, b: Multivector3) -> Multivector3 {
    a.gp(b)
}

pub fn grade(a: Multivector3, g: usize) -> Result<Multivector3> {
    a.grade(g)
}

pub fn reverse(a: Multivector3) -> Multivector3 {
    a.reverse()
}

impl Add for Multivector3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|k| a[k] + b[k]))
    }
}

impl AddAssign for Multivector3 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Multivector3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|k| a[k] - b[k]))
    }
}

impl Neg for Multivector3 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Multivector3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.gp(rhs)
    }
}

impl Mul<f64> for Multivector3 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<Multivector3> for f64 {
    type Output = Multivector3;
    fn mul(self, rhs: Multivector3) -> Multivector3 {
        rhs.scale(self)
    }
}

/// Unit even multivector `s + b23 e23 + b31 e31 + b12 e12`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotor3 {
    pub s: f64,
    pub b23: f64,
    pub b31: f64,
    pub b12: f64,
}

impl Rotor3 {
    pub const IDENTITY: Self = Self {
        s: 1.0,
        b23: 0.0,
        b31: 0.0,
        b12: 0.0,
    };

    /// `exp(-plane * angle / 2) = cos(angle/2) - plane * sin(angle/2)`.
    ///
    /// `plane` must be a pure, unit-norm bivector.
    pub fn new(plane: Multivector3, angle: f64) -> Result<Self> {
        if !plane.is_grade(2, 0.0) {
            return Err(Error::domain("plane", "rotor plane must be a pure bivector"));
        }
        let n2 = plane.b23 * plane.b23 + plane.b31 * plane.b31 + plane.b12 * plane.b12;
        if (n2 - 1.0).abs() > UNIT_PLANE_TOLERANCE {
            return Err(Error::domain(
                "plane",
                format!("rotor plane must have unit norm, got |B|^2 = {n2}"),
            ));
        }
        let (sin, cos) = (0.5 * angle).sin_cos();
        Ok(Self {
            s: cos,
            b23: -plane.b23 * sin,
            b31: -plane.b31 * sin,
            b12: -plane.b12 * sin,
        })
    }

    /// Accepts an even multivector of unit norm (tolerance `tol`).
    pub fn from_multivector(m: Multivector3, tol: f64) -> Result<Self> {
        if m.v1 != 0.0 || m.v2 != 0.0 || m.v3 != 0.0 || m.p != 0.0 {
            return Err(Error::domain("rotor", "rotor must be an even multivector"));
        }
        let r = Self {
            s: m.s,
            b23: m.b23,
            b31: m.b31,
            b12: m.b12,
        };
        if (r.norm_sqr() - 1.0).abs() > tol {
            return Err(Error::domain("rotor", "rotor must have unit norm"));
        }
        Ok(r)
    }

    pub fn norm_sqr(self) -> f64 {
        self.s * self.s + self.b23 * self.b23 + self.b31 * self.b31 + self.b12 * self.b12
    }

    pub fn to_multivector(self) -> Multivector3 {
        Multivector3 {
            s: self.s,
            b23: self.b23,
            b31: self.b31,
            b12: self.b12,
            ..Multivector3::ZERO
        }
    }

    pub fn reverse(self) -> Self {
        Self {
            s: self.s,
            b23: -self.b23,
            b31: -self.b31,
            b12: -self.b12,
        }
    }

    /// Sandwich action `R x R~`.
    pub fn apply(self, x: Multivector3) -> Multivector3 {
        let r = self.to_multivector();
        r.gp(x).gp(r.reverse())
    }

    /// Rotor composition: applying the result equals applying `first` then `self`.
    pub fn compose(self, first: Self) -> Self {
        let m = self.to_multivector().gp(first.to_multivector());
        Self {
            s: m.s,
            b23: m.b23,
            b31: m.b31,
            b12: m.b12,
        }
    }
}

impl Neg for Rotor3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            s: -self.s,
            b23: -self.b23,
            b31: -self.b31,
            b12: -self.b12,
        }
    }
}

pub fn rotor(plane: Multivector3, angle: f64) -> Result<Rotor3> {
    Rotor3::new(plane, angle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    type M = Multivector3;

    /// Basis blades as sorted index lists, matching `Multivector3::to_array` order.
    /// `e31` is stored as `e3 e1`, i.e. the reordering of `[3, 1]`.
    const BLADES: [&[u8]; 8] = [&[], &[1], &[2], &[3], &[2, 3], &[3, 1], &[1, 2], &[1, 2, 3]];

    /// Multiply two index words by concatenation, bubble-sorting with a sign
    /// flip per swap and cancelling equal neighbours (`e_k e_k = 1`).
    fn reduce_word(word: &[u8]) -> (f64, Vec<u8>) {
        let mut w = word.to_vec();
        let mut sign = 1.0;
        loop {
            let mut changed = false;
            let mut i = 0;
            while i + 1 < w.len() {
                if w[i] > w[i + 1] {
                    w.swap(i, i + 1);
                    sign = -sign;
                    changed = true;
                } else if w[i] == w[i + 1] {
                    w.drain(i..i + 2);
                    changed = true;
                    continue;
                }
                i += 1;
            }
            if !changed {
                return (sign, w);
            }
        }
    }

    fn oracle_blade_product(i: usize, j: usize) -> M {
        let mut word = BLADES[i].to_vec();
        word.extend_from_slice(BLADES[j]);
        let (sign, sorted) = reduce_word(&word);
        for (k, blade) in BLADES.iter().enumerate() {
            let (bsign, bsorted) = reduce_word(blade);
            if bsorted == sorted {
                let mut c = [0.0; 8];
                c[k] = sign * bsign;
                return M::from_array(c);
            }
        }
        unreachable!("every product lands on a basis blade")
    }

    fn basis(k: usize) -> M {
        let mut c = [0.0; 8];
        c[k] = 1.0;
        M::from_array(c)
    }

    fn oracle_gp(a: M, b: M) -> M {
        let (ca, cb) = (a.to_array(), b.to_array());
        let mut out = M::ZERO;
        for i in 0..8 {
            for j in 0..8 {
                out += oracle_blade_product(i, j).scale(ca[i] * cb[j]);
            }
        }
        out
    }

    fn close(a: M, b: M, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    fn mv() -> impl Strategy<Value = M> {
        prop::array::uniform8(-2.0..2.0f64).prop_map(M::from_array)
    }

    fn unit_plane() -> impl Strategy<Value = M> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("non-degenerate", |(a, b, c)| a * a + b * b + c * c > 1e-3)
            .prop_map(|(a, b, c)| {
                let n = (a * a + b * b + c * c).sqrt();
                M::bivector(a / n, b / n, c / n)
            })
    }

    #[test]
    fn blade_table_matches_parity_sort_oracle() {
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(basis(i).gp(basis(j)), oracle_blade_product(i, j), "{i} x {j}");
            }
        }
    }

    #[test]
    fn e1_e2_is_i_e3() {
        let e12 = M::E1 * M::E2;
        assert_eq!(e12, M::E12);
        assert_eq!(e12, M::I * M::E3);
    }

    #[test]
    fn pseudoscalar_squares_to_minus_one() {
        assert_eq!(M::I * M::I, M::scalar(-1.0));
    }

    #[test]
    fn basis_vectors_square_and_anticommute() {
        for e in [M::E1, M::E2, M::E3] {
            assert_eq!(e * e, M::ONE);
        }
        assert_eq!(M::E1 * M::E2, -(M::E2 * M::E1));
        assert_eq!(M::E2 * M::E3, -(M::E3 * M::E2));
        assert_eq!(M::E3 * M::E1, -(M::E1 * M::E3));
    }

    #[test]
    fn grade_selection() {
        let x = M::E1 + M::E12;
        assert_eq!(x.grade(1).unwrap(), M::E1);
        assert_eq!((M::E1 * M::E2).grade(2).unwrap(), M::E12);
        assert!(x.grade(4).is_err());
    }

    #[test]
    fn reverse_of_bivector() {
        assert_eq!(M::E12.reverse(), -M::E12);
    }

    #[test]
    fn quarter_turn_takes_e1_to_e2() {
        let r = rotor(M::E12, FRAC_PI_2).unwrap();
        assert!(close(r.apply(M::E1), M::E2, 1e-15));
    }

    #[test]
    fn zero_angle_is_identity() {
        assert_eq!(rotor(M::E12, 0.0).unwrap(), Rotor3::IDENTITY);
    }

    #[test]
    fn full_turn_is_minus_one_but_acts_as_identity() {
        let r = rotor(M::E12, TAU).unwrap();
        assert!(close(r.to_multivector(), M::scalar(-1.0), 1e-15));
        let x = M::vector(0.3, -1.2, 0.7);
        assert!(close(r.apply(x), x, 1e-14));
        let r4 = rotor(M::E12, 2.0 * TAU).unwrap();
        assert!(close(r4.to_multivector(), M::ONE, 1e-15));
    }

    #[test]
    fn rotor_rejects_bad_planes() {
        assert!(rotor(M::bivector(0.0, 0.0, 2.0), 1.0).is_err());
        assert!(rotor(M::E12 + M::E1, 1.0).is_err());
    }

    #[test]
    fn rotor_validation_roundtrip() {
        let r = rotor(M::E23, 0.4).unwrap();
        assert_eq!(Rotor3::from_multivector(r.to_multivector(), 1e-12).unwrap(), r);
        assert!(Rotor3::from_multivector(M::E1, 1e-12).is_err());
        assert!(Rotor3::from_multivector(M::scalar(2.0), 1e-12).is_err());
    }

    #[test]
    fn compose_adds_angles_in_a_plane() {
        let a = rotor(M::E31, 0.3).unwrap();
        let b = rotor(M::E31, 0.9).unwrap();
        let c = rotor(M::E31, 1.2).unwrap();
        assert!(close(a.compose(b).to_multivector(), c.to_multivector(), 1e-15));
    }

    proptest! {
        #[test]
        fn product_matches_oracle(a in mv(), b in mv()) {
            prop_assert!(close(a.gp(b), oracle_gp(a, b), 1e-12));
        }

        #[test]
        fn product_is_associative(a in mv(), b in mv(), c in mv()) {
            let lhs = (a * b) * c;
            let rhs = a * (b * c);
            let scale = lhs.norm().max(1.0);
            prop_assert!((lhs - rhs).max_abs() <= 1e-10 * scale);
        }

        #[test]
        fn product_distributes(a in mv(), b in mv(), c in mv()) {
            prop_assert!(close(a * (b + c), a * b + a * c, 1e-12));
        }

        #[test]
        fn identity_element(x in mv()) {
            prop_assert_eq!(x * M::ONE, x);
            prop_assert_eq!(M::ONE * x, x);
        }

        #[test]
        fn pseudoscalar_is_central(x in mv()) {
            prop_assert!(close(M::I * x, x * M::I, 1e-15));
        }

        #[test]
        fn grades_sum_to_whole(x in mv()) {
            let sum = (0..4).map(|g| x.grade(g).unwrap()).fold(M::ZERO, |a, b| a + b);
            prop_assert_eq!(sum, x);
        }

        #[test]
        fn grade_projection_is_pure(x in mv(), g in 0usize..4) {
            let part = x.grade(g).unwrap();
            for other in (0..4).filter(|&h| h != g) {
                prop_assert_eq!(part.grade(other).unwrap(), M::ZERO);
            }
        }

        #[test]
        fn reverse_is_an_anti_automorphism(a in mv(), b in mv()) {
            prop_assert!(close((a * b).reverse(), oracle_gp(b.reverse(), a.reverse()), 1e-12));
            prop_assert_eq!(a.reverse().reverse(), a);
        }

        #[test]
        fn rotor_is_unit(plane in unit_plane(), angle in -10.0..10.0f64) {
            let r = rotor(plane, angle).unwrap();
            prop_assert!((r.norm_sqr() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn sandwich_preserves_vector_norm(
            plane in unit_plane(),
            angle in -10.0..10.0f64,
            v in prop::array::uniform3(-1.0..1.0f64),
        ) {
            let r = rotor(plane, angle).unwrap();
            let x = M::vector(v[0], v[1], v[2]);
            let y = r.apply(x);
            prop_assert!(y.is_grade(1, 1e-12));
            prop_assert!((y.norm() - x.norm()).abs() <= 1e-12);
        }

        #[test]
        fn double_cover(plane in unit_plane(), angle in -10.0..10.0f64) {
            let r = rotor(plane, angle).unwrap();
            let r2 = rotor(plane, angle + TAU).unwrap();
            prop_assert!(close(r2.to_multivector(), -r.to_multivector(), 1e-12));
            let x = M::vector(0.2, -0.5, 0.9);
            prop_assert!(close(r2.apply(x), r.apply(x), 1e-12));
        }

        #[test]
        fn rotation_angle_in_e12_plane(angle in -PI..PI) {
            let r = rotor(M::E12, angle).unwrap();
            let y = r.apply(M::E1);
            prop_assert!((y.v1 - angle.cos()).abs() <= 1e-15);
            prop_assert!((y.v2 - angle.sin()).abs() <= 1e-15);
        }
    }
}
