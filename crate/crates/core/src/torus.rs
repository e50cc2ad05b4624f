//! Torus geometry, deformation parameter, torus characters with their
//! star-product phases, and theta-characteristic parity.
//!
//! A particle with position period `L` and momentum period `P` lives on a
//! noncommutative torus whose two modular translation unitaries obey
//! `UV = e^{2πiθ₀} VU` with deformation parameter `θ₀ = 2πħ/(LP)`. The
//! displacement lattice steps are `α₀ = 2πħ/P` in position and `β₀ = 2πħ/L`
//! in momentum.

use num_complex::Complex64;
use num_rational::Rational64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Torus geometry: position period, momentum period, Planck constant.
///
/// All derived quantities (`θ₀`, `α₀`, `β₀`) are computed on demand so a
/// geometry is fully described by three positive reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGeometry {
    l: f64,
    p: f64,
    hbar: f64,
}

impl TorusGeometry {
    /// General constructor; rejects non-finite or non-positive inputs.
    pub fn new(l: f64, p: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("L", l), ("P", p), ("hbar", hbar)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self { l, p, hbar })
    }

    /// Geometry with `ħ = 1`.
    pub fn standard(l: f64, p: f64) -> Result<Self> {
        Self::new(l, p, 1.0)
    }

    /// Position period `L`.
    pub fn position_period(&self) -> f64 {
        self.l
    }

    /// Momentum period `P`.
    pub fn momentum_period(&self) -> f64 {
        self.p
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Deformation parameter `θ₀ = 2πħ/(LP)`.
    pub fn deformation_parameter(&self) -> f64 {
        TAU * self.hbar / (self.l * self.p)
    }

    /// Position lattice step `α₀ = 2πħ/P`.
    pub fn position_step(&self) -> f64 {
        TAU * self.hbar / self.p
    }

    /// Momentum lattice step `β₀ = 2πħ/L`.
    pub fn momentum_step(&self) -> f64 {
        TAU * self.hbar / self.l
    }

    /// The commutator phase `e^{2πiθ₀}` of the two modular translations.
    pub fn commutation_phase(&self) -> Complex64 {
        Complex64::new(0.0, TAU * self.deformation_parameter()).exp()
    }

    /// Geometry with both periods scaled by `c` (the flat-limit direction).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.l * c, self.p * c, self.hbar)
    }
}

/// A plane-wave character `χ_{m,n}` on the continuous torus, together with
/// the unit-modulus phase accumulated through star products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusCharacter {
    pub m: i64,
    pub n: i64,
    pub phase: Complex64,
}

impl TorusCharacter {
    /// Bare character with unit phase.
    pub fn new(m: i64, n: i64) -> Self {
        Self {
            m,
            n,
            phase: Complex64::new(1.0, 0.0),
        }
    }

    /// Star product of two characters.
    ///
    /// Indices add; the phase picks up `e^{iπθ₀(n₁m₂ − m₁n₂)}`, the same
    /// antisymmetric exponent that governs composition of the lattice
    /// displacement operators, so `(0,n) ⋆ (m,0)` carries `e^{+iπθ₀mn}`.
    pub fn star(&self, other: &TorusCharacter, geom: &TorusGeometry) -> TorusCharacter {
        let theta0 = geom.deformation_parameter();
        let exponent = PI * theta0 * (self.n * other.m - self.m * other.n) as f64;
        TorusCharacter {
            m: self.m + other.m,
            n: self.n + other.n,
            phase: self.phase * other.phase * Complex64::new(0.0, exponent).exp(),
        }
    }
}

/// Star product as a free function, mirroring the operator composition law.
pub fn character_star(
    a: &TorusCharacter,
    b: &TorusCharacter,
    geom: &TorusGeometry,
) -> TorusCharacter {
    a.star(b, geom)
}

/// Parity class of a theta characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Half-characteristic `[ε; δ]` of a genus-2 theta function, stored as exact
/// rationals so characteristic arithmetic (parity, lattice shifts) never
/// drifts. Floating conversion happens only at theta-evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaCharacteristic {
    pub epsilon: [Rational64; 2],
    pub delta: [Rational64; 2],
}

impl ThetaCharacteristic {
    pub fn new(epsilon: [Rational64; 2], delta: [Rational64; 2]) -> Self {
        Self { epsilon, delta }
    }

    /// The zero characteristic `[0,0; 0,0]`.
    pub fn zero() -> Self {
        let z = Rational64::new(0, 1);
        Self::new([z, z], [z, z])
    }

    /// The half characteristic `ε = δ = (1/2, 1/2)`.
    pub fn half() -> Self {
        let h = Rational64::new(1, 2);
        Self::new([h, h], [h, h])
    }

    /// Parity of the characteristic: even iff `4εᵀδ ≡ 0 (mod 2)`.
    ///
    /// Defined for half-integer entries only; anything else is a domain
    /// error. Note both `[0;0]` and `[1/2,1/2;1/2,1/2]` are even in genus 2.
    pub fn parity(&self) -> Result<Parity> {
        parity_form(&self.epsilon, &self.delta)
    }
}

/// Parity form `4εᵀδ mod 2` for half-integer characteristic vectors of any
/// genus (the genus-1 case is used as a cross-check in tests).
pub fn parity_form(epsilon: &[Rational64], delta: &[Rational64]) -> Result<Parity> {
    debug_assert_eq!(epsilon.len(), delta.len());
    for entry in epsilon.iter().chain(delta.iter()) {
        if !(*entry * 2).is_integer() {
            return Err(Error::Domain(format!(
                "characteristic entry {entry} is not a half-integer"
            )));
        }
    }
    let form: Rational64 = epsilon
        .iter()
        .zip(delta.iter())
        .map(|(e, d)| *e * *d * 4)
        .sum();
    debug_assert!(form.is_integer());
    if form.numer().rem_euclid(2) == 0 {
        Ok(Parity::Even)
    } else {
        Ok(Parity::Odd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom_with_theta0(theta0: f64) -> TorusGeometry {
        // theta0 = 2*pi*hbar/(L*P); pick P = 2*pi, hbar = 1 => L = 1/theta0
        TorusGeometry::new(1.0 / theta0, TAU, 1.0).unwrap()
    }

    #[test]
    fn deformation_parameter_examples() {
        let g = TorusGeometry::standard(TAU, 1.0).unwrap();
        assert_eq!(g.deformation_parameter(), 1.0);

        let g = TorusGeometry::standard(TAU, TAU).unwrap();
        assert!((g.deformation_parameter() - 0.15915494309189535).abs() < 1e-16);

        for hbar in [0.5, 1.0, 3.0] {
            let g = TorusGeometry::new(1.0, TAU * hbar, hbar).unwrap();
            assert!((g.deformation_parameter() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn step_product_consistency() {
        let g = TorusGeometry::new(5.0, 7.0, 2.0).unwrap();
        let lhs = g.position_step() * g.momentum_step() / (TAU * g.hbar());
        assert!((lhs - g.deformation_parameter()).abs() < 1e-16);
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(TorusGeometry::new(0.0, 1.0, 1.0).is_err());
        assert!(TorusGeometry::new(1.0, -2.0, 1.0).is_err());
        assert!(TorusGeometry::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn commutation_phase_examples() {
        let minus_one = geom_with_theta0(0.5).commutation_phase();
        assert!((minus_one - Complex64::new(-1.0, 0.0)).norm() < 1e-14);

        let plus_one = geom_with_theta0(1.0).commutation_phase();
        assert!((plus_one - Complex64::new(1.0, 0.0)).norm() < 1e-14);

        let plus_i = geom_with_theta0(0.25).commutation_phase();
        assert!((plus_i - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn star_reproduces_ordered_special_case() {
        let g = geom_with_theta0(0.5);
        // (0,1) * (1,0) -> (1,1) with phase e^{i pi/2} = +i
        let c = TorusCharacter::new(0, 1).star(&TorusCharacter::new(1, 0), &g);
        assert_eq!((c.m, c.n), (1, 1));
        assert!((c.phase - Complex64::new(0.0, 1.0)).norm() < 1e-14);

        // reversed order picks up the antisymmetric phase: -i
        let c = TorusCharacter::new(1, 0).star(&TorusCharacter::new(0, 1), &g);
        assert_eq!((c.m, c.n), (1, 1));
        assert!((c.phase - Complex64::new(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn star_identity_character() {
        let g = geom_with_theta0(0.37);
        let a = TorusCharacter::new(3, -2);
        let c = TorusCharacter::new(0, 0).star(&a, &g);
        assert_eq!((c.m, c.n), (3, -2));
        assert!((c.phase - a.phase).norm() < 1e-15);
    }

    #[test]
    fn star_phase_stays_unimodular() {
        let g = geom_with_theta0(0.731);
        let mut c = TorusCharacter::new(1, 2);
        for k in -4..=4i64 {
            c = c.star(&TorusCharacter::new(k, 1 - k), &g);
            assert!((c.phase.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn star_associativity_exhaustive() {
        let g = geom_with_theta0(0.3173);
        let range = -3..=3i64;
        let chars: Vec<TorusCharacter> = range
            .clone()
            .flat_map(|m| range.clone().map(move |n| TorusCharacter::new(m, n)))
            .collect();
        for a in &chars {
            for b in &chars {
                let ab = a.star(b, &g);
                for c in &chars {
                    let left = ab.star(c, &g);
                    let right = a.star(&b.star(c, &g), &g);
                    assert_eq!((left.m, left.n), (right.m, right.n));
                    assert!((left.phase - right.phase).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn star_commutator_matches_torus_algebra() {
        // UV = e^{2 pi i theta0} VU for (a,b) = ((0,1),(1,0))
        let g = geom_with_theta0(0.211);
        let u = TorusCharacter::new(0, 1);
        let v = TorusCharacter::new(1, 0);
        let uv = u.star(&v, &g);
        let vu = v.star(&u, &g);
        let ratio = uv.phase / vu.phase;
        assert!((ratio - g.commutation_phase()).norm() < 1e-14);
    }

    #[test]
    fn parity_examples() {
        assert_eq!(ThetaCharacteristic::zero().parity().unwrap(), Parity::Even);
        assert_eq!(ThetaCharacteristic::half().parity().unwrap(), Parity::Even);

        let h = Rational64::new(1, 2);
        // genus-1 analogue [1/2; 1/2] is the standard odd characteristic
        assert_eq!(parity_form(&[h], &[h]).unwrap(), Parity::Odd);

        // a genuinely odd genus-2 characteristic
        let z = Rational64::new(0, 1);
        assert_eq!(parity_form(&[h, z], &[h, z]).unwrap(), Parity::Odd);
    }

    #[test]
    fn parity_rejects_non_half_integers() {
        let third = Rational64::new(1, 3);
        let z = Rational64::new(0, 1);
        assert!(parity_form(&[third, z], &[z, z]).is_err());
    }

    #[test]
    fn parity_invariant_under_integer_shifts() {
        let h = Rational64::new(1, 2);
        let z = Rational64::new(0, 1);
        for (e, d) in [([h, z], [h, h]), ([z, h], [h, z]), ([h, h], [h, h])] {
            let base = parity_form(&e, &d).unwrap();
            for shift in [-2i64, -1, 1, 3] {
                let shifted: Vec<Rational64> =
                    e.iter().map(|x| *x + Rational64::from(shift)).collect();
                assert_eq!(parity_form(&shifted, &d).unwrap(), base);
            }
        }
    }
}
