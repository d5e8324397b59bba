//! κ-dependent trigonometric functions.
//!
//! `ck`/`sk` interpolate between circular (κ > 0), linear (κ = 0) and
//! hyperbolic (κ < 0) behaviour:
//!
//! | κ     | `ck(κ, x)`     | `sk(κ, x)`           |
//! |-------|----------------|----------------------|
//! | κ > 0 | cos(√κ x)      | sin(√κ x) / √κ       |
//! | κ = 0 | 1              | x                    |
//! | κ < 0 | cosh(√−κ x)    | sinh(√−κ x) / √−κ    |
//!
//! Near the contraction (|κx²| small) both are evaluated from their Taylor
//! series in `u = κx²`, which is smooth in κ and avoids `0/0`. The series is
//! truncated after the cubic term; at the switch-over the remainder is below
//! 1e-28 relative.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// |κx²| below which the Taylor branch is used.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// |ck| below which `tk` refuses to divide.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// A real contraction parameter (κ1 or κ2). Any finite sign is allowed.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Kappa(pub f64);

impl Kappa {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl From<f64> for Kappa {
    fn from(v: f64) -> Self {
        Kappa(v)
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
fn use_series<S: Scalar>(kappa: f64, x: &S) -> bool {
    let xr = x.re();
    (kappa * xr * xr).abs() < SERIES_THRESHOLD
}

/// κ-cosine.
pub fn ck<S: Scalar>(kappa: Kappa, x: S) -> S {
    let k = kappa.0;
    if use_series(k, &x) {
        // 1 - u/2 + u²/24 - u³/720
        let u = x * x * S::from_f64(k);
        let mut acc = S::from_f64(-1.0 / 720.0);
        acc = acc * u + S::from_f64(1.0 / 24.0);
        acc = acc * u + S::from_f64(-0.5);
        acc * u + S::one()
    } else if k > 0.0 {
        (x * S::from_f64(k.sqrt())).cos()
    } else {
        (x * S::from_f64((-k).sqrt())).cosh()
    }
}

/// κ-sine.
pub fn sk<S: Scalar>(kappa: Kappa, x: S) -> S {
    let k = kappa.0;
    if use_series(k, &x) {
        // x (1 - u/6 + u²/120 - u³/5040)
        let u = x * x * S::from_f64(k);
        let mut acc = S::from_f64(-1.0 / 5040.0);
        acc = acc * u + S::from_f64(1.0 / 120.0);
        acc = acc * u + S::from_f64(-1.0 / 6.0);
        x * (acc * u + S::one())
    } else if k > 0.0 {
        let s = k.sqrt();
        (x * S::from_f64(s)).sin() * S::from_f64(1.0 / s)
    } else {
        let s = (-k).sqrt();
        (x * S::from_f64(s)).sinh() * S::from_f64(1.0 / s)
    }
}

/// κ-tangent `sk/ck`; fails with [`Error::DivisionAtPole`] when
/// `|ck| < POLE_THRESHOLD`.
pub fn tk<S: Scalar>(kappa: Kappa, x: S) -> Result<S> {
    let c = ck(kappa, x);
    if c.re().abs() < POLE_THRESHOLD {
        return Err(Error::DivisionAtPole { ck: c.re() });
    }
    Ok(sk(kappa, x) / c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dual;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    /// Exact-rational partial sums of the power series of ck/sk. Used as an
    /// independent oracle (40 terms ≫ 30 significant digits for |u| ≤ 4).
    fn series_oracle(kappa: BigRational, x: BigRational) -> (f64, f64) {
        let u = -kappa * &x * &x;
        let mut c_term = BigRational::from_integer(BigInt::from(1));
        let mut s_term = x.clone();
        let mut c = c_term.clone();
        let mut s = s_term.clone();
        for n in 1..40u32 {
            let a = BigInt::from(2 * n - 1);
            let b = BigInt::from(2 * n);
            let d = BigInt::from(2 * n + 1);
            c_term = c_term * &u / BigRational::from_integer(&a * &b);
            s_term = s_term * &u / BigRational::from_integer(&b * &d);
            c += &c_term;
            s += &s_term;
        }
        (c.to_f64().unwrap(), s.to_f64().unwrap())
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn contraction_values() {
        assert_eq!(ck(Kappa(0.0), 5.3), 1.0);
        assert_eq!(sk(Kappa(0.0), 5.3), 5.3);
        assert_eq!(tk(Kappa(0.0), -3.0).unwrap(), -3.0);
    }

    #[test]
    fn circular_values() {
        assert!(ck(Kappa(1.0), FRAC_PI_2).abs() < 1e-16);
        assert!((sk(Kappa(4.0), FRAC_PI_4) - 0.5).abs() < 1e-16);
        assert!((tk(Kappa(1.0), FRAC_PI_4).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tangent_pole_is_an_error() {
        let err = tk(Kappa(1.0), FRAC_PI_2).unwrap_err();
        assert!(matches!(err, Error::DivisionAtPole { .. }));
        assert!(err.is_singular());
    }

    #[test]
    fn hyperbolic_matches_rational_series() {
        let (c, s) = series_oracle(rat(-1, 1), rat(1, 1));
        assert_eq!(c, 1.5430806348152437);
        assert!((ck(Kappa(-1.0), 1.0) - c).abs() <= 2.0 * f64::EPSILON * c);
        assert!((sk(Kappa(-1.0), 1.0) - s).abs() <= 2.0 * f64::EPSILON * s);
    }

    #[test]
    fn tiny_kappa_uses_series_consistently() {
        // u = 4e-9; the series branch must agree with the exact expansion.
        let (c, s) = series_oracle(rat(1, 1_000_000_000), rat(2, 1));
        assert!((sk(Kappa(1e-9), 2.0) - s).abs() <= 2.0 * f64::EPSILON * s);
        assert!((ck(Kappa(1e-9), 2.0) - c).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn branch_switch_is_continuous() {
        // just below / above |u| = 1e-6, compared with the plain closed forms
        for x in [
            (SERIES_THRESHOLD * 0.999_999).sqrt(),
            (SERIES_THRESHOLD * 1.000_001).sqrt(),
        ] {
            assert!((ck(Kappa(1.0), x) - x.cos()).abs() < 1e-16);
            assert!((ck(Kappa(-1.0), x) - x.cosh()).abs() < 1e-16);
            assert!((sk(Kappa(1.0), x) - x.sin()).abs() < 1e-19);
            assert!((sk(Kappa(-1.0), x) - x.sinh()).abs() < 1e-19);
        }
    }

    #[test]
    fn generic_over_f32() {
        let c: f32 = ck(Kappa(1.0), 0.5_f32);
        assert!((c - 0.5_f32.cos()).abs() < 1e-6);
        let s: f32 = sk(Kappa(-2.0), 0.5_f32);
        assert!((s - (2.0_f32.sqrt() * 0.5).sinh() / 2.0_f32.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn pythagorean_identity_spot() {
        for &k in &[3.0, 0.5, 0.0, -0.5, -3.0] {
            let x = 0.9;
            let c = ck(Kappa(k), x);
            let s = sk(Kappa(k), x);
            assert!((c * c + k * s * s - 1.0).abs() < 4.0 * f64::EPSILON * (c * c).max(1.0));
        }
        assert!(ck(Kappa(1.0), PI) + 1.0 < 1e-15);
    }

    proptest! {
        #[test]
        fn pythagorean_identity(k in -4.0f64..4.0, x in -3.0f64..3.0) {
            let c = ck(Kappa(k), x);
            let s = sk(Kappa(k), x);
            // 4 ulps of the larger term
            let scale = (c * c).max((k * s * s).abs()).max(1.0);
            prop_assert!((c * c + k * s * s - 1.0).abs() <= 4.0 * f64::EPSILON * scale);
        }

        #[test]
        fn dual_derivatives_match_finite_differences(k in -4.0f64..4.0, x in -3.0f64..3.0) {
            let kk = Kappa(k);
            let h = 1e-6;
            let ds = sk(kk, Dual::variable(x)).eps;
            let dc = ck(kk, Dual::variable(x)).eps;
            let fd_s = (sk(kk, x + h) - sk(kk, x - h)) / (2.0 * h);
            let fd_c = (ck(kk, x + h) - ck(kk, x - h)) / (2.0 * h);
            // analytic identities
            prop_assert!((ds - ck(kk, x)).abs() <= 1e-12 * ds.abs().max(1.0));
            prop_assert!((dc + k * sk(kk, x)).abs() <= 1e-12 * dc.abs().max(1.0));
            // finite-difference oracle
            prop_assert!((ds - fd_s).abs() <= 1e-7 * ds.abs().max(1.0));
            prop_assert!((dc - fd_c).abs() <= 1e-7 * dc.abs().max(1.0));
        }

        #[test]
        fn continuity_at_zero_curvature(eps in -1e-8f64..1e-8, x in -3.0f64..3.0) {
            prop_assert!((ck(Kappa(eps), x) - 1.0).abs() < 1e-7);
            prop_assert!((sk(Kappa(eps), x) - x).abs() < 1e-7);
        }

        #[test]
        fn parity(k in -4.0f64..4.0, x in -3.0f64..3.0) {
            let kk = Kappa(k);
            let c = ck(kk, x);
            let s = sk(kk, x);
            prop_assert!((ck(kk, -x) - c).abs() <= 2.0 * f64::EPSILON * c.abs().max(1.0));
            prop_assert!((sk(kk, -x) + s).abs() <= 2.0 * f64::EPSILON * s.abs().max(1.0));
        }
    }
}
