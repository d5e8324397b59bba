//! Scalar abstraction shared by every numeric kernel, and forward-mode dual
//! numbers built on top of it.
//!
//! All geometric and phase-space code is written against [`Scalar`], so the
//! same formula evaluates to a plain value (`f64`/`f32`), a first derivative
//! (`Dual<f64>`), or a second derivative (`Dual<Dual<f64>>`). Branch
//! decisions inside kernels look only at [`Scalar::re`], never at the
//! derivative parts.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

/// Arithmetic plus the handful of elementary functions the kernels need.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_f64(v: f64) -> Self;

    /// Leading real part (recursively, for nested duals).
    fn re(&self) -> f64;

    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc *= self;
        }
        acc
    }

    fn scale(self, c: f64) -> Self {
        self * Self::from_f64(c)
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            #[inline]
            fn re(&self) -> f64 {
                *self as f64
            }
            #[inline]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline]
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            #[inline]
            fn sinh(self) -> Self {
                <$t>::sinh(self)
            }
            #[inline]
            fn cosh(self) -> Self {
                <$t>::cosh(self)
            }
            #[inline]
            fn powi(self, n: u32) -> Self {
                <$t>::powi(self, n as i32)
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

/// Dual number `re + eps·ε` with `ε² = 0`.
///
/// Nesting (`Dual<Dual<f64>>`) yields mixed second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: S) -> Self {
        Dual { re, eps: S::zero() }
    }

    /// Independent variable: derivative seed 1.
    pub fn variable(re: S) -> Self {
        Dual { re, eps: S::one() }
    }
}

impl<S: Scalar> Zero for Dual<S> {
    fn zero() -> Self {
        Dual::constant(S::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<S: Scalar> One for Dual<S> {
    fn one() -> Self {
        Dual::constant(S::one())
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = S::one() / o.re;
        let q = self.re * inv;
        Dual::new(q, (self.eps - q * o.eps) * inv)
    }
}

impl<S: Scalar> AddAssign for Dual<S> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<S: Scalar> SubAssign for Dual<S> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<S: Scalar> MulAssign for Dual<S> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn from_f64(v: f64) -> Self {
        Dual::constant(S::from_f64(v))
    }

    fn re(&self) -> f64 {
        self.re.re()
    }

    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.eps / (s + s))
    }

    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.eps * self.re.cos())
    }

    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.eps * self.re.sin()))
    }

    fn sinh(self) -> Self {
        Dual::new(self.re.sinh(), self.eps * self.re.cosh())
    }

    fn cosh(self) -> Self {
        Dual::new(self.re.cosh(), self.eps * self.re.sinh())
    }
}
