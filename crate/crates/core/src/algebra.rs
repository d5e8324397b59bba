//! Index bookkeeping and structure constants of so_{κ1,κ2}(N+1).
//!
//! Generators are `J_{μν}` with `0 ≤ μ < ν ≤ N`; the opposite order is
//! handled by [`signed_pair`] (`J_{νμ} = −J_{μν}`). Every κ-dependent
//! coefficient that appears in the algebra is a signed monomial κ1^a κ2^b,
//! which lets the same table drive numeric checks and exact certificates.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A generator label `J_{μν}` with `μ < ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Gen {
    pub mu: usize,
    pub nu: usize,
}

impl Gen {
    pub fn new(mu: usize, nu: usize) -> Result<Self> {
        if mu >= nu {
            return Err(Error::IndexOrder { mu, nu });
        }
        Ok(Gen { mu, nu })
    }

    pub fn check_dim(self, dim: usize) -> Result<Self> {
        if self.nu > dim {
            return Err(Error::IndexRange {
                index: self.nu,
                min: 1,
                max: dim,
            });
        }
        Ok(self)
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nu >= 10 {
            write!(f, "J{},{}", self.mu, self.nu)
        } else {
            write!(f, "J{}{}", self.mu, self.nu)
        }
    }
}

/// Resolves `J_{ab}` for arbitrary `a ≠ b` into `(sign, J_{min,max})`.
pub fn signed_pair(a: usize, b: usize) -> (f64, Gen) {
    debug_assert_ne!(a, b);
    if a < b {
        (1.0, Gen { mu: a, nu: b })
    } else {
        (-1.0, Gen { mu: b, nu: a })
    }
}

/// All `N(N+1)/2` generators in lexicographic order.
pub fn generators(dim: usize) -> Vec<Gen> {
    let mut out = Vec::with_capacity(dim * (dim + 1) / 2);
    for mu in 0..=dim {
        for nu in mu + 1..=dim {
            out.push(Gen { mu, nu });
        }
    }
    out
}

/// Signed monomial `sign · κ1^k1 · κ2^k2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KappaMonomial {
    pub sign: i8,
    pub k1: u8,
    pub k2: u8,
}

impl KappaMonomial {
    pub const ONE: KappaMonomial = KappaMonomial {
        sign: 1,
        k1: 0,
        k2: 0,
    };

    pub fn negated(self) -> Self {
        KappaMonomial {
            sign: -self.sign,
            ..self
        }
    }

    pub fn times(self, o: KappaMonomial) -> Self {
        KappaMonomial {
            sign: self.sign * o.sign,
            k1: self.k1 + o.k1,
            k2: self.k2 + o.k2,
        }
    }

    pub fn eval(self, kappa1: f64, kappa2: f64) -> f64 {
        f64::from(self.sign) * kappa1.powi(self.k1 as i32) * kappa2.powi(self.k2 as i32)
    }

    /// Evaluates in any ring given the two parameters as ring elements.
    pub fn eval_in<T>(self, kappa1: &T, kappa2: &T) -> T
    where
        T: Clone + Zero + One + std::ops::Neg<Output = T> + std::ops::Mul<Output = T>,
    {
        let mut acc = T::one();
        for _ in 0..self.k1 {
            acc = acc * kappa1.clone();
        }
        for _ in 0..self.k2 {
            acc = acc * kappa2.clone();
        }
        if self.sign < 0 {
            -acc
        } else {
            acc
        }
    }
}

/// Product of the contraction parameters attached to the steps
/// `μ→μ+1→…→ν`: the step into index 1 carries κ1, into index 2 carries κ2,
/// all later steps carry 1. Equivalently `g_ν / g_μ` for the metric
/// `diag(1, κ1, κ1κ2, …, κ1κ2)`.
pub fn step_coefficient(mu: usize, nu: usize) -> KappaMonomial {
    debug_assert!(mu <= nu);
    KappaMonomial {
        sign: 1,
        k1: u8::from(mu < 1 && nu >= 1),
        k2: u8::from(mu < 2 && nu >= 2),
    }
}

/// Diagonal entry `g_μ` of `I_κ = diag(1, κ1, κ1κ2, …, κ1κ2)`.
pub fn metric_entry(mu: usize) -> KappaMonomial {
    step_coefficient(0, mu)
}

/// Right-hand side of `{J_a, J_b}`: `Some((c, J_c))` meaning `c·J_c`, or
/// `None` for a vanishing bracket.
///
/// With `x < y < z` the non-vanishing brackets are
/// `{J_xy, J_xz} = c_xy J_yz`, `{J_xy, J_yz} = −J_xz`,
/// `{J_xz, J_yz} = c_yz J_xy`, plus their antisymmetric counterparts.
pub fn bracket(a: Gen, b: Gen) -> Option<(KappaMonomial, Gen)> {
    if a == b {
        return None;
    }
    let mut idx = [a.mu, a.nu, b.mu, b.nu];
    idx.sort_unstable();
    let shared = idx.windows(2).filter(|w| w[0] == w[1]).count();
    if shared != 1 {
        return None;
    }
    let mut distinct: Vec<usize> = idx.to_vec();
    distinct.dedup();
    let (x, y, z) = (distinct[0], distinct[1], distinct[2]);
    let xy = Gen { mu: x, nu: y };
    let xz = Gen { mu: x, nu: z };
    let yz = Gen { mu: y, nu: z };
    let neg_one = KappaMonomial::ONE.negated();
    let rhs = match (a, b) {
        (p, q) if p == xy && q == xz => (step_coefficient(x, y), yz),
        (p, q) if p == xy && q == yz => (neg_one, xz),
        (p, q) if p == xz && q == yz => (step_coefficient(y, z), xy),
        (p, q) if p == xz && q == xy => (step_coefficient(x, y).negated(), yz),
        (p, q) if p == yz && q == xy => (KappaMonomial::ONE, xz),
        (p, q) if p == yz && q == xz => (step_coefficient(y, z).negated(), xy),
        _ => unreachable!("pairs sharing one index always match a pattern"),
    };
    Some(rhs)
}

/// Coefficient of `J_{μν}²` in the quadratic Casimir
/// `κ2 J01² + Σ J0j² + κ1 Σ J1j² + κ1κ2 Σ_{i<j} Jij²`.
pub fn casimir_coefficient(g: Gen) -> KappaMonomial {
    match (g.mu, g.nu) {
        (0, 1) => KappaMonomial {
            sign: 1,
            k1: 0,
            k2: 1,
        },
        (0, _) => KappaMonomial::ONE,
        (1, _) => KappaMonomial {
            sign: 1,
            k1: 1,
            k2: 0,
        },
        _ => KappaMonomial {
            sign: 1,
            k1: 1,
            k2: 1,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(mu: usize, nu: usize) -> Gen {
        Gen::new(mu, nu).unwrap()
    }

    fn k(sign: i8, k1: u8, k2: u8) -> KappaMonomial {
        KappaMonomial { sign, k1, k2 }
    }

    #[test]
    fn table_rows_reproduced() {
        // rotations among j, k ≥ 2
        assert_eq!(bracket(g(2, 3), g(2, 4)), Some((k(1, 0, 0), g(3, 4))));
        assert_eq!(bracket(g(2, 3), g(3, 4)), Some((k(-1, 0, 0), g(2, 4))));
        assert_eq!(bracket(g(2, 4), g(3, 4)), Some((k(1, 0, 0), g(2, 3))));
        // boosts / rotations with index 1
        assert_eq!(bracket(g(1, 2), g(1, 3)), Some((k(1, 0, 1), g(2, 3))));
        assert_eq!(bracket(g(1, 2), g(2, 3)), Some((k(-1, 0, 0), g(1, 3))));
        assert_eq!(bracket(g(1, 3), g(2, 3)), Some((k(1, 0, 0), g(1, 2))));
        // translations
        assert_eq!(bracket(g(0, 1), g(0, 3)), Some((k(1, 1, 0), g(1, 3))));
        assert_eq!(bracket(g(0, 1), g(1, 3)), Some((k(-1, 0, 0), g(0, 3))));
        assert_eq!(bracket(g(0, 3), g(1, 3)), Some((k(1, 0, 1), g(0, 1))));
        assert_eq!(bracket(g(0, 2), g(0, 3)), Some((k(1, 1, 1), g(2, 3))));
        assert_eq!(bracket(g(0, 2), g(2, 3)), Some((k(-1, 0, 0), g(0, 3))));
        assert_eq!(bracket(g(0, 3), g(2, 3)), Some((k(1, 0, 0), g(0, 2))));
    }

    #[test]
    fn antisymmetric_and_vanishing() {
        for a in generators(5) {
            for b in generators(5) {
                match (bracket(a, b), bracket(b, a)) {
                    (None, None) => {}
                    (Some((c1, g1)), Some((c2, g2))) => {
                        assert_eq!(g1, g2);
                        assert_eq!(c1, c2.negated());
                    }
                    other => panic!("asymmetric table entry {a} {b}: {other:?}"),
                }
            }
        }
        assert_eq!(bracket(g(0, 1), g(2, 3)), None);
        assert_eq!(bracket(g(1, 2), g(1, 2)), None);
    }

    #[test]
    fn index_order_enforced() {
        assert!(matches!(Gen::new(2, 2), Err(Error::IndexOrder { .. })));
        assert!(matches!(Gen::new(3, 1), Err(Error::IndexOrder { .. })));
        assert_eq!(generators(2).len(), 3);
        assert_eq!(generators(4).len(), 10);
    }

    #[test]
    fn metric_diagonal() {
        assert_eq!(metric_entry(0), KappaMonomial::ONE);
        assert_eq!(metric_entry(1), k(1, 1, 0));
        assert_eq!(metric_entry(4), k(1, 1, 1));
    }
}
