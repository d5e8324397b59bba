//! Differentiable phase-space functions and the canonical Poisson bracket.
//!
//! An [`Observable`] wraps any [`PhaseFunction`], a formula written once
//! against a generic scalar. Gradients come from forward-mode dual numbers
//! (one directional pass per canonical coordinate), Hessians from nested
//! duals; nothing is finite-differenced.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::PolarCoords;
use crate::scalar::{Dual, Scalar};

/// Point of the polar phase space: `q = (r, θ, φ3..φN)`,
/// `p = (p_r, p_θ, p_φ3..p_φN)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<S> {
    pub q: Vec<S>,
    pub p: Vec<S>,
}

impl<S: Scalar> PhasePoint<S> {
    pub fn new(q: Vec<S>, p: Vec<S>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                got: p.len(),
            });
        }
        Ok(PhasePoint { q, p })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn coords(&self) -> PolarCoords<S> {
        PolarCoords(self.q.clone())
    }

    /// Canonical coordinate `k` of the flattened vector `(q, p)`.
    pub fn component(&self, k: usize) -> S {
        let n = self.dim();
        if k < n {
            self.q[k]
        } else {
            self.p[k - n]
        }
    }

    /// Flattened `(q, p)`.
    pub fn to_vec(&self) -> Vec<S> {
        let mut v = self.q.clone();
        v.extend_from_slice(&self.p);
        v
    }

    pub fn from_slice(z: &[S]) -> Self {
        let n = z.len() / 2;
        PhasePoint {
            q: z[..n].to_vec(),
            p: z[n..].to_vec(),
        }
    }

    fn map<T>(&self, f: impl Fn(usize, S) -> T) -> PhasePoint<T> {
        let n = self.dim();
        PhasePoint {
            q: self.q.iter().enumerate().map(|(i, &v)| f(i, v)).collect(),
            p: self
                .p
                .iter()
                .enumerate()
                .map(|(i, &v)| f(n + i, v))
                .collect(),
        }
    }
}

/// Scalars an [`Observable`] can be evaluated on. Sealed: implemented for
/// `f64`, `Dual<f64>` and `Dual<Dual<f64>>`.
pub trait ObsScalar: Scalar + sealed::Sealed {
    #[doc(hidden)]
    fn dispatch(f: &dyn DynPhaseFunction, z: &PhasePoint<Self>) -> Result<Self>;
}

mod sealed {
    pub trait Sealed {}
    impl Sealed for f64 {}
    impl Sealed for super::Dual<f64> {}
    impl Sealed for super::Dual<super::Dual<f64>> {}
}

impl ObsScalar for f64 {
    fn dispatch(f: &dyn DynPhaseFunction, z: &PhasePoint<Self>) -> Result<Self> {
        f.eval_f64(z)
    }
}

impl ObsScalar for Dual<f64> {
    fn dispatch(f: &dyn DynPhaseFunction, z: &PhasePoint<Self>) -> Result<Self> {
        f.eval_dual(z)
    }
}

impl ObsScalar for Dual<Dual<f64>> {
    fn dispatch(f: &dyn DynPhaseFunction, z: &PhasePoint<Self>) -> Result<Self> {
        f.eval_hyper(z)
    }
}

/// A scalar formula on phase space, generic over the evaluation scalar.
pub trait PhaseFunction: Send + Sync + 'static {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S>;
}

/// Object-safe face of [`PhaseFunction`].
pub trait DynPhaseFunction: Send + Sync {
    fn eval_f64(&self, z: &PhasePoint<f64>) -> Result<f64>;
    fn eval_dual(&self, z: &PhasePoint<Dual<f64>>) -> Result<Dual<f64>>;
    fn eval_hyper(&self, z: &PhasePoint<Dual<Dual<f64>>>) -> Result<Dual<Dual<f64>>>;
}

impl<T: PhaseFunction> DynPhaseFunction for T {
    fn eval_f64(&self, z: &PhasePoint<f64>) -> Result<f64> {
        self.eval(z)
    }
    fn eval_dual(&self, z: &PhasePoint<Dual<f64>>) -> Result<Dual<f64>> {
        self.eval(z)
    }
    fn eval_hyper(&self, z: &PhasePoint<Dual<Dual<f64>>>) -> Result<Dual<Dual<f64>>> {
        self.eval(z)
    }
}

/// Named, cheaply clonable phase-space function.
#[derive(Clone)]
pub struct Observable {
    name: String,
    f: Arc<dyn DynPhaseFunction>,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Observable").field(&self.name).finish()
    }
}

impl Observable {
    pub fn new(name: impl Into<String>, f: impl PhaseFunction) -> Self {
        Observable {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        S::dispatch(&*self.f, z)
    }

    pub fn value(&self, z: &PhasePoint<f64>) -> Result<f64> {
        self.eval(z)
    }

    /// `(∂/∂q_1..∂/∂q_N, ∂/∂p_1..∂/∂p_N)`, one dual pass per entry.
    pub fn gradient(&self, z: &PhasePoint<f64>) -> Result<Vec<f64>> {
        let dim = 2 * z.dim();
        (0..dim)
            .map(|k| {
                let seeded = z.map(|i, v| Dual::new(v, if i == k { 1.0 } else { 0.0 }));
                Ok(self.eval(&seeded)?.eps)
            })
            .collect()
    }

    /// Symmetric `2N × 2N` Hessian from nested duals, row-major.
    pub fn hessian(&self, z: &PhasePoint<f64>) -> Result<Vec<Vec<f64>>> {
        let dim = 2 * z.dim();
        let mut h = vec![vec![0.0; dim]; dim];
        for a in 0..dim {
            for b in a..dim {
                let seeded = z.map(|i, v| {
                    Dual::new(
                        Dual::new(v, if i == b { 1.0 } else { 0.0 }),
                        Dual::new(if i == a { 1.0 } else { 0.0 }, 0.0),
                    )
                });
                let d2 = self.eval(&seeded)?.eps.eps;
                h[a][b] = d2;
                h[b][a] = d2;
            }
        }
        Ok(h)
    }

    pub fn constant(c: f64) -> Self {
        Observable::new(format!("{c}"), Constant(c))
    }

    /// The canonical coordinate `q_i` (0-based: 0 = r, 1 = θ, …).
    pub fn coordinate(i: usize) -> Self {
        Observable::new(format!("q{}", i + 1), Coordinate(i))
    }

    /// The canonical momentum `p_i` (0-based).
    pub fn momentum(i: usize) -> Self {
        Observable::new(format!("p{}", i + 1), Momentum(i))
    }

    /// `Σ c_k f_k`.
    pub fn linear_combination(
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (f64, Observable)>,
    ) -> Self {
        Observable::new(name, LinearCombination(terms.into_iter().collect()))
    }

    pub fn sum(name: impl Into<String>, terms: impl IntoIterator<Item = Observable>) -> Self {
        Self::linear_combination(name, terms.into_iter().map(|t| (1.0, t)))
    }

    pub fn product(name: impl Into<String>, factors: impl IntoIterator<Item = Observable>) -> Self {
        Observable::new(name, Product(factors.into_iter().collect()))
    }

    pub fn plus(&self, o: &Observable) -> Self {
        Self::sum(
            format!("({} + {})", self.name, o.name),
            [self.clone(), o.clone()],
        )
    }

    pub fn minus(&self, o: &Observable) -> Self {
        Self::linear_combination(
            format!("({} - {})", self.name, o.name),
            [(1.0, self.clone()), (-1.0, o.clone())],
        )
    }

    pub fn times(&self, o: &Observable) -> Self {
        Self::product(
            format!("{}*{}", self.name, o.name),
            [self.clone(), o.clone()],
        )
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::linear_combination(format!("{c}*{}", self.name), [(c, self.clone())])
    }

    pub fn squared(&self) -> Self {
        Self::product(format!("{}^2", self.name), [self.clone(), self.clone()])
    }
}

impl PhaseFunction for Observable {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        Observable::eval(self, z)
    }
}

struct Constant(f64);

impl PhaseFunction for Constant {
    fn eval<S: ObsScalar>(&self, _z: &PhasePoint<S>) -> Result<S> {
        Ok(S::from_f64(self.0))
    }
}

struct Coordinate(usize);

impl PhaseFunction for Coordinate {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        Ok(z.q[self.0])
    }
}

struct Momentum(usize);

impl PhaseFunction for Momentum {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        Ok(z.p[self.0])
    }
}

struct LinearCombination(Vec<(f64, Observable)>);

impl PhaseFunction for LinearCombination {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        let mut acc = S::zero();
        for (c, f) in &self.0 {
            acc += f.eval(z)?.scale(*c);
        }
        Ok(acc)
    }
}

struct Product(Vec<Observable>);

impl PhaseFunction for Product {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        let mut acc = S::one();
        for f in &self.0 {
            acc *= f.eval(z)?;
        }
        Ok(acc)
    }
}

/// `|den|` below which an observable refuses to divide.
pub const SINGULAR_EPS: f64 = 1e-12;

/// `1/den`, or [`Error::SingularEvaluation`] when `den` is numerically zero.
pub fn guarded_recip<S: Scalar>(den: S, what: &'static str) -> Result<S> {
    if den.re().abs() < SINGULAR_EPS {
        Err(Error::SingularEvaluation(what))
    } else {
        Ok(S::one() / den)
    }
}

/// `{f, g}` from the two gradients laid out as `(∂q, ∂p)`.
pub fn bracket_from_gradients(gf: &[f64], gg: &[f64]) -> f64 {
    let n = gf.len() / 2;
    (0..n).map(|i| gf[i] * gg[n + i] - gg[i] * gf[n + i]).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Scale used to normalize bracket residuals: `max(1, ‖∇f‖·‖∇g‖)`.
pub fn bracket_scale(gf: &[f64], gg: &[f64]) -> f64 {
    (norm(gf) * norm(gg)).max(1.0)
}

/// Canonical Poisson bracket
/// `{f, g} = Σ_i (∂f/∂q_i ∂g/∂p_i − ∂g/∂q_i ∂f/∂p_i)`.
pub fn poisson_bracket(f: &Observable, g: &Observable, z: &PhasePoint<f64>) -> Result<f64> {
    let gf = f.gradient(z)?;
    let gg = g.gradient(z)?;
    Ok(bracket_from_gradients(&gf, &gg))
}

/// `|{f, g}| / max(1, ‖∇f‖‖∇g‖)`.
pub fn normalized_bracket(f: &Observable, g: &Observable, z: &PhasePoint<f64>) -> Result<f64> {
    let gf = f.gradient(z)?;
    let gg = g.gradient(z)?;
    Ok(bracket_from_gradients(&gf, &gg).abs() / bracket_scale(&gf, &gg))
}

/// `|a − b| / max(1, |a|, |b|)`, used wherever two values of the same
/// quantity are compared.
pub fn normalized_difference(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt() -> PhasePoint<f64> {
        PhasePoint::new(vec![0.7, 1.1, 0.4], vec![0.3, -0.2, 0.9]).unwrap()
    }

    /// f = q1² p2 + sin(q3) p1, as a custom phase function
    struct Sample;
    impl PhaseFunction for Sample {
        fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
            Ok(z.q[0] * z.q[0] * z.p[1] + z.q[2].sin() * z.p[0])
        }
    }

    #[test]
    fn canonical_pairs() {
        let z = pt();
        for i in 0..3 {
            for j in 0..3 {
                let b = poisson_bracket(&Observable::coordinate(i), &Observable::momentum(j), &z)
                    .unwrap();
                assert_eq!(b, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn self_bracket_vanishes_exactly() {
        let f = Observable::new("f", Sample);
        assert_eq!(poisson_bracket(&f, &f, &pt()).unwrap(), 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = Observable::new("f", Sample);
        let z = pt();
        let g = f.gradient(&z).unwrap();
        let base = z.to_vec();
        for k in 0..6 {
            let h = 1e-6;
            let mut up = base.clone();
            let mut dn = base.clone();
            up[k] += h;
            dn[k] -= h;
            let fd = (f.value(&PhasePoint::from_slice(&up)).unwrap()
                - f.value(&PhasePoint::from_slice(&dn)).unwrap())
                / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-8, "component {k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let f = Observable::new("f", Sample);
        let z = pt();
        let hess = f.hessian(&z).unwrap();
        let base = z.to_vec();
        for k in 0..6 {
            let h = 1e-6;
            let mut up = base.clone();
            let mut dn = base.clone();
            up[k] += h;
            dn[k] -= h;
            let gu = f.gradient(&PhasePoint::from_slice(&up)).unwrap();
            let gd = f.gradient(&PhasePoint::from_slice(&dn)).unwrap();
            for j in 0..6 {
                let fd = (gu[j] - gd[j]) / (2.0 * h);
                assert!((fd - hess[k][j]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn leibniz_rule() {
        let z = pt();
        let f = Observable::new("f", Sample);
        let g = Observable::coordinate(1).plus(&Observable::momentum(2).squared());
        let h = Observable::momentum(0).times(&Observable::coordinate(2));
        let lhs = poisson_bracket(&f, &g.times(&h), &z).unwrap();
        let rhs = g.value(&z).unwrap() * poisson_bracket(&f, &h, &z).unwrap()
            + h.value(&z).unwrap() * poisson_bracket(&f, &g, &z).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn mismatched_point_rejected() {
        assert!(PhasePoint::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }
}
