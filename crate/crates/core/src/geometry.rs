//! The space model S^N_[κ1]κ2: classification, geodesic polar chart,
//! Weierstrass (ambient) coordinates, metric and the vector representation
//! of so_{κ1,κ2}(N+1).
//!
//! Polar coordinates are stored as `[r, θ, φ3, …, φN]`; the angle `φ_s`
//! lives at slot `s − 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{metric_entry, step_coefficient, Gen};
use crate::error::{Error, Result};
use crate::kappa_trig::{ck, sk, Kappa};
use crate::scalar::Scalar;

/// Dimension and contraction parameters of the space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub dim: usize,
    pub kappa1: Kappa,
    pub kappa2: Kappa,
}

impl SpaceSpec {
    pub fn new(dim: usize, kappa1: f64, kappa2: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidSpace(format!(
                "dimension must be ≥ 2, got {dim}"
            )));
        }
        if !kappa1.is_finite() || !kappa2.is_finite() {
            return Err(Error::InvalidSpace(
                "contraction parameters must be finite".into(),
            ));
        }
        if kappa2 == 0.0 {
            return Err(Error::InvalidSpace(
                "kappa2 = 0 gives a degenerate metric".into(),
            ));
        }
        Ok(SpaceSpec {
            dim,
            kappa1: Kappa(kappa1),
            kappa2: Kappa(kappa2),
        })
    }

    /// The six canonical representatives κ1 ∈ {+1, 0, −1}, κ2 ∈ {+1, −1}.
    pub fn six_classes(dim: usize) -> Vec<SpaceSpec> {
        let mut out = Vec::with_capacity(6);
        for &k2 in &[1.0, -1.0] {
            for &k1 in &[1.0, 0.0, -1.0] {
                out.push(SpaceSpec::new(dim, k1, k2).expect("canonical spec is valid"));
            }
        }
        out
    }

    pub fn k1(&self) -> f64 {
        self.kappa1.0
    }

    pub fn k2(&self) -> f64 {
        self.kappa2.0
    }

    /// Number of canonical coordinates (= N).
    pub fn n(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> SpaceLabel {
        classify(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceLabel {
    Spherical,
    Euclidean,
    Hyperbolic,
    AntiDeSitter,
    Minkowskian,
    DeSitter,
}

impl fmt::Display for SpaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceLabel::Spherical => "spherical",
            SpaceLabel::Euclidean => "euclidean",
            SpaceLabel::Hyperbolic => "hyperbolic",
            SpaceLabel::AntiDeSitter => "anti-de-sitter",
            SpaceLabel::Minkowskian => "minkowskian",
            SpaceLabel::DeSitter => "de-sitter",
        };
        f.write_str(s)
    }
}

/// Riemannian for κ2 > 0, Lorentzian for κ2 < 0; curvature sign picks the
/// member of each triple.
pub fn classify(spec: &SpaceSpec) -> SpaceLabel {
    let k1 = spec.k1();
    let riemannian = spec.k2() > 0.0;
    match (riemannian, k1 > 0.0, k1 < 0.0) {
        (true, true, _) => SpaceLabel::Spherical,
        (true, false, false) => SpaceLabel::Euclidean,
        (true, _, true) => SpaceLabel::Hyperbolic,
        (false, true, _) => SpaceLabel::AntiDeSitter,
        (false, false, false) => SpaceLabel::Minkowskian,
        (false, _, true) => SpaceLabel::DeSitter,
    }
}

/// `∏_{s=lo}^{hi} f(s)`; an empty range (`lo > hi`) gives 1.
pub fn range_product<S: Scalar>(lo: usize, hi: usize, f: impl Fn(usize) -> S) -> S {
    (lo..=hi).fold(S::one(), |acc, s| acc * f(s))
}

/// `Σ_{s=lo}^{hi} f(s)`; an empty range gives 0.
pub fn range_sum<S: Scalar>(lo: usize, hi: usize, f: impl Fn(usize) -> S) -> S {
    (lo..=hi).fold(S::zero(), |acc, s| acc + f(s))
}

/// Geodesic polar coordinates `(r, θ, φ3, …, φN)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCoords<S>(pub Vec<S>);

impl<S: Scalar> PolarCoords<S> {
    pub fn new(r: S, theta: S, phi: &[S]) -> Self {
        let mut v = Vec::with_capacity(2 + phi.len());
        v.push(r);
        v.push(theta);
        v.extend_from_slice(phi);
        PolarCoords(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn r(&self) -> S {
        self.0[0]
    }

    pub fn theta(&self) -> S {
        self.0[1]
    }

    /// `φ_s` for `3 ≤ s ≤ N`.
    pub fn phi(&self, s: usize) -> S {
        self.0[s - 1]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }
}

/// Weierstrass coordinates `(x0, …, xN)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint<S>(pub Vec<S>);

impl<S> AmbientPoint<S> {
    pub fn as_slice(&self) -> &[S] {
        &self.0
    }
}

/// Trigonometric quantities of one chart point, computed once and shared by
/// every formula evaluated there.
#[derive(Debug, Clone)]
pub struct ChartValues<S> {
    pub dim: usize,
    /// `Ck_{κ1}(r)`, `Sk_{κ1}(r)`
    pub c1: S,
    pub s1: S,
    /// `Ck_{κ2}(θ)`, `Sk_{κ2}(θ)`
    pub c2: S,
    pub s2: S,
    sin: Vec<S>,
    cos: Vec<S>,
}

impl<S: Scalar> ChartValues<S> {
    pub fn new(spec: &SpaceSpec, q: &[S]) -> Self {
        let n = spec.dim;
        debug_assert_eq!(q.len(), n);
        let mut sin = Vec::with_capacity(n + 1);
        let mut cos = Vec::with_capacity(n + 1);
        for s in 0..=n {
            if s >= 3 {
                sin.push(q[s - 1].sin());
                cos.push(q[s - 1].cos());
            } else {
                sin.push(S::zero());
                cos.push(S::zero());
            }
        }
        ChartValues {
            dim: n,
            c1: ck(spec.kappa1, q[0]),
            s1: sk(spec.kappa1, q[0]),
            c2: ck(spec.kappa2, q[1]),
            s2: sk(spec.kappa2, q[1]),
            sin,
            cos,
        }
    }

    /// `sin φ_s`, `3 ≤ s ≤ N`.
    #[inline]
    pub fn sin(&self, s: usize) -> S {
        debug_assert!((3..=self.dim).contains(&s));
        self.sin[s]
    }

    /// `cos φ_s`, `3 ≤ s ≤ N`.
    #[inline]
    pub fn cos(&self, s: usize) -> S {
        debug_assert!((3..=self.dim).contains(&s));
        self.cos[s]
    }

    /// `∏_{m=lo}^{hi} sin φ_m`.
    pub fn prod_sin(&self, lo: usize, hi: usize) -> S {
        range_product(lo, hi, |m| self.sin(m))
    }

    /// Unit-sphere direction `w_i` (2 ≤ i ≤ N) of the angular coordinates:
    /// `∏_{s=3}^{i} sin φs · cos φ_{i+1}` for `i < N`, `∏_{s=3}^{N} sin φs`
    /// for `i = N`.
    pub fn w(&self, i: usize) -> S {
        debug_assert!((2..=self.dim).contains(&i));
        if i == self.dim {
            self.prod_sin(3, self.dim)
        } else {
            self.prod_sin(3, i) * self.cos(i + 1)
        }
    }

    /// `x_i / Sk_{κ1}(r)`: `Ck_{κ2}(θ)` for `i = 1`, `Sk_{κ2}(θ) w_i` beyond.
    pub fn u(&self, i: usize) -> S {
        if i == 1 {
            self.c2
        } else {
            self.s2 * self.w(i)
        }
    }
}

/// Maps polar coordinates to the ambient point on `Σ = 1`.
pub fn polar_to_ambient<S: Scalar>(spec: &SpaceSpec, q: &PolarCoords<S>) -> AmbientPoint<S> {
    ambient_from_slice(spec, q.as_slice())
}

pub(crate) fn ambient_from_slice<S: Scalar>(spec: &SpaceSpec, q: &[S]) -> AmbientPoint<S> {
    let cv = ChartValues::new(spec, q);
    ambient_from_chart(&cv)
}

pub(crate) fn ambient_from_chart<S: Scalar>(cv: &ChartValues<S>) -> AmbientPoint<S> {
    let mut x = Vec::with_capacity(cv.dim + 1);
    x.push(cv.c1);
    for i in 1..=cv.dim {
        x.push(cv.s1 * cv.u(i));
    }
    AmbientPoint(x)
}

/// `Σ − 1` with `Σ = x0² + κ1 x1² + κ1κ2 Σ_{j≥2} xj²`.
pub fn constraint_residual<S: Scalar>(spec: &SpaceSpec, x: &AmbientPoint<S>) -> S {
    let x = x.as_slice();
    let tail = x[2..].iter().fold(S::zero(), |acc, &v| acc + v * v);
    x[0] * x[0] + (x[1] * x[1]).scale(spec.k1()) + tail.scale(spec.k1() * spec.k2()) - S::one()
}

/// Diagonal polar metric `(g_rr, g_θθ, g_φ3φ3, …, g_φNφN)`.
pub fn metric_polar<S: Scalar>(spec: &SpaceSpec, q: &PolarCoords<S>) -> Vec<S> {
    let cv = ChartValues::new(spec, q.as_slice());
    let radial = (cv.s1 * cv.s1).scale(spec.k2());
    let mut g = Vec::with_capacity(spec.dim);
    g.push(S::one());
    g.push(radial);
    for i in 3..=spec.dim {
        let p = range_product(3, i - 1, |s| cv.sin(s) * cv.sin(s));
        g.push(radial * cv.s2 * cv.s2 * p);
    }
    g
}

/// Dense square matrix over an arbitrary ring (f64 numerically, κ-polynomials
/// exactly).
#[derive(Debug, Clone, PartialEq)]
pub struct RepMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T> RepMatrix<T>
where
    T: Clone + Zero + One + PartialEq + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    pub fn zeros(n: usize) -> Self {
        RepMatrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).clone();
                    out.set(i, j, cur + a.clone() * b.clone());
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        RepMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scaled(&self, c: &T) -> Self {
        RepMatrix {
            n: self.n,
            data: self.data.iter().map(|a| c.clone() * a.clone()).collect(),
        }
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, o: &Self) -> Self {
        self.matmul(o).sub(&o.matmul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// `Xᵀ I + I X` for the diagonal `I` given as its entries.
    pub fn metric_defect(&self, diag: &[T]) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                let v = self.get(b, a).clone() * diag[b].clone()
                    + diag[a].clone() * self.get(a, b).clone();
                out.set(a, b, v);
            }
        }
        out
    }
}

/// `I_κ = diag(1, κ1, κ1κ2, …, κ1κ2)` in the ring of `kappa1`, `kappa2`.
pub fn metric_diagonal<T>(dim: usize, kappa1: &T, kappa2: &T) -> Vec<T>
where
    T: Clone + Zero + One + Neg<Output = T> + Mul<Output = T>,
{
    (0..=dim)
        .map(|m| metric_entry(m).eval_in(kappa1, kappa2))
        .collect()
}

/// Matrix of `J_{μν}` in the vector representation:
/// `−c_{μν} e_{μν} + e_{νμ}` with `c_{01} = κ1`, `c_{0j} = κ1κ2`,
/// `c_{1j} = κ2`, `c_{jk} = 1`.
pub fn rep_matrix_in<T>(dim: usize, kappa1: &T, kappa2: &T, g: Gen) -> Result<RepMatrix<T>>
where
    T: Clone
        + Zero
        + One
        + PartialEq
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>,
{
    let g = Gen::new(g.mu, g.nu)?.check_dim(dim)?;
    let mut m = RepMatrix::zeros(dim + 1);
    let c = step_coefficient(g.mu, g.nu).eval_in(kappa1, kappa2);
    m.set(g.mu, g.nu, -c);
    m.set(g.nu, g.mu, T::one());
    Ok(m)
}

/// Numeric vector-representation matrix for the given space.
pub fn rep_matrix(spec: &SpaceSpec, mu: usize, nu: usize) -> Result<RepMatrix<f64>> {
    let g = Gen::new(mu, nu)?;
    rep_matrix_in(spec.dim, &spec.k1(), &spec.k2(), g)
}

fn to_nalgebra(m: &RepMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.size(), m.size(), |i, j| *m.get(i, j))
}

/// Rebuilds the ambient point as the orbit of the origin,
/// `exp(φN J_{N−1,N}) ⋯ exp(φ3 J_23) exp(θ J_12) exp(r J_01) · O`,
/// and returns the max-abs deviation from [`polar_to_ambient`].
pub fn orbit_cross_check(spec: &SpaceSpec, q: &PolarCoords<f64>) -> Result<f64> {
    let n = spec.dim;
    if q.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q.dim(),
        });
    }
    let mut v = nalgebra::DVector::<f64>::zeros(n + 1);
    v[0] = 1.0;
    let step = |v: nalgebra::DVector<f64>, mu: usize, nu: usize, t: f64| -> Result<_> {
        let m = to_nalgebra(&rep_matrix(spec, mu, nu)?) * t;
        Ok(m.exp() * v)
    };
    v = step(v, 0, 1, q.r())?;
    v = step(v, 1, 2, q.theta())?;
    for s in 3..=n {
        v = step(v, s - 1, s, q.phi(s))?;
    }
    let x = polar_to_ambient(spec, q);
    Ok(v.iter()
        .zip(x.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
