//! Kinetic energy, potentials, Hamiltonians and their integrals of motion,
//! all as [`Observable`]s on polar phase space.
//!
//! Integrals that also have an ambient expression (the quadratic `I`'s and
//! the `L_i`) are offered in both forms: the polar closed form, and the
//! ambient polynomial composed with [`phase_map`](crate::generators::phase_map).

use serde::{Deserialize, Serialize};

use crate::algebra::{casimir_coefficient, generators, Gen};
use crate::error::{Error, Result};
use crate::generators::{
    ambient_signed, pull_back, AmbientFunction, AmbientPhasePoint, PolarFrame,
};
use crate::geometry::SpaceSpec;
use crate::observable::{guarded_recip, ObsScalar, Observable, PhaseFunction, PhasePoint};
use crate::scalar::Scalar;

/// Potential parameters: oscillator strength `β0`, centrifugal
/// coefficients `β1..βN` and Kepler coupling `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Betas {
    pub beta0: f64,
    /// `beta[i − 1]` is `β_i`.
    pub beta: Vec<f64>,
    pub k: f64,
}

impl Betas {
    pub fn zero(dim: usize) -> Self {
        Betas {
            beta0: 0.0,
            beta: vec![0.0; dim],
            k: 0.0,
        }
    }

    pub fn new(beta0: f64, beta: Vec<f64>, k: f64) -> Self {
        Betas { beta0, beta, k }
    }

    /// `β_i`, 1-based; `β_0` for `i = 0`.
    pub fn get(&self, i: usize) -> f64 {
        if i == 0 {
            self.beta0
        } else {
            self.beta[i - 1]
        }
    }

    pub fn with(mut self, i: usize, value: f64) -> Self {
        if i == 0 {
            self.beta0 = value;
        } else {
            self.beta[i - 1] = value;
        }
        self
    }

    fn check(&self, spec: &SpaceSpec) -> Result<()> {
        if self.beta.len() != spec.dim {
            return Err(Error::DimensionMismatch {
                expected: spec.dim,
                got: self.beta.len(),
            });
        }
        let all = std::iter::once(self.beta0)
            .chain(self.beta.iter().copied())
            .chain(std::iter::once(self.k));
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "potential parameters must be finite".into(),
            ));
        }
        Ok(())
    }

    fn require_zero(&self, i: usize) -> Result<()> {
        let v = self.get(i);
        if v != 0.0 {
            return Err(Error::BetaNotZero { index: i, value: v });
        }
        Ok(())
    }
}

/// Central term `F(r)` of the general potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialFn {
    Zero,
    /// `β0 Tk²_{κ1}(r)`
    Higgs {
        beta0: f64,
    },
    /// `−k / Tk_{κ1}(r)`, evaluated as `−k Ck/Sk`
    Kepler {
        k: f64,
    },
    /// `c1 Tk_{κ1}(r) + c2 Ck_{κ1}(r)`
    Mixed {
        c1: f64,
        c2: f64,
    },
}

impl RadialFn {
    fn eval<S: Scalar>(&self, frame: &PolarFrame<S>) -> Result<S> {
        let (c1, s1) = (frame.cv.c1, frame.cv.s1);
        Ok(match *self {
            RadialFn::Zero => S::zero(),
            RadialFn::Higgs { beta0 } => {
                let t = s1 * guarded_recip(c1, "Ck_k1(r) = 0")?;
                (t * t).scale(beta0)
            }
            RadialFn::Kepler { k } => (c1 * guarded_recip(s1, "Sk_k1(r) = 0")?).scale(-k),
            RadialFn::Mixed { c1: a, c2: b } => {
                (s1 * guarded_recip(c1, "Ck_k1(r) = 0")?).scale(a) + c1.scale(b)
            }
        })
    }
}

/// The systems for which Hamiltonians are assembled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemKind {
    Free,
    Central(RadialFn),
    SW,
    /// Generalized Kepler–Coulomb with `β_i = 0`.
    GKC(usize),
    KC,
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SystemKind::Free => f.write_str("free"),
            SystemKind::Central(_) => f.write_str("central"),
            SystemKind::SW => f.write_str("sw"),
            SystemKind::GKC(i) => write!(f, "gkc{i}"),
            SystemKind::KC => f.write_str("kc"),
        }
    }
}

fn frame<S: Scalar>(spec: &SpaceSpec, z: &PhasePoint<S>) -> Result<PolarFrame<S>> {
    if z.p.len() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: z.p.len(),
        });
    }
    PolarFrame::new(spec, &z.q)
}

struct Kinetic(SpaceSpec);

impl PhaseFunction for Kinetic {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        let f = frame(&self.0, z)?;
        let n = self.0.dim;
        let p = &z.p;
        let mut angular = S::zero();
        if n > 2 {
            let inv_s2 = guarded_recip(f.cv.s2, "Sk_k2(theta) = 0")?;
            for i in 3..=n {
                let den = f.ps(3, i - 1);
                let inv = guarded_recip(den, "sin(phi) = 0")?;
                angular += p[i - 1] * p[i - 1] * inv * inv;
            }
            angular *= inv_s2 * inv_s2;
        }
        let inv_s1 = guarded_recip(f.cv.s1, "Sk_k1(r) = 0")?;
        let transverse = (p[1] * p[1] + angular) * inv_s1 * inv_s1;
        Ok((p[0] * p[0] + transverse.scale(1.0 / self.0.k2())).scale(0.5))
    }
}

/// `T = ½(p_r² + [p_θ² + Σ_i p_φi²/(Sk²_{κ2}(θ)∏_{s<i} sin²φs)] / (κ2 Sk²_{κ1}(r)))`.
pub fn kinetic(spec: &SpaceSpec) -> Observable {
    Observable::new("T", Kinetic(*spec))
}

/// `Σ_{i ≠ omit} β_i / x_i²` in polar form, where
/// `x_i = Sk_{κ1}(r) u_i`, `u_1 = Ck_{κ2}(θ)`, `u_i = Sk_{κ2}(θ) w_i`.
fn centrifugal<S: Scalar>(f: &PolarFrame<S>, b: &Betas, omit: Option<usize>) -> Result<S> {
    let mut acc = S::zero();
    for i in 1..=f.n() {
        let beta = b.get(i);
        if Some(i) == omit || beta == 0.0 {
            continue;
        }
        let inv = guarded_recip(f.cv.u(i), "centrifugal barrier at its pole")?;
        acc += (inv * inv).scale(beta);
    }
    if acc.is_zero() {
        return Ok(acc);
    }
    let inv_s1 = guarded_recip(f.cv.s1, "Sk_k1(r) = 0")?;
    Ok(acc * inv_s1 * inv_s1)
}

struct Potential {
    spec: SpaceSpec,
    radial: RadialFn,
    betas: Betas,
    omit: Option<usize>,
}

impl PhaseFunction for Potential {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        let f = frame(&self.spec, z)?;
        Ok(self.radial.eval(&f)? + centrifugal(&f, &self.betas, self.omit)?)
    }
}

/// `U = F(r) + Σ_i β_i/x_i²` with the barriers in polar form.
pub fn potential_general(spec: &SpaceSpec, radial: RadialFn, b: &Betas) -> Result<Observable> {
    b.check(spec)?;
    Ok(Observable::new(
        "U",
        Potential {
            spec: *spec,
            radial,
            betas: b.clone(),
            omit: None,
        },
    ))
}

/// Smorodinsky–Winternitz potential: Higgs oscillator plus `N` barriers.
pub fn potential_sw(spec: &SpaceSpec, b: &Betas) -> Result<Observable> {
    Ok(potential_general(spec, RadialFn::Higgs { beta0: b.beta0 }, b)?.renamed("U_SW"))
}

/// Generalized Kepler–Coulomb potential `−k/Tk_{κ1}(r)` plus the `N − 1`
/// barriers other than `β_i`, which must vanish.
pub fn potential_gkc(spec: &SpaceSpec, i: usize, b: &Betas) -> Result<Observable> {
    b.check(spec)?;
    check_index(spec, i, 1)?;
    b.require_zero(i)?;
    Ok(Observable::new(
        format!("U_GKC{i}"),
        Potential {
            spec: *spec,
            radial: RadialFn::Kepler { k: b.k },
            betas: b.clone(),
            omit: Some(i),
        },
    ))
}

fn check_index(spec: &SpaceSpec, i: usize, min: usize) -> Result<()> {
    if i < min || i > spec.dim {
        return Err(Error::IndexRange {
            index: i,
            min,
            max: spec.dim,
        });
    }
    Ok(())
}

/// Hamiltonian `T + U` of the given system.
pub fn hamiltonian(spec: &SpaceSpec, system: SystemKind, b: &Betas) -> Result<Observable> {
    let u = match system {
        SystemKind::Free => return Ok(kinetic(spec).renamed("H")),
        SystemKind::Central(f) => potential_general(spec, f, b)?,
        SystemKind::SW => potential_sw(spec, b)?,
        SystemKind::GKC(i) => potential_gkc(spec, i, b)?,
        SystemKind::KC => {
            b.check(spec)?;
            for i in 1..=spec.dim {
                b.require_zero(i)?;
            }
            potential_gkc(spec, 1, b)?.renamed("U_KC")
        }
    };
    Ok(kinetic(spec).plus(&u).renamed("H"))
}

/// Which of the two nested chains of rotation-sector integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chain {
    /// `X^(l)`, built from indices `1..=l`.
    Upper(usize),
    /// `X_(k)`, built from the last `k` indices.
    Lower(usize),
}

impl Chain {
    fn check(self, spec: &SpaceSpec) -> Result<()> {
        let (Chain::Upper(m) | Chain::Lower(m)) = self;
        if !(2..=spec.dim).contains(&m) {
            return Err(Error::IndexRange {
                index: m,
                min: 2,
                max: spec.dim,
            });
        }
        Ok(())
    }

    fn label(self, stem: &str) -> String {
        match self {
            Chain::Upper(l) => format!("{stem}^({l})"),
            Chain::Lower(k) => format!("{stem}_({k})"),
        }
    }

    /// `Σ_{j=2}^l E_1j + κ2 Σ_{2≤i<j≤l} E_ij` (upper; also lower with
    /// `k = N`), or `Σ_{N−k+1≤i<j≤N} E_ij` (lower).
    fn sum<S: Scalar>(
        self,
        spec: &SpaceSpec,
        mut elem: impl FnMut(usize, usize) -> Result<S>,
    ) -> Result<S> {
        let n = spec.dim;
        let upper = match self {
            Chain::Upper(l) => Some(l),
            Chain::Lower(k) if k == n => Some(n),
            Chain::Lower(_) => None,
        };
        let mut acc = S::zero();
        match (upper, self) {
            (Some(l), _) => {
                for j in 2..=l {
                    acc += elem(1, j)?;
                }
                let mut inner = S::zero();
                for i in 2..=l {
                    for j in i + 1..=l {
                        inner += elem(i, j)?;
                    }
                }
                acc += inner.scale(spec.k2());
            }
            (None, Chain::Lower(k)) => {
                for i in n - k + 1..=n {
                    for j in i + 1..=n {
                        acc += elem(i, j)?;
                    }
                }
            }
            (None, Chain::Upper(_)) => unreachable!(),
        }
        Ok(acc)
    }
}

/// Upper chain `2..=N` followed by lower chain `N−1..=2`: the `2N − 3`
/// distinct members of both families.
pub fn both_chains(dim: usize) -> Vec<Chain> {
    let mut v: Vec<Chain> = (2..=dim).map(Chain::Upper).collect();
    v.extend((2..dim).rev().map(Chain::Lower));
    v
}

struct JChain {
    spec: SpaceSpec,
    chain: Chain,
}

impl PhaseFunction for JChain {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        let f = frame(&self.spec, z)?;
        self.chain.sum(&self.spec, |i, j| {
            let v = f.generator(Gen { mu: i, nu: j }, &z.p)?;
            Ok(v * v)
        })
    }
}

/// Free-motion chain integrals built from squared rotation generators.
pub fn integral_j(spec: &SpaceSpec, chain: Chain) -> Result<Observable> {
    chain.check(spec)?;
    Ok(Observable::new(
        chain.label("J"),
        JChain { spec: *spec, chain },
    ))
}

/// Polar closed form of `I_{μν}`.
fn i_polar<S: Scalar>(f: &PolarFrame<S>, b: &Betas, g: Gen, p: &[S]) -> Result<S> {
    let k2 = f.spec.k2();
    let j = f.generator(g, p)?;
    let (mu, nu) = (g.mu, g.nu);
    // I = J² + 2 β_μ a t² + 2 β_ν c / t², t the ratio x_ν/x_μ in polar form
    let (t, a, c) = match (mu, nu) {
        (0, 1) => {
            let t1 = f.cv.s1 * guarded_recip(f.cv.c1, "Ck_k1(r) = 0")?;
            (t1 * f.cv.c2, 1.0, 1.0)
        }
        (0, i) => {
            let t1 = f.cv.s1 * guarded_recip(f.cv.c1, "Ck_k1(r) = 0")?;
            (t1 * f.cv.s2 * f.w(i), k2 * k2, k2)
        }
        (1, i) => {
            let t2 = f.cv.s2 * guarded_recip(f.cv.c2, "Ck_k2(theta) = 0")?;
            (t2 * f.w(i), k2 * k2, k2)
        }
        (i, j) => {
            let ratio = f.ps(i + 1, j) * f.cs(j + 1) * guarded_recip(f.cs(i + 1), "cos(phi) = 0")?;
            (ratio, k2, k2)
        }
    };
    let mut acc = j * j;
    let (bm, bn) = (b.get(mu), b.get(nu));
    if bm != 0.0 {
        acc += (t * t).scale(2.0 * bm * a);
    }
    if bn != 0.0 {
        let inv = guarded_recip(t, "barrier ratio = 0")?;
        acc += (inv * inv).scale(2.0 * bn * c);
    }
    Ok(acc)
}

/// Ambient form of `I_{μν}`: `J² + 2β_μ a x_ν²/x_μ² + 2β_ν c x_μ²/x_ν²`.
fn i_ambient<S: Scalar>(
    spec: &SpaceSpec,
    b: &Betas,
    g: Gen,
    z: &AmbientPhasePoint<S>,
) -> Result<S> {
    let k2 = spec.k2();
    let (a, c) = match (g.mu, g.nu) {
        (0, 1) => (1.0, 1.0),
        (0, _) | (1, _) => (k2 * k2, k2),
        _ => (k2, k2),
    };
    let j = ambient_signed(spec, g.mu, g.nu, z);
    let (xm, xn) = (z.x[g.mu], z.x[g.nu]);
    let mut acc = j * j;
    let (bm, bn) = (b.get(g.mu), b.get(g.nu));
    if bm != 0.0 {
        let inv = guarded_recip(xm, "x_mu = 0")?;
        acc += (xn * xn * inv * inv).scale(2.0 * bm * a);
    }
    if bn != 0.0 {
        let inv = guarded_recip(xn, "x_nu = 0")?;
        acc += (xm * xm * inv * inv).scale(2.0 * bn * c);
    }
    Ok(acc)
}

struct IPolar {
    spec: SpaceSpec,
    betas: Betas,
    gen: Gen,
}

impl PhaseFunction for IPolar {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        i_polar(&frame(&self.spec, z)?, &self.betas, self.gen, &z.p)
    }
}

struct IAmbient {
    betas: Betas,
    gen: Gen,
}

impl AmbientFunction for IAmbient {
    fn eval_ambient<S: ObsScalar>(&self, spec: &SpaceSpec, z: &AmbientPhasePoint<S>) -> Result<S> {
        i_ambient(spec, &self.betas, self.gen, z)
    }
}

fn check_pair(spec: &SpaceSpec, mu: usize, nu: usize) -> Result<Gen> {
    Gen::new(mu, nu)?.check_dim(spec.dim)
}

/// Quadratic integral `I_{μν}` in polar form. `I_{0ν}` uses `β0` and is an
/// integral of the SW system; the rest commute with every `T + U`.
pub fn integral_i(spec: &SpaceSpec, b: &Betas, mu: usize, nu: usize) -> Result<Observable> {
    b.check(spec)?;
    let gen = check_pair(spec, mu, nu)?;
    Ok(Observable::new(
        format!("I{}{}", mu, nu),
        IPolar {
            spec: *spec,
            betas: b.clone(),
            gen,
        },
    ))
}

/// Ambient form of `I_{μν}` composed with the phase map.
pub fn integral_i_ambient(spec: &SpaceSpec, b: &Betas, mu: usize, nu: usize) -> Result<Observable> {
    b.check(spec)?;
    let gen = check_pair(spec, mu, nu)?;
    Ok(pull_back(
        format!("I{}{}∘map", mu, nu),
        spec,
        IAmbient {
            betas: b.clone(),
            gen,
        },
    ))
}

struct QChain {
    spec: SpaceSpec,
    betas: Betas,
    chain: Chain,
}

impl PhaseFunction for QChain {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        let f = frame(&self.spec, z)?;
        self.chain.sum(&self.spec, |i, j| {
            i_polar(&f, &self.betas, Gen { mu: i, nu: j }, &z.p)
        })
    }
}

/// Chain integrals built from the rotation-sector `I_{ij}`.
pub fn integral_q(spec: &SpaceSpec, b: &Betas, chain: Chain) -> Result<Observable> {
    b.check(spec)?;
    chain.check(spec)?;
    Ok(Observable::new(
        chain.label("Q"),
        QChain {
            spec: *spec,
            betas: b.clone(),
            chain,
        },
    ))
}

struct LPolar {
    spec: SpaceSpec,
    betas: Betas,
    i: usize,
}

impl PhaseFunction for LPolar {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        let f = frame(&self.spec, z)?;
        let (n, i, k2) = (self.spec.dim, self.i, self.spec.k2());
        let b = &self.betas;
        let mut acc = S::zero();
        for l in (1..=n).filter(|&l| l != i) {
            acc += f.signed(0, l, &z.p)? * f.signed(l, i, &z.p)?;
        }
        let it1 = f.inv_t1()?;
        let inv_w = |l: usize| -> Result<S> {
            let r = guarded_recip(f.w(l), "barrier pole")?;
            Ok(r * r)
        };
        let mut barrier = S::zero();
        if i == 1 {
            acc += f.cv.c2.scale(b.k * k2);
            for l in 2..=n {
                if b.get(l) != 0.0 {
                    barrier += inv_w(l)?.scale(b.get(l));
                }
            }
            if !barrier.is_zero() {
                let inv_s2 = guarded_recip(f.cv.s2, "Sk_k2(theta) = 0")?;
                barrier *= f.cv.c2 * it1 * inv_s2 * inv_s2;
            }
        } else {
            let w = f.w(i);
            acc += (f.cv.s2 * w).scale(b.k * k2);
            if b.get(1) != 0.0 {
                let t2 = f.cv.s2 * guarded_recip(f.cv.c2, "Ck_k2(theta) = 0")?;
                barrier += (t2 * t2).scale(b.get(1));
            }
            for l in (2..=n).filter(|&l| l != i) {
                if b.get(l) != 0.0 {
                    barrier += inv_w(l)?.scale(b.get(l));
                }
            }
            if !barrier.is_zero() {
                barrier *= w * it1 * guarded_recip(f.cv.s2, "Sk_k2(theta) = 0")?;
            }
        }
        Ok(acc - barrier.scale(2.0 * k2))
    }
}

struct LAmbient {
    betas: Betas,
    i: usize,
}

impl AmbientFunction for LAmbient {
    fn eval_ambient<S: ObsScalar>(&self, spec: &SpaceSpec, z: &AmbientPhasePoint<S>) -> Result<S> {
        let (n, i, k2) = (spec.dim, self.i, spec.k2());
        let x = &z.x;
        let mut acc = S::zero();
        for l in (1..=n).filter(|&l| l != i) {
            acc += ambient_signed(spec, 0, l, z) * ambient_signed(spec, l, i, z);
        }
        let tail = x[2..].iter().fold(S::zero(), |a, &v| a + v * v);
        let rho2 = x[1] * x[1] + tail.scale(k2);
        if rho2.re() <= 0.0 {
            return Err(Error::SingularEvaluation("rho^2 <= 0"));
        }
        acc += x[i] * guarded_recip(rho2.sqrt(), "rho = 0")?.scale(self.betas.k * k2);
        let mut barrier = S::zero();
        for l in (1..=n).filter(|&l| l != i) {
            let beta = self.betas.get(l);
            if beta != 0.0 {
                let inv = guarded_recip(x[l], "x_l = 0")?;
                barrier += (inv * inv).scale(beta);
            }
        }
        Ok(acc - (barrier * x[0] * x[i]).scale(2.0 * k2))
    }
}

fn l_setup(spec: &SpaceSpec, i: usize, b: &Betas) -> Result<()> {
    b.check(spec)?;
    check_index(spec, i, 1)?;
    b.require_zero(i)
}

/// Polar form of the extra integral `L_i` of the GKC_i system.
pub fn integral_l(spec: &SpaceSpec, i: usize, b: &Betas) -> Result<Observable> {
    l_setup(spec, i, b)?;
    Ok(Observable::new(
        format!("L{i}"),
        LPolar {
            spec: *spec,
            betas: b.clone(),
            i,
        },
    ))
}

/// Ambient form of `L_i` composed with the phase map.
pub fn integral_l_ambient(spec: &SpaceSpec, i: usize, b: &Betas) -> Result<Observable> {
    l_setup(spec, i, b)?;
    Ok(pull_back(
        format!("L{i}∘map"),
        spec,
        LAmbient {
            betas: b.clone(),
            i,
        },
    ))
}

/// The `N` components of the Laplace–Runge–Lenz vector of the pure
/// Kepler–Coulomb system with coupling `k`.
pub fn lrl_vector(spec: &SpaceSpec, k: f64) -> Vec<Observable> {
    let b = Betas {
        k,
        ..Betas::zero(spec.dim)
    };
    (1..=spec.dim)
        .map(|i| integral_l(spec, i, &b).expect("all betas vanish"))
        .collect()
}

struct Casimir(SpaceSpec);

impl PhaseFunction for Casimir {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        let f = frame(&self.0, z)?;
        let mut acc = S::zero();
        for g in generators(self.0.dim) {
            let j = f.generator(g, &z.p)?;
            acc += (j * j).scale(casimir_coefficient(g).eval(self.0.k1(), self.0.k2()));
        }
        Ok(acc)
    }
}

/// Quadratic Casimir assembled from the polar generators.
pub fn casimir_polar(spec: &SpaceSpec) -> Observable {
    Observable::new("C", Casimir(*spec))
}
