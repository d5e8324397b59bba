//! Symplectic realizations of so_{κ1,κ2}(N+1): the ambient quadratic
//! generators, their closed forms in geodesic polar phase space, and the
//! map from polar to ambient phase space that links the two.

use crate::algebra::{step_coefficient, Gen};
use crate::error::{Error, Result};
use crate::geometry::{ambient_from_slice, ChartValues, SpaceSpec};
use crate::observable::{guarded_recip, ObsScalar, Observable, PhaseFunction, PhasePoint};
use crate::scalar::{Dual, Scalar};

/// `|value|` below which a chart quantity counts as zero.
pub const CHART_EPS: f64 = 1e-12;

/// Ambient phase-space point `(x_0..x_N, p_0..p_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPhasePoint<S> {
    pub x: Vec<S>,
    pub p: Vec<S>,
}

fn nonzero<S: Scalar>(v: S, what: &'static str) -> Result<S> {
    if v.re().abs() < CHART_EPS {
        Err(Error::ChartDegenerate(what))
    } else {
        Ok(v)
    }
}

fn check_dim<S>(spec: &SpaceSpec, z: &PhasePoint<S>) -> Result<()> {
    if z.q.len() != spec.dim || z.p.len() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: z.q.len().min(z.p.len()),
        });
    }
    Ok(())
}

/// Polar velocities `q̇` from the momenta (inverse of the diagonal Legendre
/// map of the free Lagrangian).
pub fn polar_velocities<S: Scalar>(spec: &SpaceSpec, z: &PhasePoint<S>) -> Result<Vec<S>> {
    check_dim(spec, z)?;
    let n = spec.dim;
    let cv = ChartValues::new(spec, &z.q);
    let s1 = nonzero(cv.s1, "Sk_k1(r) = 0")?;
    let radial = (s1 * s1).scale(spec.k2());
    let mut qd = Vec::with_capacity(n);
    qd.push(z.p[0]);
    qd.push(z.p[1] / radial);
    if z.p[2..].iter().any(|v| !v.is_zero()) {
        let s2 = nonzero(cv.s2, "Sk_k2(theta) = 0")?;
        let mut den = radial * s2 * s2;
        for i in 3..=n {
            qd.push(z.p[i - 1] / den);
            if i < n {
                let s = nonzero(cv.sin(i), "sin(phi) = 0")?;
                den *= s * s;
            }
        }
    } else {
        qd.extend(std::iter::repeat_n(S::zero(), n - 2));
    }
    Ok(qd)
}

/// Polar phase point → ambient phase point.
///
/// `ẋ` is the directional derivative of the chart along `q̇`, evaluated in a
/// single dual pass. The ambient momenta are `p_1 = ẋ_1`, `p_j = κ2 ẋ_j`,
/// and `p_0 = ẋ_0/κ1` taken in the cancelled form `p_0 = −Sk_{κ1}(r) ṙ`,
/// which is exact for every κ1 including 0.
pub fn phase_map<S: Scalar>(spec: &SpaceSpec, z: &PhasePoint<S>) -> Result<AmbientPhasePoint<S>> {
    let qd = polar_velocities(spec, z)?;
    let seeded: Vec<Dual<S>> =
        z.q.iter()
            .zip(&qd)
            .map(|(&q, &v)| Dual::new(q, v))
            .collect();
    let xs = ambient_from_slice(spec, &seeded).0;
    let sk_r = crate::kappa_trig::sk(spec.kappa1, z.q[0]);
    let mut p = Vec::with_capacity(spec.dim + 1);
    p.push(-(sk_r * z.p[0]));
    p.push(xs[1].eps);
    for d in &xs[2..] {
        p.push(d.eps.scale(spec.k2()));
    }
    Ok(AmbientPhasePoint {
        x: xs.iter().map(|d| d.re).collect(),
        p,
    })
}

/// `J_{μν} = x_μ p_ν − c_{μν} x_ν p_μ` on ambient phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientGenerator {
    pub spec: SpaceSpec,
    pub gen: Gen,
    coeff: f64,
}

/// Ambient realization of `J_{μν}`.
pub fn generator_ambient(spec: &SpaceSpec, mu: usize, nu: usize) -> Result<AmbientGenerator> {
    let gen = Gen::new(mu, nu)?.check_dim(spec.dim)?;
    Ok(AmbientGenerator {
        spec: *spec,
        gen,
        coeff: step_coefficient(mu, nu).eval(spec.k1(), spec.k2()),
    })
}

impl AmbientGenerator {
    pub fn eval<S: Scalar>(&self, z: &AmbientPhasePoint<S>) -> S {
        ambient_value(self.coeff, self.gen, &z.x, &z.p)
    }

    /// The generator pulled back to polar phase space through [`phase_map`].
    pub fn on_polar(&self) -> Observable {
        Observable::new(format!("{}∘map", self.gen), *self)
    }
}

impl PhaseFunction for AmbientGenerator {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        Ok(AmbientGenerator::eval(self, &phase_map(&self.spec, z)?))
    }
}

fn ambient_value<S: Scalar>(coeff: f64, g: Gen, x: &[S], p: &[S]) -> S {
    x[g.mu] * p[g.nu] - (x[g.nu] * p[g.mu]).scale(coeff)
}

/// `J_{ab}` for any `a ≠ b` on an ambient point (`J_{ba} = −J_{ab}`).
pub fn ambient_signed<S: Scalar>(
    spec: &SpaceSpec,
    a: usize,
    b: usize,
    z: &AmbientPhasePoint<S>,
) -> S {
    let (sign, g) = crate::algebra::signed_pair(a, b);
    let c = step_coefficient(g.mu, g.nu).eval(spec.k1(), spec.k2());
    ambient_value(c, g, &z.x, &z.p).scale(sign)
}

/// A scalar function of the ambient phase point, evaluated on polar phase
/// space by composing with [`phase_map`].
pub trait AmbientFunction: Send + Sync + 'static {
    fn eval_ambient<S: ObsScalar>(&self, spec: &SpaceSpec, z: &AmbientPhasePoint<S>) -> Result<S>;
}

struct ThroughPhaseMap<F> {
    spec: SpaceSpec,
    f: F,
}

impl<F: AmbientFunction> PhaseFunction for ThroughPhaseMap<F> {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        let a = phase_map(&self.spec, z)?;
        self.f.eval_ambient(&self.spec, &a)
    }
}

/// Wraps an ambient expression as a polar [`Observable`].
pub fn pull_back(name: impl Into<String>, spec: &SpaceSpec, f: impl AmbientFunction) -> Observable {
    Observable::new(name, ThroughPhaseMap { spec: *spec, f })
}

/// Chart quantities at one polar point with guarded reciprocals, shared by
/// every closed-form generator evaluated there.
pub struct PolarFrame<S> {
    pub spec: SpaceSpec,
    pub cv: ChartValues<S>,
}

impl<S: Scalar> PolarFrame<S> {
    pub fn new(spec: &SpaceSpec, q: &[S]) -> Result<Self> {
        if q.len() != spec.dim {
            return Err(Error::DimensionMismatch {
                expected: spec.dim,
                got: q.len(),
            });
        }
        Ok(PolarFrame {
            spec: *spec,
            cv: ChartValues::new(spec, q),
        })
    }

    pub fn n(&self) -> usize {
        self.spec.dim
    }

    /// `1/Tk_{κ1}(r) = Ck/Sk`.
    pub fn inv_t1(&self) -> Result<S> {
        Ok(self.cv.c1 * guarded_recip(self.cv.s1, "Sk_k1(r) = 0")?)
    }

    /// `1/Tk_{κ2}(θ) = Ck/Sk`.
    pub fn inv_t2(&self) -> Result<S> {
        Ok(self.cv.c2 * guarded_recip(self.cv.s2, "Sk_k2(theta) = 0")?)
    }

    pub fn sn(&self, s: usize) -> S {
        self.cv.sin(s)
    }

    /// `cos φ_s`; for `s = N + 1` (one past the last angle) this is 1, which
    /// lets the `i = N` cases share the generic formulas.
    pub fn cs(&self, s: usize) -> S {
        if s == self.n() + 1 {
            S::one()
        } else {
            self.cv.cos(s)
        }
    }

    /// `∏_{m=lo}^{hi} sin φ_m`.
    pub fn ps(&self, lo: usize, hi: usize) -> S {
        self.cv.prod_sin(lo, hi)
    }

    fn recip_ps(&self, lo: usize, hi: usize) -> Result<S> {
        guarded_recip(self.ps(lo, hi), "sin(phi) = 0")
    }

    /// Closed-form polar value of `J_{μν}` at momenta `p`.
    pub fn generator(&self, g: Gen, p: &[S]) -> Result<S> {
        let n = self.n();
        let k2 = self.spec.k2();
        let cv = &self.cv;
        let pr = p[0];
        let pth = p[1];
        let pphi = |s: usize| p[s - 1];
        let value = match (g.mu, g.nu) {
            (0, 1) => cv.c2 * pr - cv.s2 * self.inv_t1()? * pth,
            (0, i) => {
                let it1 = self.inv_t1()?;
                let w = self.ps(3, i) * self.cs(i + 1);
                let inv_s2 = guarded_recip(cv.s2, "Sk_k2(theta) = 0")?;
                let mut acc = (cv.s2 * w * pr).scale(k2) + cv.c2 * w * it1 * pth;
                let top = if i < n { i + 1 } else { n };
                for s in 3..=top {
                    acc += self.cs(s)
                        * self.ps(s, i)
                        * self.cs(i + 1)
                        * it1
                        * inv_s2
                        * self.recip_ps(3, s)?
                        * pphi(s);
                }
                if i < n {
                    acc -= pphi(i + 1) * it1 * inv_s2 * self.recip_ps(3, i + 1)?;
                }
                acc
            }
            (1, i) => {
                let it2 = self.inv_t2()?;
                let mut acc = self.cs(i + 1) * self.ps(3, i) * pth;
                for s in 3..=i {
                    acc += self.cs(i + 1)
                        * self.cs(s)
                        * self.ps(s, i)
                        * it2
                        * self.recip_ps(3, s)?
                        * pphi(s);
                }
                if i < n {
                    acc -= self.sn(i + 1) * pphi(i + 1) * it2 * self.recip_ps(3, i)?;
                }
                acc
            }
            (i, j) => {
                let mut acc = S::zero();
                for s in i + 1..=j {
                    acc += self.cs(s) * self.ps(s, j) * self.recip_ps(i + 1, s)? * pphi(s);
                }
                acc *= self.cs(i + 1) * self.cs(j + 1);
                acc += self.sn(i + 1) * self.cs(j + 1) * self.ps(i + 1, j) * pphi(i + 1);
                if j < n {
                    acc -= self.cs(i + 1) * self.sn(j + 1) * self.recip_ps(i + 1, j)? * pphi(j + 1);
                }
                acc
            }
        };
        Ok(value)
    }

    /// `J_{ab}` for any `a ≠ b`, using `J_{ba} = −J_{ab}`.
    pub fn signed(&self, a: usize, b: usize, p: &[S]) -> Result<S> {
        let (sign, g) = crate::algebra::signed_pair(a, b);
        Ok(self.generator(g, p)?.scale(sign))
    }

    /// `w_i`: the angular factor with `x_i = Sk_{κ1}(r) Sk_{κ2}(θ) w_i`.
    pub fn w(&self, i: usize) -> S {
        self.cv.w(i)
    }
}

/// Closed-form polar realization of `J_{μν}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGenerator {
    pub spec: SpaceSpec,
    pub gen: Gen,
}

impl PhaseFunction for PolarGenerator {
    fn eval<S: ObsScalar>(&self, z: &PhasePoint<S>) -> Result<S> {
        check_dim(&self.spec, z)?;
        PolarFrame::new(&self.spec, &z.q)?.generator(self.gen, &z.p)
    }
}

/// Polar realization of `J_{μν}` as an observable.
pub fn generator_polar(spec: &SpaceSpec, mu: usize, nu: usize) -> Result<Observable> {
    let gen = Gen::new(mu, nu)?.check_dim(spec.dim)?;
    Ok(Observable::new(
        gen.to_string(),
        PolarGenerator { spec: *spec, gen },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::generators;
    use crate::geometry::{polar_to_ambient, PolarCoords};

    fn spec(n: usize, k1: f64, k2: f64) -> SpaceSpec {
        SpaceSpec::new(n, k1, k2).unwrap()
    }

    fn point(n: usize) -> PhasePoint<f64> {
        let mut q = vec![0.8, 0.5];
        let mut p = vec![0.3, -0.7];
        for s in 3..=n {
            q.push(0.3 + 0.2 * s as f64);
            p.push(0.25 * (s as f64) - 1.1);
        }
        PhasePoint::new(q, p).unwrap()
    }

    #[test]
    fn j01_at_theta_zero_is_radial_momentum() {
        let sp = spec(3, 1.0, 1.0);
        let z = PhasePoint::new(vec![1.0, 0.0, 0.4], vec![0.6, 0.2, -0.3]).unwrap();
        let j = generator_polar(&sp, 0, 1).unwrap();
        assert!((j.value(&z).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn j12_in_two_dimensions_is_angular_momentum() {
        for sp in SpaceSpec::six_classes(2) {
            let z = PhasePoint::new(vec![0.7, 0.4], vec![0.2, -1.3]).unwrap();
            assert_eq!(generator_polar(&sp, 1, 2).unwrap().value(&z).unwrap(), -1.3);
        }
    }

    #[test]
    fn ambient_examples() {
        let sp = spec(3, 1.0, 1.0);
        let j = generator_ambient(&sp, 2, 3).unwrap();
        let z = AmbientPhasePoint {
            x: vec![0.0, 0.0, 1.0, 0.0],
            p: vec![0.0, 0.0, 0.0, 2.0],
        };
        assert_eq!(j.eval(&z), 2.0);

        let flat = spec(3, 0.0, -1.0);
        let j = generator_ambient(&flat, 0, 2).unwrap();
        let z = AmbientPhasePoint {
            x: vec![1.0, 0.3, 0.4, 0.5],
            p: vec![7.0, 0.1, 0.2, 0.3],
        };
        assert_eq!(j.eval(&z), 0.2);
        assert!(generator_ambient(&sp, 3, 1).is_err());
        assert!(generator_ambient(&sp, 1, 4).is_err());
    }

    #[test]
    fn zero_momenta_map_to_zero() {
        for sp in SpaceSpec::six_classes(4) {
            let z = PhasePoint::new(vec![0.6, 0.4, 1.0, 2.0], vec![0.0; 4]).unwrap();
            let a = phase_map(&sp, &z).unwrap();
            assert!(a.p.iter().all(|&v| v == 0.0));
            let x = polar_to_ambient(&sp, &PolarCoords(z.q.clone()));
            assert_eq!(a.x, x.0);
        }
    }

    #[test]
    fn degenerate_chart_is_reported() {
        let sp = spec(3, 1.0, 1.0);
        let z = PhasePoint::new(vec![0.0, 0.4, 1.0], vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(phase_map(&sp, &z), Err(Error::ChartDegenerate(_))));
        let z = PhasePoint::new(vec![0.5, 0.0, 1.0], vec![1.0, 0.0, 0.2]).unwrap();
        assert!(matches!(phase_map(&sp, &z), Err(Error::ChartDegenerate(_))));
        // no angular momentum: θ = 0 is harmless
        let z = PhasePoint::new(vec![0.5, 0.0, 1.0], vec![1.0, 0.3, 0.0]).unwrap();
        assert!(phase_map(&sp, &z).is_ok());
    }

    #[test]
    fn radial_motion_p1() {
        // pure radial motion, θ = 0: p1 = Ck_{κ1}(r) p_r
        for sp in SpaceSpec::six_classes(2) {
            let z = PhasePoint::new(vec![0.9, 0.0], vec![0.7, 0.0]).unwrap();
            let a = phase_map(&sp, &z).unwrap();
            let c1: f64 = crate::kappa_trig::ck(sp.kappa1, 0.9);
            assert!((a.p[1] - c1 * 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn polar_matches_ambient_through_map() {
        for n in 2..=5 {
            for sp in SpaceSpec::six_classes(n) {
                let z = point(n);
                let a = phase_map(&sp, &z).unwrap();
                for g in generators(n) {
                    let polar = PolarFrame::new(&sp, &z.q)
                        .unwrap()
                        .generator(g, &z.p)
                        .unwrap();
                    let amb = generator_ambient(&sp, g.mu, g.nu).unwrap().eval(&a);
                    assert!((polar - amb).abs() < 1e-12, "{g} {sp:?}: {polar} vs {amb}");
                }
            }
        }
    }

    #[test]
    fn singular_generator_reports_error() {
        let sp = spec(2, 1.0, 1.0);
        let z = PhasePoint::new(vec![0.0, 0.4], vec![1.0, 1.0]).unwrap();
        let err = generator_polar(&sp, 0, 1).unwrap().value(&z).unwrap_err();
        assert!(err.is_singular());
    }
}
