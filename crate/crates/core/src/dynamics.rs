//! Hamiltonian flows in polar phase space.
//!
//! The implicit midpoint rule is the default: it is symplectic and keeps
//! first integrals bounded over long runs. Its nonlinear stage is solved by
//! Newton iteration with the exact Jacobian `I − (dt/2) Ω ∇²H` from nested
//! dual numbers. Classical RK4 is available for smooth, short stretches.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpaceSpec;
use crate::kappa_trig::{ck, sk};
use crate::observable::{Observable, PhasePoint};

/// Distance to a chart singularity below which a step is rejected.
pub const GUARD_DELTA: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ImplicitMidpoint,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub steps: usize,
    /// Record every `stride` steps.
    pub stride: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl IntegratorConfig {
    pub fn new(method: Method, dt: f64, steps: usize) -> Self {
        IntegratorConfig {
            method,
            dt,
            steps,
            stride: 1,
            newton_tol: 1e-12,
            newton_max_iter: 25,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.dt > 0.0) || !(self.dt * self.steps as f64).is_finite() {
            return bad("dt must be positive and dt*steps finite");
        }
        if self.steps == 0 {
            return bad("steps must be positive");
        }
        if self.stride == 0 {
            return bad("stride must be positive");
        }
        if !(self.newton_tol >= 1e-14) {
            return bad("newton_tol must be at least 1e-14");
        }
        if self.newton_max_iter == 0 {
            return bad("newton_max_iter must be positive");
        }
        Ok(())
    }
}

/// Recorded flow: sampled states, the Hamiltonian and every monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, PhasePoint<f64>)>,
    pub energy: Vec<f64>,
    pub monitors: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint<f64> {
        &self
            .samples
            .last()
            .expect("a trajectory holds its initial state")
            .1
    }

    /// `max_t |H(t) − H(0)| / |H(0)|`.
    pub fn energy_drift(&self) -> f64 {
        max_relative_drift(&self.energy)
    }

    /// Relative drift of each monitor, in monitor order.
    pub fn monitor_drifts(&self) -> Vec<(String, f64)> {
        self.monitors
            .iter()
            .map(|(n, v)| (n.clone(), max_relative_drift(v)))
            .collect()
    }
}

/// `max_k |v_k − v_0| / |v_0|`; falls back to the absolute deviation when
/// `v_0` is exactly zero.
pub fn max_relative_drift(series: &[f64]) -> f64 {
    let Some(&v0) = series.first() else {
        return 0.0;
    };
    let scale = if v0 == 0.0 { 1.0 } else { v0.abs() };
    series
        .iter()
        .map(|v| (v - v0).abs() / scale)
        .fold(0.0, f64::max)
}

/// Integration stopped early; `partial` holds everything recorded so far.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{error}")]
pub struct Aborted {
    pub error: Error,
    pub partial: Trajectory,
}

/// `(q̇, ṗ) = (∂H/∂p, −∂H/∂q)`.
pub fn hamiltonian_vector_field(h: &Observable, z: &PhasePoint<f64>) -> Result<Vec<f64>> {
    let g = h.gradient(z)?;
    let n = z.dim();
    let mut v = Vec::with_capacity(2 * n);
    v.extend_from_slice(&g[n..]);
    v.extend(g[..n].iter().map(|d| -d));
    Ok(v)
}

/// Jacobian of the Hamiltonian vector field, `Ω ∇²H`.
fn vector_field_jacobian(h: &Observable, z: &PhasePoint<f64>) -> Result<DMatrix<f64>> {
    let hess = h.hessian(z)?;
    let n = z.dim();
    Ok(DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i < n {
            hess[n + i][j]
        } else {
            -hess[i - n][j]
        }
    }))
}

fn field(h: &Observable, z: &[f64]) -> Result<DVector<f64>> {
    Ok(DVector::from_vec(hamiltonian_vector_field(
        h,
        &PhasePoint::from_slice(z),
    )?))
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

enum StepFailure {
    Singular(Error),
    NoConvergence,
}

impl From<Error> for StepFailure {
    fn from(e: Error) -> Self {
        StepFailure::Singular(e)
    }
}

fn midpoint_step(
    h: &Observable,
    z0: &DVector<f64>,
    dt: f64,
    cfg: &IntegratorConfig,
) -> std::result::Result<DVector<f64>, StepFailure> {
    let dim = z0.len();
    let mut z1 = z0 + field(h, z0.as_slice())? * dt;
    for _ in 0..cfg.newton_max_iter {
        let mid = (z0 + &z1) * 0.5;
        let g = &z1 - z0 - field(h, mid.as_slice())? * dt;
        let jac = DMatrix::identity(dim, dim)
            - vector_field_jacobian(h, &PhasePoint::from_slice(mid.as_slice()))? * (0.5 * dt);
        let delta = jac.lu().solve(&(-g)).ok_or(StepFailure::NoConvergence)?;
        z1 += &delta;
        if !z1.iter().all(|v| v.is_finite()) {
            return Err(StepFailure::NoConvergence);
        }
        if inf_norm(&delta) <= cfg.newton_tol * inf_norm(&z1).max(1.0) {
            return Ok(z1);
        }
    }
    Err(StepFailure::NoConvergence)
}

fn rk4_step(h: &Observable, z0: &DVector<f64>, dt: f64) -> Result<DVector<f64>> {
    let k1 = field(h, z0.as_slice())?;
    let k2 = field(h, (z0 + &k1 * (0.5 * dt)).as_slice())?;
    let k3 = field(h, (z0 + &k2 * (0.5 * dt)).as_slice())?;
    let k4 = field(h, (z0 + &k3 * dt).as_slice())?;
    Ok(z0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

/// Checks the distance to the chart singularities (zeros of `Sk_{κ1}(r)`,
/// `Sk_{κ2}(θ)`, `sin φ_s`, and of `Ck_{κ2}(θ)` when κ2 > 0).
pub fn singularity_guard(
    spec: &SpaceSpec,
    q: &[f64],
    delta: f64,
) -> std::result::Result<(), &'static str> {
    if sk(spec.kappa1, q[0]).abs() < delta {
        return Err("Sk_k1(r) = 0");
    }
    if spec.dim > 2 && sk(spec.kappa2, q[1]).abs() < delta {
        return Err("Sk_k2(theta) = 0");
    }
    if spec.k2() > 0.0 && ck(spec.kappa2, q[1]).abs() < delta {
        return Err("Ck_k2(theta) = 0");
    }
    if q[2..].iter().any(|phi| phi.sin().abs() < delta) {
        return Err("sin(phi) = 0");
    }
    Ok(())
}

fn locus(e: &Error) -> &'static str {
    match e {
        Error::SingularEvaluation(w) | Error::ChartDegenerate(w) => w,
        Error::DivisionAtPole { .. } => "tangent pole",
        _ => "evaluation failure",
    }
}

/// Integrates Hamilton's equations of `h` from `z0`, recording `h` and the
/// monitors every `cfg.stride` steps. When `spec` is given, every accepted
/// state is checked by [`singularity_guard`].
pub fn integrate(
    h: &Observable,
    z0: &PhasePoint<f64>,
    cfg: &IntegratorConfig,
    monitors: &[Observable],
    spec: Option<&SpaceSpec>,
) -> std::result::Result<Trajectory, Box<Aborted>> {
    let mut traj = Trajectory {
        samples: Vec::with_capacity(cfg.steps / cfg.stride.max(1) + 1),
        energy: Vec::new(),
        monitors: monitors
            .iter()
            .map(|m| (m.name().to_string(), Vec::new()))
            .collect(),
    };
    let abort = |error: Error, partial: Trajectory| Box::new(Aborted { error, partial });
    if let Err(e) = cfg.validate() {
        return Err(abort(e, traj));
    }
    let record = |traj: &mut Trajectory, t: f64, z: PhasePoint<f64>, step: usize| -> Result<()> {
        let singular = |e: Error| {
            if e.is_singular() {
                Error::SingularityApproach {
                    step,
                    locus: locus(&e),
                }
            } else {
                e
            }
        };
        let e = h.value(&z).map_err(singular)?;
        let vals: Vec<f64> = monitors
            .iter()
            .map(|m| m.value(&z))
            .collect::<Result<_>>()
            .map_err(singular)?;
        traj.energy.push(e);
        for (slot, v) in traj.monitors.iter_mut().zip(vals) {
            slot.1.push(v);
        }
        traj.samples.push((t, z));
        Ok(())
    };
    if let Err(e) = record(&mut traj, 0.0, z0.clone(), 0) {
        return Err(abort(e, traj));
    }
    let mut z = DVector::from_vec(z0.to_vec());
    for step in 1..=cfg.steps {
        let next = match cfg.method {
            Method::Rk4 => rk4_step(h, &z, cfg.dt).map_err(StepFailure::Singular),
            Method::ImplicitMidpoint => match midpoint_step(h, &z, cfg.dt, cfg) {
                Err(StepFailure::NoConvergence) => {
                    // one fallback: two half steps
                    midpoint_step(h, &z, 0.5 * cfg.dt, cfg)
                        .and_then(|half| midpoint_step(h, &half, 0.5 * cfg.dt, cfg))
                }
                other => other,
            },
        };
        z = match next {
            Ok(v) => v,
            Err(StepFailure::NoConvergence) => {
                return Err(abort(Error::NewtonDivergence { step }, traj))
            }
            Err(StepFailure::Singular(e)) => {
                let e = if e.is_singular() {
                    Error::SingularityApproach {
                        step,
                        locus: locus(&e),
                    }
                } else {
                    e
                };
                return Err(abort(e, traj));
            }
        };
        if let Some(sp) = spec {
            let n = sp.dim;
            if let Err(l) = singularity_guard(sp, &z.as_slice()[..n], GUARD_DELTA) {
                return Err(abort(Error::SingularityApproach { step, locus: l }, traj));
            }
        }
        if step % cfg.stride == 0 {
            let t = step as f64 * cfg.dt;
            if let Err(e) = record(&mut traj, t, PhasePoint::from_slice(z.as_slice()), step) {
                return Err(abort(e, traj));
            }
        }
    }
    Ok(traj)
}

/// Flips all momenta: the time-reversal involution for Hamiltonians even
/// in `p`.
pub fn reverse_momenta(z: &PhasePoint<f64>) -> PhasePoint<f64> {
    PhasePoint {
        q: z.q.clone(),
        p: z.p.iter().map(|v| -v).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::generator_polar;
    use crate::observables::{hamiltonian, kinetic, Betas, SystemKind};

    fn spec(n: usize, k1: f64, k2: f64) -> SpaceSpec {
        SpaceSpec::new(n, k1, k2).unwrap()
    }

    #[test]
    fn flat_free_field() {
        let t = kinetic(&spec(2, 0.0, 1.0));
        let (r, pr, pth) = (1.3, 0.4, 0.7);
        let z = PhasePoint::new(vec![r, 0.5], vec![pr, pth]).unwrap();
        let v = hamiltonian_vector_field(&t, &z).unwrap();
        let expected = [pr, pth / (r * r), pth * pth / (r * r * r), 0.0];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rest_at_minimum() {
        let sp = spec(2, 1.0, 1.0);
        let h = hamiltonian(&sp, SystemKind::SW, &Betas::new(1.0, vec![0.0, 0.0], 0.0)).unwrap();
        let z = PhasePoint::new(vec![1e-3, 0.5], vec![0.0, 0.0]).unwrap();
        let v = hamiltonian_vector_field(&h, &z).unwrap();
        assert_eq!(&v[..2], &[0.0, 0.0]);
    }

    #[test]
    fn radial_geodesic() {
        let sp = spec(2, 1.0, 1.0);
        let t = kinetic(&sp);
        let j12 = generator_polar(&sp, 1, 2).unwrap();
        let z0 = PhasePoint::new(vec![0.5, std::f64::consts::FRAC_PI_3], vec![1.0, 0.0]).unwrap();
        let cfg = IntegratorConfig::new(Method::ImplicitMidpoint, 1e-3, 500);
        let traj = integrate(&t, &z0, &cfg, &[j12], Some(&sp)).unwrap();
        for (t, z) in &traj.samples {
            assert!((z.q[0] - (0.5 + t)).abs() < 1e-12);
        }
        assert!(traj.monitors[0].1.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(traj.samples.len(), 501);
    }

    #[test]
    fn quadratic_integral_preserved() {
        // for N = 2 the polar J12 is linear in p
        let sp = spec(2, -1.0, 1.0);
        let t = kinetic(&sp);
        let j12 = generator_polar(&sp, 1, 2).unwrap();
        let z0 = PhasePoint::new(vec![0.8, 0.7], vec![0.2, 0.3]).unwrap();
        let cfg = IntegratorConfig::new(Method::ImplicitMidpoint, 1e-3, 2000).with_stride(10);
        let traj = integrate(&t, &z0, &cfg, &[j12], Some(&sp)).unwrap();
        assert_eq!(traj.samples.len(), 201);
        let series = &traj.monitors[0].1;
        let spread = series
            .iter()
            .map(|v| (v - series[0]).abs())
            .fold(0.0, f64::max);
        assert!(spread < 1e-11, "{spread}");
    }

    #[test]
    fn time_reversal() {
        let sp = spec(2, 1.0, 1.0);
        let h = hamiltonian(&sp, SystemKind::SW, &Betas::new(0.5, vec![0.1, 0.2], 0.0)).unwrap();
        let z0 = PhasePoint::new(vec![0.6, 0.5], vec![0.1, 0.05]).unwrap();
        let cfg = IntegratorConfig::new(Method::ImplicitMidpoint, 1e-3, 1000);
        let fwd = integrate(&h, &z0, &cfg, &[], Some(&sp)).unwrap();
        let back = integrate(&h, &reverse_momenta(fwd.last()), &cfg, &[], Some(&sp)).unwrap();
        let end = reverse_momenta(back.last());
        for (a, b) in end.to_vec().iter().zip(z0.to_vec()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn guard_stops_at_the_origin() {
        let sp = spec(2, 0.0, 1.0);
        let t = kinetic(&sp);
        let z0 = PhasePoint::new(vec![0.05, 0.5], vec![-1.0, 0.0]).unwrap();
        let cfg = IntegratorConfig::new(Method::Rk4, 1e-3, 200);
        let err = integrate(&t, &z0, &cfg, &[], Some(&sp)).unwrap_err();
        assert!(matches!(err.error, Error::SingularityApproach { .. }));
        assert!(err.partial.samples.len() > 40 && err.partial.samples.len() < 60);
    }

    #[test]
    fn bad_configs() {
        let mut cfg = IntegratorConfig::new(Method::Rk4, 0.0, 10);
        assert!(cfg.validate().is_err());
        cfg.dt = 1e-3;
        cfg.newton_tol = 1e-16;
        assert!(cfg.validate().is_err());
    }
}
