//! Randomized verification of the integrability statements.
//!
//! Every check evaluates observables at seeded random phase points and
//! reduces to a [`VerificationReport`]. Points where some observable is
//! singular are skipped and counted; a check with more than 10% skipped
//! points fails.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{bracket, generators, Gen};
use crate::error::{Error, Result};
use crate::exact_poisson::{
    realize_generator, verify_casimir, verify_structure_constants, verify_structure_constants_with,
    BracketReport,
};
use crate::generators::{generator_polar, polar_velocities};
use crate::geometry::SpaceSpec;
use crate::kappa_trig::{ck, sk};
use crate::observable::{
    bracket_from_gradients, bracket_scale, normalized_difference, Observable, PhasePoint,
};
use crate::observables::{
    both_chains, casimir_polar, hamiltonian, integral_i, integral_j, integral_l, integral_q,
    kinetic, potential_general, Betas, Chain, RadialFn, SystemKind,
};

pub const BRACKET_TOL: f64 = 1e-9;
pub const RANK_TOL: f64 = 1e-8;
pub const CROSS_FORM_TOL: f64 = 1e-10;
/// Fraction of points that must reach the expected rank.
pub const RANK_QUORUM: f64 = 0.9;
pub const MAX_SKIPPED_FRACTION: f64 = 0.1;
pub const RNG_ALGORITHM: &str = "ChaCha8Rng::seed_from_u64 (rand_chacha 0.9)";

/// Where and how many phase points to draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub count: usize,
    pub seed: u64,
    pub delta: f64,
    /// Sampling interval for each of the `2N` phase coordinates, `(q, p)`.
    pub bounds: Vec<(f64, f64)>,
}

impl SampleConfig {
    pub const DEFAULT_DELTA: f64 = 0.05;

    /// The default box for `spec`: `r ∈ [δ, R]`, `θ ∈ [δ, Θ]`,
    /// `φ_s ∈ [δ, π − δ]`, `φ_N ∈ [δ, 2π − δ]`, momenta in `[−1, 1]`, where
    /// `R` and `Θ` stop `δ` short of the first κ-cosine zero (or are 2).
    pub fn for_spec(spec: &SpaceSpec, count: usize, seed: u64) -> Self {
        Self::with_delta(spec, count, seed, Self::DEFAULT_DELTA)
    }

    pub fn with_delta(spec: &SpaceSpec, count: usize, seed: u64, delta: f64) -> Self {
        let quarter = |k: f64| {
            if k > 0.0 {
                (PI / (2.0 * k.sqrt()) - delta).min(2.0)
            } else {
                2.0
            }
        };
        let n = spec.dim;
        let mut bounds = vec![(delta, quarter(spec.k1())), (delta, quarter(spec.k2()))];
        if spec.k2() > 0.0 {
            bounds[1].1 = PI / (2.0 * spec.k2().sqrt()) - delta;
        }
        for s in 3..=n {
            let hi = if s == n { 2.0 * PI - delta } else { PI - delta };
            bounds.push((delta, hi));
        }
        bounds.extend(std::iter::repeat_n((-1.0, 1.0), n));
        SampleConfig {
            count,
            seed,
            delta,
            bounds,
        }
    }

    pub fn validate(&self, spec: &SpaceSpec) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        if !(self.delta > 0.0) {
            return bad("delta must be positive".into());
        }
        if self.bounds.len() != 2 * spec.dim {
            return bad(format!(
                "expected {} intervals, got {}",
                2 * spec.dim,
                self.bounds.len()
            ));
        }
        for (k, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return bad(format!("interval {k} is empty or unbounded"));
            }
        }
        let d = self.delta;
        let lim = |k: f64| {
            if k > 0.0 {
                PI / (2.0 * k.sqrt()) - d
            } else {
                f64::INFINITY
            }
        };
        let (r, th) = (self.bounds[0], self.bounds[1]);
        if r.0 < d || r.1 > lim(spec.k1()) + 1e-15 {
            return bad("radial interval must keep delta away from Sk_k1 and Ck_k1 zeros".into());
        }
        if th.0 < d || th.1 > lim(spec.k2()) + 1e-15 {
            return bad("theta interval must keep delta away from Sk_k2 and Ck_k2 zeros".into());
        }
        for s in 3..=spec.dim {
            let (lo, hi) = self.bounds[s - 1];
            let top = if s == spec.dim { 2.0 * PI } else { PI };
            if lo < d || hi > top - d + 1e-15 {
                return bad(format!(
                    "phi{s} interval must lie in [delta, {top} - delta]"
                ));
            }
        }
        Ok(())
    }
}

fn near_singular(spec: &SpaceSpec, q: &[f64], d: f64) -> bool {
    let (k1, k2) = (spec.kappa1, spec.kappa2);
    sk(k1, q[0]).abs() < d
        || ck(k1, q[0]).abs() < d
        || sk(k2, q[1]).abs() < d
        || ck(k2, q[1]).abs() < d
        || q[2..]
            .iter()
            .any(|phi| phi.sin().abs() < d || phi.cos().abs() < d)
}

/// Seeded uniform samples from the box of `cfg`. Draws that land within
/// `δ` of a zero of any chart sine or cosine are rejected and redrawn, so
/// the result may be shorter than `count` only for pathological boxes.
pub fn sample_points(spec: &SpaceSpec, cfg: &SampleConfig) -> Result<Vec<PhasePoint<f64>>> {
    cfg.validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = spec.dim;
    let mut out = Vec::with_capacity(cfg.count);
    let mut attempts = 0usize;
    while out.len() < cfg.count && attempts < 1000 * cfg.count {
        attempts += 1;
        let z: Vec<f64> = cfg
            .bounds
            .iter()
            .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
            .collect();
        if near_singular(spec, &z[..n], cfg.delta) {
            continue;
        }
        out.push(PhasePoint::from_slice(&z));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankInfo {
    pub expected: usize,
    pub observed: usize,
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub proposition: String,
    pub paper_ref: String,
    pub points: usize,
    pub skipped: usize,
    pub max_normalized_residual: f64,
    pub rank: Option<RankInfo>,
    pub pass: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl VerificationReport {
    fn new(proposition: &str, paper_ref: &str, seed: u64) -> Self {
        VerificationReport {
            id: String::new(),
            proposition: proposition.to_string(),
            paper_ref: paper_ref.to_string(),
            points: 0,
            skipped: 0,
            max_normalized_residual: 0.0,
            rank: None,
            pass: false,
            seed,
            reason: None,
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn labelled(mut self, proposition: &str, paper_ref: &str) -> Self {
        self.proposition = proposition.to_string();
        self.paper_ref = paper_ref.to_string();
        self
    }

    /// Applies the skipped-point policy, then `residual < tol` and the
    /// rank condition.
    fn finish(mut self, tol: f64) -> Self {
        let too_many_skipped =
            self.points == 0 || self.skipped as f64 > MAX_SKIPPED_FRACTION * self.points as f64;
        let rank_ok = self.rank.is_none_or(|r| r.expected == r.observed);
        self.pass = !too_many_skipped && self.max_normalized_residual < tol && rank_ok;
        if too_many_skipped {
            self.reason = Some("insufficient valid samples".into());
        }
        self
    }
}

/// Gradients of every member of `set` at `z`, or `None` when any of them
/// is singular there.
fn gradients(set: &[&Observable], z: &PhasePoint<f64>) -> Option<Vec<Vec<f64>>> {
    set.iter().map(|f| f.gradient(z).ok()).collect()
}

fn pairwise_residual(grads: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..grads.len() {
        for b in a + 1..grads.len() {
            let v = bracket_from_gradients(&grads[a], &grads[b]).abs()
                / bracket_scale(&grads[a], &grads[b]);
            worst = worst.max(v);
        }
    }
    worst
}

/// `max_z |{F, H}| / max(1, ‖∇F‖‖∇H‖)`.
pub fn check_commutes(
    h: &Observable,
    f: &Observable,
    pts: &[PhasePoint<f64>],
    tol: f64,
) -> VerificationReport {
    let mut rep =
        VerificationReport::new("", "", 0).with_id(format!("{{{}, {}}}", f.name(), h.name()));
    rep.points = pts.len();
    for z in pts {
        match gradients(&[f, h], z) {
            Some(g) => {
                rep.max_normalized_residual = rep.max_normalized_residual.max(pairwise_residual(&g))
            }
            None => rep.skipped += 1,
        }
    }
    rep.finish(tol)
}

/// Largest normalized bracket over all pairs of `set` and all points.
pub fn check_involution(
    set: &[Observable],
    pts: &[PhasePoint<f64>],
    tol: f64,
) -> VerificationReport {
    let names: Vec<&str> = set.iter().map(|o| o.name()).collect();
    let mut rep =
        VerificationReport::new("", "", 0).with_id(format!("involution[{}]", names.join(",")));
    rep.points = pts.len();
    let refs: Vec<&Observable> = set.iter().collect();
    for z in pts {
        match gradients(&refs, z) {
            Some(g) => {
                rep.max_normalized_residual = rep.max_normalized_residual.max(pairwise_residual(&g))
            }
            None => rep.skipped += 1,
        }
    }
    rep.finish(tol)
}

/// Alternating row/column normalization sweeps applied before the SVD.
pub const EQUILIBRATION_SWEEPS: usize = 5;

/// Numerical rank of the gradient matrix: the number of singular values
/// above `svd_tol · σ_max` after diagonal row and column equilibration
/// (which leaves the rank unchanged but tames the mixed scales of
/// position and momentum derivatives).
pub fn jacobian_rank(grads: &[Vec<f64>], svd_tol: f64) -> usize {
    let cols = grads.first().map_or(0, Vec::len);
    let mut m = DMatrix::from_fn(grads.len(), cols, |i, j| grads[i][j]);
    for _ in 0..EQUILIBRATION_SWEEPS {
        for mut row in m.row_iter_mut() {
            let n = row.norm();
            if n > 0.0 {
                row /= n;
            }
        }
        for mut col in m.column_iter_mut() {
            let n = col.norm();
            if n > 0.0 {
                col /= n;
            }
        }
    }
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > svd_tol * smax).count()
}

/// Functional independence of `set`: the observed rank is the largest `r`
/// reached at no fewer than 90% of the valid points; the check passes iff
/// it equals `|set|`.
pub fn check_independence(
    set: &[Observable],
    pts: &[PhasePoint<f64>],
    svd_tol: f64,
) -> VerificationReport {
    let names: Vec<&str> = set.iter().map(|o| o.name()).collect();
    let mut rep = VerificationReport::new("", "", 0).with_id(format!("rank[{}]", names.join(",")));
    rep.points = pts.len();
    let refs: Vec<&Observable> = set.iter().collect();
    let mut ranks = Vec::with_capacity(pts.len());
    for z in pts {
        match gradients(&refs, z) {
            Some(g) => ranks.push(jacobian_rank(&g, svd_tol)),
            None => rep.skipped += 1,
        }
    }
    ranks.sort_unstable_by(|a, b| b.cmp(a));
    let observed = if ranks.is_empty() {
        0
    } else {
        let k = ((RANK_QUORUM * ranks.len() as f64).ceil() as usize).clamp(1, ranks.len());
        ranks[k - 1]
    };
    rep.rank = Some(RankInfo {
        expected: set.len(),
        observed,
    });
    rep.finish(f64::INFINITY)
}

/// `max_z |a(z) − b(z)| / max(1, |a|, |b|)`: two expressions of the same
/// function agree.
pub fn check_equal(
    a: &Observable,
    b: &Observable,
    pts: &[PhasePoint<f64>],
    tol: f64,
) -> VerificationReport {
    let mut rep =
        VerificationReport::new("", "", 0).with_id(format!("{} == {}", a.name(), b.name()));
    rep.points = pts.len();
    for z in pts {
        match (a.value(z), b.value(z)) {
            (Ok(x), Ok(y)) => {
                rep.max_normalized_residual =
                    rep.max_normalized_residual.max(normalized_difference(x, y))
            }
            _ => rep.skipped += 1,
        }
    }
    rep.finish(tol)
}

/// Every bracket `{J_a, J_b}` of the polar generators against the
/// structure constants, normalized like [`check_commutes`].
pub fn check_polar_algebra(
    spec: &SpaceSpec,
    pts: &[PhasePoint<f64>],
    tol: f64,
) -> Result<VerificationReport> {
    let gens = generators(spec.dim);
    let obs: Vec<Observable> = gens
        .iter()
        .map(|g| generator_polar(spec, g.mu, g.nu))
        .collect::<Result<_>>()?;
    let index = |g: Gen| gens.iter().position(|h| *h == g).expect("closed algebra");
    let mut rep = VerificationReport::new("", "", 0).with_id("polar_structure_constants");
    rep.points = pts.len();
    for z in pts {
        let refs: Vec<&Observable> = obs.iter().collect();
        let Some(grads) = gradients(&refs, z) else {
            rep.skipped += 1;
            continue;
        };
        let values: Option<Vec<f64>> = obs.iter().map(|o| o.value(z).ok()).collect();
        let Some(values) = values else {
            rep.skipped += 1;
            continue;
        };
        for a in 0..gens.len() {
            for b in a + 1..gens.len() {
                let got = bracket_from_gradients(&grads[a], &grads[b]);
                let want = bracket(gens[a], gens[b]).map_or(0.0, |(c, g)| {
                    c.eval(spec.k1(), spec.k2()) * values[index(g)]
                });
                let r = (got - want).abs() / bracket_scale(&grads[a], &grads[b]);
                rep.max_normalized_residual = rep.max_normalized_residual.max(r);
            }
        }
    }
    Ok(rep.finish(tol))
}

fn exact_report(r: &BracketReport, id: &str) -> VerificationReport {
    let mut rep = VerificationReport::new("", "", 0).with_id(id);
    rep.points = r.pairs_checked;
    rep.max_normalized_residual = r
        .failures
        .iter()
        .map(|f| f.max_coefficient)
        .fold(0.0, f64::max);
    rep.pass = r.pass();
    rep
}

/// Deterministic coefficients for the generic central term `c1 Tk + c2 Ck`.
pub fn generic_radial(seed: u64) -> RadialFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut draw = || 0.25 + 0.75 * rng.random::<f64>();
    RadialFn::Mixed {
        c1: draw(),
        c2: -draw(),
    }
}

/// Deterministic nonzero centrifugal coefficients in `[0.1, 1]`.
pub fn random_betas(dim: usize, seed: u64, beta0: f64, k: f64) -> Betas {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbf58_476d_1ce4_e5b9);
    let beta = (0..dim).map(|_| 0.1 + 0.9 * rng.random::<f64>()).collect();
    Betas::new(beta0, beta, k)
}

fn chain_q(spec: &SpaceSpec, b: &Betas, chains: &[Chain]) -> Result<Vec<Observable>> {
    chains.iter().map(|&c| integral_q(spec, b, c)).collect()
}

fn upper(dim: usize) -> Vec<Chain> {
    (2..=dim).map(Chain::Upper).collect()
}

fn lower(dim: usize) -> Vec<Chain> {
    (2..=dim).rev().map(Chain::Lower).collect()
}

fn with(set: &[Observable], extra: &[&Observable]) -> Vec<Observable> {
    set.iter()
        .cloned()
        .chain(extra.iter().map(|o| (*o).clone()))
        .collect()
}

/// Runs every sub-claim of proposition `prop` (1..=7). For 5 and 6 the
/// index `i` may be fixed; otherwise all `i` are run. Proposition 6 is run
/// for every `j ≠ i`.
pub fn run_proposition(
    spec: &SpaceSpec,
    prop: u8,
    b: &Betas,
    cfg: &SampleConfig,
) -> Result<Vec<VerificationReport>> {
    run_proposition_with(spec, prop, b, cfg, &RunOptions::default())
}

/// Optional knobs for [`run_proposition_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Fixes `i` for propositions 5 and 6.
    pub index: Option<usize>,
    /// Bracket tolerance.
    pub tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            index: None,
            tol: BRACKET_TOL,
        }
    }
}

pub fn run_proposition_with(
    spec: &SpaceSpec,
    prop: u8,
    b: &Betas,
    cfg: &SampleConfig,
    opts: &RunOptions,
) -> Result<Vec<VerificationReport>> {
    let (index, tol) = (opts.index, opts.tol);
    let n = spec.dim;
    if b.beta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.beta.len(),
        });
    }
    if let Some(i) = index {
        if !(1..=n).contains(&i) {
            return Err(Error::IndexRange {
                index: i,
                min: 1,
                max: n,
            });
        }
    }
    let indices: Vec<usize> = index.map_or_else(|| (1..=n).collect(), |i| vec![i]);
    let pts = sample_points(spec, cfg)?;
    let label = |i: &str| format!("{prop}({i})");
    let mut out: Vec<VerificationReport> = Vec::new();
    let mut push = |rep: VerificationReport, id: String, sub: &str, what: &str| {
        out.push(rep.with_id(id).labelled(&label(sub), what));
    };
    let t = kinetic(spec);
    let j_upper: Vec<Observable> = upper(n)
        .into_iter()
        .map(|c| integral_j(spec, c))
        .collect::<Result<_>>()?;
    let j_lower: Vec<Observable> = lower(n)
        .into_iter()
        .map(|c| integral_j(spec, c))
        .collect::<Result<_>>()?;
    let j_both: Vec<Observable> = both_chains(n)
        .into_iter()
        .map(|c| integral_j(spec, c))
        .collect::<Result<_>>()?;

    match prop {
        1 => {
            let exact = verify_structure_constants(n)?;
            push(
                exact_report(&exact, ""),
                "P1.i.exact".into(),
                "i",
                "ambient generators close the algebra, identically in the curvatures",
            );
            push(
                check_polar_algebra(spec, &pts, tol)?,
                "P1.i.polar".into(),
                "i",
                "polar generators close the algebra at sampled points",
            );
            for g in generators(n) {
                let jg = generator_polar(spec, g.mu, g.nu)?;
                push(
                    check_commutes(&t, &jg, &pts, tol),
                    format!("P1.ii.{}", jg.name()),
                    "ii",
                    "generator commutes with the kinetic energy",
                );
            }
            let two_k2_t = t.scaled(2.0 * spec.k2()).renamed("2k2T");
            push(
                check_equal(&two_k2_t, &casimir_polar(spec), &pts, tol),
                "P1.ii.casimir_kinetic".into(),
                "ii",
                "kinetic energy is the Casimir divided by 2 k2",
            );
            push(
                exact_report(&verify_casimir(n)?, ""),
                "P1.ii.casimir_exact".into(),
                "ii",
                "Casimir is central, identically in the curvatures",
            );
        }
        2 => {
            push(
                check_involution(&with(&j_upper, &[&t]), &pts, tol),
                "P2.i.upper".into(),
                "i",
                "upper J-chain and kinetic energy in involution",
            );
            push(
                check_involution(&with(&j_lower, &[&t]), &pts, tol),
                "P2.i.lower".into(),
                "i",
                "lower J-chain and kinetic energy in involution",
            );
            for j in 1..=n {
                let j0 = generator_polar(spec, 0, j)?;
                push(
                    check_independence(&with(&j_both, &[&j0, &t]), &pts, RANK_TOL),
                    format!("P2.ii.j={j}"),
                    "ii",
                    "both J-chains, one translation generator and T are independent",
                );
            }
        }
        3 => {
            let radial = generic_radial(cfg.seed);
            let h = hamiltonian(spec, SystemKind::Central(radial), b)?;
            push(
                check_involution(&with(&chain_q(spec, b, &upper(n))?, &[&h]), &pts, tol),
                "P3.i.upper".into(),
                "i",
                "upper Q-chain and H in involution",
            );
            push(
                check_involution(&with(&chain_q(spec, b, &lower(n))?, &[&h]), &pts, tol),
                "P3.i.lower".into(),
                "i",
                "lower Q-chain and H in involution",
            );
            push(
                check_independence(
                    &with(&chain_q(spec, b, &both_chains(n))?, &[&h]),
                    &pts,
                    RANK_TOL,
                ),
                "P3.ii".into(),
                "ii",
                "both Q-chains and H are independent",
            );
        }
        4 => {
            let h = hamiltonian(spec, SystemKind::SW, b)?;
            let q = chain_q(spec, b, &both_chains(n))?;
            for mu in 1..=n {
                let i0 = integral_i(spec, b, 0, mu)?;
                push(
                    check_commutes(&h, &i0, &pts, tol),
                    format!("P4.i.I0{mu}"),
                    "i",
                    "translation-sector integral commutes with the SW Hamiltonian",
                );
            }
            for j in 1..=n {
                let i0 = integral_i(spec, b, 0, j)?;
                push(
                    check_independence(&with(&q, &[&i0, &h]), &pts, RANK_TOL),
                    format!("P4.ii.j={j}"),
                    "ii",
                    "both Q-chains, one translation integral and H are independent",
                );
            }
        }
        5 => {
            for &i in &indices {
                let bi = b.clone().with(i, 0.0);
                let h = hamiltonian(spec, SystemKind::GKC(i), &bi)?;
                let li = integral_l(spec, i, &bi)?;
                let q = chain_q(spec, &bi, &both_chains(n))?;
                push(
                    check_commutes(&h, &li, &pts, tol),
                    format!("P5.i.i={i}"),
                    "i",
                    "L_i commutes with the i-th generalized Kepler Hamiltonian",
                );
                push(
                    check_independence(&with(&q, &[&li, &h]), &pts, RANK_TOL),
                    format!("P5.ii.i={i}"),
                    "ii",
                    "both Q-chains, L_i and H are independent",
                );
            }
        }
        6 => {
            for &i in &indices {
                for j in (1..=n).filter(|&j| j != i) {
                    let bij = b.clone().with(i, 0.0).with(j, 0.0);
                    let h = hamiltonian(spec, SystemKind::GKC(i), &bij)?;
                    let q = chain_q(spec, &bij, &both_chains(n))?;
                    for (which, l) in [
                        (i, integral_l(spec, i, &bij)?),
                        (j, integral_l(spec, j, &bij)?),
                    ] {
                        push(
                            check_commutes(&h, &l, &pts, tol),
                            format!("P6.i.i={i}.j={j}.L{which}"),
                            "i",
                            "with two vanishing barriers both L's commute with H",
                        );
                        push(
                            check_independence(&with(&q, &[&h, &l]), &pts, RANK_TOL),
                            format!("P6.ii.i={i}.j={j}.L{which}"),
                            "ii",
                            "both Q-chains, H and one of the two L's are independent",
                        );
                    }
                }
            }
        }
        7 => {
            let b0 = Betas::new(b.beta0, vec![0.0; n], b.k);
            let h = hamiltonian(spec, SystemKind::KC, &b0)?;
            let kc = potential_general(spec, RadialFn::Kepler { k: b.k }, &b0)?.renamed("U_KC");
            let q = chain_q(spec, &b0, &both_chains(n))?;
            for i in 1..=n {
                let gi = crate::observables::potential_gkc(spec, i, &b0)?;
                push(
                    check_equal(&gi, &kc, &pts, CROSS_FORM_TOL),
                    format!("P7.i.i={i}"),
                    "i",
                    "without barriers every generalized Kepler potential is the Kepler potential",
                );
            }
            for i in 1..=n {
                let li = integral_l(spec, i, &b0)?;
                push(
                    check_commutes(&h, &li, &pts, tol),
                    format!("P7.ii.L{i}"),
                    "ii",
                    "Runge-Lenz component commutes with the Kepler Hamiltonian",
                );
                push(
                    check_independence(&with(&q, &[&h, &li]), &pts, RANK_TOL),
                    format!("P7.iii.L{i}"),
                    "iii",
                    "both Q-chains, H and one Runge-Lenz component are independent",
                );
            }
        }
        _ => {
            return Err(Error::IndexRange {
                index: prop as usize,
                min: 1,
                max: 7,
            })
        }
    }
    for r in &mut out {
        r.seed = cfg.seed;
    }
    Ok(out)
}

/// The harness must be able to fail. Each report here is expected to have
/// `pass == false`.
pub fn negative_controls(spec: &SpaceSpec, cfg: &SampleConfig) -> Result<Vec<VerificationReport>> {
    let n = spec.dim;
    let pts = sample_points(spec, cfg)?;
    let mut out = Vec::new();

    // one term of J_01 with its sign flipped
    let exact = verify_structure_constants_with(n, |g| {
        let j = realize_generator(n, g.mu, g.nu).expect("valid generator");
        if g == (Gen { mu: 0, nu: 1 }) {
            let flip =
                crate::exact_poisson::ParamPoly::x(0) * crate::exact_poisson::ParamPoly::p(1);
            j - flip.clone() - flip
        } else {
            j
        }
    })?;
    out.push(exact_report(&exact, "").with_id("control.sign_flip.exact"));

    let j01 = generator_polar(spec, 0, 1)?;
    let j12 = generator_polar(spec, 1, 2)?;
    out.push(check_involution(&[j01, j12], &pts, BRACKET_TOL).with_id("control.noncommuting_pair"));

    let b = random_betas(n, cfg.seed, 0.5, 1.0);
    let h = kinetic(spec)
        .plus(&potential_general(spec, RadialFn::Kepler { k: b.k }, &b)?)
        .renamed("H_GKC1_beta1");
    let l1 = integral_l(spec, 1, &b.clone().with(1, 0.0))?;
    out.push(check_commutes(&h, &l1, &pts, BRACKET_TOL).with_id("control.forbidden_beta"));

    let t = kinetic(spec);
    let mut set: Vec<Observable> = both_chains(n)
        .into_iter()
        .map(|c| integral_j(spec, c))
        .collect::<Result<_>>()?;
    set.push(t.clone());
    set.push(t);
    out.push(check_independence(&set, &pts, RANK_TOL).with_id("control.duplicate"));

    for r in &mut out {
        r.proposition = "control".into();
        r.paper_ref = "negative control".into();
        r.seed = cfg.seed;
    }
    Ok(out)
}

/// Verifies that the sampled points map onto the ambient quadric and that
/// the chart is regular there (a sanity pass over [`sample_points`]).
pub fn sample_sanity(spec: &SpaceSpec, pts: &[PhasePoint<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for z in pts {
        let x = crate::geometry::polar_to_ambient(spec, &z.coords());
        worst = worst.max(crate::geometry::constraint_residual(spec, &x).abs());
        polar_velocities(spec, z)?;
    }
    Ok(worst)
}

/// The first integrals established for `system`: both chains plus the
/// extra ones (translation generators, `I_0μ`, `L_i`).
pub fn certified_integrals(
    spec: &SpaceSpec,
    system: SystemKind,
    b: &Betas,
) -> Result<Vec<Observable>> {
    let n = spec.dim;
    let chains = both_chains(n);
    let mut out = match system {
        SystemKind::Free => chains
            .into_iter()
            .map(|c| integral_j(spec, c))
            .collect::<Result<Vec<_>>>()?,
        _ => chain_q(spec, b, &chains)?,
    };
    match system {
        SystemKind::Free => {
            for j in 1..=n {
                out.push(generator_polar(spec, 0, j)?);
            }
        }
        SystemKind::Central(_) => {}
        SystemKind::SW => {
            for j in 1..=n {
                out.push(integral_i(spec, b, 0, j)?);
            }
        }
        SystemKind::GKC(i) => out.push(integral_l(spec, i, b)?),
        SystemKind::KC => {
            for i in 1..=n {
                out.push(integral_l(spec, i, b)?);
            }
        }
    }
    Ok(out)
}

/// System label used in reports for a proposition.
pub fn system_of(prop: u8) -> &'static str {
    match prop {
        1 | 2 => "free",
        3 => "central",
        4 => "sw",
        5 | 6 => "gkc",
        7 => "kc",
        _ => "unknown",
    }
}

/// Runs the given propositions in order and assembles the report.
pub fn verify(
    spec: &SpaceSpec,
    props: &[u8],
    b: &Betas,
    cfg: &SampleConfig,
    opts: &RunOptions,
) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for &p in props {
        checks.extend(run_proposition_with(spec, p, b, cfg, opts)?);
    }
    let system = match props {
        [p] => system_of(*p).to_string(),
        _ => "all".to_string(),
    };
    Ok(SuiteReport::new(spec, system, checks))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecSummary {
    pub dim: usize,
    pub k1: f64,
    pub k2: f64,
}

/// The document written by `curvint verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub version: String,
    pub spec: SpecSummary,
    pub system: String,
    pub rng: String,
    pub checks: Vec<VerificationReport>,
    pub overall_pass: bool,
}

impl SuiteReport {
    pub fn new(
        spec: &SpaceSpec,
        system: impl Into<String>,
        checks: Vec<VerificationReport>,
    ) -> Self {
        let overall_pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        SuiteReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            spec: SpecSummary {
                dim: spec.dim,
                k1: spec.k1(),
                k2: spec.k2(),
            },
            system: system.into(),
            rng: RNG_ALGORITHM.to_string(),
            checks,
            overall_pass,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("reports contain only finite numbers");
        s.push('\n');
        s
    }
}
