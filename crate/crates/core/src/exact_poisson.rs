//! Exact certificates over ℚ[κ1, κ2, x, p].
//!
//! [`ParamPoly`] is a sparse polynomial in the two contraction parameters and
//! the ambient phase-space variables with arbitrary-precision rational
//! coefficients. The ambient generators and the Casimir are polynomials, so
//! their brackets can be checked identically in κ1, κ2 rather than at
//! sampled parameter values.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{bracket, casimir_coefficient, generators, step_coefficient, Gen};
use crate::error::{Error, Result};
use crate::geometry::{metric_diagonal, rep_matrix_in, RepMatrix};

/// Largest N the fixed-width exponent vectors can hold.
pub const MAX_DIM: usize = 8;
const NX: usize = MAX_DIM + 1;
const NV: usize = 2 + 2 * NX;

type Monomial = [u8; NV];

/// A polynomial variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    K1,
    K2,
    X(usize),
    P(usize),
}

impl Var {
    fn slot(self) -> usize {
        match self {
            Var::K1 => 0,
            Var::K2 => 1,
            Var::X(i) => {
                assert!(i < NX, "x index {i} exceeds MAX_DIM");
                2 + i
            }
            Var::P(i) => {
                assert!(i < NX, "p index {i} exceeds MAX_DIM");
                2 + NX + i
            }
        }
    }

    fn name(slot: usize) -> String {
        match slot {
            0 => "k1".into(),
            1 => "k2".into(),
            s if s < 2 + NX => format!("x{}", s - 2),
            s => format!("p{}", s - 2 - NX),
        }
    }
}

/// Sparse polynomial with exact rational coefficients. No zero coefficient
/// is ever stored, so structural equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamPoly {
    terms: HashMap<Monomial, BigRational>,
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl ParamPoly {
    pub fn constant(c: BigRational) -> Self {
        let mut p = ParamPoly::default();
        p.add_term([0; NV], c);
        p
    }

    pub fn integer(c: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(v: Var) -> Self {
        let mut m = [0; NV];
        m[v.slot()] = 1;
        let mut p = ParamPoly::default();
        p.add_term(m, BigRational::one());
        p
    }

    pub fn x(i: usize) -> Self {
        Self::var(Var::X(i))
    }

    pub fn p(i: usize) -> Self {
        Self::var(Var::P(i))
    }

    pub fn k1() -> Self {
        Self::var(Var::K1)
    }

    pub fn k2() -> Self {
        Self::var(Var::K2)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return ParamPoly::default();
        }
        ParamPoly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Coefficient of the monomial with the given variable powers.
    pub fn coefficient(&self, powers: &[(Var, u8)]) -> BigRational {
        let mut m = [0; NV];
        for &(v, e) in powers {
            m[v.slot()] += e;
        }
        self.terms
            .get(&m)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn derivative(&self, v: Var) -> Self {
        let slot = v.slot();
        let mut out = ParamPoly::default();
        for (m, c) in &self.terms {
            let e = m[slot];
            if e == 0 {
                continue;
            }
            let mut m2 = *m;
            m2[slot] -= 1;
            out.add_term(m2, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Total degree in the phase-space variables (κ's excluded).
    pub fn phase_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m[2..].iter().map(|&e| u32::from(e)).sum())
            .max()
            .unwrap_or(0)
    }

    /// Highest ambient index carrying a nonzero exponent, if any.
    fn max_index(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| (0..NX).rev().find(|&i| m[2 + i] > 0 || m[2 + NX + i] > 0))
            .max()
    }

    /// Replaces κ1, κ2 by rational values.
    pub fn substitute_kappa(&self, k1: &BigRational, k2: &BigRational) -> Self {
        let mut out = ParamPoly::default();
        for (m, c) in &self.terms {
            let mut m2 = *m;
            m2[0] = 0;
            m2[1] = 0;
            let f = pow(k1, m[0]) * pow(k2, m[1]);
            out.add_term(m2, c * f);
        }
        out
    }

    /// Terms in graded-lexicographic order (highest total degree first,
    /// ties broken by exponent vector in variable order `k1 k2 x0.. p0..`).
    fn sorted_terms(&self) -> Vec<(&Monomial, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex(b.0, a.0));
        v
    }
}

fn pow(b: &BigRational, e: u8) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}

fn grlex(a: &Monomial, b: &Monomial) -> Ordering {
    let da: u32 = a.iter().map(|&e| u32::from(e)).sum();
    let db: u32 = b.iter().map(|&e| u32::from(e)).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl fmt::Display for ParamPoly {
    /// One term per line: `coeff * k1^a k2^b * x0^e0 ... pN^fN`, listing
    /// only the variables that occur.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "0");
        }
        for (m, c) in self.sorted_terms() {
            let group = |range: std::ops::Range<usize>| {
                let parts: Vec<String> = range
                    .filter(|&s| m[s] > 0)
                    .map(|s| format!("{}^{}", Var::name(s), m[s]))
                    .collect();
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join(" ")
                }
            };
            writeln!(f, "{} * {} * {}", c, group(0..2), group(2..NV))?;
        }
        Ok(())
    }
}

impl Zero for ParamPoly {
    fn zero() -> Self {
        ParamPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ParamPoly {
    fn one() -> Self {
        ParamPoly::integer(1)
    }
}

impl Add for ParamPoly {
    type Output = ParamPoly;
    fn add(mut self, o: ParamPoly) -> ParamPoly {
        for (m, c) in o.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for ParamPoly {
    type Output = ParamPoly;
    fn sub(self, o: ParamPoly) -> ParamPoly {
        self + (-o)
    }
}

impl Neg for ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Mul for ParamPoly {
    type Output = ParamPoly;
    fn mul(self, o: ParamPoly) -> ParamPoly {
        &self * &o
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, o: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let mut m = *ma;
                for (e, &eb) in m.iter_mut().zip(mb) {
                    *e += eb;
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

/// `Σ_μ (∂f/∂x_μ ∂g/∂p_μ − ∂g/∂x_μ ∂f/∂p_μ)`.
pub fn poly_bracket(f: &ParamPoly, g: &ParamPoly) -> ParamPoly {
    let top = match (f.max_index(), g.max_index()) {
        (Some(a), Some(b)) => a.max(b),
        _ => return ParamPoly::zero(),
    };
    let mut out = ParamPoly::zero();
    for mu in 0..=top {
        let fx = f.derivative(Var::X(mu));
        let gp = g.derivative(Var::P(mu));
        let gx = g.derivative(Var::X(mu));
        let fp = f.derivative(Var::P(mu));
        out = out + &fx * &gp - &gx * &fp;
    }
    out
}

fn check_dim(dim: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(Error::IndexRange {
            index: dim,
            min: 2,
            max: MAX_DIM,
        });
    }
    Ok(())
}

/// `J_{μν} = x_μ p_ν − c_{μν} x_ν p_μ` with `c_{μν}` a κ-monomial.
pub fn realize_generator(dim: usize, mu: usize, nu: usize) -> Result<ParamPoly> {
    check_dim(dim)?;
    let g = Gen::new(mu, nu)?.check_dim(dim)?;
    let c = step_coefficient(g.mu, g.nu).eval_in(&ParamPoly::k1(), &ParamPoly::k2());
    Ok(ParamPoly::x(mu) * ParamPoly::p(nu) - c * ParamPoly::x(nu) * ParamPoly::p(mu))
}

/// `C = κ2 J01² + Σ_j J0j² + κ1 Σ_j J1j² + κ1κ2 Σ_{2≤i<j} Jij²`.
pub fn casimir_poly(dim: usize) -> Result<ParamPoly> {
    check_dim(dim)?;
    let mut c = ParamPoly::zero();
    for g in generators(dim) {
        let j = realize_generator(dim, g.mu, g.nu)?;
        let coeff = casimir_coefficient(g).eval_in(&ParamPoly::k1(), &ParamPoly::k2());
        c = c + &coeff * &(&j * &j);
    }
    Ok(c)
}

/// What a failed identity was about.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureSubject {
    Bracket { a: String, b: String },
    Casimir { generator: String },
    Metric { generator: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketFailure {
    pub subject: FailureSubject,
    /// Nonzero residual polynomial, in the golden-file format.
    pub residual: String,
    /// Largest coefficient magnitude of the residual.
    pub max_coefficient: f64,
}

/// Outcome of an exact certificate run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketReport {
    pub dim: usize,
    pub pairs_checked: usize,
    pub failures: Vec<BracketFailure>,
}

impl BracketReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    /// Golden-file text: a header line, then each failing residual.
    pub fn golden(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# dim={} pairs_checked={} failures={}",
            self.dim,
            self.pairs_checked,
            self.failures.len()
        );
        for f in &self.failures {
            let _ = writeln!(s, "## {:?}", f.subject);
            s.push_str(&f.residual);
        }
        s
    }
}

fn expected_bracket<T>(a: Gen, b: Gen, k1: &T, k2: &T, realize: impl Fn(Gen) -> T) -> T
where
    T: Clone + Zero + One + Neg<Output = T> + Mul<Output = T>,
{
    match bracket(a, b) {
        None => T::zero(),
        Some((c, g)) => c.eval_in(k1, k2) * realize(g),
    }
}

/// Checks every bracket of a realization against the structure constants,
/// in both orders. `pairs_checked` counts unordered pairs.
pub fn verify_structure_constants_with(
    dim: usize,
    realize: impl Fn(Gen) -> ParamPoly,
) -> Result<BracketReport> {
    check_dim(dim)?;
    let gens = generators(dim);
    let (k1, k2) = (ParamPoly::k1(), ParamPoly::k2());
    let polys: HashMap<Gen, ParamPoly> = gens.iter().map(|&g| (g, realize(g))).collect();
    let lookup = |g: Gen| polys[&g].clone();
    let mut failures = Vec::new();
    let mut pairs = 0;
    for (ia, &a) in gens.iter().enumerate() {
        for &b in &gens[ia + 1..] {
            pairs += 1;
            for (x, y) in [(a, b), (b, a)] {
                let lhs = poly_bracket(&polys[&x], &polys[&y]);
                let residual = lhs - expected_bracket(x, y, &k1, &k2, lookup);
                if !residual.is_zero() {
                    failures.push(BracketFailure {
                        subject: FailureSubject::Bracket {
                            a: x.to_string(),
                            b: y.to_string(),
                        },
                        residual: residual.to_string(),
                        max_coefficient: max_abs_coefficient(&residual),
                    });
                }
            }
        }
    }
    Ok(BracketReport {
        dim,
        pairs_checked: pairs,
        failures,
    })
}

/// Exact certificate that the ambient generators close on the
/// so_{κ1,κ2}(N+1) structure constants, identically in κ1, κ2.
pub fn verify_structure_constants(dim: usize) -> Result<BracketReport> {
    check_dim(dim)?;
    verify_structure_constants_with(dim, |g| {
        realize_generator(dim, g.mu, g.nu).expect("generator indices come from generators(dim)")
    })
}

/// Exact certificate that `{C, J_{μν}} = 0` for every generator.
pub fn verify_casimir(dim: usize) -> Result<BracketReport> {
    let c = casimir_poly(dim)?;
    let mut failures = Vec::new();
    let gens = generators(dim);
    for &g in &gens {
        let r = poly_bracket(&c, &realize_generator(dim, g.mu, g.nu)?);
        if !r.is_zero() {
            failures.push(BracketFailure {
                subject: FailureSubject::Casimir {
                    generator: g.to_string(),
                },
                residual: r.to_string(),
                max_coefficient: max_abs_coefficient(&r),
            });
        }
    }
    Ok(BracketReport {
        dim,
        pairs_checked: gens.len(),
        failures,
    })
}

/// Matrix commutators of the vector representation against the structure
/// constants, plus `Xᵀ I_κ + I_κ X = 0` for each generator, exactly.
pub fn verify_vector_rep(dim: usize) -> Result<BracketReport> {
    check_dim(dim)?;
    let (k1, k2) = (ParamPoly::k1(), ParamPoly::k2());
    let gens = generators(dim);
    let mats: HashMap<Gen, RepMatrix<ParamPoly>> = gens
        .iter()
        .map(|&g| Ok((g, rep_matrix_in(dim, &k1, &k2, g)?)))
        .collect::<Result<_>>()?;
    let diag = metric_diagonal(dim, &k1, &k2);
    let mut failures = Vec::new();
    for &g in &gens {
        if let Some(entry) = first_nonzero(&mats[&g].metric_defect(&diag)) {
            failures.push(BracketFailure {
                subject: FailureSubject::Metric {
                    generator: g.to_string(),
                },
                residual: entry.to_string(),
                max_coefficient: max_abs_coefficient(&entry),
            });
        }
    }
    let mut pairs = 0;
    for (ia, &a) in gens.iter().enumerate() {
        for &b in &gens[ia + 1..] {
            pairs += 1;
            for (x, y) in [(a, b), (b, a)] {
                let expected = match bracket(x, y) {
                    None => RepMatrix::zeros(dim + 1),
                    Some((c, g)) => mats[&g].scaled(&c.eval_in(&k1, &k2)),
                };
                let residual = mats[&x].commutator(&mats[&y]).sub(&expected);
                if let Some(entry) = first_nonzero(&residual) {
                    failures.push(BracketFailure {
                        subject: FailureSubject::Bracket {
                            a: x.to_string(),
                            b: y.to_string(),
                        },
                        residual: entry.to_string(),
                        max_coefficient: max_abs_coefficient(&entry),
                    });
                }
            }
        }
    }
    Ok(BracketReport {
        dim,
        pairs_checked: pairs,
        failures,
    })
}

/// Whether `X` satisfies `Xᵀ I_κ + I_κ X = 0` identically in κ1, κ2.
pub fn preserves_metric(m: &RepMatrix<ParamPoly>) -> bool {
    let dim = m.size() - 1;
    let diag = metric_diagonal(dim, &ParamPoly::k1(), &ParamPoly::k2());
    m.metric_defect(&diag).is_zero()
}

fn first_nonzero(m: &RepMatrix<ParamPoly>) -> Option<ParamPoly> {
    let n = m.size();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j))
        .find(|v| !v.is_zero())
        .cloned()
}

/// Largest absolute coefficient, as an f64 summary of a residual.
pub fn max_abs_coefficient(p: &ParamPoly) -> f64 {
    use num_traits::ToPrimitive;
    p.terms
        .values()
        .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(mu: usize, nu: usize) -> Gen {
        Gen::new(mu, nu).unwrap()
    }

    #[test]
    fn canonical_pair_and_self_bracket() {
        for mu in 0..4 {
            assert_eq!(
                poly_bracket(&ParamPoly::x(mu), &ParamPoly::p(mu)),
                ParamPoly::one()
            );
            assert!(poly_bracket(&ParamPoly::x(mu), &ParamPoly::p(mu + 1)).is_zero());
        }
        let j = realize_generator(4, 1, 3).unwrap();
        assert!(poly_bracket(&j, &j).is_zero());
    }

    #[test]
    fn generator_shapes() {
        let j01 = realize_generator(3, 0, 1).unwrap();
        assert_eq!(j01.len(), 2);
        assert_eq!(
            j01.coefficient(&[(Var::X(0), 1), (Var::P(1), 1)]),
            rational(1, 1)
        );
        assert_eq!(
            j01.coefficient(&[(Var::K1, 1), (Var::X(1), 1), (Var::P(0), 1)]),
            rational(-1, 1)
        );
        let j23 = realize_generator(3, 2, 3).unwrap();
        assert_eq!(
            j23,
            ParamPoly::x(2) * ParamPoly::p(3) - ParamPoly::x(3) * ParamPoly::p(2)
        );
        let j02 = realize_generator(3, 0, 2).unwrap();
        assert_eq!(
            j02.coefficient(&[(Var::K1, 1), (Var::K2, 1), (Var::X(2), 1), (Var::P(0), 1)]),
            rational(-1, 1)
        );
        assert!(matches!(
            realize_generator(3, 2, 1),
            Err(Error::IndexOrder { .. })
        ));
    }

    #[test]
    fn hand_expanded_brackets() {
        let n = 4;
        let j = |a, b| realize_generator(n, a, b).unwrap();
        // {J0j, Jjk} = −J0k
        assert_eq!(poly_bracket(&j(0, 2), &j(2, 3)), -j(0, 3));
        // {J01, J0k} = κ1 J1k
        assert_eq!(poly_bracket(&j(0, 1), &j(0, 3)), ParamPoly::k1() * j(1, 3));
        // {J12, J13} = κ2 J23
        assert_eq!(poly_bracket(&j(1, 2), &j(1, 3)), ParamPoly::k2() * j(2, 3));
    }

    #[test]
    fn structure_constants_small() {
        let r = verify_structure_constants(2).unwrap();
        assert!(r.pass());
        assert_eq!(r.pairs_checked, 3);
        let r = verify_structure_constants(4).unwrap();
        assert!(r.pass(), "{}", r.golden());
        assert_eq!(r.pairs_checked, 45);
    }

    #[test]
    fn sign_flip_is_detected() {
        let dim = 3;
        let r = verify_structure_constants_with(dim, |gen| {
            let mut p = realize_generator(dim, gen.mu, gen.nu).unwrap();
            if gen == g(1, 2) {
                // flip the sign of the x2 p1 term only
                let m = ParamPoly::k2() * ParamPoly::x(2) * ParamPoly::p(1);
                p = p + m.scaled(&rational(2, 1));
            }
            p
        })
        .unwrap();
        assert!(!r.pass());
    }

    #[test]
    fn casimir_examples() {
        let c = casimir_poly(2).unwrap();
        let j = |a, b| realize_generator(2, a, b).unwrap();
        let expected = ParamPoly::k2() * j(0, 1) * j(0, 1)
            + j(0, 2) * j(0, 2)
            + ParamPoly::k1() * j(1, 2) * j(1, 2);
        assert_eq!(c, expected);
        assert_eq!(casimir_poly(3).unwrap().phase_degree(), 4);
        assert!(verify_casimir(3).unwrap().pass());
    }

    #[test]
    fn vector_rep() {
        let r = verify_vector_rep(3).unwrap();
        assert!(r.pass(), "{}", r.golden());
        let (k1, k2) = (ParamPoly::k1(), ParamPoly::k2());
        let m = |a, b| rep_matrix_in(3, &k1, &k2, g(a, b)).unwrap();
        assert_eq!(m(0, 1).commutator(&m(0, 3)), m(1, 3).scaled(&k1));
        assert!(!preserves_metric(&RepMatrix::identity(4)));
        assert!(preserves_metric(&m(0, 2)));
    }

    #[test]
    fn golden_format() {
        let p = ParamPoly::k1() * ParamPoly::x(1) * ParamPoly::p(0)
            - ParamPoly::x(0) * ParamPoly::p(1).scaled(&rational(3, 2))
            + ParamPoly::integer(2);
        assert_eq!(
            p.to_string(),
            "1 * k1^1 * x1^1 p0^1\n-3/2 * 1 * x0^1 p1^1\n2 * 1 * 1\n"
        );
        assert_eq!(ParamPoly::zero().to_string(), "0\n");
    }

    #[test]
    fn substitution() {
        let p = ParamPoly::k1() * ParamPoly::k2() * ParamPoly::k2() * ParamPoly::x(2);
        let s = p.substitute_kappa(&rational(-1, 2), &rational(3, 1));
        assert_eq!(s, ParamPoly::x(2).scaled(&rational(-9, 2)));
    }

    fn arb_poly() -> impl Strategy<Value = ParamPoly> {
        // up to 4 terms of degree ≤ 2 in (x0..x3, p0..p3), κ-degree ≤ 2
        let term = (-5i64..=5, 1i64..=3, 0u8..=2, 0u8..=2, 0usize..8, 0usize..9);
        proptest::collection::vec(term, 1..5).prop_map(|ts| {
            let mut p = ParamPoly::zero();
            for (num, den, a, b, v1, v2) in ts {
                let mut t = ParamPoly::constant(rational(num, den));
                for _ in 0..a {
                    t = t * ParamPoly::k1();
                }
                for _ in 0..b {
                    t = t * ParamPoly::k2();
                }
                let var = |v: usize| {
                    if v < 4 {
                        ParamPoly::x(v)
                    } else {
                        ParamPoly::p(v - 4)
                    }
                };
                t = t * var(v1);
                if v2 < 8 {
                    t = t * var(v2);
                }
                p = p + t;
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn antisymmetry(f in arb_poly(), g in arb_poly()) {
            prop_assert!((poly_bracket(&f, &g) + poly_bracket(&g, &f)).is_zero());
        }

        #[test]
        fn jacobi(f in arb_poly(), g in arb_poly(), h in arb_poly()) {
            let j = poly_bracket(&f, &poly_bracket(&g, &h))
                + poly_bracket(&g, &poly_bracket(&h, &f))
                + poly_bracket(&h, &poly_bracket(&f, &g));
            prop_assert!(j.is_zero());
        }

        #[test]
        fn substitution_commutes_with_bracket(
            f in arb_poly(), g in arb_poly(),
            a in -4i64..=4, b in 1i64..=3, c in -4i64..=4, d in 1i64..=3,
        ) {
            let (k1, k2) = (rational(a, b), rational(c, d));
            let lhs = poly_bracket(&f, &g).substitute_kappa(&k1, &k2);
            let rhs = poly_bracket(&f.substitute_kappa(&k1, &k2), &g.substitute_kappa(&k1, &k2));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
