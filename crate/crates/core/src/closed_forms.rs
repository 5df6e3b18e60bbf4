//! The classical product families: Hermite, Laguerre, Jacobi and the
//! Jacobi specializations Gegenbauer, Chebyshev (both kinds) and Legendre.
//!
//! Closed-form Jacobi sequences are generated from the Jacobi master formula
//! by parameter substitution. The separately stated Gegenbauer, Chebyshev
//! and Legendre formulas are kept as literal cross-checks; two of them
//! disagree with the master formula and the pipeline (see
//! [`specialization_report`]).

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cap_operators::CapOperatorSet;
use crate::error::{Error, Result};
use crate::jacobi_sequences::{compute, JacobiSequencePair};
use crate::linalg::QMatrix;
use crate::moments::MomentFunctional;
use crate::multiindex::{enumerate_classes, MultiIndex};
use crate::orthodecomp::decompose;
use crate::polyring::{monomial_basis, Polynomial};
use crate::rational::{format_q, q, qf, Q};
use crate::symbolic::{factorial_q, Symbolic};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Hermite,
    Laguerre { alpha: Vec<Q> },
    Jacobi { a: Vec<Q>, b: Vec<Q> },
    Gegenbauer { lambda: Vec<Q> },
    Chebyshev1,
    Chebyshev2,
    Legendre,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    family: Family,
    d: usize,
}

fn above(name: &str, v: &[Q], bound: &Q) -> Result<()> {
    match v.iter().find(|x| *x <= bound) {
        Some(bad) => Err(Error::UnsupportedParameter(format!(
            "{name} = {} must be greater than {}",
            format_q(bad),
            format_q(bound)
        ))),
        None => Ok(()),
    }
}

fn nonzero_d(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidDimension)
    } else {
        Ok(())
    }
}

impl FamilySpec {
    pub fn hermite(d: usize) -> Result<Self> {
        nonzero_d(d)?;
        Ok(FamilySpec { family: Family::Hermite, d })
    }

    pub fn laguerre(alpha: Vec<Q>) -> Result<Self> {
        nonzero_d(alpha.len())?;
        above("alpha", &alpha, &q(-1))?;
        Ok(FamilySpec { d: alpha.len(), family: Family::Laguerre { alpha } })
    }

    pub fn jacobi(a: Vec<Q>, b: Vec<Q>) -> Result<Self> {
        nonzero_d(a.len())?;
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        above("a", &a, &q(-1))?;
        above("b", &b, &q(-1))?;
        Ok(FamilySpec { d: a.len(), family: Family::Jacobi { a, b } })
    }

    pub fn gegenbauer(lambda: Vec<Q>) -> Result<Self> {
        nonzero_d(lambda.len())?;
        above("lambda", &lambda, &qf(-1, 2))?;
        Ok(FamilySpec { d: lambda.len(), family: Family::Gegenbauer { lambda } })
    }

    pub fn chebyshev1(d: usize) -> Result<Self> {
        nonzero_d(d)?;
        Ok(FamilySpec { family: Family::Chebyshev1, d })
    }

    pub fn chebyshev2(d: usize) -> Result<Self> {
        nonzero_d(d)?;
        Ok(FamilySpec { family: Family::Chebyshev2, d })
    }

    pub fn legendre(d: usize) -> Result<Self> {
        nonzero_d(d)?;
        Ok(FamilySpec { family: Family::Legendre, d })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Hermite => "hermite",
            Family::Laguerre { .. } => "laguerre",
            Family::Jacobi { .. } => "jacobi",
            Family::Gegenbauer { .. } => "gegenbauer",
            Family::Chebyshev1 => "chebyshev1",
            Family::Chebyshev2 => "chebyshev2",
            Family::Legendre => "legendre",
        }
    }

    /// Gegenbauer parameters, for the families that are Gegenbauer cases.
    pub fn lambda(&self) -> Option<Vec<Q>> {
        match &self.family {
            Family::Gegenbauer { lambda } => Some(lambda.clone()),
            Family::Chebyshev1 => Some(vec![q(0); self.d]),
            Family::Chebyshev2 => Some(vec![q(1); self.d]),
            Family::Legendre => Some(vec![qf(1, 2); self.d]),
            _ => None,
        }
    }

    /// `(a, b)` for every family living on the cube.
    pub fn jacobi_params(&self) -> Option<(Vec<Q>, Vec<Q>)> {
        match &self.family {
            Family::Jacobi { a, b } => Some((a.clone(), b.clone())),
            _ => self.lambda().map(|l| {
                let a: Vec<Q> = l.iter().map(|x| x - qf(1, 2)).collect();
                (a.clone(), a)
            }),
        }
    }

    /// The normalized orthogonality functional of the family.
    pub fn functional(&self) -> Result<MomentFunctional> {
        match &self.family {
            Family::Hermite => MomentFunctional::gaussian(self.d),
            Family::Laguerre { alpha } => MomentFunctional::gamma(alpha.clone()),
            _ => {
                let (a, b) = self.jacobi_params().expect("cube family");
                MomentFunctional::beta(a, b)
            }
        }
    }

    pub fn mass_factor(&self) -> Result<Symbolic> {
        self.functional()?.mass_factor()
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Q]| v.iter().map(format_q).collect::<Vec<_>>().join(",");
        match &self.family {
            Family::Laguerre { alpha } => write!(f, "laguerre(alpha={})", list(alpha)),
            Family::Jacobi { a, b } => write!(f, "jacobi(a={}; b={})", list(a), list(b)),
            Family::Gegenbauer { lambda } => write!(f, "gegenbauer(lambda={})", list(lambda)),
            _ => write!(f, "{}(d={})", self.name(), self.d),
        }
    }
}

// ---- one-variable pieces -------------------------------------------------

fn poly_axpy(acc: &mut Vec<Q>, c: &Q, p: &[Q], shift: usize) {
    if acc.len() < p.len() + shift {
        acc.resize(p.len() + shift, Q::zero());
    }
    for (i, v) in p.iter().enumerate() {
        acc[i + shift] += c * v;
    }
}

/// Three-term recurrence `P_{k+1} = (A_k x + B_k) P_k - C_k P_{k-1}`.
fn by_recurrence(n: usize, p1: Vec<Q>, step: impl Fn(usize) -> (Q, Q, Q)) -> Vec<Q> {
    let mut prev = vec![Q::one()];
    if n == 0 {
        return prev;
    }
    let mut cur = p1;
    for k in 1..n {
        let (a, b, c) = step(k);
        let mut next = Vec::new();
        poly_axpy(&mut next, &a, &cur, 1);
        poly_axpy(&mut next, &b, &cur, 0);
        poly_axpy(&mut next, &(-c), &prev, 0);
        prev = cur;
        cur = next;
    }
    cur
}

fn hermite_1d(n: usize) -> Vec<Q> {
    // H_{k+1} = 2x H_k - 2k H_{k-1}
    by_recurrence(n, vec![q(0), q(2)], |k| (q(2), q(0), q(2 * k as i64)))
}

fn laguerre_1d(alpha: &Q, n: usize) -> Vec<Q> {
    // (k+1) L_{k+1} = (2k+alpha+1-x) L_k - (k+alpha) L_{k-1}
    by_recurrence(n, vec![alpha + q(1), q(-1)], |k| {
        let k1 = q(k as i64 + 1);
        (q(-1) / &k1, (q(2 * k as i64 + 1) + alpha) / &k1, (q(k as i64) + alpha) / &k1)
    })
}

fn jacobi_1d(a: &Q, b: &Q, n: usize) -> Vec<Q> {
    let s = a + b;
    let p1 = vec![(a - b) / q(2), (&s + q(2)) / q(2)];
    by_recurrence(n, p1, |k| {
        let kq = q(k as i64);
        let t = q(2) * &kq + &s;
        let den = q(2) * (&kq + q(1)) * (&kq + &s + q(1)) * &t;
        let lead = (&t + q(1)) * (&t + q(2)) * &t / &den;
        let cst = (&t + q(1)) * (a * a - b * b) / &den;
        let back = q(2) * (&kq + a) * (&kq + b) * (&t + q(2)) / &den;
        (lead, cst, back)
    })
}

/// `k_p / k_{p+1}` for Jacobi leading coefficients; at `p = 0, a + b = -1`
/// the literal quotient is `0/0` and its limit `2/(a+b+2)` is used.
fn jacobi_creation_ratio(p: usize, s: &Q) -> Q {
    let pq = q(p as i64);
    if p == 0 && *s == q(-1) {
        return q(2) / (s + q(2));
    }
    q(2) * (&pq + q(1)) * (s + &pq + q(1)) / ((q(2) * &pq + s + q(1)) * (q(2) * &pq + s + q(2)))
}

fn univariate(spec: &FamilySpec, coord: usize, n: usize) -> Vec<Q> {
    match &spec.family {
        Family::Hermite => hermite_1d(n),
        Family::Laguerre { alpha } => laguerre_1d(&alpha[coord], n),
        _ => {
            let (a, b) = spec.jacobi_params().expect("cube family");
            jacobi_1d(&a[coord], &b[coord], n)
        }
    }
}

/// Tensor-product family polynomial with classical normalization.
pub fn family_polynomial(spec: &FamilySpec, alpha: &MultiIndex) -> Result<Polynomial> {
    if alpha.d() != spec.d {
        return Err(Error::DimensionMismatch { expected: spec.d, got: alpha.d() });
    }
    let mut p = Polynomial::one(spec.d);
    for (i, &k) in alpha.entries().iter().enumerate() {
        p = p.mul(&Polynomial::embed_univariate(&univariate(spec, i, k as usize), spec.d, i))?;
    }
    Ok(p)
}

fn norm_1d(spec: &FamilySpec, coord: usize, n: usize) -> Result<Symbolic> {
    let nq = q(n as i64);
    match &spec.family {
        Family::Hermite => Ok(Symbolic::pi_pow(qf(1, 2))
            .scale(&(factorial_q(n as u64) * Q::from_integer(num_traits::pow(2.into(), n))))),
        Family::Laguerre { alpha } => {
            Ok(Symbolic::gamma(&(&alpha[coord] + &nq + q(1)))?.scale(&factorial_q(n as u64).recip()))
        }
        _ => {
            let (a, b) = spec.jacobi_params().expect("cube family");
            let (a, b) = (&a[coord], &b[coord]);
            let s = a + b;
            let num = Symbolic::two_pow(&(&s + q(1)))
                .mul(&Symbolic::gamma(&(&nq + a + q(1)))?)
                .mul(&Symbolic::gamma(&(&nq + b + q(1)))?);
            if n == 0 {
                return num.div(&Symbolic::gamma(&(&s + q(2)))?);
            }
            num.div(
                &Symbolic::gamma(&(&nq + &s + q(1)))?
                    .scale(&(factorial_q(n as u64) * (q(2) * &nq + &s + q(1)))),
            )
        }
    }
}

/// `||F_alpha||^2` against the unnormalized weight.
pub fn family_norm_squared(spec: &FamilySpec, alpha: &MultiIndex) -> Result<Symbolic> {
    if alpha.d() != spec.d {
        return Err(Error::DimensionMismatch { expected: spec.d, got: alpha.d() });
    }
    alpha
        .entries()
        .iter()
        .enumerate()
        .try_fold(Symbolic::one(), |acc, (i, &k)| Ok(acc.mul(&norm_1d(spec, i, k as usize)?)))
}

/// `(a+_i)^m F_base = factor * F_{base + m e_i}`; returns `(factor, index)`.
/// `i` is one-based.
pub fn creation_power(spec: &FamilySpec, base: &MultiIndex, i: usize, m: usize) -> Result<(Q, MultiIndex)> {
    if i == 0 || i > spec.d {
        return Err(Error::InvalidIndex { index: i, d: spec.d });
    }
    if base.d() != spec.d {
        return Err(Error::DimensionMismatch { expected: spec.d, got: base.d() });
    }
    let k = base.get(i - 1) as usize;
    let factor = match &spec.family {
        Family::Hermite => qf(1, 2).pow(m as i32),
        Family::Laguerre { .. } => {
            let sign = if m.is_multiple_of(2) { q(1) } else { q(-1) };
            (1..=m).fold(sign, |acc, p| acc * q((k + p) as i64))
        }
        _ => {
            let (a, b) = spec.jacobi_params().expect("cube family");
            let s = &a[i - 1] + &b[i - 1];
            (0..m).fold(Q::one(), |acc, p| acc * jacobi_creation_ratio(k + p, &s))
        }
    };
    let mut target = base.clone();
    for _ in 0..m {
        target = target.raised(i - 1);
    }
    Ok((factor, target))
}

// ---- closed-form Jacobi sequences --------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormEntry {
    pub class: MultiIndex,
    /// Against the unnormalized weight.
    pub omega_paper: Symbolic,
    /// `omega_paper / mass_factor`.
    pub omega: Q,
    /// Diagonal `alpha_{e_l|n}` entry for each coordinate `l`.
    pub alpha: Vec<Q>,
    /// A removable singularity of the literal formula was resolved by its
    /// limit for this entry.
    pub limit_used: bool,
}

/// Per-coordinate factor of the Jacobi master formula; `true` when the
/// literal expression is `0/0` (only at `a + b = -1`).
fn jacobi_omega_factor(a: &Q, b: &Q, n: usize) -> Result<(Symbolic, bool)> {
    let s = a + b;
    let nq = q(n as i64);
    let c: Q = (0..n).fold(Q::one(), |acc, p| acc * jacobi_creation_ratio(p, &s));
    let gam = Symbolic::gamma(&(&nq + a + q(1)))?.mul(&Symbolic::gamma(&(&nq + b + q(1)))?);
    let den = if n == 0 {
        // (s+1) Gamma(s+1) = Gamma(s+2), also as s -> -1
        Symbolic::gamma(&(&s + q(2)))?
    } else {
        Symbolic::gamma(&(&nq + &s + q(1)))?.scale(&(q(2) * &nq + &s + q(1)))
    };
    let v = Symbolic::two_pow(&(&s + q(1)))
        .scale(&(&c * &c / factorial_q(n as u64)))
        .mul(&gam)
        .div(&den)?;
    Ok((v, s == q(-1)))
}

/// `-(a^2-b^2)/((2n+a+b)(2n+a+b+2))`, literally; singular at `2n+a+b = 0`.
pub fn jacobi_alpha_literal(a: &Q, b: &Q, n: usize) -> Result<Q> {
    let t = q(2 * n as i64) + a + b;
    if t.is_zero() {
        return Err(Error::SingularParameter(format!(
            "2n+a+b = 0 at n = {n}, a = {}, b = {}",
            format_q(a),
            format_q(b)
        )));
    }
    Ok(-(a * a - b * b) / (&t * (&t + q(2))))
}

/// The same entry with the removable singularity at `n = 0, a + b = 0`
/// replaced by its limit `(b-a)/(a+b+2)` (the mean).
fn jacobi_alpha_entry(a: &Q, b: &Q, n: usize) -> (Q, bool) {
    match jacobi_alpha_literal(a, b, n) {
        Ok(v) => (v, false),
        Err(_) => ((b - a) / (a + b + q(2)), true),
    }
}

pub fn closed_form_entry(spec: &FamilySpec, class: &MultiIndex) -> Result<ClosedFormEntry> {
    if class.d() != spec.d {
        return Err(Error::DimensionMismatch { expected: spec.d, got: class.d() });
    }
    let ns: Vec<usize> = class.entries().iter().map(|&k| k as usize).collect();
    let fact = Q::from_integer(class.factorial());
    let mut limit_used = false;
    let (omega_paper, alpha) = match &spec.family {
        Family::Hermite => {
            let size = ns.iter().sum::<usize>() as i32;
            let v = Symbolic::pi_pow(Q::new((spec.d as i64).into(), 2.into()))
                .scale(&(qf(1, 2).pow(size) * &fact));
            (v, vec![Q::zero(); spec.d])
        }
        Family::Laguerre { alpha } => {
            let mut v = Symbolic::rational(fact);
            let mut al = Vec::new();
            for (n, a) in ns.iter().zip(alpha) {
                v = v.mul(&Symbolic::gamma(&(q(*n as i64) + a + q(1)))?);
                al.push(q(2 * *n as i64) + a + q(1));
            }
            (v, al)
        }
        _ => {
            let (a, b) = spec.jacobi_params().expect("cube family");
            let mut v = Symbolic::one();
            let mut al = Vec::new();
            for ((n, ai), bi) in ns.iter().zip(&a).zip(&b) {
                let (f, lim) = jacobi_omega_factor(ai, bi, *n)?;
                limit_used |= lim;
                v = v.mul(&f);
                let (x, lim) = jacobi_alpha_entry(ai, bi, *n);
                limit_used |= lim;
                al.push(x);
            }
            (v, al)
        }
    };
    let omega = omega_paper
        .div(&spec.mass_factor()?)?
        .as_rational()
        .ok_or_else(|| Error::InternalConsistency("Gamma cores do not cancel against the mass".into()))?;
    Ok(ClosedFormEntry { class: class.clone(), omega_paper, omega, alpha, limit_used })
}

/// Diagonal closed-form data for every class at level `n`.
pub fn closed_form_level(spec: &FamilySpec, n: usize) -> Result<Vec<ClosedFormEntry>> {
    enumerate_classes(spec.d, n)?.classes().iter().map(|c| closed_form_entry(spec, c)).collect()
}

/// Normalized closed-form `Omega_n` (divide-by-mass convention).
pub fn closed_form_omega(spec: &FamilySpec, n: usize) -> Result<QMatrix> {
    let e = closed_form_level(spec, n)?;
    Ok(QMatrix::diagonal(&e.iter().map(|x| x.omega.clone()).collect::<Vec<_>>()))
}

/// Closed-form `alpha_{e_l|n}`, `l` one-based.
pub fn closed_form_alpha(spec: &FamilySpec, n: usize, l: usize) -> Result<QMatrix> {
    if l == 0 || l > spec.d {
        return Err(Error::InvalidIndex { index: l, d: spec.d });
    }
    let e = closed_form_level(spec, n)?;
    Ok(QMatrix::diagonal(&e.iter().map(|x| x.alpha[l - 1].clone()).collect::<Vec<_>>()))
}

// ---- literal specialized formulas ----------------------------------------

/// Gegenbauer formula per coordinate. At `lambda = 0` two factors are
/// `0/0`; their limits (2 and 1) are used and flagged.
fn gegenbauer_stated_factor(l: &Q, n: usize) -> Result<(Symbolic, bool)> {
    let zero = l.is_zero();
    let mut prod = Q::one();
    for p in 0..n {
        let pq = q(p as i64);
        prod *= if p == 0 && zero {
            q(2)
        } else {
            (&pq + q(1)) * (q(2) * l + &pq) / ((&pq + l) * (q(2) * &pq + q(2) * l + q(1)))
        };
    }
    let nq = q(n as i64);
    let g = Symbolic::gamma(&(&nq + l + qf(1, 2)))?;
    let den = if n == 0 && zero {
        Symbolic::one()
    } else {
        Symbolic::gamma(&(&nq + q(2) * l))?.scale(&(q(2) * &nq + q(2) * l))
    };
    let v = Symbolic::two_pow(&(q(2) * l))
        .scale(&(&prod * &prod / factorial_q(n as u64)))
        .mul(&g.mul(&g))
        .div(&den)?;
    Ok((v, zero))
}

fn chebyshev1_stated_factor(n: usize) -> Result<(Symbolic, bool)> {
    if n == 0 {
        // Gamma(1/2)^2 / (0 * Gamma(0)): undefined, routed through the master formula
        return jacobi_omega_factor(&qf(-1, 2), &qf(-1, 2), 0).map(|(v, _)| (v, true));
    }
    let prod: Q = (0..n).fold(Q::one(), |acc, p| acc * qf(p as i64 + 1, 2 * p as i64 + 1));
    let nq = q(n as i64);
    let g = Symbolic::gamma(&(&nq + qf(1, 2)))?;
    let v = g
        .mul(&g)
        .scale(&(&prod * &prod / factorial_q(n as u64)))
        .div(&Symbolic::gamma(&nq)?.scale(&(q(2) * &nq)))?;
    Ok((v, false))
}

fn chebyshev2_stated_factor(n: usize) -> Result<(Symbolic, bool)> {
    let prod: Q = (0..n).fold(Q::one(), |acc, p| acc * qf(p as i64 + 2, 2 * p as i64 + 3));
    let nq = q(n as i64);
    let g = Symbolic::gamma(&(&nq + qf(3, 2)))?;
    let v = g
        .mul(&g)
        .scale(&(q(4) * &prod * &prod / factorial_q(n as u64)))
        .div(&Symbolic::gamma(&(&nq + q(2)))?.scale(&(q(2) * &nq + q(2))))?;
    Ok((v, false))
}

fn legendre_stated_factor(n: usize) -> Result<(Symbolic, bool)> {
    let prod: Q = (0..n).fold(Q::one(), |acc, p| {
        acc * qf((p as i64 + 1) * (p as i64 + 1), 2 * p as i64 + 1)
    });
    let nq = q(n as i64);
    let v = Symbolic::gamma(&(&nq + q(1)))?
        .scale(&(q(2) * &prod * &prod / (factorial_q(n as u64) * (q(2) * &nq + q(1)))));
    Ok((v, false))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatedFormula {
    Gegenbauer,
    Chebyshev1,
    Chebyshev2,
    Legendre,
}

/// The literal paper-convention `Omega` entry of a stated specialized
/// formula; the bool flags a limit or a routing through the master formula.
pub fn stated_omega(which: StatedFormula, lambda: &[Q], class: &MultiIndex) -> Result<(Symbolic, bool)> {
    let mut v = Symbolic::one();
    let mut flagged = false;
    for (i, &k) in class.entries().iter().enumerate() {
        let n = k as usize;
        let (f, fl) = match which {
            StatedFormula::Gegenbauer => gegenbauer_stated_factor(&lambda[i], n)?,
            StatedFormula::Chebyshev1 => chebyshev1_stated_factor(n)?,
            StatedFormula::Chebyshev2 => chebyshev2_stated_factor(n)?,
            StatedFormula::Legendre => legendre_stated_factor(n)?,
        };
        flagged |= fl;
        v = v.mul(&f);
    }
    Ok((v, flagged))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatedComparison {
    pub formula: StatedFormula,
    pub class: Vec<u32>,
    pub master: String,
    pub stated: String,
    pub matches: bool,
    pub flagged: bool,
}

/// Compares the master formula with every stated formula that applies to
/// `spec`, for all classes with level `<= max_level`.
pub fn specialization_report(spec: &FamilySpec, max_level: usize) -> Result<Vec<StatedComparison>> {
    let Some(lambda) = spec.lambda() else {
        return Ok(Vec::new());
    };
    let mut formulas = vec![StatedFormula::Gegenbauer];
    match spec.family {
        Family::Chebyshev1 => formulas.push(StatedFormula::Chebyshev1),
        Family::Chebyshev2 => formulas.push(StatedFormula::Chebyshev2),
        Family::Legendre => formulas.push(StatedFormula::Legendre),
        _ => {}
    }
    let mut out = Vec::new();
    for n in 0..=max_level {
        for e in closed_form_level(spec, n)? {
            for &f in &formulas {
                let (stated, flagged) = stated_omega(f, &lambda, &e.class)?;
                out.push(StatedComparison {
                    formula: f,
                    class: e.class.entries().to_vec(),
                    master: e.omega_paper.to_string(),
                    stated: stated.to_string(),
                    matches: stated == e.omega_paper,
                    flagged,
                });
            }
        }
    }
    Ok(out)
}

// ---- pipeline cross-check -------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassCheck {
    pub class: Vec<u32>,
    pub pipeline_omega: String,
    pub closed_omega: String,
    pub closed_omega_paper: String,
    pub omega_match: bool,
    pub pipeline_alpha: Vec<String>,
    pub closed_alpha: Vec<String>,
    pub alpha_match: bool,
    pub limit_used: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCheck {
    pub n: usize,
    pub omega_diagonal: bool,
    pub alpha_diagonal: bool,
    pub classes: Vec<ClassCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CreationCheck {
    /// One-based coordinate.
    pub coordinate: usize,
    pub base: Vec<u32>,
    pub m: usize,
    pub closed_factor: String,
    /// `None` when the iterated image is not proportional to the target.
    pub pipeline_factor: Option<String>,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub d: usize,
    pub max_level: usize,
    pub mass_factor: String,
    pub pass: bool,
    pub levels: Vec<LevelCheck>,
    pub creation_power: Vec<CreationCheck>,
    /// Master formula against the separately stated specialized formulas;
    /// informational, does not affect `pass`.
    pub stated_formulas: Vec<StatedComparison>,
}

fn off_diagonal_zero(m: &QMatrix) -> bool {
    m.is_diagonal()
}

/// Iterates the pipeline's creation blocks on `F_base` and reads off the
/// scalar relating the image to `F_{base + m e_i}`.
pub fn pipeline_creation_factor(
    spec: &FamilySpec,
    ops: &CapOperatorSet,
    base: &MultiIndex,
    i: usize,
    m: usize,
) -> Result<Option<Q>> {
    let basis = ops.basis();
    let start = base.degree();
    if start + m > ops.levels() {
        return Err(Error::InsufficientDepth { needed: start + m, available: ops.levels() });
    }
    let f = family_polynomial(spec, base)?;
    let mut v = basis.expand(&f)?[start].clone();
    for step in 0..m {
        v = ops.plus[i - 1][start + step].mul_vec(&v);
    }
    let image = basis.block(start + m).combine(&v);
    let (_, target_index) = creation_power(spec, base, i, m)?;
    let target = family_polynomial(spec, &target_index)?;
    let lead = target.coeff(&target_index);
    let ratio = image.coeff(&target_index) / lead;
    Ok((image == target.scale(&ratio)).then_some(ratio))
}

/// Runs the numeric pipeline on the family's functional and compares it
/// exactly with the closed forms.
pub fn verify_family(spec: &FamilySpec, max_level: usize) -> Result<FamilyReport> {
    let f = spec.functional()?;
    let basis = decompose(&f, max_level + 1)?;
    let ops = CapOperatorSet::build(&basis)?;
    let seq = compute(&ops, max_level)?;
    verify_against(spec, &ops, &seq)
}

pub fn verify_against(spec: &FamilySpec, ops: &CapOperatorSet, seq: &JacobiSequencePair) -> Result<FamilyReport> {
    let max_level = seq.alpha_levels().saturating_sub(1);
    let mut pass = true;
    let mut levels = Vec::new();
    for n in 0..=max_level {
        let omega = seq.omega(n);
        let omega_diagonal = off_diagonal_zero(omega);
        let alpha_diagonal = (0..spec.d).all(|j| off_diagonal_zero(seq.alpha(n, j)));
        pass &= omega_diagonal && alpha_diagonal;
        let mut classes = Vec::new();
        for (k, e) in closed_form_level(spec, n)?.into_iter().enumerate() {
            let pipe_alpha: Vec<Q> = (0..spec.d).map(|j| seq.alpha(n, j).get(k, k).clone()).collect();
            let omega_match = omega.get(k, k) == &e.omega;
            let alpha_match = pipe_alpha == e.alpha;
            pass &= omega_match && alpha_match;
            classes.push(ClassCheck {
                class: e.class.entries().to_vec(),
                pipeline_omega: format_q(omega.get(k, k)),
                closed_omega: format_q(&e.omega),
                closed_omega_paper: e.omega_paper.to_string(),
                omega_match,
                pipeline_alpha: pipe_alpha.iter().map(format_q).collect(),
                closed_alpha: e.alpha.iter().map(format_q).collect(),
                alpha_match,
                limit_used: e.limit_used,
            });
        }
        levels.push(LevelCheck { n, omega_diagonal, alpha_diagonal, classes });
    }
    let mut creation = Vec::new();
    for base in monomial_basis(spec.d, max_level.saturating_sub(1))? {
        for i in 1..=spec.d {
            for m in 1..=(max_level - base.degree().min(max_level)) {
                let (closed, _) = creation_power(spec, &base, i, m)?;
                let piped = pipeline_creation_factor(spec, ops, &base, i, m)?;
                let matches = piped.as_ref() == Some(&closed);
                pass &= matches;
                creation.push(CreationCheck {
                    coordinate: i,
                    base: base.entries().to_vec(),
                    m,
                    closed_factor: format_q(&closed),
                    pipeline_factor: piped.as_ref().map(format_q),
                    matches,
                });
            }
        }
    }
    Ok(FamilyReport {
        family: spec.to_string(),
        d: spec.d,
        max_level,
        mass_factor: spec.mass_factor()?.to_string(),
        pass,
        levels,
        creation_power: creation,
        stated_formulas: specialization_report(spec, max_level)?,
    })
}
