//! Moment functionals: normalized (mass one) states on the polynomial
//! algebra, given either by a classical product weight, a finite sum of
//! point masses, or an explicit moment table.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::polyring::{monomial_basis, Polynomial};
use crate::rational::{binomial, format_q, parse_q, pow_q, q, Q};
use crate::symbolic::Symbolic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub point: Vec<Q>,
    pub weight: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provider {
    /// Normalized `exp(-|x|^2)` on R^d.
    GaussianProduct,
    /// Normalized `x^alpha exp(-|x|_1)` on the positive orthant.
    GammaProduct { alpha: Vec<Q> },
    /// Normalized `prod (1-x_j)^a_j (1+x_j)^b_j` on the cube `[-1,1]^d`.
    BetaProduct { a: Vec<Q>, b: Vec<Q> },
    Atomic { atoms: Vec<Atom> },
    Table { max_degree: usize, moments: HashMap<MultiIndex, Q> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentFunctional {
    d: usize,
    provider: Provider,
}

fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidDimension)
    } else {
        Ok(())
    }
}

fn check_params(name: &str, d: usize, v: &[Q]) -> Result<()> {
    if v.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: v.len() });
    }
    if let Some(bad) = v.iter().find(|x| **x <= q(-1)) {
        return Err(Error::UnsupportedParameter(format!(
            "{name} = {} must be greater than -1",
            format_q(bad)
        )));
    }
    Ok(())
}

impl MomentFunctional {
    pub fn gaussian(d: usize) -> Result<Self> {
        check_d(d)?;
        Ok(MomentFunctional { d, provider: Provider::GaussianProduct })
    }

    pub fn gamma(alpha: Vec<Q>) -> Result<Self> {
        let d = alpha.len();
        check_d(d)?;
        check_params("alpha", d, &alpha)?;
        Ok(MomentFunctional { d, provider: Provider::GammaProduct { alpha } })
    }

    pub fn beta(a: Vec<Q>, b: Vec<Q>) -> Result<Self> {
        let d = a.len();
        check_d(d)?;
        check_params("a", d, &a)?;
        check_params("b", d, &b)?;
        Ok(MomentFunctional { d, provider: Provider::BetaProduct { a, b } })
    }

    /// A finite convex combination of point masses. Weights must be positive,
    /// sum to one, and the points must be pairwise distinct.
    pub fn atomic(d: usize, atoms: Vec<Atom>) -> Result<Self> {
        check_d(d)?;
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let mut seen = BTreeSet::new();
        let mut total = Q::zero();
        for a in &atoms {
            if a.point.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: a.point.len() });
            }
            if !a.weight.is_positive() {
                return Err(Error::InvalidMeasure(format!(
                    "weight {} is not positive",
                    format_q(&a.weight)
                )));
            }
            if !seen.insert(a.point.clone()) {
                return Err(Error::InvalidMeasure("repeated atom location".into()));
            }
            total += &a.weight;
        }
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {}, not 1",
                format_q(&total)
            )));
        }
        Ok(MomentFunctional { d, provider: Provider::Atomic { atoms } })
    }

    /// An explicit table of moments up to `max_degree`. The zeroth moment
    /// must be present and equal to one; other omitted entries are reported
    /// when first requested.
    pub fn table(d: usize, max_degree: usize, moments: HashMap<MultiIndex, Q>) -> Result<Self> {
        check_d(d)?;
        for beta in moments.keys() {
            if beta.d() != d {
                return Err(Error::DimensionMismatch { expected: d, got: beta.d() });
            }
            if beta.degree() > max_degree {
                return Err(Error::Malformed(format!(
                    "moment {beta} exceeds declared max_degree {max_degree}"
                )));
            }
        }
        match moments.get(&MultiIndex::zero(d)) {
            Some(m0) if m0.is_one() => {}
            Some(m0) => {
                return Err(Error::InvalidMeasure(format!(
                    "zeroth moment is {}, not 1",
                    format_q(m0)
                )))
            }
            None => return Err(Error::InsufficientMoments("zeroth moment missing".into())),
        }
        Ok(MomentFunctional { d, provider: Provider::Table { max_degree, moments } })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn provider(&self) -> &Provider {
        &self.provider
    }

    /// Highest total degree with available moments; `None` means unbounded.
    pub fn max_degree(&self) -> Option<usize> {
        match &self.provider {
            Provider::Table { max_degree, .. } => Some(*max_degree),
            _ => None,
        }
    }

    pub fn moment(&self, beta: &MultiIndex) -> Result<Q> {
        if beta.d() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: beta.d() });
        }
        match &self.provider {
            Provider::GaussianProduct => Ok(beta
                .entries()
                .iter()
                .fold(Q::one(), |acc, &k| acc * gaussian_moment_1d(k as usize))),
            Provider::GammaProduct { alpha } => Ok(beta
                .entries()
                .iter()
                .zip(alpha)
                .fold(Q::one(), |acc, (&k, al)| acc * gamma_moment_1d(al, k as usize))),
            Provider::BetaProduct { a, b } => {
                let mut acc = Q::one();
                for ((&k, aj), bj) in beta.entries().iter().zip(a).zip(b) {
                    let ms = beta_moments_1d(aj, bj, k as usize)?;
                    acc *= &ms[k as usize];
                }
                Ok(acc)
            }
            Provider::Atomic { atoms } => Ok(atoms.iter().fold(Q::zero(), |acc, at| {
                let mono = at
                    .point
                    .iter()
                    .zip(beta.entries())
                    .fold(Q::one(), |m, (x, &e)| m * pow_q(x, e as usize));
                acc + &at.weight * mono
            })),
            Provider::Table { max_degree, moments } => {
                if beta.degree() > *max_degree {
                    return Err(Error::InsufficientMoments(format!(
                        "moment {beta} requested, table stops at degree {max_degree}"
                    )));
                }
                moments
                    .get(beta)
                    .cloned()
                    .ok_or_else(|| Error::InsufficientMoments(format!("moment {beta} missing")))
            }
        }
    }

    /// All moments with total degree at most `degree`, keyed by exponent.
    pub fn moment_table(&self, degree: usize) -> Result<HashMap<MultiIndex, Q>> {
        if let Some(max) = self.max_degree() {
            if degree > max {
                return Err(Error::InsufficientMoments(format!(
                    "need moments to degree {degree}, table stops at {max}"
                )));
            }
        }
        let one_d: Option<Vec<Vec<Q>>> = match &self.provider {
            Provider::GaussianProduct => {
                Some(vec![(0..=degree).map(gaussian_moment_1d).collect(); self.d])
            }
            Provider::GammaProduct { alpha } => Some(
                alpha
                    .iter()
                    .map(|al| (0..=degree).map(|k| gamma_moment_1d(al, k)).collect())
                    .collect(),
            ),
            Provider::BetaProduct { a, b } => Some(
                a.iter()
                    .zip(b)
                    .map(|(aj, bj)| beta_moments_1d(aj, bj, degree))
                    .collect::<Result<_>>()?,
            ),
            _ => None,
        };
        let mut out = HashMap::new();
        for beta in monomial_basis(self.d, degree)? {
            let v = match &one_d {
                Some(tables) => beta
                    .entries()
                    .iter()
                    .zip(tables)
                    .fold(Q::one(), |acc, (&k, t)| acc * &t[k as usize]),
                None => self.moment(&beta)?,
            };
            out.insert(beta, v);
        }
        Ok(out)
    }

    /// `phi(p q)`; coefficients are real so no conjugation is needed.
    pub fn inner_product(&self, p: &Polynomial, r: &Polynomial) -> Result<Q> {
        let prod = p.mul(r)?;
        let mut acc = Q::zero();
        for (beta, c) in prod.terms() {
            acc += c * self.moment(beta)?;
        }
        Ok(acc)
    }

    /// Total mass of the unnormalized classical weight.
    pub fn mass_factor(&self) -> Result<Symbolic> {
        match &self.provider {
            Provider::GaussianProduct => Ok(Symbolic::pi_pow(Q::new(
                (self.d as i64).into(),
                2.into(),
            ))),
            Provider::GammaProduct { alpha } => alpha.iter().try_fold(Symbolic::one(), |acc, al| {
                Ok(acc.mul(&Symbolic::gamma(&(al + q(1)))?))
            }),
            Provider::BetaProduct { a, b } => {
                a.iter().zip(b).try_fold(Symbolic::one(), |acc, (aj, bj)| {
                    Ok(acc.mul(&beta_mass_1d(aj, bj)?))
                })
            }
            Provider::Atomic { .. } | Provider::Table { .. } => Err(Error::NoMassFactor),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        match &self.provider {
            Provider::Atomic { atoms } => Ok(serde_json::to_string(&AtomicJson {
                d: self.d,
                atoms: atoms
                    .iter()
                    .map(|a| AtomJson {
                        x: a.point.iter().map(format_q).collect(),
                        w: format_q(&a.weight),
                    })
                    .collect(),
            })?),
            Provider::Table { max_degree, moments } => {
                let mut entries: Vec<_> = moments.iter().collect();
                entries.sort_by(|a, b| a.0.cmp(b.0));
                Ok(serde_json::to_string(&TableJson {
                    d: self.d,
                    max_degree: *max_degree,
                    moments: entries
                        .into_iter()
                        .map(|(b, v)| TableEntryJson { beta: b.entries().to_vec(), value: format_q(v) })
                        .collect(),
                })?)
            }
            _ => Err(Error::Malformed("only atomic and table functionals have a file form".into())),
        }
    }
}

/// `int x^k e^{-x^2} / int e^{-x^2}`: `(2m)! / (4^m m!)` for `k = 2m`, else 0.
pub fn gaussian_moment_1d(k: usize) -> Q {
    if k % 2 == 1 {
        return Q::zero();
    }
    // (2m)!/(4^m m!) = prod_{i=1}^{m} (2i-1)/2
    (1..=k / 2).fold(Q::one(), |acc, i| acc * Q::new((2 * i as i64 - 1).into(), 2.into()))
}

/// `Gamma(alpha+k+1) / Gamma(alpha+1) = prod_{p=1}^{k} (alpha+p)`.
pub fn gamma_moment_1d(alpha: &Q, k: usize) -> Q {
    (1..=k).fold(Q::one(), |acc, p| acc * (alpha + q(p as i64)))
}

/// Moments `m_0..=m_k` of the normalized weight `(1-x)^a (1+x)^b` on
/// `[-1, 1]`, via `x = 2t - 1` and Beta-function ratios in `t`.
///
/// The result is checked against the integration-by-parts recurrence
/// `(k+a+b+2) m_{k+1} = k m_{k-1} + (b-a) m_k` before being returned.
pub fn beta_moments_1d(a: &Q, b: &Q, k: usize) -> Result<Vec<Q>> {
    let s = a + b;
    // E[t^j] for t ~ Beta(b+1, a+1)
    let mut t_moments = Vec::with_capacity(k + 1);
    let mut acc = Q::one();
    t_moments.push(acc.clone());
    for i in 0..k {
        let i = q(i as i64);
        acc = acc * (b + q(1) + &i) / (&s + q(2) + &i);
        t_moments.push(acc.clone());
    }
    let mut out = Vec::with_capacity(k + 1);
    for n in 0..=k {
        let mut m = Q::zero();
        for (j, tj) in t_moments.iter().enumerate().take(n + 1) {
            let c = Q::from_integer((binomial(n as u64, j as u64)).into())
                * pow_q(&q(2), j)
                * if (n - j) % 2 == 0 { q(1) } else { q(-1) };
            m += c * tj;
        }
        out.push(m);
    }
    for n in 0..k {
        let lhs = (q(n as i64) + &s + q(2)) * &out[n + 1];
        let prev = if n == 0 { Q::zero() } else { q(n as i64) * &out[n - 1] };
        let rhs = prev + (b - a) * &out[n];
        if lhs != rhs {
            return Err(Error::InternalConsistency(format!(
                "beta moment {} violates the integration-by-parts recurrence",
                n + 1
            )));
        }
    }
    Ok(out)
}

/// `int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} Gamma(a+1) Gamma(b+1) / Gamma(a+b+2)`.
pub fn beta_mass_1d(a: &Q, b: &Q) -> Result<Symbolic> {
    let s = a + b;
    Symbolic::two_pow(&(&s + q(1)))
        .mul(&Symbolic::gamma(&(a + q(1)))?)
        .mul(&Symbolic::gamma(&(b + q(1)))?)
        .div(&Symbolic::gamma(&(s + q(2)))?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomJson {
    pub x: Vec<String>,
    pub w: String,
}

/// `{"d":2,"atoms":[{"x":["0","0"],"w":"1/2"}, ...]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomicJson {
    pub d: usize,
    pub atoms: Vec<AtomJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableEntryJson {
    pub beta: Vec<u32>,
    pub value: String,
}

/// `{"d":2,"max_degree":4,"moments":[{"beta":[2,0],"value":"1/2"}, ...]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableJson {
    pub d: usize,
    pub max_degree: usize,
    pub moments: Vec<TableEntryJson>,
}

pub fn atomic_from_json(text: &str) -> Result<MomentFunctional> {
    let j: AtomicJson = serde_json::from_str(text)?;
    let atoms = j
        .atoms
        .iter()
        .map(|a| {
            Ok(Atom {
                point: a.x.iter().map(|s| parse_q(s)).collect::<Result<_>>()?,
                weight: parse_q(&a.w)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MomentFunctional::atomic(j.d, atoms)
}

pub fn table_from_json(text: &str) -> Result<MomentFunctional> {
    let j: TableJson = serde_json::from_str(text)?;
    let mut moments = HashMap::new();
    for e in &j.moments {
        if e.beta.len() != j.d {
            return Err(Error::DimensionMismatch { expected: j.d, got: e.beta.len() });
        }
        if moments.insert(MultiIndex::new(e.beta.clone()), parse_q(&e.value)?).is_some() {
            return Err(Error::Malformed(format!("duplicate moment entry {:?}", e.beta)));
        }
    }
    MomentFunctional::table(j.d, j.max_degree, moments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn moment_examples() {
        let g1 = MomentFunctional::gaussian(1).unwrap();
        assert_eq!(g1.moment(&mi(&[2])).unwrap(), qf(1, 2));
        let g2 = MomentFunctional::gaussian(2).unwrap();
        assert_eq!(g2.moment(&mi(&[1, 3])).unwrap(), q(0));
        let ga = MomentFunctional::gamma(vec![q(0)]).unwrap();
        assert_eq!(ga.moment(&mi(&[3])).unwrap(), q(6));
        let at = MomentFunctional::atomic(
            2,
            vec![Atom { point: vec![q(1), q(2)], weight: q(1) }],
        )
        .unwrap();
        assert_eq!(at.moment(&mi(&[2, 1])).unwrap(), q(2));
    }

    #[test]
    fn gamma_one_d_oracle() {
        // Gamma(y+1) = y Gamma(y), so m_k / m_{k-1} = alpha + k.
        let alpha = qf(3, 2);
        for k in 1..8 {
            assert_eq!(
                gamma_moment_1d(&alpha, k) / gamma_moment_1d(&alpha, k - 1),
                &alpha + q(k as i64)
            );
        }
        // Gamma(3/2)/Gamma(1/2) = 1/2
        assert_eq!(gaussian_moment_1d(2), qf(1, 2));
        assert_eq!(gaussian_moment_1d(4), qf(3, 4));
        assert_eq!(gaussian_moment_1d(6), qf(15, 8));
    }

    #[test]
    fn beta_uniform_moments() {
        let m = beta_moments_1d(&q(0), &q(0), 4).unwrap();
        assert_eq!(m, vec![q(1), q(0), qf(1, 3), q(0), qf(1, 5)]);
        // Chebyshev first kind: m_2 = 1/2, m_4 = 3/8
        let m = beta_moments_1d(&qf(-1, 2), &qf(-1, 2), 4).unwrap();
        assert_eq!(m[2], qf(1, 2));
        assert_eq!(m[4], qf(3, 8));
        // mean (b-a)/(a+b+2)
        let m = beta_moments_1d(&qf(1, 2), &qf(-1, 2), 1).unwrap();
        assert_eq!(m[1], qf(-1, 2));
    }

    #[test]
    fn inner_product_examples() {
        let g1 = MomentFunctional::gaussian(1).unwrap();
        let x = Polynomial::variable(1, 0);
        assert_eq!(g1.inner_product(&x, &x).unwrap(), qf(1, 2));
        let one = Polynomial::one(1);
        assert_eq!(g1.inner_product(&one, &one).unwrap(), q(1));
        assert_eq!(g1.inner_product(&one, &x).unwrap(), q(0));
    }

    #[test]
    fn mass_factor_examples() {
        let g = MomentFunctional::gaussian(2).unwrap().mass_factor().unwrap();
        assert_eq!(g, Symbolic::pi_pow(q(1)));
        let l = MomentFunctional::gamma(vec![q(0), q(0)]).unwrap().mass_factor().unwrap();
        assert_eq!(l.as_rational(), Some(q(1)));
        let b = MomentFunctional::beta(vec![q(0)], vec![q(0)]).unwrap().mass_factor().unwrap();
        assert_eq!(b.as_rational(), Some(q(2)));
        let c = MomentFunctional::beta(vec![qf(-1, 2)], vec![qf(-1, 2)])
            .unwrap()
            .mass_factor()
            .unwrap();
        assert_eq!(c, Symbolic::pi_pow(q(1)));
        let at = MomentFunctional::atomic(1, vec![Atom { point: vec![q(0)], weight: q(1) }]).unwrap();
        assert_eq!(at.mass_factor(), Err(Error::NoMassFactor));
    }

    #[test]
    fn state_axiom() {
        let fs = vec![
            MomentFunctional::gaussian(3).unwrap(),
            MomentFunctional::gamma(vec![qf(1, 2), qf(3, 2)]).unwrap(),
            MomentFunctional::beta(vec![q(0), q(1)], vec![q(1), q(0)]).unwrap(),
        ];
        for f in fs {
            assert_eq!(f.moment(&MultiIndex::zero(f.d())).unwrap(), q(1));
        }
    }

    #[test]
    fn validation() {
        assert!(matches!(
            MomentFunctional::gamma(vec![q(-1)]),
            Err(Error::UnsupportedParameter(_))
        ));
        assert!(matches!(
            MomentFunctional::beta(vec![q(0)], vec![qf(-3, 2)]),
            Err(Error::UnsupportedParameter(_))
        ));
        assert_eq!(MomentFunctional::gaussian(0), Err(Error::InvalidDimension));
        let dup = vec![
            Atom { point: vec![q(0)], weight: qf(1, 2) },
            Atom { point: vec![q(0)], weight: qf(1, 2) },
        ];
        assert!(matches!(MomentFunctional::atomic(1, dup), Err(Error::InvalidMeasure(_))));
        let light = vec![Atom { point: vec![q(0)], weight: qf(1, 2) }];
        assert!(matches!(MomentFunctional::atomic(1, light), Err(Error::InvalidMeasure(_))));
        let neg = vec![
            Atom { point: vec![q(0)], weight: q(2) },
            Atom { point: vec![q(1)], weight: q(-1) },
        ];
        assert!(matches!(MomentFunctional::atomic(1, neg), Err(Error::InvalidMeasure(_))));
    }

    #[test]
    fn table_mode() {
        let text = r#"{"d":1,"max_degree":2,"moments":[{"beta":[0],"value":"1"},{"beta":[2],"value":"1/2"}]}"#;
        let f = table_from_json(text).unwrap();
        assert_eq!(f.moment(&mi(&[2])).unwrap(), qf(1, 2));
        assert!(matches!(f.moment(&mi(&[1])), Err(Error::InsufficientMoments(_))));
        assert!(matches!(f.moment(&mi(&[3])), Err(Error::InsufficientMoments(_))));
        assert!(matches!(f.moment_table(3), Err(Error::InsufficientMoments(_))));
        let bad = r#"{"d":1,"max_degree":1,"moments":[{"beta":[0],"value":"2"}]}"#;
        assert!(matches!(table_from_json(bad), Err(Error::InvalidMeasure(_))));
        let float = r#"{"d":1,"max_degree":1,"moments":[{"beta":[0],"value":"1e0"}]}"#;
        assert!(matches!(table_from_json(float), Err(Error::UnsupportedParameter(_))));
    }

    #[test]
    fn atomic_json_round_trip() {
        let text = r#"{"d":2,"atoms":[{"x":["0","0"],"w":"1/2"},{"x":["1","1"],"w":"1/2"}]}"#;
        let f = atomic_from_json(text).unwrap();
        assert_eq!(f.moment(&mi(&[1, 1])).unwrap(), qf(1, 2));
        let back = f.to_json().unwrap();
        assert_eq!(back, text);
    }
}
