//! Sparse polynomials in d commuting indeterminates over Q.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{enumerate_classes, MultiIndex};
use crate::rational::{format_q, pow_q, q, Q};

/// A polynomial as a map from exponent vector to nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    d: usize,
    terms: BTreeMap<MultiIndex, Q>,
}

impl Polynomial {
    pub fn zero(d: usize) -> Self {
        Polynomial { d, terms: BTreeMap::new() }
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, Q::one())
    }

    pub fn constant(d: usize, c: Q) -> Self {
        Self::monomial(MultiIndex::zero(d), c)
    }

    pub fn monomial(beta: MultiIndex, c: Q) -> Self {
        let d = beta.d();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(beta, c);
        }
        Polynomial { d, terms }
    }

    /// The coordinate `X_j`, zero-based `j`.
    pub fn variable(d: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(d, j), Q::one())
    }

    /// `X_v = sum_j v_j X_j`.
    pub fn linear_form(v: &[Q]) -> Self {
        let d = v.len();
        let mut p = Self::zero(d);
        for (j, c) in v.iter().enumerate() {
            p.add_term(MultiIndex::unit(d, j), c.clone());
        }
        p
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (MultiIndex, Q)>) -> Result<Self> {
        let mut p = Self::zero(d);
        for (beta, c) in terms {
            if beta.d() != d {
                return Err(Error::DimensionMismatch { expected: d, got: beta.d() });
            }
            p.add_term(beta, c);
        }
        Ok(p)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, beta: &MultiIndex) -> Q {
        self.terms.get(beta).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, beta: MultiIndex, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(beta) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// The homogeneous component of degree `k`.
    pub fn homogeneous_part(&self, k: usize) -> Polynomial {
        Polynomial {
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.degree() == k)
                .map(|(b, c)| (b.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_same_d(&self, other: &Polynomial) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: other.d });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_d(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(b.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_d(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(b.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Q) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.d);
        }
        Polynomial {
            d: self.d,
            terms: self.terms.iter().map(|(b, c)| (b.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_d(other)?;
        let mut out = Polynomial::zero(self.d);
        for (b1, c1) in &self.terms {
            for (b2, c2) in &other.terms {
                out.add_term(b1.add(b2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// Multiplication by `X_j` with a one-based `j` in `1..=d`.
    pub fn mul_by_variable(&self, j: usize) -> Result<Polynomial> {
        if j == 0 || j > self.d {
            return Err(Error::InvalidIndex { index: j, d: self.d });
        }
        Ok(self.times_variable(j - 1))
    }

    /// Multiplication by `X_j` with a zero-based `j`.
    pub(crate) fn times_variable(&self, j: usize) -> Polynomial {
        Polynomial {
            d: self.d,
            terms: self.terms.iter().map(|(b, c)| (b.raised(j), c.clone())).collect(),
        }
    }

    pub fn evaluate(&self, x: &[Q]) -> Result<Q> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        Ok(self.terms.iter().fold(Q::zero(), |acc, (b, c)| {
            let mono = b
                .entries()
                .iter()
                .zip(x)
                .fold(Q::one(), |m, (&e, xi)| m * pow_q(xi, e as usize));
            acc + c * mono
        }))
    }

    /// Partial derivative in the zero-based coordinate `j`.
    pub fn derivative(&self, j: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.d);
        for (b, c) in &self.terms {
            if let Some(lower) = b.lowered(j) {
                out.add_term(lower, c * q(b.get(j) as i64));
            }
        }
        out
    }

    /// Substitutes a one-variable polynomial into coordinate `j` of a
    /// d-variate monomial product; used to build tensor-product families.
    pub fn embed_univariate(coeffs: &[Q], d: usize, j: usize) -> Polynomial {
        let mut p = Polynomial::zero(d);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0u32; d];
            e[j] = k as u32;
            p.add_term(MultiIndex::new(e), c.clone());
        }
        p
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(b, c)| TermJson { beta: b.entries().to_vec(), c: format_q(c) })
                .collect(),
        }
    }

    pub fn from_json(j: &PolynomialJson) -> Result<Polynomial> {
        let mut p = Polynomial::zero(j.d);
        for t in &j.terms {
            if t.beta.len() != j.d {
                return Err(Error::DimensionMismatch { expected: j.d, got: t.beta.len() });
            }
            p.add_term(MultiIndex::new(t.beta.clone()), crate::rational::parse_q(&t.c)?);
        }
        Ok(p)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", format_q(c))?;
            for (j, &e) in b.entries().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", j + 1)?,
                    _ => write!(f, "*x{}^{}", j + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// JSON form: `{"d":2,"terms":[{"beta":[1,1],"c":"3/2"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub d: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub beta: Vec<u32>,
    pub c: String,
}

/// Exponent vectors of total degree at most `n`, graded and canonically
/// ordered within each degree.
pub fn monomial_basis(d: usize, n: usize) -> Result<Vec<MultiIndex>> {
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(enumerate_classes(d, k)?.classes().iter().cloned());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{binomial, qf};

    fn x(d: usize, j: usize) -> Polynomial {
        Polynomial::variable(d, j)
    }

    #[test]
    fn mul_examples() {
        let x1 = x(2, 0);
        let x2 = x(2, 1);
        assert_eq!(
            x1.mul(&x1).unwrap(),
            Polynomial::monomial(MultiIndex::new(vec![2, 0]), q(1))
        );
        let p = x1.add(&x2).unwrap().add(&Polynomial::constant(2, q(3))).unwrap();
        assert_eq!(Polynomial::one(2).mul(&p).unwrap(), p);
        let lhs = x1.add(&x2).unwrap().mul(&x1.sub(&x2).unwrap()).unwrap();
        let rhs = x1.mul(&x1).unwrap().sub(&x2.mul(&x2).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert!(lhs.terms().all(|(_, c)| !c.is_zero()));
        assert!(x1.mul(&x(3, 0)).is_err());
    }

    #[test]
    fn mul_by_variable_examples() {
        let x2sq = Polynomial::monomial(MultiIndex::new(vec![0, 2]), q(1));
        assert_eq!(
            x2sq.mul_by_variable(1).unwrap(),
            Polynomial::monomial(MultiIndex::new(vec![1, 2]), q(1))
        );
        assert!(Polynomial::zero(2).mul_by_variable(1).unwrap().is_zero());
        let p = x(1, 0).add(&Polynomial::constant(1, q(3))).unwrap();
        let expect = Polynomial::from_terms(
            1,
            [(MultiIndex::new(vec![2]), q(1)), (MultiIndex::new(vec![1]), q(3))],
        )
        .unwrap();
        assert_eq!(p.mul_by_variable(1).unwrap(), expect);
        assert_eq!(p.mul_by_variable(2), Err(Error::InvalidIndex { index: 2, d: 1 }));
        assert_eq!(p.mul_by_variable(0), Err(Error::InvalidIndex { index: 0, d: 1 }));
    }

    #[test]
    fn evaluate_examples() {
        let p = x(2, 0).mul(&x(2, 1)).unwrap();
        assert_eq!(p.evaluate(&[q(2), q(3)]).unwrap(), q(6));
        assert_eq!(Polynomial::one(2).evaluate(&[q(7), qf(1, 3)]).unwrap(), q(1));
        let p = x(2, 0).mul(&x(2, 0)).unwrap().sub(&Polynomial::constant(2, qf(1, 2))).unwrap();
        assert_eq!(p.evaluate(&[qf(1, 2), q(9)]).unwrap(), qf(-1, 4));
        assert!(p.evaluate(&[q(1)]).is_err());
    }

    #[test]
    fn degree_of_zero_is_sentinel() {
        assert_eq!(Polynomial::zero(3).degree(), None);
        assert_eq!(Polynomial::one(3).degree(), Some(0));
    }

    #[test]
    fn monomial_basis_examples() {
        let b = monomial_basis(2, 1).unwrap();
        assert_eq!(
            b,
            vec![
                MultiIndex::new(vec![0, 0]),
                MultiIndex::new(vec![1, 0]),
                MultiIndex::new(vec![0, 1])
            ]
        );
        let b = monomial_basis(1, 3).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b[3], MultiIndex::new(vec![3]));
        assert_eq!(monomial_basis(3, 2).unwrap().len(), 10);
    }

    #[test]
    fn basis_dimensions() {
        for d in 1..=4usize {
            for n in 0..=6usize {
                let full = monomial_basis(d, n).unwrap();
                assert_eq!(full.len() as u64, binomial((n + d) as u64, d as u64));
                let slice = full.iter().filter(|b| b.degree() == n).count();
                assert_eq!(slice as u64, binomial((n + d - 1) as u64, (d - 1) as u64));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = Polynomial::from_terms(2, [(MultiIndex::new(vec![1, 1]), qf(3, 2))]).unwrap();
        let j = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(j, r#"{"d":2,"terms":[{"beta":[1,1],"c":"3/2"}]}"#);
        let back: PolynomialJson = serde_json::from_str(&j).unwrap();
        assert_eq!(Polynomial::from_json(&back).unwrap(), p);
    }

    fn arb_poly() -> impl proptest::strategy::Strategy<Value = Polynomial> {
        use proptest::prelude::*;
        proptest::collection::vec(((0u32..3, 0u32..3), -4i64..5, 1i64..4), 0..5).prop_map(|ts| {
            Polynomial::from_terms(
                2,
                ts.into_iter().map(|((a, b), n, dd)| (MultiIndex::new(vec![a, b]), qf(n, dd))),
            )
            .unwrap()
        })
    }

    proptest::proptest! {
        #[test]
        fn mul_commutative_associative(p in arb_poly(), r in arb_poly(), s in arb_poly()) {
            proptest::prop_assert_eq!(p.mul(&r).unwrap(), r.mul(&p).unwrap());
            proptest::prop_assert_eq!(
                p.mul(&r).unwrap().mul(&s).unwrap(),
                p.mul(&r.mul(&s).unwrap()).unwrap()
            );
        }
    }
}
