//! Degreewise Gram–Schmidt against a moment functional.
//!
//! Degree `n` holds one polynomial per degree-`n` monomial: the monomial
//! minus its projection onto everything of lower degree. Polynomials of the
//! same degree are not orthogonalized against each other; each degree keeps
//! its (possibly singular) Gram matrix instead.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ldl_psd, solve_modulo_kernel, Ldl, QMatrix};
use crate::moments::MomentFunctional;
use crate::multiindex::{enumerate_classes, MultiIndex};
use crate::polyring::{monomial_basis, Polynomial, PolynomialJson};
use crate::rational::Q;

/// The degree-`n` block of a graded orthogonal basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeBlock {
    pub n: usize,
    /// Degree-`n` monomials in canonical order.
    pub monomials: Vec<MultiIndex>,
    pub polys: Vec<Polynomial>,
    pub gram: QMatrix,
    pub ldl: Ldl,
    /// Column `i` holds the top-degree coefficients of `polys[i]` over
    /// `monomials`; the identity for the monic basis.
    pub lead: QMatrix,
    lead_inv: QMatrix,
}

impl DegreeBlock {
    fn new(n: usize, monomials: Vec<MultiIndex>, polys: Vec<Polynomial>, gram: QMatrix) -> Result<Self> {
        let ldl = ldl_psd(&gram)?;
        let mut lead = QMatrix::zeros(monomials.len(), polys.len());
        for (i, p) in polys.iter().enumerate() {
            for (r, m) in monomials.iter().enumerate() {
                lead.set(r, i, p.coeff(m));
            }
        }
        let lead_inv = lead
            .inverse()
            .ok_or_else(|| Error::InternalConsistency(format!("degree {n} leading terms are dependent")))?;
        Ok(DegreeBlock { n, monomials, polys, gram, ldl, lead, lead_inv })
    }

    pub fn dim(&self) -> usize {
        self.polys.len()
    }

    pub fn rank(&self) -> usize {
        self.ldl.rank()
    }

    pub fn null_mask(&self) -> Vec<bool> {
        self.ldl.null_mask()
    }

    /// `sum_i c_i polys[i]`.
    pub fn combine(&self, c: &[Q]) -> Polynomial {
        let d = self.monomials[0].d();
        let mut out = Polynomial::zero(d);
        for (ci, p) in c.iter().zip(&self.polys) {
            if ci.is_zero() {
                continue;
            }
            for (b, v) in p.terms() {
                out.add_term(b.clone(), ci * v);
            }
        }
        out
    }

    /// Whether `sum c_i polys[i]` has zero norm.
    pub fn is_null(&self, c: &[Q]) -> bool {
        self.gram.mul_vec(c).iter().all(Zero::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedOrthogonalBasis {
    d: usize,
    blocks: Vec<DegreeBlock>,
}

impl GradedOrthogonalBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, n: usize) -> &DegreeBlock {
        &self.blocks[n]
    }

    pub fn blocks(&self) -> &[DegreeBlock] {
        &self.blocks
    }

    /// Coefficients of `p` in the basis, one vector per degree `0..=max`.
    ///
    /// This is an exact polynomial identity: `p = sum_k combine(k, c_k)`.
    pub fn expand(&self, p: &Polynomial) -> Result<Vec<Vec<Q>>> {
        if p.d() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: p.d() });
        }
        let top = self.max_degree();
        if let Some(deg) = p.degree() {
            if deg > top {
                return Err(Error::DegreeOutOfRange { requested: deg, available: top });
            }
        }
        let mut out = vec![Vec::new(); top + 1];
        let mut rest = p.clone();
        for k in (0..=top).rev() {
            let block = &self.blocks[k];
            let h: Vec<Q> = block.monomials.iter().map(|m| rest.coeff(m)).collect();
            let c = block.lead_inv.mul_vec(&h);
            if c.iter().any(|x| !x.is_zero()) {
                rest = rest.sub(&block.combine(&c))?;
            }
            out[k] = c;
        }
        if !rest.is_zero() {
            return Err(Error::InternalConsistency("basis expansion left a remainder".into()));
        }
        Ok(out)
    }

    /// The degree-`n` component of `p`.
    pub fn project(&self, p: &Polynomial, n: usize) -> Result<Polynomial> {
        if n > self.max_degree() {
            return Err(Error::DegreeOutOfRange { requested: n, available: self.max_degree() });
        }
        let comps = self.expand(p)?;
        Ok(self.blocks[n].combine(&comps[n]))
    }

    /// Multiplies basis polynomial `i` of degree `n` by `factors[n][i]`.
    ///
    /// Grams transform as `F G F`; downstream Jacobi sequences must not
    /// notice.
    pub fn rescaled(&self, factors: &[Vec<Q>]) -> Result<GradedOrthogonalBasis> {
        if factors.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch { expected: self.blocks.len(), got: factors.len() });
        }
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (b, f) in self.blocks.iter().zip(factors) {
            if f.len() != b.dim() {
                return Err(Error::DimensionMismatch { expected: b.dim(), got: f.len() });
            }
            if f.iter().any(Zero::is_zero) {
                return Err(Error::UnsupportedParameter("zero rescaling factor".into()));
            }
            let fm = QMatrix::diagonal(f);
            let polys = b.polys.iter().zip(f).map(|(p, s)| p.scale(s)).collect();
            let gram = fm.mul(&b.gram).mul(&fm);
            blocks.push(DegreeBlock::new(b.n, b.monomials.clone(), polys, gram)?);
        }
        Ok(GradedOrthogonalBasis { d: self.d, blocks })
    }

    pub fn to_json(&self) -> BasisJson {
        BasisJson {
            d: self.d,
            max_degree: self.max_degree(),
            degrees: self
                .blocks
                .iter()
                .map(|b| DegreeJson {
                    n: b.n,
                    monomials: b.monomials.iter().map(|m| m.entries().to_vec()).collect(),
                    polynomials: b.polys.iter().map(Polynomial::to_json).collect(),
                    gram: b.gram.to_string_rows(),
                    rank: b.rank(),
                    null_mask: b.null_mask(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeJson {
    pub n: usize,
    pub monomials: Vec<Vec<u32>>,
    pub polynomials: Vec<PolynomialJson>,
    pub gram: Vec<Vec<String>>,
    pub rank: usize,
    pub null_mask: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisJson {
    pub d: usize,
    pub max_degree: usize,
    pub degrees: Vec<DegreeJson>,
}

/// Dense working form of one basis polynomial: its coefficients over all
/// monomials of degree `<= max` and the vector `<x^a, q>` over the same index.
struct Dense {
    coef: Vec<Q>,
    moments: Vec<Q>,
}

/// Builds the monic graded orthogonal basis up to `max_degree`.
///
/// Needs moments up to degree `2 * max_degree`.
pub fn decompose(f: &MomentFunctional, max_degree: usize) -> Result<GradedOrthogonalBasis> {
    let d = f.d();
    let table = f.moment_table(2 * max_degree)?;
    let mono = monomial_basis(d, max_degree)?;
    let pos: HashMap<&MultiIndex, usize> = mono.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let size = mono.len();

    let mut blocks: Vec<DegreeBlock> = Vec::new();
    let mut dense: Vec<Vec<Dense>> = Vec::new();
    for n in 0..=max_degree {
        let monomials = enumerate_classes(d, n)?.classes().to_vec();
        let built: Vec<Dense> = monomials
            .par_iter()
            .map(|m| {
                let mut coef = vec![Q::zero(); size];
                coef[pos[m]] = Q::one();
                let mut moments: Vec<Q> = mono.iter().map(|a| table[&a.add(m)].clone()).collect();
                for (k, lower) in dense.iter().enumerate() {
                    let rhs: Vec<Vec<Q>> = lower.iter().map(|q| vec![q.moments[pos[m]].clone()]).collect();
                    let c = solve_modulo_kernel(&blocks[k].gram, &blocks[k].ldl, &QMatrix::from_rows(rhs))
                        .map_err(|e| match e {
                            Error::Representation(_) => Error::NotAState(format!(
                                "moments are not those of a positive functional (degree {n} against degree {k})"
                            )),
                            other => other,
                        })?;
                    for (i, qk) in lower.iter().enumerate() {
                        let ci = c.get(i, 0);
                        if ci.is_zero() {
                            continue;
                        }
                        for (a, b) in coef.iter_mut().zip(&qk.coef) {
                            if !b.is_zero() {
                                *a -= ci * b;
                            }
                        }
                        for (a, b) in moments.iter_mut().zip(&qk.moments) {
                            if !b.is_zero() {
                                *a -= ci * b;
                            }
                        }
                    }
                }
                Ok(Dense { coef, moments })
            })
            .collect::<Result<_>>()?;

        let dim = built.len();
        let mut gram = QMatrix::zeros(dim, dim);
        for (i, qi) in built.iter().enumerate() {
            for (j, qj) in built.iter().enumerate().skip(i) {
                let v = qi
                    .coef
                    .iter()
                    .zip(&qj.moments)
                    .filter(|(c, _)| !c.is_zero())
                    .fold(Q::zero(), |acc, (c, m)| acc + c * m);
                gram.set(j, i, v.clone());
                gram.set(i, j, v);
            }
        }
        let polys = built
            .iter()
            .map(|q| {
                Polynomial::from_terms(
                    d,
                    mono.iter().zip(&q.coef).filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m.clone(), c.clone())),
                )
            })
            .collect::<Result<_>>()?;
        blocks.push(DegreeBlock::new(n, monomials, polys, gram)?);
        dense.push(built);
    }
    Ok(GradedOrthogonalBasis { d, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::Atom;
    use crate::rational::{q, qf};

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn gaussian_one_d() {
        let f = MomentFunctional::gaussian(1).unwrap();
        let b = decompose(&f, 2).unwrap();
        let x2 = Polynomial::from_terms(1, [(mi(&[2]), q(1)), (mi(&[0]), qf(-1, 2))]).unwrap();
        assert_eq!(b.block(2).polys[0], x2);
        assert_eq!(b.block(2).gram, QMatrix::from_rows(vec![vec![qf(1, 2)]]));
        assert_eq!(b.block(1).polys[0], Polynomial::variable(1, 0));
    }

    #[test]
    fn gamma_one_d() {
        let f = MomentFunctional::gamma(vec![q(0)]).unwrap();
        let b = decompose(&f, 1).unwrap();
        let p = Polynomial::from_terms(1, [(mi(&[1]), q(1)), (mi(&[0]), q(-1))]).unwrap();
        assert_eq!(b.block(1).polys[0], p);
        assert_eq!(b.block(1).gram, QMatrix::from_rows(vec![vec![q(1)]]));
    }

    #[test]
    fn single_atom_is_degenerate() {
        let f = MomentFunctional::atomic(2, vec![Atom { point: vec![q(0), q(0)], weight: q(1) }]).unwrap();
        let b = decompose(&f, 1).unwrap();
        assert_eq!(b.block(1).rank(), 0);
        assert_eq!(b.block(1).null_mask(), vec![true, true]);
        assert_eq!(b.block(1).polys[0], Polynomial::variable(2, 0));
    }

    #[test]
    fn projection_examples() {
        let f = MomentFunctional::gaussian(1).unwrap();
        let b = decompose(&f, 3).unwrap();
        let x2 = Polynomial::monomial(mi(&[2]), q(1));
        assert_eq!(b.project(&x2, 0).unwrap(), Polynomial::constant(1, qf(1, 2)));
        assert!(b.project(&x2, 1).unwrap().is_zero());
        assert!(matches!(b.project(&x2, 4), Err(Error::DegreeOutOfRange { .. })));
    }

    fn functionals() -> Vec<MomentFunctional> {
        vec![
            MomentFunctional::gaussian(2).unwrap(),
            MomentFunctional::gamma(vec![qf(1, 2), q(1)]).unwrap(),
            MomentFunctional::beta(vec![q(0), qf(1, 2)], vec![q(1), qf(-1, 2)]).unwrap(),
            MomentFunctional::atomic(
                2,
                vec![
                    Atom { point: vec![q(0), q(0)], weight: qf(1, 3) },
                    Atom { point: vec![q(1), q(2)], weight: qf(1, 3) },
                    Atom { point: vec![qf(-1, 2), q(1)], weight: qf(1, 3) },
                ],
            )
            .unwrap(),
        ]
    }

    #[test]
    fn completeness_and_orthogonality() {
        for f in functionals() {
            let b = decompose(&f, 3).unwrap();
            for beta in monomial_basis(2, 3).unwrap() {
                let p = Polynomial::monomial(beta, q(1));
                let mut sum = Polynomial::zero(2);
                for n in 0..=3 {
                    sum = sum.add(&b.project(&p, n).unwrap()).unwrap();
                }
                assert_eq!(sum, p);
            }
            for m in 0..=3 {
                for n in 0..=3 {
                    if m == n {
                        continue;
                    }
                    for p in &b.block(m).polys {
                        for r in &b.block(n).polys {
                            assert!(f.inner_product(p, r).unwrap().is_zero());
                        }
                    }
                }
                for (i, p) in b.block(m).polys.iter().enumerate() {
                    for (j, r) in b.block(m).polys.iter().enumerate() {
                        assert_eq!(&f.inner_product(p, r).unwrap(), b.block(m).gram.get(i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn multiplication_is_symmetric() {
        for f in functionals() {
            let b = decompose(&f, 2).unwrap();
            for j in 0..2 {
                for p in b.blocks().iter().flat_map(|bl| bl.polys.iter()) {
                    for r in b.blocks().iter().flat_map(|bl| bl.polys.iter()) {
                        let lhs = f.inner_product(&p.times_variable(j), r).unwrap();
                        let rhs = f.inner_product(p, &r.times_variable(j)).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn rank_bounded_by_atoms() {
        let f = functionals().pop().unwrap();
        let b = decompose(&f, 3).unwrap();
        let total: usize = b.blocks().iter().map(DegreeBlock::rank).sum();
        assert_eq!(total, 3);
        let g = decompose(&MomentFunctional::gaussian(2).unwrap(), 3).unwrap();
        assert!(g.blocks().iter().all(|bl| bl.rank() == bl.dim()));
    }

    #[test]
    fn non_positive_table_rejected() {
        // variance -1
        let mut m = HashMap::new();
        m.insert(mi(&[0]), q(1));
        m.insert(mi(&[1]), q(0));
        m.insert(mi(&[2]), q(-1));
        let f = MomentFunctional::table(1, 2, m).unwrap();
        assert!(matches!(decompose(&f, 1), Err(Error::NotAState(_))));
        assert!(matches!(decompose(&f, 2), Err(Error::InsufficientMoments(_))));
    }

    #[test]
    fn rescaling_keeps_the_span() {
        let f = MomentFunctional::gaussian(1).unwrap();
        let b = decompose(&f, 2).unwrap();
        let r = b.rescaled(&[vec![q(3)], vec![qf(-1, 2)], vec![q(2)]]).unwrap();
        assert_eq!(r.block(2).gram, QMatrix::from_rows(vec![vec![q(2)]]));
        let x2 = Polynomial::monomial(mi(&[2]), q(1));
        assert_eq!(r.project(&x2, 0).unwrap(), b.project(&x2, 0).unwrap());
        assert!(b.rescaled(&[vec![q(0)], vec![q(1)], vec![q(1)]]).is_err());
    }
}
