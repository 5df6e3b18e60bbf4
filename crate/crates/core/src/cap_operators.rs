//! Creation, preservation and annihilation blocks of multiplication by a
//! coordinate, as exact matrices between the degree blocks of a graded
//! orthogonal basis.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::orthodecomp::GradedOrthogonalBasis;
use crate::rational::Q;

/// `plus[j][n]`, `zero[j][n]`, `minus[j][n]` for zero-based `j` and levels
/// `n < levels`. Columns are indexed by the level-`n` basis polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapOperatorSet {
    basis: GradedOrthogonalBasis,
    pub plus: Vec<Vec<QMatrix>>,
    pub zero: Vec<Vec<QMatrix>>,
    /// `minus[j][0]` is the empty `0 x 1` map.
    pub minus: Vec<Vec<QMatrix>>,
}

struct LevelBlocks {
    plus: QMatrix,
    zero: QMatrix,
    minus: QMatrix,
}

fn level_blocks(basis: &GradedOrthogonalBasis, j: usize, n: usize) -> Result<LevelBlocks> {
    let here = basis.block(n);
    let up = basis.block(n + 1).dim();
    let down = if n == 0 { 0 } else { basis.block(n - 1).dim() };
    let mut plus = QMatrix::zeros(up, here.dim());
    let mut zero = QMatrix::zeros(here.dim(), here.dim());
    let mut minus = QMatrix::zeros(down, here.dim());
    for (i, p) in here.polys.iter().enumerate() {
        let comps = basis.expand(&p.times_variable(j))?;
        for (k, c) in comps.iter().enumerate() {
            if k == n + 1 {
                plus.set_column(i, c);
            } else if k == n {
                zero.set_column(i, c);
            } else if n > 0 && k == n - 1 {
                minus.set_column(i, c);
            } else if !basis.block(k).is_null(c) {
                return Err(Error::InternalConsistency(format!(
                    "x{} times basis polynomial {} of degree {n} has a non-null component in degree {k}",
                    j + 1,
                    here.monomials[i]
                )));
            }
        }
    }
    Ok(LevelBlocks { plus, zero, minus })
}

impl CapOperatorSet {
    /// Builds every level whose image still fits in the basis, i.e.
    /// `0..max_degree`.
    pub fn build(basis: &GradedOrthogonalBasis) -> Result<Self> {
        let d = basis.d();
        let levels = basis.max_degree();
        let jobs: Vec<(usize, usize)> = (0..d).flat_map(|j| (0..levels).map(move |n| (j, n))).collect();
        let built = jobs
            .par_iter()
            .map(|&(j, n)| level_blocks(basis, j, n))
            .collect::<Result<Vec<_>>>()?;
        let mut plus = vec![Vec::with_capacity(levels); d];
        let mut zero = vec![Vec::with_capacity(levels); d];
        let mut minus = vec![Vec::with_capacity(levels); d];
        for ((j, _), b) in jobs.into_iter().zip(built) {
            plus[j].push(b.plus);
            zero[j].push(b.zero);
            minus[j].push(b.minus);
        }
        Ok(CapOperatorSet { basis: basis.clone(), plus, zero, minus })
    }

    pub fn basis(&self) -> &GradedOrthogonalBasis {
        &self.basis
    }

    pub fn d(&self) -> usize {
        self.basis.d()
    }

    /// Number of levels with all three blocks.
    pub fn levels(&self) -> usize {
        self.plus[0].len()
    }

    pub fn gram(&self, n: usize) -> &QMatrix {
        &self.basis.block(n).gram
    }

    /// `a^eps_v = sum_j v_j a^eps_j` at level `n`; `eps` is `+1`, `0` or `-1`.
    pub fn linear_combination(&self, v: &[Q], eps: i8, n: usize) -> Result<QMatrix> {
        if v.len() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), got: v.len() });
        }
        if n >= self.levels() {
            return Err(Error::DegreeOutOfRange { requested: n, available: self.levels().saturating_sub(1) });
        }
        let pick = |j: usize| match eps {
            1 => &self.plus[j][n],
            0 => &self.zero[j][n],
            _ => &self.minus[j][n],
        };
        let mut acc = QMatrix::zeros(pick(0).rows(), pick(0).cols());
        for (j, vj) in v.iter().enumerate() {
            if !vj.is_zero() {
                acc = acc.add(&pick(j).scale(vj));
            }
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> CapJson {
        let b = &self.basis;
        let labels = |n: usize| -> Vec<Vec<u32>> {
            b.block(n).monomials.iter().map(|m| m.entries().to_vec()).collect()
        };
        let mut levels = Vec::new();
        for n in 0..self.levels() {
            levels.push(CapLevelJson {
                n,
                classes: labels(n),
                classes_up: labels(n + 1),
                classes_down: if n == 0 { Vec::new() } else { labels(n - 1) },
                plus: self.plus.iter().map(|m| m[n].to_string_rows()).collect(),
                zero: self.zero.iter().map(|m| m[n].to_string_rows()).collect(),
                minus: self.minus.iter().map(|m| m[n].to_string_rows()).collect(),
            });
        }
        CapJson { d: self.d(), levels }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CapLevelJson {
    pub n: usize,
    pub classes: Vec<Vec<u32>>,
    pub classes_up: Vec<Vec<u32>>,
    pub classes_down: Vec<Vec<u32>>,
    /// Indexed `[j][row][col]`.
    pub plus: Vec<Vec<Vec<String>>>,
    pub zero: Vec<Vec<Vec<String>>>,
    pub minus: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CapJson {
    pub d: usize,
    pub levels: Vec<CapLevelJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// One-based coordinate.
    pub j: usize,
    pub n: usize,
    pub column: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    /// Every residual has zero norm.
    pub pass: bool,
    /// Every residual is the zero polynomial (fails only for degenerate
    /// functionals, where null vectors may survive).
    pub exact: bool,
    pub witness: Option<Witness>,
}

/// Checks `X_j p = (a+ + a0 + a-) p` for every basis polynomial `p` of every
/// available level, as polynomials modulo zero-norm vectors.
pub fn verify_quantum_decomposition(ops: &CapOperatorSet) -> DecompositionReport {
    let b = ops.basis();
    let mut exact = true;
    for j in 0..ops.d() {
        for n in 0..ops.levels() {
            for (i, p) in b.block(n).polys.iter().enumerate() {
                let mut rhs = b.block(n + 1).combine(&ops.plus[j][n].column(i));
                rhs = rhs.add(&b.block(n).combine(&ops.zero[j][n].column(i))).expect("same d");
                if n > 0 {
                    rhs = rhs.add(&b.block(n - 1).combine(&ops.minus[j][n].column(i))).expect("same d");
                }
                let residual = p.times_variable(j).sub(&rhs).expect("same d");
                if residual.is_zero() {
                    continue;
                }
                exact = false;
                let null = match b.expand(&residual) {
                    Ok(comps) => comps.iter().enumerate().all(|(k, c)| b.block(k).is_null(c)),
                    Err(_) => false,
                };
                if !null {
                    return DecompositionReport {
                        pass: false,
                        exact,
                        witness: Some(Witness { j: j + 1, n, column: i, detail: residual.to_string() }),
                    };
                }
            }
        }
    }
    DecompositionReport { pass: true, exact, witness: None }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjointReport {
    pub pass: bool,
    /// `G_{n+1} plus[j][n] = minus[j][n+1]^T G_n`.
    pub adjoint: bool,
    /// `G_n zero[j][n]` symmetric.
    pub preservation_symmetric: bool,
    /// `plus[j][n+1] plus[k][n] = plus[k][n+1] plus[j][n]`.
    pub creations_commute: bool,
    pub witness: Option<Witness>,
}

pub fn verify_adjoints(ops: &CapOperatorSet) -> AdjointReport {
    let mut report = AdjointReport {
        pass: true,
        adjoint: true,
        preservation_symmetric: true,
        creations_commute: true,
        witness: None,
    };
    let fail = |r: &mut AdjointReport, j: usize, n: usize, detail: &str| {
        r.pass = false;
        if r.witness.is_none() {
            r.witness = Some(Witness { j: j + 1, n, column: 0, detail: detail.to_string() });
        }
    };
    let levels = ops.levels();
    for j in 0..ops.d() {
        for n in 0..levels {
            let g = ops.gram(n);
            if !g.mul(&ops.zero[j][n]).is_symmetric() {
                report.preservation_symmetric = false;
                fail(&mut report, j, n, "G_n a0 is not symmetric");
            }
            if n + 1 < levels {
                let lhs = ops.gram(n + 1).mul(&ops.plus[j][n]);
                let rhs = ops.minus[j][n + 1].transpose().mul(g);
                if lhs != rhs {
                    report.adjoint = false;
                    fail(&mut report, j, n, "G_{n+1} a+ differs from (a-)^T G_n");
                }
                for k in 0..ops.d() {
                    let jk = ops.plus[j][n + 1].mul(&ops.plus[k][n]);
                    let kj = ops.plus[k][n + 1].mul(&ops.plus[j][n]);
                    if jk != kj {
                        report.creations_commute = false;
                        fail(&mut report, j, n, &format!("creations {} and {} do not commute", j + 1, k + 1));
                    }
                }
            }
        }
    }
    report
}
