//! Jacobi sequences `(Omega_n, alpha_{j|n})` over the symmetric class basis,
//! rank analysis for atomic functionals, and the converse direction: moments
//! recovered from the sequences through a truncated interacting Fock space.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cap_operators::CapOperatorSet;
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, ldl_psd, solve_modulo_kernel, Ldl, QMatrix};
use crate::moments::MomentFunctional;
use crate::multiindex::{enumerate_classes, ClassBasis, MultiIndex};
use crate::orthodecomp::decompose;
use crate::rational::{binomial, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiSequencePair {
    d: usize,
    classes: Vec<ClassBasis>,
    omega: Vec<QMatrix>,
    ldl: Vec<Ldl>,
    /// `alpha[n][j]`; may stop one level short of `omega`.
    alpha: Vec<Vec<QMatrix>>,
}

impl JacobiSequencePair {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Highest level carrying `Omega`.
    pub fn max_level(&self) -> usize {
        self.omega.len() - 1
    }

    /// Number of levels carrying `alpha` (levels `0..alpha_levels()`).
    pub fn alpha_levels(&self) -> usize {
        self.alpha.len()
    }

    pub fn classes(&self, n: usize) -> &ClassBasis {
        &self.classes[n]
    }

    pub fn omega(&self, n: usize) -> &QMatrix {
        &self.omega[n]
    }

    /// `alpha_{e_j|n}` for zero-based `j`.
    pub fn alpha(&self, n: usize, j: usize) -> &QMatrix {
        &self.alpha[n][j]
    }

    /// `alpha_{v|n} = sum_j v_j alpha_{e_j|n}`.
    pub fn alpha_v(&self, n: usize, v: &[Q]) -> Result<QMatrix> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: v.len() });
        }
        if n >= self.alpha.len() {
            return Err(Error::InsufficientDepth { needed: n, available: self.alpha.len().saturating_sub(1) });
        }
        let dim = self.classes[n].len();
        Ok(v.iter().zip(&self.alpha[n]).fold(QMatrix::zeros(dim, dim), |acc, (vj, a)| acc.add(&a.scale(vj))))
    }

    pub fn rank(&self, n: usize) -> usize {
        self.ldl[n].rank()
    }

    pub fn omega_ldl(&self, n: usize) -> &Ldl {
        &self.ldl[n]
    }

    /// Same pair restricted to levels `0..=max_level`.
    pub fn truncated(&self, max_level: usize) -> JacobiSequencePair {
        let top = max_level.min(self.max_level());
        JacobiSequencePair {
            d: self.d,
            classes: self.classes[..=top].to_vec(),
            omega: self.omega[..=top].to_vec(),
            ldl: self.ldl[..=top].to_vec(),
            alpha: self.alpha[..self.alpha.len().min(top + 1)].to_vec(),
        }
    }
}

/// Chain matrices `C_n`: column `c` holds the level-`n` basis coordinates of
/// `a+_{j_n} ... a+_{j_1} 1` for the sorted representative of class `c`.
fn chains(ops: &CapOperatorSet, max_level: usize) -> Result<(Vec<ClassBasis>, Vec<QMatrix>)> {
    let d = ops.d();
    let mut classes = vec![enumerate_classes(d, 0)?];
    // Phi = 1, whatever normalization the degree-0 basis element carries.
    let p0 = &ops.basis().block(0).polys[0];
    let mut cs = vec![QMatrix::diagonal(&[p0.coeff(&MultiIndex::zero(d)).recip()])];
    for n in 1..=max_level {
        let cb = enumerate_classes(d, n)?;
        let prev = &cs[n - 1];
        let mut c = QMatrix::zeros(ops.basis().block(n).dim(), cb.len());
        for (col, class) in cb.classes().iter().enumerate() {
            let j = *class.sorted_tuple().last().expect("n >= 1") - 1;
            let parent = class.lowered(j).expect("slot j is occupied");
            let pc = classes[n - 1].index_of(&parent).expect("parent class exists");
            c.set_column(col, &ops.plus[j][n - 1].mul_vec(&prev.column(pc)));
        }
        classes.push(cb);
        cs.push(c);
    }
    Ok((classes, cs))
}

fn check_depth(ops: &CapOperatorSet, needed: usize) -> Result<()> {
    if ops.levels() < needed {
        return Err(Error::InsufficientDepth { needed, available: ops.levels() });
    }
    Ok(())
}

/// `Omega_n = C_n^T G_n C_n` for `n <= max_level`. Needs cap levels
/// `0..max_level`.
pub fn compute_omegas(ops: &CapOperatorSet, max_level: usize) -> Result<JacobiSequencePair> {
    check_depth(ops, max_level)?;
    let (classes, cs) = chains(ops, max_level)?;
    let mut omega = Vec::new();
    let mut ldl = Vec::new();
    for (n, c) in cs.iter().enumerate() {
        let w = c.transpose().mul(ops.gram(n)).mul(c);
        ldl.push(ldl_psd(&w)?);
        omega.push(w);
    }
    Ok(JacobiSequencePair { d: ops.d(), classes, omega, ldl, alpha: Vec::new() })
}

/// Full Jacobi sequences to `max_level`. Needs cap levels `0..=max_level`,
/// i.e. a basis of degree `max_level + 1`.
///
/// `alpha_{e_j|n}` solves `Omega_n A = C^T G_n a0_j C` modulo the kernel of
/// `Omega_n`; rows on zero-norm classes are set to zero.
pub fn compute(ops: &CapOperatorSet, max_level: usize) -> Result<JacobiSequencePair> {
    check_depth(ops, max_level + 1)?;
    let mut seq = compute_omegas(ops, max_level)?;
    let (_, cs) = chains(ops, max_level)?;
    for (n, c) in cs.iter().enumerate() {
        let ct_g = c.transpose().mul(ops.gram(n));
        let mut per_j = Vec::with_capacity(ops.d());
        for j in 0..ops.d() {
            let rhs = ct_g.mul(&ops.zero[j][n]).mul(c);
            let a = solve_modulo_kernel(&seq.omega[n], &seq.ldl[n], &rhs).map_err(|e| match e {
                Error::Representation(m) => {
                    Error::Representation(format!("alpha_{} at level {n}: {m}", j + 1))
                }
                other => other,
            })?;
            per_j.push(a);
        }
        seq.alpha.push(per_j);
    }
    Ok(seq)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankEntry {
    pub n: usize,
    pub rank: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankProfile {
    pub levels: Vec<RankEntry>,
    /// Deficient at `n0` implies deficient at every later level.
    pub deficiency_propagates: bool,
    /// `Omega_{n0} = 0` implies `Omega_n = 0` for every later level.
    pub zero_propagates: bool,
    /// Appending any coordinate to a null class vector stays null.
    pub kernel_inclusion: bool,
}

fn append(v: &[Q], from: &ClassBasis, to: &ClassBasis, j: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); to.len()];
    for (i, c) in from.classes().iter().enumerate() {
        if !v[i].is_zero() {
            let k = to.index_of(&c.raised(j)).expect("raised class exists");
            out[k] += &v[i];
        }
    }
    out
}

pub fn rank_profile(seq: &JacobiSequencePair) -> RankProfile {
    let levels: Vec<RankEntry> = (0..=seq.max_level())
        .map(|n| RankEntry { n, rank: seq.rank(n), dim: seq.classes[n].len() })
        .collect();
    let first_deficient = levels.iter().position(|e| e.rank < e.dim);
    let deficiency_propagates =
        first_deficient.is_none_or(|n0| levels[n0..].iter().all(|e| e.rank < e.dim));
    let first_zero = levels.iter().position(|e| e.rank == 0);
    let zero_propagates = first_zero.is_none_or(|n0| (n0..levels.len()).all(|n| seq.omega[n].is_zero()));
    let mut kernel_inclusion = true;
    for n in 1..=seq.max_level() {
        for v in kernel_basis(&seq.omega[n - 1], &seq.ldl[n - 1]) {
            for j in 0..seq.d {
                let w = append(&v, &seq.classes[n - 1], &seq.classes[n], j);
                if !seq.omega[n].mul_vec(&w).iter().all(Zero::is_zero) {
                    kernel_inclusion = false;
                }
            }
        }
    }
    RankProfile { levels, deficiency_propagates, zero_propagates, kernel_inclusion }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum AtomDetection {
    /// `Omega_{n0}` is the first vanishing level; the functional is a sum of
    /// at most `atom_bound` point masses.
    Atomic { n0: usize, atom_bound: u64 },
    /// No level up to `max_level` vanishes.
    Inconclusive { max_level: usize },
}

/// Looks for the first level with `Omega_n = 0`. Needs moments to degree
/// `2 * max_level`.
pub fn detect_atoms(f: &MomentFunctional, max_level: usize) -> Result<AtomDetection> {
    let basis = decompose(f, max_level)?;
    let ops = CapOperatorSet::build(&basis)?;
    let seq = compute_omegas(&ops, max_level)?;
    Ok(detect_in(&seq))
}

pub fn detect_in(seq: &JacobiSequencePair) -> AtomDetection {
    match (0..=seq.max_level()).find(|&n| seq.omega[n].is_zero()) {
        Some(n0) => AtomDetection::Atomic {
            n0,
            atom_bound: if n0 == 0 { 0 } else { binomial((n0 - 1 + seq.d) as u64, seq.d as u64) },
        },
        None => AtomDetection::Inconclusive { max_level: seq.max_level() },
    }
}

/// Truncated interacting Fock space built from a Jacobi sequence pair:
/// `A+_j` shifts classes, `A-_j` is its adjoint for `<., Omega_n .>` and
/// `alpha` acts levelwise.
pub struct FockModel<'a> {
    seq: &'a JacobiSequencePair,
    /// `minus[n][j]` maps level `n` to level `n - 1`; `minus[0]` is empty.
    minus: Vec<Vec<QMatrix>>,
}

impl<'a> FockModel<'a> {
    pub fn new(seq: &'a JacobiSequencePair) -> Result<Self> {
        let mut minus = vec![Vec::new()];
        for n in 1..=seq.max_level() {
            let mut per_j = Vec::with_capacity(seq.d);
            for j in 0..seq.d {
                let from = &seq.classes[n - 1];
                let to = &seq.classes[n];
                let mut s = QMatrix::zeros(to.len(), from.len());
                for (i, c) in from.classes().iter().enumerate() {
                    s.set(to.index_of(&c.raised(j)).expect("raised class exists"), i, Q::one());
                }
                let rhs = s.transpose().mul(&seq.omega[n]);
                per_j.push(solve_modulo_kernel(&seq.omega[n - 1], &seq.ldl[n - 1], &rhs)?);
            }
            minus.push(per_j);
        }
        Ok(FockModel { seq, minus })
    }

    fn apply(&self, state: &[Vec<Q>], j: usize, keep: usize) -> Result<Vec<Vec<Q>>> {
        let seq = self.seq;
        let top = (state.len()).min(keep + 1);
        let mut out: Vec<Vec<Q>> = (0..top).map(|n| vec![Q::zero(); seq.classes[n].len()]).collect();
        for (n, v) in state.iter().enumerate() {
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            if n < keep {
                if n + 1 > seq.max_level() {
                    return Err(Error::InsufficientDepth { needed: n + 1, available: seq.max_level() });
                }
                if out.len() <= n + 1 {
                    out.push(vec![Q::zero(); seq.classes[n + 1].len()]);
                }
                let w = append(v, &seq.classes[n], &seq.classes[n + 1], j);
                for (a, b) in out[n + 1].iter_mut().zip(w) {
                    *a += b;
                }
            }
            if n <= keep {
                if n >= seq.alpha.len() {
                    return Err(Error::InsufficientDepth { needed: n, available: seq.alpha.len().saturating_sub(1) });
                }
                for (a, b) in out[n].iter_mut().zip(seq.alpha[n][j].mul_vec(v)) {
                    *a += b;
                }
            }
            if n >= 1 && n - 1 <= keep {
                for (a, b) in out[n - 1].iter_mut().zip(self.minus[n][j].mul_vec(v)) {
                    *a += b;
                }
            }
        }
        Ok(out)
    }

    /// `<Phi, prod_j X_j^{beta_j} Phi>`.
    pub fn moment(&self, beta: &MultiIndex) -> Result<Q> {
        if beta.d() != self.seq.d {
            return Err(Error::DimensionMismatch { expected: self.seq.d, got: beta.d() });
        }
        let steps: Vec<usize> = (0..self.seq.d)
            .rev()
            .flat_map(|j| std::iter::repeat_n(j, beta.get(j) as usize))
            .collect();
        let mut state = vec![vec![Q::one()]];
        for (s, &j) in steps.iter().enumerate() {
            // components above the remaining number of steps cannot return
            let remaining = steps.len() - s - 1;
            state = self.apply(&state, j, remaining)?;
        }
        Ok(self.seq.omega[0].get(0, 0) * &state[0][0])
    }
}

/// Moment `phi(x^beta)` recovered from the sequences alone.
pub fn reconstruct_moments(seq: &JacobiSequencePair, beta: &MultiIndex) -> Result<Q> {
    FockModel::new(seq)?.moment(beta)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelJson {
    pub n: usize,
    pub classes: Vec<Vec<u32>>,
    pub omega: Vec<Vec<String>>,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<Vec<String>>>>,
}

impl JacobiSequencePair {
    pub fn level_json(&self, n: usize) -> LevelJson {
        LevelJson {
            n,
            classes: self.classes[n].classes().iter().map(|c| c.entries().to_vec()).collect(),
            omega: self.omega[n].to_string_rows(),
            rank: self.rank(n),
            alpha: self.alpha.get(n).map(|a| a.iter().map(QMatrix::to_string_rows).collect()),
        }
    }
}

/// Convenience: decompose, build operators, compute to `max_level`.
pub fn sequences_for(f: &MomentFunctional, max_level: usize) -> Result<JacobiSequencePair> {
    let basis = decompose(f, max_level + 1)?;
    compute(&CapOperatorSet::build(&basis)?, max_level)
}
