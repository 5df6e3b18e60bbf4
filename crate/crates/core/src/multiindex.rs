//! Multi-indices in N^d and the occupation-vector classes of {1..d}^n.
//!
//! A tuple `(i_1, .., i_n)` of coordinate labels and any permutation of it
//! are identified; the class is labelled by its occupation vector
//! `(n_1, .., n_d)` where `n_l` counts the occurrences of `l`. These classes
//! index the canonical basis of the n-th symmetric tensor power of C^d.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{binomial, factorial};

/// An exponent vector / occupation vector `(b_1, .., b_d)`.
///
/// Ordered graded reverse-lexicographically: first by total degree, then,
/// within a degree, `(n, 0, .., 0)` comes first and `(0, .., 0, n)` last.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

/// Occupation vectors are multi-indices; the alias documents intent.
pub type OccupationVector = MultiIndex;

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// The unit vector `e_j` for a zero-based slot `j`.
    pub fn unit(d: usize, j: usize) -> Self {
        let mut v = vec![0; d];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    /// `|b| = b_1 + .. + b_d`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    /// Componentwise shift by `r`; fails when a component would go negative.
    pub fn shift(&self, r: &[i64]) -> Result<MultiIndex> {
        if r.len() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), got: r.len() });
        }
        let mut out = Vec::with_capacity(self.d());
        for (slot, (&b, &s)) in self.0.iter().zip(r).enumerate() {
            let v = b as i64 + s;
            if v < 0 {
                return Err(Error::OutOfLattice { slot });
            }
            out.push(v as u32);
        }
        Ok(MultiIndex(out))
    }

    /// `self + e_j` (zero-based `j`).
    pub fn raised(&self, j: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[j] += 1;
        MultiIndex(v)
    }

    /// `self - e_j` (zero-based `j`), `None` at the lattice boundary.
    pub fn lowered(&self, j: usize) -> Option<MultiIndex> {
        if self.0[j] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[j] -= 1;
        Some(MultiIndex(v))
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `b! = b_1! .. b_d!`.
    pub fn factorial(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, &b| acc * factorial(b as u64))
    }

    /// The weakly increasing tuple of one-based labels with this occupation.
    pub fn sorted_tuple(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(l, &c)| std::iter::repeat_n(l + 1, c as usize))
            .collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
            .then_with(|| self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// `beta!` as a free function.
pub fn factorial_of(beta: &MultiIndex) -> BigInt {
    beta.factorial()
}

/// Shift `beta` by `r`, see [`MultiIndex::shift`].
pub fn shift(beta: &MultiIndex, r: &[i64]) -> Result<MultiIndex> {
    beta.shift(r)
}

/// Occupation vector of a tuple of one-based labels in `{1..d}`.
pub fn occupation(d: usize, tuple: &[usize]) -> Result<OccupationVector> {
    if d == 0 {
        return Err(Error::InvalidDimension);
    }
    let mut counts = vec![0u32; d];
    for &i in tuple {
        if i == 0 || i > d {
            return Err(Error::InvalidIndex { index: i, d });
        }
        counts[i - 1] += 1;
    }
    Ok(MultiIndex(counts))
}

/// The classes of `{1..d}^n`, one occupation vector each, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassBasis {
    d: usize,
    n: usize,
    classes: Vec<OccupationVector>,
    position: HashMap<OccupationVector, usize>,
}

impl ClassBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> &[OccupationVector] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, class: &OccupationVector) -> Option<usize> {
        self.position.get(class).copied()
    }
}

/// All occupation vectors of weight `n` over `d` slots, canonically ordered.
pub fn enumerate_classes(d: usize, n: usize) -> Result<ClassBasis> {
    if d == 0 {
        return Err(Error::InvalidDimension);
    }
    let mut classes = Vec::with_capacity(binomial((n + d - 1) as u64, (d - 1) as u64) as usize);
    let mut current = vec![0u32; d];
    compositions(&mut current, 0, n as u32, &mut classes);
    classes.sort();
    let position = classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    Ok(ClassBasis { d, n, classes, position })
}

fn compositions(current: &mut Vec<u32>, slot: usize, left: u32, out: &mut Vec<MultiIndex>) {
    if slot + 1 == current.len() {
        current[slot] = left;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for v in 0..=left {
        current[slot] = v;
        compositions(current, slot + 1, left - v, out);
    }
    current[slot] = 0;
}
