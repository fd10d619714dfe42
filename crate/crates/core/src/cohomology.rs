//! Integer-graded cohomology, Z_Σ-graded cohomology, and the filtration the
//! action window induces on the latter.
//!
//! All representatives live in the ambient space spanned by every generator
//! of the complex, indexed by generator position.

use std::collections::BTreeMap;

use crate::complex::FilteredComplex;
use crate::gf2::{subquotient_dim, BitVec, Subspace};

/// Dimensions and basis representatives indexed by an integer grade.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedDims {
    /// Grade -> dimension; zero dimensions omitted.
    pub table: BTreeMap<i64, usize>,
    pub representatives: BTreeMap<i64, Vec<BitVec>>,
}

impl GradedDims {
    pub fn dim(&self, n: i64) -> usize {
        self.table.get(&n).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.table.values().sum()
    }

    fn record(&mut self, n: i64, reps: Vec<BitVec>) {
        if !reps.is_empty() {
            self.table.insert(n, reps.len());
            self.representatives.insert(n, reps);
        }
    }
}

/// Cocycles of `delta` supported on `support`, with `delta` read only on `rows`.
fn cocycles(c: &FilteredComplex, delta: &crate::gf2::BitMatrix, support: &[usize], rows: &[usize]) -> Subspace {
    let k = delta.submatrix(rows, support).kernel();
    Subspace::span(c.len(), k.basis().iter().map(|v| v.embed(c.len(), support)))
}

fn coboundaries(c: &FilteredComplex, delta: &crate::gf2::BitMatrix, support: &[usize]) -> Subspace {
    Subspace::span(c.len(), support.iter().map(|&g| delta.column(g)))
}

/// `I_n`: cohomology of the shift-0 differential, grade by grade.
pub fn integer_graded_cohomology(c: &FilteredComplex) -> GradedDims {
    let d0 = c.coboundary_shift_zero();
    let mut out = GradedDims::default();
    for n in c.grades() {
        let here = c.generators_in_grade(n);
        let above = c.generators_in_grade(n + 1);
        let below = c.generators_in_grade(n - 1);
        let z = cocycles(c, &d0, &here, &above);
        let b = coboundaries(c, &d0, &below);
        let q = subquotient_dim(&z, &b).expect("same ambient");
        out.record(n, q.representatives);
    }
    out
}

/// `HF^j`, `j` in `0..Σ`: cohomology of the total coboundary.
pub fn zsigma_cohomology(c: &FilteredComplex) -> GradedDims {
    let delta = c.coboundary();
    let sigma = c.sigma_maslov();
    let mut out = GradedDims::default();
    for j in 0..sigma {
        let here = c.residue_support(j);
        if here.is_empty() {
            continue;
        }
        let next = c.residue_support(j + 1);
        let prev = c.residue_support(j - 1);
        let z = cocycles(c, &delta, &here, &next);
        let b = coboundaries(c, &delta, &prev);
        let q = subquotient_dim(&z, &b).expect("same ambient");
        out.record(j, q.representatives);
    }
    out
}

/// The descending filtration `F_n HF^j`, tabulated over the grades where it changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HfFiltration {
    pub sigma: i64,
    /// Residue j -> ascending list of `(n, dim F_n HF^j)` with `n ≡ j`. The
    /// first entry equals `dim HF^j`, the last entry is 0.
    pub chains: BTreeMap<i64, Vec<(i64, usize)>>,
}

impl HfFiltration {
    /// `dim F_n HF^j` for `j ≡ n`; constant below and above the tabulated range.
    pub fn dim(&self, n: i64) -> usize {
        let j = n.rem_euclid(self.sigma);
        let Some(chain) = self.chains.get(&j) else {
            return 0;
        };
        match chain.iter().rev().find(|(m, _)| *m <= n) {
            Some(&(_, d)) => d,
            None => chain.first().map_or(0, |&(_, d)| d),
        }
    }

    /// `dim F_n HF / F_{n+Σ} HF`, the associated graded of the filtration.
    pub fn quotient(&self, n: i64) -> usize {
        self.dim(n) - self.dim(n + self.sigma)
    }
}

/// Image of `H(F_n C_j) -> HF^j`, for every `n` between the lowest and highest grade.
pub fn hf_filtration(c: &FilteredComplex) -> HfFiltration {
    let sigma = c.sigma_maslov();
    let delta = c.coboundary();
    let mut chains = BTreeMap::new();
    if let Some((lo, hi)) = c.grade_range() {
        for j in 0..sigma {
            let here = c.residue_support(j);
            if here.is_empty() {
                continue;
            }
            let next = c.residue_support(j + 1);
            let prev = c.residue_support(j - 1);
            let boundaries = coboundaries(c, &delta, &prev);
            // lowest n ≡ j with n <= lo, then step by Σ until past hi
            let mut n = lo - (lo - j).rem_euclid(sigma);
            let mut chain = Vec::new();
            loop {
                let support = c.filtration_support(n);
                let z = cocycles(c, &delta, &support, &next);
                let d = subquotient_dim(&z, &boundaries).expect("same ambient").dim;
                chain.push((n, d));
                if n > hi {
                    break;
                }
                n += sigma;
            }
            chains.insert(j, chain);
        }
    }
    HfFiltration { sigma, chains }
}
