//! The spectral sequence of the action filtration.
//!
//! `E^k_{n,j}` is indexed by the integer grade `n` (the residue `j = n mod Σ`
//! is carried along for reporting). The differential `d^k` maps
//! `E^k_n -> E^k_{n+kΣ+1}`. Pages are read off a single column reduction of
//! the coboundary (see [`reduction`]); [`oracle`] recomputes them from the
//! subquotient formulas as an independent check.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::FilteredComplex;
use crate::gf2::{BitMatrix, BitVec, CosetSolver, Gf2Error};

pub mod oracle;
pub mod reduction;

pub use oracle::{einfty_oracle, page_oracle, FiltrationSpaces};
use reduction::Reduction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error("page index must be at least 1, got {0}")]
    InvalidPage(usize),
    #[error("class at grade {n} does not reduce in the page-{k} cell at grade {target}")]
    Inconsistent { k: usize, n: i64, target: i64 },
    #[error(transparent)]
    Linear(#[from] Gf2Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub n: i64,
    pub j: i64,
    pub dim: usize,
    /// Coset representatives, one per basis class.
    pub basis: Vec<BitVec>,
}

/// One page; only nonzero cells are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub k: usize,
    pub sigma: i64,
    pub cells: BTreeMap<i64, Cell>,
}

impl Page {
    pub fn dim(&self, n: i64) -> usize {
        self.cells.get(&n).map_or(0, |c| c.dim)
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.cells.iter().map(|(&n, c)| (n, c.dim)).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.cells.values().map(|c| c.dim).sum()
    }

    /// Sum of cell dimensions per residue class.
    pub fn residue_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for c in self.cells.values() {
            *out.entry(c.j).or_insert(0) += c.dim;
        }
        out
    }

    /// Grade hit by `d^k` out of grade `n`.
    pub fn target(&self, n: i64) -> i64 {
        n + self.sigma * self.k as i64 + 1
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Upper bound for `k(L)`: `1 + ceil((μ_max - μ_min) / Σ)`.
pub fn stabilization_bound(c: &FilteredComplex) -> usize {
    match c.grade_range() {
        None => 1,
        Some((lo, hi)) => 1 + ((hi - lo) as usize).div_ceil(c.sigma_maslov() as usize),
    }
}

/// All pages of one complex, sharing one reduction.
pub struct SpectralSequence<'a> {
    complex: &'a FilteredComplex,
    reduction: Reduction,
}

impl<'a> SpectralSequence<'a> {
    pub fn new(complex: &'a FilteredComplex) -> Self {
        Self {
            complex,
            reduction: Reduction::new(complex),
        }
    }

    pub fn complex(&self) -> &FilteredComplex {
        self.complex
    }

    pub fn reduction(&self) -> &Reduction {
        &self.reduction
    }

    pub fn page(&self, k: usize) -> Result<Page, SpectralError> {
        if k < 1 {
            return Err(SpectralError::InvalidPage(k));
        }
        let c = self.complex;
        let sigma = c.sigma_maslov();
        let mut cells: BTreeMap<i64, Cell> = BTreeMap::new();
        for (g, role) in self.reduction.roles().iter().enumerate() {
            if !role.alive_on(k) {
                continue;
            }
            let n = c.maslov(g);
            let cell = cells.entry(n).or_insert_with(|| Cell {
                n,
                j: n.rem_euclid(sigma),
                dim: 0,
                basis: Vec::new(),
            });
            cell.dim += 1;
            cell.basis.push(self.reduction.representative(g).clone());
        }
        Ok(Page { k, sigma, cells })
    }

    /// Least `k` with `E^k = E^∞`.
    pub fn k_stable(&self) -> usize {
        self.reduction.max_shift().map_or(1, |s| s + 1)
    }

    /// The page at the stabilization bound.
    pub fn einfty(&self) -> Page {
        self.page(stabilization_bound(self.complex))
            .expect("bound is at least 1")
    }

    /// Matrices of `d^k` per nonzero source cell, in the coset bases of `page`.
    pub fn differential(&self, k: usize) -> Result<BTreeMap<i64, BitMatrix>, SpectralError> {
        let page = self.page(k)?;
        differential_on(self.complex, &page)
    }
}

/// Matrices of `d^k` induced by δ on the representatives of `page`.
pub fn differential_on(
    c: &FilteredComplex,
    page: &Page,
) -> Result<BTreeMap<i64, BitMatrix>, SpectralError> {
    let k = page.k;
    let spaces = FiltrationSpaces::new(c);
    let mut out = BTreeMap::new();
    for (&n, cell) in &page.cells {
        let target = page.target(n);
        let Some(tcell) = page.cells.get(&target) else {
            out.insert(n, BitMatrix::zeros(0, cell.dim));
            continue;
        };
        let solver = CosetSolver::new(&spaces.denominator(Some(k), target), &tcell.basis)?;
        let columns = cell
            .basis
            .iter()
            .map(|rep| {
                solver
                    .solve(&spaces.delta().mul_vec(rep))
                    .ok_or(SpectralError::Inconsistent { k, n, target })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(n, BitMatrix::from_columns(tcell.dim, &columns)?);
    }
    Ok(out)
}

pub fn page(c: &FilteredComplex, k: usize) -> Result<Page, SpectralError> {
    SpectralSequence::new(c).page(k)
}

pub fn differential(c: &FilteredComplex, k: usize) -> Result<BTreeMap<i64, BitMatrix>, SpectralError> {
    SpectralSequence::new(c).differential(k)
}

pub fn k_stable(c: &FilteredComplex) -> usize {
    SpectralSequence::new(c).k_stable()
}

pub fn einfty(c: &FilteredComplex) -> Page {
    SpectralSequence::new(c).einfty()
}

/// One row per nonzero cell of pages `1..=max_k`: `k n j dim rank(d^k)`.
pub fn tsv_dump(c: &FilteredComplex, max_k: usize) -> Result<String, SpectralError> {
    let ss = SpectralSequence::new(c);
    let mut out = String::new();
    for k in 1..=max_k {
        let page = ss.page(k)?;
        let d = differential_on(c, &page)?;
        for (n, cell) in &page.cells {
            let rank = d.get(n).map_or(0, BitMatrix::rank);
            writeln!(out, "{k}\t{n}\t{}\t{}\t{rank}", cell.j, cell.dim).expect("string write");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{parse_rational, Generator};

    fn complex(sigma: i64, gens: &[(&str, &str, i64)], edges: &[(&str, &str)]) -> FilteredComplex {
        let rat = |s: &str| parse_rational("t", s).unwrap();
        FilteredComplex::new_checked(
            sigma,
            rat("1"),
            rat("0"),
            gens.iter()
                .map(|(id, a, m)| Generator {
                    id: id.to_string(),
                    action: rat(a),
                    maslov: *m,
                })
                .collect(),
            &edges
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn page_zero_is_rejected() {
        let c = complex(3, &[], &[]);
        assert_eq!(page(&c, 0), Err(SpectralError::InvalidPage(0)));
        assert!(differential(&c, 0).is_err());
        assert!(page_oracle(&c, 0).is_err());
    }

    #[test]
    fn empty_complex() {
        let c = complex(3, &[], &[]);
        assert!(page(&c, 1).unwrap().is_zero());
        assert!(differential(&c, 1).unwrap().is_empty());
        assert_eq!(k_stable(&c), 1);
    }

    #[test]
    fn zero_differential_pages_are_constant() {
        let c = complex(3, &[("a", "1", 0), ("b", "2", 1), ("c", "1/2", 5)], &[]);
        for k in 1..4 {
            let p = page(&c, k).unwrap();
            assert_eq!(p.dims(), c.grade_counts());
        }
        assert_eq!(k_stable(&c), 1);
    }

    #[test]
    fn shift_zero_only_has_no_higher_differentials() {
        let c = complex(3, &[("x", "2", 0), ("y", "1", 1), ("z", "1", 3)], &[("x", "y")]);
        assert_eq!(page(&c, 1).unwrap().dims(), BTreeMap::from([(3, 1)]));
        for k in 2..4 {
            assert!(differential(&c, k).unwrap().values().all(BitMatrix::is_zero));
        }
        assert_eq!(k_stable(&c), 1);
    }

    #[test]
    fn shift_one_pair_dies_at_page_two() {
        // Σ = 3: x(0) -> y(4).
        let c = complex(3, &[("x", "1", 0), ("y", "1", 4)], &[("x", "y")]);
        let p1 = page(&c, 1).unwrap();
        assert_eq!(p1.dims(), BTreeMap::from([(0, 1), (4, 1)]));
        let d1 = differential(&c, 1).unwrap();
        assert_eq!(d1[&0].rank(), 1);
        assert!(page(&c, 2).unwrap().is_zero());
        assert_eq!(k_stable(&c), 2);
        assert_eq!(tsv_dump(&c, 2).unwrap(), "1\t0\t0\t1\t1\n1\t4\t1\t1\t0\n");
    }

    #[test]
    fn bound_covers_k_stable() {
        let c = complex(3, &[("x", "1", 0), ("y", "1", 7)], &[("x", "y")]);
        assert_eq!(k_stable(&c), 3);
        assert_eq!(stabilization_bound(&c), 4);
        assert!(einfty(&c).is_zero());
        assert!(einfty_oracle(&c).is_zero());
    }
}
