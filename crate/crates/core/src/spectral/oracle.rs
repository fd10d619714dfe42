//! Pages computed straight from the subquotient description
//!
//! ```text
//! Z^k_n = { x ∈ F_n : δx ∈ F_{n+1+kΣ} }
//! E^k_n = Z^k_n / ( Z^{k-1}_{n+Σ} + δ Z^{k-1}_{n-1-(k-1)Σ} )
//! ```
//!
//! with no recursion between pages. Only intended for small complexes.

use std::collections::BTreeMap;

use crate::complex::FilteredComplex;
use crate::gf2::{subquotient_dim, BitMatrix, Subspace};

use super::{Cell, Page, SpectralError};

/// The subspaces `Z^k_n` and the page denominators of one complex.
pub struct FiltrationSpaces<'a> {
    complex: &'a FilteredComplex,
    delta: BitMatrix,
}

impl<'a> FiltrationSpaces<'a> {
    pub fn new(complex: &'a FilteredComplex) -> Self {
        Self {
            complex,
            delta: complex.coboundary(),
        }
    }

    pub fn complex(&self) -> &FilteredComplex {
        self.complex
    }

    pub fn delta(&self) -> &BitMatrix {
        &self.delta
    }

    fn kernel_on(&self, support: &[usize], rows: &[usize]) -> Subspace {
        let n = self.complex.len();
        let k = self.delta.submatrix(rows, support).kernel();
        Subspace::span(n, k.basis().iter().map(|v| v.embed(n, support)))
    }

    /// `F_n` as a subspace.
    pub fn filtration(&self, n: i64) -> Subspace {
        Subspace::coordinate(self.complex.len(), &self.complex.filtration_support(n))
    }

    /// `Z^k_n`; `None` stands for `k = ∞` (cocycles in `F_n`).
    pub fn z(&self, k: Option<usize>, n: i64) -> Subspace {
        let c = self.complex;
        let support = c.filtration_support(n);
        let rows: Vec<usize> = match k {
            Some(k) => {
                let bound = n + 1 + k as i64 * c.sigma_maslov();
                c.residue_support(n + 1)
                    .into_iter()
                    .filter(|&g| c.maslov(g) < bound)
                    .collect()
            }
            None => c.residue_support(n + 1),
        };
        self.kernel_on(&support, &rows)
    }

    /// Denominator of `E^k_n` (k >= 1); `None` stands for `E^∞`.
    pub fn denominator(&self, k: Option<usize>, n: i64) -> Subspace {
        let sigma = self.complex.sigma_maslov();
        match k {
            Some(k) => {
                assert!(k >= 1);
                let upper = self.z(Some(k - 1), n + sigma);
                let source = n - 1 - (k as i64 - 1) * sigma;
                let bounded = self.z(Some(k - 1), source).map(&self.delta).expect("square");
                upper.sum(&bounded).expect("same ambient")
            }
            None => {
                let upper = self.z(None, n + sigma);
                let all = self.delta.image();
                let bounded = all.intersection(&self.filtration(n)).expect("same ambient");
                upper.sum(&bounded).expect("same ambient")
            }
        }
    }

    fn page_from(&self, k: Option<usize>, label: usize) -> Page {
        let c = self.complex;
        let sigma = c.sigma_maslov();
        let mut cells = BTreeMap::new();
        for n in c.grades() {
            let q = subquotient_dim(&self.z(k, n), &self.denominator(k, n)).expect("same ambient");
            if q.dim > 0 {
                cells.insert(
                    n,
                    Cell {
                        n,
                        j: n.rem_euclid(sigma),
                        dim: q.dim,
                        basis: q.representatives,
                    },
                );
            }
        }
        Page {
            k: label,
            sigma,
            cells,
        }
    }
}

/// `E^k` from the explicit subquotient formula.
pub fn page_oracle(c: &FilteredComplex, k: usize) -> Result<Page, SpectralError> {
    if k < 1 {
        return Err(SpectralError::InvalidPage(k));
    }
    Ok(FiltrationSpaces::new(c).page_from(Some(k), k))
}

/// `E^∞ = Z^∞_n / (Z^∞_{n+Σ} + B ∩ F_n)`, labelled with the stabilization bound.
pub fn einfty_oracle(c: &FilteredComplex) -> Page {
    FiltrationSpaces::new(c).page_from(None, super::stabilization_bound(c))
}
