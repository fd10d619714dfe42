//! Polynomial bookkeeping on spectral pages and the torus obstruction.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::complex::FilteredComplex;
use crate::gf2::BitMatrix;
use crate::spectral::{differential_on, stabilization_bound, Page, SpectralError, SpectralSequence};

pub mod audin;
pub mod decomposition;
pub mod laurent;

pub use audin::{audin_decide, AudinReport};
pub use decomposition::{decomposition_search, rescan_descending, verify_witness, Decomposition};
pub use laurent::LaurentPoly;

/// `Σ_n dim E^k_n t^n`.
pub fn poincare_laurent(p: &Page) -> LaurentPoly {
    LaurentPoly::from_coeffs(p.cells.values().map(|c| (c.n, BigInt::from(c.dim))))
}

/// A failure of `P(E^k) = P(E^{k+1}) + (1 + t^{-kΣ-1}) P(B^k)`, or of its length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecursionViolation {
    /// The identity fails on page `k`; `defect` is `lhs - rhs`.
    Identity { k: usize, defect: LaurentPoly },
    /// `E^{k_stable}` is stable, yet the last nonzero differential is on page `last_nonzero`.
    Length {
        k_stable: usize,
        last_nonzero: Option<usize>,
    },
    Spectral(SpectralError),
}

impl fmt::Display for RecursionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecursionViolation::Identity { k, defect } => {
                write!(f, "page {k}: recursion defect {defect}")
            }
            RecursionViolation::Length {
                k_stable,
                last_nonzero,
            } => match last_nonzero {
                Some(l) => write!(f, "k_stable = {k_stable} but last nonzero differential is d^{l}"),
                None => write!(f, "k_stable = {k_stable} but every differential vanishes"),
            },
            RecursionViolation::Spectral(e) => write!(f, "{e}"),
        }
    }
}

/// Image polynomial `P(B^k) = Σ_n rank(d^k into n) t^n`.
fn image_poly(page: &Page, d: &BTreeMap<i64, BitMatrix>) -> LaurentPoly {
    LaurentPoly::from_coeffs(
        d.iter()
            .map(|(&n, m)| (page.target(n), BigInt::from(m.rank()))),
    )
}

/// Checks the page recursion for every page up to the stabilization bound.
/// The image ranks come from the explicit differentials, the pages from the
/// pairing, so the two sides are computed independently.
pub fn check_page_recursion(c: &FilteredComplex) -> Vec<RecursionViolation> {
    let ss = SpectralSequence::new(c);
    let bound = stabilization_bound(c);
    let sigma = c.sigma_maslov();
    let mut out = Vec::new();
    let mut last_nonzero = None;
    let run = |out: &mut Vec<RecursionViolation>, last: &mut Option<usize>| -> Result<(), SpectralError> {
        let mut current = ss.page(1)?;
        for k in 1..=bound {
            let next = ss.page(k + 1)?;
            let d = differential_on(c, &current)?;
            let b = image_poly(&current, &d);
            if !b.is_zero() {
                *last = Some(k);
            }
            let rhs = poincare_laurent(&next) + &b + &b.shift(-(k as i64) * sigma - 1);
            let defect = poincare_laurent(&current) - rhs;
            if !defect.is_zero() {
                out.push(RecursionViolation::Identity { k, defect });
            }
            current = next;
        }
        Ok(())
    };
    if let Err(e) = run(&mut out, &mut last_nonzero) {
        out.push(RecursionViolation::Spectral(e));
        return out;
    }
    let k_stable = ss.k_stable();
    if k_stable != last_nonzero.map_or(1, |l| l + 1) {
        out.push(RecursionViolation::Length {
            k_stable,
            last_nonzero,
        });
    }
    out
}

/// `C(m, l)`, zero when `l > m`.
pub fn binomial(m: u64, l: u64) -> BigInt {
    if l > m {
        return BigInt::zero();
    }
    let l = l.min(m - l);
    (0..l).fold(BigInt::one(), |acc, i| acc * (m - i) / (i + 1))
}

/// `Σ_{l=0}^{N} (-1)^l C(m, l)`.
pub fn alternating_binomial_sum(m: u64, n: u64) -> BigInt {
    (0..=n.min(m)).fold(BigInt::zero(), |acc, l| {
        let c = binomial(m, l);
        if l % 2 == 0 {
            acc + c
        } else {
            acc - c
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BalanceError {
    #[error("rank balance needs an even Maslov period, got {0}")]
    OddPeriod(i64),
    #[error("rank balance needs E^∞ = 0, but it has total dimension {0}")]
    NonzeroLimit(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// With Σ even every `d^k` flips the parity of the grade. Given `E^∞ = 0`
/// this checks, page by page, that the ranks of `d^k` account for the drop
/// `E^k -> E^{k+1}` cell by cell and that the parity-signed dimension of
/// every page cancels.
pub fn rank_balance(c: &FilteredComplex) -> Result<bool, BalanceError> {
    let sigma = c.sigma_maslov();
    if sigma % 2 != 0 {
        return Err(BalanceError::OddPeriod(sigma));
    }
    let ss = SpectralSequence::new(c);
    let limit = ss.einfty();
    if !limit.is_zero() {
        return Err(BalanceError::NonzeroLimit(limit.total_dim()));
    }
    let sign = |n: i64| if n.rem_euclid(2) == 0 { 1i64 } else { -1 };
    let mut current = ss.page(1)?;
    for k in 1..=stabilization_bound(c) {
        let signed: i64 = current.cells.values().map(|cell| sign(cell.n) * cell.dim as i64).sum();
        if signed != 0 {
            return Ok(false);
        }
        let next = ss.page(k + 1)?;
        let d = differential_on(c, &current)?;
        let mut drop: BTreeMap<i64, usize> = BTreeMap::new();
        for (&n, m) in &d {
            let r = m.rank();
            *drop.entry(n).or_default() += r;
            *drop.entry(current.target(n)).or_default() += r;
        }
        for n in current.cells.keys().chain(drop.keys()) {
            let lost = drop.get(n).copied().unwrap_or(0);
            if current.dim(*n) != next.dim(*n) + lost {
                return Ok(false);
            }
        }
        current = next;
    }
    Ok(true)
}
