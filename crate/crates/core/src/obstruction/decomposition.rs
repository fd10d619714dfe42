//! Exhaustive search for decompositions
//!
//! ```text
//! target(t) = Σ_{i=1}^{k} (1 + t^{iΣ+1}) Q_i(t),   Q_i with nonnegative integer coefficients.
//! ```
//!
//! If the target is supported on `[lo, hi]`, then `Q_i` is supported on
//! `[lo, hi - iΣ - 1]` (its top coefficient reappears at degree `+ iΣ + 1`)
//! and no coefficient can exceed the largest target coefficient. The search
//! fixes coefficients degree by degree and memoizes failed residual states,
//! so a `None` answer is exhaustive.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use super::laurent::LaurentPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("target has negative coefficient at t^{0}")]
    NegativeCoefficient(i64),
    #[error("coefficient at t^{0} is too large for exhaustive search")]
    CoefficientTooLarge(i64),
    #[error("Maslov period must be at least 1, got {0}")]
    BadPeriod(i64),
    #[error("number of summands must be at least 1, got {0}")]
    BadCount(usize),
}

/// Search space of a `None` verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub sigma: i64,
    pub k: usize,
    /// Exponent range allowed for each `Q_i`; `None` when `Q_i` must vanish.
    pub supports: Vec<Option<(i64, i64)>>,
    pub coefficient_bound: u64,
    pub states_explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    Witness(Vec<LaurentPoly>),
    Impossible(Certificate),
}

impl Decomposition {
    pub fn is_impossible(&self) -> bool {
        matches!(self, Decomposition::Impossible(_))
    }
}

/// `Σ_{i=1..k} (1 + t^{iΣ+1}) Q_i`, with `qs[0]` as `Q_1`.
pub fn recombine(sigma: i64, qs: &[LaurentPoly]) -> LaurentPoly {
    qs.iter().enumerate().fold(LaurentPoly::zero(), |acc, (i, q)| {
        let s = (i as i64 + 1) * sigma + 1;
        acc + q + &q.shift(s)
    })
}

/// Whether `qs` is a nonnegative decomposition of `target`.
pub fn verify_witness(target: &LaurentPoly, sigma: i64, qs: &[LaurentPoly]) -> bool {
    qs.iter().all(LaurentPoly::is_nonnegative) && recombine(sigma, qs) == *target
}

struct Problem {
    lo: i64,
    len: usize,
    coeffs: Vec<u64>,
    /// gap `iΣ + 1` of each summand
    gaps: Vec<usize>,
    /// highest allowed offset of each `Q_i`, if any
    tops: Vec<Option<usize>>,
}

impl Problem {
    fn new(target: &LaurentPoly, sigma: i64, k: usize) -> Result<Self, DecompositionError> {
        if sigma < 1 {
            return Err(DecompositionError::BadPeriod(sigma));
        }
        if k < 1 {
            return Err(DecompositionError::BadCount(k));
        }
        if let Some((e, _)) = target.terms().find(|(_, c)| c.is_negative()) {
            return Err(DecompositionError::NegativeCoefficient(e));
        }
        let (lo, hi) = match (target.min_exp(), target.max_exp()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => (0, -1),
        };
        let len = (hi - lo + 1).max(0) as usize;
        let coeffs = (0..len)
            .map(|d| {
                let e = lo + d as i64;
                target
                    .coeff(e)
                    .to_u64()
                    .filter(|&c| c < u64::MAX / 4)
                    .ok_or(DecompositionError::CoefficientTooLarge(e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gaps: Vec<usize> = (1..=k).map(|i| i * sigma as usize + 1).collect();
        let tops = gaps
            .iter()
            .map(|&g| (len > g).then(|| len - 1 - g))
            .collect();
        Ok(Self {
            lo,
            len,
            coeffs,
            gaps,
            tops,
        })
    }

    fn certificate(&self, sigma: i64, states: u64) -> Certificate {
        Certificate {
            sigma,
            k: self.gaps.len(),
            supports: self
                .tops
                .iter()
                .map(|t| t.map(|t| (self.lo, self.lo + t as i64)))
                .collect(),
            coefficient_bound: self.coeffs.iter().copied().max().unwrap_or(0),
            states_explored: states,
        }
    }

    fn to_polys(&self, q: &[Vec<u64>]) -> Vec<LaurentPoly> {
        q.iter()
            .map(|qi| {
                LaurentPoly::from_coeffs(
                    qi.iter()
                        .enumerate()
                        .map(|(d, &c)| (self.lo + d as i64, BigInt::from(c))),
                )
            })
            .collect()
    }
}

/// Searches for a decomposition with `k` summands.
pub fn decomposition_search(
    target: &LaurentPoly,
    sigma: i64,
    k: usize,
) -> Result<Decomposition, DecompositionError> {
    let problem = Problem::new(target, sigma, k)?;
    let mut search = Ascending {
        p: &problem,
        residual: problem.coeffs.clone(),
        q: vec![vec![0; problem.len]; k],
        failed: HashSet::new(),
        states: 0,
    };
    if search.degree(0) {
        let qs = problem.to_polys(&search.q);
        debug_assert!(verify_witness(target, sigma, &qs));
        Ok(Decomposition::Witness(qs))
    } else {
        Ok(Decomposition::Impossible(problem.certificate(sigma, search.states)))
    }
}

struct Ascending<'a> {
    p: &'a Problem,
    residual: Vec<u64>,
    q: Vec<Vec<u64>>,
    failed: HashSet<(usize, Vec<u64>)>,
    states: u64,
}

impl Ascending<'_> {
    /// Fixes `Q_i[d]` for every summand still open at offset `d`.
    fn degree(&mut self, d: usize) -> bool {
        self.states += 1;
        if d == self.p.len {
            return self.residual.iter().all(|&r| r == 0);
        }
        let key = (d, self.residual[d..].to_vec());
        if self.failed.contains(&key) {
            return false;
        }
        let active: Vec<usize> = (0..self.p.gaps.len())
            .filter(|&i| self.p.tops[i].is_some_and(|t| d <= t))
            .collect();
        let need = self.residual[d];
        let ok = self.distribute(d, &active, 0, need);
        if !ok {
            self.failed.insert(key);
        }
        ok
    }

    fn distribute(&mut self, d: usize, active: &[usize], idx: usize, remaining: u64) -> bool {
        if idx == active.len() {
            if remaining != 0 {
                return false;
            }
            let saved = self.residual[d];
            self.residual[d] = 0;
            let ok = self.degree(d + 1);
            if !ok {
                self.residual[d] = saved;
            }
            return ok;
        }
        let i = active[idx];
        let up = d + self.p.gaps[i];
        let cap = remaining.min(self.residual[up]);
        let low = if idx + 1 == active.len() { remaining } else { 0 };
        if low > cap {
            return false;
        }
        for v in low..=cap {
            self.residual[up] -= v;
            self.q[i][d] = v;
            if self.distribute(d, active, idx + 1, remaining - v) {
                return true;
            }
            self.residual[up] += v;
            self.q[i][d] = 0;
        }
        false
    }
}

/// Second, independent scan: fixes coefficients from the top degree down and
/// tries large values first. Returns a witness if one exists.
pub fn rescan_descending(
    target: &LaurentPoly,
    sigma: i64,
    k: usize,
) -> Result<Option<Vec<LaurentPoly>>, DecompositionError> {
    let problem = Problem::new(target, sigma, k)?;
    if problem.len == 0 {
        return Ok(Some(vec![LaurentPoly::zero(); k]));
    }
    let mut scan = Descending {
        p: &problem,
        residual: problem.coeffs.clone(),
        q: vec![vec![0; problem.len]; k],
        failed: HashSet::new(),
    };
    Ok(scan
        .degree(problem.len as i64 - 1)
        .then(|| problem.to_polys(&scan.q)))
}

struct Descending<'a> {
    p: &'a Problem,
    residual: Vec<u64>,
    q: Vec<Vec<u64>>,
    failed: HashSet<(i64, Vec<u64>)>,
}

impl Descending<'_> {
    /// At offset `e` the open unknowns are `Q_i[e - gap_i]`, whose upper copy lands on `e`.
    fn degree(&mut self, e: i64) -> bool {
        if e < 0 {
            return self.residual.iter().all(|&r| r == 0);
        }
        let eu = e as usize;
        let key = (e, self.residual[..=eu].to_vec());
        if self.failed.contains(&key) {
            return false;
        }
        let open: Vec<(usize, usize)> = (0..self.p.gaps.len())
            .filter_map(|i| {
                let g = self.p.gaps[i];
                let top = self.p.tops[i]?;
                (eu >= g && eu - g <= top).then(|| (i, eu - g))
            })
            .collect();
        let need = self.residual[eu];
        let ok = self.fill(e, &open, 0, need);
        if !ok {
            self.failed.insert(key);
        }
        ok
    }

    fn fill(&mut self, e: i64, open: &[(usize, usize)], idx: usize, remaining: u64) -> bool {
        if idx == open.len() {
            if remaining != 0 {
                return false;
            }
            let saved = self.residual[e as usize];
            self.residual[e as usize] = 0;
            let ok = self.degree(e - 1);
            if !ok {
                self.residual[e as usize] = saved;
            }
            return ok;
        }
        let (i, at) = open[idx];
        let cap = remaining.min(self.residual[at]);
        let low = if idx + 1 == open.len() { remaining } else { 0 };
        if low > cap {
            return false;
        }
        for v in (low..=cap).rev() {
            self.residual[at] -= v;
            self.q[i][at] = v;
            if self.fill(e, open, idx + 1, remaining - v) {
                return true;
            }
            self.residual[at] += v;
            self.q[i][at] = 0;
        }
        false
    }
}
