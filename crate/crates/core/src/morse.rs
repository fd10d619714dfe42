//! Ground-truth fixtures: the perfect Morse complex of the torus `T^m` in the
//! small-isotopy regime, and variants with prescribed higher-shift edges.
//!
//! Generators are the subsets `S ⊆ {1..m}` (critical points of the product
//! Morse function) with grade `|S| - m`. Over Z/2 the Morse differential of
//! this model vanishes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use serde::Deserialize;
use thiserror::Error;

use crate::complex::{ComplexError, FilteredComplex, Generator, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorseError {
    #[error("torus dimension {0} is too large (at most 20)")]
    TooLarge(usize),
    #[error("Maslov period must be even and positive, got {0}")]
    OddPeriod(i64),
    #[error("expected {expected} action values, got {found}")]
    JitterCount { expected: usize, found: usize },
    #[error("action values must be distinct and inside the window (r, r + σ)")]
    JitterOutsideWindow,
    #[error("subset {0:?} is not a set of distinct elements of 1..=m")]
    BadSubset(Vec<usize>),
    #[error("edge {from:?} -> {to:?}: sizes differ by {gap}, which is not 1 mod Σ")]
    Residue {
        from: Vec<usize>,
        to: Vec<usize>,
        gap: i64,
    },
    #[error("edges prescribe incompatible grades for {0:?}")]
    RegradingConflict(Vec<usize>),
    #[error("malformed matching file: {0}")]
    Syntax(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Parameters of the torus fixture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusSpec {
    pub m: usize,
    pub lambda: Rational,
    pub sigma_maslov: i64,
    pub r: Rational,
    /// One action per subset, indexed by the subset's bitmask.
    pub action_jitter: Vec<Rational>,
}

impl TorusSpec {
    /// Evenly spaced actions `r + σ·(2^m - i)/(2^m + 1)` for bitmask `i`,
    /// decreasing in the mask so that edges `S -> S ∪ T` may have shift 0.
    pub fn new(m: usize, sigma_maslov: i64, lambda: Rational, r: Rational) -> Result<Self, MorseError> {
        if m > 20 {
            return Err(MorseError::TooLarge(m));
        }
        let count = 1usize << m;
        let sigma = &lambda * Rational::from_integer(BigInt::from(sigma_maslov));
        let action_jitter = (0..count)
            .map(|i| {
                &r + &sigma
                    * Rational::new(BigInt::from(count - i), BigInt::from(count + 1))
            })
            .collect();
        let spec = Self {
            m,
            lambda,
            sigma_maslov,
            r,
            action_jitter,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Default window: Σ = 4, λ = 1/2, r = 0.
    pub fn standard(m: usize) -> Result<Self, MorseError> {
        Self::new(
            m,
            4,
            Rational::new(1.into(), 2.into()),
            Rational::from_integer(0.into()),
        )
    }

    pub fn check(&self) -> Result<(), MorseError> {
        if self.m > 20 {
            return Err(MorseError::TooLarge(self.m));
        }
        if self.sigma_maslov < 1 || self.sigma_maslov % 2 != 0 {
            return Err(MorseError::OddPeriod(self.sigma_maslov));
        }
        let count = 1usize << self.m;
        if self.action_jitter.len() != count {
            return Err(MorseError::JitterCount {
                expected: count,
                found: self.action_jitter.len(),
            });
        }
        let sigma = &self.lambda * Rational::from_integer(BigInt::from(self.sigma_maslov));
        let top = &self.r + &sigma;
        let distinct: BTreeSet<&Rational> = self.action_jitter.iter().collect();
        if distinct.len() != count || self.action_jitter.iter().any(|a| *a <= self.r || *a >= top) {
            return Err(MorseError::JitterOutsideWindow);
        }
        Ok(())
    }
}

/// Display id of a subset given by bitmask: `{}`, `{1}`, `{1,3}`.
pub fn subset_id(mask: usize) -> String {
    let elems: Vec<String> = (0..usize::BITS as usize)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| (b + 1).to_string())
        .collect();
    format!("{{{}}}", elems.join(","))
}

fn mask_of(m: usize, subset: &[usize]) -> Result<usize, MorseError> {
    let mut mask = 0usize;
    for &e in subset {
        if e == 0 || e > m || mask >> (e - 1) & 1 == 1 {
            return Err(MorseError::BadSubset(subset.to_vec()));
        }
        mask |= 1 << (e - 1);
    }
    Ok(mask)
}

fn build(spec: &TorusSpec, grades: &[i64], edges: &[(usize, usize)]) -> Result<FilteredComplex, MorseError> {
    let generators = (0..grades.len())
        .map(|mask| Generator {
            id: subset_id(mask),
            action: spec.action_jitter[mask].clone(),
            maslov: grades[mask],
        })
        .collect();
    let edges: Vec<(String, String)> = edges
        .iter()
        .map(|&(a, b)| (subset_id(a), subset_id(b)))
        .collect();
    Ok(FilteredComplex::new_checked(
        spec.sigma_maslov,
        spec.lambda.clone(),
        spec.r.clone(),
        generators,
        &edges,
    )?)
}

/// The torus complex: one generator per subset, grade `|S| - m`, no edges.
pub fn torus_complex(spec: &TorusSpec) -> Result<FilteredComplex, MorseError> {
    spec.check()?;
    let grades: Vec<i64> = (0..1usize << spec.m)
        .map(|mask| mask.count_ones() as i64 - spec.m as i64)
        .collect();
    build(spec, &grades, &[])
}

/// A prescribed coboundary edge `from -> to` with window shift `shift`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumEdge {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub shift: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatchingFile {
    edges: Vec<QuantumEdge>,
}

/// Reads `{ "edges": [ { "from": [..], "to": [..], "shift": i } ] }`.
pub fn parse_matching(text: &str) -> Result<Vec<QuantumEdge>, MorseError> {
    serde_json::from_str::<MatchingFile>(text)
        .map(|f| f.edges)
        .map_err(|e| MorseError::Syntax(e.to_string()))
}

/// The perfect matching `S -> S ∪ {1}` (for `1 ∉ S`), all at one shift.
pub fn perfect_matching(m: usize, shift: i64) -> Vec<QuantumEdge> {
    (0..1usize << m)
        .filter(|mask| mask & 1 == 0)
        .map(|mask| {
            let elems = |mk: usize| (0..m).filter(|b| mk >> b & 1 == 1).map(|b| b + 1).collect();
            QuantumEdge {
                from: elems(mask),
                to: elems(mask | 1),
                shift,
            }
        })
        .collect()
}

/// Torus complex with extra coboundary edges.
///
/// Each generator keeps its residue `|S| - m (mod Σ)`; its integer grade is
/// moved by a multiple of Σ so that every edge `S -> S'` of shift `i` has
/// grade gap exactly `1 + iΣ`. Within each connected component of the edge
/// graph, the generator with the smallest bitmask keeps its Morse grade.
pub fn quantum_perturbed_torus(
    spec: &TorusSpec,
    matching: &[QuantumEdge],
) -> Result<FilteredComplex, MorseError> {
    spec.check()?;
    let m = spec.m;
    let sigma = spec.sigma_maslov;
    let base = |mask: usize| mask.count_ones() as i64 - m as i64;

    // adjacency: (neighbor, offset of neighbor minus offset of self)
    let mut adjacency: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
    let mut edges = Vec::with_capacity(matching.len());
    for e in matching {
        let (a, b) = (mask_of(m, &e.from)?, mask_of(m, &e.to)?);
        let gap = base(b) - base(a);
        if (gap - 1).rem_euclid(sigma) != 0 {
            return Err(MorseError::Residue {
                from: e.from.clone(),
                to: e.to.clone(),
                gap,
            });
        }
        let delta = e.shift - (gap - 1) / sigma;
        adjacency.entry(a).or_default().push((b, delta));
        adjacency.entry(b).or_default().push((a, -delta));
        edges.push((a, b));
    }

    let mut offset: Vec<Option<i64>> = vec![None; 1 << m];
    for &root in adjacency.keys() {
        if offset[root].is_some() {
            continue;
        }
        offset[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let here = offset[v].expect("visited");
            for &(w, d) in &adjacency[&v] {
                match offset[w] {
                    None => {
                        offset[w] = Some(here + d);
                        queue.push_back(w);
                    }
                    Some(existing) if existing != here + d => {
                        let elems = (0..m).filter(|b| w >> b & 1 == 1).map(|b| b + 1).collect();
                        return Err(MorseError::RegradingConflict(elems));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let grades: Vec<i64> = (0..1usize << m)
        .map(|mask| base(mask) + sigma * offset[mask].unwrap_or(0))
        .collect();
    build(spec, &grades, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{integer_graded_cohomology, zsigma_cohomology};
    use crate::spectral::{k_stable, page};

    fn spec(m: usize, sigma: i64) -> TorusSpec {
        TorusSpec::new(
            m,
            sigma,
            Rational::new(1.into(), 2.into()),
            Rational::from_integer(0.into()),
        )
        .unwrap()
    }

    #[test]
    fn small_tori() {
        let t1 = torus_complex(&spec(1, 4)).unwrap();
        assert_eq!(t1.grade_counts(), BTreeMap::from([(-1, 1), (0, 1)]));
        let t3 = torus_complex(&spec(3, 4)).unwrap();
        assert_eq!(
            t3.grade_counts(),
            BTreeMap::from([(-3, 1), (-2, 3), (-1, 3), (0, 1)])
        );
        let t0 = torus_complex(&spec(0, 4)).unwrap();
        assert_eq!(t0.grade_counts(), BTreeMap::from([(0, 1)]));
        assert_eq!(t0.generators()[0].id, "{}");
    }

    #[test]
    fn spec_invariants() {
        assert_eq!(
            TorusSpec::new(2, 3, Rational::from_integer(1.into()), Rational::from_integer(0.into())),
            Err(MorseError::OddPeriod(3))
        );
        let mut s = spec(1, 4);
        s.action_jitter[1] = s.action_jitter[0].clone();
        assert_eq!(torus_complex(&s), Err(MorseError::JitterOutsideWindow));
        s.action_jitter.pop();
        assert!(matches!(torus_complex(&s), Err(MorseError::JitterCount { .. })));
    }

    #[test]
    fn shift_one_matching_on_the_two_torus() {
        // Σ = 2: {} -> {1} and {2} -> {1,2}, both at shift 1.
        let q = quantum_perturbed_torus(&spec(2, 2), &perfect_matching(2, 1)).unwrap();
        assert_eq!(q.edges().len(), 2);
        assert_eq!(zsigma_cohomology(&q).total(), 0);
        assert_eq!(integer_graded_cohomology(&q).total(), 4);
        assert_eq!(page(&q, 1).unwrap().residue_dims(), BTreeMap::from([(0, 2), (1, 2)]));
        assert!(page(&q, 2).unwrap().is_zero());
        assert_eq!(k_stable(&q), 2);
    }

    #[test]
    fn empty_matching_is_the_torus() {
        let s = spec(3, 4);
        assert_eq!(quantum_perturbed_torus(&s, &[]).unwrap(), torus_complex(&s).unwrap());
    }

    #[test]
    fn parity_break_is_reported() {
        let chain = [
            QuantumEdge {
                from: vec![],
                to: vec![1],
                shift: 1,
            },
            QuantumEdge {
                from: vec![1],
                to: vec![1, 2],
                shift: 1,
            },
        ];
        match quantum_perturbed_torus(&spec(2, 4), &chain) {
            Err(MorseError::Complex(ComplexError::Invalid(v))) => {
                assert!(v.iter().any(|x| x.rule() == "coboundary-square"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn residue_and_conflict_errors() {
        let wrong = [QuantumEdge {
            from: vec![],
            to: vec![1, 2],
            shift: 1,
        }];
        assert!(matches!(
            quantum_perturbed_torus(&spec(2, 4), &wrong),
            Err(MorseError::Residue { .. })
        ));
        let conflict = [
            QuantumEdge {
                from: vec![],
                to: vec![1],
                shift: 1,
            },
            QuantumEdge {
                from: vec![],
                to: vec![1],
                shift: 2,
            },
        ];
        assert!(matches!(
            quantum_perturbed_torus(&spec(2, 4), &conflict),
            Err(MorseError::RegradingConflict(_))
        ));
        let bad = [QuantumEdge {
            from: vec![3],
            to: vec![],
            shift: 0,
        }];
        assert!(matches!(
            quantum_perturbed_torus(&spec(2, 4), &bad),
            Err(MorseError::BadSubset(_))
        ));
    }

    #[test]
    fn matching_file() {
        let edges = parse_matching(r#"{"edges":[{"from":[],"to":[1],"shift":1}]}"#).unwrap();
        assert_eq!(edges, perfect_matching(1, 1));
        assert!(parse_matching("{").is_err());
    }
}
