//! Filtered cochain maps and homotopies between complexes, and the maps they
//! induce on spectral pages and on Z_Σ-graded cohomology.
//!
//! Maps are given, not constructed: this module only certifies them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::cohomology::zsigma_cohomology;
use crate::complex::FilteredComplex;
use crate::gf2::{BitMatrix, BitVec, CosetSolver, Gf2Error, Subspace};
use crate::spectral::{FiltrationSpaces, Page, SpectralError, SpectralSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainMapError {
    #[error("malformed map file: {0}")]
    Syntax(String),
    #[error("unknown generator {0:?}")]
    UnknownId(String),
    #[error("entry {0:?} -> {1:?} listed twice")]
    DuplicateEntry(String, String),
    #[error("maps are not composable")]
    NotComposable,
    #[error("not a filtered cochain map: {0}")]
    NotCochainMap(String),
    #[error("image of a class at grade {0} does not reduce in the target")]
    Inconsistent(i64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Linear(#[from] Gf2Error),
}

/// A Z/2-linear map between two complexes on the same Maslov period.
///
/// `degree` is 0 for cochain maps and -1 for homotopies; every entry
/// `x -> y` must then satisfy `μ(y) - μ(x) = degree + ℓΣ` with `ℓ ≥ 0`.
#[derive(Debug, Clone)]
pub struct FilteredMap<'a> {
    pub source: &'a FilteredComplex,
    pub target: &'a FilteredComplex,
    pub degree: i64,
    /// Rows indexed by target generators, columns by source generators.
    pub matrix: BitMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    entries: Vec<(String, String)>,
}

/// Reads `{ "entries": [ ["src_id", "dst_id"], .. ] }`.
pub fn parse_map_entries(text: &str) -> Result<Vec<(String, String)>, ChainMapError> {
    serde_json::from_str::<MapFile>(text)
        .map(|f| f.entries)
        .map_err(|e| ChainMapError::Syntax(e.to_string()))
}

impl<'a> FilteredMap<'a> {
    pub fn from_matrix(
        source: &'a FilteredComplex,
        target: &'a FilteredComplex,
        degree: i64,
        matrix: BitMatrix,
    ) -> Self {
        assert_eq!((matrix.rows(), matrix.cols()), (target.len(), source.len()));
        Self {
            source,
            target,
            degree,
            matrix,
        }
    }

    /// Map sending each listed source generator to the sum of its listed targets.
    pub fn from_ids(
        source: &'a FilteredComplex,
        target: &'a FilteredComplex,
        degree: i64,
        entries: &[(String, String)],
    ) -> Result<Self, ChainMapError> {
        let mut matrix = BitMatrix::zeros(target.len(), source.len());
        let mut seen = BTreeSet::new();
        for (a, b) in entries {
            let x = source.index_of(a).ok_or_else(|| ChainMapError::UnknownId(a.clone()))?;
            let y = target.index_of(b).ok_or_else(|| ChainMapError::UnknownId(b.clone()))?;
            if !seen.insert((x, y)) {
                return Err(ChainMapError::DuplicateEntry(a.clone(), b.clone()));
            }
            matrix.set(y, x, true);
        }
        Ok(Self::from_matrix(source, target, degree, matrix))
    }

    pub fn identity(c: &'a FilteredComplex) -> Self {
        Self::from_matrix(c, c, 0, BitMatrix::identity(c.len()))
    }

    pub fn zero(source: &'a FilteredComplex, target: &'a FilteredComplex, degree: i64) -> Self {
        Self::from_matrix(source, target, degree, BitMatrix::zeros(target.len(), source.len()))
    }

    /// Listed entries as id pairs, by source then target position.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut e: Vec<(usize, usize)> = self.matrix.entries().into_iter().map(|(y, x)| (x, y)).collect();
        e.sort_unstable();
        e.into_iter()
            .map(|(x, y)| {
                (
                    self.source.generators()[x].id.clone(),
                    self.target.generators()[y].id.clone(),
                )
            })
            .collect()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FilteredMap<'a>) -> Result<FilteredMap<'a>, ChainMapError> {
        if !std::ptr::eq(first.target, self.source) && first.target != self.source {
            return Err(ChainMapError::NotComposable);
        }
        Ok(FilteredMap {
            source: first.source,
            target: self.target,
            degree: first.degree + self.degree,
            matrix: self.matrix.mul(&first.matrix)?,
        })
    }

    pub fn apply(&self, v: &BitVec) -> BitVec {
        self.matrix.mul_vec(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapViolation {
    PeriodMismatch { source: i64, target: i64 },
    /// `μ(to) - μ(from) - degree` is not a multiple of Σ.
    Degree { from: String, to: String, gap: i64 },
    /// `μ(to) - μ(from) - degree` is a negative multiple of Σ.
    Filtration { from: String, to: String, gap: i64 },
    /// The identity being checked fails on this source generator.
    Identity {
        generator: String,
        grade: i64,
        defect: Vec<String>,
    },
    SourceMismatch,
}

impl fmt::Display for MapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapViolation::PeriodMismatch { source, target } => {
                write!(f, "Maslov periods differ: {source} vs {target}")
            }
            MapViolation::Degree { from, to, gap } => {
                write!(f, "{from} -> {to}: grade gap {gap} has the wrong residue")
            }
            MapViolation::Filtration { from, to, gap } => {
                write!(f, "{from} -> {to}: grade gap {gap} lowers the filtration")
            }
            MapViolation::Identity {
                generator,
                grade,
                defect,
            } => write!(f, "grade {grade}: fails on {generator}, defect {{{}}}", defect.join(", ")),
            MapViolation::SourceMismatch => f.write_str("maps do not share source and target"),
        }
    }
}

fn grading_violations(f: &FilteredMap<'_>) -> Vec<MapViolation> {
    let sigma = f.source.sigma_maslov();
    if sigma != f.target.sigma_maslov() {
        return vec![MapViolation::PeriodMismatch {
            source: sigma,
            target: f.target.sigma_maslov(),
        }];
    }
    let mut out = Vec::new();
    for (from, to) in f.entries() {
        let x = f.source.index_of(&from).expect("entry ids exist");
        let y = f.target.index_of(&to).expect("entry ids exist");
        let gap = f.target.maslov(y) - f.source.maslov(x) - f.degree;
        if gap.rem_euclid(sigma) != 0 {
            out.push(MapViolation::Degree { from, to, gap });
        } else if gap < 0 {
            out.push(MapViolation::Filtration { from, to, gap });
        }
    }
    out
}

/// Columns of `m` that are nonzero, reported against the source generators.
fn identity_violations(source: &FilteredComplex, target: &FilteredComplex, m: &BitMatrix) -> Vec<MapViolation> {
    let mut out: Vec<MapViolation> = (0..m.cols())
        .filter_map(|x| {
            let col = m.column(x);
            (!col.is_zero()).then(|| MapViolation::Identity {
                generator: source.generators()[x].id.clone(),
                grade: source.maslov(x),
                defect: col.ones().map(|y| target.generators()[y].id.clone()).collect(),
            })
        })
        .collect();
    out.sort_by_key(|v| match v {
        MapViolation::Identity { grade, .. } => *grade,
        _ => 0,
    });
    out
}

/// Empty iff `f δ = δ f` and `f` preserves the filtration.
pub fn verify_cochain_map(f: &FilteredMap<'_>) -> Vec<MapViolation> {
    let mut out = grading_violations(f);
    if matches!(out.first(), Some(MapViolation::PeriodMismatch { .. })) {
        return out;
    }
    let lhs = f.matrix.mul(&f.source.coboundary()).expect("shapes agree");
    let rhs = f.target.coboundary().mul(&f.matrix).expect("shapes agree");
    out.extend(identity_violations(f.source, f.target, &lhs.add(&rhs).expect("shapes agree")));
    out
}

/// Empty iff `f - g = Hδ + δH` with `H` of degree -1, filtration-preserving.
pub fn verify_homotopy(f: &FilteredMap<'_>, g: &FilteredMap<'_>, h: &FilteredMap<'_>) -> Vec<MapViolation> {
    let same = |a: &FilteredComplex, b: &FilteredComplex| std::ptr::eq(a, b) || a == b;
    if !same(f.source, g.source) || !same(f.target, g.target) || !same(f.source, h.source) || !same(f.target, h.target)
    {
        return vec![MapViolation::SourceMismatch];
    }
    let mut out = grading_violations(h);
    if matches!(out.first(), Some(MapViolation::PeriodMismatch { .. })) {
        return out;
    }
    if h.degree != -1 {
        out.push(MapViolation::Degree {
            from: "H".into(),
            to: "H".into(),
            gap: h.degree,
        });
    }
    let hd = h.matrix.mul(&f.source.coboundary()).expect("shapes agree");
    let dh = f.target.coboundary().mul(&h.matrix).expect("shapes agree");
    let defect = f
        .matrix
        .add(&g.matrix)
        .and_then(|m| m.add(&hd))
        .and_then(|m| m.add(&dh))
        .expect("shapes agree");
    out.extend(identity_violations(f.source, f.target, &defect));
    out
}

/// Matrices of an induced map, one per grade, in the bases of the source
/// and target cells (target dimension × source dimension).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMap {
    pub cells: BTreeMap<i64, BitMatrix>,
    /// Bijective on every cell.
    pub iso: bool,
}

impl InducedMap {
    fn new(cells: BTreeMap<i64, BitMatrix>) -> Self {
        let iso = cells.values().all(|m| m.rows() == m.cols() && m.rank() == m.rows());
        Self { cells, iso }
    }

    /// `self ∘ first`, cell by cell.
    pub fn after(&self, first: &InducedMap) -> Result<InducedMap, ChainMapError> {
        let grades: BTreeSet<i64> = self.cells.keys().chain(first.cells.keys()).copied().collect();
        let mut cells = BTreeMap::new();
        for n in grades {
            let (Some(b), Some(a)) = (self.cells.get(&n), first.cells.get(&n)) else {
                let rows = self.cells.get(&n).map_or(0, BitMatrix::rows);
                let cols = first.cells.get(&n).map_or(0, BitMatrix::cols);
                cells.insert(n, BitMatrix::zeros(rows, cols));
                continue;
            };
            cells.insert(n, b.mul(a)?);
        }
        Ok(InducedMap::new(cells))
    }
}

/// Expresses the images of `source_reps` in the coset basis `target_reps` modulo `denominator`.
fn coset_matrix(
    f: &FilteredMap<'_>,
    source_reps: &[BitVec],
    target_reps: &[BitVec],
    denominator: &Subspace,
    n: i64,
) -> Result<BitMatrix, ChainMapError> {
    let solver = CosetSolver::new(denominator, target_reps)?;
    let columns = source_reps
        .iter()
        .map(|v| solver.solve(&f.apply(v)).ok_or(ChainMapError::Inconsistent(n)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BitMatrix::from_columns(target_reps.len(), &columns)?)
}

fn require_cochain_map(f: &FilteredMap<'_>) -> Result<(), ChainMapError> {
    if f.degree != 0 {
        return Err(ChainMapError::NotCochainMap(format!("degree {}", f.degree)));
    }
    match verify_cochain_map(f).first() {
        Some(v) => Err(ChainMapError::NotCochainMap(v.to_string())),
        None => Ok(()),
    }
}

fn induced_on_pages(f: &FilteredMap<'_>, sp: &Page, tp: &Page) -> Result<InducedMap, ChainMapError> {
    let spaces = FiltrationSpaces::new(f.target);
    let grades: BTreeSet<i64> = sp.cells.keys().chain(tp.cells.keys()).copied().collect();
    let mut cells = BTreeMap::new();
    for n in grades {
        let empty = Vec::new();
        let sreps = sp.cells.get(&n).map_or(&empty, |c| &c.basis);
        let treps = tp.cells.get(&n).map_or(&empty, |c| &c.basis);
        let m = if sreps.is_empty() || treps.is_empty() {
            BitMatrix::zeros(treps.len(), sreps.len())
        } else {
            coset_matrix(f, sreps, treps, &spaces.denominator(Some(tp.k), n), n)?
        };
        cells.insert(n, m);
    }
    Ok(InducedMap::new(cells))
}

/// The map `E^k(source) -> E^k(target)` induced by a filtered cochain map.
pub fn induced_page_map(f: &FilteredMap<'_>, k: usize) -> Result<InducedMap, ChainMapError> {
    require_cochain_map(f)?;
    let sp = SpectralSequence::new(f.source).page(k)?;
    let tp = SpectralSequence::new(f.target).page(k)?;
    induced_on_pages(f, &sp, &tp)
}

/// The map on `HF^j`, `j` in `0..Σ`.
pub fn induced_hf_map(f: &FilteredMap<'_>) -> Result<InducedMap, ChainMapError> {
    require_cochain_map(f)?;
    let s = zsigma_cohomology(f.source);
    let t = zsigma_cohomology(f.target);
    let delta = f.target.coboundary();
    let sigma = f.target.sigma_maslov();
    let grades: BTreeSet<i64> = s.table.keys().chain(t.table.keys()).copied().collect();
    let mut cells = BTreeMap::new();
    for j in grades {
        let empty = Vec::new();
        let sreps = s.representatives.get(&j).unwrap_or(&empty);
        let treps = t.representatives.get(&j).unwrap_or(&empty);
        let m = if sreps.is_empty() || treps.is_empty() {
            BitMatrix::zeros(treps.len(), sreps.len())
        } else {
            let below = f.target.residue_support((j - 1).rem_euclid(sigma));
            let exact = Subspace::span(f.target.len(), below.iter().map(|&g| delta.column(g)));
            coset_matrix(f, sreps, treps, &exact, j)?
        };
        cells.insert(j, m);
    }
    Ok(InducedMap::new(cells))
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

    fn ids(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn pair() -> FilteredComplex {
        complex(3, &[("x", "2", 0), ("y", "1", 1), ("z", "1/2", 5)], &[("x", "y")])
    }

    #[test]
    fn identity_is_a_cochain_map() {
        let c = pair();
        let id = FilteredMap::identity(&c);
        assert!(verify_cochain_map(&id).is_empty());
        for k in 1..4 {
            let m = induced_page_map(&id, k).unwrap();
            assert!(m.iso);
        }
        assert!(induced_hf_map(&id).unwrap().iso);
    }

    #[test]
    fn grade_dropping_map_is_rejected() {
        let c = complex(3, &[("a", "1", 3), ("b", "1/2", 0)], &[]);
        let f = FilteredMap::from_ids(&c, &c, 0, &ids(&[("a", "b")])).unwrap();
        assert_eq!(
            verify_cochain_map(&f),
            vec![MapViolation::Filtration {
                from: "a".into(),
                to: "b".into(),
                gap: -3
            }]
        );
        let g = FilteredMap::from_ids(&c, &c, 0, &ids(&[("b", "a"), ("a", "a")])).unwrap();
        assert!(verify_cochain_map(&g).is_empty());
        let h = complex(3, &[("a", "1", 2), ("b", "1/2", 1)], &[]);
        let drop = FilteredMap::from_ids(&h, &h, 0, &ids(&[("a", "b")])).unwrap();
        assert!(matches!(verify_cochain_map(&drop)[0], MapViolation::Degree { gap: -1, .. }));
    }

    #[test]
    fn non_chain_map_is_reported() {
        let c = pair();
        let f = FilteredMap::from_ids(&c, &c, 0, &ids(&[("x", "x")])).unwrap();
        let v = verify_cochain_map(&f);
        assert_eq!(
            v,
            vec![MapViolation::Identity {
                generator: "x".into(),
                grade: 0,
                defect: vec!["y".into()]
            }]
        );
        assert!(matches!(induced_page_map(&f, 1), Err(ChainMapError::NotCochainMap(_))));
    }

    #[test]
    fn homotopies() {
        let c = complex(3, &[("x", "2", 0), ("y", "1", 1)], &[("x", "y")]);
        let id = FilteredMap::identity(&c);
        let zero = FilteredMap::zero(&c, &c, 0);
        let h0 = FilteredMap::zero(&c, &c, -1);
        assert!(verify_homotopy(&id, &id, &h0).is_empty());
        let v = verify_homotopy(&id, &zero, &h0);
        assert!(matches!(&v[0], MapViolation::Identity { grade: 0, .. }));
        let h = FilteredMap::from_ids(&c, &c, -1, &ids(&[("y", "x")])).unwrap();
        assert!(verify_homotopy(&id, &zero, &h).is_empty());
    }

    #[test]
    fn relabeling_is_an_isomorphism() {
        let c = pair();
        let d = c.relabeled(|id| format!("{id}'")).unwrap();
        let f = FilteredMap::from_ids(&c, &d, 0, &ids(&[("x", "x'"), ("y", "y'"), ("z", "z'")])).unwrap();
        assert!(verify_cochain_map(&f).is_empty());
        for k in 1..4 {
            assert!(induced_page_map(&f, k).unwrap().iso);
        }
        let back = FilteredMap::from_ids(&d, &c, 0, &ids(&[("x'", "x"), ("y'", "y"), ("z'", "z")])).unwrap();
        let round = back.after(&f).unwrap();
        assert_eq!(round.matrix, BitMatrix::identity(3));
        let composed = induced_page_map(&back, 1).unwrap().after(&induced_page_map(&f, 1).unwrap()).unwrap();
        assert_eq!(composed, induced_page_map(&round, 1).unwrap());
    }

    #[test]
    fn zero_map_is_not_iso() {
        let c = pair();
        let z = FilteredMap::zero(&c, &c, 0);
        assert!(!induced_page_map(&z, 1).unwrap().iso);
    }

    #[test]
    fn map_file() {
        let e = parse_map_entries(r#"{"entries":[["a","b"]]}"#).unwrap();
        assert_eq!(e, ids(&[("a", "b")]));
        assert!(parse_map_entries(r#"{"entries":[["a"]]}"#).is_err());
        let c = pair();
        assert_eq!(
            FilteredMap::from_ids(&c, &c, 0, &ids(&[("q", "x")])).unwrap_err(),
            ChainMapError::UnknownId("q".into())
        );
        assert!(matches!(
            FilteredMap::from_ids(&c, &c, 0, &ids(&[("x", "x"), ("x", "x")])),
            Err(ChainMapError::DuplicateEntry(..))
        ));
    }
}
