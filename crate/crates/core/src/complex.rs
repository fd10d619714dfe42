//! Action-filtered, Maslov-graded cochain complexes over Z/2.
//!
//! A complex is given by its generators (preferred lifts, each with an exact
//! action value and an integer Maslov grade) and the edges of its total
//! coboundary. An edge `x -> y` carries the window shift
//! `(μ(y) - μ(x) - 1) / Σ`, which must be a nonnegative integer; shift-0
//! edges make up the integer-graded differential.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::BitMatrix;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("malformed complex file at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: `{value}` is not a rational of the form p/q with q > 0")]
    Rational { field: String, value: String },
    #[error("duplicate generator id `{0}`")]
    DuplicateId(String),
    #[error("edge refers to unknown generator id `{0}`")]
    UnknownId(String),
    #[error("Maslov period must be at least 1, got {0}")]
    MaslovPeriod(i64),
    #[error("monotonicity constant must be positive, got {0}")]
    Lambda(String),
    #[error("complex violates {} rule(s): {}", .0.len(), .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// A generator given by its preferred lift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub action: Rational,
    pub maslov: i64,
}

/// A broken grading, action or coboundary law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Action not strictly inside `(r, r + σ)`.
    OutsideWindow { id: String },
    ShiftNotIntegral {
        from: String,
        to: String,
        maslov_gap: i64,
    },
    NegativeShift {
        from: String,
        to: String,
        maslov_gap: i64,
    },
    /// Shift-0 edge along which the action does not drop.
    ActionNotDecreasing { from: String, to: String },
    DuplicateEdge { from: String, to: String },
    /// Odd number of two-step paths `from -> * -> to`.
    CoboundarySquare { from: String, to: String },
}

impl Violation {
    pub fn rule(&self) -> &'static str {
        match self {
            Violation::OutsideWindow { .. } => "action-window",
            Violation::ShiftNotIntegral { .. } => "shift-not-integral",
            Violation::NegativeShift { .. } => "negative-shift",
            Violation::ActionNotDecreasing { .. } => "action-monotonicity",
            Violation::DuplicateEdge { .. } => "duplicate-edge",
            Violation::CoboundarySquare { .. } => "coboundary-square",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.rule())?;
        match self {
            Violation::OutsideWindow { id } => write!(f, "{id}"),
            Violation::ShiftNotIntegral {
                from,
                to,
                maslov_gap,
            }
            | Violation::NegativeShift {
                from,
                to,
                maslov_gap,
            } => write!(f, "{from} -> {to} (maslov gap {maslov_gap})"),
            Violation::ActionNotDecreasing { from, to }
            | Violation::DuplicateEdge { from, to }
            | Violation::CoboundarySquare { from, to } => write!(f, "{from} -> {to}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredComplex {
    sigma_maslov: i64,
    lambda: Rational,
    r: Rational,
    generators: Vec<Generator>,
    edges: Vec<(usize, usize)>,
    index: HashMap<String, usize>,
}

impl FilteredComplex {
    /// Assembles a complex from generators and id-based edges. Only structural
    /// problems are errors here; the grading and action laws are checked by
    /// [`FilteredComplex::validate`].
    pub fn new(
        sigma_maslov: i64,
        lambda: Rational,
        r: Rational,
        generators: Vec<Generator>,
        edges: &[(String, String)],
    ) -> Result<Self, ComplexError> {
        if sigma_maslov < 1 {
            return Err(ComplexError::MaslovPeriod(sigma_maslov));
        }
        if !lambda.is_positive() {
            return Err(ComplexError::Lambda(format_rational(&lambda)));
        }
        let mut index = HashMap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.id.clone(), i).is_some() {
                return Err(ComplexError::DuplicateId(g.id.clone()));
            }
        }
        let lookup = |id: &String| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| ComplexError::UnknownId(id.clone()))
        };
        let edges = edges
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, ComplexError>>()?;
        Ok(Self {
            sigma_maslov,
            lambda,
            r,
            generators,
            edges,
            index,
        })
    }

    /// Like [`FilteredComplex::new`] but fails unless [`FilteredComplex::validate`] is clean.
    pub fn new_checked(
        sigma_maslov: i64,
        lambda: Rational,
        r: Rational,
        generators: Vec<Generator>,
        edges: &[(String, String)],
    ) -> Result<Self, ComplexError> {
        Self::new(sigma_maslov, lambda, r, generators, edges)?.checked()
    }

    pub fn checked(self) -> Result<Self, ComplexError> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(ComplexError::Invalid(violations))
        }
    }

    /// Σ, the Maslov period.
    pub fn sigma_maslov(&self) -> i64 {
        self.sigma_maslov
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    /// σ = λ·Σ, the action period.
    pub fn sigma_action(&self) -> Rational {
        &self.lambda * Rational::from_integer(BigInt::from(self.sigma_maslov))
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn maslov(&self, g: usize) -> i64 {
        self.generators[g].maslov
    }

    /// Residue of an integer grade in `0..Σ`.
    pub fn residue(&self, n: i64) -> i64 {
        n.rem_euclid(self.sigma_maslov)
    }

    /// Window shift of an edge, if it is an integer.
    pub fn shift(&self, from: usize, to: usize) -> Option<i64> {
        let gap = self.maslov(to) - self.maslov(from) - 1;
        (gap % self.sigma_maslov == 0).then(|| gap / self.sigma_maslov)
    }

    /// Smallest and largest Maslov grade, if any generators exist.
    pub fn grade_range(&self) -> Option<(i64, i64)> {
        let min = self.generators.iter().map(|g| g.maslov).min()?;
        let max = self.generators.iter().map(|g| g.maslov).max()?;
        Some((min, max))
    }

    /// Occupied grades, ascending.
    pub fn grades(&self) -> Vec<i64> {
        self.generators
            .iter()
            .map(|g| g.maslov)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn generators_in_grade(&self, n: i64) -> Vec<usize> {
        (0..self.len()).filter(|&g| self.maslov(g) == n).collect()
    }

    /// Generators of `F_n`: grade at least `n` and congruent to `n` mod Σ.
    pub fn filtration_support(&self, n: i64) -> Vec<usize> {
        (0..self.len())
            .filter(|&g| {
                let m = self.maslov(g);
                m >= n && self.residue(m) == self.residue(n)
            })
            .collect()
    }

    /// Generators whose grade is congruent to `j` mod Σ.
    pub fn residue_support(&self, j: i64) -> Vec<usize> {
        let j = self.residue(j);
        (0..self.len())
            .filter(|&g| self.residue(self.maslov(g)) == j)
            .collect()
    }

    /// Matrix of the total coboundary; column = source, row = target.
    /// Repeated edges cancel in pairs.
    pub fn coboundary(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.len(), self.len());
        for &(x, y) in &self.edges {
            m.toggle(y, x);
        }
        m
    }

    /// Matrix of the shift-0 part of the coboundary.
    pub fn coboundary_shift_zero(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.len(), self.len());
        for &(x, y) in &self.edges {
            if self.shift(x, y) == Some(0) {
                m.toggle(y, x);
            }
        }
        m
    }

    pub fn warnings(&self) -> Vec<String> {
        if self.sigma_maslov < 3 {
            vec![format!(
                "Maslov period {} is below 3; the integer grading is computed formally",
                self.sigma_maslov
            )]
        } else {
            Vec::new()
        }
    }

    /// Every broken law, in a deterministic order. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let sigma = self.sigma_action();
        let top = &self.r + &sigma;
        for g in &self.generators {
            if !(g.action > self.r && g.action < top) {
                out.push(Violation::OutsideWindow { id: g.id.clone() });
            }
        }
        let mut seen = BTreeSet::new();
        for &(x, y) in &self.edges {
            let (from, to) = (self.generators[x].id.clone(), self.generators[y].id.clone());
            if !seen.insert((x, y)) {
                out.push(Violation::DuplicateEdge { from, to });
                continue;
            }
            let gap = self.maslov(y) - self.maslov(x) - 1;
            if gap.rem_euclid(self.sigma_maslov) != 0 {
                out.push(Violation::ShiftNotIntegral {
                    from,
                    to,
                    maslov_gap: gap + 1,
                });
            } else if gap < 0 {
                out.push(Violation::NegativeShift {
                    from,
                    to,
                    maslov_gap: gap + 1,
                });
            } else if gap == 0 && self.generators[x].action <= self.generators[y].action {
                out.push(Violation::ActionNotDecreasing { from, to });
            }
        }
        let delta = self.coboundary();
        let square = delta.mul(&delta).expect("square matrix");
        // Entry (z, x) of δ² counts two-step paths x -> z.
        let mut pairs: Vec<(usize, usize)> =
            square.entries().into_iter().map(|(z, x)| (x, z)).collect();
        pairs.sort_unstable();
        for (x, z) in pairs {
            out.push(Violation::CoboundarySquare {
                from: self.generators[x].id.clone(),
                to: self.generators[z].id.clone(),
            });
        }
        out
    }

    /// Pieces `C_n` of the associated graded complex with the shift-0 coboundary `C_n -> C_{n+1}`.
    pub fn associated_graded(&self) -> Vec<GradedLevel> {
        let d0 = self.coboundary_shift_zero();
        self.grades()
            .into_iter()
            .map(|n| {
                let source = self.generators_in_grade(n);
                let target = self.generators_in_grade(n + 1);
                GradedLevel {
                    piece: GradedPiece {
                        n,
                        generators: source
                            .iter()
                            .map(|&g| self.generators[g].id.clone())
                            .collect(),
                    },
                    coboundary: d0.submatrix(&target, &source),
                }
            })
            .collect()
    }

    /// The same complex seen through the next window: `r + σ`, every action
    /// raised by σ. Action and grade run in opposite directions, so every
    /// grade drops by Σ.
    pub fn shifted_window(&self) -> FilteredComplex {
        let sigma = self.sigma_action();
        let mut out = self.clone();
        out.r = &self.r + &sigma;
        for g in &mut out.generators {
            g.action = &g.action + &sigma;
            g.maslov -= self.sigma_maslov;
        }
        out
    }

    /// Copy with generator ids renamed through `rename`, keeping order and edges.
    pub fn relabeled(&self, rename: impl Fn(&str) -> String) -> Result<FilteredComplex, ComplexError> {
        let generators: Vec<Generator> = self
            .generators
            .iter()
            .map(|g| Generator {
                id: rename(&g.id),
                ..g.clone()
            })
            .collect();
        let edges: Vec<(String, String)> = self
            .edges
            .iter()
            .map(|&(x, y)| (generators[x].id.clone(), generators[y].id.clone()))
            .collect();
        FilteredComplex::new(
            self.sigma_maslov,
            self.lambda.clone(),
            self.r.clone(),
            generators,
            &edges,
        )
    }

    pub fn to_json(&self) -> String {
        let raw = RawComplex {
            sigma_maslov: self.sigma_maslov,
            lambda: format_rational(&self.lambda),
            r: format_rational(&self.r),
            generators: self
                .generators
                .iter()
                .map(|g| RawGenerator {
                    id: g.id.clone(),
                    action: format_rational(&g.action),
                    maslov: g.maslov,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(x, y)| {
                    [
                        self.generators[x].id.clone(),
                        self.generators[y].id.clone(),
                    ]
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("complex serializes");
        s.push('\n');
        s
    }

    /// Generator counts per grade.
    pub fn grade_counts(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for g in &self.generators {
            *out.entry(g.maslov).or_insert(0) += 1;
        }
        out
    }
}

/// `C_n`, the generators of one Maslov grade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPiece {
    pub n: i64,
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedLevel {
    pub piece: GradedPiece,
    /// Rows: generators of grade `n + 1`; columns: generators of this piece.
    pub coboundary: BitMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    id: String,
    action: String,
    maslov: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComplex {
    sigma_maslov: i64,
    lambda: String,
    r: String,
    generators: Vec<RawGenerator>,
    edges: Vec<[String; 2]>,
}

pub fn parse_rational(field: &str, text: &str) -> Result<Rational, ComplexError> {
    let bad = || ComplexError::Rational {
        field: field.to_string(),
        value: text.to_string(),
    };
    let int = |s: &str| -> Result<BigInt, ComplexError> {
        let s = s.strip_prefix('+').unwrap_or(s);
        if s.is_empty() || !s.trim_start_matches('-').bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    match text.split_once('/') {
        None => Ok(Rational::from_integer(int(text)?)),
        Some((p, q)) => {
            let (p, q) = (int(p)?, int(q)?);
            if !q.is_positive() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

pub fn format_rational(x: &Rational) -> String {
    if x.denom() == &BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn syntax_error(e: serde_json::Error) -> ComplexError {
    ComplexError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Reads a complex file without checking the grading laws.
pub fn parse_complex_unchecked(text: &str) -> Result<FilteredComplex, ComplexError> {
    let raw: RawComplex = serde_json::from_str(text).map_err(syntax_error)?;
    let lambda = parse_rational("lambda", &raw.lambda)?;
    let r = parse_rational("r", &raw.r)?;
    let generators = raw
        .generators
        .into_iter()
        .map(|g| {
            Ok(Generator {
                action: parse_rational(&format!("generators[{}].action", g.id), &g.action)?,
                id: g.id,
                maslov: g.maslov,
            })
        })
        .collect::<Result<Vec<_>, ComplexError>>()?;
    let edges: Vec<(String, String)> = raw
        .edges
        .into_iter()
        .map(|[a, b]| (a, b))
        .collect();
    FilteredComplex::new(raw.sigma_maslov, lambda, r, generators, &edges)
}

/// Reads and validates a complex file.
pub fn parse_complex(text: &str) -> Result<FilteredComplex, ComplexError> {
    parse_complex_unchecked(text)?.checked()
}

pub fn validate(c: &FilteredComplex) -> Vec<Violation> {
    c.validate()
}

pub fn associated_graded(c: &FilteredComplex) -> Vec<GradedLevel> {
    c.associated_graded()
}
