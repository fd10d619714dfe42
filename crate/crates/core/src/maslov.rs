//! Maslov indices of sampled Lagrangian loops, monotonicity constants and
//! action window lifts.
//!
//! A Lagrangian frame in `R^{2m} = C^m` is a `2m × m` real matrix `[X; Y]`
//! with orthonormal columns and `XᵀY = YᵀX`; then `U = X + iY` is unitary and
//! `det(U)²` depends only on the subspace. The loop index is the winding of
//! `det(U)²`. Between neighbouring samples `a, b` the symmetric unitary
//! `M = W Wᵀ`, `W = U_a* U_b`, has eigenvalues `e^{iφ}` with `φ = ±2θ` for the
//! principal angles `θ` between the two subspaces. Its real and imaginary
//! parts are commuting real symmetric matrices, so `Im M` has eigenvalues
//! `sin φ`. While every `θ < π/4` each `φ` lies in `(-π/2, π/2)` and the
//! step phase `Σ φ` is recovered exactly as `Σ arcsin`.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::complex::{format_rational, Rational};

/// Tolerance on the frame conditions.
pub const FRAME_TOLERANCE: f64 = 1e-9;
/// Largest allowed distance of a winding number from an integer.
pub const WINDING_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaslovError {
    #[error("malformed path file: {0}")]
    Syntax(String),
    #[error("path has no samples")]
    Empty,
    #[error("sample {sample} is not a {rows}×{cols} matrix")]
    Shape {
        sample: usize,
        rows: usize,
        cols: usize,
    },
    #[error("sample {sample} is not Lagrangian (defect {defect:.3e})")]
    NotLagrangian { sample: usize, defect: f64 },
    #[error("sample {sample} is not orthonormal (defect {defect:.3e})")]
    NotOrthonormal { sample: usize, defect: f64 },
    #[error("samples {from} and {to} are too far apart (largest principal angle {angle:.4})")]
    Inadequate { from: usize, to: usize, angle: f64 },
    #[error("the index is only defined for closed loops")]
    NotClosed,
    #[error("paths live in different dimensions ({0} and {1})")]
    DimensionMismatch(usize, usize),
    #[error("winding {0} is not an integer")]
    NonIntegral(f64),
    #[error("no disk classes given")]
    NoClasses,
    #[error("class {0} has both pairings zero")]
    ZeroClass(usize),
    #[error("every Maslov pairing is zero")]
    MaslovUndefined,
    #[error("not monotone: classes {0} and {1} have different ratios")]
    NotMonotone(usize, usize),
    #[error("{0} is not in [0, σ)")]
    OutsideFundamentalDomain(String),
    #[error("σ must be positive")]
    NonPositivePeriod,
    #[error("r is not a regular value: {0} ≡ r mod σ")]
    NotRegular(String),
}

/// Sampled path in the Lagrangian Grassmannian of `C^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianPath {
    m: usize,
    samples: Vec<DMatrix<f64>>,
    closed: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PathFile {
    m: usize,
    closed: bool,
    samples: Vec<Vec<Vec<f64>>>,
}

/// Reads `{ "m": .., "closed": .., "samples": [ [row, ..], .. ] }`, rows of length `m`.
pub fn parse_path(text: &str) -> Result<LagrangianPath, MaslovError> {
    let file: PathFile = serde_json::from_str(text).map_err(|e| MaslovError::Syntax(e.to_string()))?;
    let m = file.m;
    let samples = file
        .samples
        .into_iter()
        .enumerate()
        .map(|(i, rows)| {
            if rows.len() != 2 * m || rows.iter().any(|r| r.len() != m) {
                return Err(MaslovError::Shape {
                    sample: i,
                    rows: 2 * m,
                    cols: m,
                });
            }
            Ok(DMatrix::from_fn(2 * m, m, |r, c| rows[r][c]))
        })
        .collect::<Result<Vec<_>, _>>()?;
    LagrangianPath::new(m, samples, file.closed)
}

fn unitary(frame: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    let m = frame.ncols();
    DMatrix::from_fn(m, m, |r, c| Complex::new(frame[(r, c)], frame[(r + m, c)]))
}

impl LagrangianPath {
    /// Checks shape, the Lagrangian condition and orthonormality of every sample.
    pub fn new(m: usize, samples: Vec<DMatrix<f64>>, closed: bool) -> Result<Self, MaslovError> {
        if samples.is_empty() {
            return Err(MaslovError::Empty);
        }
        for (i, s) in samples.iter().enumerate() {
            if s.nrows() != 2 * m || s.ncols() != m {
                return Err(MaslovError::Shape {
                    sample: i,
                    rows: 2 * m,
                    cols: m,
                });
            }
            let x = s.rows(0, m);
            let y = s.rows(m, m);
            let omega = x.transpose() * y - y.transpose() * x;
            let defect = omega.amax();
            if defect > FRAME_TOLERANCE {
                return Err(MaslovError::NotLagrangian { sample: i, defect });
            }
            let defect = (s.transpose() * s - DMatrix::identity(m, m)).amax();
            if defect > FRAME_TOLERANCE {
                return Err(MaslovError::NotOrthonormal { sample: i, defect });
            }
        }
        Ok(Self { m, samples, closed })
    }

    /// Path through the frames `[Re U; Im U]` of unitary matrices.
    pub fn from_unitaries(
        unitaries: impl IntoIterator<Item = DMatrix<Complex<f64>>>,
        closed: bool,
    ) -> Result<Self, MaslovError> {
        let samples: Vec<DMatrix<f64>> = unitaries
            .into_iter()
            .map(|u| {
                let m = u.ncols();
                DMatrix::from_fn(2 * m, m, |r, c| {
                    if r < m {
                        u[(r, c)].re
                    } else {
                        u[(r - m, c)].im
                    }
                })
            })
            .collect();
        let m = samples.first().map_or(0, DMatrix::ncols);
        Self::new(m, samples, closed)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn samples(&self) -> &[DMatrix<f64>] {
        &self.samples
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.samples.len();
        let last = if self.closed { n } else { n - 1 };
        (0..last).map(move |i| (i, (i + 1) % n))
    }

    /// The loop run through `times` times.
    pub fn repeated(&self, times: usize) -> Self {
        let samples = (0..times).flat_map(|_| self.samples.iter().cloned()).collect();
        Self {
            m: self.m,
            samples,
            closed: self.closed,
        }
    }

    /// Runs `self` then `other`; both should start at the same Lagrangian.
    pub fn concatenate(&self, other: &Self) -> Result<Self, MaslovError> {
        if self.m != other.m {
            return Err(MaslovError::DimensionMismatch(self.m, other.m));
        }
        let samples = self.samples.iter().chain(&other.samples).cloned().collect();
        Ok(Self {
            m: self.m,
            samples,
            closed: self.closed && other.closed,
        })
    }

    /// Product loop in `C^{m1} × C^{m2}`, with coordinates ordered `(x1, x2, y1, y2)`.
    /// Both factors are resampled to the least common multiple of their lengths
    /// by repeating samples, so each product step moves along a factor step.
    pub fn product(&self, other: &Self) -> Result<Self, MaslovError> {
        let (m1, m2) = (self.m, other.m);
        let (n1, n2) = (self.samples.len(), other.samples.len());
        let n = n1.lcm(&n2);
        let m = m1 + m2;
        let samples = (0..n)
            .map(|i| {
                let a = &self.samples[i * n1 / n];
                let b = &other.samples[i * n2 / n];
                let mut f = DMatrix::zeros(2 * m, m);
                f.view_mut((0, 0), (m1, m1)).copy_from(&a.rows(0, m1));
                f.view_mut((m1, m1), (m2, m2)).copy_from(&b.rows(0, m2));
                f.view_mut((m, 0), (m1, m1)).copy_from(&a.rows(m1, m1));
                f.view_mut((m + m1, m1), (m2, m2)).copy_from(&b.rows(m2, m2));
                f
            })
            .collect();
        Self::new(m, samples, self.closed && other.closed)
    }

    /// Largest principal angle between two samples.
    pub fn step_angle(&self, a: usize, b: usize) -> f64 {
        let g = self.samples[a].transpose() * &self.samples[b];
        let smallest = g.singular_values().min().clamp(-1.0, 1.0);
        smallest.acos()
    }

    fn phase_step(&self, a: usize, b: usize) -> Result<f64, MaslovError> {
        let angle = self.step_angle(a, b);
        if angle >= FRAC_PI_4 {
            return Err(MaslovError::Inadequate { from: a, to: b, angle });
        }
        let w = unitary(&self.samples[a]).adjoint() * unitary(&self.samples[b]);
        let sines = (&w * w.transpose()).map(|z| z.im);
        // symmetrize away rounding before the symmetric eigensolver
        let sines = (&sines + sines.transpose()) * 0.5;
        Ok(sines.symmetric_eigenvalues().iter().map(|s| s.clamp(-1.0, 1.0).asin()).sum())
    }

    /// Total change of `arg det(U)²` along the path, in units of full turns.
    pub fn winding(&self) -> Result<f64, MaslovError> {
        let mut total = 0.0;
        for (a, b) in self.steps() {
            total += self.phase_step(a, b)?;
        }
        Ok(total / (2.0 * PI))
    }
}

/// Winding number of `det(U)²` around a closed loop.
pub fn maslov_loop_index(p: &LagrangianPath) -> Result<i64, MaslovError> {
    if !p.closed {
        return Err(MaslovError::NotClosed);
    }
    let w = p.winding()?;
    let rounded = w.round();
    if (w - rounded).abs() > WINDING_TOLERANCE {
        return Err(MaslovError::NonIntegral(w));
    }
    Ok(rounded as i64)
}

/// Index of the product loop.
pub fn kunneth_index(p1: &LagrangianPath, p2: &LagrangianPath) -> Result<i64, MaslovError> {
    if !p1.closed || !p2.closed {
        return Err(MaslovError::NotClosed);
    }
    maslov_loop_index(&p1.product(p2)?)
}

/// Pairings `(I_ω, I_μ)` of generators of the disk classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiskClassData {
    pub classes: Vec<(Rational, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneConstants {
    /// Positive generator of the action periods.
    pub sigma: Rational,
    /// Positive generator of the Maslov periods.
    pub sigma_maslov: i64,
    pub lambda: Rational,
}

/// `Σ = gcd |I_μ|`; monotone iff one `λ ≥ 0` gives `I_ω = λ I_μ` on every class.
pub fn monotone_constants(d: &DiskClassData) -> Result<MonotoneConstants, MaslovError> {
    if d.classes.is_empty() {
        return Err(MaslovError::NoClasses);
    }
    if let Some(i) = d.classes.iter().position(|(w, mu)| w.is_zero() && *mu == 0) {
        return Err(MaslovError::ZeroClass(i));
    }
    let sigma_maslov = d.classes.iter().fold(0i64, |g, (_, mu)| g.gcd(mu));
    let Some(reference) = d.classes.iter().position(|(_, mu)| *mu != 0) else {
        return Err(MaslovError::MaslovUndefined);
    };
    let (w0, mu0) = &d.classes[reference];
    let lambda = w0 / Rational::from_integer(BigInt::from(*mu0));
    if lambda.is_negative() {
        return Err(MaslovError::NotMonotone(reference, reference));
    }
    for (i, (w, mu)) in d.classes.iter().enumerate() {
        if *w != &lambda * Rational::from_integer(BigInt::from(*mu)) {
            return Err(MaslovError::NotMonotone(reference, i));
        }
    }
    Ok(MonotoneConstants {
        sigma: &lambda * Rational::from_integer(BigInt::from(sigma_maslov)),
        sigma_maslov,
        lambda,
    })
}

/// Representative of `a_mod + σZ` in `(r, r + σ)` and the multiple of σ added.
pub fn window_lift(a_mod: &Rational, r: &Rational, sigma: &Rational) -> Result<(Rational, i64), MaslovError> {
    if !sigma.is_positive() {
        return Err(MaslovError::NonPositivePeriod);
    }
    if a_mod.is_negative() || a_mod >= sigma {
        return Err(MaslovError::OutsideFundamentalDomain(format_rational(a_mod)));
    }
    let q = (r - a_mod) / sigma;
    if q.is_integer() {
        return Err(MaslovError::NotRegular(format_rational(a_mod)));
    }
    let shift: BigInt = q.floor().to_integer() + 1;
    let lifted = a_mod + sigma * Rational::from_integer(shift.clone());
    let shift = i64::try_from(shift).expect("window shift fits in i64");
    Ok((lifted, shift))
}

/// Whether `action = nσ` and `loop_index = nΣ` for one integer `n`.
pub fn compatibility_check(d: &DiskClassData, loop_index: i64, action: &Rational) -> Result<bool, MaslovError> {
    let c = monotone_constants(d)?;
    if loop_index % c.sigma_maslov != 0 {
        return Ok(false);
    }
    let n = loop_index / c.sigma_maslov;
    Ok(*action == c.sigma * Rational::from_integer(BigInt::from(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::parse_rational;

    fn rat(s: &str) -> Rational {
        parse_rational("x", s).unwrap()
    }

    fn line_loop(turns: f64, n: usize) -> LagrangianPath {
        LagrangianPath::from_unitaries(
            (0..n).map(|i| {
                let t = i as f64 / n as f64;
                DMatrix::from_element(1, 1, Complex::from_polar(1.0, PI * turns * t))
            }),
            true,
        )
        .unwrap()
    }

    #[test]
    fn half_turn_has_index_one() {
        assert_eq!(maslov_loop_index(&line_loop(1.0, 16)), Ok(1));
        assert_eq!(maslov_loop_index(&line_loop(1.0, 5)), Ok(1));
        assert_eq!(maslov_loop_index(&line_loop(-3.0, 40)), Ok(-3));
    }

    #[test]
    fn constant_loop_and_repetition() {
        assert_eq!(maslov_loop_index(&line_loop(0.0, 3)), Ok(0));
        assert_eq!(maslov_loop_index(&line_loop(1.0, 16).repeated(2)), Ok(2));
    }

    #[test]
    fn products() {
        let c = line_loop(0.0, 3);
        let h = line_loop(1.0, 8);
        assert_eq!(kunneth_index(&c, &c), Ok(0));
        assert_eq!(kunneth_index(&h, &c), Ok(1));
        assert_eq!(kunneth_index(&h, &h), Ok(2));
        assert_eq!(h.product(&c).unwrap().samples().len(), 24);
    }

    #[test]
    fn coarse_sampling_is_rejected() {
        assert!(matches!(
            maslov_loop_index(&line_loop(1.0, 2)),
            Err(MaslovError::Inadequate { .. })
        ));
    }

    #[test]
    fn frame_checks() {
        let tilted = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            LagrangianPath::new(2, vec![tilted], true),
            Err(MaslovError::NotLagrangian { .. })
        ));
        let long = DMatrix::from_row_slice(2, 1, &[2.0, 0.0]);
        assert!(matches!(
            LagrangianPath::new(1, vec![long], true),
            Err(MaslovError::NotOrthonormal { .. })
        ));
        let open = LagrangianPath::new(1, vec![DMatrix::from_row_slice(2, 1, &[1.0, 0.0])], false).unwrap();
        assert_eq!(maslov_loop_index(&open), Err(MaslovError::NotClosed));
    }

    #[test]
    fn path_file() {
        let p = parse_path(r#"{"m":1,"closed":true,"samples":[[[1],[0]],[[0],[1]]]}"#).unwrap();
        assert_eq!(p.samples().len(), 2);
        assert!(matches!(maslov_loop_index(&p), Err(MaslovError::Inadequate { .. })));
        let fixed = parse_path(r#"{"m":1,"closed":true,"samples":[[[0],[1]]]}"#).unwrap();
        assert_eq!(maslov_loop_index(&fixed), Ok(0));
        let bad = parse_path(r#"{"m":1,"closed":true,"samples":[[[1,0]]]}"#);
        assert!(matches!(bad, Err(MaslovError::Shape { .. })));
    }

    #[test]
    fn monotone_examples() {
        let d = |v: &[(&str, i64)]| DiskClassData {
            classes: v.iter().map(|(w, m)| (rat(w), *m)).collect(),
        };
        let c = monotone_constants(&d(&[("1", 2)])).unwrap();
        assert_eq!((c.sigma, c.sigma_maslov, c.lambda), (rat("1"), 2, rat("1/2")));
        let c = monotone_constants(&d(&[("1", 2), ("3", 6)])).unwrap();
        assert_eq!((c.sigma, c.sigma_maslov, c.lambda), (rat("1"), 2, rat("1/2")));
        assert_eq!(monotone_constants(&d(&[("1", 2), ("1", 4)])), Err(MaslovError::NotMonotone(0, 1)));
        assert_eq!(monotone_constants(&d(&[("1", 0)])), Err(MaslovError::MaslovUndefined));
        assert_eq!(monotone_constants(&d(&[("0", 0)])), Err(MaslovError::ZeroClass(0)));
        assert_eq!(monotone_constants(&d(&[])), Err(MaslovError::NoClasses));
    }

    #[test]
    fn lifts() {
        assert_eq!(window_lift(&rat("1/2"), &rat("0"), &rat("2")), Ok((rat("1/2"), 0)));
        assert_eq!(window_lift(&rat("1/2"), &rat("3/4"), &rat("2")), Ok((rat("5/2"), 1)));
        assert_eq!(window_lift(&rat("1/2"), &rat("-5/2"), &rat("2")), Ok((rat("-3/2"), -1)));
        assert!(matches!(window_lift(&rat("0"), &rat("0"), &rat("2")), Err(MaslovError::NotRegular(_))));
        assert!(matches!(
            window_lift(&rat("2"), &rat("1/3"), &rat("2")),
            Err(MaslovError::OutsideFundamentalDomain(_))
        ));
    }

    #[test]
    fn compatibility() {
        let d = DiskClassData {
            classes: vec![(rat("1"), 2)],
        };
        assert_eq!(compatibility_check(&d, 6, &rat("3")), Ok(true));
        assert_eq!(compatibility_check(&d, 4, &rat("3")), Ok(false));
        assert_eq!(compatibility_check(&d, 0, &rat("0")), Ok(true));
        assert_eq!(compatibility_check(&d, 3, &rat("3/2")), Ok(false));
    }
}
