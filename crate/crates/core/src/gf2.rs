//! Linear algebra over the two-element field.
//!
//! Vectors are packed bitsets, matrices are stored as dense rows. Every
//! elimination uses the lowest-index pivot rule, so bases produced here are
//! canonical: the same input always yields bit-identical output.
//!
//! [`Subspace`] keeps its basis in fully reduced row-echelon form with the
//! pivot of each vector being its lowest set bit. Two subspaces are equal
//! exactly when their bases are equal.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coset representatives are linearly dependent modulo the denominator")]
    DependentRepresentatives,
}

const WORD: usize = 64;

/// A vector over GF(2) of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    /// Vector with ones exactly at `indices` (repeated indices toggle).
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        Self::from_indices(len, [i])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    /// Index of the highest set bit.
    pub fn last_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + t)
                }
            })
        })
    }

    /// Keeps only the listed coordinates, in the listed order.
    pub fn restrict(&self, coords: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(coords.len());
        for (i, &c) in coords.iter().enumerate() {
            if self.get(c) {
                out.set(i, true);
            }
        }
        out
    }

    /// Places this vector's coordinates at `coords` inside a vector of length `len`.
    pub fn embed(&self, len: usize, coords: &[usize]) -> BitVec {
        assert_eq!(self.len, coords.len());
        BitVec::from_indices(len, self.ones().map(|i| coords[i]))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A matrix over GF(2), stored as dense rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].set(i, true);
        }
        m
    }

    /// Builds a matrix from the positions of its one entries.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows, cols);
        for (row, col) in entries {
            if row >= rows || col >= cols {
                return Err(Gf2Error::OutOfBounds {
                    row,
                    col,
                    rows,
                    cols,
                });
            }
            if m.data[row].get(col) {
                return Err(Gf2Error::DuplicateEntry { row, col });
            }
            m.data[row].set(col, true);
        }
        Ok(m)
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self, Gf2Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Gf2Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            for i in c.ones() {
                m.data[i].set(j, true);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row].get(col)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row].set(col, value)
    }

    pub fn toggle(&mut self, row: usize, col: usize) {
        self.data[row].flip(col)
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> BitVec {
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&i| self.data[i].get(j)))
    }

    /// One entries in row-major order.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.ones().map(move |j| (i, j)))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (i, j) in self.entries() {
            t.data[j].set(i, true);
        }
        t
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        BitVec::from_indices(
            self.rows,
            (0..self.rows).filter(|&i| self.data[i].dot(v)),
        )
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[i].xor_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.xor_assign(b);
        }
        Ok(out)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        BitMatrix {
            rows: rows.len(),
            cols: cols.len(),
            data: rows.iter().map(|&i| self.data[i].restrict(cols)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    pub fn kernel(&self) -> Subspace {
        kernel_basis(self)
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::span(self.rows, (0..self.cols).map(|j| self.column(j)))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// Row-reduces in place; returns the pivot column of each nonzero row, in
/// order. Rows are left in reduced echelon form (pivot columns increasing).
fn row_reduce(rows: &mut Vec<BitVec>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        let Some(found) = (next..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(next, found);
        let pivot_row = rows[next].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != next && r.get(col) {
                r.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    pivots
}

/// Rank over GF(2).
pub fn rank(m: &BitMatrix) -> usize {
    let mut rows = m.data.clone();
    row_reduce(&mut rows, m.cols).len()
}

/// Basis of `{ v : M v = 0 }`.
pub fn kernel_basis(m: &BitMatrix) -> Subspace {
    let mut rows = m.data.clone();
    let pivots = row_reduce(&mut rows, m.cols);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let vectors = (0..m.cols).filter(|&c| !is_pivot[c]).map(|free| {
        let mut v = BitVec::unit(m.cols, free);
        for (row, &p) in rows.iter().zip(&pivots) {
            if row.get(free) {
                v.set(p, true);
            }
        }
        v
    });
    Subspace::span(m.cols, vectors)
}

/// A linear subspace of GF(2)^n in canonical reduced echelon form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<BitVec>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: (0..ambient_dim).map(|i| BitVec::unit(ambient_dim, i)).collect(),
        }
    }

    pub fn span(ambient_dim: usize, vectors: impl IntoIterator<Item = BitVec>) -> Self {
        let mut s = Self::zero(ambient_dim);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    /// Span of the unit vectors at `coords`.
    pub fn coordinate(ambient_dim: usize, coords: &[usize]) -> Self {
        Self::span(ambient_dim, coords.iter().map(|&c| BitVec::unit(ambient_dim, c)))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|b| b.first_one().expect("basis vectors are nonzero"))
            .collect()
    }

    /// Remainder of `v` after elimination against the basis; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.ambient_dim);
        let mut v = v.clone();
        for b in &self.basis {
            let p = b.first_one().expect("nonzero basis vector");
            if v.get(p) {
                v.xor_assign(b);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds a vector to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let v = self.reduce(&v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for b in &mut self.basis {
            if b.get(p) {
                b.xor_assign(&v);
            }
        }
        let at = self
            .basis
            .iter()
            .position(|b| b.first_one().expect("nonzero") > p)
            .unwrap_or(self.basis.len());
        self.basis.insert(at, v);
        true
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), Gf2Error> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        self.check_ambient(other)?;
        let mut s = self.clone();
        for b in &other.basis {
            s.insert(b.clone());
        }
        Ok(s)
    }

    /// Intersection by the Zassenhaus construction.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        self.check_ambient(other)?;
        let n = self.ambient_dim;
        let doubled = |v: &BitVec, copy: bool| {
            let mut w = BitVec::zeros(2 * n);
            for i in v.ones() {
                w.set(i, true);
                if copy {
                    w.set(n + i, true);
                }
            }
            w
        };
        let stacked = Subspace::span(
            2 * n,
            self.basis
                .iter()
                .map(|v| doubled(v, true))
                .chain(other.basis.iter().map(|v| doubled(v, false))),
        );
        let right: Vec<usize> = (n..2 * n).collect();
        Ok(Subspace::span(
            n,
            stacked
                .basis
                .iter()
                .filter(|b| b.first_one().expect("nonzero") >= n)
                .map(|b| b.restrict(&right)),
        ))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis.iter().all(|b| other.contains(b))
    }

    /// Image of this subspace under `m`.
    pub fn map(&self, m: &BitMatrix) -> Result<Subspace, Gf2Error> {
        if m.cols() != self.ambient_dim {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: m.cols(),
            });
        }
        Ok(Subspace::span(m.rows(), self.basis.iter().map(|b| m.mul_vec(b))))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subspace")
            .field("ambient_dim", &self.ambient_dim)
            .field("basis", &self.basis)
            .finish()
    }
}

/// `A / (A ∩ B)` as a dimension plus coset representatives drawn from A's basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subquotient {
    pub dim: usize,
    pub representatives: Vec<BitVec>,
}

/// Dimension of `A / (A ∩ B)`, with coset representatives.
pub fn subquotient_dim(a: &Subspace, b: &Subspace) -> Result<Subquotient, Gf2Error> {
    let mut acc = a.intersection(b)?;
    let representatives: Vec<BitVec> = a
        .basis()
        .iter()
        .filter(|v| acc.insert((*v).clone()))
        .cloned()
        .collect();
    Ok(Subquotient {
        dim: representatives.len(),
        representatives,
    })
}

/// Solves for coordinates in a quotient `span(D ∪ reps) / D` with respect to
/// the classes of `reps`.
#[derive(Debug, Clone)]
pub struct CosetSolver {
    ambient_dim: usize,
    reps: usize,
    // (vector, tag) pairs; tag records which representatives were combined.
    rows: Vec<(BitVec, BitVec)>,
}

impl CosetSolver {
    pub fn new(denominator: &Subspace, reps: &[BitVec]) -> Result<Self, Gf2Error> {
        let n = denominator.ambient_dim();
        let k = reps.len();
        let mut solver = Self {
            ambient_dim: n,
            reps: k,
            rows: Vec::new(),
        };
        for b in denominator.basis() {
            solver.push(b.clone(), BitVec::zeros(k));
        }
        for (i, r) in reps.iter().enumerate() {
            if r.len() != n {
                return Err(Gf2Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            if !solver.push(r.clone(), BitVec::unit(k, i)) {
                return Err(Gf2Error::DependentRepresentatives);
            }
        }
        Ok(solver)
    }

    fn eliminate(&self, v: &mut BitVec, tag: &mut BitVec) {
        for (row, row_tag) in &self.rows {
            let p = row.first_one().expect("nonzero row");
            if v.get(p) {
                v.xor_assign(row);
                tag.xor_assign(row_tag);
            }
        }
    }

    fn push(&mut self, mut v: BitVec, mut tag: BitVec) -> bool {
        self.eliminate(&mut v, &mut tag);
        let Some(p) = v.first_one() else {
            return false;
        };
        for (row, row_tag) in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&v);
                row_tag.xor_assign(&tag);
            }
        }
        self.rows.push((v, tag));
        self.rows
            .sort_by_key(|(r, _)| r.first_one().expect("nonzero row"));
        true
    }

    pub fn dim(&self) -> usize {
        self.reps
    }

    /// Coordinates of the class of `v`, or `None` if `v` is outside `span(D ∪ reps)`.
    pub fn solve(&self, v: &BitVec) -> Option<BitVec> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut v = v.clone();
        let mut tag = BitVec::zeros(self.reps);
        self.eliminate(&mut v, &mut tag);
        v.is_zero().then_some(tag)
    }
}
