//! Random fixtures shared by the integration tests.
#![allow(dead_code)]

use intfloer::complex::{FilteredComplex, Generator, Rational};
use intfloer::gf2::BitMatrix;
use intfloer::maslov::LagrangianPath;
use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// A valid complex together with how it was built: a direct sum of pairs
/// and isolated generators, conjugated by a filtration-preserving change
/// of basis `P`.
pub struct RandomComplex {
    pub complex: FilteredComplex,
    /// `δ = P δ₀ P⁻¹`.
    pub basis_change: BitMatrix,
    /// Generator positions of each direct summand of `δ₀`.
    pub summands: Vec<Vec<usize>>,
}

#[derive(Clone, Copy)]
pub struct Limits {
    pub max_generators: usize,
    pub max_edges: usize,
}

pub const ACCEPTANCE_LIMITS: Limits = Limits {
    max_generators: 64,
    max_edges: 200,
};

/// Elementary filtration-preserving basis change `e_g -> e_g + e_h`.
fn elementary(n: usize, g: usize, h: usize) -> BitMatrix {
    let mut e = BitMatrix::identity(n);
    e.set(h, g, true);
    e
}

pub fn random_complex(rng: &mut impl Rng, limits: Limits) -> RandomComplex {
    loop {
        if let Some(rc) = try_random_complex(rng, limits) {
            return rc;
        }
    }
}

fn try_random_complex(rng: &mut impl Rng, limits: Limits) -> Option<RandomComplex> {
    let sigma: i64 = *[3, 4, 5, 6].choose(rng).unwrap();
    let span: i64 = rng.gen_range(0..=12);
    let size = rng.gen_range(0..=limits.max_generators);

    // grades and summands of δ₀, in construction order
    let mut grades: Vec<i64> = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    while grades.len() < size {
        let base = rng.gen_range(0..=span);
        if grades.len() + 2 <= size && rng.gen_bool(0.7) {
            let shift = *[0, 0, 1, 1, 2, 3].choose(rng).unwrap();
            let x = grades.len();
            grades.push(base);
            grades.push(base + 1 + shift * sigma);
            pairs.push((x, x + 1));
            blocks.push(vec![x, x + 1]);
        } else {
            blocks.push(vec![grades.len()]);
            grades.push(base);
        }
    }
    let n = grades.len();

    // scatter positions so that generator order carries no information
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let grades: Vec<i64> = {
        let mut g = vec![0; n];
        for (old, &new) in perm.iter().enumerate() {
            g[new] = grades[old];
        }
        g
    };
    let summands: Vec<Vec<usize>> = blocks
        .iter()
        .map(|b| b.iter().map(|&i| perm[i]).collect())
        .collect();
    let mut delta = BitMatrix::zeros(n, n);
    for &(x, y) in &pairs {
        delta.set(perm[y], perm[x], true);
    }

    // conjugate by elementary moves; each is its own inverse, P accumulates them
    let mut basis_change = BitMatrix::identity(n);
    let moves = if n > 1 { rng.gen_range(0..=3 * n) } else { 0 };
    for _ in 0..moves {
        let g = rng.gen_range(0..n);
        let candidates: Vec<usize> = (0..n)
            .filter(|&h| h != g && (grades[h] - grades[g]).rem_euclid(sigma) == 0 && grades[h] >= grades[g])
            .collect();
        let Some(&h) = candidates.choose(rng) else {
            continue;
        };
        let e = elementary(n, g, h);
        let next = e.mul(&delta).unwrap().mul(&e).unwrap();
        if next.entries().len() > limits.max_edges {
            break;
        }
        delta = next;
        basis_change = e.mul(&basis_change).unwrap();
    }

    let (lambda, r) = [(rat(1, 1), rat(0, 1)), (rat(1, 2), rat(-3, 2)), (rat(2, 3), rat(5, 7))]
        .choose(rng)
        .unwrap()
        .clone();
    let sigma_action = &lambda * rat(sigma, 1);
    let (lo, hi) = (
        grades.iter().copied().min().unwrap_or(0),
        grades.iter().copied().max().unwrap_or(0),
    );
    let generators: Vec<Generator> = grades
        .iter()
        .enumerate()
        .map(|(i, &mu)| Generator {
            id: format!("g{i}"),
            action: &r + &sigma_action * rat(hi - mu + 1, hi - lo + 2),
            maslov: mu,
        })
        .collect();
    let edges: Vec<(String, String)> = delta
        .entries()
        .into_iter()
        .map(|(y, x)| (format!("g{x}"), format!("g{y}")))
        .collect();
    let complex = FilteredComplex::new_checked(sigma, lambda, r, generators, &edges).ok()?;
    Some(RandomComplex {
        complex,
        basis_change,
        summands,
    })
}

/// Random degree `-1 + ℓΣ` (ℓ ≥ 0) matrix: a filtration-preserving homotopy.
pub fn random_homotopy(rng: &mut impl Rng, c: &FilteredComplex, density: f64) -> BitMatrix {
    let n = c.len();
    let sigma = c.sigma_maslov();
    let mut h = BitMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            let gap = c.maslov(y) - c.maslov(x) + 1;
            if gap >= 0 && gap % sigma == 0 && rng.gen_bool(density) {
                h.set(y, x, true);
            }
        }
    }
    h
}

/// `Hδ + δH`.
pub fn null_homotopic(c: &FilteredComplex, h: &BitMatrix) -> BitMatrix {
    let d = c.coboundary();
    h.mul(&d).unwrap().add(&d.mul(h).unwrap()).unwrap()
}

/// A filtered cochain map `C -> C`: the projection onto random summands of
/// `δ₀`, transported by the basis change, plus a null-homotopic term.
pub fn random_chain_map(rng: &mut impl Rng, rc: &RandomComplex) -> BitMatrix {
    let n = rc.complex.len();
    let mut p = BitMatrix::zeros(n, n);
    for s in &rc.summands {
        if rng.gen_bool(0.6) {
            for &i in s {
                p.set(i, i, true);
            }
        }
    }
    let basis = &rc.basis_change;
    let f = basis.mul(&p).unwrap().mul(&inverse(basis)).unwrap();
    let k = random_homotopy(rng, &rc.complex, 0.05);
    f.add(&null_homotopic(&rc.complex, &k)).unwrap()
}

/// Inverse of an invertible GF(2) matrix by Gauss–Jordan elimination.
pub fn inverse(m: &BitMatrix) -> BitMatrix {
    let n = m.rows();
    let mut a: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    let mut inv: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col]).expect("invertible");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..n {
            if r != col && a[r][col] {
                for j in 0..n {
                    a[r][j] ^= a[col][j];
                    inv[r][j] ^= inv[col][j];
                }
            }
        }
    }
    let mut out = BitMatrix::zeros(n, n);
    for (i, row) in inv.iter().enumerate() {
        for (j, &bit) in row.iter().enumerate() {
            if bit {
                out.set(i, j, true);
            }
        }
    }
    out
}

fn random_unit_complex(rng: &mut impl Rng, m: usize) -> DMatrix<Complex<f64>> {
    let z = DMatrix::from_fn(m, m, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    z.qr().q()
}

fn random_orthogonal(rng: &mut impl Rng, m: usize) -> DMatrix<f64> {
    let z = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
    z.qr().q()
}

/// Loop `t -> V diag(e^{iπ a_k t}) O`, `t ∈ [0, 1)`, with `V` unitary and `O`
/// real orthogonal. Its index is `Σ a_k`; with `oriented` the exponents are
/// doubled so that the frame returns with the same orientation.
pub fn random_loop(rng: &mut impl Rng, m: usize, max_speed: i64, oriented: bool) -> (LagrangianPath, i64) {
    let speeds: Vec<i64> = (0..m).map(|_| rng.gen_range(-max_speed..=max_speed)).collect();
    let factor = if oriented { 2.0 } else { 1.0 };
    let v = random_unit_complex(rng, m);
    let o = random_orthogonal(rng, m).map(|x| Complex::new(x, 0.0));
    let fastest = speeds.iter().map(|a| a.abs()).max().unwrap_or(0) as f64 * factor;
    let samples = (8.0 * fastest) as usize + 8 + rng.gen_range(0..5);
    let path = LagrangianPath::from_unitaries(
        (0..samples).map(|i| {
            let t = i as f64 / samples as f64;
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                m,
                speeds
                    .iter()
                    .map(|&a| Complex::from_polar(1.0, std::f64::consts::PI * factor * a as f64 * t)),
            ));
            &v * d * &o
        }),
        true,
    )
    .unwrap();
    let index = speeds.iter().sum::<i64>() * if oriented { 2 } else { 1 };
    (path, index)
}
