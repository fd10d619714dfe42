//! Column reduction of the coboundary in filtration order.
//!
//! Generators are ordered by descending Maslov grade (ties by position), so
//! every `F_n` is spanned by a prefix. Reducing `δ` left to right pairs each
//! "birth" generator with the "death" generator at the lowest pivot of its
//! reduced column. A pair whose grades differ by `1 + iΣ` lives on pages
//! `E^1 .. E^i` and is killed by `d^i`; shift-0 pairs never reach `E^1`.
//! Unpaired generators survive to `E^∞`.

use crate::complex::FilteredComplex;
use crate::gf2::BitVec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Essential,
    Birth { partner: usize, shift: usize },
    Death { partner: usize, shift: usize },
}

impl Role {
    /// Whether the generator contributes a class to page `k`.
    pub fn alive_on(&self, k: usize) -> bool {
        match *self {
            Role::Essential => true,
            Role::Birth { shift, .. } | Role::Death { shift, .. } => shift >= k,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reduction {
    roles: Vec<Role>,
    /// Representative cochain of each generator's class, in generator coordinates.
    reps: Vec<BitVec>,
}

impl Reduction {
    pub fn new(c: &FilteredComplex) -> Self {
        let n = c.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&g| (-c.maslov(g), g));
        let mut pos = vec![0; n];
        for (p, &g) in order.iter().enumerate() {
            pos[g] = p;
        }
        let to_pos = |v: &BitVec| BitVec::from_indices(n, v.ones().map(|g| pos[g]));
        let to_gen = |v: &BitVec| BitVec::from_indices(n, v.ones().map(|p| order[p]));

        let delta = c.coboundary();
        let mut r: Vec<BitVec> = order.iter().map(|&g| to_pos(&delta.column(g))).collect();
        let mut v: Vec<BitVec> = (0..n).map(|p| BitVec::unit(n, p)).collect();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        for p in 0..n {
            while let Some(low) = r[p].last_one() {
                match owner[low] {
                    Some(q) => {
                        let (head, tail) = r.split_at_mut(p);
                        tail[0].xor_assign(&head[q]);
                        let (head, tail) = v.split_at_mut(p);
                        tail[0].xor_assign(&head[q]);
                    }
                    None => {
                        owner[low] = Some(p);
                        break;
                    }
                }
            }
        }

        let mut roles = vec![Role::Essential; n];
        let mut reps: Vec<BitVec> = v.iter().map(to_gen).collect();
        let mut reps_by_gen = vec![BitVec::zeros(n); n];
        for p in 0..n {
            let g = order[p];
            reps_by_gen[g] = std::mem::replace(&mut reps[p], BitVec::zeros(0));
        }
        let sigma = c.sigma_maslov();
        for (low, col) in owner.iter().enumerate() {
            let Some(q) = *col else { continue };
            let birth = order[q];
            let death = order[low];
            let gap = c.maslov(death) - c.maslov(birth) - 1;
            debug_assert!(gap >= 0 && gap % sigma == 0, "pair ({birth}, {death}) gap {gap}");
            let shift = (gap / sigma) as usize;
            roles[birth] = Role::Birth {
                partner: death,
                shift,
            };
            roles[death] = Role::Death {
                partner: birth,
                shift,
            };
            debug_assert!(r[low].is_zero(), "death column must reduce to zero");
            reps_by_gen[death] = to_gen(&r[q]);
        }
        Self {
            roles,
            reps: reps_by_gen,
        }
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn representative(&self, g: usize) -> &BitVec {
        &self.reps[g]
    }

    /// Largest shift among pairs with shift at least 1.
    pub fn max_shift(&self) -> Option<usize> {
        self.roles
            .iter()
            .filter_map(|r| match *r {
                Role::Birth { shift, .. } if shift >= 1 => Some(shift),
                _ => None,
            })
            .max()
    }
}
