use num_traits::Zero;

use super::LinExpr;
use crate::rational::Rational;

/// Incrementally maintained row space of rational vectors of fixed length.
#[derive(Debug, Clone)]
pub struct RowSpace {
    len: usize,
    // Each stored row is 1 at its pivot and 0 at every earlier row's pivot.
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RowSpace {
    pub fn new(len: usize) -> Self {
        RowSpace {
            len,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.len
    }

    fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        self.reduce(v.to_vec()).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns true when it was independent of the stored rows.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let mut v = self.reduce(v.to_vec());
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Rank over the rationals of the coefficient matrix of `equalities`.
pub fn affine_rank(equalities: &[LinExpr]) -> usize {
    let len = equalities
        .iter()
        .flat_map(|e| e.terms().iter().map(|(v, _)| v + 1))
        .max()
        .unwrap_or(0);
    let mut space = RowSpace::new(len);
    for e in equalities {
        space.insert(&e.dense(len));
    }
    space.rank()
}
