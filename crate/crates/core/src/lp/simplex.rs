//! Dense dictionary simplex over exact rationals.
//!
//! The tableau is kept in condensed (dictionary) form: one row per basic
//! variable and one column per nonbasic variable, so a pivot touches
//! `rows x nonbasic` entries regardless of how many slacks exist. All
//! internal variables are nonnegative; free model variables are split by
//! the caller. Pivoting follows Bland's rule in both phases.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// `basic[i] = rows[i][0] + sum_k rows[i][k + 1] * nonbasic[k]`, and the
/// objective `z = obj[0] + sum_k obj[k + 1] * nonbasic[k]` is maximized.
#[derive(Clone, Debug)]
pub(crate) struct Tableau {
    pub basic: Vec<usize>,
    pub nonbasic: Vec<usize>,
    pub rows: Vec<Vec<Rational>>,
    pub obj: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    /// Builds the slack dictionary for `a x <= b`, with `structural`
    /// nonbasic variables numbered `0..structural` and slack `i` numbered
    /// `structural + i`.
    pub fn from_rows(structural: usize, rows: &[(Vec<Rational>, Rational)]) -> Self {
        let basic = (0..rows.len()).map(|i| structural + i).collect();
        let nonbasic = (0..structural).collect();
        let rows = rows
            .iter()
            .map(|(coeffs, rhs)| {
                let mut row = Vec::with_capacity(structural + 1);
                row.push(rhs.clone());
                row.extend(coeffs.iter().map(|c| -c));
                row
            })
            .collect();
        Tableau {
            basic,
            nonbasic,
            rows,
            obj: vec![Rational::zero(); structural + 1],
        }
    }

    pub fn width(&self) -> usize {
        self.nonbasic.len()
    }

    pub fn pivot(&mut self, r: usize, k: usize) {
        let col = k + 1;
        let inv = self.rows[r][col].recip();
        let mut new_row: Vec<Rational> = self.rows[r]
            .iter()
            .map(|v| {
                if v.is_zero() {
                    Rational::zero()
                } else {
                    -(v * &inv)
                }
            })
            .collect();
        new_row[col] = inv;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[k]);

        let substitute = |row: &mut Vec<Rational>| {
            let factor = std::mem::replace(&mut row[col], Rational::zero());
            if factor.is_zero() {
                return;
            }
            for (entry, coeff) in row.iter_mut().zip(&new_row) {
                if !coeff.is_zero() {
                    *entry += &factor * coeff;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                substitute(row);
            }
        }
        substitute(&mut self.obj);
        self.rows[r] = new_row;
    }

    /// Bland's rule: smallest-index improving column, ratio-test ties to the
    /// smallest basic index.
    pub fn run(&mut self) -> PhaseEnd {
        loop {
            let entering = (0..self.width())
                .filter(|&k| self.obj[k + 1].is_positive())
                .min_by_key(|&k| self.nonbasic[k]);
            let Some(k) = entering else {
                return PhaseEnd::Optimal;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[k + 1];
                if !a.is_negative() {
                    continue;
                }
                let bound = &row[0] / -a;
                let better = match &leaving {
                    None => true,
                    Some((j, best)) => {
                        bound < *best || (bound == *best && self.basic[i] < self.basic[*j])
                    }
                };
                if better {
                    leaving = Some((i, bound));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, k),
                None => return PhaseEnd::Unbounded,
            }
        }
    }

    /// Auxiliary-variable phase one. Returns false when infeasible. On
    /// success the auxiliary column is gone and the dictionary is feasible.
    pub fn make_feasible(&mut self, aux_id: usize) -> bool {
        let most_negative = (0..self.rows.len())
            .filter(|&i| self.rows[i][0].is_negative())
            .min_by(|&i, &j| {
                self.rows[i][0]
                    .cmp(&self.rows[j][0])
                    .then(self.basic[i].cmp(&self.basic[j]))
            });
        let Some(r) = most_negative else {
            return true;
        };

        for row in &mut self.rows {
            row.push(Rational::one());
        }
        self.nonbasic.push(aux_id);
        self.obj = vec![Rational::zero(); self.width() + 1];
        let aux_col = self.width() - 1;
        self.obj[aux_col + 1] = -Rational::one();

        self.pivot(r, aux_col);
        // Phase one is bounded above by zero.
        let end = self.run();
        debug_assert_eq!(end, PhaseEnd::Optimal);
        if self.obj[0].is_negative() {
            return false;
        }

        if let Some(r) = self.basic.iter().position(|&v| v == aux_id) {
            let k = (0..self.width())
                .filter(|&k| !self.rows[r][k + 1].is_zero())
                .min_by_key(|&k| self.nonbasic[k]);
            match k {
                Some(k) => self.pivot(r, k),
                None => {
                    // The row reads aux = 0 identically.
                    self.rows.remove(r);
                    self.basic.remove(r);
                    self.obj = vec![Rational::zero(); self.width() + 1];
                    return true;
                }
            }
        }
        let k = self
            .nonbasic
            .iter()
            .position(|&v| v == aux_id)
            .expect("auxiliary variable is nonbasic after phase one");
        self.drop_columns(&[k]);
        self.obj = vec![Rational::zero(); self.width() + 1];
        true
    }

    /// Removes nonbasic columns, fixing those variables at zero.
    pub fn drop_columns(&mut self, columns: &[usize]) {
        if columns.is_empty() {
            return;
        }
        let mut keep = vec![true; self.width()];
        for &k in columns {
            keep[k] = false;
        }
        let filter = |row: &mut Vec<Rational>| {
            let mut idx = 0;
            row.retain(|_| {
                let kept = idx == 0 || keep[idx - 1];
                idx += 1;
                kept
            });
        };
        for row in &mut self.rows {
            filter(row);
        }
        filter(&mut self.obj);
        let mut idx = 0;
        self.nonbasic.retain(|_| {
            let kept = keep[idx];
            idx += 1;
            kept
        });
    }

    /// Replaces the objective by `sum_v coeffs[v] * var_v` over internal
    /// variable ids, expressed in the current nonbasic variables.
    pub fn set_objective(&mut self, coeffs: &[(usize, Rational)]) {
        let mut obj = vec![Rational::zero(); self.width() + 1];
        for (var, c) in coeffs {
            if c.is_zero() {
                continue;
            }
            if let Some(k) = self.nonbasic.iter().position(|v| v == var) {
                obj[k + 1] += c;
            } else if let Some(i) = self.basic.iter().position(|v| v == var) {
                for (entry, a) in obj.iter_mut().zip(&self.rows[i]) {
                    if !a.is_zero() {
                        *entry += c * a;
                    }
                }
            }
            // Variables in neither list were fixed at zero by a dropped column.
        }
        self.obj = obj;
    }

    /// Current value of every internal variable with id below `count`.
    pub fn values(&self, count: usize) -> Vec<Rational> {
        let mut vals = vec![Rational::zero(); count];
        for (i, &v) in self.basic.iter().enumerate() {
            if v < count {
                vals[v] = self.rows[i][0].clone();
            }
        }
        vals
    }
}
