use num_traits::{One, Zero};

use crate::poly::Rational;

/// Incrementally maintained reduced row echelon form over `Q`.
#[derive(Debug, Clone)]
pub struct Echelon {
    cols: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    /// Add a row; returns whether the rank grew.
    pub fn add_row(&mut self, mut v: Vec<Rational>) -> bool {
        debug_assert_eq!(v.len(), self.cols);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x -= &f * r;
                    }
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = Rational::one() / &v[p];
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, r) in row.iter_mut().zip(&v) {
                    if !r.is_zero() {
                        *x -= &f * r;
                    }
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    /// Basis of `{c : row . c = 0 for every row}`, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let mut out = Vec::new();
        for free in 0..self.cols {
            if self.pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                v[p] = -row[free].clone();
            }
            out.push(v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn null_space_is_orthogonal() {
        let mut e = Echelon::new(3);
        assert!(e.add_row(vec![rat(1), rat(2), rat(3)]));
        assert!(!e.add_row(vec![rat(2), rat(4), rat(6)]));
        assert!(e.add_row(vec![rat(0), rat(1), rat(1)]));
        let ns = e.null_space();
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert_eq!(&v[0] + &(rat(2) * &v[1]) + rat(3) * &v[2], rat(0));
        assert_eq!(&v[1] + &v[2], rat(0));
        assert!(!e.is_full());
    }
}
