//! Sparse exact elimination for the large, mostly-empty systems produced by
//! naturality conditions and cochain differentials.

use std::collections::BTreeMap;

use super::{Matrix, Rational};

/// A sparse matrix stored by rows.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    cols: usize,
    rows: Vec<BTreeMap<usize, Rational>>,
}

impl SparseMatrix {
    pub fn new(cols: usize) -> Self {
        SparseMatrix {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn with_rows(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            cols,
            rows: vec![BTreeMap::new(); rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Appends a row given as `(column, value)` pairs; repeated columns add up.
    pub fn push_row<I: IntoIterator<Item = (usize, Rational)>>(&mut self, entries: I) -> usize {
        let mut row = BTreeMap::new();
        for (c, v) in entries {
            add_entry(&mut row, c, &v);
        }
        self.rows.push(row);
        self.rows.len() - 1
    }

    pub fn add(&mut self, r: usize, c: usize, v: &Rational) {
        assert!(c < self.cols, "column {c} out of range");
        add_entry(&mut self.rows[r], c, v);
    }

    pub fn row(&self, r: usize) -> &BTreeMap<usize, Rational> {
        &self.rows[r]
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows.len(), self.cols);
        for (r, row) in self.rows.iter().enumerate() {
            for (&c, v) in row {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn from_dense(m: &Matrix) -> Self {
        let mut s = SparseMatrix::new(m.cols());
        for r in 0..m.rows() {
            s.push_row(
                m.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone())),
            );
        }
        s
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::with_rows(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for (&c, v) in row {
                t.rows[c].insert(r, v.clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(&c, v)| v * &x[c]).sum())
            .collect()
    }

    pub fn rank(&self) -> usize {
        Echelon::new(self.cols, self.rows.iter().cloned()).pivots.len()
    }

    /// Basis of the null space.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let mut e = Echelon::new(self.cols, self.rows.iter().cloned());
        e.back_substitute();
        let pivot_cols: Vec<usize> = e.pivots.keys().copied().collect();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (&p, row) in &e.pivots {
                    if let Some(x) = row.get(&f) {
                        v[p] = -x;
                    }
                }
                v
            })
            .collect()
    }

    /// Some `x` with `A·x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows.len(), "right-hand side length");
        let rhs = self.cols;
        let rows = self.rows.iter().zip(b).map(|(row, v)| {
            let mut r = row.clone();
            add_entry(&mut r, rhs, v);
            r
        });
        let mut e = Echelon::new(self.cols + 1, rows);
        if e.pivots.contains_key(&rhs) {
            return None;
        }
        e.back_substitute();
        let mut x = vec![Rational::zero(); self.cols];
        for (&p, row) in &e.pivots {
            if let Some(v) = row.get(&rhs) {
                x[p] = v.clone();
            }
        }
        Some(x)
    }

    /// A vector `y` with `yᵀA = 0` and `yᵀb ≠ 0`, certifying that `A·x = b`
    /// has no solution.
    pub fn infeasibility_certificate(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        let left = self.transpose().kernel();
        left.into_iter().find(|y| {
            let dot: Rational = y.iter().zip(b).map(|(u, v)| u * v).sum();
            !dot.is_zero()
        })
    }
}

fn add_entry(row: &mut BTreeMap<usize, Rational>, c: usize, v: &Rational) {
    if v.is_zero() {
        return;
    }
    let e = row.entry(c).or_insert_with(Rational::zero);
    *e += v;
    if e.is_zero() {
        row.remove(&c);
    }
}

/// Row echelon form keyed by pivot column; each pivot row has leading
/// coefficient one at its key.
struct Echelon {
    pivots: BTreeMap<usize, BTreeMap<usize, Rational>>,
}

impl Echelon {
    fn new<I: Iterator<Item = BTreeMap<usize, Rational>>>(_cols: usize, rows: I) -> Self {
        let mut pivots: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
        for mut row in rows {
            // eliminate in increasing column order; only larger columns fill in
            let mut cursor = 0;
            loop {
                let next = row.range(cursor..).next().map(|(&c, v)| (c, v.clone()));
                let Some((c, v)) = next else { break };
                match pivots.get(&c) {
                    Some(p) => {
                        for (&pc, pv) in p {
                            add_entry(&mut row, pc, &-(&v * pv));
                        }
                        cursor = c + 1;
                    }
                    None => {
                        let inv = v.recip();
                        for x in row.values_mut() {
                            *x *= &inv;
                        }
                        pivots.insert(c, row);
                        break;
                    }
                }
            }
        }
        Echelon { pivots }
    }

    /// Clears every pivot column from the other pivot rows.
    fn back_substitute(&mut self) {
        let cols: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for (k, &c) in cols.iter().enumerate() {
            let pivot_row = self.pivots[&c].clone();
            for &other in &cols[k + 1..] {
                let row = self.pivots.get_mut(&other).expect("pivot row");
                if let Some(f) = row.get(&c).cloned() {
                    for (&pc, pv) in &pivot_row {
                        add_entry(row, pc, &-(&f * pv));
                    }
                }
            }
        }
    }
}
