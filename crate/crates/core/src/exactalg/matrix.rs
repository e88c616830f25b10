use std::fmt;

use super::{Field, Ring};

/// Dense row-major matrix over a [`Ring`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged matrix columns");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn map<U: Ring>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut m = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    m[(i, j)] = m[(i, j)].plus(&a.times(&rhs[(k, j)]));
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (a, b)| acc.plus(&a.times(b))))
            .collect()
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.plus(b)).collect() }
    }

    pub fn neg(&self) -> Matrix<T> {
        self.map(Ring::negated)
    }

    /// Copy with column `j` replaced by `v`.
    pub fn with_column(&self, j: usize, v: &[T]) -> Matrix<T> {
        let mut m = self.clone();
        for (i, x) in v.iter().enumerate() {
            m[(i, j)] = x.clone();
        }
        m
    }

    /// Submatrix keeping the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix<T> {
        Matrix::from_rows(rows.iter().map(|&i| cols.iter().map(|&j| self[(i, j)].clone()).collect()).collect())
    }

    /// Determinant by cofactor expansion; needs only ring operations.
    pub fn det_expand(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let all: Vec<usize> = (0..n).collect();
        self.det_expand_rec(&all, &all)
    }

    fn det_expand_rec(&self, rows: &[usize], cols: &[usize]) -> T {
        match cols.len() {
            0 => T::one(),
            1 => self[(rows[0], cols[0])].clone(),
            _ => {
                let r = rows[0];
                let mut acc = T::zero();
                for (k, &c) in cols.iter().enumerate() {
                    let a = &self[(r, c)];
                    if a.is_zero() {
                        continue;
                    }
                    let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = a.times(&self.det_expand_rec(&rows[1..], &sub_cols));
                    acc = if k % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
                }
                acc
            }
        }
    }
}

impl<T: Field> Matrix<T> {
    /// Determinant by fraction-free (Bareiss) elimination with row pivoting.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = T::one();
        for k in 0..n - 1 {
            let Some(p) = (k..n).find(|&i| !m[(i, k)].is_zero()) else {
                return T::zero();
            };
            if p != k {
                m.swap_rows(p, k);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = m[(i, j)].times(&m[(k, k)]).minus(&m[(i, k)].times(&m[(k, j)]));
                    m[(i, j)] = v.over(&prev);
                }
                m[(i, k)] = T::zero();
            }
            prev = m[(k, k)].clone();
        }
        let d = m[(n - 1, n - 1)].clone();
        if negate {
            d.negated()
        } else {
            d
        }
    }

    /// Rank by fraction-free (Bareiss) row echelon reduction.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut prev = T::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let v = m[(i, j)].times(&m[(r, c)]).minus(&m[(i, c)].times(&m[(r, j)]));
                    m[(i, j)] = v.over(&prev);
                }
                m[(i, c)] = T::zero();
            }
            prev = m[(r, c)].clone();
            r += 1;
        }
        r
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix<T>> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv: Matrix<T> = Matrix::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| !a[(i, c)].is_zero())?;
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            let piv = a[(c, c)].clone();
            for j in 0..n {
                a[(c, j)] = a[(c, j)].over(&piv);
                inv[(c, j)] = inv[(c, j)].over(&piv);
            }
            for i in 0..n {
                if i == c || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in 0..n {
                    a[(i, j)] = a[(i, j)].minus(&f.times(&a[(c, j)]));
                    inv[(i, j)] = inv[(i, j)].minus(&f.times(&inv[(c, j)]));
                }
            }
        }
        Some(inv)
    }

    /// Solves `self * x = rhs` by Cramer's rule; `None` when singular.
    pub fn cramer(&self, rhs: &[T]) -> Option<Vec<T>> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        Some((0..self.cols).map(|j| self.with_column(j, rhs).det().over(&d)).collect())
    }
}

impl<T> Matrix<T> {
    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, Rat, RationalFunction, UniPoly};

    fn m(rows: &[&[i64]]) -> Matrix<Rat> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    #[test]
    fn rank_of_trivial_matrices() {
        assert_eq!(Matrix::<Rat>::zeros(3, 3).rank(), 0);
        for n in 1..5 {
            assert_eq!(Matrix::<Rat>::identity(n).rank(), n);
        }
        assert_eq!(m(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]]).rank(), 2);
        assert_eq!(m(&[&[0, 1], &[0, 0], &[0, 3]]).rank(), 1);
    }

    #[test]
    fn det_agrees_with_cofactor_expansion() {
        let a = m(&[&[2, -1, 0, 3], &[1, 1, 4, 0], &[0, 5, -2, 1], &[3, 0, 1, 1]]);
        assert_eq!(a.det(), a.det_expand());
        assert!(m(&[&[1, 2], &[1, 2]]).det().is_zero());
        assert_eq!(Matrix::<Rat>::identity(3).det(), int(1));
    }

    #[test]
    fn det_of_rational_function_matrix() {
        let p = |c: &[i64]| RationalFunction::from_poly(UniPoly::from_ints(c));
        // [[2t-1, 2], [t^2, 2t]] -> 2t^2 - 2t
        let k = Matrix::from_rows(vec![vec![p(&[-1, 2]), p(&[2])], vec![p(&[0, 0, 1]), p(&[0, 2])]]);
        assert_eq!(k.det(), p(&[0, -2, 2]));
    }

    #[test]
    fn inverse_and_cramer() {
        let a = m(&[&[2, 1], &[5, 3]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert_eq!(a.cramer(&[int(1), int(2)]).unwrap(), vec![int(1), int(-1)]);
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
