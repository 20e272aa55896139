//! Dense column-major matrices and Householder QR least squares.

use crate::scalar::Real;

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from equally long columns.
    pub fn from_columns(columns: &[Vec<T>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
        Self {
            rows,
            cols: columns.len(),
            data: columns.concat(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    /// Copy of the listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        Self {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![T::zero(); self.rows];
        for (j, &vj) in v.iter().enumerate() {
            if vj == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.col(j)) {
                *o = *o + a * vj;
            }
        }
        out
    }

    /// `selfᵀ * v`.
    pub fn tr_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols).map(|j| dot(self.col(j), v)).collect()
    }

    /// Scales row `i` by `w[i]`.
    pub fn scale_rows(&self, w: &[T]) -> Self {
        assert_eq!(w.len(), self.rows);
        let mut out = self.clone();
        for j in 0..self.cols {
            for (a, &wi) in out.col_mut(j).iter_mut().zip(w) {
                *a = *a * wi;
            }
        }
        out
    }
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Householder QR factorization of a tall matrix (`rows >= cols`).
#[derive(Debug, Clone)]
pub struct Qr<T> {
    /// Householder vectors on and below the diagonal, R strictly above.
    packed: Matrix<T>,
    rdiag: Vec<T>,
    tau: Vec<T>,
}

impl<T: Real> Qr<T> {
    pub fn new(mut a: Matrix<T>) -> Self {
        let (m, n) = (a.rows, a.cols);
        assert!(m >= n, "QR requires rows >= cols");
        let mut rdiag = vec![T::zero(); n];
        let mut tau = vec![T::zero(); n];
        for k in 0..n {
            let (norm, alpha) = {
                let c = &a.col(k)[k..];
                (norm2(c), c[0])
            };
            if norm == T::zero() {
                continue;
            }
            let s = if alpha > T::zero() { -norm } else { norm };
            let v0 = alpha - s;
            // vᵀv = norm² - alpha² + v0² = 2 norm (norm + |alpha|)
            let vtv = T::of(2.0) * norm * (norm + alpha.abs());
            let t = T::of(2.0) / vtv;
            a.col_mut(k)[k] = v0;
            rdiag[k] = s;
            tau[k] = t;
            for j in k + 1..n {
                let d = {
                    let v = &a.col(k)[k..];
                    let cj = &a.col(j)[k..];
                    dot(v, cj)
                };
                let scale = t * d;
                let (left, right) = a.data.split_at_mut(j * m);
                let v = &left[k * m + k..k * m + m];
                let cj = &mut right[k..m];
                for (c, &vi) in cj.iter_mut().zip(v) {
                    *c = *c - scale * vi;
                }
            }
        }
        Self {
            packed: a,
            rdiag,
            tau,
        }
    }

    pub fn cols(&self) -> usize {
        self.packed.cols
    }

    pub fn r_diag(&self) -> &[T] {
        &self.rdiag
    }

    /// Upper triangular factor `R` (`cols × cols`).
    pub fn r(&self) -> Matrix<T> {
        let n = self.packed.cols;
        Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => self.packed.get(i, j),
            std::cmp::Ordering::Equal => self.rdiag[i],
            std::cmp::Ordering::Greater => T::zero(),
        })
    }

    /// Columns whose diagonal entry of `R` falls below
    /// `rel_tol * max |R_ii|`.
    pub fn deficient_columns(&self, rel_tol: T) -> Vec<usize> {
        let largest = self.rdiag.iter().fold(T::zero(), |m, d| m.max(d.abs()));
        let cut = rel_tol * largest;
        self.rdiag
            .iter()
            .enumerate()
            .filter(|(_, d)| !(d.abs() > cut))
            .map(|(i, _)| i)
            .collect()
    }

    /// Applies `Qᵀ` to `b` in place.
    pub fn apply_qt(&self, b: &mut [T]) {
        let m = self.packed.rows;
        assert_eq!(b.len(), m);
        for k in 0..self.packed.cols {
            if self.tau[k] == T::zero() {
                continue;
            }
            let v = &self.packed.col(k)[k..];
            let d = dot(v, &b[k..]);
            let scale = self.tau[k] * d;
            for (bi, &vi) in b[k..].iter_mut().zip(v) {
                *bi = *bi - scale * vi;
            }
        }
    }

    /// Least-squares solution of `A x ≈ b`; returns `(x, residual sum of
    /// squares)`. The caller is responsible for the rank check.
    pub fn solve_least_squares(&self, b: &[T]) -> (Vec<T>, T) {
        let n = self.packed.cols;
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        let rss = qtb[n..].iter().fold(T::zero(), |acc, &v| acc + v * v);
        let mut x = qtb[..n].to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.packed.get(i, j) * x[j];
            }
            x[i] = s / self.rdiag[i];
        }
        (x, rss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_reproduces_gram_matrix() {
        let a = Matrix::from_fn(6, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 + 0.1 * (i as f64) - j as f64);
        let r = Qr::new(a.clone()).r();
        for i in 0..3 {
            for j in 0..3 {
                let ata = dot(a.col(i), a.col(j));
                let rtr: f64 = (0..3).map(|k| r.get(k, i) * r.get(k, j)).sum();
                assert!((ata - rtr).abs() < 1e-12 * ata.abs().max(1.0));
            }
        }
    }

    #[test]
    fn exact_system_solved() {
        let a: Matrix<f64> = Matrix::from_columns(&[vec![1.0, 1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0, 3.0]]);
        let b = vec![1.0, 3.0, 5.0, 7.0];
        let (x, rss) = Qr::new(a).solve_least_squares(&b);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
        assert!(rss < 1e-25);
    }

    #[test]
    fn dependent_column_flagged() {
        let a = Matrix::from_columns(&[
            vec![1.0, 1.0, 1.0, 1.0],
            vec![0.0, 1.0, 2.0, 3.0],
            vec![2.0, 3.0, 4.0, 5.0],
        ]);
        assert_eq!(Qr::new(a).deficient_columns(1e-10), vec![2]);
    }
}
