//! Dense square complex matrices in row-major storage. Dimensions stay small
//! (a few up to sixteen), so every kernel is a plain loop.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

/// Largest dimension the iterative eigensolver accepts.
pub const MAX_DIM: usize = 16;

/// Square complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Zero matrix of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Build from explicit rows. Panics unless the layout is square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        assert!(n >= 1, "matrix dimension must be at least 1");
        let mut m = CMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has length {} in a {n}x{n} matrix", row.len());
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Entrywise construction from a closure over (row, column).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        self.zip(rhs, |a, b| a + b)
    }

    /// Entrywise difference.
    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        self.zip(rhs, |a, b| a - b)
    }

    /// Matrix product.
    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n, "dimension mismatch in matrix-vector product");
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Scalar multiple.
    pub fn scale(&self, s: Complex64) -> CMatrix {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= s;
        }
        out
    }

    /// Commutator [self, rhs] = self·rhs − rhs·self.
    pub fn commutator(&self, rhs: &CMatrix) -> CMatrix {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Anticommutator {self, rhs} = self·rhs + rhs·self.
    pub fn anticommutator(&self, rhs: &CMatrix) -> CMatrix {
        self.mul(rhs).add(&rhs.mul(self))
    }

    /// Transpose (no conjugation).
    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// Max-abs-entry norm; every tolerance in this crate is stated in it.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Maximum column sum of entry moduli.
    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.n {
            let s: f64 = (0..self.n).map(|i| self[(i, j)].norm()).sum();
            best = best.max(s);
        }
        best
    }

    /// Largest entrywise deviation from `rhs`.
    pub fn max_diff(&self, rhs: &CMatrix) -> f64 {
        self.sub(rhs).max_norm()
    }

    /// True when no entry is NaN or infinite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    fn zip(&self, rhs: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in entrywise op");
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let v = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// tr(L^k). The zeroth power contributes the dimension exactly.
pub fn mat_trace_power(l: &CMatrix, k: usize) -> Complex64 {
    trace_powers(l, k)[k]
}

/// tr(L^0), tr(L^1), ..., tr(L^kmax) in one pass of repeated products.
pub fn trace_powers(l: &CMatrix, kmax: usize) -> Vec<Complex64> {
    let n = l.dim();
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(Complex64::new(n as f64, 0.0));
    if kmax == 0 {
        return out;
    }
    let mut p = l.clone();
    out.push(p.trace());
    for _ in 2..=kmax {
        p = p.mul(l);
        out.push(p.trace());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trace_power_identity() {
        let i2 = CMatrix::identity(2);
        assert_eq!(mat_trace_power(&i2, 2), c(2.0, 0.0));
        assert_eq!(mat_trace_power(&i2, 0), c(2.0, 0.0));
    }

    #[test]
    fn trace_power_diagonal() {
        let d = CMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(mat_trace_power(&d, 2), c(5.0, 0.0));
        assert_eq!(mat_trace_power(&d, 3), c(9.0, 0.0));
    }

    #[test]
    fn trace_power_hermitian_pair() {
        // tr(L^2) for L = [[2, -i], [i, 3]] by hand: 4+1 + 1+9 = 15.
        let l = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(3.0, 0.0)],
        ]);
        let t = mat_trace_power(&l, 2);
        assert!((t - c(15.0, 0.0)).norm() < 1e-14, "tr(L^2) = {t}");
    }

    #[test]
    fn product_and_commutator() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(4.0, 0.0)]]);
        let b = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        let ab = a.mul(&b);
        assert_eq!(ab[(0, 1)], c(1.0, 0.0));
        assert_eq!(ab[(1, 1)], c(3.0, 0.0));
        let comm = a.commutator(&b);
        let expected = a.mul(&b).sub(&b.mul(&a));
        assert!(comm.max_diff(&expected) == 0.0);
        // tr[A,B] vanishes identically.
        assert!(comm.trace().norm() < 1e-15);
    }

    #[test]
    fn norms() {
        let m = CMatrix::from_rows(&[vec![c(0.0, -3.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]]);
        assert_eq!(m.max_norm(), 3.0);
        assert_eq!(m.one_norm(), 3.0);
        assert!(m.is_finite());
    }

    #[test]
    fn trace_powers_batch_matches_single() {
        let l = CMatrix::from_rows(&[
            vec![c(0.5, 0.1), c(-1.0, 0.3)],
            vec![c(2.0, -0.2), c(0.0, 1.0)],
        ]);
        let batch = trace_powers(&l, 4);
        for (k, t) in batch.iter().enumerate() {
            assert!((t - mat_trace_power(&l, k)).norm() < 1e-13);
        }
    }
}
