//! LU factorization with partial pivoting for complex matrices. Backs the
//! Padé solve in the matrix exponential and the occasional explicit inverse.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Packed L and U factors with the pivot row permutation.
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Factor PA = LU choosing the largest-modulus pivot in each column.
    pub fn factor(a: &CMatrix) -> Result<Lu> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut best = k;
            let mut best_mag = lu[(k, k)].norm();
            for i in k + 1..n {
                let mag = lu[(i, k)].norm();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag < f64::MIN_POSITIVE {
                return Err(Error::Singular(best_mag));
            }
            if best != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(best, j)];
                    lu[(best, j)] = tmp;
                }
                perm.swap(k, best);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let adj = factor * lu[(k, j)];
                    lu[(i, j)] -= adj;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    /// Solve A·X = B column by column.
    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.lu.dim();
        assert_eq!(b.dim(), n, "right-hand side dimension mismatch");
        let mut x = CMatrix::zeros(n);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = b[(self.perm[i], j)];
            }
            // Forward pass through the unit-diagonal L.
            for i in 1..n {
                for k in 0..i {
                    let adj = self.lu[(i, k)] * col[k];
                    col[i] -= adj;
                }
            }
            // Back substitution through U.
            for i in (0..n).rev() {
                for k in i + 1..n {
                    let adj = self.lu[(i, k)] * col[k];
                    col[i] -= adj;
                }
                col[i] /= self.lu[(i, i)];
            }
            for i in 0..n {
                x[(i, j)] = col[i];
            }
        }
        x
    }

    /// Solve A·x = b for a single right-hand side.
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.dim();
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut col: Vec<Complex64> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 1..n {
            for k in 0..i {
                let adj = self.lu[(i, k)] * col[k];
                col[i] -= adj;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let adj = self.lu[(i, k)] * col[k];
                col[i] -= adj;
            }
            col[i] /= self.lu[(i, i)];
        }
        col
    }

    /// Determinant from the pivot product and the permutation parity.
    pub fn det(&self) -> Complex64 {
        let n = self.lu.dim();
        let mut d = Complex64::new(parity(&self.perm), 0.0);
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        d
    }
}

fn parity(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Solve A·X = B.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    Ok(Lu::factor(a)?.solve(b))
}

/// Matrix inverse.
pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    solve(a, &CMatrix::identity(a.dim()))
}

/// Determinant; zero for a matrix the factorization finds singular.
pub fn det(a: &CMatrix) -> Complex64 {
    match Lu::factor(a) {
        Ok(lu) => lu.det(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}
