//! Slow reference implementations used only to cross-check the production
//! kernels. Each one takes a route with no shared code: determinant by
//! cofactor expansion over polynomial entries, exponential by scaled Taylor
//! summation, quadratic roots by the stable formula.

use num_complex::Complex64;

use super::matrix::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Polynomial in one variable, coefficient of x^k at index k.
type Poly = Vec<Complex64>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_scaled(acc: &mut Poly, s: Complex64, p: &Poly) {
    if acc.len() < p.len() {
        acc.resize(p.len(), ZERO);
    }
    for (i, v) in p.iter().enumerate() {
        acc[i] += s * v;
    }
}

/// Coefficients of det(xI − L), degree n, by cofactor expansion along the
/// first active column. Exponential cost, so callers keep n small.
pub fn char_poly_cofactor(l: &CMatrix) -> Poly {
    let n = l.dim();
    // Entry (i, j) of xI − L as a degree ≤ 1 polynomial.
    let entry = |i: usize, j: usize| -> Poly {
        if i == j {
            vec![-l[(i, j)], ONE]
        } else {
            vec![-l[(i, j)]]
        }
    };
    fn det(rows: &[usize], cols: &[usize], entry: &dyn Fn(usize, usize) -> Poly) -> Poly {
        if rows.len() == 1 {
            return entry(rows[0], cols[0]);
        }
        let mut acc: Poly = vec![ZERO];
        for (k, &row) in rows.iter().enumerate() {
            let e = entry(row, cols[0]);
            if e.iter().all(|v| *v == ZERO) {
                continue;
            }
            let sub_rows: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|r| *r != row)
                .collect();
            let minor = det(&sub_rows, &cols[1..], entry);
            let signed = if k % 2 == 0 { ONE } else { -ONE };
            let term = poly_mul(&e, &minor);
            poly_add_scaled(&mut acc, signed, &term);
        }
        acc
    }
    let idx: Vec<usize> = (0..n).collect();
    let mut p = det(&idx, &idx, &entry);
    p.resize(n + 1, ZERO);
    p
}

/// exp(A) by argument scaling and direct Taylor summation.
pub fn expm_taylor(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    let norm = a.one_norm();
    let mut squarings = 0u32;
    let mut scaled = a.clone();
    while scaled.one_norm() > 0.25 && squarings < 60 {
        scaled = scaled.scale(Complex64::new(0.5, 0.0));
        squarings += 1;
    }
    let mut sum = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..200 {
        term = term.mul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
        if term.max_norm() < 1e-20 * (1.0 + norm) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}

/// Roots of x^2 + b·x + c, ordered so the larger-modulus root comes first.
/// The smaller root is recovered from the product to dodge cancellation.
pub fn quadratic_roots(b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let half_b = b * Complex64::new(0.5, 0.0);
    let disc = (half_b * half_b - c).sqrt();
    let r1 = if (-half_b + disc).norm() >= (-half_b - disc).norm() {
        -half_b + disc
    } else {
        -half_b - disc
    };
    if r1 == ZERO {
        return (ZERO, ZERO);
    }
    (r1, c / r1)
}
