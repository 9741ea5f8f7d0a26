//! Characteristic polynomial in the closure convention used throughout the
//! crate: L^n = A_{n−1}·L^{n−1} + … + A_0·I. These are the negated
//! coefficients of the monic characteristic polynomial det(xI − L).

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Coefficients A_0..A_{n−1} of the power-closure identity above.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPolyCoeffs {
    /// a[i] multiplies L^i.
    pub a: Vec<Complex64>,
}

impl CharPolyCoeffs {
    /// Number of coefficients, equal to the source matrix dimension.
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Coefficients of monic det(xI − L), constant term first, degree n last.
    pub fn monic(&self) -> Vec<Complex64> {
        let mut m: Vec<Complex64> = self.a.iter().map(|v| -v).collect();
        m.push(Complex64::new(1.0, 0.0));
        m
    }
}

/// Characteristic polynomial by the Faddeev–LeVerrier recurrence.
pub fn char_poly(l: &CMatrix) -> Result<CharPolyCoeffs> {
    let n = l.dim();
    if n == 0 {
        return Err(Error::Dimension(0));
    }
    if !l.is_finite() {
        return Err(Error::NonFinite("char_poly input"));
    }
    // monic[k] multiplies x^k in det(xI − L).
    let mut monic = vec![Complex64::new(0.0, 0.0); n + 1];
    monic[n] = Complex64::new(1.0, 0.0);
    let mut aux = CMatrix::identity(n);
    for k in 1..=n {
        let lm = l.mul(&aux);
        let c = -lm.trace() / k as f64;
        monic[n - k] = c;
        if k < n {
            let mut next = lm;
            for i in 0..n {
                next[(i, i)] += c;
            }
            aux = next;
        }
    }
    let a = monic[..n].iter().map(|v| -v).collect();
    Ok(CharPolyCoeffs { a })
}

/// ‖L^n − Σ A_i·L^i‖_max; the closure identity makes this vanish up to
/// roundoff scaled by powers of ‖L‖.
pub fn cayley_hamilton_residual(l: &CMatrix, coeffs: &CharPolyCoeffs) -> f64 {
    let n = l.dim();
    assert_eq!(coeffs.dim(), n, "coefficient count must match dimension");
    let mut power = CMatrix::identity(n);
    let mut acc = CMatrix::zeros(n);
    for i in 0..n {
        acc = acc.add(&power.scale(coeffs.a[i]));
        power = power.mul(l);
    }
    // power is now L^n.
    power.max_diff(&acc)
}

/// Tolerance the closure residual is held to for a matrix of this norm.
pub fn cayley_hamilton_tolerance(l: &CMatrix) -> f64 {
    1e-10 * l.max_norm().max(1.0).powi(l.dim() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::reference::char_poly_cofactor;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_two() {
        // I² = 2I − I, so (A_0, A_1) = (−1, 2).
        let coeffs = char_poly(&CMatrix::identity(2)).unwrap();
        assert!((coeffs.a[0] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((coeffs.a[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn diag_one_two() {
        let l = CMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let coeffs = char_poly(&l).unwrap();
        assert!((coeffs.a[0] - c(-2.0, 0.0)).norm() < 1e-15);
        assert!((coeffs.a[1] - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn matches_cofactor_oracle_on_fixed_3x3() {
        let l = CMatrix::from_rows(&[
            vec![c(0.3, -0.2), c(-0.9, 0.4), c(0.1, 0.0)],
            vec![c(0.7, 0.0), c(0.2, 0.8), c(-0.5, -0.3)],
            vec![c(-0.1, 0.6), c(0.4, 0.0), c(-0.6, 0.1)],
        ]);
        let fast = char_poly(&l).unwrap().monic();
        let slow = char_poly_cofactor(&l);
        for (f, s) in fast.iter().zip(slow.iter()) {
            assert!((f - s).norm() < 1e-12, "fast {f} vs cofactor {s}");
        }
    }

    #[test]
    fn closure_residual_small() {
        let l = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(3.0, 0.0)],
        ]);
        let coeffs = char_poly(&l).unwrap();
        let r = cayley_hamilton_residual(&l, &coeffs);
        assert!(r < cayley_hamilton_tolerance(&l), "residual {r}");
    }

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(matches!(
            char_poly(&CMatrix::from_diag(&[c(f64::NAN, 0.0)])),
            Err(Error::NonFinite(_))
        ));
    }
}
