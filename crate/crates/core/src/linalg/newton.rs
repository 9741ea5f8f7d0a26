//! Newton's identities: the bidirectional map between power sums
//! p_k = tr(L^k) and the closure coefficients A_i. This is the second,
//! trace-only route to the characteristic polynomial and must agree with the
//! Faddeev–LeVerrier route; the two are kept independent on purpose.

use num_complex::Complex64;

use super::charpoly::CharPolyCoeffs;
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn sign(k: usize) -> Complex64 {
    if k % 2 == 0 {
        ONE
    } else {
        -ONE
    }
}

/// Elementary symmetric functions e_1..e_n from power sums p_1..p_n via
/// k·e_k = Σ_{i=1..k} (−1)^{i−1} e_{k−i} p_i.
fn power_sums_to_elementary(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len();
    let mut e = vec![ONE; n + 1];
    for k in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            acc += sign(i - 1) * e[k - i] * p[i - 1];
        }
        e[k] = acc / k as f64;
    }
    e
}

/// Closure coefficients from the power sums tr(L^1)..tr(L^n).
pub fn power_sums_to_coeffs(p: &[Complex64]) -> Result<CharPolyCoeffs> {
    let n = p.len();
    if n == 0 {
        return Err(Error::Dimension(0));
    }
    if p.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("newton power sums"));
    }
    let e = power_sums_to_elementary(p);
    // Monic coefficient of x^{n−k} is (−1)^k e_k; the closure convention
    // negates it.
    let a = (0..n).map(|i| -(sign(n - i) * e[n - i])).collect();
    Ok(CharPolyCoeffs { a })
}

/// Power sums tr(L^1)..tr(L^n) recovered from closure coefficients.
pub fn coeffs_to_power_sums(coeffs: &CharPolyCoeffs) -> Vec<Complex64> {
    let n = coeffs.dim();
    let mut e = vec![ONE; n + 1];
    for k in 1..=n {
        e[k] = sign(k) * -coeffs.a[n - k];
    }
    let mut p = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..=n {
        let mut acc = k as f64 * e[k];
        for i in 1..k {
            acc -= sign(i - 1) * e[k - i] * p[i - 1];
        }
        p[k - 1] = sign(k - 1) * acc;
    }
    p
}

/// Coefficients from power sums, with the inverse map checked to round-trip.
pub fn newton_roundtrip(p: &[Complex64]) -> Result<CharPolyCoeffs> {
    let coeffs = power_sums_to_coeffs(p)?;
    let back = coeffs_to_power_sums(&coeffs);
    let scale: f64 = p.iter().map(|v| v.norm()).fold(1.0, f64::max);
    for (orig, rec) in p.iter().zip(back.iter()) {
        let dev = (orig - rec).norm();
        if dev > 1e-12 * scale {
            return Err(Error::RoundTrip {
                context: "newton identities",
                deviation: dev,
            });
        }
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::charpoly::char_poly;
    use crate::linalg::matrix::{trace_powers, CMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_power_sums() {
        // diag(1,1): p = (2,2) gives I² = 2I − I.
        let coeffs = newton_roundtrip(&[c(2.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((coeffs.a[0] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((coeffs.a[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn diag_one_two_power_sums() {
        let coeffs = newton_roundtrip(&[c(3.0, 0.0), c(5.0, 0.0)]).unwrap();
        assert!((coeffs.a[0] - c(-2.0, 0.0)).norm() < 1e-15);
        assert!((coeffs.a[1] - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_spectrum() {
        let coeffs = newton_roundtrip(&[c(0.0, 0.0); 3]).unwrap();
        for v in &coeffs.a {
            assert_eq!(*v, c(0.0, 0.0));
        }
    }

    #[test]
    fn agrees_with_faddeev_leverrier() {
        let l = CMatrix::from_rows(&[
            vec![c(0.3, -0.2), c(-0.9, 0.4), c(0.1, 0.0)],
            vec![c(0.7, 0.0), c(0.2, 0.8), c(-0.5, -0.3)],
            vec![c(-0.1, 0.6), c(0.4, 0.0), c(-0.6, 0.1)],
        ]);
        let direct = char_poly(&l).unwrap();
        let p = trace_powers(&l, 3);
        let via_traces = newton_roundtrip(&p[1..]).unwrap();
        for (d, t) in direct.a.iter().zip(via_traces.a.iter()) {
            assert!((d - t).norm() < 1e-12, "direct {d} vs newton {t}");
        }
    }

    #[test]
    fn inverse_map_recovers_traces() {
        let l = CMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(0.2, 0.0)],
            vec![c(-0.4, 0.0), c(0.0, -1.0)],
        ]);
        let coeffs = char_poly(&l).unwrap();
        let p = coeffs_to_power_sums(&coeffs);
        let expected = trace_powers(&l, 2);
        assert!((p[0] - expected[1]).norm() < 1e-13);
        assert!((p[1] - expected[2]).norm() < 1e-13);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(newton_roundtrip(&[]), Err(Error::Dimension(0))));
    }
}
