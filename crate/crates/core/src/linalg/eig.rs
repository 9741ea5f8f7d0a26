//! Dense complex eigenvalues: Householder reduction to upper Hessenberg form
//! followed by shifted QR iteration with Givens rotations. Dimension is
//! capped at 16, which keeps the explicit-QR sweep affordable.

use num_complex::Complex64;

use super::matrix::{CMatrix, MAX_DIM};
use super::reference::quadratic_roots;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues with multiplicity in canonical order.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if n > MAX_DIM {
        return Err(Error::Dimension(n));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("eigenvalue input"));
    }
    let mut vals = if n == 1 {
        vec![m[(0, 0)]]
    } else {
        let mut h = hessenberg(m);
        qr_eigenvalues(&mut h)?
    };
    if vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("eigenvalue iteration"));
    }
    sort_canonical(&mut vals);
    Ok(vals)
}

/// Sort lexicographically by (re, im). Real parts closer than 1e-9 are
/// treated as tied so that roundoff cannot flip the order of a pair.
pub fn sort_canonical(vals: &mut [Complex64]) {
    vals.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    // Re-sort runs of nearly equal real parts by imaginary part.
    let mut start = 0;
    for i in 1..=vals.len() {
        let split = i == vals.len() || (vals[i].re - vals[i - 1].re).abs() > 1e-9;
        if split {
            vals[start..i].sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
            start = i;
        }
    }
}

/// Reduce to upper Hessenberg form by unitary Householder similarity.
fn hessenberg(m: &CMatrix) -> CMatrix {
    let n = m.dim();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        // Reflect column k below the subdiagonal onto the subdiagonal.
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm_x: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm_x < f64::MIN_POSITIVE {
            continue;
        }
        let phase = if v[0].norm() > 0.0 {
            v[0] / v[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        v[0] += phase * norm_x;
        let vnorm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < f64::MIN_POSITIVE {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        // Left update: rows k+1.., all columns.
        for j in 0..n {
            let dot: Complex64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            let two_dot = dot * 2.0;
            for i in 0..v.len() {
                let adj = v[i] * two_dot;
                h[(k + 1 + i, j)] -= adj;
            }
        }
        // Right update: columns k+1.., all rows.
        for i in 0..n {
            let dot: Complex64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            let two_dot = dot * 2.0;
            for j in 0..v.len() {
                let adj = two_dot * v[j].conj();
                h[(i, k + 1 + j)] -= adj;
            }
        }
    }
    h
}

/// Shifted QR with deflation on an upper Hessenberg matrix.
fn qr_eigenvalues(h: &mut CMatrix) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let mut vals = vec![ZERO; n];
    let mut hi = n - 1;
    let mut sweeps_in_block = 0usize;
    let budget = SWEEPS_PER_EIGENVALUE;
    loop {
        // Kill subdiagonal entries that have decayed to roundoff.
        let whole = h.max_norm();
        for i in 1..=hi {
            let scale = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
            let thresh = if scale > 0.0 {
                f64::EPSILON * scale
            } else {
                f64::EPSILON * whole
            };
            if h[(i, i - 1)].norm() <= thresh {
                h[(i, i - 1)] = ZERO;
            }
        }
        // Deflate converged trailing eigenvalues.
        loop {
            if hi == 0 {
                vals[0] = h[(0, 0)];
                return Ok(vals);
            }
            if h[(hi, hi - 1)] == ZERO {
                vals[hi] = h[(hi, hi)];
                hi -= 1;
                sweeps_in_block = 0;
                continue;
            }
            if hi == 1 || h[(hi - 1, hi - 2)] == ZERO {
                // Trailing 2x2 block: closed-form roots.
                let a = h[(hi - 1, hi - 1)];
                let b = h[(hi - 1, hi)];
                let c = h[(hi, hi - 1)];
                let d = h[(hi, hi)];
                let (r1, r2) = quadratic_roots(-(a + d), a * d - b * c);
                vals[hi] = r1;
                vals[hi - 1] = r2;
                if hi == 1 {
                    return Ok(vals);
                }
                hi -= 2;
                sweeps_in_block = 0;
                continue;
            }
            break;
        }
        // Active block is lo..=hi with nonzero subdiagonals throughout.
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)] != ZERO {
            lo -= 1;
        }
        sweeps_in_block += 1;
        if sweeps_in_block > budget {
            return Err(Error::NonConvergence {
                n,
                sweeps: budget,
            });
        }
        let shift = if sweeps_in_block % 12 == 0 {
            // Exceptional shift breaks symmetry-locked stagnation.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h, hi)
        };
        qr_sweep(h, lo, hi, shift);
    }
}

/// Eigenvalue of the trailing 2x2 closest to the corner entry.
fn wilkinson_shift(h: &CMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let (r1, r2) = quadratic_roots(-(a + d), a * d - b * c);
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// One explicit shifted QR step on the block lo..=hi via Givens rotations.
fn qr_sweep(h: &mut CMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = h.dim();
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    // Forward pass annihilates the subdiagonal, recording each rotation.
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
        rotations.push((c, s));
        for j in i..n {
            let top = h[(i, j)];
            let bot = h[(i + 1, j)];
            h[(i, j)] = top * c + bot * s;
            h[(i + 1, j)] = -s.conj() * top + bot * c;
        }
        h[(i + 1, i)] = ZERO;
    }
    // Multiply the transposed rotations back on the right: H <- R Q* + shift.
    for (idx, (c, s)) in rotations.iter().enumerate() {
        let i = lo + idx;
        for r in 0..=(i + 1).min(hi) {
            let left = h[(r, i)];
            let right = h[(r, i + 1)];
            h[(r, i)] = left * *c + right * s.conj();
            h[(r, i + 1)] = -*s * left + right * *c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Complex Givens pair (c real, s complex) zeroing b in (a, b).
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = (na * na + nb * nb).sqrt();
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lu::det;
    use crate::linalg::matrix::trace_powers;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix() {
        let m = CMatrix::from_diag(&[c(3.0, 0.0), c(1.0, 2.0)]);
        let vals = eigenvalues(&m).unwrap();
        assert!((vals[0] - c(1.0, 2.0)).norm() < 1e-12);
        assert!((vals[1] - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn symmetric_exchange() {
        let m = CMatrix::from_rows(&[vec![ZERO, c(1.0, 0.0)], vec![c(1.0, 0.0), ZERO]]);
        let vals = eigenvalues(&m).unwrap();
        assert!((vals[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((vals[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn companion_of_quadratic() {
        // Companion of x^2 - 3x + 2; roots 1 and 2 confirmed by the
        // quadratic oracle.
        let m = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(-2.0, 0.0)],
            vec![c(1.0, 0.0), c(3.0, 0.0)],
        ]);
        let vals = eigenvalues(&m).unwrap();
        let (r_big, r_small) = quadratic_roots(c(-3.0, 0.0), c(2.0, 0.0));
        assert!((vals[0] - r_small).norm() < 1e-12);
        assert!((vals[1] - r_big).norm() < 1e-12);
    }

    #[test]
    fn defective_jordan_block() {
        let m = CMatrix::from_rows(&[vec![ZERO, c(1.0, 0.0)], vec![ZERO, ZERO]]);
        let vals = eigenvalues(&m).unwrap();
        assert!(vals[0].norm() < 1e-8);
        assert!(vals[1].norm() < 1e-8);
    }

    #[test]
    fn trace_and_det_invariants_fixed_4x4() {
        let m = CMatrix::from_rows(&[
            vec![c(0.2, 0.1), c(-0.5, 0.0), c(0.3, -0.7), c(0.0, 0.4)],
            vec![c(1.1, 0.0), c(0.0, -0.3), c(0.2, 0.0), c(-0.6, 0.1)],
            vec![c(0.0, 0.9), c(0.4, 0.0), c(-0.8, 0.0), c(0.5, -0.2)],
            vec![c(-0.3, 0.0), c(0.0, 0.0), c(0.7, 0.3), c(0.1, 0.6)],
        ]);
        let vals = eigenvalues(&m).unwrap();
        let sum: Complex64 = vals.iter().sum();
        let prod: Complex64 = vals.iter().product();
        assert!((sum - m.trace()).norm() < 1e-10, "trace mismatch {sum}");
        assert!((prod - det(&m)).norm() < 1e-10, "det mismatch {prod}");
        let p2: Complex64 = vals.iter().map(|v| v * v).sum();
        assert!((p2 - trace_powers(&m, 2)[2]).norm() < 1e-10);
    }

    #[test]
    fn canonical_order_breaks_ties_by_imaginary_part() {
        let mut vals = vec![c(1.0 + 5e-10, -2.0), c(1.0, 3.0), c(0.0, 0.0)];
        sort_canonical(&mut vals);
        assert_eq!(vals[0], c(0.0, 0.0));
        assert_eq!(vals[1], c(1.0 + 5e-10, -2.0));
        assert_eq!(vals[2], c(1.0, 3.0));
    }

    #[test]
    fn dimension_cap_enforced() {
        let m = CMatrix::identity(17);
        assert!(matches!(eigenvalues(&m), Err(Error::Dimension(17))));
    }
}
