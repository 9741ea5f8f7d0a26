//! Linearizing functionals and their evolution laws. For the L-based
//! families the functionals are F_k = tr(L^k) and G_k = tr(X L^k); the
//! harmonic family uses F_k = tr(Z P^k) and G_k = tr(W P^k) instead, with
//! P = ZW playing the role of L in the closure.
//!
//! Index convention: k runs 0..n-1 in every stored list. F_n and G_n enter
//! only through the Cayley-Hamilton extension sum(A_i V_i).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{char_poly, CharPolyCoeffs, CMatrix};
use crate::systems::{build_lax, rs_effective_a, Family, PhaseState, SystemSpec};

/// All functionals evaluated at one phase point.
#[derive(Debug, Clone)]
pub struct ObservableFrame {
    pub t: f64,
    /// F_0..F_{n-1}.
    pub f: Vec<Complex64>,
    /// G_0..G_{n-1}.
    pub g: Vec<Complex64>,
    /// H_1..H_{n-1}.
    pub h: Vec<Complex64>,
    pub a_coeffs: CharPolyCoeffs,
}

/// Evaluate the value lists and the closure coefficients at a phase point.
pub fn frame(spec: &SystemSpec, s: &PhaseState) -> Result<ObservableFrame> {
    let lax = build_lax(spec, s)?;
    let n = s.n();
    let harmonic = spec.family() == Family::CmHarmonic;
    let base = if harmonic {
        lax.p.as_ref().unwrap()
    } else {
        &lax.l
    };
    let gw = if harmonic { lax.w.as_ref().unwrap() } else { &lax.x };
    let fw = if harmonic { lax.z.as_ref() } else { None };

    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    let mut power = CMatrix::identity(n);
    for _ in 0..n {
        f.push(match fw {
            Some(z) => z.mul(&power).trace(),
            None => power.trace(),
        });
        g.push(gw.mul(&power).trace());
        power = power.mul(base);
    }
    let a_coeffs = char_poly(base)?;
    let mut f_ext = f.clone();
    f_ext.push(extend(&a_coeffs, &f));
    let h = superintegrals(&f_ext, &g);
    Ok(ObservableFrame {
        t: s.t,
        f,
        g,
        h,
        a_coeffs,
    })
}

/// Cayley-Hamilton extension: value at index n from the n stored values.
pub fn extend(coeffs: &CharPolyCoeffs, values: &[Complex64]) -> Complex64 {
    coeffs
        .a
        .iter()
        .zip(values.iter())
        .map(|(a, v)| a * v)
        .sum()
}

/// H_k = F_k G_k - F_{k+1} G_{k-1} for k = 1..n-1. The F list must carry
/// one more entry than G (the extension F_n).
pub fn superintegrals(f_ext: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let n = g.len();
    assert!(f_ext.len() > n, "F list must include the extension entry");
    (1..n)
        .map(|k| f_ext[k] * g[k] - f_ext[k + 1] * g[k - 1])
        .collect()
}

/// Companion matrix of the closure coefficients with its family scale.
#[derive(Debug, Clone)]
pub struct CompanionMatrix {
    pub matrix: CMatrix,
    pub scale: Complex64,
}

fn companion_scale(spec: &SystemSpec) -> Result<Complex64> {
    match spec.family() {
        Family::Rs | Family::RsPerturbed => Ok(2.0 * rs_effective_a(spec)?),
        _ => Ok(Complex64::new(1.0, 0.0)),
    }
}

/// Build the scaled companion matrix: superdiagonal entries equal to the
/// scale, last row equal to scale times the closure coefficients.
pub fn companion(spec: &SystemSpec, coeffs: &CharPolyCoeffs) -> Result<CompanionMatrix> {
    let scale = companion_scale(spec)?;
    Ok(CompanionMatrix {
        matrix: companion_structure(coeffs, scale),
        scale,
    })
}

fn companion_structure(coeffs: &CharPolyCoeffs, scale: Complex64) -> CMatrix {
    let n = coeffs.dim();
    let mut m = CMatrix::zeros(n);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = scale;
    }
    for j in 0..n {
        m[(n - 1, j)] += scale * coeffs.a[j];
    }
    m
}

/// Predicted time derivatives (dF, dG) of the stored lists, using the
/// Cayley-Hamilton extension where the law references index n.
pub fn predicted_rates(
    spec: &SystemSpec,
    frame: &ObservableFrame,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = frame.f.len();
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let f_n = extend(&frame.a_coeffs, &frame.f);
    let g_n = extend(&frame.a_coeffs, &frame.g);
    let f_up = |k: usize| if k + 1 < n { frame.f[k + 1] } else { f_n };
    let g_up = |k: usize| if k + 1 < n { frame.g[k + 1] } else { g_n };
    match spec.family() {
        Family::CmRational => Ok((
            vec![zero; n],
            (0..n).map(f_up).collect(),
        )),
        Family::CmHarmonic => {
            let il = i * spec.lambda();
            Ok((
                frame.f.iter().map(|f| il * f).collect(),
                frame.g.iter().map(|g| -il * g).collect(),
            ))
        }
        Family::Cs => Ok((
            vec![zero; n],
            (0..n).map(|k| 2.0 * g_up(k)).collect(),
        )),
        Family::Rs => {
            let a2 = 2.0 * rs_effective_a(spec)?;
            Ok((vec![zero; n], (0..n).map(|k| a2 * g_up(k)).collect()))
        }
        Family::RsPerturbed => {
            let a2 = 2.0 * rs_effective_a(spec)?;
            let iw = i * spec.omega();
            Ok((
                (0..n).map(|k| iw * (k as f64) * frame.f[k]).collect(),
                (0..n)
                    .map(|k| a2 * g_up(k) + iw * (k as f64) * frame.g[k])
                    .collect(),
            ))
        }
    }
}

/// The generator of the closed linear ODE for the G vector. Only defined
/// where such an ODE exists: CS, RS, RS_PERTURBED (frozen-time generator;
/// the closure coefficients themselves rotate there), and CM_HARMONIC where
/// it degenerates to a scalar rotation.
pub fn linear_evolution_matrix(
    spec: &SystemSpec,
    coeffs: &CharPolyCoeffs,
    with_perturbation: bool,
) -> Result<CMatrix> {
    let n = coeffs.dim();
    match spec.family() {
        Family::CmRational => Err(Error::UnsupportedFamily {
            family: spec.family().name(),
            operation: "linear G evolution (the rational CM law is affine, not linear)",
        }),
        Family::CmHarmonic => {
            let il = Complex64::new(0.0, 1.0) * spec.lambda();
            Ok(CMatrix::identity(n).scale(-il))
        }
        // The CS companion itself carries scale 1; its G evolution runs at
        // twice the companion action. The RS companion already has the 2a
        // built in, so there the two scales coincide.
        Family::Cs => Ok(companion_structure(coeffs, Complex64::new(2.0, 0.0))),
        Family::Rs => {
            let scale = companion_scale(spec)?;
            Ok(companion_structure(coeffs, scale))
        }
        Family::RsPerturbed => {
            let scale = companion_scale(spec)?;
            let mut m = companion_structure(coeffs, scale);
            if with_perturbation {
                let iw = Complex64::new(0.0, 1.0) * spec.omega();
                for k in 0..n {
                    m[(k, k)] += iw * (k as f64);
                }
            }
            Ok(m)
        }
    }
}
