//! Lax-side matrices for every family, their analytic time derivatives, and
//! the pointwise residuals of the matrix evolution laws. The residuals are
//! identities of phase-space functions, so they can be checked at any valid
//! state without integrating anything.

use num_complex::Complex64;

use super::interaction::{rs_effective_a, RsLaxParams};
use super::{Family, LaxData, PhaseState, SystemSpec, POLE_EPSILON};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn guard(den: Complex64, context: &'static str) -> Result<Complex64> {
    let mag = den.norm();
    if mag < POLE_EPSILON {
        return Err(Error::Pole {
            context,
            magnitude: mag,
        });
    }
    Ok(den)
}

/// Build L, M, X (and Z, W, P for CM_HARMONIC) at a phase point.
pub fn build_lax(spec: &SystemSpec, s: &PhaseState) -> Result<LaxData> {
    s.validate(spec)?;
    let n = s.n();
    match spec.family() {
        Family::CmRational | Family::CmHarmonic => {
            let g = spec.g();
            let mut l = CMatrix::from_diag(&s.v);
            let mut m = CMatrix::zeros(n);
            for j in 0..n {
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    let d = guard(s.z[j] - s.z[k], "cm lax: x_j - x_k")?;
                    l[(j, k)] = g * I / d;
                    m[(j, k)] = -g * I / (d * d);
                    m[(j, j)] += g * I / (d * d);
                }
            }
            let x = CMatrix::from_diag(&s.z);
            if spec.family() == Family::CmHarmonic {
                let il = I * spec.lambda();
                let z = l.add(&x.scale(il));
                let w = l.sub(&x.scale(il));
                let p = z.mul(&w);
                Ok(LaxData {
                    l,
                    m,
                    x,
                    z: Some(z),
                    w: Some(w),
                    p: Some(p),
                })
            } else {
                Ok(LaxData {
                    l,
                    m,
                    x,
                    z: None,
                    w: None,
                    p: None,
                })
            }
        }
        Family::Cs => {
            let g = spec.g();
            let mut l = CMatrix::from_diag(&s.v);
            let mut m = CMatrix::zeros(n);
            for j in 0..n {
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    let d = s.z[j] - s.z[k];
                    let sh = guard(d.sinh(), "cs lax: sinh(x_j - x_k)")?;
                    l[(j, k)] = g * I / sh;
                    m[(j, k)] = -g * I * d.cosh() / (sh * sh);
                    m[(j, j)] += g * I / (sh * sh);
                }
            }
            let x = CMatrix::from_diag(
                &s.z.iter().map(|z| (2.0 * z).exp()).collect::<Vec<_>>(),
            );
            Ok(LaxData {
                l,
                m,
                x,
                z: None,
                w: None,
                p: None,
            })
        }
        Family::Rs | Family::RsPerturbed => {
            let params = RsLaxParams::resolve(spec)?;
            let roots: Vec<Complex64> = s.v.iter().map(|v| v.sqrt()).collect();
            let mut l = CMatrix::from_diag(&s.v);
            let mut m = CMatrix::zeros(n);
            for j in 0..n {
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    let d = s.z[j] - s.z[k];
                    let w = roots[j] * roots[k];
                    l[(j, k)] = w * params.alpha(d)?;
                    m[(j, k)] = w * params.gamma(d)?;
                    m[(j, j)] += s.v[k] * params.beta(d)?;
                }
            }
            let a_eff = params.a_eff;
            let x = CMatrix::from_diag(
                &s.z.iter().map(|z| (2.0 * a_eff * z).exp()).collect::<Vec<_>>(),
            );
            Ok(LaxData {
                l,
                m,
                x,
                z: None,
                w: None,
                p: None,
            })
        }
    }
}

/// Analytic time derivatives of the Lax data, assembled by the chain rule
/// from the equations of motion.
pub struct LaxDerivatives {
    pub dl: CMatrix,
    pub dx: CMatrix,
    pub dz: Option<CMatrix>,
    pub dw: Option<CMatrix>,
    pub dp: Option<CMatrix>,
}

/// Chain-rule derivatives of build_lax along the flow.
pub fn lax_time_derivative(spec: &SystemSpec, s: &PhaseState) -> Result<LaxDerivatives> {
    let (_, acc) = super::eom_rhs(spec, s)?;
    let n = s.n();
    match spec.family() {
        Family::CmRational | Family::CmHarmonic => {
            let g = spec.g();
            let mut dl = CMatrix::from_diag(&acc);
            for j in 0..n {
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    let d = guard(s.z[j] - s.z[k], "cm lax rate: x_j - x_k")?;
                    dl[(j, k)] = -g * I * (s.v[j] - s.v[k]) / (d * d);
                }
            }
            let dx = CMatrix::from_diag(&s.v);
            if spec.family() == Family::CmHarmonic {
                let lax = build_lax(spec, s)?;
                let il = I * spec.lambda();
                let dz = dl.add(&dx.scale(il));
                let dw = dl.sub(&dx.scale(il));
                let z = lax.z.as_ref().unwrap();
                let w = lax.w.as_ref().unwrap();
                let dp = dz.mul(w).add(&z.mul(&dw));
                Ok(LaxDerivatives {
                    dl,
                    dx,
                    dz: Some(dz),
                    dw: Some(dw),
                    dp: Some(dp),
                })
            } else {
                Ok(LaxDerivatives {
                    dl,
                    dx,
                    dz: None,
                    dw: None,
                    dp: None,
                })
            }
        }
        Family::Cs => {
            let g = spec.g();
            let mut dl = CMatrix::from_diag(&acc);
            for j in 0..n {
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    let d = s.z[j] - s.z[k];
                    let sh = guard(d.sinh(), "cs lax rate: sinh(x_j - x_k)")?;
                    dl[(j, k)] = -g * I * d.cosh() * (s.v[j] - s.v[k]) / (sh * sh);
                }
            }
            let dx = CMatrix::from_diag(
                &s.z.iter()
                    .zip(s.v.iter())
                    .map(|(z, v)| 2.0 * v * (2.0 * z).exp())
                    .collect::<Vec<_>>(),
            );
            Ok(LaxDerivatives {
                dl,
                dx,
                dz: None,
                dw: None,
                dp: None,
            })
        }
        Family::Rs | Family::RsPerturbed => {
            let params = RsLaxParams::resolve(spec)?;
            let roots: Vec<Complex64> = s.v.iter().map(|v| v.sqrt()).collect();
            // d/dt sqrt(v_j) stays on the same branch as long as v_j does not
            // cross the cut; a vanishing root makes the rate singular.
            let mut droots = Vec::with_capacity(n);
            for j in 0..n {
                let den = guard(2.0 * roots[j], "rs lax rate: sqrt(dz_j)")?;
                droots.push(acc[j] / den);
            }
            let mut dl = CMatrix::from_diag(&acc);
            for j in 0..n {
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    let d = s.z[j] - s.z[k];
                    let ddot = s.v[j] - s.v[k];
                    let w = roots[j] * roots[k];
                    let dw = droots[j] * roots[k] + roots[j] * droots[k];
                    dl[(j, k)] = dw * params.alpha(d)? + w * params.alpha_prime(d)? * ddot;
                }
            }
            let a_eff = params.a_eff;
            let dx = CMatrix::from_diag(
                &s.z.iter()
                    .zip(s.v.iter())
                    .map(|(z, v)| 2.0 * a_eff * v * (2.0 * a_eff * z).exp())
                    .collect::<Vec<_>>(),
            );
            Ok(LaxDerivatives {
                dl,
                dx,
                dz: None,
                dw: None,
                dp: None,
            })
        }
    }
}

/// Max-norm residuals of the matrix evolution laws at one phase point.
#[derive(Debug, Clone)]
pub struct LaxResiduals {
    pub l: f64,
    pub x: f64,
    pub z: Option<f64>,
    pub w: Option<f64>,
    pub p: Option<f64>,
}

impl LaxResiduals {
    /// Largest of the populated residuals.
    pub fn max(&self) -> f64 {
        let mut m = self.l.max(self.x);
        for r in [self.z, self.w, self.p].into_iter().flatten() {
            m = m.max(r);
        }
        m
    }
}

/// Evaluate ‖dL − [L,M] − extra_L‖ and ‖dX − [X,M] − c[X,L]_+ − δL‖ at a
/// phase point, plus the Z/W/P laws for CM_HARMONIC.
pub fn lax_residuals(spec: &SystemSpec, s: &PhaseState) -> Result<LaxResiduals> {
    let lax = build_lax(spec, s)?;
    let rates = lax_time_derivative(spec, s)?;
    let lm = lax.l.commutator(&lax.m);
    let extra_l = match spec.family() {
        Family::CmHarmonic => {
            let lambda = spec.lambda();
            lax.x.scale(-lambda * lambda)
        }
        Family::RsPerturbed => lax.l.scale(I * spec.omega()),
        _ => CMatrix::zeros(s.n()),
    };
    let res_l = rates.dl.sub(&lm).sub(&extra_l).max_norm();

    let xm = lax.x.commutator(&lax.m);
    let extra_x = match spec.family() {
        Family::CmRational | Family::CmHarmonic => lax.l.clone(),
        Family::Cs => lax.x.anticommutator(&lax.l),
        Family::Rs | Family::RsPerturbed => {
            let a_eff = rs_effective_a(spec)?;
            lax.x.anticommutator(&lax.l).scale(a_eff)
        }
    };
    let res_x = rates.dx.sub(&xm).sub(&extra_x).max_norm();

    let (mut res_z, mut res_w, mut res_p) = (None, None, None);
    if spec.family() == Family::CmHarmonic {
        let il = I * spec.lambda();
        let z = lax.z.as_ref().unwrap();
        let w = lax.w.as_ref().unwrap();
        let p = lax.p.as_ref().unwrap();
        res_z = Some(
            rates
                .dz
                .as_ref()
                .unwrap()
                .sub(&z.scale(il))
                .sub(&z.commutator(&lax.m))
                .max_norm(),
        );
        res_w = Some(
            rates
                .dw
                .as_ref()
                .unwrap()
                .sub(&w.scale(-il))
                .sub(&w.commutator(&lax.m))
                .max_norm(),
        );
        res_p = Some(
            rates
                .dp
                .as_ref()
                .unwrap()
                .sub(&p.commutator(&lax.m))
                .max_norm(),
        );
    }
    Ok(LaxResiduals {
        l: res_l,
        x: res_x,
        z: res_z,
        w: res_w,
        p: res_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::RsCase;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state(z: &[Complex64], v: &[Complex64]) -> PhaseState {
        PhaseState::new(0.0, z.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn cm_lax_pinned_entries() {
        let spec = SystemSpec::cm_rational(2, c(1.0, 0.0)).unwrap();
        let s = state(
            &[c(0.0, 0.0), c(1.0, 0.0)],
            &[c(2.0, 0.0), c(3.0, 0.0)],
        );
        let lax = build_lax(&spec, &s).unwrap();
        assert!((lax.l[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((lax.l[(1, 1)] - c(3.0, 0.0)).norm() < 1e-15);
        assert!((lax.l[(0, 1)] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((lax.l[(1, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(lax.x[(0, 0)], c(0.0, 0.0));
        assert_eq!(lax.x[(1, 1)], c(1.0, 0.0));
    }

    #[test]
    fn cs_single_particle() {
        let spec = SystemSpec::calogero_sutherland(1, c(0.7, 0.0)).unwrap();
        let s = state(&[c(0.5, 0.0)], &[c(1.3, 0.0)]);
        let lax = build_lax(&spec, &s).unwrap();
        assert_eq!(lax.l[(0, 0)], c(1.3, 0.0));
        assert!((lax.x[(0, 0)] - c(1f64.exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn harmonic_constructor_identities() {
        let spec = SystemSpec::cm_harmonic(2, c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        let s = state(
            &[c(0.0, 0.0), c(1.0, 0.0)],
            &[c(2.0, 0.0), c(3.0, 0.0)],
        );
        let lax = build_lax(&spec, &s).unwrap();
        let z = lax.z.as_ref().unwrap();
        let w = lax.w.as_ref().unwrap();
        let p = lax.p.as_ref().unwrap();
        // Z - W = 2 i lambda X exactly.
        let diff = z.sub(w);
        let expect = lax.x.scale(c(0.0, 4.0));
        assert!(diff.max_diff(&expect) < 1e-15);
        assert!(p.max_diff(&z.mul(w)) < 1e-15);
    }

    #[test]
    fn off_diagonal_antisymmetry_cm_cs() {
        let zs = [c(0.1, 0.2), c(1.0, -0.3), c(2.2, 0.05)];
        let vs = [c(0.4, 0.0), c(-0.2, 0.1), c(0.0, -0.5)];
        for spec in [
            SystemSpec::cm_rational(3, c(0.9, 0.1)).unwrap(),
            SystemSpec::calogero_sutherland(3, c(0.9, 0.1)).unwrap(),
        ] {
            let lax = build_lax(&spec, &state(&zs, &vs)).unwrap();
            for j in 0..3 {
                for k in 0..3 {
                    if j != k {
                        assert!(
                            (lax.l[(j, k)] + lax.l[(k, j)]).norm() < 1e-13,
                            "family {}",
                            spec.family().name()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn residuals_vanish_pointwise_all_families() {
        let zs = [c(0.15, 0.1), c(1.1, -0.2), c(2.3, 0.25)];
        let vs = [c(0.8, 0.1), c(0.5, -0.3), c(1.2, 0.2)];
        let specs = vec![
            SystemSpec::cm_rational(3, c(1.0, 0.0)).unwrap(),
            SystemSpec::cm_harmonic(3, c(1.0, 0.0), c(1.5, 0.0)).unwrap(),
            SystemSpec::calogero_sutherland(3, c(0.8, 0.0)).unwrap(),
            SystemSpec::rs(3, RsCase::III, Some(c(0.9, 0.0)), None).unwrap(),
            SystemSpec::rs(3, RsCase::IV, Some(c(1.1, 0.0)), None).unwrap(),
            SystemSpec::rs(3, RsCase::V, Some(c(1.0, 0.0)), Some(c(0.8, 0.0))).unwrap(),
            SystemSpec::rs_perturbed(3, RsCase::V, Some(c(1.0, 0.0)), Some(c(0.8, 0.0)), 1.0)
                .unwrap(),
            SystemSpec::rs_perturbed(3, RsCase::IV, Some(c(0.7, 0.0)), None, 2.0).unwrap(),
        ];
        for spec in specs {
            let res = lax_residuals(&spec, &state(&zs, &vs)).unwrap();
            assert!(
                res.max() < 1e-11,
                "family {} case {:?}: residuals {res:?}",
                spec.family().name(),
                spec
            );
        }
    }

    #[test]
    fn rs_gauge_flip_preserves_traces() {
        let spec = SystemSpec::rs(3, RsCase::V, Some(c(1.0, 0.0)), Some(c(0.7, 0.0))).unwrap();
        let s = state(
            &[c(0.0, 0.3), c(1.2, -0.1), c(2.4, 0.2)],
            &[c(0.9, 0.4), c(-0.5, 0.2), c(0.6, -0.7)],
        );
        let lax = build_lax(&spec, &s).unwrap();
        // Conjugating by diag(1, -1, 1) realizes the other sqrt branch for
        // particle 1.
        let d = CMatrix::from_diag(&[c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        let flipped = d.mul(&lax.l).mul(&d);
        for k in 1..=3 {
            let t0 = crate::linalg::mat_trace_power(&lax.l, k);
            let t1 = crate::linalg::mat_trace_power(&flipped, k);
            assert!((t0 - t1).norm() < 1e-12 * t0.norm().max(1.0));
            let g0 = lax.x.mul(&pow(&lax.l, k)).trace();
            let g1 = lax.x.mul(&pow(&flipped, k)).trace();
            assert!((g0 - g1).norm() < 1e-12 * g0.norm().max(1.0));
        }
    }

    fn pow(m: &CMatrix, k: usize) -> CMatrix {
        let mut p = CMatrix::identity(m.dim());
        for _ in 0..k {
            p = p.mul(m);
        }
        p
    }

    #[test]
    fn rational_rs_cases_reject_lax() {
        let spec = SystemSpec::rs(2, RsCase::I, None, None).unwrap();
        let s = state(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(matches!(
            build_lax(&spec, &s),
            Err(Error::UnsupportedFamily { .. })
        ));
    }
}
