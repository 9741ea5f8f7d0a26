//! Equations of motion and conserved energies. The acceleration laws are the
//! ones consistent with the Lax residual tests; those tests, not the
//! formulas, are the ground truth the module is held to.

use num_complex::Complex64;

use super::interaction::interaction_f;
use super::{Family, PhaseState, SystemSpec, POLE_EPSILON};
use crate::error::{Error, Result};

fn pole_guard(den: Complex64, context: &'static str) -> Result<Complex64> {
    let mag = den.norm();
    if mag < POLE_EPSILON {
        return Err(Error::Pole {
            context,
            magnitude: mag,
        });
    }
    Ok(den)
}

/// Smallest pairwise |z_i - z_j|; infinity for a single particle.
pub fn min_separation(s: &PhaseState) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..s.n() {
        for j in i + 1..s.n() {
            best = best.min((s.z[i] - s.z[j]).norm());
        }
    }
    best
}

/// Right-hand side of the first-order system: dz = v, dv per family.
pub fn eom_rhs(spec: &SystemSpec, s: &PhaseState) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    s.validate(spec)?;
    let n = s.n();
    let mut dv = vec![Complex64::new(0.0, 0.0); n];
    match spec.family() {
        Family::CmRational | Family::CmHarmonic => {
            let g2 = spec.g() * spec.g();
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let d = pole_guard(s.z[i] - s.z[j], "cm acceleration: x_i - x_j")?;
                    acc += 2.0 * g2 / (d * d * d);
                }
                if spec.family() == Family::CmHarmonic {
                    let lambda = spec.lambda();
                    acc -= lambda * lambda * s.z[i];
                }
                dv[i] = acc;
            }
        }
        Family::Cs => {
            let g2 = spec.g() * spec.g();
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let sh = pole_guard((s.z[i] - s.z[j]).sinh(), "cs acceleration: sinh(x_i - x_j)")?;
                    acc += 2.0 * g2 * (s.z[i] - s.z[j]).cosh() / (sh * sh * sh);
                }
                dv[i] = acc;
            }
        }
        Family::Rs | Family::RsPerturbed => {
            let case = spec.rs_case();
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    acc += s.v[j] * s.v[k] * interaction_f(case, s.z[j] - s.z[k], spec)?;
                }
                if spec.family() == Family::RsPerturbed {
                    // The perturbed Lax law dL/dt = [L,M] + i Omega L fixes the
                    // sign of the velocity term on the diagonal.
                    acc += Complex64::new(0.0, spec.omega()) * s.v[j];
                }
                dv[j] = acc;
            }
        }
    }
    Ok((s.v.clone(), dv))
}

/// Conserved energy for the CM and CS families; for the RS families the
/// paper gives no Hamiltonian, so the first trace invariant tr L = sum of
/// velocities is returned instead. Under the periodic perturbation that
/// value rotates with frequency Omega rather than staying constant.
pub fn hamiltonian(spec: &SystemSpec, s: &PhaseState) -> Result<Complex64> {
    s.validate(spec)?;
    let n = s.n();
    match spec.family() {
        Family::CmRational | Family::CmHarmonic => {
            let g2 = spec.g() * spec.g();
            let mut h: Complex64 = s.v.iter().map(|v| v * v).sum::<Complex64>() * 0.5;
            for i in 0..n {
                for j in i + 1..n {
                    let d = pole_guard(s.z[i] - s.z[j], "cm potential: x_i - x_j")?;
                    h += g2 / (d * d);
                }
            }
            if spec.family() == Family::CmHarmonic {
                let lambda = spec.lambda();
                h += lambda * lambda * 0.5 * s.z.iter().map(|z| z * z).sum::<Complex64>();
            }
            Ok(h)
        }
        Family::Cs => {
            let g2 = spec.g() * spec.g();
            let mut h: Complex64 = s.v.iter().map(|v| v * v).sum::<Complex64>() * 0.5;
            for i in 0..n {
                for j in i + 1..n {
                    let sh = pole_guard((s.z[i] - s.z[j]).sinh(), "cs potential: sinh(x_i - x_j)")?;
                    h += g2 / (sh * sh);
                }
            }
            Ok(h)
        }
        Family::Rs | Family::RsPerturbed => Ok(s.v.iter().sum()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::RsCase;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state(z: &[f64], v: &[f64]) -> PhaseState {
        PhaseState::new(
            0.0,
            z.iter().map(|x| c(*x, 0.0)).collect(),
            v.iter().map(|x| c(*x, 0.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_free_particle() {
        let spec = SystemSpec::cm_rational(1, c(1.0, 0.0)).unwrap();
        let s = state(&[5.0], &[2.0]);
        let (dz, dv) = eom_rhs(&spec, &s).unwrap();
        assert_eq!(dz[0], c(2.0, 0.0));
        assert_eq!(dv[0], c(0.0, 0.0));
        // Kinetic energy of one particle with momentum 3 is 4.5.
        let h = hamiltonian(&spec, &state(&[5.0], &[3.0])).unwrap();
        assert!((h - c(4.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rs_case_i_pinned_pair() {
        let spec = SystemSpec::rs(2, RsCase::I, None, None).unwrap();
        let s = state(&[1.0, 0.0], &[1.0, -1.0]);
        let (_, dv) = eom_rhs(&spec, &s).unwrap();
        assert!((dv[0] - c(-2.0, 0.0)).norm() < 1e-15);
        assert!((dv[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn perturbed_at_rest_stays_at_rest() {
        let spec = SystemSpec::rs_perturbed(2, RsCase::V, Some(c(1.0, 0.0)), Some(c(1.0, 0.0)), 1.0)
            .unwrap();
        let s = state(&[0.7, -0.7], &[0.0, 0.0]);
        let (dz, dv) = eom_rhs(&spec, &s).unwrap();
        for j in 0..2 {
            assert_eq!(dz[j], c(0.0, 0.0));
            assert_eq!(dv[j], c(0.0, 0.0));
        }
    }

    #[test]
    fn cm_pair_acceleration_matches_potential_gradient() {
        // Central difference of H in x_0 must reproduce -dv_0.
        let spec = SystemSpec::cm_rational(2, c(1.0, 0.0)).unwrap();
        let s = state(&[0.0, 1.0], &[0.3, -0.2]);
        let (_, dv) = eom_rhs(&spec, &s).unwrap();
        let h = 1e-6;
        let hp = hamiltonian(&spec, &state(&[h, 1.0], &[0.3, -0.2])).unwrap();
        let hm = hamiltonian(&spec, &state(&[-h, 1.0], &[0.3, -0.2])).unwrap();
        let grad = (hp - hm) / c(2.0 * h, 0.0);
        assert!((dv[0] + grad).norm() < 1e-8, "dv {} grad {}", dv[0], grad);
    }

    #[test]
    fn cs_acceleration_matches_potential_gradient() {
        let spec = SystemSpec::calogero_sutherland(3, c(0.8, 0.0)).unwrap();
        let s = state(&[0.0, 0.9, 2.1], &[0.1, 0.0, -0.1]);
        let (_, dv) = eom_rhs(&spec, &s).unwrap();
        let h = 1e-6;
        for i in 0..3 {
            let mut zp = [0.0, 0.9, 2.1];
            let mut zm = zp;
            zp[i] += h;
            zm[i] -= h;
            let hp = hamiltonian(&spec, &state(&zp, &[0.1, 0.0, -0.1])).unwrap();
            let hm = hamiltonian(&spec, &state(&zm, &[0.1, 0.0, -0.1])).unwrap();
            let grad = (hp - hm) / c(2.0 * h, 0.0);
            assert!((dv[i] + grad).norm() < 1e-7);
        }
    }

    #[test]
    fn harmonic_adds_linear_restoring_term() {
        let g = c(1.0, 0.0);
        let rational = SystemSpec::cm_rational(2, g).unwrap();
        let harmonic = SystemSpec::cm_harmonic(2, g, c(2.0, 0.0)).unwrap();
        let s = state(&[0.4, -0.6], &[0.0, 0.0]);
        let (_, dv_r) = eom_rhs(&rational, &s).unwrap();
        let (_, dv_h) = eom_rhs(&harmonic, &s).unwrap();
        // lambda^2 = 4.
        assert!((dv_h[0] - (dv_r[0] - c(4.0 * 0.4, 0.0))).norm() < 1e-13);
        assert!((dv_h[1] - (dv_r[1] - c(4.0 * -0.6, 0.0))).norm() < 1e-13);
    }

    #[test]
    fn collision_guard_identifies_pair() {
        let spec = SystemSpec::cm_rational(3, c(1.0, 0.0)).unwrap();
        let s = state(&[0.0, 1e-9, 1.0], &[0.0, 0.0, 0.0]);
        match eom_rhs(&spec, &s) {
            Err(Error::Collision { i, j, .. }) => {
                assert_eq!((i, j), (0, 1));
            }
            other => panic!("expected collision, got {other:?}"),
        }
    }

    #[test]
    fn rs_momentum_sum_is_flat_for_symmetric_f() {
        // f odd means total acceleration cancels pairwise.
        let spec = SystemSpec::rs(3, RsCase::V, Some(c(1.0, 0.0)), Some(c(0.9, 0.0))).unwrap();
        let s = state(&[0.0, 0.8, 1.9], &[0.5, 0.4, 0.3]);
        let (_, dv) = eom_rhs(&spec, &s).unwrap();
        let total: Complex64 = dv.iter().sum();
        assert!(total.norm() < 1e-13);
    }
}
