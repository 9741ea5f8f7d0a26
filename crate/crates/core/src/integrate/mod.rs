//! Independent ODE oracle. Nothing in this module knows about companion
//! matrices or projection identities; it integrates the equations of motion
//! directly so that every linear-evolution claim can be tested against it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::observables::{frame, ObservableFrame};
use crate::systems::{eom_rhs, min_separation, Family, PhaseState, SystemSpec};

mod rk;

pub use rk::{dopri5_attempt, dopri5_h_factor, propagate_adaptive, rk4_step, Rhs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    pub method: Method,
    /// Step for RK4_FIXED; ignored by the adaptive method.
    pub h: f64,
    pub atol: f64,
    pub rtol: f64,
    pub t_end: f64,
    pub sample_every: f64,
}

impl IntegratorOptions {
    pub fn adaptive(t_end: f64, sample_every: f64) -> IntegratorOptions {
        IntegratorOptions {
            method: Method::Rk45Adaptive,
            h: 0.0,
            atol: 1e-10,
            rtol: 1e-10,
            t_end,
            sample_every,
        }
    }

    pub fn fixed(h: f64, t_end: f64, sample_every: f64) -> IntegratorOptions {
        IntegratorOptions {
            method: Method::Rk4Fixed,
            h,
            atol: 1e-10,
            rtol: 1e-10,
            t_end,
            sample_every,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.method {
            Method::Rk4Fixed => self.h > 0.0,
            Method::Rk45Adaptive => self.atol > 0.0 && self.rtol > 0.0,
        };
        if !ok || !(self.t_end > 0.0) || !(self.sample_every > 0.0) {
            return Err(Error::Config(format!(
                "invalid integrator options: h={}, atol={}, rtol={}, t_end={}, sample_every={}",
                self.h, self.atol, self.rtol, self.t_end, self.sample_every
            )));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct TrajectorySample {
    pub state: PhaseState,
    /// Present when the family carries Lax data.
    pub frame: Option<ObservableFrame>,
    /// Relative drift of the functionals that are exactly conserved in
    /// theory (rotation-compensated for the harmonic and perturbed laws).
    /// Diagnostic, not a contract.
    pub conservation_drift: Option<f64>,
    pub min_separation: f64,
}

#[derive(Debug)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Set when the run stopped early on a collision or interaction pole;
    /// the samples up to the failure are still valid.
    pub failure: Option<Error>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.state.t).collect()
    }

    pub fn final_state(&self) -> &PhaseState {
        &self.samples.last().expect("trajectory has samples").state
    }

    /// G_k over the samples; panics if frames are absent.
    pub fn series_g(&self, k: usize) -> Vec<Complex64> {
        self.samples
            .iter()
            .map(|s| s.frame.as_ref().expect("frames attached").g[k])
            .collect()
    }

    pub fn series_f(&self, k: usize) -> Vec<Complex64> {
        self.samples
            .iter()
            .map(|s| s.frame.as_ref().expect("frames attached").f[k])
            .collect()
    }
}

/// Drift of the theoretically conserved combination of F against its t=0
/// value, maximized over k.
fn conservation_drift(spec: &SystemSpec, f0: &[Complex64], fr: &ObservableFrame) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    for (k, (f, f_init)) in fr.f.iter().zip(f0.iter()).enumerate() {
        let compensated = match spec.family() {
            Family::CmHarmonic => f * (-i * spec.lambda() * fr.t).exp(),
            Family::RsPerturbed => f * (-i * spec.omega() * (k as f64) * fr.t).exp(),
            _ => *f,
        };
        worst = worst.max((compensated - f_init).norm() / f_init.norm().max(1.0));
    }
    worst
}

fn pack(s: &PhaseState) -> Vec<Complex64> {
    s.z.iter().chain(s.v.iter()).copied().collect()
}

fn unpack(t: f64, y: &[Complex64]) -> Result<PhaseState> {
    let n = y.len() / 2;
    PhaseState::new(t, y[..n].to_vec(), y[n..].to_vec())
}

/// True for the failure modes that end a run with a partial trajectory
/// instead of a hard error: a near-collision in complexified coordinates is
/// indistinguishable from an interaction pole.
fn is_soft_stop(e: &Error) -> bool {
    matches!(e, Error::Collision { .. } | Error::Pole { .. })
}

/// Integrate the equations of motion, sampling on the uniform cadence grid
/// (steps are shortened to land on grid times exactly; the final time is
/// always sampled). Mid-run collisions return the partial trajectory with
/// the failure recorded.
pub fn integrate(spec: &SystemSpec, s0: &PhaseState, opts: &IntegratorOptions) -> Result<Trajectory> {
    opts.validate()?;
    s0.validate(spec)?;
    let t0 = s0.t;
    let t_end = t0 + opts.t_end;
    let rhs = |t: f64, y: &[Complex64]| -> Result<Vec<Complex64>> {
        let s = unpack(t, y).map_err(|_| Error::NonFinite("integration state"))?;
        let (dz, dv) = eom_rhs(spec, &s)?;
        Ok(dz.into_iter().chain(dv).collect())
    };

    let with_frames = spec.has_lax();
    let f0 = if with_frames {
        Some(frame(spec, s0)?.f)
    } else {
        None
    };
    let sample = |state: &PhaseState| -> Result<TrajectorySample> {
        let fr = if with_frames {
            Some(frame(spec, state)?)
        } else {
            None
        };
        let drift = fr
            .as_ref()
            .map(|fr| conservation_drift(spec, f0.as_ref().unwrap(), fr));
        Ok(TrajectorySample {
            state: state.clone(),
            frame: fr,
            conservation_drift: drift,
            min_separation: min_separation(state),
        })
    };

    let mut traj = Trajectory {
        samples: vec![sample(s0)?],
        accepted_steps: 0,
        rejected_steps: 0,
        failure: None,
    };

    let mut t = t0;
    let mut y = pack(s0);
    // RHS at the current point; doubles as the first Dormand-Prince stage.
    let mut k1 = match rhs(t, &y) {
        Ok(k) => k,
        Err(e) => return Err(e),
    };
    let mut next_sample_idx: usize = 1;
    let mut h = match opts.method {
        Method::Rk4Fixed => opts.h,
        Method::Rk45Adaptive => opts.sample_every.min(opts.t_end).min(1e-2),
    };

    'run: while t < t_end {
        let grid_t = t0 + next_sample_idx as f64 * opts.sample_every;
        let next_stop = grid_t.min(t_end);
        let natural_h = h;
        let mut h_step = h.min(t_end - t);
        let mut lands_on_stop = false;
        if t + h_step >= next_stop - 1e-12 * next_stop.abs().max(1.0) {
            h_step = next_stop - t;
            lands_on_stop = true;
        }
        if h_step < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h: h_step });
        }

        let t_new = if lands_on_stop { next_stop } else { t + h_step };
        let step = match opts.method {
            Method::Rk4Fixed => match rk4_step(&rhs, t, &y, h_step) {
                Ok(y_new) => Some((y_new, None)),
                Err(e) if is_soft_stop(&e) => {
                    traj.failure = Some(e);
                    break 'run;
                }
                Err(e) => return Err(e),
            },
            Method::Rk45Adaptive => {
                match dopri5_attempt(&rhs, t, &y, h_step, &k1, opts.atol, opts.rtol) {
                    Ok(attempt) => {
                        let factor = dopri5_h_factor(attempt.err);
                        if attempt.err <= 1.0 {
                            h = if lands_on_stop {
                                // Keep the pre-clamp proposal so a short
                                // landing step does not inflate h.
                                natural_h
                            } else {
                                h_step * factor
                            };
                            Some((attempt.y_new, Some(attempt.k_last)))
                        } else {
                            traj.rejected_steps += 1;
                            h = h_step * factor;
                            None
                        }
                    }
                    Err(e) if is_soft_stop(&e) => {
                        traj.failure = Some(e);
                        break 'run;
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        let Some((y_new, k_last)) = step else {
            continue;
        };
        traj.accepted_steps += 1;
        t = t_new;
        y = y_new;
        k1 = match k_last {
            Some(k) => k,
            None => match rhs(t, &y) {
                Ok(k) => k,
                Err(e) if is_soft_stop(&e) => {
                    traj.failure = Some(e);
                    break 'run;
                }
                Err(e) => return Err(e),
            },
        };

        if lands_on_stop {
            let state = unpack(t, &y)?;
            match sample(&state) {
                Ok(s) => traj.samples.push(s),
                Err(e) if is_soft_stop(&e) => {
                    traj.failure = Some(e);
                    break 'run;
                }
                Err(e) => return Err(e),
            }
            if t >= grid_t {
                next_sample_idx += 1;
            }
        }
    }
    Ok(traj)
}

/// Second-order central difference of a uniformly sampled series.
pub fn fd_derivative(series: &[Complex64], index: usize, h: f64) -> Result<Complex64> {
    if index == 0 || index + 1 >= series.len() {
        return Err(Error::Stencil {
            index,
            len: series.len(),
        });
    }
    Ok((series[index + 1] - series[index - 1]) / Complex64::new(2.0 * h, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state(z: &[Complex64], v: &[Complex64]) -> PhaseState {
        PhaseState::new(0.0, z.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn free_particle_exact() {
        let spec = SystemSpec::cm_rational(1, c(1.0, 0.0)).unwrap();
        let s0 = state(&[c(0.0, 0.0)], &[c(1.0, 0.0)]);
        for opts in [
            IntegratorOptions::adaptive(2.0, 0.5),
            IntegratorOptions::fixed(0.01, 2.0, 0.5),
        ] {
            let traj = integrate(&spec, &s0, &opts).unwrap();
            assert!(traj.failure.is_none());
            let last = traj.final_state();
            assert_eq!(last.t, 2.0);
            assert!((last.z[0] - c(2.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn first_sample_is_exact_initial_condition() {
        let spec = SystemSpec::cm_rational(2, c(1.0, 0.0)).unwrap();
        let s0 = state(&[c(-1.0, 0.0), c(1.0, 0.0)], &[c(0.3, 0.0), c(-0.1, 0.0)]);
        let traj = integrate(&spec, &s0, &IntegratorOptions::adaptive(1.0, 0.25)).unwrap();
        assert_eq!(traj.samples[0].state.z, s0.z);
        assert_eq!(traj.samples[0].state.v, s0.v);
        let times = traj.times();
        assert_eq!(times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn symmetric_pair_stays_symmetric() {
        let spec = SystemSpec::cm_rational(2, c(1.0, 0.0)).unwrap();
        let s0 = state(&[c(-1.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0)]);
        let traj = integrate(&spec, &s0, &IntegratorOptions::adaptive(2.0, 0.25)).unwrap();
        for s in &traj.samples {
            assert!((s.state.z[0] + s.state.z[1]).norm() < 1e-9, "t = {}", s.state.t);
        }
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        // Harmonic single particle has the closed form
        // x(t) = x0 cos(lambda t) + (y0/lambda) sin(lambda t).
        let spec = SystemSpec::cm_harmonic(1, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let s0 = state(&[c(1.0, 0.0)], &[c(0.5, 0.0)]);
        let exact = c(2f64.cos() + 0.5 * 2f64.sin(), 0.0);
        let error_at = |h: f64| {
            let traj = integrate(&spec, &s0, &IntegratorOptions::fixed(h, 2.0, 2.0)).unwrap();
            (traj.final_state().z[0] - exact).norm()
        };
        let e1 = error_at(0.05);
        let e2 = error_at(0.025);
        let ratio = e1 / e2;
        assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn energy_drift_small_cm_and_cs() {
        use crate::systems::hamiltonian;
        let cases: Vec<(SystemSpec, PhaseState)> = vec![
            (
                SystemSpec::cm_rational(3, c(1.0, 0.0)).unwrap(),
                state(
                    &[c(-1.2, 0.0), c(0.1, 0.0), c(1.4, 0.0)],
                    &[c(0.4, 0.0), c(-0.3, 0.0), c(0.2, 0.0)],
                ),
            ),
            (
                SystemSpec::calogero_sutherland(3, c(0.8, 0.0)).unwrap(),
                state(
                    &[c(-1.0, 0.0), c(0.2, 0.0), c(1.3, 0.0)],
                    &[c(0.2, 0.0), c(0.1, 0.0), c(-0.4, 0.0)],
                ),
            ),
        ];
        for (spec, s0) in cases {
            let h0 = hamiltonian(&spec, &s0).unwrap();
            let traj = integrate(&spec, &s0, &IntegratorOptions::adaptive(5.0, 0.5)).unwrap();
            assert!(traj.failure.is_none());
            for s in &traj.samples {
                let ht = hamiltonian(&spec, &s.state).unwrap();
                let drift = (ht - h0).norm() / h0.norm().max(1.0);
                assert!(drift < 1e-8, "{}: drift {drift}", spec.family().name());
            }
        }
    }

    #[test]
    fn time_reversal_recovers_initial_positions() {
        let spec = SystemSpec::cm_rational(2, c(1.0, 0.0)).unwrap();
        let s0 = state(&[c(-0.8, 0.0), c(0.9, 0.0)], &[c(0.5, 0.0), c(-0.2, 0.0)]);
        let fwd = integrate(&spec, &s0, &IntegratorOptions::adaptive(1.0, 1.0)).unwrap();
        let end = fwd.final_state();
        let back_start = PhaseState::new(
            0.0,
            end.z.clone(),
            end.v.iter().map(|v| -v).collect(),
        )
        .unwrap();
        let back = integrate(&spec, &back_start, &IntegratorOptions::adaptive(1.0, 1.0)).unwrap();
        for (a, b) in back.final_state().z.iter().zip(s0.z.iter()) {
            assert!((a - b).norm() < 1e-7);
        }
    }

    #[test]
    fn collision_yields_partial_trajectory() {
        // A wide collision margin turns a close approach into a stop.
        let spec = SystemSpec::cm_rational(2, c(0.05, 0.0))
            .unwrap()
            .with_collision_epsilon(0.5)
            .unwrap();
        let s0 = state(&[c(-1.0, 0.0), c(1.0, 0.0)], &[c(2.0, 0.0), c(-2.0, 0.0)]);
        let traj = integrate(&spec, &s0, &IntegratorOptions::adaptive(3.0, 0.05)).unwrap();
        match &traj.failure {
            Some(Error::Collision { i, j, .. }) => {
                assert_eq!((*i, *j), (0, 1));
            }
            other => panic!("expected collision marker, got {other:?}"),
        }
        assert!(traj.samples.len() > 1);
        assert!(traj.final_state().t < 3.0);
    }

    #[test]
    fn perturbed_single_particle_closed_form() {
        use crate::systems::RsCase;
        // One particle feels only the perturbation: dz(t) = dz(0) e^{i Omega t}.
        let spec =
            SystemSpec::rs_perturbed(1, RsCase::V, Some(c(1.0, 0.0)), Some(c(0.5, 0.0)), 2.0)
                .unwrap();
        let z0 = c(0.3, 0.1);
        let v0 = c(0.7, -0.2);
        let s0 = state(&[z0], &[v0]);
        let traj = integrate(&spec, &s0, &IntegratorOptions::adaptive(1.3, 1.3)).unwrap();
        let iw = c(0.0, 2.0);
        let expect_v = v0 * (iw * 1.3).exp();
        let expect_z = z0 + v0 * ((iw * 1.3).exp() - 1.0) / iw;
        let end = traj.final_state();
        assert!((end.v[0] - expect_v).norm() < 1e-9, "{:?}", end.v[0]);
        assert!((end.z[0] - expect_z).norm() < 1e-9);
    }

    #[test]
    fn fd_derivative_contract() {
        let zero = vec![c(3.0, 1.0); 5];
        assert_eq!(fd_derivative(&zero, 2, 0.1).unwrap(), c(0.0, 0.0));
        let linear: Vec<Complex64> = (0..5).map(|i| c(0.1 * i as f64, 0.0)).collect();
        assert!((fd_derivative(&linear, 2, 0.1).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        // Central differences are exact on quadratics.
        let quad: Vec<Complex64> = (0..21).map(|i| {
            let t = 0.1 * i as f64;
            c(t * t, 0.0)
        })
        .collect();
        assert!((fd_derivative(&quad, 10, 0.1).unwrap() - c(2.0, 0.0)).norm() < 1e-13);
        assert!(matches!(
            fd_derivative(&quad, 0, 0.1),
            Err(Error::Stencil { .. })
        ));
        assert!(matches!(
            fd_derivative(&quad, 20, 0.1),
            Err(Error::Stencil { .. })
        ));
    }

    #[test]
    fn frames_attached_only_for_lax_families() {
        use crate::systems::RsCase;
        let rs1 = SystemSpec::rs(2, RsCase::I, None, None).unwrap();
        let s0 = state(&[c(-1.0, 0.0), c(1.0, 0.0)], &[c(0.5, 0.0), c(-0.5, 0.0)]);
        let traj = integrate(&rs1, &s0, &IntegratorOptions::adaptive(0.4, 0.2)).unwrap();
        assert!(traj.samples.iter().all(|s| s.frame.is_none()));
        assert!(traj.failure.is_none());

        let cs = SystemSpec::calogero_sutherland(2, c(0.8, 0.0)).unwrap();
        let traj = integrate(&cs, &s0, &IntegratorOptions::adaptive(0.4, 0.2)).unwrap();
        assert!(traj.samples.iter().all(|s| s.frame.is_some()));
        assert!(traj
            .samples
            .iter()
            .all(|s| s.conservation_drift.unwrap() < 1e-8));
    }
}
