//! RS interaction functions f and the alpha/beta/gamma trio entering the
//! Lax matrices. Cases iii and iv are reached through case v: iv is exactly
//! case v at (a/2, r = 1), and iii is the closed-form r -> 0 limit.

use num_complex::Complex64;

use super::{RsCase, SystemSpec, POLE_EPSILON};
use crate::error::{Error, Result};

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

/// The pair interaction f for the selected case, with pole guards on every
/// denominator.
pub fn interaction_f(case: RsCase, z: Complex64, spec: &SystemSpec) -> Result<Complex64> {
    let two = Complex64::new(2.0, 0.0);
    match case {
        RsCase::I => Ok(two / guard(z, "f case i: z")?),
        RsCase::II => {
            let r = spec.r();
            let den = z * (Complex64::new(1.0, 0.0) + r * r * z * z);
            Ok(two / guard(den, "f case ii: z(1 + r^2 z^2)")?)
        }
        RsCase::III => {
            let a = spec.a();
            let az = a * z;
            Ok(two * a * az.cosh() / guard(az.sinh(), "f case iii: sinh(az)")?)
        }
        RsCase::IV => {
            let a = spec.a();
            let az = a * z;
            Ok(two * a / guard(az.sinh(), "f case iv: sinh(az)")?)
        }
        RsCase::V => {
            let a = spec.a();
            let r = spec.r();
            let az = a * z;
            let sinh = guard(az.sinh(), "f case v: sinh(az)")?;
            let den = guard(
                Complex64::new(1.0, 0.0) + r * r * az.sinh() * az.sinh(),
                "f case v: 1 + r^2 sinh^2(az)",
            )?;
            Ok(two * a * az.cosh() / (sinh * den))
        }
    }
}

/// Effective exponential scale entering X = diag(exp 2a_eff z) and the
/// G evolution rate for the Lax-carrying RS cases.
pub fn rs_effective_a(spec: &SystemSpec) -> Result<Complex64> {
    match spec.rs_case() {
        RsCase::III | RsCase::V => Ok(spec.a()),
        RsCase::IV => Ok(spec.a() * 0.5),
        _ => Err(spec.unsupported("lax construction")),
    }
}

/// Resolved functional data for the RS Lax matrices.
pub(crate) struct RsLaxParams {
    pub a_eff: Complex64,
    form: AlphaForm,
    /// cotgh(a_eff mu), stored exactly: 1 in the r -> 0 limit (case iii),
    /// 0 at mu = i pi / (2 a_eff) (case iv).
    coth_mu: Complex64,
    r_eff: Complex64,
}

enum AlphaForm {
    /// alpha(z) = sinh(a mu)/sinh(a(z + mu)).
    Shifted { mu: Complex64 },
    /// alpha(z) = exp(-a z), the r -> 0 limit of the shifted form.
    Exponential,
}

impl RsLaxParams {
    pub fn resolve(spec: &SystemSpec) -> Result<RsLaxParams> {
        let a_eff = rs_effective_a(spec)?;
        match spec.rs_case() {
            RsCase::V => {
                let mu = spec.mu();
                let amu = a_eff * mu;
                Ok(RsLaxParams {
                    a_eff,
                    form: AlphaForm::Shifted { mu },
                    coth_mu: amu.cosh() / amu.sinh(),
                    r_eff: spec.r(),
                })
            }
            RsCase::IV => {
                // Case v at half scale with r = 1; sinh(a_eff mu) = i gives
                // mu = i pi/(2 a_eff) and cotgh(a_eff mu) = 0 exactly.
                let mu = Complex64::new(0.0, std::f64::consts::FRAC_PI_2) / a_eff;
                Ok(RsLaxParams {
                    a_eff,
                    form: AlphaForm::Shifted { mu },
                    coth_mu: Complex64::new(0.0, 0.0),
                    r_eff: Complex64::new(1.0, 0.0),
                })
            }
            RsCase::III => Ok(RsLaxParams {
                a_eff,
                form: AlphaForm::Exponential,
                coth_mu: Complex64::new(1.0, 0.0),
                r_eff: Complex64::new(0.0, 0.0),
            }),
            _ => Err(spec.unsupported("lax construction")),
        }
    }

    pub fn alpha(&self, z: Complex64) -> Result<Complex64> {
        match self.form {
            AlphaForm::Shifted { mu } => {
                let den = guard((self.a_eff * (z + mu)).sinh(), "alpha: sinh(a(z + mu))")?;
                Ok((self.a_eff * mu).sinh() / den)
            }
            AlphaForm::Exponential => Ok((-self.a_eff * z).exp()),
        }
    }

    /// d alpha / dz, used when assembling analytic Lax derivatives.
    pub fn alpha_prime(&self, z: Complex64) -> Result<Complex64> {
        match self.form {
            AlphaForm::Shifted { mu } => {
                let arg = self.a_eff * (z + mu);
                let den = guard(arg.sinh(), "alpha': sinh(a(z + mu))")?;
                Ok(-self.a_eff * arg.cosh() / den * self.alpha(z)?)
            }
            AlphaForm::Exponential => Ok(-self.a_eff * (-self.a_eff * z).exp()),
        }
    }

    pub fn beta(&self, z: Complex64) -> Result<Complex64> {
        let az = self.a_eff * z;
        let s = az.sinh();
        let den = guard(
            Complex64::new(1.0, 0.0) + self.r_eff * self.r_eff * s * s,
            "beta: 1 + r^2 sinh^2(az)",
        )?;
        Ok(-self.a_eff * self.coth_mu / den)
    }

    pub fn gamma(&self, z: Complex64) -> Result<Complex64> {
        let az = self.a_eff * z;
        let s = guard(az.sinh(), "gamma: sinh(az)")?;
        Ok(-self.a_eff * az.cosh() / s * self.alpha(z)?)
    }

    /// d gamma / dz.
    pub fn gamma_prime(&self, z: Complex64) -> Result<Complex64> {
        let az = self.a_eff * z;
        let s = guard(az.sinh(), "gamma': sinh(az)")?;
        let coth = az.cosh() / s;
        // gamma = -a coth(az) alpha(z); differentiate both factors.
        let d_coth = -self.a_eff / (s * s);
        Ok(-self.a_eff * (d_coth * self.alpha(z)? + coth * self.alpha_prime(z)?))
    }

    /// d beta / dz.
    pub fn beta_prime(&self, z: Complex64) -> Result<Complex64> {
        let az = self.a_eff * z;
        let s = az.sinh();
        let c = az.cosh();
        let r2 = self.r_eff * self.r_eff;
        let den = guard(
            Complex64::new(1.0, 0.0) + r2 * s * s,
            "beta': 1 + r^2 sinh^2(az)",
        )?;
        Ok(self.a_eff * self.coth_mu * (r2 * 2.0 * self.a_eff * s * c) / (den * den))
    }
}
