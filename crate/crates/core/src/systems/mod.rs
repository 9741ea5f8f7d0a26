//! The four system families: parameters, phase states, equations of motion,
//! Hamiltonians, and constructors for the Lax-side matrices.

mod eom;
mod interaction;
mod lax;

pub use eom::{eom_rhs, hamiltonian, min_separation};
pub use interaction::{interaction_f, rs_effective_a};
pub use lax::{build_lax, lax_time_derivative, LaxDerivatives};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Default pairwise separation guard.
pub const DEFAULT_COLLISION_EPSILON: f64 = 1e-8;

/// Guard below which interaction denominators count as poles.
pub const POLE_EPSILON: f64 = 1e-12;

/// System family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    CmRational,
    CmHarmonic,
    Cs,
    Rs,
    RsPerturbed,
}

impl Family {
    /// Stable name used in configs, reports, and error messages.
    pub fn name(&self) -> &'static str {
        match self {
            Family::CmRational => "CM_RATIONAL",
            Family::CmHarmonic => "CM_HARMONIC",
            Family::Cs => "CS",
            Family::Rs => "RS",
            Family::RsPerturbed => "RS_PERTURBED",
        }
    }
}

/// Interaction case for the RS families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsCase {
    I,
    II,
    III,
    IV,
    V,
}

impl RsCase {
    /// Stable lowercase roman-numeral name.
    pub fn name(&self) -> &'static str {
        match self {
            RsCase::I => "i",
            RsCase::II => "ii",
            RsCase::III => "iii",
            RsCase::IV => "iv",
            RsCase::V => "v",
        }
    }

    /// Cases whose Lax data is constructed here. The rational cases only
    /// have equations of motion.
    pub fn has_lax(&self) -> bool {
        matches!(self, RsCase::III | RsCase::IV | RsCase::V)
    }
}

/// Family plus every physical parameter. Parameters a family does not use
/// are required to be absent; nothing is defaulted silently.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    family: Family,
    n: usize,
    g: Option<Complex64>,
    lambda: Option<Complex64>,
    a: Option<Complex64>,
    r: Option<Complex64>,
    mu: Option<Complex64>,
    omega: Option<f64>,
    rs_case: Option<RsCase>,
    collision_epsilon: f64,
}

impl SystemSpec {
    /// Rational Calogero-Moser with coupling g.
    pub fn cm_rational(n: usize, g: Complex64) -> Result<SystemSpec> {
        SystemSpec::base(Family::CmRational, n, Some(g), None, None, None, None, None)
    }

    /// Calogero-Moser in a quadratic confining potential of frequency lambda.
    pub fn cm_harmonic(n: usize, g: Complex64, lambda: Complex64) -> Result<SystemSpec> {
        if lambda.norm() < POLE_EPSILON {
            return Err(Error::Config("lambda must be nonzero for CM_HARMONIC".into()));
        }
        SystemSpec::base(
            Family::CmHarmonic,
            n,
            Some(g),
            Some(lambda),
            None,
            None,
            None,
            None,
        )
    }

    /// Calogero-Sutherland with coupling g. The exponential scale is fixed
    /// at one by the choice X = diag(exp 2x_i).
    pub fn calogero_sutherland(n: usize, g: Complex64) -> Result<SystemSpec> {
        SystemSpec::base(Family::Cs, n, Some(g), None, None, None, None, None)
    }

    /// Ruijsenaars-Schneider with the selected interaction case.
    pub fn rs(
        n: usize,
        case: RsCase,
        a: Option<Complex64>,
        r: Option<Complex64>,
    ) -> Result<SystemSpec> {
        let (a, r, mu) = SystemSpec::resolve_rs_params(case, a, r)?;
        SystemSpec::base(Family::Rs, n, None, None, a, r, mu, Some(case))
    }

    /// Ruijsenaars-Schneider with the periodic velocity perturbation.
    pub fn rs_perturbed(
        n: usize,
        case: RsCase,
        a: Option<Complex64>,
        r: Option<Complex64>,
        omega: f64,
    ) -> Result<SystemSpec> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Config(format!(
                "Omega must be a positive real number, got {omega}"
            )));
        }
        let (a, r, mu) = SystemSpec::resolve_rs_params(case, a, r)?;
        let mut spec = SystemSpec::base(Family::RsPerturbed, n, None, None, a, r, mu, Some(case))?;
        spec.omega = Some(omega);
        Ok(spec)
    }

    #[allow(clippy::too_many_arguments)]
    fn base(
        family: Family,
        n: usize,
        g: Option<Complex64>,
        lambda: Option<Complex64>,
        a: Option<Complex64>,
        r: Option<Complex64>,
        mu: Option<Complex64>,
        rs_case: Option<RsCase>,
    ) -> Result<SystemSpec> {
        if n < 1 || n > crate::linalg::MAX_DIM {
            return Err(Error::Config(format!(
                "particle count {n} outside the supported range 1..=16"
            )));
        }
        for (name, v) in [("g", g), ("lambda", lambda), ("a", a), ("r", r)] {
            if let Some(v) = v {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Config(format!("parameter {name} is not finite")));
                }
            }
        }
        Ok(SystemSpec {
            family,
            n,
            g,
            lambda,
            a,
            r,
            mu,
            omega: None,
            rs_case,
            collision_epsilon: DEFAULT_COLLISION_EPSILON,
        })
    }

    /// Per-case parameter policy: required ones must be present, unused ones
    /// must be absent. mu is always derived, never accepted.
    fn resolve_rs_params(
        case: RsCase,
        a: Option<Complex64>,
        r: Option<Complex64>,
    ) -> Result<(Option<Complex64>, Option<Complex64>, Option<Complex64>)> {
        let need_a = matches!(case, RsCase::III | RsCase::IV | RsCase::V);
        let need_r = matches!(case, RsCase::II | RsCase::V);
        match (need_a, a.is_some()) {
            (true, false) => {
                return Err(Error::Config(format!(
                    "RS case {} requires parameter a",
                    case.name()
                )))
            }
            (false, true) => {
                return Err(Error::Config(format!(
                    "RS case {} does not take parameter a",
                    case.name()
                )))
            }
            _ => {}
        }
        match (need_r, r.is_some()) {
            (true, false) => {
                return Err(Error::Config(format!(
                    "RS case {} requires parameter r",
                    case.name()
                )))
            }
            (false, true) => {
                return Err(Error::Config(format!(
                    "RS case {} does not take parameter r",
                    case.name()
                )))
            }
            _ => {}
        }
        if let Some(a) = a {
            if a.norm() < POLE_EPSILON {
                return Err(Error::Config("parameter a must be nonzero".into()));
            }
        }
        if let Some(r) = r {
            if r.norm() < POLE_EPSILON {
                return Err(Error::Config("parameter r must be nonzero".into()));
            }
        }
        // mu solves sinh(a mu) = i/r on the principal arcsinh branch.
        let mu = match case {
            RsCase::V => {
                let a = a.unwrap();
                let r = r.unwrap();
                let target = Complex64::new(0.0, 1.0) / r;
                let mu = target.asinh() / a;
                let residual = ((a * mu).sinh() - target).norm();
                if residual > 1e-12 * target.norm().max(1.0) {
                    return Err(Error::Config(format!(
                        "mu resolution failed: |sinh(a mu) - i/r| = {residual:.3e}"
                    )));
                }
                Some(mu)
            }
            _ => None,
        };
        Ok((a, r, mu))
    }

    /// Override the pairwise separation guard.
    pub fn with_collision_epsilon(mut self, eps: f64) -> Result<SystemSpec> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Config(format!(
                "collision_epsilon must be positive, got {eps}"
            )));
        }
        self.collision_epsilon = eps;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn collision_epsilon(&self) -> f64 {
        self.collision_epsilon
    }

    /// Coupling constant; meaningful for the CM and CS families.
    pub fn g(&self) -> Complex64 {
        self.g.expect("family has no coupling g")
    }

    /// Confinement frequency; CM_HARMONIC only.
    pub fn lambda(&self) -> Complex64 {
        self.lambda.expect("family has no lambda")
    }

    /// Hyperbolic scale a; RS cases iii, iv, v.
    pub fn a(&self) -> Complex64 {
        self.a.expect("family has no scale a")
    }

    /// RS parameter r; cases ii and v.
    pub fn r(&self) -> Complex64 {
        self.r.expect("family has no parameter r")
    }

    /// Resolved mu with sinh(a mu) = i/r; RS case v.
    pub fn mu(&self) -> Complex64 {
        self.mu.expect("family has no resolved mu")
    }

    /// Perturbation frequency; RS_PERTURBED only.
    pub fn omega(&self) -> f64 {
        self.omega.expect("family has no Omega")
    }

    /// Interaction case; RS families only.
    pub fn rs_case(&self) -> RsCase {
        self.rs_case.expect("family has no interaction case")
    }

    /// True when the family carries Lax data in this laboratory.
    pub fn has_lax(&self) -> bool {
        match self.family {
            Family::CmRational | Family::CmHarmonic | Family::Cs => true,
            Family::Rs | Family::RsPerturbed => self.rs_case().has_lax(),
        }
    }

    /// Error for an operation that needs Lax data the family lacks.
    pub(crate) fn unsupported(&self, operation: &'static str) -> Error {
        Error::UnsupportedFamily {
            family: self.family.name(),
            operation,
        }
    }
}

/// Complex positions and velocities (momenta for the CM and CS families)
/// at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub t: f64,
    pub z: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

impl PhaseState {
    /// Construct with finiteness validation.
    pub fn new(t: f64, z: Vec<Complex64>, v: Vec<Complex64>) -> Result<PhaseState> {
        if z.len() != v.len() {
            return Err(Error::Config(format!(
                "position count {} does not match velocity count {}",
                z.len(),
                v.len()
            )));
        }
        let state = PhaseState { t, z, v };
        if !state.is_finite() {
            return Err(Error::Config("phase state has non-finite entries".into()));
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self
                .z
                .iter()
                .chain(self.v.iter())
                .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Guard the PhaseState invariants against a spec: matching dimension
    /// and pairwise separation above the collision epsilon.
    pub fn validate(&self, spec: &SystemSpec) -> Result<()> {
        if self.n() != spec.n() {
            return Err(Error::Config(format!(
                "state has {} particles but the spec declares {}",
                self.n(),
                spec.n()
            )));
        }
        if !self.is_finite() {
            return Err(Error::NonFinite("phase state"));
        }
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                let sep = (self.z[i] - self.z[j]).norm();
                if sep < spec.collision_epsilon() {
                    return Err(Error::Collision {
                        t: self.t,
                        i,
                        j,
                        separation: sep,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Lax-side matrices at one phase point. Z, W, P only exist for CM_HARMONIC.
#[derive(Debug, Clone)]
pub struct LaxData {
    pub l: CMatrix,
    pub m: CMatrix,
    pub x: CMatrix,
    pub z: Option<CMatrix>,
    pub w: Option<CMatrix>,
    pub p: Option<CMatrix>,
}
