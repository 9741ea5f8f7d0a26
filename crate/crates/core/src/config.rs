//! Run configuration: strict JSON with complex numbers as [re, im] pairs.
//! Unknown fields are rejected everywhere, and family constructors enforce
//! which parameters are allowed, so a config cannot silently carry junk.

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::integrate::{IntegratorOptions, Method};
use crate::systems::{PhaseState, RsCase, SystemSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spec: SpecConfig,
    pub initial: InitialConfig,
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub verify: Vec<String>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub family: String,
    pub n: usize,
    pub g: Option<[f64; 2]>,
    pub lambda: Option<[f64; 2]>,
    pub a: Option<[f64; 2]>,
    pub r: Option<[f64; 2]>,
    pub omega: Option<f64>,
    pub case: Option<String>,
    pub collision_epsilon: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub t: f64,
    pub z: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: String,
    pub h: Option<f64>,
    pub atol: Option<f64>,
    pub rtol: Option<f64>,
    pub t_end: f64,
    pub sample_every: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    pub trajectory_csv: Option<String>,
    pub report_json: Option<String>,
}

fn c(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn require(value: Option<[f64; 2]>, family: &str, name: &str) -> Result<Complex64> {
    value
        .map(c)
        .ok_or_else(|| Error::Config(format!("family {family} requires parameter '{name}'")))
}

fn forbid<T>(value: &Option<T>, family: &str, name: &str) -> Result<()> {
    if value.is_some() {
        return Err(Error::Config(format!(
            "family {family} does not accept parameter '{name}'"
        )));
    }
    Ok(())
}

fn parse_case(text: &str) -> Result<RsCase> {
    match text.to_ascii_lowercase().as_str() {
        "i" => Ok(RsCase::I),
        "ii" => Ok(RsCase::II),
        "iii" => Ok(RsCase::III),
        "iv" => Ok(RsCase::IV),
        "v" => Ok(RsCase::V),
        other => Err(Error::Config(format!(
            "unknown RS case '{other}' (expected i, ii, iii, iv, or v)"
        ))),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    pub fn build_spec(&self) -> Result<SystemSpec> {
        let s = &self.spec;
        let fam = s.family.as_str();
        let spec = match fam {
            "CM_RATIONAL" => {
                forbid(&s.lambda, fam, "lambda")?;
                forbid(&s.a, fam, "a")?;
                forbid(&s.r, fam, "r")?;
                forbid(&s.omega, fam, "omega")?;
                forbid(&s.case, fam, "case")?;
                SystemSpec::cm_rational(s.n, require(s.g, fam, "g")?)?
            }
            "CM_HARMONIC" => {
                forbid(&s.a, fam, "a")?;
                forbid(&s.r, fam, "r")?;
                forbid(&s.omega, fam, "omega")?;
                forbid(&s.case, fam, "case")?;
                SystemSpec::cm_harmonic(s.n, require(s.g, fam, "g")?, require(s.lambda, fam, "lambda")?)?
            }
            "CS" => {
                forbid(&s.lambda, fam, "lambda")?;
                forbid(&s.a, fam, "a")?;
                forbid(&s.r, fam, "r")?;
                forbid(&s.omega, fam, "omega")?;
                forbid(&s.case, fam, "case")?;
                SystemSpec::calogero_sutherland(s.n, require(s.g, fam, "g")?)?
            }
            "RS" | "RS_PERTURBED" => {
                forbid(&s.g, fam, "g")?;
                forbid(&s.lambda, fam, "lambda")?;
                let case = parse_case(
                    s.case
                        .as_deref()
                        .ok_or_else(|| Error::Config(format!("family {fam} requires 'case'")))?,
                )?;
                let a = s.a.map(c);
                let r = s.r.map(c);
                if fam == "RS" {
                    forbid(&s.omega, fam, "omega")?;
                    SystemSpec::rs(s.n, case, a, r)?
                } else {
                    let omega = s
                        .omega
                        .ok_or_else(|| Error::Config(format!("family {fam} requires 'omega'")))?;
                    SystemSpec::rs_perturbed(s.n, case, a, r, omega)?
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown family '{other}' (expected CM_RATIONAL, CM_HARMONIC, CS, RS, or RS_PERTURBED)"
                )))
            }
        };
        match s.collision_epsilon {
            Some(eps) => spec.with_collision_epsilon(eps),
            None => Ok(spec),
        }
    }

    pub fn build_initial(&self) -> Result<PhaseState> {
        PhaseState::new(
            self.initial.t,
            self.initial.z.iter().copied().map(c).collect(),
            self.initial.v.iter().copied().map(c).collect(),
        )
    }

    pub fn build_integrator(&self) -> Result<IntegratorOptions> {
        let i = &self.integrator;
        match i.method.as_str() {
            "RK45_ADAPTIVE" => {
                if i.h.is_some() {
                    return Err(Error::Config(
                        "RK45_ADAPTIVE does not accept a fixed step 'h'".into(),
                    ));
                }
                let mut opts = IntegratorOptions::adaptive(i.t_end, i.sample_every);
                if let Some(atol) = i.atol {
                    opts.atol = atol;
                }
                if let Some(rtol) = i.rtol {
                    opts.rtol = rtol;
                }
                Ok(opts)
            }
            "RK4_FIXED" => {
                if i.atol.is_some() || i.rtol.is_some() {
                    return Err(Error::Config(
                        "RK4_FIXED does not accept adaptive tolerances".into(),
                    ));
                }
                let h = i
                    .h
                    .ok_or_else(|| Error::Config("RK4_FIXED requires step 'h'".into()))?;
                Ok(IntegratorOptions::fixed(h, i.t_end, i.sample_every))
            }
            other => Err(Error::Config(format!(
                "unknown integrator method '{other}' (expected RK45_ADAPTIVE or RK4_FIXED)"
            ))),
        }
    }

    /// Spec, initial state, and integrator options, all validated together.
    pub fn build(&self) -> Result<(SystemSpec, PhaseState, IntegratorOptions)> {
        let spec = self.build_spec()?;
        let initial = self.build_initial()?;
        initial.validate(&spec)?;
        let opts = self.build_integrator()?;
        Ok((spec, initial, opts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::Family;

    const MINIMAL: &str = r#"{
        "spec": {"family": "CM_RATIONAL", "n": 2, "g": [1.0, 0.0]},
        "initial": {"z": [[-1.0, 0.0], [1.0, 0.0]], "v": [[0.5, 0.0], [-0.5, 0.0]]},
        "integrator": {"method": "RK45_ADAPTIVE", "t_end": 1.0, "sample_every": 0.25}
    }"#;

    #[test]
    fn minimal_config_builds() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        let (spec, s0, opts) = cfg.build().unwrap();
        assert_eq!(spec.family(), Family::CmRational);
        assert_eq!(s0.n(), 2);
        assert_eq!(opts.t_end, 1.0);
        assert_eq!(cfg.seed, 0);
        assert!(cfg.verify.is_empty());
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = MINIMAL.replace("\"seed\"", "\"jitter\"");
        // Inject an unknown top-level key.
        let bad = bad.replacen('{', "{\"surprise\": 1,", 1);
        assert!(matches!(
            RunConfig::from_json(&bad),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn zero_particles_is_config_error() {
        let cfg = RunConfig::from_json(
            &MINIMAL.replace("\"n\": 2", "\"n\": 0"),
        )
        .unwrap();
        let err = cfg.build().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn extra_family_parameter_rejected() {
        let cfg = RunConfig::from_json(
            &MINIMAL.replace("\"g\": [1.0, 0.0]", "\"g\": [1.0, 0.0], \"omega\": 2.0"),
        )
        .unwrap();
        assert!(matches!(cfg.build_spec(), Err(Error::Config(_))));
    }

    #[test]
    fn rs_case_parsing() {
        let text = r#"{
            "spec": {"family": "RS_PERTURBED", "n": 2, "case": "V",
                     "a": [1.0, 0.0], "r": [0.8, 0.0], "omega": 1.0},
            "initial": {"z": [[-1.2, 0.0], [1.1, 0.0]], "v": [[0.5, 0.1], [0.4, -0.05]]},
            "integrator": {"method": "RK4_FIXED", "h": 0.01, "t_end": 1.0, "sample_every": 0.5}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        let (spec, _, opts) = cfg.build().unwrap();
        assert_eq!(spec.family(), Family::RsPerturbed);
        assert_eq!(spec.rs_case(), RsCase::V);
        assert_eq!(opts.method, Method::Rk4Fixed);
    }

    #[test]
    fn mismatched_particle_count_rejected() {
        let cfg = RunConfig::from_json(
            &MINIMAL.replace("\"n\": 2", "\"n\": 3"),
        )
        .unwrap();
        let err = cfg.build().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn fixed_method_requires_h() {
        let text = MINIMAL.replace(
            "\"method\": \"RK45_ADAPTIVE\"",
            "\"method\": \"RK4_FIXED\"",
        );
        let cfg = RunConfig::from_json(&text).unwrap();
        assert!(matches!(cfg.build_integrator(), Err(Error::Config(_))));
    }
}
