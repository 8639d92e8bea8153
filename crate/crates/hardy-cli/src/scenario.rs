//! Scenario files: a TOML description of group, exponents, weights,
//! corpus and numerical caps, resolved into a core [`Scenario`].
//!
//! Unknown keys are rejected everywhere so a typo cannot silently fall
//! back to a default. The seed is mandatory: every run is replayable.

use serde::Deserialize;

use hardy_core::error::{Error, Result};
use hardy_core::functions::{Profile, TestFunction};
use hardy_core::group::GroupSpec;
use hardy_core::qnorm::QuasiNormKind;
use hardy_core::quad::gagliardo::DoubleScheme;
use hardy_core::quad::radial::RadialFactor;
use hardy_core::verifier::{Scenario, TheoremKind, WeightSet};
use hardy_core::weights::PairWeight;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub theorem: String,
    pub seed: u64,
    pub group: GroupSection,
    pub qnorm: QnormSection,
    pub exponents: ExponentsSection,
    #[serde(default)]
    pub weights: WeightsSection,
    #[serde(default)]
    pub corpus: Vec<ProfileSection>,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub output: OutputSection,
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub name: String,
    pub nu: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QnormSection {
    pub kind: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsSection {
    pub p: f64,
    pub q: Option<f64>,
    pub s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub a: Option<PairSection>,
    pub v: Option<FactorSection>,
    pub z: Option<FactorSection>,
    pub g: Option<FactorSection>,
    pub h: Option<FactorSection>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSection {
    #[serde(default = "one")]
    pub coeff: f64,
    #[serde(default)]
    pub power: f64,
    #[serde(default)]
    pub decay: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSection {
    pub x: Option<FactorSection>,
    pub y: Option<FactorSection>,
    #[serde(default)]
    pub diff_power: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub id: String,
    pub profile: String,
    #[serde(default = "one")]
    pub amp: f64,
    #[serde(default)]
    pub angular_eps: f64,
    pub foot: Option<f64>,
    pub peak: Option<f64>,
    pub head: Option<f64>,
    pub exponent: Option<f64>,
    pub ramp: Option<f64>,
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub edges: Option<Vec<f64>>,
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub budget: Option<u64>,
    pub r_min_mult: Option<f64>,
    pub r_max_mult: Option<f64>,
    pub y_lo_mult: Option<f64>,
    pub far_mult: Option<f64>,
    pub inner_dense: Option<f64>,
    pub inner_sparse: Option<f64>,
    pub outer_dense: Option<f64>,
    pub outer_sparse: Option<f64>,
    pub order: Option<usize>,
    pub grade_levels: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
    pub formats: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: String,
    pub values: Vec<f64>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<ScenarioFile> {
        toml::from_str(text).map_err(|e| Error::config(format!("scenario parse error: {e}")))
    }

    /// Output file stem (without extension).
    pub fn output_stem(&self) -> &str {
        self.output.path.as_deref().unwrap_or("report")
    }

    /// Report formats requested by the scenario (default JSON only).
    pub fn output_formats(&self) -> Result<Vec<String>> {
        let formats = match &self.output.formats {
            None => vec!["json".to_string()],
            Some(fs) => fs.clone(),
        };
        for f in &formats {
            if f != "json" && f != "csv" {
                return Err(Error::config(format!(
                    "unknown report format '{f}'; expected json or csv"
                )));
            }
        }
        Ok(formats)
    }

    /// Resolves the file into a core scenario, applying the command-line
    /// seed and budget overrides when given.
    pub fn resolve(&self, seed: Option<u64>, budget: Option<u64>) -> Result<Scenario> {
        let theorem = TheoremKind::parse(&self.theorem)?;
        let group = build_group(&self.group)?;
        let qnorm = parse_qnorm(&self.qnorm.kind)?;
        let p = self.exponents.p;
        let q = self.exponents.q.unwrap_or(p);
        let s = self.exponents.s.unwrap_or(0.5);
        let weights = build_weights(&self.weights)?;
        let mut corpus = Vec::with_capacity(self.corpus.len());
        for section in &self.corpus {
            corpus.push(build_function(section)?);
        }
        let scheme = build_scheme(&self.quadrature);
        Ok(Scenario {
            theorem,
            group,
            qnorm,
            p,
            q,
            s,
            weights,
            corpus,
            scheme,
            budget: budget.or(self.quadrature.budget).unwrap_or(0),
            seed: seed.unwrap_or(self.seed),
        })
    }
}

fn build_group(section: &GroupSection) -> Result<GroupSpec> {
    match section.name.as_str() {
        "abelian" => {
            let nu = section.nu.as_deref().ok_or_else(|| {
                Error::config("abelian groups need dilation weights nu = [..]".to_string())
            })?;
            GroupSpec::abelian(nu)
        }
        "heisenberg" => {
            if section.nu.is_some() {
                return Err(Error::config(
                    "the heisenberg group fixes nu = [1, 1, 2]; drop the nu key".to_string(),
                ));
            }
            Ok(GroupSpec::heisenberg())
        }
        other => Err(Error::config(format!(
            "unknown group '{other}'; expected abelian or heisenberg"
        ))),
    }
}

fn parse_qnorm(kind: &str) -> Result<QuasiNormKind> {
    Ok(match kind {
        "euclidean" => QuasiNormKind::Euclidean,
        "aniso_max" => QuasiNormKind::AnisoMax,
        "aniso_smooth" => QuasiNormKind::AnisoSmooth,
        "koranyi" => QuasiNormKind::Koranyi,
        other => {
            return Err(Error::config(format!(
                "unknown quasi-norm '{other}'; expected euclidean, aniso_max, aniso_smooth or koranyi"
            )))
        }
    })
}

fn factor(section: &Option<FactorSection>) -> Result<RadialFactor> {
    match section {
        None => Ok(RadialFactor::one()),
        Some(f) => {
            if !(f.coeff.is_finite() && f.coeff > 0.0) {
                return Err(Error::config(format!(
                    "weight coefficient must be positive and finite, got {}",
                    f.coeff
                )));
            }
            if !f.power.is_finite() || !f.decay.is_finite() {
                return Err(Error::config(
                    "weight power and decay must be finite".to_string(),
                ));
            }
            Ok(RadialFactor { coeff: f.coeff, power: f.power, decay: f.decay })
        }
    }
}

fn build_weights(section: &WeightsSection) -> Result<WeightSet> {
    let mut set = WeightSet::default();
    if let Some(pair) = &section.a {
        set.pair = PairWeight::new(factor(&pair.x)?, factor(&pair.y)?, pair.diff_power)?;
    }
    set.v = factor(&section.v)?;
    set.z = factor(&section.z)?;
    match (section.alpha, section.beta) {
        (Some(alpha), Some(beta)) => {
            if section.g.is_some() || section.h.is_some() {
                return Err(Error::config(
                    "give either explicit g/h weights or alpha/beta powers, not both".to_string(),
                ));
            }
            set.g = RadialFactor { coeff: 1.0, power: beta, decay: 0.0 };
            set.h = RadialFactor { coeff: 1.0, power: alpha, decay: 0.0 };
            set.alpha = Some(alpha);
            set.beta = Some(beta);
        }
        (None, None) => {
            set.g = factor(&section.g)?;
            set.h = factor(&section.h)?;
        }
        _ => {
            return Err(Error::config(
                "alpha and beta must be given together".to_string(),
            ))
        }
    }
    Ok(set)
}

fn need(v: Option<f64>, what: &str, profile: &str) -> Result<f64> {
    v.ok_or_else(|| Error::config(format!("profile '{profile}' needs the '{what}' key")))
}

fn build_function(section: &ProfileSection) -> Result<TestFunction> {
    let p = section.profile.as_str();
    let profile = match p {
        "tent" => Profile::Tent {
            foot: need(section.foot, "foot", p)?,
            peak: need(section.peak, "peak", p)?,
            head: need(section.head, "head", p)?,
        },
        "truncated_power" => Profile::TruncatedPower {
            exponent: need(section.exponent, "exponent", p)?,
            foot: need(section.foot, "foot", p)?,
            head: need(section.head, "head", p)?,
            ramp: section.ramp.unwrap_or(0.1),
        },
        "gaussian_ring" => Profile::GaussianRing {
            center: need(section.center, "center", p)?,
            width: need(section.width, "width", p)?,
        },
        "indicator" => Profile::Indicator {
            foot: section.foot.unwrap_or(0.0),
            head: need(section.head, "head", p)?,
        },
        "steps" => Profile::Steps {
            edges: section
                .edges
                .clone()
                .ok_or_else(|| Error::config("profile 'steps' needs the 'edges' key".to_string()))?,
            values: section
                .values
                .clone()
                .ok_or_else(|| Error::config("profile 'steps' needs the 'values' key".to_string()))?,
        },
        other => {
            return Err(Error::config(format!(
                "unknown profile '{other}'; expected tent, truncated_power, gaussian_ring, \
                 indicator or steps"
            )))
        }
    };
    TestFunction::new(section.id.clone(), profile, section.amp, section.angular_eps)
}

fn build_scheme(section: &QuadratureSection) -> DoubleScheme {
    let mut scheme = DoubleScheme::default();
    if let Some(v) = section.r_min_mult {
        scheme.r_min_mult = v;
    }
    if let Some(v) = section.r_max_mult {
        scheme.r_max_mult = v;
    }
    if let Some(v) = section.y_lo_mult {
        scheme.y_lo_mult = v;
    }
    if let Some(v) = section.far_mult {
        scheme.far_mult = v;
    }
    if let Some(v) = section.inner_dense {
        scheme.inner_dense = v;
    }
    if let Some(v) = section.inner_sparse {
        scheme.inner_sparse = v;
    }
    if let Some(v) = section.outer_dense {
        scheme.outer_dense = v;
    }
    if let Some(v) = section.outer_sparse {
        scheme.outer_sparse = v;
    }
    if let Some(v) = section.order {
        scheme.order = v;
    }
    if let Some(v) = section.grade_levels {
        scheme.grade_levels = v;
    }
    scheme
}

/// Applies one sweep value to a copy of the scenario.
pub fn apply_sweep(base: &Scenario, parameter: &str, value: f64) -> Result<Scenario> {
    let mut sc = base.clone();
    match parameter {
        "p" => sc.p = value,
        "q" => sc.q = value,
        "s" => sc.s = value,
        "alpha" | "beta" => {
            if sc.weights.alpha.is_none() || sc.weights.beta.is_none() {
                return Err(Error::config(
                    "sweeping alpha/beta needs power-form weights (alpha and beta keys)"
                        .to_string(),
                ));
            }
            if parameter == "alpha" {
                sc.weights.alpha = Some(value);
                sc.weights.h = RadialFactor { coeff: 1.0, power: value, decay: 0.0 };
            } else {
                sc.weights.beta = Some(value);
                sc.weights.g = RadialFactor { coeff: 1.0, power: value, decay: 0.0 };
            }
        }
        other => {
            return Err(Error::config(format!(
                "unknown sweep parameter '{other}'; expected p, q, s, alpha or beta"
            )))
        }
    }
    Ok(sc)
}
