use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::degree::DegreeFamily;
use crate::ensemble::{SamplerParams, SamplerRegistry, DEFAULT_MAX_ATTEMPTS};
use crate::spectral::{SolverOptions, SolverRegistry, DENSE_LIMIT};

use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Gap,
    Sweep,
    Esd,
    Moments,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Gap => "gap",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Esd => "esd",
            ExperimentKind::Moments => "moments",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EsdReference {
    KestenMckay,
    Semicircle,
}

/// Quadratic forms evaluated by the moments experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentForm {
    K1,
    K2,
}

/// Everything an experiment depends on. Loaded from TOML; keys not given
/// keep the preset value of the experiment kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub family: DegreeFamily,
    pub n: usize,
    /// Vertex counts for the sweep; other experiments use `n`.
    pub sizes: Vec<usize>,
    pub replicates: usize,
    /// Sampler for the hard-constraint ensemble.
    pub sampler: String,
    /// Sampler for the soft-constraint ensemble (gap experiment).
    pub canonical_sampler: String,
    pub max_attempts: u64,
    pub swaps: Option<u64>,
    pub solver: String,
    pub tol: f64,
    pub max_iter: Option<usize>,
    pub lambda2: bool,
    /// Compute `‖A − E[A]‖` per replicate in the gap experiment.
    pub h_norm: bool,
    pub bins: usize,
    pub rescale: bool,
    /// ESD reference law; defaults to semicircle when rescaling, else Kesten-McKay.
    pub reference: Option<EsdReference>,
    pub forms: Vec<MomentForm>,
    /// Tiny sequence compared against exact enumeration in the moments experiment.
    pub fixture: Option<Vec<i64>>,
    pub fixture_samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Record wall-clock time per replicate; off gives byte-identical CSV.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset(ExperimentKind::Gap)
    }
}

impl ExperimentConfig {
    /// The reference configuration of each experiment.
    pub fn preset(kind: ExperimentKind) -> Self {
        let base = Self {
            experiment: kind,
            family: DegreeFamily::Band { lo: 25, hi: 50 },
            n: 4000,
            sizes: Vec::new(),
            replicates: 100,
            sampler: "cm-auto".into(),
            canonical_sampler: "chung-lu".into(),
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            swaps: None,
            solver: "lanczos".into(),
            tol: 1e-9,
            max_iter: None,
            lambda2: false,
            h_norm: true,
            bins: 80,
            rescale: false,
            reference: None,
            forms: vec![MomentForm::K1, MomentForm::K2],
            fixture: None,
            fixture_samples: 20_000,
            seed: 1,
            workers: 1,
            out: None,
            format: OutputFormat::Csv,
            timing: true,
        };
        match kind {
            ExperimentKind::Gap => base,
            ExperimentKind::Sweep => Self {
                family: DegreeFamily::BandPower {
                    exponent: 0.3,
                    lo_ratio: 0.5,
                },
                sizes: vec![1000, 2000, 4000],
                replicates: 10,
                ..base
            },
            ExperimentKind::Esd => Self {
                family: DegreeFamily::Regular { d: 3 },
                replicates: 5,
                h_norm: false,
                ..base
            },
            ExperimentKind::Moments => Self {
                n: 3000,
                h_norm: false,
                fixture: Some(vec![1, 2, 1]),
                ..base
            },
        }
    }

    /// Parses TOML. Missing keys come from the preset named by `experiment`
    /// (or `default_kind` when absent).
    pub fn from_toml(text: &str, default_kind: ExperimentKind) -> Result<Self, HarnessError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        let kind = match table.get("experiment") {
            Some(v) => v
                .clone()
                .try_into::<ExperimentKind>()
                .map_err(|e| HarnessError::Config(format!("experiment: {e}")))?,
            None => default_kind,
        };
        let mut merged = toml::Table::try_from(Self::preset(kind)).map_err(|e| HarnessError::Config(e.to_string()))?;
        for (k, v) in table {
            merged.insert(k, v);
        }
        let cfg: Self = merged.try_into().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path, default_kind: ExperimentKind) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, default_kind)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn sampler_params(&self) -> SamplerParams {
        SamplerParams {
            max_attempts: self.max_attempts,
            swaps: self.swaps,
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
        }
    }

    /// Sizes the experiment visits.
    pub fn grid(&self) -> Vec<usize> {
        if self.experiment == ExperimentKind::Sweep && !self.sizes.is_empty() {
            self.sizes.clone()
        } else {
            vec![self.n]
        }
    }

    pub fn esd_reference(&self) -> EsdReference {
        self.reference.unwrap_or(if self.rescale {
            EsdReference::Semicircle
        } else {
            EsdReference::KestenMckay
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.replicates == 0 {
            return Err(HarnessError::EmptyExperiment);
        }
        if self.grid().iter().any(|&n| n < 2) {
            return bad("every vertex count must be at least 2".into());
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1".into());
        }
        let samplers = SamplerRegistry::with_builtin();
        for name in [&self.sampler, &self.canonical_sampler] {
            if samplers.build(name, &self.sampler_params()).is_err() {
                return bad(format!(
                    "unknown sampler {name:?}; known: {}",
                    samplers.names().collect::<Vec<_>>().join(", ")
                ));
            }
        }
        let solvers = SolverRegistry::with_builtin();
        if solvers.build(&self.solver).is_err() {
            return bad(format!(
                "unknown solver {:?}; known: {}",
                self.solver,
                solvers.names().collect::<Vec<_>>().join(", ")
            ));
        }
        match self.experiment {
            ExperimentKind::Esd => {
                if self.bins == 0 {
                    return bad("bins must be at least 1".into());
                }
                if self.n > DENSE_LIMIT {
                    return bad(format!("esd needs n <= {DENSE_LIMIT}"));
                }
                if self.esd_reference() == EsdReference::KestenMckay
                    && !matches!(self.family, DegreeFamily::Regular { d } if d >= 2)
                {
                    return bad("the Kesten-McKay reference needs a regular family with d >= 2".into());
                }
            }
            ExperimentKind::Moments => {
                if self.forms.is_empty() {
                    return bad("empty functional list".into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_overrides_preset() {
        let cfg = ExperimentConfig::from_toml(
            "experiment = \"esd\"\nn = 500\nfamily = { kind = \"regular\", d = 18 }\nrescale = true\n",
            ExperimentKind::Gap,
        )
        .unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Esd);
        assert_eq!(cfg.n, 500);
        assert_eq!(cfg.replicates, 5);
        assert_eq!(cfg.family, DegreeFamily::Regular { d: 18 });
        assert_eq!(cfg.esd_reference(), EsdReference::Semicircle);
        cfg.validate().unwrap();
    }

    #[test]
    fn round_trips_through_toml() {
        for kind in [ExperimentKind::Gap, ExperimentKind::Sweep, ExperimentKind::Esd, ExperimentKind::Moments] {
            let cfg = ExperimentConfig::preset(kind);
            let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap(), ExperimentKind::Gap).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(matches!(
            ExperimentConfig::from_toml("bogus = 1", ExperimentKind::Gap),
            Err(HarnessError::Config(_))
        ));
        let mut cfg = ExperimentConfig::preset(ExperimentKind::Gap);
        cfg.replicates = 0;
        assert!(matches!(cfg.validate(), Err(HarnessError::EmptyExperiment)));
        let mut cfg = ExperimentConfig::preset(ExperimentKind::Gap);
        cfg.sampler = "nope".into();
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
        let mut cfg = ExperimentConfig::preset(ExperimentKind::Moments);
        cfg.forms.clear();
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
        let mut cfg = ExperimentConfig::preset(ExperimentKind::Esd);
        cfg.family = DegreeFamily::Band { lo: 2, hi: 4 };
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
    }
}
