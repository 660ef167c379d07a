use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use quclab_core::otproto::ProtocolParams;

use crate::experiments::{Catalog, RunMode};
use crate::HarnessError;

/// Parameters derived from a security parameter: `n = 4k`,
/// `m = ceil(n / (1 - alpha))`, `ell = floor(lambda * n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub k: usize,
    pub alpha: f64,
    pub lambda: f64,
}

impl Profile {
    pub fn params(&self) -> Result<ProtocolParams, HarnessError> {
        ProtocolParams::from_regime(4 * self.k, self.alpha, self.lambda).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

/// What to run. Unset fields fall back to the experiment's defaults when
/// the config is resolved.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    /// Sizes for sampled runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ProtocolParams>,
    /// Alternative to `params`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    /// Sizes for exhaustive runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_params: Option<ProtocolParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<RunMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_cap: Option<usize>,
    /// Strategy corpus file (JSON) for the real-versus-ideal experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Per-trial records, for experiments that sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

/// A config with every default filled in and checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub experiment: Catalog,
    pub params: ProtocolParams,
    pub exact_params: ProtocolParams,
    pub mode: RunMode,
    pub trials: u64,
    pub seed: u64,
    pub branch_cap: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
}

fn check_params(p: ProtocolParams, what: &str) -> Result<ProtocolParams, HarnessError> {
    ProtocolParams::new(p.n, p.m, p.ell).map_err(|e| HarnessError::Config(format!("{what}: {e}")))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn resolve(&self) -> Result<Resolved, HarnessError> {
        let name = self
            .experiment
            .as_deref()
            .ok_or_else(|| HarnessError::Config("no experiment named".into()))?;
        let experiment = Catalog::from_name(name)?;
        let defaults = experiment.defaults();
        let params = match (self.params, self.profile) {
            (Some(_), Some(_)) => return Err(HarnessError::Config("give either params or profile, not both".into())),
            (Some(p), None) => check_params(p, "params")?,
            (None, Some(profile)) => profile.params()?,
            (None, None) => defaults.params,
        };
        let exact_params = check_params(self.exact_params.unwrap_or(defaults.exact_params), "exact_params")?;
        let mode = self.mode.unwrap_or(defaults.mode);
        if !experiment.supports(mode) {
            return Err(HarnessError::Config(format!("{} does not run in {} mode", experiment.name(), mode.name())));
        }
        let trials = self.trials.unwrap_or(defaults.trials);
        if trials == 0 && mode != RunMode::Exact {
            return Err(HarnessError::Config("trials must be positive".into()));
        }
        let branch_cap = self.branch_cap.unwrap_or(defaults.branch_cap);
        if branch_cap == 0 {
            return Err(HarnessError::Config("branch_cap must be positive".into()));
        }
        Ok(Resolved {
            experiment,
            params,
            exact_params,
            mode,
            trials,
            seed: self.seed.unwrap_or(0),
            branch_cap,
            corpus: self.corpus.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig {
            experiment: Some("correctness".into()),
            params: Some(ProtocolParams::new(8, 12, 2).unwrap()),
            mode: Some(RunMode::Sample),
            trials: Some(100),
            seed: Some(4),
            ..Default::default()
        };
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let r = cfg.resolve().unwrap();
        assert_eq!(r.params.ell, 2);
        assert_eq!(serde_json::from_str::<Resolved>(&serde_json::to_string(&r).unwrap()).unwrap(), r);
    }

    #[test]
    fn profile_sets_params() {
        let cfg = ExperimentConfig::from_toml(
            "experiment = \"correctness\"\n[profile]\nk = 2\nalpha = 0.5\nlambda = 0.125\n",
        )
        .unwrap();
        let p = cfg.resolve().unwrap().params;
        assert_eq!((p.n, p.m, p.ell), (8, 16, 1));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            "experiment = \"nope\"",
            "experiment = \"correctness\"\n[params]\nn = 3\nm = 3\nell = 1",
            "experiment = \"hash-universality\"\nmode = \"exact\"",
            "experiment = \"correctness\"\ntrials = 0",
            "experiment = \"correctness\"\ncolour = 1",
            "seed = 1",
        ];
        for text in bad {
            let r = ExperimentConfig::from_toml(text).and_then(|c| c.resolve());
            assert!(matches!(r, Err(HarnessError::Config(_))), "{text}");
        }
    }
}
