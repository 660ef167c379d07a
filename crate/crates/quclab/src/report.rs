use serde::Serialize;

use crate::config::Resolved;

/// Tolerance for quantities that must vanish in exhaustive runs.
pub const EXACT_TOL: f64 = 1e-12;
/// Allowed `|sum p - 1|` of an exhaustive distribution.
pub const MASS_TOL: f64 = 1e-9;
/// Allowed deviation of a state norm from 1.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Bound {
    AtMost { limit: f64 },
    AtLeast { limit: f64 },
    Within { target: f64, radius: f64 },
}

impl Bound {
    fn holds(&self, x: f64) -> bool {
        match *self {
            Bound::AtMost { limit } => x <= limit,
            Bound::AtLeast { limit } => x >= limit,
            Bound::Within { target, radius } => (x - target).abs() <= radius,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub bound: Bound,
    pub passed: bool,
}

/// Largest numerical errors seen over every execution of an experiment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Hygiene {
    pub max_norm_deviation: f64,
    pub max_mass_error: f64,
}

impl Hygiene {
    pub fn norm(&mut self, dev: f64) {
        self.max_norm_deviation = self.max_norm_deviation.max(dev);
    }

    pub fn mass(&mut self, err: f64) {
        self.max_mass_error = self.max_mass_error.max(err);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: Resolved,
    pub measurements: serde_json::Value,
    pub checks: Vec<Check>,
    pub hygiene: Hygiene,
    pub passed: bool,
    /// Per-trial rows for the optional CSV output.
    #[serde(skip)]
    pub records: Option<Records>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Records {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Records {
    pub fn write_csv(&self, path: &std::path::Path) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Collects checks while an experiment runs.
#[derive(Debug, Default)]
pub struct Checks {
    pub list: Vec<Check>,
    pub hygiene: Hygiene,
    pub records: Option<Records>,
}

impl Checks {
    pub fn at_most(&mut self, name: impl Into<String>, observed: f64, limit: f64) {
        self.push(name.into(), observed, Bound::AtMost { limit });
    }

    pub fn at_least(&mut self, name: impl Into<String>, observed: f64, limit: f64) {
        self.push(name.into(), observed, Bound::AtLeast { limit });
    }

    pub fn within(&mut self, name: impl Into<String>, observed: f64, target: f64, radius: f64) {
        self.push(name.into(), observed, Bound::Within { target, radius });
    }

    fn push(&mut self, name: String, observed: f64, bound: Bound) {
        let passed = bound.holds(observed);
        self.list.push(Check {
            name,
            observed,
            bound,
            passed,
        });
    }

    pub fn finish(mut self, config: Resolved, measurements: serde_json::Value) -> ExperimentReport {
        let h = self.hygiene;
        self.at_most("max-norm-deviation", h.max_norm_deviation, NORM_TOL);
        self.at_most("max-mass-error", h.max_mass_error, MASS_TOL);
        let passed = self.list.iter().all(|c| c.passed);
        ExperimentReport {
            experiment: config.experiment.name().to_string(),
            config,
            measurements,
            checks: self.list,
            hygiene: h,
            passed,
            records: self.records,
        }
    }
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}
