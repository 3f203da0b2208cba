//! Suite selection and batch execution shared by the command line and the C interface.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan_data::{Gcm, Level};
use crate::classical_affine::check_classical;
use crate::error::{Error, Result};
use crate::qheisenberg::{check_deformation_cartan, check_exp_field, check_qheisenberg};
use crate::report::{Report, SCHEMA};
use crate::series::bridge::check_bridge;
use crate::smatrix::{check_ideal_scalars, check_unitarity, check_ybe, ybe_trunc};
use crate::tau_group::{check_group, PaperTau};
use crate::Trunc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    TauTech0,
    TauTech1,
    TauGroup,
    SUnitarity,
    SYbe,
    SIdealScalars,
    ClassicalAffine,
    Qheisenberg,
    LemmaExp,
    DeformationCartan,
    BridgeVacom,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::TauTech0,
        Suite::TauTech1,
        Suite::TauGroup,
        Suite::SUnitarity,
        Suite::SYbe,
        Suite::SIdealScalars,
        Suite::ClassicalAffine,
        Suite::Qheisenberg,
        Suite::LemmaExp,
        Suite::DeformationCartan,
        Suite::BridgeVacom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::TauTech0 => "tau-tech0",
            Suite::TauTech1 => "tau-tech1",
            Suite::TauGroup => "tau-group",
            Suite::SUnitarity => "s-unitarity",
            Suite::SYbe => "s-ybe",
            Suite::SIdealScalars => "s-ideal-scalars",
            Suite::ClassicalAffine => "classical-affine",
            Suite::Qheisenberg => "qheisenberg",
            Suite::LemmaExp => "lemma-exp",
            Suite::DeformationCartan => "deformation-cartan",
            Suite::BridgeVacom => "bridge-vacom",
        }
    }

    /// Weight cap used when the configuration leaves it open.
    pub fn default_weight_cap(self) -> u32 {
        match self {
            Suite::ClassicalAffine => 6,
            Suite::DeformationCartan => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite {s}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::InvalidConfig(format!("unknown format {s}"))),
        }
    }
}

/// A validated run configuration.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub gcm: Gcm,
    pub level: Level,
    pub trunc: Trunc,
    pub weight_cap: Option<u32>,
    pub suites: Vec<Suite>,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(gcm: Gcm, level: Level) -> Self {
        SuiteConfig {
            gcm,
            level,
            trunc: Trunc::default(),
            weight_cap: None,
            suites: Suite::ALL.to_vec(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trunc.n_hbar < 2 {
            return Err(Error::InvalidConfig(format!("n_hbar must be at least 2, got {}", self.trunc.n_hbar)));
        }
        if self.trunc.m_z < 4 {
            return Err(Error::InvalidConfig(format!("m_z must be at least 4, got {}", self.trunc.m_z)));
        }
        if self.weight_cap == Some(0) {
            return Err(Error::InvalidConfig("weight_cap must be positive".into()));
        }
        if self.suites.is_empty() {
            return Err(Error::InvalidConfig("no suites selected".into()));
        }
        Ok(())
    }

    fn weight_cap(&self, s: Suite) -> u32 {
        self.weight_cap.unwrap_or_else(|| s.default_weight_cap())
    }
}

/// Configuration as read from a JSON file; every field is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: Option<u32>,
    pub gcm: Option<serde_json::Value>,
    pub level: Option<serde_json::Value>,
    pub n_hbar: Option<usize>,
    pub m_z: Option<i64>,
    pub weight_cap: Option<u32>,
    pub suites: Option<Vec<String>>,
    pub output: Option<String>,
    pub format: Option<String>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let c: ConfigFile = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if let Some(s) = c.schema {
            if s != SCHEMA {
                return Err(Error::InvalidConfig(format!("unsupported schema {s}")));
            }
        }
        Ok(c)
    }

    pub fn gcm(&self) -> Result<Option<Gcm>> {
        match &self.gcm {
            None => Ok(None),
            Some(serde_json::Value::String(s)) => s.parse().map(Some),
            Some(v) => v.to_string().parse().map(Some),
        }
    }

    pub fn level(&self) -> Result<Option<Level>> {
        match &self.level {
            None => Ok(None),
            Some(serde_json::Value::String(s)) => s.parse().map(Some),
            Some(serde_json::Value::Number(n)) => n.to_string().parse().map(Some),
            Some(v) => Err(Error::InvalidConfig(format!("bad level {v}"))),
        }
    }
}

/// Runs one suite.
pub fn run_suite(cfg: &SuiteConfig, suite: Suite) -> Result<Report> {
    let (gcm, level, trunc) = (&cfg.gcm, &cfg.level, cfg.trunc);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ suite as u64);
    let cap = cfg.weight_cap(suite);
    match suite {
        Suite::TauTech0 => PaperTau::new(gcm, level, trunc)?.check_tech0(),
        Suite::TauTech1 => PaperTau::new(gcm, level, trunc)?.check_tech1(),
        Suite::TauGroup => check_group(gcm, level, trunc, 100, &mut rng),
        Suite::SUnitarity => check_unitarity(PaperTau::new(gcm, level, ybe_trunc(trunc))?.tuple(), true),
        Suite::SYbe => check_ybe(PaperTau::new(gcm, level, ybe_trunc(trunc))?.tuple(), trunc.m_z),
        Suite::SIdealScalars => check_ideal_scalars(&PaperTau::new(gcm, level, trunc)?, 20, &mut rng),
        Suite::ClassicalAffine => check_classical(gcm, level, trunc, cap, 500, &mut rng),
        Suite::Qheisenberg => check_qheisenberg(gcm, level, trunc, cap, 8),
        Suite::LemmaExp => check_exp_field(gcm, level, trunc, cap),
        Suite::DeformationCartan => check_deformation_cartan(gcm, level, trunc, cap),
        Suite::BridgeVacom => check_bridge(trunc, 3, 100, &mut rng),
    }
}

/// Reports of a batch run plus wall-clock timings kept apart from the canonical body.
#[derive(Clone, Debug, Serialize)]
pub struct RunOutput {
    pub schema: u32,
    pub pass: bool,
    pub reports: Vec<Report>,
    pub timing_ms: Vec<(Suite, u128)>,
}

impl RunOutput {
    /// The canonical body: identical across runs of the same configuration.
    pub fn canonical_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            schema: u32,
            pass: bool,
            reports: &'a [Report],
        }
        serde_json::to_string_pretty(&Body {
            schema: self.schema,
            pass: self.pass,
            reports: &self.reports,
        })
        .expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (r, (suite, ms)) in self.reports.iter().zip(&self.timing_ms) {
            s.push_str(&r.to_string());
            s.push_str(&format!("  time {suite}: {ms} ms\n\n"));
        }
        s.push_str(if self.pass { "all suites pass\n" } else { "some suites fail\n" });
        s
    }
}

/// Runs the selected suites on the worker pool; the first error aborts the batch.
pub fn run(cfg: &SuiteConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let results: Vec<(Suite, Result<Report>, u128)> = cfg
        .suites
        .par_iter()
        .map(|&s| {
            let start = Instant::now();
            let r = run_suite(cfg, s);
            (s, r, start.elapsed().as_millis())
        })
        .collect();
    let mut reports = Vec::with_capacity(results.len());
    let mut timing_ms = Vec::with_capacity(results.len());
    for (s, r, ms) in results {
        reports.push(r?);
        timing_ms.push((s, ms));
    }
    Ok(RunOutput {
        schema: SCHEMA,
        pass: reports.iter().all(|r| r.pass),
        reports,
        timing_ms,
    })
}

/// Windows to retry with after an overflow.
pub fn suggested_windows(e: &Error, trunc: Trunc) -> Option<Trunc> {
    match e {
        Error::WindowOverflow { needed_m_z, needed_n_hbar } => Some(Trunc::new(
            (*needed_n_hbar).max(trunc.n_hbar),
            (*needed_m_z).max(trunc.m_z + 1).max(2 * trunc.m_z),
        )),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.name()));
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn tiny_hbar_rejected() {
        let mut c = SuiteConfig::new(Gcm::a1(), Level::int(1));
        c.trunc.n_hbar = 1;
        assert!(matches!(run(&c), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn tech0_on_a2_has_four_pairs() {
        let mut c = SuiteConfig::new(Gcm::a2(), Level::int(2));
        c.suites = vec![Suite::TauTech0];
        let out = run(&c).unwrap();
        assert_eq!(out.reports[0].pairs.len(), 4);
        assert!(out.pass);
    }

    #[test]
    fn config_file_fields() {
        let c = ConfigFile::parse(r#"{"schema": 1, "gcm": [[2,-1],[-1,2]], "level": "1/2", "suites": ["bridge-vacom"]}"#).unwrap();
        assert_eq!(c.gcm().unwrap().unwrap().rank(), 2);
        assert_eq!(c.level().unwrap().unwrap().to_string(), "1/2");
        assert!(ConfigFile::parse(r#"{"schema": 2}"#).is_err());
        assert!(ConfigFile::parse(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn overflow_suggests_larger_windows() {
        let e = Error::WindowOverflow { needed_m_z: 20, needed_n_hbar: 7 };
        assert_eq!(suggested_windows(&e, Trunc::default()), Some(Trunc::new(7, 24)));
        assert_eq!(suggested_windows(&Error::NotDivisible, Trunc::default()), None);
    }
}
