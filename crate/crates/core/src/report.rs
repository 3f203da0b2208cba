//! Machine-readable results of verification suites.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::series::{LaurentSeries, Witness};

/// Report layout version.
pub const SCHEMA: u32 = 1;

/// One named identity with its outcome.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: true,
            witness: None,
            detail: None,
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: false,
            witness: None,
            detail: Some(detail.into()),
        }
    }

    pub fn from_bool(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        if ok {
            Self::pass(name)
        } else {
            Self::fail(name, detail)
        }
    }

    pub fn from_witness(name: impl Into<String>, w: Option<Witness>) -> Self {
        Check {
            name: name.into(),
            pass: w.is_none(),
            witness: w,
            detail: None,
        }
    }

    /// Compares two series coefficientwise below `upto`.
    pub fn series(name: impl Into<String>, lhs: &LaurentSeries, rhs: &LaurentSeries, upto: i64) -> Result<Self> {
        Ok(Self::from_witness(name, lhs.first_difference(rhs, upto)?))
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Checks grouped under one label, usually an index pair.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Entry {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub checks: Vec<Check>,
}

impl Entry {
    pub fn new(label: impl Into<String>, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        let witness = checks.iter().find_map(|c| c.witness.clone());
        Entry {
            label: label.into(),
            i: None,
            j: None,
            pass,
            witness,
            checks,
        }
    }

    pub fn pair(i: usize, j: usize, checks: Vec<Check>) -> Self {
        let mut e = Self::new(format!("({i},{j})"), checks);
        e.i = Some(i);
        e.j = Some(j);
        e
    }
}

/// Outcome of one suite on one configuration.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub gcm: String,
    pub level: String,
    #[serde(rename = "N_hbar")]
    pub n_hbar: usize,
    #[serde(rename = "M_z")]
    pub m_z: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_cap: Option<u32>,
    pub pass: bool,
    pub pairs: Vec<Entry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(suite: &str, gcm: &str, level: &str, n_hbar: usize, m_z: i64, pairs: Vec<Entry>) -> Self {
        let pass = pairs.iter().all(|e| e.pass);
        Report {
            suite: suite.to_string(),
            gcm: gcm.to_string(),
            level: level.to_string(),
            n_hbar,
            m_z,
            weight_cap: None,
            pass,
            pairs,
            notes: Vec::new(),
        }
    }

    pub fn with_weight_cap(mut self, w: u32) -> Self {
        self.weight_cap = Some(w);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = (&Entry, &Check)> {
        self.pairs
            .iter()
            .flat_map(|e| e.checks.iter().map(move |c| (e, c)))
            .filter(|(_, c)| !c.pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {}  gcm {}  level {}  N_hbar {}  M_z {}{}  {}",
            self.suite,
            self.gcm,
            self.level,
            self.n_hbar,
            self.m_z,
            self.weight_cap.map(|w| format!("  weight_cap {w}")).unwrap_or_default(),
            if self.pass { "PASS" } else { "FAIL" }
        )?;
        let width = self
            .pairs
            .iter()
            .flat_map(|e| e.checks.iter().map(|c| c.name.len()))
            .max()
            .unwrap_or(0);
        for e in &self.pairs {
            for c in &e.checks {
                write!(
                    f,
                    "  {:<10} {:<width$}  {}",
                    e.label,
                    c.name,
                    if c.pass { "ok" } else { "FAIL" },
                )?;
                if let Some(w) = &c.witness {
                    write!(f, "  at {w}")?;
                }
                if let Some(d) = &c.detail {
                    write!(f, "  {d}")?;
                }
                writeln!(f)?;
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
