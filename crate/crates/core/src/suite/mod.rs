//! Experiment suites: configuration, seeded trial grids, and CSV/JSON
//! report emission with a fixed column set per suite.

mod report;
mod runners;

use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gaussian::N_SUITE;
use crate::riesz::K_GLOBAL_DEFAULT;

pub use report::{emit_report, load_report, render_report, Cell, ExperimentReport, Summary, SCHEMA, SCHEMA_VERSION};
pub use runners::{instance_seed, random_bv_symbol, random_riesz_family, run_suite};

pub const SUITES: [&str; 13] = [
    "rs1",
    "rs2",
    "duality",
    "khintchine",
    "gaussian-identities",
    "gh",
    "arazy",
    "beta",
    "triangular",
    "marcinkiewicz",
    "mikhlin",
    "lp-blocks",
    "p-sweep",
];

/// Suites driven by the norm estimator, which accepts `p ∈ {1, ∞}`.
const ENDPOINT_SUITES: [&str; 7] = ["gh", "arazy", "beta", "triangular", "marcinkiewicz", "mikhlin", "p-sweep"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

/// Parses an exponent: a number, `a/b`, or `inf`.
pub fn parse_exponent(s: &str) -> Result<f64> {
    let t = s.trim();
    let p = match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        _ => match t.split_once('/') {
            Some((a, b)) => {
                let a: f64 = a.trim().parse().map_err(|_| Error::Config(format!("bad exponent `{s}`")))?;
                let b: f64 = b.trim().parse().map_err(|_| Error::Config(format!("bad exponent `{s}`")))?;
                a / b
            }
            None => t.parse().map_err(|_| Error::Config(format!("bad exponent `{s}`")))?,
        },
    };
    if p.is_nan() {
        return Err(Error::Config(format!("bad exponent `{s}`")));
    }
    Ok(p)
}

fn de_exponents<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<f64>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Exp {
        Num(f64),
        Text(String),
    }
    let raw: Option<Vec<Exp>> = Option::deserialize(d)?;
    raw.map(|v| {
        v.into_iter()
            .map(|e| match e {
                Exp::Num(x) => Ok(x),
                Exp::Text(s) => parse_exponent(&s).map_err(serde::de::Error::custom),
            })
            .collect()
    })
    .transpose()
}

/// Partial configuration as read from a JSON file or from flags; later
/// layers override earlier ones field by field.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub suite: Option<String>,
    #[serde(default, alias = "sizes")]
    pub n: Option<Vec<usize>>,
    #[serde(default)]
    pub d: Option<Vec<usize>>,
    #[serde(default, alias = "p_list", deserialize_with = "de_exponents")]
    pub p: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    #[serde(rename = "K_global", alias = "k_global")]
    pub k_global: Option<f64>,
    #[serde(rename = "N", alias = "samples")]
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub params: Option<Map<String, Value>>,
}

impl ConfigOverrides {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// `self` with every field set in `top` replaced.
    pub fn merge(self, top: ConfigOverrides) -> Self {
        Self {
            suite: top.suite.or(self.suite),
            n: top.n.or(self.n),
            d: top.d.or(self.d),
            p: top.p.or(self.p),
            trials: top.trials.or(self.trials),
            seed: top.seed.or(self.seed),
            k_global: top.k_global.or(self.k_global),
            samples: top.samples.or(self.samples),
            out: top.out.or(self.out),
            format: top.format.or(self.format),
            params: match (self.params, top.params) {
                (Some(mut base), Some(top)) => {
                    base.extend(top);
                    Some(base)
                }
                (base, top) => top.or(base),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: String,
    pub n: Vec<usize>,
    pub d: Vec<usize>,
    pub p: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub k_global: f64,
    /// Monte Carlo sample count.
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Suite-specific parameters (construction tags, `beta`, ...).
    pub params: Map<String, Value>,
}

impl SuiteConfig {
    pub fn defaults(suite: &str) -> Result<Self> {
        if !SUITES.contains(&suite) {
            return Err(Error::UnknownSuite(suite.to_string()));
        }
        let mut cfg = Self {
            suite: suite.to_string(),
            n: vec![4, 8],
            d: vec![2],
            p: vec![1.5, 2.0, 3.0],
            trials: 10,
            seed: 1,
            k_global: K_GLOBAL_DEFAULT,
            samples: N_SUITE,
            out: None,
            format: Format::Csv,
            params: Map::new(),
        };
        match suite {
            "rs1" | "rs2" => {
                cfg.d = vec![1, 2];
                cfg.p = vec![4.0 / 3.0, 1.5, 2.0, 3.0, 4.0];
            }
            "duality" => cfg.n = vec![4],
            "khintchine" => {
                cfg.n = vec![4];
                cfg.d = vec![3];
                cfg.p = vec![1.5, 2.0, 3.0, 4.0];
                cfg.trials = 3;
            }
            "gaussian-identities" => {
                cfg.d = vec![3];
                cfg.trials = 5;
            }
            "triangular" => {
                cfg.n = vec![16];
                cfg.p = vec![4.0 / 3.0, 2.0, 4.0];
                cfg.trials = 4;
            }
            "gh" | "arazy" | "beta" | "p-sweep" => {
                cfg.n = vec![8];
                cfg.d = vec![3];
                cfg.trials = 4;
                if suite == "beta" {
                    cfg.params.insert("beta".into(), json!(0.3));
                }
                if suite == "p-sweep" {
                    cfg.params.insert("construction".into(), json!("gh"));
                    cfg.p = vec![4.0 / 3.0, 1.5, 2.0, 3.0, 4.0];
                }
            }
            "marcinkiewicz" => {
                cfg.n = vec![32];
                cfg.p = vec![1.5, 4.0];
                cfg.trials = 2;
            }
            "mikhlin" => {
                cfg.n = vec![17];
                cfg.d = vec![1];
                cfg.p = vec![1.5, 4.0];
                cfg.trials = 4;
            }
            "lp-blocks" => {
                cfg.n = vec![8, 12];
                cfg.p = vec![1.5, 2.0, 3.0];
                cfg.trials = 5;
            }
            _ => {}
        }
        Ok(cfg)
    }

    /// Suite defaults overlaid with `o`; the suite name must be present.
    pub fn resolve(o: ConfigOverrides) -> Result<Self> {
        let suite = o
            .suite
            .clone()
            .ok_or_else(|| Error::Config("no suite given (use --suite or the `suite` field)".into()))?;
        let mut cfg = Self::defaults(&suite)?;
        if let Some(v) = o.n {
            cfg.n = v;
        }
        if let Some(v) = o.d {
            cfg.d = v;
        }
        if let Some(v) = o.p {
            cfg.p = v;
        }
        if let Some(v) = o.trials {
            cfg.trials = v;
        }
        if let Some(v) = o.seed {
            cfg.seed = v;
        }
        if let Some(v) = o.k_global {
            cfg.k_global = v;
        }
        if let Some(v) = o.samples {
            cfg.samples = v;
        }
        cfg.out = o.out;
        if let Some(v) = o.format {
            cfg.format = v;
        }
        if let Some(v) = o.params {
            cfg.params.extend(v);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(Error::UnknownSuite(self.suite.clone()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trial count must be at least 1".into()));
        }
        let endpoints = ENDPOINT_SUITES.contains(&self.suite.as_str());
        for &p in &self.p {
            let ok = if endpoints { p >= 1.0 } else { p > 1.0 && p.is_finite() };
            if !ok {
                let range = if endpoints { "[1, ∞]" } else { "(1, ∞)" };
                return Err(Error::Config(format!("p = {p} outside {range} for suite {}", self.suite)));
            }
        }
        if self.n.iter().any(|&n| n == 0) || self.d.iter().any(|&d| d == 0) {
            return Err(Error::Config("sizes n and d must be positive".into()));
        }
        if !(self.k_global > 0.0) {
            return Err(Error::Config("K_global must be positive".into()));
        }
        if self.samples < 2 {
            return Err(Error::Config("N must be at least 2".into()));
        }
        Ok(())
    }

    /// Configuration echo for reports. The output path is left out so that a
    /// report does not depend on where it is written.
    pub fn echo(&self) -> Value {
        let p: Vec<Value> = self
            .p
            .iter()
            .map(|&p| if p.is_finite() { json!(p) } else { json!("inf") })
            .collect();
        json!({
            "suite": self.suite,
            "n": self.n,
            "d": self.d,
            "p": p,
            "trials": self.trials,
            "seed": self.seed,
            "K_global": self.k_global,
            "N": self.samples,
            "format": self.format,
            "params": self.params,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_parsing() {
        assert_eq!(parse_exponent("4/3").unwrap(), 4.0 / 3.0);
        assert_eq!(parse_exponent(" 2.5 ").unwrap(), 2.5);
        assert!(parse_exponent("inf").unwrap().is_infinite());
        assert!(parse_exponent("x").is_err());
    }

    #[test]
    fn layering() {
        let file = ConfigOverrides::from_json(
            r#"{"suite": "rs1", "n": [5], "p": [1.5, "4/3"], "K_global": 4, "seed": 9,
                "params": {"a": 1}}"#,
        )
        .unwrap();
        let flags = ConfigOverrides {
            seed: Some(11),
            params: Some([("b".to_string(), json!(2))].into_iter().collect()),
            ..Default::default()
        };
        let cfg = SuiteConfig::resolve(file.merge(flags)).unwrap();
        assert_eq!(cfg.n, vec![5]);
        assert_eq!(cfg.p, vec![1.5, 4.0 / 3.0]);
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.k_global, 4.0);
        assert_eq!(cfg.params.len(), 2);
        assert_eq!(cfg.d, vec![1, 2]);
    }

    #[test]
    fn validation() {
        let bad = |text: &str| SuiteConfig::resolve(ConfigOverrides::from_json(text).unwrap());
        assert!(matches!(bad(r#"{"suite": "nope"}"#), Err(Error::UnknownSuite(_))));
        assert!(bad(r#"{"suite": "rs1", "trials": 0}"#).is_err());
        assert!(bad(r#"{"suite": "rs1", "p": [1]}"#).is_err());
        assert!(bad(r#"{"suite": "gh", "p": [1, "inf"]}"#).is_ok());
        assert!(ConfigOverrides::from_json(r#"{"suite": "rs1", "bogus": 1}"#).is_err());
        assert!(SuiteConfig::resolve(ConfigOverrides::default()).is_err());
    }

    #[test]
    fn every_suite_has_defaults() {
        for s in SUITES {
            SuiteConfig::defaults(s).unwrap().validate().unwrap();
        }
    }
}
