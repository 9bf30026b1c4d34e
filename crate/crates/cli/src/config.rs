use crate::CliError;
use critical_besov::grid_oracle::OracleParams;
use critical_besov::ns_inflation::ConstructionParams;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Cutoffs,
    Data,
    Iterate,
    Report,
    Sweep,
    Oracle,
}

impl RunMode {
    pub fn name(self) -> &'static str {
        match self {
            RunMode::Cutoffs => "cutoffs",
            RunMode::Data => "data",
            RunMode::Iterate => "iterate",
            RunMode::Report => "report",
            RunMode::Sweep => "sweep",
            RunMode::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Quadrature,
    TaylorSplit,
}

/// `q` is a number `≥ 1` or the string `"inf"`.
fn de_q<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Q {
        Num(f64),
        Text(String),
    }
    match Q::deserialize(d)? {
        Q::Num(x) => Ok(x),
        Q::Text(s) if s == "inf" => Ok(f64::INFINITY),
        Q::Text(s) => Err(serde::de::Error::custom(format!(
            "q must be a number or \"inf\", got {s:?}"
        ))),
    }
}

fn ser_q<S: Serializer>(q: &f64, s: S) -> Result<S::Ok, S::Error> {
    if q.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*q)
    }
}

fn default_q() -> f64 {
    1.0
}

fn default_nodes() -> usize {
    32
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionConfig {
    pub n: usize,
    /// Single level for `data`, `iterate`, `report`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<i32>,
    /// Levels for `sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<i32>>,
    pub eps: f64,
    #[serde(
        default = "default_q",
        deserialize_with = "de_q",
        serialize_with = "ser_q"
    )]
    pub q: f64,
    /// Defaults to `ε²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodName>,
    /// Sweep only: witness and norm comparisons alongside `S(k)`.
    #[serde(default = "default_true")]
    pub norms: bool,
}

fn default_true() -> bool {
    true
}

impl ConstructionConfig {
    pub fn params(&self, k: i32) -> ConstructionParams {
        let mut p = ConstructionParams::theorem(self.n, k, self.eps, self.q);
        if let Some(eta) = self.eta {
            p.eta = eta;
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub n: usize,
    pub k: i32,
    pub eps: f64,
    pub delta: f64,
    pub t_final: f64,
    pub steps: usize,
    pub points: usize,
    pub length: f64,
    #[serde(deserialize_with = "de_q", serialize_with = "ser_q")]
    pub q: f64,
    /// Seed of the random field used by the identity check.
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        let p = OracleParams::default_2d();
        Self {
            n: p.n,
            k: p.k,
            eps: p.eps,
            delta: p.delta,
            t_final: p.t_final,
            steps: p.steps,
            points: p.points,
            length: 6.0 * PI,
            q: 1.0,
            seed: 7,
        }
    }
}

impl OracleConfig {
    pub fn params(&self) -> OracleParams {
        OracleParams {
            n: self.n,
            k: self.k,
            eps: self.eps,
            delta: self.delta,
            t_final: self.t_final,
            steps: self.steps,
            points: self.points,
            length: self.length,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub mode: RunMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    /// Output directory, relative to the output root unless absolute.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Emit `plot.svg` for sweeps.
    #[serde(default)]
    pub plot: bool,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn construction(&self) -> Result<&ConstructionConfig, CliError> {
        self.construction.as_ref().ok_or_else(|| {
            invalid(format!(
                "mode {} needs a \"construction\" block",
                self.mode.name()
            ))
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        match self.mode {
            RunMode::Cutoffs => {
                if self.construction.is_some() || self.oracle.is_some() {
                    return Err(invalid("mode cutoffs takes no payload"));
                }
            }
            RunMode::Data | RunMode::Iterate | RunMode::Report => {
                let c = self.construction()?;
                let k = c.k.ok_or_else(|| {
                    invalid(format!("mode {} needs construction.k", self.mode.name()))
                })?;
                if c.ks.is_some() {
                    return Err(invalid("construction.ks is only used by mode sweep"));
                }
                c.params(k).validate().map_err(|e| invalid(e.to_string()))?;
            }
            RunMode::Sweep => {
                let c = self.construction()?;
                let ks =
                    c.ks.as_ref()
                        .ok_or_else(|| invalid("mode sweep needs construction.ks"))?;
                if c.k.is_some() {
                    return Err(invalid(
                        "mode sweep takes construction.ks, not construction.k",
                    ));
                }
                for &k in ks {
                    c.params(k).validate().map_err(|e| invalid(e.to_string()))?;
                }
            }
            RunMode::Oracle => {
                if self.construction.is_some() {
                    return Err(invalid(
                        "mode oracle takes an \"oracle\" block, not \"construction\"",
                    ));
                }
                let o = self.oracle.clone().unwrap_or_default();
                o.params().validate().map_err(|e| invalid(e.to_string()))?;
                if o.n != 2 {
                    return Err(invalid("oracle runs are two-dimensional"));
                }
            }
        }
        if let Some(c) = &self.construction {
            if c.nodes < 2 {
                return Err(invalid("construction.nodes must be at least 2"));
            }
            if c.method.is_some() && self.mode != RunMode::Iterate {
                return Err(invalid("construction.method is only used by mode iterate"));
            }
        }
        Ok(())
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| invalid(format!("schema: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}
