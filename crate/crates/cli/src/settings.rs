//! `key = value` run configuration.
//!
//! One file drives every subcommand. Lines are `key = value`; `#` starts a
//! comment. Only `lambda_p` is required. See the README for the schema.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use overlaynet::config::{AccessRule, DetectionRule, InvariantViolation};
use overlaynet::experiments::{SweepSpec, SweptParameter};
use overlaynet::pointprocess::Presence;
use overlaynet::verify::{Fault, VerifyOptions};
use overlaynet::{NetworkConfig, Schedule};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("key `{key}`: expected {expected}, got `{got}`")]
    Type { key: String, expected: &'static str, got: String },
    #[error("conflicting keys: {0}")]
    Conflict(String),
    #[error("{0}")]
    Invariant(#[from] InvariantViolation),
    #[error("sweep: {0}")]
    Sweep(String),
}

pub const KEYS: [&str; 22] = [
    "lambda_p",
    "beta",
    "k",
    "l_p",
    "l_s",
    "sp_ratio",
    "ps_ratio",
    "q_p",
    "q_s",
    "r_d",
    "detection",
    "region_radius",
    "presence",
    "trials",
    "packets",
    "sweep.parameter",
    "sweep.values",
    "sweep.lambda_p",
    "sweep.trials",
    "verify.scale",
    "verify.only",
    "verify.fault",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub lambda_p: f64,
    pub schedule: Schedule,
    pub presence: Presence,
    pub trials: u64,
    pub packets: u64,
    pub sweep_parameter: SweptParameter,
    pub sweep_values: Vec<f64>,
    pub sweep_lambda_p: f64,
    pub sweep_trials: u64,
    pub verify_scale: f64,
    pub verify_only: Vec<u32>,
    pub verify_fault: Option<Fault>,
}

impl RunSettings {
    pub fn network(&self) -> NetworkConfig {
        self.schedule.config(self.lambda_p)
    }

    pub fn sweep_spec(&self, seed: u64) -> SweepSpec {
        SweepSpec {
            schedule: self.schedule,
            parameter: self.sweep_parameter,
            values: self.sweep_values.clone(),
            lambda_p: self.sweep_lambda_p,
            presence: self.presence,
            trials_per_point: self.sweep_trials,
            seed,
        }
    }

    pub fn verify_options(&self, seed: u64) -> VerifyOptions {
        VerifyOptions { seed, scale: self.verify_scale, only: self.verify_only.clone(), fault: self.verify_fault }
    }

    /// Canonical dump: every key, fixed order, followed by the derived
    /// network parameters as comments. Parsing it back gives the same
    /// settings.
    pub fn render(&self) -> String {
        let s = &self.schedule;
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let mut put = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        put("lambda_p", self.lambda_p.to_string());
        put("beta", s.beta.to_string());
        put("k", s.k.to_string());
        put("l_p", s.l_p.to_string());
        put("l_s", s.l_s.to_string());
        put("sp_ratio", s.sp_ratio.to_string());
        put("ps_ratio", s.ps_ratio.to_string());
        put("q_p", render_access(s.access_p));
        put("q_s", render_access(s.access_s));
        put("detection", render_detection(s.detection));
        put("region_radius", s.region_radius.to_string());
        put("presence", render_presence(self.presence).into());
        put("trials", self.trials.to_string());
        put("packets", self.packets.to_string());
        put("sweep.parameter", self.sweep_parameter.as_str().into());
        put("sweep.values", list(&self.sweep_values));
        put("sweep.lambda_p", self.sweep_lambda_p.to_string());
        put("sweep.trials", self.sweep_trials.to_string());
        put("verify.scale", self.verify_scale.to_string());
        put(
            "verify.only",
            if self.verify_only.is_empty() {
                "all".into()
            } else {
                self.verify_only.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            },
        );
        put("verify.fault", self.verify_fault.map_or("none", |_| "gamma_max").into());
        let c = self.network();
        out.push_str("# derived\n");
        for (k, v) in [
            ("lambda_s", c.lambda_s()),
            ("q_p", c.q_p),
            ("q_s", c.q_s),
            ("rr_p", c.rr_p),
            ("rr_s", c.rr_s),
            ("ri_p", c.ri_p()),
            ("ri_s", c.ri_s()),
            ("ri_sp", c.ri_sp),
            ("ri_ps", c.ri_ps),
            ("r_d", c.r_d),
        ] {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out
    }
}

fn render_access(a: AccessRule) -> String {
    match a {
        AccessRule::Optimal => "optimal".into(),
        AccessRule::Fixed(q) => q.to_string(),
        AccessRule::InverseLog(c) => format!("inverse_log:{c}"),
    }
}

fn render_detection(d: DetectionRule) -> String {
    match d {
        DetectionRule::Fixed(r) => format!("fixed:{r}"),
        DetectionRule::Proportional(a) => format!("proportional:{a}"),
        DetectionRule::Growing { alpha, exponent } => format!("growing:{alpha}:{exponent}"),
    }
}

fn render_presence(p: Presence) -> &'static str {
    match (p.primary, p.secondary) {
        (true, true) => "both",
        (true, false) => "primary",
        _ => "secondary",
    }
}

fn read_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.trim().into() })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.trim().into() });
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(ConfigError::Duplicate(k.into()));
        }
    }
    Ok(map)
}

/// Splits a `key=value` command-line override.
pub fn parse_override(s: &str) -> Result<(String, String), ConfigError> {
    let (k, v) = s.split_once('=').ok_or_else(|| ConfigError::Syntax { line: 0, text: s.into() })?;
    Ok((k.trim().into(), v.trim().into()))
}

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn take(&mut self, key: &str) -> Option<(String, String)> {
        self.0.remove(key).map(|v| (key.to_string(), v))
    }

    fn num(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((k, v)) => number(&k, &v),
        }
    }

    fn count(&mut self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((k, v)) => v.parse().map_err(|_| ConfigError::Type { key: k, expected: "a non-negative integer", got: v }),
        }
    }
}

fn number(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ConfigError::Type { key: key.into(), expected: "a finite number", got: v.into() })
}

fn access(key: &str, v: &str) -> Result<AccessRule, ConfigError> {
    if v == "optimal" {
        return Ok(AccessRule::Optimal);
    }
    if let Some(c) = v.strip_prefix("inverse_log:") {
        return Ok(AccessRule::InverseLog(number(key, c)?));
    }
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .map(AccessRule::Fixed)
        .ok_or_else(|| ConfigError::Type { key: key.into(), expected: "`optimal`, `inverse_log:<c>` or a probability", got: v.into() })
}

fn detection(key: &str, v: &str) -> Result<DetectionRule, ConfigError> {
    let bad = || ConfigError::Type {
        key: key.into(),
        expected: "`fixed:<r>`, `proportional:<alpha>` or `growing:<alpha>:<exponent>`",
        got: v.into(),
    };
    let parts: Vec<&str> = v.split(':').collect();
    match parts.as_slice() {
        ["fixed", r] => Ok(DetectionRule::Fixed(number(key, r)?)),
        ["proportional", a] => Ok(DetectionRule::Proportional(number(key, a)?)),
        ["growing", a, e] => Ok(DetectionRule::Growing { alpha: number(key, a)?, exponent: number(key, e)? }),
        _ => Err(bad()),
    }
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|x| number(key, x.trim())).collect()
}

/// Parses configuration text, then applies `overrides` in order.
pub fn parse_config_str(text: &str, overrides: &[(String, String)]) -> Result<RunSettings, ConfigError> {
    let mut map = read_pairs(text)?;
    for (k, v) in overrides {
        map.insert(k.clone(), v.clone());
    }
    if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey(k.clone()));
    }
    if map.contains_key("r_d") && map.contains_key("detection") {
        return Err(ConfigError::Conflict("`r_d` is shorthand for `detection = fixed:<r>`; give one".into()));
    }
    let mut f = Fields(map);
    let lambda_p = match f.take("lambda_p") {
        Some((k, v)) => number(&k, &v)?,
        None => return Err(ConfigError::MissingKey("lambda_p")),
    };
    let d = Schedule::default();
    let mut schedule = Schedule {
        beta: f.num("beta", d.beta)?,
        k: f.num("k", d.k)?,
        l_p: f.num("l_p", d.l_p)?,
        l_s: f.num("l_s", d.l_s)?,
        sp_ratio: f.num("sp_ratio", d.sp_ratio)?,
        ps_ratio: f.num("ps_ratio", d.ps_ratio)?,
        region_radius: f.num("region_radius", d.region_radius)?,
        ..d
    };
    if let Some((k, v)) = f.take("q_p") {
        schedule.access_p = access(&k, &v)?;
    }
    if let Some((k, v)) = f.take("q_s") {
        schedule.access_s = access(&k, &v)?;
    }
    if let Some((k, v)) = f.take("r_d") {
        schedule.detection = DetectionRule::Fixed(number(&k, &v)?);
    }
    if let Some((k, v)) = f.take("detection") {
        schedule.detection = detection(&k, &v)?;
    }
    let presence = match f.take("presence") {
        None => Presence::BOTH,
        Some((k, v)) => match v.as_str() {
            "both" => Presence::BOTH,
            "primary" => Presence::PRIMARY,
            "secondary" => Presence::SECONDARY,
            _ => return Err(ConfigError::Type { key: k, expected: "`both`, `primary` or `secondary`", got: v }),
        },
    };
    let trials = f.count("trials", 200)?;
    let packets = f.count("packets", 2000)?;
    let sweep_parameter = match f.take("sweep.parameter") {
        None => SweptParameter::LambdaP,
        Some((k, v)) => match v.as_str() {
            "lambda_p" => SweptParameter::LambdaP,
            "alpha" => SweptParameter::DetectionAlpha,
            _ => return Err(ConfigError::Type { key: k, expected: "`lambda_p` or `alpha`", got: v }),
        },
    };
    let sweep_values = match f.take("sweep.values") {
        None => overlaynet::verify::LAMBDA_GRID.to_vec(),
        Some((k, v)) => list(&k, &v)?,
    };
    let sweep_lambda_p = f.num("sweep.lambda_p", lambda_p)?;
    let sweep_trials = f.count("sweep.trials", trials)?;
    let verify_scale = f.num("verify.scale", 1.0)?;
    let verify_only = match f.take("verify.only") {
        None => Vec::new(),
        Some((_, v)) if v == "all" => Vec::new(),
        Some((k, v)) => v
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| ConfigError::Type { key: k.clone(), expected: "criterion ids", got: v.clone() }))
            .collect::<Result<_, _>>()?,
    };
    let verify_fault = match f.take("verify.fault") {
        None => None,
        Some((k, v)) => match v.as_str() {
            "none" => None,
            "gamma_max" => Some(Fault::GammaMax),
            _ => return Err(ConfigError::Type { key: k, expected: "`none` or `gamma_max`", got: v }),
        },
    };
    debug_assert!(f.0.is_empty(), "unhandled keys: {:?}", f.0);

    let settings = RunSettings {
        lambda_p,
        schedule,
        presence,
        trials,
        packets,
        sweep_parameter,
        sweep_values,
        sweep_lambda_p,
        sweep_trials,
        verify_scale,
        verify_only,
        verify_fault,
    };
    settings.network().validate()?;
    for (name, v) in [("trials", trials), ("packets", packets), ("sweep.trials", sweep_trials)] {
        if v == 0 {
            return Err(ConfigError::Type { key: name.into(), expected: "a positive integer", got: "0".into() });
        }
    }
    if !(verify_scale > 0.0) {
        return Err(ConfigError::Type { key: "verify.scale".into(), expected: "a positive number", got: verify_scale.to_string() });
    }
    settings.sweep_spec(1).validate().map_err(|e| ConfigError::Sweep(e.to_string()))?;
    Ok(settings)
}

pub fn parse_config(path: &Path, overrides: &[(String, String)]) -> Result<RunSettings, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    parse_config_str(&text, overrides)
}
