//! Flat `key = value` experiment configuration.
//!
//! Blank lines are ignored and `#` starts a comment. List values are comma
//! separated. Every key may appear at most once; unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use wql_core::domain::PointSetKind;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("config key `{key}`: {reason}")]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Eval,
    Sweep,
    Lemma1,
    Lemma4,
    Audit,
    #[value(name = "gen-points")]
    GenPoints,
    Plot,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Eval => "eval",
            Mode::Sweep => "sweep",
            Mode::Lemma1 => "lemma1",
            Mode::Lemma4 => "lemma4",
            Mode::Audit => "audit",
            Mode::GenPoints => "gen-points",
            Mode::Plot => "plot",
        }
    }

    fn parse(s: &str) -> Option<Mode> {
        [
            Mode::Eval,
            Mode::Sweep,
            Mode::Lemma1,
            Mode::Lemma4,
            Mode::Audit,
            Mode::GenPoints,
            Mode::Plot,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    ExtremalEps,
    DistanceCap,
    Linear,
    ProductSine,
}

impl FamilyKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "extremal_eps" => FamilyKind::ExtremalEps,
            "distance_cap" => FamilyKind::DistanceCap,
            "linear" => FamilyKind::Linear,
            "product_sine" => FamilyKind::ProductSine,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Ball,
    Cone,
}

pub const KEYS: &[&str] = &[
    "mode", "d", "m", "N", "pointset", "seed", "seeds", "points", "family", "eps", "eps_rel", "cap", "anchor",
    "coeffs", "offset", "deltas", "probes", "sweep_N", "scenario", "radius", "half_width", "input", "x", "y",
    "output", "out",
];

pub const DEFAULT_M: usize = 64;
pub const DEFAULT_PROBES: usize = 100;

/// A parsed configuration. Mode-specific requirements are checked by
/// [`ExperimentConfig::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub d: Option<usize>,
    /// Cells per axis, default 64.
    pub m: usize,
    pub n: Option<usize>,
    pub pointset: PointSetKind,
    /// `seeds` if given, else `[seed]`, else `[0]`.
    pub seeds: Vec<u64>,
    /// Point-set text file used instead of a generator.
    pub points: Option<PathBuf>,
    pub family: Option<FamilyKind>,
    pub eps: Vec<f64>,
    /// ε as a multiple of the instance's W∞.
    pub eps_rel: Vec<f64>,
    pub cap: Vec<f64>,
    pub anchor: Option<Vec<f64>>,
    pub coeffs: Option<Vec<f64>>,
    pub offset: f64,
    /// Default `[0.5, 1, d]`.
    pub deltas: Option<Vec<f64>>,
    pub probes: usize,
    pub sweep_n: Vec<usize>,
    pub scenario: Scenario,
    pub radius: Vec<f64>,
    pub half_width: Option<f64>,
    pub input: Option<PathBuf>,
    pub x: Option<String>,
    pub y: Option<String>,
    pub output: Option<String>,
    pub out: Option<PathBuf>,
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError::new(key, format!("cannot parse `{v}`")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    let items: Vec<T> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_one(key, s))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(ConfigError::new(key, "empty list"));
    }
    Ok(items)
}

fn positive(key: &str, v: &[f64]) -> Result<(), ConfigError> {
    match v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        Some(x) => Err(ConfigError::new(key, format!("must be positive, got {x}"))),
        None => Ok(()),
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut raw: BTreeMap<&str, &str> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::new(line, format!("line {} is not `key = value`", lineno + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(ConfigError::new(k, "unknown key"));
        }
        if raw.insert(k, v).is_some() {
            return Err(ConfigError::new(k, "given more than once"));
        }
    }

    let get = |k: &str| raw.get(k).copied();
    let mut cfg = ExperimentConfig {
        mode: None,
        d: None,
        m: DEFAULT_M,
        n: None,
        pointset: PointSetKind::MidpointGrid,
        seeds: vec![0],
        points: get("points").map(PathBuf::from),
        family: None,
        eps: Vec::new(),
        eps_rel: Vec::new(),
        cap: Vec::new(),
        anchor: None,
        coeffs: None,
        offset: 0.0,
        deltas: None,
        probes: DEFAULT_PROBES,
        sweep_n: Vec::new(),
        scenario: Scenario::Ball,
        radius: Vec::new(),
        half_width: None,
        input: get("input").map(PathBuf::from),
        x: get("x").map(str::to_owned),
        y: get("y").map(str::to_owned),
        output: get("output").map(str::to_owned),
        out: get("out").map(PathBuf::from),
    };

    if let Some(v) = get("mode") {
        cfg.mode = Some(Mode::parse(v).ok_or_else(|| ConfigError::new("mode", format!("unknown mode `{v}`")))?);
    }
    if let Some(v) = get("d") {
        let d: usize = parse_one("d", v)?;
        if d == 0 {
            return Err(ConfigError::new("d", "dimension must be at least 1"));
        }
        cfg.d = Some(d);
    }
    if let Some(v) = get("m") {
        cfg.m = parse_one("m", v)?;
        if cfg.m < 2 {
            return Err(ConfigError::new("m", "need at least 2 cells per axis"));
        }
    }
    if let Some(v) = get("N") {
        let n: usize = parse_one("N", v)?;
        if n == 0 {
            return Err(ConfigError::new("N", "need at least one point"));
        }
        cfg.n = Some(n);
    }
    if let Some(v) = get("pointset") {
        cfg.pointset =
            PointSetKind::parse(v).ok_or_else(|| ConfigError::new("pointset", format!("unknown kind `{v}`")))?;
    }
    match (get("seed"), get("seeds")) {
        (Some(_), Some(_)) => return Err(ConfigError::new("seeds", "give either `seed` or `seeds`")),
        (Some(v), None) => cfg.seeds = vec![parse_one("seed", v)?],
        (None, Some(v)) => cfg.seeds = parse_list("seeds", v)?,
        (None, None) => {}
    }
    if let Some(v) = get("family") {
        cfg.family =
            Some(FamilyKind::parse(v).ok_or_else(|| ConfigError::new("family", format!("unknown family `{v}`")))?);
    }
    for (key, slot) in [("eps", &mut cfg.eps), ("eps_rel", &mut cfg.eps_rel), ("cap", &mut cfg.cap), ("radius", &mut cfg.radius)] {
        if let Some(v) = get(key) {
            *slot = parse_list(key, v)?;
            positive(key, slot)?;
        }
    }
    if let Some(v) = get("anchor") {
        cfg.anchor = Some(parse_list("anchor", v)?);
    }
    if let Some(v) = get("coeffs") {
        cfg.coeffs = Some(parse_list("coeffs", v)?);
    }
    if let Some(v) = get("offset") {
        cfg.offset = parse_one("offset", v)?;
    }
    if let Some(v) = get("deltas") {
        let deltas: Vec<f64> = parse_list("deltas", v)?;
        positive("deltas", &deltas)?;
        cfg.deltas = Some(deltas);
    }
    if let Some(v) = get("probes") {
        cfg.probes = parse_one("probes", v)?;
        if cfg.probes == 0 {
            return Err(ConfigError::new("probes", "need at least one probe"));
        }
    }
    if let Some(v) = get("sweep_N") {
        cfg.sweep_n = parse_list("sweep_N", v)?;
        if cfg.sweep_n.contains(&0) {
            return Err(ConfigError::new("sweep_N", "need at least one point"));
        }
    }
    if let Some(v) = get("scenario") {
        cfg.scenario = match v {
            "ball" => Scenario::Ball,
            "cone" => Scenario::Cone,
            _ => return Err(ConfigError::new("scenario", format!("expected `ball` or `cone`, got `{v}`"))),
        };
    }
    if let Some(v) = get("half_width") {
        let h: f64 = parse_one("half_width", v)?;
        positive("half_width", &[h])?;
        cfg.half_width = Some(h);
    }
    if !cfg.eps.is_empty() && !cfg.eps_rel.is_empty() {
        return Err(ConfigError::new("eps_rel", "give either `eps` or `eps_rel`"));
    }
    if let (Some(d), Some(deltas)) = (cfg.d, &cfg.deltas) {
        if let Some(x) = deltas.iter().find(|&&x| x > d as f64) {
            return Err(ConfigError::new("deltas", format!("δ = {x} exceeds d = {d}")));
        }
    }
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn dim(&self) -> Result<usize, ConfigError> {
        self.d.ok_or_else(|| ConfigError::new("d", "required"))
    }

    pub fn deltas(&self) -> Result<Vec<f64>, ConfigError> {
        let d = self.dim()? as f64;
        Ok(self.deltas.clone().unwrap_or_else(|| vec![0.5, 1.0, d]))
    }

    /// Checks the keys the given mode needs.
    pub fn validate(&self, mode: Mode) -> Result<(), ConfigError> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(ConfigError::new("mode", format!("config says `{m}` but `{mode}` was requested")));
            }
        }
        if mode == Mode::Plot {
            if self.input.is_none() {
                return Err(ConfigError::new("input", "required for plot"));
            }
            if self.x.is_none() {
                return Err(ConfigError::new("x", "required for plot"));
            }
            if self.y.is_none() {
                return Err(ConfigError::new("y", "required for plot"));
            }
            return Ok(());
        }
        let d = self.dim()?;
        let needs_points = matches!(mode, Mode::Eval | Mode::Sweep | Mode::Audit | Mode::GenPoints);
        if needs_points && self.points.is_none() {
            match mode {
                Mode::Sweep if self.sweep_n.is_empty() => {
                    return Err(ConfigError::new("sweep_N", "required for sweep"))
                }
                Mode::Sweep => {}
                _ if self.n.is_none() => return Err(ConfigError::new("N", "required")),
                _ => {}
            }
        }
        if mode == Mode::Sweep && self.points.is_some() {
            return Err(ConfigError::new("points", "sweep generates its own point sets"));
        }
        if matches!(mode, Mode::Eval | Mode::Sweep | Mode::Audit | Mode::Lemma4) {
            let family = self.family.ok_or_else(|| ConfigError::new("family", "required"))?;
            match family {
                FamilyKind::ExtremalEps => {
                    if mode == Mode::Lemma4 {
                        return Err(ConfigError::new("family", "extremal_eps needs a point set"));
                    }
                    if self.eps.is_empty() && self.eps_rel.is_empty() {
                        return Err(ConfigError::new("eps", "extremal_eps needs `eps` or `eps_rel`"));
                    }
                }
                FamilyKind::DistanceCap => {
                    if self.cap.is_empty() && mode != Mode::Lemma4 {
                        return Err(ConfigError::new("cap", "distance_cap needs `cap`"));
                    }
                }
                FamilyKind::Linear | FamilyKind::ProductSine => match &self.coeffs {
                    None => return Err(ConfigError::new("coeffs", "required for this family")),
                    Some(c) if c.len() != d => {
                        return Err(ConfigError::new("coeffs", format!("need {d} values, got {}", c.len())))
                    }
                    _ => {}
                },
            }
        }
        if let Some(a) = &self.anchor {
            if a.len() != d {
                return Err(ConfigError::new("anchor", format!("need {d} coordinates, got {}", a.len())));
            }
        }
        match mode {
            Mode::Lemma1 => {
                if self.radius.len() != 1 {
                    return Err(ConfigError::new("radius", "lemma1 needs exactly one radius"));
                }
                if self.cap.is_empty() {
                    return Err(ConfigError::new("cap", "lemma1 needs at least one δ"));
                }
                if self.scenario == Scenario::Cone && self.half_width.is_none() {
                    return Err(ConfigError::new("half_width", "required for the cone scenario"));
                }
            }
            Mode::Lemma4 if self.radius.is_empty() => {
                return Err(ConfigError::new("radius", "required for lemma4"));
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
    fn example_config_is_valid() {
        let cfg = parse_config("mode=eval\nd=2\nm=64\nN=16\npointset=midpoint_grid\nfamily=extremal_eps\neps=0.05")
            .unwrap();
        cfg.validate(Mode::Eval).unwrap();
        assert_eq!(cfg.deltas().unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(cfg.probes, 100);
        assert_eq!(cfg.eps, vec![0.05]);
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(parse_config("d=0").unwrap_err().key, "d");
        assert_eq!(parse_config("unknownkey=1").unwrap_err().key, "unknownkey");
        assert_eq!(parse_config("m=1").unwrap_err().key, "m");
        assert_eq!(parse_config("d=2\nd=3").unwrap_err().key, "d");
        assert_eq!(parse_config("eps=0.1,-2").unwrap_err().key, "eps");
        assert_eq!(parse_config("seed=1\nseeds=2,3").unwrap_err().key, "seeds");
        assert_eq!(parse_config("d=2\ndeltas=0.5,3").unwrap_err().key, "deltas");
        let cfg = parse_config("d=2\nN=4").unwrap();
        assert_eq!(cfg.validate(Mode::Eval).unwrap_err().key, "family");
        assert_eq!(cfg.validate(Mode::Plot).unwrap_err().key, "input");
    }

    #[test]
    fn comments_defaults_and_lists() {
        let cfg = parse_config("# header\n d = 2 # trailing\n\nseeds = 3, 1,2\nsweep_N=4,16").unwrap();
        assert_eq!(cfg.d, Some(2));
        assert_eq!(cfg.m, 64);
        assert_eq!(cfg.seeds, vec![3, 1, 2]);
        assert_eq!(cfg.sweep_n, vec![4, 16]);
        assert_eq!(cfg.pointset, PointSetKind::MidpointGrid);
    }
}
