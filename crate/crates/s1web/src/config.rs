//! Suite configuration: defaults, a `key = value` file format, and
//! validation.
//!
//! File format: one `key = value` per line, `#` starts a comment. Keys are
//! `t`, `mode`, `samples`, `seed`, `curvature_points`, `sweep` (comma
//! separated parameters, or `none`), `region` (`xmin,xmax,zmin,zmax`),
//! `region_im` (`xim_min,xim_max,zim_min,zim_max`), `control_web`
//! (`true`/`false`), `out`, `plot` (comma separated kinds), `plot_dir`, and
//! `tol.<check>` for each tolerance in [`Tolerances`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use s1web_core::web::Region;
use s1web_core::{c64, C64};
use serde::Serialize;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse complex number {0:?}")]
    BadComplex(String),
    #[error("curve parameter t = {0} is excluded (t must avoid 0 and 1)")]
    ExcludedParameter(String),
    #[error("unknown mode {0:?} (expected numeric, exact or both)")]
    BadMode(String),
    #[error("unknown plot kind {0:?} (expected leaves, web, discriminant or orbits)")]
    BadPlot(String),
    #[error("invalid value {value:?} for {key}")]
    BadValue { key: String, value: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("tolerance {0} must be positive")]
    NonPositiveTolerance(&'static str),
    #[error("region bounds must satisfy min <= max")]
    BadRegion,
    #[error("cannot read config file: {0}")]
    Io(String),
}

/// A curve parameter with the text it was given as.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Param(pub C64);

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (self.0.re, self.0.im);
        if im < 0.0 {
            write!(f, "{re}-{}i", -im)
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

/// Parses `a`, `a+bi`, `a-bi`, `bi`, `i`, with optional exponents.
pub fn parse_complex(s: &str) -> Result<C64, ConfigError> {
    let bad = || ConfigError::BadComplex(s.to_string());
    let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Err(bad());
    }
    let Some(body) = text.strip_suffix('i') else {
        return match text.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(c64(re, 0.0)),
            _ => Err(bad()),
        };
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let coeff = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    if !re.is_finite() || !coeff.is_finite() {
        return Err(bad());
    }
    Ok(c64(re, coeff))
}

impl FromStr for Param {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_complex(s).map(Param)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Numeric,
    Exact,
    Both,
}

impl Mode {
    pub fn numeric(self) -> bool {
        matches!(self, Mode::Numeric | Mode::Both)
    }

    pub fn exact(self) -> bool {
        matches!(self, Mode::Exact | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "numeric" => Ok(Mode::Numeric),
            "exact" => Ok(Mode::Exact),
            "both" => Ok(Mode::Both),
            _ => Err(ConfigError::BadMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Leaves,
    Web,
    Discriminant,
    Orbits,
}

impl PlotKind {
    pub const ALL: [PlotKind; 4] = [PlotKind::Leaves, PlotKind::Web, PlotKind::Discriminant, PlotKind::Orbits];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Leaves => "leaves",
            PlotKind::Web => "web",
            PlotKind::Discriminant => "discriminant",
            PlotKind::Orbits => "orbits",
        }
    }
}

impl FromStr for PlotKind {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| ConfigError::BadPlot(s.to_string()))
    }
}

/// Acceptance tolerances per check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative tolerance of the group-law properties.
    pub group: f64,
    /// `|F - t| / |t|` on discriminant roots.
    pub delta: f64,
    /// `|Z1 + Z2 - 2 Z0|` relative to the slope scale.
    pub harmonic: f64,
    /// `|cross_ratio + 1|`.
    pub cross_ratio: f64,
    /// Graph and curve residuals of the section solver.
    pub solver: f64,
    /// Projective distance of loop monodromy to the group.
    pub monodromy: f64,
    /// F drift per unit path length.
    pub drift: f64,
    /// Relative mismatch of the pulled-back first integral.
    pub pullback: f64,
    /// Residual of the pulled-back second-order equation.
    pub double_star: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            group: 1e-9,
            delta: 1e-8,
            harmonic: 1e-10,
            cross_ratio: 1e-9,
            solver: 1e-9,
            monodromy: 1e-6,
            drift: 1e-8,
            pullback: 1e-8,
            double_star: 1e-6,
        }
    }
}

impl Tolerances {
    fn slot(&mut self, key: &str) -> Option<(&'static str, &mut f64)> {
        Some(match key {
            "group" => ("group", &mut self.group),
            "delta" => ("delta", &mut self.delta),
            "harmonic" => ("harmonic", &mut self.harmonic),
            "cross_ratio" => ("cross_ratio", &mut self.cross_ratio),
            "solver" => ("solver", &mut self.solver),
            "monodromy" => ("monodromy", &mut self.monodromy),
            "drift" => ("drift", &mut self.drift),
            "pullback" => ("pullback", &mut self.pullback),
            "double_star" => ("double_star", &mut self.double_star),
            _ => return None,
        })
    }

    /// Sets `key` from text, for `tol.<key> = value` and `--tol key=value`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let (name, slot) = self.slot(key).ok_or_else(|| ConfigError::UnknownKey(format!("tol.{key}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| ConfigError::BadValue { key: format!("tol.{name}"), value: value.to_string() })?;
        *slot = v;
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let all = [
            ("group", self.group),
            ("delta", self.delta),
            ("harmonic", self.harmonic),
            ("cross_ratio", self.cross_ratio),
            ("solver", self.solver),
            ("monodromy", self.monodromy),
            ("drift", self.drift),
            ("pullback", self.pullback),
            ("double_star", self.double_star),
        ];
        match all.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            Some((k, _)) => Err(ConfigError::NonPositiveTolerance(k)),
            None => Ok(()),
        }
    }
}

/// Sample counts of the seeded checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleCounts {
    pub group_triples: usize,
    pub delta_u: usize,
    pub harmonic_points: usize,
    pub solver_points: usize,
    pub pullback_points: usize,
    pub orbit_points: usize,
    /// Points of the curvature and hexagon sweep at the main parameter.
    pub curvature_points: usize,
    /// Points of the curvature sweep at each additional parameter.
    pub sweep_curvature_points: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self {
            group_triples: 100,
            delta_u: 100,
            harmonic_points: 500,
            solver_points: 500,
            pullback_points: 100,
            orbit_points: 100,
            curvature_points: 50,
            sweep_curvature_points: 10,
        }
    }
}

impl SampleCounts {
    /// Uses `n` for every per-point count except the curvature sweep.
    pub fn uniform(self, n: usize) -> Self {
        Self {
            group_triples: n,
            delta_u: n,
            harmonic_points: n,
            solver_points: n,
            pullback_points: n,
            orbit_points: n,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub t: Param,
    pub mode: Mode,
    pub samples: SampleCounts,
    pub seed: u64,
    pub tol: Tolerances,
    pub region: Region,
    /// Additional parameters swept by every parameter-dependent check.
    pub sweep: Vec<Param>,
    pub control_web: bool,
    pub out: Option<PathBuf>,
    pub plots: Vec<PlotKind>,
    pub plot_dir: PathBuf,
}

/// The fixed sweep set.
pub fn default_sweep() -> Vec<Param> {
    [c64(2.0, 0.0), c64(4.0, 0.0), c64(1.0, 1.0), c64(-3.0, 0.0)].map(Param).to_vec()
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            t: Param(c64(2.0, 0.0)),
            mode: Mode::Both,
            samples: SampleCounts::default(),
            seed: 0,
            tol: Tolerances::default(),
            region: Region::default(),
            sweep: default_sweep(),
            control_web: false,
            out: None,
            plots: Vec::new(),
            plot_dir: PathBuf::from("."),
        }
    }
}

fn parse_list<T: FromStr<Err = ConfigError>>(value: &str) -> Result<Vec<T>, ConfigError> {
    if value.trim() == "none" || value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| v.trim().parse()).collect()
}

fn parse_quad(key: &str, value: &str) -> Result<[f64; 4], ConfigError> {
    let bad = || ConfigError::BadValue { key: key.to_string(), value: value.to_string() };
    let parts: Vec<f64> = value.split(',').map(|v| v.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    parts.try_into().map_err(|_| bad())
}

/// `xmin,xmax,zmin,zmax` for the real parts of the sampling box.
pub fn parse_region(value: &str, mut base: Region) -> Result<Region, ConfigError> {
    let [a, b, c, d] = parse_quad("region", value)?;
    base.x_re = (a, b);
    base.z_re = (c, d);
    Ok(base)
}

fn parse_region_im(value: &str, mut base: Region) -> Result<Region, ConfigError> {
    let [a, b, c, d] = parse_quad("region_im", value)?;
    base.x_im = (a, b);
    base.z_im = (c, d);
    Ok(base)
}

fn parse_count(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue { key: key.to_string(), value: value.to_string() })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::BadValue { key: key.to_string(), value: value.to_string() }),
    }
}

impl SuiteConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key.trim() {
            "t" => self.t = value.parse()?,
            "mode" => self.mode = value.parse()?,
            "samples" => self.samples = self.samples.uniform(parse_count("samples", value)?),
            "curvature_points" => self.samples.curvature_points = parse_count("curvature_points", value)?,
            "sweep_curvature_points" => {
                self.samples.sweep_curvature_points = parse_count("sweep_curvature_points", value)?
            }
            "seed" => self.seed = parse_count("seed", value)? as u64,
            "sweep" => self.sweep = parse_list(value)?,
            "region" => self.region = parse_region(value, self.region)?,
            "region_im" => self.region = parse_region_im(value, self.region)?,
            "control_web" => self.control_web = parse_bool("control_web", value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "plot" => self.plots = parse_list(value)?,
            "plot_dir" => self.plot_dir = PathBuf::from(value),
            k => match k.strip_prefix("tol.") {
                Some(name) => self.tol.set(name, value)?,
                None => return Err(ConfigError::UnknownKey(k.to_string())),
            },
        }
        Ok(())
    }

    /// Applies the settings of a config file body.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for p in std::iter::once(&self.t).chain(self.sweep.iter()) {
            if p.0.norm() < 1e-12 || (p.0 - 1.0).norm() < 1e-12 {
                return Err(ConfigError::ExcludedParameter(p.to_string()));
            }
        }
        let s = &self.samples;
        for (name, n) in [
            ("group_triples", s.group_triples),
            ("delta_u", s.delta_u),
            ("harmonic_points", s.harmonic_points),
            ("solver_points", s.solver_points),
            ("pullback_points", s.pullback_points),
            ("orbit_points", s.orbit_points),
            ("curvature_points", s.curvature_points),
            ("sweep_curvature_points", s.sweep_curvature_points),
        ] {
            if n == 0 {
                return Err(ConfigError::ZeroCount(name));
            }
        }
        self.tol.validate()?;
        let r = &self.region;
        if [r.x_re, r.z_re, r.x_im, r.z_im].iter().any(|(a, b)| !(a <= b)) {
            return Err(ConfigError::BadRegion);
        }
        Ok(())
    }

    /// The main parameter followed by the sweep, without repetitions.
    pub fn parameters(&self) -> Vec<Param> {
        let mut out = vec![self.t];
        for p in &self.sweep {
            if !out.iter().any(|q| (q.0 - p.0).norm() < 1e-15) {
                out.push(*p);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("2+0i").unwrap(), c64(2.0, 0.0));
        assert_eq!(parse_complex("1+i").unwrap(), c64(1.0, 1.0));
        assert_eq!(parse_complex("-3").unwrap(), c64(-3.0, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), c64(0.0, -1.0));
        assert_eq!(parse_complex("2.5e-1-0.5i").unwrap(), c64(0.25, -0.5));
        assert_eq!(parse_complex("1e+1+2e-1i").unwrap(), c64(10.0, 0.2));
        assert!(parse_complex("2+").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("nan").is_err());
        assert!(parse_complex("1+infi").is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["2+0i", "1-1i", "-3+0.5i"] {
            let p: Param = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
    }

    #[test]
    fn excluded_parameters() {
        let mut c = SuiteConfig::default();
        c.set("t", "1+0i").unwrap();
        assert!(matches!(c.validate(), Err(ConfigError::ExcludedParameter(_))));
        c.set("t", "0").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn file_overrides_defaults() {
        let mut c = SuiteConfig::default();
        c.apply_file("# demo\nt = 1+i\nmode = exact\nsamples = 7\nseed = 3 # trailing\ntol.harmonic = 1e-9\nregion = 0,1,-1,1\nsweep = none\nplot = web,orbits\n")
            .unwrap();
        assert_eq!(c.t.0, c64(1.0, 1.0));
        assert_eq!(c.mode, Mode::Exact);
        assert_eq!(c.samples.solver_points, 7);
        assert_eq!(c.samples.curvature_points, 50);
        assert_eq!(c.seed, 3);
        assert_eq!(c.tol.harmonic, 1e-9);
        assert_eq!(c.region.x_re, (0.0, 1.0));
        assert!(c.sweep.is_empty());
        assert_eq!(c.plots, vec![PlotKind::Web, PlotKind::Orbits]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn bad_settings() {
        let mut c = SuiteConfig::default();
        assert!(matches!(c.apply_file("nonsense"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(c.set("colour", "red"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(c.set("tol.harmonic", "x"), Err(ConfigError::BadValue { .. })));
        c.set("tol.harmonic", "-1").unwrap();
        assert!(matches!(c.validate(), Err(ConfigError::NonPositiveTolerance("harmonic"))));
        let mut c = SuiteConfig::default();
        c.set("samples", "0").unwrap();
        assert!(matches!(c.validate(), Err(ConfigError::ZeroCount(_))));
        let mut c = SuiteConfig::default();
        c.set("region", "1,0,0,1").unwrap();
        assert_eq!(c.validate(), Err(ConfigError::BadRegion));
    }

    #[test]
    fn parameters_deduplicate() {
        let c = SuiteConfig::default();
        assert_eq!(c.parameters().len(), 4);
    }
}
