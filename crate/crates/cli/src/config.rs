//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment; lists are comma separated.
//! Values set on the command line replace those from the file. Lengths are in
//! meters and angular frequencies in rad/s unless a unit flag rescales them.

use std::collections::BTreeMap;
use std::fmt;

use acasimir::acoustics::{
    design_bandwidth, AcousticEnvironment, Bandwidth, DomainMode, SignConvention,
};
use acasimir::mems::LumpedDevice;
use acasimir::Tolerance;
use serde::Serialize;

const FREQUENCY_KEYS: [&str; 2] = ["omega1", "omega2"];
const KNOWN_KEYS: [&str; 24] = [
    "k_spring",
    "D",
    "A",
    "c",
    "intensity",
    "r",
    "r1",
    "r2",
    "omega1",
    "omega2",
    "L_target",
    "n",
    "rel_width",
    "L_min",
    "L_max",
    "n_points",
    "spacing",
    "voltages",
    "lambda2",
    "L_tilde_min",
    "L_tilde_max",
    "tol_rel",
    "tol_abs",
    "max_evals",
];
const MODE_KEYS: [&str; 3] = ["domain_mode", "sign_convention", "out_dir"];

/// A configuration problem, tied to the offending key where there is one.
#[derive(Debug)]
pub struct ConfigError {
    pub key: Option<String>,
    pub origin: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(key: &str, origin: &str, message: impl Into<String>) -> Self {
        Self {
            key: Some(key.to_string()),
            origin: Some(origin.to_string()),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self {
            key: None,
            origin: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.key, &self.origin) {
            (Some(k), Some(o)) => write!(f, "{k} ({o}): {}", self.message),
            (Some(k), None) => write!(f, "{k}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    origin: String,
}

/// Unresolved key/value pairs, remembering where each came from.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str, source: &str) -> Result<Self, ConfigError> {
        let mut raw = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let origin = format!("{source}:{}", i + 1);
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError {
                    key: None,
                    origin: Some(origin),
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            raw.set(key.trim(), value.trim(), &origin)?;
        }
        Ok(raw)
    }

    /// Applies a `key=value` override from the command line.
    pub fn apply_override(&mut self, item: &str) -> Result<(), ConfigError> {
        let Some((key, value)) = item.split_once('=') else {
            return Err(ConfigError::general(format!(
                "override `{item}` is not `key=value`"
            )));
        };
        self.set(key.trim(), value.trim(), "--set")
    }

    fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<(), ConfigError> {
        if !KNOWN_KEYS.contains(&key) && !MODE_KEYS.contains(&key) {
            return Err(ConfigError::at(key, origin, "unknown key"));
        }
        if value.is_empty() {
            return Err(ConfigError::at(key, origin, "empty value"));
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                origin: origin.to_string(),
            },
        );
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn origin(&self, key: &str) -> &str {
        self.entries
            .get(key)
            .map_or("default", |e| e.origin.as_str())
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::at(key, self.origin(key), message)
    }

    fn number(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_number(v)
                .ok_or_else(|| self.err(key, format!("`{v}` is not a finite number"))),
        }
    }

    fn opt_number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key).map(|_| self.number(key, 0.0)).transpose()
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| self.err(key, format!("`{v}` is not a non-negative integer"))),
        }
    }

    fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    let s = s.trim();
                    parse_number(s)
                        .ok_or_else(|| self.err(key, format!("`{s}` is not a finite number")))
                })
                .collect(),
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Powers of ten relating the numbers in the config to SI: lengths are
/// divided by `length_divisor`, frequencies multiplied by `frequency_factor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Units {
    pub length_divisor: f64,
    pub frequency_factor: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            length_divisor: 1.0,
            frequency_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeviceConfig {
    pub k_spring: f64,
    #[serde(rename = "D")]
    pub rest_gap: f64,
    #[serde(rename = "A")]
    pub area: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnvironmentConfig {
    pub c: f64,
    pub intensity: f64,
    pub r1: f64,
    pub r2: f64,
    pub r_product: f64,
    pub domain_mode: DomainMode,
    pub sign_convention: SignConvention,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DesignTarget {
    #[serde(rename = "L_target")]
    pub target_gap: f64,
    pub n: usize,
    pub rel_width: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandConfig {
    pub omega1: f64,
    pub omega2: f64,
    pub design: Option<DesignTarget>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepConfig {
    #[serde(rename = "L_min")]
    pub gap_min: f64,
    #[serde(rename = "L_max")]
    pub gap_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
    #[serde(rename = "L_tilde_min")]
    pub l_tilde_min: f64,
    #[serde(rename = "L_tilde_max")]
    pub l_tilde_max: f64,
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub device: DeviceConfig,
    pub environment: EnvironmentConfig,
    pub band: BandConfig,
    pub sweep: SweepConfig,
    pub voltages: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub tolerance: Tolerance,
    pub units: Units,
}

fn check(ok: bool, raw: &RawConfig, key: &str, message: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(raw.err(key, message))
    }
}

impl RunConfig {
    pub fn resolve(raw: &RawConfig, units: Units) -> Result<Self, ConfigError> {
        let length = |key: &str, default: f64| -> Result<f64, ConfigError> {
            Ok(raw
                .opt_number(key)?
                .map_or(default, |v| v / units.length_divisor))
        };

        let defaults = LumpedDevice::default();
        let k_spring = raw.number("k_spring", defaults.k_spring())?;
        let rest_gap = length("D", defaults.rest_gap())?;
        let area = raw.number("A", defaults.area())?;
        check(k_spring > 0.0, raw, "k_spring", "must be positive")?;
        check(rest_gap > 0.0, raw, "D", "must be positive")?;
        check(area > 0.0, raw, "A", "must be positive")?;

        let env_defaults = AcousticEnvironment::default();
        let c = raw.number("c", env_defaults.c())?;
        let intensity = raw.number("intensity", env_defaults.intensity())?;
        check(c > 0.0, raw, "c", "must be positive")?;
        check(intensity >= 0.0, raw, "intensity", "must be non-negative")?;
        let (r1, r2) = match (
            raw.opt_number("r")?,
            raw.opt_number("r1")?,
            raw.opt_number("r2")?,
        ) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(raw.err(
                    "r",
                    "give either `r` (the product r1*r2) or `r1`/`r2`, not both",
                ))
            }
            (Some(r), None, None) => {
                check(
                    (0.0..1.0).contains(&r),
                    raw,
                    "r",
                    "reflectivity product must lie in [0, 1)",
                )?;
                (r.sqrt(), r.sqrt())
            }
            (None, r1, r2) => (
                r1.unwrap_or(env_defaults.r1()),
                r2.unwrap_or(env_defaults.r2()),
            ),
        };
        check((0.0..1.0).contains(&r1), raw, "r1", "must lie in [0, 1)")?;
        check((0.0..1.0).contains(&r2), raw, "r2", "must lie in [0, 1)")?;
        let domain_mode = match raw.get("domain_mode") {
            None | Some("printed") => DomainMode::Printed,
            Some("annulus") => DomainMode::Annulus,
            Some(other) => {
                return Err(raw.err(
                    "domain_mode",
                    format!("`{other}` is not `printed` or `annulus`"),
                ))
            }
        };
        let sign_convention = match raw.get("sign_convention") {
            None | Some("resonance_repulsive") => SignConvention::ResonanceRepulsive,
            Some("printed") => SignConvention::Printed,
            Some(other) => {
                return Err(raw.err(
                    "sign_convention",
                    format!("`{other}` is not `resonance_repulsive` or `printed`"),
                ))
            }
        };

        let band = resolve_band(raw, units, c)?;

        let n_points = raw.count("n_points", 200)?;
        check(n_points >= 2, raw, "n_points", "must be at least 2")?;
        let (default_lo, default_hi) = match band.design {
            Some(d) => (d.target_gap / 8.0, 3.75 * d.target_gap),
            None => (5e-6, 150e-6),
        };
        let gap_min = length("L_min", default_lo)?;
        let gap_max = length("L_max", default_hi)?;
        check(gap_min > 0.0, raw, "L_min", "must be positive")?;
        check(gap_min < gap_max, raw, "L_max", "must exceed L_min")?;
        let spacing = match raw.get("spacing") {
            None | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => {
                return Err(raw.err("spacing", format!("`{other}` is not `linear` or `log`")))
            }
        };
        let l_tilde_min = raw.number("L_tilde_min", 0.01)?;
        let l_tilde_max = raw.number("L_tilde_max", 1.0)?;
        check(l_tilde_min > 0.0, raw, "L_tilde_min", "must be positive")?;
        check(l_tilde_max <= 1.0, raw, "L_tilde_max", "must not exceed 1")?;
        check(
            l_tilde_min < l_tilde_max,
            raw,
            "L_tilde_max",
            "must exceed L_tilde_min",
        )?;

        let voltages = raw.list("voltages", &[3.0, 6.0])?;
        check(
            voltages.iter().all(|&v| v >= 0.0),
            raw,
            "voltages",
            "must be non-negative",
        )?;
        let lambda2 = raw.list("lambda2", &[0.2, 0.015, 0.005, 0.0])?;
        check(
            lambda2.iter().all(|&v| v >= 0.0),
            raw,
            "lambda2",
            "must be non-negative",
        )?;

        let tol_defaults = Tolerance::default();
        let tolerance = Tolerance::new(
            raw.number("tol_rel", tol_defaults.rel)?,
            raw.number("tol_abs", tol_defaults.abs)?,
            raw.count("max_evals", tol_defaults.max_evals)?,
        )
        .map_err(|e| {
            let key = ["tol_rel", "tol_abs", "max_evals"]
                .into_iter()
                .find(|k| raw.has(k))
                .unwrap_or("tol_rel");
            raw.err(key, e.to_string())
        })?;

        Ok(Self {
            device: DeviceConfig {
                k_spring,
                rest_gap,
                area,
            },
            environment: EnvironmentConfig {
                c,
                intensity,
                r1,
                r2,
                r_product: r1 * r2,
                domain_mode,
                sign_convention,
            },
            band,
            sweep: SweepConfig {
                gap_min,
                gap_max,
                n_points,
                spacing,
                l_tilde_min,
                l_tilde_max,
            },
            voltages,
            lambda2,
            tolerance,
            units,
        })
    }

    pub fn device(&self) -> LumpedDevice {
        let d = &self.device;
        LumpedDevice::new(d.k_spring, d.rest_gap, d.area).expect("validated device")
    }

    pub fn environment(&self) -> AcousticEnvironment {
        let e = &self.environment;
        AcousticEnvironment::new(e.c, e.intensity, e.r1, e.r2)
            .expect("validated environment")
            .with_domain(e.domain_mode)
            .with_sign(e.sign_convention)
    }

    pub fn bandwidth(&self) -> Bandwidth {
        Bandwidth::new(self.band.omega1, self.band.omega2).expect("validated band")
    }

    /// Separations of the pressure sweeps, m, strictly increasing.
    pub fn gaps(&self) -> Vec<f64> {
        let s = &self.sweep;
        grid(s.gap_min, s.gap_max, s.n_points, s.spacing)
    }

    /// Gap fractions of the bifurcation and pull-in grids.
    pub fn l_tilde_grid(&self) -> Vec<f64> {
        let s = &self.sweep;
        grid(s.l_tilde_min, s.l_tilde_max, s.n_points, Spacing::Linear)
    }
}

fn resolve_band(raw: &RawConfig, units: Units, c: f64) -> Result<BandConfig, ConfigError> {
    let freq = |key: &str| -> Result<Option<f64>, ConfigError> {
        Ok(raw.opt_number(key)?.map(|w| w * units.frequency_factor))
    };
    let design_keys = ["L_target", "n", "rel_width"];
    let designed = design_keys.iter().any(|k| raw.has(k));
    let explicit = FREQUENCY_KEYS.iter().any(|k| raw.has(k));
    if designed && explicit {
        let key = if raw.has("omega1") {
            "omega1"
        } else {
            "omega2"
        };
        return Err(raw.err(
            key,
            "band given both explicitly and through L_target/n/rel_width",
        ));
    }
    if designed {
        let target_gap = raw
            .opt_number("L_target")?
            .ok_or_else(|| ConfigError::general("L_target: required when n or rel_width is set"))?
            / units.length_divisor;
        let n = raw.count("n", 1)?;
        let rel_width = raw.number("rel_width", 0.075)?;
        check(target_gap > 0.0, raw, "L_target", "must be positive")?;
        check(n >= 1, raw, "n", "must be at least 1")?;
        check(
            rel_width > 0.0 && rel_width < 1.0,
            raw,
            "rel_width",
            "must lie in (0, 1)",
        )?;
        let band = design_bandwidth(target_gap, n, c, rel_width)
            .map_err(|e| raw.err("L_target", e.to_string()))?;
        return Ok(BandConfig {
            omega1: band.omega1(),
            omega2: band.omega2(),
            design: Some(DesignTarget {
                target_gap,
                n,
                rel_width,
            }),
        });
    }
    let omega1 = freq("omega1")?.unwrap_or(9e7);
    let omega2 = freq("omega2")?.unwrap_or(1e8);
    check(omega1 > 0.0, raw, "omega1", "must be positive")?;
    check(omega1 < omega2, raw, "omega2", "must exceed omega1")?;
    Ok(BandConfig {
        omega1,
        omega2,
        design: None,
    })
}

fn grid(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    let last = n - 1;
    (0..n)
        .map(|i| {
            if i == last {
                return hi;
            }
            let t = i as f64 / last as f64;
            match spacing {
                Spacing::Linear => lo + (hi - lo) * t,
                Spacing::Log => lo * (hi / lo).powf(t),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::resolve(&RawConfig::parse(text, "test")?, Units::default())
    }

    #[test]
    fn defaults_resolve() {
        let cfg = resolve("").unwrap();
        assert_eq!(cfg.band.omega1, 9e7);
        assert!((cfg.environment.r_product - 0.8).abs() < 1e-15);
        assert_eq!(cfg.gaps().len(), 200);
        assert_eq!(*cfg.gaps().last().unwrap(), 150e-6);
    }

    #[test]
    fn comments_lists_and_errors() {
        let cfg = resolve("# header\nvoltages = 3, 6, 9 # volts\nr = 0.64\n").unwrap();
        assert_eq!(cfg.voltages, vec![3.0, 6.0, 9.0]);
        assert!((cfg.environment.r1 - 0.8).abs() < 1e-15);
        let e = resolve("L_min = 2e-4\n").unwrap_err();
        assert_eq!(e.key.as_deref(), Some("L_max"));
        let e = resolve("bogus = 1").unwrap_err();
        assert_eq!(e.origin.as_deref(), Some("test:1"));
        assert!(resolve("n_points = 1").is_err());
        assert!(resolve("r = 0.5\nr1 = 0.5").is_err());
        assert!(resolve("omega1 = 1e8\nomega2 = 9e7").is_err());
        assert!(resolve("domain_mode = disk").is_err());
        assert!(resolve("L_target = 4e-5\nomega1 = 1e7").is_err());
        assert!(resolve("tol_rel = 0").is_err());
        assert!(resolve("no equals sign").is_err());
    }

    #[test]
    fn override_wins_and_units_scale() {
        let mut raw =
            RawConfig::parse("L_min = 5\nL_max = 150\nomega1 = 90\nomega2 = 100", "t").unwrap();
        raw.apply_override("L_max=60").unwrap();
        let cfg = RunConfig::resolve(
            &raw,
            Units {
                length_divisor: 1e6,
                frequency_factor: 1e6,
            },
        )
        .unwrap();
        assert_eq!(cfg.sweep.gap_max, 60e-6);
        assert_eq!(cfg.band.omega1, 9e7);
        assert!(raw.apply_override("novalue").is_err());
    }

    #[test]
    fn design_target_sets_band_and_range() {
        let cfg = resolve("L_target = 4e-5\nn = 1\nrel_width = 0.075").unwrap();
        assert!((cfg.band.omega1 - 2.67035e7).abs() < 1e2);
        assert!((cfg.sweep.gap_min - 5e-6).abs() < 1e-18);
        assert!((cfg.sweep.gap_max - 150e-6).abs() < 1e-18);
    }

    #[test]
    fn log_grid_is_increasing() {
        let g = grid(1e-6, 1e-4, 5, Spacing::Log);
        assert!((g[2] - 1e-5).abs() < 1e-18);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
