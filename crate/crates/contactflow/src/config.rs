//! Flat `key = value` configuration with `[section]` headers.
//!
//! No nesting, no quoting: values are numbers, words, or comma-separated
//! lists of numbers. `#` starts a comment. Parse errors carry line numbers.

use contactflow_core::geometry::DomainBoundary;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Raw parsed file: section -> key -> (value, line).
pub struct RawConfig {
    entries: BTreeMap<String, BTreeMap<String, (String, usize)>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig, ConfigError> {
        let mut entries: BTreeMap<String, BTreeMap<String, (String, usize)>> = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') || line.len() < 3 {
                    return Err(ConfigError {
                        line: line_no,
                        message: format!("malformed section header {raw_line:?}"),
                    });
                }
                section = line[1..line.len() - 1].trim().to_string();
                entries.entry(section.clone()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError {
                    line: line_no,
                    message: format!("expected `key = value`, got {raw_line:?}"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError {
                    line: line_no,
                    message: format!("empty key or value in {raw_line:?}"),
                });
            }
            entries
                .entry(section.clone())
                .or_default()
                .insert(key, (value, line_no));
        }
        Ok(RawConfig { entries })
    }

    fn get(&self, section: &str, key: &str) -> Option<&(String, usize)> {
        self.entries.get(section).and_then(|m| m.get(key))
    }

    fn require(&self, section: &str, key: &str) -> Result<&(String, usize), ConfigError> {
        self.get(section, key).ok_or_else(|| ConfigError {
            line: 0,
            message: format!("missing required key `{key}` in section [{section}]"),
        })
    }

    fn f64_val(&self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some((v, line)) => parse_number(v).ok_or_else(|| ConfigError {
                line: *line,
                message: format!("`{key}` must be a number, got {v:?}"),
            }),
        }
    }

    fn usize_val(&self, section: &str, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| ConfigError {
                line: *line,
                message: format!("`{key}` must be an integer, got {v:?}"),
            }),
        }
    }

    fn word(&self, section: &str, key: &str, default: &str) -> String {
        self.get(section, key)
            .map(|(v, _)| v.clone())
            .unwrap_or_else(|| default.to_string())
    }

    fn f64_list(&self, section: &str, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(default.to_vec()),
            Some((v, line)) => v
                .split(',')
                .map(|s| {
                    parse_number(s.trim()).ok_or_else(|| ConfigError {
                        line: *line,
                        message: format!("`{key}` must be a comma-separated number list, got {v:?}"),
                    })
                })
                .collect(),
        }
    }

    fn usize_list(&self, section: &str, key: &str) -> Result<Option<Vec<usize>>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|s| {
                    s.trim().parse().map_err(|_| ConfigError {
                        line: *line,
                        message: format!("`{key}` must be a comma-separated integer list, got {v:?}"),
                    })
                })
                .collect::<Result<Vec<usize>, _>>()
                .map(Some),
        }
    }
}

/// Angles accept plain numbers or the common fractions of pi.
fn parse_number(s: &str) -> Option<f64> {
    match s {
        "pi" => return Some(std::f64::consts::PI),
        "pi/2" => return Some(std::f64::consts::FRAC_PI_2),
        "pi/3" => return Some(std::f64::consts::FRAC_PI_3),
        "pi/4" => return Some(std::f64::consts::FRAC_PI_4),
        "pi/6" => return Some(std::f64::consts::FRAC_PI_6),
        _ => {}
    }
    s.parse().ok()
}

#[derive(Debug, Clone, PartialEq)]
pub enum SigmaKind {
    Special,
    Bump { kappa: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InterfaceKind {
    Diameter,
    Chord { center: f64 },
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub alpha: f64,
    pub sigma: SigmaKind,
    pub domain: DomainBoundary,
    pub interface: InterfaceKind,
    pub interface_nodes: usize,
    /// Ring counts per width; resolved from `eps` when absent.
    pub rings: Option<Vec<usize>>,
    /// PDE time step as a multiple of `eps * h_max`.
    pub tau_factor: f64,
    pub eps: Vec<f64>,
    pub t_end: f64,
    pub seed: u64,
    /// Total checker sample budget.
    pub samples: usize,
    /// Times (fractions of `t_end`) at which functionals are reported.
    pub report_fractions: Vec<f64>,
    /// Profile table half-width and integration step.
    pub profile_r: f64,
    pub profile_h: f64,
    /// Equality/residual tolerances for the calibrate gate.
    pub tol_equality: f64,
    pub tol_angle: f64,
}

impl Config {
    pub fn from_text(text: &str) -> Result<Config, ConfigError> {
        let raw = RawConfig::parse(text)?;
        let (alpha_str, alpha_line) = raw.require("sigma", "alpha")?.clone();
        let alpha = parse_number(&alpha_str).ok_or_else(|| ConfigError {
            line: alpha_line,
            message: format!("`alpha` must be a number or a pi fraction, got {alpha_str:?}"),
        })?;
        if !(alpha > 0.0 && alpha <= std::f64::consts::FRAC_PI_2 + 1e-12) {
            return Err(ConfigError {
                line: alpha_line,
                message: format!("`alpha` must lie in (0, pi/2], got {alpha}"),
            });
        }
        let well_kind = raw.word("well", "kind", "quartic");
        if well_kind != "quartic" {
            return Err(ConfigError {
                line: 0,
                message: format!("unsupported well kind {well_kind:?} (only `quartic`)"),
            });
        }
        let sigma = match raw.word("sigma", "kind", "special").as_str() {
            "special" => SigmaKind::Special,
            "bump" => SigmaKind::Bump {
                kappa: raw.f64_val("sigma", "kappa", 0.1)?,
            },
            other => {
                return Err(ConfigError {
                    line: 0,
                    message: format!("unknown sigma kind {other:?} (special | bump)"),
                })
            }
        };
        let domain = match raw.word("domain", "kind", "disk").as_str() {
            "disk" => DomainBoundary::Circle {
                radius: raw.f64_val("domain", "radius", 1.0)?,
            },
            "ellipse" => DomainBoundary::Ellipse {
                a: raw.f64_val("domain", "a", 1.2)?,
                b: raw.f64_val("domain", "b", 1.0)?,
            },
            other => {
                return Err(ConfigError {
                    line: 0,
                    message: format!("unknown domain kind {other:?} (disk | ellipse)"),
                })
            }
        };
        let interface = match raw.word("interface", "kind", "chord").as_str() {
            "diameter" => InterfaceKind::Diameter,
            "chord" => InterfaceKind::Chord {
                center: raw.f64_val("interface", "d", 1.3)?,
            },
            other => {
                return Err(ConfigError {
                    line: 0,
                    message: format!("unknown interface kind {other:?} (diameter | chord)"),
                })
            }
        };
        Ok(Config {
            alpha,
            sigma,
            domain,
            interface,
            interface_nodes: raw.usize_val("interface", "nodes", 161)?,
            rings: raw.usize_list("solver", "rings")?,
            tau_factor: raw.f64_val("solver", "tau_factor", 1.0)?,
            eps: raw.f64_list("experiment", "eps", &[0.08, 0.04, 0.02])?,
            t_end: raw.f64_val("experiment", "t_end", 0.02)?,
            seed: raw.usize_val("experiment", "seed", 42)? as u64,
            samples: raw.usize_val("experiment", "samples", 10_000)?,
            report_fractions: raw.f64_list("experiment", "report_fractions", &[0.0, 0.25, 0.5, 0.75, 1.0])?,
            profile_r: raw.f64_val("well", "profile_r", 12.0)?,
            profile_h: raw.f64_val("well", "profile_h", 1e-3)?,
            tol_equality: raw.f64_val("experiment", "tol_equality", 1e-6)?,
            tol_angle: raw.f64_val("experiment", "tol_angle", 1e-6)?,
        })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Config, Box<dyn std::error::Error>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Config::from_text(&text)?)
    }

    /// One-line identity string for CSV metadata headers.
    pub fn identity(&self) -> String {
        let sigma = match &self.sigma {
            SigmaKind::Special => "special".to_string(),
            SigmaKind::Bump { kappa } => format!("bump(kappa={kappa})"),
        };
        let domain = match self.domain {
            DomainBoundary::Circle { radius } => format!("disk(r={radius})"),
            DomainBoundary::Ellipse { a, b } => format!("ellipse(a={a},b={b})"),
        };
        let interface = match self.interface {
            InterfaceKind::Diameter => "diameter".to_string(),
            InterfaceKind::Chord { center } => format!("chord(d={center})"),
        };
        format!(
            "well=quartic(W=(1-u^2)^2/2) sigma={sigma} alpha={} domain={domain} interface={interface} nodes={}",
            self.alpha, self.interface_nodes
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "
[well]
kind = quartic

[sigma]
kind = bump
kappa = 0.1
alpha = pi/3

[domain]
kind = disk

[interface]
kind = chord
d = 1.3
nodes = 201

[experiment]
eps = 0.08, 0.04, 0.02
t_end = 0.02
seed = 7
";

    #[test]
    fn parses_complete_config() {
        let cfg = Config::from_text(GOOD).unwrap();
        assert_eq!(cfg.sigma, SigmaKind::Bump { kappa: 0.1 });
        assert!((cfg.alpha - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
        assert_eq!(cfg.interface_nodes, 201);
        assert_eq!(cfg.eps, vec![0.08, 0.04, 0.02]);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn missing_required_key_names_it() {
        let err = Config::from_text("[sigma]\nkind = special\n").unwrap_err();
        assert!(err.message.contains("`alpha`"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = match RawConfig::parse("[sigma]\nalpha pi/3\n") {
            Err(e) => e,
            Ok(_) => panic!("expected parse error"),
        };
        assert_eq!(err.line, 2);
        let err = match RawConfig::parse("[sigma\nalpha = 1\n") {
            Err(e) => e,
            Ok(_) => panic!("expected parse error"),
        };
        assert_eq!(err.line, 1);
    }

    #[test]
    fn rejects_bad_values() {
        let err = Config::from_text("[sigma]\nalpha = two\n").unwrap_err();
        assert!(err.message.contains("alpha"));
        let err = Config::from_text("[sigma]\nalpha = 2.0\n").unwrap_err();
        assert!(err.message.contains("(0, pi/2]"));
    }
}
