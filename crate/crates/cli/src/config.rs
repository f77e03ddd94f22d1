//! Run configuration: an INI-style file (`[section]` headers, `key = value`
//! lines, `#` or `;` comments, also after whitespace at the end of a line)
//! overlaid with `--section.key=value` flags.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Geometry {
    pub sigma_over_lambda: f64,
    pub l_over_sigma: f64,
    /// Transverse separation `R = D/σ`.
    pub separation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Dipole,
    DipoleSimplified,
    ContactRegularized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Aligned,
    Anisotropic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interaction {
    pub kind: Kind,
    pub model: Model,
    /// Field direction for the anisotropic dipole.
    pub orientation: [f64; 3],
    /// `g` for the dipole kinds, `u` for the contact kind.
    pub g: Option<f64>,
    /// Solve for the strength giving `|φ|` equal to this instead.
    pub target_phase: Option<f64>,
    pub epsilon_over_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Numerics {
    pub tol: f64,
    pub phase_tol: f64,
    /// First Gauss-Hermite order of the longitudinal pass.
    pub quad_order: usize,
    pub max_order: usize,
    pub grid: [usize; 3],
    pub extent: [f64; 3],
    pub steps: usize,
    pub diffraction: bool,
    pub diffraction_coefficient: f64,
    pub clamp: Option<f64>,
    pub alias_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub g_min: f64,
    pub g_max: f64,
    pub points: usize,
    pub separations: Vec<f64>,
    pub initial_guess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseGrid {
    pub z_min: f64,
    pub z_max: f64,
    pub nz: usize,
    pub rho_min: f64,
    pub rho_max: f64,
    pub nrho: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Output {
    /// Main result file; `-` writes to standard output.
    pub path: String,
    /// SVG plot for `sweep` and `tradeoff`; empty for none.
    pub svg: String,
    /// Binary `|ξ|²` dump of the propagated state; empty for none.
    pub dump: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Validate {
    /// Criterion ids; empty runs all of them.
    pub criteria: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub interaction: Interaction,
    pub numerics: Numerics,
    pub sweep: Sweep,
    pub phase_field: PhaseGrid,
    pub output: Output,
    pub validate: Validate,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: Geometry {
                sigma_over_lambda: 10.0,
                l_over_sigma: 4.0 * PI,
                separation: 0.0,
            },
            interaction: Interaction {
                kind: Kind::Dipole,
                model: Model::Aligned,
                orientation: [1.0, 0.0, 0.0],
                g: None,
                target_phase: None,
                epsilon_over_sigma: 0.1,
            },
            numerics: Numerics {
                tol: 1e-10,
                phase_tol: 1e-9,
                quad_order: 32,
                max_order: 12,
                grid: [64, 64, 32],
                extent: [10.0, 10.0, 12.0],
                steps: 256,
                diffraction: true,
                diffraction_coefficient: 0.5,
                clamp: Some(PI / 4.0),
                alias_tol: 0.05,
            },
            sweep: Sweep {
                g_min: 1e-3,
                g_max: 8.0,
                points: 40,
                separations: vec![5.0, 10.0, 15.0, 20.0, 26.0, 40.0, 60.0, 79.0],
                initial_guess: 1.0,
            },
            phase_field: PhaseGrid {
                z_min: -4.0 * PI,
                z_max: 12.0 * PI,
                nz: 65,
                rho_min: 0.25,
                rho_max: 6.0,
                nrho: 24,
            },
            output: Output {
                path: "-".into(),
                svg: String::new(),
                dump: String::new(),
            },
            validate: Validate { criteria: Vec::new() },
        }
    }
}

/// Reads a real number; accepts multiples and fractions of `pi` such as
/// `pi`, `-pi/2`, `4pi`, `4*pi`, `3pi/4`.
pub fn parse_real(s: &str) -> Result<f64, ConfigError> {
    let t = s.trim().to_ascii_lowercase();
    let Some(at) = t.find("pi") else {
        return match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => err(format!("not a finite number: {s:?}")),
        };
    };
    let coeff = t[..at].trim().trim_end_matches('*').trim();
    let coeff = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| ConfigError(format!("bad multiple of pi: {s:?}")))?,
    };
    let rest = t[at + 2..].trim();
    let div = if rest.is_empty() {
        1.0
    } else if let Some(d) = rest.strip_prefix('/') {
        d.trim().parse::<f64>().map_err(|_| ConfigError(format!("bad divisor: {s:?}")))?
    } else {
        return err(format!("unexpected {rest:?} after pi in {s:?}"));
    };
    if div == 0.0 {
        return err(format!("division by zero in {s:?}"));
    }
    Ok(coeff * PI / div)
}

fn parse_usize(s: &str) -> Result<usize, ConfigError> {
    s.trim().parse().map_err(|_| ConfigError(format!("not a non-negative integer: {s:?}")))
}

fn parse_bool(s: &str) -> Result<bool, ConfigError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => err(format!("not a boolean: {s:?}")),
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(item).collect()
}

fn parse_array<T: Copy + Default, const N: usize>(
    s: &str,
    item: impl Fn(&str) -> Result<T, ConfigError>,
) -> Result<[T; N], ConfigError> {
    let v = parse_list(s, item)?;
    if v.len() != N {
        return err(format!("expected {N} comma-separated values, got {s:?}"));
    }
    let mut out = [T::default(); N];
    out.copy_from_slice(&v);
    Ok(out)
}

fn parse_optional_real(s: &str) -> Result<Option<f64>, ConfigError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "" | "none" => Ok(None),
        _ => parse_real(s).map(Some),
    }
}

impl RunConfig {
    /// Sets one `section.key`.
    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match (section, key) {
            ("geometry", "sigma_over_lambda") => self.geometry.sigma_over_lambda = parse_real(v)?,
            ("geometry", "l_over_sigma") => self.geometry.l_over_sigma = parse_real(v)?,
            ("geometry", "separation" | "r") => self.geometry.separation = parse_real(v)?,

            ("interaction", "kind") => {
                self.interaction.kind = match v {
                    "dipole" => Kind::Dipole,
                    "dipole-simplified" => Kind::DipoleSimplified,
                    "contact-regularized" => Kind::ContactRegularized,
                    _ => return err(format!("unknown interaction kind {v:?}")),
                }
            }
            ("interaction", "model") => {
                self.interaction.model = match v {
                    "aligned" => Model::Aligned,
                    "anisotropic" => Model::Anisotropic,
                    _ => return err(format!("unknown dipole model {v:?}")),
                }
            }
            ("interaction", "orientation") => self.interaction.orientation = parse_array(v, parse_real)?,
            ("interaction", "g" | "u") => self.interaction.g = parse_optional_real(v)?,
            ("interaction", "target_phase") => self.interaction.target_phase = parse_optional_real(v)?,
            ("interaction", "epsilon_over_sigma") => self.interaction.epsilon_over_sigma = parse_real(v)?,

            ("numerics", "tol") => self.numerics.tol = parse_real(v)?,
            ("numerics", "phase_tol") => self.numerics.phase_tol = parse_real(v)?,
            ("numerics", "quad_order") => self.numerics.quad_order = parse_usize(v)?,
            ("numerics", "max_order") => self.numerics.max_order = parse_usize(v)?,
            ("numerics", "grid") => self.numerics.grid = parse_array(v, parse_usize)?,
            ("numerics", "extent") => self.numerics.extent = parse_array(v, parse_real)?,
            ("numerics", "steps") => self.numerics.steps = parse_usize(v)?,
            ("numerics", "diffraction") => self.numerics.diffraction = parse_bool(v)?,
            ("numerics", "diffraction_coefficient") => self.numerics.diffraction_coefficient = parse_real(v)?,
            ("numerics", "clamp") => self.numerics.clamp = parse_optional_real(v)?,
            ("numerics", "alias_tol") => self.numerics.alias_tol = parse_real(v)?,

            ("sweep", "g_min") => self.sweep.g_min = parse_real(v)?,
            ("sweep", "g_max") => self.sweep.g_max = parse_real(v)?,
            ("sweep", "points") => self.sweep.points = parse_usize(v)?,
            ("sweep", "separations") => self.sweep.separations = parse_list(v, parse_real)?,
            ("sweep", "initial_guess") => self.sweep.initial_guess = parse_real(v)?,

            ("phase_field", "z_min") => self.phase_field.z_min = parse_real(v)?,
            ("phase_field", "z_max") => self.phase_field.z_max = parse_real(v)?,
            ("phase_field", "nz") => self.phase_field.nz = parse_usize(v)?,
            ("phase_field", "rho_min") => self.phase_field.rho_min = parse_real(v)?,
            ("phase_field", "rho_max") => self.phase_field.rho_max = parse_real(v)?,
            ("phase_field", "nrho") => self.phase_field.nrho = parse_usize(v)?,

            ("output", "path") => self.output.path = v.to_string(),
            ("output", "svg") => self.output.svg = v.to_string(),
            ("output", "dump") => self.output.dump = v.to_string(),

            ("validate", "criteria") => {
                self.validate.criteria = parse_list(v, |s| {
                    s.trim().parse::<u8>().map_err(|_| ConfigError(format!("bad criterion id {s:?}")))
                })?
            }
            _ => return err(format!("unknown setting {section}.{key}")),
        }
        Ok(())
    }

    /// Applies an INI document on top of the current values.
    pub fn apply_ini(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let at = |e: ConfigError| ConfigError(format!("line {}: {e}", i + 1));
            if let Some(name) = line.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return Err(at(ConfigError(format!("unterminated section header {line:?}"))));
                };
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(at(ConfigError(format!("expected key = value, got {line:?}"))));
            };
            if section.is_empty() {
                return Err(at(ConfigError("setting outside any [section]".into())));
            }
            self.set(&section, key.trim(), value).map_err(at)?;
        }
        Ok(())
    }

    /// Applies one `section.key=value` override (leading dashes optional).
    pub fn apply_override(&mut self, arg: &str) -> Result<(), ConfigError> {
        let body = arg.trim_start_matches('-');
        let Some((path, value)) = body.split_once('=') else {
            return err(format!("override {arg:?} must look like --section.key=value"));
        };
        let Some((section, key)) = path.split_once('.') else {
            return err(format!("override {arg:?} must name a section, as in --numerics.tol=1e-8"));
        };
        self.set(section, key, value)
    }

    /// Flattened `section.key = value` lines, in declaration order.
    pub fn lines(&self) -> Vec<String> {
        let value = serde_json::to_value(self).expect("config serializes");
        let mut out = Vec::new();
        if let serde_json::Value::Object(sections) = value {
            for (name, body) in sections {
                if let serde_json::Value::Object(keys) = body {
                    for (k, v) in keys {
                        out.push(format!("{name}.{k} = {v}"));
                    }
                }
            }
        }
        out
    }
}

fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    let cut = (0..bytes.len()).find(|&i| {
        (bytes[i] == b'#' || bytes[i] == b';') && (i == 0 || bytes[i - 1].is_ascii_whitespace())
    });
    cut.map_or(line, |i| &line[..i])
}

/// True for argv entries that are config overrides rather than flags.
pub fn is_override(arg: &str) -> bool {
    arg.starts_with("--")
        && arg
            .split_once('=')
            .is_some_and(|(path, _)| path.trim_start_matches('-').contains('.'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_expressions() {
        for (s, v) in [
            ("pi", PI),
            ("-pi/2", -PI / 2.0),
            ("4pi", 4.0 * PI),
            ("4*pi", 4.0 * PI),
            ("3pi/4", 0.75 * PI),
            ("2.5", 2.5),
            ("1e-3", 1e-3),
        ] {
            assert_eq!(parse_real(s).unwrap(), v, "{s}");
        }
        for bad in ["pi2", "x", "pi/0", "nan", "inf"] {
            assert!(parse_real(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ini_and_overrides() {
        let mut c = RunConfig::default();
        c.apply_ini(
            "# reference run\n[geometry]\nseparation = 26   ; R\n\n[interaction]\ntarget_phase = pi # radians\n; note\n[numerics]\ngrid = 32, 32, 16\n",
        )
        .unwrap();
        c.apply_override("--numerics.tol=1e-8").unwrap();
        assert_eq!(c.geometry.separation, 26.0);
        assert_eq!(c.interaction.target_phase, Some(PI));
        assert_eq!(c.numerics.grid, [32, 32, 16]);
        assert_eq!(c.numerics.tol, 1e-8);
        assert_eq!(c.geometry.l_over_sigma, 4.0 * PI);
    }

    #[test]
    fn errors_name_the_line() {
        let mut c = RunConfig::default();
        let e = c.apply_ini("[geometry]\nseparation = 1\nbogus = 2\n").unwrap_err();
        assert!(e.0.starts_with("line 3"), "{e}");
        assert!(c.apply_ini("tol = 1").is_err());
        assert!(c.apply_override("--tol=1").is_err());
    }

    #[test]
    fn override_detection() {
        assert!(is_override("--numerics.tol=1e-8"));
        assert!(!is_override("--config=a.ini"));
        assert!(!is_override("--config"));
    }
}
