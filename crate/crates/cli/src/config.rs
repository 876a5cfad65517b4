//! Run configuration: a flat `key = value` text file.
//!
//! Unknown keys are errors, not warnings; so are duplicates. Every numeric
//! field must be finite and positive. Missing keys fall back to the
//! defaults below (the scan defaults are the β₀ = 5, ħω = 1, γ = 0.1
//! parameter set).

use num_complex::Complex;
use qrelax::cmat::CMat;
use qrelax::error::{Error, Result};
use qrelax::hilbert::{BathSpec, InverseTemperature};
use qrelax::liouvillian::System;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaFormChoice {
    Definitional,
    Paper,
    Both,
}

impl SigmaFormChoice {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "definitional" => Ok(Self::Definitional),
            "paper" => Ok(Self::Paper),
            "both" => Ok(Self::Both),
            other => Err(Error::Config(format!(
                "sigma_form must be definitional|paper|both, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SystemChoice {
    Qubit,
    Oscillator(usize),
    Custom,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: SystemChoice,
    pub omega: f64,
    pub gamma: f64,
    pub beta0: f64,
    pub beta: f64,
    /// Auto (50/gap) when absent.
    pub t_max: Option<f64>,
    pub n_points: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    pub n_beta: usize,
    /// Auto (1/gap) when absent.
    pub tau_op: Option<f64>,
    pub n_traj: usize,
    pub master_seed: u64,
    pub sigma_form: SigmaFormChoice,
    pub output: Option<String>,
    pub h_matrix: Option<CMat<f64>>,
    pub a_matrix: Option<CMat<f64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: SystemChoice::Qubit,
            omega: 1.0,
            gamma: 0.1,
            beta0: 5.0,
            beta: 1.0,
            t_max: None,
            n_points: 200,
            beta_min: 0.5,
            beta_max: 10.0,
            n_beta: 39,
            tau_op: None,
            n_traj: 100_000,
            master_seed: 1,
            sigma_form: SigmaFormChoice::Both,
            output: None,
            h_matrix: None,
            a_matrix: None,
        }
    }
}

fn parse_positive_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not a number")))?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Config(format!("key `{key}` must be finite and positive, got {v}")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str, min: usize) -> Result<usize> {
    let x: usize =
        v.parse().map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not an integer")))?;
    if x < min {
        return Err(Error::Config(format!("key `{key}` must be at least {min}, got {v}")));
    }
    Ok(x)
}

/// `a`, `bi`, `a+bi`, `a-bi` with optional whitespace.
fn parse_complex(tok: &str) -> Result<Complex<f64>> {
    let s: String = tok.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Config("empty matrix entry".into()));
    }
    let err = || Error::Config(format!("cannot parse complex number `{tok}`"));
    if let Some(body) = s.strip_suffix('i') {
        // Split body into real part and imaginary coefficient at the last
        // +/− that is not an exponent sign or leading sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re: f64 = body[..k].parse().map_err(|_| err())?;
                let imtxt = &body[k..];
                let im: f64 = if imtxt == "+" {
                    1.0
                } else if imtxt == "-" {
                    -1.0
                } else {
                    imtxt.parse().map_err(|_| err())?
                };
                Ok(Complex::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() { 1.0 } else { body.parse().map_err(|_| err())? };
                Ok(Complex::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|_| err())?;
        Ok(Complex::new(re, 0.0))
    }
}

/// Rows separated by `;`, entries by `,`.
fn parse_matrix(key: &str, v: &str) -> Result<CMat<f64>> {
    let rows: Vec<Vec<Complex<f64>>> = v
        .split(';')
        .map(|row| row.split(',').map(parse_complex).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!("key `{key}` must be a square matrix")));
    }
    CMat::from_rows(&rows)
}

fn parse_system(v: &str) -> Result<SystemChoice> {
    if v == "qubit" {
        return Ok(SystemChoice::Qubit);
    }
    if v == "custom" {
        return Ok(SystemChoice::Custom);
    }
    if let Some(inner) = v.strip_prefix("oscillator(").and_then(|s| s.strip_suffix(')')) {
        let d = parse_usize("system", inner, 2)?;
        return Ok(SystemChoice::Oscillator(d));
    }
    Err(Error::Config(format!("system must be qubit|oscillator(d)|custom, got `{v}`")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::Config(format!("duplicate key `{key}`")));
            }
            seen.push(key.to_string());
            match key {
                "system" => cfg.system = parse_system(value)?,
                "omega" => cfg.omega = parse_positive_f64(key, value)?,
                "gamma" => cfg.gamma = parse_positive_f64(key, value)?,
                "beta0" => cfg.beta0 = parse_positive_f64(key, value)?,
                "beta" => cfg.beta = parse_positive_f64(key, value)?,
                "t_max" => cfg.t_max = Some(parse_positive_f64(key, value)?),
                "n_points" => cfg.n_points = parse_usize(key, value, 2)?,
                "beta_min" => cfg.beta_min = parse_positive_f64(key, value)?,
                "beta_max" => cfg.beta_max = parse_positive_f64(key, value)?,
                "n_beta" => cfg.n_beta = parse_usize(key, value, 2)?,
                "tau_op" => cfg.tau_op = Some(parse_positive_f64(key, value)?),
                "n_traj" => cfg.n_traj = parse_usize(key, value, 2)?,
                "master_seed" => {
                    cfg.master_seed = value.parse().map_err(|_| {
                        Error::Config(format!("key `master_seed`: `{value}` is not a u64"))
                    })?
                }
                "sigma_form" => cfg.sigma_form = SigmaFormChoice::parse(value)?,
                "output" => cfg.output = Some(value.to_string()),
                "h_matrix" => cfg.h_matrix = Some(parse_matrix(key, value)?),
                "a_matrix" => cfg.a_matrix = Some(parse_matrix(key, value)?),
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        if cfg.beta_min >= cfg.beta_max {
            return Err(Error::Config("beta_min must be below beta_max".into()));
        }
        match cfg.system {
            SystemChoice::Custom => {
                if cfg.h_matrix.is_none() || cfg.a_matrix.is_none() {
                    return Err(Error::Config(
                        "system = custom requires h_matrix and a_matrix".into(),
                    ));
                }
            }
            _ => {
                if cfg.h_matrix.is_some() || cfg.a_matrix.is_some() {
                    return Err(Error::Config(
                        "h_matrix/a_matrix are only valid with system = custom".into(),
                    ));
                }
            }
        }
        Ok(cfg)
    }

    pub fn build_system(&self) -> Result<System<f64>> {
        match &self.system {
            SystemChoice::Qubit => System::qubit(self.omega),
            SystemChoice::Oscillator(d) => System::oscillator(*d, self.omega),
            SystemChoice::Custom => {
                let h = self.h_matrix.clone().unwrap();
                let a = self.a_matrix.clone().unwrap();
                let bath =
                    BathSpec::new(InverseTemperature::new(self.beta)?, self.gamma, self.omega)?;
                System::custom(h, a, bath)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys_and_rejects_unknown() {
        let cfg = RunConfig::parse("gamma = 0.2\nbeta0 = 2.5\nn_beta = 11\n").unwrap();
        assert_eq!(cfg.gamma, 0.2);
        assert_eq!(cfg.beta0, 2.5);
        assert_eq!(cfg.n_beta, 11);
        let err = RunConfig::parse("gama = 0.2\n").unwrap_err();
        assert!(format!("{err}").contains("gama"));
        assert!(RunConfig::parse("gamma = 0.1\ngamma = 0.2\n").is_err());
        assert!(RunConfig::parse("gamma = -1\n").is_err());
    }

    #[test]
    fn parses_systems() {
        assert!(matches!(
            RunConfig::parse("system = oscillator(6)\n").unwrap().system,
            SystemChoice::Oscillator(6)
        ));
        assert!(RunConfig::parse("system = ring\n").is_err());
        // Custom requires matrices.
        assert!(RunConfig::parse("system = custom\n").is_err());
        let cfg = RunConfig::parse("system = custom\nh_matrix = 0, 0; 0, 1\na_matrix = 0, 1; 0, 0\n")
            .unwrap();
        assert!(cfg.build_system().is_ok());
        // Matrices without custom are rejected.
        assert!(RunConfig::parse("h_matrix = 0,0;0,1\n").is_err());
    }

    #[test]
    fn complex_entries() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex::new(1.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex::new(0.0, 2.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex::new(1.0, 2.0));
        assert_eq!(parse_complex("-1.5e-2-0.5i").unwrap(), Complex::new(-0.015, -0.5));
        assert_eq!(parse_complex("1e-3").unwrap(), Complex::new(0.001, 0.0));
        assert!(parse_complex("abc").is_err());
    }
}
