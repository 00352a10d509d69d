//! Experiment configuration: presets, flat `key = value` files and flag
//! overrides, applied in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use grover_noise::NoiseConvention;

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threads {
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for Threads {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        if s == "auto" {
            return Ok(Threads::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(UsageError(format!(
                "threads must be a positive integer or 'auto', got '{s}'"
            ))),
            Ok(n) => Ok(Threads::Fixed(n)),
        }
    }
}

impl fmt::Display for Threads {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threads::Auto => f.write_str("auto"),
            Threads::Fixed(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// runs=50, n up to 14, dσ down to 1e-6.
    Desk,
    /// runs=200, n up to 16, dσ down to 1e-8.
    Paper,
}

impl FromStr for Preset {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            _ => Err(UsageError(format!("unknown preset '{s}' (expected desk|paper)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_list: Vec<u32>,
    pub p_cut_list: Vec<f64>,
    pub d_sigma_list: Vec<f64>,
    pub runs: usize,
    pub master_seed: u64,
    pub convention: NoiseConvention,
    pub threads: Threads,
    pub output_dir: PathBuf,
    pub sigma_ceiling: f64,
    /// Per-cell progress lines on stderr.
    pub progress: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset(Preset::Paper)
    }
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let (n_max, runs, d_sigma_list) = match preset {
            Preset::Paper => (16, 200, vec![1e-4, 1e-5, 1e-6, 1e-7, 1e-8]),
            Preset::Desk => (14, 50, vec![1e-4, 3e-5, 1e-5, 3e-6, 1e-6]),
        };
        Self {
            n_list: (10..=n_max).collect(),
            p_cut_list: vec![0.5, 0.6, 0.7, 0.8, 0.9],
            d_sigma_list,
            runs,
            master_seed: 0x5EED_0F9B_0BE5,
            convention: NoiseConvention::default(),
            threads: Threads::Auto,
            output_dir: PathBuf::from("results"),
            sigma_ceiling: 1.0,
            progress: true,
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "n_list" | "n" => self.n_list = parse_n_list(value)?,
            "p_cut_list" | "p_cut" => self.p_cut_list = parse_list(value)?,
            "d_sigma_list" | "d_sigma" => self.d_sigma_list = parse_list(value)?,
            "runs" => self.runs = parse_scalar(value, "runs")?,
            "master_seed" | "seed" => self.master_seed = parse_scalar(value, "master_seed")?,
            "convention" | "noise_convention" => {
                self.convention = value.parse().map_err(|e| UsageError(format!("{e}")))?
            }
            "threads" => self.threads = value.parse()?,
            "output_dir" | "out" => self.output_dir = PathBuf::from(value),
            "sigma_ceiling" => self.sigma_ceiling = parse_scalar(value, "sigma_ceiling")?,
            other => bail!(UsageError(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a flat config file: one `key = value` per line, `#` comments.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(UsageError(format!(
                    "config line {}: expected key = value, got '{raw}'",
                    lineno + 1
                )));
            };
            self.set(key, value)
                .with_context(|| format!("config line {}", lineno + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(UsageError(m).into());
        if self.n_list.is_empty() || self.p_cut_list.is_empty() || self.d_sigma_list.is_empty() {
            return err("n_list, p_cut_list and d_sigma_list must be non-empty".into());
        }
        if let Some(n) = self.n_list.iter().find(|&&n| !(2..=40).contains(&n)) {
            return err(format!("n={n} outside 2..=40"));
        }
        if let Some(p) = self.p_cut_list.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return err(format!("p_cut={p} outside (0, 1)"));
        }
        if let Some(d) = self.d_sigma_list.iter().find(|&&d| !(d > 0.0 && d <= 0.01)) {
            return err(format!("d_sigma={d} outside (0, 0.01]"));
        }
        if self.runs == 0 {
            return err("runs must be >= 1".into());
        }
        Ok(())
    }
}

fn parse_scalar<T: FromStr>(value: &str, what: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| UsageError(format!("invalid {what}: '{value}'")).into())
}

/// Comma-separated reals.
pub fn parse_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse_scalar(v.trim(), "number"))
        .collect()
}

/// Comma-separated exponents; `a..b` is an inclusive range.
pub fn parse_n_list(value: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u32 = parse_scalar(lo.trim(), "n range")?;
            let hi: u32 = parse_scalar(hi.trim_start_matches('=').trim(), "n range")?;
            out.extend(lo..=hi);
        } else {
            out.push(parse_scalar(part, "n")?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let desk = ExperimentConfig::preset(Preset::Desk);
        assert_eq!(desk.runs, 50);
        assert_eq!(desk.n_list, (10..=14).collect::<Vec<_>>());
        assert_eq!(*desk.d_sigma_list.last().unwrap(), 1e-6);
        let paper = ExperimentConfig::default();
        assert_eq!(paper.runs, 200);
        assert_eq!(paper.n_list, (10..=16).collect::<Vec<_>>());
        assert_eq!(paper.d_sigma_list.len(), 5);
        assert_eq!(paper.p_cut_list, vec![0.5, 0.6, 0.7, 0.8, 0.9]);
        desk.validate().unwrap();
        paper.validate().unwrap();
    }

    #[test]
    fn config_text() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(
            "# grid\n n_list = 10..12, 14\np_cut_list=0.7\nruns = 7 # few\nthreads=auto\nconvention = paper\n",
        )
        .unwrap();
        assert_eq!(cfg.n_list, vec![10, 11, 12, 14]);
        assert_eq!(cfg.p_cut_list, vec![0.7]);
        assert_eq!(cfg.runs, 7);
        assert_eq!(cfg.convention, NoiseConvention::PaperExact);
        assert!(cfg.apply_text("bogus = 1").is_err());
        assert!(cfg.apply_text("runs").is_err());
        assert!(cfg.apply_text("runs = many").is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::default();
        cfg.p_cut_list = vec![1.0];
        assert!(cfg.validate().is_err());
        cfg = ExperimentConfig::default();
        cfg.d_sigma_list.clear();
        assert!(cfg.validate().is_err());
        assert!("0".parse::<Threads>().is_err());
        assert_eq!("8".parse::<Threads>().unwrap(), Threads::Fixed(8));
    }
}
