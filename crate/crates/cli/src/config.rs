//! Run configuration: per-command defaults, `key = value` file parsing with
//! `[section]` headers, normalization, and flag overrides.
//!
//! A parsed configuration round-trips: `parse(normalized(c)) == c`, and the
//! normalized form is embedded in every report so a run is reproducible from
//! its own output.

use std::fmt::Write as _;
use std::path::PathBuf;

use modpair_core::error::{ModelError, Result};
use modpair_core::inclusion::{MEMBERSHIP_TOL, SPECTRAL_TOL, TEST_BAND};
use modpair_core::phases::{parse_phase, INNER_TOL};
use modpair_core::report::VerificationReport;

/// Serialization of the primary output document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

/// The full knob set of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid_l: f64,
    pub grid_n: usize,
    pub spectral_tolerance: f64,
    pub membership_tolerance: f64,
    pub inner_tolerance: f64,
    /// Smooth λ-bandlimit Λ_max of the detector test vectors.
    pub band_ceiling: f64,
    pub probe_count: usize,
    pub seed: u64,
    pub phase1: String,
    pub phase2: String,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid_l: 100.0,
            grid_n: 4096,
            spectral_tolerance: SPECTRAL_TOL,
            membership_tolerance: MEMBERSHIP_TOL,
            inner_tolerance: INNER_TOL,
            band_ceiling: TEST_BAND,
            probe_count: 8,
            seed: 5,
            phase1: "blaschke:-1i".to_string(),
            phase2: "id".to_string(),
            out: None,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    /// Parse a config file body. Unknown sections and keys are errors naming
    /// the offender; values are validated on load.
    #[cfg(test)]
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.apply_file(text)?;
        Ok(config)
    }

    /// Apply a config file body on top of the current values.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| ModelError::Config(format!("line {}: {msg}", idx + 1));
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| at(format!("unterminated section header '{line}'")))?;
                if !SECTIONS.contains(&name) {
                    return Err(at(format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if section.is_empty() {
                return Err(at(format!("key '{key}' outside any [section]")));
            }
            self.set(&section, key, value).map_err(|e| at(e.to_string()))?;
        }
        self.validate()
    }

    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let unknown =
            || ModelError::Config(format!("unknown key '{key}' in section [{section}]"));
        match section {
            "grid" => match key {
                "L" => self.grid_l = parse_num(section, key, value)?,
                "N" => self.grid_n = parse_num(section, key, value)?,
                _ => return Err(unknown()),
            },
            "tolerances" => match key {
                "spectral" => self.spectral_tolerance = parse_num(section, key, value)?,
                "membership" => self.membership_tolerance = parse_num(section, key, value)?,
                "inner" => self.inner_tolerance = parse_num(section, key, value)?,
                _ => return Err(unknown()),
            },
            "probes" => match key {
                "band_ceiling" => self.band_ceiling = parse_num(section, key, value)?,
                "count" => self.probe_count = parse_num(section, key, value)?,
                "seed" => self.seed = parse_num(section, key, value)?,
                _ => return Err(unknown()),
            },
            "phases" => match key {
                "phase1" => self.phase1 = value.to_string(),
                "phase2" => self.phase2 = value.to_string(),
                _ => return Err(unknown()),
            },
            "output" => match key {
                "out" => self.out = Some(PathBuf::from(value)),
                "format" => {
                    self.format = match value {
                        "json" => OutputFormat::Json,
                        "csv" => OutputFormat::Csv,
                        _ => {
                            return Err(ModelError::Config(format!(
                                "output.format must be json or csv, got '{value}'"
                            )))
                        }
                    }
                }
                _ => return Err(unknown()),
            },
            _ => return Err(ModelError::Config(format!("unknown section [{section}]"))),
        }
        Ok(())
    }

    /// Check cross-field invariants; every error names its field.
    pub fn validate(&self) -> Result<()> {
        if self.grid_n == 0 || self.grid_n % 2 != 0 {
            return Err(ModelError::Config(format!(
                "grid.N must be an even positive integer, got {}",
                self.grid_n
            )));
        }
        if !(self.grid_l > 0.0 && self.grid_l.is_finite()) {
            return Err(ModelError::Config(format!(
                "grid.L must be a positive box half-width, got {}",
                self.grid_l
            )));
        }
        for (name, v) in [
            ("tolerances.spectral", self.spectral_tolerance),
            ("tolerances.membership", self.membership_tolerance),
            ("tolerances.inner", self.inner_tolerance),
            ("probes.band_ceiling", self.band_ceiling),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ModelError::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.probe_count == 0 {
            return Err(ModelError::Config(
                "probes.count must be at least 1".to_string(),
            ));
        }
        for (name, spec) in [("phases.phase1", &self.phase1), ("phases.phase2", &self.phase2)] {
            parse_phase(spec).map_err(|e| ModelError::Config(format!("{name}: {e}")))?;
        }
        Ok(())
    }

    /// The canonical text form; parsing it reproduces this config exactly.
    pub fn normalized(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[grid]");
        let _ = writeln!(s, "L = {}", self.grid_l);
        let _ = writeln!(s, "N = {}", self.grid_n);
        let _ = writeln!(s, "\n[tolerances]");
        let _ = writeln!(s, "spectral = {}", self.spectral_tolerance);
        let _ = writeln!(s, "membership = {}", self.membership_tolerance);
        let _ = writeln!(s, "inner = {}", self.inner_tolerance);
        let _ = writeln!(s, "\n[probes]");
        let _ = writeln!(s, "band_ceiling = {}", self.band_ceiling);
        let _ = writeln!(s, "count = {}", self.probe_count);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "\n[phases]");
        let _ = writeln!(s, "phase1 = {}", self.phase1);
        let _ = writeln!(s, "phase2 = {}", self.phase2);
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "format = {}", self.format.as_str());
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out = {}", out.display());
        }
        s
    }

    /// Write the normalized config into a report as flat `section.key` entries.
    pub fn embed(&self, report: &mut VerificationReport) {
        report.set_config("grid.L", format!("{}", self.grid_l));
        report.set_config("grid.N", format!("{}", self.grid_n));
        report.set_config("tolerances.spectral", format!("{}", self.spectral_tolerance));
        report.set_config(
            "tolerances.membership",
            format!("{}", self.membership_tolerance),
        );
        report.set_config("tolerances.inner", format!("{}", self.inner_tolerance));
        report.set_config("probes.band_ceiling", format!("{}", self.band_ceiling));
        report.set_config("probes.count", format!("{}", self.probe_count));
        report.set_config("probes.seed", format!("{}", self.seed));
        report.set_config("phases.phase1", self.phase1.clone());
        report.set_config("phases.phase2", self.phase2.clone());
        report.set_config("output.format", self.format.as_str());
    }
}

const SECTIONS: [&str; 5] = ["grid", "tolerances", "probes", "phases", "output"];

fn parse_num<T: std::str::FromStr>(section: &str, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        ModelError::Config(format!("{section}.{key}: cannot parse '{value}'"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_form_round_trips() {
        let mut config = RunConfig::default();
        config.grid_n = 2048;
        config.spectral_tolerance = 3.5e-2;
        config.phase1 = "prod(blaschke:-1i,exp:0.25)".to_string();
        config.out = Some(PathBuf::from("/tmp/report.json"));
        config.format = OutputFormat::Csv;
        let text = config.normalized();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(config, back);
        assert_eq!(back.normalized(), text);
    }

    #[test]
    fn odd_grid_size_error_names_the_field() {
        let err = RunConfig::parse("[grid]\nN = 4097\n").unwrap_err();
        assert!(err.to_string().contains("grid.N"), "got: {err}");
    }

    #[test]
    fn unknown_keys_and_sections_are_named() {
        let err = RunConfig::parse("[grid]\nM = 2\n").unwrap_err();
        assert!(err.to_string().contains("'M'"), "got: {err}");
        let err = RunConfig::parse("[grids]\nN = 2\n").unwrap_err();
        assert!(err.to_string().contains("[grids]"), "got: {err}");
        let err = RunConfig::parse("N = 2\n").unwrap_err();
        assert!(err.to_string().contains("outside any"), "got: {err}");
    }

    #[test]
    fn bad_phase_spec_is_a_config_error() {
        let err = RunConfig::parse("[phases]\nphase1 = blutschke:-1i\n").unwrap_err();
        assert!(err.to_string().contains("phases.phase1"), "got: {err}");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# run setup\n[grid]\n\nL = 50 # narrower box\nN = 1024\n";
        let config = RunConfig::parse(text).unwrap();
        assert_eq!(config.grid_l, 50.0);
        assert_eq!(config.grid_n, 1024);
    }

    #[test]
    fn tolerances_must_be_positive() {
        let err = RunConfig::parse("[tolerances]\nspectral = 0\n").unwrap_err();
        assert!(err.to_string().contains("tolerances.spectral"), "got: {err}");
    }
}
