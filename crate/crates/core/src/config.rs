//! Run configuration: a TOML file with `[bath]`, `[interferometer]`,
//! `[grid]`, `[output]` and `[sweep]` sections, overridable field by field
//! with `--section.key=value` flags (flags win over the file).

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bath::{markov_parameters, BathParameters, MarkovParameters};
use crate::interferometer::InterferometerConfig;
use crate::{Error, Result};

/// Environment variable consulted when no `--config` is given.
pub const CONFIG_ENV: &str = "MZBATH_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BathSection {
    /// Kelvin.
    pub temperature: f64,
    /// Λ in s⁻¹.
    pub cutoff: f64,
    pub coupling: f64,
    /// Ω in s⁻¹.
    pub system_frequency: f64,
}

impl Default for BathSection {
    fn default() -> Self {
        // Ω/T = 1e10 s⁻¹K⁻¹, r = 10, γ₀ = 0.1.
        Self {
            temperature: 100.0,
            cutoff: 1e13,
            coupling: 0.1,
            system_frequency: 1e12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterferometerSection {
    /// φ used by `evolve` and `sweep`.
    pub phase: f64,
    /// d; defaults to √(120/Ω).
    pub path_difference: Option<f64>,
    /// x₀; defaults to 8/√(2Ω).
    pub pointer_separation: Option<f64>,
    /// Snapshot times (s) for `interfere`.
    pub snapshots: Vec<f64>,
    /// Phases drawn by `interfere`.
    pub phases: Vec<f64>,
    /// Points per X and P grid.
    pub grid_points: usize,
}

impl Default for InterferometerSection {
    fn default() -> Self {
        Self {
            phase: FRAC_PI_2,
            path_difference: None,
            pointer_separation: None,
            snapshots: vec![0.0, 1.5e-8, 1e-7],
            phases: vec![0.0, FRAC_PI_2],
            grid_points: 1001,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub start: f64,
    /// Defaults per command: 50/Λ for `coeffs`, 40 decoherence times for `evolve`.
    pub stop: Option<f64>,
    pub count: usize,
    pub scale: GridScale,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: None,
            count: 201,
            scale: GridScale::Linear,
        }
    }
}

impl GridSection {
    pub fn points(&self, stop: f64) -> Result<Vec<f64>> {
        build_grid(self.start, stop, self.count, self.scale, "grid")
    }
}

pub(crate) fn build_grid(start: f64, stop: f64, count: usize, scale: GridScale, section: &str) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::config(format!("{section}.count"), format!("needs at least 2 points, got {count}")));
    }
    if !(start.is_finite() && stop.is_finite()) || !(stop > start) {
        return Err(Error::config(
            format!("{section}.stop"),
            format!("grid must be strictly increasing: start = {start}, stop = {stop}"),
        ));
    }
    let last = (count - 1) as f64;
    let pts: Vec<f64> = match scale {
        GridScale::Linear => (0..count).map(|k| start + (stop - start) * k as f64 / last).collect(),
        GridScale::Log => {
            if !(start > 0.0) {
                return Err(Error::config(format!("{section}.start"), "log scale needs start > 0"));
            }
            let (a, b) = (start.ln(), stop.ln());
            (0..count).map(|k| (a + (b - a) * k as f64 / last).exp()).collect()
        }
    };
    if pts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(format!("{section}.count"), "grid points are not strictly increasing"));
    }
    Ok(pts)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// CSV destination; stdout when absent.
    pub path: Option<String>,
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "omega_over_T")]
    OmegaOverT,
    #[serde(rename = "temperature")]
    Temperature,
    #[serde(rename = "time")]
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub axis: String,
    /// Explicit sweep values; overrides the range below.
    pub values: Option<Vec<f64>>,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: GridScale,
    /// Times (s) at which C_d is reported.
    pub cd_times: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            axis: "omega_over_T".into(),
            values: None,
            start: 1e9,
            stop: 1e12,
            count: 20,
            scale: GridScale::Log,
            cd_times: vec![1e-12, 1e-11, 1e-10],
        }
    }
}

impl SweepSection {
    pub fn axis(&self) -> Result<SweepAxis> {
        match self.axis.as_str() {
            "omega_over_T" => Ok(SweepAxis::OmegaOverT),
            "temperature" => Ok(SweepAxis::Temperature),
            "time" => Ok(SweepAxis::Time),
            other => Err(Error::config(
                "sweep.axis",
                format!("unknown axis `{other}` (expected omega_over_T, temperature or time)"),
            )),
        }
    }

    pub fn sweep_values(&self) -> Result<Vec<f64>> {
        match &self.values {
            Some(v) if v.is_empty() => Err(Error::config("sweep.values", "must not be empty")),
            Some(v) => Ok(v.clone()),
            None => build_grid(self.start, self.stop, self.count, self.scale, "sweep"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bath: BathSection,
    pub interferometer: InterferometerSection,
    pub grid: GridSection,
    pub output: OutputSection,
    pub sweep: SweepSection,
}

impl RunConfig {
    /// Merge a TOML document with `section.key=value` overrides and validate.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("config", e.message().to_string()))?;
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::config("config", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read `path` (or `$MZBATH_CONFIG`, or nothing) and apply overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let env_path = std::env::var_os(CONFIG_ENV).map(std::path::PathBuf::from);
        let chosen = path.map(Path::to_path_buf).or(env_path);
        let text = match chosen {
            Some(p) => std::fs::read_to_string(&p)
                .map_err(|e| Error::config("config", format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml_with_overrides(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        self.bath_parameters()?;
        let g = &self.grid;
        if g.count < 2 {
            return Err(Error::config("grid.count", format!("needs at least 2 points, got {}", g.count)));
        }
        if !(g.start >= 0.0 && g.start.is_finite()) {
            return Err(Error::config("grid.start", format!("must be finite and >= 0, got {}", g.start)));
        }
        if let Some(stop) = g.stop {
            if !(stop > g.start && stop.is_finite()) {
                return Err(Error::config("grid.stop", format!("must exceed grid.start, got {stop}")));
            }
        }
        let i = &self.interferometer;
        if !i.phase.is_finite() {
            return Err(Error::config("interferometer.phase", "must be finite"));
        }
        if i.grid_points < 2 {
            return Err(Error::config("interferometer.grid_points", "needs at least 2 points"));
        }
        if i.snapshots.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::config("interferometer.snapshots", "times must be finite and >= 0"));
        }
        if i.phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::config("interferometer.phases", "must be finite"));
        }
        self.interferometer_config(i.phase)?;
        self.sweep.axis()?;
        if self.sweep.cd_times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::config("sweep.cd_times", "times must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn bath_parameters(&self) -> Result<BathParameters> {
        let b = &self.bath;
        BathParameters::new(b.temperature, b.cutoff, b.coupling, b.system_frequency)
    }

    pub fn markov(&self) -> Result<MarkovParameters> {
        Ok(markov_parameters(&self.bath_parameters()?))
    }

    pub fn interferometer_config(&self, phase: f64) -> Result<InterferometerConfig> {
        self.interferometer_config_for(phase, self.markov()?)
    }

    pub fn interferometer_config_for(&self, phase: f64, markov: MarkovParameters) -> Result<InterferometerConfig> {
        let mut cfg = InterferometerConfig::with_defaults(phase, self.bath.system_frequency, markov);
        if let Some(d) = self.interferometer.path_difference {
            cfg.path_difference = d;
        }
        if let Some(x0) = self.interferometer.pointer_separation {
            cfg.pointer_separation = x0;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Copy with every defaulted physical quantity written out, for headers.
    pub fn resolved(&self, grid_stop: Option<f64>) -> Self {
        let mut out = self.clone();
        if let Ok(ic) = self.interferometer_config(self.interferometer.phase) {
            out.interferometer.path_difference = Some(ic.path_difference);
            out.interferometer.pointer_separation = Some(ic.pointer_separation);
        }
        if out.grid.stop.is_none() {
            out.grid.stop = grid_stop;
        }
        out
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let body = item.strip_prefix("--").unwrap_or(item);
    let (key, raw) = body
        .split_once('=')
        .ok_or_else(|| Error::config(body, "override must look like --section.key=value"))?;
    let path: Vec<&str> = key.split('.').collect();
    if path.len() != 2 || path.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key, "override key must be section.key"));
    }
    let value = parse_value(raw);
    let section = table
        .entry(path[0].to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match section {
        toml::Value::Table(t) => {
            t.insert(path[1].to_string(), value);
            Ok(())
        }
        _ => Err(Error::config(path[0], "is not a section")),
    }
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::from_toml_with_overrides("", &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
        let n = cfg.markov().unwrap().occupation;
        assert!((n - 12.60).abs() < 0.01);
    }

    #[test]
    fn flags_win_over_file() {
        let text = "[bath]\ntemperature = 5.0\ncoupling = 0.2\n";
        let cfg = RunConfig::from_toml_with_overrides(
            text,
            &["--bath.temperature=7".into(), "--grid.scale=log".into(), "--grid.start=1e-13".into()],
        )
        .unwrap();
        assert_eq!(cfg.bath.temperature, 7.0);
        assert_eq!(cfg.bath.coupling, 0.2);
        assert_eq!(cfg.grid.scale, GridScale::Log);
    }

    #[test]
    fn negative_cutoff_names_the_field() {
        let err = RunConfig::from_toml_with_overrides("[bath]\ncutoff = -1.0\n", &[]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("bath.cutoff"), "{err}");
    }

    #[test]
    fn rejects_unknown_fields_and_axes() {
        assert!(RunConfig::from_toml_with_overrides("[bath]\ntemp = 1\n", &[]).is_err());
        let err = RunConfig::from_toml_with_overrides("", &["--sweep.axis=pressure".into()]).unwrap_err();
        assert!(err.to_string().contains("sweep.axis"));
        assert!(RunConfig::from_toml_with_overrides("", &["--grid.count=1".into()]).is_err());
        assert!(RunConfig::from_toml_with_overrides("", &["nonsense".into()]).is_err());
    }

    #[test]
    fn separation_invariants_are_checked_on_load() {
        let err = RunConfig::from_toml_with_overrides("", &["--interferometer.path_difference=1e-7".into()])
            .unwrap_err();
        assert!(err.to_string().contains("interferometer.path_difference"));
    }

    #[test]
    fn grids() {
        let g = build_grid(1.0, 100.0, 3, GridScale::Log, "grid").unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert!(build_grid(0.0, 1.0, 3, GridScale::Log, "grid").is_err());
        assert!(build_grid(1.0, 1.0, 3, GridScale::Linear, "grid").is_err());
    }

    #[test]
    fn resolved_config_round_trips_through_toml() {
        let cfg = RunConfig::default().resolved(Some(1e-10));
        let back = RunConfig::from_toml_with_overrides(&cfg.to_toml(), &[]).unwrap();
        assert_eq!(back, cfg);
    }
}
