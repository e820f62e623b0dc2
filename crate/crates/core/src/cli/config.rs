//! JSON run configuration.
//!
//! Sections are optional at the parse level; each subcommand asks for the
//! ones it needs and reports a missing section by name. Unknown keys are
//! rejected everywhere.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::angular::HalfInt;
use crate::atomdata::{c3_of, InteractionModel, MicrowaveSpec, Polarization, PulseModel, RydbergChannel, POPULATED_M};
use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::pairdyn::{CycleSpec, Mode};
use crate::phasematch::BeamSign;
use crate::protocol::{make_schedule, CycleSchedule, EntangleSpec};

pub const DEFAULT_REALIZATIONS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(default)]
    pub interaction: Option<InteractionSection>,
    /// Principal quantum numbers of the target s-level; one trace each.
    #[serde(default)]
    pub target_n: Vec<u32>,
    #[serde(default = "default_initial_m")]
    pub initial_m: HalfInt,
    #[serde(default)]
    pub microwave: Option<MicrowaveSection>,
    #[serde(default)]
    pub schedule: Option<ScheduleSection>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub entangle: Option<EntangleSection>,
    #[serde(default)]
    pub phasematch: Option<PhaseMatchSection>,
    #[serde(default)]
    pub oracle: Option<OracleSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

fn default_initial_m() -> HalfInt {
    POPULATED_M
}

fn default_realizations() -> usize {
    DEFAULT_REALIZATIONS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InteractionSection {
    Scaling(InteractionModel),
    /// Explicit `C3` per (target n, p n, j).
    Table(Vec<C3Entry>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct C3Entry {
    pub s_n: u32,
    pub p_n: u32,
    pub j: HalfInt,
    pub c3: f64,
}

impl InteractionSection {
    pub fn c3(&self, s_n: u32, p_n: u32, j: HalfInt) -> Result<f64> {
        match self {
            InteractionSection::Scaling(model) => Ok(c3_of(s_n, model)),
            InteractionSection::Table(entries) => entries
                .iter()
                .find(|e| e.s_n == s_n && e.p_n == p_n && e.j == j)
                .map(|e| e.c3)
                .ok_or_else(|| Error::Config {
                    path: "interaction.table".into(),
                    message: format!("no C3 entry for s_n = {s_n}, p_n = {p_n}, j = {j}"),
                }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicrowaveSection {
    pub rabi_per_s: f64,
    #[serde(default)]
    pub polarization: Polarization,
    #[serde(default)]
    pub pulse_model: PulseModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub cycles: Vec<CycleEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleEntry {
    /// `n' - n` of the dressing p-level.
    #[serde(default)]
    pub p_n_offset: i32,
    pub j: HalfInt,
    /// Free interval; `g2-trace` replaces it by the grid value.
    #[serde(default)]
    pub delta_t_us: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start_us: f64,
    pub stop_us: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let bad = |message: String| Error::Config { path: "grid".into(), message };
        if self.points == 0 {
            return Err(bad("points must be >= 1".into()));
        }
        if !(self.start_us.is_finite() && self.stop_us.is_finite() && self.start_us >= 0.0) {
            return Err(bad("start_us must be >= 0 and both ends finite".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.start_us]);
        }
        if self.stop_us <= self.start_us {
            return Err(bad("stop_us must exceed start_us".into()));
        }
        let last = (self.points - 1) as f64;
        let values = match self.spacing {
            Spacing::Linear => {
                let step = (self.stop_us - self.start_us) / last;
                (0..self.points).map(|k| self.start_us + step * k as f64).collect()
            }
            Spacing::Log => {
                if self.start_us <= 0.0 {
                    return Err(bad("log spacing needs start_us > 0".into()));
                }
                let (a, b) = (self.start_us.ln(), self.stop_us.ln());
                (0..self.points).map(|k| (a + (b - a) * k as f64 / last).exp()).collect()
            }
        };
        Ok(values)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntangleSection {
    pub n: u32,
    /// `C3'` of `(n+1)s <-> np_1/2`.
    pub c3_upper: f64,
    /// `C3''` of `ns <-> np_3/2`.
    pub c3_lower: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseMatchSection {
    pub wavelengths_nm: Vec<f64>,
    pub signs: Vec<BeamSign>,
    #[serde(default = "default_speed")]
    pub speed_m_per_s: f64,
}

fn default_speed() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub n_atoms: Vec<usize>,
    #[serde(default = "default_amplitude_sets")]
    pub amplitude_sets: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_oracle_box")]
    pub box_side_um: f64,
}

fn default_amplitude_sets() -> usize {
    100
}

fn default_oracle_box() -> f64 {
    20.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Subcommand run for every point of the sweep.
    pub command: String,
    /// Dotted config path -> list of values; the sweep is their Cartesian product.
    pub parameters: BTreeMap<String, Vec<serde_json::Value>>,
}

fn missing(section: &str) -> Error {
    Error::Config { path: section.into(), message: "section is required for this subcommand".into() }
}

fn at(path: impl Into<String>) -> impl FnOnce(Error) -> Error {
    let path = path.into();
    move |e| match e {
        Error::Config { .. } => e,
        other => Error::Config { path, message: other.to_string() },
    }
}

pub fn read_config_value(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config { path: path.display().to_string(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| Error::Config { path: "<document>".into(), message: e.to_string() })
}

/// Deserializes with field paths in error messages.
pub fn parse_config(value: &serde_json::Value) -> Result<RunConfig> {
    let config: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| Error::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    config.validated()
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Config { path: "<document>".into(), message: e.to_string() })?;
    parse_config(&value)
}

impl RunConfig {
    /// Checks everything that can be checked without knowing the subcommand.
    pub fn validated(self) -> Result<Self> {
        if let Some(e) = self.ensemble {
            e.validated().map_err(at("ensemble"))?;
        }
        if let Some(InteractionSection::Scaling(m)) = &self.interaction {
            m.validated().map_err(at("interaction.scaling"))?;
        }
        if let Some(InteractionSection::Table(entries)) = &self.interaction {
            for (i, e) in entries.iter().enumerate() {
                if !(e.c3.is_finite() && e.c3 > 0.0) {
                    return Err(Error::Config { path: format!("interaction.table[{i}].c3"), message: "must be positive".into() });
                }
            }
        }
        if self.realizations == 0 {
            return Err(Error::Config { path: "realizations".into(), message: "must be >= 1".into() });
        }
        if let Some(g) = &self.grid {
            g.values()?;
        }
        if let Some(mw) = &self.microwave {
            self.microwave_spec_from(mw).map_err(at("microwave"))?;
        }
        if self.schedule.is_some() && self.interaction.is_some() && self.microwave.is_some() {
            for &n in &self.target_n {
                self.schedule_for(n)?;
            }
        }
        Ok(self)
    }

    fn microwave_spec_from(&self, mw: &MicrowaveSection) -> Result<MicrowaveSpec> {
        MicrowaveSpec::from_rabi_per_second(mw.rabi_per_s, mw.polarization, mw.pulse_model)
    }

    pub fn ensemble(&self) -> Result<EnsembleSpec> {
        self.ensemble.ok_or_else(|| missing("ensemble"))
    }

    pub fn microwave_spec(&self) -> Result<MicrowaveSpec> {
        let mw = self.microwave.as_ref().ok_or_else(|| missing("microwave"))?;
        self.microwave_spec_from(mw).map_err(at("microwave"))
    }

    pub fn grid_values(&self) -> Result<Vec<f64>> {
        self.grid.as_ref().ok_or_else(|| missing("grid"))?.values()
    }

    pub fn targets(&self) -> Result<&[u32]> {
        if self.target_n.is_empty() {
            return Err(Error::Config { path: "target_n".into(), message: "need at least one target level".into() });
        }
        Ok(&self.target_n)
    }

    /// Schedule for target level `n`. Cycles without an interval get 0; the
    /// trace subcommand overrides it anyway.
    pub fn schedule_for(&self, n: u32) -> Result<CycleSchedule> {
        let section = self.schedule.as_ref().ok_or_else(|| missing("schedule"))?;
        let interaction = self.interaction.as_ref().ok_or_else(|| missing("interaction"))?;
        let mw = self.microwave_spec()?;
        if section.cycles.is_empty() {
            return Err(Error::Config { path: "schedule.cycles".into(), message: "need at least one cycle".into() });
        }
        let cycles = section
            .cycles
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let path = format!("schedule.cycles[{i}]");
                let p_n = i64::from(n) + i64::from(c.p_n_offset);
                let p_n = u32::try_from(p_n)
                    .ok()
                    .filter(|&p| p >= 2)
                    .ok_or_else(|| Error::Config { path: path.clone(), message: format!("p-level n' = {p_n} is invalid") })?;
                let c3 = interaction.c3(n, p_n, c.j)?;
                let channel =
                    RydbergChannel::dressed(n, p_n, c.j, self.initial_m, mw.polarization(), c3).map_err(at(path.clone()))?;
                CycleSpec::new(channel, c.delta_t_us.unwrap_or(0.0), mw).map_err(at(path))
            })
            .collect::<Result<Vec<_>>>()?;
        // duplicate p-levels keep their own message naming both cycles
        make_schedule(cycles).map_err(|e| Error::Config { path: "schedule.cycles".into(), message: e.to_string() })
    }

    /// Every cycle must carry its own interval (multi-cycle runs).
    pub fn require_intervals(&self) -> Result<()> {
        let section = self.schedule.as_ref().ok_or_else(|| missing("schedule"))?;
        for (i, c) in section.cycles.iter().enumerate() {
            if c.delta_t_us.is_none() {
                return Err(Error::Config {
                    path: format!("schedule.cycles[{i}].delta_t_us"),
                    message: "required by this subcommand".into(),
                });
            }
        }
        Ok(())
    }

    pub fn entangle_spec(&self) -> Result<EntangleSpec> {
        let e = self.entangle.ok_or_else(|| missing("entangle"))?;
        EntangleSpec::new(e.n, e.c3_upper, e.c3_lower, 0.0).map_err(at("entangle"))
    }

    pub fn phasematch(&self) -> Result<&PhaseMatchSection> {
        let p = self.phasematch.as_ref().ok_or_else(|| missing("phasematch"))?;
        if p.wavelengths_nm.is_empty() || p.wavelengths_nm.len() != p.signs.len() {
            return Err(Error::Config {
                path: "phasematch".into(),
                message: "need one sign per wavelength and at least one beam".into(),
            });
        }
        Ok(p)
    }

    pub fn oracle(&self) -> Result<&OracleSection> {
        self.oracle.as_ref().ok_or_else(|| missing("oracle"))
    }

    pub fn sweep(&self) -> Result<&SweepSection> {
        self.sweep.as_ref().ok_or_else(|| missing("sweep"))
    }
}

/// Replaces the value at a dotted path (`a.b.c`, array indices as `a.0`).
pub fn set_dotted(root: &mut serde_json::Value, path: &str, value: serde_json::Value) -> Result<()> {
    let bad = |message: String| Error::Config { path: path.into(), message };
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (depth, part) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        node = match node {
            serde_json::Value::Object(map) => {
                if last {
                    map.insert((*part).to_string(), value);
                    return Ok(());
                }
                map.entry((*part).to_string()).or_insert_with(|| serde_json::json!({}))
            }
            serde_json::Value::Array(items) => {
                let index: usize = part.parse().map_err(|_| bad(format!("`{part}` is not an array index")))?;
                let len = items.len();
                let slot = items.get_mut(index).ok_or_else(|| bad(format!("index {index} out of range ({len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(bad(format!("`{part}` does not address an object or array"))),
        };
    }
    Err(bad("empty path".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "ensemble": {"n_atoms": 100, "box_side_um": 60},
        "interaction": {"table": [{"s_n": 100, "p_n": 100, "j": 0.5, "c3": 3.6e5}]},
        "target_n": [100],
        "microwave": {"rabi_per_s": 1e7},
        "schedule": {"cycles": [{"j": 0.5}]}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config_str(MINIMAL).unwrap();
        let e = c.ensemble().unwrap();
        assert_eq!(e.min_separation, 0.1);
        assert_eq!(c.realizations, 100);
        assert_eq!(c.mode, Mode::Analytic);
        assert_eq!(c.initial_m, HalfInt::HALF);
        let s = c.schedule_for(100).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.cycles()[0].channel().c3(), 3.6e5);
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let text = MINIMAL.replace("\"box_side_um\": 60", "\"box_side_um\": 60, \"bogus\": 1");
        match parse_config_str(&text) {
            Err(Error::Config { path, message }) => {
                assert_eq!(path, "ensemble.bogus");
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_errors_name_the_field() {
        let text = MINIMAL.replace("\"n_atoms\": 100", "\"n_atoms\": \"many\"");
        match parse_config_str(&text) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "ensemble.n_atoms"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_p_levels_name_both_cycles() {
        let text = MINIMAL.replace("[{\"j\": 0.5}]", "[{\"j\": 0.5}, {\"j\": 0.5}]");
        let err = parse_config_str(&text).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("cycles 0 and 1"), "{message}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn grid_spacing() {
        let lin = GridSpec { start_us: 0.0, stop_us: 1.0, points: 5, spacing: Spacing::Linear }.values().unwrap();
        assert_eq!(lin, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let log = GridSpec { start_us: 0.01, stop_us: 1.0, points: 3, spacing: Spacing::Log }.values().unwrap();
        assert!((log[1] - 0.1).abs() < 1e-15);
        assert!(GridSpec { start_us: 0.0, stop_us: 1.0, points: 3, spacing: Spacing::Log }.values().is_err());
        assert!(GridSpec { start_us: 0.0, stop_us: 1.0, points: 0, spacing: Spacing::Linear }.values().is_err());
    }

    #[test]
    fn dotted_paths() {
        let mut v = serde_json::json!({"a": {"b": [1, 2]}});
        set_dotted(&mut v, "a.b.1", serde_json::json!(5)).unwrap();
        set_dotted(&mut v, "a.c", serde_json::json!("x")).unwrap();
        assert_eq!(v, serde_json::json!({"a": {"b": [1, 5], "c": "x"}}));
        assert!(set_dotted(&mut v, "a.b.7", serde_json::json!(0)).is_err());
    }

    #[test]
    fn scaling_interaction() {
        let text = MINIMAL.replace(
            r#"{"table": [{"s_n": 100, "p_n": 100, "j": 0.5, "c3": 3.6e5}]}"#,
            r#"{"scaling": {"reference_c3": 1000.0, "reference_n": 50}}"#,
        );
        let c = parse_config_str(&text).unwrap();
        let c3 = c.schedule_for(100).unwrap().cycles()[0].channel().c3();
        assert!((c3 - 16000.0).abs() < 1e-9);
    }
}
