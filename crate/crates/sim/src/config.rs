//! Run configuration, read from TOML or JSON.
//!
//! ```toml
//! system = "bicmb-pc"
//! dim = 2
//! m = 4
//! rate = "2/3"
//! snr_db = [0.0, 4.0, 8.0]
//! seed = 1
//! ```

use std::fmt;
use std::path::Path;

use bicmb_core::bicm::{CodeRate, Constellation, ConvCodeSpec, FrameLayout, PuncturePattern};
use bicmb_core::detector::SearchMethod;
use bicmb_core::pstbc::{make_params, PstbcParams};
use serde::{Deserialize, Serialize};

use crate::error::{SimError, SimResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum System {
    #[serde(rename = "bicmb-pc")]
    PerfectCoded,
    #[serde(rename = "bicmb-fp")]
    FullPrecoded,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::PerfectCoded => "bicmb-pc",
            System::FullPrecoded => "bicmb-fp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detection {
    #[default]
    SphereDecoder,
    Exhaustive,
}

impl From<Detection> for SearchMethod {
    fn from(d: Detection) -> Self {
        match d {
            Detection::SphereDecoder => SearchMethod::SphereDecoder,
            Detection::Exhaustive => SearchMethod::Exhaustive,
        }
    }
}

/// Replaces the standard 64-state code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeOverride {
    pub constraint_length: usize,
    /// Octal generator polynomials, e.g. `["133", "171"]`.
    pub generators: Vec<String>,
    /// One row of `0`/`1` per generator; omitted means unpunctured.
    #[serde(default)]
    pub puncture: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub system: System,
    pub dim: usize,
    /// QAM size.
    pub m: usize,
    /// `"1/2"`, `"2/3"` or `"4/5"`; sets the puncturing of the standard code.
    pub rate: String,
    #[serde(default = "default_frame_bits")]
    pub frame_info_bits: usize,
    pub snr_db: Vec<f64>,
    #[serde(default = "default_min_errors")]
    pub min_bit_errors: u64,
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    /// Frames per SNR point in a complexity sweep.
    #[serde(default = "default_complexity_frames")]
    pub complexity_frames: u64,
    /// Frames simulated between stop-rule checks.
    #[serde(default = "default_batch")]
    pub batch_frames: u64,
    #[serde(default)]
    pub seed: u64,
    /// 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub noise_disabled: bool,
    #[serde(default)]
    pub detection: Detection,
    #[serde(default)]
    pub code: Option<CodeOverride>,
}

fn default_frame_bits() -> usize {
    1024
}
fn default_min_errors() -> u64 {
    200
}
fn default_max_frames() -> u64 {
    200_000
}
fn default_complexity_frames() -> u64 {
    20
}
fn default_batch() -> u64 {
    32
}

impl SimConfig {
    /// Defaults for everything but the required fields.
    pub fn new(system: System, dim: usize, m: usize, rate: &str, snr_db: Vec<f64>) -> Self {
        SimConfig {
            system,
            dim,
            m,
            rate: rate.to_string(),
            frame_info_bits: default_frame_bits(),
            snr_db,
            min_bit_errors: default_min_errors(),
            max_frames: default_max_frames(),
            complexity_frames: default_complexity_frames(),
            batch_frames: default_batch(),
            seed: 0,
            workers: 0,
            noise_disabled: false,
            detection: Detection::default(),
            code: None,
        }
    }

    /// Parses by extension: `.json` as JSON, anything else as TOML.
    pub fn load(path: &Path) -> SimResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SimError::Io { path: path.display().to_string(), source })?;
        let cfg: SimConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text).map_err(|e| SimError::config(e.to_string()))?,
            _ => toml::from_str(&text).map_err(|e| SimError::config(e.to_string()))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn code_spec(&self) -> SimResult<ConvCodeSpec> {
        let rate = CodeRate::parse(&self.rate)
            .ok_or_else(|| SimError::config(format!("unsupported code rate {:?}", self.rate)))?;
        let Some(o) = &self.code else {
            return Ok(ConvCodeSpec::standard(rate));
        };
        let gens = o
            .generators
            .iter()
            .map(|g| u32::from_str_radix(g, 8).map_err(|_| SimError::config(format!("bad octal generator {g:?}"))))
            .collect::<SimResult<Vec<_>>>()?;
        let pattern = match &o.puncture {
            None => PuncturePattern::unpunctured(gens.len()),
            Some(rows) => PuncturePattern::from_strs(&rows.iter().map(String::as_str).collect::<Vec<_>>())?,
        };
        Ok(ConvCodeSpec::new(o.constraint_length, gens, pattern)?)
    }

    pub fn validate(&self) -> SimResult<()> {
        self.build().map(|_| ())
    }

    /// Resolves the configuration into the fixed per-run link description.
    pub fn build(&self) -> SimResult<LinkPlan> {
        let params = make_params(self.dim).map_err(|e| SimError::config(e.to_string()))?;
        let constellation = Constellation::qam(self.m).map_err(|e| SimError::config(e.to_string()))?;
        let code = self.code_spec().map_err(|e| match e {
            SimError::Core(c) => SimError::config(c.to_string()),
            e => e,
        })?;
        if self.snr_db.is_empty() {
            return Err(SimError::config("snr_db must list at least one point"));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) || self.snr_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimError::config("snr_db must be finite and strictly increasing"));
        }
        if self.frame_info_bits == 0 {
            return Err(SimError::config("frame_info_bits must be positive"));
        }
        if self.max_frames == 0 || self.batch_frames == 0 || self.complexity_frames == 0 {
            return Err(SimError::config("frame counts must be positive"));
        }
        let layout =
            FrameLayout::new(code, constellation, params.dim, self.frame_info_bits, interleaver_seed(self.seed))?;
        Ok(LinkPlan { system: self.system, params, layout })
    }
}

/// The run's interleaver is drawn once from the master seed.
pub fn interleaver_seed(master: u64) -> u64 {
    master ^ 0x9e37_79b9_7f4a_7c15
}

/// Everything fixed for the duration of a run.
#[derive(Debug, Clone)]
pub struct LinkPlan {
    pub system: System,
    pub params: PstbcParams,
    pub layout: FrameLayout,
}
