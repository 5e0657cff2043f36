//! Run configuration for the command-line front-end.
//!
//! Every field is optional; missing fields fall back to the built-in data.
//! Relative paths resolve against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::components::Catalog;
use crate::error::{config, Error, Result};
use crate::fidelity::ConverterKind;
use crate::netsim::{Architecture, JobSpec, Network, NetworkConfig, ScenarioKind, SimMode};
use crate::raman::RamanModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpRange {
    pub start_nm: f64,
    pub end_nm: f64,
    pub points: u32,
}

impl PumpRange {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 || !(self.start_nm > 0.0 && self.end_nm > 0.0) {
            return config("pump range needs positive wavelengths and at least one point");
        }
        if self.points == 1 {
            return Ok(vec![self.start_nm]);
        }
        let step = (self.end_nm - self.start_nm) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.start_nm + step * i as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RamanSweep {
    pub signal_nm: f64,
    pub power_w: f64,
    pub length_m: f64,
    pub pump_waist_m: f64,
    pub signal_waist_m: f64,
    pub pumps: PumpRange,
    pub temperatures_k: Vec<f64>,
}

impl Default for RamanSweep {
    fn default() -> Self {
        Self {
            signal_nm: 1520.0,
            power_w: 0.2,
            length_m: 0.03,
            pump_waist_m: 3e-6,
            signal_waist_m: 3e-6,
            pumps: PumpRange {
                start_nm: 1594.22,
                end_nm: 1602.32,
                points: 28,
            },
            temperatures_k: vec![300.0, 325.0, 350.0, 375.0, 400.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweeps {
    pub n_tot: Vec<u64>,
    pub nodes: Vec<u32>,
    pub converters: Vec<ConverterKind>,
    pub raman: RamanSweep,
}

impl Default for Sweeps {
    fn default() -> Self {
        Self {
            n_tot: vec![1, 10, 50, 100, 144, 200, 500, 1000, 1440, 5000, 20000],
            nodes: (1..=15).collect(),
            converters: vec![ConverterKind::Chi2Dfg, ConverterKind::Chi3Tdfg],
            raman: RamanSweep::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub scenario: ScenarioKind,
    pub architecture: Architecture,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub job: Option<PathBuf>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::IntraRack,
            architecture: Architecture::RqiDwdm,
            job: None,
        }
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfigFile {
    pub catalog: Option<PathBuf>,
    pub network: Option<PathBuf>,
    pub phonons: Option<PathBuf>,
    pub tdm_preset: Option<String>,
    pub seed: Option<u64>,
    pub mode: Option<SimMode>,
    pub output_dir: Option<PathBuf>,
    pub sweeps: Sweeps,
    pub simulate: SimulateSection,
}

/// Fully resolved inputs for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub network: Network,
    pub raman: RamanModel,
    pub sweeps: Sweeps,
    pub simulate: SimulateSection,
    pub job: JobSpec,
    pub seed: u64,
    pub mode: SimMode,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub mode: Option<SimMode>,
    pub worst_case: bool,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>, ov: &Overrides) -> Result<Self> {
        let (file, base) = match path {
            Some(p) => (
                read_json::<RunConfigFile>(p)?,
                p.parent().map(Path::to_path_buf).unwrap_or_default(),
            ),
            None => (RunConfigFile::default(), PathBuf::from(".")),
        };

        let catalog = match &file.catalog {
            Some(p) => Catalog::load(&resolve(&base, p))?,
            None => Catalog::default(),
        };
        let mut net_cfg = match &file.network {
            Some(p) => NetworkConfig::load(&resolve(&base, p))?,
            None => NetworkConfig::default(),
        };
        if let Some(name) = &file.tdm_preset {
            net_cfg.tdm = crate::tdm::TdmParams::preset(name)?.into();
        }
        if ov.worst_case {
            net_cfg.worst_case_switch = true;
        }
        let raman = match &file.phonons {
            Some(p) => RamanModel::load(&resolve(&base, p))?,
            None => RamanModel::default(),
        };
        let job = match &file.simulate.job {
            Some(p) => read_json::<JobSpec>(&resolve(&base, p))?,
            None => JobSpec::single(100),
        };
        job.validate()?;

        let s = &file.sweeps;
        if s.n_tot.is_empty() || s.nodes.is_empty() || s.converters.is_empty() || s.raman.temperatures_k.is_empty() {
            return config("sweep axes must be non-empty");
        }
        if s.n_tot.contains(&0) || s.nodes.contains(&0) {
            return config("n_tot and node counts must be ≥ 1");
        }
        s.raman.pumps.values()?;

        Ok(Self {
            network: Network::new(catalog, net_cfg),
            raman,
            sweeps: file.sweeps.clone(),
            simulate: file.simulate.clone(),
            job,
            seed: ov.seed.or(file.seed).unwrap_or(0),
            mode: ov.mode.or(file.mode).unwrap_or(SimMode::Deterministic),
            output_dir: ov
                .output_dir
                .clone()
                .or_else(|| file.output_dir.as_ref().map(|p| resolve(&base, p)))
                .unwrap_or_else(|| PathBuf::from("out")),
        })
    }

    /// SHA-256 over every resolved input except the output location.
    pub fn fingerprint(&self) -> String {
        #[derive(Serialize)]
        struct Canonical<'a> {
            catalog: &'a Catalog,
            network: &'a NetworkConfig,
            raman: &'a RamanModel,
            sweeps: &'a Sweeps,
            scenario: ScenarioKind,
            architecture: Architecture,
            job: &'a JobSpec,
            seed: u64,
            mode: SimMode,
        }
        let canon = Canonical {
            catalog: &self.network.catalog,
            network: &self.network.config,
            raman: &self.raman,
            sweeps: &self.sweeps,
            scenario: self.simulate.scenario,
            architecture: self.simulate.architecture,
            job: &self.job,
            seed: self.seed,
            mode: self.mode,
        };
        let bytes = serde_json::to_vec(&canon).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
