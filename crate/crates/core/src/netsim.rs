//! Scenario paths, DWDM aggregate rates and the reconfiguration scheduler.

use std::collections::BTreeSet;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::components::{Band, Catalog, ComponentKind, PathChain};
use crate::error::{config, domain, Error, Result};
use crate::fidelity::{fidelity_at, FidelityParams};
use crate::tdm::{bell_pair_rate, p_success, EmissionConvention, SuccessModel, TdmParams};

const DEFAULT_NETWORK: &str = include_str!("../data/network.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    IntraRack,
    InterRack,
    CrossDc,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [ScenarioKind::IntraRack, ScenarioKind::InterRack, ScenarioKind::CrossDc];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::IntraRack => "intra_rack",
            ScenarioKind::InterRack => "inter_rack",
            ScenarioKind::CrossDc => "cross_dc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    NoQfcSingle,
    QfcSingle,
    RqiDwdm,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::NoQfcSingle, Architecture::QfcSingle, Architecture::RqiDwdm];

    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::NoQfcSingle => "no_qfc_single",
            Architecture::QfcSingle => "qfc_single",
            Architecture::RqiDwdm => "rqi_dwdm",
        }
    }

    pub fn is_multiplexed(self) -> bool {
        self == Architecture::RqiDwdm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosTopology {
    pub qpus_per_rack: u32,
    pub leaf_switches: u32,
    pub spine_switches: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// End-to-end fiber; the BSM sits at the midpoint.
    pub fiber_km: f64,
    /// Switch stages crossed by photon A and photon B.
    pub arm_switches: [u32; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<ClosTopology>,
}

impl Scenario {
    pub fn switch_hops(&self) -> u32 {
        self.arm_switches[0] + self.arm_switches[1]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fiber_km.is_finite() && self.fiber_km >= 0.0) {
            return config(format!("{}: fiber length must be ≥ 0", self.kind.as_str()));
        }
        if self.switch_hops() == 0 {
            return config(format!("{}: at least one switch hop is required", self.kind.as_str()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TdmTiming {
    pub t_move: f64,
    pub t_init: f64,
    pub t_ent: f64,
    pub m: u32,
}

impl TdmTiming {
    pub fn params(&self, k: u64, p_suc: f64) -> TdmParams {
        TdmParams {
            t_move: self.t_move,
            t_init: self.t_init,
            t_ent: self.t_ent,
            m: self.m,
            k,
            p_suc,
        }
    }
}

impl From<TdmParams> for TdmTiming {
    fn from(p: TdmParams) -> Self {
        Self {
            t_move: p.t_move,
            t_init: p.t_init,
            t_ent: p.t_ent,
            m: p.m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub version: String,
    pub emission_convention: EmissionConvention,
    /// Communication qubits per QPU.
    pub n_tot: u64,
    pub n_channels: u32,
    pub epoch_pairs: u64,
    pub converter_chip_facets: u32,
    pub photonic_switch_chip_facets: u32,
    pub mux_low_loss: bool,
    pub worst_case_switch: bool,
    pub tdm: TdmTiming,
    pub scenarios: Vec<Scenario>,
    pub fidelity: FidelityParams,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self::from_json(DEFAULT_NETWORK, "built-in network config").expect("built-in network config is valid")
    }
}

impl NetworkConfig {
    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let cfg: NetworkConfig = serde_json::from_str(text).map_err(|source| Error::Json {
            context: context.to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tot == 0 || self.n_channels == 0 || self.epoch_pairs == 0 {
            return config("n_tot, n_channels and epoch_pairs must be ≥ 1");
        }
        self.tdm.params(1, 0.5).validate().map_err(|e| Error::Config(e.to_string()))?;
        let kinds: BTreeSet<_> = self.scenarios.iter().map(|s| s.kind).collect();
        if kinds.len() != self.scenarios.len() {
            return config("duplicate scenario entries");
        }
        for s in &self.scenarios {
            s.validate()?;
        }
        Ok(())
    }
}

/// Catalog plus network layout: everything needed to price a link.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Network {
    pub catalog: Catalog,
    pub config: NetworkConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    Deterministic,
    Stochastic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demand {
    pub qpu_a: String,
    pub qpu_b: String,
    pub pairs: u64,
}

fn default_epoch() -> u64 {
    100
}

fn default_minor() -> f64 {
    1e-9
}

fn default_major() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub qpus: Vec<String>,
    pub demands: Vec<Demand>,
    #[serde(default = "default_epoch")]
    pub epoch_pairs: u64,
    #[serde(default = "default_minor")]
    pub minor_reconfig_s: f64,
    #[serde(default = "default_major")]
    pub major_reconfig_s: f64,
}

impl JobSpec {
    pub fn single(pairs: u64) -> Self {
        Self {
            qpus: vec!["q0".into(), "q1".into()],
            demands: vec![Demand {
                qpu_a: "q0".into(),
                qpu_b: "q1".into(),
                pairs,
            }],
            epoch_pairs: default_epoch(),
            minor_reconfig_s: default_minor(),
            major_reconfig_s: default_major(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let known: BTreeSet<&str> = self.qpus.iter().map(String::as_str).collect();
        if self.demands.is_empty() {
            return config("job has no demands");
        }
        for d in &self.demands {
            for q in [&d.qpu_a, &d.qpu_b] {
                if !known.contains(q.as_str()) {
                    return config(format!("demand references unknown QPU `{q}`"));
                }
            }
            if d.qpu_a == d.qpu_b {
                return config(format!("demand pairs `{}` with itself", d.qpu_a));
            }
            if d.pairs == 0 {
                return config("demands must be > 0");
            }
        }
        if self.epoch_pairs == 0 {
            return config("epoch_pairs must be ≥ 1");
        }
        if !(self.minor_reconfig_s >= 0.0 && self.major_reconfig_s >= 0.0) {
            return config("reconfiguration times must be ≥ 0");
        }
        Ok(())
    }

    pub fn total_pairs(&self) -> u64 {
        self.demands.iter().map(|d| d.pairs).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    MajorReconfig,
    MinorReconfig,
    Generation,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::MajorReconfig => "major_reconfig",
            EventKind::MinorReconfig => "minor_reconfig",
            EventKind::Generation => "generation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time_s: f64,
    pub kind: EventKind,
    pub qpu_pair: String,
    pub channel: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub per_channel_rate_hz: f64,
    pub aggregate_rate_hz: f64,
    pub effective_rate_hz: f64,
    pub makespan_s: f64,
    pub pairs_demanded: u64,
    pub pairs_delivered: u64,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub scenario: ScenarioKind,
    pub architecture: Architecture,
    pub n_tot: u64,
    pub n_channels: u32,
    pub per_channel_hz: f64,
    pub aggregate_hz: f64,
    pub effective_hz: f64,
}

pub const TABLE1_RATES_KHZ: [[f64; 3]; 3] = [[25.16, 24.66, 4508.0], [9.66, 13.34, 3844.0], [0.040, 5.96, 2696.0]];
pub const TABLE1_FIDELITY_NODES: [u32; 2] = [3, 9];
pub const TABLE1_FIDELITY: [[f64; 3]; 2] = [[0.987, 0.938, 0.946], [0.924, 0.878, 0.926]];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Report {
    /// kHz, rows by scenario, columns by architecture.
    pub rates_khz: [[f64; 3]; 3],
    pub rate_rel_errors: [[f64; 3]; 3],
    pub fidelity: [[f64; 3]; 2],
    pub fidelity_abs_errors: [[f64; 3]; 2],
}

impl Table1Report {
    pub fn worst_rate_error(&self) -> f64 {
        self.rate_rel_errors.iter().flatten().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn worst_fidelity_error(&self) -> f64 {
        self.fidelity_abs_errors.iter().flatten().fold(0.0, |m, e| m.max(e.abs()))
    }
}

/// Rate after amortizing one reconfiguration over each epoch.
pub fn effective_rate_with_reconfig(rate_hz: f64, epoch_pairs: u64, reconfig_s: f64) -> Result<f64> {
    if !(rate_hz > 0.0) {
        return domain(format!("rate must be > 0, got {rate_hz}"));
    }
    if epoch_pairs == 0 || !(reconfig_s >= 0.0) {
        return domain("epoch must be ≥ 1 pair and reconfiguration time ≥ 0");
    }
    let t_gen = epoch_pairs as f64 / rate_hz;
    Ok(epoch_pairs as f64 / (t_gen + reconfig_s))
}

impl Network {
    pub fn new(catalog: Catalog, config: NetworkConfig) -> Self {
        Self { catalog, config }
    }

    pub fn scenario(&self, kind: ScenarioKind) -> Result<&Scenario> {
        self.config
            .scenarios
            .iter()
            .find(|s| s.kind == kind)
            .ok_or_else(|| Error::Config(format!("scenario {} is not configured", kind.as_str())))
    }

    fn converter_stage(&self, chain: &mut PathChain) -> Result<()> {
        chain
            .push_n(&self.catalog.component("chip_coupling")?, self.config.converter_chip_facets)
            .push(self.catalog.component("rqi_converter")?)
            .push(self.catalog.component("fp_filter")?);
        Ok(())
    }

    fn photonic_stage(&self) -> Result<PathChain> {
        let mut stage = PathChain::new();
        stage
            .push(self.catalog.photonic_switch()?)
            .push_n(&self.catalog.component("chip_coupling")?, self.config.photonic_switch_chip_facets);
        Ok(stage)
    }

    fn arm(&self, scenario: &Scenario, arch: Architecture, switches: u32) -> Result<PathChain> {
        let cat = &self.catalog;
        let half = scenario.fiber_km / 2.0;
        let mut chain = PathChain::new();
        chain.push(cat.component("collection_optics")?).push(cat.component("smf_coupling")?);
        match arch {
            Architecture::NoQfcSingle => {
                chain.push(cat.fiber(Band::Nir, half)?);
                let stage = self.photonic_stage()?;
                for _ in 0..switches {
                    chain.extend(&stage);
                }
            }
            Architecture::QfcSingle => {
                self.converter_stage(&mut chain)?;
                chain.push(cat.fiber(Band::Telecom, half)?);
                let stage = self.photonic_stage()?;
                for _ in 0..switches {
                    chain.extend(&stage);
                }
            }
            Architecture::RqiDwdm => {
                self.converter_stage(&mut chain)?;
                chain
                    .push(cat.mux(self.config.mux_low_loss)?)
                    .push(cat.fiber(Band::Telecom, half)?)
                    .push_n(&cat.mechanical_switch(self.config.worst_case_switch)?, switches)
                    .push(cat.demux(self.config.mux_low_loss)?);
            }
        }
        chain.push(cat.component("detector")?);
        Ok(chain)
    }

    /// Both photons' component chains from emission to detection.
    pub fn build_paths(&self, scenario: &Scenario, arch: Architecture) -> Result<(PathChain, PathChain)> {
        if !(scenario.fiber_km.is_finite() && scenario.fiber_km >= 0.0) {
            return domain("fiber length must be ≥ 0");
        }
        Ok((
            self.arm(scenario, arch, scenario.arm_switches[0])?,
            self.arm(scenario, arch, scenario.arm_switches[1])?,
        ))
    }

    pub fn success_probability(&self, scenario: &Scenario, arch: Architecture) -> Result<f64> {
        let (a, b) = self.build_paths(scenario, arch)?;
        let model = SuccessModel::new(
            self.catalog.bsm_success_probability.value,
            self.catalog.emission_probability.value,
            self.config.emission_convention,
        )
        .with_arms(a, b);
        p_success(&model)
    }

    /// Eq. A1 rate of one channel with `k` atoms in its cavity.
    pub fn per_channel_rate(&self, scenario: &Scenario, arch: Architecture, k: u64) -> Result<f64> {
        let p = self.success_probability(scenario, arch)?;
        Ok(bell_pair_rate(&self.config.tdm.params(k, p))?.rate_hz)
    }

    /// Channels used by `arch` when `n_channels` are available.
    pub fn channels_for(&self, arch: Architecture, n_channels: u32) -> u32 {
        if arch.is_multiplexed() {
            n_channels
        } else {
            1
        }
    }

    pub fn aggregate_dwdm_rate(&self, n_tot: u64, n_channels: u32, scenario: &Scenario, arch: Architecture) -> Result<f64> {
        if n_channels == 0 {
            return domain("channel count must be ≥ 1");
        }
        let n = self.channels_for(arch, n_channels);
        if n_tot < n as u64 {
            return domain(format!("{n_tot} qubits cannot fill {n} channels"));
        }
        let k = n_tot.div_ceil(n as u64);
        Ok(n as f64 * self.per_channel_rate(scenario, arch, k)?)
    }

    /// Latency of the in-job (minor) reconfiguration for `arch`.
    pub fn minor_reconfig_s(&self, arch: Architecture) -> Result<f64> {
        match arch {
            Architecture::RqiDwdm => self.catalog.latency_s("rqi_converter"),
            _ => self.catalog.latency_s("photonic_switch"),
        }
    }

    pub fn rate_row(&self, scenario: &Scenario, arch: Architecture, n_tot: u64, n_channels: u32) -> Result<RateRow> {
        let n = self.channels_for(arch, n_channels);
        let aggregate = self.aggregate_dwdm_rate(n_tot, n, scenario, arch)?;
        let effective = if aggregate > 0.0 {
            effective_rate_with_reconfig(aggregate, self.config.epoch_pairs, self.minor_reconfig_s(arch)?)?
        } else {
            0.0
        };
        Ok(RateRow {
            scenario: scenario.kind,
            architecture: arch,
            n_tot,
            n_channels: n,
            per_channel_hz: aggregate / n as f64,
            aggregate_hz: aggregate,
            effective_hz: effective,
        })
    }

    /// Runs a job to completion: one major reconfiguration at load, then
    /// epochs of generation separated by minor reconfigurations.
    pub fn simulate_job(
        &self,
        job: &JobSpec,
        scenario: &Scenario,
        arch: Architecture,
        mode: SimMode,
        seed: u64,
    ) -> Result<SimReport> {
        job.validate()?;
        let n = self.channels_for(arch, self.config.n_channels);
        let aggregate = self.aggregate_dwdm_rate(self.config.n_tot, n, scenario, arch)?;
        if !(aggregate > 0.0) {
            return domain("link rate is zero; the job can never finish");
        }
        let minor = if arch.is_multiplexed() {
            job.minor_reconfig_s
        } else {
            self.minor_reconfig_s(arch)?
        };

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let exp = Exp::new(aggregate).map_err(|e| Error::Domain(e.to_string()))?;
        let mut t = job.major_reconfig_s;
        let mut events = vec![Event {
            time_s: t,
            kind: EventKind::MajorReconfig,
            qpu_pair: String::new(),
            channel: 0,
        }];
        let mut delivered = 0;
        let mut first_epoch = true;
        for (i, d) in job.demands.iter().enumerate() {
            let pair = format!("{}-{}", d.qpu_a, d.qpu_b);
            let channel = i as u32 % n;
            let mut left = d.pairs;
            while left > 0 {
                if !first_epoch {
                    t += minor;
                    events.push(Event {
                        time_s: t,
                        kind: EventKind::MinorReconfig,
                        qpu_pair: pair.clone(),
                        channel,
                    });
                }
                first_epoch = false;
                let batch = left.min(job.epoch_pairs);
                for _ in 0..batch {
                    t += match mode {
                        SimMode::Deterministic => 1.0 / aggregate,
                        SimMode::Stochastic => exp.sample(&mut rng),
                    };
                    events.push(Event {
                        time_s: t,
                        kind: EventKind::Generation,
                        qpu_pair: pair.clone(),
                        channel,
                    });
                }
                delivered += batch;
                left -= batch;
            }
        }
        Ok(SimReport {
            per_channel_rate_hz: aggregate / n as f64,
            aggregate_rate_hz: aggregate,
            effective_rate_hz: delivered as f64 / t,
            makespan_s: t,
            pairs_demanded: job.total_pairs(),
            pairs_delivered: delivered,
            events,
        })
    }

    pub fn table1_report(&self) -> Result<Table1Report> {
        let mut rates = [[0.0; 3]; 3];
        let mut rate_err = [[0.0; 3]; 3];
        for (i, kind) in ScenarioKind::ALL.iter().enumerate() {
            let scenario = self.scenario(*kind)?;
            for (j, arch) in Architecture::ALL.iter().enumerate() {
                let r = self.aggregate_dwdm_rate(self.config.n_tot, self.config.n_channels, scenario, *arch)? / 1e3;
                rates[i][j] = r;
                rate_err[i][j] = r / TABLE1_RATES_KHZ[i][j] - 1.0;
            }
        }
        let mut fid = [[0.0; 3]; 2];
        let mut fid_err = [[0.0; 3]; 2];
        for (i, nodes) in TABLE1_FIDELITY_NODES.iter().enumerate() {
            for (j, arch) in Architecture::ALL.iter().enumerate() {
                let f = fidelity_at(*arch, *nodes, &self.config.fidelity)?;
                fid[i][j] = f;
                fid_err[i][j] = f - TABLE1_FIDELITY[i][j];
            }
        }
        Ok(Table1Report {
            rates_khz: rates,
            rate_rel_errors: rate_err,
            fidelity: fid,
            fidelity_abs_errors: fid_err,
        })
    }
}

impl Network {
    pub fn load(config_path: Option<&Path>, catalog_path: Option<&Path>) -> Result<Self> {
        let config = match config_path {
            Some(p) => NetworkConfig::load(p)?,
            None => NetworkConfig::default(),
        };
        let catalog = match catalog_path {
            Some(p) => Catalog::load(p)?,
            None => Catalog::default(),
        };
        Ok(Self::new(catalog, config))
    }

    pub fn count_in_path(&self, scenario: &Scenario, arch: Architecture, kind: ComponentKind) -> Result<usize> {
        let (a, b) = self.build_paths(scenario, arch)?;
        Ok(a.count(kind) + b.count(kind))
    }
}
