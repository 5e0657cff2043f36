//! Scalar fidelity of distributed Bell pairs under crosstalk and converter noise.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::netsim::Architecture;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseKind {
    SwitchCrosstalk,
    MuxCrosstalk,
    ConverterNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseContribution {
    pub kind: NoiseKind,
    pub infidelity: f64,
}

impl NoiseContribution {
    pub fn new(kind: NoiseKind, infidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&infidelity) {
            return domain(format!("infidelity must lie in [0, 1], got {infidelity}"));
        }
        Ok(Self { kind, infidelity })
    }

    pub fn crosstalk(kind: NoiseKind, crosstalk_db: f64) -> Result<Self> {
        Self::new(kind, infidelity_from_crosstalk(crosstalk_db)?)
    }
}

/// Leakage ratio 10^(−dB/10); infinite isolation gives zero.
pub fn infidelity_from_crosstalk(crosstalk_db: f64) -> Result<f64> {
    if crosstalk_db.is_nan() || crosstalk_db <= 0.0 {
        return domain(format!("crosstalk must be > 0 dB, got {crosstalk_db}"));
    }
    Ok(10f64.powf(-crosstalk_db / 10.0))
}

pub fn snr_to_infidelity(signal_rate: f64, noise_rate: f64) -> Result<f64> {
    if !(signal_rate >= 0.0 && noise_rate >= 0.0) {
        return domain("count rates must be ≥ 0");
    }
    if signal_rate + noise_rate == 0.0 {
        return domain("signal and noise are both zero");
    }
    Ok(noise_rate / (signal_rate + noise_rate))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConverterKind {
    Chi2Dfg,
    Chi3FwmBg,
    Chi3Tdfg,
    None,
}

impl ConverterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConverterKind::Chi2Dfg => "chi2_dfg",
            ConverterKind::Chi3FwmBg => "chi3_fwm_bg",
            ConverterKind::Chi3Tdfg => "chi3_tdfg",
            ConverterKind::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverterProfile {
    pub kind: ConverterKind,
    pub infidelity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_counts_per_s: Option<f64>,
}

impl ConverterProfile {
    /// Fitted per-photon infidelity of a filtered PPLN DFG stage.
    pub fn chi2_default() -> Self {
        Self {
            kind: ConverterKind::Chi2Dfg,
            infidelity: 0.025,
            noise_counts_per_s: None,
        }
    }

    pub fn tdfg() -> Self {
        Self {
            kind: ConverterKind::Chi3Tdfg,
            infidelity: 0.0,
            noise_counts_per_s: None,
        }
    }

    pub fn none() -> Self {
        Self {
            kind: ConverterKind::None,
            infidelity: 0.0,
            noise_counts_per_s: None,
        }
    }

    /// Profile whose infidelity comes from measured noise against a signal rate.
    pub fn from_counts(kind: ConverterKind, signal_rate: f64, noise_rate: f64) -> Result<Self> {
        Ok(Self {
            kind,
            infidelity: snr_to_infidelity(signal_rate, noise_rate)?,
            noise_counts_per_s: Some(noise_rate),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.infidelity) {
            return domain(format!("converter infidelity {} outside [0, 1]", self.infidelity));
        }
        if self.kind == ConverterKind::Chi3Tdfg && self.infidelity != 0.0 {
            return domain("the TDFG profile carries no intrinsic noise");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairFidelityModel {
    pub source_fidelity: f64,
    pub arm_a: Vec<NoiseContribution>,
    pub arm_b: Vec<NoiseContribution>,
}

impl PairFidelityModel {
    pub fn perfect_source() -> Self {
        Self {
            source_fidelity: 1.0,
            ..Self::default()
        }
    }
}

pub fn pair_fidelity(model: &PairFidelityModel) -> Result<f64> {
    if !(0.0..=1.0).contains(&model.source_fidelity) {
        return domain("source fidelity must lie in [0, 1]");
    }
    Ok(model
        .arm_a
        .iter()
        .chain(&model.arm_b)
        .fold(model.source_fidelity, |f, c| f * (1.0 - c.infidelity)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityParams {
    pub source_fidelity: f64,
    pub photonic_switch_crosstalk_db: f64,
    pub mechanical_switch_crosstalk_db: f64,
    /// Per mux or demux crossing.
    pub mux_crosstalk_db: f64,
    /// Switch stages between the last network node and the BSM module.
    pub bsm_access_nodes: u32,
    pub converter: ConverterProfile,
}

impl Default for FidelityParams {
    fn default() -> Self {
        Self {
            source_fidelity: 1.0,
            photonic_switch_crosstalk_db: 25.0,
            mechanical_switch_crosstalk_db: 60.0,
            mux_crosstalk_db: 36.0,
            bsm_access_nodes: 1,
            converter: ConverterProfile::chi2_default(),
        }
    }
}

impl FidelityParams {
    pub fn noiseless() -> Self {
        Self {
            photonic_switch_crosstalk_db: f64::INFINITY,
            mechanical_switch_crosstalk_db: f64::INFINITY,
            mux_crosstalk_db: f64::INFINITY,
            converter: ConverterProfile::none(),
            ..Self::default()
        }
    }
}

fn arm_contributions(arch: Architecture, nodes: u32, p: &FidelityParams) -> Result<Vec<NoiseContribution>> {
    let traversals = nodes + p.bsm_access_nodes;
    let photonic = NoiseContribution::crosstalk(NoiseKind::SwitchCrosstalk, p.photonic_switch_crosstalk_db)?;
    let mechanical = NoiseContribution::crosstalk(NoiseKind::SwitchCrosstalk, p.mechanical_switch_crosstalk_db)?;
    let mux = NoiseContribution::crosstalk(NoiseKind::MuxCrosstalk, p.mux_crosstalk_db)?;
    let converter = NoiseContribution::new(NoiseKind::ConverterNoise, p.converter.infidelity)?;

    let mut out = Vec::new();
    match arch {
        Architecture::NoQfcSingle => {
            out.extend(std::iter::repeat_n(photonic, traversals as usize));
        }
        Architecture::QfcSingle => {
            out.push(converter);
            out.extend(std::iter::repeat_n(photonic, traversals as usize));
        }
        Architecture::RqiDwdm => {
            out.push(converter);
            out.push(mux);
            for _ in 0..traversals {
                out.extend([mux, mechanical, mux]);
            }
        }
    }
    Ok(out)
}

pub fn pair_model(arch: Architecture, nodes: u32, p: &FidelityParams) -> Result<PairFidelityModel> {
    p.converter.validate()?;
    let arm = arm_contributions(arch, nodes, p)?;
    Ok(PairFidelityModel {
        source_fidelity: p.source_fidelity,
        arm_a: arm.clone(),
        arm_b: arm,
    })
}

pub fn fidelity_at(arch: Architecture, nodes: u32, p: &FidelityParams) -> Result<f64> {
    if nodes == 0 {
        return domain("node count must be ≥ 1");
    }
    pair_fidelity(&pair_model(arch, nodes, p)?)
}

pub fn fidelity_vs_nodes(arch: Architecture, nodes: &[u32], p: &FidelityParams) -> Result<Vec<(u32, f64)>> {
    nodes.iter().map(|&n| Ok((n, fidelity_at(arch, n, p)?))).collect()
}

/// Smallest n* in 1..=n_max with RQI ≥ no-QFC for every n in n*..=n_max.
pub fn crossover_node(p: &FidelityParams, n_max: u32) -> Result<Option<u32>> {
    let mut found = None;
    for n in (1..=n_max).rev() {
        let rqi = fidelity_at(Architecture::RqiDwdm, n, p)?;
        let single = fidelity_at(Architecture::NoQfcSingle, n, p)?;
        if rqi >= single {
            found = Some(n);
        } else {
            break;
        }
    }
    Ok(found)
}
