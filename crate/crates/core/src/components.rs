//! Optical component catalog and per-photon path chains.
//!
//! Every component is reduced to an insertion loss in dB. Efficiency-style
//! entries (η) are stored as `-10·log10(η)`. Crosstalk is carried along for
//! the fidelity model but never enters transmittance.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};

const DEFAULT_CATALOG: &str = include_str!("../data/catalog.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComponentKind {
    Fiber,
    PhotonicSwitch,
    MechanicalSwitch,
    DwdmMux,
    DwdmDemux,
    RqiConverter,
    Detector,
    FpFilter,
    ChipCoupling,
    CollectionOptics,
    SmfCoupling,
    Wss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    Nir,
    Telecom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberSegment {
    pub band: Band,
    pub loss_db_per_km: f64,
    pub length_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub name: String,
    pub kind: ComponentKind,
    /// Lumped insertion loss; zero for fiber, whose loss lives in `fiber`.
    pub insertion_loss_db: f64,
    pub fiber: Option<FiberSegment>,
    /// Leakage below the signal, dB. `None` means no crosstalk.
    pub crosstalk_db: Option<f64>,
    pub reconfig_latency_s: f64,
}

impl ComponentSpec {
    pub fn lumped(name: impl Into<String>, kind: ComponentKind, loss_db: f64) -> Result<Self> {
        if !(loss_db.is_finite() && loss_db >= 0.0) {
            return domain(format!("insertion loss must be ≥ 0 dB, got {loss_db}"));
        }
        Ok(Self {
            name: name.into(),
            kind,
            insertion_loss_db: loss_db,
            fiber: None,
            crosstalk_db: None,
            reconfig_latency_s: 0.0,
        })
    }

    pub fn from_efficiency(name: impl Into<String>, kind: ComponentKind, eta: f64) -> Result<Self> {
        Self::lumped(name, kind, transmittance_to_db(eta)?)
    }

    pub fn fiber(band: Band, loss_db_per_km: f64, length_km: f64) -> Result<Self> {
        if !(loss_db_per_km.is_finite() && loss_db_per_km >= 0.0) {
            return domain(format!("fiber attenuation must be ≥ 0, got {loss_db_per_km}"));
        }
        if !(length_km.is_finite() && length_km >= 0.0) {
            return domain(format!("fiber length must be ≥ 0, got {length_km}"));
        }
        let name = match band {
            Band::Nir => "fiber_nir",
            Band::Telecom => "fiber_telecom",
        };
        Ok(Self {
            name: name.to_string(),
            kind: ComponentKind::Fiber,
            insertion_loss_db: 0.0,
            fiber: Some(FiberSegment {
                band,
                loss_db_per_km,
                length_km,
            }),
            crosstalk_db: None,
            reconfig_latency_s: 0.0,
        })
    }

    pub fn with_crosstalk(mut self, crosstalk_db: Option<f64>) -> Self {
        self.crosstalk_db = crosstalk_db;
        self
    }

    pub fn with_latency(mut self, seconds: f64) -> Self {
        self.reconfig_latency_s = seconds;
        self
    }

    pub fn loss_db(&self) -> f64 {
        match &self.fiber {
            Some(f) => f.loss_db_per_km * f.length_km,
            None => self.insertion_loss_db,
        }
    }

    pub fn transmittance(&self) -> f64 {
        10f64.powf(-self.loss_db() / 10.0)
    }
}

pub fn db_to_transmittance(loss_db: f64) -> Result<f64> {
    if loss_db.is_nan() || loss_db < 0.0 {
        return domain(format!("loss must be ≥ 0 dB (gain is not modeled), got {loss_db}"));
    }
    Ok(10f64.powf(-loss_db / 10.0))
}

pub fn transmittance_to_db(eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return domain(format!("transmittance must lie in (0, 1], got {eta}"));
    }
    Ok(-10.0 * eta.log10())
}

/// Everything one photon traverses from emission to detection, in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PathChain {
    pub components: Vec<ComponentSpec>,
}

impl PathChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: ComponentSpec) -> &mut Self {
        self.components.push(c);
        self
    }

    pub fn push_n(&mut self, c: &ComponentSpec, n: u32) -> &mut Self {
        for _ in 0..n {
            self.components.push(c.clone());
        }
        self
    }

    pub fn extend(&mut self, other: &PathChain) -> &mut Self {
        self.components.extend(other.components.iter().cloned());
        self
    }

    pub fn concat(&self, other: &PathChain) -> PathChain {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn transmittance(&self) -> f64 {
        self.components.iter().map(ComponentSpec::transmittance).product()
    }

    pub fn total_loss_db(&self) -> f64 {
        self.components.iter().map(ComponentSpec::loss_db).sum()
    }

    pub fn count(&self, kind: ComponentKind) -> usize {
        self.components.iter().filter(|c| c.kind == kind).count()
    }

    pub fn contains(&self, kind: ComponentKind) -> bool {
        self.count(kind) > 0
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

pub fn chain_transmittance(chain: &PathChain) -> f64 {
    chain.transmittance()
}

/// A wavelength-selective switch: demux, N×M switch core, mux.
#[derive(Debug, Clone, PartialEq)]
pub struct Wss {
    pub demux: ComponentSpec,
    pub switch: ComponentSpec,
    pub mux: ComponentSpec,
}

impl Wss {
    pub fn loss_db(&self) -> f64 {
        self.demux.loss_db() + self.switch.loss_db() + self.mux.loss_db()
    }
}

pub fn wss_loss(wss: &Wss) -> f64 {
    wss.loss_db()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub value: f64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub kind: ComponentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_case_loss_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low_loss_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<Band>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss_db_per_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosstalk_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alt_crosstalk_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconfig_latency_s: Option<f64>,
    pub source: String,
}

/// Named component defaults, immutable once loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub version: String,
    pub emission_probability: Param,
    pub bsm_success_probability: Param,
    pub components: BTreeMap<String, CatalogEntry>,
}

const REQUIRED: &[&str] = &[
    "collection_optics",
    "smf_coupling",
    "fiber_telecom",
    "fiber_nir",
    "mechanical_switch",
    "photonic_switch",
    "dwdm_mux",
    "detector",
    "rqi_converter",
    "chip_coupling",
    "fp_filter",
];

impl Default for Catalog {
    fn default() -> Self {
        Self::from_json(DEFAULT_CATALOG, "built-in catalog").expect("built-in catalog is valid")
    }
}

impl Catalog {
    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let catalog: Catalog = serde_json::from_str(text).map_err(|source| Error::Json {
            context: context.to_string(),
            source,
        })?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    fn validate(&self) -> Result<()> {
        for p in [&self.emission_probability, &self.bsm_success_probability] {
            if !(0.0..=1.0).contains(&p.value) {
                return config(format!("probability {} outside [0, 1]", p.value));
            }
        }
        for name in REQUIRED {
            if !self.components.contains_key(*name) {
                return config(format!("catalog is missing component `{name}`"));
            }
        }
        for (name, e) in &self.components {
            if let Some(eta) = e.efficiency {
                if !(eta > 0.0 && eta <= 1.0) {
                    return config(format!("`{name}`: efficiency {eta} outside (0, 1]"));
                }
            }
            for v in [e.loss_db, e.worst_case_loss_db, e.low_loss_db, e.loss_db_per_km]
                .into_iter()
                .flatten()
            {
                if !(v.is_finite() && v >= 0.0) {
                    return config(format!("`{name}`: loss {v} must be ≥ 0"));
                }
            }
            for x in [e.crosstalk_db, e.alt_crosstalk_db].into_iter().flatten() {
                if x.is_nan() || x <= 0.0 {
                    return config(format!("`{name}`: crosstalk {x} dB must be > 0"));
                }
            }
            if e.reconfig_latency_s.is_some_and(|t| t.is_nan() || t < 0.0) {
                return config(format!("`{name}`: latency must be ≥ 0"));
            }
            if e.efficiency.is_none() && e.loss_db.is_none() && e.loss_db_per_km.is_none() {
                return config(format!("`{name}` needs one of efficiency, loss_db, loss_db_per_km"));
            }
        }
        Ok(())
    }

    pub fn entry(&self, name: &str) -> Result<&CatalogEntry> {
        self.components
            .get(name)
            .ok_or_else(|| Error::Config(format!("unknown catalog component `{name}`")))
    }

    /// The named lumped component at its default (typical) loss.
    pub fn component(&self, name: &str) -> Result<ComponentSpec> {
        let e = self.entry(name)?;
        let spec = match (e.efficiency, e.loss_db) {
            (Some(eta), _) => ComponentSpec::from_efficiency(name, e.kind, eta)?,
            (None, Some(db)) => ComponentSpec::lumped(name, e.kind, db)?,
            (None, None) => return config(format!("`{name}` is not a lumped component")),
        };
        Ok(spec
            .with_crosstalk(e.crosstalk_db)
            .with_latency(e.reconfig_latency_s.unwrap_or(0.0)))
    }

    pub fn efficiency(&self, name: &str) -> Result<f64> {
        Ok(self.component(name)?.transmittance())
    }

    pub fn fiber_loss_db_per_km(&self, band: Band) -> Result<f64> {
        let name = match band {
            Band::Nir => "fiber_nir",
            Band::Telecom => "fiber_telecom",
        };
        self.entry(name)?
            .loss_db_per_km
            .ok_or_else(|| Error::Config(format!("`{name}` has no loss_db_per_km")))
    }

    pub fn fiber(&self, band: Band, length_km: f64) -> Result<ComponentSpec> {
        ComponentSpec::fiber(band, self.fiber_loss_db_per_km(band)?, length_km)
    }

    pub fn mechanical_switch(&self, worst_case: bool) -> Result<ComponentSpec> {
        let mut spec = self.component("mechanical_switch")?;
        if worst_case {
            let e = self.entry("mechanical_switch")?;
            spec.insertion_loss_db = e
                .worst_case_loss_db
                .ok_or_else(|| Error::Config("mechanical_switch has no worst_case_loss_db".into()))?;
        }
        Ok(spec)
    }

    pub fn photonic_switch(&self) -> Result<ComponentSpec> {
        self.component("photonic_switch")
    }

    pub fn mux(&self, low_loss: bool) -> Result<ComponentSpec> {
        let mut spec = self.component("dwdm_mux")?;
        if low_loss {
            let e = self.entry("dwdm_mux")?;
            spec.insertion_loss_db = e
                .low_loss_db
                .ok_or_else(|| Error::Config("dwdm_mux has no low_loss_db".into()))?;
        }
        Ok(spec)
    }

    pub fn demux(&self, low_loss: bool) -> Result<ComponentSpec> {
        let mut spec = self.mux(low_loss)?;
        spec.kind = ComponentKind::DwdmDemux;
        spec.name = "dwdm_demux".into();
        Ok(spec)
    }

    pub fn wss(&self, low_loss_mux: bool, worst_case_switch: bool) -> Result<Wss> {
        Ok(Wss {
            demux: self.demux(low_loss_mux)?,
            switch: self.mechanical_switch(worst_case_switch)?,
            mux: self.mux(low_loss_mux)?,
        })
    }

    pub fn crosstalk_db(&self, name: &str) -> Result<Option<f64>> {
        Ok(self.entry(name)?.crosstalk_db)
    }

    pub fn latency_s(&self, name: &str) -> Result<f64> {
        Ok(self.entry(name)?.reconfig_latency_s.unwrap_or(0.0))
    }

    /// Makes every component lossless (fiber included). Used for degenerate checks.
    pub fn lossless(&self) -> Catalog {
        let mut out = self.clone();
        for e in out.components.values_mut() {
            if e.efficiency.is_some() {
                e.efficiency = Some(1.0);
            }
            for v in [
                &mut e.loss_db,
                &mut e.worst_case_loss_db,
                &mut e.low_loss_db,
                &mut e.loss_db_per_km,
            ] {
                if v.is_some() {
                    *v = Some(0.0);
                }
            }
        }
        out
    }
}

/// Extra attenuation suffered by NIR photons over telecom photons.
pub fn nir_vs_telecom_excess_loss(catalog: &Catalog, length_km: f64) -> Result<f64> {
    if !(length_km.is_finite() && length_km >= 0.0) {
        return domain(format!("fiber length must be ≥ 0, got {length_km}"));
    }
    let nir = catalog.fiber_loss_db_per_km(Band::Nir)?;
    let tele = catalog.fiber_loss_db_per_km(Band::Telecom)?;
    Ok((nir - tele) * length_km)
}
