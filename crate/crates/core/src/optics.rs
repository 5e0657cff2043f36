//! Wavelength and frequency arithmetic, DWDM channel grids, phase-matching
//! planners for the three frequency-conversion processes and the affine
//! thermal tuning map of a χ(2) converter.
//!
//! All wavelengths are vacuum wavelengths in nanometers and all frequencies
//! are in GHz. With the speed of light expressed as `299_792_458 nm·GHz`,
//! `f = c / λ` needs no further scale factors.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Speed of light in vacuum, m/s (exact). Numerically equal to c in nm·GHz.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A vacuum wavelength in nanometers.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Wavelength(f64);

impl Wavelength {
    pub fn new(nm: f64) -> Result<Self> {
        if !(nm.is_finite() && nm > 0.0) {
            return domain(format!("wavelength must be positive and finite, got {nm} nm"));
        }
        Ok(Self(nm))
    }

    pub fn nm(self) -> f64 {
        self.0
    }

    pub fn frequency_ghz(self) -> f64 {
        SPEED_OF_LIGHT / self.0
    }

    pub fn from_frequency_ghz(ghz: f64) -> Result<Self> {
        if !(ghz.is_finite() && ghz > 0.0) {
            return domain(format!("frequency must be positive and finite, got {ghz} GHz"));
        }
        Self::new(SPEED_OF_LIGHT / ghz)
    }

    /// Wavenumber in cm⁻¹.
    pub fn wavenumber_cm1(self) -> f64 {
        1.0e7 / self.0
    }
}

pub fn wavelength_to_frequency(nm: f64) -> Result<f64> {
    Wavelength::new(nm).map(Wavelength::frequency_ghz)
}

pub fn frequency_to_wavelength(ghz: f64) -> Result<f64> {
    Wavelength::from_frequency_ghz(ghz).map(Wavelength::nm)
}

/// An equally spaced (in frequency) set of DWDM channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelGrid {
    pub start_nm: f64,
    pub end_nm: f64,
    pub spacing_ghz: f64,
    /// Channel center wavelengths, ordered by increasing frequency.
    pub channels_nm: Vec<f64>,
}

impl ChannelGrid {
    pub fn len(&self) -> usize {
        self.channels_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels_nm.is_empty()
    }

    /// Channel center frequencies, increasing.
    pub fn frequencies_ghz(&self) -> Vec<f64> {
        self.channels_nm.iter().map(|nm| SPEED_OF_LIGHT / nm).collect()
    }

    /// Index of the channel whose center lies closest to `nm`.
    pub fn nearest_channel(&self, nm: f64) -> Option<usize> {
        self.channels_nm
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - nm).abs().total_cmp(&(b.1 - nm).abs()))
            .map(|(i, _)| i)
    }
}

/// Builds the channel grid between `start_nm` (short-wavelength end) and
/// `end_nm`, anchored at the frequency of `start_nm`.
///
/// Channel `i` sits at `f(start) - i * spacing` and every channel whose
/// frequency is at least `f(end)` is kept. A range narrower than one spacing
/// does not hold a full channel and is rejected.
pub fn build_itu_grid(start_nm: f64, end_nm: f64, spacing_ghz: f64) -> Result<ChannelGrid> {
    let start = Wavelength::new(start_nm)?;
    let end = Wavelength::new(end_nm)?;
    if !(spacing_ghz.is_finite() && spacing_ghz > 0.0) {
        return domain(format!("grid spacing must be positive, got {spacing_ghz} GHz"));
    }
    if start_nm >= end_nm {
        return domain(format!("grid start {start_nm} nm must be below end {end_nm} nm"));
    }
    let span = start.frequency_ghz() - end.frequency_ghz();
    if span < spacing_ghz {
        return domain(format!(
            "range {start_nm}–{end_nm} nm spans {span:.6} GHz, less than one {spacing_ghz} GHz channel"
        ));
    }
    let count = (span / spacing_ghz).floor() as usize + 1;
    let anchor = start.frequency_ghz();
    let channels_nm = (0..count)
        .rev()
        .map(|i| SPEED_OF_LIGHT / (anchor - i as f64 * spacing_ghz))
        .collect();
    Ok(ChannelGrid {
        start_nm,
        end_nm,
        spacing_ghz,
        channels_nm,
    })
}

/// The three nonlinear processes an RQI can use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConversionProcess {
    /// χ(2) difference-frequency generation: ω_idler = ω_signal − ω_pump.
    DfgChi2,
    /// χ(3) four-wave-mixing Bragg scattering: ω_idler = ω_signal + ω_p1 − ω_p2.
    FwmBsChi3,
    /// χ(3) third-order DFG with a degenerate pump: ω_idler = ω_signal − 2ω_pump.
    TdfgChi3,
}

impl ConversionProcess {
    /// Signed photon-frequency sum for a planned tuple. Zero when energy is
    /// conserved. `pumps` holds one wavelength for DFG/TDFG and two for FWM-BS.
    pub fn energy_residual_ghz(self, signal_nm: f64, idler_nm: f64, pumps: &[f64]) -> f64 {
        let f = |nm: f64| SPEED_OF_LIGHT / nm;
        match self {
            Self::DfgChi2 => f(signal_nm) - f(idler_nm) - f(pumps[0]),
            Self::TdfgChi3 => f(signal_nm) - f(idler_nm) - 2.0 * f(pumps[0]),
            Self::FwmBsChi3 => f(signal_nm) + f(pumps[0]) - f(pumps[1]) - f(idler_nm),
        }
    }
}

/// Pump wavelength that phase-matches `signal → idler` by χ(2) DFG.
pub fn dfg_pump_for(signal_nm: f64, idler_nm: f64) -> Result<f64> {
    let s = Wavelength::new(signal_nm)?;
    let i = Wavelength::new(idler_nm)?;
    if i.nm() <= s.nm() {
        return domain(format!(
            "DFG needs idler ({idler_nm} nm) longer than signal ({signal_nm} nm)"
        ));
    }
    Ok(1.0 / (1.0 / s.nm() - 1.0 / i.nm()))
}

/// Idler produced by TDFG from `signal` with two degenerate pump photons.
pub fn tdfg_idler_for(signal_nm: f64, pump_nm: f64) -> Result<f64> {
    let s = Wavelength::new(signal_nm)?;
    let p = Wavelength::new(pump_nm)?;
    let inv = 1.0 / s.nm() - 2.0 / p.nm();
    if inv <= 0.0 {
        return domain(format!(
            "TDFG idler frequency is non-positive for signal {signal_nm} nm, pump {pump_nm} nm"
        ));
    }
    Ok(1.0 / inv)
}

/// Idler produced by FWM Bragg scattering.
pub fn fwm_bs_idler_for(signal_nm: f64, pump1_nm: f64, pump2_nm: f64) -> Result<f64> {
    let s = Wavelength::new(signal_nm)?;
    let p1 = Wavelength::new(pump1_nm)?;
    let p2 = Wavelength::new(pump2_nm)?;
    let inv = 1.0 / s.nm() + 1.0 / p1.nm() - 1.0 / p2.nm();
    if inv <= 0.0 {
        return domain(format!(
            "FWM-BS idler frequency is non-positive for signal {signal_nm} nm, pumps {pump1_nm}/{pump2_nm} nm"
        ));
    }
    Ok(1.0 / inv)
}

/// Affine temperature tuning of a converter's phase-matched wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningModel {
    /// Phase-matched wavelength shift, nm per °C.
    pub slope_nm_per_c: f64,
    pub reference_temperature_c: f64,
}

impl TuningModel {
    pub fn new(slope_nm_per_c: f64, reference_temperature_c: f64) -> Result<Self> {
        if !(slope_nm_per_c.is_finite() && slope_nm_per_c > 0.0) {
            return domain(format!("tuning slope must be positive, got {slope_nm_per_c}"));
        }
        Ok(Self {
            slope_nm_per_c,
            reference_temperature_c,
        })
    }
}

impl Default for TuningModel {
    fn default() -> Self {
        Self {
            slope_nm_per_c: 0.27,
            reference_temperature_c: 25.0,
        }
    }
}

/// Signed temperature change moving the phase-matched wavelength from
/// `current_nm` to `target_nm`.
pub fn temperature_for_target(current_nm: f64, target_nm: f64, model: &TuningModel) -> Result<f64> {
    if !(model.slope_nm_per_c.is_finite() && model.slope_nm_per_c > 0.0) {
        return domain("tuning slope must be positive");
    }
    Ok((target_nm - current_nm) / model.slope_nm_per_c)
}

/// A DFG retuning plan from the converter's current channel to a target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TuningPlan {
    pub signal_nm: f64,
    pub current_idler_nm: f64,
    pub target_idler_nm: f64,
    pub pump_nm: f64,
    pub delta_t_c: f64,
    pub temperature_c: f64,
}

pub fn plan_dfg_retune(
    signal_nm: f64,
    current_idler_nm: f64,
    target_idler_nm: f64,
    model: &TuningModel,
) -> Result<TuningPlan> {
    let pump_nm = dfg_pump_for(signal_nm, target_idler_nm)?;
    let delta_t_c = temperature_for_target(current_idler_nm, target_idler_nm, model)?;
    Ok(TuningPlan {
        signal_nm,
        current_idler_nm,
        target_idler_nm,
        pump_nm,
        delta_t_c,
        temperature_c: model.reference_temperature_c + delta_t_c,
    })
}
