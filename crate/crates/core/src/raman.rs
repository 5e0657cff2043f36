//! Spontaneous Raman noise in a pumped χ² waveguide.
//!
//! The Raman shift Ω = ω_s − ω_0 is signed: negative for Stokes (red-shifted)
//! scattering, positive for anti-Stokes. All public interfaces use cm⁻¹;
//! internally frequencies are angular (rad/s).

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};
use crate::optics::SPEED_OF_LIGHT;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / (2.0 * PI);
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// rad/s per cm⁻¹.
pub const CM1_TO_RAD_S: f64 = 2.0 * PI * SPEED_OF_LIGHT * 100.0;

const DEFAULT_PHONONS: &str = include_str!("../data/phonons.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhononMode {
    pub label: String,
    /// Peak position extrapolated to T = 0.
    pub omega0_cm1: f64,
    /// Half-width extrapolated to T = 0.
    pub gamma0_cm1: f64,
    /// Oscillator strength f_j in cm⁻²·m²/V².
    pub strength_cm2: f64,
    pub b_cm1: f64,
    pub c_cm1_per_k2: f64,
    pub d_cm1: f64,
    pub k_per_k: f64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamanModel {
    pub version: String,
    pub material: String,
    /// True only when the mode table is transcribed from fitted measurements.
    pub verified_source: bool,
    pub source: String,
    pub n_s: f64,
    pub n_0: f64,
    pub reference_temperature_k: f64,
    pub modes: Vec<PhononMode>,
}

impl Default for RamanModel {
    fn default() -> Self {
        Self::from_json(DEFAULT_PHONONS, "built-in phonon table").expect("built-in phonon table is valid")
    }
}

impl RamanModel {
    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let model: RamanModel = serde_json::from_str(text).map_err(|source| Error::Json {
            context: context.to_string(),
            source,
        })?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_s >= 1.0 && self.n_0 >= 1.0) {
            return config("refractive indices must be ≥ 1");
        }
        if self.modes.is_empty() {
            return config("phonon table has no modes");
        }
        for m in &self.modes {
            if !(m.omega0_cm1 > 0.0 && m.gamma0_cm1 > 0.0) {
                return config(format!("mode {}: ω(0) and γ(0) must be > 0", m.label));
            }
        }
        Ok(())
    }

    pub fn single_mode(omega_cm1: f64, gamma_cm1: f64, strength_cm2: f64) -> Self {
        Self {
            version: "1.0".into(),
            material: "test".into(),
            verified_source: false,
            source: "synthetic".into(),
            n_s: 1.0,
            n_0: 1.0,
            reference_temperature_k: 300.0,
            modes: vec![PhononMode {
                label: "m".into(),
                omega0_cm1: omega_cm1,
                gamma0_cm1: gamma_cm1,
                strength_cm2,
                b_cm1: 0.0,
                c_cm1_per_k2: 0.0,
                d_cm1: 0.0,
                k_per_k: 0.0,
                source: "synthetic".into(),
            }],
        }
    }

    /// Scales every oscillator strength.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.modes {
            m.strength_cm2 *= factor;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideGeometry {
    pub length_m: f64,
    pub overlap_per_m2: f64,
}

impl Default for WaveguideGeometry {
    fn default() -> Self {
        Self::gaussian(0.03, 3e-6, 3e-6).expect("default geometry is valid")
    }
}

impl WaveguideGeometry {
    pub fn new(length_m: f64, overlap_per_m2: f64) -> Result<Self> {
        if !(length_m > 0.0 && overlap_per_m2 > 0.0) {
            return domain("waveguide length and overlap must be > 0");
        }
        Ok(Self {
            length_m,
            overlap_per_m2,
        })
    }

    pub fn gaussian(length_m: f64, pump_waist_m: f64, signal_waist_m: f64) -> Result<Self> {
        Self::new(length_m, overlap_gaussian(pump_waist_m, signal_waist_m)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpConfig {
    pub pump_nm: f64,
    pub power_w: f64,
    pub signal_nm: f64,
}

impl PumpConfig {
    pub fn new(pump_nm: f64, power_w: f64, signal_nm: f64) -> Result<Self> {
        if !(pump_nm > 0.0 && signal_nm > 0.0) {
            return domain("wavelengths must be > 0");
        }
        if !(power_w >= 0.0) {
            return domain(format!("pump power must be ≥ 0, got {power_w}"));
        }
        Ok(Self {
            pump_nm,
            power_w,
            signal_nm,
        })
    }
}

/// Bose-Einstein occupation of a phonon at |Ω|.
pub fn phonon_occupation(omega_cm1: f64, temperature_k: f64) -> Result<f64> {
    if !(temperature_k > 0.0) {
        return domain(format!("temperature must be > 0 K, got {temperature_k}"));
    }
    if omega_cm1 == 0.0 || !omega_cm1.is_finite() {
        return domain("occupation diverges at Ω = 0");
    }
    let x = HBAR * omega_cm1.abs() * CM1_TO_RAD_S / (BOLTZMANN * temperature_k);
    Ok(1.0 / x.exp_m1())
}

/// h(Ω): 1 + ⟨n⟩ on the Stokes side, ⟨n⟩ on the anti-Stokes side.
pub fn occupation_factor(omega_cm1: f64, temperature_k: f64) -> Result<f64> {
    let n = phonon_occupation(omega_cm1, temperature_k)?;
    Ok(if omega_cm1 < 0.0 { 1.0 + n } else { n })
}

/// Anharmonic peak position and half-width at `temperature_k`, in cm⁻¹.
pub fn mode_params_at_temperature(mode: &PhononMode, temperature_k: f64) -> Result<(f64, f64)> {
    let n_half = phonon_occupation(mode.omega0_cm1 / 2.0, temperature_k)?;
    let decay = 1.0 + 2.0 * n_half;
    let omega = mode.omega0_cm1 * (1.0 + mode.k_per_k * temperature_k) - mode.d_cm1 * decay;
    let gamma = mode.gamma0_cm1 + mode.b_cm1 * decay + mode.c_cm1_per_k2 * temperature_k.powi(2);
    Ok((omega, gamma))
}

/// Sum of damped-oscillator responses, in m²/V².
pub fn susceptibility(omega_cm1: f64, model: &RamanModel, temperature_k: f64) -> Result<Complex64> {
    let big_omega = omega_cm1 * CM1_TO_RAD_S;
    let mut chi = Complex64::new(0.0, 0.0);
    for mode in &model.modes {
        let (w, g) = mode_params_at_temperature(mode, temperature_k)?;
        let (w, g) = (w * CM1_TO_RAD_S, g * CM1_TO_RAD_S);
        let f = mode.strength_cm2 * CM1_TO_RAD_S * CM1_TO_RAD_S;
        chi += f / Complex64::new(w * w - big_omega * big_omega, 2.0 * g * big_omega);
    }
    Ok(chi)
}

pub fn overlap_gaussian(pump_waist_m: f64, signal_waist_m: f64) -> Result<f64> {
    if !(pump_waist_m > 0.0 && signal_waist_m > 0.0) {
        return domain("mode waists must be > 0");
    }
    Ok(2.0 / (PI * (pump_waist_m.powi(2) + signal_waist_m.powi(2))))
}

/// Ω = ω_s − ω_0 in cm⁻¹.
pub fn raman_shift_cm1(pump_nm: f64, scattered_nm: f64) -> f64 {
    1e7 / scattered_nm - 1e7 / pump_nm
}

/// Scattered wavelength for a pump and signed shift.
pub fn scattered_for_shift(pump_nm: f64, omega_cm1: f64) -> Result<f64> {
    let nu = 1e7 / pump_nm + omega_cm1;
    if !(nu > 0.0) {
        return domain("shift exceeds the pump frequency");
    }
    Ok(1e7 / nu)
}

/// Pump that produces the opposite-branch photon at `signal_nm` with the same |Ω|.
pub fn mirrored_pump(pump_nm: f64, signal_nm: f64) -> Result<f64> {
    let nu = 2.0 * 1e7 / signal_nm - 1e7 / pump_nm;
    if !(nu > 0.0) {
        return domain("mirrored pump frequency is non-positive");
    }
    Ok(1e7 / nu)
}

/// Spatial gain G of dN_s/dz = G·(N_s + 1), per metre, with N_s the photon
/// flux per unit angular frequency.
pub fn gain_coefficient(
    pump: &PumpConfig,
    geom: &WaveguideGeometry,
    model: &RamanModel,
    temperature_k: f64,
    scattered_nm: f64,
) -> Result<f64> {
    let omega = raman_shift_cm1(pump.pump_nm, scattered_nm);
    let h = occupation_factor(omega, temperature_k)?;
    let chi_im = susceptibility(omega, model, temperature_k)?.im.abs();
    let lambda = scattered_nm * 1e-9;
    let omega_s = 2.0 * PI * SPEED_OF_LIGHT / lambda;
    Ok(3.0 * omega_s * pump.power_w * chi_im * h * geom.overlap_per_m2
        / (2.0 * model.n_s * model.n_0 * EPSILON_0 * SPEED_OF_LIGHT.powi(2)))
}

/// Noise photons per second per nm of scattered bandwidth.
pub fn noise_spectral_density(
    pump: &PumpConfig,
    geom: &WaveguideGeometry,
    model: &RamanModel,
    temperature_k: f64,
    scattered_nm: f64,
) -> Result<f64> {
    let omega = raman_shift_cm1(pump.pump_nm, scattered_nm);
    let h = occupation_factor(omega, temperature_k)?;
    let chi_im = susceptibility(omega, model, temperature_k)?.im.abs();
    let lambda = scattered_nm * 1e-9;
    let per_m = 6.0 * PI * PI * pump.power_w * h * geom.overlap_per_m2 * chi_im * geom.length_m
        / (EPSILON_0 * lambda.powi(3) * model.n_s * model.n_0);
    Ok(per_m * 1e-9)
}

/// RK4 solution of dN/dz = g·(N + 1) from N(0) = 0 over `length_m`.
pub fn integrate_gain_ode(gain_per_m: f64, length_m: f64, steps: u32) -> Result<f64> {
    if steps == 0 {
        return domain("steps must be ≥ 1");
    }
    let dz = length_m / steps as f64;
    let f = |n: f64| gain_per_m * (n + 1.0);
    let mut n = 0.0;
    for _ in 0..steps {
        let k1 = f(n);
        let k2 = f(n + 0.5 * dz * k1);
        let k3 = f(n + 0.5 * dz * k2);
        let k4 = f(n + dz * k3);
        n += dz / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Ok(n)
}

pub fn evolve_photon_number(
    pump: &PumpConfig,
    geom: &WaveguideGeometry,
    model: &RamanModel,
    temperature_k: f64,
    omega_cm1: f64,
    steps: u32,
) -> Result<f64> {
    let scattered = scattered_for_shift(pump.pump_nm, omega_cm1)?;
    let g = gain_coefficient(pump, geom, model, temperature_k, scattered)?;
    integrate_gain_ode(g, geom.length_m, steps)
}

pub fn noise_counts_in_filter(nsd_per_s_per_nm: f64, bandwidth_nm: f64, efficiency: f64) -> Result<f64> {
    if !(bandwidth_nm >= 0.0) {
        return domain(format!("filter bandwidth must be ≥ 0, got {bandwidth_nm}"));
    }
    if !(0.0..=1.0).contains(&efficiency) {
        return domain(format!("efficiency must lie in [0, 1], got {efficiency}"));
    }
    Ok(nsd_per_s_per_nm * bandwidth_nm * efficiency)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Stokes,
    AntiStokes,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Stokes => "stokes",
            Branch::AntiStokes => "antistokes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub pump_nm: f64,
    pub scattered_nm: f64,
    pub raman_shift_cm1: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    pub nsd_per_s_per_nm: f64,
    pub branch: Branch,
}

/// Noise at `signal_nm` for each long-wavelength pump and temperature.
///
/// Each pump yields an anti-Stokes row and a Stokes row at the mirrored pump
/// with the same |Ω|. Rows are ordered by temperature, then pump, then branch.
pub fn spectrum(
    model: &RamanModel,
    geom: &WaveguideGeometry,
    power_w: f64,
    signal_nm: f64,
    pumps_nm: &[f64],
    temperatures_k: &[f64],
) -> Result<Vec<SpectrumRow>> {
    let points: Vec<(f64, f64)> = temperatures_k
        .iter()
        .flat_map(|&t| pumps_nm.iter().map(move |&p| (t, p)))
        .collect();
    let rows: Result<Vec<[SpectrumRow; 2]>> = points
        .par_iter()
        .map(|&(t, pump_nm)| {
            let anti = PumpConfig::new(pump_nm, power_w, signal_nm)?;
            let stokes = PumpConfig::new(mirrored_pump(pump_nm, signal_nm)?, power_w, signal_nm)?;
            let row = |cfg: PumpConfig, branch| -> Result<SpectrumRow> {
                Ok(SpectrumRow {
                    pump_nm: cfg.pump_nm,
                    scattered_nm: signal_nm,
                    raman_shift_cm1: raman_shift_cm1(cfg.pump_nm, signal_nm),
                    temperature_k: t,
                    nsd_per_s_per_nm: noise_spectral_density(&cfg, geom, model, t, signal_nm)?,
                    branch,
                })
            };
            Ok([row(anti, Branch::AntiStokes)?, row(stokes, Branch::Stokes)?])
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn occupation_examples() {
        assert!((phonon_occupation(252.0, 300.0).unwrap() - 0.426).abs() < 1e-3);
        assert!(phonon_occupation(252.0, 1e-3).unwrap() < 1e-300);
        assert!(phonon_occupation(252.0, 0.0).is_err());
        assert!(phonon_occupation(0.0, 300.0).is_err());
        let d = occupation_factor(-300.0, 250.0).unwrap() - occupation_factor(300.0, 250.0).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn susceptibility_examples() {
        let model = RamanModel::default();
        let chi0 = susceptibility(0.0, &model, 300.0).unwrap();
        assert_eq!(chi0.im, 0.0);
        let expected: f64 = model
            .modes
            .iter()
            .map(|m| {
                let (w, _) = mode_params_at_temperature(m, 300.0).unwrap();
                m.strength_cm2 / (w * w)
            })
            .sum();
        assert!(rel(chi0.re, expected) < 1e-12);

        let single = RamanModel::single_mode(300.0, 5.0, 1e-18);
        let (w, g) = mode_params_at_temperature(&single.modes[0], 300.0).unwrap();
        let chi = susceptibility(w, &single, 300.0).unwrap();
        let peak = -1e-18 / (2.0 * g * w);
        assert!(chi.re.abs() < 1e-12 * peak.abs());
        assert!(rel(chi.im, peak) < 1e-12);
    }

    #[test]
    fn temperature_dependence() {
        let mut m = RamanModel::default().modes[0].clone();
        m.k_per_k = 0.0;
        m.d_cm1 = 0.0;
        assert_eq!(mode_params_at_temperature(&m, 370.0).unwrap().0, m.omega0_cm1);
        m.b_cm1 = 0.0;
        m.c_cm1_per_k2 = 0.0;
        assert_eq!(mode_params_at_temperature(&m, 370.0).unwrap().1, m.gamma0_cm1);
    }

    #[test]
    fn shipped_modes() {
        let model = RamanModel::default();
        assert!(!model.verified_source);
        let peaks: Vec<f64> = model
            .modes
            .iter()
            .map(|m| mode_params_at_temperature(m, 300.0).unwrap().0)
            .collect();
        for (p, want) in peaks.iter().zip([252.0, 274.0, 632.0]) {
            assert!((p - want).abs() < 0.5, "{p} vs {want}");
        }
        for m in &model.modes {
            let mut prev = mode_params_at_temperature(m, 300.0).unwrap();
            for t in (305..=400).step_by(5) {
                let cur = mode_params_at_temperature(m, t as f64).unwrap();
                assert!(cur.0 < prev.0 && cur.1 > prev.1);
                prev = cur;
            }
        }
    }

    #[test]
    fn overlap_examples() {
        let w = 1e-6;
        assert!(rel(overlap_gaussian(w, w).unwrap(), 1.0 / (PI * w * w)) < 1e-15);
        assert!(rel(overlap_gaussian(w, w).unwrap(), 3.183_098_861_837_9e11) < 1e-12);
        assert_eq!(overlap_gaussian(2e-6, 5e-6).unwrap(), overlap_gaussian(5e-6, 2e-6).unwrap());
        assert!(overlap_gaussian(0.0, 1e-6).is_err());
    }

    #[test]
    fn nsd_scaling_and_limits() {
        let model = RamanModel::default();
        let geom = WaveguideGeometry::default();
        let pump = PumpConfig::new(1600.0, 0.2, 1520.0).unwrap();
        let base = noise_spectral_density(&pump, &geom, &model, 300.0, 1520.0).unwrap();
        let p2 = PumpConfig { power_w: 0.4, ..pump };
        assert!(rel(noise_spectral_density(&p2, &geom, &model, 300.0, 1520.0).unwrap(), 2.0 * base) < 1e-12);
        let g2 = WaveguideGeometry { length_m: 0.06, ..geom };
        assert!(rel(noise_spectral_density(&pump, &g2, &model, 300.0, 1520.0).unwrap(), 2.0 * base) < 1e-12);
        assert!(noise_spectral_density(&pump, &geom, &model, 300.0, 1600.0).is_err());

        let cold = 2.0;
        let anti = noise_spectral_density(&pump, &geom, &model, cold, 1520.0).unwrap();
        let stokes_pump = PumpConfig::new(mirrored_pump(1600.0, 1520.0).unwrap(), 0.2, 1520.0).unwrap();
        let stokes = noise_spectral_density(&stokes_pump, &geom, &model, cold, 1520.0).unwrap();
        assert!(anti < 1e-30);
        assert!(stokes > 0.0);
    }

    #[test]
    fn c6_matches_gain_times_jacobian() {
        let model = RamanModel::default();
        let geom = WaveguideGeometry::default();
        for (pump_nm, s) in [(1598.0, 1521.3), (1550.0, 1590.0), (1602.32, 1519.86)] {
            let pump = PumpConfig::new(pump_nm, 0.2, s).unwrap();
            let g = gain_coefficient(&pump, &geom, &model, 310.0, s).unwrap();
            let lam = s * 1e-9;
            let d_omega_d_lambda = 2.0 * PI * SPEED_OF_LIGHT / (lam * lam);
            let via_gain = g * geom.length_m * d_omega_d_lambda * 1e-9;
            let nsd = noise_spectral_density(&pump, &geom, &model, 310.0, s).unwrap();
            assert!(rel(via_gain, nsd) < 1e-6);
        }
    }

    #[test]
    fn ode_solutions() {
        assert_eq!(integrate_gain_ode(0.0, 1.0, 10).unwrap(), 0.0);
        let (g, l) = (0.2, 0.03);
        assert!(rel(integrate_gain_ode(g, l, 10).unwrap(), g * l) < 0.01);
        let (g, l) = (40.0, 0.05);
        assert!(rel(integrate_gain_ode(g, l, 2000).unwrap(), (g * l).exp_m1()) < 1e-6);
        assert!(integrate_gain_ode(1.0, 1.0, 0).is_err());

        let model = RamanModel::default();
        let geom = WaveguideGeometry::default();
        let pump = PumpConfig::new(1600.0, 0.2, 1520.0).unwrap();
        let omega = raman_shift_cm1(1600.0, 1520.0);
        let n = evolve_photon_number(&pump, &geom, &model, 300.0, omega, 100).unwrap();
        let g = gain_coefficient(&pump, &geom, &model, 300.0, 1520.0).unwrap();
        assert!(rel(n, g * geom.length_m) < 0.01);
    }

    #[test]
    fn filter_counts() {
        assert_eq!(noise_counts_in_filter(1e6, 0.0, 0.5).unwrap(), 0.0);
        assert!((noise_counts_in_filter(1e6, 1e-4, 0.5).unwrap() - 50.0).abs() < 1e-9);
        let a = noise_counts_in_filter(3e5, 0.02, 0.8).unwrap();
        let b = noise_counts_in_filter(3e5, 0.04, 0.8).unwrap();
        assert!(rel(b, 2.0 * a) < 1e-15);
        assert!(noise_counts_in_filter(1.0, -1.0, 0.5).is_err());
    }

    #[test]
    fn spectrum_is_deterministic() {
        let model = RamanModel::default();
        let geom = WaveguideGeometry::default();
        let pumps: Vec<f64> = (0..9).map(|i| 1594.22 + i as f64).collect();
        let a = spectrum(&model, &geom, 0.2, 1520.0, &pumps, &[300.0, 350.0]).unwrap();
        let b = spectrum(&model, &geom, 0.2, 1520.0, &pumps, &[300.0, 350.0]).unwrap();
        assert_eq!(a.len(), 36);
        assert_eq!(a, b);
        assert_eq!(a[0].branch, Branch::AntiStokes);
        assert!(a[0].raman_shift_cm1 > 0.0 && a[1].raman_shift_cm1 < 0.0);
        assert!((a[0].raman_shift_cm1 + a[1].raman_shift_cm1).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn im_chi_is_odd(omega in 1.0f64..1500.0, t in 10.0f64..600.0) {
            let model = RamanModel::default();
            let a = susceptibility(omega, &model, t).unwrap().im;
            let b = susceptibility(-omega, &model, t).unwrap().im;
            prop_assert!((a + b).abs() <= 1e-10 * a.abs());
        }

        #[test]
        fn detailed_balance(omega in 1.0f64..1500.0, t in 10.0f64..600.0) {
            let ratio = occupation_factor(-omega, t).unwrap() / occupation_factor(omega, t).unwrap();
            let want = (HBAR * omega * CM1_TO_RAD_S / (BOLTZMANN * t)).exp();
            prop_assert!((ratio / want - 1.0).abs() < 1e-10);
        }

        #[test]
        fn nsd_linear_in_overlap(scale in 0.1f64..10.0) {
            let model = RamanModel::default();
            let geom = WaveguideGeometry::default();
            let pump = PumpConfig::new(1598.0, 0.2, 1520.0).unwrap();
            let wider = WaveguideGeometry { overlap_per_m2: geom.overlap_per_m2 * scale, ..geom };
            let a = noise_spectral_density(&pump, &geom, &model, 300.0, 1520.0).unwrap();
            let b = noise_spectral_density(&pump, &wider, &model, 300.0, 1520.0).unwrap();
            prop_assert!((b / (a * scale) - 1.0).abs() < 1e-12);
        }
    }
}
