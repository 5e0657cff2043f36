//! Intra-cavity time-division multiplexed entanglement attempts.
//!
//! A cycle shuttles `k` atoms into the cavity, then runs `M` rounds. Each
//! round re-initializes the remaining atoms and fires one attempt per atom;
//! entangled atoms leave the pool. The rate is expected successes per cycle
//! over expected cycle time.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::components::PathChain;
use crate::error::{config, domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TdmParams {
    pub t_move: f64,
    pub t_init: f64,
    pub t_ent: f64,
    pub m: u32,
    pub k: u64,
    pub p_suc: f64,
}

impl Default for TdmParams {
    fn default() -> Self {
        Self {
            t_move: 100e-6,
            t_init: 10e-6,
            t_ent: 1.09e-6,
            m: 5,
            k: 20,
            p_suc: 0.25,
        }
    }
}

impl TdmParams {
    /// Attempt time tuned so that the single-atom ceiling is 2.3 MHz at p_suc = 0.25.
    pub fn fast_attempt() -> Self {
        Self {
            t_ent: 0.25 / 2.3e6,
            ..Self::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::default()),
            "fast-attempt" => Ok(Self::fast_attempt()),
            other => config(format!("unknown TDM preset `{other}`")),
        }
    }

    pub fn with_k(self, k: u64) -> Self {
        Self { k, ..self }
    }

    pub fn with_m(self, m: u32) -> Self {
        Self { m, ..self }
    }

    pub fn with_p(self, p_suc: f64) -> Self {
        Self { p_suc, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [("t_move", self.t_move), ("t_init", self.t_init), ("t_ent", self.t_ent)] {
            if !(t.is_finite() && t >= 0.0) {
                return domain(format!("{name} must be ≥ 0, got {t}"));
            }
        }
        if !(0.0..=1.0).contains(&self.p_suc) {
            return domain(format!("p_suc must lie in [0, 1], got {}", self.p_suc));
        }
        if self.m == 0 {
            return domain("M must be ≥ 1");
        }
        if self.k == 0 {
            return domain("k must be ≥ 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub rate_hz: f64,
    pub attempts_per_round: Vec<f64>,
    pub expected_successes_per_cycle: f64,
    pub expected_cycle_time_s: f64,
}

/// Expected attempts per round: N₁ = k, Nᵢ = Nᵢ₋₁(1 − p).
pub fn attempt_counts(k: u64, m: u32, p_suc: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m as usize);
    let mut n = k as f64;
    for _ in 0..m {
        out.push(n);
        n *= 1.0 - p_suc;
    }
    out
}

pub fn bell_pair_rate(p: &TdmParams) -> Result<RateResult> {
    p.validate()?;
    let counts = attempt_counts(p.k, p.m, p.p_suc);
    let total: f64 = counts.iter().sum();
    let successes = total * p.p_suc;
    let cycle = p.t_move + p.m as f64 * p.t_init + total * p.t_ent;
    if cycle <= 0.0 {
        return domain("cycle time is zero");
    }
    Ok(RateResult {
        rate_hz: successes / cycle,
        attempts_per_round: counts,
        expected_successes_per_cycle: successes,
        expected_cycle_time_s: cycle,
    })
}

/// Large-k ceiling p/t_ent.
pub fn asymptotic_rate(p: &TdmParams) -> Result<f64> {
    if !(p.t_ent > 0.0) {
        return domain("t_ent must be > 0 for the asymptotic rate");
    }
    Ok(p.p_suc / p.t_ent)
}

/// Best round count in `1..=m_max`; ties go to the smaller M.
pub fn optimal_m(p: &TdmParams, m_max: u32) -> Result<(u32, f64)> {
    if m_max == 0 {
        return domain("M_max must be ≥ 1");
    }
    let mut best = (1, bell_pair_rate(&p.with_m(1))?.rate_hz);
    for m in 2..=m_max {
        let r = bell_pair_rate(&p.with_m(m))?.rate_hz;
        if r > best.1 {
            best = (m, r);
        }
    }
    Ok(best)
}

/// Integer-atom simulation of `cycles` TDM cycles with binomial successes per round.
pub fn monte_carlo_rate(p: &TdmParams, cycles: u64, seed: u64) -> Result<f64> {
    p.validate()?;
    if cycles == 0 {
        return domain("cycles must be ≥ 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes: u64 = 0;
    let mut attempts: u64 = 0;
    for _ in 0..cycles {
        let mut pool = p.k;
        for _ in 0..p.m {
            if pool == 0 {
                break;
            }
            attempts += pool;
            let s = Binomial::new(pool, p.p_suc)
                .expect("p_suc validated")
                .sample(&mut rng);
            successes += s;
            pool -= s;
        }
    }
    let time = cycles as f64 * (p.t_move + p.m as f64 * p.t_init) + attempts as f64 * p.t_ent;
    if time <= 0.0 {
        return domain("cycle time is zero");
    }
    Ok(successes as f64 / time)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EmissionConvention {
    /// One emission probability for the pair.
    Joint,
    /// Each arm emits independently.
    #[default]
    PerArm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessModel {
    pub p_bsm: f64,
    pub p_emit: f64,
    pub convention: EmissionConvention,
    pub arm_a: PathChain,
    pub arm_b: PathChain,
}

impl SuccessModel {
    pub fn new(p_bsm: f64, p_emit: f64, convention: EmissionConvention) -> Self {
        Self {
            p_bsm,
            p_emit,
            convention,
            arm_a: PathChain::new(),
            arm_b: PathChain::new(),
        }
    }

    pub fn with_arms(mut self, a: PathChain, b: PathChain) -> Self {
        self.arm_a = a;
        self.arm_b = b;
        self
    }
}

pub fn p_success(model: &SuccessModel) -> Result<f64> {
    for (name, v) in [("p_bsm", model.p_bsm), ("p_emit", model.p_emit)] {
        if !(0.0..=1.0).contains(&v) {
            return domain(format!("{name} must lie in [0, 1], got {v}"));
        }
    }
    let eta_a = model.arm_a.transmittance();
    let eta_b = model.arm_b.transmittance();
    let p = match model.convention {
        EmissionConvention::Joint => model.p_bsm * model.p_emit * eta_a * eta_b,
        EmissionConvention::PerArm => model.p_bsm * (model.p_emit * eta_a) * (model.p_emit * eta_b),
    };
    Ok(p)
}
