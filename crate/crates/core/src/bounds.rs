//! Closed-form bounds: concatenated encoding success, planar storage
//! success, and the two-basis average fidelity bound.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Encoding circuit of `volume` gates with physical error rate `p`,
/// concatenated to level `levels`. `pairs` defaults to C(volume, 2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcatParams {
    pub p: f64,
    pub volume: f64,
    pub pairs: f64,
    pub levels: u32,
}

impl ConcatParams {
    pub fn new(p: f64, volume: f64, levels: u32) -> Result<Self> {
        let pairs = (volume * (volume - 1.0) / 2.0).max(1.0);
        Self::with_pairs(p, volume, pairs, levels)
    }

    pub fn with_pairs(p: f64, volume: f64, pairs: f64, levels: u32) -> Result<Self> {
        let s = Self {
            p,
            volume,
            pairs,
            levels,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("p must lie in [0,1], got {}", self.p)));
        }
        if !(self.volume >= 1.0) {
            return Err(Error::Domain(format!("volume must be ≥ 1, got {}", self.volume)));
        }
        if !(self.pairs >= 1.0) {
            return Err(Error::Domain(format!("pair count must be ≥ 1, got {}", self.pairs)));
        }
        Ok(())
    }

    /// c·p; concatenation helps only below 1.
    pub fn beta(&self) -> f64 {
        self.pairs * self.p
    }
}

/// Effective error rates p_0 … p_r from p_{k+1} = c·p_k².
pub fn level_error_rates(params: &ConcatParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(params.levels as usize + 1);
    let mut pk = params.p;
    for _ in 0..=params.levels {
        out.push(pk);
        pk = params.pairs * pk * pk;
    }
    out
}

/// p_k = (1/c)(cp)^{2^k}.
pub fn level_error_rate_closed_form(params: &ConcatParams, k: u32) -> f64 {
    let exponent = 2f64.powi(k as i32);
    params.beta().powf(exponent) / params.pairs
}

fn warn_above_threshold(params: &ConcatParams) {
    if params.beta() >= 1.0 {
        log::warn!(
            "c·p = {} ≥ 1: concatenation does not suppress errors at these parameters",
            params.beta()
        );
    }
}

/// ∏_{k=0}^{r} (1 − p_k)^v using the recurrence.
pub fn concat_success_product(params: &ConcatParams) -> Result<f64> {
    params.validate()?;
    warn_above_threshold(params);
    Ok(product(params, &level_error_rates(params)))
}

/// Same product with the closed-form level rates.
pub fn concat_success_product_closed_form(params: &ConcatParams) -> Result<f64> {
    params.validate()?;
    warn_above_threshold(params);
    let rates: Vec<f64> = (0..=params.levels)
        .map(|k| level_error_rate_closed_form(params, k))
        .collect();
    Ok(product(params, &rates))
}

fn product(params: &ConcatParams, rates: &[f64]) -> f64 {
    log_product(params, rates).exp()
}

fn log_product(params: &ConcatParams, rates: &[f64]) -> f64 {
    if rates.iter().any(|&r| r >= 1.0) {
        return f64::NEG_INFINITY;
    }
    rates.iter().map(|&r| params.volume * (-r).ln_1p()).sum()
}

/// ln p_s^{(r)}, without underflow for large volumes.
pub fn concat_log_success(params: &ConcatParams) -> Result<f64> {
    params.validate()?;
    Ok(log_product(params, &level_error_rates(params)))
}

/// e^{−pv}.
pub fn concat_fidelity_lower_bound(p: f64, volume: f64) -> f64 {
    (-p * volume).exp()
}

/// A bound that provably holds for c·p < 1: since −ln(1−x) ≤ x/(1−x) and
/// Σ_k (cp)^{2^k−1} ≤ 1/(1−cp), the product is at least
/// exp(−pv / ((1−p)(1−cp))).
pub fn concat_fidelity_corrected_bound(params: &ConcatParams) -> Option<f64> {
    let beta = params.beta();
    if beta >= 1.0 || params.p >= 1.0 {
        return None;
    }
    Some((-params.p * params.volume / ((1.0 - params.p) * (1.0 - beta))).exp())
}

/// Outcome of checking (1/v)·ln p_s^{(r)} ≥ −p on sampled parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainCheck {
    pub samples: usize,
    pub violations: usize,
    /// Largest value of −p − (1/v)·ln p_s^{(r)} seen (positive = violated).
    pub worst_gap: f64,
    pub worst: Option<ConcatParams>,
}

impl ChainCheck {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Draw parameter points with c·p ≤ 1/e: volume log-uniform in [2, 10⁴],
/// pair count log-uniform in [1, C(v,2)], p uniform in (0, 1/(e·c)].
pub fn sample_chain_params<R: Rng + ?Sized>(rng: &mut R, levels: u32) -> ConcatParams {
    let volume = (rng.random_range(2f64.ln()..=1e4f64.ln())).exp().round().max(2.0);
    let max_pairs = volume * (volume - 1.0) / 2.0;
    let pairs = rng.random_range(0.0..=max_pairs.ln()).exp();
    let p_max = 1.0 / (std::f64::consts::E * pairs);
    let p = rng.random_range(f64::MIN_POSITIVE..=p_max.min(1.0));
    ConcatParams {
        p,
        volume,
        pairs,
        levels,
    }
}

/// Evaluate the inequality chain (1/v)·ln p_s^{(r)} ≥ −p on `points`.
pub fn chain_check(points: &[ConcatParams]) -> Result<ChainCheck> {
    let mut out = ChainCheck {
        samples: points.len(),
        violations: 0,
        worst_gap: f64::NEG_INFINITY,
        worst: None,
    };
    for params in points {
        let gap = -params.p - concat_log_success(params)? / params.volume;
        if gap > 0.0 {
            out.violations += 1;
        }
        if gap > out.worst_gap {
            out.worst_gap = gap;
            out.worst = Some(*params);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StorageParams {
    pub rows: usize,
    pub cols: usize,
    pub steps: usize,
    pub p: f64,
}

/// α = 6·2·√((1−p)p).
pub fn storage_alpha(p: f64) -> f64 {
    12.0 * ((1.0 - p) * p).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StorageBound {
    Valid { alpha: f64, value: f64 },
    /// α ≥ 1 (no value) or a value ≤ 0: the bound says nothing.
    Vacuous { alpha: f64, value: Option<f64> },
}

impl StorageBound {
    pub fn value(&self) -> Option<f64> {
        match *self {
            StorageBound::Valid { value, .. } => Some(value),
            StorageBound::Vacuous { value, .. } => value,
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            StorageBound::Valid { alpha, .. } | StorageBound::Vacuous { alpha, .. } => alpha,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        matches!(self, StorageBound::Vacuous { .. })
    }
}

/// 1 − N·M·k·α^{max(N,M)}/(1−α).
pub fn storage_success_bound(params: &StorageParams) -> Result<StorageBound> {
    if params.rows == 0 || params.cols == 0 {
        return Err(Error::EmptyLattice {
            rows: params.rows,
            cols: params.cols,
        });
    }
    if !(0.0..=1.0).contains(&params.p) {
        return Err(Error::Domain(format!("p must lie in [0,1], got {}", params.p)));
    }
    let alpha = storage_alpha(params.p);
    if alpha >= 1.0 {
        return Ok(StorageBound::Vacuous { alpha, value: None });
    }
    let size = params.rows.max(params.cols) as i32;
    let value = 1.0
        - (params.rows * params.cols * params.steps) as f64 * alpha.powi(size) / (1.0 - alpha);
    Ok(if value > 0.0 {
        StorageBound::Valid { alpha, value }
    } else {
        StorageBound::Vacuous {
            alpha,
            value: Some(value),
        }
    })
}

/// F̄ ≥ F_x + F_z − 1.
pub fn hofmann_bound(fx: f64, fz: f64) -> Result<f64> {
    for (name, f) in [("F_x", fx), ("F_z", fz)] {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Domain(format!("{name} must lie in [0,1], got {f}")));
        }
    }
    Ok(fx + fz - 1.0)
}
