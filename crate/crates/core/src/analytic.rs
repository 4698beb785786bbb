//! Closed-form results for the infinite XY chain: the long-time limit after
//! the field quench and the canonical state, each as a single integral over
//! `φ ∈ [0, π]`.
//!
//! With `Λ(x) = sqrt(γ² sin²φ + (x − cos φ)²)` and `θ(Λ) = tanh(β̃Λ/2)/Λ`:
//!
//! * long-time `G(R) = (1/π)∫ θ(Λ(ã)) / Λ(0)² · (γ sin(Rφ) sin φ − cos²φ)(γ² sin²φ + (cos φ − ã) cos φ)`
//! * long-time `Mᶻ = −(1/π)∫ θ(Λ(ã)) / Λ(0)² · cos φ [(cos φ − ã) cos φ + γ² sin²φ]`
//! * canonical `G(R) = (1/π)∫ θ(Λ(ã)) (γ sin(Rφ) sin φ − cos φ (cos φ − ã))`
//! * canonical `Mᶻ = −(1/π)∫ θ(Λ(ã)) (cos φ − ã)`
//!
//! and `Tˣˣ = G(−1)`, `Tʸʸ = G(1)`, `Tᶻᶻ = (Mᶻ)² − G(1)G(−1)`. All values are in
//! Pauli normalization.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{logarithmic_negativity, two_site_from_correlators, CorrelatorSet, EntanglementValue};
use crate::quadrature::{integrate, Estimate, QuadratureSpec};

/// Smallest anisotropy accepted; the integrands develop a sharp dip at
/// `φ = π/2` as `γ → 0`.
pub const GAMMA_FLOOR: f64 = 1e-3;

/// A point `(ã, β̃, γ)` of the dimensionless parameter space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainPoint {
    pub a_tilde: f64,
    /// May be `+∞` (zero temperature).
    pub beta_tilde: f64,
    pub gamma: f64,
}

impl ChainPoint {
    pub fn new(a_tilde: f64, beta_tilde: f64, gamma: f64) -> Result<Self> {
        let p = ChainPoint {
            a_tilde,
            beta_tilde,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || self.gamma.abs() < GAMMA_FLOOR {
            return Err(Error::InvalidParams(format!(
                "|gamma| must be at least {GAMMA_FLOOR}, got {}",
                self.gamma
            )));
        }
        if self.beta_tilde.is_nan() || self.beta_tilde < 0.0 {
            return Err(Error::InvalidParams(format!(
                "beta_tilde must be non-negative, got {}",
                self.beta_tilde
            )));
        }
        if !self.a_tilde.is_finite() {
            return Err(Error::InvalidParams("a_tilde must be finite".into()));
        }
        Ok(())
    }

    pub fn with_a(self, a_tilde: f64) -> Self {
        ChainPoint { a_tilde, ..self }
    }

    pub fn with_beta(self, beta_tilde: f64) -> Self {
        ChainPoint { beta_tilde, ..self }
    }
}

pub fn dispersion(x: f64, phi: f64, gamma: f64) -> f64 {
    let s = gamma * phi.sin();
    let d = x - phi.cos();
    (s * s + d * d).sqrt()
}

/// `tanh(β̃Λ/2)/Λ`, continuous at `Λ = 0` and with `tanh → 1` at `β̃ = ∞`.
fn thermal_factor(beta_tilde: f64, lambda: f64) -> f64 {
    if beta_tilde.is_infinite() {
        return 1.0 / lambda;
    }
    let x = 0.5 * beta_tilde * lambda;
    if x < 1e-8 {
        // tanh(x)/Λ = β̃/2 (1 − x²/3 + …)
        0.5 * beta_tilde * (1.0 - x * x / 3.0)
    } else {
        x.tanh() / lambda
    }
}

fn check_r(r: i32) -> Result<f64> {
    match r {
        -1 | 1 => Ok(r as f64),
        _ => Err(Error::InvalidParams(format!(
            "G(R) is only defined for R = ±1, got {r}"
        ))),
    }
}

fn scaled(est: Estimate, factor: f64) -> Estimate {
    Estimate {
        value: factor * est.value,
        error: factor.abs() * est.error,
    }
}

fn quad_over_phi<F: Fn(f64) -> f64>(f: F, quad: &QuadratureSpec, what: &str, p: &ChainPoint) -> Result<Estimate> {
    integrate(f, 0.0, PI, quad).map_err(|e| {
        e.at(format!(
            "{what} at a_tilde={}, beta_tilde={}, gamma={}",
            p.a_tilde, p.beta_tilde, p.gamma
        ))
    })
}

pub fn evolved_g(r: i32, point: &ChainPoint, quad: &QuadratureSpec) -> Result<Estimate> {
    point.validate()?;
    let r = check_r(r)?;
    if point.beta_tilde == 0.0 {
        return Ok(Estimate::default());
    }
    let ChainPoint {
        a_tilde: a,
        beta_tilde: b,
        gamma: g,
    } = *point;
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let lam_a = dispersion(a, phi, g);
        let lam_0_sq = g * g * s * s + c * c;
        thermal_factor(b, lam_a) / lam_0_sq * (g * (r * phi).sin() * s - c * c) * (g * g * s * s + (c - a) * c)
    };
    Ok(scaled(quad_over_phi(f, quad, "long-time G", point)?, 1.0 / PI))
}

pub fn evolved_magnetization(point: &ChainPoint, quad: &QuadratureSpec) -> Result<Estimate> {
    point.validate()?;
    if point.beta_tilde == 0.0 {
        return Ok(Estimate::default());
    }
    let ChainPoint {
        a_tilde: a,
        beta_tilde: b,
        gamma: g,
    } = *point;
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let lam_a = dispersion(a, phi, g);
        let lam_0_sq = g * g * s * s + c * c;
        thermal_factor(b, lam_a) / lam_0_sq * c * ((c - a) * c + g * g * s * s)
    };
    Ok(scaled(
        quad_over_phi(f, quad, "long-time magnetization", point)?,
        -1.0 / PI,
    ))
}

pub fn equilibrium_g(r: i32, point: &ChainPoint, quad: &QuadratureSpec) -> Result<Estimate> {
    point.validate()?;
    let r = check_r(r)?;
    if point.beta_tilde == 0.0 {
        return Ok(Estimate::default());
    }
    let ChainPoint {
        a_tilde: a,
        beta_tilde: b,
        gamma: g,
    } = *point;
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        thermal_factor(b, dispersion(a, phi, g)) * (g * (r * phi).sin() * s - c * (c - a))
    };
    Ok(scaled(quad_over_phi(f, quad, "canonical G", point)?, 1.0 / PI))
}

pub fn equilibrium_magnetization(point: &ChainPoint, quad: &QuadratureSpec) -> Result<Estimate> {
    point.validate()?;
    if point.beta_tilde == 0.0 {
        return Ok(Estimate::default());
    }
    let ChainPoint {
        a_tilde: a,
        beta_tilde: b,
        gamma: g,
    } = *point;
    let f = |phi: f64| thermal_factor(b, dispersion(a, phi, g)) * (phi.cos() - a);
    Ok(scaled(
        quad_over_phi(f, quad, "canonical magnetization", point)?,
        -1.0 / PI,
    ))
}

/// Correlators with per-entry quadrature error estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCorrelators {
    pub set: CorrelatorSet,
    pub m_z_err: f64,
    pub t_xx_err: f64,
    pub t_yy_err: f64,
    pub t_zz_err: f64,
}

fn assemble(m: Estimate, g_minus: Estimate, g_plus: Estimate) -> ChainCorrelators {
    let t_zz = m.value * m.value - g_plus.value * g_minus.value;
    let t_zz_err =
        2.0 * m.value.abs() * m.error + g_plus.value.abs() * g_minus.error + g_minus.value.abs() * g_plus.error;
    ChainCorrelators {
        set: CorrelatorSet::diagonal(m.value, g_minus.value, g_plus.value, t_zz),
        m_z_err: m.error,
        t_xx_err: g_minus.error,
        t_yy_err: g_plus.error,
        t_zz_err,
    }
}

pub fn evolved_correlator_set(point: &ChainPoint, quad: &QuadratureSpec) -> Result<ChainCorrelators> {
    Ok(assemble(
        evolved_magnetization(point, quad)?,
        evolved_g(-1, point, quad)?,
        evolved_g(1, point, quad)?,
    ))
}

pub fn equilibrium_correlator_set(point: &ChainPoint, quad: &QuadratureSpec) -> Result<ChainCorrelators> {
    Ok(assemble(
        equilibrium_magnetization(point, quad)?,
        equilibrium_g(-1, point, quad)?,
        equilibrium_g(1, point, quad)?,
    ))
}

pub fn infinite_chain_entanglement(set: &CorrelatorSet) -> Result<EntanglementValue> {
    Ok(logarithmic_negativity(&two_site_from_correlators(set)?))
}
