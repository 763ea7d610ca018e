//! Network parameters for the two overlaid tiers and the density schedules
//! that generate them.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pointprocess::Region;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Primary,
    Secondary,
}

impl Tier {
    pub fn other(self) -> Tier {
        match self {
            Tier::Primary => Tier::Secondary,
            Tier::Secondary => Tier::Primary,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Primary => "primary",
            Tier::Secondary => "secondary",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which side of `β = 1` a configuration sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Secondary tier denser than the primary.
    BetaGt1,
    /// Secondary tier sparser than the primary.
    BetaLt1,
}

impl Regime {
    pub fn of(beta: f64) -> Regime {
        if beta > 1.0 {
            Regime::BetaGt1
        } else {
            Regime::BetaLt1
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::BetaGt1 => "beta_gt1",
            Regime::BetaLt1 => "beta_lt1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantViolation {
    #[error("{name} must be finite and positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite and non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must be a probability in [0, 1], got {value}")]
    NotProbability { name: &'static str, value: f64 },
    #[error("beta must differ from 1 (the two tiers would have the same density)")]
    BetaIsOne,
    #[error(
        "secondary robustness invariant violated: ri_ps = {ri_ps} exceeds ri_p = {ri_p} \
         (cognitive receivers must tolerate primary interference at least as well as primary receivers)"
    )]
    SecondaryRobustness { ri_ps: f64, ri_p: f64 },
    #[error(
        "primary sensitivity invariant violated: ri_sp = {ri_sp} is below ri_s = {ri_s} \
         (primary receivers must be at least as sensitive to secondary interference as secondary receivers)"
    )]
    PrimarySensitivity { ri_sp: f64, ri_s: f64 },
}

/// Per-tier view of a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierParams {
    pub density: f64,
    pub access: f64,
    pub tx_range: f64,
    pub interference_range: f64,
}

impl TierParams {
    /// `λπR_I²`, the mean node count in an interference disk.
    pub fn interference_load(&self) -> f64 {
        self.density * PI * self.interference_range * self.interference_range
    }
}

/// All densities, access probabilities and ranges of the overlay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Primary density λ^(p) (nodes per unit area).
    pub lambda_p: f64,
    /// Secondary density exponent, λ^(s) = (λ^(p))^β.
    pub beta: f64,
    pub q_p: f64,
    pub q_s: f64,
    /// Transmission ranges.
    pub rr_p: f64,
    pub rr_s: f64,
    /// Interference margins; R_I = √(1+l)·R_r inside each tier.
    pub l_p: f64,
    pub l_s: f64,
    /// Range within which a secondary transmitter corrupts a primary receiver.
    pub ri_sp: f64,
    /// Range within which a primary transmitter corrupts a secondary receiver.
    pub ri_ps: f64,
    /// Detection range of the secondary carrier sensing.
    pub r_d: f64,
    pub region: Region,
}

impl NetworkConfig {
    pub fn lambda_s(&self) -> f64 {
        self.lambda_p.powf(self.beta)
    }

    pub fn ri_p(&self) -> f64 {
        (1.0 + self.l_p).sqrt() * self.rr_p
    }

    pub fn ri_s(&self) -> f64 {
        (1.0 + self.l_s).sqrt() * self.rr_s
    }

    pub fn regime(&self) -> Regime {
        Regime::of(self.beta)
    }

    pub fn tier(&self, tier: Tier) -> TierParams {
        match tier {
            Tier::Primary => TierParams {
                density: self.lambda_p,
                access: self.q_p,
                tx_range: self.rr_p,
                interference_range: self.ri_p(),
            },
            Tier::Secondary => TierParams {
                density: self.lambda_s(),
                access: self.q_s,
                tx_range: self.rr_s,
                interference_range: self.ri_s(),
            },
        }
    }

    /// Range within which a transmitter of the *other* tier corrupts a
    /// receiver of `tier`.
    pub fn cross_range(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Primary => self.ri_sp,
            Tier::Secondary => self.ri_ps,
        }
    }

    /// Primary transmitter intensity λ^(p)q^(p).
    pub fn primary_tx_intensity(&self) -> f64 {
        self.lambda_p * self.q_p
    }

    /// Secondary ALOHA intensity λ^(s)q^(s), before sensing.
    pub fn secondary_tx_intensity(&self) -> f64 {
        self.lambda_s() * self.q_s
    }

    /// Secondary access probability after the sensing veto,
    /// q^(s)·exp(−λ^(p)q^(p)πR_D²).
    pub fn effective_secondary_access(&self) -> f64 {
        self.q_s * (-self.primary_tx_intensity() * PI * self.r_d * self.r_d).exp()
    }

    pub fn validate(&self) -> Result<(), InvariantViolation> {
        positive("lambda_p", self.lambda_p)?;
        positive("beta", self.beta)?;
        if (self.beta - 1.0).abs() < 1e-12 {
            return Err(InvariantViolation::BetaIsOne);
        }
        probability("q_p", self.q_p)?;
        probability("q_s", self.q_s)?;
        for (name, v) in [
            ("rr_p", self.rr_p),
            ("rr_s", self.rr_s),
            ("l_p", self.l_p),
            ("l_s", self.l_s),
            ("ri_sp", self.ri_sp),
            ("ri_ps", self.ri_ps),
            ("r_d", self.r_d),
        ] {
            non_negative(name, v)?;
        }
        positive("region_radius", self.region.radius)?;
        let tol = 1e-12;
        if self.ri_ps > self.ri_p() * (1.0 + tol) {
            return Err(InvariantViolation::SecondaryRobustness { ri_ps: self.ri_ps, ri_p: self.ri_p() });
        }
        if self.ri_sp < self.ri_s() * (1.0 - tol) {
            return Err(InvariantViolation::PrimarySensitivity { ri_sp: self.ri_sp, ri_s: self.ri_s() });
        }
        Ok(())
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), InvariantViolation> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(InvariantViolation::NotPositive { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<(), InvariantViolation> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(InvariantViolation::Negative { name, value })
    }
}

fn probability(name: &'static str, value: f64) -> Result<(), InvariantViolation> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(InvariantViolation::NotProbability { name, value })
    }
}

/// How a tier's ALOHA probability follows its density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum AccessRule {
    /// q = 1/(λπR_I²), capped at 1.
    Optimal,
    /// q = c / ln λ.
    InverseLog(f64),
    Fixed(f64),
}

impl AccessRule {
    pub fn access(&self, density: f64, interference_range: f64) -> f64 {
        match *self {
            AccessRule::Optimal => {
                let load = density * PI * interference_range * interference_range;
                if load > 1.0 {
                    1.0 / load
                } else {
                    1.0
                }
            }
            AccessRule::InverseLog(c) => (c / density.ln()).clamp(0.0, 1.0),
            AccessRule::Fixed(q) => q,
        }
    }
}

/// How the detection range follows the primary density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum DetectionRule {
    Fixed(f64),
    /// R_D = α·R_r^(p).
    Proportional(f64),
    /// R_D = α·R_r^(p)·(λ^(p))^e.
    Growing { alpha: f64, exponent: f64 },
}

impl DetectionRule {
    pub fn range(&self, lambda_p: f64, rr_p: f64) -> f64 {
        match *self {
            DetectionRule::Fixed(r) => r,
            DetectionRule::Proportional(alpha) => alpha * rr_p,
            DetectionRule::Growing { alpha, exponent } => alpha * rr_p * lambda_p.powf(exponent),
        }
    }
}

/// Connectivity range `K·√(ln λ / λ)`.
pub fn connectivity_range(k: f64, density: f64) -> f64 {
    k * (density.ln() / density).sqrt()
}

/// Rules binding every range and access probability to λ^(p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub beta: f64,
    /// Connectivity constant K in R_r = K√(ln λ/λ), shared by both tiers.
    pub k: f64,
    pub l_p: f64,
    pub l_s: f64,
    /// R_I^(sp) / R_I^(s), at least 1.
    pub sp_ratio: f64,
    /// R_I^(ps) / R_I^(p), at most 1.
    pub ps_ratio: f64,
    pub access_p: AccessRule,
    pub access_s: AccessRule,
    pub detection: DetectionRule,
    pub region_radius: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            beta: 1.5,
            k: 2.0,
            l_p: 0.25,
            l_s: 0.25,
            sp_ratio: 1.0,
            ps_ratio: 1.0,
            access_p: AccessRule::Optimal,
            access_s: AccessRule::Optimal,
            detection: DetectionRule::Fixed(0.0),
            region_radius: 1.0,
        }
    }
}

impl Schedule {
    pub fn config(&self, lambda_p: f64) -> NetworkConfig {
        let lambda_s = lambda_p.powf(self.beta);
        let rr_p = connectivity_range(self.k, lambda_p);
        let rr_s = connectivity_range(self.k, lambda_s);
        let ri_p = (1.0 + self.l_p).sqrt() * rr_p;
        let ri_s = (1.0 + self.l_s).sqrt() * rr_s;
        NetworkConfig {
            lambda_p,
            beta: self.beta,
            q_p: self.access_p.access(lambda_p, ri_p),
            q_s: self.access_s.access(lambda_s, ri_s),
            rr_p,
            rr_s,
            l_p: self.l_p,
            l_s: self.l_s,
            ri_sp: self.sp_ratio * ri_s,
            ri_ps: self.ps_ratio * ri_p,
            r_d: self.detection.range(lambda_p, rr_p),
            region: Region::disk(self.region_radius),
        }
    }
}
