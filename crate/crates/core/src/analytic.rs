//! Closed forms: one-hop success probability, spatial throughput, the
//! overlay factors γ (primary) and δ (secondary), AMG limits, and the void
//! probabilities behind the secondary upper bound.
//!
//! Every Poisson exponent is intensity × area, so disk areas carry π.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::config::{NetworkConfig, Regime};
use crate::error::{Error, Result};
use crate::geometry::{difference_area, disk_difference_area, disk_union_area, Disk};
use crate::quadrature::integrate;

/// Absolute tolerance of the γ quadrature.
pub const GAMMA_TOL: f64 = 1e-10;

/// `q·e^{−λqπR_I²}·(1 − e^{−λ(1−q)πR_I²})`.
pub fn p_success_single(lambda: f64, q: f64, ri: f64) -> f64 {
    let load = lambda * PI * ri * ri;
    q * (-q * load).exp() * (-(-(1.0 - q) * load).exp_m1())
}

/// `1/(λπR_I²)`; a load below 1 has no interior optimum.
pub fn optimal_q(lambda: f64, ri: f64) -> Result<f64> {
    let load = lambda * PI * ri * ri;
    if load < 1.0 {
        return Err(Error::DenseRange { load });
    }
    Ok(1.0 / load)
}

/// Mean forward progress of a uniform relay on the half-disk, `4R_r/3π`.
pub fn mean_progress(rr: f64) -> f64 {
    4.0 * rr / (3.0 * PI)
}

/// `value = node_term · success_prob · mean_progress`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThroughputPrediction {
    pub value: f64,
    /// λ|A|, the expected node count.
    pub node_term: f64,
    pub success_prob: f64,
    pub mean_progress: f64,
}

impl ThroughputPrediction {
    pub fn new(node_term: f64, success_prob: f64, mean_progress: f64) -> Self {
        ThroughputPrediction { value: node_term * success_prob * mean_progress, node_term, success_prob, mean_progress }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ThroughputPrediction::new(self.node_term, self.success_prob * factor, self.mean_progress)
    }
}

pub fn spatial_throughput_single(lambda: f64, q: f64, rr: f64, ri: f64, area: f64) -> ThroughputPrediction {
    ThroughputPrediction::new(lambda * area, p_success_single(lambda, q, ri), mean_progress(rr))
}

/// `4|A|e^{−1}/3π`.
pub fn amg_single(area: f64) -> f64 {
    4.0 * area / (E * 3.0 * PI)
}

/// Limit of `C/√(λ/ln λ)` under `R_r = K√(ln λ/λ)`, `R_I² = (1+l)R_r²`
/// and optimal access: the bare constant divided by `πK(1+l)`.
pub fn amg_single_for_schedule(area: f64, k: f64, l: f64) -> f64 {
    amg_single(area) / (PI * k * (1.0 + l))
}

/// Throughput scaling `λ^power · (ln λ)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub power: f64,
    pub log_power: f64,
}

impl Scaling {
    /// `√(λ/ln λ)`.
    pub const SQRT_LAMBDA_OVER_LOG: Scaling = Scaling { power: 0.5, log_power: -0.5 };
    pub const LINEAR: Scaling = Scaling { power: 1.0, log_power: 0.0 };

    pub fn eval(&self, lambda: f64) -> f64 {
        lambda.powf(self.power) * lambda.ln().powf(self.log_power)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmgQuantity {
    PrimaryRatio,
    SecondaryRatio,
}

/// Bracket on an AMG ratio; `exact` is set when the limit is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmgBounds {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
    pub regime: Regime,
    pub quantity: AmgQuantity,
}

impl AmgBounds {
    fn exact(value: f64, regime: Regime, quantity: AmgQuantity) -> Self {
        AmgBounds { lower: value, upper: value, exact: Some(value), regime, quantity }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Primary-tier factor γ with its printed bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    pub value: f64,
    pub min: f64,
    pub max: f64,
    pub abs_error: f64,
}

/// `∫_0^{Rr_p} exp(−μ|B_{RI_sp}(0) − B_{R_D}(r,0)|)·2r/Rr_p² dr` with
/// `μ = λ^(s)q^(s)`.
pub fn gamma_integral(mu: f64, ri_sp: f64, r_d: f64, rr_p: f64) -> Result<(f64, f64)> {
    if rr_p <= 0.0 {
        return Ok((gamma_integrand(mu, ri_sp, r_d, 0.0), 0.0));
    }
    let f = |r: f64| gamma_integrand(mu, ri_sp, r_d, r) * 2.0 * r / (rr_p * rr_p);
    let out = integrate(f, 0.0, rr_p, &[(r_d - ri_sp).abs(), r_d + ri_sp], GAMMA_TOL)?;
    Ok((out.value, out.abs_error))
}

#[inline]
fn gamma_integrand(mu: f64, ri_sp: f64, r_d: f64, r: f64) -> f64 {
    (-mu * difference_area(ri_sp, r_d, r)).exp()
}

/// Lower and upper bounds on the γ integral. The lower bound uses the
/// weight `((R_D − RI_sp)⁺/Rr_p)²`: only relays that close to the
/// transmitter are guaranteed a secondary-free interference disk.
pub fn gamma_bounds(mu: f64, ri_sp: f64, r_d: f64, rr_p: f64) -> (f64, f64) {
    let w = |x: f64| if rr_p > 0.0 { (x.max(0.0) / rr_p).powi(2).min(1.0) } else { 1.0 };
    let far = (-mu * PI * ri_sp * ri_sp).exp();
    let w_lo = w(r_d - ri_sp);
    let lower = w_lo + (1.0 - w_lo) * gamma_integrand(mu, ri_sp, r_d, rr_p);
    let upper = if r_d < rr_p - ri_sp {
        let w_hi = w(r_d + ri_sp);
        w_hi + (1.0 - w_hi) * far
    } else {
        1.0
    };
    (lower, upper)
}

/// γ for the dense-secondary regime.
pub fn gamma_beta_gt1(cfg: &NetworkConfig) -> Result<GammaFactor> {
    if cfg.regime() != Regime::BetaGt1 {
        return Err(Error::RegimeMismatch(format!("γ for β > 1 requested at β = {}", cfg.beta)));
    }
    gamma_factor(cfg)
}

/// γ integral and bracket at any β.
pub fn gamma_factor(cfg: &NetworkConfig) -> Result<GammaFactor> {
    let mu = cfg.secondary_tx_intensity();
    let (value, abs_error) = gamma_integral(mu, cfg.ri_sp, cfg.r_d, cfg.rr_p)?;
    let (min, max) = gamma_bounds(mu, cfg.ri_sp, cfg.r_d, cfg.rr_p);
    let slack = 10.0 * GAMMA_TOL;
    debug_assert!(min <= value + slack && value <= max + slack && max <= 1.0 + slack, "γ bracket: {min} ≤ {value} ≤ {max}");
    Ok(GammaFactor { value, min, max, abs_error })
}

/// `exp(−λ^(s)q^(s)π(RI_sp² − R_D²))`, valid when `RI_sp − R_D > Rr_p`.
pub fn gamma_beta_lt1(cfg: &NetworkConfig) -> Result<f64> {
    if cfg.regime() != Regime::BetaLt1 {
        return Err(Error::RegimeMismatch(format!("γ for β < 1 requested at β = {}", cfg.beta)));
    }
    if cfg.ri_sp - cfg.r_d <= cfg.rr_p {
        return Err(Error::RegimeMismatch(format!(
            "closed form needs RI_sp − R_D > Rr_p ({} − {} ≤ {})",
            cfg.ri_sp, cfg.r_d, cfg.rr_p
        )));
    }
    Ok((-cfg.secondary_tx_intensity() * PI * (cfg.ri_sp.powi(2) - cfg.r_d.powi(2))).exp())
}

/// Limit of γ under optimal secondary access, with `R_D = α·Rr_p`.
pub fn amg_ratio_primary(cfg: &NetworkConfig, regime: Regime, alpha: f64) -> AmgBounds {
    let a1 = (-(cfg.ri_sp / cfg.ri_s()).powi(2)).exp();
    let value = match regime {
        Regime::BetaGt1 => {
            let a = alpha.clamp(0.0, 1.0);
            a1 + (1.0 - a1) * a * a
        }
        Regime::BetaLt1 => a1,
    };
    AmgBounds::exact(value, regime, AmgQuantity::PrimaryRatio)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaCase {
    /// `R_D ≤ RI_ps − RI_s`: sensing never blocks a link whose relay is
    /// clear of primary interference.
    Exact,
    /// `RI_ps − RI_s < R_D ≤ RI_sp + Rr_p`.
    Bracketed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaBounds {
    pub case: DeltaCase,
    pub exact: Option<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// `P(Λ̃)/P(Λ)`: stand-alone success at the sensing-reduced access
/// `q̃ = q^(s)e^{−λ^(p)q^(p)πR_D²}` over that at `q^(s)`.
pub fn tilde_access_ratio(cfg: &NetworkConfig) -> f64 {
    let (ls, ri_s) = (cfg.lambda_s(), cfg.ri_s());
    let base = p_success_single(ls, cfg.q_s, ri_s);
    if base == 0.0 {
        return 1.0;
    }
    p_success_single(ls, cfg.effective_secondary_access(), ri_s) / base
}

/// Secondary factor δ for the dense-secondary regime.
pub fn delta_beta_gt1_bounds(cfg: &NetworkConfig) -> Result<DeltaBounds> {
    if cfg.regime() != Regime::BetaGt1 {
        return Err(Error::RegimeMismatch(format!("δ for β > 1 requested at β = {}", cfg.beta)));
    }
    let mu = cfg.primary_tx_intensity();
    let (ri_ps, ri_s, r_d) = (cfg.ri_ps, cfg.ri_s(), cfg.r_d);
    let clear = (-mu * PI * ri_ps * ri_ps).exp();
    if r_d <= ri_ps - ri_s {
        return Ok(DeltaBounds { case: DeltaCase::Exact, exact: Some(clear), lower: clear, upper: clear });
    }
    if r_d > cfg.ri_sp + cfg.rr_p {
        return Err(Error::RegimeMismatch(format!(
            "R_D = {r_d} beyond RI_sp + Rr_p = {}",
            cfg.ri_sp + cfg.rr_p
        )));
    }
    let lower = (-mu * PI * (r_d + ri_s).powi(2)).exp();
    let partial = (-mu * PI * (ri_ps * ri_ps - r_d * r_d).max(0.0)).exp();
    let upper = tilde_access_ratio(cfg) * (clear + partial);
    Ok(DeltaBounds { case: DeltaCase::Bracketed, exact: None, lower, upper })
}

/// Finite-density δ bracket for the sparse-secondary regime, with
/// `w = ((RI_ps + R_D)/Rr_s)²` capped at 1:
/// `(1 − w)e^{−μπ(RI_ps+R_D)²} ≤ δ ≤ P(Λ̃)/P(Λ)·[e^{−μπRI_ps²} + w + (1 − w)e^{−μπRI_ps²}]`.
pub fn delta_beta_lt1_bounds(cfg: &NetworkConfig) -> Result<DeltaBounds> {
    if cfg.regime() != Regime::BetaLt1 {
        return Err(Error::RegimeMismatch(format!("δ for β < 1 requested at β = {}", cfg.beta)));
    }
    let mu = cfg.primary_tx_intensity();
    let reach = cfg.ri_ps + cfg.r_d;
    let w = if cfg.rr_s > 0.0 { (reach / cfg.rr_s).powi(2).min(1.0) } else { 1.0 };
    let clear = (-mu * PI * cfg.ri_ps * cfg.ri_ps).exp();
    let lower = (1.0 - w) * (-mu * PI * reach * reach).exp();
    let upper = tilde_access_ratio(cfg) * (clear + w + (1.0 - w) * clear);
    Ok(DeltaBounds { case: DeltaCase::Bracketed, exact: None, lower, upper })
}

/// Limit of δ under optimal primary access.
pub fn amg_ratio_secondary(cfg: &NetworkConfig, regime: Regime) -> AmgBounds {
    let ri_p = cfg.ri_p();
    let base = (-(cfg.ri_ps / ri_p).powi(2)).exp();
    match regime {
        Regime::BetaGt1 => {
            if cfg.r_d <= cfg.ri_ps - cfg.ri_s() {
                return AmgBounds::exact(base, regime, AmgQuantity::SecondaryRatio);
            }
            let a2 = (cfg.r_d / ri_p).powi(2);
            let partial = (-(cfg.ri_ps.powi(2) - cfg.r_d.powi(2)).max(0.0) / ri_p.powi(2)).exp();
            let (ls, qs, rr) = (cfg.lambda_s(), cfg.q_s, cfg.rr_s);
            let num = -(-ls * (1.0 - qs * (-a2).exp()) * PI * rr * rr / 2.0).exp_m1();
            let den = -(-ls * (1.0 - qs) * PI * rr * rr / 2.0).exp_m1();
            let upper = (base + partial) * (1.0 - 2.0 * a2).exp() * (num / den);
            AmgBounds { lower: (-a2).exp(), upper, exact: None, regime, quantity: AmgQuantity::SecondaryRatio }
        }
        Regime::BetaLt1 => {
            let lower = (-((cfg.ri_ps + cfg.r_d) / ri_p).powi(2)).exp();
            let exact = (cfg.r_d == 0.0).then_some(lower);
            AmgBounds { lower, upper: 2.0 * base, exact, regime, quantity: AmgQuantity::SecondaryRatio }
        }
    }
}

/// `e^{−μ·area}`.
pub fn void_prob(mu: f64, area: f64) -> f64 {
    (-mu * area).exp()
}

/// P(no primary transmitter in `b_r` | a secondary user sensing over
/// `b_rd` stays silent). With `μ = λ^(p)q^(p)`:
/// `e^{−μ|B_R|}·(1 − q_s e^{−μ|B̃ − B_R|}) / (1 − q_s e^{−μ|B̃|})`.
pub fn void_prob_conditional_dormant(lambda_p: f64, q_p: f64, q_s: f64, b_r: &Disk, b_rd: &Disk) -> f64 {
    let mu = lambda_p * q_p;
    let num = void_prob(mu, b_r.area()) - q_s * void_prob(mu, disk_union_area(b_r, b_rd));
    let den = 1.0 - q_s * void_prob(mu, b_rd.area());
    if den <= 0.0 {
        // q_s = 1 with an empty detection disk: the user always transmits.
        return void_prob(mu, b_r.area());
    }
    (num / den).clamp(0.0, 1.0)
}

/// P(no primary transmitter in `b_r` | a secondary user sensing over
/// `b_tx` transmits) `= e^{−μ|B_R − B̃|}`.
pub fn void_prob_conditional_tx(lambda_p: f64, q_p: f64, b_r: &Disk, b_tx: &Disk) -> f64 {
    void_prob(lambda_p * q_p, disk_difference_area(b_r, b_tx))
}

/// `min(1, P(I₁) + P(I₁|I₃))`.
pub fn void_prob_upper_dormant_plus_tx(p_void: f64, p_void_given_tx: f64) -> f64 {
    (p_void + p_void_given_tx).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmgOrder {
    ABelowB,
    BBelowA,
    Incomparable,
}

/// Orders two throughputs by scaling law first, then by AMG bracket.
pub fn amg_partial_order(a: (Scaling, &AmgBounds), b: (Scaling, &AmgBounds)) -> AmgOrder {
    let (sa, ba) = a;
    let (sb, bb) = b;
    let key = |s: Scaling| (s.power, s.log_power);
    match key(sa).partial_cmp(&key(sb)) {
        Some(std::cmp::Ordering::Less) => return AmgOrder::ABelowB,
        Some(std::cmp::Ordering::Greater) => return AmgOrder::BBelowA,
        _ => {}
    }
    if ba.upper <= bb.lower {
        AmgOrder::ABelowB
    } else if bb.upper <= ba.lower {
        AmgOrder::BBelowA
    } else {
        AmgOrder::Incomparable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Schedule;
    use crate::geometry::Point;
    use crate::streams::SimRng;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, Poisson};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn success_probability_examples() {
        assert_eq!(p_success_single(100.0, 0.0, 0.1), 0.0);
        assert_eq!(p_success_single(100.0, 1.0, 0.1), 0.0);
        let ri = (10.0 / (1000.0 * PI)).sqrt();
        let expected = 0.1 * (-1.0f64).exp() * (1.0 - (-9.0f64).exp());
        assert!(close(p_success_single(1000.0, 0.1, ri), expected, 1e-15));
        assert!(close(expected, 0.036784, 1e-6));
    }

    #[test]
    fn success_probability_matches_poisson_neighbourhood_draws() {
        // Tx coin, no transmitting neighbour, at least one silent one.
        let (q, load) = (0.1, 10.0);
        let pois = Poisson::new(load).unwrap();
        let mut rng = SimRng::seed_from_u64(21);
        let n = 1_000_000;
        let mut hits = 0u64;
        for _ in 0..n {
            let own = rng.random_bool(q);
            let k = pois.sample(&mut rng) as u64;
            let tx = (0..k).filter(|_| rng.random_bool(q)).count() as u64;
            hits += (own && tx == 0 && k > tx) as u64;
        }
        let p = p_success_single(load / PI, q, 1.0);
        let est = hits as f64 / n as f64;
        assert!((est - p).abs() < 3.0 * (p * (1.0 - p) / n as f64).sqrt(), "{est} vs {p}");
    }

    #[test]
    fn optimal_access_examples() {
        let ri_for = |load: f64| (load / (1000.0 * PI)).sqrt();
        assert!(close(optimal_q(1000.0, ri_for(10.0)).unwrap(), 0.1, 1e-15));
        assert!(close(optimal_q(1000.0, ri_for(1.0)).unwrap(), 1.0, 1e-12));
        assert!(matches!(optimal_q(1000.0, ri_for(0.5)), Err(Error::DenseRange { .. })));
        for load in [10.0, 30.0, 100.0, 400.0] {
            let ri = ri_for(load);
            let best = (1..100_000)
                .map(|i| i as f64 * 1e-5)
                .max_by(|&a, &b| p_success_single(1000.0, a, ri).total_cmp(&p_success_single(1000.0, b, ri)))
                .unwrap();
            assert!((best - 1.0 / load).abs() < 1e-3, "load {load}: argmax {best}");
        }
    }

    #[test]
    fn mean_progress_examples() {
        assert_eq!(mean_progress(0.0), 0.0);
        assert!(close(mean_progress(1.0), 0.42441, 1e-5));
        // Forward projection of a uniform point on the half-disk by a
        // polar midpoint rule.
        let rr = 0.05;
        let n = 1000;
        let mut acc = 0.0;
        for i in 0..n {
            let r = (i as f64 + 0.5) / n as f64 * rr;
            for j in 0..n {
                let t = -PI / 2.0 + (j as f64 + 0.5) / n as f64 * PI;
                acc += r * t.cos() * r;
            }
        }
        let mean = acc * (rr / n as f64) * (PI / n as f64) / (PI * rr * rr / 2.0);
        assert!(close(mean_progress(rr), mean, 1e-7));
        assert!(close(mean_progress(rr), 0.021221, 1e-6));
    }

    #[test]
    fn throughput_examples() {
        assert_eq!(spatial_throughput_single(1000.0, 0.0, 0.1, 0.1, PI).value, 0.0);
        let lambda: f64 = 1000.0;
        let q = 1.0 / lambda.ln();
        let rr = 2.0 * (lambda.ln() / lambda).sqrt();
        let t = spatial_throughput_single(lambda, q, rr, rr, PI);
        let by_hand = (4.0 * PI / (3.0 * PI))
            * lambda
            * q
            * rr
            * (-lambda * q * PI * rr * rr).exp()
            * (1.0 - (-lambda * (1.0 - q) * PI * rr * rr).exp());
        assert!((t.value - by_hand).abs() <= 1e-12 * by_hand);
        assert!((t.value - t.node_term * t.success_prob * t.mean_progress).abs() <= 1e-12 * t.value);
        let t2 = spatial_throughput_single(lambda, q, rr, rr, 2.0 * PI);
        assert!((t2.value - 2.0 * t.value).abs() <= 1e-12 * t.value);
    }

    #[test]
    fn amg_constants() {
        assert!(close(amg_single(1.0), 4.0 / (3.0 * PI * E), 1e-15));
        assert!(close(amg_single(1.0), 0.15615, 1e-4));
        assert!(close(amg_single(PI), 0.49057, 1e-4));
        assert!(close(amg_single(3.0), 3.0 * amg_single(1.0), 1e-15));
        // C/√(λ/ln λ) under the connectivity schedule converges to the
        // schedule constant.
        let (k, l) = (2.0f64, 0.25f64);
        let lambda: f64 = 1e7;
        let rr = k * (lambda.ln() / lambda).sqrt();
        let ri = (1.0 + l).sqrt() * rr;
        let c = spatial_throughput_single(lambda, optimal_q(lambda, ri).unwrap(), rr, ri, 1.0).value;
        let ratio = c / Scaling::SQRT_LAMBDA_OVER_LOG.eval(lambda);
        assert!(close(ratio, amg_single_for_schedule(1.0, k, l), 1e-9));
    }

    fn overlay(lambda_p: f64, alpha: f64) -> NetworkConfig {
        let mut s = Schedule::default();
        s.detection = crate::config::DetectionRule::Proportional(alpha);
        s.config(lambda_p)
    }

    #[test]
    fn gamma_examples() {
        let mut cfg = overlay(2000.0, 0.0);
        let g = gamma_beta_gt1(&cfg).unwrap();
        let flat = (-cfg.secondary_tx_intensity() * PI * cfg.ri_sp.powi(2)).exp();
        assert!(close(g.value, flat, 1e-12));
        cfg.r_d = cfg.ri_sp + cfg.rr_p;
        assert!(close(gamma_beta_gt1(&cfg).unwrap().value, 1.0, 1e-12));
        cfg.r_d = 0.3 * cfg.rr_p;
        cfg.q_s = 0.0;
        assert!(close(gamma_beta_gt1(&cfg).unwrap().value, 1.0, 1e-12));
        cfg.beta = 0.7;
        assert!(matches!(gamma_beta_gt1(&cfg), Err(Error::RegimeMismatch(_))));
    }

    #[test]
    fn gamma_quadrature_matches_midpoint_rule() {
        for alpha in [0.2, 0.5, 1.0, 1.3] {
            let cfg = overlay(1000.0, alpha);
            let g = gamma_beta_gt1(&cfg).unwrap().value;
            let mu = cfg.secondary_tx_intensity();
            let n = 200_000;
            let h = cfg.rr_p / n as f64;
            let mid: f64 = (0..n)
                .map(|i| {
                    let r = (i as f64 + 0.5) * h;
                    (-mu * difference_area(cfg.ri_sp, cfg.r_d, r)).exp() * 2.0 * r / cfg.rr_p.powi(2) * h
                })
                .sum();
            assert!(close(g, mid, 1e-8), "α {alpha}: {g} vs {mid}");
        }
    }

    #[test]
    fn gamma_nondecreasing_in_detection_range() {
        let mut cfg = overlay(4000.0, 0.0);
        let mut last = 0.0;
        for i in 0..=60 {
            cfg.r_d = i as f64 / 40.0 * cfg.rr_p;
            let g = gamma_beta_gt1(&cfg).unwrap().value;
            assert!(g >= last - 1e-12);
            last = g;
        }
    }

    #[test]
    fn gamma_stable_under_tighter_tolerance() {
        let cfg = overlay(2000.0, 0.7);
        let mu = cfg.secondary_tx_intensity();
        let f = |r: f64| (-mu * difference_area(cfg.ri_sp, cfg.r_d, r)).exp() * 2.0 * r / cfg.rr_p.powi(2);
        let bp = [(cfg.r_d - cfg.ri_sp).abs(), cfg.r_d + cfg.ri_sp];
        let a = integrate(f, 0.0, cfg.rr_p, &bp, GAMMA_TOL).unwrap().value;
        let b = integrate(f, 0.0, cfg.rr_p, &bp, GAMMA_TOL / 2.0).unwrap().value;
        assert!((a - b).abs() < 10.0 * GAMMA_TOL);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn gamma_bracket_holds(
            mu in 0.0f64..5e5,
            ri_sp in 1e-4f64..0.05,
            r_d in 0.0f64..0.2,
            rr_p in 0.01f64..0.1,
        ) {
            let (g, _) = gamma_integral(mu, ri_sp, r_d, rr_p).unwrap();
            let (lo, hi) = gamma_bounds(mu, ri_sp, r_d, rr_p);
            prop_assert!(lo > 0.0 || mu * PI * ri_sp * ri_sp > 700.0);
            prop_assert!(lo <= g + 1e-9, "min {} > γ {}", lo, g);
            prop_assert!(g <= hi + 1e-9, "γ {} > max {}", g, hi);
            prop_assert!(hi <= 1.0 + 1e-12);
        }

        #[test]
        fn delta_bounds_ordered(
            lambda_p in 300.0f64..20_000.0,
            alpha in 0.0f64..2.0,
            ps in 0.3f64..1.0,
        ) {
            let mut s = Schedule::default();
            s.ps_ratio = ps;
            s.detection = crate::config::DetectionRule::Proportional(alpha);
            let cfg = s.config(lambda_p);
            if let Ok(d) = delta_beta_gt1_bounds(&cfg) {
                prop_assert!(0.0 < d.lower && d.lower <= d.upper);
            }
        }

        #[test]
        fn dormant_user_never_makes_voids_likelier(
            mu in 0.0f64..2000.0,
            q_s in 0.0f64..1.0,
            r in 0.001f64..0.1,
            r_d in 0.0f64..0.1,
            d in 0.0f64..0.3,
        ) {
            let b_r = Disk::new(Point::ORIGIN, r);
            let b_rd = Disk::new(Point::new(d, 0.0), r_d);
            let p = void_prob_conditional_dormant(mu, 1.0, q_s, &b_r, &b_rd);
            let p1 = void_prob(mu, b_r.area());
            prop_assert!(p <= p1 * (1.0 + 1e-12) + 1e-300);
            let gap = q_s * (void_prob(mu, disk_difference_area(&b_rd, &b_r)) - void_prob(mu, b_rd.area()));
            if gap > 1e-9 && p1 > 1e-200 {
                prop_assert!(p < p1, "expected strict inequality: {} vs {}", p, p1);
            }
        }
    }

    #[test]
    fn delta_seam_is_continuous() {
        let mut cfg = overlay(2000.0, 0.0);
        cfg.ri_ps = cfg.ri_p();
        let seam = cfg.ri_ps - cfg.ri_s();
        cfg.r_d = seam;
        let exact = delta_beta_gt1_bounds(&cfg).unwrap();
        assert_eq!(exact.case, DeltaCase::Exact);
        cfg.r_d = seam + 1e-12;
        let b = delta_beta_gt1_bounds(&cfg).unwrap();
        assert_eq!(b.case, DeltaCase::Bracketed);
        let x = exact.exact.unwrap();
        assert!(b.lower <= x + 1e-6 && x <= b.upper + 1e-6);
        assert!(close(b.lower, x, 1e-6));
    }

    #[test]
    fn delta_examples() {
        let mut cfg = overlay(2000.0, 0.0);
        let d = delta_beta_gt1_bounds(&cfg).unwrap();
        let e = (-cfg.primary_tx_intensity() * PI * cfg.ri_ps.powi(2)).exp();
        assert!(close(d.exact.unwrap(), e, 1e-15));

        cfg.q_p = 0.0;
        assert_eq!(delta_beta_gt1_bounds(&cfg).unwrap().exact, Some(1.0));
        cfg.r_d = cfg.rr_p * 1.1;
        let d = delta_beta_gt1_bounds(&cfg).unwrap();
        assert!(close(d.lower, 1.0, 1e-15));

        let mut cfg = overlay(2000.0, 1.0);
        assert!(close(cfg.primary_tx_intensity() * PI * cfg.ri_p().powi(2), 1.0, 1e-12));
        cfg.r_d = cfg.rr_p;
        let d = delta_beta_gt1_bounds(&cfg).unwrap();
        assert_eq!(d.case, DeltaCase::Bracketed);
        let lower = (-((cfg.r_d + cfg.ri_s()) / cfg.ri_p()).powi(2)).exp();
        assert!(close(d.lower, lower, 1e-12));
        assert!(d.lower <= d.upper);

        cfg.r_d = cfg.ri_sp + cfg.rr_p + 1e-3;
        assert!(matches!(delta_beta_gt1_bounds(&cfg), Err(Error::RegimeMismatch(_))));
    }

    #[test]
    fn tilde_ratio_matches_expanded_form() {
        for alpha in [0.5, 1.0, 1.5] {
            let cfg = overlay(3000.0, alpha);
            let (ls, q, ri) = (cfg.lambda_s(), cfg.q_s, cfg.ri_s());
            let qt = cfg.effective_secondary_access();
            let load = ls * PI * ri * ri;
            let expanded = (qt / q) * (-(qt - q) * load).exp() * (1.0 - (-(1.0 - qt) * load).exp())
                / (1.0 - (-(1.0 - q) * load).exp());
            assert!(close(tilde_access_ratio(&cfg), expanded, 1e-12));
        }
    }

    #[test]
    fn gamma_sparse_regime() {
        let mut s = Schedule::default();
        s.beta = 0.7;
        let mut cfg = s.config(500.0);
        cfg.region = crate::pointprocess::Region::disk(3.0);
        let at_zero = gamma_beta_lt1(&cfg).unwrap();
        assert!(close(cfg.secondary_tx_intensity() * PI * cfg.ri_s().powi(2), 1.0, 1e-12));
        assert!(close(at_zero, (-(cfg.ri_sp / cfg.ri_s()).powi(2)).exp(), 1e-12));
        cfg.r_d = cfg.ri_sp;
        assert!(matches!(gamma_beta_lt1(&cfg), Err(Error::RegimeMismatch(_))));
        cfg.r_d = 0.0;
        cfg.q_s = 0.0;
        assert_eq!(gamma_beta_lt1(&cfg).unwrap(), 1.0);
    }

    #[test]
    fn primary_amg_ratios() {
        let cfg = overlay(2000.0, 0.0);
        let e1 = (-1.0f64).exp();
        assert!(close(amg_ratio_primary(&cfg, Regime::BetaGt1, 0.0).lower, e1, 1e-12));
        assert!(close(amg_ratio_primary(&cfg, Regime::BetaGt1, 1.0).lower, 1.0, 1e-15));
        let half = amg_ratio_primary(&cfg, Regime::BetaGt1, 0.5).exact.unwrap();
        assert!(close(half, e1 + (1.0 - e1) * 0.25, 1e-12));
        for a in [0.0, 0.5, 1.0] {
            assert!(close(amg_ratio_primary(&cfg, Regime::BetaLt1, a).exact.unwrap(), e1, 1e-12));
        }
    }

    #[test]
    fn gamma_approaches_its_limit() {
        // At growing λ with R_D = α·Rr_p the integral tends to the limit.
        let alpha = 0.5;
        let gap = |lambda: f64| {
            let cfg = overlay(lambda, alpha);
            (gamma_beta_gt1(&cfg).unwrap().value - amg_ratio_primary(&cfg, Regime::BetaGt1, alpha).lower).abs()
        };
        let (a, b) = (gap(1e3), gap(1e6));
        assert!(b < a && b < 0.02, "{a} {b}");
    }

    #[test]
    fn secondary_amg_ratios() {
        let e1 = (-1.0f64).exp();
        let mut s = Schedule::default();
        s.beta = 0.7;
        let cfg = s.config(1000.0);
        let b = amg_ratio_secondary(&cfg, Regime::BetaLt1);
        assert!(close(b.exact.unwrap(), e1, 1e-12));
        assert!(close(b.upper, 2.0 * e1, 1e-12));

        let cfg = overlay(1000.0, 0.0);
        assert!(close(amg_ratio_secondary(&cfg, Regime::BetaGt1).exact.unwrap(), e1, 1e-12));

        let mut s = Schedule::default();
        s.l_p = 0.0;
        s.l_s = 0.0;
        s.detection = crate::config::DetectionRule::Proportional(1.0);
        let cfg = s.config(1000.0);
        let b = amg_ratio_secondary(&cfg, Regime::BetaGt1);
        assert!(b.exact.is_none());
        assert!(b.lower >= (-1.0f64 / (1.0 + cfg.l_p)).exp() - 1e-12);
    }

    #[test]
    fn dormant_void_probability() {
        let b_r = Disk::new(Point::ORIGIN, 1.0);
        let b_rd = Disk::new(Point::new(5.0, 0.0), 1.0);
        assert_eq!(void_prob_conditional_dormant(0.0, 0.5, 0.5, &b_r, &b_rd), 1.0);
        // Disjoint disks: the dormant user says nothing about B_R.
        let mu = 1.0 / PI;
        let p = void_prob_conditional_dormant(mu, 1.0, 0.5, &b_r, &b_rd);
        assert!(close(p, (-1.0f64).exp(), 1e-15));
        // The factored form with |B̃ − B_R| agrees with the ratio form.
        let b_rd = Disk::new(Point::new(0.8, 0.3), 0.7);
        let q_s = 0.6;
        let factored = void_prob(mu, b_r.area()) * (1.0 - q_s * void_prob(mu, disk_difference_area(&b_rd, &b_r)))
            / (1.0 - q_s * void_prob(mu, b_rd.area()));
        assert!(close(void_prob_conditional_dormant(mu, 1.0, q_s, &b_r, &b_rd), factored, 1e-15));
        // A transmitting user clears its own disk.
        let t = void_prob_conditional_tx(mu, 1.0, &b_r, &Disk::new(Point::ORIGIN, 2.0));
        assert_eq!(t, 1.0);
    }

    #[test]
    fn dormant_plus_tx_upper_bound_examples() {
        assert_eq!(void_prob_upper_dormant_plus_tx(0.0, 0.0), 0.0);
        assert!(close(void_prob_upper_dormant_plus_tx(0.3, 0.5), 0.8, 1e-15));
        assert_eq!(void_prob_upper_dormant_plus_tx(0.7, 0.6), 1.0);
    }

    #[test]
    fn partial_order_examples() {
        let b = |lo, hi| AmgBounds { lower: lo, upper: hi, exact: None, regime: Regime::BetaGt1, quantity: AmgQuantity::PrimaryRatio };
        let f = Scaling::SQRT_LAMBDA_OVER_LOG;
        assert_eq!(amg_partial_order((f, &b(5.0, 5.0)), (Scaling::LINEAR, &b(0.1, 0.1))), AmgOrder::ABelowB);
        assert_eq!(amg_partial_order((f, &b(0.1, 0.2)), (f, &b(0.3, 0.4))), AmgOrder::ABelowB);
        assert_eq!(amg_partial_order((f, &b(0.3, 0.4)), (f, &b(0.1, 0.2))), AmgOrder::BBelowA);
        assert_eq!(amg_partial_order((f, &b(0.1, 0.35)), (f, &b(0.3, 0.4))), AmgOrder::Incomparable);
    }
}
