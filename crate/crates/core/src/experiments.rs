//! Sweeps over λ^(p) or the detection range, scaling-law regressions, AMG
//! estimates and the two-regime tradeoff summary.

use serde::{Deserialize, Serialize};

use crate::analytic::{self, Scaling};
use crate::config::{DetectionRule, NetworkConfig, Regime, Schedule, Tier};
use crate::error::{Error, Result};
use crate::montecarlo::{overlay_ratio, run_trials, sum_tallies, throughput_from_tallies, tier_series, Guards, TierTally, TrialPlan};
use crate::pointprocess::Presence;
use crate::stats::{linear_fit, EstimateWithCI, LinearFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    /// Primary density; every other quantity follows the schedule.
    LambdaP,
    /// `α` in `R_D = α·Rr_p` at a fixed λ^(p). All points share trials.
    DetectionAlpha,
}

impl SweptParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweptParameter::LambdaP => "lambda_p",
            SweptParameter::DetectionAlpha => "alpha",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub schedule: Schedule,
    pub parameter: SweptParameter,
    pub values: Vec<f64>,
    /// λ^(p) used when sweeping α.
    pub lambda_p: f64,
    pub presence: Presence,
    pub trials_per_point: u64,
    pub seed: u64,
}

impl SweepSpec {
    pub fn configs(&self) -> Vec<NetworkConfig> {
        self.values
            .iter()
            .map(|&v| match self.parameter {
                SweptParameter::LambdaP => self.schedule.config(v),
                SweptParameter::DetectionAlpha => {
                    let mut s = self.schedule;
                    s.detection = DetectionRule::Proportional(v);
                    s.config(self.lambda_p)
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::NoData("sweep has no values"));
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::IncompatibleConfigs("sweep values must be strictly increasing".into()));
        }
        if self.trials_per_point == 0 {
            return Err(Error::NoData("zero trials per point"));
        }
        for c in self.configs() {
            c.validate()?;
        }
        Ok(())
    }
}

/// Overlay factor with its analytic bracket (γ for the primary tier, δ for
/// the secondary).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorPrediction {
    pub value: Option<f64>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierRow {
    /// Whole-region throughput of the overlaid tier.
    pub throughput: EstimateWithCI,
    /// Same, with the other tier removed from the same fields.
    pub throughput_alone: EstimateWithCI,
    pub success: EstimateWithCI,
    pub success_alone: EstimateWithCI,
    /// Mean one-hop progress over links.
    pub progress: EstimateWithCI,
    /// Paired overlay/stand-alone success ratio; `None` without the other
    /// tier or without stand-alone successes.
    pub ratio: Option<EstimateWithCI>,
    /// Closed-form stand-alone throughput.
    pub analytic_alone: f64,
    pub factor: Option<FactorPrediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub config: NetworkConfig,
    pub primary: Option<TierRow>,
    pub secondary: Option<TierRow>,
    /// Set when the point failed; the tier rows are then empty.
    pub flag: Option<String>,
}

impl SweepRow {
    pub fn tier(&self, tier: Tier) -> Option<&TierRow> {
        match tier {
            Tier::Primary => self.primary.as_ref(),
            Tier::Secondary => self.secondary.as_ref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub guards: Option<Guards>,
    pub rows: Vec<SweepRow>,
}

fn factor_prediction(cfg: &NetworkConfig, tier: Tier) -> Option<FactorPrediction> {
    match tier {
        Tier::Primary => analytic::gamma_factor(cfg).ok().map(|g| FactorPrediction { value: Some(g.value), lower: g.min, upper: g.max }),
        Tier::Secondary => {
            let d = match cfg.regime() {
                Regime::BetaGt1 => analytic::delta_beta_gt1_bounds(cfg),
                Regime::BetaLt1 => analytic::delta_beta_lt1_bounds(cfg),
            };
            d.ok().map(|d| FactorPrediction { value: d.exact, lower: d.lower, upper: d.upper })
        }
    }
}

fn tier_row(series: &[TierTally], cfg: &NetworkConfig, tier: Tier, guards: &Guards, both: bool) -> Result<TierRow> {
    let guard = guards.tier(tier);
    let total = sum_tallies(series);
    let success = EstimateWithCI::binomial(total.overlay.successes, total.nodes).ok_or(Error::NoData("no guard-zone node"))?;
    let success_alone = EstimateWithCI::binomial(total.alone.successes, total.nodes).expect("nodes > 0");
    let progress: Vec<f64> = series.iter().map(|t| t.overlay.progress).collect();
    let links: Vec<f64> = series.iter().map(|t| t.overlay.links as f64).collect();
    let p = cfg.tier(tier);
    Ok(TierRow {
        throughput: throughput_from_tallies(series, true, &cfg.region, guard)?,
        throughput_alone: throughput_from_tallies(series, false, &cfg.region, guard)?,
        success,
        success_alone,
        progress: EstimateWithCI::ratio(&progress, &links).unwrap_or(EstimateWithCI::exact(0.0)),
        ratio: if both { overlay_ratio(series).ok() } else { None },
        analytic_alone: analytic::spatial_throughput_single(p.density, p.access, p.tx_range, p.interference_range, cfg.region.area).value,
        factor: if both { factor_prediction(cfg, tier) } else { None },
    })
}

fn rows_for_plan(plan: &TrialPlan, values: &[f64], trials: u64) -> Result<Vec<SweepRow>> {
    let runs = run_trials(plan, trials)?;
    let both = plan.presence == Presence::BOTH;
    let mut rows = Vec::with_capacity(values.len());
    for (k, (&value, cfg)) in values.iter().zip(&plan.cfgs).enumerate() {
        let build = |tier: Tier, present: bool| -> Result<Option<TierRow>> {
            if !present {
                return Ok(None);
            }
            tier_row(&tier_series(&runs, k, tier), cfg, tier, &plan.guards, both).map(Some)
        };
        let row = match (build(Tier::Primary, plan.presence.primary), build(Tier::Secondary, plan.presence.secondary)) {
            (Ok(primary), Ok(secondary)) => SweepRow { value, config: cfg.clone(), primary, secondary, flag: None },
            (Err(e), _) | (_, Err(e)) => flagged(value, cfg, &e),
        };
        rows.push(row);
    }
    Ok(rows)
}

fn flagged(value: f64, cfg: &NetworkConfig, e: &Error) -> SweepRow {
    SweepRow { value, config: cfg.clone(), primary: None, secondary: None, flag: Some(e.to_string()) }
}

/// Evaluates every sweep point. Point-level failures become flagged rows;
/// only an invalid spec is an error.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let cfgs = spec.configs();
    let guards = Guards::covering(&cfgs, spec.presence)?;
    let rows = match spec.parameter {
        SweptParameter::DetectionAlpha => {
            let plan = TrialPlan::with_guards(cfgs.clone(), spec.presence, guards, spec.seed)?;
            match rows_for_plan(&plan, &spec.values, spec.trials_per_point) {
                Ok(rows) => rows,
                Err(e) => spec.values.iter().zip(&cfgs).map(|(&v, c)| flagged(v, c, &e)).collect(),
            }
        }
        SweptParameter::LambdaP => spec
            .values
            .iter()
            .zip(&cfgs)
            .map(|(&v, c)| {
                TrialPlan::with_guards(vec![c.clone()], spec.presence, guards, spec.seed)
                    .and_then(|plan| rows_for_plan(&plan, &[v], spec.trials_per_point))
                    .map(|mut r| r.remove(0))
                    .unwrap_or_else(|e| flagged(v, c, &e))
            })
            .collect(),
    };
    Ok(SweepResult { spec: spec.clone(), guards: Some(guards), rows })
}

/// `(λ^(p), density of the tier, C)` of the unflagged rows.
fn tier_points(result: &SweepResult, tier: Tier) -> Vec<(f64, f64, EstimateWithCI)> {
    result
        .rows
        .iter()
        .filter_map(|r| r.tier(tier).map(|t| (r.config.lambda_p, r.config.tier(tier).density, t.throughput)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub fit: LinearFit,
    pub points: usize,
    /// Slope outside `[0.9, 1.1]`.
    pub mismatch: bool,
}

pub const SCALING_SLOPE_TOLERANCE: f64 = 0.1;

/// Least squares of `ln C` on `ln f(λ)` from `(λ^(p), λ, C)` triples; the
/// decade requirement applies to λ^(p).
pub fn scaling_fit(points: &[(f64, f64, f64)], scaling: Scaling) -> Result<ScalingFit> {
    let usable: Vec<(f64, f64, f64)> = points.iter().copied().filter(|&(_, l, c)| l > 1.0 && c > 0.0).collect();
    let hi = usable.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let lo = usable.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    if usable.len() < 4 || !(hi / lo >= 10.0) {
        return Err(Error::InsufficientPoints { needed: 4, got: usable.len() });
    }
    let x: Vec<f64> = usable.iter().map(|p| scaling.eval(p.1).ln()).collect();
    let y: Vec<f64> = usable.iter().map(|p| p.2.ln()).collect();
    let fit = linear_fit(&x, &y, None).ok_or(Error::InsufficientPoints { needed: 4, got: usable.len() })?;
    Ok(ScalingFit { fit, points: usable.len(), mismatch: (fit.slope - 1.0).abs() > SCALING_SLOPE_TOLERANCE })
}

/// Regression of the tier's overlay throughput against `√(λ/ln λ)` of the
/// tier's own density.
pub fn scaling_regression(result: &SweepResult, tier: Tier) -> Result<ScalingFit> {
    let pts: Vec<(f64, f64, f64)> = tier_points(result, tier).into_iter().map(|(lp, l, c)| (lp, l, c.mean)).collect();
    scaling_fit(&pts, Scaling::SQRT_LAMBDA_OVER_LOG)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmgEstimate {
    /// `C/f(λ)` at the largest λ.
    pub raw: EstimateWithCI,
    /// `raw` divided by `Ê[Y]/(4Rr/3π)`.
    pub normalized: EstimateWithCI,
    /// Last minus second-to-last raw ratio.
    pub trend: f64,
    /// Raw ratio at every point, in sweep order.
    pub per_point: Vec<f64>,
}

/// `C(λ)/f(λ)` across the sweep.
pub fn amg_estimate(result: &SweepResult, tier: Tier, scaling: Scaling) -> Result<AmgEstimate> {
    let rows: Vec<(&SweepRow, &TierRow)> = result.rows.iter().filter_map(|r| r.tier(tier).map(|t| (r, t))).collect();
    if rows.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: rows.len() });
    }
    let per_point: Vec<f64> = rows.iter().map(|(r, t)| t.throughput.mean / scaling.eval(r.config.tier(tier).density)).collect();
    let (row, last) = rows[rows.len() - 1];
    let f = scaling.eval(row.config.tier(tier).density);
    let raw = last.throughput.scaled(1.0 / f);
    let calib = last.progress.mean / analytic::mean_progress(row.config.tier(tier).tx_range);
    let normalized = if calib > 0.0 { raw.scaled(1.0 / calib) } else { raw };
    let n = per_point.len();
    Ok(AmgEstimate { raw, normalized, trend: per_point[n - 1] - per_point[n - 2], per_point })
}

/// One point of an R_D tradeoff curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub regime: Regime,
    pub alpha: f64,
    pub primary_ratio: Option<EstimateWithCI>,
    pub secondary_ratio: Option<EstimateWithCI>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeContrast {
    pub curves: Vec<TradeoffPoint>,
    /// β>1 primary ratio nondecreasing in α within 2σ.
    pub gt1_primary_increasing: bool,
    /// Weighted slope of the β<1 primary ratio in α.
    pub lt1_primary_slope: Option<LinearFit>,
    /// Slope 95% CI contains 0.
    pub lt1_primary_flat: bool,
}

fn curve(result: &SweepResult) -> Vec<TradeoffPoint> {
    result
        .rows
        .iter()
        .map(|r| TradeoffPoint {
            regime: r.config.regime(),
            alpha: r.value,
            primary_ratio: r.primary.and_then(|t| t.ratio),
            secondary_ratio: r.secondary.and_then(|t| t.ratio),
        })
        .collect()
}

/// Weighted fit of a ratio against α; `None` with fewer than two usable
/// points.
pub fn ratio_slope(points: &[TradeoffPoint], tier: Tier) -> Option<LinearFit> {
    let usable: Vec<(f64, EstimateWithCI)> = points
        .iter()
        .filter_map(|p| {
            let r = match tier {
                Tier::Primary => p.primary_ratio,
                Tier::Secondary => p.secondary_ratio,
            }?;
            (r.stderr > 0.0 && r.stderr.is_finite()).then_some((p.alpha, r))
        })
        .collect();
    let x: Vec<f64> = usable.iter().map(|p| p.0).collect();
    let y: Vec<f64> = usable.iter().map(|p| p.1.mean).collect();
    let w: Vec<f64> = usable.iter().map(|p| 1.0 / p.1.stderr.powi(2)).collect();
    let mut fit = linear_fit(&x, &y, Some(&w))?;
    // Known per-point errors: slope variance is 1/Σw(x − x̄)².
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(a, b)| b * (a - mx).powi(2)).sum();
    fit.slope_stderr = (1.0 / sxx).sqrt();
    Some(fit)
}

/// Tradeoff curves of two α-sweeps that share λ^(p) and seed.
pub fn regime_contrast(gt1: &SweepResult, lt1: &SweepResult) -> Result<RegimeContrast> {
    for (r, want) in [(gt1, Regime::BetaGt1), (lt1, Regime::BetaLt1)] {
        if r.spec.parameter != SweptParameter::DetectionAlpha || r.spec.schedule.config(r.spec.lambda_p).regime() != want {
            return Err(Error::RegimeMismatch(format!("expected an α-sweep in the {} regime", want.as_str())));
        }
    }
    if gt1.spec.lambda_p != lt1.spec.lambda_p || gt1.spec.seed != lt1.spec.seed {
        return Err(Error::IncompatibleConfigs("regime sweeps must share λ^(p) and seed".into()));
    }
    let a = curve(gt1);
    let b = curve(lt1);
    let gt1_primary_increasing = a.windows(2).all(|w| match (w[0].primary_ratio, w[1].primary_ratio) {
        (Some(x), Some(y)) => y.mean + 2.0 * (x.stderr.powi(2) + y.stderr.powi(2)).sqrt() >= x.mean,
        _ => false,
    });
    let lt1_primary_slope = ratio_slope(&b, Tier::Primary);
    let lt1_primary_flat = lt1_primary_slope.is_some_and(|f| f.slope.abs() <= crate::stats::Z95 * f.slope_stderr);
    let mut curves = a;
    curves.extend(b);
    Ok(RegimeContrast { curves, gt1_primary_increasing, lt1_primary_slope, lt1_primary_flat })
}

/// `C^(s)/√(λ^(s)/ln λ^(s))` per row and whether it strictly decreases.
pub fn secondary_collapse(result: &SweepResult) -> (Vec<f64>, bool) {
    let v: Vec<f64> = tier_points(result, Tier::Secondary)
        .into_iter()
        .map(|(_, l, c)| c.mean / Scaling::SQRT_LAMBDA_OVER_LOG.eval(l))
        .collect();
    let decreasing = v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0]);
    (v, decreasing)
}
