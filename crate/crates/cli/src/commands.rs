//! The five subcommands. Each turns settings into one result table.

use overlaynet::analytic::{self, Scaling};
use overlaynet::experiments::run_sweep;
use overlaynet::montecarlo::{
    estimate_mean_progress, overlay_ratio, run_trials, success_from_tallies, throughput_from_tallies, tier_series, TrialPlan,
};
use overlaynet::verify::{run_verify, CriterionResult};
use overlaynet::{EstimateWithCI, Regime, Tier};
use serde_json::json;

use crate::output::{Cell, Table};
use crate::settings::RunSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Analytic,
    Simulate,
    Sweep,
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Analytic => "analytic",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Verify => "verify",
        }
    }
}

pub struct Report {
    pub table: Table,
    pub summary: Option<serde_json::Value>,
    /// False when an acceptance check failed.
    pub pass: bool,
    /// Human-readable lines for stdout.
    pub lines: Vec<String>,
}

impl Report {
    fn plain(table: Table) -> Report {
        Report { table, summary: None, pass: true, lines: Vec::new() }
    }
}

pub fn execute(cmd: Command, s: &RunSettings, seed: u64) -> overlaynet::Result<Report> {
    match cmd {
        Command::Validate => Ok(validate(s)),
        Command::Analytic => Ok(Report::plain(analytic_table(s))),
        Command::Simulate => simulate(s, seed),
        Command::Sweep => sweep(s, seed),
        Command::Verify => Ok(verify(s, seed)),
    }
}

pub const VALIDATE_COLUMNS: [&str; 2] = ["parameter", "value"];

fn validate(s: &RunSettings) -> Report {
    let c = s.network();
    let mut t = Table::new(&VALIDATE_COLUMNS);
    for (k, v) in [
        ("lambda_p", c.lambda_p),
        ("lambda_s", c.lambda_s()),
        ("beta", c.beta),
        ("q_p", c.q_p),
        ("q_s", c.q_s),
        ("rr_p", c.rr_p),
        ("rr_s", c.rr_s),
        ("ri_p", c.ri_p()),
        ("ri_s", c.ri_s()),
        ("ri_sp", c.ri_sp),
        ("ri_ps", c.ri_ps),
        ("r_d", c.r_d),
        ("region_radius", c.region.radius),
    ] {
        t.push(vec![k.into(), v.into()]);
    }
    Report::plain(t)
}

pub const ANALYTIC_COLUMNS: [&str; 5] = ["quantity", "value", "lower", "upper", "formula"];

pub fn analytic_table(s: &RunSettings) -> Table {
    let c = s.network();
    let mut t = Table::new(&ANALYTIC_COLUMNS);
    let mut put = |q: &str, v: f64, lo: f64, hi: f64, f: &str| t.push(vec![q.into(), v.into(), lo.into(), hi.into(), f.into()]);
    let nan = f64::NAN;
    let area = c.region.area;
    for tier in [Tier::Primary, Tier::Secondary] {
        let p = c.tier(tier);
        let name = tier.as_str();
        let ps = analytic::p_success_single(p.density, p.access, p.interference_range);
        put(&format!("{name}_success_alone"), ps, nan, nan, "q·exp(−λqπRI²)·(1 − exp(−λ(1−q)πRI²))");
        put(&format!("{name}_mean_progress"), analytic::mean_progress(p.tx_range), nan, nan, "4Rr/3π");
        let th = analytic::spatial_throughput_single(p.density, p.access, p.tx_range, p.interference_range, area);
        put(&format!("{name}_throughput_alone"), th.value, nan, nan, "λ|A|·P·4Rr/3π");
        put(&format!("{name}_interference_load"), p.interference_load(), nan, nan, "λπRI²");
    }
    put("secondary_effective_access", c.effective_secondary_access(), nan, nan, "q_s·exp(−λ_p q_p πR_D²)");
    match analytic::gamma_factor(&c) {
        Ok(g) => {
            put("gamma", g.value, g.min, g.max, "∫ exp(−μ_s|B(RI_sp) − B_RD(r)|)·2r/Rr_p² dr");
            put("gamma_quadrature_error", g.abs_error, nan, nan, "quadrature error estimate");
        }
        Err(e) => log::info!("gamma not available: {e}"),
    }
    if c.regime() == Regime::BetaLt1 {
        if let Ok(g) = analytic::gamma_beta_lt1(&c) {
            put("gamma_closed_form", g, nan, nan, "exp(−μ_s π(RI_sp² − R_D²))");
        }
    }
    let delta = match c.regime() {
        Regime::BetaGt1 => analytic::delta_beta_gt1_bounds(&c),
        Regime::BetaLt1 => analytic::delta_beta_lt1_bounds(&c),
    };
    match delta {
        Ok(d) => put("delta", d.exact.unwrap_or(nan), d.lower, d.upper, "secondary overlay factor bracket"),
        Err(e) => log::info!("delta not available: {e}"),
    }
    put("tilde_access_ratio", analytic::tilde_access_ratio(&c), nan, nan, "P(q̃_s)/P(q_s)");
    let alpha = if c.rr_p > 0.0 { c.r_d / c.rr_p } else { 0.0 };
    let a = analytic::amg_ratio_primary(&c, c.regime(), alpha);
    put("amg_ratio_primary", a.exact.unwrap_or(nan), a.lower, a.upper, "limit of γ under optimal access");
    let b = analytic::amg_ratio_secondary(&c, c.regime());
    put("amg_ratio_secondary", b.exact.unwrap_or(nan), b.lower, b.upper, "limit of δ under optimal access");
    put("amg_single", analytic::amg_single(area), nan, nan, "4|A|/(3πe)");
    put(
        "amg_single_schedule",
        analytic::amg_single_for_schedule(area, s.schedule.k, s.schedule.l_p),
        nan,
        nan,
        "4|A|/(3πe)/(πK(1+l))",
    );
    put("scaling_sqrt_lambda_over_log", Scaling::SQRT_LAMBDA_OVER_LOG.eval(c.lambda_p), nan, nan, "√(λ/ln λ)");
    put("region_area", area, nan, nan, "πR²");
    t
}

pub const SIMULATE_COLUMNS: [&str; 9] = ["tier", "scenario", "metric", "value", "stderr", "ci_low", "ci_high", "samples", "analytic"];

fn est_row(tier: &str, scenario: &str, metric: &str, e: &EstimateWithCI, analytic: f64) -> Vec<Cell> {
    vec![
        tier.into(),
        scenario.into(),
        metric.into(),
        e.mean.into(),
        e.stderr.into(),
        e.ci95.0.into(),
        e.ci95.1.into(),
        e.n_samples.into(),
        analytic.into(),
    ]
}

fn simulate(s: &RunSettings, seed: u64) -> overlaynet::Result<Report> {
    let c = s.network();
    let plan = TrialPlan::single(&c, s.presence, seed)?;
    log::info!("simulate: {} trials, λ_p = {}, λ_s = {}", s.trials, c.lambda_p, c.lambda_s());
    let runs = run_trials(&plan, s.trials)?;
    let mut t = Table::new(&SIMULATE_COLUMNS);
    for tier in [Tier::Primary, Tier::Secondary] {
        let present = match tier {
            Tier::Primary => s.presence.primary,
            Tier::Secondary => s.presence.secondary,
        };
        if !present {
            continue;
        }
        let name = tier.as_str();
        let p = c.tier(tier);
        let series = tier_series(&runs, 0, tier);
        let guard = plan.guards.tier(tier);
        let alone_p = analytic::p_success_single(p.density, p.access, p.interference_range);
        let alone_th = analytic::spatial_throughput_single(p.density, p.access, p.tx_range, p.interference_range, c.region.area).value;
        let scenarios: &[(&str, bool)] = if s.presence.primary && s.presence.secondary {
            &[("alone", false), ("overlay", true)]
        } else {
            &[("alone", false)]
        };
        for &(label, overlay) in scenarios {
            let reference = |x: f64| if overlay { f64::NAN } else { x };
            match success_from_tallies(&series, overlay) {
                Ok(e) => t.push(est_row(name, label, "success_prob", &e, reference(alone_p))),
                Err(e) => log::warn!("{name} {label} success: {e}"),
            }
            match throughput_from_tallies(&series, overlay, &c.region, guard) {
                Ok(e) => t.push(est_row(name, label, "spatial_throughput", &e, reference(alone_th))),
                Err(e) => log::warn!("{name} {label} throughput: {e}"),
            }
        }
        if scenarios.len() == 2 {
            let factor = match tier {
                Tier::Primary => analytic::gamma_factor(&c).map(|g| g.value).unwrap_or(f64::NAN),
                Tier::Secondary => match c.regime() {
                    Regime::BetaGt1 => analytic::delta_beta_gt1_bounds(&c).ok().and_then(|d| d.exact).unwrap_or(f64::NAN),
                    Regime::BetaLt1 => f64::NAN,
                },
            };
            match overlay_ratio(&series) {
                Ok(e) => t.push(est_row(name, "overlay", "success_ratio", &e, factor)),
                Err(e) => log::warn!("{name} ratio: {e}"),
            }
        }
        if s.packets > 0 {
            match estimate_mean_progress(&c, tier, s.packets, seed) {
                Ok(pe) => {
                    let y = analytic::mean_progress(p.tx_range);
                    t.push(est_row(name, "alone", "progress_per_hop", &pe.per_hop, y));
                    t.push(est_row(name, "alone", "progress_per_packet", &pe.per_packet, y));
                }
                Err(e) => log::warn!("{name} progress: {e}"),
            }
        }
    }
    Ok(Report::plain(t))
}

pub const SWEEP_COLUMNS: [&str; 19] = [
    "parameter",
    "value",
    "lambda_p",
    "r_d",
    "tier",
    "throughput",
    "throughput_stderr",
    "throughput_alone",
    "throughput_alone_stderr",
    "success",
    "success_stderr",
    "success_alone",
    "ratio",
    "ratio_stderr",
    "analytic_alone",
    "factor",
    "factor_lower",
    "factor_upper",
    "flag",
];

fn sweep(s: &RunSettings, seed: u64) -> overlaynet::Result<Report> {
    let spec = s.sweep_spec(seed);
    log::info!("sweep over {}: {} points, {} trials each", spec.parameter.as_str(), spec.values.len(), spec.trials_per_point);
    let result = run_sweep(&spec)?;
    let mut t = Table::new(&SWEEP_COLUMNS);
    let nan = f64::NAN;
    for row in &result.rows {
        let head = |tier: &str| -> Vec<Cell> {
            vec![spec.parameter.as_str().into(), row.value.into(), row.config.lambda_p.into(), row.config.r_d.into(), tier.into()]
        };
        if let Some(flag) = &row.flag {
            let mut r = head("");
            r.extend(std::iter::repeat_n(Cell::Num(nan), 13));
            r.push(flag.clone().into());
            t.push(r);
            continue;
        }
        for tier in [Tier::Primary, Tier::Secondary] {
            let Some(tr) = row.tier(tier) else { continue };
            let mut r = head(tier.as_str());
            let f = tr.factor;
            r.extend([
                tr.throughput.mean.into(),
                tr.throughput.stderr.into(),
                tr.throughput_alone.mean.into(),
                tr.throughput_alone.stderr.into(),
                tr.success.mean.into(),
                tr.success.stderr.into(),
                tr.success_alone.mean.into(),
                tr.ratio.map(|e| e.mean).into(),
                tr.ratio.map(|e| e.stderr).into(),
                tr.analytic_alone.into(),
                f.and_then(|f| f.value).into(),
                f.map(|f| f.lower).into(),
                f.map(|f| f.upper).into(),
                "".into(),
            ]);
            t.push(r);
        }
    }
    Ok(Report::plain(t))
}

pub const VERIFY_COLUMNS: [&str; 9] = ["criterion", "name", "metric", "value", "stderr", "reference", "lower", "upper", "pass"];

pub fn verify_table(results: &[CriterionResult]) -> Table {
    let mut t = Table::new(&VERIFY_COLUMNS);
    for r in results {
        if r.metrics.is_empty() {
            let nan = f64::NAN;
            t.push(vec![
                r.id.into(),
                r.name.clone().into(),
                r.detail.clone().into(),
                nan.into(),
                nan.into(),
                nan.into(),
                nan.into(),
                nan.into(),
                r.pass.into(),
            ]);
        }
        for m in &r.metrics {
            t.push(vec![
                r.id.into(),
                r.name.clone().into(),
                m.name.clone().into(),
                m.value.into(),
                m.stderr.into(),
                m.reference.into(),
                m.lower.into(),
                m.upper.into(),
                m.pass.into(),
            ]);
        }
    }
    t
}

pub fn verdict_line(r: &CriterionResult) -> String {
    format!("{} {:>2} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.id, r.name, r.detail)
}

fn verify(s: &RunSettings, seed: u64) -> Report {
    let o = s.verify_options(seed);
    let results = run_verify(&o);
    let pass = results.iter().all(|r| r.pass);
    let summary = json!(results
        .iter()
        .map(|r| json!({ "criterion": r.id, "name": r.name, "pass": r.pass, "detail": r.detail }))
        .collect::<Vec<_>>());
    Report { table: verify_table(&results), summary: Some(summary), pass, lines: results.iter().map(verdict_line).collect() }
}
