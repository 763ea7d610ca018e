//! Browser demo. Three operations, each returning a JSON string; failures
//! come back as `{"error": "..."}` so the page never has to catch.
//!
//! * [`gamma_curve`]: primary factor γ and its bracket against `α = R_D/Rr_p`.
//! * [`slot_snapshot`]: one MAC slot of the overlay with every link drawn.
//! * [`route`]: one packet routed by random half-disk relaying.

use overlaynet::analytic;
use overlaynet::config::DetectionRule;
use overlaynet::pointprocess::{PointField, Presence};
use overlaynet::protocol::{mac_decisions, primary_success, secondary_success};
use overlaynet::routing::{build_route, default_max_hops, next_relay_index};
use overlaynet::streams::{item_stream, stream, Purpose};
use overlaynet::{NetworkConfig, Point, Regime, Schedule, Tier};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest expected node count the page is asked to draw.
pub const MAX_NODES: f64 = 20_000.0;

fn reply(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn config(lambda_p: f64, beta: f64, alpha: f64) -> Result<NetworkConfig, String> {
    if !(lambda_p > 1.0) {
        return Err(format!("λ_p must exceed 1, got {lambda_p}"));
    }
    let s = Schedule { beta, detection: DetectionRule::Proportional(alpha), ..Schedule::default() };
    let cfg = s.config(lambda_p);
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn xy(p: Point) -> [f64; 2] {
    [p.x, p.y]
}

#[wasm_bindgen]
pub fn gamma_curve(lambda_p: f64, beta: f64, steps: u32) -> String {
    reply(gamma_curve_value(lambda_p, beta, steps))
}

fn gamma_curve_value(lambda_p: f64, beta: f64, steps: u32) -> Result<Value, String> {
    let steps = steps.clamp(2, 400);
    let (mut alpha, mut gamma, mut lower, mut upper, mut limit) = (vec![], vec![], vec![], vec![], vec![]);
    for i in 0..=steps {
        let a = 1.5 * i as f64 / steps as f64;
        let cfg = config(lambda_p, beta, a)?;
        let g = analytic::gamma_factor(&cfg).map_err(|e| e.to_string())?;
        alpha.push(a);
        gamma.push(g.value);
        lower.push(g.min);
        upper.push(g.max);
        limit.push(analytic::amg_ratio_primary(&cfg, cfg.regime(), a).lower);
    }
    let cfg = config(lambda_p, beta, 0.0)?;
    Ok(json!({
        "regime": cfg.regime().as_str(),
        "lambda_s": cfg.lambda_s(),
        "alpha": alpha,
        "gamma": gamma,
        "lower": lower,
        "upper": upper,
        "limit": limit,
    }))
}

#[wasm_bindgen]
pub fn slot_snapshot(lambda_p: f64, beta: f64, alpha: f64, seed: u32) -> String {
    reply(slot_snapshot_value(lambda_p, beta, alpha, seed as u64))
}

fn slot_snapshot_value(lambda_p: f64, beta: f64, alpha: f64, seed: u64) -> Result<Value, String> {
    let cfg = config(lambda_p, beta, alpha)?;
    let expected = (cfg.lambda_p + cfg.lambda_s()) * cfg.region.area;
    if expected > MAX_NODES {
        return Err(format!("about {expected:.0} nodes expected; the demo draws at most {MAX_NODES}"));
    }
    let field = PointField::sample(&cfg, Presence::BOTH, seed, 0).map_err(|e| e.to_string())?;
    let snap = mac_decisions(&field, &cfg, &mut stream(seed, 0, Purpose::Mac));
    let mut links = Vec::new();
    let mut ok = [0u32; 2];
    let mut scratch = Vec::new();
    for (t, tier) in [Tier::Primary, Tier::Secondary].into_iter().enumerate() {
        let nodes = field.nodes(tier);
        let pairing = field.pairing(tier);
        let (on, purpose) = match tier {
            Tier::Primary => (&snap.primary_tx, Purpose::PrimaryRelay),
            Tier::Secondary => (&snap.secondary_tx, Purpose::SecondaryRelay),
        };
        let rr = cfg.tier(tier).tx_range;
        for i in (0..nodes.len()).filter(|&i| on[i]) {
            let dest = nodes[pairing[i] as usize];
            let mut rng = item_stream(seed, 0, purpose, i as u64);
            let Some(j) = next_relay_index(nodes[i], dest, rr, nodes, &mut rng, &mut scratch) else { continue };
            let success = match tier {
                Tier::Primary => primary_success(i, nodes[j], &snap, &cfg),
                Tier::Secondary => secondary_success(i, nodes[j], &snap, &cfg),
            };
            ok[t] += success as u32;
            links.push(json!({ "tier": tier.as_str(), "from": xy(nodes[i]), "to": xy(nodes[j]), "ok": success }));
        }
    }
    // 0 silent, 1 attempted but sensed a primary, 2 transmitting.
    let secondary: Vec<Value> = field
        .secondary_nodes
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let state = if snap.secondary_tx[i] { 2 } else if snap.secondary_attempt[i] { 1 } else { 0 };
            json!([p.x, p.y, state])
        })
        .collect();
    let primary: Vec<Value> =
        field.primary_nodes.iter().zip(&snap.primary_tx).map(|(p, &t)| json!([p.x, p.y, t as u8])).collect();
    Ok(json!({
        "region_radius": cfg.region.radius,
        "rr_p": cfg.rr_p,
        "ri_p": cfg.ri_p(),
        "rr_s": cfg.rr_s,
        "r_d": cfg.r_d,
        "q_p": cfg.q_p,
        "q_s": cfg.q_s,
        "primary": primary,
        "secondary": secondary,
        "links": links,
        "primary_successes": ok[0],
        "secondary_successes": ok[1],
        "primary_transmitters": snap.count(Tier::Primary),
        "secondary_transmitters": snap.count(Tier::Secondary),
        "secondary_sensed": snap.secondary_attempt.iter().zip(&snap.secondary_tx).filter(|(&a, &t)| a && !t).count(),
    }))
}

#[wasm_bindgen]
pub fn route(lambda_p: f64, seed: u32) -> String {
    reply(route_value(lambda_p, seed as u64))
}

fn route_value(lambda_p: f64, seed: u64) -> Result<Value, String> {
    let cfg = config(lambda_p, Schedule::default().beta, 0.0)?;
    if lambda_p * cfg.region.area > MAX_NODES {
        return Err(format!("about {:.0} nodes expected; the demo draws at most {MAX_NODES}", lambda_p * cfg.region.area));
    }
    let field = PointField::sample(&cfg, Presence::PRIMARY, seed, 0).map_err(|e| e.to_string())?;
    let nodes = &field.primary_nodes;
    // The pair with the longest S-D distance makes the most instructive path.
    let src = (0..nodes.len())
        .max_by(|&a, &b| {
            let da = nodes[a].dist2(nodes[field.primary_pairing[a] as usize]);
            let db = nodes[b].dist2(nodes[field.primary_pairing[b] as usize]);
            da.total_cmp(&db)
        })
        .ok_or("empty field")?;
    let (s, d) = (nodes[src], nodes[field.primary_pairing[src] as usize]);
    let h = s.dist2(d).sqrt();
    let mut rng = item_stream(seed, 0, Purpose::Packets, 0);
    let path = build_route(s, d, cfg.rr_p, nodes.as_slice(), &mut rng, default_max_hops(h, cfg.rr_p));
    let hops = path.progresses.len();
    Ok(json!({
        "region_radius": cfg.region.radius,
        "rr": cfg.rr_p,
        "nodes": nodes.iter().map(|&p| xy(p)).collect::<Vec<_>>(),
        "source": xy(s),
        "destination": xy(d),
        "path": path.hops.iter().map(|&p| xy(p)).collect::<Vec<_>>(),
        "converged": path.converged,
        "hops": hops,
        "distance": h,
        "mean_progress": if hops > 0 { path.progresses.iter().sum::<f64>() / hops as f64 } else { f64::NAN },
        "half_disk_mean": analytic::mean_progress(cfg.rr_p),
    }))
}

/// Regime label for the page header.
#[wasm_bindgen]
pub fn regime(beta: f64) -> String {
    match Regime::of(beta) {
        Regime::BetaGt1 => "dense secondary (β > 1)".into(),
        Regime::BetaLt1 => "sparse secondary (β < 1)".into(),
    }
}
