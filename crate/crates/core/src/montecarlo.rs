//! Snapshot Monte Carlo: each trial draws a fresh field, S-D pairing, MAC
//! slot and one routing-selected relay per transmitter, then tallies
//! success and progress over the nodes of a guard zone.
//!
//! A trial evaluates every tier both stand-alone and overlaid, and may
//! evaluate several configurations that share the field (e.g. an `R_D`
//! grid). Field, coins and relays are identical across those
//! configurations, so ratios and differences are paired.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{NetworkConfig, Tier};
use crate::error::{Error, Result};
use crate::geometry::{distance, Disk, Point};
use crate::grid::GridIndex;
use crate::pointprocess::{sample_ppp, PointField, Presence, Region};
use crate::protocol::{link_success, TxSet};
use crate::routing::{build_route, default_max_hops, next_relay_index, progress_estimators, IndexedNodes, ProgressEstimates};
use crate::stats::Welford;
pub use crate::stats::EstimateWithCI;
use crate::streams::{item_stream, stream, Purpose};

/// Runs `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Disk around the region center inside which statistics are collected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuardZone {
    pub inner_radius: f64,
}

impl GuardZone {
    /// Distance from a sampled transmitter to the farthest point whose
    /// state can affect its link: relay offset, interference disk, and the
    /// detection disks of interferers.
    pub fn margin(cfg: &NetworkConfig, tier: Tier) -> f64 {
        match tier {
            Tier::Primary => cfg.rr_p + cfg.ri_p().max(cfg.ri_sp + cfg.r_d),
            Tier::Secondary => cfg.r_d.max(cfg.rr_s + cfg.ri_ps.max(cfg.ri_s() + cfg.r_d)),
        }
    }

    pub fn for_tier(cfg: &NetworkConfig, tier: Tier) -> Result<GuardZone> {
        let margin = Self::margin(cfg, tier);
        let radius = cfg.region.radius;
        if margin >= radius {
            return Err(Error::EmptyGuardZone { margin, radius });
        }
        Ok(GuardZone { inner_radius: radius - margin })
    }

    /// The smallest zone valid for all of `cfgs`.
    pub fn covering(cfgs: &[NetworkConfig], tier: Tier) -> Result<GuardZone> {
        let mut best: Option<GuardZone> = None;
        for c in cfgs {
            let g = Self::for_tier(c, tier)?;
            if best.is_none_or(|b| g.inner_radius < b.inner_radius) {
                best = Some(g);
            }
        }
        best.ok_or(Error::NoData("no configuration"))
    }

    pub fn area(&self) -> f64 {
        PI * self.inner_radius * self.inner_radius
    }

    #[inline]
    pub fn contains(&self, region: &Region, p: Point) -> bool {
        p.dist2(region.center) <= self.inner_radius * self.inner_radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Guards {
    pub primary: GuardZone,
    pub secondary: GuardZone,
}

impl Guards {
    /// Zones for the tiers present; an absent tier gets the full region.
    pub fn covering(cfgs: &[NetworkConfig], presence: Presence) -> Result<Guards> {
        let full = GuardZone { inner_radius: cfgs.first().map_or(0.0, |c| c.region.radius) };
        Ok(Guards {
            primary: if presence.primary { GuardZone::covering(cfgs, Tier::Primary)? } else { full },
            secondary: if presence.secondary { GuardZone::covering(cfgs, Tier::Secondary)? } else { full },
        })
    }

    pub fn tier(&self, tier: Tier) -> GuardZone {
        match tier {
            Tier::Primary => self.primary,
            Tier::Secondary => self.secondary,
        }
    }
}

/// Configurations evaluated on shared trials.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub cfgs: Vec<NetworkConfig>,
    pub presence: Presence,
    pub guards: Guards,
    pub seed: u64,
}

impl TrialPlan {
    pub fn new(cfgs: Vec<NetworkConfig>, presence: Presence, seed: u64) -> Result<TrialPlan> {
        let guards = Guards::covering(&cfgs, presence)?;
        Self::with_guards(cfgs, presence, guards, seed)
    }

    pub fn with_guards(cfgs: Vec<NetworkConfig>, presence: Presence, guards: Guards, seed: u64) -> Result<TrialPlan> {
        let Some(first) = cfgs.first() else {
            return Err(Error::NoData("no configuration"));
        };
        for c in &cfgs {
            c.validate()?;
            let same = c.lambda_p == first.lambda_p
                && c.beta == first.beta
                && c.q_p == first.q_p
                && c.q_s == first.q_s
                && c.rr_p == first.rr_p
                && c.rr_s == first.rr_s
                && c.region == first.region;
            if !same {
                return Err(Error::IncompatibleConfigs(
                    "densities, access probabilities, transmission ranges and region must match".into(),
                ));
            }
        }
        Ok(TrialPlan { cfgs, presence, guards, seed })
    }

    pub fn single(cfg: &NetworkConfig, presence: Presence, seed: u64) -> Result<TrialPlan> {
        Self::new(vec![cfg.clone()], presence, seed)
    }
}

/// Link statistics of one scenario (stand-alone or overlay).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LinkTally {
    /// Guard-zone nodes that transmit.
    pub transmitters: u64,
    /// Transmitters with a relay.
    pub links: u64,
    /// Σ Y over links.
    pub progress: f64,
    pub successes: u64,
    /// Σ Y over successful links.
    pub throughput: f64,
}

impl LinkTally {
    fn add(&mut self, o: &LinkTally) {
        self.transmitters += o.transmitters;
        self.links += o.links;
        self.progress += o.progress;
        self.successes += o.successes;
        self.throughput += o.throughput;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TierTally {
    /// Guard-zone nodes of the tier.
    pub nodes: u64,
    /// Attempting guard-zone nodes whose forward half-disk was empty.
    pub no_relay: u64,
    pub alone: LinkTally,
    /// Equals `alone` when the other tier is absent.
    pub overlay: LinkTally,
}

impl TierTally {
    pub fn add(&mut self, o: &TierTally) {
        self.nodes += o.nodes;
        self.no_relay += o.no_relay;
        self.alone.add(&o.alone);
        self.overlay.add(&o.overlay);
    }

    pub fn scenario(&self, overlay: bool) -> &LinkTally {
        if overlay {
            &self.overlay
        } else {
            &self.alone
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub primary: Option<TierTally>,
    pub secondary: Option<TierTally>,
}

impl TrialOutcome {
    pub fn tier(&self, tier: Tier) -> Option<&TierTally> {
        match tier {
            Tier::Primary => self.primary.as_ref(),
            Tier::Secondary => self.secondary.as_ref(),
        }
    }
}

/// A guard-zone transmitter with its chosen next hop.
#[derive(Debug, Clone, Copy)]
struct Link {
    node: u32,
    relay: Point,
    progress: f64,
}

struct TierFrame {
    nodes_in_guard: u64,
    /// Attempting guard-zone nodes without a relay.
    stranded: Vec<u32>,
    links: Vec<Link>,
}

impl TierFrame {
    fn attempts(&self) -> u64 {
        (self.links.len() + self.stranded.len()) as u64
    }
}

#[allow(clippy::too_many_arguments)]
fn tier_frame(
    nodes: &[Point],
    pairing: &[u32],
    coins: &[bool],
    rr: f64,
    guard: GuardZone,
    region: &Region,
    seed: u64,
    trial: u64,
    purpose: Purpose,
) -> TierFrame {
    let grid = GridIndex::build(nodes, region.center, region.radius, rr);
    let indexed = IndexedNodes { points: nodes, grid: &grid };
    let mut frame = TierFrame { nodes_in_guard: 0, stranded: Vec::new(), links: Vec::new() };
    let mut scratch = Vec::new();
    for (i, &p) in nodes.iter().enumerate() {
        if !guard.contains(region, p) {
            continue;
        }
        frame.nodes_in_guard += 1;
        if !coins[i] {
            continue;
        }
        let dest = nodes[pairing[i] as usize];
        let h = distance(p, dest);
        let relay = if h <= rr {
            Some(dest)
        } else {
            let mut rng = item_stream(seed, trial, purpose, i as u64);
            next_relay_index(p, dest, rr, &indexed, &mut rng, &mut scratch).map(|j| nodes[j])
        };
        match relay {
            Some(relay) => frame.links.push(Link { node: i as u32, relay, progress: h - distance(relay, dest) }),
            None => frame.stranded.push(i as u32),
        }
    }
    frame
}

fn coin_flips<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Vec<bool> {
    let q = q.clamp(0.0, 1.0);
    (0..n).map(|_| rng.random_bool(q)).collect()
}

/// Evaluates one trial for every configuration of the plan, in order.
pub fn evaluate_trial(plan: &TrialPlan, trial: u64) -> Result<Vec<TrialOutcome>> {
    let base = &plan.cfgs[0];
    let field = PointField::sample(base, plan.presence, plan.seed, trial)?;
    let region = &base.region;
    let (c, h) = (region.center, region.radius);

    // Same draw order as `protocol::mac_decisions`.
    let mut mac = stream(plan.seed, trial, Purpose::Mac);
    let p_coins = coin_flips(field.primary_nodes.len(), base.q_p, &mut mac);
    let s_coins = coin_flips(field.secondary_nodes.len(), base.q_s, &mut mac);

    let has_p = plan.presence.primary;
    let has_s = plan.presence.secondary;
    let cell_p = plan.cfgs.iter().map(|c| c.ri_p().min(c.ri_ps).max(c.r_d)).fold(f64::INFINITY, f64::min);
    let cell_s = plan.cfgs.iter().map(|c| c.ri_s().min(c.ri_sp)).fold(f64::INFINITY, f64::min);

    let p_frame = has_p.then(|| {
        tier_frame(
            &field.primary_nodes,
            &field.primary_pairing,
            &p_coins,
            base.rr_p,
            plan.guards.primary,
            region,
            plan.seed,
            trial,
            Purpose::PrimaryRelay,
        )
    });
    let s_frame = has_s.then(|| {
        tier_frame(
            &field.secondary_nodes,
            &field.secondary_pairing,
            &s_coins,
            base.rr_s,
            plan.guards.secondary,
            region,
            plan.seed,
            trial,
            Purpose::SecondaryRelay,
        )
    });
    let p_set = TxSet::build(&field.primary_nodes, &p_coins, c, h, cell_p);
    let s_alone = TxSet::build(&field.secondary_nodes, &s_coins, c, h, cell_s);

    let mut out = Vec::with_capacity(plan.cfgs.len());
    for cfg in &plan.cfgs {
        // Sensing: an attempting secondary stays silent if a primary
        // transmitter is within R_D.
        let sensing = has_p && has_s && cfg.r_d > 0.0;
        let s_tx: Vec<bool> = if sensing {
            field
                .secondary_nodes
                .iter()
                .zip(&s_coins)
                .map(|(&p, &a)| a && !p_set.blocked(p, cfg.r_d, None))
                .collect()
        } else {
            s_coins.clone()
        };
        let s_overlay = if sensing { TxSet::build(&field.secondary_nodes, &s_tx, c, h, cell_s) } else { s_alone.clone() };

        let primary = p_frame.as_ref().map(|fr| {
            let mut t = TierTally { nodes: fr.nodes_in_guard, no_relay: fr.stranded.len() as u64, ..Default::default() };
            for l in &fr.links {
                let alone = link_success(l.node, l.relay, &p_set, cfg.ri_p(), None);
                let overlay = alone && (!has_s || !s_overlay.blocked(l.relay, cfg.ri_sp, None));
                tally(&mut t.alone, l, alone);
                tally(&mut t.overlay, l, overlay);
            }
            t.alone.transmitters = fr.attempts();
            t.overlay.transmitters = fr.attempts();
            t
        });
        let secondary = s_frame.as_ref().map(|fr| {
            let mut t = TierTally { nodes: fr.nodes_in_guard, no_relay: fr.stranded.len() as u64, ..Default::default() };
            t.alone.transmitters = fr.attempts();
            for l in &fr.links {
                let alone = link_success(l.node, l.relay, &s_alone, cfg.ri_s(), None);
                tally(&mut t.alone, l, alone);
                if s_tx[l.node as usize] {
                    let cross = has_p.then_some((&p_set, cfg.ri_ps));
                    let overlay = link_success(l.node, l.relay, &s_overlay, cfg.ri_s(), cross);
                    tally(&mut t.overlay, l, overlay);
                }
            }
            t.overlay.transmitters = t.overlay.links + fr.stranded.iter().filter(|&&i| s_tx[i as usize]).count() as u64;
            t
        });
        out.push(TrialOutcome { trial, primary, secondary });
    }
    Ok(out)
}

#[inline]
fn tally(t: &mut LinkTally, l: &Link, success: bool) {
    t.links += 1;
    t.progress += l.progress;
    if success {
        t.successes += 1;
        t.throughput += l.progress;
    }
}

/// Trials `0..trials` of `plan`, indexed `[trial][config]`.
pub fn run_trials(plan: &TrialPlan, trials: u64) -> Result<Vec<Vec<TrialOutcome>>> {
    map_indexed(trials, |t| evaluate_trial(plan, t)).into_iter().collect()
}

/// Per-configuration tallies of one tier, in trial order.
pub fn tier_series(runs: &[Vec<TrialOutcome>], cfg_index: usize, tier: Tier) -> Vec<TierTally> {
    runs.iter().filter_map(|r| r[cfg_index].tier(tier).copied()).collect()
}

pub fn sum_tallies(series: &[TierTally]) -> TierTally {
    let mut acc = TierTally::default();
    series.iter().for_each(|t| acc.add(t));
    acc
}

/// Binomial estimate of P(transmit ∧ relay ∧ success) over guard-zone
/// nodes.
pub fn success_from_tallies(series: &[TierTally], overlay: bool) -> Result<EstimateWithCI> {
    let total = sum_tallies(series);
    EstimateWithCI::binomial(total.scenario(overlay).successes, total.nodes).ok_or(Error::NoData("no guard-zone node"))
}

/// Paired ratio of overlay to stand-alone success counts (γ̂ or δ̂), with
/// a delta-method interval over trials.
pub fn overlay_ratio(series: &[TierTally]) -> Result<EstimateWithCI> {
    let num: Vec<f64> = series.iter().map(|t| t.overlay.successes as f64).collect();
    let den: Vec<f64> = series.iter().map(|t| t.alone.successes as f64).collect();
    EstimateWithCI::ratio(&num, &den).ok_or(Error::NoData("no stand-alone success"))
}

/// Whole-region throughput per trial: guard-zone Σ Y·success scaled by
/// `|A|/|guard|`.
pub fn throughput_from_tallies(series: &[TierTally], overlay: bool, region: &Region, guard: GuardZone) -> Result<EstimateWithCI> {
    let scale = region.area / guard.area();
    let mut w = Welford::default();
    series.iter().for_each(|t| w.push(t.scenario(overlay).throughput * scale));
    w.estimate().ok_or(Error::NoData("no trial"))
}

fn presence_guard(cfg: &NetworkConfig, presence: Presence, tier: Tier) -> Result<()> {
    let present = match tier {
        Tier::Primary => presence.primary,
        Tier::Secondary => presence.secondary,
    };
    if !present {
        return Err(Error::NoData("requested tier is not present"));
    }
    let _ = cfg;
    Ok(())
}

/// One-hop success probability of `tier` (overlaid when both tiers are
/// present) over `trials` independent snapshots.
pub fn estimate_success_prob(cfg: &NetworkConfig, presence: Presence, tier: Tier, trials: u64, seed: u64) -> Result<EstimateWithCI> {
    presence_guard(cfg, presence, tier)?;
    let plan = TrialPlan::single(cfg, presence, seed)?;
    let runs = run_trials(&plan, trials.max(1))?;
    success_from_tallies(&tier_series(&runs, 0, tier), true)
}

pub fn estimate_spatial_throughput(cfg: &NetworkConfig, presence: Presence, tier: Tier, trials: u64, seed: u64) -> Result<EstimateWithCI> {
    presence_guard(cfg, presence, tier)?;
    let plan = TrialPlan::single(cfg, presence, seed)?;
    let runs = run_trials(&plan, trials.max(1))?;
    throughput_from_tallies(&tier_series(&runs, 0, tier), true, &cfg.region, plan.guards.tier(tier))
}

/// Throughput summed over successful links against the product `λ|A|·P̂·Ê[Y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Whole-region Σ Y·success per slot.
    pub link_sum: EstimateWithCI,
    /// `λ|A|·P̂(Λ)·Ê[Y]`.
    pub product: f64,
    pub success_prob: EstimateWithCI,
    pub mean_progress: EstimateWithCI,
    /// `link_sum / product`; `None` when both sides are zero.
    pub ratio: Option<EstimateWithCI>,
    pub pass: bool,
}

pub const SEPARATION_TOLERANCE: f64 = 0.10;

pub fn separation_from_tallies(series: &[TierTally], density: f64, region: &Region, guard: GuardZone) -> Result<SeparationReport> {
    let total = sum_tallies(series);
    let o = &total.overlay;
    let t = series.len() as f64;
    if series.is_empty() || total.nodes == 0 {
        return Err(Error::NoData("no guard-zone node"));
    }
    let scale = region.area / guard.area();
    let link_sum = throughput_from_tallies(series, true, region, guard)?;
    let success_prob = EstimateWithCI::binomial(o.successes, total.nodes).expect("nodes > 0");
    let progress: Vec<f64> = series.iter().map(|s| s.overlay.progress).collect();
    let links: Vec<f64> = series.iter().map(|s| s.overlay.links as f64).collect();
    let mean_progress = EstimateWithCI::ratio(&progress, &links).unwrap_or(EstimateWithCI::exact(0.0));
    let product = density * guard.area() * success_prob.mean * mean_progress.mean * scale;
    if o.throughput == 0.0 && product == 0.0 {
        return Ok(SeparationReport { link_sum, product, success_prob, mean_progress, ratio: None, pass: true });
    }
    // R = A·N·M / (c·T·S·P) over trial sums; log-linearized influence.
    let (a, n, m, s, p) = (o.throughput, total.nodes as f64, o.links as f64, o.successes as f64, o.progress);
    let ratio_value = link_sum.mean / product;
    let ratio = if a > 0.0 && s > 0.0 && p != 0.0 && t > 1.0 {
        let u: Vec<f64> = series
            .iter()
            .map(|x| {
                let y = &x.overlay;
                y.throughput / a + x.nodes as f64 / n + y.links as f64 / m - y.successes as f64 / s - y.progress / p
            })
            .collect();
        let mut w = Welford::default();
        u.iter().for_each(|&v| w.push(v));
        EstimateWithCI::new(ratio_value, ratio_value.abs() * (t * w.variance()).sqrt(), series.len() as u64)
    } else {
        EstimateWithCI::new(ratio_value, f64::INFINITY, series.len() as u64)
    };
    let pass = (ratio.mean - 1.0).abs() <= SEPARATION_TOLERANCE;
    Ok(SeparationReport { link_sum, product, success_prob, mean_progress, ratio: Some(ratio), pass })
}

pub fn verify_separation(cfg: &NetworkConfig, presence: Presence, tier: Tier, trials: u64, seed: u64) -> Result<SeparationReport> {
    presence_guard(cfg, presence, tier)?;
    let plan = TrialPlan::single(cfg, presence, seed)?;
    let runs = run_trials(&plan, trials.max(1))?;
    let density = cfg.tier(tier).density;
    separation_from_tallies(&tier_series(&runs, 0, tier), density, &cfg.region, plan.guards.tier(tier))
}

/// Packets routed per field in progress estimation.
pub const PACKETS_PER_FIELD: u64 = 100;

/// Routes `packets` packets between guard-zone S-D pairs of `tier` and
/// returns the per-hop and per-packet progress estimators.
pub fn estimate_mean_progress(cfg: &NetworkConfig, tier: Tier, packets: u64, seed: u64) -> Result<ProgressEstimates> {
    let guard = GuardZone::for_tier(cfg, tier)?;
    let presence = match tier {
        Tier::Primary => Presence::PRIMARY,
        Tier::Secondary => Presence::SECONDARY,
    };
    let rr = cfg.tier(tier).tx_range;
    let fields = packets.max(1).div_ceil(PACKETS_PER_FIELD);
    let per_field: Vec<Result<Vec<crate::routing::RoutePath>>> = map_indexed(fields, |f| {
        let field = PointField::sample(cfg, presence, seed, f)?;
        let nodes = field.nodes(tier);
        let pairing = field.pairing(tier);
        let inside: Vec<usize> = (0..nodes.len()).filter(|&i| guard.contains(&cfg.region, nodes[i])).collect();
        let sources: Vec<usize> = inside.iter().copied().filter(|&i| guard.contains(&cfg.region, nodes[pairing[i] as usize])).collect();
        if sources.is_empty() {
            return Ok(Vec::new());
        }
        let grid = GridIndex::build(nodes, cfg.region.center, cfg.region.radius, rr);
        let indexed = IndexedNodes { points: nodes, grid: &grid };
        let mut pick = stream(seed, f, Purpose::Packets);
        let count = PACKETS_PER_FIELD.min(packets - f * PACKETS_PER_FIELD);
        let mut paths = Vec::with_capacity(count as usize);
        for k in 0..count {
            let src = sources[pick.random_range(0..sources.len())];
            let s = nodes[src];
            let d = nodes[pairing[src] as usize];
            let mut rng = item_stream(seed, f, Purpose::Aux, k);
            paths.push(build_route(s, d, rr, &indexed, &mut rng, default_max_hops(distance(s, d), rr)));
        }
        Ok(paths)
    });
    let mut paths = Vec::new();
    for r in per_field {
        paths.extend(r?);
    }
    progress_estimators(&paths)
}

/// Minimum samples so that the binomial 3σ half-width at `p` is at most
/// `rel_tol·p`.
pub fn required_samples(p: f64, rel_tol: f64) -> u64 {
    if p <= 0.0 || rel_tol <= 0.0 {
        return u64::MAX;
    }
    (9.0 * (1.0 - p) / (p * rel_tol * rel_tol)).ceil() as u64
}

/// Trials needed to collect `samples` when each trial yields about
/// `per_trial`.
pub fn trials_for(samples: u64, per_trial: f64) -> u64 {
    if per_trial <= 0.0 {
        return 1;
    }
    ((samples as f64 / per_trial).ceil() as u64).max(1)
}

/// Primary transmitters around a dormant and a transmitting secondary
/// user: `b_r` is the disk whose emptiness is tested, `dormant` and
/// `transmitter` are the two users' detection disks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoidScenario {
    pub lambda_p: f64,
    pub q_p: f64,
    pub q_s: f64,
    pub b_r: Disk,
    pub dormant: Disk,
    pub transmitter: Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoidCondition {
    None,
    /// The dormant user stays silent (I₂).
    Dormant,
    /// The other user transmits (I₃).
    Transmitting,
    /// I₂ ∪ I₃.
    DormantPlusTx,
}

impl VoidCondition {
    pub const ALL: [VoidCondition; 4] =
        [VoidCondition::None, VoidCondition::Dormant, VoidCondition::Transmitting, VoidCondition::DormantPlusTx];

    fn index(self) -> usize {
        self as usize
    }
}

/// Counts behind the void-probability estimates, all from the same draws.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct VoidCounts {
    pub draws: u64,
    pub accepted: [u64; 4],
    pub voids: [u64; 4],
}

pub const MIN_ACCEPTANCE: f64 = 1e-4;

impl VoidCounts {
    pub fn estimate(&self, condition: VoidCondition) -> Result<EstimateWithCI> {
        let k = condition.index();
        let rate = self.accepted[k] as f64 / self.draws.max(1) as f64;
        if self.draws == 0 || rate < MIN_ACCEPTANCE {
            return Err(Error::RareConditioning { rate });
        }
        Ok(EstimateWithCI::binomial(self.voids[k], self.accepted[k]).expect("accepted > 0"))
    }
}

const VOID_CHUNK: u64 = 1 << 15;

pub fn void_counts(s: &VoidScenario, draws: u64, seed: u64) -> VoidCounts {
    let mu = s.lambda_p * s.q_p;
    let center = s.b_r.center;
    let reach = [s.b_r, s.dormant, s.transmitter]
        .iter()
        .map(|d| distance(center, d.center) + d.radius)
        .fold(0.0, f64::max);
    let window = Region::new(center, reach.max(f64::MIN_POSITIVE));
    let chunks = draws.div_ceil(VOID_CHUNK);
    let parts = map_indexed(chunks, |c| {
        let mut rng = stream(seed, c, Purpose::Void);
        let n = VOID_CHUNK.min(draws - c * VOID_CHUNK);
        let mut acc = VoidCounts { draws: n, ..Default::default() };
        for _ in 0..n {
            let pts = sample_ppp(mu, &window, &mut rng);
            let void = !pts.iter().any(|&p| s.b_r.contains(p));
            let dormant = pts.iter().any(|&p| s.dormant.contains(p)) || !rng.random_bool(s.q_s.clamp(0.0, 1.0));
            let transmits = !pts.iter().any(|&p| s.transmitter.contains(p)) && rng.random_bool(s.q_s.clamp(0.0, 1.0));
            for (k, accept) in [true, dormant, transmits, dormant || transmits].into_iter().enumerate() {
                if accept {
                    acc.accepted[k] += 1;
                    acc.voids[k] += void as u64;
                }
            }
        }
        acc
    });
    parts.iter().fold(VoidCounts::default(), |mut a, p| {
        a.draws += p.draws;
        for k in 0..4 {
            a.accepted[k] += p.accepted[k];
            a.voids[k] += p.voids[k];
        }
        a
    })
}

pub fn estimate_void_prob(s: &VoidScenario, condition: VoidCondition, draws: u64, seed: u64) -> Result<EstimateWithCI> {
    void_counts(s, draws.max(1), seed).estimate(condition)
}
