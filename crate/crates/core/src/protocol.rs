//! One-slot MAC: primary ALOHA, sensing-gated secondary ALOHA, and the
//! per-link success events.
//!
//! A receiver at `relay` succeeds iff its own transmitter is on, no other
//! same-tier transmitter lies within the tier's interference range of the
//! relay, and (in the overlay) no cross-tier transmitter lies within the
//! cross range. A transmitting relay sits at distance 0 of itself, so the
//! "relay is silent" condition is covered by the same disk test.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{NetworkConfig, Tier};
use crate::geometry::Point;
use crate::grid::GridIndex;
use crate::pointprocess::PointField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sensing {
    Idle,
    Busy,
}

/// Busy iff a primary transmitter is within `r_d` (closed disk). `r_d = 0`
/// disables sensing.
pub fn sense(node: Point, primary_transmitters: &[Point], r_d: f64) -> Sensing {
    if r_d <= 0.0 {
        return Sensing::Idle;
    }
    let r2 = r_d * r_d;
    if primary_transmitters.iter().any(|p| p.dist2(node) <= r2) {
        Sensing::Busy
    } else {
        Sensing::Idle
    }
}

/// Which secondary nodes get a sensing outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SenseScope {
    All,
    /// Only nodes whose ALOHA coin came up; the others report `false`.
    Attempting,
}

/// MAC state of one slot.
#[derive(Debug, Clone)]
pub struct SlotSnapshot<'a> {
    pub field: &'a PointField,
    pub primary_tx: Vec<bool>,
    /// ALOHA coin of each secondary node, drawn before sensing.
    pub secondary_attempt: Vec<bool>,
    pub secondary_idle: Vec<bool>,
    pub secondary_tx: Vec<bool>,
}

impl SlotSnapshot<'_> {
    pub fn transmitters(&self, tier: Tier) -> Vec<Point> {
        let (nodes, on) = match tier {
            Tier::Primary => (&self.field.primary_nodes, &self.primary_tx),
            Tier::Secondary => (&self.field.secondary_nodes, &self.secondary_tx),
        };
        nodes.iter().zip(on).filter(|(_, &t)| t).map(|(&p, _)| p).collect()
    }

    pub fn count(&self, tier: Tier) -> usize {
        match tier {
            Tier::Primary => self.primary_tx.iter().filter(|&&t| t).count(),
            Tier::Secondary => self.secondary_tx.iter().filter(|&&t| t).count(),
        }
    }
}

/// Primary coins for every primary node, then secondary coins for every
/// secondary node, then sensing. The coins do not depend on `R_D`, so
/// snapshots drawn from equal streams are paired across detection ranges.
pub fn mac_decisions<'a, R: Rng + ?Sized>(field: &'a PointField, cfg: &NetworkConfig, rng: &mut R) -> SlotSnapshot<'a> {
    mac_decisions_scoped(field, cfg, rng, SenseScope::All)
}

pub fn mac_decisions_scoped<'a, R: Rng + ?Sized>(
    field: &'a PointField,
    cfg: &NetworkConfig,
    rng: &mut R,
    scope: SenseScope,
) -> SlotSnapshot<'a> {
    let primary_tx = coins(field.primary_nodes.len(), cfg.q_p, rng);
    let secondary_attempt = coins(field.secondary_nodes.len(), cfg.q_s, rng);
    let busy = PrimarySensor::new(field, &primary_tx, cfg);
    let secondary_idle: Vec<bool> = field
        .secondary_nodes
        .iter()
        .zip(&secondary_attempt)
        .map(|(&p, &a)| match scope {
            SenseScope::All => !busy.busy(p),
            SenseScope::Attempting => a && !busy.busy(p),
        })
        .collect();
    let secondary_tx = secondary_attempt.iter().zip(&secondary_idle).map(|(&a, &i)| a && i).collect();
    SlotSnapshot { field, primary_tx, secondary_attempt, secondary_idle, secondary_tx }
}

fn coins<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Vec<bool> {
    let q = q.clamp(0.0, 1.0);
    (0..n).map(|_| rng.random_bool(q)).collect()
}

/// Grid over primary transmitters for range-`R_D` sensing.
struct PrimarySensor {
    r_d: f64,
    grid: Option<GridIndex>,
}

impl PrimarySensor {
    fn new(field: &PointField, primary_tx: &[bool], cfg: &NetworkConfig) -> Self {
        let grid = (cfg.r_d > 0.0).then(|| {
            let pts: Vec<Point> = field
                .primary_nodes
                .iter()
                .zip(primary_tx)
                .filter(|(_, &t)| t)
                .map(|(&p, _)| p)
                .collect();
            GridIndex::build(&pts, cfg.region.center, cfg.region.radius, cfg.r_d)
        });
        PrimarySensor { r_d: cfg.r_d, grid }
    }

    fn busy(&self, p: Point) -> bool {
        match &self.grid {
            Some(g) => g.any_within(p, self.r_d, |_, _| true),
            None => false,
        }
    }
}

fn blocked_linear(nodes: &[Point], on: &[bool], at: Point, radius: f64, exclude: Option<usize>) -> bool {
    let r2 = radius * radius;
    nodes
        .iter()
        .zip(on)
        .enumerate()
        .any(|(i, (p, &t))| t && Some(i) != exclude && p.dist2(at) <= r2)
}

/// Overlay success of primary transmitter `tx_index` toward `relay`.
pub fn primary_success(tx_index: usize, relay: Point, snap: &SlotSnapshot, cfg: &NetworkConfig) -> bool {
    let f = snap.field;
    snap.primary_tx[tx_index]
        && !blocked_linear(&f.primary_nodes, &snap.primary_tx, relay, cfg.ri_p(), Some(tx_index))
        && !blocked_linear(&f.secondary_nodes, &snap.secondary_tx, relay, cfg.ri_sp, None)
}

/// Overlay success of secondary transmitter `tx_index` toward `relay`.
pub fn secondary_success(tx_index: usize, relay: Point, snap: &SlotSnapshot, cfg: &NetworkConfig) -> bool {
    let f = snap.field;
    snap.secondary_tx[tx_index]
        && !blocked_linear(&f.secondary_nodes, &snap.secondary_tx, relay, cfg.ri_s(), Some(tx_index))
        && !blocked_linear(&f.primary_nodes, &snap.primary_tx, relay, cfg.ri_ps, None)
}

/// Active transmitters of one tier with a grid for disk-emptiness queries.
#[derive(Debug, Clone)]
pub struct TxSet {
    ids: Vec<u32>,
    grid: GridIndex,
}

impl TxSet {
    /// Indexes `nodes[i]` for every `i` with `on[i]`.
    pub fn build(nodes: &[Point], on: &[bool], center: Point, half_extent: f64, cell: f64) -> Self {
        let ids: Vec<u32> = on.iter().enumerate().filter(|(_, &t)| t).map(|(i, _)| i as u32).collect();
        let pts: Vec<Point> = ids.iter().map(|&i| nodes[i as usize]).collect();
        TxSet { grid: GridIndex::build(&pts, center, half_extent, cell), ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Node ids of the set, ascending.
    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    /// True if a member other than `exclude` lies within `radius` of `at`.
    #[inline]
    pub fn blocked(&self, at: Point, radius: f64, exclude: Option<u32>) -> bool {
        self.grid.any_within(at, radius, |i, _| Some(self.ids[i]) != exclude)
    }
}

/// Indexed form of the success events: `same` is the tier's transmitter
/// set, `cross` the other tier's (absent in a stand-alone network).
#[inline]
pub fn link_success(tx_index: u32, relay: Point, same: &TxSet, same_range: f64, cross: Option<(&TxSet, f64)>) -> bool {
    !same.blocked(relay, same_range, Some(tx_index)) && cross.is_none_or(|(set, r)| !set.blocked(relay, r, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Schedule;
    use crate::pointprocess::{Presence, Region};
    use crate::streams::{stream, Purpose, SimRng};
    use rand::SeedableRng;

    fn base_cfg() -> NetworkConfig {
        let mut cfg = Schedule::default().config(200.0);
        cfg.region = Region::disk(1.0);
        cfg
    }

    fn field(primary: Vec<Point>, secondary: Vec<Point>) -> PointField {
        PointField {
            primary_pairing: vec![0; primary.len()],
            secondary_pairing: vec![0; secondary.len()],
            primary_nodes: primary,
            secondary_nodes: secondary,
            seed: 0,
            trial: 0,
            rejections: 0,
        }
    }

    fn snapshot(f: &PointField, p: Vec<bool>, s: Vec<bool>) -> SlotSnapshot<'_> {
        SlotSnapshot { field: f, primary_tx: p, secondary_attempt: s.clone(), secondary_idle: s.clone(), secondary_tx: s }
    }

    #[test]
    fn sensing_examples() {
        let txs = [Point::new(0.5, 0.0)];
        assert_eq!(sense(Point::ORIGIN, &txs, 0.0), Sensing::Idle);
        assert_eq!(sense(Point::ORIGIN, &[Point::ORIGIN], 0.0), Sensing::Idle);
        assert_eq!(sense(Point::ORIGIN, &txs, 1.0), Sensing::Busy);
        assert_eq!(sense(Point::ORIGIN, &txs, 0.4), Sensing::Idle);
        assert_eq!(sense(Point::ORIGIN, &[], 5.0), Sensing::Idle);
    }

    #[test]
    fn certain_primary_access() {
        let mut cfg = base_cfg();
        cfg.q_p = 1.0;
        let f = PointField::sample(&cfg, Presence::BOTH, 1, 0).unwrap();
        let snap = mac_decisions(&f, &cfg, &mut SimRng::seed_from_u64(1));
        assert!(snap.primary_tx.iter().all(|&t| t));
    }

    #[test]
    fn primary_access_frequency() {
        let mut cfg = base_cfg();
        cfg.q_p = 0.3;
        let f = field(vec![Point::ORIGIN], vec![]);
        let mut rng = SimRng::seed_from_u64(2);
        let n = 10_000;
        let hits = (0..n).filter(|_| mac_decisions(&f, &cfg, &mut rng).primary_tx[0]).count() as f64;
        let sd = (n as f64 * 0.3 * 0.7).sqrt();
        assert!((hits - 0.3 * n as f64).abs() < 3.0 * sd);
    }

    #[test]
    fn full_suppression() {
        let mut cfg = base_cfg();
        cfg.r_d = 2.0;
        cfg.q_s = 1.0;
        let f = PointField::sample(&cfg, Presence::BOTH, 3, 0).unwrap();
        let snap = mac_decisions(&f, &cfg, &mut SimRng::seed_from_u64(3));
        assert!(snap.count(Tier::Primary) >= 1);
        assert_eq!(snap.count(Tier::Secondary), 0);
    }

    #[test]
    fn primary_success_examples() {
        let cfg = base_cfg();
        let ri_p = cfg.ri_p();
        let tx = Point::ORIGIN;
        let relay = Point::new(cfg.rr_p * 0.8, 0.0);

        let f = field(vec![tx, relay], vec![]);
        let snap = snapshot(&f, vec![true, false], vec![]);
        assert!(primary_success(0, relay, &snap, &cfg));
        let snap = snapshot(&f, vec![false, false], vec![]);
        assert!(!primary_success(0, relay, &snap, &cfg));
        // Relay transmitting itself.
        let snap = snapshot(&f, vec![true, true], vec![]);
        assert!(!primary_success(0, relay, &snap, &cfg));

        let other = relay.add(Point::new(0.0, 0.9 * ri_p));
        let f = field(vec![tx, relay, other], vec![]);
        assert!(!primary_success(0, relay, &snapshot(&f, vec![true, false, true], vec![]), &cfg));
        assert!(primary_success(0, relay, &snapshot(&f, vec![true, false, false], vec![]), &cfg));

        for (scale, expect) in [(0.9, false), (1.1, true)] {
            let s = relay.add(Point::new(0.0, -scale * cfg.ri_sp));
            let f = field(vec![tx, relay], vec![s]);
            assert_eq!(primary_success(0, relay, &snapshot(&f, vec![true, false], vec![true]), &cfg), expect);
        }
    }

    #[test]
    fn secondary_success_examples() {
        let mut cfg = base_cfg();
        let tx = Point::ORIGIN;
        let relay = Point::new(cfg.rr_s * 0.5, 0.0);

        // Lone pair: success frequency is q_s.
        cfg.q_s = 0.4;
        let f = field(vec![], vec![tx, relay]);
        let mut rng = SimRng::seed_from_u64(4);
        let n = 20_000;
        let wins = (0..n)
            .filter(|_| {
                let mut snap = mac_decisions(&f, &cfg, &mut rng);
                snap.secondary_tx[1] = false;
                secondary_success(0, relay, &snap, &cfg)
            })
            .count() as f64;
        assert!((wins - 0.4 * n as f64).abs() < 3.0 * (n as f64 * 0.24).sqrt());

        // Cross-tier veto.
        let p = relay.add(Point::new(0.0, 0.9 * cfg.ri_ps));
        let f = field(vec![p], vec![tx, relay]);
        assert!(!secondary_success(0, relay, &snapshot(&f, vec![true], vec![true, false]), &cfg));
        assert!(secondary_success(0, relay, &snapshot(&f, vec![false], vec![true, false]), &cfg));

        // Sensing veto precedes ALOHA.
        cfg.q_s = 1.0;
        cfg.q_p = 1.0;
        cfg.r_d = 0.2;
        let f = field(vec![Point::new(0.1, 0.0)], vec![tx, relay]);
        for _ in 0..100 {
            let snap = mac_decisions(&f, &cfg, &mut rng);
            assert!(!snap.secondary_tx[0]);
            assert!(!secondary_success(0, relay, &snap, &cfg));
        }
    }

    fn slots(cfg: &NetworkConfig, trials: u64) -> impl Iterator<Item = PointField> + '_ {
        (0..trials).map(move |t| PointField::sample(cfg, Presence::BOTH, 11, t).unwrap())
    }

    #[test]
    fn no_secondary_transmits_near_a_primary_transmitter() {
        let mut cfg = base_cfg();
        cfg.r_d = cfg.rr_p;
        cfg.q_s = 0.5;
        for f in slots(&cfg, 10) {
            let snap = mac_decisions(&f, &cfg, &mut stream(11, f.trial, Purpose::Mac));
            let ptx = snap.transmitters(Tier::Primary);
            for (i, &s) in f.secondary_nodes.iter().enumerate() {
                assert!(!snap.secondary_tx[i] || snap.secondary_idle[i]);
                if snap.secondary_tx[i] {
                    assert!(ptx.iter().all(|p| p.dist2(s) > cfg.r_d * cfg.r_d));
                }
            }
        }
    }

    #[test]
    fn large_detection_range_fully_protects_primary() {
        let mut cfg = base_cfg();
        cfg.q_s = 0.3;
        cfg.r_d = cfg.ri_sp + cfg.rr_p;
        for f in slots(&cfg, 5) {
            let snap = mac_decisions(&f, &cfg, &mut stream(11, f.trial, Purpose::Mac));
            let stx = snap.transmitters(Tier::Secondary);
            for (i, &tx) in f.primary_nodes.iter().enumerate().filter(|&(i, _)| snap.primary_tx[i]) {
                for &relay in f.primary_nodes.iter().filter(|p| p.dist2(tx) <= cfg.rr_p * cfg.rr_p) {
                    let vetoed = stx.iter().any(|s| s.dist2(relay) <= cfg.ri_sp * cfg.ri_sp);
                    assert!(!vetoed, "primary tx {i} vetoed by a secondary despite full protection");
                }
            }
        }
    }

    #[test]
    fn primary_successes_grow_with_detection_range() {
        let cfg0 = base_cfg();
        for f in slots(&cfg0, 5) {
            let mut last = 0usize;
            for alpha in [0.0, 0.5, 1.0, 1.5, 2.0] {
                let mut cfg = cfg0.clone();
                cfg.r_d = alpha * cfg.rr_p;
                let snap = mac_decisions(&f, &cfg, &mut stream(11, f.trial, Purpose::Mac));
                let wins = (0..f.primary_nodes.len())
                    .filter(|&i| {
                        let relay = f.primary_nodes[f.primary_pairing[i] as usize];
                        primary_success(i, relay, &snap, &cfg)
                    })
                    .count();
                assert!(wins >= last);
                last = wins;
            }
        }
    }

    #[test]
    fn effective_secondary_access_rate() {
        let mut cfg = base_cfg();
        cfg.q_s = 0.5;
        cfg.r_d = 0.5 * cfg.rr_p;
        let inner = 1.0 - cfg.r_d;
        // Nodes of one field share its primary realization, so the CI is
        // taken over trials.
        let (mut on, mut n) = (Vec::new(), Vec::new());
        for f in slots(&cfg, 300) {
            let snap = mac_decisions(&f, &cfg, &mut stream(11, f.trial, Purpose::Mac));
            let (mut a, mut b) = (0.0, 0.0);
            for (i, s) in f.secondary_nodes.iter().enumerate() {
                if s.norm() <= inner {
                    b += 1.0;
                    a += snap.secondary_tx[i] as u8 as f64;
                }
            }
            on.push(a);
            n.push(b);
        }
        assert!(n.iter().sum::<f64>() >= 10_000.0);
        let est = crate::stats::EstimateWithCI::ratio(&on, &n).unwrap();
        let p = cfg.effective_secondary_access();
        assert!(est.within_sigmas(p, 3.0), "{est:?} vs {p}");
    }

    #[test]
    fn indexed_events_match_reference() {
        let mut cfg = base_cfg();
        cfg.r_d = 0.7 * cfg.rr_p;
        cfg.q_s = 0.2;
        for f in slots(&cfg, 3) {
            let snap = mac_decisions(&f, &cfg, &mut stream(11, f.trial, Purpose::Mac));
            let lazy = mac_decisions_scoped(&f, &cfg, &mut stream(11, f.trial, Purpose::Mac), SenseScope::Attempting);
            assert_eq!(snap.secondary_tx, lazy.secondary_tx);
            let (c, h) = (cfg.region.center, cfg.region.radius);
            let ptx = TxSet::build(&f.primary_nodes, &snap.primary_tx, c, h, cfg.ri_p());
            let stx = TxSet::build(&f.secondary_nodes, &snap.secondary_tx, c, h, cfg.ri_s());
            for i in 0..f.primary_nodes.len() {
                let relay = f.primary_nodes[f.primary_pairing[i] as usize];
                let fast = snap.primary_tx[i] && link_success(i as u32, relay, &ptx, cfg.ri_p(), Some((&stx, cfg.ri_sp)));
                assert_eq!(fast, primary_success(i, relay, &snap, &cfg));
            }
            for i in 0..f.secondary_nodes.len() {
                let relay = f.secondary_nodes[f.secondary_pairing[i] as usize];
                let fast = snap.secondary_tx[i] && link_success(i as u32, relay, &stx, cfg.ri_s(), Some((&ptx, cfg.ri_ps)));
                assert_eq!(fast, secondary_success(i, relay, &snap, &cfg));
            }
        }
    }
}
