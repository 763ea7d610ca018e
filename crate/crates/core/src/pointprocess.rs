//! Homogeneous Poisson fields on a disk-shaped region and uniform
//! destination assignment.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::geometry::{distance, Point};
use crate::streams::{stream, Purpose};

/// Disk-shaped deployment region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub center: Point,
    pub radius: f64,
    pub area: f64,
}

impl Region {
    pub fn new(center: Point, radius: f64) -> Self {
        Region { center, radius, area: PI * radius * radius }
    }

    /// Disk of the given radius centred at the origin.
    pub fn disk(radius: f64) -> Self {
        Region::new(Point::ORIGIN, radius)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.center.dist2(p) <= self.radius * self.radius
    }

    /// Uniform point by polar inversion: exactly two draws per point.
    #[inline]
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let r = self.radius * rng.random::<f64>().sqrt();
        let theta = TAU * rng.random::<f64>();
        self.center.add(Point::from_polar(r, theta))
    }
}

/// Poisson point process of the given intensity on `region`.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, region: &Region, rng: &mut R) -> Vec<Point> {
    let n = poisson_count(density * region.area, rng);
    (0..n).map(|_| region.sample_point(rng)).collect()
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if !(mean > 0.0) {
        return 0;
    }
    let dist = Poisson::new(mean).expect("finite positive Poisson mean");
    dist.sample(rng) as usize
}

/// Each node independently picks a destination uniformly among the other
/// nodes. Several sources may share a destination.
pub fn assign_destinations<R: Rng + ?Sized>(nodes: &[Point], rng: &mut R) -> Result<Vec<u32>> {
    let n = nodes.len();
    if n < 2 {
        return Err(Error::DegenerateField { count: n });
    }
    Ok((0..n)
        .map(|i| {
            let j = rng.random_range(0..n - 1);
            (if j >= i { j + 1 } else { j }) as u32
        })
        .collect())
}

/// Distance between two independent uniform points of the region.
pub fn sd_distance_sample<R: Rng + ?Sized>(region: &Region, rng: &mut R) -> f64 {
    let a = region.sample_point(rng);
    let b = region.sample_point(rng);
    distance(a, b)
}

/// Which tiers a trial needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presence {
    pub primary: bool,
    pub secondary: bool,
}

impl Presence {
    pub const BOTH: Presence = Presence { primary: true, secondary: true };
    pub const PRIMARY: Presence = Presence { primary: true, secondary: false };
    pub const SECONDARY: Presence = Presence { primary: false, secondary: true };
}

/// One realisation of both node processes with their destination maps.
/// An absent tier has no nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PointField {
    pub primary_nodes: Vec<Point>,
    pub secondary_nodes: Vec<Point>,
    pub primary_pairing: Vec<u32>,
    pub secondary_pairing: Vec<u32>,
    pub seed: u64,
    pub trial: u64,
    /// Draws discarded because a present tier had fewer than two nodes.
    pub rejections: u32,
}

const MAX_RESAMPLES: u32 = 64;

impl PointField {
    /// Samples the present tiers of `cfg` from the `(seed, trial)` streams.
    /// A tier with fewer than two nodes is redrawn from the next substream.
    pub fn sample(cfg: &NetworkConfig, presence: Presence, seed: u64, trial: u64) -> Result<PointField> {
        let mut rejections = 0;
        let primary = if presence.primary {
            let (nodes, pairing, r) = sample_tier(cfg.lambda_p, &cfg.region, seed, trial, Purpose::PrimaryPoints, Purpose::PrimaryPairing)?;
            rejections += r;
            Some((nodes, pairing))
        } else {
            None
        };
        let secondary = if presence.secondary {
            let (nodes, pairing, r) =
                sample_tier(cfg.lambda_s(), &cfg.region, seed, trial, Purpose::SecondaryPoints, Purpose::SecondaryPairing)?;
            rejections += r;
            Some((nodes, pairing))
        } else {
            None
        };
        let (primary_nodes, primary_pairing) = primary.unwrap_or_default();
        let (secondary_nodes, secondary_pairing) = secondary.unwrap_or_default();
        Ok(PointField {
            primary_nodes,
            secondary_nodes,
            primary_pairing,
            secondary_pairing,
            seed,
            trial,
            rejections,
        })
    }

    pub fn nodes(&self, tier: crate::config::Tier) -> &[Point] {
        match tier {
            crate::config::Tier::Primary => &self.primary_nodes,
            crate::config::Tier::Secondary => &self.secondary_nodes,
        }
    }

    pub fn pairing(&self, tier: crate::config::Tier) -> &[u32] {
        match tier {
            crate::config::Tier::Primary => &self.primary_pairing,
            crate::config::Tier::Secondary => &self.secondary_pairing,
        }
    }
}

fn sample_tier(
    density: f64,
    region: &Region,
    seed: u64,
    trial: u64,
    points: Purpose,
    pairing: Purpose,
) -> Result<(Vec<Point>, Vec<u32>, u32)> {
    for attempt in 0..MAX_RESAMPLES {
        let key = trial ^ ((attempt as u64) << 48);
        let nodes = sample_ppp(density, region, &mut stream(seed, key, points));
        match assign_destinations(&nodes, &mut stream(seed, key, pairing)) {
            Ok(map) => return Ok((nodes, map, attempt)),
            Err(Error::DegenerateField { .. }) => {
                log::debug!("trial {trial}: degenerate field at attempt {attempt}, resampling");
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateField { count: 0 })
}
