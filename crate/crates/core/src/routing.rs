//! Random half-disk geographic routing: each hop picks a node uniformly at
//! random inside the half-disk of radius `R_r` facing the destination.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{contains_with_axis, distance, Point};
use crate::grid::GridIndex;
use crate::stats::{EstimateWithCI, Welford};

/// A node population relays can be drawn from.
pub trait RelayCandidates {
    fn point(&self, index: usize) -> Point;

    /// Pushes, in ascending index order, every node inside the half-disk of
    /// radius `range` at `current` facing `dest`, except `current` itself.
    fn collect_forward(&self, current: Point, dest: Point, range: f64, out: &mut Vec<usize>);
}

#[inline]
fn forward_axis(current: Point, dest: Point) -> (f64, f64) {
    let d = dest.sub(current);
    let n = d.norm();
    debug_assert!(n > 0.0, "relay search with current == dest");
    (d.x / n, d.y / n)
}

/// Linear scan over a plain node list.
impl RelayCandidates for [Point] {
    fn point(&self, index: usize) -> Point {
        self[index]
    }

    fn collect_forward(&self, current: Point, dest: Point, range: f64, out: &mut Vec<usize>) {
        let axis = forward_axis(current, dest);
        out.extend(
            self.iter()
                .enumerate()
                .filter(|&(_, &p)| p != current && contains_with_axis(current, axis, range, p))
                .map(|(i, _)| i),
        );
    }
}

/// Node list with a bucket grid; returns the same candidates as the linear
/// scan.
pub struct IndexedNodes<'a> {
    pub points: &'a [Point],
    pub grid: &'a GridIndex,
}

impl RelayCandidates for IndexedNodes<'_> {
    fn point(&self, index: usize) -> Point {
        self.points[index]
    }

    fn collect_forward(&self, current: Point, dest: Point, range: f64, out: &mut Vec<usize>) {
        let axis = forward_axis(current, dest);
        let start = out.len();
        self.grid.for_each_within(current, range, |i, p| {
            if p != current && contains_with_axis(current, axis, range, p) {
                out.push(i);
            }
        });
        out[start..].sort_unstable();
    }
}

/// Uniform choice among the candidates in the forward half-disk; `None`
/// when the half-disk holds no node.
pub fn next_relay_index<C, R>(current: Point, dest: Point, range: f64, candidates: &C, rng: &mut R, scratch: &mut Vec<usize>) -> Option<usize>
where
    C: RelayCandidates + ?Sized,
    R: Rng + ?Sized,
{
    scratch.clear();
    candidates.collect_forward(current, dest, range, scratch);
    match scratch.len() {
        0 => None,
        k => Some(scratch[rng.random_range(0..k)]),
    }
}

/// Point-list form of [`next_relay_index`].
pub fn next_relay<R: Rng + ?Sized>(current: Point, dest: Point, range: f64, candidates: &[Point], rng: &mut R) -> Option<Point> {
    let mut scratch = Vec::new();
    next_relay_index(current, dest, range, candidates, rng, &mut scratch).map(|i| candidates[i])
}

/// Relay sequence of one packet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutePath {
    /// X_0 (source) through the last relay visited.
    pub hops: Vec<Point>,
    /// Y_n = r_{n−1} − r_n for every hop taken.
    pub progresses: Vec<f64>,
    /// Source–destination distance h.
    pub initial_distance: f64,
    /// Hops taken; equals ν when converged.
    pub stop_index: usize,
    pub converged: bool,
}

impl RoutePath {
    /// Distance from the last visited node to the destination.
    pub fn final_distance(&self) -> f64 {
        self.initial_distance - self.progresses.iter().sum::<f64>()
    }
}

/// Hop budget `⌈20·h/R_r⌉`, at least one.
pub fn default_max_hops(h: f64, range: f64) -> usize {
    ((20.0 * h / range).ceil() as usize).max(1)
}

/// Builds the path from `source` until a relay is within `range` of
/// `dest`. A hop with an empty forward half-disk, or running out of
/// `max_hops`, ends the path unconverged.
pub fn build_route<C, R>(source: Point, dest: Point, range: f64, field: &C, rng: &mut R, max_hops: usize) -> RoutePath
where
    C: RelayCandidates + ?Sized,
    R: Rng + ?Sized,
{
    assert!(max_hops >= 1, "max_hops must be positive");
    let h = distance(source, dest);
    let mut path = RoutePath {
        hops: vec![source],
        progresses: Vec::new(),
        initial_distance: h,
        stop_index: 0,
        converged: false,
    };
    let mut scratch = Vec::new();
    let mut current = source;
    let mut r = h;
    loop {
        if r <= range {
            path.converged = true;
            break;
        }
        if path.progresses.len() >= max_hops {
            break;
        }
        let Some(i) = next_relay_index(current, dest, range, field, rng, &mut scratch) else {
            break;
        };
        let next = field.point(i);
        let r_next = distance(next, dest);
        path.progresses.push(r - r_next);
        path.hops.push(next);
        current = next;
        r = r_next;
    }
    path.stop_index = path.progresses.len();
    path
}

/// Pooled per-hop progress and per-packet `(h − r_ν)/ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProgressEstimates {
    pub per_hop: EstimateWithCI,
    pub per_packet: EstimateWithCI,
    pub converged: u64,
    pub unconverged: u64,
    /// Converged paths with ν = 0 (source already in range).
    pub zero_hop: u64,
}

pub fn progress_estimators(paths: &[RoutePath]) -> Result<ProgressEstimates> {
    let mut hop = Welford::default();
    let mut packet = Welford::default();
    let (mut converged, mut zero_hop) = (0u64, 0u64);
    for p in paths.iter().filter(|p| p.converged) {
        converged += 1;
        if p.stop_index == 0 {
            zero_hop += 1;
            continue;
        }
        p.progresses.iter().for_each(|&y| hop.push(y));
        packet.push((p.initial_distance - p.final_distance()) / p.stop_index as f64);
    }
    let (Some(per_hop), Some(per_packet)) = (hop.estimate(), packet.estimate()) else {
        return Err(Error::NoData("no converged path with at least one hop"));
    };
    Ok(ProgressEstimates {
        per_hop,
        per_packet,
        converged,
        unconverged: paths.len() as u64 - converged,
        zero_hop,
    })
}
