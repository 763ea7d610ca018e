//! Planar primitives: points, full disks, oriented half-disks and the
//! disk overlap areas that feed the interference integrals.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(radius * c, radius * s)
    }

    #[inline]
    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    #[inline]
    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Euclidean distance.
#[inline]
pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Self {
        debug_assert!(radius >= 0.0, "negative disk radius {radius}");
        Disk { center, radius }
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    /// Closed-disk membership.
    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.center.dist2(p) <= self.radius * self.radius
    }
}

/// Half of a disk cut along a diameter. `orientation` is the direction of
/// the outward normal of the flat side, i.e. the direction the half-disk
/// "looks" towards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfDisk {
    pub apex: Point,
    pub orientation: f64,
    pub radius: f64,
}

impl HalfDisk {
    pub fn new(apex: Point, orientation: f64, radius: f64) -> Self {
        debug_assert!(radius >= 0.0, "negative half-disk radius {radius}");
        HalfDisk {
            apex,
            orientation: orientation.rem_euclid(TAU),
            radius,
        }
    }

    /// Half-disk at `apex` facing `target`.
    pub fn facing(apex: Point, target: Point, radius: f64) -> Self {
        let d = target.sub(apex);
        HalfDisk::new(apex, d.y.atan2(d.x), radius)
    }

    pub fn area(&self) -> f64 {
        0.5 * PI * self.radius * self.radius
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        let (s, c) = self.orientation.sin_cos();
        contains_with_axis(self.apex, (c, s), self.radius, p)
    }
}

/// Half-disk membership with a precomputed unit axis. Points on the flat
/// edge (zero projection) are inside.
#[inline]
pub(crate) fn contains_with_axis(apex: Point, axis: (f64, f64), radius: f64, p: Point) -> bool {
    let dx = p.x - apex.x;
    let dy = p.y - apex.y;
    dx * dx + dy * dy <= radius * radius && dx * axis.0 + dy * axis.1 >= 0.0
}

pub fn half_disk_contains(hd: &HalfDisk, p: Point) -> bool {
    hd.contains(p)
}

/// Area of `d1 ∩ d2` (circular lens).
pub fn disk_intersection_area(d1: &Disk, d2: &Disk) -> f64 {
    lens_area(d1.radius, d2.radius, distance(d1.center, d2.center))
}

/// Lens area for two disks of radii `r1`, `r2` whose centers are `d` apart.
pub fn lens_area(r1: f64, r2: f64, d: f64) -> f64 {
    if r1 <= 0.0 || r2 <= 0.0 || d >= r1 + r2 {
        return 0.0;
    }
    let small = r1.min(r2);
    if d <= (r1 - r2).abs() {
        return PI * small * small;
    }
    let c1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let c2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    let area = r1 * r1 * c1.acos() + r2 * r2 * c2.acos() - 0.5 * k.max(0.0).sqrt();
    area.clamp(0.0, PI * small * small)
}

/// Area of `d1 − d2`, the part of `d1` not covered by `d2`.
pub fn disk_difference_area(d1: &Disk, d2: &Disk) -> f64 {
    (d1.area() - disk_intersection_area(d1, d2)).max(0.0)
}

/// `|B_{r1}(0) − B_{r2}(d,0)|` without building disks.
pub fn difference_area(r1: f64, r2: f64, d: f64) -> f64 {
    (PI * r1 * r1 - lens_area(r1, r2, d)).max(0.0)
}

/// Area of `d1 ∪ d2`.
pub fn disk_union_area(d1: &Disk, d2: &Disk) -> f64 {
    d1.area() + d2.area() - disk_intersection_area(d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(center: Point) -> Disk {
        Disk::new(center, 1.0)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Point::ORIGIN, Point::ORIGIN), 0.0);
        assert_eq!(distance(Point::ORIGIN, Point::new(3.0, 4.0)), 5.0);
        assert!((distance(Point::new(1.0, 1.0), Point::new(-2.0, 5.0)) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn lens_area_examples() {
        let a = unit(Point::ORIGIN);
        assert!((disk_intersection_area(&a, &unit(Point::ORIGIN)) - PI).abs() < 1e-14);
        assert_eq!(disk_intersection_area(&a, &unit(Point::new(2.0, 0.0))), 0.0);
        // 2π/3 − √3/2
        let half = disk_intersection_area(&a, &unit(Point::new(1.0, 0.0)));
        assert!((half - (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0)).abs() < 1e-14);
        assert!((half - 1.22837).abs() < 1e-5);
    }

    #[test]
    fn lens_area_against_darts() {
        // Dart-throwing over the bounding square of d1; 10^7 samples.
        let d1 = unit(Point::ORIGIN);
        let d2 = unit(Point::new(1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000_000u64;
        let mut hits = 0u64;
        for _ in 0..n {
            let p = Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if d1.contains(p) && d2.contains(p) {
                hits += 1;
            }
        }
        let frac = hits as f64 / n as f64;
        let est = 4.0 * frac;
        let sigma = 4.0 * (frac * (1.0 - frac) / n as f64).sqrt();
        assert!((est - disk_intersection_area(&d1, &d2)).abs() < 3.0 * sigma);
    }

    #[test]
    fn containment_and_zero_radius() {
        let big = Disk::new(Point::ORIGIN, 2.0);
        let small = Disk::new(Point::new(0.5, 0.0), 0.5);
        assert!((disk_intersection_area(&big, &small) - small.area()).abs() < 1e-15);
        assert_eq!(disk_intersection_area(&big, &Disk::new(Point::ORIGIN, 0.0)), 0.0);
        assert!((disk_difference_area(&big, &Disk::new(Point::ORIGIN, 0.0)) - big.area()).abs() < 1e-15);
    }

    #[test]
    fn difference_examples() {
        let a = unit(Point::ORIGIN);
        assert_eq!(disk_difference_area(&a, &unit(Point::ORIGIN)), 0.0);
        let far = Disk::new(Point::new(10.0, 0.0), 0.5);
        assert!((disk_difference_area(&a, &far) - PI).abs() < 1e-15);
        let d = disk_difference_area(&a, &unit(Point::new(1.0, 0.0)));
        assert!((d - 1.91322).abs() < 1e-5);
    }

    #[test]
    fn half_disk_examples() {
        let hd = HalfDisk::new(Point::ORIGIN, 0.0, 1.0);
        assert!(hd.contains(Point::new(0.5, 0.0)));
        assert!(!hd.contains(Point::new(-0.5, 0.0)));
        let up = HalfDisk::new(Point::ORIGIN, PI / 2.0, 1.0);
        assert!(up.contains(Point::new(0.3, 0.4)));
        // Flat edge counts as inside.
        assert!(hd.contains(Point::new(0.0, 0.7)));
        assert!((HalfDisk::new(Point::ORIGIN, -PI / 2.0, 1.0).orientation - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn half_disk_facing_points_at_target() {
        let hd = HalfDisk::facing(Point::new(1.0, 1.0), Point::new(1.0, 3.0), 0.5);
        assert!((hd.orientation - PI / 2.0).abs() < 1e-15);
        assert!(hd.contains(Point::new(1.0, 1.4)));
        assert!(!hd.contains(Point::new(1.0, 0.6)));
    }

    proptest! {
        #[test]
        fn intersection_symmetric_and_bounded(r1 in 0.0f64..3.0, r2 in 0.0f64..3.0, d in 0.0f64..7.0) {
            let a = Disk::new(Point::ORIGIN, r1);
            let b = Disk::new(Point::new(d, 0.0), r2);
            let ab = disk_intersection_area(&a, &b);
            let ba = disk_intersection_area(&b, &a);
            prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab));
            prop_assert!(ab >= 0.0 && ab <= a.area().min(b.area()) + 1e-12);
            let diff = disk_difference_area(&a, &b);
            prop_assert!((diff + ab - a.area()).abs() <= 1e-12 * a.area().max(1.0));
            prop_assert!(diff >= (a.area() - b.area()).max(0.0) - 1e-12);
            prop_assert!(diff <= a.area() + 1e-12);
        }

        #[test]
        fn intersection_nonincreasing_in_distance(r1 in 0.01f64..2.0, r2 in 0.01f64..2.0, d in 0.0f64..4.0, step in 0.0f64..0.5) {
            let near = lens_area(r1, r2, d);
            let far = lens_area(r1, r2, d + step);
            prop_assert!(far <= near + 1e-12);
        }

        #[test]
        fn intersection_continuous_in_distance(r1 in 0.1f64..2.0, r2 in 0.1f64..2.0, d in 0.0f64..4.0) {
            let h = 1e-7;
            let jump = (lens_area(r1, r2, d + h) - lens_area(r1, r2, d)).abs();
            // |dA/dd| is bounded by twice the smaller radius.
            prop_assert!(jump <= 2.0 * r1.min(r2) * h * 1.01 + 1e-12);
        }

        #[test]
        fn opposite_half_disks_partition(theta in 0.0f64..TAU, r in 0.0f64..1.0, phi in 0.0f64..TAU) {
            let p = Point::from_polar(r, phi);
            let a = HalfDisk::new(Point::ORIGIN, theta, 1.0);
            let b = HalfDisk::new(Point::ORIGIN, theta + PI, 1.0);
            let on_diameter = (p.x * theta.cos() + p.y * theta.sin()).abs() < 1e-12;
            if !on_diameter {
                prop_assert!(a.contains(p) ^ b.contains(p));
            }
        }
    }
}
