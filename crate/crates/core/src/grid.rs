//! Uniform bucket grid over a point set for fixed-radius queries.

use crate::geometry::Point;

/// Points bucketed into square cells. Items are stored cell by cell, so a
/// query touches contiguous memory.
#[derive(Debug, Clone)]
pub struct GridIndex {
    origin: Point,
    cell: f64,
    inv_cell: f64,
    cols: usize,
    rows: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
    coords: Vec<Point>,
}

const MAX_CELLS: usize = 1 << 22;

impl GridIndex {
    /// Builds an index of `points` (assumed to lie in the square of
    /// half-width `half_extent` centred at `center`) with cells no smaller
    /// than `cell`.
    pub fn build(points: &[Point], center: Point, half_extent: f64, cell: f64) -> Self {
        let side = 2.0 * half_extent.max(f64::MIN_POSITIVE);
        let mut cell = if cell.is_finite() && cell > 0.0 { cell } else { side };
        let mut cols = (side / cell).ceil().max(1.0) as usize;
        if cols * cols > MAX_CELLS {
            cols = (MAX_CELLS as f64).sqrt() as usize;
            cell = side / cols as f64;
        }
        let rows = cols;
        let origin = Point::new(center.x - half_extent, center.y - half_extent);
        let mut grid = GridIndex {
            origin,
            cell,
            inv_cell: 1.0 / cell,
            cols,
            rows,
            starts: vec![0; cols * rows + 1],
            items: vec![0; points.len()],
            coords: vec![Point::ORIGIN; points.len()],
        };
        let keys: Vec<u32> = points.iter().map(|&p| grid.cell_of(p) as u32).collect();
        for &k in &keys {
            grid.starts[k as usize + 1] += 1;
        }
        for i in 0..cols * rows {
            grid.starts[i + 1] += grid.starts[i];
        }
        let mut fill = grid.starts.clone();
        for (i, &k) in keys.iter().enumerate() {
            let slot = fill[k as usize] as usize;
            fill[k as usize] += 1;
            grid.items[slot] = i as u32;
            grid.coords[slot] = points[i];
        }
        grid
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Cell side actually used (may exceed the requested one).
    pub fn cell(&self) -> f64 {
        self.cell
    }

    #[inline]
    fn col_row(&self, p: Point) -> (isize, isize) {
        (
            ((p.x - self.origin.x) * self.inv_cell).floor() as isize,
            ((p.y - self.origin.y) * self.inv_cell).floor() as isize,
        )
    }

    #[inline]
    fn cell_of(&self, p: Point) -> usize {
        let (c, r) = self.col_row(p);
        let c = c.clamp(0, self.cols as isize - 1) as usize;
        let r = r.clamp(0, self.rows as isize - 1) as usize;
        r * self.cols + c
    }

    /// Calls `f(index, point)` for every indexed point within `radius` of
    /// `center` (closed disk). Visiting order is by cell, not by index.
    #[inline]
    pub fn for_each_within<F: FnMut(usize, Point)>(&self, center: Point, radius: f64, mut f: F) {
        let r2 = radius * radius;
        self.scan_cells(center, radius, |idx, p| {
            if p.dist2(center) <= r2 {
                f(idx, p);
            }
            true
        });
    }

    /// True if some indexed point within `radius` of `center` satisfies `pred`.
    #[inline]
    pub fn any_within<F: FnMut(usize, Point) -> bool>(&self, center: Point, radius: f64, mut pred: F) -> bool {
        let r2 = radius * radius;
        let mut found = false;
        self.scan_cells(center, radius, |idx, p| {
            if p.dist2(center) <= r2 && pred(idx, p) {
                found = true;
                return false;
            }
            true
        });
        found
    }

    /// Visits candidates in the cells overlapping the query square; stops
    /// when `f` returns false.
    #[inline]
    fn scan_cells<F: FnMut(usize, Point) -> bool>(&self, center: Point, radius: f64, mut f: F) {
        if self.items.is_empty() || radius < 0.0 {
            return;
        }
        let lo = self.col_row(Point::new(center.x - radius, center.y - radius));
        let hi = self.col_row(Point::new(center.x + radius, center.y + radius));
        let c0 = lo.0.max(0);
        let r0 = lo.1.max(0);
        let c1 = hi.0.min(self.cols as isize - 1);
        let r1 = hi.1.min(self.rows as isize - 1);
        if c0 > c1 || r0 > r1 {
            return;
        }
        for r in r0..=r1 {
            let base = r as usize * self.cols;
            let s = self.starts[base + c0 as usize] as usize;
            let e = self.starts[base + c1 as usize + 1] as usize;
            for slot in s..e {
                if !f(self.items[slot] as usize, self.coords[slot]) {
                    return;
                }
            }
        }
    }
}
