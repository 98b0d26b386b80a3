//! Uniform cell index for fixed-radius neighbour queries in the plane.

use std::collections::HashMap;

/// Buckets points into square cells of side `>= radius`, so every point
/// within `radius` of a query lies in the query's cell or one of its eight
/// neighbours.
pub(crate) struct CellIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl CellIndex {
    pub fn new(points: &[[f64; 2]], radius: f64) -> Self {
        let extent = points
            .iter()
            .flatten()
            .fold(1.0f64, |m, c| m.max(c.abs()));
        let cell = radius.max(extent * 1e-9);
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key_for(cell, p)).or_default().push(i as u32);
        }
        CellIndex { cell, buckets }
    }

    fn key_for(cell: f64, p: &[f64; 2]) -> (i64, i64) {
        ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
    }

    /// Calls `f(j)` for every indexed point in the 3x3 block around `p`.
    /// Distances are not filtered.
    pub fn for_candidates(&self, p: &[f64; 2], mut f: impl FnMut(usize)) {
        let (cx, cy) = Self::key_for(self.cell, p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.buckets.get(&(cx + dx, cy + dy)) {
                    bucket.iter().for_each(|&j| f(j as usize));
                }
            }
        }
    }
}

pub(crate) fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// All pairs `(i, j)`, `i < j`, at distance strictly below `radius`, sorted.
pub(crate) fn pairs_within(points: &[[f64; 2]], radius: f64) -> Vec<(usize, usize)> {
    let index = CellIndex::new(points, radius);
    let mut pairs = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let start = pairs.len();
        index.for_candidates(p, |j| {
            if j > i && dist(p, &points[j]) < radius {
                pairs.push((i, j));
            }
        });
        pairs[start..].sort_unstable();
    }
    pairs
}
