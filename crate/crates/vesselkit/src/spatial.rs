//! Uniform-grid spatial index over 3D points.
//!
//! Cell size equals the query radius, so a radius query only has to scan
//! the 3x3x3 cell neighborhood. Candidates still need an exact distance
//! check by the caller.

use std::collections::HashMap;

pub(crate) struct GridIndex {
    cell: f64,
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
}

impl GridIndex {
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite());
        Self {
            cell,
            cells: HashMap::new(),
        }
    }

    fn key(&self, p: [f64; 3]) -> (i64, i64, i64) {
        (
            (p[0] / self.cell).floor() as i64,
            (p[1] / self.cell).floor() as i64,
            (p[2] / self.cell).floor() as i64,
        )
    }

    pub fn insert(&mut self, p: [f64; 3], id: u32) {
        self.cells.entry(self.key(p)).or_default().push(id);
    }

    /// Visit every candidate id whose cell lies within one cell of `p`.
    /// Covers all points within `cell` of `p` (and some farther ones).
    pub fn for_each_candidate(&self, p: [f64; 3], mut f: impl FnMut(u32)) {
        let (kx, ky, kz) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &id in ids {
                            f(id);
                        }
                    }
                }
            }
        }
    }
}
