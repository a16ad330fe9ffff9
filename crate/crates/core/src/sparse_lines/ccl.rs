//! Two-pass connected-component labeling, 8-connectivity, union-find.

use crate::grid_map::{Cell, MetricPoint};
use crate::target_maps::SegMask;

/// A maximal 8-connected group of foreground cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Cells in raster order.
    pub cells: Vec<Cell>,
    /// Mean metric position of the cell centers.
    pub centroid: MetricPoint,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Labels foreground cells. Clusters are ordered by their first cell in
/// raster order, i.e. by minimum row and then the minimum column within that
/// row.
pub fn connected_components(mask: &SegMask) -> Vec<Cluster> {
    const BG: u32 = u32::MAX;
    let (h, w) = (mask.height(), mask.width());
    let bits = mask.as_bits();
    let mut labels = vec![BG; h * w];
    let mut uf = UnionFind { parent: Vec::new() };

    for r in 0..h {
        for c in 0..w {
            let idx = r * w + c;
            if bits[idx] == 0 {
                continue;
            }
            let mut label = BG;
            let mut neighbors = [BG; 4];
            if c > 0 {
                neighbors[0] = labels[idx - 1];
            }
            if r > 0 {
                let up = idx - w;
                if c > 0 {
                    neighbors[1] = labels[up - 1];
                }
                neighbors[2] = labels[up];
                if c + 1 < w {
                    neighbors[3] = labels[up + 1];
                }
            }
            for n in neighbors.into_iter().filter(|&n| n != BG) {
                label = if label == BG { n } else { uf.union(label, n) };
            }
            labels[idx] = if label == BG { uf.make() } else { label };
        }
    }

    let geometry = mask.geometry();
    let mut slot = vec![u32::MAX; uf.parent.len()];
    let mut groups: Vec<Vec<Cell>> = Vec::new();
    for (idx, &label) in labels.iter().enumerate() {
        if label == BG {
            continue;
        }
        let root = uf.find(label) as usize;
        if slot[root] == u32::MAX {
            slot[root] = groups.len() as u32;
            groups.push(Vec::new());
        }
        groups[slot[root] as usize].push(geometry.cell_of_index(idx));
    }

    groups
        .into_iter()
        .map(|cells| {
            let (sx, sy) = cells.iter().fold((0.0, 0.0), |(sx, sy), &c| {
                let p = geometry.cell_to_metric(c);
                (sx + p.x, sy + p.y)
            });
            let n = cells.len() as f64;
            Cluster {
                centroid: MetricPoint::new(sx / n, sy / n),
                cells,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_map::GridGeometry;
    use proptest::prelude::*;
    use std::collections::{BTreeSet, VecDeque};

    fn geom(h: usize, w: usize) -> GridGeometry {
        GridGeometry::new(h, w, 0.26, Cell::new(0, 0), 0.0).unwrap()
    }

    /// Breadth-first flood fill oracle.
    fn flood_fill(mask: &SegMask) -> Vec<BTreeSet<Cell>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in mask.foreground() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some(c) = queue.pop_front() {
                for dr in -1..=1 {
                    for dc in -1..=1 {
                        let n = Cell::new(c.row + dr, c.col + dc);
                        if mask.get(n) && seen.insert(n) {
                            comp.insert(n);
                            queue.push_back(n);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    #[test]
    fn empty_mask() {
        assert!(connected_components(&SegMask::empty(geom(5, 5))).is_empty());
    }

    #[test]
    fn diagonal_touch_is_one() {
        let mut m = SegMask::empty(geom(3, 3));
        m.set(Cell::new(0, 0), true);
        m.set(Cell::new(1, 1), true);
        assert_eq!(connected_components(&m).len(), 1);
    }

    #[test]
    fn anti_diagonal_merges_labels() {
        // the NE neighbor joins two provisional labels
        let m = SegMask::from_fn(geom(4, 6), |c| {
            (c.row == 1 && c.col == 0) || (c.row == 0 && c.col == 2) || (c.row == 1 && c.col == 1)
        });
        let cl = connected_components(&m);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].len(), 3);
    }

    #[test]
    fn two_runs_with_gap() {
        let m = SegMask::from_fn(geom(10, 10), |c| {
            c.row == 4 && ((1..4).contains(&c.col) || (6..9).contains(&c.col))
        });
        let cl = connected_components(&m);
        assert_eq!(cl.len(), 2);
        assert_eq!(flood_fill(&m).len(), 2);
        assert_eq!(cl[0].cells[0], Cell::new(4, 1));
        assert_eq!(cl[1].cells[0], Cell::new(4, 6));
    }

    #[test]
    fn u_shape_ordering() {
        // a U opens upward: two provisional labels on row 0 join at the bottom
        let m = SegMask::from_fn(geom(5, 5), |c| c.col == 0 || c.col == 4 || c.row == 4);
        let cl = connected_components(&m);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].len(), 13);
    }

    proptest! {
        #[test]
        fn matches_flood_fill(
            h in 1usize..14, w in 1usize..14,
            bits in proptest::collection::vec(0u8..3, 14 * 14),
        ) {
            let m = SegMask::from_fn(geom(h, w), |c| bits[c.row as usize * 14 + c.col as usize] == 0);
            let got: Vec<BTreeSet<Cell>> = connected_components(&m)
                .into_iter()
                .map(|cl| cl.cells.into_iter().collect())
                .collect();
            // flood fill also discovers components in raster order of first cell
            prop_assert_eq!(got, flood_fill(&m));
        }
    }
}
