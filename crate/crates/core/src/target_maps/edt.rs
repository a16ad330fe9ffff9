//! Exact Euclidean nearest-site transform.
//!
//! Two separable passes: a per-column scan finds the nearest foreground row
//! in every column, then a per-row lower envelope of parabolas
//! `(x - j)^2 + g_j` picks the nearest column. All arithmetic is integer, and
//! envelope breakpoints are kept as exact rationals so equidistant sites can
//! be resolved by the (row, col) tie rule instead of by scan order.
//!
//! Runs in O(height * width).

use std::cmp::Ordering;

pub(crate) const NO_SITE: u32 = u32::MAX;

pub(crate) struct NearestSites {
    /// Row-major index of the nearest foreground cell, or `NO_SITE`.
    pub site: Vec<u32>,
    /// Squared distance to `site`; meaningless where `site == NO_SITE`.
    pub sq_dist: Vec<u64>,
}

/// Rational `num / den` with `den > 0`.
#[derive(Clone, Copy)]
struct Frac {
    num: i64,
    den: i64,
}

impl Frac {
    fn cmp_int(self, x: i64) -> Ordering {
        self.num.cmp(&(x * self.den))
    }

    fn lt(self, other: Frac) -> bool {
        (self.num as i128) * (other.den as i128) < (other.num as i128) * (self.den as i128)
    }
}

pub(crate) fn nearest_sites(height: usize, width: usize, fg: &[u8]) -> NearestSites {
    debug_assert_eq!(fg.len(), height * width);
    let n = height * width;
    if u32::try_from(n).is_err() {
        panic!("raster of {n} cells exceeds the u32 index space");
    }

    // Pass 1: nearest foreground row within each column (ties -> smaller row).
    const NONE: i64 = i64::MIN;
    let mut near_row = vec![NONE; n];
    for c in 0..width {
        let mut above = NONE;
        for r in 0..height {
            if fg[r * width + c] != 0 {
                above = r as i64;
            }
            near_row[r * width + c] = above;
        }
        let mut below = NONE;
        for r in (0..height).rev() {
            let idx = r * width + c;
            if fg[idx] != 0 {
                below = r as i64;
            }
            if below == NONE {
                continue;
            }
            let up = near_row[idx];
            if up == NONE || (below - r as i64) < (r as i64 - up) {
                near_row[idx] = below;
            }
        }
    }

    // Pass 2: lower envelope per row.
    let mut site = vec![NO_SITE; n];
    let mut sq_dist = vec![0u64; n];
    let mut cols: Vec<i64> = Vec::with_capacity(width);
    let mut bounds: Vec<Option<Frac>> = Vec::with_capacity(width);
    let mut g = vec![0i64; width];
    for r in 0..height {
        let row_off = r * width;
        cols.clear();
        bounds.clear();
        for j in 0..width {
            let nr = near_row[row_off + j];
            if nr == NONE {
                continue;
            }
            let dr = r as i64 - nr;
            g[j] = dr * dr;
            let q = j as i64;
            loop {
                let Some(&p) = cols.last() else {
                    cols.push(q);
                    bounds.push(None);
                    break;
                };
                let gp = g[p as usize];
                let s = Frac {
                    num: (g[j] + q * q) - (gp + p * p),
                    den: 2 * (q - p),
                };
                match *bounds.last().unwrap() {
                    Some(z) if s.lt(z) => {
                        cols.pop();
                        bounds.pop();
                    }
                    _ => {
                        cols.push(q);
                        bounds.push(Some(s));
                        break;
                    }
                }
            }
        }
        if cols.is_empty() {
            continue;
        }

        let value = |j: i64, x: i64| (x - j) * (x - j) + g[j as usize];
        let mut k = 0usize;
        for x in 0..width as i64 {
            while k + 1 < cols.len() && bounds[k + 1].unwrap().cmp_int(x) == Ordering::Less {
                k += 1;
            }
            let mut best = cols[k];
            let mut best_key = (value(best, x), near_row[row_off + best as usize], best);
            let mut m = k + 1;
            while m < cols.len() && bounds[m].unwrap().cmp_int(x) != Ordering::Greater {
                let j = cols[m];
                let key = (value(j, x), near_row[row_off + j as usize], j);
                if key < best_key {
                    best = j;
                    best_key = key;
                }
                m += 1;
            }
            let idx = row_off + x as usize;
            let sr = near_row[row_off + best as usize] as usize;
            site[idx] = (sr * width + best as usize) as u32;
            sq_dist[idx] = best_key.0 as u64;
        }
    }
    NearestSites { site, sq_dist }
}
