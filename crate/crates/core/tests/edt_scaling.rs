//! The distance transform must scale linearly in the number of cells.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stopline::target_maps::{signed_distance_map, DEFAULT_D_THRESH};
use stopline::{Cell, GridGeometry, SegMask};

fn mask(side: usize, seed: u64) -> SegMask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = GridGeometry::new(side, side, 0.26, Cell::new(0, 0), 0.0).unwrap();
    SegMask::from_fn(g, |_| rng.random_bool(0.02))
}

fn median_runtime(m: &SegMask, reps: usize) -> Duration {
    let mut times: Vec<Duration> = (0..reps)
        .map(|_| {
            let started = Instant::now();
            std::hint::black_box(signed_distance_map(m, DEFAULT_D_THRESH).unwrap());
            started.elapsed()
        })
        .collect();
    times.sort();
    times[reps / 2]
}

#[test]
fn quadrupling_cells_at_most_quintuples_runtime() {
    let (small, large) = (mask(256, 1), mask(512, 2));
    // warm caches and the allocator before measuring
    signed_distance_map(&large, DEFAULT_D_THRESH).unwrap();
    let t_small = median_runtime(&small, 10);
    let t_large = median_runtime(&large, 10);
    let ratio = t_large.as_secs_f64() / t_small.as_secs_f64();
    println!("256^2 {t_small:?}, 512^2 {t_large:?}, ratio {ratio:.2}");
    assert!(ratio <= 5.0, "ratio {ratio:.2}");
}
