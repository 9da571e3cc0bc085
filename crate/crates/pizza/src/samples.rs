//! Seeded random instance generators for tests, benchmarks and
//! experimentation. All generators are deterministic for a fixed seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{orient, Orientation, Point};
use crate::instance::PointFamily;

/// Deterministic RNG for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn accepts(union: &[Point], candidate: &Point) -> bool {
    if union.iter().any(|p| p == candidate) {
        return false;
    }
    for i in 0..union.len() {
        for j in (i + 1)..union.len() {
            if orient(&union[i], &union[j], candidate) == Orientation::Collinear {
                return false;
            }
        }
    }
    true
}

/// Random valid family with `set_count` sets of sizes drawn from `sizes`.
///
/// Points live on an integer grid scaled with the instance so collinear
/// rejections stay rare; the result always passes validation.
pub fn random_family(rng: &mut impl Rng, set_count: usize, sizes: &[usize]) -> PointFamily {
    let chosen: Vec<usize> = (0..set_count)
        .map(|_| sizes[rng.gen_range(0..sizes.len())])
        .collect();
    let m: usize = chosen.iter().sum();
    let k = 4 * (m * m + 2) as i64;
    let mut union: Vec<Point> = Vec::with_capacity(m);
    let mut sets = Vec::with_capacity(set_count);
    for &size in &chosen {
        let mut set = Vec::with_capacity(size);
        for _ in 0..size {
            let p = loop {
                let candidate = Point::from_ints(rng.gen_range(-k..=k), rng.gen_range(-k..=k));
                if accepts(&union, &candidate) {
                    break candidate;
                }
            };
            union.push(p.clone());
            set.push(p);
        }
        sets.push(set);
    }
    let family = PointFamily::new(sets);
    debug_assert!(family.is_valid());
    family
}

/// Random valid family with odd set sizes up to `max_size` (inclusive).
pub fn random_odd_family(rng: &mut impl Rng, set_count: usize, max_size: usize) -> PointFamily {
    let sizes: Vec<usize> = (1..=max_size).step_by(2).collect();
    random_family(rng, set_count, &sizes)
}

/// Random well-separated family: tight clusters strung along a steep
/// parabola, far enough apart that no line through two clusters comes near a
/// third. Sizes drawn from `sizes`.
pub fn random_separated_family(
    rng: &mut impl Rng,
    set_count: usize,
    sizes: &[usize],
) -> PointFamily {
    let spacing: i64 = 1_000_000;
    // Chord-to-vertex distance on the parabola is at least `spacing / (4n+2)`
    // for unit index gaps; keep cluster radii two orders below that.
    let radius = spacing / (100 * (4 * set_count as i64 + 2));
    let mut union: Vec<Point> = Vec::new();
    let mut sets = Vec::with_capacity(set_count);
    for i in 0..set_count {
        let size = sizes[rng.gen_range(0..sizes.len())];
        let t = (i as i64) + 1;
        let center = Point::from_ints(spacing * t, spacing * t * t);
        let mut set = Vec::with_capacity(size);
        for _ in 0..size {
            let p = loop {
                let dx = rng.gen_range(-radius..=radius);
                let dy = rng.gen_range(-radius..=radius);
                let candidate = Point::new(
                    &center.x + crate::geometry::rat_int(dx),
                    &center.y + crate::geometry::rat_int(dy),
                );
                if accepts(&union, &candidate) {
                    break candidate;
                }
            };
            union.push(p.clone());
            set.push(p);
        }
        sets.push(set);
    }
    let family = PointFamily::new(sets);
    debug_assert!(family.is_valid());
    family
}
