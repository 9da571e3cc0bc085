//! Exhaustive oracle: enumerate every bisecting arrangement of a family by
//! searching all representative choices and all perfect matchings.
//!
//! This module optimizes for trustworthiness, not speed; the only
//! performance concession is a precomputed side-vector table so the
//! candidate loop runs on bitmasks instead of repeated exact orientation
//! tests. Every emitted arrangement re-verifies against
//! [`arrangement::is_bisecting`].

use std::collections::HashSet;

use thiserror::Error;

use crate::arrangement::{self, Arrangement};
use crate::geometry::{orient, Orientation, Point, PointRef};
use crate::instance::PointFamily;

#[derive(Debug, Error)]
pub enum BruteError {
    #[error("family is not valid: {0}")]
    InvalidFamily(String),
    #[error("set {set} has even size {size}; pad the family first")]
    EvenSet { set: usize, size: usize },
}

/// All perfect matchings of `{0, .., k-1}` in lexicographic order of the
/// pairing sequence. Each matching lists pairs `(a, b)` with `a < b`, sorted
/// by `a`.
pub fn perfect_matchings(k: usize) -> Vec<Vec<(usize, usize)>> {
    assert!(k % 2 == 0, "matchings need an even ground set");
    let mut out = Vec::new();
    let mut free: Vec<usize> = (0..k).collect();
    let mut current = Vec::new();
    fn rec(
        free: &mut Vec<usize>,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if free.is_empty() {
            out.push(current.clone());
            return;
        }
        let a = free[0];
        for i in 1..free.len() {
            let b = free[i];
            let mut rest: Vec<usize> = free
                .iter()
                .copied()
                .filter(|&x| x != a && x != b)
                .collect();
            current.push((a, b));
            rec(&mut rest, current, out);
            current.pop();
        }
    }
    rec(&mut free, &mut current, &mut out);
    out
}

/// `(k-1)!! = (k-1)(k-3)...3*1` for even `k`; the perfect matching count.
pub fn double_factorial_odd(k: usize) -> usize {
    assert!(k % 2 == 0);
    let mut acc = 1usize;
    let mut i = k.saturating_sub(1);
    while i > 1 {
        acc *= i;
        i -= 2;
    }
    acc
}

/// Fixed-width bitmask over the family's points in global (set-major) order.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Mask {
    words: Vec<u64>,
}

impl Mask {
    fn zeros(bits: usize) -> Self {
        Mask {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1u64 << (bit % 64);
    }

    fn xor_assign(&mut self, other: &Mask) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    fn clear(&mut self) {
        self.words.fill(0);
    }
}

/// Candidate evaluation context: global point order, set masks, and for
/// every cross-set point pair the mask of points strictly to its left.
struct SideTable {
    point_count: usize,
    refs: Vec<PointRef>,
    global_of: Vec<Vec<usize>>,
    set_masks: Vec<Mask>,
    half: Vec<usize>,
    /// `left[i * m + j]`: points strictly left of the line `i -> j`.
    left: Vec<Option<Mask>>,
}

impl SideTable {
    fn build(family: &PointFamily) -> Self {
        let points: Vec<(PointRef, &Point)> = family.points().collect();
        let m = points.len();
        let mut global_of: Vec<Vec<usize>> = vec![Vec::new(); family.set_count()];
        for (g, (r, _)) in points.iter().enumerate() {
            global_of[r.set].push(g);
            debug_assert_eq!(global_of[r.set].len() - 1, r.index);
        }
        let mut set_masks: Vec<Mask> = vec![Mask::zeros(m); family.set_count()];
        for (g, (r, _)) in points.iter().enumerate() {
            set_masks[r.set].set(g);
        }
        let half = (0..family.set_count())
            .map(|s| (family.set(s).len() - 1) / 2)
            .collect();
        let mut left = vec![None; m * m];
        for i in 0..m {
            for j in 0..m {
                if i == j || points[i].0.set == points[j].0.set {
                    continue;
                }
                let mut mask = Mask::zeros(m);
                for (t, (_, p)) in points.iter().enumerate() {
                    if t == i || t == j {
                        continue;
                    }
                    // General position: no third point is collinear.
                    if orient(points[i].1, points[j].1, p) == Orientation::Counterclockwise {
                        mask.set(t);
                    }
                }
                left[i * m + j] = Some(mask);
            }
        }
        SideTable {
            point_count: m,
            refs: points.into_iter().map(|(r, _)| r).collect(),
            global_of,
            set_masks,
            half,
            left,
        }
    }

    /// True iff the candidate line set bisects every set. `lines` holds
    /// global point index pairs; parity is measured against each line's
    /// left side, which fixes one of the two region-equivalent orientations.
    fn candidate_bisects(&self, lines: &[(usize, usize)], parity: &mut Mask, on: &mut Mask) -> bool {
        parity.clear();
        on.clear();
        for &(i, j) in lines {
            let mask = self.left[i * self.point_count + j]
                .as_ref()
                .expect("cross-set pair");
            parity.xor_assign(mask);
            on.words[i / 64] |= 1u64 << (i % 64);
            on.words[j / 64] |= 1u64 << (j % 64);
        }
        for (s, set_mask) in self.set_masks.iter().enumerate() {
            // Points of the set in R+: off every line, even parity count.
            let mut plus = 0usize;
            for ((&p, &o), &sm) in parity.words.iter().zip(&on.words).zip(&set_mask.words) {
                plus += (!p & !o & sm).count_ones() as usize;
            }
            if plus != self.half[s] {
                return false;
            }
        }
        true
    }
}

fn check_preconditions(family: &PointFamily) -> Result<(), BruteError> {
    let report = family.validate();
    if !report.is_valid() {
        return Err(BruteError::InvalidFamily(
            report
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    for s in 0..family.set_count() {
        if family.set(s).len() % 2 == 0 {
            return Err(BruteError::EvenSet {
                set: s,
                size: family.set(s).len(),
            });
        }
    }
    Ok(())
}

/// The complete, duplicate-free, canonically sorted list of bisecting
/// arrangements of a valid all-odd family.
///
/// The search space is exact: one representative per set, matched into
/// pairs. An empty result would contradict the parity theorem and is
/// returned as-is rather than hidden.
pub fn enumerate_bisections(family: &PointFamily) -> Result<Vec<Arrangement>, BruteError> {
    check_preconditions(family)?;
    let table = SideTable::build(family);
    let k = family.set_count();
    let matchings = perfect_matchings(k);
    let sizes: Vec<usize> = (0..k).map(|s| family.set(s).len()).collect();

    let mut found = Vec::new();
    let mut seen: HashSet<_> = HashSet::new();
    let mut reps = vec![0usize; k];
    let mut parity = Mask::zeros(table.point_count);
    let mut on = Mask::zeros(table.point_count);
    let mut lines = Vec::with_capacity(k / 2);
    loop {
        for matching in &matchings {
            lines.clear();
            for &(a, b) in matching {
                lines.push((table.global_of[a][reps[a]], table.global_of[b][reps[b]]));
            }
            if table.candidate_bisects(&lines, &mut parity, &mut on) {
                let arr = Arrangement::from_ref_pairs(
                    &lines
                        .iter()
                        .map(|&(i, j)| (table.refs[i], table.refs[j]))
                        .collect::<Vec<_>>(),
                );
                // Distinct (representatives, matching) choices give distinct
                // line sets in general position.
                let fresh = seen.insert(arr.key());
                debug_assert!(fresh, "duplicate arrangement from distinct candidates");
                debug_assert!(arrangement::is_bisecting(family, &arr));
                found.push(arr);
            }
        }
        // Odometer over representative choices, set order.
        let mut s = k;
        loop {
            if s == 0 {
                let mut sorted = found;
                sorted.sort_by_key(Arrangement::key);
                return Ok(sorted);
            }
            s -= 1;
            reps[s] += 1;
            if reps[s] < sizes[s] {
                break;
            }
            reps[s] = 0;
        }
    }
}

/// Number of bisecting arrangements; odd for every valid all-odd family.
pub fn count_bisections(family: &PointFamily) -> Result<usize, BruteError> {
    Ok(enumerate_bisections(family)?.len())
}

/// First bisecting arrangement in canonical order.
pub fn first_bisection(family: &PointFamily) -> Result<Option<Arrangement>, BruteError> {
    Ok(enumerate_bisections(family)?.into_iter().next())
}
